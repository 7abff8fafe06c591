//! Globally adaptive Gauss–Kronrod (7/15) quadrature with a posteriori error estimates.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Values that can be integrated: a real vector space with a magnitude.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn plus(self, other: Self) -> Self;
    fn scaled(self, s: f64) -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl<const M: usize> QuadValue for [Complex64; M] {
    fn zero() -> Self {
        [Complex64::new(0.0, 0.0); M]
    }
    fn plus(self, other: Self) -> Self {
        let mut r = self;
        for (a, b) in r.iter_mut().zip(other) {
            *a += b;
        }
        r
    }
    fn scaled(self, s: f64) -> Self {
        self.map(|v| v * s)
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Stopping rule: stop once `error ≤ max(abs, rel·|value|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel, max_intervals: 2000 }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_max_intervals(mut self, m: usize) -> Self {
        self.max_intervals = m;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc.scaled(WGK[7]);
    let mut gauss = fc.scaled(WG[3]);
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx).plus(f(c + dx));
        kron = kron.plus(s.scaled(WGK[i]));
        if i % 2 == 1 {
            gauss = gauss.plus(s.scaled(WG[i / 2]));
        }
    }
    let kron = kron.scaled(h);
    let gauss = gauss.scaled(h);
    let err = kron.plus(gauss.scaled(-1.0)).magnitude();
    (kron, err)
}

/// Integrates `f` over `[a, b]`, bisecting the interval with the largest error estimate.
pub fn integrate<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Estimate<T>> {
    let est = integrate_best_effort(&mut f, a, b, tol);
    if est.error > tol.target(est.value.magnitude()) {
        return Err(Error::Quadrature { estimate: est.error, tolerance: tol.target(est.value.magnitude()) });
    }
    Ok(est)
}

/// As [`integrate`] but returns the estimate even when the tolerance was not reached.
pub fn integrate_best_effort<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Estimate<T> {
    let mut pieces: Vec<(f64, f64, T, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    pieces.push((a, b, v, e));
    let mut total = v;
    let mut err = e;
    let mut evaluations = 15;
    while err > tol.target(total.magnitude()) && pieces.len() < tol.max_intervals {
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, pv, pe) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            pieces.push((lo, hi, pv, pe));
            break;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
        total = total.plus(pv.scaled(-1.0)).plus(v1).plus(v2);
        err = err - pe + e1 + e2;
    }
    let value = pieces.iter().fold(T::zero(), |acc, p| acc.plus(p.2));
    let error = pieces.iter().map(|p| p.3).sum();
    Estimate { value, error, evaluations }
}
