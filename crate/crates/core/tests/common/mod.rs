//! 320-bit reference values of H⁽¹⁾_ν for ν ∈ {0, ½, 1} from the ascending J/Y series.
//! Cancellation in the series costs at most ~30 decimal digits for |z| ≤ 30, far below the
//! ~96 digits carried.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex64;

const P: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;
const TERMS: usize = 260;
const EULER_GAMMA_DIGITS: &str = "0.577215664901532860606512090082402431042159335939923598805767";

#[derive(Clone)]
struct C {
    re: BigFloat,
    im: BigFloat,
}

pub struct Oracle {
    cc: Consts,
    pi: BigFloat,
    gamma: BigFloat,
}

fn real(v: f64) -> BigFloat {
    BigFloat::from_f64(v, P)
}

fn int(v: i64) -> BigFloat {
    BigFloat::from_i64(v, P)
}

impl C {
    fn new(re: BigFloat, im: BigFloat) -> Self {
        C { re, im }
    }
    fn add(&self, o: &C) -> C {
        C::new(self.re.add(&o.re, P, RM), self.im.add(&o.im, P, RM))
    }
    fn sub(&self, o: &C) -> C {
        C::new(self.re.sub(&o.re, P, RM), self.im.sub(&o.im, P, RM))
    }
    fn mul(&self, o: &C) -> C {
        let re = self.re.mul(&o.re, P, RM).sub(&self.im.mul(&o.im, P, RM), P, RM);
        let im = self.re.mul(&o.im, P, RM).add(&self.im.mul(&o.re, P, RM), P, RM);
        C::new(re, im)
    }
    fn scale(&self, s: &BigFloat) -> C {
        C::new(self.re.mul(s, P, RM), self.im.mul(s, P, RM))
    }
    fn div_real(&self, s: &BigFloat) -> C {
        C::new(self.re.div(s, P, RM), self.im.div(s, P, RM))
    }
    fn recip(&self) -> C {
        let d = self.re.mul(&self.re, P, RM).add(&self.im.mul(&self.im, P, RM), P, RM);
        C::new(self.re.div(&d, P, RM), self.im.neg().div(&d, P, RM))
    }
    fn abs(&self) -> BigFloat {
        self.re.mul(&self.re, P, RM).add(&self.im.mul(&self.im, P, RM), P, RM).sqrt(P, RM)
    }
    /// Principal square root.
    fn sqrt(&self) -> C {
        let a = self.abs();
        let two = int(2);
        let re = a.add(&self.re, P, RM).div(&two, P, RM).sqrt(P, RM);
        let mut im = a.sub(&self.re, P, RM).div(&two, P, RM).sqrt(P, RM);
        if self.im.is_negative() {
            im = im.neg();
        }
        C::new(re, im)
    }
    fn times_i(&self) -> C {
        C::new(self.im.neg(), self.re.clone())
    }
}

impl Oracle {
    pub fn new() -> Self {
        let mut cc = Consts::new().expect("constants cache");
        let pi = cc.pi(P, RM);
        let gamma = BigFloat::parse(EULER_GAMMA_DIGITS, Radix::Dec, P, RM, &mut cc);
        Oracle { cc, pi, gamma }
    }

    fn to_f64(&mut self, v: &BigFloat) -> f64 {
        let s = v.format(Radix::Dec, RoundingMode::ToEven, &mut self.cc).expect("format");
        s.parse().unwrap_or_else(|_| panic!("cannot parse {s}"))
    }

    fn to_complex(&mut self, v: &C) -> Complex64 {
        Complex64::new(self.to_f64(&v.re), self.to_f64(&v.im))
    }

    /// log w for Im w ≥ 0, w ≠ 0.
    fn ln(&mut self, w: &C) -> C {
        let modulus = w.abs().ln(P, RM, &mut self.cc);
        let arg = if w.re.is_zero() {
            self.pi.div(&int(2), P, RM)
        } else {
            let a = w.im.div(&w.re, P, RM).atan(P, RM, &mut self.cc);
            if w.re.is_negative() {
                a.add(&self.pi, P, RM)
            } else {
                a
            }
        };
        C::new(modulus, arg)
    }

    /// Σ_m (−z²/4)^m / (m! (m + shift)!) for integer shift ≥ 0, and the same weighted by
    /// ψ(m+1) + ψ(m+1+shift) + 2γ = H_m + H_{m+shift}.
    fn integer_series(&self, z: &C, shift: usize) -> (C, C) {
        let w = z.mul(z).div_real(&int(-4));
        let mut term = C::new(int(1), int(0));
        for j in 1..=shift {
            term = term.div_real(&int(j as i64));
        }
        let mut sum = term.clone();
        let mut h_m = int(0);
        let mut h_ms = (1..=shift).fold(int(0), |acc, j| acc.add(&int(1).div(&int(j as i64), P, RM), P, RM));
        let mut weighted = term.scale(&h_m.add(&h_ms, P, RM));
        for m in 1..TERMS {
            let d = int((m * (m + shift)) as i64);
            term = term.mul(&w).div_real(&d);
            h_m = h_m.add(&int(1).div(&int(m as i64), P, RM), P, RM);
            h_ms = h_ms.add(&int(1).div(&int((m + shift) as i64), P, RM), P, RM);
            sum = sum.add(&term);
            weighted = weighted.add(&term.scale(&h_m.add(&h_ms, P, RM)));
        }
        (sum, weighted)
    }

    fn hankel_integer(&mut self, order: usize, z: Complex64) -> Complex64 {
        let zb = C::new(real(z.re), real(z.im));
        let half = zb.div_real(&int(2));
        let log_half = self.ln(&half);
        let (series, weighted) = self.integer_series(&zb, order);
        let two_over_pi = int(2).div(&self.pi, P, RM);
        let (j, y) = if order == 0 {
            // Y₀ = (2/π)[(log(z/2) + γ)J₀ − Σ H_m t_m].
            let j = series;
            let lg = log_half.add(&C::new(self.gamma.clone(), int(0)));
            let y = lg.mul(&j).sub(&weighted.div_real(&int(2))).scale(&two_over_pi);
            (j, y)
        } else {
            // Y₁ = −2/(πz) + (2/π)log(z/2)J₁ − (z/2π)Σ (ψ(m+1) + ψ(m+2)) u_m.
            let j = half.mul(&series);
            let psi_sum = weighted.sub(&series.scale(&self.gamma.mul(&int(2), P, RM)));
            let y = zb
                .recip()
                .scale(&two_over_pi)
                .scale(&int(-1))
                .add(&log_half.mul(&j).scale(&two_over_pi))
                .sub(&half.mul(&psi_sum).div_real(&self.pi));
            (j, y)
        };
        let h = j.add(&y.times_i());
        self.to_complex(&h)
    }

    /// J_{±½} by their series; H_{½} = J_{½} − i J_{−½}.
    fn hankel_half(&mut self, z: Complex64) -> Complex64 {
        let zb = C::new(real(z.re), real(z.im));
        let w = zb.mul(&zb).div_real(&int(-4));
        let sqrt_pi = self.pi.sqrt(P, RM);
        // term_m for ν: (−z²/4)^m / (m! Γ(m + ν + 1)).
        let mut plus = C::new(int(1).div(&sqrt_pi.div(&int(2), P, RM), P, RM), int(0));
        let mut minus = C::new(int(1).div(&sqrt_pi, P, RM), int(0));
        let (mut sp, mut sm) = (plus.clone(), minus.clone());
        for m in 1..TERMS {
            let mf = int(m as i64);
            let nu_plus = real(m as f64 + 0.5);
            let nu_minus = real(m as f64 - 0.5);
            plus = plus.mul(&w).div_real(&mf.mul(&nu_plus, P, RM));
            minus = minus.mul(&w).div_real(&mf.mul(&nu_minus, P, RM));
            sp = sp.add(&plus);
            sm = sm.add(&minus);
        }
        let root = zb.div_real(&int(2)).sqrt();
        let jp = root.mul(&sp);
        let jm = root.recip().mul(&sm);
        let h = jp.sub(&jm.times_i());
        self.to_complex(&h)
    }

    /// H⁽¹⁾_ν(z) for ν ∈ {0, ½, 1}.
    pub fn hankel1(&mut self, nu: f64, z: Complex64) -> Complex64 {
        match nu {
            v if v == 0.0 => self.hankel_integer(0, z),
            v if v == 1.0 => self.hankel_integer(1, z),
            v if v == 0.5 => self.hankel_half(z),
            _ => panic!("oracle supports orders 0, 1/2, 1"),
        }
    }
}

/// 40 points: 8 geometric radii in [0.1, 30] on 5 rays in the closed upper half-plane.
pub fn oracle_points() -> Vec<Complex64> {
    let angles = [0.0, 0.4, 1.2, 2.0, 2.8];
    let mut out = Vec::new();
    for i in 0..8 {
        let r = 0.1 * (300f64).powf(i as f64 / 7.0);
        for &a in &angles {
            out.push(Complex64::from_polar(r, a));
        }
    }
    out
}
