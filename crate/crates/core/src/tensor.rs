use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Scalar entry type of a [`Tensor`].
pub trait Scalar:
    Copy + Default + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Square n×n matrix with n ∈ {1, 2, 3}; entries outside the active block are zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor<T> {
    n: usize,
    data: [[T; 3]; 3],
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=3).contains(&n), "tensor dimension must be 1, 2 or 3");
        Tensor { n, data: [[T::default(); 3]; 3] }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            t.data[i][i] = T::from_real(1.0);
        }
        t
    }

    /// `a·I + b·ûûᵀ` for a unit vector `u`.
    pub fn isotropic(a: T, b: T, unit: &[f64]) -> Self {
        let n = unit.len();
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut v = b * T::from_real(unit[i] * unit[j]);
                if i == j {
                    v = v + a;
                }
                t.data[i][j] = v;
            }
        }
        t
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[i][j] = f(i, j);
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(i < self.n && j < self.n);
        self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.n && j < self.n);
        self.data[i][j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.data[j][i])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Tensor<U> {
        Tensor::from_fn(self.n, |i, j| f(self.data[i][j]))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let m = self.data[i][j].modulus();
                s += m * m;
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut s: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s = s.max(self.data[i][j].modulus());
            }
        }
        s
    }

    /// Largest entrywise distance between two tensors of equal dimension.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        (*self - *other).max_abs()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.data[i][j] == self.data[j][i]))
    }

    /// Row-major entries of the active block.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                v.push(self.data[i][j]);
            }
        }
        v
    }
}

impl Tensor<Complex64> {
    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn re(&self) -> Tensor<f64> {
        self.map(|v| v.re)
    }

    pub fn im(&self) -> Tensor<f64> {
        self.map(|v| v.im)
    }
}

impl<T: Scalar> Add for Tensor<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_fn(self.n, |i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl<T: Scalar> Sub for Tensor<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_fn(self.n, |i, j| self.data[i][j] - rhs.data[i][j])
    }
}
