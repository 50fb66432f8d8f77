use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::tol::ToleranceContext;

/// A square complex matrix, the element type of every algebra here.
///
/// The ambient representation space is C^dim and the trace inner product
/// `<x, y> = tr(x* y)` turns the n x n matrices into a Hilbert space; all
/// subspace arithmetic happens in that inner product.
#[derive(Debug, Clone)]
pub struct MatElem {
    m: DMatrix<Complex64>,
}

pub const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE_C: Complex64 = Complex64::new(1.0, 0.0);
pub const I_C: Complex64 = Complex64::new(0.0, 1.0);

impl MatElem {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(CoreError::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::NonFiniteEntry(format!(
                "{}x{} matrix has NaN or infinite entries",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(MatElem { m })
    }

    /// Row-major complex entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(CoreError::DimensionMismatch(format!(
                "dim {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Row-major real entries.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_rows(dim, &v)
    }

    pub fn zeros(dim: usize) -> Self {
        MatElem {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        MatElem {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// Matrix unit E_{ij} (zero-based indices).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = ONE_C;
        MatElem { m }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        MatElem {
            m: DMatrix::from_diagonal(&DVector::from_row_slice(entries)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn raw(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_raw(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        MatElem {
            m: self.m.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        MatElem { m: &self.m * c }
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// Trace inner product `tr(self* other)`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = ZERO_C;
        for (a, b) in self.m.iter().zip(other.m.iter()) {
            acc += a.conj() * b;
        }
        acc
    }

    pub fn norm_hs(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator norm (largest singular value), read off the Gram spectrum.
    pub fn op_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        let gram = self.m.adjoint() * &self.m;
        gram.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        MatElem {
            m: &self.m * &other.m - &other.m * &self.m,
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        MatElem {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn is_zero(&self, ctx: &ToleranceContext) -> bool {
        self.norm_hs() <= ctx.eq_tol
    }

    pub fn approx_eq(&self, other: &Self, ctx: &ToleranceContext) -> bool {
        self.dim() == other.dim()
            && (&self.m - &other.m).norm() <= ctx.eq_bound(self.norm_hs().max(other.norm_hs()))
    }

    pub fn is_hermitian(&self, ctx: &ToleranceContext) -> bool {
        (&self.m - self.m.adjoint()).norm() <= ctx.eq_bound(self.norm_hs())
    }

    pub fn is_unitary(&self, ctx: &ToleranceContext) -> bool {
        let n = self.dim();
        (&self.m * self.m.adjoint() - DMatrix::<Complex64>::identity(n, n)).norm()
            <= ctx.eq_bound(1.0)
            && (self.m.adjoint() * &self.m - DMatrix::<Complex64>::identity(n, n)).norm()
                <= ctx.eq_bound(1.0)
    }

    /// Column-major vectorization, the coordinate map for subspace work.
    pub fn vectorize(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.m.as_slice())
    }

    pub fn from_vector(dim: usize, v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(CoreError::DimensionMismatch(format!(
                "vector of length {} cannot fill a {dim}x{dim} matrix",
                v.len()
            )));
        }
        Self::new(DMatrix::from_column_slice(dim, dim, v.as_slice()))
    }
}

impl std::ops::Add for &MatElem {
    type Output = MatElem;
    fn add(self, rhs: &MatElem) -> MatElem {
        MatElem {
            m: &self.m + &rhs.m,
        }
    }
}

impl std::ops::Sub for &MatElem {
    type Output = MatElem;
    fn sub(self, rhs: &MatElem) -> MatElem {
        MatElem {
            m: &self.m - &rhs.m,
        }
    }
}

impl std::ops::Mul for &MatElem {
    type Output = MatElem;
    fn mul(self, rhs: &MatElem) -> MatElem {
        MatElem {
            m: &self.m * &rhs.m,
        }
    }
}

impl std::ops::Neg for &MatElem {
    type Output = MatElem;
    fn neg(self) -> MatElem {
        MatElem { m: -&self.m }
    }
}

/// JSON form: explicit dimension plus row-major `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct MatElemWire {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for MatElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatElemWire { dim: n, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MatElemWire::deserialize(d)?;
        let entries: Vec<Complex64> = wire
            .entries
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        MatElem::from_rows(wire.dim, &entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(MatElem::from_real_rows(2, &[1.0, 0.0, f64::NAN, 0.0]).is_err());
        assert!(MatElem::from_real_rows(2, &[1.0, 0.0, f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn hs_inner_matches_trace_form() {
        let a = MatElem::from_rows(2, &[ONE_C, I_C, ZERO_C, 2.0 * ONE_C]).unwrap();
        let b = MatElem::from_rows(2, &[I_C, ONE_C, ONE_C, ZERO_C]).unwrap();
        let direct = (&a.adjoint() * &b).trace();
        let fast = a.hs_inner(&b);
        assert!((direct - fast).norm() < 1e-14);
    }

    #[test]
    fn vectorize_round_trip() {
        let a = MatElem::from_rows(
            3,
            &[
                ONE_C,
                I_C,
                ZERO_C,
                ZERO_C,
                2.0 * ONE_C,
                ONE_C,
                I_C,
                ZERO_C,
                -I_C,
            ],
        )
        .unwrap();
        let v = a.vectorize();
        let back = MatElem::from_vector(3, &v).unwrap();
        assert!(a.approx_eq(&back, &ToleranceContext::default()));
    }

    #[test]
    fn json_round_trip() {
        let a = MatElem::from_rows(2, &[ONE_C, I_C, ZERO_C, 2.0 * ONE_C]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        let back: MatElem = serde_json::from_str(&s).unwrap();
        assert!(a.approx_eq(&back, &ToleranceContext::default()));
    }

    #[test]
    fn unit_matrix_products() {
        // E_ij E_kl = delta_jk E_il
        let e01 = MatElem::unit(2, 0, 1);
        let e10 = MatElem::unit(2, 1, 0);
        let e00 = MatElem::unit(2, 0, 0);
        let ctx = ToleranceContext::default();
        assert!((&e01 * &e10).approx_eq(&e00, &ctx));
        assert!((&e01 * &e01).is_zero(&ctx));
    }
}
