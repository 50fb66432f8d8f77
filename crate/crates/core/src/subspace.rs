use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::mat::MatElem;
use crate::tol::ToleranceContext;

/// A linear subspace of the n x n matrices, held as an orthonormal basis in
/// the trace inner product.
///
/// Equality of subspaces always means mutual containment at tolerance; bases
/// are never compared directly.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<MatElem>,
}

/// Inputs larger than this fall back to a two-phase orthonormalization that
/// avoids one giant Gram factorization; the rank cutoff stays relative to the
/// global largest singular value.
const GRAM_DIRECT_COLS: usize = 1024;

/// Relative eigenvalue floor for rank decisions on Gram matrices.  Working
/// with M*M squares the singular values, so the Hermitian eigensolver cannot
/// resolve sigma below about sqrt(eps) * sigma_max; this floor sits three
/// orders of magnitude above that noise.  The effective relative
/// singular-value cutoff is therefore max(rank_tol, ~3e-7).
pub(crate) const GRAM_REL_FLOOR: f64 = 1e-13;

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    /// Orthonormal span of arbitrary matrices.  The empty family yields the
    /// zero subspace.  Rank is decided by singular values relative to the
    /// largest one: sigma_i >= rank_tol * sigma_max.
    pub fn span(ambient: usize, mats: &[MatElem], ctx: &ToleranceContext) -> Result<Self> {
        for m in mats {
            if m.dim() != ambient {
                return Err(CoreError::DimensionMismatch(format!(
                    "span over ambient dim {ambient} got a {}x{} matrix",
                    m.dim(),
                    m.dim()
                )));
            }
        }
        let cols: Vec<DVector<Complex64>> = mats.iter().map(|m| m.vectorize()).collect();
        let basis_cols = orthonormal_columns(ambient * ambient, &cols, ctx);
        let basis = basis_cols
            .iter()
            .map(|c| MatElem::from_vector(ambient, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Subspace { ambient, basis })
    }

    pub fn from_orthonormal(ambient: usize, basis: Vec<MatElem>) -> Self {
        Subspace { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MatElem] {
        &self.basis
    }

    /// Orthogonal projection of x onto the span.
    pub fn project(&self, x: &MatElem) -> MatElem {
        let mut acc = MatElem::zeros(self.ambient);
        for b in &self.basis {
            let c = b.hs_inner(x);
            acc = &acc + &b.scale(c);
        }
        acc
    }

    /// Distance from x to the span in the trace norm.
    pub fn residual(&self, x: &MatElem) -> f64 {
        (x - &self.project(x)).norm_hs()
    }

    pub fn contains(&self, x: &MatElem, ctx: &ToleranceContext) -> bool {
        x.dim() == self.ambient && self.residual(x) <= ctx.eq_bound(x.norm_hs())
    }

    pub fn contains_subspace(&self, other: &Subspace, ctx: &ToleranceContext) -> bool {
        other.basis.iter().all(|b| self.contains(b, ctx))
    }

    pub fn equals(&self, other: &Subspace, ctx: &ToleranceContext) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && self.contains_subspace(other, ctx)
            && other.contains_subspace(self, ctx)
    }

    /// Largest basis-vector distance between the two spans, a symmetric
    /// residual for reports (zero iff the subspaces agree).
    pub fn mutual_residual(&self, other: &Subspace) -> f64 {
        let a = self
            .basis
            .iter()
            .map(|b| other.residual(b))
            .fold(0.0f64, f64::max);
        let b = other
            .basis
            .iter()
            .map(|b| self.residual(b))
            .fold(0.0f64, f64::max);
        a.max(b)
    }

    /// The image of the span under the adjoint; an orthonormal basis maps to
    /// an orthonormal basis.
    pub fn adjoint(&self) -> Subspace {
        Subspace {
            ambient: self.ambient,
            basis: self.basis.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn is_star_closed(&self, ctx: &ToleranceContext) -> bool {
        self.basis.iter().all(|b| self.contains(&b.adjoint(), ctx))
    }

    /// How far the span is from being *-closed.
    pub fn star_residual(&self) -> f64 {
        self.basis
            .iter()
            .map(|b| self.residual(&b.adjoint()))
            .fold(0.0f64, f64::max)
    }

    pub fn sum(&self, other: &Subspace, ctx: &ToleranceContext) -> Result<Subspace> {
        let mut mats: Vec<MatElem> = self.basis.clone();
        mats.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &mats, ctx)
    }

    /// Exact intersection via the null space of stacked orthogonal
    /// complements, computed inside span(self + other) so the stacked system
    /// stays small.
    pub fn intersect(&self, other: &Subspace, ctx: &ToleranceContext) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(CoreError::DimensionMismatch(
                "intersection of subspaces over different ambient dimensions".into(),
            ));
        }
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        let joint = self.sum(other, ctx)?;
        let w = joint.dim();
        // Gram coordinates of each projector inside the joint span.
        let gram = |sub: &Subspace| -> DMatrix<Complex64> {
            // (P_sub restricted to joint) in the joint basis: G[i][j] = <w_i, P_sub w_j>
            let mut g = DMatrix::zeros(w, w);
            for (j, wj) in joint.basis.iter().enumerate() {
                let p = sub.project(wj);
                for (i, wi) in joint.basis.iter().enumerate() {
                    g[(i, j)] = wi.hs_inner(&p);
                }
            }
            g
        };
        let ps = gram(self);
        let pt = gram(other);
        let id = DMatrix::<Complex64>::identity(w, w);
        let mut stacked = DMatrix::<Complex64>::zeros(2 * w, w);
        stacked.view_mut((0, 0), (w, w)).copy_from(&(&id - &ps));
        stacked.view_mut((w, 0), (w, w)).copy_from(&(&id - &pt));
        let null = null_space(&stacked, ctx);
        let mats: Vec<MatElem> = null
            .iter()
            .map(|c| {
                let mut acc = MatElem::zeros(self.ambient);
                for (i, wi) in joint.basis.iter().enumerate() {
                    acc = &acc + &wi.scale(c[i]);
                }
                acc
            })
            .collect();
        Subspace::span(self.ambient, &mats, ctx)
    }
}

/// Orthonormal columns spanning the given vectors, rank cut at
/// `rank_tol * sigma_max` (floored by [`GRAM_REL_FLOOR`]) on the Gram
/// spectrum.
///
/// Inputs are unit-scale data throughout the workbench (orthonormal basis
/// elements and their products, averages and compressions), so vectors with
/// norm below `rank_tol` are cancellation noise and count as zero; without
/// this floor an averaged-to-zero family would acquire noise rank.
pub(crate) fn orthonormal_columns(
    len: usize,
    cols: &[DVector<Complex64>],
    ctx: &ToleranceContext,
) -> Vec<DVector<Complex64>> {
    let nonzero: Vec<&DVector<Complex64>> =
        cols.iter().filter(|c| c.norm() > ctx.rank_tol).collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    if nonzero.len() <= GRAM_DIRECT_COLS {
        return gram_basis(len, &nonzero, ctx, None);
    }
    // Two-phase variant for wide inputs: global sigma_max first, then chunked
    // deflation against the accumulated basis with the same global cutoff.
    let sigma_max = power_sigma_max(&nonzero);
    let cutoff = ctx.rank_tol * sigma_max;
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for chunk in nonzero.chunks(GRAM_DIRECT_COLS) {
        let mut resid_cols: Vec<DVector<Complex64>> = Vec::new();
        for c in chunk {
            let mut r = (*c).clone();
            for b in &basis {
                let coef = b.dotc(&r);
                r -= b * coef;
            }
            if r.norm() > cutoff * 0.5 {
                resid_cols.push(r);
            }
        }
        if resid_cols.is_empty() {
            continue;
        }
        let refs: Vec<&DVector<Complex64>> = resid_cols.iter().collect();
        for col in gram_basis(len, &refs, ctx, Some(cutoff)) {
            // re-orthogonalize against earlier chunks for numerical hygiene
            let mut col = col;
            for b in &basis {
                let coef = b.dotc(&col);
                col -= b * coef;
            }
            let n = col.norm();
            if n > 0.5 {
                basis.push(col / Complex64::new(n, 0.0));
            }
        }
    }
    basis
}

/// Eigenpairs of the Gram matrix of the given columns, sorted by descending
/// eigenvalue with negative noise clamped to zero.
fn gram_eigen(cols: &[&DVector<Complex64>]) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let k = cols.len();
    let mut g = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = cols[i].dotc(cols[j]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    let eig = nalgebra::SymmetricEigen::new(g);
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let lams = idx.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let vecs = idx
        .iter()
        .map(|&i| eig.eigenvectors.column(i).clone_owned())
        .collect();
    (lams, vecs)
}

/// Orthonormal basis for the column span via Gram eigenvectors.  Directions
/// with singular value below `max(rank_tol * sigma_max, sigma_floor)` are
/// dropped, where `sigma_floor` defaults to the global Gram noise floor.
fn gram_basis(
    len: usize,
    cols: &[&DVector<Complex64>],
    ctx: &ToleranceContext,
    sigma_floor: Option<f64>,
) -> Vec<DVector<Complex64>> {
    let (lams, vecs) = gram_eigen(cols);
    let lmax = lams[0];
    if lmax <= 0.0 {
        return Vec::new();
    }
    let mut lam_cut = lmax * (ctx.rank_tol * ctx.rank_tol).max(GRAM_REL_FLOOR);
    if let Some(floor) = sigma_floor {
        lam_cut = lam_cut.max(floor * floor);
    }
    let mut out: Vec<DVector<Complex64>> = Vec::new();
    for (lam, v) in lams.iter().zip(&vecs) {
        if *lam <= lam_cut {
            break;
        }
        let mut u = DVector::<Complex64>::zeros(len);
        for (j, c) in cols.iter().enumerate() {
            u += *c * v[j];
        }
        // One deflation pass keeps the basis orthonormal to machine precision
        // even when eigenvalues cluster.
        for b in &out {
            let coef = b.dotc(&u);
            u -= b * coef;
        }
        let n = u.norm();
        if n > lam_cut.sqrt() * 0.5 {
            out.push(u / Complex64::new(n, 0.0));
        }
    }
    out
}

fn power_sigma_max(cols: &[&DVector<Complex64>]) -> f64 {
    // A few rounds of power iteration on A A* through the column list.
    let k = cols.len();
    let mut v = DVector::<Complex64>::from_element(k, Complex64::new(1.0, 0.0));
    v /= Complex64::new(v.norm(), 0.0);
    let mut sigma = 0.0f64;
    for _ in 0..12 {
        // w = A v
        let mut w = DVector::<Complex64>::zeros(cols[0].len());
        for (j, c) in cols.iter().enumerate() {
            w += *c * v[j];
        }
        // v = A* w
        let mut v2 = DVector::<Complex64>::zeros(k);
        for (j, c) in cols.iter().enumerate() {
            v2[j] = c.dotc(&w);
        }
        let n = v2.norm();
        if n == 0.0 {
            return 0.0;
        }
        sigma = n.sqrt();
        v = v2 / Complex64::new(n, 0.0);
    }
    sigma
}

/// Right null space of a rectangular complex matrix.
///
/// Callers assemble `m` from orthonormal-basis quantities, so its entries are
/// O(1) when the constraints they encode are nontrivial.  The null cutoff is
/// therefore floored at unit scale: a matrix that is all rounding noise has a
/// full null space rather than a noise-rank one.
pub(crate) fn null_space(
    m: &DMatrix<Complex64>,
    ctx: &ToleranceContext,
) -> Vec<DVector<Complex64>> {
    let ncols = m.ncols();
    if ncols == 0 {
        return Vec::new();
    }
    let standard_basis = || {
        (0..ncols)
            .map(|j| {
                let mut v = DVector::zeros(ncols);
                v[j] = Complex64::new(1.0, 0.0);
                v
            })
            .collect()
    };
    if m.nrows() == 0 {
        return standard_basis();
    }
    let cols: Vec<DVector<Complex64>> = (0..ncols).map(|j| m.column(j).clone_owned()).collect();
    let refs: Vec<&DVector<Complex64>> = cols.iter().collect();
    let (lams, vecs) = gram_eigen(&refs);
    let smax = lams[0].sqrt();
    let cutoff = ctx.rank_tol * smax.max(1.0);
    if smax <= cutoff {
        return standard_basis();
    }
    let lam_cut = (cutoff * cutoff).max(lams[0] * GRAM_REL_FLOOR);
    let mut out = Vec::new();
    for (lam, v) in lams.iter().zip(&vecs) {
        if *lam <= lam_cut {
            out.push(v.clone());
        }
    }
    out
}
