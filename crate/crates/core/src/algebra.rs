use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::mat::MatElem;
use crate::subspace::{null_space, Subspace};
use crate::tol::ToleranceContext;

/// A *-closed, product-closed subspace of the n x n matrices.
///
/// `unit` is the algebra's own identity when it has one: the ambient identity
/// for unital subalgebras, a subunit for corners like (1-P) A (1-P), `None`
/// for algebras without unit (e.g. a nontrivial left-ideal intersection).
/// The constructor verifies closure properties and the unit axioms; the data
/// model is a faithful finite-dimensional representation, so self-adjoint /
/// positive / projection predicates are checked directly on matrices.
#[derive(Debug, Clone)]
pub struct StarAlgebra {
    pub space: Subspace,
    pub unit: Option<MatElem>,
}

impl StarAlgebra {
    pub fn new(space: Subspace, unit: Option<MatElem>, ctx: &ToleranceContext) -> Result<Self> {
        let star_res = space.star_residual();
        if !space.is_star_closed(ctx) {
            return Err(CoreError::NotStarClosed { residual: star_res });
        }
        for a in space.basis() {
            for b in space.basis() {
                let p = a * b;
                if !space.contains(&p, ctx) {
                    return Err(CoreError::NotAnAlgebra(format!(
                        "a basis product leaves the span (residual {:.3e})",
                        space.residual(&p)
                    )));
                }
            }
        }
        if let Some(u) = &unit {
            if !u.is_hermitian(ctx) || !(u * u).approx_eq(u, ctx) {
                return Err(CoreError::NotAnAlgebra(
                    "unit must be a self-adjoint idempotent".into(),
                ));
            }
            if !space.contains(u, ctx) {
                return Err(CoreError::NotInAlgebra(
                    "unit must lie in the algebra".into(),
                ));
            }
            for b in space.basis() {
                if !(u * b).approx_eq(b, ctx) || !(b * u).approx_eq(b, ctx) {
                    return Err(CoreError::NotAnAlgebra(
                        "unit must act as a two-sided identity".into(),
                    ));
                }
            }
        }
        Ok(StarAlgebra { space, unit })
    }

    /// For internal construction sites where closure is guaranteed by the
    /// construction itself; no validation runs.
    pub(crate) fn from_parts_unchecked(space: Subspace, unit: Option<MatElem>) -> Self {
        StarAlgebra { space, unit }
    }

    /// Full matrix algebra on C^n.
    pub fn full(n: usize, ctx: &ToleranceContext) -> Result<Self> {
        let mut units = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                units.push(MatElem::unit(n, i, j));
            }
        }
        let space = Subspace::span(n, &units, ctx)?;
        Ok(StarAlgebra {
            space,
            unit: Some(MatElem::identity(n)),
        })
    }

    /// Diagonal matrices on C^n.
    pub fn diagonal(n: usize, ctx: &ToleranceContext) -> Result<Self> {
        let units: Vec<MatElem> = (0..n).map(|i| MatElem::unit(n, i, i)).collect();
        let space = Subspace::span(n, &units, ctx)?;
        Ok(StarAlgebra {
            space,
            unit: Some(MatElem::identity(n)),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn contains(&self, x: &MatElem, ctx: &ToleranceContext) -> bool {
        self.space.contains(x, ctx)
    }

    pub fn is_unital(&self) -> bool {
        self.unit.is_some()
    }

    pub fn is_abelian(&self, ctx: &ToleranceContext) -> bool {
        let b = self.space.basis();
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                if !x.commutator(y).is_zero(ctx) {
                    return false;
                }
            }
        }
        true
    }

    pub fn center(&self, ctx: &ToleranceContext) -> Result<StarAlgebra> {
        relative_commutant(&self.space, self, ctx)
    }
}

/// Span of pairwise products {s t : s in S, t in T}.
pub fn product_span(s: &Subspace, t: &Subspace, ctx: &ToleranceContext) -> Result<Subspace> {
    if s.ambient_dim() != t.ambient_dim() {
        return Err(CoreError::DimensionMismatch(
            "product span over different ambient dimensions".into(),
        ));
    }
    let mut prods = Vec::with_capacity(s.dim() * t.dim());
    for a in s.basis() {
        for b in t.basis() {
            prods.push(a * b);
        }
    }
    Subspace::span(s.ambient_dim(), &prods, ctx)
}

/// Smallest *-closed, product-closed span containing the generators,
/// optionally together with the ambient identity.  Iterates span-of-products
/// to a fixed point; the dimension is strictly increasing, so at most n^2
/// rounds occur.
pub fn generate_star_algebra(
    ambient: usize,
    gens: &[MatElem],
    adjoin_identity: bool,
    ctx: &ToleranceContext,
) -> Result<StarAlgebra> {
    let mut seed: Vec<MatElem> = Vec::new();
    for g in gens {
        seed.push(g.clone());
        seed.push(g.adjoint());
    }
    if adjoin_identity {
        seed.push(MatElem::identity(ambient));
    }
    let mut space = Subspace::span(ambient, &seed, ctx)?;
    loop {
        let prods = product_span(&space, &space, ctx)?;
        let next = space.sum(&prods, ctx)?;
        if next.dim() == space.dim() {
            space = next;
            break;
        }
        space = next;
        if space.dim() >= ambient * ambient {
            break;
        }
    }
    let unit = if adjoin_identity {
        Some(MatElem::identity(ambient))
    } else {
        None
    };
    StarAlgebra::new(space, unit, ctx)
}

/// {x in within : x s = s x for every s in S}.
///
/// Solved as one joint null-space problem over the coefficients of `within`'s
/// basis.  For *-closed S the result is again a *-algebra; `within`'s unit is
/// carried along when it commutes with S.
pub fn relative_commutant(
    s: &Subspace,
    within: &StarAlgebra,
    ctx: &ToleranceContext,
) -> Result<StarAlgebra> {
    let n = within.ambient_dim();
    if s.ambient_dim() != n {
        return Err(CoreError::DimensionMismatch(
            "relative commutant across different ambient dimensions".into(),
        ));
    }
    let k = within.dim();
    if k == 0 {
        return Ok(StarAlgebra::from_parts_unchecked(Subspace::zero(n), None));
    }
    let rows_per = n * n;
    let mut m = DMatrix::<Complex64>::zeros(rows_per * s.dim().max(1), k);
    if s.dim() == 0 {
        return StarAlgebra::new(within.space.clone(), within.unit.clone(), ctx);
    }
    for (si, sv) in s.basis().iter().enumerate() {
        for (j, bj) in within.space.basis().iter().enumerate() {
            let comm = bj.commutator(sv);
            let v = comm.vectorize();
            for r in 0..rows_per {
                m[(si * rows_per + r, j)] = v[r];
            }
        }
    }
    let null = null_space(&m, ctx);
    let mats: Vec<MatElem> = null
        .iter()
        .map(|c| combine(within.space.basis(), c))
        .collect();
    let space = Subspace::span(n, &mats, ctx)?;
    let unit = match &within.unit {
        Some(u) if s.basis().iter().all(|sv| u.commutator(sv).is_zero(ctx)) => Some(u.clone()),
        _ => None,
    };
    StarAlgebra::new(space, unit, ctx)
}

pub(crate) fn combine(basis: &[MatElem], coeffs: &DVector<Complex64>) -> MatElem {
    let n = basis[0].dim();
    let mut acc = MatElem::zeros(n);
    for (b, c) in basis.iter().zip(coeffs.iter()) {
        acc = &acc + &b.scale(*c);
    }
    acc
}

/// A self-adjoint idempotent with spectrum in {0, 1}.
#[derive(Debug, Clone)]
pub struct Projection {
    pub elem: MatElem,
    pub rank: usize,
}

impl Projection {
    pub fn new(elem: MatElem, ctx: &ToleranceContext) -> Result<Self> {
        if !elem.is_hermitian(ctx) {
            return Err(CoreError::NotAProjection("not self-adjoint".into()));
        }
        if !(&elem * &elem).approx_eq(&elem, ctx) {
            return Err(CoreError::NotAProjection("not idempotent".into()));
        }
        let tr = elem.trace();
        let rank = tr.re.round();
        if (tr.re - rank).abs() > 1e-6 || tr.im.abs() > 1e-6 || rank < 0.0 {
            return Err(CoreError::NotAProjection(format!(
                "trace {tr} is not a nonnegative integer"
            )));
        }
        Ok(Projection {
            elem,
            rank: rank as usize,
        })
    }

    pub fn zero(n: usize) -> Self {
        Projection {
            elem: MatElem::zeros(n),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            elem: MatElem::identity(n),
            rank: n,
        }
    }

    pub fn complement(&self) -> Projection {
        let n = self.elem.dim();
        Projection {
            elem: &MatElem::identity(n) - &self.elem,
            rank: n - self.rank,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rank == self.elem.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    /// Smallest projection dominating both, computed as the support of the
    /// *-closed span {self, other}.
    pub fn sup(&self, other: &Projection, ctx: &ToleranceContext) -> Result<Projection> {
        let span = Subspace::span(
            self.elem.dim(),
            &[self.elem.clone(), other.elem.clone()],
            ctx,
        )?;
        support_projection(&span, ctx)
    }
}

/// Support projection of a *-closed subspace: the spectral projection of
/// sum_i b_i b_i* onto its nonzero eigenvalues, equivalently the smallest
/// projection P with P x P = x for every x in S.
pub fn support_projection(s: &Subspace, ctx: &ToleranceContext) -> Result<Projection> {
    let n = s.ambient_dim();
    if !s.is_star_closed(ctx) {
        return Err(CoreError::NotStarClosed {
            residual: s.star_residual(),
        });
    }
    if s.dim() == 0 {
        return Ok(Projection::zero(n));
    }
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for b in s.basis() {
        acc += b.raw() * b.raw().adjoint();
    }
    let p = spectral_support(&acc, ctx)?;
    let proj = Projection::new(p, ctx)?;
    // Post-condition: compression by P is the identity on S.
    for b in s.basis() {
        let pbp = &(&proj.elem * b) * &proj.elem;
        if !pbp.approx_eq(b, ctx) {
            return Err(CoreError::invariant(
                "support projection must satisfy P x P = x on the subspace",
                (&pbp - b).norm_hs(),
            ));
        }
    }
    Ok(proj)
}

/// Spectral projection of a positive semidefinite matrix onto eigenvalues
/// >= rank_tol * lambda_max.
pub(crate) fn spectral_support(h: &DMatrix<Complex64>, ctx: &ToleranceContext) -> Result<MatElem> {
    let n = h.nrows();
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if lmax <= 0.0 {
        return Ok(MatElem::zeros(n));
    }
    let cutoff = ctx.rank_tol * lmax;
    let mut p = DMatrix::<Complex64>::zeros(n, n);
    for (i, l) in eig.eigenvalues.iter().enumerate() {
        if *l >= cutoff {
            let v = eig.eigenvectors.column(i);
            p += v * v.adjoint();
        }
    }
    MatElem::new(p)
}

/// Hermitian functional calculus t -> t^{-1/2} on the nonzero spectrum.
pub(crate) fn pinv_sqrt(h: &DMatrix<Complex64>, ctx: &ToleranceContext) -> DMatrix<Complex64> {
    let n = h.nrows();
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    if lmax <= 0.0 {
        return out;
    }
    let cutoff = ctx.rank_tol * lmax;
    for (i, l) in eig.eigenvalues.iter().enumerate() {
        if *l >= cutoff {
            let v = eig.eigenvectors.column(i);
            out += v * v.adjoint() * Complex64::new(1.0 / l.sqrt(), 0.0);
        }
    }
    out
}

/// Minimal central projections of a *-algebra, i.e. the block structure of
/// its Wedderburn decomposition in this representation.
///
/// A deterministic pseudo-random self-adjoint central element separates the
/// blocks; its spectral projections are validated to lie in the algebra and
/// to be minimal in the center, with a redraw on unlucky eigenvalue
/// collisions.
pub fn minimal_central_projections(
    alg: &StarAlgebra,
    ctx: &ToleranceContext,
) -> Result<Vec<Projection>> {
    let n = alg.ambient_dim();
    let center = alg.center(ctx)?;
    if center.dim() == 0 {
        return Ok(Vec::new());
    }
    let herm: Vec<MatElem> = center
        .space
        .basis()
        .iter()
        .flat_map(|b| {
            let re = &(b + &b.adjoint()).scale(Complex64::new(0.5, 0.0));
            let im = &(b - &b.adjoint()).scale(Complex64::new(0.0, -0.5));
            [re.clone(), im.clone()]
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    'attempt: for _ in 0..16 {
        let mut z = MatElem::zeros(n);
        for h in &herm {
            let c: f64 = rng.gen_range(-1.0..1.0);
            z = &z + &h.scale(Complex64::new(c, 0.0));
        }
        let eig = nalgebra::SymmetricEigen::new(z.raw().clone());
        let mut evs: Vec<(f64, usize)> = eig.eigenvalues.iter().cloned().zip(0..).collect();
        evs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let scale = evs
            .iter()
            .map(|e| e.0.abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let gap = 1e-6 * scale;
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (val, idx) in &evs {
            match clusters.last_mut() {
                Some(c) if (val - eig.eigenvalues[*c.last().unwrap()]).abs() < gap => c.push(*idx),
                _ => clusters.push(vec![*idx]),
            }
        }
        let mut projs = Vec::new();
        for cluster in &clusters {
            let mut p = DMatrix::<Complex64>::zeros(n, n);
            for &i in cluster {
                let v = eig.eigenvectors.column(i);
                p += v * v.adjoint();
            }
            let pm = MatElem::new(p)?;
            if !center.contains(&pm, ctx) {
                continue 'attempt;
            }
            // Minimality inside the center: p Z p must be one-dimensional.
            let pzp: Vec<MatElem> = center
                .space
                .basis()
                .iter()
                .map(|zb| &(&pm * zb) * &pm)
                .collect();
            let pzp_span = Subspace::span(n, &pzp, ctx)?;
            if pzp_span.dim() != 1 {
                continue 'attempt;
            }
            projs.push(Projection::new(pm, ctx)?);
        }
        if projs.len() == clusters.len() {
            return Ok(projs);
        }
    }
    Err(CoreError::invariant(
        "central decomposition did not stabilize",
        f64::NAN,
    ))
}

/// Murray-von Neumann equivalence of two projections inside an algebra:
/// returns a partial isometry v in `within` with v v* = e and v* v = f when
/// one exists, `None` otherwise.
///
/// Existence is decided exactly by comparing matrix ranks of e and f cut down
/// by each minimal central projection (rank in the representation is the
/// block rank times the block multiplicity, so equality of matrix ranks per
/// block is equivalence).  The isometry is produced from the polar part of a
/// generic element of {x in within : e x f = x}, which stays inside the
/// algebra because it is a functional-calculus expression.
pub fn mvn_equivalence(
    e: &Projection,
    f: &Projection,
    within: &StarAlgebra,
    ctx: &ToleranceContext,
) -> Result<Option<MatElem>> {
    let n = within.ambient_dim();
    if !within.contains(&e.elem, ctx) || !within.contains(&f.elem, ctx) {
        return Err(CoreError::NotInAlgebra(
            "both projections must lie in the ambient algebra".into(),
        ));
    }
    if e.elem.approx_eq(&f.elem, ctx) {
        return Ok(Some(e.elem.clone()));
    }
    let blocks = minimal_central_projections(within, ctx)?;
    for z in &blocks {
        let re = matrix_rank(&(&z.elem * &e.elem), ctx);
        let rf = matrix_rank(&(&z.elem * &f.elem), ctx);
        if re != rf {
            return Ok(None);
        }
    }
    // Corner space {x : e x f = x}, solved over the algebra's coefficients.
    let basis = within.space.basis();
    let k = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(n * n, k);
    for (j, b) in basis.iter().enumerate() {
        let exf = &(&e.elem * b) * &f.elem;
        m.set_column(j, &(&exf - b).vectorize());
    }
    let corner_coeffs = null_space(&m, ctx);
    if corner_coeffs.is_empty() {
        return Ok(None);
    }
    let corner: Vec<MatElem> = corner_coeffs.iter().map(|c| combine(basis, c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a77_1e5e);
    for _ in 0..12 {
        let mut x = MatElem::zeros(n);
        for c in &corner {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            x = &x + &c.scale(z);
        }
        let xtx = x.raw().adjoint() * x.raw();
        let v = MatElem::new(x.raw() * pinv_sqrt(&xtx, ctx))?;
        let vvt = MatElem::new(v.raw() * v.raw().adjoint())?;
        let vtv = MatElem::new(v.raw().adjoint() * v.raw())?;
        if vvt.approx_eq(&e.elem, ctx) && vtv.approx_eq(&f.elem, ctx) && within.contains(&v, ctx) {
            return Ok(Some(v));
        }
    }
    // Rank counts said the isometry exists; a generic element realizes it.
    Err(CoreError::invariant(
        "equivalence ranks matched but no partial isometry stabilized",
        f64::NAN,
    ))
}

/// Rank of a matrix built from unit-scale data: singular values are cut
/// relative to `max(sigma_max, 1)`, so an all-noise product counts as zero.
pub(crate) fn matrix_rank(x: &MatElem, ctx: &ToleranceContext) -> usize {
    let gram = x.raw().adjoint() * x.raw();
    let lams = gram.symmetric_eigenvalues();
    let lmax = lams.iter().cloned().fold(0.0f64, f64::max);
    if lmax <= 0.0 {
        return 0;
    }
    let sigma_cut = ctx.rank_tol * lmax.sqrt().max(1.0);
    let cut = (sigma_cut * sigma_cut).max(lmax * crate::subspace::GRAM_REL_FLOOR);
    lams.iter().filter(|l| **l > cut).count()
}

/// Solve {x in within : x * d in target and d * x in target for all d in s}.
/// This is the idealizer-style membership problem used to cross-check
/// commutant descriptions of observable algebras.
pub fn two_sided_stabilizer(
    s: &Subspace,
    target: &Subspace,
    within: &StarAlgebra,
    ctx: &ToleranceContext,
) -> Result<Subspace> {
    let n = within.ambient_dim();
    let basis = within.space.basis();
    let k = basis.len();
    if k == 0 || s.dim() == 0 {
        return Ok(within.space.clone());
    }
    let rows_per = n * n;
    let mut m = DMatrix::<Complex64>::zeros(2 * s.dim() * rows_per, k);
    for (si, sv) in s.basis().iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let left = bj * sv;
            let right = sv * bj;
            let lres = (&left - &target.project(&left)).vectorize();
            let rres = (&right - &target.project(&right)).vectorize();
            for r in 0..rows_per {
                m[(2 * si * rows_per + r, j)] = lres[r];
                m[((2 * si + 1) * rows_per + r, j)] = rres[r];
            }
        }
    }
    let null = null_space(&m, ctx);
    let mats: Vec<MatElem> = null.iter().map(|c| combine(basis, c)).collect();
    Subspace::span(n, &mats, ctx)
}

/// Deterministic pseudo-random Hermitian element of a subspace, for sampled
/// invariant checks.
pub fn sample_hermitian(s: &Subspace, seed: u64) -> MatElem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = MatElem::zeros(s.ambient_dim());
    for b in s.basis() {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        x = &x + &b.scale(z);
    }
    let xs = x.adjoint();
    (&x + &xs).scale(Complex64::new(0.5, 0.0))
}
