use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{combine, StarAlgebra};
use crate::error::{CoreError, Result};
use crate::mat::MatElem;
use crate::subspace::{null_space, Subspace};
use crate::tol::ToleranceContext;

/// A linear map defined on a subspace of matrices, stored by the images of
/// the domain's orthonormal basis.  The codomain ambient dimension may differ
/// from the domain's (e.g. maps into a crossed-product representation).
#[derive(Debug, Clone)]
pub struct AlgebraMap {
    domain: Subspace,
    images: Vec<MatElem>,
    codomain_ambient: usize,
}

impl AlgebraMap {
    pub fn new(domain: Subspace, images: Vec<MatElem>) -> Result<Self> {
        if images.len() != domain.dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "{} basis images supplied for a {}-dimensional domain",
                images.len(),
                domain.dim()
            )));
        }
        let codomain_ambient = images
            .first()
            .map(MatElem::dim)
            .unwrap_or_else(|| domain.ambient_dim());
        if images.iter().any(|m| m.dim() != codomain_ambient) {
            return Err(CoreError::DimensionMismatch(
                "basis images live in different ambient dimensions".into(),
            ));
        }
        Ok(AlgebraMap {
            domain,
            images,
            codomain_ambient,
        })
    }

    /// x -> u x u* restricted to `domain`; u must be unitary.
    pub fn from_ad(u: &MatElem, domain: Subspace, ctx: &ToleranceContext) -> Result<Self> {
        if !u.is_unitary(ctx) {
            return Err(CoreError::ActionNotAutomorphic(
                "conjugation requires a unitary".into(),
            ));
        }
        if u.dim() != domain.ambient_dim() {
            return Err(CoreError::DimensionMismatch(
                "unitary and domain ambient dimensions differ".into(),
            ));
        }
        let ustar = u.adjoint();
        let images = domain.basis().iter().map(|b| &(u * b) * &ustar).collect();
        AlgebraMap::new(domain, images)
    }

    /// Build from an arbitrary assignment on the basis.
    pub fn from_fn(domain: Subspace, f: impl Fn(&MatElem) -> MatElem) -> Result<Self> {
        let images = domain.basis().iter().map(f).collect();
        AlgebraMap::new(domain, images)
    }

    pub fn identity_on(domain: Subspace) -> Self {
        let images = domain.basis().to_vec();
        let codomain_ambient = domain.ambient_dim();
        AlgebraMap {
            domain,
            images,
            codomain_ambient,
        }
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn codomain_ambient_dim(&self) -> usize {
        self.codomain_ambient
    }

    pub fn basis_images(&self) -> &[MatElem] {
        &self.images
    }

    /// Apply to an element of the domain.  Errors if x lies outside.
    pub fn apply(&self, x: &MatElem, ctx: &ToleranceContext) -> Result<MatElem> {
        if !self.domain.contains(x, ctx) {
            return Err(CoreError::NotInAlgebra(format!(
                "map applied outside its domain (residual {:.3e})",
                self.domain.residual(x)
            )));
        }
        Ok(self.apply_projected(x))
    }

    /// Apply to the domain-projection of x without a membership check.
    pub fn apply_projected(&self, x: &MatElem) -> MatElem {
        let mut out = MatElem::zeros(self.codomain_ambient);
        for (b, img) in self.domain.basis().iter().zip(&self.images) {
            let c = b.hs_inner(x);
            out = &out + &img.scale(c);
        }
        out
    }

    /// self after other: x -> self(other(x)).
    pub fn compose(&self, other: &AlgebraMap, ctx: &ToleranceContext) -> Result<AlgebraMap> {
        let images = other
            .images
            .iter()
            .map(|y| self.apply(y, ctx))
            .collect::<Result<Vec<_>>>()?;
        AlgebraMap::new(other.domain.clone(), images)
    }

    pub fn image_subspace(&self, ctx: &ToleranceContext) -> Result<Subspace> {
        Subspace::span(self.codomain_ambient, &self.images, ctx)
    }

    /// Kernel inside the domain.
    pub fn kernel(&self, ctx: &ToleranceContext) -> Result<Subspace> {
        let k = self.domain.dim();
        let n2 = self.codomain_ambient * self.codomain_ambient;
        let mut m = DMatrix::<Complex64>::zeros(n2, k.max(1));
        for (j, img) in self.images.iter().enumerate() {
            m.set_column(j, &img.vectorize());
        }
        let null = null_space(&m, ctx);
        let mats: Vec<MatElem> = null
            .iter()
            .map(|c| combine(self.domain.basis(), c))
            .collect();
        Subspace::span(self.domain.ambient_dim(), &mats, ctx)
    }

    pub fn is_identity_on_domain(&self, ctx: &ToleranceContext) -> bool {
        self.domain
            .basis()
            .iter()
            .zip(&self.images)
            .all(|(b, img)| img.approx_eq(b, ctx))
    }

    /// Multiplicative, *-preserving, and a linear bijection of `alg` onto
    /// itself.  `alg.space` must equal the map's domain.
    pub fn is_star_automorphism_of(&self, alg: &StarAlgebra, ctx: &ToleranceContext) -> bool {
        if !alg.space.equals(&self.domain, ctx) {
            return false;
        }
        let image = match self.image_subspace(ctx) {
            Ok(s) => s,
            Err(_) => return false,
        };
        if !image.equals(&alg.space, ctx) {
            return false;
        }
        self.is_star_homomorphism(ctx)
    }

    /// Multiplicative and *-preserving on the domain (which must be
    /// product-closed for the check to make sense).
    pub fn is_star_homomorphism(&self, ctx: &ToleranceContext) -> bool {
        match self.star_homomorphism_defect(ctx) {
            Ok(d) => d <= ctx.eq_bound(1.0),
            Err(_) => false,
        }
    }

    /// Largest violation of multiplicativity and adjoint-preservation over
    /// the basis; errors when the domain is not product- or *-closed.
    pub fn star_homomorphism_defect(&self, ctx: &ToleranceContext) -> Result<f64> {
        let basis = self.domain.basis();
        let mut worst = 0.0f64;
        for (i, a) in basis.iter().enumerate() {
            let fa = &self.images[i];
            let a_star = a.adjoint();
            if !self.domain.contains(&a_star, ctx) {
                return Err(CoreError::NotStarClosed {
                    residual: self.domain.residual(&a_star),
                });
            }
            worst = worst.max((&self.apply_projected(&a_star) - &fa.adjoint()).norm_hs());
            for (j, b) in basis.iter().enumerate() {
                let ab = a * b;
                if !self.domain.contains(&ab, ctx) {
                    return Err(CoreError::NotAnAlgebra(
                        "homomorphism domain is not product-closed".into(),
                    ));
                }
                let lhs = self.apply_projected(&ab);
                worst = worst.max((&lhs - &(fa * &self.images[j])).norm_hs());
            }
        }
        Ok(worst)
    }

    /// Largest subspace of the common domain fixed pointwise by all maps.
    pub fn joint_fixed_subspace(maps: &[AlgebraMap], ctx: &ToleranceContext) -> Result<Subspace> {
        let first = maps
            .first()
            .ok_or_else(|| CoreError::DimensionMismatch("no maps supplied".into()))?;
        let domain = &first.domain;
        let k = domain.dim();
        let n2 = domain.ambient_dim() * domain.ambient_dim();
        let mut m = DMatrix::<Complex64>::zeros(n2 * maps.len(), k);
        for (mi, map) in maps.iter().enumerate() {
            if !map.domain.equals(domain, ctx) || map.codomain_ambient != domain.ambient_dim() {
                return Err(CoreError::DimensionMismatch(
                    "fixed subspace requires a common endo-domain".into(),
                ));
            }
            for (j, b) in domain.basis().iter().enumerate() {
                let diff = (&map.images[j] - b).vectorize();
                for r in 0..n2 {
                    m[(mi * n2 + r, j)] = diff[r];
                }
            }
        }
        let null = null_space(&m, ctx);
        let mats: Vec<MatElem> = null.iter().map(|c| combine(domain.basis(), c)).collect();
        Subspace::span(domain.ambient_dim(), &mats, ctx)
    }
}

/// Fixed-point *-algebra of a family of *-automorphisms of `alg`.
pub fn fixed_subalgebra(
    alg: &StarAlgebra,
    maps: &[AlgebraMap],
    ctx: &ToleranceContext,
) -> Result<StarAlgebra> {
    if maps.is_empty() {
        return Ok(alg.clone());
    }
    let space = AlgebraMap::joint_fixed_subspace(maps, ctx)?;
    let unit = match &alg.unit {
        Some(u) if space.contains(u, ctx) => Some(u.clone()),
        _ => None,
    };
    StarAlgebra::new(space, unit, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::ONE_C;

    fn ctx() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn ad_is_automorphism_of_full_algebra() {
        let full = StarAlgebra::full(2, &ctx()).unwrap();
        // Hadamard-like unitary.
        let s = 1.0 / 2.0f64.sqrt();
        let u = MatElem::from_real_rows(2, &[s, s, s, -s]).unwrap();
        let ad = AlgebraMap::from_ad(&u, full.space.clone(), &ctx()).unwrap();
        assert!(ad.is_star_automorphism_of(&full, &ctx()));
    }

    #[test]
    fn ad_swap_on_diagonal_and_fixed_points() {
        // Swap unitary exchanges E11 and E22; fixed points are C 1.
        let diag = StarAlgebra::diagonal(2, &ctx()).unwrap();
        let sw = MatElem::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let ad = AlgebraMap::from_ad(&sw, diag.space.clone(), &ctx()).unwrap();
        assert!(ad.is_star_automorphism_of(&diag, &ctx()));
        let got = ad.apply(&MatElem::unit(2, 0, 0), &ctx()).unwrap();
        assert!(got.approx_eq(&MatElem::unit(2, 1, 1), &ctx()));
        let fixed = fixed_subalgebra(&diag, &[ad], &ctx()).unwrap();
        assert_eq!(fixed.dim(), 1);
        assert!(fixed.contains(&MatElem::identity(2), &ctx()));
    }

    #[test]
    fn apply_rejects_outside_domain() {
        let diag = StarAlgebra::diagonal(2, &ctx()).unwrap();
        let ad = AlgebraMap::identity_on(diag.space.clone());
        assert!(ad.apply(&MatElem::unit(2, 0, 1), &ctx()).is_err());
    }

    #[test]
    fn compose_matches_pointwise() {
        let full = StarAlgebra::full(2, &ctx()).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let u = MatElem::from_real_rows(2, &[s, s, s, -s]).unwrap();
        let sw = MatElem::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let a1 = AlgebraMap::from_ad(&u, full.space.clone(), &ctx()).unwrap();
        let a2 = AlgebraMap::from_ad(&sw, full.space.clone(), &ctx()).unwrap();
        let c = a1.compose(&a2, &ctx()).unwrap();
        let x = MatElem::from_rows(2, &[ONE_C, 2.0 * ONE_C, ONE_C * 0.0, -ONE_C]).unwrap();
        let lhs = c.apply(&x, &ctx()).unwrap();
        let rhs = a1.apply(&a2.apply(&x, &ctx()).unwrap(), &ctx()).unwrap();
        assert!(lhs.approx_eq(&rhs, &ctx()));
    }

    #[test]
    fn kernel_of_compression() {
        // xi(x) = E11 x E11 on Mat(2): kernel is span{E12, E21, E22}.
        let full = StarAlgebra::full(2, &ctx()).unwrap();
        let p = MatElem::unit(2, 0, 0);
        let xi = AlgebraMap::from_fn(full.space.clone(), |x| &(&p * x) * &p).unwrap();
        let ker = xi.kernel(&ctx()).unwrap();
        assert_eq!(ker.dim(), 3);
        assert!(ker.contains(&MatElem::unit(2, 1, 1), &ctx()));
        assert!(!ker.contains(&MatElem::unit(2, 0, 0), &ctx()));
    }
}
