use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::StarAlgebra;
use crate::cocycle::TwoCocycle;
use crate::error::{CoreError, Result};
use crate::group::{FiniteAbelianGroup, GroupElem};
use crate::map::AlgebraMap;
use crate::mat::MatElem;
use crate::report::Verdict;
use crate::subspace::Subspace;
use crate::tol::ToleranceContext;

/// An action of a finite abelian group by *-automorphisms, one map per
/// element in enumeration order.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub group: FiniteAbelianGroup,
    maps: Vec<AlgebraMap>,
}

impl GroupAction {
    /// Validates that every map is a *-automorphism of `base`, that the map
    /// at the identity is the identity, and that composition follows the
    /// group law.
    pub fn new(
        group: FiniteAbelianGroup,
        maps: Vec<AlgebraMap>,
        base: &StarAlgebra,
        ctx: &ToleranceContext,
    ) -> Result<Self> {
        if maps.len() != group.order() {
            return Err(CoreError::ActionNotAutomorphic(format!(
                "{} maps supplied for a group of order {}",
                maps.len(),
                group.order()
            )));
        }
        for m in &maps {
            if !m.is_star_automorphism_of(base, ctx) {
                return Err(CoreError::ActionNotAutomorphic(
                    "a group element does not act as a *-automorphism".into(),
                ));
            }
        }
        let action = GroupAction { group, maps };
        if !action
            .map(&action.group.identity())
            .is_identity_on_domain(ctx)
        {
            return Err(CoreError::ActionNotAutomorphic(
                "identity element must act trivially".into(),
            ));
        }
        let elems = action.group.elements();
        for a in &elems {
            for b in &elems {
                let ab = action.group.add(a, b);
                let lhs = action.map(&ab);
                for (x, fx) in lhs.domain().basis().iter().zip(lhs.basis_images()) {
                    let rhs = action.map(a).apply(&action.map(b).apply(x, ctx)?, ctx)?;
                    if !rhs.approx_eq(fx, ctx) {
                        return Err(CoreError::ActionNotAutomorphic(format!(
                            "composition law fails by {:.3e}",
                            (&rhs - fx).norm_hs()
                        )));
                    }
                }
            }
        }
        Ok(action)
    }

    /// Action defined by one unitary per group generator: the element
    /// (g_1, ..., g_r) acts by conjugation with u_1^{g_1} ... u_r^{g_r}.
    /// Requires each Ad(u_i) to map `base` onto itself, Ad(u_i^{n_i}) to be
    /// trivial on it, and the conjugations to commute pairwise on it.
    pub fn from_generator_unitaries(
        group: FiniteAbelianGroup,
        unitaries: &[MatElem],
        base: &StarAlgebra,
        ctx: &ToleranceContext,
    ) -> Result<Self> {
        if unitaries.len() != group.rank() {
            return Err(CoreError::ActionNotAutomorphic(format!(
                "{} generator unitaries for a rank-{} group",
                unitaries.len(),
                group.rank()
            )));
        }
        for u in unitaries {
            if !u.is_unitary(ctx) {
                return Err(CoreError::ActionNotAutomorphic(
                    "generator implementer is not unitary".into(),
                ));
            }
        }
        let n = base.ambient_dim();
        let mut maps = Vec::with_capacity(group.order());
        for g in group.elements() {
            let mut w = MatElem::identity(n);
            for (i, &gi) in g.iter().enumerate() {
                for _ in 0..gi {
                    w = &w * &unitaries[i];
                }
            }
            maps.push(AlgebraMap::from_ad(&w, base.space.clone(), ctx)?);
        }
        GroupAction::new(group, maps, base, ctx)
    }

    pub fn trivial(group: FiniteAbelianGroup, base: &StarAlgebra) -> Self {
        let maps = (0..group.order())
            .map(|_| AlgebraMap::identity_on(base.space.clone()))
            .collect();
        GroupAction { group, maps }
    }

    pub fn map(&self, g: &GroupElem) -> &AlgebraMap {
        &self.maps[self.group.index_of(g)]
    }

    pub fn maps(&self) -> &[AlgebraMap] {
        &self.maps
    }
}

/// Regular realization of a twisted crossed product: the base acts block
/// diagonally on (group order) copies of its carrier, twisted translations
/// implement the group, and the product algebra is their joint span.
#[derive(Debug, Clone)]
pub struct CrossedProduct {
    pub base: StarAlgebra,
    pub group: FiniteAbelianGroup,
    pub cocycle: TwoCocycle,
    pub action: GroupAction,
    pub algebra: StarAlgebra,
    pub embed: AlgebraMap,
    pub implementers: Vec<MatElem>,
}

pub fn twisted_crossed_product(
    base: &StarAlgebra,
    action: &GroupAction,
    cocycle: &TwoCocycle,
    ctx: &ToleranceContext,
) -> Result<CrossedProduct> {
    let m = base.ambient_dim();
    let group = &action.group;
    if cocycle.group() != group {
        return Err(CoreError::InvalidCocycle(
            "cocycle group does not match the acting group".into(),
        ));
    }
    match &base.unit {
        Some(u) if u.approx_eq(&MatElem::identity(m), ctx) => {}
        _ => {
            return Err(CoreError::NotAnAlgebra(
                "crossed products need the base unit to be the ambient identity".into(),
            ))
        }
    }
    let order = group.order();
    let big = order * m;
    let elems = group.elements();

    // pi(a): block gamma carries the (-gamma)-translate of a.
    let mut embed_images = Vec::with_capacity(base.dim());
    for a in base.space.basis() {
        let mut blocks = DMatrix::<Complex64>::zeros(big, big);
        for g in &elems {
            let gi = group.index_of(g);
            let moved = action.map(&group.neg(g)).apply(a, ctx)?;
            blocks
                .view_mut((gi * m, gi * m), (m, m))
                .copy_from(moved.raw());
        }
        embed_images.push(MatElem::new(blocks)?);
    }
    let embed = AlgebraMap::new(base.space.clone(), embed_images.clone())?;

    // U_delta: block (delta gamma, gamma) holds omega(delta, gamma) times 1.
    let mut implementers = Vec::with_capacity(order);
    for d in &elems {
        let mut u = DMatrix::<Complex64>::zeros(big, big);
        for g in &elems {
            let row = group.index_of(&group.add(d, g));
            let col = group.index_of(g);
            let w = cocycle.eval(d, g);
            for i in 0..m {
                u[(row * m + i, col * m + i)] = w;
            }
        }
        implementers.push(MatElem::new(u)?);
    }

    let mut span_mats = Vec::with_capacity(base.dim() * order);
    for img in &embed_images {
        for u in &implementers {
            span_mats.push(img * u);
        }
    }
    let space = Subspace::span(big, &span_mats, ctx)?;
    if space.dim() != base.dim() * order {
        return Err(CoreError::invariant(
            "crossed product span must have dimension dim(base) * |group|",
            (base.dim() * order) as f64 - space.dim() as f64,
        ));
    }
    let algebra = StarAlgebra::new(space, Some(MatElem::identity(big)), ctx)?;

    Ok(CrossedProduct {
        base: base.clone(),
        group: group.clone(),
        cocycle: cocycle.clone(),
        action: action.clone(),
        algebra,
        embed,
        implementers,
    })
}

impl CrossedProduct {
    pub fn carrier_dim(&self) -> usize {
        self.algebra.ambient_dim()
    }

    pub fn implementer(&self, g: &GroupElem) -> &MatElem {
        &self.implementers[self.group.index_of(g)]
    }

    /// pi(a) U_g.
    pub fn element(&self, a: &MatElem, g: &GroupElem, ctx: &ToleranceContext) -> Result<MatElem> {
        Ok(&self.embed.apply(a, ctx)? * self.implementer(g))
    }

    /// Fourier component: the unique a_g with x = sum_g pi(a_g) U_g is read
    /// off the identity block of x U_g*.
    pub fn component(&self, x: &MatElem, g: &GroupElem) -> MatElem {
        let m = self.base.ambient_dim();
        let shifted = x * &self.implementer(g).adjoint();
        let e = self.group.index_of(&self.group.identity());
        let block = shifted.raw().view((e * m, e * m), (m, m)).clone_owned();
        MatElem::new(block).expect("fixed-size block of a finite matrix")
    }

    /// The dual gauge action on the product: for a character chi,
    /// pi(a) U_g picks up the phase chi(g).  Implemented by conjugation with
    /// the block phase unitary diag_gamma(chi(gamma) 1).
    pub fn dual_gauge_unitary(&self, chi: &crate::group::Character) -> MatElem {
        let m = self.base.ambient_dim();
        let big = self.carrier_dim();
        let mut w = DMatrix::<Complex64>::zeros(big, big);
        for g in self.group.elements() {
            let gi = self.group.index_of(&g);
            let z = chi.eval(&g);
            for i in 0..m {
                w[(gi * m + i, gi * m + i)] = z;
            }
        }
        MatElem::new(w).expect("finite entries by construction")
    }
}

/// Structural checks of the construction, reported as verdicts: unitary
/// implementers, the twisted product law, covariance of the embedding, the
/// Fourier dimension count, and faithfulness of the embedding.
pub fn verify_crossed_product(
    cp: &CrossedProduct,
    bound: f64,
    ctx: &ToleranceContext,
) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let elems = cp.group.elements();

    out.push(Verdict::measured(
        "crossed.embedding-homomorphism",
        "base-embedding-is-star-homomorphism",
        cp.embed.star_homomorphism_defect(ctx)?,
        bound,
        "",
    ));

    out.push(Verdict::measured(
        "crossed.embedding-faithful",
        "base-embedding-has-trivial-kernel",
        cp.embed.kernel(ctx)?.dim() as f64,
        0.0,
        "",
    ));

    let unit_res = match &cp.base.unit {
        Some(u) => {
            let lifted = cp.embed.apply(u, ctx)?;
            (&lifted - &MatElem::identity(cp.carrier_dim())).norm_hs()
        }
        None => f64::NAN,
    };
    out.push(Verdict::measured(
        "crossed.embedding-unital",
        "base-unit-maps-to-product-unit",
        unit_res,
        bound,
        "",
    ));

    let mut unitary_res = 0.0f64;
    for u in &cp.implementers {
        let uu = MatElem::new(u.raw() * u.raw().adjoint())?;
        unitary_res = unitary_res.max((&uu - &MatElem::identity(cp.carrier_dim())).norm_hs());
    }
    out.push(Verdict::measured(
        "crossed.implementers-unitary",
        "group-implementers-are-unitary",
        unitary_res,
        bound,
        format!("{} implementers", cp.implementers.len()),
    ));

    let mut law_res = 0.0f64;
    for a in &elems {
        for b in &elems {
            let lhs = cp.implementer(a) * cp.implementer(b);
            let rhs = cp
                .implementer(&cp.group.add(a, b))
                .scale(cp.cocycle.eval(a, b));
            law_res = law_res.max((&lhs - &rhs).norm_hs());
        }
    }
    out.push(Verdict::measured(
        "crossed.twisted-product-law",
        "implementer-products-follow-the-cocycle",
        law_res,
        bound,
        "",
    ));

    let mut cov_res = 0.0f64;
    for g in &elems {
        let u = cp.implementer(g);
        let ustar = u.adjoint();
        for a in cp.base.space.basis() {
            let lhs = &(u * &cp.embed.apply(a, ctx)?) * &ustar;
            let rhs = cp.embed.apply(&cp.action.map(g).apply(a, ctx)?, ctx)?;
            cov_res = cov_res.max((&lhs - &rhs).norm_hs());
        }
    }
    out.push(Verdict::measured(
        "crossed.covariance",
        "implementers-realize-the-action-on-the-base",
        cov_res,
        bound,
        "",
    ));

    out.push(Verdict::structural(
        "crossed.fourier-dimension",
        "product-dimension-is-base-dimension-times-group-order",
        cp.algebra.dim() == cp.base.dim() * cp.group.order(),
        format!(
            "dim = {}, base dim = {}, order = {}",
            cp.algebra.dim(),
            cp.base.dim(),
            cp.group.order()
        ),
    ));

    // Fourier components must reconstruct the element.
    let mut recon_res = 0.0f64;
    for x in cp.algebra.space.basis() {
        let mut acc = MatElem::zeros(cp.carrier_dim());
        for g in &elems {
            let comp = cp.component(x, g);
            acc = &acc + &(&cp.embed.apply_projected(&comp) * cp.implementer(g));
        }
        recon_res = recon_res.max((&acc - x).norm_hs());
    }
    out.push(Verdict::measured(
        "crossed.fourier-reconstruction",
        "components-reassemble-the-element",
        recon_res,
        bound,
        "",
    ));

    Ok(out)
}
