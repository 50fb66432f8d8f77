use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::StarAlgebra;
use crate::cocycle::TwoCocycle;
use crate::constraint::{reduce_constraints, ConstraintSystem, State};
use crate::crossed::{twisted_crossed_product, CrossedProduct, GroupAction};
use crate::error::{CoreError, Result};
use crate::group::{Character, FiniteAbelianGroup, GroupElem};
use crate::hilbert::{from_crossed_product, intertwiner_space, HilbertSystem};
use crate::map::AlgebraMap;
use crate::mat::MatElem;
use crate::report::Verdict;
use crate::subspace::Subspace;
use crate::superselect::{run_pipeline, ConstrainedSystem, PipelineOutcome};
use crate::tol::ToleranceContext;

/// Fermion modes are realized on qubits; the carrier doubles per mode.
pub const MAX_FERMION_MODES: usize = 6;
/// Cap on the carrier of the outermost crossed product.
pub const MAX_FIELD_CARRIER: usize = 256;

/// A family of fermionic modes realized by the Jordan-Wigner construction
/// on (C^2)^(tensor modes).  Mode 0 sits in the leftmost tensor factor.
#[derive(Debug, Clone)]
pub struct FermionRegister {
    modes: usize,
}

impl FermionRegister {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 || modes > MAX_FERMION_MODES {
            return Err(CoreError::SizeGuard(format!(
                "fermion registers support 1..={MAX_FERMION_MODES} modes, got {modes}"
            )));
        }
        Ok(FermionRegister { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn carrier_dim(&self) -> usize {
        1 << self.modes
    }

    fn occupation(&self, basis_index: usize, mode: usize) -> u64 {
        ((basis_index >> (self.modes - 1 - mode)) & 1) as u64
    }

    /// Annihilator of one mode, with the parity string on earlier modes.
    pub fn annihilator(&self, mode: usize) -> Result<MatElem> {
        if mode >= self.modes {
            return Err(CoreError::DimensionMismatch(format!(
                "mode {mode} out of range for {} modes",
                self.modes
            )));
        }
        let n = self.carrier_dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for t in 0..n {
            if self.occupation(t, mode) == 1 {
                let s = t - (1 << (self.modes - 1 - mode));
                let mut sign = 1.0;
                for j in 0..mode {
                    if self.occupation(t, j) == 1 {
                        sign = -sign;
                    }
                }
                m[(s, t)] = Complex64::new(sign, 0.0);
            }
        }
        MatElem::new(m)
    }

    pub fn number_operator(&self, mode: usize) -> Result<MatElem> {
        let a = self.annihilator(mode)?;
        Ok(&a.adjoint() * &a)
    }

    /// Diagonal gauge phase exp(2 pi i sum_j phases_j n_j / modulus).
    pub fn phase_unitary(&self, phases: &[u64], modulus: u64) -> Result<MatElem> {
        if phases.len() != self.modes {
            return Err(CoreError::DimensionMismatch(
                "one phase exponent per mode is required".into(),
            ));
        }
        if modulus == 0 {
            return Err(CoreError::Schema("phase modulus must be positive".into()));
        }
        let n = self.carrier_dim();
        let mut diag = Vec::with_capacity(n);
        for t in 0..n {
            let mut e = 0u64;
            for (j, &f) in phases.iter().enumerate() {
                e = (e + f % modulus * self.occupation(t, j)) % modulus;
            }
            let angle = 2.0 * std::f64::consts::PI * e as f64 / modulus as f64;
            diag.push(Complex64::from_polar(1.0, angle));
        }
        Ok(MatElem::diagonal(&diag))
    }

    pub fn vacuum(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.carrier_dim()];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }
}

/// Twisted group algebra of a finite abelian group on its regular carrier:
/// the finite Weyl system with commutation phases given by the twist's
/// permutator.
#[derive(Debug, Clone)]
pub struct FiniteWeylSystem {
    pub group: FiniteAbelianGroup,
    pub twist: TwoCocycle,
    pub product: CrossedProduct,
}

impl FiniteWeylSystem {
    pub fn new(orders: Vec<u64>, exponents: &[Vec<i64>], ctx: &ToleranceContext) -> Result<Self> {
        let group = FiniteAbelianGroup::new(orders)?;
        let twist = if exponents.is_empty() {
            TwoCocycle::trivial(&group)
        } else {
            TwoCocycle::from_bilinear_exponents(&group, exponents, ctx)?
        };
        let base = StarAlgebra::full(1, ctx)?;
        let action = GroupAction::trivial(group.clone(), &base);
        let product = twisted_crossed_product(&base, &action, &twist, ctx)?;
        Ok(FiniteWeylSystem {
            group,
            twist,
            product,
        })
    }

    pub fn carrier_dim(&self) -> usize {
        self.group.order()
    }

    pub fn element(&self, t: &GroupElem) -> &MatElem {
        self.product.implementer(t)
    }

    /// Whether w_t acts as a plain translation on the regular carrier, i.e.
    /// the twist against every group element is 1.  Exact table lookup.
    pub fn translation_is_plain(&self, t: &GroupElem) -> bool {
        self.group
            .elements()
            .iter()
            .all(|s| (self.twist.eval(t, s) - Complex64::new(1.0, 0.0)).norm() < 1e-12)
    }
}

/// One local gauge-law datum: the gauge phases it applies per fermion mode
/// and the Weyl shift that compensates it.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct GaussLaw {
    pub phases: Vec<u64>,
    pub shift: Vec<u64>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ToySpec {
    pub modes: usize,
    pub charge_modulus: u64,
    pub weyl_orders: Vec<u64>,
    #[serde(default)]
    pub weyl_exponents: Vec<Vec<i64>>,
    pub gauss_laws: Vec<GaussLaw>,
}

/// The assembled model.  The matter algebra is fermions tensor Weyl; the
/// intermediate algebra adjoins the local and global gauge translations; the
/// field algebra adjoins the dual charge rotations on top.
#[derive(Debug, Clone)]
pub struct ToyModel {
    pub spec: ToySpec,
    pub fermions: FermionRegister,
    pub weyl: FiniteWeylSystem,
    pub matter: StarAlgebra,
    pub gauge_group: FiniteAbelianGroup,
    pub gauge_product: CrossedProduct,
    pub constraints: Vec<MatElem>,
    pub witness: State,
    pub dual_action: GroupAction,
    pub field_product: CrossedProduct,
    pub system: HilbertSystem,
}

pub fn build_toy_model(spec: &ToySpec, ctx: &ToleranceContext) -> Result<ToyModel> {
    let n_charge = spec.charge_modulus;
    if n_charge < 2 {
        return Err(CoreError::Schema(
            "charge modulus must be at least 2".into(),
        ));
    }
    let fermions = FermionRegister::new(spec.modes)?;
    let weyl = FiniteWeylSystem::new(spec.weyl_orders.clone(), &spec.weyl_exponents, ctx)?;

    let n_matter = fermions.carrier_dim() * weyl.carrier_dim();
    let gauge_group = FiniteAbelianGroup::new(vec![n_charge; spec.modes + 1])?;
    let field_carrier = gauge_group.order() * n_matter * n_charge as usize;
    if field_carrier > MAX_FIELD_CARRIER {
        return Err(CoreError::SizeGuard(format!(
            "field carrier dimension {field_carrier} exceeds cap {MAX_FIELD_CARRIER}"
        )));
    }

    // Matter algebra: full matrix algebra on the fermion carrier tensor the
    // Weyl algebra.
    let fermion_dim = fermions.carrier_dim();
    let mut matter_basis = Vec::with_capacity(fermion_dim * fermion_dim * weyl.group.order());
    for p in 0..fermion_dim {
        for q in 0..fermion_dim {
            let e = MatElem::unit(fermion_dim, p, q);
            for w in weyl.product.algebra.space.basis() {
                matter_basis.push(e.kron(w));
            }
        }
    }
    let matter_space = Subspace::span(n_matter, &matter_basis, ctx)?;
    let matter = StarAlgebra::new(matter_space, Some(MatElem::identity(n_matter)), ctx)?;

    // Local gauge action: one phase rotation per mode, plus the global one.
    let id_weyl = MatElem::identity(weyl.carrier_dim());
    let mut gauge_unitaries = Vec::with_capacity(spec.modes + 1);
    for j in 0..spec.modes {
        let mut phases = vec![0u64; spec.modes];
        phases[j] = 1;
        gauge_unitaries.push(fermions.phase_unitary(&phases, n_charge)?.kron(&id_weyl));
    }
    let global = fermions.phase_unitary(&vec![1; spec.modes], n_charge)?;
    gauge_unitaries.push(global.kron(&id_weyl));
    let gauge_action =
        GroupAction::from_generator_unitaries(gauge_group.clone(), &gauge_unitaries, &matter, ctx)?;
    let gauge_product = twisted_crossed_product(
        &matter,
        &gauge_action,
        &TwoCocycle::trivial(&gauge_group),
        ctx,
    )?;

    // Local gauge-law unitaries: Weyl compensator times gauge translation.
    let id_fermion = MatElem::identity(fermion_dim);
    let mut constraints = Vec::with_capacity(spec.gauss_laws.len());
    for law in &spec.gauss_laws {
        if law.phases.len() != spec.modes {
            return Err(CoreError::DimensionMismatch(
                "gauge-law phases must list one exponent per mode".into(),
            ));
        }
        if law.shift.len() != weyl.group.rank() {
            return Err(CoreError::DimensionMismatch(
                "gauge-law shift must be a Weyl group element".into(),
            ));
        }
        let t = weyl.group.neg(&weyl.group.reduce(&law.shift));
        if !weyl.translation_is_plain(&t) {
            return Err(CoreError::RadicalViolation(format!(
                "gauge-law shift {:?} twists against some translation",
                law.shift
            )));
        }
        let compensator = id_fermion.kron(weyl.element(&t));
        let mut g = law.phases.clone();
        g.push(0);
        constraints.push(gauge_product.element(&compensator, &gauge_group.reduce(&g), ctx)?);
    }

    // Product vector state: uniform over gauge translations, fermionic
    // vacuum, uniform over the Weyl carrier.  Fixed by every gauge-law
    // unitary by construction, hence exactly a constraint-satisfying state.
    let n_middle = gauge_group.order() * n_matter;
    let weight = 1.0 / ((gauge_group.order() * weyl.carrier_dim()) as f64).sqrt();
    let mut psi = vec![Complex64::new(0.0, 0.0); n_middle];
    for b in 0..gauge_group.order() {
        for w in 0..weyl.carrier_dim() {
            psi[b * n_matter + w] = Complex64::new(weight, 0.0);
        }
    }
    let witness = State::vector(&psi, ctx)?;

    // Dual charge rotation: phases the global translation coordinate.
    let mut gen_exp = vec![0u64; spec.modes + 1];
    gen_exp[spec.modes] = 1;
    let dual_char = Character::new(gauge_group.orders().to_vec(), gen_exp)?;
    let w_dual = gauge_product.dual_gauge_unitary(&dual_char);
    let charge_group = FiniteAbelianGroup::cyclic(n_charge);
    let dual_action = GroupAction::from_generator_unitaries(
        charge_group.clone(),
        &[w_dual],
        &gauge_product.algebra,
        ctx,
    )?;
    let field_product = twisted_crossed_product(
        &gauge_product.algebra,
        &dual_action,
        &TwoCocycle::trivial(&charge_group),
        ctx,
    )?;
    let system = from_crossed_product(&field_product, ctx)?;

    Ok(ToyModel {
        spec: spec.clone(),
        fermions,
        weyl,
        matter,
        gauge_group,
        gauge_product,
        constraints,
        witness,
        dual_action,
        field_product,
        system,
    })
}

impl ToyModel {
    fn global_translation_elem(&self, k: u64) -> GroupElem {
        let mut g = vec![0u64; self.spec.modes + 1];
        g[self.spec.modes] = k;
        self.gauge_group.reduce(&g)
    }

    /// Global gauge translation U_(0,k) on the intermediate carrier.
    pub fn global_translation(&self, k: u64) -> MatElem {
        self.gauge_product
            .implementer(&self.global_translation_elem(k))
            .clone()
    }

    /// Central element: global translation corrected by the inverse total
    /// charge phase.  Commutes with everything at the intermediate level but
    /// picks up a phase under the dual charge rotation.
    pub fn charge_corrected_translation(&self, k: u64, ctx: &ToleranceContext) -> Result<MatElem> {
        let n = self.spec.charge_modulus;
        let phases = vec![(n - k % n) % n; self.spec.modes];
        let q = self
            .fermions
            .phase_unitary(&phases, n)?
            .kron(&MatElem::identity(self.weyl.carrier_dim()));
        let embedded = self.gauge_product.embed.apply(&q, ctx)?;
        Ok(&embedded * &self.global_translation(k))
    }

    /// Member k of the charge-n constraint family: the global translation
    /// rescaled so that charge-n states satisfy it.
    pub fn sector_constraint(&self, charge: u64, k: u64) -> MatElem {
        let n = self.spec.charge_modulus;
        let angle = -2.0 * std::f64::consts::PI * ((k % n) * (charge % n) % n) as f64 / n as f64;
        self.global_translation(k)
            .scale(Complex64::from_polar(1.0, angle))
    }

    /// Spectral projection of the global translation at charge n: the Dirac
    /// states for the charge-n constraint family live exactly under it.
    pub fn charge_projection(&self, charge: u64) -> MatElem {
        let n = self.spec.charge_modulus;
        let dim = self.gauge_product.carrier_dim();
        let mut acc = MatElem::zeros(dim);
        for k in 0..n {
            acc = &acc + &self.sector_constraint(charge, k);
        }
        acc.scale(Complex64::new(1.0 / n as f64, 0.0))
    }

    /// The charge-sector constraint set for the T-procedure: the generator
    /// minus the unit, star-closed.
    pub fn sector_constraint_set(&self, charge: u64) -> Vec<MatElem> {
        let unit = MatElem::identity(self.gauge_product.carrier_dim());
        let v = self.sector_constraint(charge, 1);
        vec![&v - &unit, &v.adjoint() - &unit]
    }

    /// Constraint elements (unitary minus unit, star-closed) on the
    /// intermediate carrier.
    pub fn constraint_set(&self) -> Vec<MatElem> {
        let unit = MatElem::identity(self.gauge_product.carrier_dim());
        let mut out = Vec::with_capacity(2 * self.constraints.len());
        for v in &self.constraints {
            out.push(v - &unit);
            out.push(&v.adjoint() - &unit);
        }
        out
    }

    /// The same constraint set pushed into the field algebra.
    pub fn field_constraint_set(&self, ctx: &ToleranceContext) -> Result<Vec<MatElem>> {
        let unit = MatElem::identity(self.field_product.carrier_dim());
        let mut out = Vec::with_capacity(2 * self.constraints.len());
        for v in &self.constraints {
            let lifted = self.field_product.embed.apply(v, ctx)?;
            out.push(&lifted - &unit);
            out.push(&lifted.adjoint() - &unit);
        }
        Ok(out)
    }
}

/// Search for a unitary inside a subspace by polar-decomposing seeded
/// generic elements.  Conclusively absent when the space is zero.
fn unitary_in_space(space: &Subspace, ctx: &ToleranceContext) -> bool {
    if space.dim() == 0 {
        return false;
    }
    let n = space.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57_0001);
    for _ in 0..8 {
        let mut x = MatElem::zeros(n);
        for b in space.basis() {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            x = &x + &b.scale(z);
        }
        let xtx = x.raw().adjoint() * x.raw();
        let u = match MatElem::new(x.raw() * crate::algebra::pinv_sqrt(&xtx, ctx)) {
            Ok(u) => u,
            Err(_) => continue,
        };
        if u.is_unitary(ctx) && space.contains(&u, ctx) {
            return true;
        }
    }
    false
}

/// Model-level laws: matter relations, the exact witness, first-class
/// constraints, centrality and outerness of the charge rotation, and the
/// charge-sector family.
pub fn verify_toy_model(
    model: &ToyModel,
    bound: f64,
    ctx: &ToleranceContext,
) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let spec = &model.spec;
    let n = spec.charge_modulus;

    let matter_expect =
        model.fermions.carrier_dim() * model.fermions.carrier_dim() * model.weyl.group.order();
    let mid_expect = matter_expect * model.gauge_group.order();
    let field_expect = mid_expect * n as usize;
    out.push(Verdict::structural(
        "toy.layer-dimensions",
        "algebra-dimensions-multiply-along-the-tower",
        model.matter.dim() == matter_expect
            && model.gauge_product.algebra.dim() == mid_expect
            && model.field_product.algebra.dim() == field_expect,
        format!(
            "matter {} gauge {} field {}",
            model.matter.dim(),
            model.gauge_product.algebra.dim(),
            model.field_product.algebra.dim()
        ),
    ));

    let mut car_res = 0.0f64;
    let fdim = model.fermions.carrier_dim();
    let id_f = MatElem::identity(fdim);
    for i in 0..spec.modes {
        let ai = model.fermions.annihilator(i)?;
        for j in 0..spec.modes {
            let aj = model.fermions.annihilator(j)?;
            let anti = &(&ai * &aj) + &(&aj * &ai);
            car_res = car_res.max(anti.norm_hs());
            let mixed = &(&ai * &aj.adjoint()) + &(&aj.adjoint() * &ai);
            let expect = if i == j {
                id_f.clone()
            } else {
                MatElem::zeros(fdim)
            };
            car_res = car_res.max((&mixed - &expect).norm_hs());
        }
    }
    out.push(Verdict::measured(
        "toy.car-relations",
        "fermion-modes-satisfy-anticommutation-relations",
        car_res,
        bound,
        format!("{} modes", spec.modes),
    ));

    let mut weyl_res = 0.0f64;
    for a in model.weyl.group.elements() {
        for b in model.weyl.group.elements() {
            let lhs = model.weyl.element(&a) * model.weyl.element(&b);
            let rhs = model
                .weyl
                .element(&model.weyl.group.add(&a, &b))
                .scale(model.weyl.twist.eval(&a, &b));
            weyl_res = weyl_res.max((&lhs - &rhs).norm_hs());
        }
    }
    out.push(Verdict::measured(
        "toy.weyl-twisted-law",
        "weyl-generators-multiply-through-the-twist",
        weyl_res,
        bound,
        "",
    ));

    let mut witness_res = 0.0f64;
    for v in &model.constraints {
        witness_res = witness_res.max((model.witness.eval(v) - Complex64::new(1.0, 0.0)).norm());
    }
    out.push(Verdict::measured(
        "toy.witness-satisfies-gauge-laws",
        "product-state-gives-every-gauge-law-expectation-one",
        witness_res,
        bound,
        format!("{} laws", model.constraints.len()),
    ));

    let mid = &model.gauge_product.algebra;
    let reduction = reduce_constraints(
        &ConstraintSystem::new(mid.clone(), model.constraint_set(), ctx)?,
        ctx,
    )?;
    out.push(Verdict::structural(
        "toy.gauge-laws-first-class",
        "gauge-law-constraint-set-is-first-class",
        reduction.first_class,
        format!(
            "kernel support rank {} of {}",
            reduction.support.rank,
            mid.ambient_dim()
        ),
    ));

    let mut invariant_res = 0.0f64;
    for k in charge_elems(n) {
        let rho = model.dual_action.map(&k);
        for v in &model.constraints {
            invariant_res = invariant_res.max((&rho.apply_projected(v) - v).norm_hs());
        }
    }
    out.push(Verdict::measured(
        "toy.gauge-laws-dual-invariant",
        "charge-rotation-fixes-every-gauge-law",
        invariant_res,
        bound,
        "",
    ));

    let center = mid.center(ctx)?;
    let mut central_res = 0.0f64;
    let mut phase_res = 0.0f64;
    let mut moved = 0.0f64;
    for k in 1..n {
        let w = model.charge_corrected_translation(k, ctx)?;
        central_res = central_res.max(center.space.residual(&w));
        let rho = model.dual_action.map(&vec![1u64]);
        let expect = w.scale(Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * k as f64 / n as f64,
        ));
        let turned = rho.apply_projected(&w);
        phase_res = phase_res.max((&turned - &expect).norm_hs());
        moved = moved.max((&turned - &w).norm_hs());
    }
    out.push(Verdict::measured(
        "toy.corrected-translations-central",
        "charge-corrected-translations-lie-in-the-center",
        central_res,
        bound,
        "",
    ));
    out.push(Verdict::measured(
        "toy.dual-rotation-phases-center",
        "charge-rotation-rescales-corrected-translations-by-a-root-of-unity",
        phase_res,
        bound,
        "",
    ));

    let outer_by_center = moved > ctx.eq_bound(1.0);
    out.push(Verdict::structural(
        "toy.dual-rotation-outer-by-center",
        "charge-rotation-moves-a-central-element",
        outer_by_center,
        format!("largest central movement {moved:.3e}"),
    ));

    let identity = AlgebraMap::identity_on(mid.space.clone());
    let mut outer_by_arrows = true;
    let mut arrow_dims = Vec::new();
    for k in charge_elems(n).into_iter().skip(1) {
        let rho = model.dual_action.map(&k).clone();
        let arrows = intertwiner_space(&identity, &rho, &mid.space, ctx)?;
        arrow_dims.push(arrows.dim());
        if unitary_in_space(&arrows, ctx) {
            outer_by_arrows = false;
        }
    }
    out.push(Verdict::structural(
        "toy.dual-rotation-outer-by-arrows",
        "no-unitary-intertwines-identity-with-a-charge-rotation",
        outer_by_arrows,
        format!("arrow space dims {arrow_dims:?}"),
    ));
    out.push(Verdict::structural(
        "toy.outer-tests-agree",
        "center-movement-test-matches-intertwiner-test",
        outer_by_center == outer_by_arrows,
        format!("center {outer_by_center}, arrows {outer_by_arrows}"),
    ));

    let mut shift_res = 0.0f64;
    for k in 0..n {
        let rho = model.dual_action.map(&vec![k]);
        for charge in 0..n {
            for j in 0..n {
                let upstairs = model.sector_constraint((charge + k) % n, j);
                let downstairs = model.sector_constraint(charge, j);
                shift_res =
                    shift_res.max((&rho.apply_projected(&upstairs) - &downstairs).norm_hs());
            }
        }
    }
    out.push(Verdict::measured(
        "toy.sector-family-shift",
        "charge-rotation-shifts-the-sector-constraint-family",
        shift_res,
        bound,
        "",
    ));

    let dim_mid = model.gauge_product.carrier_dim();
    let mut sum = MatElem::zeros(dim_mid);
    let mut overlap = 0.0f64;
    let mut all_nonzero = true;
    let mut supports = Vec::with_capacity(n as usize);
    for charge in 0..n {
        let q = model.charge_projection(charge);
        if q.norm_hs() <= ctx.eq_bound(1.0) {
            all_nonzero = false;
        }
        sum = &sum + &q;
        supports.push(q);
    }
    for (i, a) in supports.iter().enumerate() {
        for b in supports.iter().skip(i + 1) {
            overlap = overlap.max((a * b).norm_hs());
        }
    }
    out.push(Verdict::measured(
        "toy.charge-sectors-disjoint",
        "distinct-charge-supports-are-orthogonal",
        overlap,
        bound,
        "",
    ));
    out.push(Verdict::measured(
        "toy.charge-sectors-exhaust",
        "charge-supports-resolve-the-identity",
        (&sum - &MatElem::identity(dim_mid)).norm_hs(),
        bound,
        "",
    ));
    out.push(Verdict::structural(
        "toy.charge-sectors-nonempty",
        "every-charge-support-is-nonzero",
        all_nonzero,
        format!("{n} charges"),
    ));

    let mut family_support_res = 0.0f64;
    let mut family_shift_res = 0.0f64;
    let mut reductions = Vec::with_capacity(n as usize);
    for charge in 0..n {
        let red = reduce_constraints(
            &ConstraintSystem::new(mid.clone(), model.sector_constraint_set(charge), ctx)?,
            ctx,
        )?;
        let complement = &MatElem::identity(dim_mid) - &red.support.elem;
        family_support_res =
            family_support_res.max((&complement - &supports[charge as usize]).norm_hs());
        reductions.push(red);
    }
    let rho1 = model.dual_action.map(&vec![1u64]);
    for charge in 0..n {
        let upstairs = &reductions[((charge + 1) % n) as usize].support.elem;
        let downstairs = &reductions[charge as usize].support.elem;
        family_shift_res =
            family_shift_res.max((&rho1.apply_projected(upstairs) - downstairs).norm_hs());
    }
    out.push(Verdict::measured(
        "toy.charge-reduction-supports",
        "charge-family-reductions-have-the-spectral-supports",
        family_support_res,
        bound,
        "",
    ));
    out.push(Verdict::measured(
        "toy.charge-reduction-shift",
        "charge-rotation-shifts-the-reduction-supports",
        family_shift_res,
        bound,
        "",
    ));

    Ok(out)
}

fn charge_elems(n: u64) -> Vec<GroupElem> {
    (0..n).map(|k| vec![k]).collect()
}

/// Run the constrained-superselection pipeline at the field level with the
/// local gauge laws as constraints.
pub fn toy_pipeline(model: &ToyModel, ctx: &ToleranceContext) -> Result<PipelineOutcome> {
    let constraints = model.field_constraint_set(ctx)?;
    let cs = ConstrainedSystem::new(model.system.clone(), constraints, ctx)?;
    run_pipeline(&cs, ctx)
}
