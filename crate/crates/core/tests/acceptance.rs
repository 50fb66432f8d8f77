//! Acceptance gate: one test per criterion.  Each test prints a single
//! pass/fail line (run with `-- --nocapture` to see them all) and enforces
//! its tolerance and, where stated, its time budget.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use workbench_core::algebra::StarAlgebra;
use workbench_core::constraint::{
    reduce_constraints, verify_reduction, verify_relative_consistency, ConstraintSystem,
};
use workbench_core::crossed::{verify_crossed_product, GroupAction};
use workbench_core::group::FiniteAbelianGroup;
use workbench_core::hilbert::{
    from_crossed_product, hilbert_system, verify_minimality, HilbertSystem,
};
use workbench_core::report::Verdict;
use workbench_core::scenario::{
    build_algebra, build_constrained, build_crossed, build_direct, builtin_fixtures, load_fixture,
    run_scenario,
};
use workbench_core::superselect::{run_pipeline, verify_pipeline, ConstrainedSystem};
use workbench_core::toy::{build_toy_model, toy_pipeline, verify_toy_model};
use workbench_core::{MatElem, Subspace, ToleranceContext};

const TOL: f64 = 1e-8;

fn ctx() -> ToleranceContext {
    ToleranceContext::default()
}

fn finish(id: &str, name: &str, budget: Option<Duration>, start: Instant, mut probs: Vec<String>) {
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        if elapsed > b {
            probs.push(format!("runtime {elapsed:.2?} exceeds budget {b:.2?}"));
        }
    }
    let ok = probs.is_empty();
    println!(
        "acceptance {id} {name}: {} ({elapsed:.2?})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{id} {name}: {}", probs.join("; "));
}

fn require(probs: &mut Vec<String>, cond: bool, what: impl Into<String>) {
    if !cond {
        probs.push(what.into());
    }
}

fn require_all_pass(probs: &mut Vec<String>, what: &str, verdicts: &[Verdict]) {
    for v in verdicts {
        if !v.pass {
            probs.push(format!(
                "{what}: {} failed (residual {:.3e}; {})",
                v.check_id, v.residual, v.detail
            ));
        }
    }
}

fn require_check(probs: &mut Vec<String>, what: &str, verdicts: &[Verdict], id: &str) {
    match verdicts.iter().find(|v| v.check_id == id) {
        Some(v) if v.pass => {}
        Some(v) => probs.push(format!(
            "{what}: {id} failed (residual {:.3e}; {})",
            v.residual, v.detail
        )),
        None => probs.push(format!("{what}: {id} missing")),
    }
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> MatElem {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    MatElem::new(m.qr().q()).expect("square Q")
}

fn conjugate(w: &MatElem, x: &MatElem) -> MatElem {
    &(w * x) * &w.adjoint()
}

/// A block-diagonal unital *-subalgebra of the full algebra, rotated by `w`.
fn block_subalgebra(n: usize, sizes: &[usize], w: &MatElem, ctx: &ToleranceContext) -> StarAlgebra {
    let mut mats = Vec::new();
    let mut off = 0;
    for &s in sizes {
        for i in 0..s {
            for j in 0..s {
                mats.push(conjugate(w, &MatElem::unit(n, off + i, off + j)));
            }
        }
        off += s;
    }
    let space = Subspace::span(n, &mats, ctx).expect("block span");
    StarAlgebra::new(space, Some(MatElem::identity(n)), ctx).expect("block algebra")
}

/// A projection constant on each block, i.e. a central projection of the
/// block subalgebra.
fn central_projection(n: usize, sizes: &[usize], w: &MatElem, rng: &mut ChaCha8Rng) -> MatElem {
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    let mut off = 0;
    for &s in sizes {
        let bit = rng.gen_bool(0.5);
        for i in 0..s {
            d[(off + i, off + i)] = Complex64::new(if bit { 1.0 } else { 0.0 }, 0.0);
        }
        off += s;
    }
    conjugate(w, &MatElem::new(d).expect("diagonal"))
}

fn random_self_adjoint(sub: &StarAlgebra, rng: &mut ChaCha8Rng) -> MatElem {
    let n = sub.ambient_dim();
    let mut y = MatElem::zeros(n);
    for b in sub.space.basis() {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        y = &y + &b.scale(c);
    }
    (&y + &y.adjoint()).scale(Complex64::new(1.0 / sub.dim() as f64, 0.0))
}

fn cyclic_shift(m: usize) -> MatElem {
    let mut s = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        s[((i + 1) % m, i)] = Complex64::new(1.0, 0.0);
    }
    MatElem::new(s).expect("shift")
}

#[test]
fn a01_constraint_reduction_is_exact_on_known_algebras() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();

    // Full 2x2 algebra, one rank-one projection constraint.
    let sc = load_fixture("mat2-proj").expect("fixture");
    let field = build_algebra(sc.field.as_ref().unwrap(), &ctx).unwrap();
    let sys = ConstraintSystem::new(field, sc.constraints.clone().unwrap(), &ctx).unwrap();
    let red = reduce_constraints(&sys, &ctx).unwrap();
    let e00 = MatElem::unit(2, 0, 0);
    let e10 = MatElem::unit(2, 1, 0);
    let e11 = MatElem::unit(2, 1, 1);
    let kernel = Subspace::span(2, &[e00.clone(), e10], &ctx).unwrap();
    let diag = Subspace::span(2, &[e00.clone(), e11.clone()], &ctx).unwrap();
    let reduced = Subspace::span(2, std::slice::from_ref(&e11), &ctx).unwrap();
    require(
        &mut probs,
        red.first_class,
        "mat2-proj: must be first class",
    );
    require(
        &mut probs,
        red.support.rank == 1,
        "mat2-proj: support rank 1",
    );
    require(
        &mut probs,
        (&red.support.elem - &e00).norm_hs() <= TOL,
        "mat2-proj: support is the constraint projection",
    );
    require(
        &mut probs,
        red.left_kernel.mutual_residual(&kernel) <= TOL,
        "mat2-proj: left kernel is the first column space",
    );
    require(
        &mut probs,
        red.kernel_algebra
            .space
            .mutual_residual(&Subspace::span(2, &[e00], &ctx).unwrap())
            <= TOL,
        "mat2-proj: kernel algebra is the constraint corner",
    );
    require(
        &mut probs,
        red.observables.space.mutual_residual(&diag) <= TOL,
        "mat2-proj: observables are the diagonal algebra",
    );
    require(
        &mut probs,
        red.reduced.space.mutual_residual(&reduced) <= TOL,
        "mat2-proj: reduced algebra is the complementary corner",
    );
    match red.dirac_states() {
        Ok(fam) => {
            let states = fam.sample(11, 8).unwrap();
            let worst = fam.max_constraint_expectation(&states, &red.system.constraints);
            require(
                &mut probs,
                worst <= TOL,
                format!("mat2-proj: dirac states annihilate constraints (got {worst:.3e})"),
            );
        }
        Err(e) => probs.push(format!("mat2-proj: dirac states: {e}")),
    }
    require_all_pass(
        &mut probs,
        "mat2-proj",
        &verify_reduction(&red, TOL, &ctx).unwrap(),
    );

    // Group algebra of Z_2 inside the 2x2 matrices, character-kernel
    // constraint (1 - u)/2.
    let sc = load_fixture("char-z2").expect("fixture");
    let field = build_algebra(sc.field.as_ref().unwrap(), &ctx).unwrap();
    let sys = ConstraintSystem::new(field, sc.constraints.clone().unwrap(), &ctx).unwrap();
    let red = reduce_constraints(&sys, &ctx).unwrap();
    let p_minus = MatElem::from_real_rows(2, &[0.5, -0.5, -0.5, 0.5]).unwrap();
    let p_plus = MatElem::from_real_rows(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
    require(&mut probs, red.first_class, "char-z2: must be first class");
    require(&mut probs, red.support.rank == 1, "char-z2: support rank 1");
    require(
        &mut probs,
        (&red.support.elem - &p_minus).norm_hs() <= TOL,
        "char-z2: support is the character-kernel projection",
    );
    require(
        &mut probs,
        red.left_kernel
            .mutual_residual(&Subspace::span(2, std::slice::from_ref(&p_minus), &ctx).unwrap())
            <= TOL,
        "char-z2: left kernel is spanned by the constraint",
    );
    require(
        &mut probs,
        red.observables.dim() == 2,
        "char-z2: every element of the abelian field is observable",
    );
    require(
        &mut probs,
        red.reduced
            .space
            .mutual_residual(&Subspace::span(2, &[p_plus], &ctx).unwrap())
            <= TOL,
        "char-z2: reduced algebra is the trivial-character line",
    );
    require_all_pass(
        &mut probs,
        "char-z2",
        &verify_reduction(&red, TOL, &ctx).unwrap(),
    );

    finish(
        "a01",
        "constraint reduction exact on known algebras",
        Some(Duration::from_secs(1)),
        start,
        probs,
    );
}

#[test]
fn a02_reduction_is_consistent_across_unital_inclusions() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();
    let partitions: &[&[usize]] = &[&[1, 1], &[1, 2], &[1, 1, 1], &[2, 2], &[1, 3], &[1, 1, 2]];

    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa020_0000 + seed);
        let sizes = partitions[rng.gen_range(0..partitions.len())];
        let n: usize = sizes.iter().sum();
        let field = StarAlgebra::full(n, &ctx).unwrap();
        let w = random_unitary(n, &mut rng);
        let sub = block_subalgebra(n, sizes, &w, &ctx);
        let count = rng.gen_range(1..=3usize);
        let constraints: Vec<MatElem> = (0..count)
            .map(|_| match rng.gen_range(0..3) {
                0 => central_projection(n, sizes, &w, &mut rng),
                1 => random_self_adjoint(&sub, &mut rng),
                _ => {
                    let z = central_projection(n, sizes, &w, &mut rng);
                    let y = random_self_adjoint(&sub, &mut rng);
                    &(&z * &y) * &z
                }
            })
            .collect();
        match verify_relative_consistency(&field, &sub, &constraints, 1e-7, &ctx) {
            Ok(vs) => require_all_pass(&mut probs, &format!("seed {seed}"), &vs),
            Err(e) => probs.push(format!("seed {seed}: {e}")),
        }
        if probs.len() > 4 {
            probs.push("stopping early; more seeds would fail".into());
            break;
        }
    }

    finish(
        "a02",
        "reduction consistent across 50 seeded inclusions",
        Some(Duration::from_secs(60)),
        start,
        probs,
    );
}

#[test]
fn a03_twisted_crossed_products_satisfy_their_axioms() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();

    for name in ["pauli-tcp", "swap-dead-sector", "surviving-pipeline"] {
        let sc = load_fixture(name).expect("fixture");
        let cp = build_crossed(sc.crossed.as_ref().unwrap(), &ctx).unwrap();
        require_all_pass(
            &mut probs,
            name,
            &verify_crossed_product(&cp, TOL, &ctx).unwrap(),
        );
    }

    let sc = load_fixture("toy-qed-1").expect("fixture");
    let model = build_toy_model(sc.toy.as_ref().unwrap(), &ctx).unwrap();
    require_all_pass(
        &mut probs,
        "toy-qed-1 gauge layer",
        &verify_crossed_product(&model.gauge_product, TOL, &ctx).unwrap(),
    );
    require_all_pass(
        &mut probs,
        "toy-qed-1 field layer",
        &verify_crossed_product(&model.field_product, TOL, &ctx).unwrap(),
    );

    finish(
        "a03",
        "crossed products satisfy their axioms",
        None,
        start,
        probs,
    );
}

#[test]
fn a04_minimality_tests_agree_everywhere() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();

    let check =
        |what: &str, hs: &HilbertSystem, probs: &mut Vec<String>| match verify_minimality(hs, &ctx)
        {
            Ok((_, vs)) => require_check(probs, what, &vs, "minimal.two-tests-agree"),
            Err(e) => probs.push(format!("{what}: {e}")),
        };

    let sc = load_fixture("z2-gauge").unwrap();
    let hs = build_direct(sc.direct.as_ref().unwrap(), &ctx).unwrap();
    check("z2-gauge", &hs, &mut probs);

    let sc = load_fixture("pauli-tcp").unwrap();
    let cp = build_crossed(sc.crossed.as_ref().unwrap(), &ctx).unwrap();
    check(
        "pauli-tcp",
        &from_crossed_product(&cp, &ctx).unwrap(),
        &mut probs,
    );

    for name in ["swap-dead-sector", "surviving-pipeline"] {
        let sc = load_fixture(name).unwrap();
        let (_, hs, _) = build_constrained(&sc, &ctx).unwrap();
        check(name, &hs, &mut probs);
    }

    let sc = load_fixture("toy-qed-1").unwrap();
    let model = build_toy_model(sc.toy.as_ref().unwrap(), &ctx).unwrap();
    check("toy-qed-1", &model.system, &mut probs);

    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa040_0000 + seed);
        let m = 2 + (seed as usize % 3);
        let omega = std::f64::consts::TAU / m as f64;
        let hs = if seed % 2 == 0 {
            // Full matrix algebra with a rotated cyclic-shift action; the
            // clock powers give each sector its unitary.
            let field = StarAlgebra::full(m, &ctx).unwrap();
            let w = random_unitary(m, &mut rng);
            let u = conjugate(&w, &cyclic_shift(m));
            let action = GroupAction::from_generator_unitaries(
                FiniteAbelianGroup::cyclic(m as u64),
                &[u],
                &field,
                &ctx,
            )
            .unwrap();
            hilbert_system(&field, &action, None, &ctx).unwrap()
        } else {
            // Diagonal algebra cyclically permuted, with phases whose
            // product is one so the generator keeps order m.
            let field = StarAlgebra::diagonal(m, &ctx).unwrap();
            let mut exps: Vec<u64> = (0..m - 1).map(|_| rng.gen_range(0..m as u64)).collect();
            let total: u64 = exps.iter().sum();
            exps.push((m as u64 - total % m as u64) % m as u64);
            let mut d = DMatrix::<Complex64>::zeros(m, m);
            for (i, k) in exps.iter().enumerate() {
                d[(i, i)] = Complex64::from_polar(1.0, omega * *k as f64);
            }
            let u = MatElem::new(d * cyclic_shift(m).raw()).unwrap();
            let action = GroupAction::from_generator_unitaries(
                FiniteAbelianGroup::cyclic(m as u64),
                &[u],
                &field,
                &ctx,
            )
            .unwrap();
            hilbert_system(&field, &action, None, &ctx).unwrap()
        };
        check(&format!("seed {seed}"), &hs, &mut probs);
    }

    finish(
        "a04",
        "minimality tests agree on fixtures and seeds",
        None,
        start,
        probs,
    );
}

#[test]
fn a05_sector_survival_matches_the_hand_count() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();

    let run = |name: &str| {
        let sc = load_fixture(name).unwrap();
        let (_, hs, constraints) = build_constrained(&sc, &ctx).unwrap();
        let cs = ConstrainedSystem::new(hs, constraints, &ctx).unwrap();
        run_pipeline(&cs, &ctx).unwrap()
    };

    let out = run("swap-dead-sector");
    for s in &out.survivals {
        require(
            &mut probs,
            s.direct == s.internal,
            format!(
                "swap-dead-sector: tests disagree on {}",
                s.character.label()
            ),
        );
        let expect = s.character.is_trivial();
        require(
            &mut probs,
            s.direct == expect,
            format!(
                "swap-dead-sector: sector {} should {}",
                s.character.label(),
                if expect { "survive" } else { "die" }
            ),
        );
    }
    require(
        &mut probs,
        out.kernel_elements.len() == 2,
        "swap-dead-sector: kernel order 2",
    );
    match &out.induced {
        Some(ind) => {
            require(
                &mut probs,
                ind.surviving.len() == 1,
                "swap-dead-sector: one survivor",
            );
            require(
                &mut probs,
                ind.system.sectors.len() == 1 && ind.system.field.dim() == 1,
                "swap-dead-sector: induced system is the trivial line",
            );
        }
        None => probs.push("swap-dead-sector: induced system missing".into()),
    }
    require_all_pass(
        &mut probs,
        "swap-dead-sector",
        &verify_pipeline(&out, TOL, &ctx).unwrap(),
    );

    let out = run("surviving-pipeline");
    for s in &out.survivals {
        require(
            &mut probs,
            s.direct && s.internal,
            format!(
                "surviving-pipeline: sector {} must survive",
                s.character.label()
            ),
        );
    }
    require(
        &mut probs,
        out.kernel_elements.len() == 1,
        "surviving-pipeline: trivial kernel",
    );
    match &out.induced {
        Some(ind) => {
            require(
                &mut probs,
                ind.surviving.len() == 2,
                "surviving-pipeline: both survive",
            );
            require(
                &mut probs,
                ind.system.field.dim() == 4 && ind.system.fixed.dim() == 2,
                "surviving-pipeline: induced field is a 2x2 block with diagonal observables",
            );
            require(
                &mut probs,
                ind.system.sectors.iter().all(|s| s.subspace.dim() == 2),
                "surviving-pipeline: induced sectors are 2-dimensional",
            );
        }
        None => probs.push("surviving-pipeline: induced system missing".into()),
    }
    require_all_pass(
        &mut probs,
        "surviving-pipeline",
        &verify_pipeline(&out, TOL, &ctx).unwrap(),
    );

    finish(
        "a05",
        "sector survival matches the hand count",
        None,
        start,
        probs,
    );
}

#[test]
fn a06_reduction_factors_through_the_sector_structure() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();

    let sc = load_fixture("surviving-pipeline").unwrap();
    let (_, hs, constraints) = build_constrained(&sc, &ctx).unwrap();
    let cs = ConstrainedSystem::new(hs, constraints, &ctx).unwrap();
    let out = run_pipeline(&cs, &ctx).unwrap();
    let vs = verify_pipeline(&out, TOL, &ctx).unwrap();

    for id in [
        "pipe.support-level-independent",
        "pipe.gauge-fixes-support",
        "pipe.survival-two-tests-agree",
        "pipe.survivors-form-annihilator",
        "pipe.trivially-acting-set-is-subgroup",
        "pipe.observables-restrict-consistently",
        "pipe.kernel-sector-decomposition",
        "pipe.kernel-from-surviving-sectors",
        "pipe.induced-system",
        "pipe.induced-fixed-is-reduced-observables",
        "pipe.module-coefficients-observable",
        "pipe.module-reconstruction",
        "pipe.center-compression",
        "pipe.arrow-compression-inclusion",
        "pipe.arrow-equality-under-hypotheses",
    ] {
        require_check(&mut probs, "surviving-pipeline", &vs, id);
    }
    require_all_pass(&mut probs, "surviving-pipeline", &vs);

    finish(
        "a06",
        "reduction factors through the sector structure",
        None,
        start,
        probs,
    );
}

#[test]
fn a07_gauge_model_realizes_the_full_story() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();

    let sc = load_fixture("toy-qed-1").unwrap();
    let model = build_toy_model(sc.toy.as_ref().unwrap(), &ctx).unwrap();
    require(
        &mut probs,
        model.matter.dim() == 8 && model.matter.ambient_dim() == 4,
        "matter layer is CAR(1) tensor Weyl(Z_2)",
    );
    require(
        &mut probs,
        model.gauge_product.algebra.dim() == 32 && model.gauge_product.algebra.ambient_dim() == 16,
        "gauge layer adjoins Z_2^2 translations",
    );
    require(
        &mut probs,
        model.field_product.algebra.dim() == 64 && model.field_product.algebra.ambient_dim() == 32,
        "field layer adjoins the dual charge rotation",
    );

    let vs = verify_toy_model(&model, TOL, &ctx).unwrap();
    require_all_pass(&mut probs, "toy-qed-1", &vs);
    match vs
        .iter()
        .find(|v| v.check_id == "toy.witness-satisfies-gauge-laws")
    {
        Some(v) => require(
            &mut probs,
            v.residual <= 1e-10,
            format!("witness residual {:.3e} above 1e-10", v.residual),
        ),
        None => probs.push("witness verdict missing".into()),
    }
    for id in [
        "toy.charge-sectors-disjoint",
        "toy.charge-sectors-nonempty",
        "toy.gauge-laws-dual-invariant",
        "toy.dual-rotation-outer-by-center",
        "toy.dual-rotation-outer-by-arrows",
        "toy.outer-tests-agree",
    ] {
        require_check(&mut probs, "toy-qed-1", &vs, id);
    }

    let out = toy_pipeline(&model, &ctx).unwrap();
    require(
        &mut probs,
        out.field_reduction.first_class,
        "gauge laws are first class",
    );
    require(
        &mut probs,
        out.survivals.iter().all(|s| s.direct && s.internal),
        "every charge sector survives the reduction",
    );
    require(
        &mut probs,
        out.kernel_elements.len() == 1,
        "trivial kernel subgroup",
    );

    finish(
        "a07",
        "gauge model realizes the full story",
        Some(Duration::from_secs(30)),
        start,
        probs,
    );
}

#[test]
fn a08_unit_equivalent_projections_are_the_unit() {
    let start = Instant::now();
    let ctx = ctx();
    let mut probs = Vec::new();

    for (name, _) in builtin_fixtures() {
        let sc = load_fixture(name).unwrap();
        match run_scenario(&sc, TOL, &ctx) {
            Ok(report) => require_check(&mut probs, name, &report.verdicts, "e-constraint.vacuous"),
            Err(e) => probs.push(format!("{name}: {e}")),
        }
    }

    finish(
        "a08",
        "unit-equivalent projections are the unit",
        None,
        start,
        probs,
    );
}
