//! Randomized law checks.  Each property draws a seed, builds a small
//! concrete system from it, and asserts an algebraic identity that must hold
//! for every input, not just the curated fixtures.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use workbench_core::algebra::{product_span, relative_commutant, StarAlgebra};
use workbench_core::constraint::{
    constraints_equivalent, reduce_constraints, ConstraintReduction, ConstraintSystem,
};
use workbench_core::crossed::GroupAction;
use workbench_core::group::FiniteAbelianGroup;
use workbench_core::hilbert::{hilbert_system, HilbertSystem};
use workbench_core::{MatElem, Subspace, ToleranceContext};

const TOL: f64 = 1e-8;

fn ctx() -> ToleranceContext {
    ToleranceContext::default()
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> MatElem {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    MatElem::new(m).expect("square")
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> MatElem {
    MatElem::new(random_matrix(n, rng).raw().clone().qr().q()).expect("square Q")
}

fn conjugate(w: &MatElem, x: &MatElem) -> MatElem {
    &(w * x) * &w.adjoint()
}

/// Random span of `k` matrices in the n x n ambient space.
fn random_span(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Subspace {
    let mats: Vec<MatElem> = (0..k).map(|_| random_matrix(n, rng)).collect();
    Subspace::span(n, &mats, &ctx()).expect("span")
}

/// Rotated block-diagonal unital *-subalgebra of the full n x n algebra.
fn block_algebra(sizes: &[usize], w: &MatElem, rng_ambient: usize) -> StarAlgebra {
    let n = rng_ambient;
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
    let space = Subspace::span(n, &mats, &ctx()).expect("block span");
    StarAlgebra::new(space, Some(MatElem::identity(n)), &ctx()).expect("block algebra")
}

fn seeded_partition(rng: &mut ChaCha8Rng) -> (usize, Vec<usize>) {
    let partitions: &[&[usize]] = &[&[1, 1], &[2], &[1, 2], &[1, 1, 1], &[2, 2], &[1, 3]];
    let sizes = partitions[rng.gen_range(0..partitions.len())].to_vec();
    (sizes.iter().sum(), sizes)
}

/// Reduction of a seeded first-class-leaning constraint system on a rotated
/// block algebra.  Constraints are self-adjoint elements of the algebra.
fn seeded_reduction(seed: u64) -> (ConstraintReduction, MatElem) {
    let ctx = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, sizes) = seeded_partition(&mut rng);
    let w = random_unitary(n, &mut rng);
    let field = block_algebra(&sizes, &w, n);
    let count = rng.gen_range(1..=2usize);
    let constraints: Vec<MatElem> = (0..count)
        .map(|_| {
            let y = {
                let mut acc = MatElem::zeros(n);
                for b in field.space.basis() {
                    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    acc = &acc + &b.scale(c);
                }
                acc
            };
            (&y + &y.adjoint()).scale(Complex64::new(1.0 / field.dim() as f64, 0.0))
        })
        .collect();
    let sys = ConstraintSystem::new(field, constraints, &ctx).expect("system");
    (reduce_constraints(&sys, &ctx).expect("reduction"), w)
}

/// Cyclic gauge action on the full m x m algebra by a rotated shift; every
/// sector holds a clock-power unitary.
fn seeded_hilbert(seed: u64) -> HilbertSystem {
    let ctx = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 2 + (seed as usize % 3);
    let field = StarAlgebra::full(m, &ctx).expect("full");
    let mut s = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        s[((i + 1) % m, i)] = Complex64::new(1.0, 0.0);
    }
    let w = random_unitary(m, &mut rng);
    let u = conjugate(&w, &MatElem::new(s).expect("shift"));
    let action = GroupAction::from_generator_unitaries(
        FiniteAbelianGroup::cyclic(m as u64),
        &[u],
        &field,
        &ctx,
    )
    .expect("action");
    hilbert_system(&field, &action, None, &ctx).expect("hilbert system")
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn product_span_respects_adjoints(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4usize);
        let s = random_span(n, rng.gen_range(1..=3), &mut rng);
        let t = random_span(n, rng.gen_range(1..=3), &mut rng);
        let left = product_span(&s, &t, &ctx).unwrap().adjoint();
        let right = product_span(&t.adjoint(), &s.adjoint(), &ctx).unwrap();
        prop_assert!(left.equals(&right, &ctx), "residual {:.3e}", left.mutual_residual(&right));
    }

    #[test]
    fn intersection_commutes_and_is_contained(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4usize);
        let s = random_span(n, rng.gen_range(1..=4), &mut rng);
        let t = random_span(n, rng.gen_range(1..=4), &mut rng);
        let st = s.intersect(&t, &ctx).unwrap();
        let ts = t.intersect(&s, &ctx).unwrap();
        prop_assert!(st.equals(&ts, &ctx));
        prop_assert!(s.contains_subspace(&st, &ctx));
        prop_assert!(t.contains_subspace(&st, &ctx));
    }

    #[test]
    fn bicommutant_recovers_block_algebras(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, sizes) = seeded_partition(&mut rng);
        let w = random_unitary(n, &mut rng);
        let alg = block_algebra(&sizes, &w, n);
        let full = StarAlgebra::full(n, &ctx).unwrap();
        let commutant = relative_commutant(&alg.space, &full, &ctx).unwrap();
        let double = relative_commutant(&commutant.space, &full, &ctx).unwrap();
        prop_assert!(
            double.space.equals(&alg.space, &ctx),
            "dim {} vs {}",
            double.dim(),
            alg.dim()
        );
    }

    #[test]
    fn support_is_a_hereditary_unit_for_the_kernel_algebra(seed in any::<u64>()) {
        let (red, _) = seeded_reduction(seed);
        let p = &red.support.elem;
        prop_assert!((&(p * p) - p).norm_hs() <= TOL);
        prop_assert!((&p.adjoint() - p).norm_hs() <= TOL);
        for d in red.kernel_algebra.space.basis() {
            let back = &(p * d) * p;
            prop_assert!((&back - d).norm_hs() <= TOL, "support does not fix the kernel algebra");
        }
    }

    #[test]
    fn kernel_algebra_is_hereditary_in_the_field(seed in any::<u64>()) {
        let _ctx = ctx();
        let (red, _) = seeded_reduction(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let d_basis = red.kernel_algebra.space.basis();
        if d_basis.is_empty() {
            return Ok(());
        }
        for _ in 0..4 {
            let a = {
                let mut acc = MatElem::zeros(red.system.field.ambient_dim());
                for b in red.system.field.space.basis() {
                    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    acc = &acc + &b.scale(c);
                }
                acc
            };
            let d1 = &d_basis[rng.gen_range(0..d_basis.len())];
            let d2 = &d_basis[rng.gen_range(0..d_basis.len())];
            let prod = &(d1 * &a) * d2;
            prop_assert!(
                red.kernel_algebra.space.residual(&prod) <= TOL * a.norm_hs().max(1.0),
                "D A D escapes D (residual {:.3e})",
                red.kernel_algebra.space.residual(&prod)
            );
        }
    }

    #[test]
    fn reduction_map_is_multiplicative_on_observables(seed in any::<u64>()) {
        let ctx = ctx();
        let (red, _) = seeded_reduction(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xab1e);
        let sample = |rng: &mut ChaCha8Rng| {
            let mut acc = MatElem::zeros(red.observables.ambient_dim());
            for b in red.observables.space.basis() {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                acc = &acc + &b.scale(c);
            }
            acc.scale(Complex64::new(1.0 / red.observables.dim().max(1) as f64, 0.0))
        };
        for _ in 0..4 {
            let x = sample(&mut rng);
            let y = sample(&mut rng);
            let lhs = red.reduction.apply(&(&x * &y), &ctx).unwrap();
            let rhs = &red.reduction.apply(&x, &ctx).unwrap() * &red.reduction.apply(&y, &ctx).unwrap();
            prop_assert!(
                (&lhs - &rhs).norm_hs() <= TOL,
                "reduction fails to be a homomorphism ({:.3e})",
                (&lhs - &rhs).norm_hs()
            );
        }
    }

    #[test]
    fn equivalent_constraint_sets_reduce_identically(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4usize);
        let field = StarAlgebra::full(n, &ctx).unwrap();
        let y = random_matrix(n, &mut rng);
        let c = (&y + &y.adjoint()).scale(Complex64::new(0.25, 0.0));
        let u = random_unitary(n, &mut rng);
        // u c and c* u* generate the same left ideal, so the same reduction.
        let sys_a = ConstraintSystem::new(field.clone(), vec![c.clone()], &ctx).unwrap();
        let moved = &u * &c;
        let sys_b =
            ConstraintSystem::new(field, vec![moved.clone(), moved.adjoint()], &ctx).unwrap();
        prop_assert!(constraints_equivalent(&sys_a, &sys_b, &ctx).unwrap());
        let red_a = reduce_constraints(&sys_a, &ctx).unwrap();
        let red_b = reduce_constraints(&sys_b, &ctx).unwrap();
        prop_assert!((&red_a.support.elem - &red_b.support.elem).norm_hs() <= TOL);
        prop_assert!(red_a.observables.space.equals(&red_b.observables.space, &ctx));
        prop_assert!(red_a.reduced.space.equals(&red_b.reduced.space, &ctx));
    }

    #[test]
    fn no_constraints_reduce_nothing(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, sizes) = seeded_partition(&mut rng);
        let w = random_unitary(n, &mut rng);
        let field = block_algebra(&sizes, &w, n);
        let sys = ConstraintSystem::new(field.clone(), Vec::new(), &ctx).unwrap();
        let red = reduce_constraints(&sys, &ctx).unwrap();
        prop_assert_eq!(red.kernel_algebra.dim(), 0);
        prop_assert!(red.observables.space.equals(&field.space, &ctx));
        prop_assert!(red.reduced.space.equals(&field.space, &ctx));
    }

    #[test]
    fn sector_decomposition_is_parseval(seed in any::<u64>()) {
        let _ctx = ctx();
        let hs = seeded_hilbert(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a12);
        for _ in 0..3 {
            let x = random_matrix(hs.field.ambient_dim(), &mut rng);
            let mut pieces = MatElem::zeros(hs.field.ambient_dim());
            let mut sum_sq = 0.0f64;
            for chi in hs.dual_characters() {
                let part = hs.spectral_projection(&chi, &x);
                prop_assert!(
                    hs.sector(&chi).unwrap().subspace.residual(&part)
                        <= TOL * x.norm_hs().max(1.0),
                    "spectral piece leaves its sector"
                );
                sum_sq += part.norm_hs().powi(2);
                pieces = &pieces + &part;
            }
            prop_assert!((&pieces - &x).norm_hs() <= TOL * x.norm_hs().max(1.0));
            prop_assert!(
                (sum_sq - x.norm_hs().powi(2)).abs() <= TOL * x.norm_hs().powi(2).max(1.0),
                "sector pieces are not orthogonal"
            );
        }
    }

    #[test]
    fn spectral_projection_contracts_the_module_norm(seed in any::<u64>()) {
        let hs = seeded_hilbert(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0a11);
        for _ in 0..3 {
            let x = random_matrix(hs.field.ambient_dim(), &mut rng);
            let bound = hs.a_norm(&x) + TOL;
            for chi in hs.dual_characters() {
                let part = hs.spectral_projection(&chi, &x);
                prop_assert!(
                    hs.a_norm(&part) <= bound,
                    "averaging must contract the module norm"
                );
            }
        }
    }
}
