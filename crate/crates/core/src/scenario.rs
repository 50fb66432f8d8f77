use serde::{Deserialize, Serialize};

use crate::algebra::{minimal_central_projections, Projection, StarAlgebra};
use crate::cocycle::TwoCocycle;
use crate::constraint::{reduce_constraints, verify_reduction, ConstraintSystem};
use crate::crossed::{
    twisted_crossed_product, verify_crossed_product, CrossedProduct, GroupAction,
};
use crate::error::{CoreError, Result};
use crate::group::FiniteAbelianGroup;
use crate::hilbert::{
    from_crossed_product, hilbert_system, verify_hilbert_system, verify_minimality, HilbertSystem,
};
use crate::mat::MatElem;
use crate::report::Report;
use crate::subspace::Subspace;
use crate::superselect::{e_constraint_check, run_pipeline, verify_pipeline, ConstrainedSystem};
use crate::tol::ToleranceContext;
use crate::toy::{build_toy_model, toy_pipeline, verify_toy_model, ToySpec};

/// Matrix-algebra description on a fixed carrier.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgebraSpec {
    Full {
        dim: usize,
    },
    Diagonal {
        dim: usize,
    },
    Span {
        ambient: usize,
        elements: Vec<MatElem>,
        #[serde(default = "default_true")]
        unital: bool,
    },
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CocycleSpec {
    Trivial,
    Bilinear { exponents: Vec<Vec<i64>> },
}

/// Crossed-product data: base algebra, acting group, optional twist, and
/// one conjugating unitary per group generator (empty for a trivial action).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossedSpec {
    pub base: AlgebraSpec,
    pub group: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleSpec>,
    #[serde(default)]
    pub generators: Vec<MatElem>,
}

/// A gauge system given directly: a field algebra with gauge unitaries on
/// the same carrier, one per group generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectSystemSpec {
    pub field: AlgebraSpec,
    pub group: Vec<u64>,
    #[serde(default)]
    pub generators: Vec<MatElem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    TProcedure,
    HilbertSystem,
    Constrained,
    ToyGauge,
}

/// One self-contained workbench input.  Which sections must be present
/// depends on the kind; `validate` spells the rules out.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<AlgebraSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<MatElem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossed: Option<CrossedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct: Option<DirectSystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToySpec>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CoreError::Schema(format!(
                    "scenario '{}' ({:?}) {what}",
                    self.name, self.kind
                )))
            }
        };
        match self.kind {
            ScenarioKind::TProcedure => {
                need(self.field.is_some(), "needs a field algebra")?;
                need(self.constraints.is_some(), "needs a constraint list")
            }
            ScenarioKind::HilbertSystem => need(
                self.crossed.is_some() ^ self.direct.is_some(),
                "needs exactly one of crossed or direct data",
            ),
            ScenarioKind::Constrained => {
                need(
                    self.crossed.is_some() ^ self.direct.is_some(),
                    "needs exactly one of crossed or direct data",
                )?;
                need(self.constraints.is_some(), "needs a constraint list")
            }
            ScenarioKind::ToyGauge => need(self.toy.is_some(), "needs a toy section"),
        }
    }
}

pub fn parse_scenario(json: &str) -> Result<Scenario> {
    let sc: Scenario = serde_json::from_str(json).map_err(|e| CoreError::Schema(e.to_string()))?;
    sc.validate()?;
    Ok(sc)
}

pub fn build_algebra(spec: &AlgebraSpec, ctx: &ToleranceContext) -> Result<StarAlgebra> {
    match spec {
        AlgebraSpec::Full { dim } => StarAlgebra::full(*dim, ctx),
        AlgebraSpec::Diagonal { dim } => StarAlgebra::diagonal(*dim, ctx),
        AlgebraSpec::Span {
            ambient,
            elements,
            unital,
        } => {
            let space = Subspace::span(*ambient, elements, ctx)?;
            let unit = unital.then(|| MatElem::identity(*ambient));
            StarAlgebra::new(space, unit, ctx)
        }
    }
}

pub fn build_crossed(spec: &CrossedSpec, ctx: &ToleranceContext) -> Result<CrossedProduct> {
    let base = build_algebra(&spec.base, ctx)?;
    let group = FiniteAbelianGroup::new(spec.group.clone())?;
    let cocycle = match &spec.cocycle {
        None | Some(CocycleSpec::Trivial) => TwoCocycle::trivial(&group),
        Some(CocycleSpec::Bilinear { exponents }) => {
            TwoCocycle::from_bilinear_exponents(&group, exponents, ctx)?
        }
    };
    let action = if spec.generators.is_empty() {
        GroupAction::trivial(group.clone(), &base)
    } else {
        GroupAction::from_generator_unitaries(group.clone(), &spec.generators, &base, ctx)?
    };
    twisted_crossed_product(&base, &action, &cocycle, ctx)
}

pub fn build_direct(spec: &DirectSystemSpec, ctx: &ToleranceContext) -> Result<HilbertSystem> {
    let field = build_algebra(&spec.field, ctx)?;
    let group = FiniteAbelianGroup::new(spec.group.clone())?;
    let action = if spec.generators.is_empty() {
        GroupAction::trivial(group, &field)
    } else {
        GroupAction::from_generator_unitaries(group, &spec.generators, &field, ctx)?
    };
    hilbert_system(&field, &action, None, ctx)
}

/// The gauge system of a scenario together with constraints lifted to the
/// field carrier: crossed scenarios list constraints in base coordinates,
/// direct scenarios on the field carrier itself.
pub fn build_constrained(
    sc: &Scenario,
    ctx: &ToleranceContext,
) -> Result<(Option<CrossedProduct>, HilbertSystem, Vec<MatElem>)> {
    let raw = sc.constraints.clone().unwrap_or_default();
    if let Some(cspec) = &sc.crossed {
        let cp = build_crossed(cspec, ctx)?;
        let hs = from_crossed_product(&cp, ctx)?;
        let mut lifted = Vec::with_capacity(raw.len());
        for c in &raw {
            lifted.push(cp.embed.apply(c, ctx)?);
        }
        Ok((Some(cp), hs, lifted))
    } else if let Some(dspec) = &sc.direct {
        Ok((None, build_direct(dspec, ctx)?, raw))
    } else {
        Err(CoreError::Schema(format!(
            "scenario '{}' carries no gauge system data",
            sc.name
        )))
    }
}

/// Execute a scenario and collect every applicable law verdict.
pub fn run_scenario(sc: &Scenario, bound: f64, ctx: &ToleranceContext) -> Result<Report> {
    sc.validate()?;
    let mut report = Report::new(&sc.name, *ctx);
    match sc.kind {
        ScenarioKind::TProcedure => {
            let field = build_algebra(sc.field.as_ref().expect("validated"), ctx)?;
            let system =
                ConstraintSystem::new(field, sc.constraints.clone().unwrap_or_default(), ctx)?;
            let red = reduce_constraints(&system, ctx)?;
            report.extend(verify_reduction(&red, bound, ctx)?);
            let candidates = vec![
                red.support.clone(),
                red.support.complement(),
                Projection::identity(red.system.field.ambient_dim()),
            ];
            report.push(e_constraint_check(&red.system.field, &candidates, ctx)?);
        }
        ScenarioKind::HilbertSystem => {
            let hs = if let Some(cspec) = &sc.crossed {
                let cp = build_crossed(cspec, ctx)?;
                report.extend(verify_crossed_product(&cp, bound, ctx)?);
                from_crossed_product(&cp, ctx)?
            } else {
                build_direct(sc.direct.as_ref().expect("validated"), ctx)?
            };
            report.extend(verify_hilbert_system(&hs, bound, ctx)?);
            let (_, verdicts) = verify_minimality(&hs, ctx)?;
            report.extend(verdicts);
            let mut candidates = vec![Projection::identity(hs.field.ambient_dim())];
            candidates.extend(minimal_central_projections(&hs.fixed, ctx)?);
            report.push(e_constraint_check(&hs.field, &candidates, ctx)?);
        }
        ScenarioKind::Constrained => {
            let (cp, hs, constraints) = build_constrained(sc, ctx)?;
            if let Some(cp) = &cp {
                report.extend(verify_crossed_product(cp, bound, ctx)?);
            }
            report.extend(verify_hilbert_system(&hs, bound, ctx)?);
            let cs = ConstrainedSystem::new(hs, constraints, ctx)?;
            let out = run_pipeline(&cs, ctx)?;
            report.extend(verify_pipeline(&out, bound, ctx)?);
            let field = &out.constrained.system.field;
            let candidates = vec![
                out.field_reduction.support.clone(),
                out.field_reduction.support.complement(),
                Projection::identity(field.ambient_dim()),
            ];
            report.push(e_constraint_check(field, &candidates, ctx)?);
        }
        ScenarioKind::ToyGauge => {
            let model = build_toy_model(sc.toy.as_ref().expect("validated"), ctx)?;
            report.extend(verify_toy_model(&model, bound, ctx)?);
            let out = toy_pipeline(&model, ctx)?;
            report.extend(verify_pipeline(&out, bound, ctx)?);
            let mid = &model.gauge_product.algebra;
            let mut candidates = vec![Projection::identity(mid.ambient_dim())];
            for charge in 0..model.spec.charge_modulus {
                candidates.push(Projection::new(model.charge_projection(charge), ctx)?);
            }
            report.push(e_constraint_check(mid, &candidates, ctx)?);
        }
    }
    Ok(report)
}

/// The bundled example inputs, in presentation order.
pub fn builtin_fixtures() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "mat2-proj",
            include_str!("../../../fixtures/mat2-proj.json"),
        ),
        ("char-z2", include_str!("../../../fixtures/char-z2.json")),
        ("z2-gauge", include_str!("../../../fixtures/z2-gauge.json")),
        (
            "pauli-tcp",
            include_str!("../../../fixtures/pauli-tcp.json"),
        ),
        (
            "swap-dead-sector",
            include_str!("../../../fixtures/swap-dead-sector.json"),
        ),
        (
            "surviving-pipeline",
            include_str!("../../../fixtures/surviving-pipeline.json"),
        ),
        (
            "toy-qed-1",
            include_str!("../../../fixtures/toy-qed-1.json"),
        ),
    ]
}

pub fn load_fixture(name: &str) -> Result<Scenario> {
    for (n, body) in builtin_fixtures() {
        if n == name {
            return parse_scenario(body);
        }
    }
    Err(CoreError::Schema(format!(
        "unknown fixture '{name}'; available: {}",
        builtin_fixtures()
            .iter()
            .map(|(n, _)| *n)
            .collect::<Vec<_>>()
            .join(", ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn fixtures_parse_and_validate() {
        for (name, body) in builtin_fixtures() {
            let sc = parse_scenario(body).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(sc.name, name);
        }
    }

    #[test]
    fn scenario_round_trips_through_json() {
        let sc = load_fixture("swap-dead-sector").unwrap();
        let json = serde_json::to_string(&sc).unwrap();
        let back = parse_scenario(&json).unwrap();
        assert_eq!(back.name, sc.name);
        assert_eq!(back.kind, sc.kind);
    }

    #[test]
    fn kind_requirements_are_enforced() {
        let bad = Scenario {
            name: "x".into(),
            kind: ScenarioKind::TProcedure,
            field: None,
            constraints: None,
            crossed: None,
            direct: None,
            toy: None,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn small_fixture_reports_pass() {
        let sc = load_fixture("mat2-proj").unwrap();
        let report = run_scenario(&sc, 1e-8, &ctx()).unwrap();
        assert!(report.all_pass(), "{}", report.human_summary());
    }
}
