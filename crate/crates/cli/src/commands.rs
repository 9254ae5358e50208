use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use summa_core::banach::{
    cotype_constant_lower, diag_classify, diag_growth_experiment, phs_lower, type_constant_lower, DiagonalSpec,
    GrowthThresholds, PhsBudget, SigmaRule,
};
use summa_core::grothendieck::{bilinear_hilbert_sup, grothendieck_ratio, norm_inf_to_1, BilinearBudget};
use summa_core::ideals::{
    gamma_summing_lower, hs_norm, pi_2_upper_default, pi_p_lower, pietsch_factorize, verify_certificate,
    weak_star_nuclear_rep,
};
use summa_core::io::{load_family, load_matrix};
use summa_core::opnorm::{op_norm_upper, op_norm_with, AscentConfig};
use summa_core::randsums::{gaussian_moment, rademacher_moment};
use summa_core::seq::{weak_lp_norm_with, WeakNormConfig};
use summa_core::suite::{run_suite, SuiteConfig};
use summa_core::witness::WitnessBudget;
use summa_core::{Exponent, NormEstimate, Operator, RandomPlan, SpaceSpec};

use crate::report::render;
use crate::{Command, Global, MatrixArgs};

pub struct Outcome {
    pub text: String,
    /// A suite criterion failed.
    pub failed: bool,
}

fn ascent(g: &Global) -> AscentConfig {
    AscentConfig { starts: g.restarts, tol: g.tol, seed: g.seed, ..AscentConfig::default() }
}

fn witness(g: &Global) -> WitnessBudget {
    WitnessBudget { restarts: g.restarts, ..WitnessBudget::default() }.with_seed(g.seed)
}

fn plan(g: &Global, moment_p: f64) -> Result<RandomPlan> {
    Ok(RandomPlan::new(g.seed, g.samples, moment_p)?)
}

fn operator(m: &MatrixArgs) -> Result<Operator> {
    let a = load_matrix(&m.matrix).with_context(|| format!("reading {}", m.matrix.display()))?;
    Ok(Operator::new(a, m.domain, m.codomain)?)
}

fn hilbert_operator(path: &std::path::Path) -> Result<Operator> {
    let a = load_matrix(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Operator::new(a, Exponent::TWO, Exponent::TWO)?)
}

fn family(path: &std::path::Path) -> Result<summa_core::seq::VectorFamily> {
    load_family(path).with_context(|| format!("reading {}", path.display()))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn run(g: &Global, command: &Command) -> Result<Outcome> {
    let mut failed = false;
    let mut csv = None;
    let result = match command {
        Command::Hs { matrix } => {
            let v = hs_norm(&hilbert_operator(matrix)?)?;
            to_value(&NormEstimate::exact(v, "Frobenius norm"))
        }
        Command::Opnorm { m, upper } => {
            let u = operator(m)?;
            let norm = op_norm_with(&u, &ascent(g))?;
            let mut r = json!({ "norm": norm });
            if *upper {
                let (p, q) = (u.domain().exp, u.codomain().exp);
                r["upper"] = to_value(&op_norm_upper(u.matrix(), p, q, ascent(g).enum_cap));
            }
            r
        }
        Command::Weaknorm { f, p } => {
            let cfg = WeakNormConfig { ascent: ascent(g), ..WeakNormConfig::default() };
            to_value(&weak_lp_norm_with(&family(&f.family)?, *p, &cfg)?)
        }
        Command::Radmoment { f, moment_p } => {
            let v = rademacher_moment(&family(&f.family)?, *moment_p)?;
            to_value(&NormEstimate::exact(v, "enumeration of all sign patterns"))
        }
        Command::Gaussmoment { f, moment_p } => to_value(&gaussian_moment(&family(&f.family)?, &plan(g, *moment_p)?)?),
        Command::Pi2 { m, upper, lower } => {
            let u = operator(m)?;
            if !u.codomain().exp.is_two() {
                bail!("pi2 bounds need an l_2 codomain (--codomain 2)");
            }
            let both = !upper && !lower;
            let mut r = json!({});
            if *lower || both {
                r["lower"] = to_value(&pi_p_lower(&u, 2.0, &witness(g))?);
            }
            if *upper || both {
                let (est, cert) = pi_2_upper_default(&u)?;
                r["upper"] = to_value(&est);
                r["certificate"] = to_value(&cert);
            }
            r
        }
        Command::Pi1Lb { m } => to_value(&pi_p_lower(&operator(m)?, 1.0, &witness(g))?),
        Command::Gamma { m } => to_value(&gamma_summing_lower(&operator(m)?, &witness(g), &plan(g, 2.0)?)?),
        Command::Pietsch { m } => {
            let u = operator(m)?;
            if !u.codomain().exp.is_two() {
                bail!("Pietsch factorization needs an l_2 codomain (--codomain 2)");
            }
            let (est, cert) = pi_2_upper_default(&u)?;
            let check = verify_certificate(&u, &cert)?;
            let fac = pietsch_factorize(&u, &cert)?;
            json!({ "upper": est, "certificate": cert, "check": check, "factorization": fac })
        }
        Command::Nuclear { matrix } => to_value(&weak_star_nuclear_rep(&hilbert_operator(matrix)?)?),
        Command::Grothendieck { matrix, ratio } => {
            let a = load_matrix(matrix).with_context(|| format!("reading {}", matrix.display()))?;
            let budget = BilinearBudget { starts: g.restarts, seed: g.seed, ..BilinearBudget::default() };
            if *ratio {
                to_value(&grothendieck_ratio(&a, &budget)?)
            } else {
                let exact = NormEstimate::exact(norm_inf_to_1(&a)?, "sign enumeration");
                json!({ "inf_to_1": exact, "hilbert_sup": bilinear_hilbert_sup(&a, &budget) })
            }
        }
        Command::DiagClassify { d } => to_value(&diag_classify(&diag_spec(d))?),
        Command::DiagGrowth { d, dims } => {
            let table = diag_growth_experiment(&diag_spec(d), dims, &plan(g, 2.0)?, &witness(g), GrowthThresholds::default())?;
            csv = Some(table.to_csv());
            to_value(&table)
        }
        Command::Cotype { s, q } => to_value(&cotype_constant_lower(SpaceSpec::new(s.dim, s.space)?, *q, &witness(g))?),
        Command::Type { s, p } => to_value(&type_constant_lower(SpaceSpec::new(s.dim, s.space)?, *p, &witness(g))?),
        Command::Phs { mat, k, m, draws, steps } => {
            let u = operator(mat)?;
            let budget = PhsBudget { draws: *draws, steps: *steps, seed: g.seed, ..PhsBudget::default() };
            let (k, m) = (k.unwrap_or(u.domain().dim), m.unwrap_or(u.codomain().dim));
            json!({ "k": k, "m": m, "phs_lower": phs_lower(&u, k, m, &budget)? })
        }
        Command::Suite { quick } => {
            let report = run_suite(&SuiteConfig { seed: g.seed, quick: *quick });
            for c in &report.criteria {
                eprintln!("criterion {:>2} {} {}", c.id, if c.passed { "PASS" } else { "FAIL" }, c.title);
            }
            failed = !report.all_passed();
            to_value(&report)
        }
    };
    Ok(Outcome { text: render(g, command, &result, csv), failed })
}

fn diag_spec(d: &crate::DiagArgs) -> DiagonalSpec {
    DiagonalSpec { p: d.p, q: d.q, sigma: SigmaRule::PowerLaw { scale: d.scale, alpha: d.alpha } }
}
