//! JSON-configured experiments. A config names one kind of run; [`run`]
//! executes it and returns a verdict, a JSON summary and CSV tables.
//!
//! ```json
//! { "kind": "distribution", "mode": "sv", "tol": 0.05,
//!   "schedule": [[12, 12], [24, 24]],
//!   "operands": [ { "terms": [ { "coeff": "x1", "trig": { "levels": 1, "s": 1, "t": 1,
//!                   "coeffs": [ { "k": [0], "re": [[2]] } ] } } ] } ] }
//! ```
//!
//! Tables depend only on the config, so identical configs give identical
//! CSV bytes. Wall time is reported in the summary only.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::acs::{acs_tensor_check, AcsPair, SuHypothesis};
use crate::asymptotics::{distribution_report, size_label, DistributionReport, MatrixFamily, Mode};
use crate::batteries::{
    glt_structural_battery, sampling_battery, toeplitz_battery, uniqueness_battery, BatteryReport,
};
use crate::error::{domain, Error, Result};
use crate::fem::verify_poisson;
use crate::glt::{glt_tensor, GltOperand};
use crate::multiindex::MultiIndex;
use crate::sampling::diag_sampling;
use crate::symbols::{CoeffFn, GltSymbol, TrigPoly, TrigPolyJson};
use crate::toeplitz::toeplitz;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ToeplitzTensor,
    SamplingTensor,
    GltTensor,
    AcsTensor,
    Distribution,
    FemPoisson,
    PermutationAudit,
}

/// A schedule entry: a plain size for one level, an array for several.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SizeEntry {
    One(usize),
    Multi(Vec<usize>),
}

impl SizeEntry {
    pub fn sizes(&self) -> Vec<usize> {
        match self {
            SizeEntry::One(n) => vec![*n],
            SizeEntry::Multi(v) => v.clone(),
        }
    }
}

/// One term `a(x) f(θ)` of a canonical symbol.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub trig: TrigPolyJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperandJson {
    pub terms: Vec<TermJson>,
}

impl OperandJson {
    pub fn symbol(&self) -> Result<GltSymbol> {
        let Some(first) = self.terms.first() else {
            return domain("operand has no terms");
        };
        let (levels, s, t) = (first.trig.levels, first.trig.s, first.trig.t);
        let mut k = GltSymbol::zero(levels, s, t);
        for term in &self.terms {
            let f = TrigPoly::try_from(term.trig.clone())?;
            k.push_term(CoeffFn::parse(&term.coeff, f.levels())?, f)?;
        }
        Ok(k)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Battery size for the randomized kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<SizeEntry>>,
    /// Factors of a distribution run; more than one are tensored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operands: Option<Vec<OperandJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// B-spline degree per direction for fem-poisson.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_total: Option<usize>,
    /// Approximant indices for acs-tensor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub const DEFAULT_CASES: usize = 20;
pub const DEFAULT_ACS_SCHEDULE: [usize; 3] = [8, 16, 32];
pub const DEFAULT_ACS_MS: [usize; 4] = [1, 2, 4, 8];
pub const DEFAULT_FEM_SCHEDULE: [usize; 3] = [12, 24, 48];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn new(kind: Kind) -> Self {
        ExperimentConfig {
            kind,
            seed: 0,
            tol: None,
            cases: None,
            schedule: None,
            operands: None,
            mode: None,
            degrees: None,
            max_d: None,
            max_total: None,
            ms: None,
            output: None,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(match self.kind {
            Kind::ToeplitzTensor | Kind::GltTensor => 1e-12,
            Kind::SamplingTensor | Kind::PermutationAudit => 0.0,
            Kind::AcsTensor => 0.2,
            Kind::Distribution | Kind::FemPoisson => 0.05,
        })
    }

    /// Checks field ranges and that the fields a kind needs are present.
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t.is_finite() && t >= 0.0) {
                return domain(format!("tolerance {t} must be finite and non-negative"));
            }
        }
        if self.cases == Some(0) {
            return domain("cases must be at least 1");
        }
        if let Some(s) = &self.schedule {
            if s.is_empty() || s.iter().any(|e| e.sizes().is_empty() || e.sizes().contains(&0)) {
                return domain("schedule entries must be non-empty and positive");
            }
            let d = s[0].sizes().len();
            if s.iter().any(|e| e.sizes().len() != d) {
                return domain("schedule entries have different numbers of levels");
            }
        }
        match self.kind {
            Kind::Distribution => {
                if self.schedule.is_none() {
                    return domain("distribution needs a schedule");
                }
                match &self.operands {
                    Some(ops) if !ops.is_empty() => {}
                    _ => return domain("distribution needs at least one operand"),
                }
            }
            Kind::AcsTensor | Kind::FemPoisson => {
                if self.schedule.as_ref().is_some_and(|s| s.iter().any(|e| e.sizes().len() != 1)) {
                    return domain("this kind takes a one-level schedule");
                }
                if self.ms.as_ref().is_some_and(|m| m.is_empty() || m.contains(&0)) {
                    return domain("ms must be non-empty and positive");
                }
            }
            Kind::PermutationAudit => {
                if self.max_d == Some(0) || self.max_total == Some(0) {
                    return domain("max_d and max_total must be positive");
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn one_level_schedule(&self, default: &[usize]) -> Vec<usize> {
        match &self.schedule {
            Some(s) => s.iter().map(|e| e.sizes()[0]).collect(),
            None => default.to_vec(),
        }
    }
}

/// Result of [`run`]: verdict, summary and named CSV tables.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub pass: bool,
    pub summary: Value,
    pub tables: Vec<(String, String)>,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn battery_json(b: &BatteryReport) -> Value {
    json!({ "name": b.name, "cases": b.cases.len(), "tol": b.tol, "max_dev": b.max_dev, "verdict": verdict(b.pass) })
}

fn distribution_json(r: &DistributionReport) -> Value {
    let deltas: Vec<Value> = r.deltas.iter().map(|(n, d)| json!({ "n": size_label(n), "delta": d })).collect();
    json!({
        "mode": r.mode,
        "tol": r.tol,
        "deltas": deltas,
        "strictly_decreasing": r.strictly_decreasing(),
        "verdict": verdict(r.pass),
    })
}

/// `D_n(x_1) T_n(2 - 2cos θ)` over a one-level schedule.
fn staircase_target(ns: &[usize], a: CoeffFn) -> Result<MatrixFamily> {
    let f = TrigPoly::laplacian();
    MatrixFamily::new(MatrixFamily::schedule_1d(ns), 1, 1, move |n| diag_sampling(n, &a, 1)?.matmul(&toeplitz(n, &f)?))
}

/// The staircase pair: target `D_n(x_1) T_n(2 - 2cos θ)`, approximants with
/// `x_1` replaced by its `m`-step midpoint staircase.
pub fn staircase_pair(ns: &[usize], ms: &[usize]) -> Result<AcsPair> {
    let target = staircase_target(ns, CoeffFn::coordinate(1, 1)?)?;
    AcsPair::from_fn(target, ms.to_vec(), |m| staircase_target(ns, CoeffFn::staircase(1, 1, m)?))
}

fn run_inner(cfg: &ExperimentConfig) -> Result<(bool, Value, Vec<(String, String)>)> {
    let tol = cfg.tolerance();
    let cases = cfg.cases.unwrap_or(DEFAULT_CASES);
    Ok(match cfg.kind {
        Kind::ToeplitzTensor => {
            let (block, scalar) = toeplitz_battery(cfg.seed, cases, cases, tol)?;
            let pass = block.pass && scalar.pass;
            let csv = format!("{}{}", block.to_csv(), scalar.to_csv().split_once('\n').map_or("", |x| x.1));
            let summary = json!({
                "max_dev": block.max_dev.max(scalar.max_dev),
                "batteries": [battery_json(&block), battery_json(&scalar)],
            });
            (pass, summary, vec![("cases.csv".into(), csv)])
        }
        Kind::SamplingTensor => {
            let b = sampling_battery(cfg.seed, cases)?;
            let b = BatteryReport { pass: b.max_dev <= tol, tol, ..b };
            (b.pass, json!({ "max_dev": b.max_dev, "batteries": [battery_json(&b)] }), vec![("cases.csv".into(), b.to_csv())])
        }
        Kind::GltTensor => {
            let b = glt_structural_battery(cfg.seed, cfg.cases.unwrap_or(10), tol)?;
            (b.pass, json!({ "max_dev": b.max_dev, "batteries": [battery_json(&b)] }), vec![("cases.csv".into(), b.to_csv())])
        }
        Kind::PermutationAudit => {
            let (b, audit) = uniqueness_battery(cfg.max_d.unwrap_or(4), cfg.max_total.unwrap_or(8))?;
            let mut csv = String::from("sizes,sigma,solutions,matches_gamma,unique\n");
            for a in &audit {
                let sizes: Vec<String> = a.sizes.iter().map(|s| s.to_string()).collect();
                csv.push_str(&format!(
                    "{},\"{}\",{},{},{}\n",
                    sizes.join("x"),
                    a.sigma,
                    a.solutions,
                    a.matches_gamma,
                    a.unique()
                ));
            }
            let summary = json!({ "audited": audit.len(), "unique": b.pass, "max_dev": b.max_dev });
            (b.pass, summary, vec![("audit.csv".into(), csv)])
        }
        Kind::Distribution => {
            let specs = cfg.operands.as_deref().unwrap_or_default();
            let schedule: Vec<Vec<usize>> = cfg.schedule.as_deref().unwrap_or_default().iter().map(SizeEntry::sizes).collect();
            let symbols = specs.iter().map(OperandJson::symbol).collect::<Result<Vec<_>>>()?;
            let levels: Vec<usize> = symbols.iter().map(GltSymbol::levels).collect();
            if levels.iter().sum::<usize>() != schedule[0].len() {
                return domain(format!(
                    "schedule entries have {} levels, operands need {}",
                    schedule[0].len(),
                    levels.iter().sum::<usize>()
                ));
            }
            let full: Vec<MultiIndex> = schedule.iter().map(|n| MultiIndex::sizes(n)).collect();
            let mut ops = Vec::new();
            for (i, k) in symbols.into_iter().enumerate() {
                let part: Vec<MultiIndex> =
                    full.iter().map(|n| n.split(&levels)).collect::<Result<Vec<_>>>()?.into_iter().map(|p| p[i].clone()).collect();
                ops.push(GltOperand::from_symbol(k, part)?);
            }
            let op = if ops.len() == 1 { ops.pop().expect("one operand") } else { glt_tensor(&ops)? };
            let symbol = op.symbol.clone().into();
            let report = distribution_report(&op.family, &symbol, None, cfg.mode.unwrap_or(Mode::Sv), tol)?;
            (report.pass, json!({ "distribution": distribution_json(&report) }), vec![("distribution.csv".into(), report.to_csv())])
        }
        Kind::FemPoisson => {
            let ps = cfg.degrees.clone().unwrap_or_else(|| vec![1, 1]);
            let report = verify_poisson(&ps, &cfg.one_level_schedule(&DEFAULT_FEM_SCHEDULE), tol)?;
            let summary = json!({ "sv": distribution_json(&report.sv), "eig": distribution_json(&report.eig) });
            let tables = vec![("sv.csv".into(), report.sv.to_csv()), ("eig.csv".into(), report.eig.to_csv())];
            (report.pass(), summary, tables)
        }
        Kind::AcsTensor => {
            let ns = cfg.one_level_schedule(&DEFAULT_ACS_SCHEDULE);
            let ms = cfg.ms.clone().unwrap_or_else(|| DEFAULT_ACS_MS.to_vec());
            let pair = staircase_pair(&ns, &ms)?;
            let rep = acs_tensor_check(&pair, &pair, tol, &SuHypothesis::default())?;
            let rho: Vec<Value> = rep.report.rho_hat.iter().map(|(m, r)| json!({ "m": m, "rho_hat": r })).collect();
            let summary = json!({
                "left_su": rep.left_su,
                "right_su": rep.right_su,
                "rho_hat": rho,
                "verdict": rep.verdict.to_string(),
            });
            (rep.verdict == crate::acs::Verdict::Pass, summary, vec![("acs.csv".into(), rep.report.to_csv())])
        }
    })
}

/// Validates and executes `cfg`. Errors are configuration or size errors;
/// a failed check is a normal outcome with `pass == false`.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let start = Instant::now();
    let (pass, results, tables) = run_inner(cfg)?;
    let summary = json!({
        "config": cfg,
        "tol": cfg.tolerance(),
        "results": results,
        "verdict": verdict(pass),
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    Ok(Outcome { pass, summary, tables })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reject() {
        let cfg = ExperimentConfig::from_json(r#"{"kind":"toeplitz-tensor","seed":7}"#).unwrap();
        assert_eq!(cfg.kind, Kind::ToeplitzTensor);
        assert_eq!(cfg.tolerance(), 1e-12);
        assert!(ExperimentConfig::from_json(r#"{"kind":"toeplitz-tensor","sede":7}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"distribution","schedule":[4]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"fem-poisson","schedule":[4,[4,4]]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"toeplitz-tensor","tol":-1}"#).is_err());
        let cfg = ExperimentConfig::from_json(r#"{"kind":"fem-poisson","schedule":[[4],5]}"#).unwrap();
        assert_eq!(cfg.one_level_schedule(&[]), vec![4, 5]);
    }

    #[test]
    fn batteries_run_deterministically() {
        let mut cfg = ExperimentConfig::new(Kind::ToeplitzTensor);
        cfg.seed = 7;
        cfg.cases = Some(5);
        let a = run(&cfg).unwrap();
        assert!(a.pass);
        assert!(a.summary["results"]["max_dev"].as_f64().unwrap() <= 1e-12);
        assert_eq!(a.tables, run(&cfg).unwrap().tables);
        let mut cfg = ExperimentConfig::new(Kind::PermutationAudit);
        cfg.max_d = Some(2);
        cfg.max_total = Some(4);
        let out = run(&cfg).unwrap();
        assert!(out.pass);
        assert_eq!(out.summary["results"]["unique"], json!(true));
    }

    #[test]
    fn distribution_from_operands() {
        let text = r#"{"kind":"distribution","mode":"eig","tol":0.1,"schedule":[16,32],
            "operands":[{"terms":[{"coeff":"1","trig":{"levels":1,"s":1,"t":1,
              "coeffs":[{"k":[0],"re":[[2]]},{"k":[1],"re":[[-1]]},{"k":[-1],"re":[[-1]]}]}}]}]}"#;
        let out = run(&ExperimentConfig::from_json(text).unwrap()).unwrap();
        assert!(out.pass, "{}", out.summary);
        assert!(out.tables[0].1.starts_with("n,N,F,empirical,reference,abs_diff\n16,"));
        let two = text.replace("[16,32]", "[[4,4],[8,8]]").replace("}]}]}", "}]},{\"terms\":[{\"coeff\":\"1\",\"trig\":{\"levels\":1,\"s\":1,\"t\":1,\"coeffs\":[{\"k\":[0],\"re\":[[1]]}]}}]}]}");
        let out = run(&ExperimentConfig::from_json(&two).unwrap()).unwrap();
        assert!(out.tables[0].1.contains("\n4x4,"), "{}", out.tables[0].1);
        let bad = text.replace("[16,32]", "[[4,4]]");
        assert!(run(&ExperimentConfig::from_json(&bad).unwrap()).is_err());
    }
}
