//! Flat `key=value` run configuration.
//!
//! Pairs are separated by whitespace or newlines, `#` starts a comment, and
//! lists are comma separated. Keys are lowercase snake case; `L` is accepted
//! as a spelling of `l`. Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BcKind;
use crate::minimizer::{AnnealConfig, SolverConfig, WarmStart};
use crate::sweep::{BoundaryCase, SlipModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EvaluateConstruction,
    Minimize,
    #[serde(rename = "sweep-L")]
    SweepL,
    SweepGamma,
    RegimeMap,
    BoundaryCase,
    QAlpha,
    OracleCheck,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::EvaluateConstruction => "evaluate-construction",
            Command::Minimize => "minimize",
            Command::SweepL => "sweep-L",
            Command::SweepGamma => "sweep-gamma",
            Command::RegimeMap => "regime-map",
            Command::BoundaryCase => "boundary-case",
            Command::QAlpha => "q-alpha",
            Command::OracleCheck => "oracle-check",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "evaluate-construction" => Command::EvaluateConstruction,
            "minimize" => Command::Minimize,
            "sweep-L" | "sweep-l" => Command::SweepL,
            "sweep-gamma" => Command::SweepGamma,
            "regime-map" => Command::RegimeMap,
            "boundary-case" => Command::BoundaryCase,
            "q-alpha" => Command::QAlpha,
            "oracle-check" => Command::OracleCheck,
            other => return Err(Error::Config(format!("unknown command '{other}'"))),
        })
    }
}

const KEYS: &[&str] = &[
    "command",
    "output_dir",
    "rng_seed",
    "n",
    "bc",
    "l",
    "ls",
    "gamma",
    "gammas",
    "sigma",
    "tau",
    "name",
    "epsilon",
    "alpha",
    "alphas",
    "case",
    "model",
    "slack",
    "timing",
    "plot",
    "huber_delta",
    "huber_delta_final",
    "inner_tol",
    "max_inner",
    "max_outer",
    "anneal",
    "instances",
    "mc_samples",
];

/// Fully resolved configuration; serialized verbatim into `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub output_dir: PathBuf,
    pub rng_seed: u64,
    pub n: usize,
    pub bc: BcKind,
    pub l: Option<f64>,
    pub ls: Vec<f64>,
    pub gamma: Option<f64>,
    pub gammas: Vec<f64>,
    pub sigma: f64,
    pub tau: f64,
    pub name: Option<String>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub alphas: Vec<f64>,
    pub case: Option<BoundaryCase>,
    pub model: SlipModel,
    pub slack: f64,
    pub timing: bool,
    pub plot: bool,
    pub solver: SolverConfig,
    pub instances: usize,
    pub mc_samples: usize,
}

/// Splits text into `key -> value`, rejecting malformed, unknown and
/// repeated keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got '{token}'")))?;
            let key = if key == "L" { "l" } else { key };
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("unknown key '{key}'")));
            }
            if out.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Config(format!("key '{key}' given twice")));
            }
        }
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got '{v}'"))),
    }
}

pub fn parse_bc(v: &str) -> Result<BcKind> {
    Ok(match v {
        "bc1" | "diagonal" => BcKind::Diagonal,
        "bc2" | "horizontal" => BcKind::Horizontal,
        "bc2_3d" | "horizontal_3d" => BcKind::Horizontal3d,
        "scalar" | "scalar_shear" => BcKind::ScalarShear,
        _ => return Err(Error::Config(format!("bc: unknown boundary condition '{v}'"))),
    })
}

impl RunConfig {
    /// Parses config text and applies `overrides` (same syntax) on top.
    pub fn from_text(text: &str, overrides: &[String]) -> Result<Self> {
        let mut pairs = parse_pairs(text)?;
        for (k, v) in parse_pairs(&overrides.join(" "))? {
            pairs.insert(k, v);
        }
        Self::from_pairs(&pairs)
    }

    pub fn from_pairs(p: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| p.get(k).map(String::as_str);
        let command = Command::parse(get("command").ok_or_else(|| Error::Config("missing key 'command'".into()))?)?;
        let opt_num = |k: &str| get(k).map(|v| num::<f64>(k, v)).transpose();
        let rng_seed = get("rng_seed").map(|v| num("rng_seed", v)).transpose()?.unwrap_or(1);

        let mut solver = SolverConfig::default();
        if let Some(v) = opt_num("huber_delta")? {
            solver.huber_delta = v;
        }
        if let Some(v) = opt_num("huber_delta_final")? {
            solver.huber_delta_final = v;
        }
        if let Some(v) = opt_num("inner_tol")? {
            solver.inner_tol = v;
        }
        if let Some(v) = get("max_inner") {
            solver.max_inner = num("max_inner", v)?;
        }
        if let Some(v) = get("max_outer") {
            solver.max_outer = num("max_outer", v)?;
        }
        solver.seeds = vec![WarmStart::Elastic, WarmStart::Constructions, WarmStart::Random(rng_seed)];
        if get("anneal").map(|v| flag("anneal", v)).transpose()?.unwrap_or(false) {
            solver.anneal = Some(AnnealConfig { seed: rng_seed, ..AnnealConfig::default() });
        }
        solver.validate()?;

        let model = match get("model").unwrap_or("single_slip") {
            "single_slip" => SlipModel::SingleSlip,
            "relaxed" => SlipModel::Relaxed,
            v => return Err(Error::Config(format!("model: expected single_slip or relaxed, got '{v}'"))),
        };
        let cfg = RunConfig {
            command,
            output_dir: PathBuf::from(get("output_dir").unwrap_or("out")),
            rng_seed,
            n: get("n").map(|v| num("n", v)).transpose()?.unwrap_or(64),
            bc: get("bc").map(parse_bc).transpose()?.unwrap_or(BcKind::Horizontal),
            l: opt_num("l")?,
            ls: get("ls").map(|v| list("ls", v)).transpose()?.unwrap_or_default(),
            gamma: opt_num("gamma")?,
            gammas: get("gammas").map(|v| list("gammas", v)).transpose()?.unwrap_or_default(),
            sigma: opt_num("sigma")?.unwrap_or(0.1),
            tau: opt_num("tau")?.unwrap_or(0.0),
            name: get("name").map(str::to_string),
            epsilon: opt_num("epsilon")?,
            alpha: opt_num("alpha")?,
            alphas: get("alphas").map(|v| list("alphas", v)).transpose()?.unwrap_or_default(),
            case: get("case").map(BoundaryCase::parse).transpose()?,
            model,
            slack: opt_num("slack")?.unwrap_or(0.1),
            timing: get("timing").map(|v| flag("timing", v)).transpose()?.unwrap_or(false),
            plot: get("plot").map(|v| flag("plot", v)).transpose()?.unwrap_or(true),
            solver,
            instances: get("instances").map(|v| num("instances", v)).transpose()?.unwrap_or(20),
            mc_samples: get("mc_samples").map(|v| num("mc_samples", v)).transpose()?.unwrap_or(0),
        };
        cfg.check_required()?;
        Ok(cfg)
    }

    fn check_required(&self) -> Result<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("command {} needs {what}", self.command.as_str())))
            }
        };
        match self.command {
            Command::EvaluateConstruction => {
                need(self.name.is_some(), "name")?;
                need(self.l.is_some() && self.gamma.is_some(), "l and gamma")
            }
            Command::Minimize => need(self.l.is_some() && self.gamma.is_some(), "l and gamma"),
            Command::SweepL => {
                need(self.gamma.is_some(), "gamma")?;
                need(!self.ls.is_empty(), "a non-empty ls list")
            }
            Command::SweepGamma => {
                need(self.l.is_some(), "l")?;
                need(!self.gammas.is_empty(), "a non-empty gammas list")
            }
            Command::RegimeMap => {
                need(!self.ls.is_empty(), "a non-empty ls list")?;
                need(!self.gammas.is_empty(), "a non-empty gammas list")
            }
            Command::BoundaryCase => {
                need(self.case.is_some(), "case")?;
                need(self.gamma.is_some(), "gamma")
            }
            Command::QAlpha => need(!self.alphas.is_empty(), "a non-empty alphas list"),
            Command::OracleCheck => need(self.instances > 0, "instances > 0"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_on_lines_and_comments() {
        let p = parse_pairs("command=minimize L=0.5 # height\n gamma=0.1\n\nsigma=0.2").unwrap();
        assert_eq!(p["l"], "0.5");
        assert_eq!(p["sigma"], "0.2");
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn unknown_and_repeated_keys_fail() {
        assert!(matches!(parse_pairs("command=minimize colour=red"), Err(Error::Config(_))));
        assert!(matches!(parse_pairs("gamma=1 gamma=2"), Err(Error::Config(_))));
        assert!(matches!(parse_pairs("Gamma=1"), Err(Error::Config(_))));
    }

    #[test]
    fn empty_gamma_list_is_rejected() {
        let r = RunConfig::from_text("command=sweep-gamma l=1.5 gammas=", &[]);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn overrides_win() {
        let c = RunConfig::from_text("command=minimize l=0.5 gamma=0.1", &["gamma=0.2".into()]).unwrap();
        assert_eq!(c.gamma, Some(0.2));
        assert_eq!(c.bc, BcKind::Horizontal);
        assert_eq!(c.solver.seeds.last(), Some(&WarmStart::Random(1)));
    }
}
