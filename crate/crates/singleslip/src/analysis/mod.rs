//! Seminorm quadrature, harmonic completion and closed-form energy bounds.

pub mod harmonic;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BcKind, SQRT2};

pub use harmonic::{complete_scalar, complete_vector, harmonic_complete, CompletedEnergy, HarmonicSolution};
pub use quadrature::{q_alpha, q_alpha_cross, q_alpha_monte_carlo, q_alpha_reflected, MonteCarloEstimate};

const L_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Zero,
    Linear,
    Quadratic,
    Boundary,
    /// No scaling law is known (antiplane model below `L = 1/2`).
    Open,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Zero => "zero",
            Regime::Linear => "linear",
            Regime::Quadratic => "quadratic",
            Regime::Boundary => "boundary",
            Regime::Open => "open",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum LowerBound {
    Value(f64),
    /// Strictly positive with an unknown constant.
    UndeterminedPositive,
}

impl LowerBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            LowerBound::Value(v) => Some(*v),
            LowerBound::UndeterminedPositive => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperCandidate {
    pub label: String,
    /// Known part of the bound.
    pub base: f64,
    /// Coefficient-free `c sigma gamma` term whose constant is not known.
    pub unknown_sigma_gamma: Option<f64>,
}

impl UpperCandidate {
    fn known(label: &str, base: f64) -> Self {
        Self { label: label.into(), base, unknown_sigma_gamma: None }
    }

    pub fn value(&self) -> Option<f64> {
        match self.unknown_sigma_gamma {
            None => Some(self.base),
            Some(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: LowerBound,
    pub upper_candidates: Vec<UpperCandidate>,
    pub regime: Regime,
}

impl BoundPair {
    /// Smallest fully determined upper bound.
    pub fn upper_min(&self) -> Option<f64> {
        self.upper_candidates.iter().filter_map(|c| c.value()).reduce(f64::min)
    }

    /// Whether `j` lies between the bounds up to relative slack `slack`.
    pub fn brackets(&self, j: f64, slack: f64) -> bool {
        let lo_ok = match self.lower {
            LowerBound::Value(v) => j >= v * (1.0 - slack) - 1e-14,
            LowerBound::UndeterminedPositive => j > 0.0,
        };
        let hi_ok = self.upper_min().map_or(true, |u| j <= u * (1.0 + slack) + 1e-14);
        lo_ok && hi_ok
    }
}

/// Closed-form bounds on the minimal energy with their regime label.
///
/// For `tau > 0` the band constructions pick up their hardening energy
/// (`2 tau gamma` for both single and double bands, `tau gamma (3 - L)` for
/// crossing bands); constructions with unknown constants stay undetermined.
pub fn analytic_bounds(bc: BcKind, l: f64, gamma: f64, sigma: f64, tau: f64) -> Result<BoundPair> {
    for (name, v) in [("L", l), ("gamma", gamma), ("sigma", sigma), ("tau", tau)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
        }
    }
    if l <= 0.0 {
        return Err(Error::InvalidParameter("L must be positive".into()));
    }
    let g2 = gamma * gamma;
    let sg = sigma * gamma;
    let tg = tau * gamma;
    let near = |a: f64| (l - a).abs() <= L_TOL;
    let transition = |base: f64| UpperCandidate {
        label: "transition_layers".into(),
        base,
        unknown_sigma_gamma: Some(sg),
    };
    let out = match bc {
        BcKind::Horizontal | BcKind::Horizontal3d => {
            let sigma_eff = if bc == BcKind::Horizontal3d { SQRT2 * sigma } else { sigma };
            let elastic = UpperCandidate::known("elastic", g2 / (2.0 * l));
            if near(2.0) {
                BoundPair {
                    lower: LowerBound::Value(0.0),
                    upper_candidates: vec![elastic, UpperCandidate::known("boundary_sequence", 0.0)],
                    regime: Regime::Boundary,
                }
            } else if l > 2.0 {
                BoundPair {
                    lower: LowerBound::Value(0.0),
                    upper_candidates: vec![elastic, UpperCandidate::known("double_band", 2.0 * tg)],
                    regime: Regime::Zero,
                }
            } else if l > 1.0 + L_TOL {
                let crossing = UpperCandidate::known("crossing_bands", 2.0 * SQRT2 * gamma * sigma_eff + tg * (3.0 - l));
                let (lower, regime) = if sigma > 0.0 && gamma > 0.0 {
                    (LowerBound::UndeterminedPositive, Regime::Linear)
                } else {
                    (LowerBound::Value(0.0), Regime::Zero)
                };
                BoundPair { lower, upper_candidates: vec![elastic, crossing], regime }
            } else if near(1.0) {
                let (lower, regime) = if sigma > 0.0 && gamma > 0.0 {
                    (LowerBound::UndeterminedPositive, Regime::Linear)
                } else {
                    (LowerBound::Value(0.0), Regime::Linear)
                };
                BoundPair { lower, upper_candidates: vec![elastic, transition(0.0)], regime }
            } else {
                let lower = g2 * (1.0 - l) / (2.0 * l);
                BoundPair {
                    lower: LowerBound::Value(lower),
                    upper_candidates: vec![elastic, transition(lower)],
                    regime: Regime::Quadratic,
                }
            }
        }
        BcKind::Diagonal => {
            let elastic = UpperCandidate::known("elastic", 3.0 * g2 / (2.0 * l));
            if near(1.0) {
                BoundPair {
                    lower: LowerBound::Value(0.0),
                    upper_candidates: vec![elastic, UpperCandidate::known("boundary_sequence", 0.0)],
                    regime: Regime::Boundary,
                }
            } else if l > 1.0 {
                BoundPair {
                    lower: LowerBound::Value(0.0),
                    upper_candidates: vec![elastic, UpperCandidate::known("shear_band", 2.0 * tg)],
                    regime: Regime::Zero,
                }
            } else {
                let lower = g2 * (1.0 - l) / l;
                BoundPair {
                    lower: LowerBound::Value(lower),
                    upper_candidates: vec![elastic, transition(lower)],
                    regime: Regime::Quadratic,
                }
            }
        }
        BcKind::ScalarShear => {
            let elastic = UpperCandidate::known("elastic", g2 / l);
            if near(0.5) {
                BoundPair {
                    lower: LowerBound::Value(0.0),
                    upper_candidates: vec![elastic, UpperCandidate::known("boundary_sequence", 0.0)],
                    regime: Regime::Boundary,
                }
            } else if l > 0.5 {
                let mut ups = vec![elastic];
                if tau == 0.0 {
                    ups.push(UpperCandidate::known("monotonicity", 0.0));
                }
                BoundPair { lower: LowerBound::Value(0.0), upper_candidates: ups, regime: Regime::Zero }
            } else {
                BoundPair { lower: LowerBound::Value(0.0), upper_candidates: vec![elastic], regime: Regime::Open }
            }
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_example() {
        let b = analytic_bounds(BcKind::Horizontal, 0.5, 0.1, 0.1, 0.0).unwrap();
        assert!((b.lower.value().unwrap() - 0.005).abs() < 1e-15);
        assert!((b.upper_min().unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(b.regime, Regime::Quadratic);
        let t = b.upper_candidates.iter().find(|c| c.label == "transition_layers").unwrap();
        assert_eq!(t.value(), None);
        assert!((t.unknown_sigma_gamma.unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn linear_example() {
        let b = analytic_bounds(BcKind::Horizontal, 1.5, 0.1, 0.2, 0.0).unwrap();
        assert_eq!(b.lower, LowerBound::UndeterminedPositive);
        let v: Vec<f64> = b.upper_candidates.iter().filter_map(|c| c.value()).collect();
        assert!((v[0] - 0.01 / 3.0).abs() < 1e-15);
        assert!((v[1] - 0.0565685424949238).abs() < 1e-12);
        assert_eq!(b.regime, Regime::Linear);
    }

    #[test]
    fn zero_and_boundary() {
        let b = analytic_bounds(BcKind::Diagonal, 2.0, 7.0, 0.3, 0.0).unwrap();
        assert_eq!(b.lower.value(), Some(0.0));
        assert_eq!(b.upper_min(), Some(0.0));
        assert_eq!(b.regime, Regime::Zero);
        assert_eq!(analytic_bounds(BcKind::Horizontal, 2.0, 1.0, 0.1, 0.0).unwrap().regime, Regime::Boundary);
        assert_eq!(analytic_bounds(BcKind::Horizontal, 2.4, 1.0, 0.1, 0.0).unwrap().regime, Regime::Zero);
        assert_eq!(analytic_bounds(BcKind::Diagonal, 1.0, 1.0, 0.1, 0.0).unwrap().regime, Regime::Boundary);
        assert!(analytic_bounds(BcKind::Horizontal, 1.0, -1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn uppers_dominate_lowers() {
        for bc in [BcKind::Diagonal, BcKind::Horizontal, BcKind::Horizontal3d, BcKind::ScalarShear] {
            for l in [0.2, 0.5, 0.9, 1.0, 1.3, 2.0, 2.7] {
                for gamma in [0.0, 0.1, 3.0] {
                    let b = analytic_bounds(bc, l, gamma, 0.2, 0.1).unwrap();
                    if let Some(lo) = b.lower.value() {
                        for c in &b.upper_candidates {
                            assert!(c.base >= lo - 1e-15, "{bc:?} {l} {c:?}");
                        }
                    }
                }
            }
        }
    }
}
