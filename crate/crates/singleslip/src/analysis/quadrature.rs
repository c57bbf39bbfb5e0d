//! Fractional seminorm of `f(x) = 1 - x^alpha` on the unit interval.
//!
//! With `y = x t` the double integral separates:
//! `Q(alpha) = (1/alpha) * int_0^1 (1 - t^alpha)^2 / (1 - t)^2 dt`, and the
//! cross term of the even reflection becomes the same with `(1 + t)^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Tanh-sinh rule on `[0, 1]`. `f` receives `(t, 1 - t)` so that integrands
/// can use the complement without cancellation.
pub fn tanh_sinh_unit(f: impl Fn(f64, f64) -> f64, tol: f64) -> Result<f64> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let node = |k: f64, step: f64| -> Option<(f64, f64, f64)> {
        let s = k * step;
        let u = half_pi * s.sinh();
        let ch = u.cosh();
        // t = (1 + tanh u)/2, 1 - t = (1 - tanh u)/2 = 1/(1 + e^{2u})
        let e = (2.0 * u).exp();
        let lo = 1.0 / (1.0 + e);
        let hi = e / (1.0 + e);
        let w = 0.5 * half_pi * s.cosh() / (ch * ch);
        if !(w.is_finite()) || w == 0.0 || lo == 0.0 || hi == 0.0 {
            return None;
        }
        Some((hi, lo, w))
    };
    let mut step = 1.0;
    let mut prev = f64::NAN;
    for _level in 0..12 {
        let mut acc = 0.0;
        let mut k = 0i64;
        loop {
            let mut any = false;
            for kk in if k == 0 { vec![0.0] } else { vec![k as f64, -(k as f64)] } {
                if let Some((t, ct, w)) = node(kk, step) {
                    let v = f(t, ct) * w;
                    if !v.is_finite() {
                        return Err(Error::Quadrature(format!("non-finite integrand at t = {t}")));
                    }
                    acc += v;
                    if w > 1e-300 {
                        any = true;
                    }
                }
            }
            if !any && k > 0 {
                break;
            }
            k += 1;
            if k > 100_000 {
                break;
            }
        }
        let est = acc * step;
        if (est - prev).abs() <= tol * est.abs().max(1e-300) {
            return Ok(est);
        }
        prev = est;
        step *= 0.5;
    }
    Err(Error::Quadrature(format!("tanh-sinh did not reach relative tolerance {tol}")))
}

/// `1 - t^alpha` computed from `ln t` without cancellation.
fn one_minus_pow(t: f64, alpha: f64) -> f64 {
    -(alpha * t.ln()).exp_m1()
}

fn diagonal_integral(alpha: f64) -> Result<f64> {
    tanh_sinh_unit(
        |t, ct| {
            let a = one_minus_pow(t, alpha);
            if ct == 0.0 {
                return alpha * alpha;
            }
            (a / ct).powi(2)
        },
        1e-12,
    )
}

fn cross_integral(alpha: f64) -> Result<f64> {
    tanh_sinh_unit(|t, _| (one_minus_pow(t, alpha) / (1.0 + t)).powi(2), 1e-12)
}

/// `int_0^1 int_0^1 (x^alpha - y^alpha)^2 / (x - y)^2 dx dy`.
pub fn q_alpha(alpha: f64) -> Result<f64> {
    check(alpha)?;
    Ok(diagonal_integral(alpha)? / alpha)
}

/// `int_0^1 int_0^1 (x^alpha - z^alpha)^2 / (x + z)^2 dx dz`.
pub fn q_alpha_cross(alpha: f64) -> Result<f64> {
    check(alpha)?;
    Ok(cross_integral(alpha)? / alpha)
}

/// Seminorm of the even extension of `1 - |x|^alpha` on `(-1, 1)`.
pub fn q_alpha_reflected(alpha: f64) -> Result<f64> {
    Ok(2.0 * q_alpha(alpha)? + 2.0 * q_alpha_cross(alpha)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Importance-sampled estimate of the seminorm double integral.
///
/// Points are drawn with density `alpha * max(x, y)^(2 alpha - 2)` on the
/// unit square, under which the weighted integrand depends only on
/// `min / max` and is bounded. With
/// `cross = true` the denominator is `(x + y)^2`.
pub fn q_alpha_monte_carlo(alpha: f64, samples: usize, seed: u64, cross: bool) -> Result<MonteCarloEstimate> {
    check(alpha)?;
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        // With x = r, y = r w (or swapped) the radius cancels between the
        // integrand and the density, so only the ratio w is drawn.
        let w: f64 = rng.gen::<f64>();
        let num = (1.0 - w.powf(alpha)).powi(2);
        let v = if cross {
            num / ((1.0 + w).powi(2) * alpha)
        } else if w == 1.0 {
            alpha
        } else {
            num / ((1.0 - w).powi(2) * alpha)
        };
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok(MonteCarloEstimate { mean, std_error: (var / samples as f64).sqrt(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_polynomial() {
        let v = tanh_sinh_unit(|t, _| 3.0 * t * t, 1e-13).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = tanh_sinh_unit(|t, _| t.sqrt().recip(), 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn q_at_one_is_one() {
        assert!((q_alpha(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(q_alpha(0.0).is_err());
        assert!(q_alpha(1.5).is_err());
    }

    #[test]
    fn q_increasing_and_small() {
        let grid = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0];
        let v: Vec<f64> = grid.iter().map(|a| q_alpha(*a).unwrap()).collect();
        for w in v.windows(2) {
            assert!(w[0] < w[1], "{v:?}");
        }
        assert!(v[1] < 0.15);
    }

    #[test]
    fn cross_term_smaller() {
        for a in [0.1, 0.5, 1.0] {
            assert!(q_alpha_cross(a).unwrap() < q_alpha(a).unwrap());
        }
        let a = q_alpha_reflected(0.2).unwrap();
        let b = q_alpha_reflected(0.5).unwrap();
        assert!(a < b);
    }

    #[test]
    fn cross_term_closed_form_at_one() {
        // (1 - t)^2 / (1 + t)^2 integrates to 3 - 4 ln 2.
        let exact = 3.0 - 4.0 * std::f64::consts::LN_2;
        assert!((q_alpha_cross(1.0).unwrap() - exact).abs() < 1e-12);
    }
}
