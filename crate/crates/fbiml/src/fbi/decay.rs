//! Decay-rate classification of transform moduli along frequency rays.
//!
//! Exponential decay `C e^{-eps |xi|^(1/s)}` at some `s > 1` certifies
//! Gevrey-`s` microlocal regularity; decay faster than every polynomial
//! certifies smoothness. The fit works on the worst-case envelope (max of
//! `|F|` per frequency over all base points and rays), matching the uniform
//! quantifiers of the characterization.

use super::FbiError;
use crate::star::Cone;
use crate::util::linear_fit;

/// Fitted decay class.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayClass {
    /// `|F| <= c * exp(-eps |xi|^(1/s))`.
    ExponentialGevrey { s: f64, eps: f64, c: f64 },
    /// `|F| <= c_n / (1 + |xi|)^n`.
    Polynomial { n: f64, c_n: f64 },
    NoDecay,
}

/// Classification result with fit diagnostics.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub class: DecayClass,
    /// RMS residual of the winning fit in log space.
    pub residual: f64,
    pub xi_range: (f64, f64),
    pub cone: Option<Cone>,
    /// Distinct frequencies in the fitted envelope.
    pub samples_used: usize,
}

/// Default Gevrey-exponent grid `1.05..4.0`.
pub fn default_s_grid() -> Vec<f64> {
    (0..60).map(|i| 1.05 + 0.05 * i as f64).collect()
}

/// Fits the worst-case envelope of `(|xi|, |F|)` samples: exponential
/// `log|F| = log c - eps |xi|^(1/s)` over the `s`-grid (least squares per
/// `s`, best residual wins), falling back to the polynomial model
/// `log|F| = log c_n - n log(1 + |xi|)`, and `NoDecay` when the fitted
/// `eps <= 0` and `n <= 0.5`.
pub fn fit_decay(
    samples: &[(f64, f64)],
    s_grid: &[f64],
    cone: Option<Cone>,
) -> Result<DecayFit, FbiError> {
    if samples.iter().any(|&(_, v)| !(v >= 0.0)) {
        return Err(FbiError::NonPositiveMagnitude);
    }
    // Worst-case envelope: group by frequency, keep the max modulus.
    let mut sorted: Vec<(f64, f64)> = samples.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut env: Vec<(f64, f64)> = Vec::new();
    for (xi, v) in sorted {
        match env.last_mut() {
            Some((last_xi, last_v)) if (xi - *last_xi).abs() <= 1e-9 * xi.abs() => {
                *last_v = last_v.max(v);
            }
            _ => env.push((xi, v)),
        }
    }
    let got = env.len();
    let decade = env
        .first()
        .zip(env.last())
        .map_or(false, |(a, b)| b.0 >= 10.0 * a.0 && a.0 > 0.0);
    if got < 12 || !decade {
        return Err(FbiError::InsufficientSamples { need: 12, got });
    }
    // All-zero envelopes decay trivially faster than any model; report the
    // strongest class with infinite rate.
    let positive: Vec<(f64, f64)> = env.iter().copied().filter(|&(_, v)| v > 0.0).collect();
    let xi_range = (env[0].0, env[env.len() - 1].0);
    if positive.len() < 12 {
        return Ok(DecayFit {
            class: DecayClass::ExponentialGevrey {
                s: s_grid.first().copied().unwrap_or(1.05),
                eps: f64::INFINITY,
                c: 0.0,
            },
            residual: 0.0,
            xi_range,
            cone,
            samples_used: got,
        });
    }

    let logs: Vec<f64> = positive.iter().map(|&(_, v)| v.ln()).collect();

    // Exponential family over the s-grid.
    let mut best_exp: Option<(f64, f64, f64, f64)> = None; // (s, eps, log c, residual)
    for &s in s_grid {
        if !(s > 1.0) {
            continue;
        }
        let xs: Vec<f64> = positive.iter().map(|&(xi, _)| -xi.powf(1.0 / s)).collect();
        let (slope, intercept, res) = linear_fit(&xs, &logs);
        // Model log v = log c - eps xi^(1/s): slope against -xi^(1/s) is eps.
        if best_exp.map_or(true, |(_, _, _, r)| res < r) {
            best_exp = Some((s, slope, intercept, res));
        }
    }
    let (s_best, eps_best, logc_best, res_exp) =
        best_exp.ok_or(FbiError::InsufficientSamples { need: 1, got: 0 })?;

    // Polynomial family.
    let xs_poly: Vec<f64> = positive.iter().map(|&(xi, _)| -(1.0 + xi).ln()).collect();
    let (n_fit, logcn, res_poly) = linear_fit(&xs_poly, &logs);

    let class = if eps_best > 1e-6 && res_exp <= res_poly {
        DecayClass::ExponentialGevrey {
            s: s_best,
            eps: eps_best,
            c: logc_best.exp(),
        }
    } else if n_fit > 0.5 {
        DecayClass::Polynomial {
            n: n_fit,
            c_n: logcn.exp(),
        }
    } else {
        DecayClass::NoDecay
    };
    let residual = match class {
        DecayClass::ExponentialGevrey { .. } => res_exp,
        _ => res_poly,
    };
    Ok(DecayFit {
        class,
        residual,
        xi_range,
        cone,
        samples_used: got,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn gevrey_two_synthetic() {
        let samples: Vec<(f64, f64)> = log_grid(1.0, 400.0, 24)
            .into_iter()
            .map(|xi| (xi, (-2.0 * xi.sqrt()).exp()))
            .collect();
        let fit = fit_decay(&samples, &default_s_grid(), None).unwrap();
        match fit.class {
            DecayClass::ExponentialGevrey { s, eps, .. } => {
                assert!((s - 2.0).abs() / 2.0 < 0.05, "s = {s}");
                assert!((eps - 2.0).abs() / 2.0 < 0.05, "eps = {eps}");
            }
            other => panic!("expected Gevrey, got {other:?}"),
        }
    }

    #[test]
    fn polynomial_synthetic() {
        let samples: Vec<(f64, f64)> = log_grid(1.0, 500.0, 30)
            .into_iter()
            .map(|xi| (xi, (1.0 + xi).powi(-5)))
            .collect();
        let fit = fit_decay(&samples, &default_s_grid(), None).unwrap();
        match fit.class {
            DecayClass::Polynomial { n, .. } => {
                assert!((n - 5.0).abs() < 0.2, "n = {n}");
            }
            other => panic!("expected polynomial, got {other:?}"),
        }
    }

    #[test]
    fn flat_envelope_is_no_decay() {
        let samples: Vec<(f64, f64)> = log_grid(1.0, 100.0, 16)
            .into_iter()
            .map(|xi| (xi, 0.7))
            .collect();
        let fit = fit_decay(&samples, &default_s_grid(), None).unwrap();
        assert_eq!(fit.class, DecayClass::NoDecay);
    }

    #[test]
    fn worst_case_envelope_dominates() {
        // A decaying ray plus a flat ray at the same frequencies must be
        // classified by the flat one.
        let mut samples = Vec::new();
        for xi in log_grid(1.0, 100.0, 16) {
            samples.push((xi, (-xi).exp()));
            samples.push((xi, 0.5));
        }
        let fit = fit_decay(&samples, &default_s_grid(), None).unwrap();
        assert_eq!(fit.class, DecayClass::NoDecay);
    }

    #[test]
    fn insufficient_samples_rejected() {
        let samples: Vec<(f64, f64)> = log_grid(1.0, 2.0, 20)
            .into_iter()
            .map(|xi| (xi, (-xi).exp()))
            .collect();
        // 20 samples but no decade of range.
        assert!(matches!(
            fit_decay(&samples, &default_s_grid(), None),
            Err(FbiError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn negative_magnitude_rejected() {
        let samples = vec![(1.0, 0.5), (10.0, -0.1)];
        assert!(matches!(
            fit_decay(&samples, &default_s_grid(), None),
            Err(FbiError::NonPositiveMagnitude)
        ));
    }
}
