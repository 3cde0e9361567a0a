//! Mollified inversion of the partial kappa-F.B.I. transform.
//!
//! For tube structures the reconstruction at fixed `t` is
//!
//! ```text
//! u(x,t) = lim_{eps->0} (2 pi^3)^(-m/2) iint e^{i xi.(x-x') - |xi|^k |x-x'|^2
//!          - eps |xi|^2} F(x', xi) |xi|^(k m / 2) dx' dxi
//! ```
//!
//! with `x'` running over all of `R^m`. At small `|xi|` the Gaussian factor
//! is wide, so each frequency node carries its own `x'` rule: a trapezoid
//! core covering the cutoff support plus geometric side panels out to a few
//! Gaussian widths `|xi|^(-kappa/2)`. The epsilon iterates are extrapolated
//! to zero by Neville's scheme.

use num_complex::Complex64;
use rayon::prelude::*;

use super::transform::{Cutoff, QuadratureSpec};
use super::FbiError;
use crate::quad::{neville_at_zero, Rule1d};
use crate::tube::TubeStructure;

/// Transform samples at one frequency node: an `m`-axis product rule over
/// `x'` with row-major values.
#[derive(Debug, Clone)]
pub struct XBlock {
    pub x_rules: Vec<Rule1d>,
    pub values: Vec<Complex64>,
}

/// Sampled transform values `F(x', xi) = F_kappa[chi u](t; Z(x', t), xi)`
/// on a per-frequency family of spatial rules.
#[derive(Debug, Clone)]
pub struct FbiSliceData {
    pub kappa: f64,
    pub t: Vec<f64>,
    /// Per-axis frequency rules (`m` axes); blocks are indexed row-major
    /// over the frequency product grid.
    pub xi_rules: Vec<Rule1d>,
    pub blocks: Vec<XBlock>,
}

impl FbiSliceData {
    pub fn m(&self) -> usize {
        self.xi_rules.len()
    }

    /// Largest `|xi|` coordinate covered per axis.
    pub fn xi_max(&self) -> f64 {
        self.xi_rules
            .iter()
            .flat_map(|r| r.nodes.iter())
            .fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    fn xi_at(&self, flat: usize) -> (Vec<f64>, f64) {
        let m = self.m();
        let mut idx = flat;
        let mut xi = vec![0.0; m];
        let mut w = 1.0;
        for a in (0..m).rev() {
            let len = self.xi_rules[a].len();
            let i = idx % len;
            idx /= len;
            xi[a] = self.xi_rules[a].nodes[i];
            w *= self.xi_rules[a].weights[i];
        }
        (xi, w)
    }

    /// Ratio of the max modulus on the outermost frequency shell (any axis
    /// beyond 95% of the cover) to the global max: the truncation-tail
    /// estimate.
    pub fn tail_ratio(&self) -> f64 {
        let edge = 0.95 * self.xi_max();
        let mut global = 0.0f64;
        let mut tail = 0.0f64;
        for (flat, block) in self.blocks.iter().enumerate() {
            let (xi, _) = self.xi_at(flat);
            let v = block.values.iter().map(|c| c.norm()).fold(0.0, f64::max);
            global = global.max(v);
            if xi.iter().any(|x| x.abs() >= edge) {
                tail = tail.max(v);
            }
        }
        if global > 0.0 {
            tail / global
        } else {
            0.0
        }
    }
}

/// Controls for [`forward_slice`].
#[derive(Debug, Clone)]
pub struct ForwardSpec {
    /// Trapezoid nodes per axis on the core `x'` box.
    pub x_nodes: usize,
    /// Frequency cover per axis.
    pub xi_max: f64,
    /// Innermost geometric frequency panel scale.
    pub xi_inner: f64,
    /// Uniform frequency panel width away from zero.
    pub xi_panel: f64,
    /// Side-panel extension reach in Gaussian widths `|xi|^(-kappa/2)`.
    pub x_extend_widths: f64,
}

impl Default for ForwardSpec {
    fn default() -> Self {
        Self {
            x_nodes: 257,
            xi_max: 60.0,
            xi_inner: 1e-4,
            xi_panel: 2.0,
            x_extend_widths: 5.0,
        }
    }
}

/// Forward sweep producing inversion-ready samples.
pub fn forward_slice(
    ts: &TubeStructure,
    u: &(dyn Fn(&[f64]) -> Complex64 + Sync),
    chi: &Cutoff,
    t: &[f64],
    kappa: f64,
    spec: &ForwardSpec,
    quad: &QuadratureSpec,
) -> Result<FbiSliceData, FbiError> {
    let m = ts.m();
    if spec.x_nodes < 2 || !(spec.xi_max > 0.0) {
        return Err(FbiError::BadQuadrature);
    }
    let xi_rules: Vec<Rule1d> = (0..m)
        .map(|_| Rule1d::hybrid_frequency(spec.xi_max, spec.xi_inner, spec.xi_panel, 16))
        .collect();
    let phi_t = ts.phi().eval(t)?;
    let xi_shape: Vec<usize> = xi_rules.iter().map(Rule1d::len).collect();
    let total: usize = xi_shape.iter().product();

    let blocks: Result<Vec<XBlock>, FbiError> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut idx = flat;
            let mut xi = vec![0.0; m];
            for a in (0..m).rev() {
                let len = xi_rules[a].len();
                xi[a] = xi_rules[a].nodes[idx % len];
                idx /= len;
            }
            let xi_abs = crate::util::norm(&xi);
            let reach = spec.x_extend_widths * xi_abs.powf(-0.5 * kappa);
            let x_rules: Vec<Rule1d> = (0..m)
                .map(|a| {
                    let h = ts.v().half_widths()[a];
                    Rule1d::extended_trapezoid(h, spec.x_nodes, h + reach, 24)
                })
                .collect();
            let scaled = quad.scaled_for(xi_abs, kappa);
            let dims: Vec<usize> = x_rules.iter().map(Rule1d::len).collect();
            let count: usize = dims.iter().product();
            let mut values = Vec::with_capacity(count);
            let mut xp = vec![0.0; m];
            for mut v in 0..count {
                for a in (0..m).rev() {
                    xp[a] = x_rules[a].nodes[v % dims[a]];
                    v /= dims[a];
                }
                let z: Vec<Complex64> = xp
                    .iter()
                    .zip(&phi_t)
                    .map(|(x, p)| Complex64::new(*x, *p))
                    .collect();
                values.push(
                    super::transform::fbi_kappa_at(u, chi, &phi_t, &z, &xi, kappa, &scaled)?
                        .value,
                );
            }
            Ok(XBlock { x_rules, values })
        })
        .collect();
    Ok(FbiSliceData {
        kappa,
        t: t.to_vec(),
        xi_rules,
        blocks: blocks?,
    })
}

/// Reconstruction output: per-epsilon iterates plus the extrapolated limit.
#[derive(Debug, Clone)]
pub struct InversionResult {
    pub targets: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
    /// `per_eps[k][i]` = iterate at `eps[k]`, target `i`.
    pub per_eps: Vec<Vec<Complex64>>,
    pub extrapolated: Vec<Complex64>,
    pub tail_ratio: f64,
    /// Set when the outermost frequency shell still carries more than 1e-3
    /// of the peak modulus (frequency truncation too small).
    pub truncation_warning: bool,
}

/// Default epsilon sequence `eps0 * 4^-k`.
pub fn default_eps_sequence(eps0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| eps0 * 0.25f64.powi(k as i32)).collect()
}

/// Evaluates the mollified double quadrature for each epsilon and
/// extrapolates to zero.
pub fn invert_kappa(
    data: &FbiSliceData,
    targets: &[Vec<f64>],
    eps_seq: &[f64],
) -> Result<InversionResult, FbiError> {
    if eps_seq.is_empty() || eps_seq.iter().any(|&e| !(e > 0.0)) {
        return Err(FbiError::NonMonotoneEps);
    }
    if eps_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(FbiError::NonMonotoneEps);
    }
    let m = data.m();
    let expected: usize = data.xi_rules.iter().map(Rule1d::len).product();
    if data.blocks.len() != expected || targets.iter().any(|x| x.len() != m) {
        return Err(FbiError::DimensionMismatch);
    }
    if targets.is_empty() || data.blocks.is_empty() {
        return Err(FbiError::EmptyData);
    }
    let norm_const = (2.0 * std::f64::consts::PI.powi(3)).powf(-0.5 * m as f64);

    // accum[eps][target] summed over frequency blocks in parallel.
    let partials: Vec<Vec<Vec<Complex64>>> = (0..data.blocks.len())
        .into_par_iter()
        .map(|flat| {
            let (xi, wxi) = data.xi_at(flat);
            let block = &data.blocks[flat];
            let xi_sq: f64 = xi.iter().map(|v| v * v).sum();
            let xi_abs = xi_sq.sqrt();
            let gauss = xi_abs.powf(data.kappa);
            let weight = xi_abs.powf(0.5 * data.kappa * m as f64) * wxi;
            let dims: Vec<usize> = block.x_rules.iter().map(Rule1d::len).collect();
            let mut out = vec![vec![Complex64::new(0.0, 0.0); targets.len()]; eps_seq.len()];
            let mut xp = vec![0.0; m];
            for (vi, fv) in block.values.iter().enumerate() {
                let mut v = vi;
                let mut wx = 1.0;
                for a in (0..m).rev() {
                    let i = v % dims[a];
                    v /= dims[a];
                    xp[a] = block.x_rules[a].nodes[i];
                    wx *= block.x_rules[a].weights[i];
                }
                for (ti, x) in targets.iter().enumerate() {
                    let mut dx_sq = 0.0;
                    let mut phase_im = 0.0;
                    for a in 0..m {
                        let d = x[a] - xp[a];
                        dx_sq += d * d;
                        phase_im += xi[a] * d;
                    }
                    let base = Complex64::new(-gauss * dx_sq, phase_im).exp() * (fv * wx * weight);
                    for (ei, &eps) in eps_seq.iter().enumerate() {
                        out[ei][ti] += base * (-eps * xi_sq).exp();
                    }
                }
            }
            out
        })
        .collect();

    let mut per_eps = vec![vec![Complex64::new(0.0, 0.0); targets.len()]; eps_seq.len()];
    for part in &partials {
        for (ei, row) in part.iter().enumerate() {
            for (ti, v) in row.iter().enumerate() {
                per_eps[ei][ti] += v;
            }
        }
    }
    for row in &mut per_eps {
        for v in row.iter_mut() {
            *v *= norm_const;
        }
    }

    let extrapolated: Vec<Complex64> = (0..targets.len())
        .map(|i| {
            let ys: Vec<Complex64> = per_eps.iter().map(|row| row[i]).collect();
            neville_at_zero(eps_seq, &ys)
        })
        .collect();
    let tail_ratio = data.tail_ratio();
    Ok(InversionResult {
        targets: targets.to_vec(),
        eps: eps_seq.to_vec(),
        per_eps,
        extrapolated,
        tail_ratio,
        truncation_warning: tail_ratio > 1e-3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbi::transform::QuadRule;
    use crate::polymap::PolynomialMap;
    use crate::tube::BoxDomain;

    fn bump(x: f64, r: f64) -> f64 {
        let s = x / r;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    fn square_structure() -> TubeStructure {
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![2], 1.0)]]).unwrap();
        TubeStructure::new(
            phi,
            BoxDomain::cube(1, 1.0).unwrap(),
            BoxDomain::cube(1, 0.5).unwrap(),
        )
        .unwrap()
    }

    fn round_trip_error(
        kappa: f64,
        u: &(dyn Fn(&[f64]) -> Complex64 + Sync),
        xi_max: f64,
    ) -> f64 {
        let ts = square_structure();
        let chi = Cutoff::new(0.7, 0.95).unwrap();
        let quad = QuadratureSpec::new(QuadRule::Trapezoid, 257, 1.0).unwrap();
        let spec = ForwardSpec {
            xi_max,
            ..ForwardSpec::default()
        };
        let data = forward_slice(&ts, u, &chi, &[0.0], kappa, &spec, &quad).unwrap();
        let targets: Vec<Vec<f64>> = (0..33).map(|i| vec![-0.5 + i as f64 / 32.0]).collect();
        let eps = default_eps_sequence(1e-3, 5);
        let res = invert_kappa(&data, &targets, &eps).unwrap();
        let mut err = 0.0f64;
        for (x, got) in targets.iter().zip(&res.extrapolated) {
            err = err.max((got - u(x)).norm());
        }
        err
    }

    #[test]
    fn round_trip_smooth_bump() {
        let u = |x: &[f64]| Complex64::new(bump(x[0], 0.6), 0.0);
        let err = round_trip_error(1.0, &u, 90.0);
        assert!(err < 1e-3, "round-trip error {err}");
    }

    #[test]
    fn round_trip_zero_is_zero() {
        let ts = square_structure();
        let chi = Cutoff::new(0.7, 0.95).unwrap();
        let quad = QuadratureSpec::new(QuadRule::Trapezoid, 65, 1.0).unwrap();
        let u = |_: &[f64]| Complex64::new(0.0, 0.0);
        let spec = ForwardSpec {
            x_nodes: 65,
            xi_max: 20.0,
            ..ForwardSpec::default()
        };
        let data = forward_slice(&ts, &u, &chi, &[0.0], 1.0, &spec, &quad).unwrap();
        let res = invert_kappa(&data, &[vec![0.1]], &default_eps_sequence(1e-3, 4)).unwrap();
        assert!(res.extrapolated[0].norm() < 1e-12);
    }

    #[test]
    fn round_trip_oscillatory_needs_bandwidth() {
        // u = cos(5x) bump(x): passes with xi_max >= 40.
        let u = |x: &[f64]| Complex64::new((5.0 * x[0]).cos() * bump(x[0], 0.6), 0.0);
        let err = round_trip_error(1.0, &u, 40.0);
        assert!(err < 1e-2, "round-trip error {err}");
    }

    #[test]
    fn non_monotone_eps_rejected() {
        let ts = square_structure();
        let chi = Cutoff::new(0.7, 0.95).unwrap();
        let quad = QuadratureSpec::new(QuadRule::Trapezoid, 65, 1.0).unwrap();
        let u = |_: &[f64]| Complex64::new(1.0, 0.0);
        let spec = ForwardSpec {
            x_nodes: 65,
            xi_max: 20.0,
            ..ForwardSpec::default()
        };
        let data = forward_slice(&ts, &u, &chi, &[0.0], 1.0, &spec, &quad).unwrap();
        assert!(matches!(
            invert_kappa(&data, &[vec![0.0]], &[1e-3, 1e-3]),
            Err(FbiError::NonMonotoneEps)
        ));
        assert!(matches!(
            invert_kappa(&data, &[vec![0.0]], &[1e-4, 1e-3]),
            Err(FbiError::NonMonotoneEps)
        ));
    }

    #[test]
    fn truncation_tail_flagged_for_rough_input() {
        // A narrow spike keeps mass at the frequency boundary.
        let ts = square_structure();
        let chi = Cutoff::new(0.7, 0.95).unwrap();
        let quad = QuadratureSpec::new(QuadRule::Trapezoid, 129, 1.0).unwrap();
        let u = |x: &[f64]| Complex64::new(bump(x[0], 0.01), 0.0);
        let spec = ForwardSpec {
            x_nodes: 129,
            xi_max: 10.0,
            ..ForwardSpec::default()
        };
        let data = forward_slice(&ts, &u, &chi, &[0.0], 1.0, &spec, &quad).unwrap();
        assert!(data.tail_ratio() > 1e-3);
        let res = invert_kappa(&data, &[vec![0.0]], &default_eps_sequence(1e-3, 3)).unwrap();
        assert!(res.truncation_warning);
    }
}
