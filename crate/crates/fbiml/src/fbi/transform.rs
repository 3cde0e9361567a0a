//! Quadrature evaluation of the partial F.B.I. transforms.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{bracket, delta_general, delta_kappa, FbiError};
use crate::quad::Rule1d;
use crate::tube::TubeStructure;

/// Smooth radial cutoff: `1` for `|x| <= inner`, the bump
/// `exp(1 - 1/(1 - s^2))` with `s = (|x| - inner)/(outer - inner)` in
/// between, `0` outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Cutoff {
    inner: f64,
    outer: f64,
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self, FbiError> {
        if !(0.0 < inner && inner < outer) {
            return Err(FbiError::BadCutoff);
        }
        Ok(Self { inner, outer })
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r <= self.inner {
            1.0
        } else if r >= self.outer {
            0.0
        } else {
            let s = (r - self.inner) / (self.outer - self.inner);
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }
}

/// Quadrature rule selector for the `x'` integral.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadRule {
    Trapezoid,
    GaussLegendre,
    /// Gauss-Legendre panels graded toward a near-singularity of `u` at the
    /// given x-position, resolved down to `inner`.
    GradedTowardPole { pole: Vec<f64>, inner: f64 },
}

/// Truncated product quadrature over `[-radius, radius]^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    pub nodes_per_axis: usize,
    pub radius: f64,
}

impl QuadratureSpec {
    pub fn new(rule: QuadRule, nodes_per_axis: usize, radius: f64) -> Result<Self, FbiError> {
        if nodes_per_axis < 8 || !(radius > 0.0) {
            return Err(FbiError::BadQuadrature);
        }
        Ok(Self {
            rule,
            nodes_per_axis,
            radius,
        })
    }

    /// The truncation must cover the cutoff support.
    pub fn validate_against(&self, chi: &Cutoff) -> Result<(), FbiError> {
        if self.radius + 1e-12 < chi.outer() {
            return Err(FbiError::BadQuadrature);
        }
        Ok(())
    }

    /// Copy with nodes scaled so both the oscillation `2 pi / |xi|` and the
    /// Gaussian width `|xi|^{-kappa/2}` stay resolved.
    pub fn scaled_for(&self, xi_abs: f64, kappa: f64) -> Self {
        let per_unit = (xi_abs / std::f64::consts::PI).max(xi_abs.powf(0.5 * kappa));
        let needed = (3.0 * per_unit * 2.0 * self.radius).ceil() as usize;
        Self {
            rule: self.rule.clone(),
            nodes_per_axis: self.nodes_per_axis.max(needed),
            radius: self.radius,
        }
    }

    fn axis_rule(&self) -> Rule1d {
        match &self.rule {
            QuadRule::Trapezoid => Rule1d::trapezoid(-self.radius, self.radius, self.nodes_per_axis),
            QuadRule::GaussLegendre => {
                let panels = (self.nodes_per_axis / 16).max(1);
                Rule1d::gl_panels(-self.radius, self.radius, panels, 16)
            }
            QuadRule::GradedTowardPole { .. } => unreachable!("per-axis pole handled in rules()"),
        }
    }

    /// Per-axis rules for an `m`-dimensional integral.
    pub fn rules(&self, m: usize) -> Vec<Rule1d> {
        match &self.rule {
            QuadRule::GradedTowardPole { pole, inner } => (0..m)
                .map(|a| {
                    Rule1d::graded_panels(
                        -self.radius,
                        self.radius,
                        pole.get(a).copied().unwrap_or(0.0),
                        *inner,
                        16,
                    )
                })
                .collect(),
            _ => {
                let rule = self.axis_rule();
                (0..m).map(|_| rule.clone()).collect()
            }
        }
    }

    /// Whether the kernel at `|xi|` is resolved: the Gaussian width
    /// `|xi|^{-kappa/2}` and the oscillation period must both span at least
    /// four node spacings.
    pub fn resolves(&self, xi_abs: f64, kappa: f64) -> bool {
        let spacing = 2.0 * self.radius / self.nodes_per_axis as f64;
        let width = xi_abs.powf(-0.5 * kappa);
        let period = 2.0 * std::f64::consts::PI / xi_abs;
        width >= 4.0 * spacing && period >= 4.0 * spacing
    }
}

/// One evaluated transform value with its resolution flag.
#[derive(Debug, Clone)]
pub struct FbiPoint {
    pub value: Complex64,
    pub resolution_ok: bool,
}

fn check_kappa(kappa: f64) -> Result<(), FbiError> {
    if kappa > 0.0 && kappa <= 1.0 {
        Ok(())
    } else {
        Err(FbiError::BadKappa)
    }
}

fn xi_norm(xi: &[f64]) -> Result<f64, FbiError> {
    let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        Err(FbiError::ZeroFrequency)
    } else {
        Ok(n)
    }
}

/// Partial kappa-F.B.I. of `chi u` at one `(t; z, xi)`:
/// quadrature of `e^{i xi.(z - Z(x',t)) - |xi|^k <z - Z(x',t)>^2}
/// chi(x') u(x') Delta_k(z - Z(x',t), xi)` over `x'`.
///
/// `u` is the slice `x' -> u(x', t)` and `phi_t = phi(t)`; `z` may be off
/// the slice `Z(., t)`, in which case the full complex kernel is used.
pub fn fbi_kappa_at(
    u: &dyn Fn(&[f64]) -> Complex64,
    chi: &Cutoff,
    phi_t: &[f64],
    z: &[Complex64],
    xi: &[f64],
    kappa: f64,
    quad: &QuadratureSpec,
) -> Result<FbiPoint, FbiError> {
    check_kappa(kappa)?;
    quad.validate_against(chi)?;
    let m = z.len();
    if xi.len() != m || phi_t.len() != m {
        return Err(FbiError::DimensionMismatch);
    }
    let xi_abs = xi_norm(xi)?;
    let gauss = xi_abs.powf(kappa);
    let rules = quad.rules(m);
    let value = integrate_product(&rules, &mut |xp: &[f64]| {
        let c = chi.eval(xp);
        if c == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w: Vec<Complex64> = (0..m)
            .map(|k| z[k] - Complex64::new(xp[k], phi_t[k]))
            .collect();
        let ww: Complex64 = w.iter().map(|v| v * v).sum();
        let xiw: Complex64 = xi.iter().zip(&w).map(|(a, b)| b * *a).sum();
        let phase = Complex64::i() * xiw - gauss * ww;
        let dk = delta_kappa(&w, xi, kappa).expect("xi checked nonzero");
        phase.exp() * c * u(xp) * dk
    });
    Ok(FbiPoint {
        value,
        resolution_ok: quad.resolves(xi_abs, kappa),
    })
}

/// Kappa-F.B.I. of a Dirac mass at `x' = at` (analytic pairing; no
/// quadrature).
pub fn fbi_kappa_dirac(
    at: &[f64],
    chi: &Cutoff,
    phi_t: &[f64],
    z: &[Complex64],
    xi: &[f64],
    kappa: f64,
) -> Result<Complex64, FbiError> {
    check_kappa(kappa)?;
    let m = z.len();
    if xi.len() != m || phi_t.len() != m || at.len() != m {
        return Err(FbiError::DimensionMismatch);
    }
    let xi_abs = xi_norm(xi)?;
    let w: Vec<Complex64> = (0..m)
        .map(|k| z[k] - Complex64::new(at[k], phi_t[k]))
        .collect();
    let ww: Complex64 = w.iter().map(|v| v * v).sum();
    let xiw: Complex64 = xi.iter().zip(&w).map(|(a, b)| b * *a).sum();
    let phase = Complex64::i() * xiw - xi_abs.powf(kappa) * ww;
    Ok(phase.exp() * chi.eval(at) * delta_kappa(&w, xi, kappa)?)
}

/// Adapted partial F.B.I. (general frequency `zeta` in the cone
/// `|Im zeta| < |Re zeta|`): quadrature of
/// `e^{i zeta.(z - Z) - <zeta><z - Z>^2} chi u Delta(z - Z, zeta)`.
pub fn fbi_adapted_at(
    u: &dyn Fn(&[f64]) -> Complex64,
    chi: &Cutoff,
    phi_t: &[f64],
    z: &[Complex64],
    zeta: &[Complex64],
    quad: &QuadratureSpec,
) -> Result<FbiPoint, FbiError> {
    quad.validate_against(chi)?;
    let m = z.len();
    if zeta.len() != m || phi_t.len() != m {
        return Err(FbiError::DimensionMismatch);
    }
    let re: f64 = zeta.iter().map(|v| v.re * v.re).sum::<f64>().sqrt();
    let im: f64 = zeta.iter().map(|v| v.im * v.im).sum::<f64>().sqrt();
    if !(im < re) {
        return Err(FbiError::OutsideCone);
    }
    let br = bracket(zeta)?;
    let abs: f64 = zeta.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let rules = quad.rules(m);
    let value = integrate_product(&rules, &mut |xp: &[f64]| {
        let c = chi.eval(xp);
        if c == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w: Vec<Complex64> = (0..m)
            .map(|k| z[k] - Complex64::new(xp[k], phi_t[k]))
            .collect();
        let ww: Complex64 = w.iter().map(|v| v * v).sum();
        let zw: Complex64 = zeta.iter().zip(&w).map(|(a, b)| a * b).sum();
        let phase = Complex64::i() * zw - br * ww;
        let d = delta_general(&w, zeta).expect("zeta checked in cone");
        phase.exp() * c * u(xp) * d
    });
    Ok(FbiPoint {
        value,
        resolution_ok: quad.resolves(abs, 1.0),
    })
}

/// On-slice convenience: evaluates at `z = Z(x, t)`.
pub fn fbi_kappa_on_slice(
    ts: &TubeStructure,
    u: &dyn Fn(&[f64]) -> Complex64,
    chi: &Cutoff,
    t: &[f64],
    x: &[f64],
    xi: &[f64],
    kappa: f64,
    quad: &QuadratureSpec,
) -> Result<FbiPoint, FbiError> {
    let z = ts.first_integral(x, t)?;
    let phi_t = ts.phi().eval(t)?;
    fbi_kappa_at(u, chi, &phi_t, &z, xi, kappa, quad)
}

fn integrate_product(
    rules: &[Rule1d],
    f: &mut dyn FnMut(&[f64]) -> Complex64,
) -> Complex64 {
    let dims: Vec<usize> = rules.iter().map(Rule1d::len).collect();
    let mut idx = vec![0usize; dims.len()];
    let mut point = vec![0.0; dims.len()];
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        for (d, &i) in idx.iter().enumerate() {
            point[d] = rules[d].nodes[i];
            w *= rules[d].weights[i];
        }
        acc += f(&point) * w;
        let mut d = dims.len();
        loop {
            if d == 0 {
                return acc;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < dims[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// One sweep sample of the transform modulus.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub xi_abs: f64,
    pub value_abs: f64,
    pub resolution_ok: bool,
}

/// Evaluates `|F_kappa[chi u](t; Z(x,t), lambda ray)|` over the product of
/// base points, rays and magnitudes, in parallel. Node counts scale with
/// the frequency.
#[allow(clippy::too_many_arguments)]
pub fn fbi_kappa_sweep(
    ts: &TubeStructure,
    u: &(dyn Fn(&[f64], &[f64]) -> Complex64 + Sync),
    chi: &Cutoff,
    base_ts: &[Vec<f64>],
    base_xs: &[Vec<f64>],
    rays: &[Vec<f64>],
    magnitudes: &[f64],
    kappa: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<SweepPoint>, FbiError> {
    check_kappa(kappa)?;
    quad.validate_against(chi)?;
    let mut jobs = Vec::new();
    for t in base_ts {
        for x in base_xs {
            for ray in rays {
                for &lam in magnitudes {
                    let xi: Vec<f64> = ray.iter().map(|r| r * lam).collect();
                    jobs.push((t.clone(), x.clone(), xi));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|(t, x, xi)| {
            let scaled = quad.scaled_for(crate::util::norm(xi), kappa);
            let slice = |xp: &[f64]| u(xp, t);
            let p = fbi_kappa_on_slice(ts, &slice, chi, t, x, xi, kappa, &scaled)?;
            Ok(SweepPoint {
                t: t.clone(),
                x: x.clone(),
                xi: xi.clone(),
                xi_abs: crate::util::norm(xi),
                value_abs: p.value.norm(),
                resolution_ok: p.resolution_ok,
            })
        })
        .collect()
}
