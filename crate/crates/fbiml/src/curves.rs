//! Normalized gradient-flow descent curves and their quantitative bounds.
//!
//! For a certified direction cone, the flow `alpha' = -g/||g||` with
//! `g = t-d phi(alpha) xi` descends `h = phi(.) . xi` at unit speed until it
//! exits `W0` or approaches the singular set `Sigma_xi`. Curves that stop at
//! `Sigma_xi` are continued through a short segment to a strictly lower
//! level and a fresh flow, and every produced curve obeys the decrease bound
//! `phi(t).xi - phi(gamma(tau)).xi >= 1/2 ((1-theta)/(8 C_L))^(1/(1-theta))
//! tau^(1/(1-theta))`. The frequency-threshold arithmetic used alongside the
//! curves (the admissible kappa window and the `|xi|` lower bound) lives
//! here too.

use thiserror::Error;

use crate::ode::{integrate_with_events, OdeSpec, StopCause};
use crate::polymap::{PolyError, PolynomialMap};
use crate::star::{sphere_directions, Cone, StarError};
use crate::tube::{BoxDomain, TubeError};
use crate::util::{axpy, dist, norm, sub};

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("start point lies on Sigma_xi (gradient below floor)")]
    StartOnSigma,
    #[error("start point lies outside W0")]
    StartOutside,
    #[error("no admissible concatenation point found near {0:?}")]
    NoAdmissibleT0(Vec<f64>),
    #[error("parameters out of range: {0}")]
    BadParameters(&'static str),
    #[error("curve family is empty")]
    EmptyFamily,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tube(#[from] TubeError),
    #[error(transparent)]
    Star(#[from] StarError),
}

/// Controls for the flow integration.
#[derive(Debug, Clone)]
pub struct FlowSpec {
    pub ode: OdeSpec,
    /// `||t-d phi xi||` below this counts as arrival at `Sigma_xi`.
    pub gradient_floor: f64,
    /// Hard cap on the flow parameter.
    pub tau_max: f64,
}

impl Default for FlowSpec {
    fn default() -> Self {
        Self {
            ode: OdeSpec {
                h_max: 0.01,
                ..OdeSpec::default()
            },
            gradient_floor: 1e-9,
            tau_max: 50.0,
        }
    }
}

/// Why a single flow arc stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowStop {
    Boundary,
    Sigma,
    StepLimit,
}

/// One arc of the normalized negative-gradient flow.
#[derive(Debug, Clone)]
pub struct FlowArc {
    pub taus: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Parameter at the stop.
    pub delta1: f64,
    /// Stop point (the numerical limit `l(xi, t)`).
    pub limit: Vec<f64>,
    pub stop: FlowStop,
}

/// Integrates `d alpha/d tau = -g/||g||`, `alpha(0) = t`, stopping at the
/// boundary of `W0` (crossing bisected) or at the gradient floor.
pub fn integrate_flow(
    phi: &PolynomialMap,
    xi: &[f64],
    t: &[f64],
    w0: &BoxDomain,
    spec: &FlowSpec,
) -> Result<FlowArc, CurveError> {
    if !w0.contains(t) {
        return Err(CurveError::StartOutside);
    }
    let g0 = phi.grad_transpose_apply(t, xi)?;
    if norm(&g0) <= spec.gradient_floor {
        return Err(CurveError::StartOnSigma);
    }
    let floor = spec.gradient_floor;
    let rhs = |y: &[f64], dy: &mut [f64]| {
        let g = phi.grad_transpose_apply(y, xi).expect("dims fixed");
        let n = norm(&g).max(floor * 1e-3);
        for (d, gi) in dy.iter_mut().zip(&g) {
            *d = -gi / n;
        }
    };
    let boundary = |y: &[f64]| w0.boundary_excess(y);
    let sigma = |y: &[f64]| {
        floor - norm(&phi.grad_transpose_apply(y, xi).expect("dims fixed"))
    };
    let events: [&dyn Fn(&[f64]) -> f64; 2] = [&boundary, &sigma];
    let res = integrate_with_events(&rhs, t, spec.tau_max, &events, &spec.ode);
    let stop = match res.cause {
        StopCause::Event(0) => FlowStop::Boundary,
        StopCause::Event(_) | StopCause::StepSizeCollapse => FlowStop::Sigma,
        StopCause::EndOfInterval | StopCause::StepLimit => FlowStop::StepLimit,
    };
    Ok(FlowArc {
        delta1: res.final_tau(),
        limit: res.final_state().to_vec(),
        taus: res.taus,
        points: res.states,
        stop,
    })
}

/// A piece of a descent curve in global parameterization.
#[derive(Debug, Clone)]
pub struct Piece {
    pub kind: PieceKind,
    /// Global parameters of the samples (strictly increasing).
    pub taus: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Flow,
    Segment,
}

/// Why the assembled curve terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalCause {
    /// Reached the boundary with no concatenation.
    Boundary,
    /// Hit `Sigma_xi`, concatenated, and eventually reached the boundary.
    SigmaThenConcatenated,
    /// Recursion or step budget exhausted.
    StepLimit,
}

/// Piecewise curve `gamma_{xi,t}` with unit-speed parameterization.
#[derive(Debug, Clone)]
pub struct DescentCurve {
    pub xi: Vec<f64>,
    pub start: Vec<f64>,
    pub pieces: Vec<Piece>,
    /// Total parameter length.
    pub delta0: f64,
    pub terminal: Vec<f64>,
    pub cause: TerminalCause,
    pub concatenations: usize,
}

impl DescentCurve {
    /// Linear interpolation on the stored samples.
    pub fn eval(&self, tau: f64) -> Vec<f64> {
        if tau <= 0.0 {
            return self.start.clone();
        }
        for piece in &self.pieces {
            let last = *piece.taus.last().expect("pieces are nonempty");
            if tau <= last {
                let i = match piece
                    .taus
                    .binary_search_by(|v| v.partial_cmp(&tau).unwrap())
                {
                    Ok(i) => return piece.points[i].clone(),
                    Err(i) => i.saturating_sub(1).min(piece.taus.len() - 2),
                };
                let (t0, t1) = (piece.taus[i], piece.taus[i + 1]);
                let lam = if t1 > t0 { (tau - t0) / (t1 - t0) } else { 0.0 };
                return piece.points[i]
                    .iter()
                    .zip(&piece.points[i + 1])
                    .map(|(a, b)| a + lam * (b - a))
                    .collect();
            }
        }
        self.terminal.clone()
    }

    /// Polyline arc length over all pieces.
    pub fn length(&self) -> f64 {
        let mut acc = 0.0;
        for piece in &self.pieces {
            for w in piece.points.windows(2) {
                acc += dist(&w[0], &w[1]);
            }
        }
        acc
    }
}

/// Controls for curve assembly.
#[derive(Debug, Clone)]
pub struct GammaSpec {
    pub flow: FlowSpec,
    /// Certificate data backing the segment-decrease condition.
    pub theta: f64,
    pub c_l: f64,
    /// Cap on the number of concatenations.
    pub recursion_cap: usize,
    /// Candidate points per sphere in the concatenation search.
    pub sphere_samples: usize,
    /// Segment-condition samples in `lambda`.
    pub lambda_samples: usize,
}

impl GammaSpec {
    pub fn new(theta: f64, c_l: f64) -> Self {
        Self {
            flow: FlowSpec::default(),
            theta,
            c_l,
            recursion_cap: 8,
            sphere_samples: 64,
            lambda_samples: 17,
        }
    }
}

/// Builds `gamma_{xi,t}`: the flow arc, closed by its limit when it reaches
/// the boundary; otherwise concatenated across `Sigma_xi` through a point
/// `t0` with `phi(t0).xi < 0`, `||t0 - l|| <= delta1`, and the sampled
/// segment-decrease condition, then a fresh flow from `t0`.
pub fn build_gamma(
    phi: &PolynomialMap,
    xi: &[f64],
    t: &[f64],
    w0: &BoxDomain,
    spec: &GammaSpec,
) -> Result<DescentCurve, CurveError> {
    let h0 = phi.dot(xi)?.eval(t)?;
    let mut pieces: Vec<Piece> = Vec::new();
    let mut offset = 0.0f64;
    let mut current = t.to_vec();
    let mut concatenations = 0usize;
    loop {
        let arc = integrate_flow(phi, xi, &current, w0, &spec.flow)?;
        let taus: Vec<f64> = arc.taus.iter().map(|v| v + offset).collect();
        offset += arc.delta1;
        let stop = arc.stop;
        let limit = arc.limit.clone();
        pieces.push(Piece {
            kind: PieceKind::Flow,
            taus,
            points: arc.points,
        });
        match stop {
            FlowStop::Boundary => {
                return Ok(DescentCurve {
                    xi: xi.to_vec(),
                    start: t.to_vec(),
                    delta0: offset,
                    terminal: limit,
                    cause: if concatenations == 0 {
                        TerminalCause::Boundary
                    } else {
                        TerminalCause::SigmaThenConcatenated
                    },
                    pieces,
                    concatenations,
                });
            }
            FlowStop::StepLimit => {
                return Ok(DescentCurve {
                    xi: xi.to_vec(),
                    start: t.to_vec(),
                    delta0: offset,
                    terminal: limit,
                    cause: TerminalCause::StepLimit,
                    pieces,
                    concatenations,
                });
            }
            FlowStop::Sigma => {
                if concatenations >= spec.recursion_cap {
                    return Ok(DescentCurve {
                        xi: xi.to_vec(),
                        start: t.to_vec(),
                        delta0: offset,
                        terminal: limit,
                        cause: TerminalCause::StepLimit,
                        pieces,
                        concatenations,
                    });
                }
                let delta1 = pieces
                    .last()
                    .map(|p| p.taus.last().unwrap() - p.taus.first().unwrap())
                    .unwrap();
                let t0 = find_concatenation_point(phi, xi, h0, &limit, delta1, w0, spec)?;
                // Unit-speed segment from the limit point to t0.
                let seg_len = dist(&limit, &t0);
                pieces.push(Piece {
                    kind: PieceKind::Segment,
                    taus: vec![offset, offset + seg_len],
                    points: vec![limit, t0.clone()],
                });
                offset += seg_len;
                current = t0;
                concatenations += 1;
            }
        }
    }
}

/// Searches dyadic spheres around the limit point for an admissible
/// concatenation point, preferring the lowest `phi . xi` value.
fn find_concatenation_point(
    phi: &PolynomialMap,
    xi: &[f64],
    h_start: f64,
    limit: &[f64],
    delta1: f64,
    w0: &BoxDomain,
    spec: &GammaSpec,
) -> Result<Vec<f64>, CurveError> {
    let n = phi.input_dim();
    let p = phi.dot(xi)?;
    let seg_bound = 0.5
        * ((1.0 - spec.theta) / (2.0 * spec.c_l)).powf(1.0 / (1.0 - spec.theta))
        * delta1.powf(1.0 / (1.0 - spec.theta));
    let dirs = sphere_directions(n, spec.sphere_samples);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in 0..=6 {
        let r = delta1 * 0.5f64.powi(i);
        for d in &dirs {
            let cand = axpy(limit, r, d);
            if !w0.contains(&cand) {
                continue;
            }
            let val = p.eval(&cand)?;
            if val >= 0.0 {
                continue;
            }
            if norm(&phi.grad_transpose_apply(&cand, xi)?) <= spec.flow.gradient_floor {
                continue;
            }
            // Sampled segment-decrease condition along [limit, t0].
            let mut ok = true;
            for k in 0..spec.lambda_samples {
                let lam = k as f64 / (spec.lambda_samples - 1) as f64;
                let q: Vec<f64> = limit
                    .iter()
                    .zip(&cand)
                    .map(|(l, c)| l + lam * (c - l))
                    .collect();
                if h_start - p.eval(&q)? < seg_bound - 1e-12 * h_start.abs().max(1.0) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            if best.as_ref().map_or(true, |(v, _)| val < *v) {
                best = Some((val, cand));
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.map(|(_, c)| c)
        .ok_or_else(|| CurveError::NoAdmissibleT0(limit.to_vec()))
}

/// Sampled check of the quantitative decrease bound along a curve.
#[derive(Debug, Clone)]
pub struct DecreaseReport {
    pub taus: Vec<f64>,
    /// `phi(t).xi - phi(gamma(tau)).xi`.
    pub lhs: Vec<f64>,
    /// `1/2 ((1-theta)(8 C_L)^-1)^(1/(1-theta)) tau^(1/(1-theta))`.
    pub rhs: Vec<f64>,
    pub min_slack: f64,
    /// `min lhs/rhs` over samples with `rhs > 0`.
    pub min_ratio: f64,
    pub pass: bool,
    /// Whether the sharper single-arc constant `((1-theta)(2 C_L)^-1)` was
    /// also checked (pure flow curves only).
    pub sharper_checked: bool,
    pub witness: Option<f64>,
}

/// Samples the curve-family decrease inequality at `samples` parameters; for
/// single-arc curves the sharper flow-only constant is verified as well.
pub fn verify_decrease(
    curve: &DescentCurve,
    phi: &PolynomialMap,
    xi: &[f64],
    theta: f64,
    c_l: f64,
    samples: usize,
    tol: f64,
) -> Result<DecreaseReport, CurveError> {
    let p = phi.dot(xi)?;
    let h0 = p.eval(&curve.start)?;
    let expo = 1.0 / (1.0 - theta);
    let c_prop = 0.5 * ((1.0 - theta) / (8.0 * c_l)).powf(expo);
    let single_arc = curve.pieces.len() == 1;
    let c_sharp = ((1.0 - theta) / (2.0 * c_l)).powf(expo);
    let mut taus = Vec::with_capacity(samples);
    let mut lhs = Vec::with_capacity(samples);
    let mut rhs = Vec::with_capacity(samples);
    let mut pass = true;
    let mut witness = None;
    let mut min_slack = f64::INFINITY;
    let mut min_ratio = f64::INFINITY;
    for i in 0..samples {
        let tau = curve.delta0 * i as f64 / (samples - 1) as f64;
        let point = curve.eval(tau);
        let l = h0 - p.eval(&point)?;
        let r = c_prop * tau.powf(expo);
        if l < r - tol {
            pass = false;
            witness.get_or_insert(tau);
        }
        if single_arc {
            let r_sharp = c_sharp * tau.powf(expo);
            if l < r_sharp - tol {
                pass = false;
                witness.get_or_insert(tau);
            }
        }
        min_slack = min_slack.min(l - r);
        if r > 0.0 {
            min_ratio = min_ratio.min(l / r);
        }
        taus.push(tau);
        lhs.push(l);
        rhs.push(r);
    }
    Ok(DecreaseReport {
        taus,
        lhs,
        rhs,
        min_slack,
        min_ratio,
        pass,
        sharper_checked: single_arc,
        witness,
    })
}

/// Family-level verification of the curve proposition's uniform bounds.
#[derive(Debug, Clone)]
pub struct FamilyReport {
    pub curves: usize,
    pub skipped_sigma: usize,
    pub min_delta0: f64,
    pub max_length: f64,
    /// `3 (2 sup ||phi||)^(1-theta) (1-theta)^-1 2 C_L`.
    pub length_bound: f64,
    /// `r - r1` (inradii of `W0` and `W1`).
    pub delta_floor: f64,
    pub delta0_pass: bool,
    pub length_pass: bool,
    pub decrease_pass: bool,
}

/// Builds the curve family over the cone sphere grid and a `W1` start grid,
/// checking `delta0 >= (r - r1)(1 - tol)`, the explicit length bound, and
/// the decrease inequality on every curve.
#[allow(clippy::too_many_arguments)]
pub fn verify_prop_properties(
    phi: &PolynomialMap,
    cone: &Cone,
    w0: &BoxDomain,
    w1: &BoxDomain,
    starts_per_axis: usize,
    directions: usize,
    spec: &GammaSpec,
    tol: f64,
) -> Result<FamilyReport, CurveError> {
    let n = phi.input_dim();
    if w1.inradius() >= w0.inradius() {
        return Err(CurveError::BadParameters("W1 must be strictly inside W0"));
    }
    let dirs = cone.sphere_grid(directions)?;
    let axes: Vec<Vec<f64>> = (0..n).map(|a| w1.axis_nodes(a, starts_per_axis)).collect();
    let mut starts = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(starts.len() * axis.len());
        for s in &starts {
            for &v in axis {
                let mut q = s.clone();
                q.push(v);
                next.push(q);
            }
        }
        starts = next;
    }
    // sup ||phi|| over the closed W0 on a fixed grid.
    let sup_axes: Vec<Vec<f64>> = (0..n).map(|a| w0.axis_nodes(a, 33)).collect();
    let mut sup_phi = 0.0f64;
    let mut idx = vec![0usize; n];
    loop {
        let t: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| sup_axes[a][i]).collect();
        sup_phi = sup_phi.max(norm(&phi.eval(&t)?));
        let mut d = n;
        let mut done = true;
        while d > 0 {
            d -= 1;
            idx[d] += 1;
            if idx[d] < 33 {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if done {
            break;
        }
    }
    let length_bound = 3.0 * (2.0 * sup_phi).powf(1.0 - spec.theta) / (1.0 - spec.theta)
        * 2.0
        * spec.c_l;
    let delta_floor = w0.inradius() - w1.inradius();

    let mut curves = 0usize;
    let mut skipped = 0usize;
    let mut min_delta0 = f64::INFINITY;
    let mut max_length = 0.0f64;
    let mut decrease_pass = true;
    for xi in &dirs {
        for start in &starts {
            match build_gamma(phi, xi, start, w0, spec) {
                Ok(curve) => {
                    curves += 1;
                    min_delta0 = min_delta0.min(curve.delta0);
                    max_length = max_length.max(curve.length());
                    let rep =
                        verify_decrease(&curve, phi, xi, spec.theta, spec.c_l, 128, 1e-9)?;
                    decrease_pass &= rep.pass;
                }
                Err(CurveError::StartOnSigma) => {
                    skipped += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if curves == 0 {
        return Err(CurveError::EmptyFamily);
    }
    Ok(FamilyReport {
        curves,
        skipped_sigma: skipped,
        min_delta0,
        max_length,
        length_bound,
        delta_floor,
        delta0_pass: min_delta0 >= delta_floor * (1.0 - tol),
        length_pass: max_length <= length_bound * (1.0 + tol),
        decrease_pass,
    })
}

/// Admissible exponent window for the transform given Gevrey order `s` and
/// Lojasiewicz exponent `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaWindow {
    pub lo: f64,
    pub hi: f64,
    pub kappa_mid: f64,
    /// `(2 theta + kappa - 2)/(2 theta - 1)` at the midpoint, `None` for
    /// `theta = 1/2` (where any `kappa < 1` works past the threshold).
    pub exponent: Option<f64>,
}

/// The open interval `(1/s, (2 theta - 1)/s + 2 - 2 theta)`, nonempty for
/// `theta < 1`; for `theta > 1/2` the midpoint's residual-term exponent is
/// returned and must stay below `1/s`.
pub fn kappa_window(s: f64, theta: f64) -> Result<KappaWindow, CurveError> {
    if !(s > 1.0) {
        return Err(CurveError::BadParameters("need s > 1"));
    }
    if !(0.5..1.0).contains(&theta) {
        return Err(CurveError::BadParameters("need 1/2 <= theta < 1"));
    }
    let lo = 1.0 / s;
    let hi = (2.0 * theta - 1.0) / s + 2.0 - 2.0 * theta;
    let kappa_mid = 0.5 * (lo + hi);
    let exponent = if theta > 0.5 {
        let e = (2.0 * theta + kappa_mid - 2.0) / (2.0 * theta - 1.0);
        debug_assert!(e < lo + 1e-12);
        Some(e)
    } else {
        None
    };
    Ok(KappaWindow {
        lo,
        hi,
        kappa_mid,
        exponent,
    })
}

/// Frequency threshold above which the flow decrease dominates the Lipschitz
/// remainder `g(tau) = c |xi| tau^(1/(1-theta)) - c1 |xi|^kappa tau^2`,
/// `c1 = 4 C_phi^2`.
#[derive(Debug, Clone)]
pub struct XiThreshold {
    pub threshold: f64,
    pub c1: f64,
    pub c: f64,
    pub theta: f64,
    pub kappa: f64,
}

impl XiThreshold {
    pub fn g(&self, tau: f64, xi_abs: f64) -> f64 {
        self.c * xi_abs * tau.powf(1.0 / (1.0 - self.theta))
            - self.c1 * xi_abs.powf(self.kappa) * tau * tau
    }

    /// Interior minimizer of `g` for `theta > 1/2`.
    pub fn tau0(&self, xi_abs: f64) -> Option<f64> {
        if self.theta <= 0.5 {
            return None;
        }
        let b = (2.0 * self.c1 / self.c) * (1.0 - self.theta) * xi_abs.powf(self.kappa - 1.0);
        Some(b.powf((1.0 - self.theta) / (2.0 * self.theta - 1.0)))
    }

    /// Closed-form minimum `g(tau0)`.
    pub fn g_min_closed(&self, xi_abs: f64) -> Option<f64> {
        let theta = self.theta;
        if theta <= 0.5 {
            return None;
        }
        let b = (2.0 * self.c1 / self.c) * (1.0 - theta);
        let p = xi_abs.powf((2.0 * theta + self.kappa - 2.0) / (2.0 * theta - 1.0));
        Some(
            p * (self.c * b.powf(1.0 / (2.0 * theta - 1.0))
                - self.c1 * b.powf((2.0 - 2.0 * theta) / (2.0 * theta - 1.0))),
        )
    }

    /// Brute-force minimum of `g` on a fine grid plus golden-section polish.
    pub fn g_min_brute(&self, xi_abs: f64) -> f64 {
        let tau_hi = match self.tau0(xi_abs) {
            Some(t0) => 4.0 * t0 + 1.0,
            None => 10.0,
        };
        let mut best_tau = 0.0;
        let mut best = 0.0f64;
        let n = 20_000;
        for i in 1..=n {
            let tau = tau_hi * i as f64 / n as f64;
            let v = self.g(tau, xi_abs);
            if v < best {
                best = v;
                best_tau = tau;
            }
        }
        let h = tau_hi / n as f64;
        let (mut lo, mut hi) = ((best_tau - h).max(0.0), best_tau + h);
        let gr = 0.5 * (5.0f64.sqrt() - 1.0);
        let mut x1 = hi - gr * (hi - lo);
        let mut x2 = lo + gr * (hi - lo);
        let mut f1 = self.g(x1, xi_abs);
        let mut f2 = self.g(x2, xi_abs);
        for _ in 0..80 {
            if f1 > f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = self.g(x2, xi_abs);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = self.g(x1, xi_abs);
            }
        }
        self.g(0.5 * (lo + hi), xi_abs).min(best)
    }
}

/// Builds the threshold: `[(2 c1) / (c delta^(1/(1-theta) - 2))]^(1/(1-kappa))`
/// for `theta > 1/2` and the delta-free `(c1/c)^(1/(1-kappa))` at
/// `theta = 1/2`.
pub fn xi_threshold(
    c_phi: f64,
    c: f64,
    theta: f64,
    kappa: f64,
    delta: f64,
) -> Result<XiThreshold, CurveError> {
    if !(c_phi > 0.0 && c > 0.0 && delta > 0.0) {
        return Err(CurveError::BadParameters("inputs must be positive"));
    }
    if !(0.5..1.0).contains(&theta) || !(0.0..1.0).contains(&kappa) {
        return Err(CurveError::BadParameters(
            "need 1/2 <= theta < 1 and 0 < kappa < 1",
        ));
    }
    let c1 = 4.0 * c_phi * c_phi;
    let threshold = if theta > 0.5 {
        (2.0 * c1 / (c * delta.powf(1.0 / (1.0 - theta) - 2.0))).powf(1.0 / (1.0 - kappa))
    } else {
        (c1 / c).powf(1.0 / (1.0 - kappa))
    };
    Ok(XiThreshold {
        threshold,
        c1,
        c,
        theta,
        kappa,
    })
}

/// `C_phi`: max operator norm of `d phi(t)` over a grid on `W0` (power
/// iteration on the Gram matrix).
pub fn lipschitz_constant(
    phi: &PolynomialMap,
    w0: &BoxDomain,
    nodes_per_axis: usize,
) -> Result<f64, CurveError> {
    let n = phi.input_dim();
    let m = phi.output_dim();
    let axes: Vec<Vec<f64>> = (0..n).map(|a| w0.axis_nodes(a, nodes_per_axis)).collect();
    let mut best = 0.0f64;
    let mut idx = vec![0usize; n];
    loop {
        let t: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
        let jac = phi.jacobian(&t)?;
        // Largest singular value of the m x n Jacobian by power iteration
        // on J^T J.
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..200 {
            // w = J v (length m), then u = J^T w (length n).
            let w: Vec<f64> = (0..m)
                .map(|k| jac[k].iter().zip(&v).map(|(a, b)| a * b).sum())
                .collect();
            let mut u = vec![0.0; n];
            for (k, wk) in w.iter().enumerate() {
                for (j, uj) in u.iter_mut().enumerate() {
                    *uj += jac[k][j] * wk;
                }
            }
            let nu = norm(&u);
            if nu == 0.0 {
                break;
            }
            v = u.iter().map(|x| x / nu).collect();
        }
        let w: Vec<f64> = (0..m)
            .map(|k| jac[k].iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        best = best.max(norm(&w));
        let mut d = n;
        let mut done = true;
        while d > 0 {
            d -= 1;
            idx[d] += 1;
            if idx[d] < nodes_per_axis {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if done {
            break;
        }
    }
    Ok(best)
}
