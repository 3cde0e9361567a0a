//! Adaptive Dormand-Prince 5(4) integration with root-found stopping events.
//!
//! Events are scalar functions of the state that are negative while
//! integration may continue; the first crossing to `>= 0` is located by
//! bisection on the cubic Hermite interpolant of the accepted step.

/// Integration controls.
#[derive(Debug, Clone)]
pub struct OdeSpec {
    pub atol: f64,
    pub rtol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Bisection tolerance for event location, in the independent variable.
    pub event_tol: f64,
}

impl Default for OdeSpec {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            rtol: 1e-9,
            h_init: 1e-3,
            h_max: 0.1,
            max_steps: 200_000,
            event_tol: 1e-10,
        }
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCause {
    /// Event with this index fired (value crossed to `>= 0`).
    Event(usize),
    /// Reached `tau_max`.
    EndOfInterval,
    /// `max_steps` accepted steps without an event.
    StepLimit,
    /// Step size collapsed below machine resolution (stiff/singular RHS).
    StepSizeCollapse,
}

/// How an event function signals a stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Stop when the value reaches `>= 0` at a step end (monotone
    /// crossings; located by bisection).
    Crossing,
    /// Stop when the value dips to `<= 0` anywhere inside a step (tangential
    /// zeros; located by golden-section minimization on the interpolant).
    Dip,
}

/// A stopping event.
pub struct Event<'a> {
    pub f: &'a dyn Fn(&[f64]) -> f64,
    pub kind: EventKind,
}

/// Accepted-step trajectory plus the stop cause.
#[derive(Debug, Clone)]
pub struct OdeResult {
    pub taus: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub cause: StopCause,
}

impl OdeResult {
    pub fn final_tau(&self) -> f64 {
        *self.taus.last().expect("trajectory never empty")
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory never empty")
    }

    /// Linear interpolation on the accepted-step polyline.
    pub fn state_at(&self, tau: f64) -> Vec<f64> {
        let taus = &self.taus;
        if tau <= taus[0] {
            return self.states[0].clone();
        }
        if tau >= *taus.last().unwrap() {
            return self.states.last().unwrap().clone();
        }
        let i = match taus.binary_search_by(|t| t.partial_cmp(&tau).unwrap()) {
            Ok(i) => return self.states[i].clone(),
            Err(i) => i - 1,
        };
        let lam = (tau - taus[i]) / (taus[i + 1] - taus[i]);
        self.states[i]
            .iter()
            .zip(&self.states[i + 1])
            .map(|(a, b)| a + lam * (b - a))
            .collect()
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(y)` from `y0` over `[0, tau_max]`, stopping at the
/// first event. Crossing events must be `< 0` at `y0`; dip events `> 0`.
pub fn integrate_with_events(
    f: &dyn Fn(&[f64], &mut [f64]),
    y0: &[f64],
    tau_max: f64,
    events: &[Event<'_>],
    spec: &OdeSpec,
) -> OdeResult {
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut tau = 0.0;
    let mut h = spec.h_init.min(spec.h_max).min(tau_max);
    let mut taus = vec![0.0];
    let mut states = vec![y.clone()];

    let mut k = vec![vec![0.0; dim]; 7];
    let mut scratch = vec![0.0; dim];
    f(&y, &mut k[0]);

    let mut steps = 0usize;
    loop {
        if tau >= tau_max {
            return OdeResult {
                taus,
                states,
                cause: StopCause::EndOfInterval,
            };
        }
        if steps >= spec.max_steps {
            return OdeResult {
                taus,
                states,
                cause: StopCause::StepLimit,
            };
        }
        if h < 1e-14 * tau.abs().max(1.0) {
            return OdeResult {
                taus,
                states,
                cause: StopCause::StepSizeCollapse,
            };
        }
        h = h.min(tau_max - tau);

        // Seven-stage Dormand-Prince step with FSAL.
        stage(&y, &[(A21, 0)], h, &k, &mut scratch);
        f(&scratch, &mut k[1]);
        stage(&y, &[(A31, 0), (A32, 1)], h, &k, &mut scratch);
        f(&scratch, &mut k[2]);
        stage(&y, &[(A41, 0), (A42, 1), (A43, 2)], h, &k, &mut scratch);
        f(&scratch, &mut k[3]);
        stage(
            &y,
            &[(A51, 0), (A52, 1), (A53, 2), (A54, 3)],
            h,
            &k,
            &mut scratch,
        );
        f(&scratch, &mut k[4]);
        stage(
            &y,
            &[(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)],
            h,
            &k,
            &mut scratch,
        );
        f(&scratch, &mut k[5]);
        let mut y1 = vec![0.0; dim];
        for i in 0..dim {
            y1[i] = y[i]
                + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        }
        f(&y1, &mut k[6]);

        let mut err = 0.0;
        for i in 0..dim {
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = spec.atol + spec.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / dim as f64).sqrt();

        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            continue;
        }

        steps += 1;
        let tau1 = tau + h;
        // Event check on the accepted step.
        let mut fired: Option<(usize, f64, Vec<f64>)> = None;
        for (ei, ev) in events.iter().enumerate() {
            let hit = match ev.kind {
                EventKind::Crossing => {
                    if (ev.f)(&y1) >= 0.0 {
                        Some(locate_crossing(
                            ev.f,
                            tau,
                            &y,
                            &k[0],
                            tau1,
                            &y1,
                            &k[6],
                            spec.event_tol,
                        ))
                    } else {
                        None
                    }
                }
                EventKind::Dip => {
                    locate_dip(ev.f, tau, &y, &k[0], tau1, &y1, &k[6], spec.event_tol)
                }
            };
            if let Some((tau_star, y_star)) = hit {
                let better = fired.as_ref().map_or(true, |(_, t, _)| tau_star < *t);
                if better {
                    fired = Some((ei, tau_star, y_star));
                }
            }
        }
        if let Some((ei, tau_star, y_star)) = fired {
            taus.push(tau_star);
            states.push(y_star);
            return OdeResult {
                taus,
                states,
                cause: StopCause::Event(ei),
            };
        }

        y = y1;
        tau = tau1;
        k.swap(0, 6); // FSAL
        taus.push(tau);
        states.push(y.clone());
        h = (h * (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0)).min(spec.h_max);
    }
}

fn stage(y: &[f64], coeffs: &[(f64, usize)], h: f64, k: &[Vec<f64>], out: &mut [f64]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for &(c, s) in coeffs {
            acc += c * k[s][i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Cubic Hermite interpolation of the step, bisected for the first zero of
/// the event function.
#[allow(clippy::too_many_arguments)]
fn locate_event(
    ev: &dyn Fn(&[f64]) -> f64,
    tau0: f64,
    y0: &[f64],
    f0: &[f64],
    tau1: f64,
    y1: &[f64],
    f1: &[f64],
    tol: f64,
) -> (f64, Vec<f64>) {
    let h = tau1 - tau0;
    let hermite = |s: f64| -> Vec<f64> {
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        (0..y0.len())
            .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
            .collect()
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    if ev(y0) >= 0.0 {
        return (tau0, y0.to_vec());
    }
    while (hi - lo) * h > tol {
        let mid = 0.5 * (lo + hi);
        if ev(&hermite(mid)) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (tau0 + hi * h, hermite(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_accuracy() {
        let f = |y: &[f64], dy: &mut [f64]| {
            dy[0] = -y[0];
        };
        let res = integrate_with_events(&f, &[1.0], 3.0, &[], &OdeSpec::default());
        assert_eq!(res.cause, StopCause::EndOfInterval);
        let got = res.final_state()[0];
        assert!((got - (-3.0f64).exp()).abs() < 1e-8, "got {got}");
    }

    #[test]
    fn circular_motion_preserves_radius() {
        let f = |y: &[f64], dy: &mut [f64]| {
            dy[0] = -y[1];
            dy[1] = y[0];
        };
        let res = integrate_with_events(&f, &[1.0, 0.0], 10.0, &[], &OdeSpec::default());
        let s = res.final_state();
        let r = (s[0] * s[0] + s[1] * s[1]).sqrt();
        assert!((r - 1.0).abs() < 1e-7);
    }

    #[test]
    fn event_located_to_tolerance() {
        // y' = 1 from 0; event y - 0.77 >= 0 must stop at tau = 0.77.
        let f = |_: &[f64], dy: &mut [f64]| {
            dy[0] = 1.0;
        };
        let ev = |y: &[f64]| y[0] - 0.77;
        let res = integrate_with_events(&f, &[0.0], 5.0, &[&ev], &OdeSpec::default());
        assert_eq!(res.cause, StopCause::Event(0));
        assert!((res.final_tau() - 0.77).abs() < 1e-9);
        assert!((res.final_state()[0] - 0.77).abs() < 1e-9);
    }

    #[test]
    fn nonlinear_event_crossing() {
        // Harmonic oscillator: first crossing of y0 <= 0 from (1, 0) is at pi/2.
        let f = |y: &[f64], dy: &mut [f64]| {
            dy[0] = -y[1];
            dy[1] = y[0];
        };
        let ev = |y: &[f64]| -y[0];
        let res = integrate_with_events(&f, &[1.0, 0.0], 10.0, &[&ev], &OdeSpec::default());
        assert_eq!(res.cause, StopCause::Event(0));
        assert!((res.final_tau() - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
    }
}
