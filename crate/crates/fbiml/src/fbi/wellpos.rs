//! Empirical well-positionedness probe.
//!
//! For a tube the real-structure bundle covectors are real, so the cone
//! constant `kappa_wp = sup |Im zeta| / |Re zeta|` is zero exactly. The
//! second constant measures how negative the kernel exponent stays across
//! slices: for `z = Z(x,t)`, `z' = Z(x',t')` and the frequency direction
//! aligned with `phi(t) - phi(t')` (the favorable direction the descent
//! machinery produces), the exponent-to-distance ratio is
//!
//! ```text
//! (|dphi| + |dx|^2 - |dphi|^2) / (|dx|^2 + |dphi|^2)
//! ```
//!
//! with `dx = x - x'`, `dphi = phi(t) - phi(t')`. Its minimum over sampled
//! pairs is the reported `kappa'`; on a single slice (`dphi = 0`) it equals
//! one, and it drops below zero once `|phi(t) - phi(t')|` outgrows `|x - x'|`
//! on the sampled boxes, flagging a violation.

use super::FbiError;
use crate::tube::TubeStructure;
use crate::util::{norm, sub};

#[derive(Debug, Clone)]
pub struct WellPosReport {
    /// `sup |Im zeta| / |Re zeta|` over real-structure covectors (0 for
    /// tubes).
    pub kappa_wp: f64,
    /// Minimum exponent-to-distance ratio over sampled slice pairs.
    pub kappa_prime: f64,
    /// `kappa_prime <= 0`.
    pub violation: bool,
    /// The minimizing pair `((x, t), (x', t'))`.
    pub worst_pair: Option<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))>,
}

/// Scans pairs of grid points of `V x W` and minimizes the aligned-frequency
/// exponent ratio.
pub fn well_positioned_probe(
    ts: &TubeStructure,
    x_nodes: usize,
    t_nodes: usize,
) -> Result<WellPosReport, FbiError> {
    if x_nodes < 2 || t_nodes < 1 {
        return Err(FbiError::DegenerateGrid);
    }
    let m = ts.m();
    let n = ts.n();
    let x_axes: Vec<Vec<f64>> = (0..m).map(|a| ts.v().axis_nodes(a, x_nodes)).collect();
    let t_axes: Vec<Vec<f64>> = (0..n).map(|a| ts.w().axis_nodes(a, t_nodes)).collect();
    let xs = cartesian(&x_axes);
    let tts = cartesian(&t_axes);
    let phis: Vec<Vec<f64>> = tts
        .iter()
        .map(|t| ts.phi().eval(t))
        .collect::<Result<_, _>>()
        .map_err(crate::tube::TubeError::from)?;

    let mut kappa_prime = f64::INFINITY;
    let mut worst = None;
    for (ti, t) in tts.iter().enumerate() {
        for (tj, tp) in tts.iter().enumerate() {
            let dphi = sub(&phis[ti], &phis[tj]);
            let dphi_n = norm(&dphi);
            for x in &xs {
                for xp in &xs {
                    let dx = sub(x, xp);
                    let dx_sq = dx.iter().map(|v| v * v).sum::<f64>();
                    let denom = dx_sq + dphi_n * dphi_n;
                    if denom == 0.0 {
                        continue;
                    }
                    let ratio = (dphi_n + dx_sq - dphi_n * dphi_n) / denom;
                    if ratio < kappa_prime {
                        kappa_prime = ratio;
                        worst = Some(((x.clone(), t.clone()), (xp.clone(), tp.clone())));
                    }
                }
            }
        }
    }
    if !kappa_prime.is_finite() {
        return Err(FbiError::DegenerateGrid);
    }
    Ok(WellPosReport {
        kappa_wp: 0.0,
        kappa_prime,
        violation: kappa_prime <= 0.0,
        worst_pair: worst,
    })
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for partial in &out {
            for &v in axis {
                let mut p = partial.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymap::PolynomialMap;
    use crate::tube::BoxDomain;

    fn structure(phi_terms: Vec<Vec<(Vec<u32>, f64)>>, v: f64, w: f64) -> TubeStructure {
        let n = 1;
        let phi = PolynomialMap::from_terms(n, phi_terms).unwrap();
        TubeStructure::new(
            phi,
            BoxDomain::cube(1, v).unwrap(),
            BoxDomain::cube(1, w).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn flat_tube_has_unit_kappa_prime() {
        let ts = structure(vec![vec![]], 1.0, 1.0);
        let rep = well_positioned_probe(&ts, 7, 5).unwrap();
        assert_eq!(rep.kappa_wp, 0.0);
        assert!((rep.kappa_prime - 1.0).abs() < 1e-12);
        assert!(!rep.violation);
    }

    #[test]
    fn small_box_keeps_kappa_prime_high() {
        // phi = t^2 on W = [-0.1, 0.1]: |dphi| <= 0.01 stays tiny.
        let ts = structure(vec![vec![(vec![2], 1.0)]], 1.0, 0.1);
        let rep = well_positioned_probe(&ts, 9, 7).unwrap();
        assert!(rep.kappa_prime >= 0.9, "kappa' = {}", rep.kappa_prime);
        assert!(!rep.violation);
    }

    #[test]
    fn large_box_flags_violation() {
        // phi = t^2 on W = [-10, 10]: |dphi| dominates |dx|.
        let ts = structure(vec![vec![(vec![2], 1.0)]], 1.0, 10.0);
        let rep = well_positioned_probe(&ts, 9, 7).unwrap();
        assert!(rep.violation, "kappa' = {}", rep.kappa_prime);
        assert!(rep.worst_pair.is_some());
    }

    #[test]
    fn degenerate_grid_rejected() {
        let ts = structure(vec![vec![(vec![2], 1.0)]], 1.0, 1.0);
        assert!(matches!(
            well_positioned_probe(&ts, 1, 1),
            Err(FbiError::DegenerateGrid)
        ));
    }
}
