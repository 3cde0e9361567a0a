//! Adapted partial F.B.I. transforms for tube structures.
//!
//! `bracket` is the complex square-norm `<w>^2 = w . w` on the slit domain,
//! `delta_general` / `delta_kappa` the rank-one Jacobian determinants of the
//! frequency shifts `zeta -> zeta + i z <zeta>` and `xi -> xi + i z |xi|^k`.
//! [`transform`] evaluates the transforms by oscillatory-Gaussian quadrature,
//! [`invert`] runs the mollified double-quadrature inversion, and [`decay`]
//! classifies the large-frequency behaviour of the transform moduli.

pub mod decay;
pub mod invert;
pub mod transform;
pub mod wellpos;

use num_complex::Complex64;
use thiserror::Error;

use crate::star::StarError;
use crate::tube::TubeError;

pub use decay::{fit_decay, DecayClass, DecayFit};
pub use invert::{invert_kappa, forward_slice, FbiSliceData, InversionResult};
pub use transform::{
    fbi_adapted_at, fbi_kappa_at, fbi_kappa_dirac, fbi_kappa_on_slice, fbi_kappa_sweep, Cutoff,
    FbiPoint, QuadRule, QuadratureSpec, SweepPoint,
};
pub use wellpos::{well_positioned_probe, WellPosReport};

#[derive(Debug, Error)]
pub enum FbiError {
    #[error("zeta . zeta lies on the branch cut (-inf, 0] of the principal square root")]
    BranchCut,
    #[error("frequency xi must be nonzero")]
    ZeroFrequency,
    #[error("zeta is outside the cone |Im zeta| < |Re zeta|")]
    OutsideCone,
    #[error("kappa must lie in (0, 1]")]
    BadKappa,
    #[error("cutoff needs 0 < inner < outer")]
    BadCutoff,
    #[error("quadrature needs at least 8 nodes per axis and must cover the cutoff support")]
    BadQuadrature,
    #[error("epsilon sequence must be strictly decreasing and positive")]
    NonMonotoneEps,
    #[error("transform sample data is empty or inconsistent")]
    EmptyData,
    #[error("decay fit needs at least {need} distinct frequencies spanning a decade, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("decay fit requires positive magnitudes")]
    NonPositiveMagnitude,
    #[error("dimension mismatch between data and request")]
    DimensionMismatch,
    #[error("degenerate probe grid")]
    DegenerateGrid,
    #[error(transparent)]
    Tube(#[from] TubeError),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Poly(#[from] crate::polymap::PolyError),
}

/// Principal square root of `zeta . zeta` (no conjugation), defined away
/// from the branch cut `zeta . zeta in (-inf, 0]`; `Re <zeta> > 0` there.
pub fn bracket(zeta: &[Complex64]) -> Result<Complex64, FbiError> {
    let w: Complex64 = zeta.iter().map(|z| z * z).sum();
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(FbiError::BranchCut);
    }
    Ok(w.sqrt())
}

/// Determinant of the Jacobian of `zeta -> zeta + i z <zeta>`:
/// `1 + i (z . zeta) / <zeta>` by the rank-one determinant identity
/// `det(I + u v^T) = 1 + v . u` with `u = i z`, `v = zeta / <zeta>`.
pub fn delta_general(z: &[Complex64], zeta: &[Complex64]) -> Result<Complex64, FbiError> {
    if z.len() != zeta.len() {
        return Err(FbiError::DimensionMismatch);
    }
    let br = bracket(zeta)?;
    let dot: Complex64 = z.iter().zip(zeta).map(|(a, b)| a * b).sum();
    Ok(Complex64::new(1.0, 0.0) + Complex64::i() * dot / br)
}

/// Determinant of the Jacobian of `xi -> xi + i z |xi|^kappa`:
/// `1 + i kappa |xi|^(kappa-2) (xi . z)`.
pub fn delta_kappa(z: &[Complex64], xi: &[f64], kappa: f64) -> Result<Complex64, FbiError> {
    if z.len() != xi.len() {
        return Err(FbiError::DimensionMismatch);
    }
    let norm2: f64 = xi.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(FbiError::ZeroFrequency);
    }
    let dot: Complex64 = xi.iter().zip(z).map(|(a, b)| b * *a).sum();
    let factor = kappa * norm2.sqrt().powf(kappa - 2.0);
    Ok(Complex64::new(1.0, 0.0) + Complex64::i() * factor * dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Complex determinant by Gaussian elimination (test oracle only).
    fn det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
        let n = m.len();
        let mut d = c(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
                .unwrap();
            if m[piv][col].norm() == 0.0 {
                return c(0.0, 0.0);
            }
            if piv != col {
                m.swap(piv, col);
                d = -d;
            }
            d *= m[col][col];
            for row in col + 1..n {
                let f = m[row][col] / m[col][col];
                for k in col..n {
                    let v = m[col][k];
                    m[row][k] -= f * v;
                }
            }
        }
        d
    }

    /// Finite-difference Jacobian determinant of `F` at `x0` (real steps,
    /// valid for holomorphic maps too).
    fn fd_jacobian_det(
        f: &dyn Fn(&[f64]) -> Vec<Complex64>,
        x0: &[f64],
        h: f64,
    ) -> Complex64 {
        let m = x0.len();
        let mut jac = vec![vec![c(0.0, 0.0); m]; m];
        for l in 0..m {
            let mut xp = x0.to_vec();
            let mut xm = x0.to_vec();
            xp[l] += h;
            xm[l] -= h;
            let fp = f(&xp);
            let fm = f(&xm);
            for k in 0..m {
                jac[k][l] = (fp[k] - fm[k]) / (2.0 * h);
            }
        }
        det(jac)
    }

    #[test]
    fn bracket_real_vector_is_norm() {
        let z = [c(3.0, 0.0), c(4.0, 0.0)];
        let b = bracket(&z).unwrap();
        assert!((b - c(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bracket_mixed_example() {
        let z = [c(1.0, 0.0), c(0.0, 0.5)];
        let b = bracket(&z).unwrap();
        assert!((b - c(0.75f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bracket_branch_cut_rejected() {
        assert!(matches!(bracket(&[c(0.0, 1.0)]), Err(FbiError::BranchCut)));
    }

    #[test]
    fn delta_general_identity_at_zero() {
        let zeta = [c(1.0, 0.2), c(-0.4, 0.1)];
        let d = delta_general(&[c(0.0, 0.0), c(0.0, 0.0)], &zeta).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn delta_general_scalar_example() {
        // m = 1, z = 3, zeta = 2 -> 1 + 3i.
        let d = delta_general(&[c(3.0, 0.0)], &[c(2.0, 0.0)]).unwrap();
        assert!((d - c(1.0, 3.0)).norm() < 1e-14);
    }

    #[test]
    fn delta_general_planar_example() {
        // m = 2, z = (1, 0), zeta = (2, 0) -> 1 + i.
        let d = delta_general(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((d - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn delta_kappa_examples() {
        // kappa = 1, xi = 2, z = 3 -> 1 + 3i.
        let d = delta_kappa(&[c(3.0, 0.0)], &[2.0], 1.0).unwrap();
        assert!((d - c(1.0, 3.0)).norm() < 1e-14);
        // kappa = 1/2, xi = 1, z = i -> 1 + (1/2) i i = 1/2.
        let d = delta_kappa(&[c(0.0, 1.0)], &[1.0], 0.5).unwrap();
        assert!((d - c(0.5, 0.0)).norm() < 1e-14);
        // z = 0 -> 1.
        let d = delta_kappa(&[c(0.0, 0.0)], &[1.7], 0.8).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn delta_closed_forms_match_finite_difference_jacobians() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let h = 1e-5;
        for _ in 0..100 {
            let m = rng.gen_range(1..=3);
            let z: Vec<Complex64> = (0..m)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            // Keep zeta well off the branch cut: real part dominant.
            let zeta: Vec<Complex64> = (0..m)
                .map(|_| {
                    c(
                        rng.gen_range(1.0..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                        rng.gen_range(-0.2..0.2),
                    )
                })
                .collect();
            let closed = delta_general(&z, &zeta).unwrap();
            // F(zeta) = zeta + i z <zeta> as a function of Re zeta
            // (holomorphic, so real-direction differences give the complex
            // Jacobian).
            let zeta_im: Vec<f64> = zeta.iter().map(|v| v.im).collect();
            let zc = z.clone();
            let f = move |re: &[f64]| -> Vec<Complex64> {
                let zeta: Vec<Complex64> =
                    re.iter().zip(&zeta_im).map(|(r, i)| c(*r, *i)).collect();
                let br = bracket(&zeta).unwrap();
                zeta.iter()
                    .zip(&zc)
                    .map(|(zt, zz)| zt + Complex64::i() * zz * br)
                    .collect()
            };
            let re0: Vec<f64> = zeta.iter().map(|v| v.re).collect();
            let fd = fd_jacobian_det(&f, &re0, h);
            assert!(
                (closed - fd).norm() <= 1e-6 * fd.norm().max(1.0),
                "delta mismatch: closed {closed}, fd {fd}"
            );

            // Delta_kappa against the same oracle.
            let kappa = rng.gen_range(0.3..=1.0);
            let xi: Vec<f64> = (0..m)
                .map(|_| rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            let closed_k = delta_kappa(&z, &xi, kappa).unwrap();
            let zc = z.clone();
            let g = move |xi: &[f64]| -> Vec<Complex64> {
                let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt().powf(kappa);
                xi.iter()
                    .zip(&zc)
                    .map(|(x, zz)| c(*x, 0.0) + Complex64::i() * zz * n)
                    .collect()
            };
            let fd_k = fd_jacobian_det(&g, &xi, h);
            assert!(
                (closed_k - fd_k).norm() <= 1e-6 * fd_k.norm().max(1.0),
                "delta_kappa mismatch: closed {closed_k}, fd {fd_k}"
            );
        }
    }

    #[test]
    fn bracket_cone_comparison_bounds() {
        // For |Im zeta| < k0 |Re zeta|:
        // Re<zeta> >= sqrt((1-k0^2)/(1+k0^2)) |zeta| and
        // |zeta/<zeta>| <= sqrt((1+k0^2)/(1-k0^2)).
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k0 in [0.1, 0.5, 0.9] {
            let lo = ((1.0f64 - k0 * k0) / (1.0 + k0 * k0)).sqrt();
            let hi = ((1.0f64 + k0 * k0) / (1.0 - k0 * k0)).sqrt();
            for _ in 0..500 {
                let m = rng.gen_range(1..=3);
                let re: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let re_norm = crate::util::norm(&re);
                if re_norm < 1e-3 {
                    continue;
                }
                // Scale a random imaginary part to stay strictly inside.
                let im_raw: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let im_norm = crate::util::norm(&im_raw);
                if im_norm == 0.0 {
                    continue;
                }
                let target = rng.gen_range(0.0..0.999 * k0) * re_norm;
                let zeta: Vec<Complex64> = re
                    .iter()
                    .zip(&im_raw)
                    .map(|(r, i)| c(*r, i * target / im_norm))
                    .collect();
                let abs: f64 = zeta.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let br = bracket(&zeta).unwrap();
                assert!(br.re >= lo * abs - 1e-12, "k0={k0}: Re<z>={}, |z|={abs}", br.re);
                assert!(abs / br.norm() <= hi + 1e-12);
            }
        }
    }
}
