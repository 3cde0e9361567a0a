//! Openness and Lojasiewicz certification for `t -> phi(t) . xi`.
//!
//! A direction `xi0` is certified when (a) the map `t -> phi(t) . xi` is open
//! on `W0` for every sampled `xi` in a cone around `xi0` (a resolution-
//! qualified numerical proxy), and (b) the parametric Lojasiewicz inequality
//! `|phi(t).xi|^theta <= C_L ||t-d phi(t) xi||` holds with a finite constant
//! that is stable under grid refinement. Homogeneous maps get the exact
//! exponent `theta = 1 - 1/k` through the sup-over-sublevel certificate, and
//! 2-D homogeneous pairs through the l1 gradient-domination cone criterion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::polymap::{PolyError, PolynomialMap, SparsePoly};
use crate::tube::{BoxDomain, TubeError};
use crate::util::{dot, linear_fit, norm, normalize, sub};

#[derive(Debug, Error)]
pub enum StarError {
    #[error("frequency direction must be nonzero")]
    ZeroDirection,
    #[error("cone half-angle must lie in (0, pi/2)")]
    BadHalfAngle,
    #[error("empty sample grid after gradient-floor exclusion")]
    EmptyGrid,
    #[error("polynomial is not homogeneous of degree >= 2")]
    NotHomogeneous,
    #[error("sublevel set {{|grad P| <= 1}} appears unbounded and its sup does not stabilize")]
    UnboundedSup,
    #[error("degrees of the pair differ: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("need 0 < rho' < rho < 1")]
    BadRho,
    #[error("t1 range must lie in (0, 0.3] with at least 10 samples")]
    BadMaireRange,
    #[error("frequency dimension {0} not supported by the cone sampler (max 3)")]
    UnsupportedDim(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tube(#[from] TubeError),
}

/// Open cone of directions: angle to `center` below `half_angle`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    center: Vec<f64>,
    half_angle: f64,
}

impl Cone {
    pub fn new(center: &[f64], half_angle: f64) -> Result<Self, StarError> {
        let center = normalize(center).ok_or(StarError::ZeroDirection)?;
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(StarError::BadHalfAngle);
        }
        Ok(Self { center, half_angle })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        match normalize(xi) {
            Some(u) => dot(&u, &self.center).clamp(-1.0, 1.0).acos() < self.half_angle,
            None => false,
        }
    }

    /// Deterministic unit directions covering `Gamma ∩ S^{m-1}`.
    ///
    /// One direction for `m = 1`, equally spaced angles for `m = 2`, a
    /// golden-angle cap spiral for `m = 3`.
    pub fn sphere_grid(&self, count: usize) -> Result<Vec<Vec<f64>>, StarError> {
        let m = self.dim();
        match m {
            1 => Ok(vec![self.center.clone()]),
            2 => {
                let a0 = self.center[1].atan2(self.center[0]);
                let k = count.max(1);
                Ok((0..k)
                    .map(|i| {
                        let frac = if k == 1 {
                            0.0
                        } else {
                            i as f64 / (k - 1) as f64 * 2.0 - 1.0
                        };
                        // Stay strictly inside the open cone.
                        let a = a0 + 0.999 * self.half_angle * frac;
                        vec![a.cos(), a.sin()]
                    })
                    .collect())
            }
            3 => {
                let k = count.max(1);
                let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
                let frame = orthonormal_complement(&self.center);
                Ok((0..k)
                    .map(|i| {
                        let frac = (i as f64 + 0.5) / k as f64;
                        let polar = 0.999 * self.half_angle * frac.sqrt();
                        let az = golden * i as f64;
                        let (sp, cp) = polar.sin_cos();
                        (0..3)
                            .map(|d| {
                                cp * self.center[d]
                                    + sp * (az.cos() * frame.0[d] + az.sin() * frame.1[d])
                            })
                            .collect()
                    })
                    .collect())
            }
            d => Err(StarError::UnsupportedDim(d)),
        }
    }
}

fn orthonormal_complement(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(u.len(), 3);
    let pick = if u[0].abs() < 0.9 {
        vec![1.0, 0.0, 0.0]
    } else {
        vec![0.0, 1.0, 0.0]
    };
    let proj = dot(&pick, u);
    let mut e1: Vec<f64> = pick.iter().zip(u).map(|(p, c)| p - proj * c).collect();
    let n1 = norm(&e1);
    e1.iter_mut().for_each(|v| *v /= n1);
    let e2 = vec![
        u[1] * e1[2] - u[2] * e1[1],
        u[2] * e1[0] - u[0] * e1[2],
        u[0] * e1[1] - u[1] * e1[0],
    ];
    (e1, e2)
}

/// Sub-threshold region of `||t-d phi(t) xi||` on a grid, with connected
/// components under grid adjacency.
#[derive(Debug, Clone)]
pub struct SigmaSet {
    pub threshold: f64,
    pub points: Vec<Vec<f64>>,
    pub component_of: Vec<usize>,
    pub component_count: usize,
}

pub fn sigma_set(
    phi: &PolynomialMap,
    xi: &[f64],
    w0: &BoxDomain,
    nodes_per_axis: usize,
    threshold: f64,
) -> Result<SigmaSet, StarError> {
    assert!(threshold > 0.0);
    let n = phi.input_dim();
    let axes: Vec<Vec<f64>> = (0..n).map(|a| w0.axis_nodes(a, nodes_per_axis)).collect();
    let shape = vec![nodes_per_axis; n];
    let total: usize = shape.iter().product();
    let mut below: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    let mut index_of = std::collections::HashMap::new();
    let mut idx = vec![0usize; n];
    for flat in 0..total {
        let t: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
        if norm(&phi.grad_transpose_apply(&t, xi)?) < threshold {
            index_of.insert(flat, below.len());
            below.push((idx.clone(), t));
        }
        increment_mixed(&mut idx, &shape);
    }
    let mut parent: Vec<usize> = (0..below.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (li, (idx, _)) in below.iter().enumerate() {
        for a in 0..n {
            if idx[a] + 1 < nodes_per_axis {
                let mut nb = idx.clone();
                nb[a] += 1;
                if let Some(&lj) = index_of.get(&flatten(&nb, &shape)) {
                    let (ri, rj) = (find(&mut parent, li), find(&mut parent, lj));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
    }
    let mut label_of_root = std::collections::HashMap::new();
    let mut component_of = Vec::with_capacity(below.len());
    for i in 0..below.len() {
        let r = find(&mut parent, i);
        let next = label_of_root.len();
        component_of.push(*label_of_root.entry(r).or_insert(next));
    }
    Ok(SigmaSet {
        threshold,
        points: below.into_iter().map(|(_, t)| t).collect(),
        component_of,
        component_count: label_of_root.len(),
    })
}

fn flatten(idx: &[usize], shape: &[usize]) -> usize {
    let mut f = 0;
    for (i, s) in idx.iter().zip(shape) {
        f = f * s + i;
    }
    f
}

fn increment_mixed(idx: &mut [usize], shape: &[usize]) -> bool {
    let mut d = idx.len();
    loop {
        if d == 0 {
            return false;
        }
        d -= 1;
        idx[d] += 1;
        if idx[d] < shape[d] {
            return true;
        }
        idx[d] = 0;
    }
}

/// Verdict of the numerical openness proxy.
#[derive(Debug, Clone, PartialEq)]
pub enum Openness {
    Open {
        finest_radius: f64,
    },
    NotOpen {
        witness_center: Vec<f64>,
        witness_radius: f64,
        /// True for a local-minimum obstruction, false for a local maximum.
        minimum: bool,
    },
    Inconclusive {
        center: Vec<f64>,
        radius: f64,
    },
}

/// Two-sided surrounding test on dyadic spheres: every sampled ball must have
/// `min_S phi.xi < phi(center).xi < max_S phi.xi`. A center whose value stays
/// at or below the sphere minimum for the smallest radii is a local-minimum
/// witness, so the map cannot be open there.
pub fn check_openness(
    phi: &PolynomialMap,
    xi: &[f64],
    w0: &BoxDomain,
    centers_per_axis: usize,
    radius_levels: usize,
) -> Result<Openness, StarError> {
    if norm(xi) == 0.0 {
        return Err(StarError::ZeroDirection);
    }
    let n = phi.input_dim();
    let p = phi.dot(xi)?;
    let sphere = sphere_directions(n, 48);
    let axes: Vec<Vec<f64>> = (0..n).map(|a| w0.axis_nodes(a, centers_per_axis)).collect();
    let shape = vec![centers_per_axis; n];
    let mut idx = vec![0usize; n];
    let mut all_surrounded = true;
    let mut finest = f64::INFINITY;
    let mut inconclusive: Option<(Vec<f64>, f64)> = None;
    loop {
        let c: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
        let r_max = 0.5 * -w0.boundary_excess(&c);
        if r_max > 0.0 {
            let pc = p.eval(&c)?;
            let mut min_streak = 0usize;
            let mut max_streak = 0usize;
            for lev in 0..radius_levels {
                let r = r_max * 0.5f64.powi(lev as i32);
                finest = finest.min(r);
                let mut mn = f64::INFINITY;
                let mut mx = f64::NEG_INFINITY;
                for d in &sphere {
                    let q: Vec<f64> = c.iter().zip(d).map(|(ci, di)| ci + r * di).collect();
                    let v = p.eval(&q)?;
                    mn = mn.min(v);
                    mx = mx.max(v);
                }
                if !(mn < pc && pc < mx) {
                    all_surrounded = false;
                    if inconclusive.is_none() {
                        inconclusive = Some((c.clone(), r));
                    }
                }
                min_streak = if pc <= mn { min_streak + 1 } else { 0 };
                max_streak = if pc >= mx { max_streak + 1 } else { 0 };
            }
            // A witness must hold on the (at least three) smallest radii.
            if radius_levels >= 3 && (min_streak >= 3 || max_streak >= 3) {
                return Ok(Openness::NotOpen {
                    witness_center: c,
                    witness_radius: r_max * 0.5f64.powi(radius_levels as i32 - 1),
                    minimum: min_streak >= 3,
                });
            }
        }
        if !increment_mixed(&mut idx, &shape) {
            break;
        }
    }
    if all_surrounded {
        Ok(Openness::Open {
            finest_radius: finest,
        })
    } else {
        let (center, radius) = inconclusive.expect("failure recorded");
        Ok(Openness::Inconclusive { center, radius })
    }
}

/// Deterministic unit directions on `S^{n-1}`.
pub(crate) fn sphere_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_D1CE);
            (0..count.max(2 * n))
                .map(|_| loop {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
                    if let Some(u) = normalize(&v) {
                        break u;
                    }
                })
                .collect()
        }
    }
}

/// How a certificate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertMethod {
    GridEstimate,
    HomogeneousLemma,
    ConeCriterion,
}

impl CertMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertMethod::GridEstimate => "grid-estimate",
            CertMethod::HomogeneousLemma => "homogeneous-lemma",
            CertMethod::ConeCriterion => "cone-criterion",
        }
    }
}

/// One worst-ratio evidence sample backing a certificate.
#[derive(Debug, Clone)]
pub struct EvidenceSample {
    pub t: Vec<f64>,
    pub xi: Vec<f64>,
    pub lhs: f64,
    pub grad_norm: f64,
    pub ratio: f64,
}

/// A verified `(star)` certificate at `xi0`.
#[derive(Debug, Clone)]
pub struct StarCertificate {
    pub xi0: Vec<f64>,
    pub cone: Cone,
    pub w0: BoxDomain,
    pub openness: Vec<(Vec<f64>, Openness)>,
    pub theta: f64,
    pub c_l: f64,
    pub method: CertMethod,
    pub evidence: Vec<EvidenceSample>,
    pub excluded_fraction: f64,
}

impl StarCertificate {
    /// Re-validates `(LC)` on fresh random samples; returns the violation
    /// count against `slack * C_L` with the given gradient floor.
    pub fn revalidate(
        &self,
        phi: &PolynomialMap,
        samples: usize,
        slack: f64,
        gradient_floor: f64,
        seed: u64,
    ) -> Result<usize, StarError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dirs = self.cone.sphere_grid(64)?;
        let mut violations = 0usize;
        let n = phi.input_dim();
        let mut done = 0usize;
        while done < samples {
            let t: Vec<f64> = (0..n)
                .map(|a| {
                    let h = self.w0.half_widths()[a];
                    rng.gen_range(-h..h)
                })
                .collect();
            let xi = &dirs[rng.gen_range(0..dirs.len())];
            let g = norm(&phi.grad_transpose_apply(&t, xi)?);
            if g < gradient_floor {
                continue;
            }
            done += 1;
            let lhs = phi.dot(xi)?.eval(&t)?.abs().powf(self.theta);
            if lhs > slack * self.c_l * g + 1e-9 {
                violations += 1;
            }
        }
        Ok(violations)
    }
}

/// Grid controls for [`estimate_lojasiewicz`].
#[derive(Debug, Clone)]
pub struct LojaGrids {
    /// Nodes per `t`-axis at the coarsest level.
    pub t_nodes_base: usize,
    /// Refinement levels; each multiplies nodes per axis by `refine`.
    pub levels: usize,
    pub refine: usize,
    /// Directions sampled on the cone sphere for evidence.
    pub xi_directions: usize,
    pub gradient_floor: f64,
    /// Total growth of `C_L` across all levels above which `theta` is
    /// rejected as unstable.
    pub stability_ratio: f64,
}

impl Default for LojaGrids {
    fn default() -> Self {
        Self {
            t_nodes_base: 9,
            levels: 3,
            refine: 4,
            xi_directions: 17,
            gradient_floor: 1e-9,
            stability_ratio: 1.10,
        }
    }
}

/// Default ascending exponent grid `{0.50, 0.55, ..., 0.95}`.
pub fn default_theta_grid() -> Vec<f64> {
    (0..10).map(|i| 0.50 + 0.05 * i as f64).collect()
}

/// Outcome of the Lojasiewicz sweep.
#[derive(Debug, Clone)]
pub enum LojaOutcome {
    Certificate(StarCertificate),
    Failure {
        /// Empirical exponent from the log-log fit along the worst sequence.
        theta_required: f64,
        fit_residual: f64,
        worst_direction: Vec<f64>,
        /// `C_L` of the largest grid exponent at the finest level.
        c_l_unstable: f64,
    },
}

/// Finds the smallest exponent in `theta_grid` whose constant
/// `C_L(theta) = sup |phi.xi|^theta / ||t-d phi xi||` is stable under grid
/// refinement. The sup runs over the `t`-grid and, per `t`, both the cone
/// sphere grid and the in-cone direction minimizing the gradient norm (the
/// adversarial frequency, where near-failures concentrate). On failure the
/// empirical exponent is fitted along the worst direction.
pub fn estimate_lojasiewicz(
    phi: &PolynomialMap,
    cone: &Cone,
    w0: &BoxDomain,
    theta_grid: &[f64],
    grids: &LojaGrids,
) -> Result<LojaOutcome, StarError> {
    let n = phi.input_dim();
    let mut thetas: Vec<f64> = theta_grid.to_vec();
    let hom = phi.homogeneity();
    if let Some(k) = hom.degree.filter(|_| hom.jointly) {
        if k >= 2 {
            thetas.push(1.0 - 1.0 / f64::from(k));
        }
    }
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    thetas.retain(|t| (0.5..1.0).contains(t));

    let dirs = cone.sphere_grid(grids.xi_directions)?;
    let mut c_l = vec![vec![0.0f64; grids.levels]; thetas.len()];
    let mut excluded = 0usize;
    let mut total = 0usize;
    let mut worst: Option<EvidenceSample> = None;
    let mut evidence: Vec<EvidenceSample> = Vec::new();

    for level in 0..grids.levels {
        let nodes = grids.t_nodes_base * grids.refine.pow(level as u32);
        let axes: Vec<Vec<f64>> = (0..n).map(|a| w0.axis_nodes(a, nodes)).collect();
        let shape = vec![nodes; n];
        let mut idx = vec![0usize; n];
        let finest = level + 1 == grids.levels;
        loop {
            let t: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
            let mut xis: Vec<Vec<f64>> = Vec::with_capacity(dirs.len() + 1);
            if let Some(adv) = adversarial_direction(phi, &t, cone)? {
                xis.push(adv);
            }
            xis.extend(dirs.iter().cloned());
            for xi in &xis {
                total += 1;
                let g = norm(&phi.grad_transpose_apply(&t, xi)?);
                if g < grids.gradient_floor {
                    excluded += 1;
                    continue;
                }
                let a = phi.dot(xi)?.eval(&t)?.abs();
                for (ti, &theta) in thetas.iter().enumerate() {
                    let ratio = a.powf(theta) / g;
                    if ratio > c_l[ti][level] {
                        c_l[ti][level] = ratio;
                    }
                }
                if finest {
                    let theta_max = *thetas.last().unwrap();
                    let ratio = a.powf(theta_max) / g;
                    let sample = EvidenceSample {
                        t: t.clone(),
                        xi: xi.clone(),
                        lhs: a,
                        grad_norm: g,
                        ratio,
                    };
                    if worst.as_ref().map_or(true, |w| ratio > w.ratio) {
                        worst = Some(sample.clone());
                    }
                    if evidence.len() < 512 {
                        evidence.push(sample);
                    }
                }
            }
            if !increment_mixed(&mut idx, &shape) {
                break;
            }
        }
    }
    if total == excluded {
        return Err(StarError::EmptyGrid);
    }
    let excluded_fraction = excluded as f64 / total as f64;

    for (ti, &theta) in thetas.iter().enumerate() {
        let first = c_l[ti][0];
        let last = c_l[ti][grids.levels - 1];
        if last <= 0.0 {
            continue;
        }
        if first > 0.0 && last / first < grids.stability_ratio {
            evidence.sort_by(|a, b| {
                (b.lhs.powf(theta) / b.grad_norm)
                    .partial_cmp(&(a.lhs.powf(theta) / a.grad_norm))
                    .unwrap()
            });
            evidence.truncate(16);
            for e in &mut evidence {
                e.ratio = e.lhs.powf(theta) / e.grad_norm;
            }
            return Ok(LojaOutcome::Certificate(StarCertificate {
                xi0: cone.center().to_vec(),
                cone: cone.clone(),
                w0: w0.clone(),
                openness: Vec::new(),
                theta,
                c_l: last,
                method: CertMethod::GridEstimate,
                evidence,
                excluded_fraction,
            }));
        }
    }

    // No stable exponent. The ratio blows up along sequences approaching the
    // locus where the in-cone gradient minimum vanishes; fit the empirical
    // exponent on a geometric walk from the worst sample toward that locus.
    let worst = worst.ok_or(StarError::EmptyGrid)?;
    let min_g = |t: &[f64]| -> f64 {
        match adversarial_direction(phi, t, cone) {
            Ok(Some(xi)) => norm(&phi.grad_transpose_apply(t, &xi).expect("dims fixed")),
            _ => f64::INFINITY,
        }
    };
    let t_bar = compass_minimize(&min_g, &worst.t, w0, 400);
    let dir = normalize(&sub(&worst.t, &t_bar)).unwrap_or_else(|| {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    });
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..60 {
        let lam = 0.85f64.powi(i);
        let t: Vec<f64> = t_bar
            .iter()
            .zip(&worst.t)
            .map(|(b, w)| b + lam * (w - b))
            .collect();
        let xi = match adversarial_direction(phi, &t, cone)? {
            Some(x) => x,
            None => cone.center().to_vec(),
        };
        let g = norm(&phi.grad_transpose_apply(&t, &xi)?);
        let a = phi.dot(&xi)?.eval(&t)?.abs();
        // The direction search resolves angles only to f64 precision, which
        // floors the reachable gradient norm near 1e-15; stay well above it.
        if g < 1e-12 || a < 1e-280 {
            break;
        }
        xs.push(a.ln());
        ys.push(g.ln());
    }
    if xs.len() < 4 {
        return Err(StarError::EmptyGrid);
    }
    let (slope, _, res) = linear_fit(&xs, &ys);
    Ok(LojaOutcome::Failure {
        theta_required: slope,
        fit_residual: res,
        worst_direction: dir,
        c_l_unstable: c_l.last().unwrap()[grids.levels - 1],
    })
}

/// Deterministic compass descent of `f` inside the box.
fn compass_minimize(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    w0: &BoxDomain,
    iters: usize,
) -> Vec<f64> {
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut step = norm(start).max(w0.inradius() * 1e-2) * 0.5;
    for _ in 0..iters {
        let mut improved = false;
        for a in 0..x.len() {
            for dir in [-1.0, 1.0] {
                let mut y = x.clone();
                y[a] += dir * step;
                if !w0.contains(&y) {
                    continue;
                }
                let fy = f(&y);
                if fy < fx {
                    fx = fy;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
    }
    x
}

/// Direction in the cone minimizing `||t-d phi(t) xi||` at fixed `t`.
///
/// For `m = 2` the squared norm on the circle is a quadratic form,
/// `||u cos a + v sin a||^2` with `u, v` the columns of the transposed
/// Jacobian, so its critical angles are closed-form.
fn adversarial_direction(
    phi: &PolynomialMap,
    t: &[f64],
    cone: &Cone,
) -> Result<Option<Vec<f64>>, StarError> {
    let m = phi.output_dim();
    match m {
        1 => Ok(Some(cone.center().to_vec())),
        2 => {
            let a0 = cone.center()[1].atan2(cone.center()[0]);
            let h = 0.999 * cone.half_angle();
            let u = phi.grad_transpose_apply(t, &[1.0, 0.0])?;
            let v = phi.grad_transpose_apply(t, &[0.0, 1.0])?;
            let big_a = dot(&u, &u);
            let big_b = 2.0 * dot(&u, &v);
            let big_c = dot(&v, &v);
            // f(a) = (A+C)/2 + (A-C)/2 cos 2a + (B/2) sin 2a has critical
            // angles 2a = atan2(B, A - C) + k pi.
            let base = 0.5 * f64::atan2(big_b, big_a - big_c);
            let mut best_a = a0;
            let mut best = f64::INFINITY;
            let mut consider = |a: f64| {
                let xi = [a.cos(), a.sin()];
                let g = norm(&phi.grad_transpose_apply(t, &xi).expect("dims fixed"));
                if g < best {
                    best = g;
                    best_a = a;
                }
            };
            for k in -4i32..=4 {
                let a = base + f64::from(k) * std::f64::consts::FRAC_PI_2;
                if (a - a0).abs() <= h {
                    consider(a);
                }
            }
            consider(a0 - h);
            consider(a0 + h);
            consider(a0);
            Ok(Some(vec![best_a.cos(), best_a.sin()]))
        }
        _ => {
            let dirs = cone.sphere_grid(128)?;
            let mut best = None;
            let mut best_v = f64::INFINITY;
            for d in dirs {
                let v = norm(&phi.grad_transpose_apply(t, &d)?);
                if v < best_v {
                    best_v = v;
                    best = Some(d);
                }
            }
            Ok(best)
        }
    }
}

/// Certificate from the homogeneous-polynomial gradient inequality: for `P`
/// homogeneous of degree `k` with `sup_{|grad P| <= 1} |P| <= C`,
/// `|P(t)|^{1-1/k} <= C^{1-1/k} |grad P(t)|` for every `t`.
#[derive(Debug, Clone)]
pub struct HomogeneousCertificate {
    pub degree: u32,
    pub theta: f64,
    /// `sup_A |P|` over the sublevel set `A = {|grad P| <= 1}`.
    pub c_sup: f64,
    /// The Lojasiewicz constant `C^(1 - 1/k)`.
    pub c_l: f64,
    /// Radius inside which the sup was localized.
    pub sup_radius: f64,
    /// Probe rays along which `|grad P|` never exceeded 1 (triggers the
    /// sup-stability fallback).
    pub unbounded_rays: usize,
    pub validation_samples: usize,
    pub validation_violations: usize,
}

pub fn homogeneous_certificate(
    p: &SparsePoly,
    validation_samples: usize,
    seed: u64,
) -> Result<HomogeneousCertificate, StarError> {
    let k = p.homogeneous_degree().ok_or(StarError::NotHomogeneous)?;
    if k < 2 {
        return Err(StarError::NotHomogeneous);
    }
    let n = p.n_vars();
    let grad = p.gradient();
    let grad_norm = |t: &[f64]| -> f64 {
        norm(
            &grad
                .iter()
                .map(|g| g.eval(t).expect("dims fixed"))
                .collect::<Vec<_>>(),
        )
    };

    // Radial probing: |grad P(r d)| = r^(k-1) |grad P(d)|.
    let dirs = sphere_directions(n, 128);
    let mut unbounded_rays = 0usize;
    let mut r_bound = 1.0f64;
    for d in &dirs {
        let g1 = grad_norm(d);
        if g1 <= 1e-12 {
            unbounded_rays += 1;
            continue;
        }
        let r = g1.powf(-1.0 / (k as f64 - 1.0));
        if r.is_finite() && r <= 1e3 {
            r_bound = r_bound.max(1.1 * r);
        } else {
            unbounded_rays += 1;
        }
    }

    // Euler's identity (k P = t . grad P) puts the sup of |P| over A on the
    // boundary {|grad P| = 1}; every grid sample is projected there by the
    // homogeneous rescaling lambda = |grad P(t)|^(-1/(k-1)).
    let sup_on = |radius: f64, nodes: usize| -> f64 {
        let mut idx = vec![0usize; n];
        let shape = vec![nodes; n];
        let mut best = 0.0f64;
        let mut best_t = vec![0.0; n];
        loop {
            let t: Vec<f64> = idx
                .iter()
                .map(|&i| -radius + 2.0 * radius * i as f64 / (nodes - 1) as f64)
                .collect();
            let g = grad_norm(&t);
            if g > 1e-300 {
                let lam = g.powf(-1.0 / (k as f64 - 1.0));
                if lam.is_finite() && lam < 1e12 {
                    let tb: Vec<f64> = t.iter().map(|v| v * lam).collect();
                    let v = p.eval(&tb).expect("dims fixed").abs();
                    if v > best {
                        best = v;
                        best_t = tb;
                    }
                }
            }
            if !increment_mixed(&mut idx, &shape) {
                break;
            }
        }
        polish_constrained_max(p, &grad, &best_t, best, radius)
    };

    let nodes = match n {
        1 => 4097,
        2 => 513,
        _ => 65,
    };
    let c_sup;
    let sup_radius;
    if unbounded_rays == 0 {
        let mut c = sup_on(r_bound, nodes);
        for mult in [2usize, 4] {
            let c2 = sup_on(r_bound, (nodes - 1) * mult + 1);
            let stable = (c2 - c).abs() <= 5e-3 * c2.abs().max(1e-300);
            c = c.max(c2);
            if stable {
                break;
            }
        }
        c_sup = c;
        sup_radius = r_bound;
    } else {
        // The set is unbounded along some ray; the lemma only needs the sup,
        // so grow the search box and demand that the sup stops increasing.
        let r1 = r_bound.max(1.0);
        let c1 = sup_on(r1, nodes);
        let c2 = sup_on(2.0 * r1, nodes);
        let c4 = sup_on(4.0 * r1, nodes);
        if (c4 - c2).abs() > 1e-3 * c4.abs().max(1e-300) {
            return Err(StarError::UnboundedSup);
        }
        c_sup = c4.max(c2).max(c1);
        sup_radius = 4.0 * r1;
    }

    let theta = 1.0 - 1.0 / f64::from(k);
    let c_l = c_sup.powf(theta);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 2.0 * sup_radius.max(1.0);
    let mut violations = 0usize;
    for _ in 0..validation_samples {
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-span..span)).collect();
        let lhs = p.eval(&t)?.abs().powf(theta);
        if lhs > c_l * grad_norm(&t) + 1e-9 {
            violations += 1;
        }
    }
    Ok(HomogeneousCertificate {
        degree: k,
        theta,
        c_sup,
        c_l,
        sup_radius,
        unbounded_rays,
        validation_samples,
        validation_violations: violations,
    })
}

/// Local polish of `max |P|` subject to `|grad P| <= 1` from the grid argmax.
/// One variable: Newton on the active constraint `P'(b) = ±1`. Otherwise a
/// penalized compass search.
fn polish_constrained_max(
    p: &SparsePoly,
    grad: &[SparsePoly],
    start: &[f64],
    grid_best: f64,
    radius: f64,
) -> f64 {
    let n = p.n_vars();
    let grad_norm = |t: &[f64]| -> f64 {
        norm(
            &grad
                .iter()
                .map(|g| g.eval(t).expect("dims fixed"))
                .collect::<Vec<_>>(),
        )
    };
    let mut best = grid_best;
    if n == 1 {
        let dp = &grad[0];
        let ddp = dp.partial(0);
        for target in [1.0f64, -1.0] {
            let mut b = start[0];
            for _ in 0..60 {
                let f = dp.eval(&[b]).unwrap() - target;
                let df = ddp.eval(&[b]).unwrap();
                if df == 0.0 {
                    break;
                }
                let step = f / df;
                b -= step;
                if step.abs() < 1e-15 * b.abs().max(1.0) {
                    break;
                }
            }
            if b.is_finite()
                && b.abs() <= radius * 1.5
                && dp.eval(&[b]).unwrap().abs() <= 1.0 + 1e-12
            {
                best = best.max(p.eval(&[b]).unwrap().abs());
            }
        }
        return best;
    }
    let k = p.homogeneous_degree().expect("caller checked homogeneity");
    let project = |t: &[f64]| -> Option<Vec<f64>> {
        let g = grad_norm(t);
        if g <= 1e-300 {
            return None;
        }
        let lam = g.powf(-1.0 / (k as f64 - 1.0));
        if !lam.is_finite() || lam >= 1e12 {
            return None;
        }
        Some(t.iter().map(|v| v * lam).collect())
    };
    let score = |t: &[f64]| -> f64 {
        match project(t) {
            Some(tb) => p.eval(&tb).expect("dims fixed").abs(),
            None => 0.0,
        }
    };
    let mut x = start.to_vec();
    let mut s = score(&x);
    let mut step = radius * 1e-2;
    for _ in 0..200 {
        let mut improved = false;
        for a in 0..n {
            for dir in [-1.0, 1.0] {
                let mut y = x.clone();
                y[a] += dir * step;
                let sy = score(&y);
                if sy > s {
                    s = sy;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-14 * radius {
                break;
            }
        }
    }
    best.max(s)
}

/// Report of the 2-D homogeneous-pair cone criterion.
#[derive(Debug, Clone)]
pub struct ConeCriterionReport {
    pub holds: bool,
    pub witness: Option<Vec<f64>>,
    pub degree: u32,
    /// Whether the sampled lower bound
    /// `|grad P_xi|^2 >= 1/2 xi1^2 (1 - rho'/rho) ||grad phi1||_1^2` held.
    pub lower_bound_ok: bool,
    pub certificate: Option<StarCertificate>,
}

/// Checks `rho ||grad phi2||_1 <= ||grad phi1||_1` on the unit circle
/// (sufficient by homogeneity) and, when it holds with bounded sublevel sets
/// of `||grad phi1||_1`, issues the certificate with `theta = 1 - 1/k` on the
/// cone `0 < xi2 < rho' xi1`.
pub fn cone_criterion(
    phi1: &SparsePoly,
    phi2: &SparsePoly,
    rho: f64,
    rho_prime: f64,
    sphere_samples: usize,
) -> Result<ConeCriterionReport, StarError> {
    if !(0.0 < rho_prime && rho_prime < rho && rho < 1.0) {
        return Err(StarError::BadRho);
    }
    if phi1.n_vars() != 2 || phi2.n_vars() != 2 {
        return Err(StarError::UnsupportedDim(phi1.n_vars().max(phi2.n_vars())));
    }
    let k1 = phi1.homogeneous_degree().ok_or(StarError::NotHomogeneous)?;
    let k = match phi2.homogeneous_degree() {
        Some(k2) if k2 != k1 => return Err(StarError::DegreeMismatch(k1, k2)),
        _ => k1,
    };
    if k < 2 {
        return Err(StarError::NotHomogeneous);
    }
    let g1 = phi1.gradient();
    let g2 = phi2.gradient();
    let l1 = |g: &[SparsePoly], t: &[f64]| -> f64 {
        g.iter().map(|q| q.eval(t).expect("dims fixed").abs()).sum()
    };

    let mut min_g1 = f64::INFINITY;
    for i in 0..sphere_samples {
        let a = 2.0 * std::f64::consts::PI * i as f64 / sphere_samples as f64;
        let t = [a.cos(), a.sin()];
        let lhs = rho * l1(&g2, &t);
        let rhs = l1(&g1, &t);
        min_g1 = min_g1.min(rhs);
        if lhs > rhs {
            return Ok(ConeCriterionReport {
                holds: false,
                witness: Some(t.to_vec()),
                degree: k,
                lower_bound_ok: false,
                certificate: None,
            });
        }
    }
    // Sublevel sets of ||grad phi1||_1 are bounded iff its minimum on the
    // sphere is positive (the gradient is homogeneous of degree k-1 >= 1).
    let bounded = min_g1 > 0.0;

    // The cone 0 < xi2 < rho' xi1 as a center/half-angle pair.
    let a_edge = rho_prime.atan();
    let cone = Cone::new(&[(a_edge / 2.0).cos(), (a_edge / 2.0).sin()], a_edge / 2.0)?;

    let phi_pair =
        PolynomialMap::new(2, vec![phi1.clone(), phi2.clone()]).expect("two 2-var components");
    let mut lower_bound_ok = true;
    for i in 0..sphere_samples {
        let a = 2.0 * std::f64::consts::PI * i as f64 / sphere_samples as f64;
        let t = [a.cos(), a.sin()];
        for j in 1..8 {
            let ang = a_edge * j as f64 / 8.0;
            let xi = [ang.cos(), ang.sin()];
            let gp = phi_pair.grad_transpose_apply(&t, &xi)?;
            let lhs = dot(&gp, &gp);
            let rhs = 0.5 * xi[0] * xi[0] * (1.0 - rho_prime / rho) * l1(&g1, &t).powi(2);
            if lhs < rhs * (1.0 - 1e-9) {
                lower_bound_ok = false;
            }
        }
    }

    let certificate = if bounded {
        let mut c_l_max: f64 = 0.0;
        let mut theta = 1.0 - 1.0 / f64::from(k);
        for j in 1..10 {
            let ang = a_edge * j as f64 / 10.0;
            let xi = [ang.cos(), ang.sin()];
            let p_xi = phi_pair.dot(&xi)?;
            let hc = homogeneous_certificate(&p_xi, 2000, 0xC0DE + j as u64)?;
            c_l_max = c_l_max.max(hc.c_l);
            theta = hc.theta;
        }
        Some(StarCertificate {
            xi0: vec![1.0, 0.0],
            cone: cone.clone(),
            w0: BoxDomain::cube(2, 1.0)?,
            openness: Vec::new(),
            theta,
            c_l: c_l_max,
            method: CertMethod::ConeCriterion,
            evidence: Vec::new(),
            excluded_fraction: 0.0,
        })
    } else {
        None
    };

    Ok(ConeCriterionReport {
        holds: true,
        witness: None,
        degree: k,
        lower_bound_ok,
        certificate,
    })
}

/// The built-in counterexample structure: `phi = (-3 t1, (t1 t2 + 1) t1^3)`,
/// whose first integrals are `Z1 = x1 - 3 i t1`, `Z2 = x2 + i (t1 t2 + 1) t1^3`.
pub fn maire_phi() -> PolynomialMap {
    PolynomialMap::from_terms(
        2,
        vec![
            vec![(vec![1, 0], -3.0)],
            vec![(vec![3, 0], 1.0), (vec![4, 1], 1.0)],
        ],
    )
    .expect("static map is valid")
}

/// Diagnostic trace along the failure path of the counterexample.
#[derive(Debug, Clone)]
pub struct MaireDiagnostic {
    pub t1: Vec<f64>,
    /// `|phi(t) . xi|` along the path.
    pub lhs: Vec<f64>,
    /// `||t-d phi(t) xi||` along the path.
    pub grad_norm: Vec<f64>,
    /// Pointwise `log ||t-d phi xi|| / log |phi . xi|`.
    pub theta_pointwise: Vec<f64>,
    /// Slope of `log |phi.xi|` regressed on `log ||t-d phi xi||` (tends to 3/4).
    pub fitted_slope: f64,
    /// `1 / fitted_slope` (tends to 4/3): the exponent a Lojasiewicz
    /// inequality would need, outside `1/2 <= theta < 1`.
    pub theta_required: f64,
}

/// Walks the path `t = (t1, 0)`, `xi = (t1^2, sign)/sqrt(1 + t1^4)`, on which
/// the gradient degenerates to `(0, t1^4 xi2)` while `phi . xi ~ t1^3`.
pub fn maire_diagnostic(
    t1_lo: f64,
    t1_hi: f64,
    count: usize,
    sign: f64,
) -> Result<MaireDiagnostic, StarError> {
    if !(t1_lo > 0.0 && t1_hi <= 0.3 && t1_lo < t1_hi && count >= 10) {
        return Err(StarError::BadMaireRange);
    }
    let phi = maire_phi();
    let s = sign.signum();
    let mut t1s = Vec::with_capacity(count);
    let mut lhs = Vec::with_capacity(count);
    let mut gn = Vec::with_capacity(count);
    let mut theta_pw = Vec::with_capacity(count);
    for i in 0..count {
        let t1 = t1_lo * (t1_hi / t1_lo).powf(i as f64 / (count - 1) as f64);
        let t = [t1, 0.0];
        let scale = (1.0 + t1.powi(4)).sqrt();
        let xi = [s * t1 * t1 / scale, s / scale];
        let a = phi.dot(&xi)?.eval(&t)?.abs();
        let g = norm(&phi.grad_transpose_apply(&t, &xi)?);
        theta_pw.push(g.ln() / a.ln());
        t1s.push(t1);
        lhs.push(a);
        gn.push(g);
    }
    let xs: Vec<f64> = gn.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = lhs.iter().map(|v| v.ln()).collect();
    let (slope, _, _) = linear_fit(&xs, &ys);
    Ok(MaireDiagnostic {
        t1: t1s,
        lhs,
        grad_norm: gn,
        theta_pointwise: theta_pw,
        fitted_slope: slope,
        theta_required: 1.0 / slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly1(terms: Vec<(Vec<u32>, f64)>) -> SparsePoly {
        SparsePoly::new(1, terms).unwrap()
    }

    #[test]
    fn openness_linear_map() {
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![1], 1.0)]]).unwrap();
        let w0 = BoxDomain::cube(1, 1.0).unwrap();
        let v = check_openness(&phi, &[1.0], &w0, 9, 6).unwrap();
        assert!(matches!(v, Openness::Open { .. }), "{v:?}");
    }

    #[test]
    fn openness_square_local_minimum() {
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![2], 1.0)]]).unwrap();
        let w0 = BoxDomain::cube(1, 1.0).unwrap();
        let v = check_openness(&phi, &[1.0], &w0, 9, 6).unwrap();
        match v {
            Openness::NotOpen {
                witness_center,
                minimum,
                ..
            } => {
                assert!(witness_center[0].abs() < 1e-12);
                assert!(minimum);
            }
            other => panic!("expected NotOpen, got {other:?}"),
        }
    }

    #[test]
    fn openness_cubic_open() {
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![3], 1.0)]]).unwrap();
        let w0 = BoxDomain::cube(1, 1.0).unwrap();
        let v = check_openness(&phi, &[1.0], &w0, 9, 6).unwrap();
        assert!(matches!(v, Openness::Open { .. }), "{v:?}");
    }

    #[test]
    fn openness_sign_symmetry() {
        // phi.xi and (-phi).(-xi) are the same function.
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![2], 1.0)]]).unwrap();
        let neg = PolynomialMap::from_terms(1, vec![vec![(vec![2], -1.0)]]).unwrap();
        let w0 = BoxDomain::cube(1, 1.0).unwrap();
        let a = check_openness(&phi, &[1.0], &w0, 9, 6).unwrap();
        let b = check_openness(&neg, &[-1.0], &w0, 9, 6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lojasiewicz_radial_quadratic() {
        // phi.xi = -|t|^2: theta = 1/2, C_L = 1/2 exactly.
        let phi =
            PolynomialMap::from_terms(2, vec![vec![(vec![2, 0], -1.0), (vec![0, 2], -1.0)]])
                .unwrap();
        let cone = Cone::new(&[1.0], 0.2).unwrap();
        let w0 = BoxDomain::cube(2, 1.0).unwrap();
        let out = estimate_lojasiewicz(
            &phi,
            &cone,
            &w0,
            &default_theta_grid(),
            &LojaGrids::default(),
        )
        .unwrap();
        match out {
            LojaOutcome::Certificate(c) => {
                assert_eq!(c.theta, 0.5);
                assert!((c.c_l - 0.5).abs() < 1e-9, "C_L = {}", c.c_l);
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn lojasiewicz_cubic_hits_homogeneous_exponent() {
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![3], 1.0)]]).unwrap();
        let cone = Cone::new(&[1.0], 0.2).unwrap();
        let w0 = BoxDomain::cube(1, 1.0).unwrap();
        let out = estimate_lojasiewicz(
            &phi,
            &cone,
            &w0,
            &default_theta_grid(),
            &LojaGrids::default(),
        )
        .unwrap();
        match out {
            LojaOutcome::Certificate(c) => {
                assert!((c.theta - 2.0 / 3.0).abs() < 1e-12, "theta = {}", c.theta);
                assert!((c.c_l - 1.0 / 3.0).abs() < 1e-6, "C_L = {}", c.c_l);
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn lojasiewicz_maire_fails_with_four_thirds() {
        let phi = maire_phi();
        let cone = Cone::new(&[0.0, 1.0], 0.2).unwrap();
        let w0 = BoxDomain::cube(2, 0.3).unwrap();
        let out = estimate_lojasiewicz(
            &phi,
            &cone,
            &w0,
            &default_theta_grid(),
            &LojaGrids::default(),
        )
        .unwrap();
        match out {
            LojaOutcome::Failure { theta_required, .. } => {
                assert!(
                    (1.28..=1.38).contains(&theta_required),
                    "theta_required = {theta_required}"
                );
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn certificate_soundness_on_fresh_samples() {
        let phi =
            PolynomialMap::from_terms(2, vec![vec![(vec![2, 0], -1.0), (vec![0, 2], -1.0)]])
                .unwrap();
        let cone = Cone::new(&[1.0], 0.2).unwrap();
        let w0 = BoxDomain::cube(2, 1.0).unwrap();
        let out = estimate_lojasiewicz(
            &phi,
            &cone,
            &w0,
            &default_theta_grid(),
            &LojaGrids::default(),
        )
        .unwrap();
        let cert = match out {
            LojaOutcome::Certificate(c) => c,
            other => panic!("expected certificate, got {other:?}"),
        };
        let violations = cert.revalidate(&phi, 10_000, 1.05, 1e-9, 99).unwrap();
        assert_eq!(violations, 0);
    }

    #[test]
    fn homogeneous_certificate_cubic_closed_form() {
        // P = t^3: A = {|t| <= 3^(-1/2)}, C = 3^(-3/2), theta = 2/3.
        let p = poly1(vec![(vec![3], 1.0)]);
        let c = homogeneous_certificate(&p, 10_000, 7).unwrap();
        assert_eq!(c.degree, 3);
        assert!((c.theta - 2.0 / 3.0).abs() < 1e-15);
        let exact = 3.0f64.powf(-1.5);
        assert!(
            (c.c_sup - exact).abs() / exact < 0.02,
            "C = {}, exact = {exact}",
            c.c_sup
        );
        assert_eq!(c.validation_violations, 0);
    }

    #[test]
    fn homogeneous_certificate_saddle() {
        // P = t1^2 - t2^2: A = {|t| <= 1/2}, C = 1/4, theta = 1/2.
        let p = SparsePoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 2], -1.0)]).unwrap();
        let c = homogeneous_certificate(&p, 10_000, 8).unwrap();
        assert!((c.theta - 0.5).abs() < 1e-15);
        assert!((c.c_sup - 0.25).abs() < 0.01, "C = {}", c.c_sup);
        assert_eq!(c.validation_violations, 0);
    }

    #[test]
    fn homogeneous_certificate_unbounded_sublevel_stable_sup() {
        // P = t1^2 in two variables: A unbounded along t2, sup still 1/4.
        let p = SparsePoly::new(2, vec![(vec![2, 0], 1.0)]).unwrap();
        let c = homogeneous_certificate(&p, 10_000, 9).unwrap();
        assert!(c.unbounded_rays > 0);
        assert!((c.c_sup - 0.25).abs() < 0.01, "C = {}", c.c_sup);
        assert_eq!(c.validation_violations, 0);
    }

    #[test]
    fn cone_criterion_positive_example() {
        // phi1 = t1^2 + t2^2, phi2 = t1 t2, rho = 0.4:
        // 0.4 (|t1| + |t2|) <= 2 (|t1| + |t2|).
        let phi1 = SparsePoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap();
        let phi2 = SparsePoly::new(2, vec![(vec![1, 1], 1.0)]).unwrap();
        let rep = cone_criterion(&phi1, &phi2, 0.4, 0.2, 256).unwrap();
        assert!(rep.holds);
        assert!(rep.lower_bound_ok);
        let cert = rep.certificate.expect("bounded case certifies");
        assert!((cert.theta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cone_criterion_zero_phi2_any_rho() {
        let phi1 = SparsePoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap();
        let phi2 = SparsePoly::zero(2);
        let rep = cone_criterion(&phi1, &phi2, 0.9, 0.5, 128).unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn cone_criterion_failure_witness() {
        // phi1 = t1 t2, phi2 = t1^2 + t2^2, rho = 0.9 fails at (1, 0).
        let phi1 = SparsePoly::new(2, vec![(vec![1, 1], 1.0)]).unwrap();
        let phi2 = SparsePoly::new(2, vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap();
        let rep = cone_criterion(&phi1, &phi2, 0.9, 0.5, 256).unwrap();
        assert!(!rep.holds);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn maire_diagnostic_leading_orders() {
        let d = maire_diagnostic(1e-3, 1e-1, 24, 1.0).unwrap();
        // At t1 near 1e-2: |phi.xi| = 2 t1^3 / sqrt(1 + t1^4) and the
        // gradient norm is t1^4 / sqrt(1 + t1^4) exactly on the path.
        let i = d
            .t1
            .iter()
            .position(|&v| (v - 1e-2).abs() / 1e-2 < 0.25)
            .expect("sample near 1e-2");
        let scale = (1.0 + d.t1[i].powi(4)).sqrt();
        assert!((d.lhs[i] - 2.0 * d.t1[i].powi(3) / scale).abs() < 1e-12);
        assert!((d.grad_norm[i] - d.t1[i].powi(4) / scale).abs() < 1e-15);
    }

    #[test]
    fn maire_diagnostic_slope_and_symmetry() {
        let plus = maire_diagnostic(1e-3, 1e-1, 32, 1.0).unwrap();
        assert!(
            (plus.fitted_slope - 0.75).abs() <= 0.02,
            "slope = {}",
            plus.fitted_slope
        );
        assert!((plus.theta_required - 4.0 / 3.0).abs() <= 0.05);
        let minus = maire_diagnostic(1e-3, 1e-1, 32, -1.0).unwrap();
        assert!((plus.theta_required - minus.theta_required).abs() < 1e-9);
    }

    #[test]
    fn sigma_set_cubic_component_at_origin() {
        // phi = t^3, xi = 1: gradient 3 t^2 is below threshold only near 0.
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![3], 1.0)]]).unwrap();
        let w0 = BoxDomain::cube(1, 1.0).unwrap();
        let s = sigma_set(&phi, &[1.0], &w0, 101, 1e-2).unwrap();
        assert_eq!(s.component_count, 1);
        assert!(s.points.iter().all(|t| t[0].abs() < 0.1));
    }

    #[test]
    fn cone_membership() {
        let cone = Cone::new(&[0.0, 1.0], 0.3).unwrap();
        assert!(cone.contains(&[0.0, 5.0]));
        assert!(cone.contains(&[0.2, 1.0]));
        assert!(!cone.contains(&[1.0, 0.0]));
        assert!(!cone.contains(&[0.0, -1.0]));
    }
}
