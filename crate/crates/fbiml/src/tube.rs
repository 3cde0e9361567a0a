//! Tube structures `Z(x,t) = x + i phi(t)` and their discrete machinery.
//!
//! The structure is spanned by `L_j = d/dt_j - i sum_k (d phi_k/d t_j) d/dx_k`
//! (tube form of the general first-integral frame, where `Z_x` is the
//! identity), so `L_j Z_k = 0` and exponentials of the first integrals are
//! exact solutions of the homogeneous system.

use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex64;
use thiserror::Error;

use crate::polymap::{PolyError, PolynomialMap};

#[derive(Debug, Error)]
pub enum TubeError {
    #[error("phi must vanish at the origin (constant terms present)")]
    PhiNotVanishing,
    #[error("box half-widths must be positive")]
    BadBox,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid needs at least 3 nodes per axis for derivatives, got {0}")]
    GridTooSmall(usize),
    #[error("vector field index {0} out of range")]
    BadFieldIndex(usize),
    #[error("covector (xi, eta) must be nonzero")]
    ZeroCovector,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Closed box `prod_i [-a_i, a_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    half_widths: Vec<f64>,
}

impl BoxDomain {
    pub fn new(half_widths: Vec<f64>) -> Result<Self, TubeError> {
        if half_widths.is_empty() || half_widths.iter().any(|&a| !(a > 0.0)) {
            return Err(TubeError::BadBox);
        }
        Ok(Self { half_widths })
    }

    /// Cube `[-a, a]^dim`.
    pub fn cube(dim: usize, a: f64) -> Result<Self, TubeError> {
        Self::new(vec![a; dim])
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.half_widths).all(|(x, a)| x.abs() <= *a)
    }

    /// `max_i (|p_i| - a_i)`: negative inside, zero on the boundary.
    pub fn boundary_excess(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.half_widths)
            .map(|(x, a)| x.abs() - a)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Radius of the largest origin-centered ball inside the box.
    pub fn inradius(&self) -> f64 {
        self.half_widths.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Uniform closed-grid coordinates with `n` nodes on each axis.
    pub fn axis_nodes(&self, axis: usize, n: usize) -> Vec<f64> {
        let a = self.half_widths[axis];
        if n == 1 {
            return vec![0.0];
        }
        let h = 2.0 * a / (n - 1) as f64;
        (0..n).map(|i| -a + h * i as f64).collect()
    }
}

/// A covector `(x, t; xi, eta)` over the product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

/// The tube structure: `phi` with `phi(0) = 0`, and the base boxes.
#[derive(Debug, Clone)]
pub struct TubeStructure {
    phi: PolynomialMap,
    v: BoxDomain,
    w: BoxDomain,
}

impl TubeStructure {
    pub fn new(phi: PolynomialMap, v: BoxDomain, w: BoxDomain) -> Result<Self, TubeError> {
        if !phi.vanishes_at_origin() {
            return Err(TubeError::PhiNotVanishing);
        }
        if v.dim() != phi.output_dim() {
            return Err(TubeError::DimensionMismatch {
                expected: phi.output_dim(),
                got: v.dim(),
            });
        }
        if w.dim() != phi.input_dim() {
            return Err(TubeError::DimensionMismatch {
                expected: phi.input_dim(),
                got: w.dim(),
            });
        }
        Ok(Self { phi, v, w })
    }

    pub fn phi(&self) -> &PolynomialMap {
        &self.phi
    }

    pub fn v(&self) -> &BoxDomain {
        &self.v
    }

    pub fn w(&self) -> &BoxDomain {
        &self.w
    }

    /// Number of `x` variables.
    pub fn m(&self) -> usize {
        self.phi.output_dim()
    }

    /// Number of `t` variables.
    pub fn n(&self) -> usize {
        self.phi.input_dim()
    }

    /// First integrals `Z(x,t) = x + i phi(t)` componentwise.
    pub fn first_integral(&self, x: &[f64], t: &[f64]) -> Result<Vec<Complex64>, TubeError> {
        if x.len() != self.m() {
            return Err(TubeError::DimensionMismatch {
                expected: self.m(),
                got: x.len(),
            });
        }
        let ph = self.phi.eval(t)?;
        Ok(x.iter()
            .zip(&ph)
            .map(|(&xk, &pk)| Complex64::new(xk, pk))
            .collect())
    }

    /// Characteristic-set membership of `(x, t, xi, eta)`: requires `eta = 0`
    /// and `t-d phi(t) xi = 0`, both up to `tol` relative to the covector.
    pub fn char_directions(&self, cov: &Covector, tol: f64) -> Result<bool, TubeError> {
        let norm_xi = norm(&cov.xi);
        let norm_eta = norm(&cov.eta);
        let total = (norm_xi * norm_xi + norm_eta * norm_eta).sqrt();
        if total == 0.0 {
            return Err(TubeError::ZeroCovector);
        }
        if norm_eta > tol * total || norm_xi == 0.0 {
            return Ok(false);
        }
        let g = self.phi.grad_transpose_apply(&cov.t, &cov.xi)?;
        Ok(norm(&g) <= tol * norm_xi)
    }

    /// Exact solution sample `e^{i zeta . Z(x,t)}` on the given grid.
    pub fn exponential_solution(
        &self,
        zeta: &[Complex64],
        grid: &GridSpec,
    ) -> Result<GridFunction, TubeError> {
        if zeta.len() != self.m() {
            return Err(TubeError::DimensionMismatch {
                expected: self.m(),
                got: zeta.len(),
            });
        }
        GridFunction::sample(self, grid, |x, t| {
            let z = self
                .first_integral(x, t)
                .expect("dimensions checked at sampling");
            let phase: Complex64 = zeta
                .iter()
                .zip(&z)
                .map(|(zk, wk)| Complex64::i() * zk * wk)
                .sum();
            phase.exp()
        })
    }

    /// Discrete `L_j u` with exact coefficients `d phi_k / d t_j` and
    /// second-order difference stencils (one-sided on the boundary).
    pub fn apply_l(&self, j: usize, u: &GridFunction) -> Result<GridFunction, TubeError> {
        if j >= self.n() {
            return Err(TubeError::BadFieldIndex(j));
        }
        for (axis, &c) in u.shape().iter().enumerate() {
            if c < 3 {
                let _ = axis;
                return Err(TubeError::GridTooSmall(c));
            }
        }
        let m = self.m();
        let t_axis = m + j;
        let mut out = axis_derivative(&u.values, t_axis, u.spacings[t_axis]);
        // Subtract i * sum_k dphi_k/dt_j (t) * d/dx_k u.
        let mut dx: Vec<ArrayD<Complex64>> = Vec::with_capacity(m);
        for k in 0..m {
            dx.push(axis_derivative(&u.values, k, u.spacings[k]));
        }
        let derivs: Vec<_> = (0..m).map(|k| self.phi.component_partial(k, j)).collect();
        let shape = u.shape().to_vec();
        let mut idx = vec![0usize; shape.len()];
        let mut t = vec![0.0; self.n()];
        loop {
            for (jj, tv) in t.iter_mut().enumerate() {
                *tv = u.axis_coord(m + jj, idx[m + jj]);
            }
            let here = IxDyn(&idx);
            let mut acc = out[&here];
            for k in 0..m {
                let c = derivs[k].eval(&t)?;
                acc -= Complex64::i() * c * dx[k][&here];
            }
            out[&here] = acc;
            if !increment(&mut idx, &shape) {
                break;
            }
        }
        Ok(GridFunction {
            values: out,
            origins: u.origins.clone(),
            spacings: u.spacings.clone(),
            m,
            mollified: u.mollified,
        })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn increment(idx: &mut [usize], shape: &[usize]) -> bool {
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

/// Node counts for a product grid over `V x W`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_nodes: Vec<usize>,
    pub t_nodes: Vec<usize>,
}

impl GridSpec {
    pub fn uniform(m: usize, n: usize, nodes: usize) -> Self {
        Self {
            x_nodes: vec![nodes; m],
            t_nodes: vec![nodes; n],
        }
    }
}

/// Complex samples of `u(x,t)` on a regular closed grid over `V x W`.
///
/// Axis order: the `m` x-axes first, then the `n` t-axes.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub values: ArrayD<Complex64>,
    origins: Vec<f64>,
    spacings: Vec<f64>,
    m: usize,
    /// Samples stand for a mollified distribution rather than a function.
    pub mollified: bool,
}

impl GridFunction {
    /// Samples `f(x, t)` on the product grid given by `spec`.
    pub fn sample(
        ts: &TubeStructure,
        spec: &GridSpec,
        f: impl Fn(&[f64], &[f64]) -> Complex64,
    ) -> Result<Self, TubeError> {
        if spec.x_nodes.len() != ts.m() || spec.t_nodes.len() != ts.n() {
            return Err(TubeError::DimensionMismatch {
                expected: ts.m() + ts.n(),
                got: spec.x_nodes.len() + spec.t_nodes.len(),
            });
        }
        let mut shape = Vec::with_capacity(ts.m() + ts.n());
        let mut origins = Vec::new();
        let mut spacings = Vec::new();
        for (axis, &c) in spec.x_nodes.iter().enumerate() {
            let a = ts.v().half_widths()[axis];
            shape.push(c);
            origins.push(-a);
            spacings.push(if c > 1 { 2.0 * a / (c - 1) as f64 } else { 1.0 });
        }
        for (axis, &c) in spec.t_nodes.iter().enumerate() {
            let b = ts.w().half_widths()[axis];
            shape.push(c);
            origins.push(-b);
            spacings.push(if c > 1 { 2.0 * b / (c - 1) as f64 } else { 1.0 });
        }
        let mut values = ArrayD::from_elem(IxDyn(&shape), Complex64::new(0.0, 0.0));
        let mut idx = vec![0usize; shape.len()];
        let mut x = vec![0.0; ts.m()];
        let mut t = vec![0.0; ts.n()];
        loop {
            for (k, xv) in x.iter_mut().enumerate() {
                *xv = origins[k] + spacings[k] * idx[k] as f64;
            }
            for (j, tv) in t.iter_mut().enumerate() {
                *tv = origins[ts.m() + j] + spacings[ts.m() + j] * idx[ts.m() + j] as f64;
            }
            values[IxDyn(&idx)] = f(&x, &t);
            if !increment(&mut idx, &shape) {
                break;
            }
        }
        Ok(Self {
            values,
            origins,
            spacings,
            m: ts.m(),
            mollified: false,
        })
    }

    pub fn shape(&self) -> &[usize] {
        self.values.shape()
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn x_dim(&self) -> usize {
        self.m
    }

    pub fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        self.origins[axis] + self.spacings[axis] * i as f64
    }

    /// Coordinates of every node along one axis.
    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        (0..self.shape()[axis]).map(|i| self.axis_coord(axis, i)).collect()
    }

    /// Max modulus over all nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max modulus over interior nodes (one boundary layer stripped per
    /// axis); boundary stencils are one-sided so residual norms exclude them.
    pub fn interior_max_abs(&self) -> f64 {
        let shape = self.shape().to_vec();
        let mut idx: Vec<usize> = shape.iter().map(|_| 1usize).collect();
        if shape.iter().any(|&c| c < 3) {
            return 0.0;
        }
        let mut best = 0.0f64;
        loop {
            best = best.max(self.values[IxDyn(&idx)].norm());
            // Odometer over the interior range [1, c-2] per axis.
            let mut d = idx.len();
            let mut done = true;
            while d > 0 {
                d -= 1;
                idx[d] += 1;
                if idx[d] <= shape[d] - 2 {
                    done = false;
                    break;
                }
                idx[d] = 1;
            }
            if done {
                return best;
            }
        }
    }

    /// Max modulus over nodes whose every coordinate satisfies
    /// `|coord| <= frac * half-width` (a refinement-stable window).
    pub fn max_abs_inner(&self, frac: f64) -> f64 {
        let shape = self.shape().to_vec();
        let mut idx = vec![0usize; shape.len()];
        let mut best = 0.0f64;
        loop {
            let inside = (0..shape.len()).all(|a| {
                let half = -self.origins[a];
                self.axis_coord(a, idx[a]).abs() <= frac * half + 1e-12
            });
            if inside {
                best = best.max(self.values[IxDyn(&idx)].norm());
            }
            if !increment(&mut idx, &shape) {
                return best;
            }
        }
    }
}

/// Second-order finite difference along `axis`: central in the interior,
/// one-sided (three-point) at the two boundary nodes.
fn axis_derivative(data: &ArrayD<Complex64>, axis: usize, h: f64) -> ArrayD<Complex64> {
    let mut out = data.clone();
    let n = data.shape()[axis];
    assert!(n >= 3, "axis too short for derivative stencil");
    let inv2h = 1.0 / (2.0 * h);
    for (lane, mut dst) in data
        .lanes(Axis(axis))
        .into_iter()
        .zip(out.lanes_mut(Axis(axis)))
    {
        dst[0] = (-lane[2] + lane[1] * 4.0 - lane[0] * 3.0) * inv2h;
        for i in 1..n - 1 {
            dst[i] = (lane[i + 1] - lane[i - 1]) * inv2h;
        }
        dst[n - 1] = (lane[n - 1] * 3.0 - lane[n - 2] * 4.0 + lane[n - 3]) * inv2h;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Rule1d;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn maire_structure() -> TubeStructure {
        // Z1 = x1 - 3 i t1, Z2 = x2 + i (t1 t2 + 1) t1^3, so phi1 = -3 t1.
        let phi = PolynomialMap::from_terms(
            2,
            vec![
                vec![(vec![1, 0], -3.0)],
                vec![(vec![3, 0], 1.0), (vec![4, 1], 1.0)],
            ],
        )
        .unwrap();
        TubeStructure::new(
            phi,
            BoxDomain::cube(2, 1.0).unwrap(),
            BoxDomain::cube(2, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn square_structure() -> TubeStructure {
        // m = n = 1, phi = t^2.
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![2], 1.0)]]).unwrap();
        TubeStructure::new(
            phi,
            BoxDomain::cube(1, 1.0).unwrap(),
            BoxDomain::cube(1, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn first_integral_at_t_zero_is_x() {
        let ts = maire_structure();
        let z = ts.first_integral(&[0.3, -0.8], &[0.0, 0.0]).unwrap();
        assert_eq!(z[0], Complex64::new(0.3, 0.0));
        assert_eq!(z[1], Complex64::new(-0.8, 0.0));
    }

    #[test]
    fn first_integral_maire_values() {
        let ts = maire_structure();
        let z = ts.first_integral(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(z[0], Complex64::new(0.0, -3.0));
        assert_eq!(z[1], Complex64::new(0.0, 2.0));
    }

    #[test]
    fn first_integral_square() {
        let ts = square_structure();
        let z = ts.first_integral(&[1.0], &[2.0]).unwrap();
        assert_eq!(z[0], Complex64::new(1.0, 4.0));
    }

    #[test]
    fn first_integral_additive_in_x() {
        let ts = maire_structure();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xp: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sum: Vec<f64> = x.iter().zip(&xp).map(|(a, b)| a + b).collect();
            let z1 = ts.first_integral(&sum, &t).unwrap();
            let z2 = ts.first_integral(&x, &t).unwrap();
            for k in 0..2 {
                let want = z2[k] + xp[k];
                assert!((z1[k] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn apply_l_kills_exponential_solutions_at_second_order() {
        let ts = square_structure();
        let zeta = [Complex64::new(0.7, -0.3)];
        let mut residuals = Vec::new();
        for nodes in [17, 33, 65] {
            let grid = GridSpec::uniform(1, 1, nodes);
            let u = ts.exponential_solution(&zeta, &grid).unwrap();
            let lu = ts.apply_l(0, &u).unwrap();
            residuals.push(lu.interior_max_abs());
        }
        let order1 = (residuals[0] / residuals[1]).log2();
        let order2 = (residuals[1] / residuals[2]).log2();
        assert!(
            (1.7..=2.3).contains(&order1) && (1.7..=2.3).contains(&order2),
            "observed orders {order1}, {order2}, residuals {residuals:?}"
        );
    }

    #[test]
    fn apply_l_random_structures_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..4 {
            let m = rng.gen_range(1..=2);
            let n = rng.gen_range(1..=2);
            let comps: Vec<Vec<(Vec<u32>, f64)>> = (0..m)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            let mut exps = vec![0u32; n];
                            // Total degree between 1 and 4 so phi(0) = 0.
                            let d = rng.gen_range(1..=4u32);
                            let mut left = d;
                            for e in exps.iter_mut().take(n - 1) {
                                let take = rng.gen_range(0..=left);
                                *e = take;
                                left -= take;
                            }
                            exps[n - 1] += left;
                            (exps, rng.gen_range(-0.5..0.5))
                        })
                        .collect()
                })
                .collect();
            let phi = PolynomialMap::from_terms(n, comps).unwrap();
            let ts = TubeStructure::new(
                phi,
                BoxDomain::cube(m, 0.7).unwrap(),
                BoxDomain::cube(n, 0.7).unwrap(),
            )
            .unwrap();
            let zeta: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let j = rng.gen_range(0..n);
            let mut residuals = Vec::new();
            for nodes in [9, 17, 33] {
                let u = ts
                    .exponential_solution(&zeta, &GridSpec::uniform(m, n, nodes))
                    .unwrap();
                let lu = ts.apply_l(j, &u).unwrap();
                residuals.push(lu.max_abs_inner(0.5));
            }
            let order = (residuals[0] / residuals[2]).log2() / 2.0;
            assert!(
                (1.7..=2.3).contains(&order),
                "observed order {order}, residuals {residuals:?}"
            );
        }
    }

    #[test]
    fn apply_l_linear_slice_exact() {
        // m = n = 1, phi = t^2, u = x: L u = -i phi'(t) = -2 i t exactly.
        let ts = square_structure();
        let u = GridFunction::sample(&ts, &GridSpec::uniform(1, 1, 9), |x, _| {
            Complex64::new(x[0], 0.0)
        })
        .unwrap();
        let lu = ts.apply_l(0, &u).unwrap();
        for it in 0..9 {
            let t = lu.axis_coord(1, it);
            for ix in 0..9 {
                let got = lu.values[IxDyn(&[ix, it])];
                let want = Complex64::new(0.0, -2.0 * t);
                assert!((got - want).norm() < 1e-12, "got {got}, want {want}");
            }
        }
    }

    #[test]
    fn apply_l_constant_is_zero() {
        let ts = maire_structure();
        let u = GridFunction::sample(&ts, &GridSpec::uniform(2, 2, 5), |_, _| {
            Complex64::new(1.0, 0.0)
        })
        .unwrap();
        for j in 0..2 {
            let lu = ts.apply_l(j, &u).unwrap();
            assert!(lu.max_abs() < 1e-13);
        }
    }

    #[test]
    fn exponential_solution_zero_frequency_constant() {
        let ts = square_structure();
        let u = ts
            .exponential_solution(&[Complex64::new(0.0, 0.0)], &GridSpec::uniform(1, 1, 5))
            .unwrap();
        for v in u.values.iter() {
            assert_eq!(*v, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn exponential_solution_magnitude() {
        // phi = -t^2, zeta = 1: |e^{i Z}| = e^{-phi(t)} = e^{t^2}.
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![2], -1.0)]]).unwrap();
        let ts = TubeStructure::new(
            phi,
            BoxDomain::cube(1, 1.0).unwrap(),
            BoxDomain::cube(1, 1.0).unwrap(),
        )
        .unwrap();
        let u = ts
            .exponential_solution(&[Complex64::new(1.0, 0.0)], &GridSpec::uniform(1, 1, 9))
            .unwrap();
        for it in 0..9 {
            let t = u.axis_coord(1, it);
            for ix in 0..9 {
                let got = u.values[IxDyn(&[ix, it])].norm();
                assert!((got - (t * t).exp()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn superposition_of_exponentials_matches_laplace_oracle() {
        // integral_0^inf e^{i xi Z} e^{-xi} d xi = i / (Z + i), checked by
        // quadrature against the closed form where |Z + i| > 0.5.
        let ts = square_structure();
        let rule = Rule1d::gl_panels(0.0, 45.0, 360, 8);
        let grid = GridSpec::uniform(1, 1, 9);
        let u = GridFunction::sample(&ts, &grid, |x, t| {
            let z = ts.first_integral(x, t).unwrap()[0];
            rule.integrate_complex(|s| (Complex64::i() * s * z - s).exp())
        })
        .unwrap();
        for ix in 0..9 {
            for it in 0..9 {
                let x = u.axis_coord(0, ix);
                let t = u.axis_coord(1, it);
                let z = ts.first_integral(&[x], &[t]).unwrap()[0];
                if (z + Complex64::i()).norm() <= 0.5 {
                    continue;
                }
                let exact = Complex64::i() / (z + Complex64::i());
                let got = u.values[IxDyn(&[ix, it])];
                assert!(
                    (got - exact).norm() / exact.norm() < 1e-8,
                    "z={z}, got={got}, exact={exact}"
                );
            }
        }
    }

    #[test]
    fn char_directions_basic() {
        let ts = square_structure();
        // d phi(0) = 0, so (xi, 0) at t = 0 is characteristic.
        let cov = Covector {
            x: vec![0.0],
            t: vec![0.0],
            xi: vec![1.0],
            eta: vec![0.0],
        };
        assert!(ts.char_directions(&cov, 1e-12).unwrap());
        // eta must vanish.
        let cov = Covector {
            x: vec![0.0],
            t: vec![0.0],
            xi: vec![0.0],
            eta: vec![1.0],
        };
        assert!(!ts.char_directions(&cov, 1e-12).unwrap());
        // Zero covector errors.
        let cov = Covector {
            x: vec![0.0],
            t: vec![0.0],
            xi: vec![0.0],
            eta: vec![0.0],
        };
        assert!(matches!(
            ts.char_directions(&cov, 1e-12),
            Err(TubeError::ZeroCovector)
        ));
    }

    #[test]
    fn char_directions_maire_off_characteristic() {
        let ts = maire_structure();
        let cov = Covector {
            x: vec![0.0, 0.0],
            t: vec![1.0, 0.0],
            xi: vec![1.0, 0.0],
            eta: vec![0.0, 0.0],
        };
        // t-d phi xi = (-3, 0) != 0 here.
        assert!(!ts.char_directions(&cov, 1e-12).unwrap());
    }

    #[test]
    fn char_directions_exact_polynomial_zero_any_x() {
        let ts = square_structure();
        for x in [-0.9, 0.0, 0.4] {
            let cov = Covector {
                x: vec![x],
                t: vec![0.0],
                xi: vec![2.0],
                eta: vec![0.0],
            };
            assert!(ts.char_directions(&cov, 1e-12).unwrap());
        }
    }

    #[test]
    fn rejects_phi_not_vanishing() {
        let phi = PolynomialMap::from_terms(1, vec![vec![(vec![0], 1.0)]]).unwrap();
        assert!(matches!(
            TubeStructure::new(
                phi,
                BoxDomain::cube(1, 1.0).unwrap(),
                BoxDomain::cube(1, 1.0).unwrap()
            ),
            Err(TubeError::PhiNotVanishing)
        ));
    }
}
