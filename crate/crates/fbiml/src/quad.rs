//! Quadrature primitives shared by the transform code and the test oracles.

use num_complex::Complex64;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A 1-D quadrature rule as explicit nodes and weights.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// Uniform trapezoid rule with `n >= 2` nodes on `[a, b]`.
    pub fn trapezoid(a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 2 && b > a);
        let h = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| a + h * i as f64).collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Self { nodes, weights }
    }

    /// Midpoint rule with `n` cells on `[a, b]`; never places a node on the
    /// endpoints (used for frequency grids that must avoid `xi = 0`).
    pub fn midpoint(a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 1 && b > a);
        let h = (b - a) / n as f64;
        let nodes = (0..n).map(|i| a + h * (i as f64 + 0.5)).collect();
        Self {
            nodes,
            weights: vec![h; n],
        }
    }

    /// Composite Gauss-Legendre: `panels` equal panels of `order` points each.
    pub fn gl_panels(a: f64, b: f64, panels: usize, order: usize) -> Self {
        assert!(panels >= 1 && b > a);
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        let w = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + w * p as f64;
            let c = lo + 0.5 * w;
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(c + 0.5 * w * x);
                weights.push(0.5 * w * wt);
            }
        }
        Self { nodes, weights }
    }

    /// Gauss-Legendre panels graded geometrically toward `pole`: panel edges
    /// accumulate at distance `inner` from the pole so integrands with a
    /// near-singularity at `pole` are resolved. `pole` may lie outside
    /// `[a, b]`, in which case this reduces to mild grading toward the
    /// nearest endpoint.
    pub fn graded_panels(a: f64, b: f64, pole: f64, inner: f64, order: usize) -> Self {
        assert!(b > a && inner > 0.0);
        let mut edges = vec![a, b];
        let span = b - a;
        let mut d = span;
        while d > inner {
            d *= 0.5;
            for s in [-1.0, 1.0] {
                let e = pole + s * d;
                if e > a && e < b {
                    edges.push(e);
                }
            }
        }
        edges.sort_by(|p, q| p.partial_cmp(q).unwrap());
        edges.dedup_by(|p, q| (*p - *q).abs() < 1e-300);
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for win in edges.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let w = hi - lo;
            if w <= 0.0 {
                continue;
            }
            let c = 0.5 * (lo + hi);
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(c + 0.5 * w * x);
                weights.push(0.5 * w * wt);
            }
        }
        Self { nodes, weights }
    }

    /// Symmetric frequency rule on `[-ximax, ximax]`: geometric
    /// Gauss-Legendre panels from `inner` out to `2` resolve the
    /// small-frequency structure of inversion integrands, uniform panels of
    /// `panel_width` cover the rest. No node sits at zero.
    pub fn hybrid_frequency(ximax: f64, inner: f64, panel_width: f64, order: usize) -> Self {
        assert!(ximax > inner && inner > 0.0 && panel_width > 0.0);
        let mut edges = vec![0.0];
        let mut d = inner;
        while d < 2.0f64.min(ximax) {
            edges.push(d);
            d *= 2.0;
        }
        let mut d = *edges.last().unwrap();
        while d < ximax {
            d = (d + panel_width).min(ximax);
            edges.push(d);
        }
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for win in edges.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(c + h * x);
                weights.push(h * w);
            }
        }
        let mut all_nodes: Vec<f64> = nodes.iter().rev().map(|x| -x).collect();
        let mut all_weights: Vec<f64> = weights.iter().rev().copied().collect();
        all_nodes.extend(&nodes);
        all_weights.extend(&weights);
        Self {
            nodes: all_nodes,
            weights: all_weights,
        }
    }

    /// Trapezoid core on `[-core_half, core_half]` extended by geometric
    /// Gauss-Legendre side panels out to `l_max` (for integrands whose
    /// support leaks slowly past the core box).
    pub fn extended_trapezoid(core_half: f64, core_nodes: usize, l_max: f64, order: usize) -> Self {
        let mut rule = Self::trapezoid(-core_half, core_half, core_nodes);
        if l_max > core_half * 1.02 {
            let (gx, gw) = gauss_legendre(order);
            let mut edges = vec![core_half];
            let mut d = core_half;
            while d < l_max {
                d = (d * 1.8 + 0.2 * core_half).min(l_max);
                edges.push(d);
            }
            for win in edges.windows(2) {
                let c = 0.5 * (win[0] + win[1]);
                let h = 0.5 * (win[1] - win[0]);
                for (x, w) in gx.iter().zip(&gw) {
                    for s in [1.0, -1.0] {
                        rule.nodes.push(s * (c + h * x));
                        rule.weights.push(h * w);
                    }
                }
            }
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate_complex(&self, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }
}

/// Product rule over `m` axes; iterates the full tensor grid.
#[derive(Debug, Clone)]
pub struct ProductRule {
    pub axes: Vec<Rule1d>,
}

impl ProductRule {
    pub fn new(axes: Vec<Rule1d>) -> Self {
        assert!(!axes.is_empty());
        Self { axes }
    }

    pub fn total_points(&self) -> usize {
        self.axes.iter().map(Rule1d::len).product()
    }

    /// Integrates a complex-valued function of the point coordinates.
    pub fn integrate_complex(&self, mut f: impl FnMut(&[f64]) -> Complex64) -> Complex64 {
        let dims: Vec<usize> = self.axes.iter().map(Rule1d::len).collect();
        let mut idx = vec![0usize; dims.len()];
        let mut point = vec![0.0; dims.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        loop {
            let mut w = 1.0;
            for (d, &i) in idx.iter().enumerate() {
                point[d] = self.axes[d].nodes[i];
                w *= self.axes[d].weights[i];
            }
            acc += f(&point) * w;
            // Odometer increment.
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
}

/// Richardson extrapolation of `f(eps_k) -> lim f` assuming an error
/// expansion in integer powers of `eps` and a geometric sequence
/// `eps_k = eps_0 * ratio^-k`. Returns the extrapolated limit.
pub fn richardson_extrapolate(values: &[Complex64], ratio: f64) -> Complex64 {
    assert!(!values.is_empty() && ratio > 1.0);
    let mut table: Vec<Complex64> = values.to_vec();
    let n = table.len();
    for j in 1..n {
        let factor = ratio.powi(j as i32);
        for i in 0..(n - j) {
            table[i] = (table[i + 1] * factor - table[i]) / (factor - 1.0);
        }
    }
    table[0]
}

/// Neville polynomial extrapolation of `(xs_i, ys_i)` to `x = 0`; the
/// general form of Richardson for non-geometric step sequences.
pub fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut table: Vec<Complex64> = ys.to_vec();
    let n = table.len();
    for j in 1..n {
        for i in 0..(n - j) {
            let (xi, xj) = (xs[i], xs[i + j]);
            table[i] = (table[i + 1] * xi - table[i] * xj) / (xi - xj);
        }
    }
    table[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n-point GL is exact through degree 2n-1.
        let rule = Rule1d::gl_panels(-1.0, 1.0, 1, 8);
        let exact = 2.0 / 16.0; // integral of x^15 is 0; x^14/15*2... use x^14
        let got = rule.integrate(|x| x.powi(14));
        assert!((got - 2.0 / 15.0).abs() < 1e-14, "got {got}");
        let got_odd = rule.integrate(|x| x.powi(15));
        assert!(got_odd.abs() < 1e-15);
        let _ = exact;
    }

    #[test]
    fn trapezoid_second_order() {
        let coarse = Rule1d::trapezoid(0.0, 1.0, 65).integrate(|x| (3.0 * x).sin());
        let fine = Rule1d::trapezoid(0.0, 1.0, 129).integrate(|x| (3.0 * x).sin());
        let exact = (1.0 - (3.0f64).cos()) / 3.0;
        let r = (coarse - exact).abs() / (fine - exact).abs();
        assert!((r - 4.0).abs() < 0.3, "convergence ratio {r}");
    }

    #[test]
    fn graded_panels_resolve_near_pole() {
        // Integral of 1/(x^2 + d^2) over [-1, 1] = 2 atan(1/d)/d.
        let d = 1e-4;
        let rule = Rule1d::graded_panels(-1.0, 1.0, 0.0, d, 16);
        let got = rule.integrate(|x| 1.0 / (x * x + d * d));
        let exact = 2.0 * (1.0 / d).atan() / d;
        assert!((got - exact).abs() / exact < 1e-10, "got {got}, exact {exact}");
    }

    #[test]
    fn midpoint_avoids_endpoints() {
        let rule = Rule1d::midpoint(-2.0, 2.0, 8);
        assert!(rule.nodes.iter().all(|&x| x != 0.0 && x.abs() < 2.0));
        let got = rule.integrate(|x| x * x);
        assert!((got - 16.0 / 3.0).abs() < 0.1);
    }

    #[test]
    fn product_rule_matches_separable_integral() {
        let r = ProductRule::new(vec![
            Rule1d::gl_panels(0.0, 1.0, 2, 8),
            Rule1d::gl_panels(0.0, 2.0, 2, 8),
        ]);
        let got = r.integrate_complex(|p| Complex64::new(p[0] * p[1] * p[1], 0.0));
        assert!((got.re - 0.5 * 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_removes_geometric_error() {
        // f(eps) = 1 + 3 eps + 2 eps^2 with eps_k = 4^-k.
        let values: Vec<Complex64> = (0..5)
            .map(|k| {
                let e = 0.25f64.powi(k);
                Complex64::new(1.0 + 3.0 * e + 2.0 * e * e, 0.0)
            })
            .collect();
        let lim = richardson_extrapolate(&values, 4.0);
        assert!((lim.re - 1.0).abs() < 1e-12);
    }
}
