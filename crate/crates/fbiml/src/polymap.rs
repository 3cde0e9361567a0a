//! Sparse multivariate polynomial maps `phi : R^n -> R^m`.
//!
//! Every component is a list of `(multi-index, coefficient)` monomials kept in
//! graded lexicographic order, so evaluation and differentiation are exact
//! (up to floating rounding) and the summation order is reproducible.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("monomial exponent list has length {got}, expected {expected}")]
    BadExponents { expected: usize, got: usize },
    #[error("coefficient is not finite")]
    NonFiniteCoefficient,
}

/// One monomial `c * t^e` of a sparse polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Graded lexicographic order: total degree first, then lexicographic.
fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// A single sparse polynomial in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    n: usize,
    terms: Vec<Monomial>,
}

impl SparsePoly {
    /// Builds a polynomial from raw `(exponents, coefficient)` pairs.
    /// Duplicate multi-indices are merged; exact-zero coefficients dropped.
    pub fn new(n: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self, PolyError> {
        let mut monos = Vec::with_capacity(terms.len());
        for (exponents, coefficient) in terms {
            if exponents.len() != n {
                return Err(PolyError::BadExponents {
                    expected: n,
                    got: exponents.len(),
                });
            }
            if !coefficient.is_finite() {
                return Err(PolyError::NonFiniteCoefficient);
            }
            monos.push(Monomial {
                exponents,
                coefficient,
            });
        }
        monos.sort_by(|a, b| grlex(&a.exponents, &b.exponents));
        let mut merged: Vec<Monomial> = Vec::with_capacity(monos.len());
        for m in monos {
            match merged.last_mut() {
                Some(last) if last.exponents == m.exponents => {
                    last.coefficient += m.coefficient;
                }
                _ => merged.push(m),
            }
        }
        merged.retain(|m| m.coefficient != 0.0);
        Ok(Self { n, terms: merged })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common total degree when every monomial shares one, `None` for a
    /// mixed-degree or zero polynomial (the zero polynomial is compatible
    /// with any degree, which `PolynomialMap::homogeneity` accounts for).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for m in &self.terms {
            let d = m.total_degree();
            match deg {
                None => deg = Some(d),
                Some(k) if k != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Direct monomial-sum evaluation in graded-lex order.
    pub fn eval(&self, t: &[f64]) -> Result<f64, PolyError> {
        if t.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: t.len(),
            });
        }
        let mut acc = 0.0;
        for m in &self.terms {
            let mut v = m.coefficient;
            for (ti, &e) in t.iter().zip(&m.exponents) {
                if e > 0 {
                    v *= ti.powi(e as i32);
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Exact partial derivative with respect to variable `j`.
    pub fn partial(&self, j: usize) -> SparsePoly {
        assert!(j < self.n, "variable index out of range");
        let mut terms = Vec::new();
        for m in &self.terms {
            let e = m.exponents[j];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents.clone();
            exps[j] = e - 1;
            terms.push((exps, m.coefficient * f64::from(e)));
        }
        SparsePoly::new(self.n, terms).expect("derivative of valid poly is valid")
    }

    /// Gradient as `n` sparse polynomials.
    pub fn gradient(&self) -> Vec<SparsePoly> {
        (0..self.n).map(|j| self.partial(j)).collect()
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms.iter().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Sums `ai * pi` over pairs, for building `phi(t).xi` forms.
    pub fn linear_combination(polys: &[SparsePoly], weights: &[f64]) -> SparsePoly {
        assert_eq!(polys.len(), weights.len());
        assert!(!polys.is_empty());
        let n = polys[0].n;
        let mut terms = Vec::new();
        for (p, &w) in polys.iter().zip(weights) {
            for m in &p.terms {
                terms.push((m.exponents.clone(), m.coefficient * w));
            }
        }
        SparsePoly::new(n, terms).expect("combination of valid polys is valid")
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", m.coefficient)?;
            for (j, &e) in m.exponents.iter().enumerate() {
                if e > 0 {
                    write!(f, "*t{}^{}", j + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// Joint homogeneity report for a polynomial map.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityReport {
    /// Per-component verdict (zero components are compatible with any degree).
    pub per_component: Vec<bool>,
    /// All components homogeneous of one common degree.
    pub jointly: bool,
    /// The common degree when `jointly` holds and the map is not identically
    /// zero.
    pub degree: Option<u32>,
}

/// A polynomial map `phi : R^n -> R^m` with `m` sparse components.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    n: usize,
    m: usize,
    components: Vec<SparsePoly>,
}

impl PolynomialMap {
    pub fn new(n: usize, components: Vec<SparsePoly>) -> Result<Self, PolyError> {
        let m = components.len();
        for c in &components {
            if c.n != n {
                return Err(PolyError::DimensionMismatch {
                    expected: n,
                    got: c.n,
                });
            }
        }
        Ok(Self { n, m, components })
    }

    /// Convenience constructor from raw term lists, one per component.
    pub fn from_terms(n: usize, comps: Vec<Vec<(Vec<u32>, f64)>>) -> Result<Self, PolyError> {
        let components = comps
            .into_iter()
            .map(|terms| SparsePoly::new(n, terms))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, components)
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    pub fn components(&self) -> &[SparsePoly] {
        &self.components
    }

    /// True when every component has zero constant term, i.e. `phi(0) = 0`.
    pub fn vanishes_at_origin(&self) -> bool {
        self.components.iter().all(|c| {
            c.terms
                .iter()
                .all(|m| m.total_degree() > 0 || m.coefficient == 0.0)
        })
    }

    pub fn eval(&self, t: &[f64]) -> Result<Vec<f64>, PolyError> {
        self.components.iter().map(|c| c.eval(t)).collect()
    }

    /// Applies the transposed Jacobian: returns the vector with entries
    /// `d/dt_j (phi(t) . xi)`, differentiated exactly.
    pub fn grad_transpose_apply(&self, t: &[f64], xi: &[f64]) -> Result<Vec<f64>, PolyError> {
        if t.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: t.len(),
            });
        }
        if xi.len() != self.m {
            return Err(PolyError::DimensionMismatch {
                expected: self.m,
                got: xi.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        for (k, comp) in self.components.iter().enumerate() {
            if xi[k] == 0.0 {
                continue;
            }
            for m in &comp.terms {
                for j in 0..self.n {
                    let e = m.exponents[j];
                    if e == 0 {
                        continue;
                    }
                    let mut v = m.coefficient * f64::from(e) * xi[k];
                    for (i, &ei) in m.exponents.iter().enumerate() {
                        let p = if i == j { ei - 1 } else { ei };
                        if p > 0 {
                            v *= t[i].powi(p as i32);
                        }
                    }
                    out[j] += v;
                }
            }
        }
        Ok(out)
    }

    /// The scalar polynomial `t -> phi(t) . xi`.
    pub fn dot(&self, xi: &[f64]) -> Result<SparsePoly, PolyError> {
        if xi.len() != self.m {
            return Err(PolyError::DimensionMismatch {
                expected: self.m,
                got: xi.len(),
            });
        }
        Ok(SparsePoly::linear_combination(&self.components, xi))
    }

    /// Partial derivative `d phi_k / d t_j` as a sparse polynomial.
    pub fn component_partial(&self, k: usize, j: usize) -> SparsePoly {
        self.components[k].partial(j)
    }

    /// The Jacobian matrix `d phi(t)` evaluated at `t` (`m` rows, `n` cols).
    pub fn jacobian(&self, t: &[f64]) -> Result<Vec<Vec<f64>>, PolyError> {
        let mut rows = Vec::with_capacity(self.m);
        for k in 0..self.m {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                row.push(self.components[k].partial(j).eval(t)?);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Joint homogeneity detection. A zero component is compatible with any
    /// degree; the joint degree is the common degree of the nonzero ones.
    pub fn homogeneity(&self) -> HomogeneityReport {
        let mut per_component = Vec::with_capacity(self.m);
        let mut joint_degree: Option<u32> = None;
        let mut jointly = true;
        for c in &self.components {
            if c.is_zero() {
                per_component.push(true);
                continue;
            }
            match c.homogeneous_degree() {
                Some(d) => {
                    per_component.push(true);
                    match joint_degree {
                        None => joint_degree = Some(d),
                        Some(k) if k != d => jointly = false,
                        _ => {}
                    }
                }
                None => {
                    per_component.push(false);
                    jointly = false;
                }
            }
        }
        HomogeneityReport {
            per_component,
            jointly,
            degree: if jointly { joint_degree } else { None },
        }
    }
}
