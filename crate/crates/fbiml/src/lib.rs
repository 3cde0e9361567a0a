//! Numerical microlocal analysis for real-analytic tube structures.
//!
//! The crate builds tube locally integrable structures `Z(x,t) = x + i phi(t)`
//! from sparse polynomial maps, evaluates the adapted partial F.B.I. transform
//! and its kappa-variant by oscillatory-Gaussian quadrature, classifies the
//! decay of the transform along frequency cones (smooth / Gevrey-s /
//! singular), certifies the hypoellipticity condition combining openness of
//! `t -> phi(t).xi` with a parametric Lojasiewicz inequality, and constructs
//! the normalized gradient-flow descent curves together with their
//! quantitative decrease bounds.
//!
//! Modules follow the pipeline:
//!
//! * [`polymap`] — exact sparse multivariate polynomial maps and gradients;
//! * [`tube`] — tube structures, grid samples, discrete vector fields `L_j`;
//! * [`quad`] — quadrature rules shared by the transform and the tests;
//! * [`ode`] — adaptive Runge-Kutta with event detection;
//! * [`fbi`] — the partial F.B.I. transforms, inversion and decay fitting;
//! * [`star`] — openness checks and Lojasiewicz certificates;
//! * [`curves`] — descent-curve construction and decrease verification;
//! * [`report`] — deterministic JSON/CSV emission;
//! * [`cli`] — the `fbiml` command-line surface.

pub mod cli;
pub mod curves;
pub mod fbi;
pub mod ode;
pub mod polymap;
pub mod quad;
pub mod report;
pub mod star;
pub mod tube;
pub(crate) mod util;

pub use polymap::{HomogeneityReport, PolynomialMap};
pub use tube::{BoxDomain, Covector, GridFunction, TubeStructure};
