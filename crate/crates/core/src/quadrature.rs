//! Gauss-Hermite quadrature for integrands of the form `e^{-x²} f(x)` on the
//! real line.
//!
//! Nodes are the eigenvalues of the symmetric Jacobi matrix of the Hermite
//! recurrence (implicit QL), polished by Newton steps on the normalized
//! Hermite functions; weights follow from the derivative at each node. Hermite
//! functions carry `e^{-z²/2}` so nothing overflows near the outer nodes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{Complex, Error, Real, Result};

const MAX_NODES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::Parameter {
                name: "quadrature nodes".into(),
                reason: format!("must be in 1..={MAX_NODES}, got {n}"),
            });
        }
        let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let mut nodes = tridiagonal_eigenvalues(vec![0.0; n], off);
        nodes.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        let mut weights = Vec::with_capacity(n);
        for z in nodes.iter_mut() {
            let mut pp = 0.0;
            for _ in 0..3 {
                let (p, d) = hermite_function_and_derivative(n, *z);
                pp = d;
                let step = p / d;
                *z -= step;
                if step.abs() <= 1e-16 * z.abs().max(1.0) {
                    break;
                }
            }
            weights.push(2.0 * (-*z * *z).exp() / (pp * pp));
        }
        // exact symmetry
        for k in 0..n / 2 {
            let z = 0.5 * (nodes[k] - nodes[n - 1 - k]);
            let w = 0.5 * (weights[k] + weights[n - 1 - k]);
            nodes[k] = z;
            nodes[n - 1 - k] = -z;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Shared rule for `n` nodes, built once per process.
    pub fn cached(n: usize) -> Result<Arc<Self>> {
        static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let rules = RULES.get_or_init(Default::default);
        if let Some(r) = rules.lock().expect("rule cache poisoned").get(&n) {
            return Ok(Arc::clone(r));
        }
        let rule = Arc::new(Self::new(n)?);
        rules.lock().expect("rule cache poisoned").insert(n, Arc::clone(&rule));
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ e^{-x²} f(x) dx`.
    pub fn integrate<T: Real, F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(T::lit(x)) * T::lit(w)).sum()
    }

    /// `∫ e^{-x²} f(x) dx` for complex-valued `f`.
    pub fn integrate_complex<T: Real, F: Fn(T) -> Complex<T>>(&self, f: F) -> Complex<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&x, &w)| acc + f(T::lit(x)) * T::lit(w))
    }
}

/// Normalized Hermite function `φ_n(z)` and the derivative
/// factor `sqrt(2n) φ_{n-1}(z)` used for Newton steps and weights.
fn hermite_function_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = std::f64::consts::PI.powf(-0.25) * (-0.5 * z * z).exp();
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Eigenvalues of a symmetric tridiagonal matrix (implicit QL with Wilkinson
/// shifts). `off[i]` couples rows `i` and `i + 1`.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    let mut e = off;
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}
