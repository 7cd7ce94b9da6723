//! Caldirola-Kanai treatment of the coupled-oscillator Schrödinger equation:
//! diagonalizing constants, the linear spectrum, separated eigenfunctions,
//! the Fourier (ξ-integral) form of the joint wavefunction, and evolution of
//! finite superpositions.
//!
//! Two symbols are overloaded in the source formulas and renamed here: the
//! energy factor `S` becomes `s_e` and the wavefunction width `S` becomes
//! `s_w` (with `R` becoming `r_w`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::quadrature::GaussHermite;
use crate::special_fn::{hermite_unchecked, ho_unchecked, OscillatorIndex};
use crate::{Complex, Error, Real, Result};

/// Sign selector for the `±`/`∓` pairs in `α`, `γ`, `G` and `S_e`.
/// `Plus` takes the upper signs, `Minus` the lower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CkInputs<T> {
    /// Frequency of the classical information, rad/s.
    pub omega: T,
    /// Oscillator frequency, rad/s.
    pub omega_c: T,
    /// Quantization amount `V` of the classical information.
    pub quantization: T,
    /// `None` picks the first branch with `G >= 0` and `S_e >= 0`.
    pub branch: Option<Branch>,
}

impl<T: Real> CkInputs<T> {
    pub fn new(omega: T, omega_c: T, quantization: T) -> Self {
        Self { omega, omega_c, quantization, branch: None }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = Some(branch);
        self
    }

    /// `β = sqrt(4π / (ω V))`.
    pub fn beta(&self) -> T {
        (T::lit(4.0) * T::PI() / (self.omega * self.quantization)).sqrt()
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("omega", self.omega), ("omega_c", self.omega_c), ("quantization", self.quantization)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Parameter { name: name.into(), reason: "must be positive and finite".into() });
            }
        }
        if !(self.beta() > T::lit(1e-9)) {
            return Err(Error::Parameter {
                name: "quantization".into(),
                reason: "beta = sqrt(4π/(ωV)) must exceed 1e-9".into(),
            });
        }
        Ok(())
    }
}

/// Derived constants. Serializes to the JSON dump including inputs and branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CkParams<T> {
    pub inputs: CkInputs<T>,
    pub branch: Branch,
    pub beta: T,
    pub alpha: T,
    pub gamma: T,
    pub epsilon: T,
    pub lambda: T,
    pub sigma: T,
    pub kappa: T,
    /// `sqrt(1 / (σ κ))`.
    pub r_w: T,
    /// `sqrt(Λ / σ)`.
    pub s_w: T,
    /// Energy factor on the `ω_c` ladder.
    pub g: T,
    /// Energy factor on the `ω` ladder.
    pub s_e: T,
}

impl<T: Real + Serialize> CkParams<T> {
    /// Pretty JSON with every derived constant, the inputs and the branch.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

fn derive_on_branch<T: Real>(inp: &CkInputs<T>, branch: Branch) -> Result<CkParams<T>> {
    let (w, wc) = (inp.omega, inp.omega_c);
    let beta = inp.beta();
    let two = T::lit(2.0);
    let sw = w.sqrt();
    let swc = wc.sqrt();
    let epsilon = (w * w - wc * wc + beta * beta * w) / (two * beta * sw * wc);
    let root = (epsilon * epsilon + T::one()).sqrt();
    let pm: T = branch.sign();
    let alpha = (wc / w).sqrt() * (epsilon + pm * root);
    let gamma = pm * T::lit(0.5) * (w / wc).sqrt() / root;
    let lambda = T::one() + alpha * alpha * wc / w - two * beta * alpha * swc / w + beta * beta / w;
    let sigma = (T::one() + alpha * alpha * w / wc).recip();
    let kappa =
        sigma + two * beta * epsilon * gamma * gamma / sw - (two * beta * gamma / swc) * (T::one() + alpha * gamma);
    if !(kappa > T::zero() && lambda > T::zero()) {
        return Err(Error::NonDiagonalizable { kappa: kappa.as_f64(), lambda: lambda.as_f64() });
    }
    // ∓ takes the opposite sign of ±
    let mp = -pm;
    let g = mp * beta * sw / (two * sigma * wc * root);
    let s_e = T::one() - (beta * wc / (w * sw)) * (epsilon + mp * root) + beta * beta / w;
    Ok(CkParams {
        inputs: CkInputs { branch: Some(branch), ..*inp },
        branch,
        beta,
        alpha,
        gamma,
        epsilon,
        lambda,
        sigma,
        kappa,
        r_w: (sigma * kappa).recip().sqrt(),
        s_w: (lambda / sigma).sqrt(),
        g,
        s_e,
    })
}

fn spectrum_check<T: Real>(p: &CkParams<T>) -> Result<()> {
    for (factor, v) in [("G", p.g), ("S_e", p.s_e)] {
        if v < T::zero() {
            return Err(Error::Branch { factor, value: v.as_f64(), branch: p.branch.symbol() });
        }
    }
    Ok(())
}

/// Derives all constants on the requested branch, or on the first branch
/// whose spectrum factors are nonnegative when no branch is given. Fails with
/// [`Error::NonDiagonalizable`] when `κ <= 0` or `Λ <= 0`.
pub fn derive_ck_params<T: Real>(inputs: &CkInputs<T>) -> Result<CkParams<T>> {
    inputs.validate()?;
    if let Some(b) = inputs.branch {
        return derive_on_branch(inputs, b);
    }
    let mut last = None;
    for b in [Branch::Plus, Branch::Minus] {
        match derive_on_branch(inputs, b).and_then(|p| spectrum_check(&p).map(|_| p)) {
            Ok(p) => return Ok(p),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("two branches tried"))
}

/// `ε_{n1,n2} = ω_c (n2 + ½) sqrt(G) + ω (n1 + ½) sqrt(S_e)`.
pub fn energy_level<T: Real>(n1: OscillatorIndex, n2: OscillatorIndex, p: &CkParams<T>) -> Result<T> {
    spectrum_check(p)?;
    let half = T::lit(0.5);
    Ok(p.inputs.omega_c * (T::from_usize_lossy(n2.get()) + half) * p.g.sqrt()
        + p.inputs.omega * (T::from_usize_lossy(n1.get()) + half) * p.s_e.sqrt())
}

/// One separated factor `C_n e^{-a q²/2} H_n(q sqrt(a))` with
/// `C_n = a^{1/4} / sqrt(2^n n! sqrt(π))`.
fn width_factor<T: Real>(n: usize, q: T, width: T) -> T {
    width.powf(T::lit(0.25)) * ho_unchecked(n, width.sqrt() * q)
}

fn check_widths<T: Real>(p: &CkParams<T>) -> Result<()> {
    if !(p.r_w > T::zero() && p.s_w > T::zero()) {
        return Err(Error::Parameter { name: "r_w/s_w".into(), reason: "wavefunction widths must be positive".into() });
    }
    Ok(())
}

/// `ψ'_{n1,n2}(x, η) = ψ'_{n2}(x) ψ'_{n1}(η)`, widths `r_w` in `x` and `s_w` in `η`.
pub fn ck_wavefunction<T: Real>(n1: OscillatorIndex, n2: OscillatorIndex, x: T, eta: T, p: &CkParams<T>) -> Result<T> {
    check_widths(p)?;
    if !(x.is_finite() && eta.is_finite()) {
        return Err(Error::Domain { func: "ck_wavefunction" });
    }
    Ok(width_factor(n2.get(), x, p.r_w) * width_factor(n1.get(), eta, p.s_w))
}

/// Gauss-Hermite settings for [`ck_joint_wavefunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Base node count (>= 64); the result is checked against twice as many.
    pub nodes: usize,
    /// Largest accepted relative change on node doubling.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: 64, tolerance: 1e-6 }
    }
}

fn normalization<T: Real>(n: usize, width: T) -> T {
    let mut log = T::zero();
    for k in 1..=n {
        log += T::from_usize_lossy(2 * k).ln();
    }
    width.powf(T::lit(0.25)) / (log.exp() * T::PI().sqrt()).sqrt()
}

fn joint_with_rule<T: Real>(n1: usize, n2: usize, x: T, eta: T, p: &CkParams<T>, rule: &GaussHermite) -> Complex<T> {
    let sqrt_r = p.r_w.sqrt();
    let sqrt_s = p.s_w.sqrt();
    let shift = p.gamma * sqrt_r;
    let half = T::lit(0.5);
    // ξ = sqrt(2) u turns e^{-ξ²/2} dξ into sqrt(2) e^{-u²} du
    let integral = rule.integrate_complex(|u: T| {
        let xi = T::SQRT_2() * u;
        let q = eta + xi * shift;
        let amp = hermite_unchecked(n2, xi) * (-p.s_w * q * q * half).exp() * hermite_unchecked(n1, sqrt_s * q);
        Complex::from_polar(amp, x * (xi * sqrt_r - p.sigma * eta))
    }) * T::SQRT_2();
    let phase = match n2 % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), -T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), T::one()),
    };
    integral * phase * normalization(n1, p.s_w) * normalization(n2, p.r_w)
}

/// Fourier form of the joint wavefunction,
/// `C_{n1} C_{n2} (-i)^{n2} ∫ e^{-ξ²/2} H_{n2}(ξ) e^{ix(ξ sqrt(R) - ση)}
///  e^{-S(η + ξγ sqrt(R))²/2} H_{n1}(sqrt(S)(η + ξγ sqrt(R))) dξ`,
/// by Gauss-Hermite quadrature. Returns the doubled-node value after checking
/// it against the base rule.
pub fn ck_joint_wavefunction<T: Real>(
    n1: OscillatorIndex,
    n2: OscillatorIndex,
    x: T,
    eta: T,
    p: &CkParams<T>,
    spec: QuadratureSpec,
) -> Result<Complex<T>> {
    check_widths(p)?;
    if spec.nodes < 64 {
        return Err(Error::Parameter {
            name: "quadrature nodes".into(),
            reason: format!("need at least 64, got {}", spec.nodes),
        });
    }
    let coarse = GaussHermite::cached(spec.nodes)?;
    let fine = GaussHermite::cached(2 * spec.nodes)?;
    let a = joint_with_rule(n1.get(), n2.get(), x, eta, p, &coarse);
    let b = joint_with_rule(n1.get(), n2.get(), x, eta, p, &fine);
    let change = (a - b).norm();
    let scale = b.norm();
    if change > T::lit(spec.tolerance) * scale && change > T::lit(1e-14) {
        return Err(Error::Accuracy { change: (change / scale.max(T::min_positive_value())).as_f64() });
    }
    Ok(b)
}

/// Superposition `ψ'(x, η, τ) = Σ U_{n1,n2} e^{-i ε_{n1,n2} τ} ψ'_{n1,n2}(x, η)`.
#[derive(Debug, Clone)]
pub struct CkEvolution<T> {
    params: CkParams<T>,
    terms: Vec<(usize, usize, Complex<T>, T)>,
}

/// Builds the evaluator; the coefficients must satisfy `Σ|U|² = 1` within 1e-9.
pub fn ck_evolve<T: Real>(
    coeffs: &BTreeMap<(usize, usize), Complex<T>>,
    params: &CkParams<T>,
) -> Result<CkEvolution<T>> {
    check_widths(params)?;
    let total: T = coeffs.values().map(|u| u.norm_sqr()).sum();
    if (total - T::one()).abs() > T::lit(1e-9) {
        return Err(Error::Normalization(total.as_f64()));
    }
    let terms = coeffs
        .iter()
        .map(|(&(n1, n2), &u)| {
            let e = energy_level(OscillatorIndex::new(n1)?, OscillatorIndex::new(n2)?, params)?;
            Ok((n1, n2, u, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CkEvolution { params: *params, terms })
}

impl<T: Real> CkEvolution<T> {
    pub fn eval(&self, x: T, eta: T, tau: T) -> Complex<T> {
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(n1, n2, u, e)| {
            let psi = width_factor(n2, x, self.params.r_w) * width_factor(n1, eta, self.params.s_w);
            acc + u * Complex::from_polar(psi, -e * tau)
        })
    }

    /// `Σ |U e^{-iετ}|²`.
    pub fn total_probability(&self, tau: T) -> T {
        self.terms.iter().map(|&(_, _, u, e)| (u * Complex::from_polar(T::one(), -e * tau)).norm_sqr()).sum()
    }

    pub fn energies(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.terms.iter().map(|&(n1, n2, _, e)| ((n1, n2), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: usize) -> OscillatorIndex {
        OscillatorIndex::new(n).unwrap()
    }

    fn unit_inputs() -> CkInputs<f64> {
        CkInputs::new(1.0, 1.0, 4.0 * std::f64::consts::PI)
    }

    /// Radical forms for ω = ω_c = 1, β = 1 (ε = 1/2) on the lower branch.
    #[test]
    fn unit_case_matches_radicals() {
        let s5 = 5f64.sqrt();
        let p = derive_ck_params(&unit_inputs()).unwrap();
        assert_eq!(p.branch, Branch::Minus);
        let close = |a: f64, b: f64| (a - b).abs() < 1e-13;
        assert!(close(p.beta, 1.0));
        assert!(close(p.epsilon, 0.5));
        assert!(close(p.alpha, (1.0 - s5) / 2.0));
        assert!(close(p.gamma, -1.0 / s5));
        assert!(close(p.lambda, (5.0 + s5) / 2.0));
        assert!(close(p.sigma, (5.0 + s5) / 10.0));
        assert!(close(p.kappa, (5.0 + 7.0 * s5) / 10.0));
        assert!(close(p.g, (s5 - 1.0) / 2.0));
        assert!(close(p.s_e, (3.0 - s5) / 2.0));
        assert!(close(p.r_w, (1.0 / (p.sigma * p.kappa)).sqrt()));
        assert!(close(p.s_w, s5));
        let e11 = energy_level(idx(1), idx(1), &p).unwrap();
        assert!(close(e11, 1.5 * (((s5 - 1.0) / 2.0).sqrt() + (s5 - 1.0) / 2.0)));
        assert!(close(e11, 2.106_278_049_760_977));
    }

    #[test]
    fn upper_branch_fails_for_unit_case() {
        let err = derive_ck_params(&unit_inputs().with_branch(Branch::Plus)).unwrap_err();
        assert!(matches!(err, Error::NonDiagonalizable { kappa, .. } if kappa < 0.0));
    }

    #[test]
    fn branch_product_identity() {
        for &(w, wc, v) in &[(1.0f64, 1.0f64, 12.0f64), (2.0, 0.7, 3.0), (0.4, 1.9, 40.0)] {
            let inp = CkInputs::new(w, wc, v);
            let a = |b| {
                let beta = inp.beta();
                let eps = (w * w - wc * wc + beta * beta * w) / (2.0 * beta * w.sqrt() * wc);
                let r = (eps * eps + 1.0).sqrt();
                let s: f64 = match b {
                    Branch::Plus => 1.0,
                    Branch::Minus => -1.0,
                };
                (wc / w).sqrt() * (eps + s * r)
            };
            assert!((a(Branch::Plus) * a(Branch::Minus) + wc / w).abs() < 1e-12);
            if let Ok(p) = derive_ck_params(&inp.with_branch(Branch::Plus)) {
                assert!((p.alpha - a(Branch::Plus)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sigma_in_unit_interval() {
        for &(w, wc, v) in &[(1.0, 1.0, 12.0), (2.0, 0.7, 3.0), (0.4, 1.9, 40.0), (5.0, 5.0, 0.1)] {
            for b in [Branch::Plus, Branch::Minus] {
                if let Ok(p) = derive_ck_params(&CkInputs::new(w, wc, v).with_branch(b)) {
                    assert!(p.sigma > 0.0 && p.sigma <= 1.0);
                }
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(derive_ck_params(&CkInputs::new(0.0, 1.0, 1.0)).is_err());
        assert!(derive_ck_params(&CkInputs::new(1.0, 1.0, 1e30)).is_err());
    }

    #[test]
    fn negative_factor_is_branch_error() {
        let p = derive_ck_params(&unit_inputs()).unwrap();
        let flipped = CkParams { g: -p.g, ..p };
        assert!(matches!(energy_level(idx(0), idx(0), &flipped), Err(Error::Branch { factor: "G", .. })));
    }

    #[test]
    fn ground_and_gaps() {
        let p = derive_ck_params(&unit_inputs()).unwrap();
        let e00 = energy_level(idx(0), idx(0), &p).unwrap();
        assert!((e00 - 0.5 * (p.g.sqrt() + p.s_e.sqrt())).abs() < 1e-15);
        for n in 0..6 {
            let d = energy_level(idx(n + 1), idx(2), &p).unwrap() - energy_level(idx(n), idx(2), &p).unwrap();
            assert!((d - p.s_e.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_widths_reduce_to_oscillator_functions() {
        let p = derive_ck_params(&unit_inputs()).unwrap();
        let p = CkParams { r_w: 1.0, s_w: 1.0, ..p };
        for &(x, e) in &[(0.3, -1.2), (1.7, 0.4)] {
            let v = ck_wavefunction(idx(2), idx(3), x, e, &p).unwrap();
            assert!((v - ho_unchecked(3, x) * ho_unchecked(2, e)).abs() < 1e-15);
        }
        assert_eq!(ck_wavefunction(idx(1), idx(0), 0.4, 0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn rejects_few_nodes_and_bad_coeffs() {
        let p = derive_ck_params(&unit_inputs()).unwrap();
        let spec = QuadratureSpec { nodes: 32, ..Default::default() };
        assert!(ck_joint_wavefunction(idx(0), idx(0), 0.0, 0.0, &p, spec).is_err());
        let mut c = BTreeMap::new();
        c.insert((0, 0), Complex::new(0.9, 0.0));
        assert!(matches!(ck_evolve(&c, &p), Err(Error::Normalization(_))));
    }
}
