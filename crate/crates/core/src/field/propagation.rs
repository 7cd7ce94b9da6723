use serde::{Deserialize, Serialize};

use super::medium::check_quadratic_form;
use super::{normal_modes, FieldGrid, GridAxes, MediumParams, NormalModes};
use crate::special_fn::{ho_unchecked, OscillatorIndex, N_MAX};
use crate::{Complex, Error, Real, Result};

/// Zero-point contribution to the longitudinal phase.
///
/// `Stationary` uses `z (ωx + ωy) / (2 k0)`, which makes each term an exact
/// stationary solution of the inhomogeneous paraxial equation. `Printed`
/// uses `z (ωx + ωy) / k0`; it only changes phases, so `|E|` is identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPointPhase {
    #[default]
    Stationary,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PropagationOptions {
    pub zero_point: ZeroPointPhase,
}

/// Precomputed data of one oscillator term `e^{iβz} (Ŵ_θ† φ_a φ_b)(x, y)`.
#[derive(Debug, Clone, Copy)]
struct ModeTerm<T> {
    level_x: usize,
    level_y: usize,
    cos: T,
    sin: T,
    sqrt_wx: T,
    sqrt_wy: T,
    norm: T,
    beta: T,
}

impl<T: Real> ModeTerm<T> {
    fn new(modes: &NormalModes<T>, level_x: usize, level_y: usize, k0: T, opts: PropagationOptions) -> Self {
        let (sin, cos) = modes.theta.sin_cos();
        let (wx, wy) = (modes.omega_x, modes.omega_y);
        let ex = T::from_usize_lossy(level_x);
        let ey = T::from_usize_lossy(level_y);
        let zero_point = match opts.zero_point {
            ZeroPointPhase::Stationary => (wx + wy) / (T::lit(2.0) * k0),
            ZeroPointPhase::Printed => (wx + wy) / k0,
        };
        Self {
            level_x,
            level_y,
            cos,
            sin,
            sqrt_wx: wx.sqrt(),
            sqrt_wy: wy.sqrt(),
            norm: (wx * wy).powf(T::lit(0.25)),
            beta: -k0 * T::lit(0.5) + zero_point + (ex * wx + ey * wy) / k0,
        }
    }

    /// Transverse profile with the passive rotation
    /// `(Ŵ_θ† f)(x, y) = f(x cosθ - y sinθ, x sinθ + y cosθ)`.
    #[inline]
    fn profile(&self, x: T, y: T) -> T {
        let u = x * self.cos - y * self.sin;
        let v = x * self.sin + y * self.cos;
        self.norm * ho_unchecked(self.level_x, self.sqrt_wx * u) * ho_unchecked(self.level_y, self.sqrt_wy * v)
    }
}

fn check_level(level: usize) -> Result<()> {
    OscillatorIndex::new(level).map(|_| ())
}

fn superpose<T: Real>(terms: &[ModeTerm<T>], axes: GridAxes<T>) -> Result<FieldGrid<T>> {
    use rayon::prelude::*;
    let (nx, ny, _) = axes.shape();
    // Transverse profiles are z-independent; evaluate them once.
    let profiles: Vec<Vec<T>> = terms
        .iter()
        .map(|t| {
            let mut p = Vec::with_capacity(nx * ny);
            for &y in &axes.y {
                for &x in &axes.x {
                    p.push(t.profile(x, y));
                }
            }
            p
        })
        .collect();
    let mut values = vec![Complex::new(T::zero(), T::zero()); axes.len()];
    values.par_chunks_mut(nx * ny).zip(axes.z.par_iter()).for_each(|(slice, &z)| {
        for (term, prof) in terms.iter().zip(&profiles) {
            let phase = Complex::from_polar(T::one(), term.beta * z);
            for (dst, &p) in slice.iter_mut().zip(prof) {
                *dst = *dst + phase * p;
            }
        }
    });
    FieldGrid::new(axes, values)
}

/// Single-channel field
/// `E = e^{-ik0z/2} e^{iz(ωx+ωy)/(2k0)} e^{iz(εx ωx + εy ωy)/k0} (Ŵ_θ† φ_εx φ_εy)(x, y)`
/// with oscillator coordinates scaled by `sqrt(ω)` and unit transverse norm.
pub fn propagate_single<T: Real>(
    level_x: OscillatorIndex,
    level_y: OscillatorIndex,
    axes: GridAxes<T>,
    params: &MediumParams<T>,
) -> Result<FieldGrid<T>> {
    propagate_single_with(level_x, level_y, axes, params, PropagationOptions::default())
}

pub fn propagate_single_with<T: Real>(
    level_x: OscillatorIndex,
    level_y: OscillatorIndex,
    axes: GridAxes<T>,
    params: &MediumParams<T>,
    opts: PropagationOptions,
) -> Result<FieldGrid<T>> {
    let modes = normal_modes(params.kx(), params.ky(), params.g())?;
    let term = ModeTerm::new(&modes, level_x.get(), level_y.get(), params.k0(), opts);
    superpose(&[term], axes)
}

/// One photon of a transmitter (`cluster = 1`) or receiver (`cluster = 2`)
/// cluster with its own medium coefficients and level pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Photon<T> {
    pub cluster: usize,
    pub kx: T,
    pub ky: T,
    pub g: T,
    pub level_x: usize,
    pub level_y: usize,
}

/// Photon clusters and entanglement strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig<T> {
    pub photons: Vec<Photon<T>>,
    /// Inter-cluster entanglement strength.
    pub mu: T,
    /// Intra-cluster entanglement strengths for clusters 1 and 2.
    pub sigma: [T; 2],
}

impl<T: Real> ClusterConfig<T> {
    /// `n1` + `n2` photons in the medium `params`, all at `(level, level)`.
    pub fn uniform(n1: usize, n2: usize, params: &MediumParams<T>, level: usize) -> Self {
        let photon = |cluster| Photon {
            cluster,
            kx: params.kx(),
            ky: params.ky(),
            g: params.g(),
            level_x: level,
            level_y: level,
        };
        let photons = (0..n1).map(|_| photon(1)).chain((0..n2).map(|_| photon(2))).collect();
        Self { photons, mu: T::zero(), sigma: [T::zero(); 2] }
    }

    /// Like [`uniform`](Self::uniform) but photon `j` of each cluster takes
    /// `(level + d_j, level - d_j)` with `d = 0, +1, -1, +2, -2, ...`
    /// (receiver cluster mirrored), clamped so both levels stay valid. The
    /// mean level pair stays `(level, level)` while distinct photons acquire
    /// distinct propagation constants.
    pub fn split_levels(n1: usize, n2: usize, params: &MediumParams<T>, level: usize) -> Self {
        let mut cfg = Self::uniform(n1, n2, params, level);
        let offset = |j: usize| -> i64 {
            let m = j.div_ceil(2) as i64;
            if j % 2 == 1 {
                m
            } else {
                -m
            }
        };
        let mut counters = [0usize; 2];
        for p in &mut cfg.photons {
            let j = counters[p.cluster - 1];
            counters[p.cluster - 1] += 1;
            let mut d = offset(j);
            if p.cluster == 2 {
                d = -d;
            }
            let d = d.clamp(-(level as i64), level as i64);
            p.level_x = (level as i64 + d) as usize;
            p.level_y = (level as i64 - d) as usize;
        }
        cfg
    }

    pub fn cluster_sizes(&self) -> [usize; 2] {
        let n1 = self.photons.iter().filter(|p| p.cluster == 1).count();
        [n1, self.photons.len() - n1]
    }

    /// Checks cluster sizes, levels and every photon's quadratic form.
    pub fn validate(&self) -> Result<()> {
        let [n1, n2] = self.cluster_sizes();
        if n1 < 1 || n2 < 1 {
            return Err(Error::Parameter {
                name: "cluster".into(),
                reason: format!("both clusters need at least one photon (got {n1}, {n2})"),
            });
        }
        if !self.mu.is_finite() || !self.sigma.iter().all(|s| s.is_finite()) {
            return Err(Error::Parameter { name: "entanglement".into(), reason: "mu and sigma must be finite".into() });
        }
        for (cluster, photon, p) in self.labelled() {
            let wrap = |e: Error| Error::Photon { cluster, photon, source: Box::new(e) };
            if p.cluster != 1 && p.cluster != 2 {
                return Err(wrap(Error::Parameter { name: "cluster".into(), reason: "must be 1 or 2".into() }));
            }
            check_level(p.level_x).map_err(wrap)?;
            check_level(p.level_y).map_err(wrap)?;
            check_quadratic_form(p.kx, p.ky, p.g).map_err(wrap)?;
        }
        Ok(())
    }

    /// `(cluster, 1-based index within cluster, photon)`.
    pub fn labelled(&self) -> impl Iterator<Item = (usize, usize, &Photon<T>)> {
        let mut counters = [0usize; 3];
        self.photons.iter().map(move |p| {
            let slot = p.cluster.min(2);
            counters[slot] += 1;
            (p.cluster, counters[slot], p)
        })
    }

    /// Concatenation of the photon lists (entanglement strengths of `self`).
    pub fn union(&self, other: &Self) -> Self {
        let mut photons = self.photons.clone();
        photons.extend_from_slice(&other.photons);
        Self { photons, mu: self.mu, sigma: self.sigma }
    }
}

/// Sum over both clusters of per-photon single-channel terms, each with its
/// own rotation angle, normal-mode frequencies and levels. `params` supplies
/// `k0`; the per-photon `kx`, `ky`, `g` come from the configuration.
pub fn propagate_cluster<T: Real>(
    cfg: &ClusterConfig<T>,
    axes: GridAxes<T>,
    params: &MediumParams<T>,
) -> Result<FieldGrid<T>> {
    propagate_cluster_with(cfg, axes, params, PropagationOptions::default())
}

pub fn propagate_cluster_with<T: Real>(
    cfg: &ClusterConfig<T>,
    axes: GridAxes<T>,
    params: &MediumParams<T>,
    opts: PropagationOptions,
) -> Result<FieldGrid<T>> {
    cfg.validate()?;
    let terms = cfg
        .photons
        .iter()
        .map(|p| {
            let modes = normal_modes(p.kx, p.ky, p.g)?;
            Ok(ModeTerm::new(&modes, p.level_x, p.level_y, params.k0(), opts))
        })
        .collect::<Result<Vec<_>>>()?;
    superpose(&terms, axes)
}

/// Potential coefficients of one photon's oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorCoeffs<T> {
    pub cluster: usize,
    pub photon: usize,
    pub k0_sq_half: T,
    pub kx_half: T,
    pub ky_half: T,
    pub g_half: T,
}

/// `σ_i x_a y_b` coupling between photons `a` and `b` of cluster `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntraCoupling<T> {
    pub cluster: usize,
    pub a: usize,
    pub b: usize,
    pub strength: T,
}

/// Scalar coefficients of the cluster Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamiltonianCoeffs<T> {
    /// `1 / (2 k0)` in front of every `p_x² + p_y²`.
    pub kinetic_prefactor: T,
    /// `1 / k0` in front of every potential bracket.
    pub potential_prefactor: T,
    pub oscillators: Vec<OscillatorCoeffs<T>>,
    /// `μ Σ_{j1, j2} kx_{1,j1} ky_{1,j1} kx_{2,j2} ky_{2,j2}`; `None` when `μ = 0`.
    pub inter_cluster: Option<T>,
    /// Pairwise intra-cluster couplings; empty when both `σ_i` vanish.
    pub intra_cluster: Vec<IntraCoupling<T>>,
}

impl<T: Real> HamiltonianCoeffs<T> {
    /// Symmetric matrix of the quadratic potential over the coordinates
    /// `[x_1, y_1, x_2, y_2, ...]` in photon order (potential prefactor not applied).
    pub fn quadratic_form(&self) -> Vec<Vec<T>> {
        let n = 2 * self.oscillators.len();
        let mut m = vec![vec![T::zero(); n]; n];
        let half = T::lit(0.5);
        for (k, o) in self.oscillators.iter().enumerate() {
            m[2 * k][2 * k] = o.kx_half;
            m[2 * k + 1][2 * k + 1] = o.ky_half;
            m[2 * k][2 * k + 1] = o.g_half * half;
            m[2 * k + 1][2 * k] = o.g_half * half;
        }
        let pos = |cluster: usize, photon: usize| {
            self.oscillators
                .iter()
                .position(|o| o.cluster == cluster && o.photon == photon)
                .expect("coupling refers to a listed photon")
        };
        for c in &self.intra_cluster {
            let (a, b) = (pos(c.cluster, c.a), pos(c.cluster, c.b));
            m[2 * a][2 * b + 1] += c.strength * half;
            m[2 * b + 1][2 * a] += c.strength * half;
        }
        m
    }
}

pub fn cluster_hamiltonian_coeffs<T: Real>(
    cfg: &ClusterConfig<T>,
    params: &MediumParams<T>,
) -> Result<HamiltonianCoeffs<T>> {
    cfg.validate()?;
    let k0 = params.k0();
    let half = T::lit(0.5);
    let oscillators: Vec<_> = cfg
        .labelled()
        .map(|(cluster, photon, p)| OscillatorCoeffs {
            cluster,
            photon,
            k0_sq_half: k0 * k0 * half,
            kx_half: p.kx * half,
            ky_half: p.ky * half,
            g_half: p.g * half,
        })
        .collect();
    let inter_cluster = (cfg.mu != T::zero()).then(|| {
        let prod = |c: usize| -> T { cfg.photons.iter().filter(|p| p.cluster == c).map(|p| p.kx * p.ky).sum() };
        cfg.mu * prod(1) * prod(2)
    });
    let mut intra_cluster = Vec::new();
    for (ci, &strength) in cfg.sigma.iter().enumerate() {
        if strength == T::zero() {
            continue;
        }
        let n = cfg.cluster_sizes()[ci];
        for a in 1..=n {
            for b in a + 1..=n {
                intra_cluster.push(IntraCoupling { cluster: ci + 1, a, b, strength });
            }
        }
    }
    Ok(HamiltonianCoeffs {
        kinetic_prefactor: (T::lit(2.0) * k0).recip(),
        potential_prefactor: k0.recip(),
        oscillators,
        inter_cluster,
        intra_cluster,
    })
}

const _: () = assert!(N_MAX >= 8);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{paraxial_residual, ParaxialEquation};

    fn idx(n: usize) -> OscillatorIndex {
        OscillatorIndex::new(n).unwrap()
    }

    #[test]
    fn ground_state_at_origin() {
        let params = MediumParams::new(1.3, 1.45, 1.0, 1.0, 0.0, 1e-6).unwrap();
        let axes = GridAxes::from_ranges((0.0, 1.0, 1), (0.0, 1.0, 1), (0.0, 1.0, 1)).unwrap();
        let e = propagate_single(idx(0), idx(0), axes, &params).unwrap();
        let v = e.values()[0];
        assert!((v.re - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    /// The rotation sense and the pairing ωx ↔ κ₊ are the ones for which the
    /// field solves the inhomogeneous equation; flipping either breaks it.
    #[test]
    fn rotation_sense_fixed_by_residual() {
        let params = MediumParams::grin_default().with_coefficients(1.2, 1.5, 0.25).unwrap();
        let axes = GridAxes::centered(6.0, 241, 0.0, 0.025, 7).unwrap();
        let good = propagate_single(idx(2), idx(1), axes.clone(), &params).unwrap();
        let r_good = paraxial_residual(&good, &params, ParaxialEquation::Inhomogeneous).unwrap();

        let modes = normal_modes(1.2, 1.5, 0.25).unwrap();
        let opts = PropagationOptions::default();
        let mut flipped = ModeTerm::new(&modes, 2, 1, params.k0(), opts);
        flipped.sin = -flipped.sin;
        let bad = superpose(&[flipped], axes.clone()).unwrap();
        let r_sign = paraxial_residual(&bad, &params, ParaxialEquation::Inhomogeneous).unwrap();

        let swapped_modes = NormalModes { omega_x: modes.omega_y, omega_y: modes.omega_x, ..modes };
        let swapped = ModeTerm::new(&swapped_modes, 2, 1, params.k0(), opts);
        let bad = superpose(&[swapped], axes).unwrap();
        let r_swap = paraxial_residual(&bad, &params, ParaxialEquation::Inhomogeneous).unwrap();

        assert!(r_good < 0.05, "{r_good}");
        assert!(r_sign > 20.0 * r_good, "{r_sign} vs {r_good}");
        assert!(r_swap > 20.0 * r_good, "{r_swap} vs {r_good}");
    }

    #[test]
    fn split_levels_pattern() {
        let p = MediumParams::<f64>::grin_default();
        let cfg = ClusterConfig::split_levels(4, 4, &p, 2);
        let tx: Vec<_> = cfg.photons[..4].iter().map(|p| (p.level_x, p.level_y)).collect();
        let rx: Vec<_> = cfg.photons[4..].iter().map(|p| (p.level_x, p.level_y)).collect();
        assert_eq!(tx, vec![(2, 2), (3, 1), (1, 3), (4, 0)]);
        assert_eq!(rx, vec![(2, 2), (1, 3), (3, 1), (0, 4)]);
        let cfg = ClusterConfig::split_levels(5, 1, &p, 0);
        assert!(cfg.photons.iter().all(|p| p.level_x == 0 && p.level_y == 0));
    }

    #[test]
    fn labels_are_per_cluster() {
        let p = MediumParams::<f64>::grin_default();
        let cfg = ClusterConfig::uniform(2, 3, &p, 1);
        let labels: Vec<_> = cfg.labelled().map(|(c, j, _)| (c, j)).collect();
        assert_eq!(labels, vec![(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)]);
    }
}
