//! Fast built-in checks of the numerical core, run by `qho selftest`.

use qho_core::capacity::{
    fading_capacity, fock_capacity, g_entropy, holevo_capacity, shannon_capacity, CapacityInputs,
};
use qho_core::ck::{derive_ck_params, energy_level, CkInputs};
use qho_core::envelope::EmpiricalDensity;
use qho_core::field::{
    paraxial_residual, propagate_cluster, propagate_single, tem_mode_grid, ClusterConfig, GridAxes, MediumParams,
    ParaxialEquation,
};
use qho_core::noise::{hybrid_density, HybridNoiseSpec};
use qho_core::quadrature::GaussHermite;
use qho_core::special_fn::{ho_wavefunction, OscillatorIndex};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<String, String>,
}

type Outcome = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Outcome);

fn idx(n: usize) -> OscillatorIndex {
    OscillatorIndex::new(n).expect("small index")
}

fn err(e: qho_core::Error) -> String {
    e.to_string()
}

fn orthonormality() -> Outcome {
    let gh = GaussHermite::new(40).map_err(err)?;
    let mut worst = 0.0f64;
    for m in 0..=6 {
        for n in 0..=6 {
            let v = gh.integrate(|x: f64| {
                ho_wavefunction(idx(m), x).unwrap() * ho_wavefunction(idx(n), x).unwrap() * (x * x).exp()
            });
            worst = worst.max((v - if m == n { 1.0 } else { 0.0 }).abs());
        }
    }
    (worst < 1e-8).then(|| format!("max error {worst:.1e}")).ok_or(format!("max error {worst:.1e}"))
}

fn order_of(r: impl Fn(f64) -> Result<f64, qho_core::Error>, h: f64) -> Outcome {
    let (a, b) = (r(h).map_err(err)?, r(h / 2.0).map_err(err)?);
    let p = (a / b).log2();
    let msg = format!("order {p:.2}");
    if (p - 2.0).abs() < 0.3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn grid(h: f64, half: f64) -> Result<GridAxes<f64>, qho_core::Error> {
    let n = (2.0 * half / h).round() as usize + 1;
    let steps = 4.0 * (0.1 / h).round();
    GridAxes::centered(half, n, 0.0, h, steps as usize + 1)
}

fn tem_residual() -> Outcome {
    let m = MediumParams::<f64>::grin_default();
    order_of(
        |h| {
            let f = tem_mode_grid(idx(1), idx(1), grid(h, 6.0)?, 10.0, m.wavelength())?;
            paraxial_residual(&f, &m, ParaxialEquation::FreeSpace)
        },
        0.1,
    )
}

fn medium_residual() -> Outcome {
    let m = MediumParams::<f64>::grin_default();
    order_of(
        |h| {
            let f = propagate_single(idx(2), idx(2), grid(h, 6.0)?, &m)?;
            paraxial_residual(&f, &m, ParaxialEquation::Inhomogeneous)
        },
        0.05,
    )
}

fn norm_conservation() -> Outcome {
    let m = MediumParams::<f64>::grin_default();
    let cfg = ClusterConfig::split_levels(4, 4, &m, 2);
    let axes = GridAxes::centered(8.0, 81, 0.0, 3.0, 16).map_err(err)?;
    let norms = propagate_cluster(&cfg, axes, &m).map_err(err)?.transverse_norms();
    let spread = norms.iter().map(|n| (n / norms[0] - 1.0).abs()).fold(0.0, f64::max);
    let msg = format!("relative spread {spread:.1e}");
    if spread < 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn capacity_reductions() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..20 {
        let i = CapacityInputs {
            bandwidth: 1.0 + k as f64,
            signal_power: 0.1 * (k + 1) as f64,
            n0: 1.0,
            hbar_f: 0.5,
            quantum_noise: 0.0,
            chi: 1.0,
        };
        let (h, f) = (holevo_capacity(&i).map_err(err)?, fock_capacity(&i).map_err(err)?);
        worst = worst.max((h - f).abs() / f);
        let d = EmpiricalDensity::from_masses(vec![1.0 - 1e-9, 1.0 + 1e-9], vec![1.0]).map_err(err)?;
        let (fd, s) = (fading_capacity(&i, &d, 1.0).map_err(err)?, shannon_capacity(&i).map_err(err)?);
        worst = worst.max((fd - s).abs() / s * 1e-3);
    }
    let g0 = g_entropy(0.0f64).map_err(err)?;
    let g1 = g_entropy(1.0f64).map_err(err)?;
    if worst < 1e-12 && g0 == 0.0 && (g1 - 2.0).abs() < 1e-12 {
        Ok(format!("max relative gap {worst:.1e}"))
    } else {
        Err(format!("gap {worst:.1e}, g(0) = {g0}, g(1) = {g1}"))
    }
}

fn noise_normalization() -> Outcome {
    let s = HybridNoiseSpec::new(1.0, 0.0, 2.0, 1.0).map_err(err)?;
    let h = 0.05;
    let total: f64 = (0..=800).map(|k| hybrid_density(&s, -18.0 + k as f64 * h).unwrap() * h).sum();
    let msg = format!("integral {total:.12}");
    if (total - 1.0).abs() < 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ck_spectrum() -> Outcome {
    let p = derive_ck_params(&CkInputs::new(1.0, 1.0, 4.0 * std::f64::consts::PI)).map_err(err)?;
    let e = |a, b| energy_level(idx(a), idx(b), &p);
    let mut worst = 0.0f64;
    for a in 0..6 {
        for b in 0..6 {
            let d1 = e(a + 2, b).map_err(err)? - 2.0 * e(a + 1, b).map_err(err)? + e(a, b).map_err(err)?;
            let d2 = e(a, b + 2).map_err(err)? - 2.0 * e(a, b + 1).map_err(err)? + e(a, b).map_err(err)?;
            worst = worst.max(d1.abs()).max(d2.abs());
        }
    }
    let msg = format!("max second difference {worst:.1e}");
    if worst < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn run_all() -> Vec<Check> {
    let checks: [NamedCheck; 7] = [
        ("orthonormality", orthonormality),
        ("tem residual order", tem_residual),
        ("medium residual order", medium_residual),
        ("cluster norm conservation", norm_conservation),
        ("capacity reductions", capacity_reductions),
        ("noise normalization", noise_normalization),
        ("ck linear spectrum", ck_spectrum),
    ];
    checks.into_iter().map(|(name, f)| Check { name, outcome: f() }).collect()
}
