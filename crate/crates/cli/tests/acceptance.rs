//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qho_core::capacity::*;
use qho_core::ck::*;
use qho_core::envelope::*;
use qho_core::field::*;
use qho_core::noise::*;
use qho_core::quadrature::GaussHermite;
use qho_core::special_fn::{ho_wavefunction, OscillatorIndex};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn idx(n: usize) -> OscillatorIndex {
    OscillatorIndex::new(n).unwrap()
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

const PRESETS: [(&str, f64, f64, f64); 2] = [("fig1", 1.2, 1.5, 0.25), ("fig2", 3.5, 5.0, 0.5)];

fn orthonormality() -> Outcome {
    let (worst, t) = timed(|| {
        let gh = GaussHermite::new(40).unwrap();
        let mut worst = 0.0f64;
        for m in 0..=6 {
            for n in 0..=6 {
                let v = gh.integrate(|x: f64| {
                    ho_wavefunction(idx(m), x).unwrap() * ho_wavefunction(idx(n), x).unwrap() * (x * x).exp()
                });
                worst = worst.max((v - if m == n { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    });
    check(worst < 1e-8 && t < Duration::from_secs(1), format!("max deviation {worst:.1e} in {t:.2?}"))
}

/// Half-width 6, four z steps, then everything halved.
fn refined_axes(h: f64) -> [GridAxes<f64>; 2] {
    let make = |h: f64, steps: usize| {
        let n = (12.0 / h).round() as usize + 1;
        GridAxes::centered(6.0, n, 0.0, h, steps + 1).unwrap()
    };
    [make(h, 4), make(h / 2.0, 8)]
}

fn residual_order() -> Outcome {
    let base = MediumParams::<f64>::grin_default();
    let mut lines = Vec::new();
    let mut ok = true;

    let (orders, t) = timed(|| {
        [(0, 0), (1, 2), (3, 1)]
            .map(|(l, m)| {
                let [a, b] = refined_axes(0.1);
                let r = |axes| {
                    let f = tem_mode_grid(idx(l), idx(m), axes, 10.0, base.wavelength()).unwrap();
                    paraxial_residual(&f, &base, ParaxialEquation::FreeSpace).unwrap()
                };
                (r(a) / r(b)).log2()
            })
            .to_vec()
    });
    ok &= orders.iter().all(|p| (p - 2.0).abs() <= 0.3) && t < Duration::from_secs(30);
    lines.push(format!("TEM orders {orders:.2?} in {t:.1?}"));

    for (name, kx, ky, g) in PRESETS {
        let params = base.with_coefficients(kx, ky, g).unwrap();
        let (orders, t) = timed(|| {
            [2, 3, 4]
                .map(|eps| {
                    let [a, b] = refined_axes(0.05);
                    let r = |axes| {
                        let f = propagate_single(idx(eps), idx(eps), axes, &params).unwrap();
                        paraxial_residual(&f, &params, ParaxialEquation::Inhomogeneous).unwrap()
                    };
                    (r(a) / r(b)).log2()
                })
                .to_vec()
        });
        ok &= orders.iter().all(|p| (p - 2.0).abs() <= 0.3) && t < Duration::from_secs(30);
        lines.push(format!("{name} orders {orders:.2?} in {t:.1?}"));
    }
    check(ok, lines.join("; "))
}

fn norm_conservation() -> Outcome {
    let params = MediumParams::<f64>::grin_default();
    let cfg = ClusterConfig::split_levels(4, 4, &params, 2);
    let axes = GridAxes::centered(8.0, 161, 0.0, 2.0 * params.wavelength(), 64).unwrap();
    let norms = propagate_cluster(&cfg, axes, &params).unwrap().transverse_norms();
    let spread = norms.iter().map(|n| (n / norms[0] - 1.0).abs()).fold(0.0, f64::max);
    check(norms.len() == 64 && spread < 1e-6, format!("{} slices, relative spread {spread:.1e}", norms.len()))
}

fn inputs(b: f64, p: f64, n0: f64, hf: f64, n: f64, chi: f64) -> CapacityInputs<f64> {
    CapacityInputs { bandwidth: b, signal_power: p, n0, hbar_f: hf, quantum_noise: n, chi }
}

fn capacity_reductions() -> Outcome {
    let mut holevo_gap = 0.0f64;
    let mut shannon_gap = 0.0f64;
    for k in 0..100 {
        let t = k as f64 / 99.0;
        let i = inputs(
            10f64.powf(-1.0 + 7.0 * t),
            10f64.powf(-3.0 + 5.0 * t * t),
            1e-3,
            10f64.powf(-2.0 + 3.0 * (1.0 - t)),
            0.0,
            1.0,
        );
        let (h, f) = (holevo_capacity(&i).unwrap(), fock_capacity(&i).unwrap());
        holevo_gap = holevo_gap.max((h - f).abs() / f);
        let w = 1e-6;
        let d = EmpiricalDensity::point_mass(1.0 - w / 2.0, w).unwrap();
        let (c, s) = (fading_capacity(&i, &d, i.n0).unwrap(), shannon_capacity(&i).unwrap());
        shannon_gap = shannon_gap.max((c - s).abs() / s);
    }
    let (g0, g1) = (g_entropy(0.0f64).unwrap(), g_entropy(1.0f64).unwrap());
    check(
        holevo_gap <= 1e-12 && shannon_gap <= 1e-9 && g0 == 0.0 && (g1 - 2.0).abs() <= 1e-12,
        format!("holevo/fock {holevo_gap:.1e}, point-mass/shannon {shannon_gap:.1e}, g(0) = {g0}, g(1) = {g1}"),
    )
}

fn rayleigh(n: usize, seed: u64) -> Vec<f64> {
    seeded_uniform(n, seed).into_iter().map(|u| (-2.0 * (1.0 - u).ln()).sqrt()).collect()
}

fn rayleigh_fading() -> Outcome {
    let ((c, mc), t) = timed(|| {
        let snr = 10.0;
        let i = inputs(1.0, snr, 1.0, 1.0, 0.0, 1.0);
        let d = estimate_density(&rayleigh(100_000, 1), BinSpec::FreedmanDiaconis).unwrap();
        let c = fading_capacity(&i, &d, 1.0).unwrap();
        let mc = rayleigh(100_000, 2).iter().map(|r| (1.0 + r * r * snr).log2()).sum::<f64>() / 1e5;
        (c, mc)
    });
    let rel = (c / mc - 1.0).abs();
    check(
        rel < 0.02 && t < Duration::from_secs(5),
        format!("histogram {c:.5} vs MC {mc:.5} ({:.2}%) in {t:.2?}", 100.0 * rel),
    )
}

fn noise_moments() -> Outcome {
    let specs: [HybridNoiseSpec<f64>; 3] = [
        HybridNoiseSpec::new(1.0, 0.0, 2.0, 1.0).unwrap(),
        HybridNoiseSpec::new(0.04, 0.5, 1.0, 1.0).unwrap(),
        HybridNoiseSpec::new(2.0, -1.0, 30.0, 0.5).unwrap(),
    ];
    let (mut mass, mut quad, mut mc) = (0.0f64, 0.0f64, 0.0f64);
    for s in &specs {
        let m = hybrid_moments(s).unwrap();
        let sd = m.variance.sqrt();
        let (lo, hi) = (m.mean - 16.0 * sd, m.mean + 16.0 * sd);
        let n = ((hi - lo) / (s.sigma_g2.sqrt() / 8.0)).ceil() as usize;
        let h = (hi - lo) / n as f64;
        let mut acc = [0.0; 3];
        for k in 0..=n {
            let x = lo + k as f64 * h;
            let w = if k == 0 || k == n { 0.5 * h } else { h };
            let f = hybrid_density(s, x).unwrap();
            acc[0] += w * f;
            acc[1] += w * f * x;
            acc[2] += w * f * x * x;
        }
        let mean = acc[1] / acc[0];
        let var = acc[2] / acc[0] - mean * mean;
        mass = mass.max((acc[0] - 1.0).abs());
        quad = quad.max((mean - m.mean).abs()).max((var - m.variance).abs());

        let draws = sample_hybrid(s, 1_000_000, 17).unwrap();
        let dn = draws.len() as f64;
        let smean = draws.iter().sum::<f64>() / dn;
        let svar = draws.iter().map(|x| (x - smean).powi(2)).sum::<f64>() / (dn - 1.0);
        let scale = m.mean.abs().max(sd);
        mc = mc.max((smean - m.mean).abs() / scale).max((svar / m.variance - 1.0).abs());
    }
    check(
        mass < 1e-9 && quad < 1e-6 && mc < 0.01,
        format!("mass error {mass:.1e}, quadrature moments {quad:.1e}, MC relative {:.3}%", 100.0 * mc),
    )
}

fn ck_suite() -> Outcome {
    let params = [
        derive_ck_params(&CkInputs::new(1.0, 1.0, 4.0 * PI)).unwrap(),
        derive_ck_params(&CkInputs::new(1.7, 0.9, 2.5)).unwrap(),
    ];
    let gh = GaussHermite::new(40).unwrap();
    let (mut norm, mut second, mut conv) = (0.0f64, 0.0f64, 0.0f64);
    for p in &params {
        let (sr, ss) = (p.r_w.sqrt(), p.s_w.sqrt());
        for n1 in 0..=4 {
            for n2 in 0..=4 {
                let total = gh.integrate(|t: f64| {
                    gh.integrate(|s: f64| {
                        let v = ck_wavefunction(idx(n1), idx(n2), t / sr, s / ss, p).unwrap();
                        v * v * (t * t + s * s).exp()
                    })
                }) / (sr * ss);
                norm = norm.max((total - 1.0).abs());
            }
        }
        let e = |a, b| energy_level(idx(a), idx(b), p).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                second = second
                    .max((e(a + 2, b) - 2.0 * e(a + 1, b) + e(a, b)).abs())
                    .max((e(a, b + 2) - 2.0 * e(a, b + 1) + e(a, b)).abs());
            }
        }
        let loose = QuadratureSpec { nodes: 64, tolerance: 1.0 };
        let fine = QuadratureSpec { nodes: 128, tolerance: 1.0 };
        for n1 in 0..=3 {
            for n2 in 0..=3 {
                for &(x, eta) in &[(-3.0, 2.0), (-1.5, -0.5), (0.0, 0.0), (1.0, 3.0), (3.0, -3.0)] {
                    let a = ck_joint_wavefunction(idx(n1), idx(n2), x, eta, p, loose).unwrap();
                    let b = ck_joint_wavefunction(idx(n1), idx(n2), x, eta, p, fine).unwrap();
                    conv = conv.max((a - b).norm());
                }
            }
        }
    }
    check(
        norm < 1e-6 && second < 1e-12 && conv < 1e-8,
        format!("normalization {norm:.1e}, second differences {second:.1e}, node doubling {conv:.1e}"),
    )
}

fn qho(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qho")).args(args).output().expect("spawn qho")
}

fn run_pipeline(preset: &str, dir: &Path, seed: &str) -> Result<Duration, String> {
    let (out, t) = timed(|| qho(&["pipeline", "--preset", preset, "--seed", seed, "--out", dir.to_str().unwrap()]));
    if out.status.success() {
        Ok(t)
    } else {
        Err(format!("{preset}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))
    }
}

fn csv_column(path: &Path, col: usize) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn pipeline_presets() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, ..) in PRESETS {
        let dir = tempfile::tempdir().unwrap();
        let t = run_pipeline(name, dir.path(), "7")?;
        let env = dir.path().join("envelope.csv");
        let nonneg = (1..=3).all(|c| csv_column(&env, c).iter().all(|&v| v >= 0.0));
        let pr: f64 = csv_column(&dir.path().join("density_pr.csv"), 2).iter().sum();
        let panels = ["large_scale.svg", "small_scale.svg", "density.svg"].iter().all(|f| {
            std::fs::read_to_string(dir.path().join(f))
                .is_ok_and(|s| s.starts_with("<svg") && s.trim_end().ends_with("</svg>"))
        });
        ok &= t < Duration::from_secs(120) && nonneg && (pr - 1.0).abs() < 1e-9 && panels;
        lines.push(format!("{name} in {t:.2?}, nonnegative {nonneg}, sum p_R - 1 = {:.1e}, panels {panels}", pr - 1.0));
    }
    check(ok, lines.join("; "))
}

fn manifest_hashes(dir: &Path) -> BTreeMap<String, String> {
    let text = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    serde_json::from_value(v["files"].clone()).unwrap()
}

fn reproducibility() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_pipeline("fig1", a.path(), "42")?;
    run_pipeline("fig1", b.path(), "42")?;
    let (ha, hb) = (manifest_hashes(a.path()), manifest_hashes(b.path()));
    let mut csvs = 0;
    let mut same = true;
    for name in ha.keys().filter(|n| n.ends_with(".csv")) {
        csvs += 1;
        same &= std::fs::read(a.path().join(name)).unwrap() == std::fs::read(b.path().join(name)).unwrap();
    }
    check(
        same && ha == hb && csvs > 0,
        format!("{csvs} CSVs bit-identical: {same}, manifest hashes equal: {}", ha == hb),
    )
}

fn energy_scaling() -> Outcome {
    let mut worst_small = 0.0f64;
    let mut worst_large = 0.0f64;
    for (_, kx, ky, g) in PRESETS {
        let m = MediumParams::grin_default().with_coefficients(kx, ky, g).unwrap();
        let lam = m.wavelength();
        let cfg = ClusterConfig::split_levels(4, 4, &m, 2);
        let axes = GridAxes::from_ranges((-2.0, 1.0, 5), (-2.0, 1.0, 5), (0.0, lam / 8.0, 8192)).unwrap();
        let f = propagate_cluster(&cfg, axes, &m).unwrap();
        let w0 = (lam * 10.0 / PI).sqrt();
        let s = received_energy(&f, (w0 / 2.0, w0 / 2.0), lam).unwrap();
        let d = decompose_envelope(&s, DecomposeOptions::default()).unwrap();
        let scaled = s.with_values(s.values().iter().map(|v| 4.0 * v).collect()).unwrap();
        let ds = decompose_envelope(&scaled, DecomposeOptions::default()).unwrap();
        for (x, y) in ds.small.values().iter().zip(d.small.values()) {
            worst_small = worst_small.max((x / (2.0 * y) - 1.0).abs());
        }
        for (x, y) in ds.large.values().iter().zip(d.large.values()) {
            worst_large = worst_large.max((x / y - 1.0).abs());
        }
    }
    check(
        worst_small <= 1e-12 && worst_large <= 1e-12,
        format!("small-scale ratio error {worst_small:.1e}, large-scale change {worst_large:.1e}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oscillator eigenfunctions are orthonormal", orthonormality),
        ("paraxial residuals converge at second order", residual_order),
        ("cluster transverse norm is conserved", norm_conservation),
        ("capacity formulas reduce correctly", capacity_reductions),
        ("Rayleigh fading capacity matches Monte-Carlo", rayleigh_fading),
        ("hybrid noise density and moments", noise_moments),
        ("CK eigenfunctions, spectrum and joint quadrature", ck_suite),
        ("preset pipelines run and write panels", pipeline_presets),
        ("runs are reproducible from the seed", reproducibility),
        ("envelope split scales with input energy", energy_scaling),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.into_iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS criterion {}: {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {msg}", k + 1);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
