//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lrd_core::synth::TwoSeriesDesign;
use lrd_core::{
    decompose, fit_box, global_sharpe, jackknife, measure_field, partition, phi, Error, Kernel,
    KernelParameters, KernelShape, LrdGrid, MeasureField, MeasureKind, PnLSeries,
};

const SEEDS: u64 = 100;
const HORIZONS: [usize; 5] = [50, 100, 250, 500, 1000];
const BETA: f64 = 0.75;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn close(x: f64, oracle: f64, rel: f64, scale: f64) -> bool {
    (x - oracle).abs() <= rel * oracle.abs().max(scale)
}

fn random_walk(rng: &mut ChaCha8Rng, n: usize) -> PnLSeries {
    let offset = rng.random_range(-1e3..1e3);
    let drift = rng.random_range(-0.5..0.5);
    let mut level = offset;
    let values = (0..n)
        .map(|_| {
            level += drift + rng.random_range(-1.0..1.0);
            level
        })
        .collect();
    PnLSeries::from_values(values).unwrap()
}

fn uniform_phi(field: &MeasureField) -> Result<f64, Error> {
    phi(field, &Kernel::uniform(), &Kernel::uniform())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let design = TwoSeriesDesign::default();
    let mut lsr_wins = 0;
    let mut lra_wins = 0;
    for seed in 0..SEEDS {
        let (blue, green) = design.generate(seed).map_err(|e| e.to_string())?;
        for s in [&blue, &green] {
            let sharpe = global_sharpe(s, design.annualization).map_err(|e| e.to_string())?;
            if (sharpe - 0.7).abs() > 0.2 {
                return Err(format!(
                    "seed {seed}: Sharpe {sharpe:.4} outside 0.7 +/- 0.2"
                ));
            }
        }
        let phis = |s: &PnLSeries| -> Result<(f64, f64), Error> {
            let grid = decompose(s, &HORIZONS)?;
            let lsr = lrd_core::phi_indicator(
                &measure_field(&grid, MeasureKind::Lsr)?,
                &Kernel::uniform(),
                &Kernel::uniform(),
            )?;
            let lra = lrd_core::phi_indicator(
                &measure_field(&grid, MeasureKind::lra(BETA))?,
                &Kernel::uniform(),
                &Kernel::uniform(),
            )?;
            Ok((lsr.value, lra.value))
        };
        let (b_lsr, b_lra) = phis(&blue).map_err(|e| e.to_string())?;
        let (g_lsr, g_lra) = phis(&green).map_err(|e| e.to_string())?;
        lsr_wins += usize::from(b_lsr > g_lsr);
        lra_wins += usize::from(b_lra > g_lra);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let detail = format!(
        "Phi[LSR] blue>green in {lsr_wins}/{SEEDS}, Phi[LRA] blue>green in {lra_wins}/{SEEDS}, {elapsed:.1} s"
    );
    if lsr_wins >= 90 && lra_wins >= 90 && elapsed < 30.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gaussian_kernels(n: usize, rho: f64) -> (Kernel, Kernel) {
    let p = KernelParameters::for_length(n, rho);
    (
        Kernel::new(KernelShape::Gaussian, p.tau, p.delta_t).unwrap(),
        Kernel::new(KernelShape::Gaussian, rho, p.delta_s).unwrap(),
    )
}

fn criterion_2() -> Outcome {
    let design = TwoSeriesDesign::default();
    let mut wins = 0;
    for seed in 0..SEEDS {
        let (blue, green) = design.generate(seed).map_err(|e| e.to_string())?;
        let lsr = |s: &PnLSeries| measure_field(&decompose(s, &HORIZONS)?, MeasureKind::Lsr);
        let blue_field = lsr(&blue).map_err(|e| e.to_string())?;
        let green_field = lsr(&green).map_err(|e| e.to_string())?;
        let mut all = true;
        for rho in HORIZONS {
            let (kt, ks) = gaussian_kernels(design.n, rho as f64);
            let b = phi(&blue_field, &ks, &kt).map_err(|e| e.to_string())?;
            let g = phi(&green_field, &ks, &kt).map_err(|e| e.to_string())?;
            all &= g > b;
        }
        wins += usize::from(all);
    }
    let detail = format!("Phi[LSR] green>blue at every rho in {wins}/{SEEDS}");
    if wins >= 90 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_field(rng: &mut ChaCha8Rng) -> MeasureField {
    let n = rng.random_range(200..=2000);
    let candidates: Vec<usize> = [5, 10, 20, 25, 50, 100, 200, 250, 500, 1000]
        .into_iter()
        .filter(|&h| n / h >= 2)
        .collect();
    let mut horizons: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.6))
        .collect();
    if horizons.is_empty() {
        horizons.push(candidates[0]);
    }
    let series = random_walk(rng, n);
    let grid = decompose(&series, &horizons).unwrap();
    let kind = match rng.random_range(0..3) {
        0 => MeasureKind::Lsr,
        1 => MeasureKind::lra(rng.random_range(0.0..2.0)),
        _ => MeasureKind::Lra {
            beta: rng.random_range(0.0..2.0),
            normalize: true,
        },
    };
    measure_field(&grid, kind).unwrap()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for _ in 0..100 {
        let field = random_field(&mut rng);
        let n = field.grid().n();
        let reference = uniform_phi(&field).map_err(|e| e.to_string())?;
        let mut rhos: Vec<f64> = field.horizons().iter().map(|&h| h as f64).collect();
        rhos.extend((0..5).map(|_| rng.random_range(1.0..3000.0)));
        for rho in rhos {
            let p = KernelParameters::for_length(n, rho);
            let kt = Kernel::new(KernelShape::Uniform, p.tau, p.delta_t).unwrap();
            let ks = Kernel::new(KernelShape::Uniform, rho, p.delta_s).unwrap();
            let value = phi(&field, &ks, &kt).map_err(|e| e.to_string())?;
            if value.to_bits() != reference.to_bits() {
                return Err(format!("rho {rho}: {value:e} != {reference:e}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (field, rho) pairs bit-identical"))
}

/// Slope, intercept and RMS residual from the raw 2x2 normal equations.
fn normal_equation_fit(y: &[f64]) -> (f64, f64, f64) {
    let h = y.len() as f64;
    let (mut st, mut stt, mut sy, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for (t, &v) in y.iter().enumerate() {
        let t = t as f64;
        st += t;
        stt += t * t;
        sy += v;
        sty += t * v;
    }
    let det = h * stt - st * st;
    let intercept = (stt * sy - st * sty) / det;
    let slope = (h * sty - st * sy) / det;
    let ssr: f64 = y
        .iter()
        .enumerate()
        .map(|(t, &v)| (v - intercept - slope * t as f64).powi(2))
        .sum();
    (slope, intercept, (ssr / h).sqrt())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut boxes = 0;
    for case in 0..1000 {
        let n = rng.random_range(2..=64);
        let series = random_walk(&mut rng, n);
        for h in 2..=n.min(16) {
            for b in partition(&series, h).unwrap() {
                let fit = fit_box(&series, b).map_err(|e| e.to_string())?;
                let y = &series.values()[b.start..b.end];
                let (slope, _, risk) = normal_equation_fit(y);
                let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())) * 1e-3;
                let ok = close(fit.slope, slope, 1e-9, scale / h as f64)
                    && close(fit.local_risk, risk, 1e-9, scale)
                    && close(fit.local_return, slope * (h as f64 - 1.0), 1e-9, scale);
                if !ok {
                    return Err(format!(
                        "case {case}, h {h}, box {}: ({}, {}, {}) vs oracle ({slope}, {risk}, {})",
                        b.index,
                        fit.slope,
                        fit.local_risk,
                        fit.local_return,
                        slope * (h as f64 - 1.0)
                    ));
                }
                boxes += 1;
            }
        }
    }
    Ok(format!(
        "{boxes} boxes over 1000 series match the normal-equation oracle"
    ))
}

fn fields_close(a: &MeasureField, b: &MeasureField, factor: f64) -> bool {
    a.values()
        .iter()
        .flatten()
        .zip(b.values().iter().flatten())
        .all(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => close(*x * factor, *y, 1e-9, 0.0),
            (None, None) => true,
            _ => false,
        })
}

fn local_risk_scale(grid: &LrdGrid) -> f64 {
    grid.fits()
        .iter()
        .flatten()
        .map(|f| f.local_risk)
        .fold(0.0, f64::max)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let n = rng.random_range(64..=600);
        let series = random_walk(&mut rng, n);
        let horizons = [4, 8, 16, 32];
        let grid = decompose(&series, &horizons).unwrap();

        let a = rng.random_range(0.01..100.0);
        let scaled = decompose(&series.affine(a, 0.0).unwrap(), &horizons).unwrap();
        let lsr = measure_field(&grid, MeasureKind::Lsr).unwrap();
        let lsr_scaled = measure_field(&scaled, MeasureKind::Lsr).unwrap();
        if !fields_close(&lsr, &lsr_scaled, 1.0) {
            return Err(format!("case {case}: LSR changed under x -> {a} x"));
        }

        let lra0 = measure_field(&grid, MeasureKind::lra(0.0)).unwrap();
        let ret = measure_field(&grid, MeasureKind::LocalReturn).unwrap();
        if !fields_close(&lra0, &ret, 1.0) {
            return Err(format!(
                "case {case}: LRA with beta 0 differs from local return"
            ));
        }

        let norm = measure_field(
            &grid,
            MeasureKind::Lra {
                beta: rng.random_range(0.0..2.0),
                normalize: true,
            },
        )
        .unwrap();
        let cells: Vec<f64> = norm.values().iter().flatten().flatten().copied().collect();
        let mean = cells.iter().sum::<f64>() / cells.len() as f64;
        let sd =
            (cells.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / cells.len() as f64).sqrt();
        if !close(sd, 1.0, 1e-9, 0.0) {
            return Err(format!("case {case}: normalized LRA has std {sd}"));
        }

        // Affine boxes have zero risk up to rounding; perturbed ones do not.
        let (c0, c1) = (rng.random_range(-1e3..1e3), rng.random_range(-5.0..5.0));
        let mut line: Vec<f64> = (0..n).map(|t| c0 + c1 * t as f64).collect();
        let range = line.iter().fold(f64::MIN, |m, &v| m.max(v))
            - line.iter().fold(f64::MAX, |m, &v| m.min(v));
        let tol = 1e-9 * range.max(1.0);
        let affine_grid =
            decompose(&PnLSeries::from_values(line.clone()).unwrap(), &horizons).unwrap();
        if affine_grid
            .fits()
            .iter()
            .flatten()
            .any(|f| f.local_risk > tol)
        {
            return Err(format!("case {case}: affine box with nonzero risk"));
        }
        let bumped = rng.random_range(0..n);
        line[bumped] += range.max(1.0) * 1e-3;
        let bumped_grid = decompose(&PnLSeries::from_values(line).unwrap(), &horizons).unwrap();
        for f in bumped_grid.fits().iter().flatten() {
            let hit = f.time_box.start <= bumped && bumped < f.time_box.end;
            if hit != (f.local_risk > tol) {
                return Err(format!(
                    "case {case}: box [{}, {}) risk {} disagrees with affinity",
                    f.time_box.start, f.time_box.end, f.local_risk
                ));
            }
        }

        let h = horizons[rng.random_range(0..horizons.len())];
        let trimmed = PnLSeries::from_values(series.values()[n % h..].to_vec()).unwrap();
        let fwd = decompose(&trimmed, &[h]).unwrap();
        let rev = decompose(&trimmed.reversed(), &[h]).unwrap();
        let (fwd, rev) = (&fwd.fits()[0], &rev.fits()[0]);
        let scale = 1e-3 * local_risk_scale(&decompose(&trimmed, &[h]).unwrap());
        for (f, r) in fwd.iter().zip(rev.iter().rev()) {
            if !close(-r.local_return, f.local_return, 1e-9, scale)
                || !close(r.local_risk, f.local_risk, 1e-9, 0.0)
            {
                return Err(format!(
                    "case {case}: time reversal broke box {}",
                    f.time_box.index
                ));
            }
        }
    }
    Ok("scale, beta=0, normalization, affinity and reversal checks hold on 200 series".into())
}

fn criterion_6() -> Outcome {
    let mean = |xs: &[f64]| Ok(xs.iter().sum::<f64>() / xs.len() as f64);
    let hand = jackknife(&[1.0, 2.0, 3.0], mean).map_err(|e| e.to_string())?;
    if hand.value != 2.0 || (hand.error - 0.5774).abs() > 5e-5 {
        return Err(format!(
            "{{1,2,3}}: value {}, error {}",
            hand.value, hand.error
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..1000 {
        let m = rng.random_range(2..=50);
        let loc = rng.random_range(-100.0..100.0);
        let spread = 10f64.powf(rng.random_range(-3.0..3.0));
        let xs: Vec<f64> = (0..m)
            .map(|_| loc + spread * rng.random_range(-1.0..1.0))
            .collect();
        let est = jackknife(&xs, mean).map_err(|e| e.to_string())?;
        let xbar = xs.iter().sum::<f64>() / m as f64;
        let s = (xs.iter().map(|x| (x - xbar).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
        let oracle = s / (m as f64).sqrt();
        if !close(est.error, oracle, 1e-9, 0.0) {
            return Err(format!("case {case} (m={m}): {} vs {oracle}", est.error));
        }
    }
    Ok(format!(
        "{{1,2,3}} error {:.4}; 1000 samples match s/sqrt(m)",
        hand.error
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let field = random_field(&mut rng);
        let n = field.grid().n();
        let hs = field.horizons();
        let time_range = (n - 1) as f64;
        let scale_range = (hs[hs.len() - 1] - hs[0]).max(hs[0]) as f64;
        let rho = hs[rng.random_range(0..hs.len())] as f64;
        let kt = Kernel::new(KernelShape::Gaussian, time_range, 1e6 * time_range).unwrap();
        let ks = Kernel::new(KernelShape::Gaussian, rho, 1e6 * scale_range).unwrap();
        let wide = phi(&field, &ks, &kt).map_err(|e| e.to_string())?;
        let flat = uniform_phi(&field).map_err(|e| e.to_string())?;
        let rel = (wide - flat).abs() / flat.abs();
        worst = worst.max(rel);
        if rel.is_nan() || rel > 1e-6 {
            return Err(format!("case {case}: {wide} vs {flat} (rel {rel:e})"));
        }
    }
    Ok(format!("100 fields, worst relative deviation {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let line = PnLSeries::from_values((0..400).map(|t| 3.0 + 0.25 * t as f64).collect()).unwrap();
    let grid = decompose(&line, &[10, 20, 50, 100]).map_err(|e| e.to_string())?;
    let lsr = measure_field(&grid, MeasureKind::Lsr).map_err(|e| e.to_string())?;
    if lsr.flagged_count() != grid.cell_count() {
        return Err(format!(
            "{} of {} LSR cells flagged",
            lsr.flagged_count(),
            grid.cell_count()
        ));
    }
    match uniform_phi(&lsr) {
        Err(Error::ZeroKernelMass { .. }) => {}
        other => return Err(format!("Phi over an all-flagged field gave {other:?}")),
    }
    match measure_field(&grid, MeasureKind::lra(BETA)) {
        Err(Error::ZeroMeanRisk { .. }) => {}
        other => return Err(format!("LRA gave {:?}", other.map(|_| ()))),
    }
    match global_sharpe(&line, lrd_core::ANNUALIZE_DAILY) {
        Err(Error::ZeroVolatility { .. }) => {}
        other => return Err(format!("Sharpe gave {other:?}")),
    }
    Ok("all-flagged LSR, ZeroMeanRisk, ZeroVolatility".into())
}

fn lrd(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lrd"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "lrd {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let cfg = configs();
    let spec = |name: &str| cfg.join(name).to_string_lossy().into_owned();

    for (spec_name, outs) in [
        ("blue.toml", ["b1.csv", "b2.csv"]),
        ("green.toml", ["g1.csv", "g2.csv"]),
    ] {
        for out in outs {
            lrd(&[
                "synth",
                "--spec",
                &spec(spec_name),
                "--seed",
                "2024",
                "--out",
                &path(out),
            ])?;
        }
        let (a, b) = (
            std::fs::read(path(outs[0])).map_err(|e| e.to_string())?,
            std::fs::read(path(outs[1])).map_err(|e| e.to_string())?,
        );
        if a != b {
            return Err(format!("synth {spec_name} differs between runs"));
        }
    }

    let mut reports = Vec::new();
    for json in ["r1.json", "r2.json"] {
        let text = lrd(&[
            "compare",
            &path("b1.csv"),
            &path("g1.csv"),
            "--config",
            &spec("gaussian.toml"),
            "--json",
            &path(json),
        ])?;
        let json = std::fs::read(path(json)).map_err(|e| e.to_string())?;
        reports.push((text, json));
    }
    if reports[0] != reports[1] {
        return Err("compare output differs between runs".into());
    }
    Ok("synth CSV and compare text/JSON byte-identical across runs".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("two-series experiment, uniform kernels", criterion_1),
        ("two-series experiment, gaussian kernels", criterion_2),
        ("uniform-kernel rho independence", criterion_3),
        ("decomposition oracle", criterion_4),
        ("invariance suite", criterion_5),
        ("jackknife oracle", criterion_6),
        ("wide-kernel limit", criterion_7),
        ("degeneracy handling", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  criterion {}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {}: {name} ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
