//! Acceptance suite. Runs as a plain binary under `cargo test` and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nradix::bounds::{closed_form_alpha_norm_example, BoundContext, BoundId, BoundParams};
use nradix::decomp::polar;
use nradix::harness::{
    block_positivity_check, buzano_check, gen_matrix, lem4_blocks, mccarthy_check,
    polar_pair_consistency, random_unit_vector, run_verification_with, trial_spec, EnsembleKind,
    EnsembleSpec, VerifyConfig,
};
use nradix::matrix::{example_2x2, example_3x3, CMatrix, CScalar};
use nradix::radius::numerical_radius_default;
use nradix::spectral::{
    abs_factors, extreme_eigenvalues, herm_eig, operator_norm, psd_power, spectral_radius,
};
use nradix::Exec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        CScalar::new(re, im)
    })
}

fn samples(
    kinds: &[EnsembleKind],
    dims: &[usize],
    seed: u64,
    count: usize,
) -> Vec<(EnsembleSpec, CMatrix)> {
    (0..count as u64)
        .map(|i| {
            let s = trial_spec(seed, i, kinds, dims).expect("valid spec");
            (s, gen_matrix(&s).expect("valid sample"))
        })
        .collect()
}

fn worked_example_values() -> Outcome {
    let ctx = BoundContext::new(&example_3x3()).unwrap();
    let h_half = ctx.alpha_norm(0.5).unwrap();
    let h_087 = ctx.alpha_norm(0.87).unwrap();
    let ok = (h_half - 3.14626436994).abs() <= 1e-9 && (h_087 - 2.98118458519).abs() <= 1e-9;
    outcome(ok, format!("h(1/2) = {h_half:.12}, h(0.87) = {h_087:.12}"))
}

fn closed_form_agreement() -> Outcome {
    let ctx = BoundContext::new(&example_3x3()).unwrap();
    let worst = (0..=100)
        .map(|k| {
            let a = k as f64 / 100.0;
            (ctx.alpha_norm(a).unwrap() - closed_form_alpha_norm_example(a)).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-12,
        format!("max |h - closed form| over 101 points = {worst:.2e}"),
    )
}

fn counterexample_matrix() -> Outcome {
    let a = example_2x2();
    let w = numerical_radius_default(&a).unwrap().lo;
    let n = operator_norm(&a);
    let (p, q) = abs_factors(&a).unwrap();
    let s = operator_norm(&(&p + &q));
    let a2 = operator_norm(&(&a * &a));
    let ok =
        (w - 1.0).abs() <= 1e-9 && (n - 2.0).abs() <= 1e-12 && (s - 2.0).abs() <= 1e-9 && a2 > 0.0;
    outcome(
        ok,
        format!("w = {w:.12}, |A| = {n:.15}, ||A|+|A*|| = {s:.12}, |A^2| = {a2}"),
    )
}

fn nilpotent_suite() -> Outcome {
    let mut worst_w = 0.0f64;
    let mut worst_abs = 0.0f64;
    let mut bad = 0;
    for (_, a) in samples(&[EnsembleKind::Nilpotent2], &[4, 6, 8, 10], 4, 200) {
        let n = operator_norm(&a);
        let scale = n.max(1.0);
        let w = numerical_radius_default(&a).unwrap().lo;
        let (p, q) = abs_factors(&a).unwrap();
        let dw = (w - 0.5 * n).abs() / scale;
        let da = (operator_norm(&(&p + &q)) - n).abs() / scale;
        worst_w = worst_w.max(dw);
        worst_abs = worst_abs.max(da);
        if dw > 1e-8 || da > 1e-8 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("200 samples, {bad} failures, worst |w - N/2| = {worst_w:.2e}, worst ||P+Q| - N| = {worst_abs:.2e}"))
}

fn soundness_and_chains() -> (Outcome, Outcome) {
    let kinds = [
        EnsembleKind::General,
        EnsembleKind::Normal,
        EnsembleKind::UnitaryScaled,
        EnsembleKind::Psd,
    ];
    let mut cfg = VerifyConfig::new(1000, (2..=8).collect(), 5);
    cfg.kinds = kinds.to_vec();
    cfg.exec = Exec::Parallel;
    let s = run_verification_with(&cfg);
    let min_slack = s
        .min_slack_per_bound
        .values()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let soundness = outcome(
        s.violations.is_empty() && s.numerical_failures.is_empty(),
        format!(
            "{} trials, {} violations, {} numerical failures, min slack {min_slack:.2e}",
            s.trials,
            s.violations.len(),
            s.numerical_failures.len()
        ),
    );

    let ctx = BoundContext::new(&example_3x3()).unwrap();
    let none = BoundParams::default();
    let factor = 0.5 * ctx.norm().sqrt();
    let lama = ctx.value(BoundId::Lama, &none).unwrap();
    let lamai = ctx.value(BoundId::Lamai, &none).unwrap();
    let margin = (lama - lamai) / factor;
    let chains = outcome(
        s.chain_failures.is_empty() && s.numerical_failures.is_empty() && margin >= 0.07,
        format!(
            "{} chain failures over {} trials, LAMA - LAMAI on the norm-factor scale = {margin:.6}",
            s.chain_failures.len(),
            s.trials
        ),
    );
    (soundness, chains)
}

fn cross_construction() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    let mut worst = 0.0f64;
    for (_, a) in samples(
        &[EnsembleKind::General],
        &(2..=8).collect::<Vec<_>>(),
        7,
        100,
    ) {
        let ctx = BoundContext::new(&a).unwrap();
        let scale = ctx.w().max(1.0);
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for rec in polar_pair_consistency(&ctx, t).unwrap() {
                checked += 1;
                worst = worst.max((rec.catalog - rec.pair).abs() / scale);
                if !rec.agrees(ctx.w()) {
                    bad += 1;
                }
            }
        }
    }
    outcome(
        bad == 0,
        format!("{checked} comparisons, {bad} mismatches, worst relative gap {worst:.2e}"),
    )
}

fn kernel_certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fails = Vec::new();
    for k in 0..500 {
        let n = 1 + k % 8;
        let g = gaussian(&mut rng, n);
        let h = (&g + &g.adjoint()).scale_real(0.5);
        let d = herm_eig(&h).unwrap();
        if d.residual(&h) > 1e-10 * h.frobenius_norm().max(1.0) || d.orthonormality_defect() > 1e-10
        {
            fails.push(format!("herm_eig #{k}"));
        }
    }
    for k in 0..500 {
        let n = 1 + k % 8;
        let a = gaussian(&mut rng, n);
        let pd = polar(&a).unwrap();
        let r = pd.residuals(&a);
        if r.reconstruction > 1e-9 * a.frobenius_norm().max(1.0) || r.partial_isometry > 1e-9 {
            fails.push(format!("polar #{k}"));
        }
        let root = psd_power(&pd.p, 0.5).unwrap();
        if (&(&root * &root) - &pd.p).frobenius_norm() > 1e-9 * operator_norm(&pd.p).max(1.0) {
            fails.push(format!("sqrt #{k}"));
        }
    }
    outcome(
        fails.is_empty(),
        format!("500 Hermitian + 500 polar instances, failures: {fails:?}"),
    )
}

fn lemma_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut buz, mut mc, mut blk, mut lem4) = (0, 0, 0, 0);
    for k in 0..1000 {
        let n = 1 + k % 8;
        let x: Vec<CScalar> = random_unit_vector(&mut rng, n)
            .iter()
            .map(|v| v * (1.0 + k as f64 % 5.0))
            .collect();
        let y = random_unit_vector(&mut rng, n);
        let z = random_unit_vector(&mut rng, n);
        if !buzano_check(&x, &y, &z).unwrap() {
            buz += 1;
        }
        let g = gaussian(&mut rng, n);
        let p = (&g.adjoint() * &g).hermitian_part();
        for e in [1.0, 1.5, 2.0, 3.0] {
            if !mccarthy_check(&p, &z, e).unwrap() {
                mc += 1;
            }
        }
        let (b, c) = (gaussian(&mut rng, n), gaussian(&mut rng, n));
        let (ab, bb, cb) = lem4_blocks(&b, &c);
        let (psd, sampled) = block_positivity_check(&ab, &bb, &cb, 4, k as u64).unwrap();
        if !psd || !sampled {
            blk += 1;
        }
    }
    let mut worst = 0.0f64;
    for k in 0..200 {
        let n = 1 + k % 8;
        let (b, c) = (gaussian(&mut rng, n), gaussian(&mut rng, n));
        let (ab, bb, cb) = lem4_blocks(&b, &c);
        let block = CMatrix::block2(&ab, &cb.adjoint(), &cb, &bb).unwrap();
        let (lmin, lmax) = extreme_eigenvalues(&block).unwrap();
        let scale = lmax.abs().max(1.0);
        worst = worst.min(lmin / scale);
        if lmin < -1e-8 * scale {
            lem4 += 1;
        }
    }
    outcome(
        buz + mc + blk + lem4 == 0,
        format!("failures: Buzano {buz}, McCarthy {mc}, block {blk}, construction PSD {lem4} (worst relative lambda_min {worst:.1e})"),
    )
}

fn normal_equalities() -> Outcome {
    let mut bad = 0;
    let mut worst_w = 0.0f64;
    let mut worst_r = 0.0f64;
    for (_, a) in samples(
        &[EnsembleKind::Normal],
        &(2..=8).collect::<Vec<_>>(),
        10,
        200,
    ) {
        let n = operator_norm(&a);
        let scale = n.max(1.0);
        let dw = (numerical_radius_default(&a).unwrap().lo - n).abs() / scale;
        let dr = (spectral_radius(&a).unwrap() - n).abs() / scale;
        worst_w = worst_w.max(dw);
        worst_r = worst_r.max(dr);
        if dw > 1e-8 || dr > 1e-5 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("200 samples, {bad} failures, worst |w - N| = {worst_w:.2e}, worst |r - N| = {worst_r:.2e}"))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome, Duration, Option<Duration>)> = Vec::new();

    let (o, d) = timed(worked_example_values);
    results.push((
        1,
        "worked example values",
        o,
        d,
        Some(Duration::from_secs(1)),
    ));
    let (o, d) = timed(closed_form_agreement);
    results.push((2, "closed-form agreement", o, d, None));
    let (o, d) = timed(counterexample_matrix);
    results.push((3, "counterexample matrix", o, d, None));
    let (o, d) = timed(nilpotent_suite);
    results.push((4, "square-zero suite", o, d, Some(Duration::from_secs(30))));
    let ((sound, chains), d) = timed(soundness_and_chains);
    results.push((
        5,
        "soundness sweep",
        sound,
        d,
        Some(Duration::from_secs(600)),
    ));
    results.push((6, "refinement chains", chains, d, None));
    let (o, d) = timed(cross_construction);
    results.push((7, "cross-construction consistency", o, d, None));
    let (o, d) = timed(kernel_certificates);
    results.push((8, "kernel certificates", o, d, None));
    let (o, d) = timed(lemma_suites);
    results.push((9, "lemma suites", o, d, None));
    let (o, d) = timed(normal_equalities);
    results.push((10, "normal-operator equalities", o, d, None));

    let mut all = true;
    for (k, name, o, d, limit) in &results {
        let in_time = limit.is_none_or(|l| *d < l);
        let pass = o.pass && in_time;
        all &= pass;
        let limit_note = limit
            .map(|l| format!(" (limit {:.0}s)", l.as_secs_f64()))
            .unwrap_or_default();
        println!(
            "criterion {k:>2} {name}: {} [{:.2}s{limit_note}] {}",
            if pass { "PASS" } else { "FAIL" },
            d.as_secs_f64(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
