//! Random ensembles, the supporting-inequality suites and the batch
//! verification sweep.
//!
//! Randomness is ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`, with
//! standard normal draws from `rand_distr`. Trial `i` of a run with seed `s`
//! uses the first `u64` of stream `i` of the generator seeded with `s`, so any
//! trial can be replayed on its own from `(s, i)` or from the recorded
//! [`EnsembleSpec`].

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    nilpotent_identity_check, pair_bound_value, BoundContext, BoundId, BoundParams, CatalogGrid,
    PairVariant, SLACK_TOL,
};
use crate::decomp::polar;
use crate::error::{Error, Result};
use crate::matrix::{inner, quadratic_form, vec_norm, CMatrix, CScalar};
use crate::par::Exec;
use crate::spectral::{extreme_eigenvalues, operator_norm, psd_power, require_psd};

/// Norm band that verification matrices are rescaled into.
pub const NORM_BAND: (f64, f64) = (0.5, 10.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnsembleKind {
    General,
    /// `[[0, X], [0, 0]]` with `X` general, so `A² = 0`.
    Nilpotent2,
    Normal,
    UnitaryScaled,
    Psd,
    /// A general sample whose trial also checks the pair bounds on its
    /// polar factors against the catalog.
    PolarPair,
}

impl EnsembleKind {
    pub const ALL: &'static [EnsembleKind] = &[
        EnsembleKind::General,
        EnsembleKind::Nilpotent2,
        EnsembleKind::Normal,
        EnsembleKind::UnitaryScaled,
        EnsembleKind::Psd,
        EnsembleKind::PolarPair,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub seed: u64,
    pub scale: f64,
}

fn gaussian(rng: &mut ChaCha8Rng) -> CScalar {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    CScalar::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random unit vector, uniform on the complex sphere.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<CScalar> {
    loop {
        let v: Vec<CScalar> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Unitary from modified Gram–Schmidt on the columns of a Gaussian sample.
fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut cols: Vec<Vec<CScalar>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<CScalar> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let c = inner(&v, q);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    CMatrix::from_columns(n, &cols)
}

/// Deterministic sample from an ensemble.
pub fn gen_matrix(spec: &EnsembleSpec) -> Result<CMatrix> {
    let n = spec.dim;
    if n == 0 {
        return Err(Error::Contract(
            "ensemble dimension must be at least 1".into(),
        ));
    }
    if !(spec.scale.is_finite() && spec.scale > 0.0) {
        return Err(Error::Contract(format!(
            "ensemble scale must be positive, got {}",
            spec.scale
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let raw = match spec.kind {
        EnsembleKind::General | EnsembleKind::PolarPair => gaussian_matrix(&mut rng, n, n),
        EnsembleKind::Nilpotent2 => {
            if !n.is_multiple_of(2) {
                return Err(Error::Contract(format!(
                    "NILPOTENT2 needs an even dimension, got {n}"
                )));
            }
            let h = n / 2;
            let x = gaussian_matrix(&mut rng, h, h);
            let z = CMatrix::zeros(h, h);
            CMatrix::block2(&z, &x, &z, &z)?
        }
        EnsembleKind::Normal => {
            let q = random_unitary(&mut rng, n);
            let d: Vec<CScalar> = (0..n).map(|_| gaussian(&mut rng)).collect();
            &(&q * &CMatrix::from_diag(&d)) * &q.adjoint()
        }
        EnsembleKind::UnitaryScaled => random_unitary(&mut rng, n),
        EnsembleKind::Psd => {
            let g = gaussian_matrix(&mut rng, n, n);
            (&g.adjoint() * &g).hermitian_part()
        }
    };
    Ok(raw.scale_real(spec.scale))
}

/// Seed of trial `index` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// Ensemble spec of one verification trial: kind and dimension drawn from
/// the allowed sets, scale chosen so `‖A‖` lands uniformly in [`NORM_BAND`].
pub fn trial_spec(
    seed: u64,
    index: u64,
    kinds: &[EnsembleKind],
    dims: &[usize],
) -> Result<EnsembleSpec> {
    if kinds.is_empty() || dims.is_empty() {
        return Err(Error::Contract(
            "verification needs at least one ensemble kind and one dimension".into(),
        ));
    }
    let ts = trial_seed(seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(ts);
    let kind = kinds[rng.random_range(0..kinds.len())];
    let mut dim = dims[rng.random_range(0..dims.len())];
    if kind == EnsembleKind::Nilpotent2 && !dim.is_multiple_of(2) {
        dim += 1;
    }
    let target = rng.random_range(NORM_BAND.0..=NORM_BAND.1);
    let unit = EnsembleSpec {
        kind,
        dim,
        seed: ts,
        scale: 1.0,
    };
    let norm = operator_norm(&gen_matrix(&unit)?);
    let scale = if norm > 0.0 { target / norm } else { 1.0 };
    Ok(EnsembleSpec { scale, ..unit })
}

/// `B = U|A|^{1−t}`, `C = |A|^t`, so `BC = A` and `|B|` commutes with `C`.
pub fn commuting_pair(a: &CMatrix, t: f64) -> Result<(CMatrix, CMatrix)> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Contract(format!("t must lie in [0, 1], got {t}")));
    }
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "commuting pair needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let pd = polar(a)?;
    let b = &pd.u * &pd.abs_spectrum.psd_power(1.0 - t)?;
    let c = pd.abs_spectrum.psd_power(t)?;
    Ok((b, c))
}

fn require_unit(x: &[CScalar], what: &str) -> Result<()> {
    let n = vec_norm(x);
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "{what} must be a unit vector, has norm {n}"
        )));
    }
    Ok(())
}

/// `|⟨x,z⟩⟨z,y⟩| ≤ (‖x‖‖y‖ + |⟨x,y⟩|)/2` for unit `z`.
pub fn buzano_check(x: &[CScalar], y: &[CScalar], z: &[CScalar]) -> Result<bool> {
    if x.len() != z.len() || y.len() != z.len() {
        return Err(Error::Dimension(
            "Buzano check needs vectors of equal length".into(),
        ));
    }
    require_unit(z, "z")?;
    let lhs = (inner(x, z) * inner(z, y)).norm();
    let prod = vec_norm(x) * vec_norm(y);
    let rhs = 0.5 * (prod + inner(x, y).norm());
    Ok(lhs <= rhs + 1e-10 * prod.max(1.0))
}

/// `⟨Px,x⟩^p ≤ ⟨P^p x,x⟩` for PSD `P`, unit `x`, `p ≥ 1`.
pub fn mccarthy_check(p_mat: &CMatrix, x: &[CScalar], p: f64) -> Result<bool> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Contract(format!(
            "McCarthy exponent must be at least 1, got {p}"
        )));
    }
    if x.len() != p_mat.rows() {
        return Err(Error::Dimension(
            "McCarthy check: vector length does not match the matrix".into(),
        ));
    }
    require_psd(p_mat, "McCarthy operator")?;
    require_unit(x, "x")?;
    let lhs = quadratic_form(p_mat, x).re.max(0.0).powf(p);
    let rhs = quadratic_form(&psd_power(p_mat, p)?, x).re;
    Ok(lhs <= rhs + 1e-10 * operator_norm(p_mat).powf(p).max(1.0))
}

/// Positivity of `[[A, C*], [C, B]]` and the sampled form of its
/// characterisation `|⟨Cx,y⟩|² ≤ ⟨Ax,x⟩⟨By,y⟩`.
pub fn block_positivity_check(
    ablk: &CMatrix,
    bblk: &CMatrix,
    c: &CMatrix,
    samples: usize,
    seed: u64,
) -> Result<(bool, bool)> {
    let n = c.rows();
    if !c.is_square()
        || !ablk.is_square()
        || !bblk.is_square()
        || ablk.rows() != n
        || bblk.rows() != n
    {
        return Err(Error::Dimension(
            "block check needs square blocks of equal size".into(),
        ));
    }
    require_psd(ablk, "upper-left block")?;
    require_psd(bblk, "lower-right block")?;
    let block = CMatrix::block2(ablk, &c.adjoint(), c, bblk)?;
    let (lmin, _) = extreme_eigenvalues(&block.hermitian_part())?;
    let scale = (operator_norm(ablk) * operator_norm(bblk)).max(1.0);
    let block_psd = lmin >= -SLACK_TOL * scale.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut holds = true;
    for _ in 0..samples {
        let x = random_unit_vector(&mut rng, n);
        let y = random_unit_vector(&mut rng, n);
        let lhs = inner(&c.mat_vec(&x), &y).norm_sqr();
        let rhs = quadratic_form(ablk, &x).re * quadratic_form(bblk, &y).re;
        holds &= lhs <= rhs + 1e-10 * scale;
    }
    Ok((block_psd, holds))
}

/// Runs one instance of each supporting-inequality check; returns the names
/// of the checks that failed.
pub fn lemma_suite(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<String>> {
    let mut failed = Vec::new();
    let x: Vec<CScalar> = (0..n).map(|_| gaussian(rng)).collect();
    let y: Vec<CScalar> = (0..n).map(|_| gaussian(rng)).collect();
    let z = random_unit_vector(rng, n);
    if !buzano_check(&x, &y, &z)? {
        failed.push("buzano".to_string());
    }
    let g = gaussian_matrix(rng, n, n);
    let pm = (&g.adjoint() * &g).hermitian_part();
    for &p in &[1.0, 1.5, 2.0, 3.0] {
        if !mccarthy_check(&pm, &z, p)? {
            failed.push(format!("mccarthy(p={p})"));
        }
    }
    let b = gaussian_matrix(rng, n, n);
    let c = gaussian_matrix(rng, n, n);
    let (ablk, bblk, cblk) = lem4_blocks(&b, &c);
    let (psd, sampled) = block_positivity_check(&ablk, &bblk, &cblk, 8, rng.next_u64())?;
    if !psd {
        failed.push("block_psd".to_string());
    }
    if psd && !sampled {
        failed.push("block_sampled".to_string());
    }
    Ok(failed)
}

/// Blocks of `[[BB*, BC], [C*B*, C*C]]` in `[[A, C*], [C, B]]` layout.
pub fn lem4_blocks(b: &CMatrix, c: &CMatrix) -> (CMatrix, CMatrix, CMatrix) {
    let ablk = (b * &b.adjoint()).hermitian_part();
    let bblk = (&c.adjoint() * c).hermitian_part();
    let cblk = (b * c).adjoint();
    (ablk, bblk, cblk)
}

/// One catalog value next to the pair bound its proof reduces it to.
#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyRecord {
    pub bound: BoundId,
    pub params: BoundParams,
    pub variant: &'static str,
    pub catalog: f64,
    pub pair: f64,
}

impl ConsistencyRecord {
    pub fn agrees(&self, w: f64) -> bool {
        (self.catalog - self.pair).abs() <= SLACK_TOL * w.max(1.0)
    }
}

/// Evaluates the pair bounds on `commuting_pair(A, t)` (and on the pair of
/// `A*` for the entry whose proof runs through the adjoint) next to the
/// catalog entries they reproduce.
pub fn polar_pair_consistency(ctx: &BoundContext, t: f64) -> Result<Vec<ConsistencyRecord>> {
    let a = ctx.matrix();
    let (b, c) = commuting_pair(a, t)?;
    let (bs, cs) = commuting_pair(&a.adjoint(), t)?;
    let mut out = Vec::new();
    let mut push = |bound: BoundId,
                    params: BoundParams,
                    variant: PairVariant,
                    pb: &CMatrix,
                    pc: &CMatrix,
                    pp: BoundParams|
     -> Result<()> {
        out.push(ConsistencyRecord {
            bound,
            params,
            variant: variant.name(),
            catalog: ctx.value(bound, &params)?,
            pair: pair_bound_value(pb, pc, variant, &pp)?,
        });
        Ok(())
    };
    let pt = BoundParams::t(t);
    let none = BoundParams::default();
    push(BoundId::Th1, pt, PairVariant::Lem4II, &b, &c, none)?;
    push(BoundId::Th2, pt, PairVariant::Lem4III, &b, &c, none)?;
    push(BoundId::Th6, pt, PairVariant::Lem7, &b, &c, none)?;
    push(BoundId::Th8Mid, pt, PairVariant::Lem9, &b, &c, none)?;
    for &alpha in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        push(
            BoundId::Th3,
            pt.with_alpha(alpha),
            PairVariant::Lem4IV,
            &bs,
            &cs,
            BoundParams::alpha(alpha),
        )?;
        for &p in &[1.0, 2.0] {
            let lp = BoundParams::default().with_p(p).with_fg_alpha(alpha);
            push(
                BoundId::Th4Power,
                pt.with_p(p).with_fg_alpha(alpha),
                PairVariant::Lem5,
                &b,
                &c,
                lp,
            )?;
        }
    }
    for &r in &[2.0, 3.0] {
        push(
            BoundId::Th7Mid,
            pt.with_r(r),
            PairVariant::Lem8,
            &b,
            &c,
            BoundParams::default().with_r(r),
        )?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// verification sweep

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub kinds: Vec<EnsembleKind>,
    pub grid: CatalogGrid,
    /// `t` values for the polar-pair consistency checks.
    pub pair_t: Vec<f64>,
    /// Relative slack tolerance.
    pub slack_tol: f64,
    pub exec: Exec,
    /// Test hook: pushes every value of this entry to the wrong side of `w`.
    pub fault: Option<BoundId>,
}

impl VerifyConfig {
    pub fn new(trials: usize, dims: Vec<usize>, seed: u64) -> Self {
        VerifyConfig {
            trials,
            dims,
            seed,
            kinds: EnsembleKind::ALL.to_vec(),
            grid: CatalogGrid::default(),
            pair_t: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            slack_tol: SLACK_TOL,
            exec: Exec::default(),
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub bound: String,
    pub params: BoundParams,
    pub spec: EnsembleSpec,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckFailure {
    pub trial: usize,
    pub spec: EnsembleSpec,
    /// What failed, e.g. a chain id, a lemma name or an error message.
    pub what: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifySummary {
    pub trials: usize,
    pub violations: Vec<Violation>,
    pub min_slack_per_bound: BTreeMap<String, f64>,
    pub chain_failures: Vec<CheckFailure>,
    pub consistency_failures: Vec<CheckFailure>,
    pub nilpotent_failures: Vec<CheckFailure>,
    pub lemma_failures: Vec<CheckFailure>,
    /// Trials that could not be completed; recorded, not fatal.
    pub numerical_failures: Vec<CheckFailure>,
}

impl VerifySummary {
    /// No inequality or identity failed.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
            && self.chain_failures.is_empty()
            && self.consistency_failures.is_empty()
            && self.nilpotent_failures.is_empty()
            && self.lemma_failures.is_empty()
    }
}

#[derive(Default)]
struct TrialOutcome {
    violations: Vec<Violation>,
    min_slack: BTreeMap<String, f64>,
    chain_failures: Vec<CheckFailure>,
    consistency_failures: Vec<CheckFailure>,
    nilpotent_failures: Vec<CheckFailure>,
    lemma_failures: Vec<CheckFailure>,
    numerical_failures: Vec<CheckFailure>,
}

fn failure(
    trial: usize,
    spec: &EnsembleSpec,
    what: impl Into<String>,
    values: Vec<f64>,
) -> CheckFailure {
    CheckFailure {
        trial,
        spec: *spec,
        what: what.into(),
        values,
    }
}

fn run_trial(cfg: &VerifyConfig, trial: usize) -> TrialOutcome {
    let mut out = TrialOutcome::default();
    let spec = match trial_spec(cfg.seed, trial as u64, &cfg.kinds, &cfg.dims) {
        Ok(s) => s,
        Err(e) => {
            let placeholder = EnsembleSpec {
                kind: cfg.kinds.first().copied().unwrap_or(EnsembleKind::General),
                dim: 0,
                seed: 0,
                scale: 0.0,
            };
            out.numerical_failures
                .push(failure(trial, &placeholder, e.to_string(), vec![]));
            return out;
        }
    };
    if let Err(e) = check_trial(cfg, trial, &spec, &mut out) {
        out.numerical_failures
            .push(failure(trial, &spec, e.to_string(), vec![]));
    }
    out
}

fn check_trial(
    cfg: &VerifyConfig,
    trial: usize,
    spec: &EnsembleSpec,
    out: &mut TrialOutcome,
) -> Result<()> {
    let a = gen_matrix(spec)?;
    let ctx = BoundContext::new(&a)?;
    let w = ctx.w();
    let tol = cfg.slack_tol * w.max(1.0);

    for mut r in ctx.catalog(&cfg.grid, Exec::Sequential)? {
        let crate::bounds::BoundLabel::Catalog(id) = r.id else {
            continue;
        };
        if cfg.fault == Some(id) {
            r.slack = -(r.slack.abs() + 1.0) * w.max(1.0);
        }
        let name = id.name().to_string();
        let entry = out.min_slack.entry(name.clone()).or_insert(f64::INFINITY);
        *entry = entry.min(r.slack);
        if r.slack < -tol {
            out.violations.push(Violation {
                trial,
                bound: name,
                params: r.params,
                spec: *spec,
                slack: r.slack,
            });
        }
    }

    for chain in ctx.refinement_chains(&cfg.grid.t)? {
        if !chain.monotone {
            out.chain_failures.push(failure(
                trial,
                spec,
                format!("chain {}", chain.id),
                chain.values,
            ));
        }
    }

    if spec.kind == EnsembleKind::PolarPair {
        for &t in &cfg.pair_t {
            for rec in polar_pair_consistency(&ctx, t)? {
                if !rec.agrees(w) {
                    let what = format!("{} vs {} at {:?}", rec.bound, rec.variant, rec.params);
                    out.consistency_failures.push(failure(
                        trial,
                        spec,
                        what,
                        vec![rec.catalog, rec.pair],
                    ));
                }
                if rec.pair < w - tol {
                    let slack = rec.pair - w;
                    out.violations.push(Violation {
                        trial,
                        bound: rec.variant.to_string(),
                        params: rec.params,
                        spec: *spec,
                        slack,
                    });
                }
            }
        }
    }

    if spec.kind == EnsembleKind::Nilpotent2 {
        let c = nilpotent_identity_check(&a)?;
        if c.is_square_zero && !(c.w_half_norm && c.abs_sum_norm) {
            out.nilpotent_failures.push(failure(
                trial,
                spec,
                format!("{c:?}"),
                vec![w, ctx.norm()],
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    for name in lemma_suite(&mut rng, spec.dim)? {
        out.lemma_failures.push(failure(trial, spec, name, vec![]));
    }
    Ok(())
}

/// Verification sweep with default settings.
pub fn run_verification(trials: usize, dims: &[usize], seed: u64) -> VerifySummary {
    run_verification_with(&VerifyConfig::new(trials, dims.to_vec(), seed))
}

/// Runs every trial (possibly in parallel) and merges the outcomes in trial
/// order, so the summary does not depend on the execution strategy.
pub fn run_verification_with(cfg: &VerifyConfig) -> VerifySummary {
    let outcomes = cfg.exec.map_range(cfg.trials, |i| run_trial(cfg, i));
    let mut s = VerifySummary {
        trials: cfg.trials,
        ..Default::default()
    };
    for o in outcomes {
        s.violations.extend(o.violations);
        for (k, v) in o.min_slack {
            let e = s.min_slack_per_bound.entry(k).or_insert(f64::INFINITY);
            *e = e.min(v);
        }
        s.chain_failures.extend(o.chain_failures);
        s.consistency_failures.extend(o.consistency_failures);
        s.nilpotent_failures.extend(o.nilpotent_failures);
        s.lemma_failures.extend(o.lemma_failures);
        s.numerical_failures.extend(o.numerical_failures);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::example_3x3;
    use crate::radius::numerical_radius_default;
    use crate::spectral::spectral_radius;

    fn spec(kind: EnsembleKind, dim: usize, seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            kind,
            dim,
            seed,
            scale: 1.0,
        }
    }

    #[test]
    fn ensembles_are_deterministic_and_structured() {
        for &k in EnsembleKind::ALL {
            let s = spec(k, 4, 17);
            assert_eq!(gen_matrix(&s).unwrap(), gen_matrix(&s).unwrap());
        }
        let a = gen_matrix(&spec(EnsembleKind::Nilpotent2, 6, 3)).unwrap();
        assert!(operator_norm(&(&a * &a)) <= 1e-12 * operator_norm(&a).powi(2));
        let n = gen_matrix(&spec(EnsembleKind::Normal, 5, 4)).unwrap();
        let w = numerical_radius_default(&n).unwrap();
        assert!((w.lo - operator_norm(&n)).abs() <= 1e-8);
        let u = gen_matrix(&spec(EnsembleKind::UnitaryScaled, 5, 4)).unwrap();
        assert!((&(&u.adjoint() * &u) - &CMatrix::identity(5)).max_abs() < 1e-12);
        let p = gen_matrix(&spec(EnsembleKind::Psd, 5, 4)).unwrap();
        assert!(require_psd(&p, "sample").is_ok());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(
            gen_matrix(&spec(EnsembleKind::Nilpotent2, 3, 1)),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            gen_matrix(&spec(EnsembleKind::General, 0, 1)),
            Err(Error::Contract(_))
        ));
        let bad = EnsembleSpec {
            scale: -1.0,
            ..spec(EnsembleKind::General, 2, 1)
        };
        assert!(matches!(gen_matrix(&bad), Err(Error::Contract(_))));
    }

    #[test]
    fn trial_specs_land_in_norm_band() {
        for i in 0..30 {
            let s = trial_spec(42, i, EnsembleKind::ALL, &[2, 3, 5]).unwrap();
            let n = operator_norm(&gen_matrix(&s).unwrap());
            assert!(n >= NORM_BAND.0 - 1e-9 && n <= NORM_BAND.1 + 1e-9, "{n}");
            if s.kind == EnsembleKind::Nilpotent2 {
                assert!(s.dim.is_multiple_of(2));
            }
        }
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
    }

    #[test]
    fn commuting_pair_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = gaussian_matrix(&mut rng, 4, 4);
        let (b, c) = commuting_pair(&a, 0.0).unwrap();
        assert!((&b - &a).max_abs() < 1e-12);
        assert!((&c - &CMatrix::identity(4)).max_abs() < 1e-12);
        let pd = polar(&a).unwrap();
        let (b, c) = commuting_pair(&a, 1.0).unwrap();
        assert!((&b - &pd.u).max_abs() < 1e-12 && (&c - &pd.p).max_abs() < 1e-12);
        let p3 = example_3x3();
        let (b, c) = commuting_pair(&p3, 0.5).unwrap();
        assert!((&(&b * &c) - &p3).max_abs() < 1e-10);
        assert!(crate::bounds::commutation_residual(&b, &c).unwrap() < 1e-10);
        assert!(matches!(commuting_pair(&a, 2.0), Err(Error::Contract(_))));
    }

    #[test]
    fn buzano_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let z = random_unit_vector(&mut rng, 3);
        assert!(buzano_check(&z, &z, &z).unwrap());
        let e1 = vec![CScalar::new(1.0, 0.0), CScalar::new(0.0, 0.0)];
        let e2 = vec![CScalar::new(0.0, 0.0), CScalar::new(1.0, 0.0)];
        assert!(buzano_check(&e2, &e1, &e1).unwrap());
        for _ in 0..100 {
            let x = random_unit_vector(&mut rng, 4)
                .iter()
                .map(|v| v * 3.0)
                .collect::<Vec<_>>();
            let y = random_unit_vector(&mut rng, 4);
            let z = random_unit_vector(&mut rng, 4);
            assert!(buzano_check(&x, &y, &z).unwrap());
        }
        let long = vec![CScalar::new(2.0, 0.0), CScalar::new(0.0, 0.0)];
        assert!(matches!(
            buzano_check(&e1, &e1, &long),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn mccarthy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = random_unit_vector(&mut rng, 3);
        assert!(mccarthy_check(&CMatrix::identity(3), &x, 2.0).unwrap());
        let g = gaussian_matrix(&mut rng, 3, 3);
        let p = (&g.adjoint() * &g).hermitian_part();
        let lhs = quadratic_form(&p, &x).re;
        let rhs = quadratic_form(&psd_power(&p, 1.0).unwrap(), &x).re;
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(mccarthy_check(&p, &x, 2.5).unwrap());
        assert!(matches!(
            mccarthy_check(&p, &x, 0.5),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            mccarthy_check(&g, &x, 2.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn block_positivity_examples() {
        let i = CMatrix::identity(3);
        let z = CMatrix::zeros(3, 3);
        assert_eq!(
            block_positivity_check(&i, &i, &i, 50, 1).unwrap(),
            (true, true)
        );
        assert_eq!(
            block_positivity_check(&z, &z, &i, 50, 1).unwrap(),
            (false, false)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (b, c) = (
            gaussian_matrix(&mut rng, 3, 3),
            gaussian_matrix(&mut rng, 3, 3),
        );
        let (ab, bb, cb) = lem4_blocks(&b, &c);
        assert_eq!(
            block_positivity_check(&ab, &bb, &cb, 50, 2).unwrap(),
            (true, true)
        );
    }

    #[test]
    fn lemma_suite_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for n in 1..6 {
            assert!(lemma_suite(&mut rng, n).unwrap().is_empty());
        }
    }

    #[test]
    fn polar_pair_consistency_on_random_matrix() {
        let a = gen_matrix(&spec(EnsembleKind::PolarPair, 4, 21)).unwrap();
        let ctx = BoundContext::new(&a).unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for rec in polar_pair_consistency(&ctx, t).unwrap() {
                assert!(rec.agrees(ctx.w()), "{rec:?}");
            }
        }
    }

    #[test]
    fn normal_samples_have_w_equal_norm_and_spectral_radius() {
        let a = gen_matrix(&spec(EnsembleKind::Normal, 6, 22)).unwrap();
        let n = operator_norm(&a);
        assert!((spectral_radius(&a).unwrap() - n).abs() <= 1e-5 * n.max(1.0));
    }

    #[test]
    fn verification_is_clean_and_deterministic() {
        let empty = run_verification(0, &[2, 3], 1);
        assert_eq!(empty.trials, 0);
        assert!(empty.is_clean() && empty.min_slack_per_bound.is_empty());

        let mut cfg = VerifyConfig::new(12, vec![2, 3, 4], 42);
        cfg.exec = Exec::Sequential;
        let seq = run_verification_with(&cfg);
        assert!(seq.is_clean(), "{seq:#?}");
        assert!(
            seq.numerical_failures.is_empty(),
            "{:?}",
            seq.numerical_failures
        );
        cfg.exec = Exec::Parallel;
        assert_eq!(run_verification_with(&cfg), seq);
    }

    #[test]
    fn injected_fault_is_reported() {
        let mut cfg = VerifyConfig::new(2, vec![3], 7);
        cfg.fault = Some(BoundId::Kit05);
        let s = run_verification_with(&cfg);
        assert_eq!(s.violations.len(), 2);
        assert!(s.violations.iter().all(|v| v.bound == "KIT05"));
    }
}
