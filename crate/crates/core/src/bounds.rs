//! Upper bounds on the numerical radius.
//!
//! Every catalog entry is reported on the scale of `w(A)` itself: bounds on
//! `w²`, `w^p` or `w^r` are evaluated and then rooted, so values of different
//! entries can be compared directly. Throughout, `N = ‖A‖`, `P = |A|` and
//! `Q = |A*|`. Powers use `λ^0 = 1` (so `P^0 = I`) except in `h(α)` below,
//! which uses the support convention `0^0 = 0`.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize, Serializer};

use crate::decomp::{aluthge_from_polar, polar, PolarDecomp};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, I};
use crate::par::Exec;
use crate::radius::{default_tol, numerical_radius, RadiusEstimate};
use crate::spectral::{
    abs_spectra, extreme_eigenvalues_unchecked, max_eigenvalue_unchecked, operator_norm,
    require_psd, spectral_radius, spectral_radius_psd_pair, HermEigDecomp,
};

/// Relative slack tolerance shared by every inequality check.
pub const SLACK_TOL: f64 = 1e-8;
/// Relative residual allowed in the commutation hypothesis `|B|C = C*|B|`.
pub const COMMUTATION_TOL: f64 = 1e-8;

macro_rules! bound_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum BoundId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl BoundId {
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(BoundId::$variant => $name,)*
                }
            }
        }

        impl FromStr for BoundId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(BoundId::$variant),)*
                    other => Err(Error::Input(format!("unknown bound id `{other}`"))),
                }
            }
        }
    };
}

bound_ids! {
    NormLower => "NORM_LOWER",
    NormUpper => "NORM_UPPER",
    Kit03Printed => "KIT03_PRINTED",
    Kit03Sharp => "KIT03_SHARP",
    Kit05 => "KIT05",
    Dra08 => "DRA08",
    Abu15 => "ABU15",
    Bhu21 => "BHU21",
    Bhu21Imag => "BHU_21",
    Bhu211 => "BHU211",
    Bhunia21 => "BHUNIA21",
    Kit23 => "KIT23",
    Th1 => "TH1",
    RemP2 => "REM_P2",
    Th2 => "TH2",
    RemP4 => "REM_P4",
    Th3 => "TH3",
    Th4Power => "TH4_POWER",
    Cor1 => "COR1",
    Lama => "LAMA",
    Lamai => "LAMAI",
    Th5 => "TH5",
    Th6 => "TH6",
    Th7Mid => "TH7_MID",
    Th7Outer => "TH7_OUTER",
    Th8Mid => "TH8_MID",
    Th8Outer => "TH8_OUTER",
    BoundFinal => "BOUND_FINAL",
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    T,
    Alpha,
    P,
    R,
    FgAlpha,
}

impl BoundId {
    /// Parameters this entry needs.
    pub fn required(self) -> &'static [Param] {
        use BoundId::*;
        match self {
            Bhunia21 => &[Param::Alpha],
            Th1 | RemP2 | Th2 | RemP4 | Th6 | Th8Mid | Th8Outer => &[Param::T],
            Th3 | Cor1 => &[Param::T, Param::Alpha],
            Th4Power => &[Param::T, Param::P, Param::FgAlpha],
            Th7Mid | Th7Outer => &[Param::T, Param::R],
            _ => &[],
        }
    }

    pub fn is_lower(self) -> bool {
        self == BoundId::NormLower
    }
}

/// Parameters of a bound; each entry reads only the ones it needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<f64>,
    /// Selects `f(λ) = λ^α`, `g(λ) = λ^{1−α}`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fg_alpha: Option<f64>,
}

impl BoundParams {
    pub fn t(t: f64) -> Self {
        BoundParams {
            t: Some(t),
            ..Default::default()
        }
    }

    pub fn alpha(alpha: f64) -> Self {
        BoundParams {
            alpha: Some(alpha),
            ..Default::default()
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_fg_alpha(mut self, a: f64) -> Self {
        self.fg_alpha = Some(a);
        self
    }

    fn get(&self, which: Param) -> Result<f64> {
        let (value, name, ok): (Option<f64>, &str, fn(f64) -> bool) = match which {
            Param::T => (self.t, "t", |x| (0.0..=1.0).contains(&x)),
            Param::Alpha => (self.alpha, "alpha", |x| (0.0..=1.0).contains(&x)),
            Param::FgAlpha => (self.fg_alpha, "fg_alpha", |x| (0.0..=1.0).contains(&x)),
            Param::P => (self.p, "p", |x| x >= 1.0 && x.is_finite()),
            Param::R => (self.r, "r", |x| x >= 2.0 && x.is_finite()),
        };
        let v =
            value.ok_or_else(|| Error::Contract(format!("missing required parameter `{name}`")))?;
        if !ok(v) {
            return Err(Error::Contract(format!(
                "parameter `{name}` = {v} is out of range"
            )));
        }
        Ok(v)
    }

    /// Keeps only the parameters in `keep`.
    fn restrict(&self, keep: &[Param]) -> BoundParams {
        let pick = |p: Param, v: Option<f64>| if keep.contains(&p) { v } else { None };
        BoundParams {
            t: pick(Param::T, self.t),
            alpha: pick(Param::Alpha, self.alpha),
            p: pick(Param::P, self.p),
            r: pick(Param::R, self.r),
            fg_alpha: pick(Param::FgAlpha, self.fg_alpha),
        }
    }

    fn sort_key(&self) -> [f64; 5] {
        let k = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
        [
            k(self.t),
            k(self.alpha),
            k(self.p),
            k(self.r),
            k(self.fg_alpha),
        ]
    }
}

/// Lemma-level bounds on `w(BC)` for a general pair `(B, C)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairVariant {
    Lem4I,
    Lem4II,
    Lem4III,
    Lem4IV,
    Lem5,
    Lem6,
    Lem7,
    Lem8,
    Lem9,
}

impl PairVariant {
    pub const ALL: &'static [PairVariant] = &[
        PairVariant::Lem4I,
        PairVariant::Lem4II,
        PairVariant::Lem4III,
        PairVariant::Lem4IV,
        PairVariant::Lem5,
        PairVariant::Lem6,
        PairVariant::Lem7,
        PairVariant::Lem8,
        PairVariant::Lem9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairVariant::Lem4I => "LEM4_I",
            PairVariant::Lem4II => "LEM4_II",
            PairVariant::Lem4III => "LEM4_III",
            PairVariant::Lem4IV => "LEM4_IV",
            PairVariant::Lem5 => "LEM5",
            PairVariant::Lem6 => "LEM6",
            PairVariant::Lem7 => "LEM7",
            PairVariant::Lem8 => "LEM8",
            PairVariant::Lem9 => "LEM9",
        }
    }

    pub fn required(self) -> &'static [Param] {
        match self {
            PairVariant::Lem4IV => &[Param::Alpha],
            PairVariant::Lem5 => &[Param::P, Param::FgAlpha],
            PairVariant::Lem8 => &[Param::R],
            _ => &[],
        }
    }

    /// Variants that need `|B|C = C*|B|`.
    pub fn needs_commutation(self) -> bool {
        matches!(
            self,
            PairVariant::Lem5 | PairVariant::Lem6 | PairVariant::Lem7 | PairVariant::Lem9
        )
    }
}

/// What a [`BoundResult`] bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundLabel {
    Catalog(BoundId),
    Pair(PairVariant),
    /// Items (i)–(iv) of the block-matrix proposition, numbered 1–4.
    Prop1(u8),
}

impl BoundLabel {
    pub fn name(&self) -> String {
        match self {
            BoundLabel::Catalog(id) => id.name().to_string(),
            BoundLabel::Pair(v) => v.name().to_string(),
            BoundLabel::Prop1(k) => format!(
                "PROP1_{}",
                ["I", "II", "III", "IV"][(*k as usize).clamp(1, 4) - 1]
            ),
        }
    }
}

impl Serialize for BoundLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundResult {
    pub id: BoundLabel,
    pub params: BoundParams,
    pub value: f64,
    pub w_ref: f64,
    /// `value − w_ref`, or `w_ref − value` for the lower bound.
    pub slack: f64,
}

impl BoundResult {
    fn upper(id: BoundLabel, params: BoundParams, value: f64, w_ref: f64) -> Self {
        BoundResult {
            id,
            params,
            value,
            w_ref,
            slack: value - w_ref,
        }
    }

    /// Whether the inequality holds up to `SLACK_TOL · max(1, w)`.
    pub fn holds(&self) -> bool {
        self.slack >= -SLACK_TOL * self.w_ref.max(1.0)
    }
}

// ---------------------------------------------------------------------------
// helpers

/// `‖H‖` for Hermitian `H` (exactly Hermitian by construction here).
fn herm_norm(h: &CMatrix) -> f64 {
    let (lo, hi) = extreme_eigenvalues_unchecked(h);
    lo.abs().max(hi.abs())
}

/// `‖H‖ = λ_max(H)` for PSD `H`.
fn psd_norm(h: &CMatrix) -> f64 {
    max_eigenvalue_unchecked(h).max(0.0)
}

fn radius_of(m: &CMatrix) -> Result<f64> {
    Ok(numerical_radius(m, default_tol(m))?.lo)
}

/// `X + iY`.
fn plus_i(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x + &y.scale(I)
}

fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum RadiusKey {
    ASquared,
    PQ,
    PPlusIQ,
    /// `P^{2t} Q^{2(1−t)}`
    Th1Product(u64),
    /// `P^{rt} + i Q^{r(1−t)}`
    Th7Sum(u64, u64),
    /// `P^{1−t} + i Q^{1−t}`
    Th8Sum(u64),
    /// `P^{1−t} Q^{1−t}`
    Th6Product(u64),
}

// ---------------------------------------------------------------------------
// context

/// Everything about `A` that bound evaluation reuses: norm, polar factors and
/// their spectra, the reference radius and a memo of auxiliary radii.
pub struct BoundContext {
    a: CMatrix,
    norm: f64,
    polar: PolarDecomp,
    w: RadiusEstimate,
    a_sq_norm: f64,
    aluthge_norm: f64,
    p_sq_plus_q_sq: f64,
    radius_memo: Mutex<HashMap<RadiusKey, f64>>,
    lamai_memo: Mutex<Option<(f64, f64)>>,
}

impl BoundContext {
    pub fn new(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "bounds need a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let w = numerical_radius(a, default_tol(a))?;
        Self::with_radius(a, w)
    }

    /// Builds the context around a radius computed elsewhere.
    pub fn with_radius(a: &CMatrix, w: RadiusEstimate) -> Result<Self> {
        let norm = operator_norm(a);
        let polar = polar(a)?;
        let a_sq_norm = operator_norm(&(a * a));
        let aluthge_norm = operator_norm(&aluthge_from_polar(&polar, 0.5)?);
        let p2 = polar.abs_spectrum.psd_power(2.0)?;
        let q2 = polar.abs_adj_spectrum.psd_power(2.0)?;
        let p_sq_plus_q_sq = psd_norm(&(&p2 + &q2));
        Ok(BoundContext {
            a: a.clone(),
            norm,
            polar,
            w,
            a_sq_norm,
            aluthge_norm,
            p_sq_plus_q_sq,
            radius_memo: Mutex::new(HashMap::new()),
            lamai_memo: Mutex::new(None),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn radius(&self) -> &RadiusEstimate {
        &self.w
    }

    /// Reference value of `w(A)`.
    pub fn w(&self) -> f64 {
        self.w.lo
    }

    pub fn polar(&self) -> &PolarDecomp {
        &self.polar
    }

    pub fn a_squared_norm(&self) -> f64 {
        self.a_sq_norm
    }

    pub fn aluthge_norm(&self) -> f64 {
        self.aluthge_norm
    }

    fn p_spec(&self) -> &HermEigDecomp {
        &self.polar.abs_spectrum
    }

    fn q_spec(&self) -> &HermEigDecomp {
        &self.polar.abs_adj_spectrum
    }

    pub fn p_pow(&self, s: f64) -> Result<CMatrix> {
        self.p_spec().psd_power(s)
    }

    pub fn q_pow(&self, s: f64) -> Result<CMatrix> {
        self.q_spec().psd_power(s)
    }

    fn memo_radius(&self, key: RadiusKey, build: impl FnOnce() -> Result<CMatrix>) -> Result<f64> {
        if let Some(&v) = self.radius_memo.lock().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let v = radius_of(&build()?)?;
        self.radius_memo.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }

    fn w_a_squared(&self) -> Result<f64> {
        self.memo_radius(RadiusKey::ASquared, || Ok(&self.a * &self.a))
    }

    fn w_pq(&self) -> Result<f64> {
        self.memo_radius(RadiusKey::PQ, || Ok(&self.polar.p * &self.q_pow(1.0)?))
    }

    /// `w(P^{2t} Q^{2(1−t)})`
    fn w_th1_product(&self, t: f64) -> Result<f64> {
        self.memo_radius(RadiusKey::Th1Product(t.to_bits()), || {
            Ok(&self.p_pow(2.0 * t)? * &self.q_pow(2.0 * (1.0 - t))?)
        })
    }

    /// `w(P^{1−t} Q^{1−t})`
    fn w_th6_product(&self, t: f64) -> Result<f64> {
        self.memo_radius(RadiusKey::Th6Product(t.to_bits()), || {
            Ok(&self.p_pow(1.0 - t)? * &self.q_pow(1.0 - t)?)
        })
    }

    /// `‖P^t Ã_t P^{1−t}‖`
    fn rem_aluthge_term(&self, t: f64) -> Result<f64> {
        let at = aluthge_from_polar(&self.polar, t)?;
        Ok(operator_norm(
            &(&(&self.p_pow(t)? * &at) * &self.p_pow(1.0 - t)?),
        ))
    }

    /// `h(α) = ‖|A|^α + |A*|^{1−α}‖` with `0^0 = 0`.
    pub fn alpha_norm(&self, alpha: f64) -> Result<f64> {
        let pa = self.p_spec().psd_power_support(alpha)?;
        let qb = self.q_spec().psd_power_support(1.0 - alpha)?;
        Ok(psd_norm(&(&pa + &qb)))
    }

    /// `(α*, h(α*))` approximately minimizing `h` over `[0, 1]`.
    pub fn min_alpha_norm(&self, grid_size: usize) -> Result<(f64, f64)> {
        if grid_size == 101 {
            if let Some(v) = *self.lamai_memo.lock().expect("memo lock") {
                return Ok(v);
            }
        }
        let best = minimize_alpha(&|a| self.alpha_norm(a), grid_size)?;
        if grid_size == 101 {
            *self.lamai_memo.lock().expect("memo lock") = Some(best);
        }
        Ok(best)
    }

    /// Evaluates one catalog entry.
    pub fn eval(&self, id: BoundId, params: &BoundParams) -> Result<BoundResult> {
        let value = self.value(id, params)?;
        let params = params.restrict(id.required());
        let w = self.w();
        Ok(if id.is_lower() {
            BoundResult {
                id: BoundLabel::Catalog(id),
                params,
                value,
                w_ref: w,
                slack: w - value,
            }
        } else {
            BoundResult::upper(BoundLabel::Catalog(id), params, value, w)
        })
    }

    /// The bound value itself.
    pub fn value(&self, id: BoundId, params: &BoundParams) -> Result<f64> {
        use BoundId::*;
        let mut vals = [0.0; 5];
        for (slot, &p) in vals.iter_mut().zip(id.required()) {
            *slot = params.get(p)?;
        }
        if self.a.is_zero() {
            return Ok(0.0);
        }
        let n = self.norm;
        let sqrt_n = n.sqrt();
        let v = match id {
            NormLower => 0.5 * n,
            NormUpper => n,
            Kit03Printed => 0.5 * n + self.a_sq_norm.sqrt(),
            Kit03Sharp => 0.5 * n + 0.5 * self.a_sq_norm.sqrt(),
            Kit05 => (0.5 * self.p_sq_plus_q_sq).sqrt(),
            Dra08 => (0.5 * n * n + 0.5 * self.w_a_squared()?).sqrt(),
            Abu15 => (0.25 * self.p_sq_plus_q_sq + 0.5 * self.w_a_squared()?).sqrt(),
            Bhu21 => (0.25 * self.p_sq_plus_q_sq + 0.5 * self.w_pq()?).sqrt(),
            Bhu21Imag => {
                self.memo_radius(RadiusKey::PPlusIQ, || {
                    Ok(plus_i(&self.polar.p, &self.q_pow(1.0)?))
                })? / SQRT_2
            }
            Bhu211 => {
                0.5 * n + 0.5 * spectral_radius_psd_pair(&self.polar.p, &self.q_pow(1.0)?)?.sqrt()
            }
            Bhunia21 => {
                let a = vals[0];
                let m = &self.polar.p.scale_real(a) + &self.q_pow(1.0)?.scale_real(1.0 - a);
                sqrt_n * psd_norm(&m).sqrt()
            }
            Kit23 | Lama => 0.5 * sqrt_n * psd_norm(&(&self.p_pow(0.5)? + &self.q_pow(0.5)?)),
            Th1 => {
                let t = vals[0];
                (0.5 * n * n + 0.5 * self.w_th1_product(t)?).sqrt()
            }
            RemP2 => {
                let t = vals[0];
                (0.5 * n * n + 0.5 * self.rem_aluthge_term(t)?).sqrt()
            }
            Th2 | RemP4 => {
                let t = vals[0];
                let s = psd_norm(&(&self.p_pow(4.0 * t)? + &self.q_pow(4.0 * (1.0 - t))?));
                let tail = if id == Th2 {
                    self.w_th1_product(t)?
                } else {
                    self.rem_aluthge_term(t)?
                };
                (0.25 * s + 0.5 * tail).sqrt()
            }
            Th3 => {
                let (t, a) = (vals[0], vals[1]);
                let m = &self.p_pow(2.0 * (1.0 - t))?.scale_real(a)
                    + &self.q_pow(2.0 * t)?.scale_real(1.0 - a);
                psd_norm(&m).sqrt() * pow0(n, (1.0 - a) * (1.0 - t) + a * t)
            }
            Th4Power => {
                let (t, p, fa) = (vals[0], vals[1], vals[2]);
                let m = &self.p_pow(2.0 * p * fa * (1.0 - t))?
                    + &self.q_pow(2.0 * p * (1.0 - fa) * (1.0 - t))?;
                (0.5 * pow0(n, p * t) * psd_norm(&m)).powf(1.0 / p)
            }
            Cor1 => {
                let (t, a) = (vals[0], vals[1]);
                let m =
                    &self.p_pow(2.0 * a * (1.0 - t))? + &self.q_pow(2.0 * (1.0 - a) * (1.0 - t))?;
                0.5 * pow0(n, t) * psd_norm(&m)
            }
            Lamai => 0.5 * sqrt_n * self.min_alpha_norm(101)?.1,
            Th5 => {
                let half_sum = psd_norm(&(&self.polar.p + &self.q_pow(1.0)?)) * 0.5;
                sqrt_n * (0.5 * half_sum + 0.5 * self.aluthge_norm).sqrt()
            }
            Th6 => {
                let t = vals[0];
                let r = spectral_radius_psd_pair(&self.p_pow(1.0 - t)?, &self.q_pow(1.0 - t)?)?;
                0.5 * n + 0.5 * pow0(n, t) * r.sqrt()
            }
            Th7Mid => {
                let (t, r) = (vals[0], vals[1]);
                let w = self.memo_radius(RadiusKey::Th7Sum(t.to_bits(), r.to_bits()), || {
                    Ok(plus_i(&self.p_pow(r * t)?, &self.q_pow(r * (1.0 - t))?))
                })?;
                (0.5 * w * w).powf(1.0 / r)
            }
            Th7Outer => {
                let (t, r) = (vals[0], vals[1]);
                let m = &self.p_pow(2.0 * r * t)? + &self.q_pow(2.0 * r * (1.0 - t))?;
                (0.5 * psd_norm(&m)).powf(1.0 / r)
            }
            Th8Mid => {
                let t = vals[0];
                let w = self.memo_radius(RadiusKey::Th8Sum(t.to_bits()), || {
                    Ok(plus_i(&self.p_pow(1.0 - t)?, &self.q_pow(1.0 - t)?))
                })?;
                pow0(n, t) * w / SQRT_2
            }
            Th8Outer => {
                let t = vals[0];
                let m = &self.p_pow(2.0 * (1.0 - t))? + &self.q_pow(2.0 * (1.0 - t))?;
                pow0(n, t) * (0.5 * psd_norm(&m)).sqrt()
            }
            BoundFinal => sqrt_n * (0.5 * psd_norm(&(&self.polar.p + &self.q_pow(1.0)?))).sqrt(),
        };
        if !v.is_finite() {
            return Err(Error::Numerical(format!("{id} evaluated to {v}")));
        }
        Ok(v)
    }

    /// Every catalog entry over the grid, in catalog order and then
    /// lexicographic parameter order.
    pub fn catalog(&self, grid: &CatalogGrid, exec: Exec) -> Result<Vec<BoundResult>> {
        let jobs = grid.jobs();
        exec.map(&jobs, |(id, params)| self.eval(*id, params))
            .into_iter()
            .collect()
    }

    /// Claimed dominance chains between bounds, each with its monotonicity flag.
    pub fn refinement_chains(&self, t_grid: &[f64]) -> Result<Vec<Chain>> {
        use BoundId::*;
        let b = |id: BoundId, p: BoundParams| self.value(id, &p);
        let none = BoundParams::default();
        let n = self.norm;
        let w = self.w();
        let sqrt_n = n.sqrt();
        let m2 = self.a_sq_norm.sqrt();
        let at = self.aluthge_norm;
        let scale = w.max(1.0);
        let mut chains = Vec::new();
        let mut push = |id: String, values: Vec<f64>| chains.push(Chain::new(id, values, scale));

        push(
            "a".into(),
            vec![
                w,
                b(Th1, BoundParams::t(0.5))?,
                (0.5 * n * n + 0.5 * self.a_sq_norm).sqrt(),
                n,
            ],
        );
        push(
            "b".into(),
            vec![
                w,
                b(Th5, none)?,
                sqrt_n * (0.5 * n + 0.5 * at).sqrt(),
                sqrt_n * (0.5 * n + 0.5 * m2).sqrt(),
                n,
            ],
        );
        let r_pq = spectral_radius_psd_pair(&self.polar.p, &self.q_pow(1.0)?)?;
        let w_pq = self.w_pq()?;
        let step = |x: f64| sqrt_n * (0.5 * (0.5 * n + 0.5 * x) + 0.5 * at).sqrt();
        push(
            "c".into(),
            vec![
                w,
                b(Th5, none)?,
                step(r_pq.sqrt()),
                step(w_pq.sqrt()),
                step(m2),
            ],
        );
        for &t in t_grid {
            let (pt, qt) = (self.p_pow(1.0 - t)?, self.q_pow(1.0 - t)?);
            let nt = pow0(n, t);
            let prod = &pt * &qt;
            push(
                format!("d(t={t})"),
                vec![
                    w,
                    b(Th6, BoundParams::t(t))?,
                    0.5 * n + 0.5 * nt * self.w_th6_product(t)?.sqrt(),
                    0.5 * n + 0.5 * nt * operator_norm(&prod).sqrt(),
                    0.5 * n + 0.5 * nt * pow0(self.a_sq_norm, 0.5 * (1.0 - t)),
                ],
            );
        }
        push("e".into(), vec![b(Abu15, none)?, b(Dra08, none)?]);
        push("f1".into(), vec![b(Bhu21, none)?, b(Kit05, none)?]);
        push("f2".into(), vec![b(Bhu21, none)?, b(Kit03Sharp, none)?]);
        push("g".into(), vec![b(Bhu21Imag, none)?, b(Kit05, none)?]);
        push(
            "h".into(),
            vec![b(Th8Mid, BoundParams::t(0.5))?, b(BoundFinal, none)?],
        );
        push("i".into(), vec![b(Lamai, none)?, b(Lama, none)?]);
        push(
            "j".into(),
            vec![b(NormLower, none)?, w, b(NormUpper, none)?],
        );
        Ok(chains)
    }
}

/// A claimed chain `v_0 ≤ v_1 ≤ …`.
#[derive(Clone, Debug, Serialize)]
pub struct Chain {
    pub id: String,
    pub values: Vec<f64>,
    pub monotone: bool,
}

impl Chain {
    fn new(id: String, values: Vec<f64>, scale: f64) -> Self {
        let monotone = values.windows(2).all(|p| p[0] <= p[1] + SLACK_TOL * scale);
        Chain {
            id,
            values,
            monotone,
        }
    }
}

/// Parameter grids for a catalog sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogGrid {
    pub t: Vec<f64>,
    pub alpha: Vec<f64>,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
}

impl Default for CatalogGrid {
    fn default() -> Self {
        let tenth: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        CatalogGrid {
            t: tenth.clone(),
            alpha: tenth,
            r: vec![2.0, 3.0],
            p: vec![1.0, 2.0],
        }
    }
}

impl CatalogGrid {
    /// Every `(id, params)` pair, in reporting order.
    pub fn jobs(&self) -> Vec<(BoundId, BoundParams)> {
        let mut out = Vec::new();
        for &id in BoundId::ALL {
            let req = id.required();
            let axis = |p: Param, values: &[f64]| -> Vec<Option<f64>> {
                if req.contains(&p) {
                    values.iter().map(|&v| Some(v)).collect()
                } else {
                    vec![None]
                }
            };
            let mut sets = Vec::new();
            for t in axis(Param::T, &self.t) {
                for alpha in axis(Param::Alpha, &self.alpha) {
                    for p in axis(Param::P, &self.p) {
                        for r in axis(Param::R, &self.r) {
                            for fg_alpha in axis(Param::FgAlpha, &self.alpha) {
                                sets.push(BoundParams {
                                    t,
                                    alpha,
                                    p,
                                    r,
                                    fg_alpha,
                                });
                            }
                        }
                    }
                }
            }
            sets.sort_by(|x, y| {
                x.sort_key()
                    .iter()
                    .zip(y.sort_key().iter())
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            out.extend(sets.into_iter().map(|p| (id, p)));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// free-standing API

pub fn eval_bound(a: &CMatrix, id: BoundId, params: &BoundParams) -> Result<BoundResult> {
    BoundContext::new(a)?.eval(id, params)
}

pub fn eval_catalog(a: &CMatrix, grid: &CatalogGrid) -> Result<Vec<BoundResult>> {
    BoundContext::new(a)?.catalog(grid, Exec::Sequential)
}

pub fn min_alpha_norm(a: &CMatrix, grid_size: usize) -> Result<(f64, f64)> {
    if !a.is_square() {
        return Err(Error::Dimension(
            "min_alpha_norm needs a square matrix".into(),
        ));
    }
    let (p, q, _) = abs_spectra(a)?;
    let h = |alpha: f64| -> Result<f64> {
        Ok(psd_norm(
            &(&p.psd_power_support(alpha)? + &q.psd_power_support(1.0 - alpha)?),
        ))
    };
    minimize_alpha(&h, grid_size)
}

/// Grid search over `[0, 1]` followed by golden-section refinement to width `1e-10`.
fn minimize_alpha(h: &dyn Fn(f64) -> Result<f64>, grid_size: usize) -> Result<(f64, f64)> {
    if grid_size < 3 {
        return Err(Error::Contract(format!(
            "alpha grid needs at least 3 points, got {grid_size}"
        )));
    }
    let step = 1.0 / (grid_size - 1) as f64;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..grid_size {
        let a = k as f64 * step;
        let v = h(a)?;
        if v < best.1 {
            best = (a, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = h(x1)?;
    let mut f2 = h(x2)?;
    while hi - lo > 1e-10 {
        if f1 > f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = h(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = h(x1)?;
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f < best.1 {
            best = (x, f);
        }
    }
    Ok(best)
}

/// `max{2^{1−α}, 2^α + 3^{1−α}, 3^α, 2}`: `h(α)` for the weighted shift
/// `[[0,2,0],[0,0,3],[0,0,0]] ⊕ [1]`.
pub fn closed_form_alpha_norm_example(alpha: f64) -> f64 {
    [
        2f64.powf(1.0 - alpha),
        2f64.powf(alpha) + 3f64.powf(1.0 - alpha),
        3f64.powf(alpha),
        2.0,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

// ---------------------------------------------------------------------------
// pair bounds

/// Spectral data of a pair `(B, C)` shared by the pair variants.
struct PairData<'a> {
    c: &'a CMatrix,
    abs_b: HermEigDecomp,
    abs_b_adj: HermEigDecomp,
    abs_c: HermEigDecomp,
}

impl<'a> PairData<'a> {
    fn new(b: &'a CMatrix, c: &'a CMatrix) -> Result<Self> {
        let (abs_b, abs_b_adj, _) = abs_spectra(b)?;
        let (abs_c, _, _) = abs_spectra(c)?;
        Ok(PairData {
            c,
            abs_b,
            abs_b_adj,
            abs_c,
        })
    }

    fn commutation_residual(&self) -> Result<f64> {
        let mb = self.abs_b.psd_power(1.0)?;
        Ok((&(&mb * self.c) - &(&self.c.adjoint() * &mb)).frobenius_norm())
    }
}

/// Residual `‖|B|C − C*|B|‖_F`.
pub fn commutation_residual(b: &CMatrix, c: &CMatrix) -> Result<f64> {
    PairData::new(b, c)?.commutation_residual()
}

fn check_pair(b: &CMatrix, c: &CMatrix) -> Result<()> {
    if !b.is_square() || !c.is_square() || b.rows() != c.rows() {
        return Err(Error::Dimension(format!(
            "pair bounds need square matrices of equal size, got {}x{} and {}x{}",
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    Ok(())
}

/// Value of a lemma bound on `w(BC)`.
pub fn pair_bound_value(
    b: &CMatrix,
    c: &CMatrix,
    variant: PairVariant,
    params: &BoundParams,
) -> Result<f64> {
    check_pair(b, c)?;
    let mut vals = [0.0; 2];
    for (slot, &p) in vals.iter_mut().zip(variant.required()) {
        *slot = params.get(p)?;
    }
    let d = PairData::new(b, c)?;
    if variant.needs_commutation() {
        let res = d.commutation_residual()?;
        let allowed = COMMUTATION_TOL * (b.frobenius_norm() * c.frobenius_norm()).max(1.0);
        if res > allowed {
            return Err(Error::Contract(format!(
                "{} needs |B|C = C*|B|; commutation residual ‖|B|C − C*|B|‖_F = {res:.3e} exceeds {allowed:.3e}",
                variant.name()
            )));
        }
    }
    let bb = (b * &b.adjoint()).hermitian_part();
    let cc = (&c.adjoint() * c).hermitian_part();
    let nb = operator_norm(b);
    let nc = operator_norm(c);
    let fourth = || psd_norm(&(&(&bb * &bb).hermitian_part() + &(&cc * &cc).hermitian_part()));
    let w_bcbc = || radius_of(&(&(b * &(c * b).adjoint()) * c));
    let v = match variant {
        PairVariant::Lem4I => (0.5 * fourth()).sqrt(),
        PairVariant::Lem4II => (0.5 * nb * nb * nc * nc + 0.5 * w_bcbc()?).sqrt(),
        PairVariant::Lem4III => (0.25 * fourth() + 0.5 * w_bcbc()?).sqrt(),
        PairVariant::Lem4IV => {
            let a = vals[0];
            let m = &bb.scale_real(a) + &cc.scale_real(1.0 - a);
            (psd_norm(&m) * pow0(nb, 2.0 * (1.0 - a)) * pow0(nc, 2.0 * a)).sqrt()
        }
        PairVariant::Lem5 => {
            let (p, fa) = (vals[0], vals[1]);
            let f = d.abs_b.psd_power(2.0 * p * fa)?;
            let g = d.abs_b_adj.psd_power(2.0 * p * (1.0 - fa))?;
            (0.5 * pow0(spectral_radius(c)?, p) * psd_norm(&(&f + &g))).powf(1.0 / p)
        }
        PairVariant::Lem6 => {
            let factor = |x: &CMatrix| -> f64 {
                let s = (&(&x.adjoint() * x) + &(x * &x.adjoint())).hermitian_part();
                (psd_norm(&s) + 2.0 * operator_norm(&(x * x))).sqrt()
            };
            0.25 * factor(b) * factor(c)
        }
        PairVariant::Lem7 => {
            let r =
                spectral_radius_psd_pair(&d.abs_b.psd_power(1.0)?, &d.abs_b_adj.psd_power(1.0)?)?;
            0.5 * spectral_radius(c)? * (nb + r.sqrt())
        }
        PairVariant::Lem8 => {
            let r = vals[0];
            let m = plus_i(&d.abs_c.psd_power(r)?, &d.abs_b_adj.psd_power(r)?);
            let w = radius_of(&m)?;
            (0.5 * w * w).powf(1.0 / r)
        }
        PairVariant::Lem9 => {
            let m = plus_i(&d.abs_b.psd_power(1.0)?, &d.abs_b_adj.psd_power(1.0)?);
            spectral_radius(c)? * radius_of(&m)? / SQRT_2
        }
    };
    if !v.is_finite() {
        return Err(Error::Numerical(format!(
            "{} evaluated to {v}",
            variant.name()
        )));
    }
    Ok(v)
}

/// A lemma bound on `w(BC)` together with its slack against the computed `w(BC)`.
pub fn pair_bound(
    b: &CMatrix,
    c: &CMatrix,
    variant: PairVariant,
    params: &BoundParams,
) -> Result<BoundResult> {
    let value = pair_bound_value(b, c, variant, params)?;
    let w = radius_of(&(b * c))?;
    Ok(BoundResult::upper(
        BoundLabel::Pair(variant),
        params.restrict(variant.required()),
        value,
        w,
    ))
}

/// The four bounds on `w(C)` for a PSD block matrix `[[A, C*], [C, B]]`.
pub fn prop1_bounds(
    ablk: &CMatrix,
    bblk: &CMatrix,
    c: &CMatrix,
    alpha: f64,
) -> Result<Vec<BoundResult>> {
    let n = c.rows();
    if !c.is_square()
        || ablk.rows() != n
        || bblk.rows() != n
        || !ablk.is_square()
        || !bblk.is_square()
    {
        return Err(Error::Dimension(
            "block bounds need square blocks of equal size".into(),
        ));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Contract(format!(
            "parameter `alpha` = {alpha} is out of range"
        )));
    }
    require_psd(ablk, "upper-left block")?;
    require_psd(bblk, "lower-right block")?;
    let block = CMatrix::block2(ablk, &c.adjoint(), c, bblk)?;
    let (lmin, lmax) = extreme_eigenvalues_unchecked(&block.hermitian_part());
    let scale = lmax.abs().max(1.0);
    if lmin < -SLACK_TOL * scale {
        return Err(Error::Contract(format!(
            "block matrix is not positive semidefinite: λ_min = {lmin:.3e}"
        )));
    }
    let a = ablk.hermitian_part();
    let b = bblk.hermitian_part();
    let (na, nb) = (herm_norm(&a), herm_norm(&b));
    let sq = psd_norm(&(&(&a * &a).hermitian_part() + &(&b * &b).hermitian_part()));
    let w_ab = radius_of(&(&a * &b))?;
    let mix = psd_norm(&(&a.scale_real(alpha) + &b.scale_real(1.0 - alpha)));
    let values = [
        (0.5 * sq).sqrt(),
        (0.5 * na * nb + 0.5 * w_ab).sqrt(),
        (0.25 * sq + 0.5 * w_ab).sqrt(),
        (mix * pow0(na, 1.0 - alpha) * pow0(nb, alpha)).sqrt(),
    ];
    let w = radius_of(c)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let params = if k == 3 {
                BoundParams::alpha(alpha)
            } else {
                BoundParams::default()
            };
            BoundResult::upper(BoundLabel::Prop1(k as u8 + 1), params, v, w)
        })
        .collect())
}

/// Outcome of the square-zero check on `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotentCheck {
    /// `‖A²‖ ≤ 1e-10 · max(1, ‖A‖²)`
    pub is_square_zero: bool,
    /// `|w(A) − ½‖A‖| ≤ 1e-8 · max(1, ‖A‖)`
    pub w_half_norm: bool,
    /// `|‖|A| + |A*|‖ − ‖A‖| ≤ 1e-8 · max(1, ‖A‖)`
    pub abs_sum_norm: bool,
}

pub fn nilpotent_identity_check(a: &CMatrix) -> Result<NilpotentCheck> {
    if !a.is_square() {
        return Err(Error::Dimension(
            "square-zero check needs a square matrix".into(),
        ));
    }
    let n = operator_norm(a);
    let scale = n.max(1.0);
    let w = radius_of(a)?;
    let (p, q) = crate::spectral::abs_factors(a)?;
    Ok(NilpotentCheck {
        is_square_zero: operator_norm(&(a * a)) <= 1e-10 * (n * n).max(1.0),
        w_half_norm: (w - 0.5 * n).abs() <= SLACK_TOL * scale,
        abs_sum_norm: (psd_norm(&(&p + &q)) - n).abs() <= SLACK_TOL * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{example_2x2, example_3x3, CScalar};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            CScalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn kit23_on_weighted_shift() {
        let r = eval_bound(&example_3x3(), BoundId::Kit23, &BoundParams::default()).unwrap();
        let want = 0.5 * 3f64.sqrt() * (2f64.sqrt() + 3f64.sqrt());
        assert!((r.value - want).abs() < 1e-12);
        assert!((r.value - 2.7247449).abs() < 1e-6);
        assert!((r.slack - (want - 13f64.sqrt() / 2.0)).abs() < 1e-9);
        assert!((r.slack - 0.9219692).abs() < 1e-6);
    }

    #[test]
    fn kit05_on_identity_and_kit03_on_shift() {
        let r = eval_bound(
            &CMatrix::identity(3),
            BoundId::Kit05,
            &BoundParams::default(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12 && r.slack.abs() < 1e-9);
        let shift = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let r = eval_bound(&shift, BoundId::Kit03Sharp, &BoundParams::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12 && r.slack.abs() < 1e-9);
    }

    #[test]
    fn missing_parameter_is_a_contract_error() {
        let ctx = BoundContext::new(&example_2x2()).unwrap();
        assert!(matches!(
            ctx.eval(BoundId::Th1, &BoundParams::default()),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            ctx.eval(BoundId::Th7Mid, &BoundParams::t(0.5).with_r(1.0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn catalog_of_zero_matrix_is_zero() {
        let rs = eval_catalog(&CMatrix::zeros(3, 3), &CatalogGrid::default()).unwrap();
        assert!(rs.iter().all(|r| r.value == 0.0));
    }

    #[test]
    fn catalog_on_example_2x2_and_random() {
        let rs = eval_catalog(&example_2x2(), &CatalogGrid::default()).unwrap();
        let lower = rs
            .iter()
            .find(|r| r.id == BoundLabel::Catalog(BoundId::NormLower))
            .unwrap();
        assert!((lower.value - 1.0).abs() < 1e-12);
        assert!(
            rs.iter().all(|r| r.holds()),
            "violations on the 2x2 example"
        );

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random(&mut rng, 6);
        let ctx = BoundContext::new(&a).unwrap();
        let seq = ctx
            .catalog(&CatalogGrid::default(), Exec::Sequential)
            .unwrap();
        for r in &seq {
            assert!(
                r.holds(),
                "{} {:?} slack {}",
                r.id.name(),
                r.params,
                r.slack
            );
        }
        let par = ctx
            .catalog(&CatalogGrid::default(), Exec::Parallel)
            .unwrap();
        assert_eq!(seq.len(), par.len());
        assert!(seq
            .iter()
            .zip(&par)
            .all(|(x, y)| x.value == y.value && x.id == y.id));
    }

    #[test]
    fn catalog_order_is_catalog_then_params() {
        let jobs = CatalogGrid::default().jobs();
        assert_eq!(jobs[0].0, BoundId::NormLower);
        let th3: Vec<_> = jobs.iter().filter(|j| j.0 == BoundId::Th3).collect();
        assert_eq!(th3.len(), 121);
        assert_eq!((th3[0].1.t, th3[0].1.alpha), (Some(0.0), Some(0.0)));
        assert_eq!((th3[1].1.t, th3[1].1.alpha), (Some(0.0), Some(0.1)));
        let mut last = 0;
        for (id, _) in &jobs {
            let pos = BoundId::ALL.iter().position(|x| x == id).unwrap();
            assert!(pos >= last);
            last = pos;
        }
    }

    #[test]
    fn alpha_norm_examples() {
        let ctx = BoundContext::new(&example_3x3()).unwrap();
        assert!((ctx.alpha_norm(0.5).unwrap() - 3.14626436994).abs() < 1e-9);
        assert!((ctx.alpha_norm(0.87).unwrap() - 2.98118458519).abs() < 1e-9);
        for k in 0..=100 {
            let a = k as f64 / 100.0;
            assert!(
                (ctx.alpha_norm(a).unwrap() - closed_form_alpha_norm_example(a)).abs() < 1e-12,
                "alpha {a}"
            );
        }
        let (amin, vmin) = min_alpha_norm(&example_3x3(), 101).unwrap();
        assert!(vmin < 2.98118458519 + 1e-12);
        assert!((amin - 0.87).abs() < 0.05);
    }

    #[test]
    fn closed_form_endpoints() {
        assert!((closed_form_alpha_norm_example(0.5) - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
        assert_eq!(closed_form_alpha_norm_example(0.0), 4.0);
        assert_eq!(closed_form_alpha_norm_example(1.0), 3.0);
    }

    #[test]
    fn alpha_norm_on_diagonal_psd() {
        let d = [0.3, 1.7, 4.0];
        let a = CMatrix::from_real_diag(&d);
        let (_, v) = min_alpha_norm(&a, 101).unwrap();
        // scalar oracle: max_i (d_i^α + d_i^{1−α}) on a fine grid
        let h = |al: f64| {
            d.iter()
                .map(|&x: &f64| x.powf(al) + x.powf(1.0 - al))
                .fold(0.0, f64::max)
        };
        let oracle = (0..=100_000)
            .map(|k| h(k as f64 / 100_000.0))
            .fold(f64::INFINITY, f64::min);
        assert!((v - oracle).abs() < 1e-8);
    }

    #[test]
    fn consistency_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = random(&mut rng, 5);
        let ctx = BoundContext::new(&a).unwrap();
        let none = BoundParams::default();
        let lama = ctx.value(BoundId::Lama, &none).unwrap();
        assert!((lama - ctx.value(BoundId::Kit23, &none).unwrap()).abs() < 1e-12);
        let cor = ctx
            .value(BoundId::Cor1, &BoundParams::t(0.5).with_alpha(0.5))
            .unwrap();
        assert!((lama - cor).abs() < 1e-12);
        for &(al, t) in &[(0.0, 0.0), (0.3, 0.7), (1.0, 0.4)] {
            let c = ctx
                .value(BoundId::Cor1, &BoundParams::t(t).with_alpha(al))
                .unwrap();
            let p = ctx
                .value(
                    BoundId::Th4Power,
                    &BoundParams::t(t).with_p(1.0).with_fg_alpha(al),
                )
                .unwrap();
            assert!((c - p).abs() < 1e-12);
            let b = ctx
                .value(BoundId::Bhunia21, &BoundParams::alpha(al))
                .unwrap();
            let th3 = ctx
                .value(BoundId::Th3, &BoundParams::t(0.5).with_alpha(al))
                .unwrap();
            assert!((b - th3).abs() < 1e-12);
        }
        for &t in &[0.0, 0.5, 1.0] {
            for &r in &[2.0, 3.0] {
                let p = BoundParams::t(t).with_r(r);
                assert!(
                    ctx.value(BoundId::Th7Mid, &p).unwrap()
                        <= ctx.value(BoundId::Th7Outer, &p).unwrap() + 1e-8
                );
            }
            let p = BoundParams::t(t);
            assert!(
                ctx.value(BoundId::Th8Mid, &p).unwrap()
                    <= ctx.value(BoundId::Th8Outer, &p).unwrap() + 1e-8
            );
        }
        let lamai = ctx.value(BoundId::Lamai, &none).unwrap();
        assert!(lamai <= lama + 1e-10);
    }

    #[test]
    fn refinement_chains_on_examples() {
        let ctx = BoundContext::new(&example_3x3()).unwrap();
        let chains = ctx.refinement_chains(&CatalogGrid::default().t).unwrap();
        assert!(chains.iter().all(|c| c.monotone), "{chains:?}");
        let i = chains.iter().find(|c| c.id == "i").unwrap();
        let factor = 0.5 * 3f64.sqrt();
        assert!(i.values[1] / factor - i.values[0] / factor >= 0.08);

        let ctx = BoundContext::new(&CMatrix::identity(3)).unwrap();
        assert!(ctx
            .refinement_chains(&[0.0, 0.5, 1.0])
            .unwrap()
            .iter()
            .all(|c| c.monotone));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ctx = BoundContext::new(&random(&mut rng, 8)).unwrap();
        assert!(ctx
            .refinement_chains(&[0.0, 0.3, 1.0])
            .unwrap()
            .iter()
            .all(|c| c.monotone));
    }

    #[test]
    fn pair_bounds_on_identity_and_zero() {
        let i3 = CMatrix::identity(3);
        let params = BoundParams::alpha(0.3)
            .with_p(2.0)
            .with_fg_alpha(0.5)
            .with_r(2.0);
        for &v in PairVariant::ALL {
            let r = pair_bound(&i3, &i3, v, &params).unwrap();
            assert!(r.value >= 1.0 - 1e-9, "{}: {}", v.name(), r.value);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = random(&mut rng, 3);
        let z = CMatrix::zeros(3, 3);
        for &v in PairVariant::ALL {
            let r = pair_bound(&b, &z, v, &params).unwrap();
            assert!(r.holds());
            let vanishes = !matches!(
                v,
                PairVariant::Lem4I | PairVariant::Lem4III | PairVariant::Lem8
            );
            if vanishes {
                assert!(r.value.abs() < 1e-12, "{}: {}", v.name(), r.value);
            }
        }
    }

    #[test]
    fn pair_bound_hypothesis_is_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (b, c) = (random(&mut rng, 4), random(&mut rng, 4));
        let err = pair_bound(&b, &c, PairVariant::Lem7, &BoundParams::default()).unwrap_err();
        assert!(matches!(err, Error::Contract(ref m) if m.contains("commutation residual")));
        assert!(
            pair_bound(&b, &c, PairVariant::Lem4I, &BoundParams::default())
                .unwrap()
                .holds()
        );
    }

    #[test]
    fn lem4_ii_reproduces_th1_on_polar_pair() {
        let a = example_3x3();
        let pd = polar(&a).unwrap();
        let b = &pd.u * &pd.abs_spectrum.psd_power(0.5).unwrap();
        let c = pd.abs_spectrum.psd_power(0.5).unwrap();
        let v = pair_bound_value(&b, &c, PairVariant::Lem4II, &BoundParams::default()).unwrap();
        let th1 = eval_bound(&a, BoundId::Th1, &BoundParams::t(0.5))
            .unwrap()
            .value;
        assert!((v - th1).abs() < 1e-9);
    }

    #[test]
    fn prop1_examples() {
        let i2 = CMatrix::identity(2);
        let rs = prop1_bounds(&i2, &i2, &i2, 0.4).unwrap();
        assert!(rs.iter().all(|r| (r.value - 1.0).abs() < 1e-12));
        let z = CMatrix::zeros(2, 2);
        assert!(prop1_bounds(&i2, &i2, &z, 0.4)
            .unwrap()
            .iter()
            .all(|r| r.value >= 0.0 && r.holds()));
        assert!(matches!(
            prop1_bounds(&z, &z, &i2, 0.5),
            Err(Error::Contract(_))
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (b0, c0) = (random(&mut rng, 3), random(&mut rng, 3));
        let ab = &b0 * &b0.adjoint();
        let bb = &c0.adjoint() * &c0;
        let c = (&b0 * &c0).adjoint();
        let w_bc = radius_of(&(&b0 * &c0)).unwrap();
        for r in prop1_bounds(&ab, &bb, &c, 0.3).unwrap() {
            assert!(r.value >= w_bc - 1e-8 * w_bc.max(1.0));
        }
    }

    #[test]
    fn nilpotent_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = random(&mut rng, 2);
        let z = CMatrix::zeros(2, 2);
        let a = CMatrix::block2(&z, &x, &z, &z).unwrap();
        let c = nilpotent_identity_check(&a).unwrap();
        assert!(c.is_square_zero && c.w_half_norm && c.abs_sum_norm);
        let c = nilpotent_identity_check(&example_2x2()).unwrap();
        assert_eq!(
            (c.is_square_zero, c.w_half_norm, c.abs_sum_norm),
            (false, true, true)
        );
        let c = nilpotent_identity_check(&CMatrix::identity(3)).unwrap();
        assert_eq!(
            (c.is_square_zero, c.w_half_norm, c.abs_sum_norm),
            (false, false, false)
        );
    }

    #[test]
    fn bound_ids_round_trip_names() {
        for &id in BoundId::ALL {
            assert_eq!(id.name().parse::<BoundId>().unwrap(), id);
            assert_eq!(
                serde_json::to_string(&id).unwrap(),
                format!("\"{}\"", id.name())
            );
        }
        assert_eq!(BoundId::ALL.len(), 28);
    }
}
