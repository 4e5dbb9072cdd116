//! Hypothesis checks for the comparison, global-solvability and closed-solution
//! theorems, sampled on the finite horizon `[t0, T]`.
//!
//! Every condition is reduced to a margin that is nonnegative when it holds.
//! A condition passes when `margin ≥ -tol`. Strict inequalities `v > 0` are
//! reported with margin `v - strict_eps - tol`, so the same rule applies.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::integrate::WeightedPrimitive;
use crate::ode::{d_from, majorant_from, poly_value, MajorantMode, PolyOde};
use crate::report::{Conclusion, ConditionResult, CriterionReport, Verdict, SCHEMA_VERSION};
use crate::sampling;
use crate::subsup::{
    self, BuildError, Candidate, CandidateKind, Direction, EtaFamily, Split, ThetaSign, INEQUALITY_TOL,
};

/// Residual tolerance for user-supplied functions, whose derivatives come from
/// central differences.
pub const USER_RESIDUAL_TOL: f64 = 1e-6;
/// Number of nonzero values in the γ scan (plus γ = 0).
pub const GAMMA_SCAN: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    T2_3,
    T3_1,
    C3_1,
    T3_2,
    C3_2,
    T4_1,
    T4_2,
    T4_3,
    T4_4,
    T4_5,
    T4_6,
    T4_7,
    T4_8,
    C4_1,
    C4_2,
    C4_3,
    T5_1,
    T5_2,
    T5_3,
    T5_4,
    T5_5,
    T5_6,
    C5_1,
}

impl TheoremId {
    pub const ALL: [TheoremId; 23] = [
        TheoremId::T2_3,
        TheoremId::T3_1,
        TheoremId::C3_1,
        TheoremId::T3_2,
        TheoremId::C3_2,
        TheoremId::T4_1,
        TheoremId::T4_2,
        TheoremId::T4_3,
        TheoremId::T4_4,
        TheoremId::T4_5,
        TheoremId::T4_6,
        TheoremId::T4_7,
        TheoremId::T4_8,
        TheoremId::C4_1,
        TheoremId::C4_2,
        TheoremId::C4_3,
        TheoremId::T5_1,
        TheoremId::T5_2,
        TheoremId::T5_3,
        TheoremId::T5_4,
        TheoremId::T5_5,
        TheoremId::T5_6,
        TheoremId::C5_1,
    ];

    pub fn label(self) -> &'static str {
        use TheoremId::*;
        match self {
            T2_3 => "T2.3",
            T3_1 => "T3.1",
            C3_1 => "C3.1",
            T3_2 => "T3.2",
            C3_2 => "C3.2",
            T4_1 => "T4.1",
            T4_2 => "T4.2",
            T4_3 => "T4.3",
            T4_4 => "T4.4",
            T4_5 => "T4.5",
            T4_6 => "T4.6",
            T4_7 => "T4.7",
            T4_8 => "T4.8",
            C4_1 => "C4.1",
            C4_2 => "C4.2",
            C4_3 => "C4.3",
            T5_1 => "T5.1",
            T5_2 => "T5.2",
            T5_3 => "T5.3",
            T5_4 => "T5.4",
            T5_5 => "T5.5",
            T5_6 => "T5.6",
            C5_1 => "C5.1",
        }
    }

    /// Global-solvability results whose conclusion bounds every trajectory
    /// started in the admissible bracket.
    pub fn is_global(self) -> bool {
        use TheoremId::*;
        matches!(
            self,
            T4_1 | T4_2 | T4_3 | T4_4 | T4_5 | T4_6 | T4_7 | T4_8 | C4_1 | C4_2 | C4_3
        )
    }

    /// Closed-solution results.
    pub fn is_closed(self) -> bool {
        use TheoremId::*;
        matches!(self, T5_1 | T5_2 | T5_3 | T5_4 | T5_5 | T5_6 | C5_1)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    /// Accepts `T4.1`, `t4_1`, `C3.2`, ...
    fn from_str(s: &str) -> Result<TheoremId> {
        let norm = s.trim().to_ascii_uppercase().replace('_', ".");
        TheoremId::ALL
            .into_iter()
            .find(|id| id.label() == norm)
            .ok_or_else(|| Error::Invalid(format!("unknown theorem id {s:?}")))
    }
}

/// Everything a theorem quantifies over. Omitted values are chosen
/// automatically and echoed in the report.
#[derive(Debug, Clone, Default)]
pub struct Params {
    pub gamma: Option<f64>,
    pub nu: Option<f64>,
    pub c: Option<f64>,
    pub c_plus: Option<f64>,
    pub c_minus: Option<f64>,
    pub j: Option<usize>,
    pub partition: Option<Vec<f64>>,
    pub t_split: Option<f64>,
    pub split: Option<Split>,
    /// Coefficients `b_0..b_n` of the lower comparison equation.
    pub b: Option<Vec<Expr>>,
    /// Coefficients `e_0..e_n` of the upper comparison equation.
    pub e: Option<Vec<Expr>>,
    pub y1: Option<Expr>,
    pub y2: Option<Expr>,
    pub eta: Option<Expr>,
    pub zeta: Option<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSettings {
    /// Sample points per condition (refined near the worst sample).
    pub grid: usize,
    /// A condition passes when its margin is at least `-tol`.
    pub tol: f64,
    /// Strictness threshold for `>` conditions.
    pub strict_eps: f64,
    /// Tolerance of the exponentially weighted quadratures.
    pub quad_tol: f64,
}

impl Default for CheckSettings {
    fn default() -> CheckSettings {
        CheckSettings {
            grid: 2048,
            tol: 1e-9,
            strict_eps: 1e-9,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    NonNegativeForAllT,
    NonPositiveForAllT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralMargin {
    pub margin: f64,
    pub witness_t: f64,
    /// The weight vanished on the whole grid.
    pub vacuous: bool,
}

/// Worst value over `[lo, hi]` of `G(t) = offset + ∫_lo^t exp{∫_lo^τ kernel} weight dτ`
/// (sense `NonNegativeForAllT`) or of `-G(t)` (`NonPositiveForAllT`).
pub fn check_integral_condition<K, W>(
    kernel: K,
    weight: W,
    offset: f64,
    interval: (f64, f64),
    sense: Sense,
    settings: &CheckSettings,
) -> Result<IntegralMargin>
where
    K: FnMut(f64) -> Result<f64>,
    W: FnMut(f64) -> Result<f64>,
{
    let (lo, hi) = interval;
    let s = match sense {
        Sense::NonNegativeForAllT => 1.0,
        Sense::NonPositiveForAllT => -1.0,
    };
    let mut weight = weight;
    let mut vacuous = true;
    for t in sampling::grid(lo, hi, settings.grid) {
        if weight(t)? != 0.0 {
            vacuous = false;
            break;
        }
    }
    if vacuous || hi <= lo {
        return Ok(IntegralMargin {
            margin: s * offset,
            witness_t: lo,
            vacuous,
        });
    }
    let prim = WeightedPrimitive::compute(kernel, &mut weight, lo, hi, settings.quad_tol)?;
    let (t, m) = sampling::minimize(|t| Ok(s * (offset + prim.integral(t))), lo, hi, settings.grid)?;
    Ok(IntegralMargin {
        margin: m,
        witness_t: t,
        vacuous: false,
    })
}

/// The nested-kernel inequality on each segment `[t_l, t_{l+1}]` of a usable
/// sequence: kernel `a_1 - a_2 e^{-A_l}∫_{t_l}^s e^{A_l} a_0`, weight `a_0`, `≤ 0`.
pub fn check_usable_sequence_condition(
    ode: &PolyOde,
    partition: &[f64],
    settings: &CheckSettings,
) -> Result<Vec<IntegralMargin>> {
    let (t0, hi) = (ode.t0(), ode.horizon());
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
    if partition.len() < 2
        || !close(partition[0], t0)
        || !close(partition[partition.len() - 1], hi)
        || partition.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(Error::Invalid(format!(
            "partition must increase strictly from t0 = {t0} to T = {hi}"
        )));
    }
    let mut out = Vec::with_capacity(partition.len() - 1);
    for w in partition.windows(2) {
        let (a, b) = (w[0], w[1]);
        let inner = WeightedPrimitive::compute(|t| ode.coeff(1, t), |t| ode.coeff(0, t), a, b, settings.quad_tol)?;
        let m = check_integral_condition(
            |s| Ok(ode.coeff(1, s)? - ode.coeff(2, s)? * (-inner.exponent(s)).exp() * inner.integral(s)),
            |t| ode.coeff(0, t),
            0.0,
            (a, b),
            Sense::NonPositiveForAllT,
            settings,
        )?;
        out.push(m);
    }
    Ok(out)
}

/// Full result of a theorem check: the report plus the lower and upper bound
/// functions of the conclusion, when the theorem provides them.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: CriterionReport,
    pub lower: Option<Candidate>,
    pub upper: Option<Candidate>,
}

pub fn check_theorem(ode: &PolyOde, id: TheoremId, params: &Params) -> CriterionReport {
    check_theorem_detailed(ode, id, params, &CheckSettings::default()).report
}

pub fn check_theorem_with(ode: &PolyOde, id: TheoremId, params: &Params, settings: &CheckSettings) -> CriterionReport {
    check_theorem_detailed(ode, id, params, settings).report
}

/// Sign hypotheses of a theorem (including parity and split checks).
pub fn check_pointwise_conditions(
    ode: &PolyOde,
    id: TheoremId,
    params: &Params,
    settings: &CheckSettings,
) -> Vec<ConditionResult> {
    conditions_of(ode, id, params, settings, Kind::Pointwise)
}

/// Scalar endpoint inequalities of the closed-solution theorems.
pub fn check_boundary_conditions(
    ode: &PolyOde,
    id: TheoremId,
    params: &Params,
    settings: &CheckSettings,
) -> Vec<ConditionResult> {
    conditions_of(ode, id, params, settings, Kind::Boundary)
}

fn conditions_of(
    ode: &PolyOde,
    id: TheoremId,
    params: &Params,
    settings: &CheckSettings,
    kind: Kind,
) -> Vec<ConditionResult> {
    let mut ctx = Ctx::new(ode, params, settings);
    ctx.run(id);
    ctx.conds
        .into_iter()
        .filter(|(k, _)| *k == kind)
        .map(|(_, c)| c)
        .collect()
}

pub fn check_theorem_detailed(ode: &PolyOde, id: TheoremId, params: &Params, settings: &CheckSettings) -> Outcome {
    let mut ctx = Ctx::new(ode, params, settings);
    ctx.run(id);
    ctx.notes
        .push(format!("conditions sampled on [{}, {}] only", ctx.lo, ctx.hi));
    let conditions: Vec<ConditionResult> = ctx.conds.into_iter().map(|(_, c)| c).collect();
    let verdict = CriterionReport::aggregate(&conditions);
    let report = CriterionReport {
        schema_version: SCHEMA_VERSION,
        theorem: id.label().to_string(),
        verdict,
        conditions,
        params: ctx.used,
        grid: settings.grid,
        interval: (ctx.lo, ctx.hi),
        conclusion: ctx.conclusion,
        notes: ctx.notes,
    };
    Outcome {
        report,
        lower: ctx.lower,
        upper: ctx.upper,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Pointwise,
    Integral,
    Boundary,
    Construction,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    margin: f64,
    t: f64,
    u: Option<f64>,
}

impl Eval {
    fn at(margin: f64, t: f64) -> Eval {
        Eval { margin, t, u: None }
    }

    fn worse(self, other: Eval) -> Eval {
        if other.margin < self.margin || other.margin.is_nan() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weight {
    /// `ζ' + Σ a_k ζ^k`
    Residual,
    /// `a_0`
    A0,
}

fn error_t(e: &Error) -> Option<f64> {
    match e {
        Error::Eval(e) => Some(e.t),
        Error::Overflow { t } | Error::Integration { t, .. } => Some(*t),
        _ => None,
    }
}

fn gamma_ladder() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..GAMMA_SCAN).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (GAMMA_SCAN - 1) as f64)))
        .collect()
}

struct Ctx<'a> {
    ode: &'a PolyOde,
    p: &'a Params,
    s: &'a CheckSettings,
    lo: f64,
    hi: f64,
    conds: Vec<(Kind, ConditionResult)>,
    notes: Vec<String>,
    used: BTreeMap<String, Value>,
    conclusion: Conclusion,
    lower: Option<Candidate>,
    upper: Option<Candidate>,
}

impl<'a> Ctx<'a> {
    fn new(ode: &'a PolyOde, p: &'a Params, s: &'a CheckSettings) -> Ctx<'a> {
        Ctx {
            ode,
            p,
            s,
            lo: ode.t0(),
            hi: ode.horizon(),
            conds: Vec::new(),
            notes: Vec::new(),
            used: BTreeMap::new(),
            conclusion: Conclusion::default(),
            lower: None,
            upper: None,
        }
    }

    fn h(&self) -> f64 {
        (self.hi - self.lo) / (10.0 * self.s.grid as f64)
    }

    fn use_param(&mut self, key: &str, v: Value) {
        self.used.insert(key.to_string(), v);
    }

    fn min_t<F>(&self, f: F) -> Result<Eval>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let (t, v) = sampling::minimize(f, self.lo, self.hi, self.s.grid)?;
        Ok(Eval::at(v, t))
    }

    fn push_tol(&mut self, kind: Kind, label: &str, r: Result<Eval>, tol: f64, note: &str) -> bool {
        let c = match r {
            Ok(e) => {
                let status = if e.margin.is_nan() {
                    Verdict::Inconclusive
                } else if e.margin >= -tol {
                    Verdict::Satisfied
                } else {
                    Verdict::Violated
                };
                ConditionResult {
                    label: label.to_string(),
                    margin: e.margin,
                    witness_t: Some(e.t),
                    witness_u: e.u,
                    note: note.to_string(),
                    status,
                }
            }
            Err(e) => {
                let why = match e {
                    Error::Overflow { .. } => "exponent overflow".to_string(),
                    ref e => e.to_string(),
                };
                let note = if note.is_empty() { why } else { format!("{note}; {why}") };
                ConditionResult {
                    label: label.to_string(),
                    margin: f64::NAN,
                    witness_t: error_t(&e),
                    witness_u: None,
                    note,
                    status: Verdict::Inconclusive,
                }
            }
        };
        let ok = c.passed();
        self.conds.push((kind, c));
        ok
    }

    fn push(&mut self, kind: Kind, label: &str, r: Result<Eval>, note: &str) -> bool {
        self.push_tol(kind, label, r, self.s.tol, note)
    }

    /// `v > 0` with `v = e.margin`.
    fn push_strict(&mut self, kind: Kind, label: &str, r: Result<Eval>, note: &str) -> bool {
        let shift = self.s.strict_eps + self.s.tol;
        self.push(
            kind,
            label,
            r.map(|e| Eval {
                margin: e.margin - shift,
                ..e
            }),
            note,
        )
    }

    fn push_exact(&mut self, kind: Kind, label: &str, ok: bool, note: &str) -> bool {
        let margin = if ok { 0.0 } else { -1.0 };
        self.push(kind, label, Ok(Eval::at(margin, self.lo)), note)
    }

    fn skipped(&mut self, kind: Kind, label: &str, why: &str) {
        self.conds.push((
            kind,
            ConditionResult {
                label: label.to_string(),
                margin: f64::NAN,
                witness_t: None,
                witness_u: None,
                note: format!("not evaluated: {why}"),
                status: Verdict::Inconclusive,
            },
        ));
    }

    fn run(&mut self, id: TheoremId) {
        use TheoremId::*;
        match id {
            T2_3 => self.t2_3(),
            T3_1 => self.t3_1(),
            C3_1 => self.c3_1(),
            T3_2 => self.t3_2(),
            C3_2 => self.c3_2(),
            T4_1 => self.t4_1(),
            T4_2 => self.t4_2(),
            T4_3 => self.t4_3(),
            T4_4 => self.t4_4(),
            T4_5 => self.t4_5(),
            T4_6 => self.t4_6(),
            T4_7 => self.t4_7(),
            T4_8 => self.t4_8(),
            C4_1 => self.c4_1(),
            C4_2 => self.c4_2(),
            C4_3 => self.c4_3(),
            T5_1 => self.t5_1(),
            T5_2 => self.t5_2(),
            T5_3 => self.t5_3(),
            T5_4 => self.t5_4(),
            T5_5 => self.t5_5(),
            T5_6 => self.t5_6(),
            C5_1 => self.c5_1(),
        }
    }

    // ---- shared pointwise conditions ----

    /// `min_t min_{k ≥ from} s_k a_k` with `s_k = (-1)^k` when `alternate`.
    fn coeff_sign(&self, from: usize, alternate: bool) -> Result<Eval> {
        let ode = self.ode;
        self.min_t(|t| {
            let a = ode.coeff_vec(t)?;
            Ok((from..a.len())
                .map(|k| if alternate && k % 2 == 1 { -a[k] } else { a[k] })
                .fold(f64::INFINITY, f64::min))
        })
    }

    fn coeff_sum(&self, from: usize, alternate: bool) -> Result<Eval> {
        let ode = self.ode;
        self.min_t(|t| {
            let a = ode.coeff_vec(t)?;
            Ok((from..a.len())
                .map(|k| if alternate && k % 2 == 1 { -a[k] } else { a[k] })
                .sum())
        })
    }

    fn j_passes(&self, j: usize, alternate: bool) -> Option<f64> {
        let sign = self.coeff_sign(j, alternate).ok()?;
        let sum = self.coeff_sum(j, alternate).ok()?;
        Some(sign.margin.min(sum.margin - self.s.strict_eps - self.s.tol))
    }

    /// User `j`, else the first `j` meeting the sign conditions, else the best margin.
    fn choose_j(&mut self, alternate: bool) -> usize {
        let n = self.ode.degree();
        let j = match self.p.j {
            Some(j) => j,
            None => {
                let mut best = (2, f64::NEG_INFINITY);
                for j in 2..=n.max(2) {
                    let m = self.j_passes(j, alternate).unwrap_or(f64::NEG_INFINITY);
                    if m >= -self.s.tol {
                        best = (j, m);
                        break;
                    }
                    if m > best.1 {
                        best = (j, m);
                    }
                }
                best.0
            }
        };
        self.use_param("j", json!(j));
        j
    }

    /// Sign and sum conditions for powers `k ≥ j`. With `combined`, both are
    /// reported under that single label.
    fn lemma_power(&mut self, j: usize, alternate: bool, combined: Option<&str>) -> bool {
        let n = self.ode.degree();
        if j < 2 || j > n {
            let label = combined.unwrap_or("j");
            return self.push_exact(Kind::Pointwise, label, false, &format!("j = {j} outside 2..={n}"));
        }
        let sign = self.coeff_sign(j, alternate);
        let sum = self.coeff_sum(j, alternate);
        let (sign_label, sum_label) = if alternate {
            ("(-1)^k a_k ≥ 0 (k ≥ j)", "Σ_{k≥j} (-1)^k a_k > 0")
        } else {
            ("a_k ≥ 0 (k ≥ j)", "Σ_{k≥j} a_k > 0")
        };
        let note = format!("j = {j}");
        match combined {
            Some(label) => {
                let shift = self.s.strict_eps + self.s.tol;
                let r = sign.and_then(|a| {
                    sum.map(|b| {
                        a.worse(Eval {
                            margin: b.margin - shift,
                            ..b
                        })
                    })
                });
                self.push(
                    Kind::Pointwise,
                    label,
                    r,
                    &format!("{note}; {sign_label} and {sum_label}"),
                )
            }
            None => {
                let a = self.push(Kind::Pointwise, sign_label, sign, &note);
                let b = self.push_strict(Kind::Pointwise, sum_label, sum, &note);
                a && b
            }
        }
    }

    fn a0_nonpositive(&mut self, label: &str) -> bool {
        let ode = self.ode;
        let r = self.min_t(|t| Ok(-ode.coeff(0, t)?));
        self.push(Kind::Pointwise, label, r, "")
    }

    fn split(&self) -> Split {
        self.p.split.clone().unwrap_or_default()
    }

    fn t_split(&mut self) -> f64 {
        let t = self.p.t_split.unwrap_or(self.hi);
        self.use_param("T", json!(t));
        t
    }

    /// `min over t, u ≥ N of Σ s_k d_k u^k / Σ |d_k| u^k`, with a negative
    /// leading coefficient reported as its normalized value.
    fn d_poly_margin(&self, split: &Split, n_t: f64, alternate: bool) -> Result<Eval> {
        let n = self.ode.degree();
        let ladder = sampling::u_ladder(n_t);
        let mut d = vec![0.0; n.max(1)];
        let mut best = Eval::at(f64::INFINITY, self.lo);
        for t in sampling::grid(self.lo, self.hi, self.s.grid) {
            for (k, dk) in d.iter_mut().enumerate().skip(2) {
                let sign = if alternate && k % 2 == 0 { -1.0 } else { 1.0 };
                *dk = sign * split.d(k, t)?;
            }
            let total: f64 = d.iter().map(|v| v.abs()).sum();
            if let Some(lead) = d.iter().rev().find(|v| v.abs() > subsup::SIGN_SLACK) {
                if *lead < 0.0 {
                    best = best.worse(Eval::at(lead / total, t));
                }
            }
            for &u in &ladder {
                let v = poly_value(&d, u);
                let scale: f64 = d.iter().rev().fold(0.0, |acc, c| acc * u + c.abs());
                let m = if scale > 0.0 { v / scale } else { 0.0 };
                best = best.worse(Eval {
                    margin: m,
                    t,
                    u: Some(u),
                });
            }
        }
        if best.margin == f64::INFINITY {
            best.margin = 0.0;
        }
        Ok(best)
    }

    /// `a_n ≥ 0`, `a_k = a_n c_k + d_k`, `Σ d_k u^k ≥ 0 (u ≥ N_T)`.
    /// Returns whether all passed and `N_T`.
    fn split_checks(&mut self, labels: [&str; 3], t_split: f64) -> (bool, Option<f64>) {
        let ode = self.ode;
        let n = ode.degree();
        let split = self.split();
        let mut ok = true;
        let r = self.min_t(|t| ode.coeff(n, t));
        ok &= self.push(Kind::Pointwise, labels[0], r, "a_n ≥ 0");
        let bad: Vec<usize> = split.terms.keys().copied().filter(|&k| k < 2 || k + 1 > n).collect();
        if !bad.is_empty() {
            ok &= self.push_exact(
                Kind::Pointwise,
                labels[1],
                false,
                &format!("split indices {bad:?} outside 2..={}", n.saturating_sub(1)),
            );
        } else {
            let r = self.min_t(|t| {
                let a = ode.coeff_vec(t)?;
                let mut worst: f64 = 0.0;
                for k in 2..n {
                    let gap = (a[k] - a[n] * split.c(k, t)? - split.d(k, t)?).abs();
                    worst = worst.max(gap / (1.0 + a[k].abs()));
                }
                Ok(-worst)
            });
            ok &= self.push(Kind::Pointwise, labels[1], r, "a_k = a_n c_k + d_k (relative gap)");
        }
        let n_t = match subsup::split_bound(&split, n, self.lo, t_split) {
            Ok(v) => v,
            Err(e) => {
                self.push(Kind::Pointwise, labels[2], Err(e), "");
                return (false, None);
            }
        };
        self.use_param("N_T", json!(n_t));
        let r = self.d_poly_margin(&split, n_t, false);
        ok &= self.push(Kind::Pointwise, labels[2], r, "Σ d_k u^k ≥ 0 for u ≥ N_T (relative)");
        (ok, Some(n_t))
    }

    /// Builder result as a construction condition carrying the verified margin.
    fn built(&mut self, label: &str, r: std::result::Result<Candidate, BuildError>) -> Option<Candidate> {
        match r {
            Ok(c) => {
                let m = subsup::verify_differential_inequality(&c, self.ode, (self.lo, self.hi), self.s.grid)
                    .map(|m| Eval::at(m.min, m.witness_t));
                if self.push_tol(Kind::Construction, label, m, INEQUALITY_TOL, "differential inequality") {
                    Some(c)
                } else {
                    None
                }
            }
            Err(BuildError::HypothesisViolated {
                condition,
                t,
                u,
                margin,
            }) => {
                self.push(
                    Kind::Construction,
                    label,
                    Ok(Eval { margin, t, u }),
                    &format!("construction failed: {condition}"),
                );
                None
            }
            Err(BuildError::DegenerateDenominator { t }) => {
                self.push(Kind::Construction, label, Ok(Eval::at(-1.0, t)), "Σ_{k≥j} a_k vanishes");
                None
            }
            Err(BuildError::Numeric(e)) => {
                self.push(Kind::Construction, label, Err(e), "");
                None
            }
        }
    }

    /// A user-supplied sub (`Direction::Sub`) or super solution, verified.
    fn user_candidate(&mut self, label: &str, e: &Expr, dir: Direction) -> Option<Candidate> {
        let c = Candidate::user(e.clone(), dir, self.lo, self.hi);
        let m = subsup::verify_differential_inequality(&c, self.ode, (self.lo, self.hi), self.s.grid)
            .map(|m| Eval::at(m.min, m.witness_t));
        if self.push_tol(
            Kind::Construction,
            label,
            m,
            USER_RESIDUAL_TOL,
            "differential inequality (user supplied)",
        ) {
            Some(c)
        } else {
            None
        }
    }

    fn zeta_or_zero(&mut self) -> Candidate {
        match &self.p.zeta {
            Some(e) => {
                self.use_param("zeta", json!(e.to_string()));
                Candidate::user(e.clone(), Direction::Super, self.lo, self.hi)
            }
            None => {
                self.use_param("zeta", json!("0"));
                Candidate::constant(0.0, Direction::Super, self.lo, self.hi)
            }
        }
    }

    /// `ζ(t0) - ν + ∫ exp{∫ D₁(cand, ζ)} w ≤ 0` with the smallest admissible ν
    /// unless supplied; sets the conclusion `ζ ≤ y ≤ cand` for `y(t0) ∈ [ν, cand(t0)]`.
    fn nu_condition(
        &mut self,
        label: &str,
        cand: &Candidate,
        zeta: &Candidate,
        mode: MajorantMode,
        weight: Weight,
        zeta_nonneg: bool,
    ) -> bool {
        let mut ok = true;
        if zeta_nonneg {
            let r = self.min_t(|t| zeta.value(t));
            ok &= self.push(Kind::Pointwise, "ζ ≥ 0", r, "");
        }
        let (z0, c0) = match (zeta.value(self.lo), cand.value(self.lo)) {
            (Ok(z), Ok(c)) => (z, c),
            (Err(e), _) | (_, Err(e)) => {
                self.push(Kind::Integral, label, Err(e), "");
                return false;
            }
        };
        ok &= self.push_strict(Kind::Pointwise, "ζ(t0) < η(t0)", Ok(Eval::at(c0 - z0, self.lo)), "");
        let ode = self.ode;
        let h = self.h();
        let prim = WeightedPrimitive::compute(
            |t| Ok(majorant_from(&ode.coeff_vec(t)?, cand.value(t)?, zeta.value(t)?, mode)),
            |t| {
                let a = ode.coeff_vec(t)?;
                match weight {
                    Weight::A0 => Ok(a[0]),
                    Weight::Residual => Ok(zeta.derivative(t, h)? + poly_value(&a, zeta.value(t)?)),
                }
            },
            self.lo,
            self.hi,
            self.s.quad_tol,
        );
        let max_j = prim.and_then(|p| sampling::maximize(|t| Ok(p.integral(t)), self.lo, self.hi, self.s.grid));
        let (t_max, j_max) = match max_j {
            Ok(v) => v,
            Err(e) => {
                self.push(Kind::Integral, label, Err(e), "");
                self.skipped(Kind::Pointwise, "ν ∈ [ζ(t0), η(t0)]", "integral unavailable");
                return false;
            }
        };
        let auto = self.p.nu.is_none();
        let nu = self.p.nu.unwrap_or(z0 + j_max.max(0.0));
        self.use_param("nu", json!(nu));
        let note = if auto { "ν chosen minimal" } else { "" };
        ok &= self.push(Kind::Integral, label, Ok(Eval::at(nu - z0 - j_max, t_max)), note);
        ok &= self.push(
            Kind::Pointwise,
            "ν ∈ [ζ(t0), η(t0)]",
            Ok(Eval::at((nu - z0).min(c0 - nu), self.lo)),
            "",
        );
        self.lower = Some(zeta.clone());
        self.upper = Some(cand.clone());
        self.conclusion = Conclusion {
            statement: format!(
                "every solution with y(t0) ∈ [{nu}, {c0}] exists on [{}, {}] and ζ ≤ y ≤ η",
                self.lo, self.hi
            ),
            initial_bracket: Some((nu, c0)),
            ..Conclusion::default()
        };
        ok
    }

    /// `sense · ∫ exp{∫kernel} a_0 ≥ 0` on the horizon (default `≤ 0`).
    fn a0_integral<K>(&self, kernel: K) -> Result<Eval>
    where
        K: FnMut(f64) -> Result<f64>,
    {
        let ode = self.ode;
        check_integral_condition(
            kernel,
            |t| ode.coeff(0, t),
            0.0,
            (self.lo, self.hi),
            Sense::NonPositiveForAllT,
            self.s,
        )
        .map(|m| Eval::at(m.margin, m.witness_t))
    }

    /// User γ, else the smallest (or largest) passing value of the γ ladder,
    /// else the value with the best margin.
    fn gamma_scan<F>(&mut self, label: &str, largest: bool, mut eval: F) -> (f64, bool)
    where
        F: FnMut(f64) -> Result<Eval>,
    {
        if let Some(g) = self.p.gamma {
            self.use_param("gamma", json!(g));
            let r = eval(g);
            return (g, self.push(Kind::Integral, label, r, ""));
        }
        let mut pick: Option<(f64, Eval)> = None;
        let mut best: Option<(f64, Result<Eval>)> = None;
        for g in gamma_ladder() {
            let r = eval(g);
            if let Ok(e) = &r {
                if e.margin >= -self.s.tol {
                    pick = Some((g, *e));
                    if !largest {
                        break;
                    }
                }
            }
            let better = match (&best, &r) {
                (None, _) => true,
                (Some((_, Err(_))), Ok(_)) => true,
                (Some((_, Ok(b))), Ok(e)) => e.margin > b.margin,
                _ => false,
            };
            if better {
                best = Some((g, r));
            }
        }
        let (g, r, note) = match pick {
            Some((g, e)) => (g, Ok(e), "γ from scan"),
            None => {
                let (g, r) = best.expect("ladder is nonempty");
                (g, r, "no scanned γ passes; best margin shown")
            }
        };
        self.use_param("gamma", json!(g));
        (g, self.push(Kind::Integral, label, r, note))
    }

    /// Lemma-type conditions for `η_c`: `a_2 > 0` and, for `c ≥ max I`,
    /// `Σ_{k≥3}|a_k| η_c^{k-2} ≤ a_2`. Builds `η_c` when both hold.
    fn eta_c(&mut self, labels: [&str; 2]) -> Option<Candidate> {
        let ode = self.ode;
        if ode.degree() < 2 {
            self.push_exact(Kind::Pointwise, labels[0], false, "degree below 2");
            return None;
        }
        let r = self.min_t(|t| ode.coeff(2, t));
        let ok4 = self.push_strict(Kind::Pointwise, labels[0], r, "a_2 > 0");
        let prim = match subsup::a1_primitive(ode) {
            Ok(p) => p,
            Err(e) => {
                self.push(Kind::Pointwise, labels[1], Err(e), "");
                return None;
            }
        };
        let (tmax, imax) = match sampling::maximize(|t| Ok(prim.integral(t)), self.lo, self.hi, subsup::BUILD_GRID) {
            Ok(v) => v,
            Err(e) => {
                self.push(Kind::Pointwise, labels[1], Err(e), "");
                return None;
            }
        };
        let c = self.p.c.unwrap_or(imax + sampling::SUP_INFLATION);
        self.use_param("c", json!(c));
        let r = self.min_t(|t| {
            let a = ode.coeff_vec(t)?;
            let eta = ((-prim.exponent(t)).exp() * (c - prim.integral(t))).max(0.0);
            let mut s = 0.0;
            let mut p = 1.0;
            for ak in &a[3..] {
                p *= eta;
                s += ak.abs() * p;
            }
            Ok(a[2] - s)
        });
        let r = r.map(|e| e.worse(Eval::at(c - imax, tmax)));
        let ok5 = self.push(
            Kind::Pointwise,
            labels[1],
            r,
            "c ≥ max ∫e^{∫a_1}a_0 and Σ_{k≥3}|a_k| η_c^{k-2} ≤ a_2",
        );
        if ok4 && ok5 {
            self.built("η_c sub solution", subsup::build_eta_c(ode, c))
        } else {
            None
        }
    }

    /// `θ_{c⁺} ≤ 1` / `|θ⁻_{c⁻}| ≤ 1` with `c` at least its lower bound.
    fn theta(&mut self, sign: ThetaSign, label: &str) -> Option<Candidate> {
        let ode = self.ode;
        let (key, user) = match sign {
            ThetaSign::Plus => ("c_plus", self.p.c_plus.or(self.p.c)),
            ThetaSign::Minus => ("c_minus", self.p.c_minus),
        };
        let rho = if sign == ThetaSign::Plus { 1.0 } else { -1.0 };
        let prim = match subsup::alpha_primitive(ode) {
            Ok(p) => p,
            Err(e) => {
                self.push(Kind::Pointwise, label, Err(e), "");
                return None;
            }
        };
        let (tb, bound) = match sampling::maximize(|t| Ok(rho * prim.integral(t)), self.lo, self.hi, subsup::BUILD_GRID)
        {
            Ok(v) => v,
            Err(e) => {
                self.push(Kind::Pointwise, label, Err(e), "");
                return None;
            }
        };
        let c = user.unwrap_or(bound + sampling::SUP_INFLATION);
        self.use_param(key, json!(c));
        let r = self
            .min_t(|t| Ok(1.0 - (-prim.exponent(t)).exp() * (c - rho * prim.integral(t))))
            .map(|e| e.worse(Eval::at(c - bound, tb)));
        let note = match sign {
            ThetaSign::Plus => "c⁺ ≥ max J and θ_{c⁺} ≤ 1",
            ThetaSign::Minus => "c⁻ ≥ -min J and |θ⁻_{c⁻}| ≤ 1",
        };
        if self.push(Kind::Pointwise, label, r, note) {
            let name = match sign {
                ThetaSign::Plus => "θ_{c⁺} sub solution",
                ThetaSign::Minus => "θ⁻_{c⁻} super solution",
            };
            self.built(name, subsup::build_theta(ode, c, sign))
        } else {
            None
        }
    }

    fn int_a1(&self) -> Result<(f64, f64, WeightedPrimitive)> {
        let prim = subsup::a1_primitive(self.ode)?;
        Ok((prim.exponent(self.hi), prim.integral(self.hi), prim))
    }

    fn global_statement(&mut self, lower: f64, upper: f64, bounds: &str) {
        self.conclusion = Conclusion {
            statement: format!(
                "every solution with y(t0) ∈ [{lower}, {upper}] exists on [{}, {}] and {bounds}",
                self.lo, self.hi
            ),
            initial_bracket: Some((lower, upper)),
            ..Conclusion::default()
        };
    }

    fn closed_statement(&mut self, bracket: Option<(f64, f64)>, what: &str, isolation: bool) {
        self.conclusion = Conclusion {
            statement: format!("the equation has {what} on [{}, {}]", self.lo, self.hi),
            initial_bracket: None,
            closed_bracket: bracket,
            isolation_available: isolation,
        };
    }

    // ---- drivers ----

    fn usable_sequence(&mut self) -> bool {
        let partition = self.p.partition.clone().unwrap_or_else(|| vec![self.lo, self.hi]);
        self.use_param("partition", json!(partition));
        match check_usable_sequence_condition(self.ode, &partition, self.s) {
            Ok(ms) => {
                let single = ms.len() == 1;
                let mut ok = true;
                for (l, m) in ms.iter().enumerate() {
                    let label = if single {
                        "(D)".to_string()
                    } else {
                        format!("(D) segment {}", l + 1)
                    };
                    let note = if m.vacuous { "identically zero" } else { "" };
                    ok &= self.push(Kind::Integral, &label, Ok(Eval::at(m.margin, m.witness_t)), note);
                }
                ok
            }
            Err(e) => self.push(Kind::Integral, "(D)", Err(e), ""),
        }
    }

    fn t2_3(&mut self) {
        let r = self.coeff_sign(2, false);
        self.push(Kind::Pointwise, "(C)", r, "a_k ≥ 0 for k ≥ 2");
        self.usable_sequence();
        self.conclusion = Conclusion {
            statement: "for every γ ≥ 0 the sub inequality has a solution η with η(t0) = γ and 0 ≤ η ≤ I_γ".into(),
            ..Conclusion::default()
        };
    }

    /// η* from the user, the split or `M*_{T,j}`, in that order.
    fn eta_star_any(&mut self) -> Option<Candidate> {
        if let Some(e) = self.p.eta.clone() {
            self.use_param("eta", json!(e.to_string()));
            return self.user_candidate("η* sub solution", &e, Direction::Sub);
        }
        let t_split = self.t_split();
        if let Some(split) = self.p.split.clone() {
            self.use_param("eta", json!("η*_T"));
            return self.built("η* sub solution", subsup::build_eta_star(self.ode, t_split, &split));
        }
        let j = self.choose_j(false);
        self.use_param("eta", json!("M*_{T,j}"));
        self.built("η* sub solution", subsup::build_m_star(self.ode, j, t_split))
    }

    /// Kernel majorant for the comparison theorems: all positive parts when the
    /// reference function is nonnegative, even positive parts otherwise.
    fn majorant_mode(&mut self, y: &Candidate) -> MajorantMode {
        let nonneg = self.min_t(|t| y.value(t)).map(|e| e.margin >= 0.0).unwrap_or(false);
        let mode = if nonneg {
            MajorantMode::AllPositiveParts
        } else {
            MajorantMode::EvenPositiveParts
        };
        self.use_param("D1", json!(format!("{mode:?}")));
        mode
    }

    /// Condition (I): `D ≤ D₁` and `D₁` nondecreasing for `u ≥ y(t)`.
    fn condition_i(&mut self, y: &Candidate, mode: MajorantMode) -> bool {
        let offsets: Vec<f64> = std::iter::once(0.0)
            .chain((0..25).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 24.0)))
            .collect();
        let mut worst = Eval::at(f64::INFINITY, self.lo);
        let mut err = None;
        for t in sampling::grid(self.lo, self.hi, self.s.grid) {
            let r = (|| -> Result<()> {
                let a = self.ode.coeff_vec(t)?;
                let v = y.value(t)?;
                let mut prev: Option<f64> = None;
                for &du in &offsets {
                    let u = v + du;
                    let d = d_from(&a, u, v);
                    let d1 = majorant_from(&a, u, v, mode);
                    let m = (d1 - d) / (1.0 + d.abs() + d1.abs());
                    worst = worst.worse(Eval {
                        margin: m,
                        t,
                        u: Some(u),
                    });
                    if let Some(p) = prev {
                        let m = (d1 - p) / (1.0 + d1.abs() + p.abs());
                        worst = worst.worse(Eval {
                            margin: m,
                            t,
                            u: Some(u),
                        });
                    }
                    prev = Some(d1);
                }
                Ok(())
            })();
            if let Err(e) = r {
                err = Some(e);
                break;
            }
        }
        let r = match err {
            Some(e) => Err(e),
            None => Ok(worst),
        };
        self.push(
            Kind::Pointwise,
            "(I)",
            r,
            "D ≤ D₁ and D₁ nondecreasing in u ≥ y₁ (relative)",
        )
    }

    /// `max |y' + Σ c_k y^k|` as a negative margin.
    fn solves(&mut self, label: &str, y: &Candidate, coeffs: &[Expr]) -> bool {
        let h = self.h();
        let r = self.min_t(|t| {
            let mut acc = 0.0;
            let v = y.value(t)?;
            for c in coeffs.iter().rev() {
                acc = acc * v + c.eval(t)?;
            }
            Ok(-(y.derivative(t, h)? + acc).abs())
        });
        self.push_tol(
            Kind::Pointwise,
            label,
            r,
            USER_RESIDUAL_TOL,
            "residual (central differences)",
        )
    }

    fn expr_param(&mut self, key: &str, e: &Option<Expr>) -> Option<Expr> {
        match e {
            Some(e) => {
                self.use_param(key, json!(e.to_string()));
                Some(e.clone())
            }
            None => {
                self.skipped(
                    Kind::Pointwise,
                    &format!("{key} supplied"),
                    "missing comparison function",
                );
                None
            }
        }
    }

    /// `Σ (c_k - a_k) y^k`, or `-(y' + Σ a_k y^k)` without comparison coefficients.
    fn comparison_weight(&self, coeffs: Option<&Vec<Expr>>, y: &Candidate, t: f64) -> Result<f64> {
        let a = self.ode.coeff_vec(t)?;
        let v = y.value(t)?;
        match coeffs {
            Some(b) => {
                let mut acc = 0.0;
                for k in (0..a.len().max(b.len())).rev() {
                    let bk = match b.get(k) {
                        Some(e) => e.eval(t)?,
                        None => 0.0,
                    };
                    acc = acc * v + bk - a.get(k).copied().unwrap_or(0.0);
                }
                Ok(acc)
            }
            None => Ok(-(y.derivative(t, self.h())? + poly_value(&a, v))),
        }
    }

    fn t3_1(&mut self) {
        let Some(y1e) = self.expr_param("y1", &self.p.y1.clone()) else {
            return;
        };
        let y1 = Candidate::user(y1e, Direction::Super, self.lo, self.hi);
        if let Some(b) = self.p.b.clone() {
            self.solves("y₁ solves the b-equation", &y1, &b);
        }
        let eta = self.eta_star_any();
        let mode = self.majorant_mode(&y1);
        self.condition_i(&y1, mode);
        let Some(eta) = eta else {
            self.skipped(Kind::Integral, "(II)", "η* unavailable");
            return;
        };
        let (y0, e0) = match (y1.value(self.lo), eta.value(self.lo)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                self.push(Kind::Pointwise, "y₁(t0) < η*(t0)", Err(e), "");
                return;
            }
        };
        self.push_strict(Kind::Pointwise, "y₁(t0) < η*(t0)", Ok(Eval::at(e0 - y0, self.lo)), "");
        let ode = self.ode;
        let b = self.p.b.clone();
        let prim = WeightedPrimitive::compute(
            |t| Ok(majorant_from(&ode.coeff_vec(t)?, eta.value(t)?, y1.value(t)?, mode)),
            |t| self.comparison_weight(b.as_ref(), &y1, t),
            self.lo,
            self.hi,
            self.s.quad_tol,
        );
        // smallest γ with γ ≥ y₁(t) - J(t) for all t
        let need =
            prim.and_then(|p| sampling::maximize(|t| Ok(y1.value(t)? - p.integral(t)), self.lo, self.hi, self.s.grid));
        let (t_w, need) = match need {
            Ok(v) => v,
            Err(e) => {
                self.push(Kind::Integral, "(II)", Err(e), "");
                return;
            }
        };
        let gamma = self.p.gamma.unwrap_or(need.max(y0));
        self.use_param("gamma", json!(gamma));
        self.push(
            Kind::Integral,
            "(II)",
            Ok(Eval::at(gamma - need, t_w)),
            "checked as displayed: γ - y₁(t) + ∫… ≥ 0",
        );
        self.push(
            Kind::Pointwise,
            "γ ∈ [y₁(t0), η*(t0)]",
            Ok(Eval::at((gamma - y0).min(e0 - gamma), self.lo)),
            "",
        );
        self.lower = Some(y1);
        self.upper = Some(eta);
        self.global_statement(gamma, e0, "y₁ ≤ y ≤ η*");
    }

    fn c3_1(&mut self) {
        let src = self.p.zeta.clone().or_else(|| self.p.y1.clone());
        let Some(ze) = self.expr_param("zeta", &src) else {
            return;
        };
        let zeta = Candidate::user(ze, Direction::Super, self.lo, self.hi);
        let eta = self.eta_star_any();
        let mode = self.majorant_mode(&zeta);
        self.condition_i(&zeta, mode);
        let Some(eta) = eta else {
            self.skipped(Kind::Integral, "(II⁰)", "η* unavailable");
            return;
        };
        let saved_nu = self.p.nu;
        let mut p = self.p.clone();
        p.nu = p.gamma.or(saved_nu);
        let params = p;
        let mut sub = Ctx::new(self.ode, &params, self.s);
        sub.nu_condition("(II⁰)", &eta, &zeta, mode, Weight::Residual, false);
        // ν plays the role of γ here
        if let Some(nu) = sub.used.remove("nu") {
            sub.used.insert("gamma".into(), nu);
        }
        for (k, c) in sub.conds {
            let label = match c.label.as_str() {
                "ζ(t0) < η(t0)" => "ζ(t0) < η*(t0)".to_string(),
                "ν ∈ [ζ(t0), η(t0)]" => "γ ∈ [ζ(t0), η*(t0)]".to_string(),
                l => l.to_string(),
            };
            self.conds.push((k, ConditionResult { label, ..c }));
        }
        self.used.extend(sub.used);
        self.lower = sub.lower;
        self.upper = sub.upper;
        self.conclusion = sub.conclusion;
    }

    fn t3_2(&mut self) {
        let y1e = self.expr_param("y1", &self.p.y1.clone());
        let y2e = self.expr_param("y2", &self.p.y2.clone());
        let (Some(y1e), Some(y2e)) = (y1e, y2e) else {
            return;
        };
        let y1 = Candidate::user(y1e, Direction::Super, self.lo, self.hi);
        let y2 = Candidate::user(y2e, Direction::Sub, self.lo, self.hi);
        let b = self.p.b.clone();
        let e = self.p.e.clone();
        if let Some(b) = &b {
            self.solves("y₁ solves the b-equation", &y1, b);
        }
        if let Some(e) = &e {
            self.solves("y₂ solves the e-equation", &y2, e);
        }
        let (a0, b0) = match (y1.value(self.lo), y2.value(self.lo)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                self.push(Kind::Pointwise, "y₁(t0) ≤ y₂(t0)", Err(e), "");
                return;
            }
        };
        self.push(Kind::Pointwise, "y₁(t0) ≤ y₂(t0)", Ok(Eval::at(b0 - a0, self.lo)), "");
        let r = self.min_t(|t| self.comparison_weight(b.as_ref(), &y1, t));
        self.push(Kind::Pointwise, "(III)", r, "Σ (b_k - a_k) y₁^k ≥ 0");
        let r = self.min_t(|t| self.comparison_weight(e.as_ref(), &y2, t).map(|v| -v));
        self.push(Kind::Pointwise, "(IV)", r, "Σ (e_k - a_k) y₂^k ≤ 0");
        if let (Ok(a1), Ok(b1)) = (y1.value(self.hi), y2.value(self.hi)) {
            if a1 >= a0 && b1 <= b0 {
                self.conclusion.closed_bracket = Some((a0, b0));
                self.notes
                    .push("y₁(T) ≥ y₁(t0) and y₂(T) ≤ y₂(t0): closed-solution bracket available".into());
            }
        }
        self.lower = Some(y1);
        self.upper = Some(y2);
        let closed = self.conclusion.closed_bracket;
        self.global_statement(a0, b0, "y₁ ≤ y ≤ y₂");
        self.conclusion.closed_bracket = closed;
    }

    fn c3_2(&mut self) {
        let t_split = self.t_split();
        let eta = match self.p.eta.clone() {
            Some(e) => {
                self.use_param("eta", json!(e.to_string()));
                self.user_candidate("η sub solution", &e, Direction::Sub)
            }
            None => match self.p.split.clone() {
                Some(split) => {
                    self.use_param("eta", json!("η*_T"));
                    self.built("η sub solution", subsup::build_eta_star(self.ode, t_split, &split))
                }
                None => {
                    let j = self.choose_j(false);
                    self.use_param("eta", json!("M*_{T,j}"));
                    self.built("η sub solution", subsup::build_m_star(self.ode, j, t_split))
                }
            },
        };
        let zeta = match self.p.zeta.clone() {
            Some(e) => {
                self.use_param("zeta", json!(e.to_string()));
                self.user_candidate("ζ super solution", &e, Direction::Super)
            }
            None => match self.p.split.clone() {
                Some(split) => {
                    self.use_param("zeta", json!("ζ*_T"));
                    self.built("ζ super solution", subsup::build_zeta_star(self.ode, t_split, &split))
                }
                None => {
                    self.skipped(Kind::Construction, "ζ super solution", "no ζ and no split supplied");
                    None
                }
            },
        };
        let (Some(eta), Some(zeta)) = (eta, zeta) else {
            return;
        };
        let r = self.min_t(|t| Ok(eta.value(t)? - zeta.value(t)?));
        self.push(Kind::Pointwise, "ζ ≤ η", r, "");
        if let (Ok(z0), Ok(e0)) = (zeta.value(self.lo), eta.value(self.lo)) {
            self.global_statement(z0, e0, "ζ ≤ y ≤ η");
        }
        self.lower = Some(zeta);
        self.upper = Some(eta);
    }

    fn t4_1(&mut self) {
        let j = self.choose_j(false);
        let ok = self.lemma_power(j, false, None);
        let gamma = self.p.gamma.unwrap_or(0.0);
        self.use_param("gamma", json!(gamma));
        let t_split = self.t_split();
        self.notes
            .push("M*_{γ,T} read as the constant M_{T,j} + γ on [t0, T]".into());
        let zeta = self.zeta_or_zero();
        let cand = if ok {
            self.built(
                "M*_{γ,T} sub solution",
                subsup::build_m_star_shifted(self.ode, j, t_split, gamma),
            )
        } else {
            None
        };
        match cand {
            Some(m) => {
                self.use_param("M_T", json!(m.param("M_T")));
                self.nu_condition("(A)", &m, &zeta, MajorantMode::AllPositiveParts, Weight::Residual, true);
            }
            None => self.skipped(Kind::Integral, "(A)", "M*_{γ,T} unavailable"),
        }
    }

    fn eta_star_split(&mut self, labels: [&str; 3]) -> Option<Candidate> {
        let t_split = self.t_split();
        let (ok, _) = self.split_checks(labels, t_split);
        if !ok {
            return None;
        }
        let split = self.split();
        self.built("η*_T sub solution", subsup::build_eta_star(self.ode, t_split, &split))
    }

    fn t4_2(&mut self) {
        let eta = self.eta_star_split(["(1)", "(2)", "(3)"]);
        let zeta = self.zeta_or_zero();
        match eta {
            Some(eta) => {
                self.nu_condition(
                    "(B)",
                    &eta,
                    &zeta,
                    MajorantMode::AllPositiveParts,
                    Weight::Residual,
                    true,
                );
            }
            None => self.skipped(Kind::Integral, "(B)", "η*_T unavailable"),
        }
    }

    /// (E): `∫ exp{∫ Σ_{k≥1} a_k I_γ^{k-1}} a_0 ≤ 0`.
    fn condition_e(&mut self, largest: bool) -> (f64, bool) {
        let ode = self.ode;
        let (lo, hi, s) = (self.lo, self.hi, *self.s);
        let eval = |g: f64| -> Result<Eval> {
            let ig = subsup::build_i_gamma(ode, g)?;
            check_integral_condition(
                |t| Ok(d_from(&ode.coeff_vec(t)?, ig.value(t)?, 0.0)),
                |t| ode.coeff(0, t),
                0.0,
                (lo, hi),
                Sense::NonPositiveForAllT,
                &s,
            )
            .map(|m| Eval::at(m.margin, m.witness_t))
        };
        self.gamma_scan("(E)", largest, eval)
    }

    fn t4_3(&mut self) {
        let r = self.coeff_sign(2, false);
        self.push(Kind::Pointwise, "(C)", r, "a_k ≥ 0 for k ≥ 2");
        self.usable_sequence();
        let (gamma, _) = self.condition_e(true);
        if let Ok(ig) = subsup::build_i_gamma(self.ode, gamma) {
            self.upper = Some(ig);
        }
        self.lower = Some(Candidate::constant(0.0, Direction::Super, self.lo, self.hi));
        self.global_statement(0.0, gamma, "0 ≤ y ≤ I_γ");
    }

    fn t4_4(&mut self) {
        let eta = self.eta_star_split(["(1)", "(2)", "(3)"]);
        let r = self.coeff_sign(2, true);
        self.push(Kind::Pointwise, "(F)", r, "(-1)^k a_k ≥ 0 for k ≥ 2");
        let zeta = self.zeta_or_zero();
        match eta {
            Some(eta) => {
                self.nu_condition(
                    "(G)",
                    &eta,
                    &zeta,
                    MajorantMode::EvenPositiveParts,
                    Weight::Residual,
                    false,
                );
            }
            None => self.skipped(Kind::Integral, "(G)", "η*_T unavailable"),
        }
    }

    fn t4_5(&mut self) {
        let eta = self.eta_c(["(4)", "(5)"]);
        let zeta = self.zeta_or_zero();
        match eta {
            Some(eta) => {
                self.nu_condition(
                    "(H)",
                    &eta,
                    &zeta,
                    MajorantMode::AllPositiveParts,
                    Weight::Residual,
                    true,
                );
            }
            None => self.skipped(Kind::Integral, "(H)", "η_c unavailable"),
        }
    }

    fn t4_6(&mut self) {
        let theta = self.theta(ThetaSign::Plus, "θ_c ≤ 1");
        let zeta = self.zeta_or_zero();
        match theta {
            Some(th) => {
                self.nu_condition(
                    "(H_θ)",
                    &th,
                    &zeta,
                    MajorantMode::AllPositiveParts,
                    Weight::Residual,
                    true,
                );
            }
            None => self.skipped(Kind::Integral, "(H_θ)", "θ_c unavailable"),
        }
    }

    fn t4_7(&mut self) {
        let t_split = self.t_split();
        let (ok, n_t) = self.split_checks(["(1)", "(2)", "(3)"], t_split);
        let split = self.split();
        let ok_k = match n_t {
            Some(n_t) => {
                let r = self.d_poly_margin(&split, n_t, true);
                self.push(
                    Kind::Pointwise,
                    "(K)",
                    r,
                    "Σ (-1)^{k+1} d_k u^k ≥ 0 for u ≥ N_T (relative)",
                )
            }
            None => {
                self.skipped(Kind::Pointwise, "(K)", "N_T unavailable");
                false
            }
        };
        let odd = self.ode.degree() % 2 == 1;
        self.push_exact(Kind::Pointwise, "(L)", odd, &format!("n = {}", self.ode.degree()));
        if !(ok && ok_k && odd) {
            return;
        }
        let eta = self.built("η*_T sub solution", subsup::build_eta_star(self.ode, t_split, &split));
        let zeta = self.built(
            "ζ*_T super solution",
            subsup::build_zeta_star(self.ode, t_split, &split),
        );
        if let (Some(eta), Some(zeta)) = (eta, zeta) {
            if let (Ok(z0), Ok(e0)) = (zeta.value(self.lo), eta.value(self.lo)) {
                self.global_statement(z0, e0, "ζ*_T ≤ y ≤ η*_T");
            }
            self.lower = Some(zeta);
            self.upper = Some(eta);
        }
    }

    fn theta_pair(&mut self, plus: &str, minus: &str) -> Option<(Candidate, Candidate)> {
        let up = self.theta(ThetaSign::Plus, plus);
        let down = self.theta(ThetaSign::Minus, minus);
        self.notes
            .push("c⁻ bounded below by -min ∫e^{-∫α}a_0 and θ⁻ = -e^{∫α}[c⁻ + ∫e^{-∫α}a_0]".into());
        Some((down?, up?))
    }

    fn t4_8(&mut self) {
        if let Some((down, up)) = self.theta_pair("θ_{c⁺} ≤ 1", "|θ⁻_{c⁻}| ≤ 1") {
            if let (Ok(a), Ok(b)) = (down.value(self.lo), up.value(self.lo)) {
                self.global_statement(a, b, "θ⁻_{c⁻} ≤ y ≤ θ_{c⁺}");
            }
            self.lower = Some(down);
            self.upper = Some(up);
        }
    }

    fn c4_1(&mut self) {
        let t_split = self.t_split();
        let cand = if self.p.split.is_some() {
            self.eta_star_split(["(1)", "(2)", "(3)"])
        } else {
            let j = self.choose_j(false);
            if self.lemma_power(j, false, None) {
                self.built("M*_{T,j} sub solution", subsup::build_m_star(self.ode, j, t_split))
            } else {
                None
            }
        };
        self.a0_nonpositive("a_0 ≤ 0");
        if let Some(c) = cand {
            if let Ok(c0) = c.value(self.lo) {
                self.global_statement(0.0, c0, "0 ≤ y ≤ η");
            }
            self.lower = Some(Candidate::constant(0.0, Direction::Super, self.lo, self.hi));
            self.upper = Some(c);
        }
    }

    /// `ζ₀` from the user or the largest admissible value of a halving ladder.
    fn zeta0(&mut self, eta0: f64, positive: bool) -> Option<f64> {
        let ode = self.ode;
        let (lo, hi, grid) = (self.lo, self.hi, self.s.grid);
        let admissible = |z: f64| -> Result<Eval> {
            let (t, v) = sampling::minimize(
                |t| {
                    let a = ode.coeff_vec(t)?;
                    let mut s = 0.0;
                    let mut p = 1.0;
                    for ak in &a[2..] {
                        p *= z.abs();
                        s += ak.abs() * p;
                    }
                    Ok(a[1].abs() - s)
                },
                lo,
                hi,
                grid,
            )?;
            Ok(Eval::at(v, t))
        };
        let user = self.p.zeta.as_ref().and_then(|e| e.as_constant());
        let z = match user {
            Some(z) => z,
            None => {
                let start = if positive { eta0 } else { eta0.abs().max(1.0) };
                let sign = if positive { 1.0 } else { -1.0 };
                let mut pick = None;
                for i in if positive { 1..=40 } else { 0..=40 } {
                    let z = sign * start * 0.5f64.powi(i);
                    if matches!(admissible(z), Ok(e) if e.margin >= 0.0) {
                        pick = Some(z);
                        break;
                    }
                }
                pick.unwrap_or(sign * start * 0.5f64.powi(40))
            }
        };
        self.use_param("zeta0", json!(z));
        let range = if positive { z.min(eta0 - z) } else { -z };
        let r = admissible(z).map(|e| e.worse(Eval::at(range, self.lo)));
        let label = if positive {
            "ζ₀ ∈ (0, η_c(t0)), Σ|a_k|ζ₀^{k-1} ≤ |a_1|"
        } else {
            "ζ₀ < 0, Σ|a_k||ζ₀|^{k-1} ≤ a_1"
        };
        if self.push(Kind::Pointwise, label, r, "") {
            Some(z)
        } else {
            None
        }
    }

    fn corollary_eta_c(&mut self, positive: bool) {
        let eta = self.eta_c(["(4)", "(5)"]);
        let ode = self.ode;
        if positive {
            let r = self.min_t(|t| Ok(-ode.coeff(1, t)?));
            self.push_strict(Kind::Pointwise, "(I)", r, "a_1 < 0");
        } else {
            let r = self.min_t(|t| ode.coeff(1, t));
            self.push_strict(Kind::Pointwise, "a_1 > 0", r, "");
        }
        let label = if positive { "(J)" } else { "(J')" };
        let Some(eta) = eta else {
            self.skipped(Kind::Integral, label, "η_c unavailable");
            return;
        };
        let eta0 = match eta.value(self.lo) {
            Ok(v) => v,
            Err(e) => {
                self.push(Kind::Integral, label, Err(e), "");
                return;
            }
        };
        let Some(z) = self.zeta0(eta0, positive) else {
            self.skipped(Kind::Integral, label, "no admissible ζ₀");
            return;
        };
        if !positive {
            self.notes
                .push("ζ₀ < 0: even-k S_k(η_c, ζ₀) can be negative, so the kernel need not dominate D".into());
        }
        let zeta = Candidate::constant(z, Direction::Super, self.lo, self.hi);
        self.nu_condition(label, &eta, &zeta, MajorantMode::AllPositiveParts, Weight::A0, false);
    }

    fn c4_2(&mut self) {
        self.corollary_eta_c(true);
    }

    fn c4_3(&mut self) {
        self.corollary_eta_c(false);
    }

    fn t5_1(&mut self) {
        let j = self.choose_j(false);
        let ok = self.lemma_power(j, false, Some("1⁰"));
        self.notes.push("M_{T+γ} read as the constant M_{T,j} + γ".into());
        let m = if ok {
            match subsup::build_m_star(self.ode, j, self.hi) {
                Ok(c) => c.param("M_T"),
                Err(e) => {
                    self.built("M_{T,j}", Err(e));
                    None
                }
            }
        } else {
            None
        };
        let Some(m) = m else {
            self.skipped(Kind::Integral, "2⁰", "M_{T,j} unavailable");
            return;
        };
        self.use_param("M_T", json!(m));
        let ode = self.ode;
        let (lo, hi, s) = (self.lo, self.hi, *self.s);
        let (gamma, _) = self.gamma_scan("2⁰", false, |g| {
            check_integral_condition(
                |t| {
                    Ok(majorant_from(
                        &ode.coeff_vec(t)?,
                        m + g,
                        0.0,
                        MajorantMode::AllPositiveParts,
                    ))
                },
                |t| ode.coeff(0, t),
                0.0,
                (lo, hi),
                Sense::NonPositiveForAllT,
                &s,
            )
            .map(|r| Eval::at(r.margin, r.witness_t))
        });
        let int_a1 = self.int_a1().map(|v| v.0).unwrap_or(f64::NAN);
        let isolation = j == 2 && int_a1 > 0.0;
        if let Ok(e) = self.min_t(|t| ode.coeff(0, t)) {
            let nonzero = self
                .min_t(|t| Ok(-ode.coeff(0, t)?.abs()))
                .map(|e| e.margin < 0.0)
                .unwrap_or(false);
            if e.margin >= 0.0 && nonzero {
                self.notes
                    .push("a_0 ≥ 0 and a_0 ≢ 0: the closed solution is positive".into());
            }
        }
        self.closed_statement(Some((0.0, m + gamma)), "a nonnegative closed solution", isolation);
    }

    fn c5_1(&mut self) {
        let j = self.choose_j(true);
        let ok = self.lemma_power(j, true, None);
        self.a0_nonpositive("a_0 ≤ 0");
        if !ok {
            return;
        }
        let refl = self.ode.reflected();
        match subsup::build_m_star(&refl, j, refl.horizon()) {
            Ok(c) => {
                let m = c.param("M_T").unwrap_or(f64::NAN);
                self.use_param("M_T_reflected", json!(m));
                self.closed_statement(Some((-m, 0.0)), "a nonpositive closed solution", false);
            }
            Err(e) => {
                self.built("M_{T,j} of the reflected equation", Err(e));
            }
        }
    }

    fn t5_2(&mut self) {
        let r = self.coeff_sign(2, false);
        self.push(Kind::Pointwise, "(C)", r, "a_k ≥ 0 for k ≥ 2");
        self.usable_sequence();
        self.condition_e(false);
        let ode = self.ode;
        let sum = sampling::maximize(
            |t| Ok(ode.coeff_vec(t)?[2..].iter().sum::<f64>().abs()),
            self.lo,
            self.hi,
            self.s.grid,
        );
        let a1 = self.int_a1();
        let (r, isolation) = match (sum, a1) {
            (Ok((t, s)), Ok((int_a1, _, _))) => (Ok(Eval::at(s.max(int_a1), t)), int_a1 > 0.0),
            (Err(e), _) | (_, Err(e)) => (Err(e), false),
        };
        self.push_strict(Kind::Pointwise, "Σ a_k ≢ 0 or ∫a_1 > 0", r, "");
        self.notes
            .push("the upper end of the closed-solution bracket is not explicit; use the closed scan".into());
        self.closed_statement(None, "a nonnegative closed solution", isolation);
    }

    fn t5_3(&mut self) {
        let hi = self.hi;
        self.use_param("T", json!(hi));
        let (ok, _) = self.split_checks(["3⁰", "4⁰", "5⁰"], hi);
        let split = self.split();
        let fam = match EtaFamily::new(self.ode, &split, hi) {
            Ok(f) => f,
            Err(e) => {
                self.push(Kind::Boundary, "6⁰", Err(e), "");
                return;
            }
        };
        let a_t = fam.prim.exponent(hi);
        let i_t = fam.prim.integral(hi);
        let c_t = fam.c_t;
        self.use_param("c_T", json!(c_t));
        self.push(
            Kind::Boundary,
            "6⁰",
            Ok(Eval::at(i_t - c_t * (1.0 - a_t.exp()), hi)),
            "max I · (1 - e^{∫a_1}) ≤ I(T)",
        );
        self.notes.push("η_{γ,T} read as η_{N_T + γ, T}".into());
        let ode = self.ode;
        let (lo, s) = (self.lo, *self.s);
        let (gamma, _) = self.gamma_scan("7⁰", false, |g| {
            let eta = fam.candidate(g, CandidateKind::EtaStar, 1.0);
            check_integral_condition(
                |t| {
                    Ok(majorant_from(
                        &ode.coeff_vec(t)?,
                        eta.value(t)?,
                        0.0,
                        MajorantMode::AllPositiveParts,
                    ))
                },
                |t| ode.coeff(0, t),
                0.0,
                (lo, hi),
                Sense::NonPositiveForAllT,
                &s,
            )
            .map(|r| Eval::at(r.margin, r.witness_t))
        });
        let eta = fam.candidate(gamma, CandidateKind::EtaStar, 1.0);
        if ok {
            self.built("η_{γ,T} sub solution", Ok(eta.clone()));
        }
        let top = eta.value(lo).unwrap_or(f64::NAN);
        self.closed_statement(Some((0.0, top)), "a nonnegative closed solution", false);
    }

    fn t5_4(&mut self) {
        let eta = self.eta_c(["8⁰", "9⁰"]);
        let c = self.used.get("c").and_then(|v| v.as_f64());
        let ode = self.ode;
        match &eta {
            Some(eta) => {
                let r = self.a0_integral(|t| {
                    Ok(majorant_from(
                        &ode.coeff_vec(t)?,
                        eta.value(t)?,
                        0.0,
                        MajorantMode::AllPositiveParts,
                    ))
                });
                self.push(Kind::Integral, "10⁰", r, "");
            }
            None => self.skipped(Kind::Integral, "10⁰", "η_c unavailable"),
        }
        let (Some(c), Ok((a_t, i_t, _))) = (c, self.int_a1()) else {
            self.skipped(Kind::Boundary, "11⁰", "c unavailable");
            return;
        };
        self.push(
            Kind::Boundary,
            "11⁰",
            Ok(Eval::at(i_t - c * (1.0 - a_t.exp()), self.hi)),
            "c (1 - e^{∫a_1}) ≤ I(T)",
        );
        self.closed_statement(Some((0.0, c)), "a nonnegative closed solution", false);
    }

    fn t5_5(&mut self) {
        let hi = self.hi;
        self.use_param("T", json!(hi));
        let (_, n_t) = self.split_checks(["12⁰", "13⁰", "14⁰"], hi);
        let split = self.split();
        match n_t {
            Some(n_t) => {
                let r = self.d_poly_margin(&split, n_t, true);
                self.push(
                    Kind::Pointwise,
                    "15⁰",
                    r,
                    "Σ (-1)^{k+1} d_k u^k ≥ 0 for u ≥ N_T (relative)",
                );
            }
            None => self.skipped(Kind::Pointwise, "15⁰", "N_T unavailable"),
        }
        let n = self.ode.degree();
        self.push_exact(Kind::Pointwise, "16⁰", n % 2 == 1, &format!("n = {n}"));
        let (a_t, i_t, prim) = match self.int_a1() {
            Ok(v) => v,
            Err(e) => {
                self.push(Kind::Boundary, "17⁰", Err(e.clone()), "");
                self.push(Kind::Boundary, "18⁰", Err(e), "");
                return;
            }
        };
        let factor = 1.0 - a_t.exp();
        let imax = sampling::maximize(|t| Ok(prim.integral(t)), self.lo, hi, self.s.grid);
        let imin = sampling::minimize(|t| Ok(prim.integral(t)), self.lo, hi, self.s.grid);
        self.push(
            Kind::Boundary,
            "17⁰",
            imax.map(|(t, m)| Eval::at(i_t - m * factor, t)),
            "max I · (1 - e^{∫a_1}) ≤ I(T)",
        );
        self.push(
            Kind::Boundary,
            "18⁰",
            imin.map(|(t, m)| Eval::at(m * factor - i_t, t)),
            "min I · (1 - e^{∫a_1}) ≥ I(T)",
        );
        let eta = EtaFamily::new(self.ode, &split, hi).map(|f| f.n_t + f.c_t);
        let zeta = EtaFamily::new(&self.ode.sign_reflected(), &split.sign_reflected(), hi).map(|f| -(f.n_t + f.c_t));
        let bracket = match (zeta, eta) {
            (Ok(z), Ok(e)) => Some((z, e)),
            _ => None,
        };
        self.closed_statement(bracket, "a closed solution", false);
    }

    fn t5_6(&mut self) {
        let pair = self.theta_pair("19⁰ (c⁺)", "19⁰ (c⁻)");
        let cp = self.used.get("c_plus").and_then(|v| v.as_f64());
        let cm = self.used.get("c_minus").and_then(|v| v.as_f64());
        let prim = match subsup::alpha_primitive(self.ode) {
            Ok(p) => p,
            Err(e) => {
                self.push(Kind::Boundary, "20⁰ (c⁺)", Err(e), "");
                return;
            }
        };
        // e^{-∫α} over the whole horizon and J(T)
        let decay = prim.exponent(self.hi).exp();
        let j_t = prim.integral(self.hi);
        if let Some(cp) = cp {
            self.push(
                Kind::Boundary,
                "20⁰ (c⁺)",
                Ok(Eval::at(j_t - cp * (1.0 - decay), self.hi)),
                "c⁺ (1 - e^{-∫α}) ≤ J(T)",
            );
        }
        if let Some(cm) = cm {
            self.push(
                Kind::Boundary,
                "20⁰ (c⁻)",
                Ok(Eval::at(-cm * (1.0 - decay) - j_t, self.hi)),
                "θ⁻(t0) ≤ θ⁻(T), i.e. -c⁻ (1 - e^{-∫α}) ≥ J(T)",
            );
        }
        let bracket = match (cp, cm) {
            (Some(p), Some(m)) => Some((-m, p)),
            _ => None,
        };
        if let Some((down, up)) = pair {
            self.lower = Some(down);
            self.upper = Some(up);
        }
        self.closed_statement(bracket, "a closed solution between θ⁻_{c⁻} and θ_{c⁺}", false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode(c: &[&str], t0: f64, t1: f64) -> PolyOde {
        PolyOde::parse(c, t0, t1).unwrap()
    }

    fn settings() -> CheckSettings {
        CheckSettings {
            grid: 512,
            ..CheckSettings::default()
        }
    }

    #[test]
    fn theorem_ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.label().parse::<TheoremId>().unwrap(), id);
        }
        assert_eq!("t4_1".parse::<TheoremId>().unwrap(), TheoremId::T4_1);
        assert!("T9.9".parse::<TheoremId>().is_err());
    }

    #[test]
    fn integral_condition_examples() {
        let s = settings();
        let m = check_integral_condition(
            |_| Ok(0.0),
            |_| Ok(-1.0),
            0.0,
            (0.0, 1.0),
            Sense::NonPositiveForAllT,
            &s,
        )
        .unwrap();
        assert!(m.margin.abs() < 1e-12 && m.witness_t == 0.0);
        let m =
            check_integral_condition(|_| Ok(0.0), |_| Ok(0.0), 0.0, (0.0, 1.0), Sense::NonPositiveForAllT, &s).unwrap();
        assert!(m.vacuous && m.margin == 0.0);
        // kernel 1, weight 1: G = e^t - 1, so -G has minimum 1 - e at t = 1
        let m =
            check_integral_condition(|_| Ok(1.0), |_| Ok(1.0), 0.0, (0.0, 1.0), Sense::NonPositiveForAllT, &s).unwrap();
        assert!((m.margin - (1.0 - std::f64::consts::E)).abs() < 1e-8);
        assert!((m.witness_t - 1.0).abs() < 1e-12);
        let e = check_integral_condition(|_| Ok(1e4), |_| Ok(1.0), 0.0, (0.0, 1.0), Sense::NonPositiveForAllT, &s);
        assert!(matches!(e, Err(Error::Overflow { .. })));
    }

    #[test]
    fn usable_sequence_examples() {
        let s = settings();
        let zero = ode(&["0", "1", "1"], 0.0, 1.0);
        let ms = check_usable_sequence_condition(&zero, &[0.0, 1.0], &s).unwrap();
        assert!(ms[0].vacuous && ms[0].margin == 0.0);
        let neg = ode(&["-1", "0", "1"], 0.0, 1.0);
        let ms = check_usable_sequence_condition(&neg, &[0.0, 0.5, 1.0], &s).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms.iter().all(|m| m.margin >= 0.0));
        let pos = ode(&["1", "0", "1"], 0.0, 1.0);
        let ms = check_usable_sequence_condition(&pos, &[0.0, 1.0], &s).unwrap();
        assert!(ms[0].margin < 0.0 && ms[0].witness_t > 0.0);
        assert!(check_usable_sequence_condition(&pos, &[0.0, 0.5], &s).is_err());
    }

    #[test]
    fn corollary_4_1_simple() {
        let o = ode(&["0", "0", "1"], 0.0, 1.0);
        let r = check_theorem_with(&o, TheoremId::C4_1, &Params::default(), &settings());
        assert_eq!(r.verdict, Verdict::Satisfied, "{}", r.to_json());
    }

    #[test]
    fn theorem_5_1_fails_on_zero_equation() {
        let o = ode(&["0", "0", "0"], 0.0, 1.0);
        let r = check_theorem_with(&o, TheoremId::T5_1, &Params::default(), &settings());
        assert_eq!(r.verdict, Verdict::Violated);
        let c = r.condition("1⁰").unwrap();
        assert_eq!(c.status, Verdict::Violated);
        assert!(c.witness_t.is_some());
    }

    #[test]
    fn theorem_3_2_example() {
        let o = ode(&["sin(t)", "1", "0", "1"], 0.0, 2.0 * std::f64::consts::PI);
        let p = Params {
            b: Some(
                ["1", "1", "1", "1"]
                    .iter()
                    .map(|s| crate::expr::parse(s).unwrap())
                    .collect(),
            ),
            e: Some(
                ["1", "-1", "1", "-1"]
                    .iter()
                    .map(|s| crate::expr::parse(s).unwrap())
                    .collect(),
            ),
            y1: Some(crate::expr::parse("-1").unwrap()),
            y2: Some(crate::expr::parse("1").unwrap()),
            ..Params::default()
        };
        let r = check_theorem_with(&o, TheoremId::T3_2, &p, &settings());
        assert_eq!(r.verdict, Verdict::Satisfied, "{}", r.to_json());
        assert_eq!(r.conclusion.closed_bracket, Some((-1.0, 1.0)));
    }

    #[test]
    fn boundary_examples() {
        let s = settings();
        // a_0 = a_1 = 0, c = 0: 11⁰ margin 0
        let o = ode(&["0", "0", "1"], 0.0, 1.0);
        let p = Params {
            c: Some(0.0),
            ..Params::default()
        };
        let cs = check_boundary_conditions(&o, TheoremId::T5_4, &p, &s);
        let c11 = cs.iter().find(|c| c.label == "11⁰").unwrap();
        assert_eq!(c11.margin, 0.0);
        // a_1 = 1, a_0 = 0, c = 1 on [0, 1]: margin e - 1
        let o = ode(&["0", "1", "1"], 0.0, 1.0);
        let p = Params {
            c: Some(1.0),
            ..Params::default()
        };
        let cs = check_boundary_conditions(&o, TheoremId::T5_4, &p, &s);
        let c11 = cs.iter().find(|c| c.label == "11⁰").unwrap();
        assert!((c11.margin - (std::f64::consts::E - 1.0)).abs() < 1e-8);
        assert!(c11.passed());
        // I ≡ 0 and ∫a_1 ≥ 0: 17⁰ and 18⁰ hold
        let o = ode(&["0", "1", "0", "1"], 0.0, 1.0);
        let cs = check_boundary_conditions(&o, TheoremId::T5_5, &Params::default(), &s);
        assert!(cs
            .iter()
            .filter(|c| c.label == "17⁰" || c.label == "18⁰")
            .all(|c| c.passed()));
        assert_eq!(cs.len(), 2);
    }

    #[test]
    fn pointwise_alternating_signs() {
        let o = ode(&["-1", "1", "1", "-1"], 0.0, 1.0);
        let p = Params {
            j: Some(2),
            ..Params::default()
        };
        let cs = check_pointwise_conditions(&o, TheoremId::C5_1, &p, &settings());
        assert!(cs.iter().all(|c| c.passed()), "{cs:?}");
    }

    #[test]
    fn reports_are_deterministic() {
        let o = ode(&["-1", "1", "1"], 0.0, 1.0);
        let a = check_theorem_with(&o, TheoremId::T4_5, &Params::default(), &settings());
        let b = check_theorem_with(&o, TheoremId::T4_5, &Params::default(), &settings());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn every_driver_returns_a_report() {
        let o = ode(&["-0.1*sin(t)", "1", "0.5", "0.2"], 0.0, 1.0);
        for id in TheoremId::ALL {
            let r = check_theorem_with(&o, id, &Params::default(), &settings());
            assert_eq!(r.theorem, id.label());
            assert!(!r.conditions.is_empty(), "{id}");
        }
    }
}
