//! Explicit sub and super solution candidates and the check of
//! `η' + Σ a_k η^k ≥ 0` (sub) / `ζ' + Σ a_k ζ^k ≤ 0` (super).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::integrate::WeightedPrimitive;
use crate::ode::{poly_value, PolyOde};
use crate::sampling::{self, SUP_INFLATION};

/// Absolute slack for sampled `≥ 0` sign conditions.
pub const SIGN_SLACK: f64 = 1e-12;
/// Pointwise tolerance for `a_k = a_n c_k + d_k`.
pub const SPLIT_TOL: f64 = 1e-9;
/// Margin a built candidate must reach on the check grid.
pub const INEQUALITY_TOL: f64 = 1e-8;
const STRICT_EPS: f64 = 1e-9;
const PRIMITIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateKind {
    MStar,
    EtaStar,
    EtaC,
    ThetaC,
    ThetaCMinus,
    ZetaStar,
    IGamma,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Sub,
    Super,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaSign {
    Plus,
    Minus,
}

/// `a_k = a_n c_k + d_k` for `k = 2..n-1`; missing entries are zero.
#[derive(Debug, Clone, Default)]
pub struct Split {
    pub terms: BTreeMap<usize, (Expr, Expr)>,
}

impl Split {
    pub fn new() -> Split {
        Split::default()
    }

    pub fn with(mut self, k: usize, c: Expr, d: Expr) -> Split {
        self.terms.insert(k, (c, d));
        self
    }

    pub fn parse(entries: &[(usize, &str, &str)]) -> Result<Split> {
        let mut s = Split::new();
        for &(k, c, d) in entries {
            s.terms.insert(k, (crate::expr::parse(c)?, crate::expr::parse(d)?));
        }
        Ok(s)
    }

    pub(crate) fn c(&self, k: usize, t: f64) -> Result<f64> {
        self.terms.get(&k).map_or(Ok(0.0), |(c, _)| Ok(c.eval(t)?))
    }

    pub(crate) fn d(&self, k: usize, t: f64) -> Result<f64> {
        self.terms.get(&k).map_or(Ok(0.0), |(_, d)| Ok(d.eval(t)?))
    }

    /// `c~_k = (-1)^{k+1} c_k`, `d~_k = (-1)^{k+1} d_k`.
    pub fn sign_reflected(&self) -> Split {
        let flip = |k: usize, e: &Expr| {
            if k.is_multiple_of(2) {
                Expr::Neg(Box::new(e.clone()))
            } else {
                e.clone()
            }
        };
        Split {
            terms: self
                .terms
                .iter()
                .map(|(&k, (c, d))| (k, (flip(k, c), flip(k, d))))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("hypothesis {condition} violated at t = {t}{} (margin {margin:e})", .u.map(|u| format!(", u = {u}")).unwrap_or_default())]
    HypothesisViolated {
        condition: String,
        t: f64,
        u: Option<f64>,
        margin: f64,
    },
    #[error("denominator Σ_{{k≥j}} a_k vanishes at t = {t}")]
    DegenerateDenominator { t: f64 },
    #[error(transparent)]
    Numeric(#[from] Error),
}

impl BuildError {
    fn violated(condition: &str, t: f64, u: Option<f64>, margin: f64) -> BuildError {
        BuildError::HypothesisViolated {
            condition: condition.to_string(),
            t,
            u,
            margin,
        }
    }
}

/// Nondecreasing parameter beyond the gluing point, sampled then linearly
/// interpolated; equals the head constant at the gluing point.
#[derive(Debug, Clone)]
pub(crate) struct Tail {
    ts: Vec<f64>,
    vals: Vec<f64>,
}

impl Tail {
    fn constant(t: f64, v: f64) -> Tail {
        Tail {
            ts: vec![t],
            vals: vec![v],
        }
    }

    /// Running maximum of `f` over `(from, to]` seeded with `start`.
    fn running_max<F>(mut f: F, from: f64, to: f64, start: f64, samples: usize) -> Result<Tail>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if to <= from {
            return Ok(Tail::constant(from, start));
        }
        let g = sampling::grid(from, to, samples);
        let mut vals = Vec::with_capacity(g.len());
        let mut m = start;
        vals.push(m);
        for &t in &g[1..] {
            m = m.max(f(t)? + SUP_INFLATION);
            vals.push(m);
        }
        Ok(Tail { ts: g, vals })
    }

    fn at(&self, t: f64) -> f64 {
        if t <= self.ts[0] || self.ts.len() == 1 {
            return self.vals[0];
        }
        let last = self.ts.len() - 1;
        if t >= self.ts[last] {
            return self.vals[last];
        }
        let i = self.ts.partition_point(|&s| s <= t) - 1;
        let w = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i]);
        self.vals[i] + w * (self.vals[i + 1] - self.vals[i])
    }
}

/// Which linear relation the candidate family solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rate {
    /// `p = a_1`
    A1,
    /// `p = -α = a_1 - Σ_{k≥2}|a_k|`
    MinusAlpha,
}

/// `value = σ (γ + e^{-A}[c - ρ I])` with `A = ∫ p`, `I = ∫ e^{A} a_0`;
/// for frozen `γ`, `c` the inner function `w` satisfies `w' = -p (w - γ) - ρ a_0`.
#[derive(Debug, Clone)]
struct Linear {
    ode: PolyOde,
    prim: WeightedPrimitive,
    rate: Rate,
    sigma: f64,
    rho: f64,
    split_at: f64,
    gamma: Tail,
    c: Tail,
    abs_weight: bool,
}

impl Linear {
    fn inner(&self, t: f64) -> f64 {
        let (g, c) = self.params(t);
        g + (-self.prim.exponent(t)).exp() * (c - self.rho * self.prim.integral(t))
    }

    fn params(&self, t: f64) -> (f64, f64) {
        (self.gamma.at(t), self.c.at(t))
    }

    fn value(&self, t: f64) -> f64 {
        self.sigma * self.inner(t)
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        let a = self.ode.coeff_vec(t)?;
        let p = rate_value(self.rate, &a);
        let w = self.inner(t);
        let (g, _) = self.params(t);
        let a0 = if self.abs_weight { a[0].abs() } else { a[0] };
        Ok(self.sigma * (-p * (w - g) - self.rho * a0))
    }
}

fn rate_value(rate: Rate, a: &[f64]) -> f64 {
    match rate {
        Rate::A1 => a[1],
        Rate::MinusAlpha => a[1] - a[2..].iter().map(|v| v.abs()).sum::<f64>(),
    }
}

fn primitive(ode: &PolyOde, rate: Rate, lo: f64, hi: f64) -> Result<WeightedPrimitive> {
    primitive_with(ode, rate, false, lo, hi)
}

fn primitive_with(ode: &PolyOde, rate: Rate, abs_weight: bool, lo: f64, hi: f64) -> Result<WeightedPrimitive> {
    WeightedPrimitive::compute(
        |t| Ok(rate_value(rate, &ode.coeff_vec(t)?)),
        |t| {
            let a0 = ode.coeff(0, t)?;
            Ok(if abs_weight { a0.abs() } else { a0 })
        },
        lo,
        hi,
        PRIMITIVE_TOL,
    )
}

/// `A = ∫ a_1` and `I = ∫ e^{A} a_0` over the whole horizon.
pub(crate) fn a1_primitive(ode: &PolyOde) -> Result<WeightedPrimitive> {
    primitive(ode, Rate::A1, ode.t0(), ode.horizon())
}

/// `-B = -∫ α` and `J = ∫ e^{-B} a_0` over the whole horizon.
pub(crate) fn alpha_primitive(ode: &PolyOde) -> Result<WeightedPrimitive> {
    primitive(ode, Rate::MinusAlpha, ode.t0(), ode.horizon())
}

#[derive(Debug, Clone)]
enum Repr {
    Piecewise { head: f64, split_at: f64, tail: Tail },
    Linear(Box<Linear>),
    User(Expr),
}

/// An evaluable candidate with the construction parameters it was built from.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub direction: Direction,
    pub params: BTreeMap<String, f64>,
    lo: f64,
    hi: f64,
    repr: Repr,
}

impl Candidate {
    pub fn user(expr: Expr, direction: Direction, lo: f64, hi: f64) -> Candidate {
        Candidate {
            kind: CandidateKind::UserSupplied,
            direction,
            params: BTreeMap::new(),
            lo,
            hi,
            repr: Repr::User(expr),
        }
    }

    /// Constant candidate (user supplied).
    pub fn constant(v: f64, direction: Direction, lo: f64, hi: f64) -> Candidate {
        Candidate::user(Expr::Const(v), direction, lo, hi)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        match &self.repr {
            Repr::Piecewise { head, split_at, tail } => Ok(if t <= *split_at { *head } else { tail.at(t) }),
            Repr::Linear(l) => Ok(l.value(t)),
            Repr::User(e) => Ok(e.eval(t)?),
        }
    }

    /// Derivative from the defining relation, or central differences with
    /// step `h` for user-supplied expressions.
    pub fn derivative(&self, t: f64, h: f64) -> Result<f64> {
        match &self.repr {
            Repr::Piecewise { .. } => Ok(0.0),
            Repr::Linear(l) => l.derivative(t),
            Repr::User(e) => {
                let (a, b) = ((t - h).max(self.lo), (t + h).min(self.hi));
                if b <= a {
                    return Ok(0.0);
                }
                Ok((e.eval(b)? - e.eval(a)?) / (b - a))
            }
        }
    }

    /// Value just left and right of the gluing point (equal for continuous gluing).
    pub fn glue_limits(&self) -> Option<(f64, f64)> {
        match &self.repr {
            Repr::Piecewise { head, split_at, tail } => Some((*head, tail.at(*split_at))),
            Repr::Linear(l) => {
                let t = l.split_at;
                let head = l.value(t);
                let (g, c) = (l.gamma.at(t), l.c.at(t));
                let right = l.sigma * (g + (-l.prim.exponent(t)).exp() * (c - l.rho * l.prim.integral(t)));
                Some((head, right))
            }
            Repr::User(_) => None,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

/// Signed residual margin of a candidate with its witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub min: f64,
    pub witness_t: f64,
}

impl Margin {
    pub fn passes(&self) -> bool {
        self.min >= -INEQUALITY_TOL
    }
}

/// Minimum over `grid_n` points of `η' + Σ a_k η^k` (sub) or
/// `-(ζ' + Σ a_k ζ^k)` (super).
pub fn verify_differential_inequality(
    cand: &Candidate,
    ode: &PolyOde,
    interval: (f64, f64),
    grid_n: usize,
) -> Result<Margin> {
    let (lo, hi) = interval;
    let h = (hi - lo) / (10.0 * grid_n as f64);
    let mut best = Margin {
        min: f64::INFINITY,
        witness_t: lo,
    };
    let mut a = Vec::new();
    for t in sampling::grid(lo, hi, grid_n) {
        let v = cand.value(t)?;
        let dv = cand.derivative(t, h)?;
        ode.coeffs_at(t, &mut a)?;
        let r = dv + poly_value(&a, v);
        let m = match cand.direction {
            Direction::Sub => r,
            Direction::Super => -r,
        };
        if m < best.min || m.is_nan() {
            best = Margin { min: m, witness_t: t };
        }
    }
    Ok(best)
}

/// Grid resolution for builder hypothesis checks and tails.
pub const BUILD_GRID: usize = 4096;

fn check_interval(ode: &PolyOde, t_split: f64) -> std::result::Result<(), BuildError> {
    if !(t_split >= ode.t0() && t_split <= ode.horizon()) {
        return Err(BuildError::Numeric(Error::Invalid(format!(
            "T = {t_split} outside [{}, {}]",
            ode.t0(),
            ode.horizon()
        ))));
    }
    Ok(())
}

fn self_check(cand: Candidate, ode: &PolyOde) -> std::result::Result<Candidate, BuildError> {
    let m = verify_differential_inequality(&cand, ode, cand.domain(), BUILD_GRID)?;
    if !m.passes() {
        return Err(BuildError::violated(
            "differential inequality",
            m.witness_t,
            None,
            m.min,
        ));
    }
    Ok(cand)
}

/// `M*_{T,j}`: the constant `max{1, max_τ Σ_{k<j}|a_k| / Σ_{k≥j} a_k}` on
/// `[t0, T]`, continued by the running value beyond `T`.
pub fn build_m_star(ode: &PolyOde, j: usize, t_split: f64) -> std::result::Result<Candidate, BuildError> {
    build_m_star_shifted(ode, j, t_split, 0.0)
}

/// `M*_{T,j} + γ` (used by the closed-solution driver).
pub fn build_m_star_shifted(
    ode: &PolyOde,
    j: usize,
    t_split: f64,
    shift: f64,
) -> std::result::Result<Candidate, BuildError> {
    let n = ode.degree();
    if j < 2 || j > n {
        return Err(Error::Invalid(format!("j = {j} must lie in 2..={n}")).into());
    }
    check_interval(ode, t_split)?;
    let (t0, hi) = (ode.t0(), ode.horizon());
    for t in sampling::grid(t0, hi, BUILD_GRID) {
        let a = ode.coeff_vec(t)?;
        for (k, &ak) in a.iter().enumerate().skip(j) {
            if ak < -SIGN_SLACK {
                return Err(BuildError::violated(&format!("a_{k} ≥ 0"), t, None, ak));
            }
        }
        let denom: f64 = a[j..].iter().sum();
        if denom <= STRICT_EPS {
            return Err(BuildError::DegenerateDenominator { t });
        }
    }
    let ratio = |t: f64| -> Result<f64> {
        let a = ode.coeff_vec(t)?;
        let num: f64 = a[..j].iter().map(|v| v.abs()).sum();
        Ok(num / a[j..].iter().sum::<f64>())
    };
    let (_, rmax) = sampling::maximize(ratio, t0, t_split.max(t0), BUILD_GRID)?;
    let head = 1f64.max(rmax + SUP_INFLATION);
    let tail = Tail::running_max(|t| Ok(ratio(t)?.max(1.0)), t_split, hi, head, BUILD_GRID)?;
    let tail = Tail {
        vals: tail.vals.iter().map(|v| v + shift).collect(),
        ts: tail.ts,
    };
    let mut params = BTreeMap::new();
    params.insert("j".into(), j as f64);
    params.insert("T".into(), t_split);
    params.insert("M_T".into(), head);
    params.insert("gamma".into(), shift);
    let cand = Candidate {
        kind: CandidateKind::MStar,
        direction: Direction::Sub,
        params,
        lo: t0,
        hi,
        repr: Repr::Piecewise {
            head: head + shift,
            split_at: t_split,
            tail,
        },
    };
    self_check(cand, ode)
}

/// Check Lemma-type split conditions: `a_n ≥ 0`, `a_k = a_n c_k + d_k`,
/// `Σ d_k u^k ≥ 0` for `u ≥ N`. Returns `N_T` (sup over `[t0, T]`).
pub(crate) fn split_conditions(
    ode: &PolyOde,
    split: &Split,
    t_split: f64,
    labels: [&str; 3],
    hi: f64,
) -> std::result::Result<f64, BuildError> {
    let n = ode.degree();
    let t0 = ode.t0();
    for &k in split.terms.keys() {
        if k < 2 || k + 1 > n {
            return Err(Error::Invalid(format!("split index {k} outside 2..={}", n.saturating_sub(1))).into());
        }
    }
    let grid = sampling::grid(t0, hi, BUILD_GRID);
    for &t in &grid {
        let a = ode.coeff_vec(t)?;
        if a[n] < -SIGN_SLACK {
            return Err(BuildError::violated(labels[0], t, None, a[n]));
        }
        for (k, &ak) in a.iter().enumerate().take(n).skip(2) {
            let rebuilt = a[n] * split.c(k, t)? + split.d(k, t)?;
            let gap = (ak - rebuilt).abs();
            if gap > SPLIT_TOL * (1.0 + ak.abs()) {
                return Err(BuildError::violated(labels[1], t, None, -gap));
            }
        }
    }
    let n_t = split_bound(split, n, t0, t_split)?;
    if let Some((t, u, m)) = d_poly_check(split, n, &grid, n_t, false)? {
        return Err(BuildError::violated(labels[2], t, u, m));
    }
    Ok(n_t)
}

/// `N_{t1} = max{1, sup_{[t0,t1]} Σ|c_k|}` with the sampling inflation.
pub(crate) fn split_bound(split: &Split, n: usize, t0: f64, t1: f64) -> Result<f64> {
    let sum_c = |t: f64| -> Result<f64> {
        let mut s = 0.0;
        for k in 2..n {
            s += split.c(k, t)?.abs();
        }
        Ok(s)
    };
    let (_, sup) = sampling::maximize(sum_c, t0, t1.max(t0), BUILD_GRID)?;
    Ok(1f64.max(sup + SUP_INFLATION))
}

/// Worst `(t, u, margin)` of `Σ_{k=2}^{n-1} s_k d_k(t) u^k ≥ 0` over the u-ladder,
/// with `s_k = (-1)^{k+1}` when `alternate`; also fails when the leading
/// coefficient is negative (the polynomial then goes negative for large u).
pub(crate) fn d_poly_check(
    split: &Split,
    n: usize,
    grid: &[f64],
    n_t: f64,
    alternate: bool,
) -> Result<Option<(f64, Option<f64>, f64)>> {
    let ladder = sampling::u_ladder(n_t);
    let mut d = vec![0.0; n];
    for &t in grid {
        for (k, dk) in d.iter_mut().enumerate().skip(2) {
            let sign = if alternate && k % 2 == 0 { -1.0 } else { 1.0 };
            *dk = sign * split.d(k, t)?;
        }
        if let Some(lead) = d.iter().rev().find(|v| v.abs() > SIGN_SLACK) {
            if *lead < 0.0 {
                return Ok(Some((t, None, *lead)));
            }
        }
        for &u in &ladder {
            let v = poly_value(&d, u);
            let scale: f64 = d.iter().rev().fold(0.0, |acc, c| acc * u + c.abs());
            if v < -1e-9 * scale.max(1e-300) - SIGN_SLACK {
                return Ok(Some((t, Some(u), v)));
            }
        }
    }
    Ok(None)
}

/// The family `η_{γ,t₁}` of an equation with its split quantities.
#[derive(Debug, Clone)]
pub(crate) struct EtaFamily {
    pub ode: PolyOde,
    pub prim: WeightedPrimitive,
    pub t_split: f64,
    pub n_t: f64,
    pub c_t: f64,
    pub n_tail: Tail,
    pub c_tail: Tail,
}

impl EtaFamily {
    pub fn new(ode: &PolyOde, split: &Split, t_split: f64) -> Result<EtaFamily> {
        let (t0, hi) = (ode.t0(), ode.horizon());
        let prim = primitive(ode, Rate::A1, t0, hi)?;
        let n = ode.degree();
        let n_t = split_bound(split, n, t0, t_split)?;
        let (_, cmax) = sampling::maximize(|t| Ok(prim.integral(t)), t0, t_split.max(t0), BUILD_GRID)?;
        let c_t = cmax + SUP_INFLATION;
        let sum_c = |t: f64| -> Result<f64> {
            let mut s = 0.0;
            for k in 2..n {
                s += split.c(k, t)?.abs();
            }
            Ok(s.max(1.0))
        };
        let n_tail = Tail::running_max(sum_c, t_split, hi, n_t, BUILD_GRID)?;
        let c_tail = Tail::running_max(|t| Ok(prim.integral(t)), t_split, hi, c_t, BUILD_GRID)?;
        Ok(EtaFamily {
            ode: ode.clone(),
            prim,
            t_split,
            n_t,
            c_t,
            n_tail,
            c_tail,
        })
    }

    /// `η_{N_T + shift, T}` on `[t0, T]` glued to `η_{N_t + shift, t}` beyond.
    pub fn candidate(&self, shift: f64, kind: CandidateKind, sigma: f64) -> Candidate {
        let gamma = Tail {
            ts: self.n_tail.ts.clone(),
            vals: self.n_tail.vals.iter().map(|v| v + shift).collect(),
        };
        let lin = Linear {
            ode: self.ode.clone(),
            prim: self.prim.clone(),
            rate: Rate::A1,
            sigma,
            rho: 1.0,
            split_at: self.t_split,
            gamma,
            c: self.c_tail.clone(),
            abs_weight: false,
        };
        let mut params = BTreeMap::new();
        params.insert("T".into(), self.t_split);
        params.insert("N_T".into(), self.n_t);
        params.insert("c_T".into(), self.c_t);
        params.insert("gamma".into(), self.n_t + shift);
        Candidate {
            kind,
            direction: if sigma > 0.0 { Direction::Sub } else { Direction::Super },
            params,
            lo: self.ode.t0(),
            hi: self.ode.horizon(),
            repr: Repr::Linear(Box::new(lin)),
        }
    }
}

pub(crate) const LEMMA_SPLIT_LABELS: [&str; 3] = ["(1) a_n ≥ 0", "(2) a_k = a_n c_k + d_k", "(3) Σ d_k u^k ≥ 0"];

/// `η*_T` built from the split `a_k = a_n c_k + d_k`.
pub fn build_eta_star(ode: &PolyOde, t_split: f64, split: &Split) -> std::result::Result<Candidate, BuildError> {
    check_interval(ode, t_split)?;
    split_conditions(ode, split, t_split, LEMMA_SPLIT_LABELS, ode.horizon())?;
    let fam = EtaFamily::new(ode, split, t_split)?;
    self_check(fam.candidate(0.0, CandidateKind::EtaStar, 1.0), ode)
}

/// `ζ*_T = -η~*_T` where `η~*_T` is built for `a~_k = (-1)^{k+1} a_k`.
pub fn build_zeta_star(ode: &PolyOde, t_split: f64, split: &Split) -> std::result::Result<Candidate, BuildError> {
    check_interval(ode, t_split)?;
    let hi = ode.horizon();
    let n_t = split_conditions(ode, split, t_split, LEMMA_SPLIT_LABELS, hi)?;
    let grid = sampling::grid(ode.t0(), hi, BUILD_GRID);
    if let Some((t, u, m)) = d_poly_check(split, ode.degree(), &grid, n_t, true)? {
        return Err(BuildError::violated("(K) Σ (-1)^{k+1} d_k u^k ≥ 0", t, u, m));
    }
    if ode.degree().is_multiple_of(2) {
        return Err(BuildError::violated("(L) n odd", ode.t0(), None, -1.0));
    }
    let refl = ode.sign_reflected();
    let fam = EtaFamily::new(&refl, &split.sign_reflected(), t_split)?;
    // the candidate carries the reflected coefficients for its derivative
    let cand = self_check(fam.candidate(0.0, CandidateKind::ZetaStar, -1.0), ode)?;
    let eta = EtaFamily::new(ode, split, t_split)?;
    let eta0 = eta.candidate(0.0, CandidateKind::EtaStar, 1.0).value(ode.t0())?;
    let zeta0 = cand.value(ode.t0())?;
    if zeta0 > eta0 {
        return Err(BuildError::violated("ζ*(t0) ≤ η*(t0)", ode.t0(), None, eta0 - zeta0));
    }
    Ok(cand)
}

/// `η_c = e^{-∫a_1}[c - ∫ e^{∫a_1} a_0]` under `a_2 > 0` and
/// `Σ_{k≥3}|a_k| η_c^{k-2} ≤ a_2`.
pub fn build_eta_c(ode: &PolyOde, c: f64) -> std::result::Result<Candidate, BuildError> {
    let (t0, hi) = (ode.t0(), ode.horizon());
    if ode.degree() < 2 {
        return Err(BuildError::violated("(4) a_2 > 0", t0, None, -1.0));
    }
    let prim = primitive(ode, Rate::A1, t0, hi)?;
    let (tmax, imax) = sampling::maximize(|t| Ok(prim.integral(t)), t0, hi, BUILD_GRID)?;
    if c < imax - SIGN_SLACK {
        return Err(BuildError::violated("(5) c ≥ max ∫ e^{∫a_1} a_0", tmax, None, c - imax));
    }
    let lin = Linear {
        ode: ode.clone(),
        prim,
        rate: Rate::A1,
        sigma: 1.0,
        rho: 1.0,
        split_at: hi,
        gamma: Tail::constant(t0, 0.0),
        c: Tail::constant(t0, c),
        abs_weight: false,
    };
    for t in sampling::grid(t0, hi, BUILD_GRID) {
        let a = ode.coeff_vec(t)?;
        if a[2] <= STRICT_EPS {
            return Err(BuildError::violated("(4) a_2 > 0", t, None, a[2]));
        }
        let eta = lin.value(t).max(0.0);
        let mut s = 0.0;
        let mut p = 1.0;
        for ak in &a[3..] {
            p *= eta;
            s += ak.abs() * p;
        }
        if s > a[2] + SIGN_SLACK * (1.0 + a[2]) {
            return Err(BuildError::violated(
                "(5) Σ_{k≥3}|a_k| η_c^{k-2} ≤ a_2",
                t,
                None,
                a[2] - s,
            ));
        }
    }
    let mut params = BTreeMap::new();
    params.insert("c".into(), c);
    let cand = Candidate {
        kind: CandidateKind::EtaC,
        direction: Direction::Sub,
        params,
        lo: t0,
        hi,
        repr: Repr::Linear(Box::new(lin)),
    };
    self_check(cand, ode)
}

/// `θ_c = e^{∫α}[c - ∫ e^{-∫α} a_0]` (Plus, sub, needs `θ_c ≤ 1`) or
/// `θ⁻_c = -e^{∫α}[c + ∫ e^{-∫α} a_0]` (Minus, super, needs `|θ⁻_c| ≤ 1`),
/// with `α = Σ_{k≥2}|a_k| - a_1`.
pub fn build_theta(ode: &PolyOde, c: f64, sign: ThetaSign) -> std::result::Result<Candidate, BuildError> {
    let (t0, hi) = (ode.t0(), ode.horizon());
    let prim = primitive(ode, Rate::MinusAlpha, t0, hi)?;
    let rho = match sign {
        ThetaSign::Plus => 1.0,
        ThetaSign::Minus => -1.0,
    };
    let (tmax, bound) = sampling::maximize(|t| Ok(rho * prim.integral(t)), t0, hi, BUILD_GRID)?;
    if c < bound - SIGN_SLACK {
        let label = match sign {
            ThetaSign::Plus => "c ≥ max ∫ e^{-∫α} a_0",
            ThetaSign::Minus => "c⁻ ≥ -min ∫ e^{-∫α} a_0",
        };
        return Err(BuildError::violated(label, tmax, None, c - bound));
    }
    let lin = Linear {
        ode: ode.clone(),
        prim,
        rate: Rate::MinusAlpha,
        sigma: rho,
        rho,
        split_at: hi,
        gamma: Tail::constant(t0, 0.0),
        c: Tail::constant(t0, c),
        abs_weight: false,
    };
    for t in sampling::grid(t0, hi, BUILD_GRID) {
        let w = lin.inner(t);
        if w > 1.0 + SIGN_SLACK {
            let label = match sign {
                ThetaSign::Plus => "θ_c ≤ 1",
                ThetaSign::Minus => "|θ⁻_c| ≤ 1",
            };
            return Err(BuildError::violated(label, t, None, 1.0 - w));
        }
    }
    let mut params = BTreeMap::new();
    params.insert("c".into(), c);
    let (kind, direction) = match sign {
        ThetaSign::Plus => (CandidateKind::ThetaC, Direction::Sub),
        ThetaSign::Minus => (CandidateKind::ThetaCMinus, Direction::Super),
    };
    let cand = Candidate {
        kind,
        direction,
        params,
        lo: t0,
        hi,
        repr: Repr::Linear(Box::new(lin)),
    };
    self_check(cand, ode)
}

/// `I_γ = e^{-∫a_1}[γ + ∫ e^{∫a_1}|a_0|]`, the linear majorant of nonnegative
/// solutions when `a_k ≥ 0 (k ≥ 2)`. Not self-checked: it is a bound, and it
/// satisfies the sub inequality only under that sign hypothesis.
pub fn build_i_gamma(ode: &PolyOde, gamma: f64) -> Result<Candidate> {
    let (t0, hi) = (ode.t0(), ode.horizon());
    let lin = Linear {
        ode: ode.clone(),
        prim: primitive_with(ode, Rate::A1, true, t0, hi)?,
        rate: Rate::A1,
        sigma: 1.0,
        rho: -1.0,
        split_at: hi,
        gamma: Tail::constant(t0, 0.0),
        c: Tail::constant(t0, gamma),
        abs_weight: true,
    };
    let mut params = BTreeMap::new();
    params.insert("gamma".into(), gamma);
    Ok(Candidate {
        kind: CandidateKind::IGamma,
        direction: Direction::Sub,
        params,
        lo: t0,
        hi,
        repr: Repr::Linear(Box::new(lin)),
    })
}

/// Smallest admissible `c` for [`build_eta_c`]: `max_t ∫ e^{∫a_1} a_0` (inflated).
pub fn eta_c_min(ode: &PolyOde) -> Result<f64> {
    let prim = primitive(ode, Rate::A1, ode.t0(), ode.horizon())?;
    let (_, m) = sampling::maximize(|t| Ok(prim.integral(t)), ode.t0(), ode.horizon(), BUILD_GRID)?;
    Ok(m + SUP_INFLATION)
}

/// Smallest admissible `c` for [`build_theta`].
pub fn theta_min(ode: &PolyOde, sign: ThetaSign) -> Result<f64> {
    let prim = primitive(ode, Rate::MinusAlpha, ode.t0(), ode.horizon())?;
    let rho = if sign == ThetaSign::Plus { 1.0 } else { -1.0 };
    let (_, m) = sampling::maximize(|t| Ok(rho * prim.integral(t)), ode.t0(), ode.horizon(), BUILD_GRID)?;
    Ok(m + SUP_INFLATION)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode(c: &[&str], t0: f64, t1: f64) -> PolyOde {
        PolyOde::parse(c, t0, t1).unwrap()
    }

    fn ex51() -> PolyOde {
        ode(
            &[
                "-sin(10*t)",
                "1",
                "cos(t)^4",
                "-2*abs(sin(t)*cos(t)^3)",
                "sin(t)^2*cos(t)^2",
                "-sin(t)^2*abs(cos(pi*t))",
                "sin(t)^2",
            ],
            0.0,
            1.0,
        )
    }

    fn ex51_split() -> Split {
        Split::parse(&[
            (2, "0", "cos(t)^4"),
            (3, "0", "-2*abs(sin(t)*cos(t)^3)"),
            (4, "0", "sin(t)^2*cos(t)^2"),
            (5, "-abs(cos(pi*t))", "0"),
        ])
        .unwrap()
    }

    fn sub_margin(c: &Candidate, o: &PolyOde) -> Margin {
        verify_differential_inequality(c, o, c.domain(), 2048).unwrap()
    }

    #[test]
    fn m_star_examples() {
        let c = build_m_star(&ode(&["-1", "0", "1"], 0.0, 2.0), 2, 1.0).unwrap();
        assert!((c.param("M_T").unwrap() - 1.0).abs() < 1e-8);
        let c = build_m_star(&ode(&["-1", "0", "2"], 0.0, 2.0), 2, 1.0).unwrap();
        assert!((c.value(0.5).unwrap() - 1.0).abs() < 1e-8);
        let e = build_m_star(&ode(&["-1", "0", "-1"], 0.0, 2.0), 2, 1.0).unwrap_err();
        assert!(matches!(e, BuildError::HypothesisViolated { .. }), "{e:?}");
        let e = build_m_star(&ode(&["-1", "0", "0"], 0.0, 2.0), 2, 1.0).unwrap_err();
        assert!(matches!(e, BuildError::DegenerateDenominator { .. }), "{e:?}");
    }

    #[test]
    fn m_star_tail_grows_and_glues() {
        // ratio |a_0|/a_2 = 1 + t grows past T
        let o = ode(&["-(1+t)", "0", "1"], 0.0, 3.0);
        let c = build_m_star(&o, 2, 1.0).unwrap();
        assert!((c.value(1.0).unwrap() - 2.0).abs() < 1e-6);
        assert!((c.value(3.0).unwrap() - 4.0).abs() < 1e-6);
        let (l, r) = c.glue_limits().unwrap();
        assert!((l - r).abs() <= 1e-10);
        assert!(sub_margin(&c, &o).passes());
    }

    #[test]
    fn eta_star_examples() {
        let o = ex51();
        let c = build_eta_star(&o, 1.0, &ex51_split()).unwrap();
        assert!(sub_margin(&c, &o).passes());
        let n_t = c.param("N_T").unwrap();
        assert!((n_t - 1.0).abs() < 1e-6, "{n_t}");

        let trivial = ode(&["0", "0", "0", "1"], 0.0, 1.0);
        let c = build_eta_star(&trivial, 1.0, &Split::new()).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert!((c.value(t).unwrap() - 1.0).abs() < 1e-8);
        }

        let bad = ode(&["0", "0", "-1", "1"], 0.0, 1.0);
        let split = Split::parse(&[(2, "0", "-1")]).unwrap();
        let e = build_eta_star(&bad, 1.0, &split).unwrap_err();
        match e {
            BuildError::HypothesisViolated { condition, .. } => assert!(condition.starts_with("(3)")),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn eta_c_examples() {
        let o = ode(&["-1", "0", "1"], 0.0, 1.0);
        let c = build_eta_c(&o, 0.0).unwrap();
        for t in [0.0, 0.25, 0.9] {
            assert!((c.value(t).unwrap() - t).abs() < 1e-9);
        }
        let c = build_eta_c(&ode(&["0", "0", "1"], 0.0, 1.0), 1.0).unwrap();
        assert!((c.value(0.7).unwrap() - 1.0).abs() < 1e-12);
        let e = build_eta_c(&ode(&["0", "0", "1", "1"], 0.0, 1.0), 2.0).unwrap_err();
        assert!(matches!(e, BuildError::HypothesisViolated { .. }));
    }

    #[test]
    fn theta_examples() {
        let o = ode(&["0", "1"], 0.0, 1.0);
        let c = build_theta(&o, 0.5, ThetaSign::Plus).unwrap();
        for t in [0.0, 0.5, 1.0] {
            assert!((c.value(t).unwrap() - 0.5 * (-t).exp()).abs() < 1e-10);
        }
        let zero = ode(&["0", "0", "1"], 0.0, 1.0);
        for s in [ThetaSign::Plus, ThetaSign::Minus] {
            let c = build_theta(&zero, 0.0, s).unwrap();
            assert!(c.value(0.5).unwrap().abs() < 1e-15);
        }
        let flat = ode(&["0", "0"], 0.0, 1.0);
        assert!(build_theta(&flat, 2.0, ThetaSign::Plus).is_err());
        // minus variant is a super solution
        let o = ode(&["0.3*sin(t)", "1", "0.2", "0.1"], 0.0, 2.0);
        let cmin = theta_min(&o, ThetaSign::Minus).unwrap();
        let c = build_theta(&o, cmin, ThetaSign::Minus).unwrap();
        assert_eq!(c.direction, Direction::Super);
        assert!(sub_margin(&c, &o).passes());
        assert!(c.value(0.0).unwrap() <= 0.0);
    }

    #[test]
    fn zeta_star_examples() {
        let o = ode(&["0", "0", "0", "1"], 0.0, 1.0);
        let z = build_zeta_star(&o, 1.0, &Split::new()).unwrap();
        let e = build_eta_star(&o, 1.0, &Split::new()).unwrap();
        assert!((z.value(0.5).unwrap() + 1.0).abs() < 1e-8);
        assert!((e.value(0.5).unwrap() - 1.0).abs() < 1e-8);

        let even = ode(&["0", "0", "1"], 0.0, 1.0);
        match build_zeta_star(&even, 1.0, &Split::new()).unwrap_err() {
            BuildError::HypothesisViolated { condition, .. } => assert!(condition.starts_with("(L)")),
            e => panic!("{e:?}"),
        }

        match build_zeta_star(&ex51(), 1.0, &ex51_split()).unwrap_err() {
            BuildError::HypothesisViolated { condition, .. } => assert!(condition.starts_with("(K)"), "{condition}"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn i_gamma_closed_form() {
        // a_1 = 1, a_0 = -1: I_γ = e^{-t}γ + 1 - e^{-t}
        let o = ode(&["-1", "1", "1"], 0.0, 2.0);
        let c = build_i_gamma(&o, 0.5).unwrap();
        for t in [0.0f64, 0.7, 2.0] {
            let want = 0.5 * (-t).exp() + 1.0 - (-t).exp();
            assert!(
                (c.value(t).unwrap() - want).abs() < 1e-9,
                "{t}: {} vs {want}",
                c.value(t).unwrap()
            );
        }
        assert!(sub_margin(&c, &o).passes());
    }

    #[test]
    fn verifier_examples() {
        let o = ode(&["-1", "0", "1"], 0.0, 1.0);
        let one = Candidate::constant(1.0, Direction::Sub, 0.0, 1.0);
        assert_eq!(
            verify_differential_inequality(&one, &o, (0.0, 1.0), 64).unwrap().min,
            0.0
        );
        let m1 = Candidate::constant(-1.0, Direction::Super, 0.0, 1.0);
        assert_eq!(
            verify_differential_inequality(&m1, &o, (0.0, 1.0), 64).unwrap().min,
            0.0
        );
        let z = Candidate::constant(0.0, Direction::Sub, 0.0, 1.0);
        assert_eq!(
            verify_differential_inequality(&z, &o, (0.0, 1.0), 64).unwrap().min,
            -1.0
        );
    }

    #[test]
    fn user_derivative_by_differences() {
        let o = ode(&["0", "0"], 0.0, 1.0);
        // η = t: η' = 1 ≥ 0
        let c = Candidate::user(crate::expr::parse("t").unwrap(), Direction::Sub, 0.0, 1.0);
        let m = verify_differential_inequality(&c, &o, (0.0, 1.0), 128).unwrap();
        assert!((m.min - 1.0).abs() < 1e-9);
    }
}
