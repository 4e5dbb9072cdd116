//! Closed solutions `y(t0) = y(T)` by bracketed root finding on the end map
//! `γ ↦ y(T; t0, γ)`, plus the isolation exponent along a closed trajectory.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::integrate::{integrate, Status, Trajectory, WeightedPrimitive};
use crate::ode::PolyOde;
use crate::sampling;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;

/// Integration tolerance used for a requested fixed-point residual `tol`.
pub fn integration_tol(tol: f64) -> f64 {
    (tol * 1e-2).clamp(1e-13, 1e-8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EndValue {
    Reached(f64),
    BlowUp { t_escape: f64 },
    Failed { t: f64 },
}

impl EndValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            EndValue::Reached(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Isolation {
    Yes { exponent: f64 },
    Unknown { exponent: Option<f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedSolution {
    pub gamma_star: f64,
    pub residual: f64,
    #[serde(skip)]
    pub trajectory: Trajectory,
    pub isolated: Isolation,
    pub bracket_used: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedError {
    #[error("bracket [{lo}, {hi}] invalid: g(lo) = {g_lo:?}, g(hi) = {g_hi:?}")]
    BracketInvalid {
        lo: f64,
        hi: f64,
        g_lo: Option<f64>,
        g_hi: Option<f64>,
    },
    #[error("integration escapes for γ = {gamma}")]
    BlowUpInsideBracket { gamma: f64 },
    #[error("no fixed point to tolerance after {iterations} iterations (best |g| = {best:e})")]
    NoConvergence { iterations: usize, best: f64 },
    #[error(transparent)]
    Numeric(#[from] Error),
}

/// `y(T)` for `y(t0) = γ`, or the reason the horizon was not reached.
pub fn end_map(ode: &PolyOde, gamma: f64, tol: f64) -> Result<EndValue, Error> {
    let tr = integrate(ode, ode.t0(), gamma, ode.horizon(), tol)?;
    Ok(end_of(&tr))
}

fn end_of(tr: &Trajectory) -> EndValue {
    match tr.status {
        Status::ReachedEnd => EndValue::Reached(tr.end().1),
        Status::BlowUp { t_escape } => EndValue::BlowUp { t_escape },
        Status::DomainError { t } | Status::StepFailure { t } => EndValue::Failed { t },
    }
}

struct Probe {
    gamma: f64,
    g: f64,
    traj: Trajectory,
}

fn probe(ode: &PolyOde, gamma: f64, itol: f64) -> Result<Option<Probe>, Error> {
    let traj = integrate(ode, ode.t0(), gamma, ode.horizon(), itol)?;
    Ok(match end_of(&traj) {
        EndValue::Reached(v) => Some(Probe {
            gamma,
            g: v - gamma,
            traj,
        }),
        _ => None,
    })
}

/// Fixed point of the end map in `[lo, hi]` under the bracket condition
/// `g(lo) ≥ -tol`, `g(hi) ≤ tol` with `g(γ) = y(T; γ) - γ`, or the reversed
/// orientation `g(lo) ≤ tol`, `g(hi) ≥ -tol` (unstable closed solutions).
pub fn find_closed(ode: &PolyOde, bracket: (f64, f64), tol: f64) -> Result<ClosedSolution, ClosedError> {
    let (lo, hi) = bracket;
    let itol = integration_tol(tol);
    let invalid = |g_lo, g_hi| ClosedError::BracketInvalid { lo, hi, g_lo, g_hi };
    if !(lo <= hi) {
        return Err(invalid(None, None));
    }
    let a = probe(ode, lo, itol)?;
    let b = probe(ode, hi, itol)?;
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => return Err(invalid(a.map(|p| p.g), b.map(|p| p.g))),
    };
    let forward = a.g >= -tol && b.g <= tol;
    let backward = a.g <= tol && b.g >= -tol;
    if !(forward || backward) {
        return Err(invalid(Some(a.g), Some(b.g)));
    }
    let continuum = a.g.abs() <= tol && b.g.abs() <= tol && lo < hi;
    let found = solve_bracket(ode, a, b, tol, itol)?;
    let mut sol = finish(ode, found, bracket)?;
    if continuum {
        sol.note = Some("continuum suspected: g vanishes at both bracket ends".into());
    }
    Ok(sol)
}

/// Bisection-safeguarded secant on a sign change of `g` in either orientation.
fn solve_bracket(ode: &PolyOde, a: Probe, b: Probe, tol: f64, itol: f64) -> Result<Probe, ClosedError> {
    if a.g.abs() <= tol {
        return Ok(a);
    }
    if b.g.abs() <= tol {
        return Ok(b);
    }
    let (mut a, mut b) = (a, b);
    let mut best = a.g.abs().min(b.g.abs());
    let mut use_bisect = false;
    for _ in 0..MAX_ITERATIONS {
        let width = b.gamma - a.gamma;
        let mid = 0.5 * (a.gamma + b.gamma);
        let secant = a.gamma - a.g * width / (b.g - a.g);
        let inner = a.gamma + 0.05 * width..=b.gamma - 0.05 * width;
        let x = if !use_bisect && secant.is_finite() && inner.contains(&secant) {
            secant
        } else {
            mid
        };
        if x <= a.gamma || x >= b.gamma {
            break;
        }
        let p = probe(ode, x, itol)?.ok_or(ClosedError::BlowUpInsideBracket { gamma: x })?;
        if p.g.abs() <= tol {
            return Ok(p);
        }
        best = best.min(p.g.abs());
        let before = width;
        if (p.g > 0.0) == (a.g > 0.0) {
            a = p;
        } else {
            b = p;
        }
        // alternate to bisection when the secant step shrinks the bracket too little
        use_bisect = !use_bisect && (b.gamma - a.gamma) > 0.5 * before;
    }
    Err(ClosedError::NoConvergence {
        iterations: MAX_ITERATIONS,
        best,
    })
}

fn finish(ode: &PolyOde, p: Probe, bracket: (f64, f64)) -> Result<ClosedSolution, ClosedError> {
    let isolated = isolation(ode, &p.traj)?;
    Ok(ClosedSolution {
        gamma_star: p.gamma,
        residual: p.g.abs(),
        trajectory: p.traj,
        isolated,
        bracket_used: bracket,
        note: None,
    })
}

/// `E = ∫_{t0}^{T} [Σ_{k≥2} a_k S_k(y*, y*) + a_1] dτ = ∫ Σ_{k≥1} k a_k y*^{k-1} dτ`.
pub fn isolation_exponent(ode: &PolyOde, closed: &Trajectory) -> Result<f64, Error> {
    let (lo, hi) = (closed.start().0, closed.end().0);
    if lo >= hi {
        return Ok(0.0);
    }
    let mut a = Vec::new();
    let prim = WeightedPrimitive::compute(
        |t| {
            ode.coeffs_at(t, &mut a)?;
            let y = closed.at(t).unwrap_or(closed.end().1);
            let mut acc = 0.0;
            for k in (1..a.len()).rev() {
                acc = acc * y + k as f64 * a[k];
            }
            Ok(acc)
        },
        |_| Ok(0.0),
        lo,
        hi,
        1e-12,
    )?;
    Ok(prim.exponent(hi))
}

/// Isolation is certified only under `a_k ≥ 0 (k ≥ 2)`, `y* ≥ 0` and `∫a_1 > 0`;
/// otherwise the exponent is reported without a verdict.
fn isolation(ode: &PolyOde, traj: &Trajectory) -> Result<Isolation, Error> {
    let e = isolation_exponent(ode, traj)?;
    let mut hyp = traj.values().iter().all(|&y| y >= 0.0);
    let grid = sampling::grid(ode.t0(), ode.horizon(), 2048);
    let mut a = Vec::new();
    let mut a1 = Vec::with_capacity(grid.len());
    for &t in &grid {
        ode.coeffs_at(t, &mut a)?;
        hyp &= a[2.min(a.len())..].iter().all(|&v| v >= 0.0);
        a1.push(a[1]);
    }
    let h = grid[1] - grid[0];
    let int_a1: f64 = a1.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    Ok(if hyp && int_a1 > 0.0 && e > 0.0 {
        Isolation::Yes { exponent: e }
    } else {
        Isolation::Unknown { exponent: Some(e) }
    })
}

/// Nonpositive closed solution through the reflected equation
/// `z' + Σ (-1)^k a_k(-t) z^k = 0` on `[-T, -t0]`, mapped back by `y(t) = -z(-t)`.
/// `bracket` is for `z(-T)` (a nonnegative range for nonpositive `y`).
pub fn find_closed_reflected(ode: &PolyOde, bracket: (f64, f64), tol: f64) -> Result<ClosedSolution, ClosedError> {
    let refl = ode.reflected();
    let z = find_closed(&refl, bracket, tol)?;
    let tr = &z.trajectory;
    let traj = tr.mirrored();
    let gamma_star = traj.start().1;
    let residual = (traj.end().1 - gamma_star).abs();
    let isolated = match z.isolated {
        Isolation::Yes { exponent } => Isolation::Yes { exponent },
        other => other,
    };
    Ok(ClosedSolution {
        gamma_star,
        residual,
        trajectory: traj,
        isolated,
        bracket_used: (-bracket.1, -bracket.0),
        note: Some("found on the reflected equation".into()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Scan {
    pub solutions: Vec<ClosedSolution>,
    pub probes: usize,
    pub escaped: usize,
    pub continuum: bool,
}

/// Bisection steps spent looking for a root next to an escape boundary.
const EDGE_BISECTIONS: usize = 60;

/// Probe `g` on `n_probe` points of `range`, solve on every sign change or
/// near-zero probe, and deduplicate roots closer than `10·tol`.
pub fn scan_closed(ode: &PolyOde, range: (f64, f64), n_probe: usize, tol: f64) -> Result<Scan, Error> {
    let itol = integration_tol(tol);
    let gammas = sampling::grid(range.0, range.1, n_probe.max(2));
    let mut probes = Vec::with_capacity(gammas.len());
    for &g in &gammas {
        probes.push(probe(ode, g, itol)?);
    }
    let escaped = probes.iter().filter(|p| p.is_none()).count();
    let reached: Vec<&Probe> = probes.iter().flatten().collect();
    let continuum = !reached.is_empty() && escaped == 0 && reached.iter().all(|p| p.g.abs() <= tol);
    let mut out: Vec<ClosedSolution> = Vec::new();
    if continuum {
        let p = probe(ode, gammas[0], itol)?.expect("probe reached before");
        let mut s = finish(ode, p, range).map_err(closed_to_error)?;
        s.note = Some("continuum suspected: g vanishes at every probe".into());
        out.push(s);
    } else {
        for i in 0..probes.len() {
            let Some(p) = &probes[i] else { continue };
            if p.g.abs() <= tol {
                out.push(finish(ode, reprobe(ode, p, itol)?, (p.gamma, p.gamma)).map_err(closed_to_error)?);
                continue;
            }
            let Some(next) = probes.get(i + 1) else { continue };
            let Some(q) = next else { continue };
            if q.g.abs() > tol && (p.g > 0.0) != (q.g > 0.0) {
                let a = reprobe(ode, p, itol)?;
                let b = reprobe(ode, q, itol)?;
                match solve_bracket(ode, a, b, tol, itol) {
                    Ok(r) => out.push(finish(ode, r, (p.gamma, q.gamma)).map_err(closed_to_error)?),
                    Err(ClosedError::Numeric(e)) => return Err(e),
                    Err(_) => {}
                }
            }
        }
        // g runs off to ±∞ near an escape boundary, so a root can sit
        // between the last escaping probe and the first one reaching T
        for i in 0..probes.len().saturating_sub(1) {
            let (esc, p) = match (&probes[i], &probes[i + 1]) {
                (None, Some(p)) => (gammas[i], p),
                (Some(p), None) => (gammas[i + 1], p),
                _ => continue,
            };
            if p.g.abs() <= tol {
                continue;
            }
            if let Some((a, b)) = edge_bracket(ode, esc, p, tol, itol)? {
                let used = (a.gamma.min(b.gamma), a.gamma.max(b.gamma));
                match solve_bracket(ode, a, b, tol, itol) {
                    Ok(r) => out.push(finish(ode, r, used).map_err(closed_to_error)?),
                    Err(ClosedError::Numeric(e)) => return Err(e),
                    Err(_) => {}
                }
            }
        }
    }
    out.sort_by(|a, b| a.gamma_star.total_cmp(&b.gamma_star));
    out.dedup_by(|b, a| (a.gamma_star - b.gamma_star).abs() < 10.0 * tol);
    Ok(Scan {
        solutions: out,
        probes: probes.len(),
        escaped,
        continuum,
    })
}

/// Bisect between an escaping initial value and a reached probe until a
/// reached value with the opposite sign of `g` turns up.
fn edge_bracket(
    ode: &PolyOde,
    escaped: f64,
    reached: &Probe,
    tol: f64,
    itol: f64,
) -> Result<Option<(Probe, Probe)>, Error> {
    let mut esc = escaped;
    let mut near = reprobe(ode, reached, itol)?;
    for _ in 0..EDGE_BISECTIONS {
        let mid = 0.5 * (esc + near.gamma);
        if mid == esc || mid == near.gamma {
            break;
        }
        match probe(ode, mid, itol)? {
            None => esc = mid,
            Some(m) if m.g.abs() > tol && (m.g > 0.0) != (near.g > 0.0) => {
                return Ok(Some(if m.gamma < near.gamma { (m, near) } else { (near, m) }));
            }
            Some(m) => near = m,
        }
    }
    Ok(None)
}

fn reprobe(ode: &PolyOde, p: &Probe, itol: f64) -> Result<Probe, Error> {
    Ok(probe(ode, p.gamma, itol)?.expect("probe reached before"))
}

fn closed_to_error(e: ClosedError) -> Error {
    match e {
        ClosedError::Numeric(e) => e,
        other => Error::Invalid(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode(c: &[&str], t0: f64, t1: f64) -> PolyOde {
        PolyOde::parse(c, t0, t1).unwrap()
    }

    #[test]
    fn end_map_examples() {
        let decay = ode(&["0", "1"], 0.0, 2.0);
        let v = end_map(&decay, 3.0, 1e-12).unwrap().value().unwrap();
        assert!((v - 3.0 * (-2f64).exp()).abs() < 1e-10);
        let relax = ode(&["-1", "1"], 0.0, 2.0);
        let v = end_map(&relax, 0.0, 1e-12).unwrap().value().unwrap();
        assert!((v - (1.0 - (-2f64).exp())).abs() < 1e-10);
        let sq = ode(&["0", "0", "-1"], 0.0, 2.0);
        assert!(matches!(end_map(&sq, 1.0, 1e-10).unwrap(), EndValue::BlowUp { .. }));
    }

    #[test]
    fn relaxation_fixed_point() {
        let relax = ode(&["-1", "1"], 0.0, 1.0);
        let s = find_closed(&relax, (-5.0, 5.0), 1e-12).unwrap();
        assert!((s.gamma_star - 1.0).abs() < 1e-10);
        assert!(s.residual <= 1e-12);
        match s.isolated {
            Isolation::Yes { exponent } => assert!((exponent - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_equation_is_a_continuum() {
        let zero = ode(&["0", "0"], 0.0, 1.0);
        let s = find_closed(&zero, (0.0, 1.0), 1e-10).unwrap();
        assert_eq!(s.gamma_star, 0.0);
        assert!(s.note.is_some());
        assert_eq!(s.isolated, Isolation::Unknown { exponent: Some(0.0) });
        let scan = scan_closed(&zero, (-1.0, 1.0), 8, 1e-10).unwrap();
        assert!(scan.continuum);
    }

    #[test]
    fn invalid_bracket() {
        let relax = ode(&["-1", "1"], 0.0, 1.0);
        assert!(matches!(
            find_closed(&relax, (2.0, 3.0), 1e-10),
            Err(ClosedError::BracketInvalid { .. })
        ));
    }

    #[test]
    fn scan_finds_unique_root() {
        let relax = ode(&["-1", "1"], 0.0, 1.0);
        let scan = scan_closed(&relax, (-5.0, 5.0), 64, 1e-10).unwrap();
        assert_eq!(scan.solutions.len(), 1);
        assert!((scan.solutions[0].gamma_star - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_closed_solution_has_zero_exponent() {
        let o = ode(&["0", "0", "1"], 0.0, 1.0);
        let tr = integrate(&o, 0.0, 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(isolation_exponent(&o, &tr).unwrap(), 0.0);
    }

    #[test]
    fn reflected_search_maps_back() {
        // y' = -1 - y has the closed solution y ≡ -1
        let o = ode(&["1", "1"], 0.0, 1.0);
        let s = find_closed_reflected(&o, (0.0, 5.0), 1e-12).unwrap();
        assert!((s.gamma_star + 1.0).abs() < 1e-10);
        assert!((s.trajectory.at(0.5).unwrap() + 1.0).abs() < 1e-9);
    }
}
