//! Subcommand bodies. Each one loads a spec, calls the library and maps the
//! outcome to an exit code.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use polyode::{
    check_theorem_with, find_closed, find_closed_reflected, integrate as integrate_ode, scan_closed, CheckSettings,
    ClosedSolution, CriterionReport, EquationSpec, Params, PolyOde, Status, TheoremId, Trajectory, Verdict,
};
use serde_json::{json, Value};

use crate::{CheckArgs, ClosedArgs, IntegrateArgs, Overrides, SettingsArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

/// Input problem: printed to stderr, exit 3.
#[derive(Debug)]
pub struct InputError(pub String);

fn input_err(e: impl std::fmt::Display) -> InputError {
    InputError(e.to_string())
}

pub fn load_spec(path: &Path) -> Result<EquationSpec, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    EquationSpec::from_json(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Satisfied => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn settings_from(a: &SettingsArgs) -> CheckSettings {
    let mut s = CheckSettings::default();
    if let Some(v) = a.tol {
        s.tol = v;
    }
    if let Some(v) = a.grid {
        s.grid = v;
    }
    if let Some(v) = a.strict_eps {
        s.strict_eps = v;
    }
    s
}

fn apply(p: &mut Params, o: &Overrides) {
    let set = |dst: &mut Option<f64>, v: Option<f64>| {
        if v.is_some() {
            *dst = v;
        }
    };
    set(&mut p.gamma, o.gamma);
    set(&mut p.nu, o.nu);
    set(&mut p.c, o.c);
    set(&mut p.c_plus, o.c_plus);
    set(&mut p.c_minus, o.c_minus);
    set(&mut p.t_split, o.t_split);
    if o.j.is_some() {
        p.j = o.j;
    }
}

/// Writes to stdout; a reader that has gone away (`| head`) is not an error.
pub fn say(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: stdout: {e}");
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), InputError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => {
            say(&format!("{text}\n"));
            Ok(())
        }
    }
}

fn finish(r: Result<u8, InputError>) -> u8 {
    match r {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

/// Spec, theorem and overrides to a report.
pub fn run_check(
    spec: &EquationSpec,
    theorem: &str,
    settings: &CheckSettings,
    overrides: &Overrides,
) -> Result<CriterionReport, InputError> {
    let id: TheoremId = theorem.parse().map_err(input_err)?;
    let ode = spec.ode().map_err(input_err)?;
    let mut params = spec.params().map_err(input_err)?;
    apply(&mut params, overrides);
    Ok(check_theorem_with(&ode, id, &params, settings))
}

pub fn check(a: &CheckArgs) -> u8 {
    finish((|| {
        let spec = load_spec(&a.input)?;
        let report = run_check(&spec, &a.theorem, &settings_from(&a.settings), &a.overrides)?;
        emit(a.out.as_deref(), &report.to_json())?;
        Ok(verdict_code(report.verdict))
    })())
}

pub fn status_json(s: &Status) -> Value {
    serde_json::to_value(s).expect("status serializes")
}

fn csv(tr: &Trajectory, samples: Option<usize>) -> String {
    let mut s = String::from("t,y\n");
    match samples {
        Some(n) if n >= 2 => {
            let (a, _) = tr.start();
            let (b, _) = tr.end();
            for i in 0..n {
                let t = if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                };
                if let Some(y) = tr.at(t) {
                    let _ = writeln!(s, "{t:.17e},{y:.17e}");
                }
            }
        }
        _ => {
            for (t, y) in tr.samples() {
                let _ = writeln!(s, "{t:.17e},{y:.17e}");
            }
        }
    }
    s
}

pub fn integrate_summary(tr: &Trajectory) -> Value {
    let (t_end, y_end) = tr.end();
    let mut v = json!({
        "schema_version": polyode::report::SCHEMA_VERSION,
        "status": status_json(&tr.status),
        "t_end": t_end,
        "y_end": y_end,
        "steps": tr.times().len() - 1,
    });
    if let Status::BlowUp { t_escape } = tr.status {
        v["t_escape"] = json!(t_escape);
    }
    v
}

pub fn integrate(a: &IntegrateArgs) -> u8 {
    finish((|| {
        let spec = load_spec(&a.input)?;
        let ode = spec.ode().map_err(input_err)?;
        if a.tol.is_nan() || a.tol <= 0.0 {
            return Err(InputError(format!("--tol must be positive, got {}", a.tol)));
        }
        let tr = integrate_ode(&ode, ode.t0(), a.y0, ode.horizon(), a.tol).map_err(input_err)?;
        let summary = serde_json::to_string_pretty(&integrate_summary(&tr)).expect("json");
        let table = csv(&tr, a.samples);
        match &a.out {
            Some(p) => {
                fs::write(p, table).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
                say(&format!("{summary}\n"));
            }
            None => {
                say(&table);
                eprintln!("{summary}");
            }
        }
        Ok(match tr.status {
            Status::ReachedEnd => EXIT_OK,
            _ => EXIT_INCONCLUSIVE,
        })
    })())
}

fn solution_json(s: &ClosedSolution, embed: bool) -> Value {
    let mut v = serde_json::to_value(s).expect("solution serializes");
    if embed {
        v["trajectory"] = json!(s.trajectory.samples().map(|(t, y)| [t, y]).collect::<Vec<_>>());
    }
    v
}

fn sidecar(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

/// Closed-solution report for a bracket or a scan.
pub struct ClosedRun {
    pub report: Value,
    pub solutions: Vec<ClosedSolution>,
    pub code: u8,
}

pub enum Search {
    Bracket(f64, f64),
    Scan(f64, f64, usize),
}

pub fn run_closed(ode: &PolyOde, search: Search, tol: f64, reflected: bool, embed: bool) -> ClosedRun {
    let mut notes: Vec<String> = Vec::new();
    let mut report = json!({
        "schema_version": polyode::report::SCHEMA_VERSION,
        "interval": [ode.t0(), ode.horizon()],
        "tol": tol,
        "reflected": reflected,
    });
    let solutions = match search {
        Search::Bracket(lo, hi) => {
            report["mode"] = json!("bracket");
            report["bracket"] = json!([lo, hi]);
            // brackets are given for y(t0); the reflected search works on z = -y
            let r = if reflected {
                find_closed_reflected(ode, (-hi, -lo), tol)
            } else {
                find_closed(ode, (lo, hi), tol)
            };
            match r {
                Ok(s) => vec![s],
                Err(e) => {
                    notes.push(e.to_string());
                    Vec::new()
                }
            }
        }
        Search::Scan(lo, hi, n) => {
            report["mode"] = json!("scan");
            report["range"] = json!([lo, hi]);
            let target = if reflected { ode.reflected() } else { ode.clone() };
            // a reflected solution z(s) with z(-T) = γ maps back to y(t0) = -γ
            let (lo, hi) = if reflected { (-hi, -lo) } else { (lo, hi) };
            match scan_closed(&target, (lo, hi), n, tol) {
                Ok(scan) => {
                    report["probes"] = json!(scan.probes);
                    report["escaped"] = json!(scan.escaped);
                    report["continuum"] = json!(scan.continuum);
                    if scan.continuum {
                        notes.push("end map vanishes on every probe: continuum suspected".into());
                    }
                    let mut sols = scan.solutions;
                    if reflected {
                        for s in &mut sols {
                            s.trajectory = s.trajectory.mirrored();
                            s.gamma_star = s.trajectory.start().1;
                            s.bracket_used = (-s.bracket_used.1, -s.bracket_used.0);
                            s.note = Some("found on the reflected equation".into());
                        }
                        sols.sort_by(|a, b| a.gamma_star.total_cmp(&b.gamma_star));
                    }
                    sols
                }
                Err(e) => {
                    notes.push(e.to_string());
                    Vec::new()
                }
            }
        }
    };
    report["solutions"] = json!(solutions.iter().map(|s| solution_json(s, embed)).collect::<Vec<_>>());
    report["notes"] = json!(notes);
    let code = if solutions.is_empty() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    ClosedRun {
        report,
        solutions,
        code,
    }
}

pub fn closed(a: &ClosedArgs) -> u8 {
    finish((|| {
        let spec = load_spec(&a.input)?;
        let ode = spec.ode().map_err(input_err)?;
        if a.tol.is_nan() || a.tol <= 0.0 {
            return Err(InputError(format!("--tol must be positive, got {}", a.tol)));
        }
        let pair = |v: &Vec<f64>| -> Result<(f64, f64), InputError> {
            match v.as_slice() {
                [lo, hi] if lo < hi => Ok((*lo, *hi)),
                _ => Err(InputError(format!("expected LO < HI, got {v:?}"))),
            }
        };
        let search = if let Some(b) = &a.bracket {
            let (lo, hi) = pair(b)?;
            Search::Bracket(lo, hi)
        } else if let Some(s) = &a.scan {
            let (lo, hi) = pair(s)?;
            Search::Scan(lo, hi, a.probes)
        } else if let Some(id) = &a.bracket_from {
            let report = run_check(&spec, id, &CheckSettings::default(), &Overrides::default())?;
            match report.conclusion.closed_bracket {
                Some((lo, hi)) if report.verdict == Verdict::Satisfied => Search::Bracket(lo, hi),
                Some(_) => {
                    eprintln!("{}: hypotheses not satisfied ({:?})", report.theorem, report.verdict);
                    return Ok(verdict_code(report.verdict));
                }
                None => {
                    return Err(InputError(format!(
                        "{} gives no explicit closed-solution bracket",
                        report.theorem
                    )));
                }
            }
        } else {
            return Err(InputError(
                "one of --bracket, --scan or --bracket-from is required".into(),
            ));
        };
        let run = run_closed(&ode, search, a.tol, a.reflected, a.embed_trajectory);
        let text = serde_json::to_string_pretty(&run.report).expect("json");
        emit(a.out.as_deref(), &text)?;
        if let (Some(out), false) = (&a.out, a.embed_trajectory) {
            if let Some(s) = run.solutions.first() {
                let mut table = String::from("t,y\n");
                for (t, y) in s.trajectory.samples() {
                    let _ = writeln!(table, "{t:.17e},{y:.17e}");
                }
                let path = sidecar(out);
                fs::write(&path, table).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            }
        }
        Ok(run.code)
    })())
}
