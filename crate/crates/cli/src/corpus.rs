//! The bundled example corpus: `fixtures/manifest.json` lists cases and the
//! outcome each one is expected to produce.

use std::fs;
use std::path::{Path, PathBuf};

use polyode::{integrate as integrate_ode, CheckSettings, Status, Verdict};
use serde::Deserialize;

use crate::commands::{load_spec, run_check, run_closed, say, InputError, Search, EXIT_INPUT, EXIT_OK, EXIT_VIOLATED};
use crate::{Overrides, VerifyArgs};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub cases: Vec<Case>,
}

#[derive(Debug, Deserialize)]
pub struct Case {
    pub name: String,
    pub fixture: String,
    #[serde(default)]
    pub note: Option<String>,
    #[serde(flatten)]
    pub kind: CaseKind,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseKind {
    Check {
        theorem: String,
        expect: Verdict,
    },
    Integrate {
        y0: f64,
        expect_status: String,
        #[serde(default)]
        expect_t_escape: Option<f64>,
        #[serde(default)]
        expect_y_end: Option<f64>,
        #[serde(default = "default_tol")]
        within: f64,
    },
    Closed {
        #[serde(default)]
        bracket: Option<(f64, f64)>,
        #[serde(default)]
        scan: Option<(f64, f64)>,
        #[serde(default = "default_probes")]
        probes: usize,
        #[serde(default)]
        reflected: bool,
        /// Closed-solution bracket taken from this theorem's report.
        #[serde(default)]
        bracket_from: Option<String>,
        #[serde(default)]
        expect_gamma: Vec<f64>,
        #[serde(default)]
        expect_min_count: usize,
        #[serde(default = "default_tol")]
        within: f64,
    },
}

fn default_tol() -> f64 {
    1e-8
}

fn default_probes() -> usize {
    64
}

fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load(dir: &Path) -> Result<Manifest, InputError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn kind_name(k: &CaseKind) -> String {
    match k {
        CaseKind::Check { theorem, .. } => format!("check {theorem}"),
        CaseKind::Integrate { y0, .. } => format!("integrate y0={y0}"),
        CaseKind::Closed { reflected, .. } => {
            if *reflected {
                "closed (reflected)".into()
            } else {
                "closed".into()
            }
        }
    }
}

/// Ok(observed) when the case matches its expectation, Err(observed) otherwise.
fn run_case(dir: &Path, case: &Case) -> Result<Result<String, String>, InputError> {
    let spec = load_spec(&dir.join(&case.fixture))?;
    let ode = spec.ode().map_err(|e| InputError(e.to_string()))?;
    Ok(match &case.kind {
        CaseKind::Check { theorem, expect } => {
            let r = run_check(&spec, theorem, &CheckSettings::default(), &Overrides::default())?;
            let failed: Vec<&str> = r
                .conditions
                .iter()
                .filter(|c| !c.passed())
                .map(|c| c.label.as_str())
                .collect();
            let seen = if failed.is_empty() {
                format!("{:?}", r.verdict)
            } else {
                format!("{:?} (failing: {})", r.verdict, failed.join(", "))
            };
            if r.verdict == *expect {
                Ok(seen)
            } else {
                Err(format!("expected {expect:?}, got {seen}"))
            }
        }
        CaseKind::Integrate {
            y0,
            expect_status,
            expect_t_escape,
            expect_y_end,
            within,
        } => {
            let tr = integrate_ode(&ode, ode.t0(), *y0, ode.horizon(), 1e-10).map_err(|e| InputError(e.to_string()))?;
            let (status, t_escape) = match tr.status {
                Status::ReachedEnd => ("ReachedEnd", None),
                Status::BlowUp { t_escape } => ("BlowUp", Some(t_escape)),
                Status::DomainError { .. } => ("DomainError", None),
                Status::StepFailure { .. } => ("StepFailure", None),
            };
            let y_end = tr.end().1;
            let seen = format!("{status}, y_end = {y_end:.10e}, t_escape = {t_escape:?}");
            let close = |want: &Option<f64>, got: Option<f64>| match (want, got) {
                (None, _) => true,
                (Some(w), Some(g)) => (w - g).abs() <= *within,
                (Some(_), None) => false,
            };
            if status == expect_status && close(expect_t_escape, t_escape) && close(expect_y_end, Some(y_end)) {
                Ok(seen)
            } else {
                Err(format!("expected {expect_status}, got {seen}"))
            }
        }
        CaseKind::Closed {
            bracket,
            scan,
            probes,
            reflected,
            bracket_from,
            expect_gamma,
            expect_min_count,
            within,
        } => {
            let search = match (bracket, scan, bracket_from) {
                (Some((lo, hi)), _, _) => Search::Bracket(*lo, *hi),
                (None, Some((lo, hi)), _) => Search::Scan(*lo, *hi, *probes),
                (None, None, Some(id)) => {
                    let r = run_check(&spec, id, &CheckSettings::default(), &Overrides::default())?;
                    match r.conclusion.closed_bracket {
                        Some((lo, hi)) => Search::Bracket(lo, hi),
                        None => return Ok(Err(format!("{id} gives no closed-solution bracket"))),
                    }
                }
                _ => {
                    return Err(InputError(format!(
                        "{}: closed case needs a bracket or scan",
                        case.name
                    )))
                }
            };
            let run = run_closed(&ode, search, 1e-10, *reflected, false);
            let gammas: Vec<f64> = run.solutions.iter().map(|s| s.gamma_star).collect();
            let worst = run.solutions.iter().map(|s| s.residual).fold(0.0, f64::max);
            let seen = format!("γ* = {gammas:?}, max residual = {worst:e}");
            let all_found = expect_gamma
                .iter()
                .all(|w| gammas.iter().any(|g| (g - w).abs() <= *within));
            if gammas.len() >= *expect_min_count && all_found && worst <= 1e-8 {
                Ok(seen)
            } else {
                Err(format!(
                    "expected γ* ⊇ {expect_gamma:?} (at least {expect_min_count}), got {seen}"
                ))
            }
        }
    })
}

pub fn run(a: &VerifyArgs) -> u8 {
    let dir = a.fixtures.clone().unwrap_or_else(default_dir);
    let manifest = match load(&dir) {
        Ok(m) => m,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    if a.list {
        for c in &manifest.cases {
            say(&format!("{:<28} {:<22} {}\n", c.name, c.fixture, kind_name(&c.kind)));
        }
        return EXIT_OK;
    }
    let mut failed = Vec::new();
    for c in &manifest.cases {
        let (mark, detail) = match run_case(&dir, c) {
            Ok(Ok(seen)) => ("ok", seen),
            Ok(Err(why)) => ("FAIL", why),
            Err(InputError(msg)) => ("FAIL", format!("input error: {msg}")),
        };
        if mark == "FAIL" {
            failed.push(c.name.clone());
        }
        say(&format!(
            "{:<4} {:<28} {:<22} {}\n",
            mark,
            c.name,
            kind_name(&c.kind),
            detail
        ));
        if let Some(n) = &c.note {
            say(&format!("     note: {n}\n"));
        }
    }
    say(&format!(
        "{} of {} cases as expected\n",
        manifest.cases.len() - failed.len(),
        manifest.cases.len()
    ));
    if failed.is_empty() {
        EXIT_OK
    } else {
        eprintln!("failing fixtures: {}", failed.join(", "));
        EXIT_VIOLATED
    }
}
