//! Comparison, global-solvability and closed-solution tools for scalar
//! polynomial equations `y' + Σ_{k=0}^n a_k(t) y^k = 0`.
//!
//! * [`expr`] parses closed-form coefficient functions of `t`.
//! * [`ode`] and [`integrate`] hold the equation model, the `S_k`/`D` kernels,
//!   adaptive integration with escape detection and exponentially weighted
//!   integrals.
//! * [`subsup`] builds explicit sub/super solution candidates and checks the
//!   defining differential inequalities.
//! * [`criteria`] checks the hypotheses of the comparison, global existence
//!   and closed-solution theorems on a finite horizon.
//! * [`closed`] locates closed solutions `y(t0) = y(T)` by bracketed search on
//!   the end map.
//! * [`spec`] and [`report`] are the JSON file formats shared with the CLI.

// `!(x < y)` style tests are used on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed;
pub mod criteria;
pub mod error;
pub mod expr;
pub mod integrate;
pub mod ode;
pub mod report;
pub mod sampling;
pub mod spec;
pub mod subsup;

pub use closed::{
    end_map, find_closed, find_closed_reflected, isolation_exponent, scan_closed, ClosedError, ClosedSolution,
    EndValue, Isolation, Scan,
};
pub use criteria::{
    check_integral_condition, check_theorem, check_theorem_detailed, check_theorem_with,
    check_usable_sequence_condition, CheckSettings, Outcome, Params, Sense, TheoremId,
};
pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use integrate::{cauchy_residual, exp_weighted_integral, integrate, Status, Trajectory, WeightedPrimitive};
pub use ode::{d1_majorant, d_kernel, rhs, s_poly, MajorantMode, PolyOde};
pub use report::{ConditionResult, CriterionReport, Verdict};
pub use spec::EquationSpec;
pub use subsup::{
    build_eta_c, build_eta_star, build_i_gamma, build_m_star, build_theta, build_zeta_star,
    verify_differential_inequality, Candidate, CandidateKind, Direction, Split, ThetaSign,
};
