//! Benchmark inputs shared by the criterion targets.

use polyode::PolyOde;

/// The degree-six periodic equation used in the closed-solution examples.
pub fn degree_six() -> PolyOde {
    PolyOde::parse(
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
    .expect("fixture parses")
}

/// A cubic with a stable closed solution.
pub fn cubic() -> PolyOde {
    PolyOde::parse(&["sin(t)", "1", "0", "1"], 0.0, 2.0 * std::f64::consts::PI).expect("fixture parses")
}
