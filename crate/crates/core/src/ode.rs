//! The equation `y' + Σ_{k=0}^n a_k(t) y^k = 0` and its difference kernels.

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

#[derive(Debug, Clone)]
struct Coef {
    expr: Expr,
    constant: Option<f64>,
}

/// Polynomial first-order equation on a finite working interval `[t0, horizon]`.
#[derive(Debug, Clone)]
pub struct PolyOde {
    coeffs: Vec<Coef>,
    t0: f64,
    horizon: f64,
}

impl PolyOde {
    /// `coeffs[k]` is `a_k`. Degree is `coeffs.len() - 1` and must be at least 1.
    pub fn new(coeffs: Vec<Expr>, t0: f64, horizon: f64) -> Result<PolyOde> {
        if coeffs.len() < 2 {
            return Err(Error::Invalid("degree must be at least 1".into()));
        }
        if !(t0.is_finite() && horizon.is_finite() && horizon > t0) {
            return Err(Error::Invalid(format!(
                "need finite t0 < horizon, got [{t0}, {horizon}]"
            )));
        }
        let coeffs = coeffs
            .into_iter()
            .map(|expr| Coef {
                constant: expr.as_constant(),
                expr,
            })
            .collect();
        Ok(PolyOde { coeffs, t0, horizon })
    }

    /// Parse coefficient strings `a_0, a_1, ..., a_n`.
    pub fn parse(coeffs: &[&str], t0: f64, horizon: f64) -> Result<PolyOde> {
        let exprs = coeffs
            .iter()
            .map(|s| expr::parse(s))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        PolyOde::new(exprs, t0, horizon)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn coeff_expr(&self, k: usize) -> &Expr {
        &self.coeffs[k].expr
    }

    pub fn coeff_exprs(&self) -> Vec<Expr> {
        self.coeffs.iter().map(|c| c.expr.clone()).collect()
    }

    /// `a_k(t)`; zero for `k > n`.
    pub fn coeff(&self, k: usize, t: f64) -> Result<f64> {
        match self.coeffs.get(k) {
            None => Ok(0.0),
            Some(Coef { constant: Some(c), .. }) => Ok(*c),
            Some(c) => Ok(c.expr.eval(t)?),
        }
    }

    /// All coefficients at `t` into `out` (resized to `n + 1`).
    pub fn coeffs_at(&self, t: f64, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        for c in &self.coeffs {
            out.push(match c.constant {
                Some(v) => v,
                None => c.expr.eval(t)?,
            });
        }
        Ok(())
    }

    pub fn coeff_vec(&self, t: f64) -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(self.coeffs.len());
        self.coeffs_at(t, &mut v)?;
        Ok(v)
    }

    pub fn with_interval(&self, t0: f64, horizon: f64) -> Result<PolyOde> {
        PolyOde::new(self.coeff_exprs(), t0, horizon)
    }

    /// The equation met by `z(s) = -y(-s)`:
    /// `z' + Σ (-1)^k a_k(-s) z^k = 0` on `[-horizon, -t0]`.
    pub fn reflected(&self) -> PolyOde {
        let minus_t = Expr::Neg(Box::new(Expr::T));
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = c.expr.substitute_t(&minus_t);
                if k % 2 == 1 {
                    Expr::Neg(Box::new(e))
                } else {
                    e
                }
            })
            .collect();
        PolyOde::new(coeffs, -self.horizon, -self.t0).expect("reflection keeps a valid interval")
    }

    /// `a~_k = (-1)^{k+1} a_k` on the same interval. `eta` is a sub solution
    /// for this equation iff `-eta` is a super solution for the original.
    pub fn sign_reflected(&self) -> PolyOde {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k % 2 == 0 {
                    Expr::Neg(Box::new(c.expr.clone()))
                } else {
                    c.expr.clone()
                }
            })
            .collect();
        PolyOde::new(coeffs, self.t0, self.horizon).expect("same interval")
    }
}

/// `Σ a_k y^k` by Horner's scheme.
pub fn poly_value(a: &[f64], y: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * y + c)
}

/// `y' = -Σ a_k(t) y^k`.
pub fn rhs(ode: &PolyOde, t: f64, y: f64) -> Result<f64> {
    let mut acc = 0.0;
    for k in (0..=ode.degree()).rev() {
        acc = acc * y + ode.coeff(k, t)?;
    }
    Ok(-acc)
}

/// `S_k(u, v) = Σ_{j=0}^{k-1} u^j v^{k-1-j}`.
pub fn s_poly(k: usize, u: f64, v: f64) -> f64 {
    assert!(k >= 1, "S_k needs k >= 1");
    // Horner in u with v-powers: S_k = v^{k-1} + u (v^{k-2} + u (...))
    let mut vpow = 1.0;
    let mut pows = Vec::with_capacity(k);
    for _ in 0..k {
        pows.push(vpow);
        vpow *= v;
    }
    let mut acc = 0.0;
    for j in (0..k).rev() {
        // coefficient of u^j is v^{k-1-j}
        acc = acc * u + pows[k - 1 - j];
    }
    acc
}

/// All `S_k(u, v)` for `k = 1..=n` (index 0 unused, set to 0).
pub fn s_all(n: usize, u: f64, v: f64) -> Vec<f64> {
    // S_{k+1} = u^k + v S_k
    let mut out = vec![0.0; n + 1];
    let mut upow = 1.0;
    let mut prev = 0.0;
    for s in out.iter_mut().skip(1) {
        prev = upow + v * prev;
        *s = prev;
        upow *= u;
    }
    out
}

pub(crate) fn d_from(a: &[f64], u: f64, v: f64) -> f64 {
    let s = s_all(a.len() - 1, u, v);
    (1..a.len()).map(|k| a[k] * s[k]).sum()
}

/// `D(t, u, v) = Σ_{k=1}^n a_k(t) S_k(u, v)`.
pub fn d_kernel(ode: &PolyOde, t: f64, u: f64, v: f64) -> Result<f64> {
    Ok(d_from(&ode.coeff_vec(t)?, u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MajorantMode {
    /// `Σ_{k≥2} a_k⁺ S_k(u,v) + a_1`; dominates `D` when `u, v ≥ 0`.
    AllPositiveParts,
    /// `Σ_{k≥2} σ_k⁺ a_k⁺ S_k(u,v) + a_1` with `σ_k⁺ = 1` for even `k`;
    /// dominates `D` when odd-power coefficients are nonpositive and `u + v ≥ 0`.
    EvenPositiveParts,
}

pub(crate) fn majorant_from(a: &[f64], u: f64, v: f64, mode: MajorantMode) -> f64 {
    let n = a.len() - 1;
    let s = s_all(n, u, v);
    let mut acc = a[1];
    for k in 2..=n {
        if mode == MajorantMode::EvenPositiveParts && k % 2 == 1 {
            continue;
        }
        acc += a[k].max(0.0) * s[k];
    }
    acc
}

pub fn d1_majorant(ode: &PolyOde, t: f64, u: f64, v: f64, mode: MajorantMode) -> Result<f64> {
    Ok(majorant_from(&ode.coeff_vec(t)?, u, v, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bracket() -> PolyOde {
        PolyOde::parse(&["-1", "0", "1"], 0.0, 10.0).unwrap()
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs(&bracket(), 0.0, 0.0).unwrap(), 1.0);
        let sq = PolyOde::parse(&["0", "0", "-1"], 0.0, 1.0).unwrap();
        assert_eq!(rhs(&sq, 0.3, 2.0).unwrap(), 4.0);
        let ex = PolyOde::parse(
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
        .unwrap();
        assert_eq!(rhs(&ex, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn s_poly_examples() {
        assert_eq!(s_poly(1, 3.0, -7.0), 1.0);
        assert_eq!(s_poly(3, 2.0, 1.0), 7.0);
        let direct: f64 = (0..5).map(|j| (-1.3f64).powi(j) * 0.7f64.powi(4 - j)).sum();
        let v = s_poly(5, -1.3, 0.7);
        assert!(v >= 0.0);
        assert!((v - direct).abs() < 1e-14);
        for k in 1..9 {
            let s = s_all(k, -1.3, 0.7);
            assert!((s[k] - s_poly(k, -1.3, 0.7)).abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_examples() {
        let ode = PolyOde::parse(&["0", "sin(t)", "t"], 0.0, 1.0).unwrap();
        let (t, u, v) = (0.4, 1.5, -0.25);
        let want = 0.4f64.sin() + 0.4 * (u + v);
        assert!((d_kernel(&ode, t, u, v).unwrap() - want).abs() < 1e-15);
        assert_eq!(d_kernel(&bracket(), 0.0, 1.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn kernel_on_diagonal_is_derivative() {
        let ode = PolyOde::parse(&["1", "-2", "0.5", "3", "-1"], 0.0, 1.0).unwrap();
        let a = ode.coeff_vec(0.0).unwrap();
        for &u in &[-2.0f64, -0.3, 0.0, 0.7, 1.9] {
            let deriv: f64 = (1..a.len()).map(|k| k as f64 * a[k] * u.powi(k as i32 - 1)).sum();
            let d = d_kernel(&ode, 0.0, u, u).unwrap();
            assert!((d - deriv).abs() <= 1e-10 * deriv.abs().max(1.0));
        }
    }

    #[test]
    fn majorant_examples() {
        let pos = PolyOde::parse(&["0", "1", "2", "0.5"], 0.0, 1.0).unwrap();
        let d = d_kernel(&pos, 0.0, 0.3, 1.2).unwrap();
        let m = d1_majorant(&pos, 0.0, 0.3, 1.2, MajorantMode::AllPositiveParts).unwrap();
        assert!((d - m).abs() < 1e-15);

        let neg = PolyOde::parse(&["0", "2", "-5", "0"], 0.0, 1.0).unwrap();
        for &(u, v) in &[(0.0, 0.0), (3.0, 1.0), (-2.0, 7.0)] {
            let m = d1_majorant(&neg, 0.0, u, v, MajorantMode::AllPositiveParts).unwrap();
            assert_eq!(m, 2.0);
        }

        // odd powers are dropped in the even mode
        let four = PolyOde::parse(&["0", "1", "2", "3", "4"], 0.0, 1.0).unwrap();
        let (u, v) = (0.5, 0.25);
        let m = d1_majorant(&four, 0.0, u, v, MajorantMode::EvenPositiveParts).unwrap();
        let want = 1.0 + 2.0 * s_poly(2, u, v) + 4.0 * s_poly(4, u, v);
        assert!((m - want).abs() < 1e-15);
    }

    #[test]
    fn reflections() {
        let ode = PolyOde::parse(&["t", "2", "t^2", "1"], 0.0, 2.0).unwrap();
        let r = ode.reflected();
        assert_eq!((r.t0(), r.horizon()), (-2.0, 0.0));
        let a = ode.coeff_vec(0.5).unwrap();
        let b = r.coeff_vec(-0.5).unwrap();
        for k in 0..4 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(b[k], sign * a[k]);
        }
        let s = ode.sign_reflected();
        let c = s.coeff_vec(0.5).unwrap();
        for k in 0..4 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            assert_eq!(c[k], sign * a[k]);
        }
    }
}
