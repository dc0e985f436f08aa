//! The closed-form profile `∏ ρ*_n(d)` that approximates `λ_n` up to constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2};

/// `ρ*_n(t) = n⁻² + n⁻¹√t`.
pub fn rho_star(n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("distance {t} must be finite and non-negative")));
    }
    let n = n as f64;
    Ok(1.0 / (n * n) + t.sqrt() / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaMode {
    /// Minimum over curve terms and corner terms.
    Full,
    /// Curve terms only; meaningful for points away from all corners.
    AwayFromCorners,
}

/// Which term realized the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type", content = "index")]
pub enum FormulaTerm {
    Curve(usize),
    Corner(usize),
}

impl std::fmt::Display for FormulaTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormulaTerm::Curve(i) => write!(f, "curve:{i}"),
            FormulaTerm::Corner(j) => write!(f, "corner:{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaBreakdown {
    pub value: f64,
    pub argmin: FormulaTerm,
    /// `n⁻¹ ρ*_n(d(x, Γ_i))` for every boundary curve.
    pub curve_terms: Vec<f64>,
    /// `ρ*_n(d(x, Γ⁻_j)) ρ*_n(d(x, Γ⁺_j))` for every corner (empty in away-from-corners mode).
    pub corner_terms: Vec<f64>,
    /// Distance to the nearest corner, reported in away-from-corners mode.
    pub corner_distance: Option<f64>,
}

/// `Λ_n(x) = min(min_i n⁻¹ρ*(d(x,Γ_i)), min_j ρ*(d(x,Γ⁻_j))ρ*(d(x,Γ⁺_j)))`.
///
/// Ties go to the first curve term, then to the first corner term.
pub fn theorem_rhs(domain: &Domain, x: Point2, n: usize, mode: FormulaMode) -> Result<FormulaBreakdown> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    if !x.is_finite() {
        return Err(Error::InvalidParameter("point must be finite".into()));
    }
    let nf = n as f64;
    let curve_terms: Vec<f64> = domain
        .curves()
        .iter()
        .map(|c| rho_star(n, c.nearest_point(x).distance).map(|r| r / nf))
        .collect::<Result<_>>()?;
    let mut value = f64::INFINITY;
    let mut argmin = FormulaTerm::Curve(0);
    for (i, &v) in curve_terms.iter().enumerate() {
        if v < value {
            value = v;
            argmin = FormulaTerm::Curve(i);
        }
    }
    let (corner_terms, corner_distance) = match mode {
        FormulaMode::Full => {
            let terms: Vec<f64> = domain
                .corners()
                .iter()
                .map(|c| {
                    let a = rho_star(n, c.arm_minus.nearest_point(x).distance)?;
                    let b = rho_star(n, c.arm_plus.nearest_point(x).distance)?;
                    Ok(a * b)
                })
                .collect::<Result<_>>()?;
            for (j, &v) in terms.iter().enumerate() {
                if v < value {
                    value = v;
                    argmin = FormulaTerm::Corner(j);
                }
            }
            (terms, None)
        }
        FormulaMode::AwayFromCorners => (Vec::new(), Some(domain.distance_to_corners(x))),
    };
    Ok(FormulaBreakdown { value, argmin, curve_terms, corner_terms, corner_distance })
}
