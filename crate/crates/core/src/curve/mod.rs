//! Entire curves into affine or projective space with certified evaluation,
//! pullback of polynomial sections, and an exact rational locus for the
//! interpolation-series curves.

pub mod expr;
pub mod section;
pub mod series;

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

pub use expr::{parse as parse_expr, Expr, ExprError};
pub use section::{monomial_basis, Ambient, PolynomialSection, SectionError};
pub use series::{
    rational_height, rationals_of_height, CoefficientPattern, InterpolationSeries,
};

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("curve needs at least {need} components, got {got}")]
    TooFewComponents { need: usize, got: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error("projective components all vanish at z = {z} (within tolerance)")]
    IndeterminatePoint { z: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Affine,
    Projective,
}

/// Exact enumerator of rational points on the curve z -> (z, f(z)).
#[derive(Debug, Clone)]
pub struct RationalLocus {
    series: Arc<InterpolationSeries>,
}

impl RationalLocus {
    pub fn series(&self) -> &Arc<InterpolationSeries> {
        &self.series
    }

    /// The exact image (q, f(q)) of a rational parameter.
    pub fn point(&self, q: &BigRational) -> (BigRational, BigRational) {
        (q.clone(), self.series.eval_exact(q))
    }
}

/// A curve value with its certified componentwise error bound.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub values: Vec<Complex64>,
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct EntireCurve {
    kind: CurveKind,
    components: Vec<Expr>,
    /// Ambient variety dimension n from the counting statements (not the
    /// number of components). Defaults to 2 so counting preconditions hold.
    dimension: u32,
    name: String,
    rational_locus: Option<RationalLocus>,
}

impl EntireCurve {
    pub fn new(
        kind: CurveKind,
        components: Vec<Expr>,
        dimension: u32,
        name: impl Into<String>,
    ) -> Result<Self, CurveError> {
        let need = match kind {
            CurveKind::Affine => 1,
            CurveKind::Projective => 2,
        };
        if components.len() < need {
            return Err(CurveError::TooFewComponents { need, got: components.len() });
        }
        // The rational locus is exposed only for the canonical (z, f(z))
        // shape with a series second component.
        let rational_locus = match (kind, components.as_slice()) {
            (CurveKind::Affine, [Expr::Z, f]) => {
                f.as_series().map(|s| RationalLocus { series: Arc::clone(s) })
            }
            _ => None,
        };
        Ok(Self { kind, components, dimension, name: name.into(), rational_locus })
    }

    /// phi(z) = [1 : z] on the line.
    pub fn identity_projective() -> Self {
        Self::new(
            CurveKind::Projective,
            vec![Expr::Const(Complex64::new(1.0, 0.0)), Expr::Z],
            2,
            "identity",
        )
        .unwrap()
    }

    /// phi(z) = [1 : z : e^z].
    pub fn exp_projective() -> Self {
        Self::new(
            CurveKind::Projective,
            vec![
                Expr::Const(Complex64::new(1.0, 0.0)),
                Expr::Z,
                Expr::Exp(Box::new(Expr::Z)),
            ],
            2,
            "exp_projective",
        )
        .unwrap()
    }

    /// phi(z) = (z) into the affine line.
    pub fn identity_affine() -> Self {
        Self::new(CurveKind::Affine, vec![Expr::Z], 2, "identity_affine").unwrap()
    }

    /// phi(z) = (z, e^z).
    pub fn exp_affine() -> Self {
        Self::new(
            CurveKind::Affine,
            vec![Expr::Z, Expr::Exp(Box::new(Expr::Z))],
            2,
            "exp_affine",
        )
        .unwrap()
    }

    /// phi(z) = (z, f(z)) with f the interpolation series: entire,
    /// transcendental, and mapping every rational to an exact rational point.
    /// `height_budget` pre-extends the node cache (evaluation extends it
    /// lazily anyway, so the budget is a warm-up, not a cap).
    pub fn build_rational_curve(height_budget: u64, pattern: CoefficientPattern) -> Self {
        let series = Arc::new(InterpolationSeries::new(pattern));
        if height_budget >= 1 {
            // touch one node per height up front
            let _ = series.nodes_prefix(1);
            let probe = BigRational::new(
                num_bigint::BigInt::from(height_budget.min(1 << 20) as i64),
                num_bigint::BigInt::from(1),
            );
            let _ = series.node_index(&probe);
        }
        Self::new(
            CurveKind::Affine,
            vec![Expr::Z, Expr::Series(series)],
            2,
            format!("rational_interp_p{}", pattern.plateau),
        )
        .unwrap()
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn with_dimension(mut self, n: u32) -> Self {
        self.dimension = n;
        self
    }

    pub fn rational_locus(&self) -> Option<&RationalLocus> {
        self.rational_locus.as_ref()
    }

    /// Number of variables a section over this curve must have: components
    /// count for projective ([x_0 : ... : x_N]), components count for affine
    /// (x_1 .. x_N).
    pub fn ambient_vars(&self) -> usize {
        self.components.len()
    }

    pub fn section_ambient(&self) -> Ambient {
        match self.kind {
            CurveKind::Projective => Ambient::Projective(self.components.len()),
            CurveKind::Affine => Ambient::Affine(self.components.len()),
        }
    }

    pub fn evaluate(&self, z: Complex64, tol: f64) -> Result<CurvePoint, CurveError> {
        let mut values = Vec::with_capacity(self.components.len());
        let mut error = 0.0f64;
        for c in &self.components {
            let (v, e) = c.eval(z, tol)?;
            values.push(v);
            error = error.max(e);
        }
        if self.kind == CurveKind::Projective {
            let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if max <= error {
                return Err(CurveError::IndeterminatePoint { z });
            }
        }
        Ok(CurvePoint { values, error })
    }

    /// The metric weight at z: `1 + sum |f_j|^2` for affine curves and
    /// `sum |f_j|^2` for projective ones. Its half-log is the potential whose
    /// circle means define the characteristic.
    pub fn weight(&self, z: Complex64, tol: f64) -> Result<f64, CurveError> {
        let p = self.evaluate(z, tol)?;
        let sq: f64 = p.values.iter().map(|v| v.norm_sqr()).sum();
        Ok(match self.kind {
            CurveKind::Affine => 1.0 + sq,
            CurveKind::Projective => sq,
        })
    }

    /// u(z) = (1/2) log weight(z).
    pub fn potential(&self, z: Complex64, tol: f64) -> Result<f64, CurveError> {
        Ok(0.5 * self.weight(z, tol)?.ln())
    }
}

/// Pullback phi^*(s): raw value s(phi(z)) and the pointwise metric norm
/// ||s||(phi(z)).
pub struct Pullback<'a> {
    curve: &'a EntireCurve,
    section: &'a PolynomialSection,
}

impl<'a> Pullback<'a> {
    pub fn new(
        curve: &'a EntireCurve,
        section: &'a PolynomialSection,
    ) -> Result<Self, CurveError> {
        if section.ambient() != curve.section_ambient() {
            return Err(CurveError::Section(SectionError::DimensionMismatch {
                section: section.ambient().vars(),
                point: curve.ambient_vars(),
            }));
        }
        Ok(Self { curve, section })
    }

    pub fn raw(&self, z: Complex64, tol: f64) -> Result<Complex64, CurveError> {
        let p = self.curve.evaluate(z, tol)?;
        Ok(self.section.eval_complex(&p.values)?)
    }

    pub fn norm(&self, z: Complex64, tol: f64) -> Result<f64, CurveError> {
        Ok(self.log_norm(z, tol)?.exp())
    }

    pub fn log_norm(&self, z: Complex64, tol: f64) -> Result<f64, CurveError> {
        let p = self.curve.evaluate(z, tol)?;
        Ok(self.section.log_fs_norm(&p.values)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_curve_evaluates_exactly() {
        let phi = EntireCurve::identity_projective();
        let p = phi.evaluate(c(2.0, 0.0), 1e-12).unwrap();
        assert_eq!(p.values, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(p.error, 0.0);
    }

    #[test]
    fn exp_curve_at_origin() {
        let phi = EntireCurve::exp_affine();
        let p = phi.evaluate(c(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(p.values[0], c(0.0, 0.0));
        assert_abs_diff_eq!((p.values[1] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn interpolation_curve_matches_exact_locus_at_node() {
        let phi = EntireCurve::build_rational_curve(4, CoefficientPattern::default());
        let locus = phi.rational_locus().expect("series curve exposes a locus");
        let q3 = locus.series().node(2);
        let (x, y) = locus.point(&q3);
        assert_eq!(x, q3);
        let z = c(q3.to_f64().unwrap(), 0.0);
        let p = phi.evaluate(z, 1e-10).unwrap();
        assert_abs_diff_eq!(p.values[1].re, y.to_f64().unwrap(), epsilon = 1e-8);
        assert_abs_diff_eq!(p.values[1].im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn rational_curve_not_algebraic_of_low_degree() {
        // No polynomial P with deg <= 4 kills (z, f(z)). The evaluation
        // matrix over 100 exact rational points on the locus has full column
        // rank, so only P = 0 vanishes on all of them; rank is computed in
        // exact arithmetic (the float version is hopelessly ill-conditioned).
        use num_traits::Zero;
        let phi = EntireCurve::build_rational_curve(1, CoefficientPattern::default());
        let locus = phi.rational_locus().unwrap();
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for k in 0..100usize {
            let q = locus.series().node(k);
            let (x, y) = locus.point(&q);
            let mut row = Vec::new();
            for dx in 0..=4u32 {
                for dy in 0..=(4 - dx) {
                    let mut v = BigRational::from(BigInt::from(1));
                    for _ in 0..dx {
                        v *= &x;
                    }
                    for _ in 0..dy {
                        v *= &y;
                    }
                    row.push(v);
                }
            }
            rows.push(row);
        }
        let cols = rows[0].len();
        let mut m = rows;
        let mut rank = 0;
        for col in 0..cols {
            let Some(pi) = (rank..m.len()).find(|&ri| !m[ri][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pi);
            let lead = m[rank][col].clone();
            for ri in rank + 1..m.len() {
                if !m[ri][col].is_zero() {
                    let f = &m[ri][col] / &lead;
                    for cj in col..cols {
                        let s = &f * &m[rank][cj];
                        m[ri][cj] -= s;
                    }
                }
            }
            rank += 1;
        }
        assert_eq!(rank, cols, "image lies on a degree-4 algebraic curve");
    }

    #[test]
    fn pullback_of_coordinate_on_identity_curve() {
        let phi = EntireCurve::identity_projective();
        let s = PolynomialSection::linear(Ambient::Projective(2), &[0, 1]).unwrap();
        let pb = Pullback::new(&phi, &s).unwrap();
        let raw = pb.raw(c(3.0, 0.0), 1e-12).unwrap();
        assert_abs_diff_eq!((raw - c(3.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        let norm = pb.norm(c(3.0, 0.0), 1e-12).unwrap();
        assert_abs_diff_eq!(norm, 3.0 / 10.0f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn pullback_vanishes_where_components_agree() {
        // s = x_2 - x_0 on [1 : z : e^z] at z = 0
        let phi = EntireCurve::exp_projective();
        let s = PolynomialSection::linear(Ambient::Projective(3), &[-1, 0, 1]).unwrap();
        let pb = Pullback::new(&phi, &s).unwrap();
        let raw = pb.raw(c(0.0, 0.0), 1e-14).unwrap();
        assert!(raw.norm() < 1e-13);
    }

    #[test]
    fn pullback_dimension_mismatch_rejected() {
        let phi = EntireCurve::identity_projective();
        let s = PolynomialSection::linear(Ambient::Projective(3), &[1, 0, 0]).unwrap();
        assert!(Pullback::new(&phi, &s).is_err());
    }

    #[test]
    fn projective_indeterminate_point_detected() {
        // [z : z] has no indeterminacy away from 0 but both vanish at 0
        let phi =
            EntireCurve::new(CurveKind::Projective, vec![Expr::Z, Expr::Z], 2, "degenerate")
                .unwrap();
        assert!(matches!(
            phi.evaluate(c(0.0, 0.0), 1e-12),
            Err(CurveError::IndeterminatePoint { .. })
        ));
        assert!(phi.evaluate(c(1.0, 0.0), 1e-12).is_ok());
    }

    #[test]
    fn locus_points_are_exact_rationals() {
        let phi = EntireCurve::build_rational_curve(1, CoefficientPattern::default());
        let locus = phi.rational_locus().unwrap();
        let q = BigRational::new(BigInt::from(2), BigInt::from(5));
        let (x, y) = locus.point(&q);
        assert_eq!(x, q);
        // cross-check against the series' own exact evaluation
        assert_eq!(y, locus.series().eval_exact(&q));
    }
}
