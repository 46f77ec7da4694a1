//! Curve configuration files.
//!
//! A curve config is a TOML document:
//!
//! ```toml
//! name = "exp_projective"
//! kind = "projective"      # or "affine"
//! dimension = 2
//! components = ["1", "z", "exp(z)"]
//! ```
//!
//! Each component is an expression in the grammar of [`crate::curve::expr`]:
//! complex constants (`1`, `2.5`, `i`, `3 + 2*i`), the variable `z`, sums,
//! products, division by nonzero constants, integer powers, `exp(...)`, and
//! `interp(k)` for the interpolation series with plateau `k`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{parse_expr, CurveError, CurveKind, EntireCurve, Expr};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("component {index}: {source}")]
    Component {
        index: usize,
        source: crate::curve::ExprError,
    },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KindTag {
    Affine,
    Projective,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveConfig {
    pub name: String,
    pub kind: KindTag,
    pub dimension: u32,
    pub components: Vec<String>,
}

impl CurveConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<EntireCurve, ConfigError> {
        if self.dimension == 0 {
            return Err(ConfigError::ZeroDimension);
        }
        let kind = match self.kind {
            KindTag::Affine => CurveKind::Affine,
            KindTag::Projective => CurveKind::Projective,
        };
        let mut components: Vec<Expr> = Vec::with_capacity(self.components.len());
        for (index, text) in self.components.iter().enumerate() {
            components
                .push(parse_expr(text).map_err(|source| ConfigError::Component { index, source })?);
        }
        Ok(EntireCurve::new(kind, components, self.dimension, self.name.clone())?)
    }

    /// Config equivalent to [`EntireCurve::identity_projective`].
    pub fn identity_projective() -> Self {
        Self {
            name: "identity".into(),
            kind: KindTag::Projective,
            dimension: 2,
            components: vec!["1".into(), "z".into()],
        }
    }

    /// Config equivalent to [`EntireCurve::exp_projective`].
    pub fn exp_projective() -> Self {
        Self {
            name: "exp".into(),
            kind: KindTag::Projective,
            dimension: 2,
            components: vec!["1".into(), "z".into(), "exp(z)".into()],
        }
    }

    /// Config equivalent to the default rational interpolation curve.
    pub fn interp_affine(plateau: usize) -> Self {
        Self {
            name: format!("rational_interp_p{plateau}"),
            kind: KindTag::Affine,
            dimension: 2,
            components: vec!["z".into(), format!("interp({plateau})")],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn roundtrip_through_toml() {
        let cfg = CurveConfig::exp_projective();
        let text = cfg.to_toml();
        let back = CurveConfig::from_toml(&text).unwrap();
        assert_eq!(back.name, cfg.name);
        assert_eq!(back.kind, cfg.kind);
        assert_eq!(back.components, cfg.components);
    }

    #[test]
    fn built_curve_matches_constructor() {
        let from_cfg = CurveConfig::exp_projective().build().unwrap();
        let direct = EntireCurve::exp_projective();
        for k in 0..5 {
            let z = Complex64::new(0.3 * k as f64, 0.1 * k as f64);
            let a = from_cfg.evaluate(z, 1e-10).unwrap();
            let b = direct.evaluate(z, 1e-10).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn interp_config_exposes_rational_locus() {
        let curve = CurveConfig::interp_affine(0).build().unwrap();
        assert!(curve.rational_locus().is_some());
    }

    #[test]
    fn bad_component_reports_index() {
        let cfg = CurveConfig {
            name: "broken".into(),
            kind: KindTag::Affine,
            dimension: 2,
            components: vec!["z".into(), "exp(".into()],
        };
        match cfg.build() {
            Err(ConfigError::Component { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected component error, got {other:?}"),
        }
    }

    #[test]
    fn repo_fixtures_parse_and_build() {
        let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
        for name in ["identity.toml", "exp.toml", "interp.toml"] {
            let cfg = CurveConfig::load(format!("{root}/{name}")).unwrap();
            cfg.build().unwrap();
        }
    }
}
