//! Polynomial sections of the polarizing line bundle, with exact rational
//! coefficients and Fubini–Study pointwise norms.
//!
//! Projective sections are homogeneous of degree `d` in `N + 1` variables
//! with pointwise norm `|s(x)| / ||x||_2^d`; affine sections have total
//! degree at most `d` in `N` variables and norm
//! `|s(x)| / (1 + sum |x_j|^2)^{d/2}`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SectionError {
    #[error("section must have at least one nonzero coefficient")]
    ZeroSection,
    #[error("monomial exponents {got:?} invalid for {ambient:?} of degree {degree}")]
    BadMonomial { got: Vec<u32>, ambient: Ambient, degree: u32 },
    #[error("ambient dimension mismatch: section has {section} variables, point has {point}")]
    DimensionMismatch { section: usize, point: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "vars")]
pub enum Ambient {
    /// Homogeneous sections in `vars` variables (projective space P^{vars-1}).
    Projective(usize),
    /// Total degree <= d sections in `vars` affine variables.
    Affine(usize),
}

impl Ambient {
    pub fn vars(&self) -> usize {
        match *self {
            Ambient::Projective(v) | Ambient::Affine(v) => v,
        }
    }
}

/// Canonical monomial basis: all exponent vectors for the given ambient and
/// degree, in lexicographic order. Homogeneous for projective, total degree
/// at most `d` for affine.
pub fn monomial_basis(ambient: Ambient, degree: u32) -> Vec<Vec<u32>> {
    let vars = ambient.vars();
    let mut out = Vec::new();
    let mut cur = vec![0u32; vars];
    fn rec(
        cur: &mut Vec<u32>,
        pos: usize,
        left: u32,
        exact: bool,
        out: &mut Vec<Vec<u32>>,
    ) {
        if pos + 1 == cur.len() {
            if exact {
                cur[pos] = left;
                out.push(cur.clone());
            } else {
                for e in 0..=left {
                    cur[pos] = e;
                    out.push(cur.clone());
                }
            }
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(cur, pos + 1, left - e, exact, out);
        }
    }
    let exact = matches!(ambient, Ambient::Projective(_));
    rec(&mut cur, 0, degree, exact, &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialSection {
    ambient: Ambient,
    degree: u32,
    /// (exponents, coefficient) with nonzero coefficients only.
    terms: Vec<(Vec<u32>, BigRational)>,
}

impl PolynomialSection {
    pub fn new(
        ambient: Ambient,
        degree: u32,
        terms: Vec<(Vec<u32>, BigRational)>,
    ) -> Result<Self, SectionError> {
        let terms: Vec<_> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return Err(SectionError::ZeroSection);
        }
        for (exps, _) in &terms {
            let total: u32 = exps.iter().sum();
            let ok = exps.len() == ambient.vars()
                && match ambient {
                    Ambient::Projective(_) => total == degree,
                    Ambient::Affine(_) => total <= degree,
                };
            if !ok {
                return Err(SectionError::BadMonomial { got: exps.clone(), ambient, degree });
            }
        }
        Ok(Self { ambient, degree, terms })
    }

    /// Section from a dense coefficient vector over the canonical basis.
    pub fn from_coefficients(
        ambient: Ambient,
        degree: u32,
        coeffs: &[BigRational],
    ) -> Result<Self, SectionError> {
        let basis = monomial_basis(ambient, degree);
        assert_eq!(basis.len(), coeffs.len(), "coefficient vector length mismatch");
        Self::new(
            ambient,
            degree,
            basis.into_iter().zip(coeffs.iter().cloned()).collect(),
        )
    }

    /// Convenience: a linear section with `coeffs[i]` multiplying the i-th
    /// coordinate (for affine ambients an extra leading entry is the constant
    /// term).
    pub fn linear(ambient: Ambient, coeffs: &[i64]) -> Result<Self, SectionError> {
        let vars = ambient.vars();
        let mut terms = Vec::new();
        let (constant, var_coeffs) = match ambient {
            Ambient::Projective(_) => {
                assert_eq!(coeffs.len(), vars);
                (None, coeffs)
            }
            Ambient::Affine(_) => {
                assert_eq!(coeffs.len(), vars + 1);
                (Some(coeffs[0]), &coeffs[1..])
            }
        };
        if let Some(c) = constant {
            terms.push((vec![0u32; vars], BigRational::from(BigInt::from(c))));
        }
        for (i, &c) in var_coeffs.iter().enumerate() {
            let mut e = vec![0u32; vars];
            e[i] = 1;
            terms.push((e, BigRational::from(BigInt::from(c))));
        }
        Self::new(ambient, 1, terms)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigRational)] {
        &self.terms
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    pub fn eval_rational(&self, coords: &[BigRational]) -> Result<BigRational, SectionError> {
        if coords.len() != self.ambient.vars() {
            return Err(SectionError::DimensionMismatch {
                section: self.ambient.vars(),
                point: coords.len(),
            });
        }
        let mut total = BigRational::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in coords.iter().zip(exps) {
                for _ in 0..e {
                    term *= x;
                }
            }
            total += term;
        }
        Ok(total)
    }

    pub fn eval_complex(&self, coords: &[Complex64]) -> Result<Complex64, SectionError> {
        if coords.len() != self.ambient.vars() {
            return Err(SectionError::DimensionMismatch {
                section: self.ambient.vars(),
                point: coords.len(),
            });
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (exps, c) in &self.terms {
            let mut term = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (x, &e) in coords.iter().zip(exps) {
                term *= x.powu(e);
            }
            total += term;
        }
        Ok(total)
    }

    /// Pointwise Fubini–Study norm `||s||(x)`.
    pub fn fs_norm(&self, coords: &[Complex64]) -> Result<f64, SectionError> {
        Ok(self.log_fs_norm(coords)?.exp())
    }

    /// `log ||s||(x)`; `-inf` at zeros of the section.
    pub fn log_fs_norm(&self, coords: &[Complex64]) -> Result<f64, SectionError> {
        let v = self.eval_complex(coords)?;
        let sq: f64 = coords.iter().map(|x| x.norm_sqr()).sum();
        let log_scale = match self.ambient {
            Ambient::Projective(_) => 0.5 * sq.ln(),
            Ambient::Affine(_) => 0.5 * sq.ln_1p(),
        };
        Ok(v.norm().ln() - self.degree as f64 * log_scale)
    }

    /// Sampled sup of the pointwise norm over a deterministic pseudo-random
    /// point set (a lower bound of the true sup, so inequality checks that
    /// use it on the right-hand side are conservative).
    pub fn sup_norm_sampled(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = self.ambient.vars();
        let mut best = f64::NEG_INFINITY;
        let mut coords = vec![Complex64::new(0.0, 0.0); vars];
        for _ in 0..samples {
            for c in coords.iter_mut() {
                *c = Complex64::new(gauss(&mut rng), gauss(&mut rng));
            }
            if let Ok(v) = self.log_fs_norm(&coords) {
                best = best.max(v);
            }
        }
        best.exp()
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller; plenty for sampling oracles.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rat(a: i64) -> BigRational {
        BigRational::from(BigInt::from(a))
    }

    #[test]
    fn basis_sizes() {
        // homogeneous degree-2 in 3 vars: C(4,2) = 6
        assert_eq!(monomial_basis(Ambient::Projective(3), 2).len(), 6);
        // affine total degree <= 2 in 2 vars: 6
        assert_eq!(monomial_basis(Ambient::Affine(2), 2).len(), 6);
    }

    #[test]
    fn zero_section_rejected() {
        assert!(matches!(
            PolynomialSection::new(Ambient::Projective(2), 1, vec![(vec![1, 0], rat(0))]),
            Err(SectionError::ZeroSection)
        ));
    }

    #[test]
    fn fs_norm_linear_on_p1() {
        // s = x_1 at [1 : 3]: |3| / sqrt(10)
        let s = PolynomialSection::linear(Ambient::Projective(2), &[0, 1]).unwrap();
        let v = s
            .fs_norm(&[Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)])
            .unwrap();
        assert_abs_diff_eq!(v, 3.0 / 10.0f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn fs_norm_scale_invariant() {
        let s = PolynomialSection::linear(Ambient::Projective(3), &[1, -2, 1]).unwrap();
        let p = [
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 2.0),
            Complex64::new(0.9, -0.1),
        ];
        let lambda = Complex64::new(-3.7, 1.2);
        let scaled: Vec<Complex64> = p.iter().map(|&x| lambda * x).collect();
        let a = s.fs_norm(&p).unwrap();
        let b = s.fs_norm(&scaled).unwrap();
        assert!((a - b).abs() / a < 1e-12);
    }

    #[test]
    fn sup_norm_of_coordinate_is_at_most_one() {
        let s = PolynomialSection::linear(Ambient::Projective(2), &[0, 1]).unwrap();
        let sup = s.sup_norm_sampled(4096, 0);
        assert!(sup <= 1.0 + 1e-12);
        assert!(sup > 0.9);
    }

    #[test]
    fn rational_evaluation_is_exact() {
        // s = x0^2 - 2 x0 x1 + x2^2 at (1, 2, 3): 1 - 4 + 9 = 6
        let s = PolynomialSection::new(
            Ambient::Projective(3),
            2,
            vec![
                (vec![2, 0, 0], rat(1)),
                (vec![1, 1, 0], rat(-2)),
                (vec![0, 0, 2], rat(1)),
            ],
        )
        .unwrap();
        assert_eq!(s.eval_rational(&[rat(1), rat(2), rat(3)]).unwrap(), rat(6));
    }
}
