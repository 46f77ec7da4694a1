//! Exact rational points, Weil/Fubini–Study heights, the Liouville
//! inequality, and bounded-height enumeration along curve rational loci.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curve::{EntireCurve, PolynomialSection};
use crate::disk::DiskSet;

#[derive(Debug, Error)]
pub enum HeightError {
    #[error("rational point needs a nonzero coordinate")]
    ZeroVector,
    #[error("curve exposes no rational locus")]
    NoRationalLocus,
    #[error("section must have integer coefficients for the Liouville check")]
    NonIntegerSection,
    #[error(transparent)]
    Section(#[from] crate::curve::SectionError),
}

/// Natural log of a positive big integer, accurate to ~1e-15 relative even
/// far beyond f64 range.
pub fn ln_big(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v.ln();
        }
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_f64().expect("64-bit mantissa fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A point of projective space over Q in primitive integer coordinates
/// (b, a_1, ..., a_N): gcd 1, leading coordinate positive when nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalPoint {
    coords: Vec<BigInt>,
}

impl RationalPoint {
    pub fn new(coords: Vec<BigInt>) -> Result<Self, HeightError> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(HeightError::ZeroVector);
        }
        let mut g = BigInt::zero();
        for c in &coords {
            g = g.gcd(c);
        }
        let mut coords: Vec<BigInt> = coords.into_iter().map(|c| c / &g).collect();
        let flip = coords
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.is_negative())
            .unwrap_or(false);
        if flip {
            for c in coords.iter_mut() {
                *c = -c.clone();
            }
        }
        Ok(Self { coords })
    }

    /// Homogenize exact affine coordinates (x_1, ..., x_N) to the primitive
    /// vector (b, a_1, ..., a_N) with x_i = a_i / b and b > 0.
    pub fn from_affine(xs: &[BigRational]) -> Result<Self, HeightError> {
        let mut b = BigInt::from(1);
        for x in xs {
            b = b.lcm(x.denom());
        }
        let mut coords = Vec::with_capacity(xs.len() + 1);
        coords.push(b.clone());
        for x in xs {
            coords.push(x.numer() * (&b / x.denom()));
        }
        Self::new(coords)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Exact affine dehomogenization; None when the point is at infinity.
    pub fn to_affine(&self) -> Option<Vec<BigRational>> {
        if self.coords[0].is_zero() {
            return None;
        }
        Some(
            self.coords[1..]
                .iter()
                .map(|a| BigRational::new(a.clone(), self.coords[0].clone()))
                .collect(),
        )
    }

    /// (h_fs, h_max): the Fubini–Study (Arakelov) height log ||a||_2 and the
    /// max-norm Weil height log max |a_i|.
    pub fn height(&self) -> (f64, f64) {
        let mut sq = BigInt::zero();
        let mut max = BigInt::zero();
        for c in &self.coords {
            sq += c * c;
            let a = c.abs();
            if a > max {
                max = a;
            }
        }
        (0.5 * ln_big(&sq), ln_big(&max))
    }
}

/// Outcome of a Liouville inequality check at one (section, point) pair.
#[derive(Debug, Clone, Serialize)]
pub struct LiouvilleReport {
    pub log_norm: f64,
    /// -(d h_fs + log+ ||s||_sup,sampled)
    pub rhs: f64,
    pub margin: f64,
    pub vanishing: bool,
}

/// Check log ||s||(p) >= -(d h_fs(p) + log+ ||s||_sup) with the sup norm
/// replaced by a sampled maximum (a lower bound of the true sup, which makes
/// the inequality check conservative).
pub fn liouville_check(
    s: &PolynomialSection,
    p: &RationalPoint,
    sup_samples: usize,
    seed: u64,
) -> Result<LiouvilleReport, HeightError> {
    if !s.has_integer_coefficients() {
        return Err(HeightError::NonIntegerSection);
    }
    let coords: Vec<BigRational> =
        p.coords().iter().map(|c| BigRational::from(c.clone())).collect();
    let value = s.eval_rational(&coords)?;
    if value.is_zero() {
        return Ok(LiouvilleReport { log_norm: f64::NEG_INFINITY, rhs: 0.0, margin: 0.0, vanishing: true });
    }
    let (h_fs, _) = p.height();
    let d = s.degree() as f64;
    // value is a nonzero integer here (integer coefficients at integer coords)
    let log_abs = ln_big(&value.numer().abs()) - ln_big(&value.denom().abs());
    let log_norm = log_abs - d * h_fs;
    let log_plus_sup = s.sup_norm_sampled(sup_samples, seed).ln().max(0.0);
    let rhs = -(d * h_fs + log_plus_sup);
    Ok(LiouvilleReport { log_norm, rhs, margin: log_norm - rhs, vanishing: false })
}

/// An enumerated rational point on a curve locus with its heights.
#[derive(Debug, Clone, Serialize)]
pub struct HeightedPoint {
    pub point: RationalPoint,
    pub w_num: BigInt,
    pub w_den: BigInt,
    pub h_fs: f64,
    pub h_max: f64,
}

impl HeightedPoint {
    pub fn w(&self) -> BigRational {
        BigRational::new(self.w_num.clone(), self.w_den.clone())
    }

    pub fn csv_header(n_coords: usize) -> String {
        let mut h = String::from("w_num,w_den");
        for i in 0..n_coords {
            h.push_str(&format!(",c{i}"));
        }
        h.push_str(",h_fs,h_max");
        h
    }

    pub fn to_csv_row(&self) -> String {
        let coords: Vec<String> = self.point.coords().iter().map(|c| c.to_string()).collect();
        format!(
            "{},{},{},{},{}",
            self.w_num,
            self.w_den,
            coords.join(","),
            self.h_fs,
            self.h_max
        )
    }
}

/// The set S_phi(r, H) plus the count of candidates excluded by E_r.
#[derive(Debug, Clone, Serialize)]
pub struct Enumeration {
    pub points: Vec<HeightedPoint>,
    pub excluded: usize,
}

/// Enumerate S_phi(r, H) exactly.
///
/// Completeness: h_fs(phi(q)) >= h_max(q) = log max(|a|, b) for q = a/b in
/// lowest terms (the parameter is one affine coordinate of the image), so
/// every member has max(|a|, b) <= exp(H). The scan is over that finite
/// candidate set with the exact height filter.
pub fn enumerate_points(
    curve: &EntireCurve,
    r: f64,
    h_budget: f64,
    e_r: Option<&DiskSet>,
) -> Result<Enumeration, HeightError> {
    let locus = curve.rational_locus().ok_or(HeightError::NoRationalLocus)?;
    let mut points = Vec::new();
    let mut excluded = 0usize;
    if h_budget < 0.0 {
        return Ok(Enumeration { points, excluded });
    }
    let bound = h_budget.exp().floor() as u64;
    for height in 1..=bound {
        for q in crate::curve::rationals_of_height(height) {
            let qf = q.to_f64().unwrap();
            if qf.abs() >= r {
                continue;
            }
            if let Some(set) = e_r {
                if set.contains(num_complex::Complex64::new(qf, 0.0)) {
                    excluded += 1;
                    continue;
                }
            }
            // certified pruning: when the image denominator provably
            // exceeds the budget the point height does too
            if locus.series().denominator_exceeds(&q, h_budget + 1e-9) {
                continue;
            }
            let (x, y) = locus.point(&q);
            let point = RationalPoint::from_affine(&[x, y])?;
            let (h_fs, h_max) = point.height();
            if h_fs <= h_budget + 1e-12 {
                points.push(HeightedPoint {
                    point,
                    w_num: q.numer().clone(),
                    w_den: q.denom().clone(),
                    h_fs,
                    h_max,
                });
            }
        }
    }
    Ok(Enumeration { points, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Ambient, CoefficientPattern};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rp(cs: &[i64]) -> RationalPoint {
        RationalPoint::new(cs.iter().map(|&c| BigInt::from(c)).collect()).unwrap()
    }

    #[test]
    fn pruned_enumeration_matches_exact_scan() {
        // heights where the denominator certificate is active but a fully
        // exact scan is still affordable
        let phi = EntireCurve::build_rational_curve(1, CoefficientPattern::default());
        let locus = phi.rational_locus().unwrap();
        let h = 14.0f64.ln();
        let pruned = enumerate_points(&phi, 2.0, h, None).unwrap();
        let mut oracle = 0usize;
        for height in 1..=14u64 {
            for q in crate::curve::rationals_of_height(height) {
                if q.to_f64().unwrap().abs() >= 2.0 {
                    continue;
                }
                let (x, y) = locus.point(&q);
                let p = RationalPoint::from_affine(&[x, y]).unwrap();
                if p.height().0 <= h + 1e-12 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(pruned.points.len(), oracle);
    }

    #[test]
    fn unit_point_has_zero_height() {
        let (h_fs, h_max) = rp(&[1, 0, 0]).height();
        assert_eq!(h_fs, 0.0);
        assert_eq!(h_max, 0.0);
    }

    #[test]
    fn half_in_p1() {
        // affine 1/2 -> [2 : 1]
        let p = RationalPoint::from_affine(&[BigRational::new(1.into(), 2.into())]).unwrap();
        assert_eq!(p.coords(), &[BigInt::from(2), BigInt::from(1)]);
        let (h_fs, h_max) = p.height();
        assert_abs_diff_eq!(h_max, 2.0f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(h_fs, 0.5 * 5.0f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn affine_pair_common_denominator() {
        // (1/2, 1/3) -> primitive (6, 3, 2)
        let p = RationalPoint::from_affine(&[
            BigRational::new(1.into(), 2.into()),
            BigRational::new(1.into(), 3.into()),
        ])
        .unwrap();
        assert_eq!(p.coords(), &[BigInt::from(6), BigInt::from(3), BigInt::from(2)]);
        let (_, h_max) = p.height();
        assert_abs_diff_eq!(h_max, 6.0f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn primitivity_normalization() {
        let p = RationalPoint::new(vec![BigInt::from(-4), BigInt::from(6)]).unwrap();
        assert_eq!(p.coords(), &[BigInt::from(2), BigInt::from(-3)]);
        assert!(RationalPoint::new(vec![BigInt::zero()]).is_err());
    }

    #[test]
    fn ln_big_handles_huge_integers() {
        let x = BigInt::from(10).pow(400u32);
        assert_abs_diff_eq!(ln_big(&x), 400.0 * 10f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn liouville_sharp_fixture() {
        // s = x_1, p = [2 : 1]: log ||s|| = -(1/2) log 5 = -(d h_fs), and the
        // sampled sup of a coordinate section is <= 1 so log+ = 0: margin 0.
        let s = PolynomialSection::linear(Ambient::Projective(2), &[0, 1]).unwrap();
        let rep = liouville_check(&s, &rp(&[2, 1]), 2000, 0).unwrap();
        assert!(!rep.vanishing);
        assert_abs_diff_eq!(rep.log_norm, -0.5 * 5.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(rep.margin, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn liouville_trivial_fixture() {
        // s = x_0 at [1 : 0]: value 1, h = 0, margin 0
        let s = PolynomialSection::linear(Ambient::Projective(2), &[1, 0]).unwrap();
        let rep = liouville_check(&s, &rp(&[1, 0]), 2000, 0).unwrap();
        assert_abs_diff_eq!(rep.log_norm, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.margin, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn liouville_vanishing_reported() {
        let s = PolynomialSection::linear(Ambient::Projective(2), &[0, 1]).unwrap();
        let rep = liouville_check(&s, &rp(&[1, 0]), 100, 0).unwrap();
        assert!(rep.vanishing);
    }

    #[test]
    fn liouville_random_sweep_no_violations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let d = rng.gen_range(1..=3u32);
            let basis = crate::curve::monomial_basis(Ambient::Projective(3), d);
            let coeffs: Vec<BigRational> = basis
                .iter()
                .map(|_| BigRational::from(BigInt::from(rng.gen_range(-9..=9i64))))
                .collect();
            let Ok(s) = PolynomialSection::from_coefficients(Ambient::Projective(3), d, &coeffs)
            else {
                continue;
            };
            for _ in 0..100 {
                let p = RationalPoint::new(vec![
                    BigInt::from(rng.gen_range(-20..=20i64)),
                    BigInt::from(rng.gen_range(-20..=20i64)),
                    BigInt::from(rng.gen_range(1..=20i64)),
                ])
                .unwrap();
                let rep = liouville_check(&s, &p, 500, trial).unwrap();
                if !rep.vanishing {
                    assert!(rep.margin >= -1e-10, "violation: margin {}", rep.margin);
                }
            }
        }
    }

    #[test]
    fn enumerate_small_budget_matches_brute_force() {
        let phi = EntireCurve::build_rational_curve(1, CoefficientPattern::default());
        let e = enumerate_points(&phi, 1.0, 2.0f64.ln(), None).unwrap();
        // independent oracle: scan with a doubled candidate bound
        let locus = phi.rational_locus().unwrap();
        let mut oracle = 0usize;
        for height in 1..=4u64 {
            for q in crate::curve::rationals_of_height(height) {
                if q.to_f64().unwrap().abs() >= 1.0 {
                    continue;
                }
                let (x, y) = locus.point(&q);
                let p = RationalPoint::from_affine(&[x, y]).unwrap();
                if p.height().0 <= 2.0f64.ln() + 1e-12 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(e.points.len(), oracle);
        assert_eq!(e.excluded, 0);
    }

    #[test]
    fn enumerate_negative_budget_empty() {
        let phi = EntireCurve::build_rational_curve(1, CoefficientPattern::default());
        let e = enumerate_points(&phi, 2.0, -0.5, None).unwrap();
        assert!(e.points.is_empty());
    }

    #[test]
    fn enumerate_monotone_in_r_and_h() {
        let phi = EntireCurve::build_rational_curve(1, CoefficientPattern::default());
        let small = enumerate_points(&phi, 0.8, 1.0, None).unwrap();
        let larger = enumerate_points(&phi, 1.5, 1.6, None).unwrap();
        use std::collections::HashSet;
        let key = |p: &HeightedPoint| (p.w_num.to_string(), p.w_den.to_string());
        let big: HashSet<_> = larger.points.iter().map(key).collect();
        for p in &small.points {
            assert!(big.contains(&key(p)), "lost point {}/{}", p.w_num, p.w_den);
        }
    }

    #[test]
    fn missing_locus_is_capability_error() {
        let phi = EntireCurve::exp_affine();
        assert!(matches!(
            enumerate_points(&phi, 1.0, 1.0, None),
            Err(HeightError::NoRationalLocus)
        ));
    }

    proptest! {
        #[test]
        fn height_sandwich(cs in proptest::collection::vec(-1000i64..1000, 2..6)) {
            prop_assume!(cs.iter().any(|&c| c != 0));
            let p = RationalPoint::new(cs.iter().map(|&c| BigInt::from(c)).collect()).unwrap();
            let n = p.coords().len();
            let (h_fs, h_max) = p.height();
            prop_assert!(h_max <= h_fs + 1e-12);
            prop_assert!(h_fs <= h_max + 0.5 * (n as f64).ln() + 1e-12);
        }

        #[test]
        fn coordinate_height_below_point_height(
            a in -10_000i64..10_000,
            b in 1i64..10_000,
        ) {
            // the enumeration-completeness lemma: for q = a/b reduced, the
            // image point (q, f(q)) has h_fs >= log max(|a|, b)
            let q = BigRational::new(BigInt::from(a), BigInt::from(b));
            let f_q = BigRational::new(BigInt::from(a % 97), BigInt::from(1 + (b % 89)));
            let p = RationalPoint::from_affine(&[q.clone(), f_q]).unwrap();
            let (h_fs, _) = p.height();
            let coord_h = crate::curve::rational_height(&q) as f64;
            prop_assert!(h_fs >= coord_h.ln() - 1e-12);
        }
    }
}
