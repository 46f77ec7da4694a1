//! Desk-scale Siegel lemma over the integers and auxiliary polynomials
//! vanishing on prescribed rational point sets.
//!
//! The kernel search is exact: fraction-free elimination for a kernel basis,
//! then iterated pairwise size reduction (norm-decreasing swaps), then the
//! smallest sup-norm basis vector. No floating point touches the arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curve::{monomial_basis, Ambient, PolynomialSection};
use crate::heights::{ln_big, HeightedPoint, RationalPoint};

#[derive(Debug, Error)]
pub enum SiegelError {
    #[error("slope of an empty weight list is undefined")]
    EmptyWeights,
    #[error("evaluation system is injective: no nonzero kernel vector")]
    Injective,
    #[error("{points} points exceed the (1-alpha) budget {max}; increase the degree")]
    TooManyPoints { points: usize, max: usize },
    #[error(transparent)]
    Section(#[from] crate::curve::SectionError),
    #[error(transparent)]
    Height(#[from] crate::heights::HeightError),
}

/// Maximum slope of a weighted direct sum of rank-1 pieces: the largest
/// weight. Weights are d * h_fs(point) for the restriction-map systems.
pub fn slope_max(weights: &[f64]) -> Result<f64, SiegelError> {
    if weights.is_empty() {
        return Err(SiegelError::EmptyWeights);
    }
    Ok(weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// The restriction map from degree-d sections to values at a point list,
/// as an exact integer matrix over the monomial basis.
#[derive(Debug, Clone)]
pub struct EvaluationSystem {
    ambient: Ambient,
    degree: u32,
    basis: Vec<Vec<u32>>,
    points: Vec<RationalPoint>,
    /// rows = points, columns = monomials; integer because the points are in
    /// primitive integer coordinates
    matrix: Vec<Vec<BigInt>>,
}

impl EvaluationSystem {
    pub fn new(ambient: Ambient, degree: u32, points: Vec<RationalPoint>) -> Self {
        let basis = monomial_basis(ambient, degree);
        let matrix = points
            .iter()
            .map(|p| {
                basis
                    .iter()
                    .map(|exps| {
                        let mut v = BigInt::one();
                        for (c, &e) in p.coords().iter().zip(exps) {
                            for _ in 0..e {
                                v *= c;
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        Self { ambient, degree, basis, points, matrix }
    }

    pub fn monomials(&self) -> usize {
        self.basis.len()
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// log of the largest entry magnitude (the "generated by elements of sup
    /// norm <= C" constant of the scaled system).
    pub fn log_c(&self) -> f64 {
        let mut max = BigInt::one();
        for row in &self.matrix {
            for e in row {
                let a = e.abs();
                if a > max {
                    max = a;
                }
            }
        }
        ln_big(&max)
    }

    /// Exact A v for an integer coefficient vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Exact kernel basis as primitive integer vectors, via Gaussian
    /// elimination over the rationals.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let rows = self.matrix.len();
        let cols = self.basis.len();
        let mut m: Vec<Vec<BigRational>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|e| BigRational::from(e.clone())).collect())
            .collect();
        let mut pivot_col = vec![usize::MAX; rows];
        let mut rank = 0;
        for col in 0..cols {
            let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(rank, pr);
            let lead = m[rank][col].clone();
            for c in col..cols {
                m[rank][c] /= &lead;
            }
            for r in 0..rows {
                if r != rank && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..cols {
                        let s = &f * &m[rank][c];
                        m[r][c] -= s;
                    }
                }
            }
            pivot_col[rank] = col;
            rank += 1;
            if rank == rows {
                break;
            }
        }
        let pivots: Vec<usize> = pivot_col[..rank].to_vec();
        let is_pivot = |c: usize| pivots.contains(&c);
        let mut out = Vec::new();
        for free in 0..cols {
            if is_pivot(free) {
                continue;
            }
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            // clear denominators and reduce to a primitive vector
            let mut den = BigInt::one();
            for x in &v {
                den = den.lcm(x.denom());
            }
            let mut iv: Vec<BigInt> =
                v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
            let mut g = BigInt::zero();
            for x in &iv {
                g = g.gcd(x);
            }
            if !g.is_zero() && !g.is_one() {
                for x in iv.iter_mut() {
                    *x = &*x / &g;
                }
            }
            out.push(iv);
        }
        out
    }
}

fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairwise Lagrange-style size reduction of an integer basis: repeatedly
/// replace v_i by v_i - round(<v_i, v_j>/<v_j, v_j>) v_j while the Euclidean
/// norm strictly decreases.
fn size_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let norm2 = |v: &[BigInt]| dot(v, v);
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds < 64 {
        changed = false;
        rounds += 1;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let nj = norm2(&basis[j]);
                if nj.is_zero() {
                    continue;
                }
                let d = dot(&basis[i], &basis[j]);
                // rounded quotient d / nj
                let two = BigInt::from(2);
                let q = (&two * &d + &nj).div_floor(&(&two * &nj));
                if q.is_zero() {
                    continue;
                }
                let cand: Vec<BigInt> = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(a, b)| a - &q * b)
                    .collect();
                if norm2(&cand) < norm2(&basis[i]) && cand.iter().any(|x| !x.is_zero()) {
                    basis[i] = cand;
                    changed = true;
                }
            }
        }
    }
}

/// Audit constant for the Siegel bound; violations are reported, not fatal.
pub const A_IMPL: f64 = 10.0;

/// A small kernel vector with its bound audit.
#[derive(Debug, Clone, Serialize)]
pub struct SiegelOutcome {
    pub vector: Vec<BigInt>,
    pub log_sup: f64,
    /// (m/n) log C^2 + (m/n - 1) mu_max + 3 log n + A_IMPL
    pub bound: f64,
    pub kernel_rank: usize,
    pub within_bound: bool,
}

/// Smallest kernel vector of the system found by exact elimination plus size
/// reduction. `mu_max` is the maximal slope of the target (weights d h_fs).
pub fn siegel_small_kernel(
    system: &EvaluationSystem,
    mu_max: f64,
) -> Result<SiegelOutcome, SiegelError> {
    let mut basis = system.kernel_basis();
    if basis.is_empty() {
        return Err(SiegelError::Injective);
    }
    size_reduce(&mut basis);
    let best = basis
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .min_by_key(|v| sup_norm(v))
        .expect("kernel basis vectors are nonzero")
        .clone();
    debug_assert!(system.apply(&best).iter().all(|x| x.is_zero()));
    let m = system.monomials() as f64;
    let n = basis.len() as f64;
    let sup = sup_norm(&best);
    let log_sup = if sup.is_one() { 0.0 } else { ln_big(&sup) };
    let bound = (m / n) * 2.0 * system.log_c() + (m / n - 1.0) * mu_max + 3.0 * n.ln() + A_IMPL;
    Ok(SiegelOutcome {
        vector: best,
        log_sup,
        bound,
        kernel_rank: basis.len(),
        within_bound: log_sup <= bound,
    })
}

/// An integer-coefficient section vanishing exactly on a point set.
#[derive(Debug, Clone, Serialize)]
pub struct AuxPolynomial {
    pub section: PolynomialSection,
    pub log_sup_norm: f64,
    pub vanishing: Vec<RationalPoint>,
    /// log_sup_norm / (d * max h_fs): the empirical C_3 of the budget
    pub c3_ratio: f64,
    pub siegel: SiegelOutcome,
}

impl AuxPolynomial {
    /// Exact vanishing check at every recorded point.
    pub fn verify_vanishing(&self) -> bool {
        self.vanishing.iter().all(|p| {
            let coords: Vec<BigRational> =
                p.coords().iter().map(|c| BigRational::from(c.clone())).collect();
            self.section.eval_rational(&coords).map(|v| v.is_zero()).unwrap_or(false)
        })
    }
}

/// Build a degree-d integer section vanishing on the given points, via the
/// Siegel kernel of the restriction map. Requires
/// #points <= (1 - alpha) * #monomials.
pub fn build_aux_polynomial(
    points: &[HeightedPoint],
    ambient: Ambient,
    d: u32,
    alpha: f64,
) -> Result<AuxPolynomial, SiegelError> {
    assert!((0.0..=0.5).contains(&alpha) && alpha > 0.0);
    let m = monomial_basis(ambient, d).len();
    let max = ((1.0 - alpha) * m as f64).floor() as usize;
    if points.len() > max {
        return Err(SiegelError::TooManyPoints { points: points.len(), max });
    }
    let rational_points: Vec<RationalPoint> = points.iter().map(|p| p.point.clone()).collect();
    let system = EvaluationSystem::new(ambient, d, rational_points.clone());
    let h_max = points.iter().map(|p| p.h_fs).fold(0.0, f64::max);
    let mu_max = d as f64 * h_max;
    let outcome = siegel_small_kernel(&system, mu_max)?;
    let coeffs: Vec<BigRational> =
        outcome.vector.iter().map(|c| BigRational::from(c.clone())).collect();
    let section = PolynomialSection::from_coefficients(ambient, d, &coeffs)?;
    let log_sup_norm = section.sup_norm_sampled(4096, 0).ln();
    let c3_ratio = if mu_max > 0.0 { log_sup_norm.max(0.0) / mu_max } else { f64::NAN };
    let aux = AuxPolynomial {
        section,
        log_sup_norm,
        vanishing: rational_points,
        c3_ratio,
        siegel: outcome,
    };
    debug_assert!(aux.verify_vanishing());
    Ok(aux)
}

/// One degree's Gromov comparison data.
#[derive(Debug, Clone, Serialize)]
pub struct GromovReport {
    pub degree: u32,
    /// per-trial log(sup / L2) >= 0 since both norms come from the same
    /// normalized sample set
    pub log_ratios: Vec<f64>,
    pub all_l2_below_sup: bool,
}

/// Compare sampled sup and L2 norms of random integer sections on P^2 with
/// the Fubini–Study probability measure. Both norms use the same sample set,
/// so L2 <= sup holds structurally; the reported content is the ratio growth.
pub fn gromov_check(d: u32, trials: usize, samples: usize, seed: u64) -> GromovReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ambient = Ambient::Projective(3);
    let basis = monomial_basis(ambient, d);
    let mut log_ratios = Vec::with_capacity(trials);
    let mut all_ok = true;
    for trial in 0..trials {
        let coeffs: Vec<BigRational> = basis
            .iter()
            .map(|_| BigRational::from(BigInt::from(rng.gen_range(-9..=9i64))))
            .collect();
        let Ok(s) = PolynomialSection::from_coefficients(ambient, d, &coeffs) else {
            continue;
        };
        // shared deterministic sample set per trial
        let mut srng =
            rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9e37));
        let mut sup: f64 = f64::NEG_INFINITY;
        let mut sq_sum = 0.0;
        let mut count = 0usize;
        let mut gauss = || {
            let u1: f64 = srng.gen_range(1e-12..1.0);
            let u2: f64 = srng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        for _ in 0..samples {
            let coords = [
                num_complex::Complex64::new(gauss(), gauss()),
                num_complex::Complex64::new(gauss(), gauss()),
                num_complex::Complex64::new(gauss(), gauss()),
            ];
            if let Ok(v) = s.fs_norm(&coords) {
                sup = sup.max(v);
                sq_sum += v * v;
                count += 1;
            }
        }
        let l2 = (sq_sum / count as f64).sqrt();
        if l2 > sup {
            all_ok = false;
        }
        log_ratios.push((sup / l2).ln());
    }
    GromovReport { degree: d, log_ratios, all_l2_below_sup: all_ok }
}
