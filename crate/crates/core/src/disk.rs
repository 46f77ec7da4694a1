//! Exact-formula kernels on disks and the constructions built from them.
//!
//! Contains the Green function `g_r(w0; z) = log|(r^2 - z conj(w0)) / (r (z - w0))|`,
//! the Poisson weight it induces on the boundary circle, the hyperbolic
//! (pseudo-)distance `d_{r1}(z, w) = |r1 (z - w) / (r1^2 - z conj(w))|`,
//! greedy hyperbolic coverings, and the Boutroux–Cartan exceptional-set
//! construction for atomic logarithmic potentials.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("point with |z| = {modulus} lies outside the closed disk of radius {radius}")]
    OutsideDisk { modulus: f64, radius: f64 },
    #[error("base point with |w0| = {modulus} must lie strictly inside the disk of radius {radius}")]
    BasePointOutside { modulus: f64, radius: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Green kernel of the disk of radius `r` with pole at `w0`, `|w0| < r`.
#[derive(Debug, Clone, Copy)]
pub struct GreenKernel {
    radius: f64,
    base_point: Complex64,
}

impl GreenKernel {
    pub fn new(radius: f64, base_point: Complex64) -> Result<Self, DiskError> {
        if !(radius > 0.0) {
            return Err(DiskError::InvalidParameter(format!("radius {radius} must be positive")));
        }
        if base_point.norm() >= radius {
            return Err(DiskError::BasePointOutside { modulus: base_point.norm(), radius });
        }
        Ok(Self { radius, base_point })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn base_point(&self) -> Complex64 {
        self.base_point
    }

    /// `g_r(w0; z)`. Returns `+inf` exactly at the pole `z = w0`.
    ///
    /// The value is clamped at zero: the closed formula is nonnegative on the
    /// closed disk, and roundoff on the boundary must not produce `-1e-17`.
    pub fn green(&self, z: Complex64) -> Result<f64, DiskError> {
        let r = self.radius;
        // Tolerate boundary roundoff when the caller hands us r*e^{i t}.
        if z.norm() > r * (1.0 + 1e-12) {
            return Err(DiskError::OutsideDisk { modulus: z.norm(), radius: r });
        }
        if z == self.base_point {
            return Ok(f64::INFINITY);
        }
        let num = r * r - z * self.base_point.conj();
        let den = r * (z - self.base_point);
        let v = (num.norm() / den.norm()).ln();
        Ok(v.max(0.0))
    }

    /// Density of the Poisson measure `mu_{w0,r}` against `dtheta / 2pi`:
    /// `Re((z + w0)/(z - w0))` with `z = r e^{i theta}`. Strictly positive.
    pub fn poisson_weight(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(self.radius, theta);
        ((z + self.base_point) / (z - self.base_point)).re
    }
}

/// Hyperbolic pseudo-distance on the open disk of radius `r1`.
pub fn hyperbolic_distance(r1: f64, z: Complex64, w: Complex64) -> Result<f64, DiskError> {
    if !(r1 > 0.0) {
        return Err(DiskError::InvalidParameter(format!("disk radius {r1} must be positive")));
    }
    for p in [z, w] {
        if p.norm() >= r1 {
            return Err(DiskError::OutsideDisk { modulus: p.norm(), radius: r1 });
        }
    }
    Ok((r1 * (z - w) / (Complex64::new(r1 * r1, 0.0) - z * w.conj())).norm())
}

/// Hyperbolic diameter of a finite point set: sup of pairwise distances.
/// Zero for empty and singleton sets.
pub fn diam(r1: f64, points: &[Complex64]) -> Result<f64, DiskError> {
    let mut best = 0.0f64;
    for (i, &z) in points.iter().enumerate() {
        for &w in &points[i + 1..] {
            best = best.max(hyperbolic_distance(r1, z, w)?);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskSetLabel {
    Covering,
    Exceptional,
}

/// One euclidean disk. Hyperbolic balls are stored in this form too: a
/// hyperbolic ball of the disk model is a euclidean disk.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Disk {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

impl Disk {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center()).norm() <= self.radius
    }
}

/// Finite union of disks: Cartan exceptional sets and hyperbolic coverings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiskSet {
    pub label: DiskSetLabel,
    pub disks: Vec<Disk>,
}

impl DiskSet {
    pub fn new(label: DiskSetLabel, disks: Vec<Disk>) -> Result<Self, DiskError> {
        if disks.iter().any(|d| !(d.radius > 0.0)) {
            return Err(DiskError::InvalidParameter("all radii must be positive".into()));
        }
        Ok(Self { label, disks })
    }

    /// Sum of radii, recomputed from the stored disks.
    pub fn radii_sum(&self) -> f64 {
        self.disks.iter().map(|d| d.radius).sum()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.disks.iter().any(|d| d.contains(z))
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }
}

/// Atomic Borel measure: finitely many nonnegative point masses.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    atoms: Vec<(Complex64, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(Complex64, f64)>) -> Result<Self, DiskError> {
        if atoms.iter().any(|&(_, m)| !(m >= 0.0)) {
            return Err(DiskError::InvalidParameter("all masses must be nonnegative".into()));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).sum()
    }

    /// Smallest disk around the centroid containing every atom.
    pub fn bounding_disk(&self) -> Disk {
        if self.atoms.is_empty() {
            return Disk { re: 0.0, im: 0.0, radius: 1.0 };
        }
        let n = self.atoms.len() as f64;
        let c = self.atoms.iter().map(|&(z, _)| z).sum::<Complex64>() / n;
        let radius = self
            .atoms
            .iter()
            .map(|&(z, _)| (z - c).norm())
            .fold(0.0f64, f64::max)
            .max(1e-12);
        Disk { re: c.re, im: c.im, radius }
    }
}

/// Logarithmic potential `V(z) = sum_i m_i log|z - zeta_i|`.
/// Returns `-inf` exactly when `z` coincides with an atom of positive mass.
pub fn cartan_potential(mu: &AtomicMeasure, z: Complex64) -> f64 {
    let mut v = 0.0;
    for &(zeta, m) in mu.atoms() {
        if m == 0.0 {
            continue;
        }
        let d = (z - zeta).norm();
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        v += m * d.ln();
    }
    v
}

/// Boutroux–Cartan exceptional set: disks with `radii_sum <= 5 H` such that
/// `V(z) > M log H` outside the union.
///
/// Construction: iterative disk selection with p running from n (atom count)
/// down to 1. At stage p we look for a disk of radius `2 p H / n` centered at
/// an atom capturing at least `p M / n` of the not-yet-covered mass; selected
/// disks are inflated by 3/2. Every selected disk captures the mass it was
/// chosen for, so the selected radii sum to at most `2H` and the inflated ones
/// to at most `3H`. Atoms left uncovered receive a guard disk of radius
/// `H * max(m_i / M, 1/n)`, another `2H` in total.
pub fn cartan_exceptional(mu: &AtomicMeasure, h: f64) -> Result<DiskSet, DiskError> {
    if !(h > 0.0 && h < 1.0) {
        return Err(DiskError::InvalidParameter(format!("H = {h} must lie in (0, 1)")));
    }
    let total = mu.total_mass();
    if !(total > 0.0) {
        return Err(DiskError::InvalidParameter("measure must have positive total mass".into()));
    }
    let atoms = mu.atoms();
    let n = atoms.len();
    let mut remaining: Vec<f64> = atoms.iter().map(|&(_, m)| m).collect();
    let mut disks: Vec<Disk> = Vec::new();

    for p in (1..=n).rev() {
        let radius = 2.0 * p as f64 * h / n as f64;
        let threshold = p as f64 * total / n as f64;
        loop {
            // Best candidate disk centered at an atom that still carries mass.
            let mut best: Option<(usize, f64)> = None;
            for (i, &(center, _)) in atoms.iter().enumerate() {
                if remaining[i] == 0.0 {
                    continue;
                }
                let captured: f64 = atoms
                    .iter()
                    .enumerate()
                    .filter(|(j, &(z, _))| remaining[*j] > 0.0 && (z - center).norm() <= radius)
                    .map(|(j, _)| remaining[j])
                    .sum();
                if captured >= threshold && best.map_or(true, |(_, b)| captured > b) {
                    best = Some((i, captured));
                }
            }
            let Some((idx, _)) = best else { break };
            let center = atoms[idx].0;
            for (j, &(z, _)) in atoms.iter().enumerate() {
                if (z - center).norm() <= radius {
                    remaining[j] = 0.0;
                }
            }
            disks.push(Disk { re: center.re, im: center.im, radius: 1.5 * radius });
        }
    }

    // Guard disks around atoms the selection never covered: the potential
    // tends to -inf at every atom, so each one needs a protective radius.
    for (i, &(z, m)) in atoms.iter().enumerate() {
        if remaining[i] > 0.0 && m > 0.0 {
            let covered = disks.iter().any(|d| d.contains(z));
            if !covered {
                let radius = h * (m / total).max(1.0 / n as f64);
                disks.push(Disk { re: z.re, im: z.im, radius });
            }
        }
    }

    DiskSet::new(DiskSetLabel::Exceptional, disks)
}

/// Covering of the disk of radius `r` by hyperbolic balls of
/// `diam_{(1+epsilon) r} <= alpha`, with at most `ceil(5/(alpha^2 epsilon)) + 1`
/// balls.
///
/// Greedy maximal packing at hyperbolic scale alpha/2 over a fine polar grid
/// of the disk, in deterministic scan order; any maximal packing of that
/// scale doubles to a covering within the stated bound.
pub fn cover_disk(r: f64, epsilon: f64, alpha: f64) -> Result<DiskSet, DiskError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DiskError::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if !(epsilon > 0.0) || !(r > 0.0) {
        return Err(DiskError::InvalidParameter("epsilon and r must be positive".into()));
    }
    let r1 = (1.0 + epsilon) * r;
    // Ball radius rho with hyperbolic diameter exactly alpha: the strong
    // triangle inequality gives diam B(c, rho) <= 2 rho / (1 + rho^2).
    let rho = (1.0 - (1.0 - alpha * alpha).sqrt()) / alpha;
    let pack = alpha / 2.0;

    let mut centers: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    let n_rad = 700usize;
    for i in 1..=n_rad {
        let s = r * i as f64 / (n_rad as f64 + 0.5);
        let n_ang = ((2.0 * std::f64::consts::PI * i as f64).ceil() as usize).max(8);
        for k in 0..n_ang {
            let z = Complex64::from_polar(s, 2.0 * std::f64::consts::PI * k as f64 / n_ang as f64);
            let separated = centers
                .iter()
                .all(|&c| hyperbolic_distance(r1, z, c).unwrap_or(1.0) > pack);
            if separated {
                centers.push(z);
            }
        }
    }

    let disks = centers.iter().map(|&c| hyperbolic_ball_to_disk(r1, c, rho)).collect();
    DiskSet::new(DiskSetLabel::Covering, disks)
}

/// Euclidean disk equal to the hyperbolic ball `{w : d_{r1}(c, w) <= rho}`.
pub fn hyperbolic_ball_to_disk(r1: f64, center: Complex64, rho: f64) -> Disk {
    let a = center / r1; // unit-disk model
    let t = 1.0 - rho * rho * a.norm_sqr();
    let c = a * (1.0 - rho * rho) / t;
    let radius = rho * (1.0 - a.norm_sqr()) / t;
    Disk { re: r1 * c.re, im: r1 * c.im, radius: r1 * radius }
}
