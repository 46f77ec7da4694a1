//! End-to-end counting experiments: C_phi(r, H) tables, exponential-bound
//! envelopes, the small-diameter vanishing test, and polynomial windows with
//! subgeometric-chain detection.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{Ambient, CurveKind, EntireCurve};
use crate::disk::{hyperbolic_distance, DiskSet};
use crate::heights::{enumerate_points, HeightedPoint};
use crate::nevanlinna::{self, NevError};
use crate::siegel::{build_aux_polynomial, AuxPolynomial, SiegelError};

#[derive(Debug, Error)]
pub enum CountError {
    #[error(transparent)]
    Nev(#[from] NevError),
    #[error(transparent)]
    Height(#[from] crate::heights::HeightError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Disk(#[from] crate::disk::DiskError),
}

/// One cell of a C_phi(r, H) table with its growth data.
#[derive(Debug, Clone, Serialize)]
pub struct CountRecord {
    pub r: f64,
    pub h: f64,
    /// T_{phi,M}(r)
    pub t_r: f64,
    /// T_{phi,M}((1+eps) r)
    pub t_scaled: f64,
    /// T_{phi,M}((2+eps) r), used by the envelope
    pub t_wide: f64,
    pub count: u64,
    pub excluded: u64,
    /// C / (T((2+eps) r) exp(eps (H + T((1+eps) r))))
    pub kappa: f64,
}

pub fn count_csv(records: &[CountRecord]) -> String {
    let mut out = String::from("r,H,T_r,T_scaled,C,excluded,kappa\n");
    for rec in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            rec.r, rec.h, rec.t_r, rec.t_scaled, rec.count, rec.excluded, rec.kappa
        ));
    }
    out
}

/// Exact C_phi(r, H) over a grid. A single enumeration at the largest cell is
/// filtered per cell, so the table is consistent by construction. Projective
/// curves get their exceptional set from the Cartan bound at each radius.
pub fn count_table(
    curve: &EntireCurve,
    r_grid: &[f64],
    h_grid: &[f64],
    epsilon: f64,
    tol: f64,
) -> Result<Vec<CountRecord>, CountError> {
    assert!(!r_grid.is_empty() && !h_grid.is_empty() && epsilon > 0.0);
    let mut radii = r_grid.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut budgets = h_grid.to_vec();
    budgets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r_max = *radii.last().unwrap();
    let h_max = *budgets.last().unwrap();
    let exceptional: Option<DiskSet> = match curve.kind() {
        CurveKind::Affine => None,
        CurveKind::Projective => {
            let (e_r, rep) = nevanlinna::projective_basepoint_bound(curve, r_max, tol)?;
            if rep.applicable {
                Some(e_r)
            } else {
                None
            }
        }
    };
    let full = enumerate_points(curve, r_max, h_max, exceptional.as_ref())?;
    // per point: |w| and h_fs decide cell membership
    let data: Vec<(f64, f64)> = full
        .points
        .iter()
        .map(|p| {
            let w = num_traits::ToPrimitive::to_f64(&p.w()).unwrap_or(f64::INFINITY);
            (w.abs(), p.h_fs)
        })
        .collect();
    let mut records = Vec::with_capacity(radii.len() * budgets.len());
    for &r in &radii {
        let t_r = nevanlinna::characteristic(curve, r, tol)?.value;
        let t_scaled = nevanlinna::characteristic(curve, (1.0 + epsilon) * r, tol)?.value;
        let t_wide = nevanlinna::characteristic(curve, (2.0 + epsilon) * r, tol)?.value;
        for &h in &budgets {
            let count = data
                .iter()
                .filter(|&&(w_abs, h_fs)| w_abs < r && h_fs <= h + 1e-12)
                .count() as u64;
            let excluded = if r == r_max { full.excluded as u64 } else { 0 };
            let envelope = t_wide * (epsilon * (h.max(0.0) + t_scaled)).exp();
            let kappa = if envelope > 0.0 { count as f64 / envelope } else { f64::NAN };
            records.push(CountRecord { r, h, t_r, t_scaled, t_wide, count, excluded, kappa });
        }
    }
    Ok(records)
}

/// Stability summary for the exponential envelope: the sup of kappa over the
/// table must not blow up relative to its bulk.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    pub max_kappa: f64,
    pub median_kappa: f64,
    /// max <= 10 * median over cells with C >= 1
    pub bounded: bool,
}

pub fn bp_envelope_check(records: &[CountRecord]) -> EnvelopeReport {
    let mut kappas: Vec<f64> = records
        .iter()
        .filter(|r| r.count >= 1 && r.kappa.is_finite())
        .map(|r| r.kappa)
        .collect();
    if kappas.is_empty() {
        return EnvelopeReport { max_kappa: 0.0, median_kappa: 0.0, bounded: true };
    }
    kappas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_kappa = *kappas.last().unwrap();
    let median_kappa = kappas[kappas.len() / 2];
    EnvelopeReport { max_kappa, median_kappa, bounded: max_kappa <= 10.0 * median_kappa }
}

/// Outcome of the small-diameter vanishing experiment.
#[derive(Debug, Clone, Serialize)]
pub enum SmallDiamStatus {
    /// no admissible region holds two or more points at these parameters
    Vacuous,
    Verified {
        witness_size: usize,
        held_out: usize,
        exact: bool,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallDiamReport {
    pub threshold: f64,
    pub t_scaled: f64,
    pub status: SmallDiamStatus,
    #[serde(skip)]
    pub aux: Option<AuxPolynomial>,
}

/// Small-diameter vanishing: find a hyperbolic region W of diameter below
/// exp(-(T((1+eps) r) + H) / d^{n-1}) holding >= 2 points of S_phi(r, H),
/// build an auxiliary degree-d polynomial from a proper subset, and verify
/// exact vanishing at every held-out point of the region.
pub fn small_diam_vanishing_test(
    curve: &EntireCurve,
    r: f64,
    h_budget: f64,
    d: u32,
    epsilon: f64,
    alpha: f64,
    tol: f64,
) -> Result<SmallDiamReport, CountError> {
    assert!(curve.kind() == CurveKind::Affine, "affine counting only");
    let n = curve.dimension().max(2);
    let t_scaled = nevanlinna::characteristic(curve, (1.0 + epsilon) * r, tol)?.value;
    let threshold = (-(t_scaled + h_budget) / (d as f64).powi(n as i32 - 1)).exp();
    let points = enumerate_points(curve, r, h_budget, None)?.points;
    let r1 = (1.0 + epsilon) * r;
    // anchor-ball selection: everything within threshold/2 of an anchor has
    // pairwise hyperbolic diameter <= threshold (the strong triangle
    // inequality gives d <= a + b)
    let locations: Vec<Complex64> = points
        .iter()
        .map(|p| Complex64::new(num_traits::ToPrimitive::to_f64(&p.w()).unwrap(), 0.0))
        .collect();
    let mut best: Vec<usize> = Vec::new();
    for (i, &anchor) in locations.iter().enumerate() {
        let mut group = vec![i];
        for (j, &z) in locations.iter().enumerate() {
            if j != i && hyperbolic_distance(r1, anchor, z)? <= threshold / 2.0 {
                group.push(j);
            }
        }
        if group.len() > best.len() {
            best = group;
        }
    }
    if best.len() < 2 {
        return Ok(SmallDiamReport { threshold, t_scaled, status: SmallDiamStatus::Vacuous, aux: None });
    }
    best.sort();
    let witness: Vec<&HeightedPoint> = best.iter().map(|&i| &points[i]).collect();
    // homogenized ambient for the section: (b, a_1, ..., a_N) coordinates
    let ambient = Ambient::Projective(curve.ambient_vars() + 1);
    let h0 = crate::curve::monomial_basis(ambient, d).len();
    let budget = ((1.0 - alpha) * h0 as f64).floor() as usize;
    let take = witness.len().saturating_sub(1).min(budget);
    let subset: Vec<HeightedPoint> = witness[..take].iter().map(|&p| p.clone()).collect();
    let held: Vec<&HeightedPoint> = witness[take..].to_vec();
    let aux = build_aux_polynomial(&subset, ambient, d, alpha)?;
    let exact = held.iter().all(|p| {
        let coords: Vec<num_rational::BigRational> = p
            .point
            .coords()
            .iter()
            .map(|c| num_rational::BigRational::from(c.clone()))
            .collect();
        aux.section
            .eval_rational(&coords)
            .map(|v| num_traits::Zero::is_zero(&v))
            .unwrap_or(false)
    });
    Ok(SmallDiamReport {
        threshold,
        t_scaled,
        status: SmallDiamStatus::Verified {
            witness_size: witness.len(),
            held_out: held.len(),
            exact,
        },
        aux: Some(aux),
    })
}

/// One table cell as seen by the window scan.
#[derive(Debug, Clone, Serialize)]
pub struct WindowEntry {
    pub r: f64,
    pub h: f64,
    /// x + y norm of (T_scaled, H)
    pub norm: f64,
    pub count: u64,
    pub member: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub gamma: f64,
    pub epsilon: f64,
    pub a: f64,
    pub entries: Vec<WindowEntry>,
    /// chains in the complement, as entry indices
    pub chains: Vec<Vec<usize>>,
    /// whether some complement chain spans the sampled norm range
    pub spanning_chain: bool,
    /// largest x+y ball around a member cell avoiding the complement and the
    /// sampled boundary (finite surrogate for "contains big disks")
    pub largest_member_disk: f64,
    pub gamma_above_headline: bool,
}

/// Detect maximal (A+1)-subgeometric chains in a set of norms: increasing
/// runs where each norm is at most (A+1) times its predecessor.
pub fn subgeometric_chains(norms: &[f64], a: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&i, &j| norms[i].partial_cmp(&norms[j]).unwrap());
    let mut used = vec![false; norms.len()];
    let mut chains = Vec::new();
    for &start in &order {
        if used[start] || norms[start] <= 0.0 {
            continue;
        }
        let mut chain = vec![start];
        used[start] = true;
        let mut cur = norms[start];
        loop {
            let next = order
                .iter()
                .copied()
                .find(|&k| !used[k] && norms[k] > cur && norms[k] <= (a + 1.0) * cur);
            match next {
                Some(k) => {
                    used[k] = true;
                    chain.push(k);
                    cur = norms[k];
                }
                None => break,
            }
        }
        chains.push(chain);
    }
    chains
}

/// Scan a count table for membership in L(phi, eps, gamma) and search the
/// complement for subgeometric chains.
pub fn window_scan(
    gamma: f64,
    epsilon: f64,
    a: f64,
    n: u32,
    table: &[CountRecord],
) -> WindowReport {
    let entries: Vec<WindowEntry> = table
        .iter()
        .map(|rec| {
            let norm = rec.t_scaled + rec.h;
            let member = (rec.count as f64) <= epsilon * norm.max(0.0).powf(gamma);
            WindowEntry { r: rec.r, h: rec.h, norm, count: rec.count, member }
        })
        .collect();
    let comp_idx: Vec<usize> =
        entries.iter().enumerate().filter(|(_, e)| !e.member).map(|(i, _)| i).collect();
    let comp_norms: Vec<f64> = comp_idx.iter().map(|&i| entries[i].norm).collect();
    let raw_chains = subgeometric_chains(&comp_norms, a);
    let chains: Vec<Vec<usize>> = raw_chains
        .iter()
        .map(|c| c.iter().map(|&k| comp_idx[k]).collect())
        .collect();
    let norms_all: Vec<f64> = entries.iter().map(|e| e.norm).collect();
    let table_min = norms_all.iter().cloned().fold(f64::INFINITY, f64::min);
    let table_max = norms_all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spanning_chain = chains.iter().any(|c| {
        let first = entries[c[0]].norm;
        let last = entries[*c.last().unwrap()].norm;
        first <= (a + 1.0) * table_min && (a + 1.0) * last >= table_max
    });
    // largest member disk in the (T_scaled, H) plane, 1-norm
    let mut largest = 0.0f64;
    for e in entries.iter().filter(|e| e.member) {
        let to_boundary = (e.norm - table_min).min(table_max - e.norm);
        let to_complement = entries
            .iter()
            .filter(|o| !o.member)
            .map(|o| (e.norm - o.norm).abs())
            .fold(f64::INFINITY, f64::min);
        largest = largest.max(to_boundary.min(to_complement));
    }
    if entries.iter().all(|e| e.member) {
        largest = table_max - table_min;
    }
    WindowReport {
        gamma,
        epsilon,
        a,
        entries,
        chains,
        spanning_chain,
        largest_member_disk: largest,
        gamma_above_headline: gamma > n as f64 / (n as f64 - 1.0),
    }
}
