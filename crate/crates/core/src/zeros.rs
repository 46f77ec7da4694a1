//! Zero localization for entire functions by winding numbers.
//!
//! The count over a disk is the winding number of the function along the
//! boundary circle; individual zeros are isolated by recursive quadrisection
//! of boxes, each step certified by a rectangle winding number, and refined
//! until the enclosure radius is below `1e-8 * r`.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZeroError {
    #[error("function vanishes on the integration path near {z} (after {attempts} jitter attempts)")]
    OnPath { z: Complex64, attempts: usize },
    #[error("winding-number tracking lost continuity at resolution {resolution} near {z}")]
    Resolution { z: Complex64, resolution: f64 },
    #[error("box subdivision exceeded depth {depth} without isolating zeros")]
    DepthExceeded { depth: usize },
}

/// An isolated zero with its multiplicity certificate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ZeroRecord {
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
    pub enclosure_radius: f64,
}

impl ZeroRecord {
    pub fn location(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Result of a disk zero count.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ZeroReport {
    pub zeros: Vec<ZeroRecord>,
    /// Winding number of the function along the boundary circle.
    pub total: u32,
    /// Radius actually used; differs from the request when a boundary zero
    /// forced a nudge.
    pub radius_used: f64,
    pub nudged: bool,
}

impl ZeroReport {
    pub fn multiplicity_sum(&self) -> u32 {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }
}

const MAX_SEGMENT_DEPTH: usize = 28;
/// Relative magnitude below which a path sample counts as "on a zero".
const PATH_ZERO_REL: f64 = 1e-13;

/// Accumulated argument change of `f` along the straight segment from `a` to
/// `b`, subdividing until each step turns by less than pi/2.
fn arg_change<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    b: Complex64,
    fa: Complex64,
    fb: Complex64,
    scale: f64,
    depth: usize,
) -> Result<f64, ZeroError> {
    let d = (fb / fa).arg();
    if d.abs() < std::f64::consts::FRAC_PI_2 {
        return Ok(d);
    }
    if depth >= MAX_SEGMENT_DEPTH {
        // a phase jump that survives this many halvings means a zero is
        // essentially on the path; let the caller move the path
        return Err(ZeroError::OnPath { z: a, attempts: 0 });
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !fm.is_finite() || fm.norm() <= scale * PATH_ZERO_REL {
        return Err(ZeroError::OnPath { z: m, attempts: 0 });
    }
    Ok(arg_change(f, a, m, fa, fm, scale, depth + 1)?
        + arg_change(f, m, b, fm, fb, scale, depth + 1)?)
}

/// Winding number of `f` along the closed polyline through `vertices`.
fn winding_polyline<F: Fn(Complex64) -> Complex64>(
    f: &F,
    vertices: &[Complex64],
) -> Result<i64, ZeroError> {
    let vals: Vec<Complex64> = vertices.iter().map(|&z| f(z)).collect();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(ZeroError::OnPath { z: vertices[0], attempts: 0 });
    }
    for (z, v) in vertices.iter().zip(&vals) {
        if v.norm() <= scale * PATH_ZERO_REL {
            return Err(ZeroError::OnPath { z: *z, attempts: 0 });
        }
    }
    let mut total = 0.0;
    let n = vertices.len();
    for i in 0..n {
        let j = (i + 1) % n;
        total += arg_change(f, vertices[i], vertices[j], vals[i], vals[j], scale, 0)?;
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 {
        return Err(ZeroError::Resolution { z: vertices[0], resolution: (w - rounded).abs() });
    }
    Ok(rounded as i64)
}

/// Winding number along the circle `|z| = r`, sampled as a polygon fine
/// enough that the adaptive refinement converges quickly.
pub fn winding_circle<F: Fn(Complex64) -> Complex64>(f: &F, r: f64) -> Result<i64, ZeroError> {
    let n = 64;
    let vertices: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    winding_polyline(f, &vertices)
}

fn winding_box<F: Fn(Complex64) -> Complex64>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
) -> Result<i64, ZeroError> {
    // Eight samples per edge so the adaptive refinement sees phase motion
    // it would alias away from the corners alone.
    const PER_EDGE: usize = 8;
    let corners = [
        Complex64::new(x0, y0),
        Complex64::new(x1, y0),
        Complex64::new(x1, y1),
        Complex64::new(x0, y1),
    ];
    let mut vertices = Vec::with_capacity(4 * PER_EDGE);
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        for k in 0..PER_EDGE {
            let t = k as f64 / PER_EDGE as f64;
            vertices.push(a + (b - a) * t);
        }
    }
    winding_polyline(f, &vertices)
}

/// Deterministic jitter sequence for split coordinates, as fractions of the
/// box side. Chosen irrational-ish so repeated boundary hits are unlikely.
const JITTER: [f64; 6] = [0.5, 0.53811, 0.46507, 0.57093, 0.42617, 0.61803];

struct BoxTask {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    winding: i64,
}

/// Count the zeros of `g` in the open disk of radius `r` with multiplicities.
///
/// The requested radius is nudged by `+1e-9 * r` (and the nudge recorded)
/// when a zero sits on the circle itself.
pub fn count_zeros<F: Fn(Complex64) -> Complex64>(
    g: F,
    r: f64,
) -> Result<ZeroReport, ZeroError> {
    assert!(r > 0.0 && r.is_finite());
    let mut radius = r;
    let mut nudged = false;
    let total = loop {
        match winding_circle(&g, radius) {
            Ok(w) => break w,
            Err(ZeroError::OnPath { z, attempts }) => {
                if attempts >= 4 {
                    return Err(ZeroError::OnPath { z, attempts });
                }
                radius += 1e-9 * r;
                nudged = true;
            }
            Err(e) => return Err(e),
        }
    };
    assert!(total >= 0, "entire function has nonnegative winding");
    let target = 1e-8 * r;
    let mut records = Vec::new();
    if total > 0 {
        // Slightly padded bounding square so the disk boundary is interior.
        let pad = radius * (1.0 + 1e-7);
        let mut stack = vec![BoxTask { x0: -pad, x1: pad, y0: -pad, y1: pad, winding: -1 }];
        let mut steps = 0usize;
        while let Some(task) = stack.pop() {
            steps += 1;
            if steps > 200_000 {
                return Err(ZeroError::DepthExceeded { depth: steps });
            }
            let winding = if task.winding >= 0 {
                task.winding
            } else {
                let mut w = None;
                // jitter by shrinking/expanding the box a hair when an edge
                // hits a zero; the containment decisions stay valid because
                // the parent winding is re-derived from the child boxes
                for (k, &j) in JITTER.iter().enumerate() {
                    let e = (j - 0.5) * 1e-3;
                    let dx = (task.x1 - task.x0) * e;
                    let dy = (task.y1 - task.y0) * e;
                    match winding_box(&g, task.x0 - dx, task.x1 + dx, task.y0 - dy, task.y1 + dy)
                    {
                        Ok(v) => {
                            w = Some(v);
                            break;
                        }
                        Err(ZeroError::OnPath { z, .. }) if k + 1 < JITTER.len() => {
                            let _ = z;
                        }
                        Err(e) => return Err(e),
                    }
                }
                w.expect("jitter loop either sets w or returns")
            };
            if winding == 0 {
                continue;
            }
            let cx = 0.5 * (task.x0 + task.x1);
            let cy = 0.5 * (task.y0 + task.y1);
            let half_diag =
                0.5 * ((task.x1 - task.x0).powi(2) + (task.y1 - task.y0).powi(2)).sqrt();
            // records straddling the circle keep refining until the
            // inside/outside classification is certain (or the box is far
            // below the nudge scale, which rules out true circle zeros)
            let boundary_gap = ((cx * cx + cy * cy).sqrt() - radius).abs();
            let decided = boundary_gap > 2.0 * half_diag || half_diag <= 1e-12 * r;
            if half_diag <= target && decided {
                records.push(ZeroRecord {
                    re: cx,
                    im: cy,
                    multiplicity: winding as u32,
                    enclosure_radius: half_diag,
                });
                continue;
            }
            // quadrisect at a jittered interior point so child edges avoid
            // the zeros the parent certified
            let mut split = None;
            'attempt: for &j in &JITTER {
                let sx = task.x0 + (task.x1 - task.x0) * j;
                let sy = task.y0 + (task.y1 - task.y0) * j;
                let quads = [
                    (task.x0, sx, task.y0, sy),
                    (sx, task.x1, task.y0, sy),
                    (task.x0, sx, sy, task.y1),
                    (sx, task.x1, sy, task.y1),
                ];
                let mut ws = [0i64; 4];
                for (i, &(a, b, c, d)) in quads.iter().enumerate() {
                    match winding_box(&g, a, b, c, d) {
                        Ok(v) => ws[i] = v,
                        Err(ZeroError::OnPath { .. }) => continue 'attempt,
                        Err(e) => return Err(e),
                    }
                }
                if ws.iter().sum::<i64>() == winding {
                    split = Some((quads, ws));
                    break;
                }
            }
            let Some((quads, ws)) = split else {
                return Err(ZeroError::Resolution {
                    z: Complex64::new(cx, cy),
                    resolution: half_diag,
                });
            };
            for (&(a, b, c, d), &w) in quads.iter().zip(&ws) {
                if w > 0 {
                    stack.push(BoxTask { x0: a, x1: b, y0: c, y1: d, winding: w });
                }
            }
        }
    }
    // Keep only zeros inside the disk; the bounding square corners can hold
    // zeros the circle winding never counted.
    records.retain(|z| z.location().norm() < radius);
    records.sort_by(|a, b| {
        (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite coordinates")
    });
    let found: u32 = records.iter().map(|z| z.multiplicity).sum();
    if i64::from(found) != total {
        return Err(ZeroError::Resolution {
            z: Complex64::new(0.0, 0.0),
            resolution: (i64::from(found) - total) as f64,
        });
    }
    Ok(ZeroReport { zeros: records, total: total as u32, radius_used: radius, nudged })
}
