//! Point-process samplers on a disk window centred at the origin.
//!
//! All samplers are pure functions of their parameters and the RNG stream.
//! Patterns are simple unless passed through [`duplicate`].

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::ProcessKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub radius: f64,
}

impl Window {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(
                "radius",
                format!("window radius must be positive (got {radius})"),
            ));
        }
        Ok(Self { radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] * p[0] + p[1] * p[1] <= self.radius * self.radius
    }
}

/// A realization of a stationary point process restricted to a window.
/// `multiplicities[i]` counts the colocated points at `points[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub points: Vec<[f64; 2]>,
    pub multiplicities: Vec<u32>,
    pub window: Window,
}

impl PointPattern {
    pub fn simple(points: Vec<[f64; 2]>, window: Window) -> Self {
        let n = points.len();
        Self {
            points,
            multiplicities: vec![1; n],
            window,
        }
    }

    pub fn empty(window: Window) -> Self {
        Self::simple(Vec::new(), window)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points counted with multiplicity.
    pub fn total_mass(&self) -> u64 {
        self.multiplicities.iter().map(|&k| u64::from(k)).sum()
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicities.iter().all(|&k| k == 1)
    }

    pub fn distance_sq(&self, i: usize) -> f64 {
        let [x, y] = self.points[i];
        x * x + y * y
    }

    /// Writes `x,y,multiplicity` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,multiplicity")?;
        for (p, k) in self.points.iter().zip(&self.multiplicities) {
            writeln!(out, "{:.8e},{:.8e},{}", p[0], p[1], k)?;
        }
        Ok(())
    }
}

#[inline]
fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    [r * phi.cos(), r * phi.sin()]
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

/// Homogeneous Poisson process of intensity `lambda` on the window.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, window: Window, rng: &mut R) -> Result<PointPattern> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("intensity must be positive (got {lambda})")));
    }
    let n = poisson_count(lambda * window.area(), rng);
    let points = (0..n).map(|_| uniform_in_disk(window.radius, rng)).collect();
    Ok(PointPattern::simple(points, window))
}

/// Parent intensity for which Matérn II thinning with radius `r` retains
/// `target` points per unit area. Requires `target·π·r² < 1`.
pub fn matern_parent_intensity(target: f64, r: f64) -> Result<f64> {
    let c = PI * r * r;
    let x = target * c;
    if !(x < 1.0) {
        return Err(invalid(
            "hardcore_radius",
            format!("intensity {target} is unreachable with hard-core radius {r}"),
        ));
    }
    Ok(-(1.0 - x).ln() / c)
}

/// Retained intensity of Matérn II thinning: λ_p (1 - e^{-λ_p π r²}) / (λ_p π r²).
pub fn matern_retained_intensity(lambda_parent: f64, r: f64) -> f64 {
    let c = lambda_parent * PI * r * r;
    if c == 0.0 {
        return lambda_parent;
    }
    lambda_parent * (1.0 - (-c).exp()) / c
}

/// Bucket index over a square grid of cell size `cell` covering [-half, half]².
struct CellIndex {
    cell: f64,
    half: f64,
    side: usize,
    start: Vec<usize>,
    order: Vec<usize>,
}

impl CellIndex {
    fn new(points: &[[f64; 2]], cell: f64, half: f64) -> Self {
        let side = ((2.0 * half / cell).ceil() as usize).max(1);
        let mut counts = vec![0usize; side * side + 1];
        let ids: Vec<usize> = points.iter().map(|p| Self::id_of(p, cell, half, side)).collect();
        for &id in &ids {
            counts[id + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut order = vec![0usize; points.len()];
        for (i, &id) in ids.iter().enumerate() {
            order[fill[id]] = i;
            fill[id] += 1;
        }
        Self {
            cell,
            half,
            side,
            start: counts,
            order,
        }
    }

    fn coord(v: f64, cell: f64, half: f64, side: usize) -> usize {
        (((v + half) / cell).floor().max(0.0) as usize).min(side - 1)
    }

    fn id_of(p: &[f64; 2], cell: f64, half: f64, side: usize) -> usize {
        Self::coord(p[1], cell, half, side) * side + Self::coord(p[0], cell, half, side)
    }

    /// Indices of points in the 3×3 block of cells around `p`.
    fn neighbours(&self, p: &[f64; 2]) -> impl Iterator<Item = usize> + '_ {
        let cx = Self::coord(p[0], self.cell, self.half, self.side) as isize;
        let cy = Self::coord(p[1], self.cell, self.half, self.side) as isize;
        let side = self.side as isize;
        (-1..=1).flat_map(move |dy| {
            (-1..=1).flat_map(move |dx| {
                let (x, y) = (cx + dx, cy + dy);
                let range = if x < 0 || y < 0 || x >= side || y >= side {
                    0..0
                } else {
                    let id = (y * side + x) as usize;
                    self.start[id]..self.start[id + 1]
                };
                range.map(move |k| self.order[k])
            })
        })
    }
}

/// Matérn II parents on the window grown by `r`, with uniform marks.
fn matern_parents<R: Rng + ?Sized>(
    lambda_parent: f64,
    r: f64,
    window: Window,
    rng: &mut R,
) -> (Vec<[f64; 2]>, Vec<f64>) {
    let outer = window.radius + r;
    let n = poisson_count(lambda_parent * PI * outer * outer, rng);
    let mut pts = Vec::with_capacity(n + 1);
    let mut marks = Vec::with_capacity(n + 1);
    for _ in 0..n {
        pts.push(uniform_in_disk(outer, rng));
        marks.push(rng.random::<f64>());
    }
    (pts, marks)
}

/// Keeps parents with no other parent closer than `r` carrying a smaller mark.
fn matern_survivors(pts: &[[f64; 2]], marks: &[f64], r: f64, half: f64) -> Vec<bool> {
    let index = CellIndex::new(pts, r, half);
    let r2 = r * r;
    pts.iter()
        .enumerate()
        .map(|(i, p)| {
            !index.neighbours(p).any(|j| {
                if j == i || marks[j] >= marks[i] {
                    return false;
                }
                let dx = pts[j][0] - p[0];
                let dy = pts[j][1] - p[1];
                dx * dx + dy * dy < r2
            })
        })
        .collect()
}

/// Matérn type II hard-core process.
pub fn sample_matern_ii<R: Rng + ?Sized>(
    lambda_parent: f64,
    hardcore_r: f64,
    window: Window,
    rng: &mut R,
) -> Result<PointPattern> {
    if !(lambda_parent > 0.0) {
        return Err(invalid("lambda_parent", "must be positive"));
    }
    if !(hardcore_r >= 0.0) {
        return Err(invalid("hardcore_r", "must be non-negative"));
    }
    if hardcore_r == 0.0 {
        return sample_ppp(lambda_parent, window, rng);
    }
    let (pts, marks) = matern_parents(lambda_parent, hardcore_r, window, rng);
    let keep = matern_survivors(&pts, &marks, hardcore_r, window.radius + hardcore_r);
    let points = pts
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| (k && window.contains(p)).then_some(p))
        .collect();
    Ok(PointPattern::simple(points, window))
}

fn lattice_sites(spacing: f64, reach: f64, offset: [f64; 2]) -> impl Iterator<Item = [f64; 2]> {
    let k = (reach / spacing).ceil() as i64 + 1;
    (-k..=k).flat_map(move |j| (-k..=k).map(move |i| [i as f64 * spacing + offset[0], j as f64 * spacing + offset[1]]))
}

/// Square lattice with one uniform global translation and i.i.d. Gaussian
/// jitter per point.
pub fn sample_perturbed_lattice<R: Rng + ?Sized>(
    spacing: f64,
    jitter_sd: f64,
    window: Window,
    rng: &mut R,
) -> Result<PointPattern> {
    if !(spacing > 0.0) {
        return Err(invalid("spacing", "must be positive"));
    }
    if !(jitter_sd >= 0.0) {
        return Err(invalid("jitter_sd", "must be non-negative"));
    }
    let offset = [spacing * rng.random::<f64>(), spacing * rng.random::<f64>()];
    let reach = window.radius + 8.0 * jitter_sd;
    let normal = Normal::new(0.0, jitter_sd).expect("finite sd");
    let mut points = Vec::new();
    for site in lattice_sites(spacing, reach, offset) {
        let p = if jitter_sd > 0.0 {
            [site[0] + normal.sample(rng), site[1] + normal.sample(rng)]
        } else {
            site
        };
        if window.contains(p) {
            points.push(p);
        }
    }
    Ok(PointPattern::simple(points, window))
}

/// Marks every location with multiplicity two.
pub fn duplicate(pattern: &PointPattern) -> Result<PointPattern> {
    if !pattern.is_simple() {
        return Err(Error::AlreadyDuplicated);
    }
    Ok(PointPattern {
        points: pattern.points.clone(),
        multiplicities: vec![2; pattern.len()],
        window: pattern.window,
    })
}

/// Location closest to the origin, optionally skipping one index. Ties go
/// to the lowest index.
pub fn nearest(pattern: &PointPattern, exclude: Option<usize>) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for i in 0..pattern.len() {
        if Some(i) == exclude {
            continue;
        }
        let d2 = pattern.distance_sq(i);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, d2)| (i, d2.sqrt())).ok_or(Error::NoInterferer)
}

/// Simple pattern of distinct locations for `process` at location intensity
/// `intensity`.
pub fn sample_support<R: Rng + ?Sized>(
    process: &ProcessKind,
    intensity: f64,
    window: Window,
    rng: &mut R,
) -> Result<PointPattern> {
    match *process {
        ProcessKind::Ppp => sample_ppp(intensity, window, rng),
        ProcessKind::MaternII { hardcore_radius } => {
            let parent = matern_parent_intensity(intensity, hardcore_radius)?;
            sample_matern_ii(parent, hardcore_radius, window, rng)
        }
        ProcessKind::PerturbedLattice { jitter_sd } => {
            sample_perturbed_lattice(1.0 / intensity.sqrt(), jitter_sd, window, rng)
        }
    }
}

/// The process seen from a typical point placed at the origin, with that
/// point removed (reduced Palm distribution).
pub fn sample_reduced_palm<R: Rng + ?Sized>(
    process: &ProcessKind,
    intensity: f64,
    window: Window,
    rng: &mut R,
) -> Result<PointPattern> {
    match *process {
        // Slivnyak: the reduced Palm distribution of a PPP is the PPP itself.
        ProcessKind::Ppp => sample_ppp(intensity, window, rng),
        ProcessKind::PerturbedLattice { jitter_sd } => {
            let spacing = 1.0 / intensity.sqrt();
            let normal = Normal::new(0.0, jitter_sd).expect("finite sd");
            let jitter = |rng: &mut R| {
                if jitter_sd > 0.0 {
                    [normal.sample(rng), normal.sample(rng)]
                } else {
                    [0.0, 0.0]
                }
            };
            let own = jitter(rng);
            let reach = window.radius + 8.0 * jitter_sd;
            let mut points = Vec::new();
            for site in lattice_sites(spacing, reach, [0.0, 0.0]) {
                if site == [0.0, 0.0] {
                    continue;
                }
                let e = jitter(rng);
                let p = [site[0] + e[0] - own[0], site[1] + e[1] - own[1]];
                if window.contains(p) {
                    points.push(p);
                }
            }
            Ok(PointPattern::simple(points, window))
        }
        ProcessKind::MaternII { hardcore_radius: r } => {
            let parent = matern_parent_intensity(intensity, r)?;
            // rejection: add a parent at the origin and keep the draw only if
            // it survives the thinning
            loop {
                let (mut pts, mut marks) = matern_parents(parent, r, window, rng);
                let own_mark = rng.random::<f64>();
                let r2 = r * r;
                let origin_survives = !pts
                    .iter()
                    .zip(&marks)
                    .any(|(p, &m)| m < own_mark && p[0] * p[0] + p[1] * p[1] < r2);
                if !origin_survives {
                    continue;
                }
                pts.push([0.0, 0.0]);
                marks.push(own_mark);
                let keep = matern_survivors(&pts, &marks, r, window.radius + r);
                let last = pts.len() - 1;
                let points = pts
                    .into_iter()
                    .zip(keep)
                    .enumerate()
                    .filter_map(|(i, (p, k))| (i != last && k && window.contains(p)).then_some(p))
                    .collect();
                return Ok(PointPattern::simple(points, window));
            }
        }
    }
}
