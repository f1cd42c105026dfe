//! The proof-side decompositions.
//!
//! [`LittlewoodPaley`] partitions the conic variable into dyadic annuli with
//! smooth radial cutoffs psi_j. [`SecondDecomposition`] covers the transverse
//! parameter box with ~2^(jr/2) balls of radius ~2^(-j/2) carrying a
//! normalized partition of unity chi_nu. On top of those sit the kernel
//! pieces K^nu_j of the conjugated operator, their Schur row/column
//! integrals, the second-order Taylor remainder of the phase, and the
//! small-scale probes for the transverse increment and remainder bounds.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Error;
use crate::exec;
use crate::fio::FioOperator;
use crate::phase::{smooth_step, standard_bump, DiffeoSpec, PhaseKind, PhaseSpec};
use crate::spectral::Grid;

// ---------------------------------------------------------------------------
// Littlewood-Paley system
// ---------------------------------------------------------------------------

/// Dyadic partition of unity 1 = sum_{j=0..J} psi_j on |y| <= 2^J, with
/// psi_j supported in the annulus 2^(j-1) <= |y| <= 2^(j+1) for j >= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LittlewoodPaley {
    max_level: u32,
}

impl LittlewoodPaley {
    /// Base cutoff at radius r: exactly 1 for r <= 1, exactly 0 for r >= 2.
    pub fn psi0_radial(r: f64) -> f64 {
        smooth_step(2.0 - r.abs())
    }

    /// psi(y) = psi0(y) - psi0(2y), as a function of the radius.
    pub fn psi_radial(r: f64) -> f64 {
        Self::psi0_radial(r) - Self::psi0_radial(2.0 * r)
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Piece j at radius r: psi(2^-j r) for j >= 1, psi0 for j = 0.
    pub fn psi_j_radial(&self, j: u32, r: f64) -> f64 {
        if j == 0 {
            Self::psi0_radial(r)
        } else {
            Self::psi_radial(r / (1u64 << j) as f64)
        }
    }

    /// Piece j evaluated at a point of the conic domain.
    pub fn psi_j(&self, j: u32, y: &[f64]) -> f64 {
        self.psi_j_radial(j, norm(y))
    }

    /// psi0 evaluated at a point.
    pub fn psi0(&self, y: &[f64]) -> f64 {
        Self::psi0_radial(norm(y))
    }

    /// System for kernel-side work, where the conic variable is integrated
    /// adaptively rather than sampled on a dual grid; no resolvability
    /// constraint applies.
    pub fn free(max_level: u32) -> LittlewoodPaley {
        LittlewoodPaley { max_level }
    }
}

/// Build the Littlewood-Paley system with levels 0..=J on the given grid.
pub fn build_lp(max_level: u32, grid: &Grid) -> Result<LittlewoodPaley, Error> {
    if max_level < 1 {
        return Err(Error::InvalidParameter(
            "Littlewood-Paley max level must be >= 1".into(),
        ));
    }
    let needed = (1u64 << (max_level + 1)) as f64;
    if needed > grid.dual_radius() {
        return Err(Error::InvalidParameter(format!(
            "level {} needs dual radius >= {}, grid has {}",
            max_level,
            needed,
            grid.dual_radius()
        )));
    }
    Ok(LittlewoodPaley { max_level })
}

// ---------------------------------------------------------------------------
// Second decomposition
// ---------------------------------------------------------------------------

/// Axis-aligned box in the r-dimensional transverse parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBox {
    rank: usize,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl ParamBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<ParamBox, Error> {
        let rank = lo.len();
        if rank == 0 || rank > 2 || hi.len() != rank {
            return Err(Error::InvalidParameter(
                "parameter box must have 1 or 2 matching bounds".into(),
            ));
        }
        let mut l = [0.0; 2];
        let mut h = [0.0; 2];
        for a in 0..rank {
            if !(lo[a] < hi[a]) || !lo[a].is_finite() || !hi[a].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "degenerate box on axis {}: [{}, {}]",
                    a, lo[a], hi[a]
                )));
            }
            l[a] = lo[a];
            h[a] = hi[a];
        }
        Ok(ParamBox { rank, lo: l, hi: h })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }
}

/// Ball covering of the parameter box at scale 2^(-j/2) with subordinate
/// cutoffs.
///
/// Centers sit on the lattice of spacing l = 2^(-j/2), kept when they land
/// within half a spacing of the box, so the box is covered with per-axis
/// radius l/2 while neighboring centers stay exactly l apart. Cutoffs are
/// per-axis normalized bumps, so the partition of unity is exact wherever
/// the denominator is alive (all of the box and a collar around it).
#[derive(Debug, Clone, PartialEq)]
pub struct SecondDecomposition {
    level: u32,
    domain: ParamBox,
    spacing: f64,
    axis_centers: Vec<Vec<f64>>,
}

/// Separation constant: distinct centers are >= C0 * 2^(-j/2) apart.
pub const SEPARATION_C0: f64 = 1.0;

impl SecondDecomposition {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn rank(&self) -> usize {
        self.domain.rank()
    }

    pub fn domain(&self) -> &ParamBox {
        &self.domain
    }

    /// Lattice spacing 2^(-j/2).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Covering constant C1 = sqrt(r): the box is covered by balls of radius
    /// C1 * 2^(-j/2), and each cutoff is supported in such a ball.
    pub fn covering_c1(&self) -> f64 {
        (self.rank() as f64).sqrt()
    }

    pub fn axis_center_count(&self, axis: usize) -> usize {
        self.axis_centers[axis].len()
    }

    pub fn count(&self) -> usize {
        self.axis_centers.iter().map(|c| c.len()).product()
    }

    pub(crate) fn split(&self, nu: usize) -> [usize; 2] {
        let n0 = self.axis_centers[0].len();
        [nu % n0, nu / n0]
    }

    pub fn center(&self, nu: usize) -> [f64; 2] {
        let mi = self.split(nu);
        let mut c = [0.0; 2];
        for a in 0..self.rank() {
            c[a] = self.axis_centers[a][mi[a]];
        }
        c
    }

    /// Index of the center closest to `u`.
    pub fn nearest_center(&self, u: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for nu in 0..self.count() {
            let c = self.center(nu);
            let d: f64 = (0..self.rank()).map(|a| (u[a] - c[a]).powi(2)).sum();
            if d < best_d {
                best_d = d;
                best = nu;
            }
        }
        best
    }

    fn axis_denominator(&self, axis: usize, t: f64) -> f64 {
        self.axis_centers[axis]
            .iter()
            .map(|c| standard_bump((t - c) / self.spacing))
            .sum()
    }

    /// One per-axis factor of chi_nu.
    pub fn chi_axis(&self, axis: usize, k: usize, t: f64) -> f64 {
        let num = standard_bump((t - self.axis_centers[axis][k]) / self.spacing);
        if num == 0.0 {
            return 0.0;
        }
        num / self.axis_denominator(axis, t)
    }

    /// Cutoff chi_nu(u): product of normalized per-axis bumps.
    pub fn chi(&self, nu: usize, u: &[f64]) -> f64 {
        let mi = self.split(nu);
        (0..self.rank())
            .map(|a| self.chi_axis(a, mi[a], u[a]))
            .product()
    }
}

/// Build the scale-j covering of the transverse box for fibration rank r.
pub fn build_second_decomposition(
    level: u32,
    rank: usize,
    domain: ParamBox,
) -> Result<SecondDecomposition, Error> {
    if level < 1 {
        return Err(Error::InvalidParameter(
            "second decomposition needs level j >= 1".into(),
        ));
    }
    if rank != domain.rank() {
        return Err(Error::InvalidParameter(format!(
            "rank {} does not match box rank {}",
            rank,
            domain.rank()
        )));
    }
    let spacing = 2.0f64.powf(-(level as f64) / 2.0);
    let mut axis_centers = Vec::with_capacity(rank);
    for a in 0..rank {
        let lo = domain.lo(a) - spacing / 2.0;
        let hi = domain.hi(a) + spacing / 2.0;
        let k_lo = (lo / spacing).ceil() as i64;
        let k_hi = (hi / spacing).floor() as i64;
        let centers: Vec<f64> = (k_lo..=k_hi).map(|k| k as f64 * spacing).collect();
        if centers.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "no lattice point falls inside axis {} of the box",
                a
            )));
        }
        axis_centers.push(centers);
    }
    Ok(SecondDecomposition {
        level,
        domain,
        spacing,
        axis_centers,
    })
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes (for the Taylor remainder)
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on (0, 1).
fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

const TAYLOR_NODES: usize = 32;
const TAYLOR_PANELS: usize = 4;

/// Second-order Taylor remainder of the first-slot expansion of the phase:
///
/// R(eta, y) = int_0^1 (1-t) d^2_1 Phi(center + t (eta-center), y)
///             [eta-center, eta-center] dt,
///
/// so that Phi(eta, y) equals Phi(center, y) plus the linear term plus
/// R(eta, y) exactly. Built-in phases are smooth along the whole segment;
/// the quadrature panels split where the segment crosses the
/// diffeomorphism's bump-support endpoints, since the integrand is analytic
/// only between those crossings.
pub fn taylor_remainder(phase: &PhaseSpec, eta: &[f64], center: &[f64], y: &[f64]) -> f64 {
    let d = phase.dim();
    let mut delta = [0.0; 2];
    for a in 0..d {
        delta[a] = eta[a] - center[a];
    }

    let mut cuts = vec![0.0, 1.0];
    for a in 0..d {
        if delta[a] == 0.0 {
            continue;
        }
        for edge in [-1.0, 1.0] {
            let t = (edge - center[a]) / delta[a];
            if t > 0.0 && t < 1.0 {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let rule = gauss_legendre_unit(TAYLOR_NODES);
    let mut acc = 0.0;
    for pair in cuts.windows(2) {
        let width = (pair[1] - pair[0]) / TAYLOR_PANELS as f64;
        for p in 0..TAYLOR_PANELS {
            let lo = pair[0] + p as f64 * width;
            for &(node, w) in rule.iter() {
                let t = lo + node * width;
                let mut xi = [0.0; 2];
                for a in 0..d {
                    xi[a] = center[a] + t * delta[a];
                }
                let h = phase.hess_x(&xi[..d], y);
                let mut quad = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        quad += h[a][b] * delta[a] * delta[b];
                    }
                }
                acc += w * width * (1.0 - t) * quad;
            }
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Kernel pieces of the conjugated operator
// ---------------------------------------------------------------------------

/// Oscillation oversampling: quadrature steps per unit of the fastest phase.
const NODE_OVERSAMPLE: f64 = 8.0;
const MIN_AXIS_NODES: usize = 64;
const MAX_AXIS_NODES: usize = 40_000;

/// Midpoint quadrature data for one eta axis of the kernel integral.
struct AxisQuad {
    nodes: Vec<f64>,
    /// G(t) * chi(t) * dt at each node.
    weights: Vec<f64>,
    /// First-slot phase profile phi_a(t) at each node.
    phis: Vec<f64>,
}

impl AxisQuad {
    /// F_a(x_a, y_a) = sum w(t) exp(2 pi i (phi_a(t) y_a - x_a t)).
    fn factor(&self, x_a: f64, y_a: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.nodes.len() {
            if self.weights[i] == 0.0 {
                continue;
            }
            let theta = 2.0 * PI * (self.phis[i] * y_a - x_a * self.nodes[i]);
            acc += Complex64::from_polar(self.weights[i], theta);
        }
        acc
    }
}

/// Geometry shared by the kernel-piece routines: a PhiProduct phase in the
/// swapped convention and a windowed symbol whose first slot is compact.
struct PieceGeometry {
    dim: usize,
    rank: usize,
    diffeo: DiffeoSpec,
    support: f64,
}

fn piece_geometry(op: &FioOperator) -> Result<PieceGeometry, Error> {
    let phase = op.phase();
    let (rank, diffeo) = match phase.kind() {
        PhaseKind::PhiProduct { rank, diffeo } => (*rank, *diffeo),
        other => {
            return Err(Error::UnsupportedPhase(format!(
                "kernel pieces need the PhiProduct family, got {:?}",
                other
            )))
        }
    };
    let window = op.symbol().window().ok_or_else(|| {
        Error::InvalidParameter("kernel pieces need a compactly supported symbol window".into())
    })?;
    if !op.symbol().frequency_floor() {
        return Err(Error::InvalidParameter(
            "kernel pieces need the frequency floor (sigma = 0 for small second slot)".into(),
        ));
    }
    Ok(PieceGeometry {
        dim: phase.dim(),
        rank,
        diffeo,
        support: window.support(),
    })
}

fn axis_node_count(width: f64, omega: f64, node_mult: f64) -> usize {
    let raw = (width * NODE_OVERSAMPLE * omega.max(1.0) * node_mult).ceil() as usize;
    raw.clamp(MIN_AXIS_NODES, MAX_AXIS_NODES)
}

/// Build the quadrature for one axis over [lo, hi], with the chi factor of
/// piece `nu` included when requested.
fn build_axis_quad(
    op: &FioOperator,
    geo: &PieceGeometry,
    sd: Option<(&SecondDecomposition, usize)>,
    axis: usize,
    lo: f64,
    hi: f64,
    omega: f64,
    node_mult: f64,
) -> AxisQuad {
    let count = axis_node_count(hi - lo, omega, node_mult);
    let dt = (hi - lo) / count as f64;
    let window = op.symbol().window().expect("checked by piece_geometry");
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut phis = Vec::with_capacity(count);
    for i in 0..count {
        let t = lo + (i as f64 + 0.5) * dt;
        let mut w = op.symbol().amplitude() * window.eval_axis(t);
        if let Some((sd, nu)) = sd {
            if axis < geo.rank {
                let mi = sd.split(nu);
                w *= sd.chi_axis(axis, mi[axis], t);
            }
        }
        nodes.push(t);
        weights.push(w * dt);
        phis.push(if axis < geo.rank {
            geo.diffeo.phi(t)
        } else {
            t
        });
    }
    AxisQuad {
        nodes,
        weights,
        phis,
    }
}

/// Kernel piece K^nu_j(x, y) of the conjugated operator, by midpoint
/// quadrature over the compact first slot.
///
/// All pieces at a given (x, y) share one quadrature grid spanning the full
/// symbol window, so summing them telescopes exactly against
/// [`kernel_dyadic`]. `node_mult` scales the node density (1.0 is the
/// default rule; larger values refine).
pub fn kernel_piece(
    op: &FioOperator,
    lp: &LittlewoodPaley,
    sd: &SecondDecomposition,
    nu: usize,
    x: &[f64],
    y: &[f64],
    node_mult: f64,
) -> Result<Complex64, Error> {
    if nu >= sd.count() {
        return Err(Error::InvalidParameter(format!(
            "piece index {} out of range (count {})",
            nu,
            sd.count()
        )));
    }
    kernel_common(op, lp, sd.level(), Some((sd, nu)), x, y, node_mult)
}

/// Full dyadic kernel K_j(x, y) (no transverse cutoff).
pub fn kernel_dyadic(
    op: &FioOperator,
    lp: &LittlewoodPaley,
    level: u32,
    x: &[f64],
    y: &[f64],
    node_mult: f64,
) -> Result<Complex64, Error> {
    kernel_common(op, lp, level, None, x, y, node_mult)
}

fn kernel_common(
    op: &FioOperator,
    lp: &LittlewoodPaley,
    level: u32,
    sd: Option<(&SecondDecomposition, usize)>,
    x: &[f64],
    y: &[f64],
    node_mult: f64,
) -> Result<Complex64, Error> {
    let geo = piece_geometry(op)?;
    if level < 1 || level > lp.max_level() {
        return Err(Error::InvalidParameter(format!(
            "dyadic level {} outside 1..={}",
            level,
            lp.max_level()
        )));
    }
    let envelope = op.symbol().eta_factor(&y[..geo.dim]) * lp.psi_j(level, &y[..geo.dim]);
    if envelope == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut value = Complex64::new(envelope, 0.0);
    for a in 0..geo.dim {
        let omega = y[a].abs() + x[a].abs();
        let quad = build_axis_quad(op, &geo, sd, a, -geo.support, geo.support, omega, node_mult);
        value *= quad.factor(x[a], y[a]);
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// Schur integrals
// ---------------------------------------------------------------------------

/// Sampling controls for [`schur_bounds`] and [`appendix_scaling_probe`].
#[derive(Debug, Clone, Copy)]
pub struct SchurParams {
    /// Half-width of the x window per transverse axis, in units of 2^(j/2).
    pub x_window_scale: f64,
    /// x samples per kernel envelope scale.
    pub x_env_samples: usize,
    /// Radii sampled inside the dyadic annulus when maximizing over y (row)
    /// or seeding x (column).
    pub radial_samples: usize,
    /// Angular samples (d = 2 only).
    pub angular_samples: usize,
    /// Fraction of the window counted as its boundary shell.
    pub boundary_shell: f64,
    /// Maximum boundary-shell share of the integral before erroring out.
    pub boundary_tol: f64,
    /// Node-density multiplier passed down to the quadratures.
    pub node_mult: f64,
}

impl Default for SchurParams {
    fn default() -> Self {
        SchurParams {
            x_window_scale: 48.0,
            x_env_samples: 16,
            radial_samples: 8,
            angular_samples: 6,
            boundary_shell: 0.05,
            boundary_tol: 1e-3,
            node_mult: 1.0,
        }
    }
}

/// Row and column Schur integrals of one kernel piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurBounds {
    /// max over y of the x-integral of |K^nu_j|.
    pub row_integral: f64,
    /// max over x of the y-integral of |K^nu_j|.
    pub col_integral: f64,
}

/// Deterministic y samples inside the level-j annulus.
fn annulus_samples(dim: usize, level: u32, params: &SchurParams) -> Vec<[f64; 2]> {
    let lo = (1u64 << (level - 1)) as f64;
    let hi = (1u64 << (level + 1)) as f64;
    let nr = params.radial_samples.max(2);
    let radii: Vec<f64> = (0..nr)
        .map(|i| lo * (hi / lo).powf((i as f64 + 0.5) / nr as f64))
        .collect();
    let mut out = Vec::new();
    if dim == 1 {
        for r in radii {
            out.push([r, 0.0]);
            out.push([-r, 0.0]);
        }
    } else {
        let na = params.angular_samples.max(3);
        for r in radii {
            for k in 0..na {
                let th = 2.0 * PI * (k as f64 + 0.5) / na as f64;
                out.push([r * th.cos(), r * th.sin()]);
            }
        }
    }
    out
}

/// The x concentration point of piece nu at conic point y: the first-slot
/// gradient of the phase at the piece center.
fn x_center(geo: &PieceGeometry, sd: &SecondDecomposition, nu: usize, y: &[f64]) -> [f64; 2] {
    let c = sd.center(nu);
    let mut out = [0.0; 2];
    for a in 0..geo.dim {
        out[a] = if a < geo.rank {
            geo.diffeo.phi_prime(c[a]) * y[a]
        } else {
            y[a]
        };
    }
    out
}

struct AxisWindow {
    xs: Vec<f64>,
    dx: f64,
}

fn axis_window(center: f64, halfwidth: f64, dx: f64) -> AxisWindow {
    let count = (2.0 * halfwidth / dx).ceil() as usize;
    let xs = (0..count)
        .map(|i| center - halfwidth + (i as f64 + 0.5) * dx)
        .collect();
    AxisWindow { xs, dx }
}

/// abs sum over one axis window at fixed y_a; returns the total and the
/// boundary-shell share.
fn axis_abs_integral(quad: &AxisQuad, window: &AxisWindow, y_a: f64, shell: f64) -> (f64, f64) {
    let n = window.xs.len();
    let abs: Vec<f64> = exec::map_collect(n, |i| quad.factor(window.xs[i], y_a).norm());
    let total: f64 = abs.iter().sum::<f64>() * window.dx;
    let edge_cells = ((n as f64 * shell).ceil() as usize).max(1).min(n / 2);
    let edge: f64 = (abs[..edge_cells].iter().sum::<f64>()
        + abs[n - edge_cells..].iter().sum::<f64>())
        * window.dx;
    (total, edge)
}

/// Row and column Schur integrals of |K^nu_j| over windows capturing the
/// kernel mass; errors out when more than `boundary_tol` of an x-integral
/// sits in the outer shell of its window. The y-side needs no truncation:
/// psi_j has exact compact support.
pub fn schur_bounds(
    op: &FioOperator,
    lp: &LittlewoodPaley,
    sd: &SecondDecomposition,
    nu: usize,
    params: &SchurParams,
) -> Result<SchurBounds, Error> {
    let geo = piece_geometry(op)?;
    let d = geo.dim;
    let level = sd.level();
    let root_j = 2.0f64.powf(level as f64 / 2.0);
    let ys = annulus_samples(d, level, params);

    // envelope length scales of |F_a| in x: the reciprocal integration
    // widths 1/(chi interval) transversally and 1/(window width) along the
    // fibers
    let env_length = |a: usize| -> f64 {
        if a < geo.rank {
            root_j / (2.0 * SEPARATION_C0)
        } else {
            1.0 / (2.0 * geo.support)
        }
    };
    let window_halfwidth = |a: usize| -> f64 {
        if a < geo.rank {
            params.x_window_scale * root_j
        } else {
            params.x_window_scale
        }
    };
    let chi_interval = |a: usize| -> (f64, f64) {
        let c = sd.center(nu);
        if a < geo.rank {
            (
                (c[a] - sd.spacing()).max(-geo.support),
                (c[a] + sd.spacing()).min(geo.support),
            )
        } else {
            (-geo.support, geo.support)
        }
    };

    // --- row integral: max over y of the x integral -----------------------
    let mut row = 0.0f64;
    for y in &ys {
        let envelope = op.symbol().eta_factor(&y[..d]) * lp.psi_j(level, &y[..d]);
        if envelope == 0.0 {
            continue;
        }
        let xc = x_center(&geo, sd, nu, y);
        let mut total = envelope.abs();
        for a in 0..d {
            let (lo, hi) = chi_interval(a);
            let hw = window_halfwidth(a);
            let omega = y[a].abs() + xc[a].abs() + hw;
            let quad =
                build_axis_quad(op, &geo, Some((sd, nu)), a, lo, hi, omega, params.node_mult);
            let win = axis_window(xc[a], hw, env_length(a) / params.x_env_samples as f64);
            let (axis_total, axis_edge) =
                axis_abs_integral(&quad, &win, y[a], params.boundary_shell);
            if axis_total > 0.0 && axis_edge / axis_total > params.boundary_tol {
                return Err(Error::WindowTooSmall(format!(
                    "axis {} x-window leaks {:.2e} of its mass",
                    a,
                    axis_edge / axis_total
                )));
            }
            total *= axis_total;
        }
        row = row.max(total);
    }

    // --- column integral: max over x of the y integral --------------------
    // x candidates: images of the sampled y under the concentration map
    let y_lo = (1u64 << (level - 1)) as f64;
    let y_hi = (1u64 << (level + 1)) as f64;
    let mut col = 0.0f64;
    for y_seed in &ys {
        let xc = x_center(&geo, sd, nu, y_seed);
        let dys: Vec<f64> = (0..d)
            .map(|a| env_length(a) / params.x_env_samples as f64)
            .collect();
        let y_axes: Vec<Vec<f64>> = (0..d)
            .map(|a| {
                let mut v = Vec::new();
                let mut t = -y_hi + 0.5 * dys[a];
                while t < y_hi {
                    v.push(t);
                    t += dys[a];
                }
                v
            })
            .collect();
        // per-axis |F_a| tables at this fixed x
        let tables: Vec<Vec<f64>> = (0..d)
            .map(|a| {
                let (lo, hi) = chi_interval(a);
                let omega = y_hi + xc[a].abs();
                let quad =
                    build_axis_quad(op, &geo, Some((sd, nu)), a, lo, hi, omega, params.node_mult);
                exec::map_collect(y_axes[a].len(), |i| quad.factor(xc[a], y_axes[a][i]).norm())
            })
            .collect();

        let mut total = 0.0f64;
        if d == 1 {
            for (i, &ya) in y_axes[0].iter().enumerate() {
                let r = ya.abs();
                if r < y_lo || r > y_hi {
                    continue;
                }
                let envelope = op.symbol().eta_factor(&[ya]) * lp.psi_j_radial(level, r);
                total += envelope.abs() * tables[0][i] * dys[0];
            }
        } else {
            for (i1, &y1) in y_axes[1].iter().enumerate() {
                for (i0, &y0) in y_axes[0].iter().enumerate() {
                    let r = (y0 * y0 + y1 * y1).sqrt();
                    if r < y_lo || r > y_hi {
                        continue;
                    }
                    let envelope = op.symbol().eta_factor(&[y0, y1]) * lp.psi_j_radial(level, r);
                    total += envelope.abs() * tables[0][i0] * tables[1][i1] * dys[0] * dys[1];
                }
            }
        }
        col = col.max(total);
    }

    Ok(SchurBounds {
        row_integral: row,
        col_integral: col,
    })
}

// ---------------------------------------------------------------------------
// Small-scale probes
// ---------------------------------------------------------------------------

/// Suprema probed on the support of one piece: the transverse increment
/// |(eta - eta^nu)'| and the Taylor remainder |R^nu_j|.
pub fn appendix_scaling_probe(
    op: &FioOperator,
    lp: &LittlewoodPaley,
    sd: &SecondDecomposition,
    nu: usize,
    params: &SchurParams,
) -> Result<(f64, f64), Error> {
    let geo = piece_geometry(op)?;
    let d = geo.dim;
    let rank = geo.rank;
    let c = sd.center(nu);
    let mi = sd.split(nu);
    let level = sd.level();

    // scan the transverse ball on a per-axis grid
    let scan = 129usize;
    let axis_grid = |a: usize| -> Vec<f64> {
        (0..scan)
            .map(|i| c[a] - sd.spacing() + 2.0 * sd.spacing() * i as f64 / (scan - 1) as f64)
            .collect()
    };
    let mut u_points: Vec<[f64; 2]> = Vec::new();
    if rank == 1 {
        for t in axis_grid(0) {
            u_points.push([t, 0.0]);
        }
    } else {
        for &t0 in axis_grid(0).iter().step_by(4) {
            for &t1 in axis_grid(1).iter().step_by(4) {
                u_points.push([t0, t1]);
            }
        }
    }
    let on_support =
        |u: &[f64; 2]| -> bool { (0..rank).all(|a| sd.chi_axis(a, mi[a], u[a]) > 0.0) };

    let mut eta_prime_sup = 0.0f64;
    for u in &u_points {
        if !on_support(u) {
            continue;
        }
        let inc: f64 = (0..rank).map(|a| (u[a] - c[a]).powi(2)).sum::<f64>().sqrt();
        eta_prime_sup = eta_prime_sup.max(inc);
    }

    // remainder over (supp chi) x (annulus samples); the fiber coordinates of
    // eta do not enter the PhiProduct Hessian, so they sit at 0
    let ys = annulus_samples(d, level, params);
    let mut remainder_sup = 0.0f64;
    for u in &u_points {
        if !on_support(u) {
            continue;
        }
        let mut eta = [0.0; 2];
        let mut center = [0.0; 2];
        eta[..rank].copy_from_slice(&u[..rank]);
        center[..rank].copy_from_slice(&c[..rank]);
        for y in &ys {
            if lp.psi_j(level, &y[..d]) == 0.0 {
                continue;
            }
            let r = taylor_remainder(op.phase(), &eta[..d], &center[..d], &y[..d]).abs();
            remainder_sup = remainder_sup.max(r);
        }
    }
    Ok((eta_prime_sup, remainder_sup))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}
