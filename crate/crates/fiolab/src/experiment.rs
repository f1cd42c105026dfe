//! Theorem-facing harness: the boundedness threshold, operator norm-ratio
//! sweeps over modulated bump families across dyadic scales, least-squares
//! slope fits, and the band-commutation probe.
//!
//! The measured quantity is never a true operator norm: each sweep reports
//! the ratio `|| FT(T f_j) ||_p / || FT(f_j) ||_p` over one declared input
//! family, and the fitted log2 slope of those ratios against j is compared
//! with the growth exponent r |1/2 - 1/p| + m implied by the sharp
//! boundedness threshold.

use num_complex::Complex64;

use crate::decomp::LittlewoodPaley;
use crate::error::Error;
use crate::fio::{multiply_spectrum, FioOperator};
use crate::phase::{standard_bump, PhaseKind};
use crate::spectral::{flp_norm, forward_ft, inverse_ft, Grid, SampledFunction, SpectralFunction};

/// Sharp order threshold -r |1/2 - 1/p| (-r/2 for p = infinity).
pub fn threshold(p: f64, r: usize) -> Result<f64, Error> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold needs p >= 1, got {}",
            p
        )));
    }
    if p.is_infinite() {
        return Ok(-(r as f64) / 2.0);
    }
    Ok(-(r as f64) * (0.5 - 1.0 / p).abs())
}

/// How the spectral bump width grows with the scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMode {
    /// Width 1 at every scale: the input stays a unit-width frequency bump,
    /// so its spatial envelope covers the symbol plateau and the oscillatory
    /// growth of the operator is visible.
    FixedWidth,
    /// Width 2^(j-2): the bump fills its dyadic block; kept as a
    /// sensitivity check (such inputs concentrate spatially and the ratios
    /// stay flat).
    ProportionalWidth,
}

/// Modulated bump family: spectrum bump((eta - 3 2^j e1) / width_j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFamily {
    pub mode: FamilyMode,
    pub j_min: u32,
    pub j_max: u32,
}

/// Frequency-center multiplier: bumps sit at 3 * 2^j along the first axis.
const CENTER_MULT: f64 = 3.0;

impl TestFamily {
    pub fn new(mode: FamilyMode, j_min: u32, j_max: u32) -> Result<TestFamily, Error> {
        if j_min < 1 || j_max < j_min + 2 {
            return Err(Error::InvalidParameter(format!(
                "scale range {}..={} needs j_min >= 1 and at least 3 scales",
                j_min, j_max
            )));
        }
        Ok(TestFamily { mode, j_min, j_max })
    }

    pub fn scales(&self) -> impl Iterator<Item = u32> {
        self.j_min..=self.j_max
    }

    pub fn width(&self, j: u32) -> f64 {
        match self.mode {
            FamilyMode::FixedWidth => 1.0,
            FamilyMode::ProportionalWidth => 2.0f64.powi(j as i32 - 2),
        }
    }

    pub fn center(&self, j: u32) -> f64 {
        CENTER_MULT * (1u64 << j) as f64
    }

    /// The spectrum of the scale-j member, sampled on the dual grid.
    pub fn build_spectrum(&self, grid: Grid, j: u32) -> Result<SpectralFunction, Error> {
        let center = self.center(j);
        let width = self.width(j);
        if center + width > grid.dual_radius() {
            return Err(Error::InvalidParameter(format!(
                "scale {} needs dual radius {}, grid has {}",
                j,
                center + width,
                grid.dual_radius()
            )));
        }
        if width < 2.0 * grid.deta() {
            return Err(Error::InvalidParameter(format!(
                "scale {} bump width {} is below the dual grid resolution {}",
                j,
                width,
                grid.deta()
            )));
        }
        let d = grid.dim();
        Ok(SpectralFunction::from_fn(grid, |eta| {
            let mut delta = eta[0] - center;
            let mut sq = delta * delta;
            for t in &eta[1..d] {
                delta = *t;
                sq += delta * delta;
            }
            Complex64::new(standard_bump(sq.sqrt() / width), 0.0)
        }))
    }

    /// The scale-j member itself (inverse transform of its spectrum).
    pub fn build_input(&self, grid: Grid, j: u32) -> Result<SampledFunction, Error> {
        Ok(inverse_ft(&self.build_spectrum(grid, j)?))
    }
}

/// Ordinary least squares for log2(ratio) against j.
///
/// Returns (slope, intercept, residual) where residual is the RMS of the fit
/// errors. Needs at least 3 pairs and positive ratios.
pub fn fit_slope(pairs: &[(f64, f64)]) -> Result<(f64, f64, f64), Error> {
    if pairs.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs at least 3 points, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|&(_, rho)| !(rho > 0.0)) {
        return Err(Error::InvalidParameter(
            "slope fit needs positive ratios".into(),
        ));
    }
    let n = pairs.len() as f64;
    let logs: Vec<(f64, f64)> = pairs.iter().map(|&(j, rho)| (j, rho.log2())).collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "slope fit needs at least two distinct scales".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (logs
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, intercept, residual))
}

/// Outcome of one norm-ratio sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// One-line echo of the sweep setup.
    pub config: String,
    pub scales: Vec<u32>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// Growth exponent implied by the threshold: r |1/2 - 1/p| + m.
    pub predicted: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

impl ExperimentReport {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.scales
            .iter()
            .zip(&self.ratios)
            .map(|(&j, &r)| (j as f64, r))
            .collect()
    }
}

fn ratio_sweep(
    op: &FioOperator,
    p: f64,
    family: &TestFamily,
    predicted: f64,
    tolerance: f64,
    label: &str,
) -> Result<ExperimentReport, Error> {
    let grid = *op.grid();
    let mut scales = Vec::new();
    let mut ratios = Vec::new();
    for j in family.scales() {
        let f = family.build_input(grid, j)?;
        let rho = op.empirical_operator_ratio(&f, p, 0.0)?;
        scales.push(j);
        ratios.push(rho);
    }
    let pairs: Vec<(f64, f64)> = scales
        .iter()
        .zip(&ratios)
        .map(|(&j, &r)| (j as f64, r))
        .collect();
    let (slope, intercept, residual) = fit_slope(&pairs)?;
    let verdict = (slope - predicted).abs() <= tolerance;
    Ok(ExperimentReport {
        config: label.to_string(),
        scales,
        ratios,
        slope,
        intercept,
        residual,
        predicted,
        tolerance,
        verdict,
    })
}

/// Sharpness sweep for a PhiProduct operator: the fitted ratio slope is
/// compared against r |1/2 - 1/p| + m.
pub fn run_sharpness(
    op: &FioOperator,
    p: f64,
    family: &TestFamily,
    tolerance: f64,
) -> Result<ExperimentReport, Error> {
    if p.is_nan() || !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "sharpness sweeps cover 1 <= p <= 2 (p > 2 follows by duality), got {}",
            p
        )));
    }
    let rank = match op.phase().kind() {
        PhaseKind::PhiProduct { rank, .. } => *rank,
        other => {
            return Err(Error::UnsupportedPhase(format!(
                "sharpness sweep needs the PhiProduct family, got {:?}",
                other
            )))
        }
    };
    let m = op.symbol().order();
    let predicted = -threshold(p, rank)? + m;
    let label = format!(
        "sharpness d={} r={} m={} p={} mode={:?} j={}..{}",
        op.grid().dim(),
        rank,
        m,
        p,
        family.mode,
        family.j_min,
        family.j_max
    );
    ratio_sweep(op, p, family, predicted, tolerance, &label)
}

/// Control sweep for rank-0 phases (linear in x): the predicted growth
/// exponent is the symbol order alone.
pub fn run_r0_control(
    op: &FioOperator,
    p: f64,
    family: &TestFamily,
    tolerance: f64,
) -> Result<ExperimentReport, Error> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "control sweep needs p >= 1, got {}",
            p
        )));
    }
    if op.phase().fibration_rank() != 0 {
        return Err(Error::UnsupportedPhase(
            "the rank-0 control needs a phase linear in x".into(),
        ));
    }
    let predicted = op.symbol().order();
    let label = format!(
        "r0-control d={} kind={:?} m={} p={} mode={:?} j={}..{}",
        op.grid().dim(),
        op.phase().kind(),
        op.symbol().order(),
        p,
        family.mode,
        family.j_min,
        family.j_max
    );
    ratio_sweep(op, p, family, predicted, tolerance, &label)
}

/// Seeded band-limited probe inputs for the commutation matrix.
pub fn build_probes(grid: Grid, count: usize, radius: f64, seed: u64) -> Vec<SampledFunction> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let d = grid.dim();
    (0..count)
        .map(|_| {
            let mut spec = SpectralFunction::zeros(grid);
            for k in 0..grid.len() {
                let eta = grid.dual_point(k);
                let r: f64 = eta[..d].iter().map(|t| t * t).sum::<f64>().sqrt();
                if r <= radius {
                    spec.values[k] =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            inverse_ft(&spec)
        })
        .collect()
}

/// Band-commutation entry: max over probes of
/// `|| psi_k FT(T_j f) ||_inf / || FT(f) ||_inf`.
pub fn band_commutation(
    op: &FioOperator,
    lp: &LittlewoodPaley,
    k: u32,
    j: u32,
    probes: &[SampledFunction],
) -> Result<f64, Error> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter(
            "band commutation needs at least one probe".into(),
        ));
    }
    let mut worst = 0.0f64;
    for f in probes {
        let denom = flp_norm(&forward_ft(f), f64::INFINITY, 0.0)?;
        if denom == 0.0 {
            return Err(Error::InvalidParameter("zero probe".into()));
        }
        let tjf = op.apply_dyadic_piece(lp, j, f)?;
        let banded = multiply_spectrum(&|eta: &[f64]| lp.psi_j(k, eta), &forward_ft(&tjf));
        let num = flp_norm(&banded, f64::INFINITY, 0.0)?;
        worst = worst.max(num / denom);
    }
    Ok(worst)
}

/// The full (k, j) commutation matrix for k, j in 1..=levels.
pub fn band_commutation_matrix(
    op: &FioOperator,
    lp: &LittlewoodPaley,
    levels: u32,
    probes: &[SampledFunction],
) -> Result<Vec<Vec<f64>>, Error> {
    let mut rows = Vec::new();
    for k in 1..=levels {
        let mut row = Vec::new();
        for j in 1..=levels {
            // T_j f is recomputed per (k, j); fine at probe sizes
            row.push(band_commutation(op, lp, k, j, probes)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Measured band width: the largest |j - k| whose entry exceeds
/// `rel_tol` times the diagonal maximum.
pub fn measured_band_width(matrix: &[Vec<f64>], rel_tol: f64) -> u32 {
    let mut diag_max = 0.0f64;
    for (i, row) in matrix.iter().enumerate() {
        diag_max = diag_max.max(row[i]);
    }
    let mut width = 0u32;
    for (i, row) in matrix.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            if v > rel_tol * diag_max {
                width = width.max(i.abs_diff(l) as u32);
            }
        }
    }
    width
}
