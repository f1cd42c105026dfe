//! Phase and symbol specifications with analytic derivative oracles, plus the
//! structural hypothesis checks: homogeneity through the Euler identity,
//! mixed-Hessian nondegeneracy, spatial Hessian rank, affine fibration data,
//! and empirical symbol-class constants.

use std::f64::consts::E;

use crate::error::Error;
use crate::spectral::bessel_bracket;

/// Grid scan resolution used to certify diffeomorphism slopes.
const DIFFEO_SCAN_POINTS: usize = 10_000;

/// Minimum certified slope for [`DiffeoSpec`].
const DIFFEO_MIN_SLOPE: f64 = 0.5;

/// Relative singular-value cutoff for [`hessian_x_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Absolute scale below which a Hessian counts as identically zero.
const RANK_ABS_FLOOR: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Smooth primitives
// ---------------------------------------------------------------------------

/// Standard bump exp(1/(t^2-1)) on (-1, 1), zero elsewhere. Peak value 1/e.
pub fn standard_bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 / (t * t - 1.0)).exp()
    } else {
        0.0
    }
}

/// First derivative of [`standard_bump`].
pub fn standard_bump_d1(t: f64) -> f64 {
    if t.abs() < 1.0 {
        let q = t * t - 1.0;
        standard_bump(t) * (-2.0 * t / (q * q))
    } else {
        0.0
    }
}

/// Second derivative of [`standard_bump`].
pub fn standard_bump_d2(t: f64) -> f64 {
    if t.abs() < 1.0 {
        let q = t * t - 1.0;
        let g1 = -2.0 * t / (q * q);
        let g2 = (6.0 * t * t + 2.0) / (q * q * q);
        standard_bump(t) * (g1 * g1 + g2)
    } else {
        0.0
    }
}

fn step_half(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: exactly 0 for t <= 0, exactly 1 for t >= 1, C-infinity.
pub fn smooth_step(t: f64) -> f64 {
    let a = step_half(t);
    let b = step_half(1.0 - t);
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        1.0
    } else {
        a / (a + b)
    }
}

// ---------------------------------------------------------------------------
// DiffeoSpec
// ---------------------------------------------------------------------------

/// The compactly perturbed identity phi(t) = t + c * bump(t).
///
/// phi(t) = t exactly for |t| >= 1, phi'' does not vanish identically on
/// (-1, 1), and construction certifies min phi' >= 0.5 by a fine grid scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffeoSpec {
    scale: f64,
    min_slope: f64,
}

impl DiffeoSpec {
    pub fn new(scale: f64) -> Result<DiffeoSpec, Error> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "diffeomorphism scale must be positive, got {}",
                scale
            )));
        }
        let mut min_slope = f64::INFINITY;
        for i in 0..=DIFFEO_SCAN_POINTS {
            let t = -1.0 + 2.0 * i as f64 / DIFFEO_SCAN_POINTS as f64;
            let slope = 1.0 + scale * standard_bump_d1(t);
            if slope < min_slope {
                min_slope = slope;
            }
        }
        if min_slope < DIFFEO_MIN_SLOPE {
            return Err(Error::InvalidParameter(format!(
                "scale {} gives min slope {:.4} < {}",
                scale, min_slope, DIFFEO_MIN_SLOPE
            )));
        }
        Ok(DiffeoSpec { scale, min_slope })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Certified lower bound on phi' from the construction scan.
    pub fn min_slope(&self) -> f64 {
        self.min_slope
    }

    pub fn phi(&self, t: f64) -> f64 {
        t + self.scale * standard_bump(t)
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        1.0 + self.scale * standard_bump_d1(t)
    }

    pub fn phi_second(&self, t: f64) -> f64 {
        self.scale * standard_bump_d2(t)
    }
}

// ---------------------------------------------------------------------------
// PhaseSpec
// ---------------------------------------------------------------------------

/// The built-in phase families, all positively 1-homogeneous in eta.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseKind {
    /// x . eta
    Linear,
    /// (x + a) . eta
    Shifted { offset: [f64; 2] },
    /// sum_{k<=r} phi(x_k) eta_k + sum_{k>r} x_k eta_k
    PhiProduct { rank: usize, diffeo: DiffeoSpec },
    /// x . eta + c |eta| (d = 2 only; linear in x, so fibration rank 0)
    XLinearRadial { radial_scale: f64 },
}

/// A phase with closed-form value and first/second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpec {
    dim: usize,
    kind: PhaseKind,
}

impl PhaseSpec {
    pub fn linear(dim: usize) -> Result<PhaseSpec, Error> {
        check_dim(dim)?;
        Ok(PhaseSpec {
            dim,
            kind: PhaseKind::Linear,
        })
    }

    pub fn shifted(dim: usize, offset: &[f64]) -> Result<PhaseSpec, Error> {
        check_dim(dim)?;
        if offset.len() != dim || !offset.iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidParameter(
                "shift offset must have one finite entry per dimension".into(),
            ));
        }
        let mut a = [0.0; 2];
        a[..dim].copy_from_slice(offset);
        Ok(PhaseSpec {
            dim,
            kind: PhaseKind::Shifted { offset: a },
        })
    }

    pub fn phi_product(dim: usize, rank: usize, diffeo: DiffeoSpec) -> Result<PhaseSpec, Error> {
        check_dim(dim)?;
        if rank == 0 || rank > dim {
            return Err(Error::InvalidParameter(format!(
                "fibration rank must satisfy 1 <= r <= d, got r = {} with d = {}",
                rank, dim
            )));
        }
        Ok(PhaseSpec {
            dim,
            kind: PhaseKind::PhiProduct { rank, diffeo },
        })
    }

    pub fn x_linear_radial(radial_scale: f64) -> Result<PhaseSpec, Error> {
        if !(radial_scale > 0.0) || !radial_scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radial scale must be positive, got {}",
                radial_scale
            )));
        }
        Ok(PhaseSpec {
            dim: 2,
            kind: PhaseKind::XLinearRadial { radial_scale },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &PhaseKind {
        &self.kind
    }

    /// Declared fibration rank: the codimension of the affine fibers on which
    /// x -> grad_x Phi is constant.
    pub fn fibration_rank(&self) -> usize {
        match &self.kind {
            PhaseKind::PhiProduct { rank, .. } => *rank,
            _ => 0,
        }
    }

    /// True when the phase fails to be linear in eta, so the operator needs a
    /// frequency floor on its symbol to stay away from eta = 0.
    pub fn nonlinear_in_eta(&self) -> bool {
        matches!(self.kind, PhaseKind::XLinearRadial { .. })
    }

    pub fn phi(&self, x: &[f64], eta: &[f64]) -> f64 {
        let d = self.dim;
        match &self.kind {
            PhaseKind::Linear => dot(&x[..d], &eta[..d]),
            PhaseKind::Shifted { offset } => (0..d).map(|k| (x[k] + offset[k]) * eta[k]).sum(),
            PhaseKind::PhiProduct { rank, diffeo } => (0..d)
                .map(|k| {
                    if k < *rank {
                        diffeo.phi(x[k]) * eta[k]
                    } else {
                        x[k] * eta[k]
                    }
                })
                .sum(),
            PhaseKind::XLinearRadial { radial_scale } => {
                dot(&x[..d], &eta[..d]) + radial_scale * norm(&eta[..d])
            }
        }
    }

    /// grad_x Phi; defined everywhere for the built-in families.
    pub fn grad_x(&self, x: &[f64], eta: &[f64]) -> [f64; 2] {
        let d = self.dim;
        let mut g = [0.0; 2];
        match &self.kind {
            PhaseKind::Linear | PhaseKind::Shifted { .. } | PhaseKind::XLinearRadial { .. } => {
                g[..d].copy_from_slice(&eta[..d]);
            }
            PhaseKind::PhiProduct { rank, diffeo } => {
                for k in 0..d {
                    g[k] = if k < *rank {
                        diffeo.phi_prime(x[k]) * eta[k]
                    } else {
                        eta[k]
                    };
                }
            }
        }
        g
    }

    /// grad_eta Phi; needs eta != 0 for the radial family.
    pub fn grad_eta(&self, x: &[f64], eta: &[f64]) -> [f64; 2] {
        let d = self.dim;
        let mut g = [0.0; 2];
        match &self.kind {
            PhaseKind::Linear => g[..d].copy_from_slice(&x[..d]),
            PhaseKind::Shifted { offset } => {
                for k in 0..d {
                    g[k] = x[k] + offset[k];
                }
            }
            PhaseKind::PhiProduct { rank, diffeo } => {
                for k in 0..d {
                    g[k] = if k < *rank { diffeo.phi(x[k]) } else { x[k] };
                }
            }
            PhaseKind::XLinearRadial { radial_scale } => {
                let r = norm(&eta[..d]);
                for k in 0..d {
                    g[k] = x[k] + radial_scale * eta[k] / r;
                }
            }
        }
        g
    }

    /// Spatial Hessian d^2_x Phi.
    pub fn hess_x(&self, x: &[f64], eta: &[f64]) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        if let PhaseKind::PhiProduct { rank, diffeo } = &self.kind {
            for k in 0..*rank {
                h[k][k] = diffeo.phi_second(x[k]) * eta[k];
            }
        }
        h
    }

    /// Frequency Hessian d^2_eta Phi; needs eta != 0 for the radial family.
    pub fn hess_eta(&self, _x: &[f64], eta: &[f64]) -> [[f64; 2]; 2] {
        let d = self.dim;
        let mut h = [[0.0; 2]; 2];
        if let PhaseKind::XLinearRadial { radial_scale } = &self.kind {
            let r = norm(&eta[..d]);
            for i in 0..d {
                for l in 0..d {
                    let delta = if i == l { 1.0 } else { 0.0 };
                    h[i][l] = radial_scale * (delta - eta[i] * eta[l] / (r * r)) / r;
                }
            }
        }
        h
    }

    /// Mixed Hessian d^2 Phi / dx_i deta_l.
    pub fn hess_mixed(&self, x: &[f64], _eta: &[f64]) -> [[f64; 2]; 2] {
        let d = self.dim;
        let mut h = [[0.0; 2]; 2];
        match &self.kind {
            PhaseKind::Linear | PhaseKind::Shifted { .. } | PhaseKind::XLinearRadial { .. } => {
                for k in 0..d {
                    h[k][k] = 1.0;
                }
            }
            PhaseKind::PhiProduct { rank, diffeo } => {
                for k in 0..d {
                    h[k][k] = if k < *rank {
                        diffeo.phi_prime(x[k])
                    } else {
                        1.0
                    };
                }
            }
        }
        h
    }
}

fn check_dim(dim: usize) -> Result<(), Error> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "phase dimension must be 1 or 2, got {}",
            dim
        )))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

// ---------------------------------------------------------------------------
// SymbolSpec
// ---------------------------------------------------------------------------

/// Product plateau window: exactly 1 on [-plateau, plateau]^d, exactly 0
/// outside [-support, support]^d, smooth in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauWindow {
    plateau: f64,
    support: f64,
}

impl PlateauWindow {
    pub fn new(plateau: f64, support: f64) -> Result<PlateauWindow, Error> {
        if !(plateau > 0.0 && support > plateau) {
            return Err(Error::InvalidParameter(format!(
                "window needs 0 < plateau < support, got {} and {}",
                plateau, support
            )));
        }
        Ok(PlateauWindow { plateau, support })
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn eval_axis(&self, t: f64) -> f64 {
        smooth_step((self.support - t.abs()) / (self.support - self.plateau))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|&t| self.eval_axis(t)).product()
    }
}

/// Amplitude `sigma(x, eta) = amplitude * G(x) * <eta>^m * floor(eta)`.
///
/// G is the optional plateau window on the first (compact) slot. The floor
/// factor, when enabled, vanishes identically for |eta| <= 2 and equals 1 for
/// |eta| >= 4, matching the low-frequency cutoff used to reduce the operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSpec {
    order: f64,
    amplitude: f64,
    window: Option<PlateauWindow>,
    frequency_floor: bool,
}

/// The floor transition happens on 2 <= |eta| <= 4.
const FLOOR_LO: f64 = 2.0;
const FLOOR_HI: f64 = 4.0;

impl SymbolSpec {
    pub fn new(
        order: f64,
        window: Option<PlateauWindow>,
        frequency_floor: bool,
    ) -> Result<SymbolSpec, Error> {
        if !order.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "symbol order must be finite, got {}",
                order
            )));
        }
        Ok(SymbolSpec {
            order,
            amplitude: 1.0,
            window,
            frequency_floor,
        })
    }

    /// sigma identically 1 (order 0, no window, no floor).
    pub fn unit() -> SymbolSpec {
        SymbolSpec {
            order: 0.0,
            amplitude: 1.0,
            window: None,
            frequency_floor: false,
        }
    }

    /// Same symbol with a different overall prefactor (0 gives sigma = 0).
    pub fn with_amplitude(mut self, amplitude: f64) -> SymbolSpec {
        self.amplitude = amplitude;
        self
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn window(&self) -> Option<&PlateauWindow> {
        self.window.as_ref()
    }

    pub fn frequency_floor(&self) -> bool {
        self.frequency_floor
    }

    /// Compact-slot factor G(x).
    pub fn x_factor(&self, x: &[f64]) -> f64 {
        self.amplitude * self.window.map_or(1.0, |w| w.eval(x))
    }

    /// Conic-slot factor `<eta>^m * floor(eta)`.
    pub fn eta_factor(&self, eta: &[f64]) -> f64 {
        let mut v = if self.order == 0.0 {
            1.0
        } else {
            bessel_bracket(eta).powf(self.order)
        };
        if self.frequency_floor {
            let r = norm(eta);
            if r <= FLOOR_LO {
                return 0.0;
            }
            v *= smooth_step((r - FLOOR_LO) / (FLOOR_HI - FLOOR_LO));
        }
        v
    }

    pub fn eval(&self, x: &[f64], eta: &[f64]) -> f64 {
        self.x_factor(x) * self.eta_factor(eta)
    }
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

/// A sample point (x, eta); only the first `dim` entries of each are used.
pub type Sample = ([f64; 2], [f64; 2]);

/// Max Euler-identity defect |<grad_eta Phi, eta> - Phi| / (1 + |Phi|) over
/// the samples. Zero (to rounding) certifies positive 1-homogeneity in eta.
pub fn check_homogeneity(phase: &PhaseSpec, samples: &[Sample]) -> Result<f64, Error> {
    let d = phase.dim();
    let mut worst = 0.0f64;
    for (x, eta) in samples {
        if norm(&eta[..d]) < 0.5 {
            return Err(Error::InvalidParameter(
                "homogeneity samples must satisfy |eta| >= 1/2".into(),
            ));
        }
        let value = phase.phi(&x[..d], &eta[..d]);
        let ge = phase.grad_eta(&x[..d], &eta[..d]);
        let euler = dot(&ge[..d], &eta[..d]);
        let defect = (euler - value).abs() / (1.0 + value.abs());
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// Minimum |det d^2_{x,eta} Phi| over the samples; compare against the
/// nondegeneracy margin delta > 0 at the call site.
pub fn check_nondegeneracy(phase: &PhaseSpec, samples: &[Sample]) -> f64 {
    let d = phase.dim();
    let mut worst = f64::INFINITY;
    for (x, eta) in samples {
        let h = phase.hess_mixed(&x[..d], &eta[..d]);
        let det = if d == 1 {
            h[0][0]
        } else {
            h[0][0] * h[1][1] - h[0][1] * h[1][0]
        };
        worst = worst.min(det.abs());
    }
    worst
}

/// Numerical rank of d^2_x Phi(x, eta): singular values above
/// `tol * sigma_max` count, and a matrix below an absolute floor has rank 0.
pub fn hessian_x_rank(phase: &PhaseSpec, x: &[f64], eta: &[f64], tol: f64) -> usize {
    let d = phase.dim();
    let h = phase.hess_x(x, eta);
    let svals = symmetric_singular_values(&h, d);
    let top = svals.iter().cloned().fold(0.0f64, f64::max);
    if top <= RANK_ABS_FLOOR {
        return 0;
    }
    svals.iter().filter(|&&s| s > tol * top).count()
}

fn symmetric_singular_values(h: &[[f64; 2]; 2], d: usize) -> Vec<f64> {
    if d == 1 {
        return vec![h[0][0].abs()];
    }
    // symmetric 2x2: singular values are |eigenvalues|
    let tr = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    vec![((tr + disc) / 2.0).abs(), ((tr - disc) / 2.0).abs()]
}

/// Affine fibration of the spatial domain attached to a structured phase.
#[derive(Debug, Clone, PartialEq)]
pub struct FibrationDescription {
    /// Codimension of the fibers.
    pub rank: usize,
    /// Directions spanning the fiber through any point (d - rank vectors).
    pub fiber_basis: Vec<[f64; 2]>,
}

/// Fibration rank and fiber directions for the built-in families, validated
/// numerically: grad_x Phi must be constant (to 1e-12) along fiber directions.
pub fn fibration_data(phase: &PhaseSpec) -> Result<FibrationDescription, Error> {
    let d = phase.dim();
    let rank = phase.fibration_rank();
    let mut fiber_basis = Vec::new();
    for k in rank..d {
        let mut e = [0.0; 2];
        e[k] = 1.0;
        fiber_basis.push(e);
    }

    // validation sweep along each fiber direction
    let base_points: &[[f64; 2]] = &[[0.3, -0.4], [-0.7, 0.2], [0.05, 0.9]];
    let etas: &[[f64; 2]] = &[[1.0, 1.0], [-2.0, 0.5], [0.75, -3.0]];
    for x0 in base_points {
        for eta in etas {
            let g0 = phase.grad_x(&x0[..d], &eta[..d]);
            for v in &fiber_basis {
                for step in [-1.0, -0.25, 0.4, 1.0] {
                    let x = [x0[0] + step * v[0], x0[1] + step * v[1]];
                    let g = phase.grad_x(&x[..d], &eta[..d]);
                    let drift = (0..d).map(|a| (g[a] - g0[a]).abs()).fold(0.0f64, f64::max);
                    if drift > 1e-12 {
                        return Err(Error::NumericFailure(format!(
                            "grad_x drifts by {} along a declared fiber direction",
                            drift
                        )));
                    }
                }
            }
        }
    }
    Ok(FibrationDescription { rank, fiber_basis })
}

/// One fitted symbol-class constant: `max |d^beta_eta sigma| <eta>^(|beta|-m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolOrderConstant {
    pub beta: [usize; 2],
    pub constant: f64,
}

/// Empirical symbol-class constants for eta multi-indices up to order 2,
/// estimated by central finite differences with step `1e-4 <eta>`.
pub fn check_symbol_order(
    sym: &SymbolSpec,
    dim: usize,
    samples: &[Sample],
) -> Result<Vec<SymbolOrderConstant>, Error> {
    check_dim(dim)?;
    let betas: Vec<[usize; 2]> = if dim == 1 {
        vec![[0, 0], [1, 0], [2, 0]]
    } else {
        vec![[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
    };
    let m = sym.order();
    let mut out = Vec::with_capacity(betas.len());
    for beta in betas {
        let total: usize = beta[0] + beta[1];
        let mut constant = 0.0f64;
        for (x, eta) in samples {
            let bracket = bessel_bracket(&eta[..dim]);
            let h = 1e-4 * bracket;
            let deriv = fd_eta_derivative(sym, &x[..dim], &eta[..dim], beta, h);
            constant = constant.max(deriv.abs() * bracket.powf(total as f64 - m));
        }
        out.push(SymbolOrderConstant { beta, constant });
    }
    Ok(out)
}

fn fd_eta_derivative(sym: &SymbolSpec, x: &[f64], eta: &[f64], beta: [usize; 2], h: f64) -> f64 {
    let eval = |de0: f64, de1: f64| -> f64 {
        let shifted = [eta[0] + de0, if eta.len() > 1 { eta[1] + de1 } else { 0.0 }];
        sym.eval(x, &shifted[..eta.len()])
    };
    match beta {
        [0, 0] => eval(0.0, 0.0),
        [1, 0] => (eval(h, 0.0) - eval(-h, 0.0)) / (2.0 * h),
        [0, 1] => (eval(0.0, h) - eval(0.0, -h)) / (2.0 * h),
        [2, 0] => (eval(h, 0.0) - 2.0 * eval(0.0, 0.0) + eval(-h, 0.0)) / (h * h),
        [0, 2] => (eval(0.0, h) - 2.0 * eval(0.0, 0.0) + eval(0.0, -h)) / (h * h),
        [1, 1] => (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h),
        _ => unreachable!("multi-indices are restricted to order <= 2"),
    }
}

/// Empirical constants of the equivalence |grad_x Phi| ~ |eta|: returns
/// (min, max) of the ratio over the samples.
pub fn euler_gradient_equivalence(
    phase: &PhaseSpec,
    samples: &[Sample],
) -> Result<(f64, f64), Error> {
    let d = phase.dim();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (x, eta) in samples {
        let r = norm(&eta[..d]);
        if r < 0.5 {
            return Err(Error::InvalidParameter(
                "equivalence samples must satisfy |eta| >= 1/2".into(),
            ));
        }
        let g = phase.grad_x(&x[..d], &eta[..d]);
        let ratio = norm(&g[..d]) / r;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

/// Reference peak of the standard bump, kept for symmetry checks.
pub fn bump_peak() -> f64 {
    1.0 / E
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_samples(dim: usize, count: usize, seed: u64) -> Vec<Sample> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut x = [0.0; 2];
                let mut eta = [0.0; 2];
                loop {
                    for a in 0..dim {
                        x[a] = rng.gen_range(-2.0..2.0);
                        eta[a] = rng.gen_range(-8.0..8.0);
                    }
                    if norm(&eta[..dim]) >= 0.5 {
                        break;
                    }
                }
                (x, eta)
            })
            .collect()
    }

    fn builtin_phases() -> Vec<PhaseSpec> {
        let diffeo = DiffeoSpec::new(0.1).unwrap();
        vec![
            PhaseSpec::linear(1).unwrap(),
            PhaseSpec::linear(2).unwrap(),
            PhaseSpec::shifted(1, &[0.5]).unwrap(),
            PhaseSpec::shifted(2, &[0.3, -0.7]).unwrap(),
            PhaseSpec::phi_product(1, 1, diffeo).unwrap(),
            PhaseSpec::phi_product(2, 1, diffeo).unwrap(),
            PhaseSpec::phi_product(2, 2, diffeo).unwrap(),
            PhaseSpec::x_linear_radial(0.25).unwrap(),
        ]
    }

    #[test]
    fn bump_is_smooth_and_compact() {
        assert_eq!(standard_bump(1.0), 0.0);
        assert_eq!(standard_bump(-1.2), 0.0);
        assert!((standard_bump(0.0) - bump_peak()).abs() < 1e-15);
        assert_eq!(standard_bump_d1(1.0), 0.0);
        assert_eq!(standard_bump_d2(-1.0), 0.0);
        // odd/even symmetry
        assert!((standard_bump_d1(0.3) + standard_bump_d1(-0.3)).abs() < 1e-15);
        assert!((standard_bump_d2(0.3) - standard_bump_d2(-0.3)).abs() < 1e-15);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        // the second difference needs a larger step to stay above the
        // cancellation noise floor ~4 eps / h^2
        let h1 = 1e-6;
        let h2 = 1e-4;
        for i in 0..40 {
            let t = -0.95 + 1.9 * i as f64 / 39.0;
            let fd1 = (standard_bump(t + h1) - standard_bump(t - h1)) / (2.0 * h1);
            let fd2 = (standard_bump(t + h2) - 2.0 * standard_bump(t) + standard_bump(t - h2))
                / (h2 * h2);
            assert!((standard_bump_d1(t) - fd1).abs() < 1e-8, "t = {}", t);
            assert!((standard_bump_d2(t) - fd2).abs() < 1e-5, "t = {}", t);
        }
    }

    #[test]
    fn smooth_step_endpoints() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(3.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        // monotone
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn diffeo_is_identity_outside_unit_interval() {
        let d = DiffeoSpec::new(0.1).unwrap();
        assert_eq!(d.phi(1.0), 1.0);
        assert_eq!(d.phi(-3.7), -3.7);
        assert_eq!(d.phi_prime(2.0), 1.0);
        assert_eq!(d.phi_second(2.0), 0.0);
        assert!(d.min_slope() >= 0.5);
        // nonlinear inside
        assert!(d.phi_second(0.5).abs() > 1e-3);
    }

    #[test]
    fn diffeo_rejects_large_and_invalid_scales() {
        assert!(DiffeoSpec::new(2.0).is_err());
        assert!(DiffeoSpec::new(0.0).is_err());
        assert!(DiffeoSpec::new(-0.1).is_err());
        assert!(DiffeoSpec::new(f64::NAN).is_err());
        // 0.3 is comfortably inside the certified region
        assert!(DiffeoSpec::new(0.3).is_ok());
    }

    #[test]
    fn phase_constructors_validate() {
        assert!(PhaseSpec::linear(3).is_err());
        assert!(PhaseSpec::shifted(2, &[1.0]).is_err());
        let diffeo = DiffeoSpec::new(0.1).unwrap();
        assert!(PhaseSpec::phi_product(1, 0, diffeo).is_err());
        assert!(PhaseSpec::phi_product(1, 2, diffeo).is_err());
        assert!(PhaseSpec::x_linear_radial(0.0).is_err());
    }

    #[test]
    fn homogeneity_defect_is_tiny_for_builtins() {
        for phase in builtin_phases() {
            let samples = random_samples(phase.dim(), 200, 42);
            let defect = check_homogeneity(&phase, &samples).unwrap();
            assert!(defect < 1e-12, "{:?} defect {}", phase.kind(), defect);
        }
    }

    #[test]
    fn homogeneity_scaling_direct() {
        // Phi(x, lambda eta) = lambda Phi(x, eta) checked for every family
        for phase in builtin_phases() {
            let d = phase.dim();
            for (x, eta) in random_samples(d, 50, 5) {
                let base = phase.phi(&x[..d], &eta[..d]);
                for lambda in [0.5, 2.0, 7.5] {
                    let scaled = [lambda * eta[0], lambda * eta[1]];
                    let v = phase.phi(&x[..d], &scaled[..d]);
                    assert!(
                        (v - lambda * base).abs() < 1e-10 * (1.0 + v.abs()),
                        "{:?}",
                        phase.kind()
                    );
                }
            }
        }
    }

    #[test]
    fn homogeneity_rejects_small_eta() {
        let phase = PhaseSpec::linear(1).unwrap();
        let samples = vec![([0.0, 0.0], [0.1, 0.0])];
        assert!(check_homogeneity(&phase, &samples).is_err());
    }

    #[test]
    fn nondegeneracy_of_builtins() {
        let samples1 = random_samples(1, 200, 9);
        let samples2 = random_samples(2, 200, 9);

        let linear = PhaseSpec::linear(1).unwrap();
        assert!((check_nondegeneracy(&linear, &samples1) - 1.0).abs() < 1e-15);

        let diffeo = DiffeoSpec::new(0.1).unwrap();
        let pp1 = PhaseSpec::phi_product(1, 1, diffeo).unwrap();
        let min_det = check_nondegeneracy(&pp1, &samples1);
        assert!(min_det >= 0.5);
        // det = phi'(x) pointwise
        for (x, eta) in &samples1[..20] {
            let det = pp1.hess_mixed(&x[..1], &eta[..1])[0][0];
            assert!((det - diffeo.phi_prime(x[0])).abs() < 1e-15);
        }

        // d=2, r=1: the mixed Hessian is diag(phi'(x_1), 1)
        let pp2 = PhaseSpec::phi_product(2, 1, diffeo).unwrap();
        for (x, eta) in &samples2[..20] {
            let h = pp2.hess_mixed(&x[..2], &eta[..2]);
            assert_eq!(h[0][1], 0.0);
            assert_eq!(h[1][0], 0.0);
            assert_eq!(h[1][1], 1.0);
            assert!((h[0][0] - diffeo.phi_prime(x[0])).abs() < 1e-15);
        }
        assert!(check_nondegeneracy(&pp2, &samples2) >= 0.5);
    }

    #[test]
    fn hessian_rank_matches_structure() {
        let linear = PhaseSpec::linear(2).unwrap();
        assert_eq!(
            hessian_x_rank(&linear, &[0.3, 0.1], &[1.0, 1.0], DEFAULT_RANK_TOL),
            0
        );
        let shifted = PhaseSpec::shifted(1, &[0.5]).unwrap();
        assert_eq!(
            hessian_x_rank(&shifted, &[0.3], &[2.0], DEFAULT_RANK_TOL),
            0
        );

        let diffeo = DiffeoSpec::new(0.1).unwrap();
        let pp = PhaseSpec::phi_product(2, 1, diffeo).unwrap();
        // phi''(0.5) != 0, so rank 1 at x_1 = 0.5
        assert_eq!(
            hessian_x_rank(&pp, &[0.5, 0.0], &[1.0, 1.0], DEFAULT_RANK_TOL),
            1
        );
        // phi is affine for |t| >= 1, so rank drops to 0 at x = 2
        let pp1 = PhaseSpec::phi_product(1, 1, diffeo).unwrap();
        assert_eq!(hessian_x_rank(&pp1, &[2.0], &[3.0], DEFAULT_RANK_TOL), 0);

        // full rank family: rank d wherever both phi'' factors are alive
        let pp_full = PhaseSpec::phi_product(2, 2, diffeo).unwrap();
        assert_eq!(
            hessian_x_rank(&pp_full, &[0.5, -0.4], &[1.0, 2.0], DEFAULT_RANK_TOL),
            2
        );
        // and never exceeds the declared rank
        for (x, eta) in random_samples(2, 100, 23) {
            assert!(hessian_x_rank(&pp, &x[..2], &eta[..2], DEFAULT_RANK_TOL) <= 1);
        }

        // the radial family is linear in x: rank 0 everywhere
        let radial = PhaseSpec::x_linear_radial(0.25).unwrap();
        for (x, eta) in random_samples(2, 50, 29) {
            assert_eq!(
                hessian_x_rank(&radial, &x[..2], &eta[..2], DEFAULT_RANK_TOL),
                0
            );
        }
    }

    #[test]
    fn fibration_of_builtins() {
        let linear = PhaseSpec::linear(2).unwrap();
        let fd = fibration_data(&linear).unwrap();
        assert_eq!(fd.rank, 0);
        assert_eq!(fd.fiber_basis.len(), 2);

        let diffeo = DiffeoSpec::new(0.1).unwrap();
        let pp = PhaseSpec::phi_product(2, 1, diffeo).unwrap();
        let fd = fibration_data(&pp).unwrap();
        assert_eq!(fd.rank, 1);
        assert_eq!(fd.fiber_basis, vec![[0.0, 1.0]]);

        // fibers are points when r = d: nothing to sweep
        let pp_full = PhaseSpec::phi_product(2, 2, diffeo).unwrap();
        let fd = fibration_data(&pp_full).unwrap();
        assert_eq!(fd.rank, 2);
        assert!(fd.fiber_basis.is_empty());

        let radial = PhaseSpec::x_linear_radial(0.25).unwrap();
        assert_eq!(fibration_data(&radial).unwrap().rank, 0);
    }

    #[test]
    fn fiber_sweep_is_constant_to_tolerance() {
        let diffeo = DiffeoSpec::new(0.1).unwrap();
        let pp = PhaseSpec::phi_product(2, 1, diffeo).unwrap();
        let eta = [1.5, -2.0];
        let x = [0.4, 0.0];
        let g0 = pp.grad_x(&x, &eta);
        for i in 0..=50 {
            let t = -1.0 + 2.0 * i as f64 / 50.0;
            let g = pp.grad_x(&[0.4, t], &eta);
            assert!((g[0] - g0[0]).abs() < 1e-12 && (g[1] - g0[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let h = 1e-5;
        for phase in builtin_phases() {
            let d = phase.dim();
            for (x, eta) in random_samples(d, 100, 77) {
                let gx = phase.grad_x(&x[..d], &eta[..d]);
                let ge = phase.grad_eta(&x[..d], &eta[..d]);
                for a in 0..d {
                    let mut xp = x;
                    let mut xm = x;
                    xp[a] += h;
                    xm[a] -= h;
                    let fd = (phase.phi(&xp[..d], &eta[..d]) - phase.phi(&xm[..d], &eta[..d]))
                        / (2.0 * h);
                    let scale = 1.0f64.max(gx[a].abs());
                    assert!(
                        (gx[a] - fd).abs() / scale < 1e-6,
                        "{:?} grad_x[{}]",
                        phase.kind(),
                        a
                    );

                    let mut ep = eta;
                    let mut em = eta;
                    ep[a] += h;
                    em[a] -= h;
                    let fd =
                        (phase.phi(&x[..d], &ep[..d]) - phase.phi(&x[..d], &em[..d])) / (2.0 * h);
                    let scale = 1.0f64.max(ge[a].abs());
                    assert!(
                        (ge[a] - fd).abs() / scale < 1e-6,
                        "{:?} grad_eta[{}]",
                        phase.kind(),
                        a
                    );

                    // second derivatives against first-derivative differences
                    let hx = phase.hess_x(&x[..d], &eta[..d]);
                    let hm = phase.hess_mixed(&x[..d], &eta[..d]);
                    let he = phase.hess_eta(&x[..d], &eta[..d]);
                    for b in 0..d {
                        let fd = (phase.grad_x(&xp[..d], &eta[..d])[b]
                            - phase.grad_x(&xm[..d], &eta[..d])[b])
                            / (2.0 * h);
                        assert!((hx[b][a] - fd).abs() / 1.0f64.max(fd.abs()) < 1e-6);

                        let fd = (phase.grad_x(&x[..d], &ep[..d])[b]
                            - phase.grad_x(&x[..d], &em[..d])[b])
                            / (2.0 * h);
                        assert!((hm[b][a] - fd).abs() / 1.0f64.max(fd.abs()) < 1e-6);

                        let fd = (phase.grad_eta(&x[..d], &ep[..d])[b]
                            - phase.grad_eta(&x[..d], &em[..d])[b])
                            / (2.0 * h);
                        assert!((he[b][a] - fd).abs() / 1.0f64.max(fd.abs()) < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn symbol_window_and_floor_are_exact() {
        let w = PlateauWindow::new(1.0, 1.5).unwrap();
        let sym = SymbolSpec::new(-0.5, Some(w), true).unwrap();
        // exactly 1 on the plateau (eta factor aside)
        assert_eq!(sym.x_factor(&[0.7, -1.0]), 1.0);
        // exactly 0 outside the support box
        assert_eq!(sym.x_factor(&[1.6, 0.0]), 0.0);
        assert_eq!(sym.eval(&[2.0, 0.0], &[5.0, 0.0]), 0.0);
        // floor kills |eta| <= 2 exactly and is inert above 4
        assert_eq!(sym.eta_factor(&[1.9, 0.0]), 0.0);
        assert_eq!(sym.eta_factor(&[2.0, 0.0]), 0.0);
        let eta = [5.0, 0.0];
        assert!((sym.eta_factor(&eta) - bessel_bracket(&eta).powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn symbol_order_constants() {
        // sigma = G(x) <eta>^m: the order-0 constant is max |G| = 1 and the
        // first-order constants stay uniformly bounded by ~|m|
        let w = PlateauWindow::new(1.0, 1.5).unwrap();
        let m = -0.5;
        let sym = SymbolSpec::new(m, Some(w), false).unwrap();
        let mut samples = Vec::new();
        for i in 0..60 {
            let r = 2.0 + (256.0f64 - 2.0) * i as f64 / 59.0;
            samples.push(([0.0, 0.0], [r, 0.0]));
            samples.push(([0.5, 0.0], [-r, 0.0]));
        }
        let consts = check_symbol_order(&sym, 1, &samples).unwrap();
        let c0 = consts.iter().find(|c| c.beta == [0, 0]).unwrap().constant;
        assert!((c0 - 1.0).abs() < 1e-10);
        let c1 = consts.iter().find(|c| c.beta == [1, 0]).unwrap().constant;
        // d/deta <eta>^m = m eta <eta>^(m-2), so the normalized constant
        // approaches |m| from below
        assert!(c1 <= m.abs() + 0.05 && c1 > m.abs() * 0.5, "c1 = {}", c1);
        let c2 = consts.iter().find(|c| c.beta == [2, 0]).unwrap().constant;
        assert!(c2.is_finite() && c2 < 3.0 * (m.abs() + 1.0));
    }

    #[test]
    fn zero_symbol_has_zero_constants() {
        let sym = SymbolSpec::unit().with_amplitude(0.0);
        let samples = vec![([0.0, 0.0], [4.0, 0.0]), ([0.1, 0.0], [9.0, 0.0])];
        let consts = check_symbol_order(&sym, 1, &samples).unwrap();
        assert!(consts.iter().all(|c| c.constant == 0.0));
    }

    #[test]
    fn gradient_equivalence_constants() {
        let samples1 = random_samples(1, 200, 31);
        let linear = PhaseSpec::linear(1).unwrap();
        let (lo, hi) = euler_gradient_equivalence(&linear, &samples1).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);

        let shifted = PhaseSpec::shifted(1, &[0.5]).unwrap();
        let (lo, hi) = euler_gradient_equivalence(&shifted, &samples1).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);

        let diffeo = DiffeoSpec::new(0.1).unwrap();
        let pp = PhaseSpec::phi_product(1, 1, diffeo).unwrap();
        let (lo, hi) = euler_gradient_equivalence(&pp, &samples1).unwrap();
        assert!(lo >= 0.5 && hi <= 1.5 && lo > 0.0 && hi.is_finite());
        // ratio equals phi'(x) pointwise in d = 1
        let (x, eta) = samples1[0];
        let g = pp.grad_x(&x[..1], &eta[..1]);
        assert!((g[0].abs() / eta[0].abs() - diffeo.phi_prime(x[0])).abs() < 1e-12);
    }
}
