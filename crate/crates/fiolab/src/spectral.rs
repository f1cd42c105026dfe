//! Discretization substrate: centered box grids, forward/inverse discrete
//! Fourier transforms with the 2π-in-exponent convention, and discrete
//! L^p / Fourier-Lebesgue norms.
//!
//! The physical box is [-L, L)^d sampled at n points per axis; the dual grid
//! has spacing 1/(2L) and half-width n/(4L), so that dx * deta * n = 1 per
//! axis and the discrete transform pair inverts exactly (to rounding).
//! Functions are assumed supported well inside the box: nothing wraps, and
//! [`SampledFunction::boundary_mass_fraction`] lets callers detect truncation.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Error;
use crate::exec::{self, ReductionMode};

/// Uniform centered grid on [-L, L)^d together with its dual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    half_width: f64,
}

impl Grid {
    /// New grid with `n` points per axis (power of two, >= 8) on [-L, L)^d.
    pub fn new(dim: usize, points_per_axis: usize, half_width: f64) -> Result<Grid, Error> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter(format!(
                "grid dimension must be 1 or 2, got {}",
                dim
            )));
        }
        let n = points_per_axis;
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be a power of two >= 8, got {}",
                n
            )));
        }
        // desk-scale caps: direct quadrature costs O(n^2d)
        let cap = if dim == 1 { 4096 } else { 256 };
        if n > cap {
            return Err(Error::InvalidParameter(format!(
                "points per axis capped at {} in dimension {}, got {}",
                cap, dim, n
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half-width must be positive and finite, got {}",
                half_width
            )));
        }
        Ok(Grid {
            dim,
            points_per_axis,
            half_width,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Physical grid spacing 2L/n.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Dual grid spacing 1/(2L).
    pub fn deta(&self) -> f64 {
        1.0 / (2.0 * self.half_width)
    }

    /// Dual half-width n/(4L).
    pub fn dual_radius(&self) -> f64 {
        self.points_per_axis as f64 / (4.0 * self.half_width)
    }

    /// Total number of grid points n^d.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume of the physical grid.
    pub fn dx_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Cell volume of the dual grid.
    pub fn deta_volume(&self) -> f64 {
        self.deta().powi(self.dim as i32)
    }

    /// Multi-index of a linear index; axis 0 varies fastest.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        let n = self.points_per_axis;
        [idx % n, idx / n]
    }

    fn axis_coord(&self, i: usize, spacing: f64) -> f64 {
        (i as f64 - self.points_per_axis as f64 / 2.0) * spacing
    }

    /// Physical point for a linear index (second component 0 when d = 1).
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let mi = self.multi_index(idx);
        let dx = self.dx();
        [self.axis_coord(mi[0], dx), self.axis_coord(mi[1], dx)]
    }

    /// Dual point for a linear index.
    pub fn dual_point(&self, idx: usize) -> [f64; 2] {
        let mi = self.multi_index(idx);
        let deta = self.deta();
        [self.axis_coord(mi[0], deta), self.axis_coord(mi[1], deta)]
    }
}

fn check_values(grid: &Grid, values: &[Complex64]) -> Result<(), Error> {
    if values.len() != grid.len() {
        return Err(Error::InvalidParameter(format!(
            "value buffer has length {}, grid needs {}",
            values.len(),
            grid.len()
        )));
    }
    if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NumericFailure(
            "non-finite sample encountered".into(),
        ));
    }
    Ok(())
}

/// Complex samples of a function on the physical grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

/// Complex samples of a Fourier transform on the dual grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, Error> {
        check_values(&grid, &values)?;
        Ok(SampledFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Sample a closure over the physical grid.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let d = grid.dim();
        let values = exec::map_collect(grid.len(), |idx| {
            let p = grid.point(idx);
            f(&p[..d])
        });
        SampledFunction { grid, values }
    }

    /// Discrete L^2 norm (sum |f|^2 dx^d)^(1/2).
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (sum * self.grid.dx_volume()).sqrt()
    }

    /// Fraction of the |.|^2 mass carried by the outermost cell layer.
    ///
    /// Callers are expected to choose L so this stays below 1e-8; anything
    /// larger means the box is truncating the function.
    pub fn boundary_mass_fraction(&self) -> f64 {
        boundary_mass(&self.grid, &self.values)
    }
}

impl SpectralFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, Error> {
        check_values(&grid, &values)?;
        Ok(SpectralFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        SpectralFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Sample a closure over the dual grid.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let d = grid.dim();
        let values = exec::map_collect(grid.len(), |idx| {
            let p = grid.dual_point(idx);
            f(&p[..d])
        });
        SpectralFunction { grid, values }
    }

    /// Fraction of the |.|^2 mass carried by the outermost dual cell layer.
    pub fn boundary_mass_fraction(&self) -> f64 {
        boundary_mass(&self.grid, &self.values)
    }
}

fn boundary_mass(grid: &Grid, values: &[Complex64]) -> f64 {
    let n = grid.points_per_axis();
    let mut edge = 0.0;
    let mut total = 0.0;
    for (idx, v) in values.iter().enumerate() {
        let mi = grid.multi_index(idx);
        let m = v.norm_sqr();
        total += m;
        let on_edge = (0..grid.dim()).any(|a| mi[a] == 0 || mi[a] == n - 1);
        if on_edge {
            edge += m;
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// Japanese bracket (1 + |eta|^2)^(1/2).
pub fn bessel_bracket(eta: &[f64]) -> f64 {
    (1.0 + eta.iter().map(|t| t * t).sum::<f64>()).sqrt()
}

// ---------------------------------------------------------------------------
// Discrete Fourier transforms
// ---------------------------------------------------------------------------

/// Radix-2 in-place FFT; `inverse` flips the exponent sign. Unnormalized.
fn fft_pow2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    // one twiddle table at the finest stage; coarser stages stride through it
    let sign = if inverse { 1.0 } else { -1.0 };
    let table: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / n as f64))
        .collect();

    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = table[k * stride];
                let u = buf[start + k];
                let v = buf[start + k + len / 2] * w;
                buf[start + k] = u + v;
                buf[start + k + len / 2] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Centered DFT core shared by both directions.
///
/// With x_i = (i - n/2) dx and eta_k = (k - n/2) deta the kernel
/// exp(-2 pi i x.eta) factors into (-1)^(i+k) times the standard DFT kernel
/// (n is divisible by 4, so the corner factor is 1); the sign flips are
/// applied per axis around a plain radix-2 pass.
fn centered_dft(grid: &Grid, values: &[Complex64], inverse: bool, scale: f64) -> Vec<Complex64> {
    let n = grid.points_per_axis();
    let d = grid.dim();

    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let mi = grid.multi_index(idx);
            if (mi[0] + mi[1]) % 2 == 1 {
                -v
            } else {
                *v
            }
        })
        .collect();

    // axis 0: contiguous rows
    for row in buf.chunks_mut(n) {
        fft_pow2(row, inverse);
    }

    // axis 1: strided columns through a scratch buffer
    if d == 2 {
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        for col in 0..n {
            for i in 0..n {
                scratch[i] = buf[i * n + col];
            }
            fft_pow2(&mut scratch, inverse);
            for i in 0..n {
                buf[i * n + col] = scratch[i];
            }
        }
    }

    for (idx, v) in buf.iter_mut().enumerate() {
        let mi = grid.multi_index(idx);
        *v *= if (mi[0] + mi[1]) % 2 == 1 {
            -scale
        } else {
            scale
        };
    }
    buf
}

/// Riemann-sum approximation of f_hat(eta) = integral f(t) exp(-2 pi i t.eta) dt.
pub fn forward_ft(f: &SampledFunction) -> SpectralFunction {
    let values = centered_dft(&f.grid, &f.values, false, f.grid.dx_volume());
    SpectralFunction {
        grid: f.grid,
        values,
    }
}

/// Adjoint of [`forward_ft`]; `inverse_ft(forward_ft(f)) == f` to rounding.
pub fn inverse_ft(spec: &SpectralFunction) -> SampledFunction {
    let values = centered_dft(&spec.grid, &spec.values, true, spec.grid.deta_volume());
    SampledFunction {
        grid: spec.grid,
        values,
    }
}

// ---------------------------------------------------------------------------
// Fourier-Lebesgue norms
// ---------------------------------------------------------------------------

/// Discrete FL^p_s norm: `(sum <eta>^(ps) |F|^p deta^d)^(1/p)`, max-form for p = inf.
pub fn flp_norm(spec: &SpectralFunction, p: f64, s: f64) -> Result<f64, Error> {
    flp_norm_with(spec, p, s, ReductionMode::Deterministic)
}

/// [`flp_norm`] with an explicit reduction mode.
pub fn flp_norm_with(
    spec: &SpectralFunction,
    p: f64,
    s: f64,
    mode: ReductionMode,
) -> Result<f64, Error> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Lebesgue exponent must satisfy p >= 1, got {}",
            p
        )));
    }
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "weight order must be finite, got {}",
            s
        )));
    }
    let grid = spec.grid;
    let d = grid.dim();
    let weight = move |idx: usize| -> f64 {
        if s == 0.0 {
            1.0
        } else {
            let eta = grid.dual_point(idx);
            bessel_bracket(&eta[..d]).powf(s)
        }
    };

    if p.is_infinite() {
        // exact max over the grid, not a large-p limit
        let mut best = 0.0f64;
        for (idx, v) in spec.values.iter().enumerate() {
            let t = weight(idx) * v.norm();
            if t > best {
                best = t;
            }
        }
        return Ok(best);
    }

    let values = &spec.values;
    let sum = if p == 1.0 {
        exec::sum_with(grid.len(), |idx| weight(idx) * values[idx].norm(), mode)
    } else if p == 2.0 {
        exec::sum_with(
            grid.len(),
            |idx| {
                let w = weight(idx);
                w * w * values[idx].norm_sqr()
            },
            mode,
        )
    } else {
        exec::sum_with(
            grid.len(),
            |idx| weight(idx).powf(p) * values[idx].norm().powf(p),
            mode,
        )
    };
    Ok((sum * grid.deta_volume()).powf(1.0 / p))
}
