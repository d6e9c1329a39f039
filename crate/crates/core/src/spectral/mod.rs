//! Grid functions on the unit circle and their discrete Fourier analysis.
//!
//! A [`Grid`] discretizes normalized Haar measure on the circle by `n`
//! equispaced nodes of weight `1/n`. A [`CircleFunction`] holds samples on a
//! grid and lazily caches its [`Spectrum`], the coefficients
//! `c_k = (1/n) Σ_j f(θ_j) e^{-ikθ_j}` for `-n/2 < k <= n/2`.

mod log_modulus;

pub use log_modulus::{
    analyze_log_modulus, prepare_log_modulus, BoundaryZero, LogModulus,
    LOG_FLOOR, MAX_VANISHING_FRACTION, VANISHING_THRESHOLD,
};

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Working resolution used throughout the toolkit unless a caller asks for another.
pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Smallest admissible grid.
pub const MIN_GRID_SIZE: usize = 8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
}

/// Uniform grid `θ_j = 2πj/n` with quadrature weights `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_GRID_SIZE || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    /// The node `e^{iθ_j}`.
    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.angle(j))
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.angle(j))
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Signed frequency range `-n/2 < k <= n/2`.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        let half = (self.n / 2) as i64;
        (-half + 1)..=half
    }

    /// Position of frequency `k` in FFT storage order.
    pub fn frequency_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Signed frequency stored at FFT position `idx`.
    pub fn frequency_at(&self, idx: usize) -> i64 {
        if idx <= self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }
}

/// Build the uniform grid of size `n`.
pub fn sample_grid(n: usize) -> Result<Grid> {
    Grid::new(n)
}

/// Fourier coefficients of a grid function, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.size()],
        }
    }

    /// Spectrum with `c_k = coeff(k)` for every signed frequency.
    pub fn from_signed(grid: Grid, coeff: impl Fn(i64) -> Complex64) -> Self {
        let coeffs = (0..grid.size())
            .map(|idx| coeff(grid.frequency_at(idx)))
            .collect();
        Self { grid, coeffs }
    }

    pub fn from_fft_order(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.size() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for a grid of size {}",
                coeffs.len(),
                grid.size()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs[self.grid.frequency_index(k)]
    }

    pub fn fft_order(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn iter_signed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| (self.grid.frequency_at(idx), c))
    }

    /// `Σ |c_k|^2`, equal to the mean of `|f|^2` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_{k<0} |c_k|^2`.
    pub fn negative_energy(&self) -> f64 {
        self.iter_signed()
            .filter(|(k, _)| *k < 0)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Coefficients mapped frequency by frequency.
    pub fn map_signed(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| f(self.grid.frequency_at(idx), c))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Inverse transform back to samples.
    pub fn synthesize(&self) -> CircleFunction {
        let mut buf = self.coeffs.clone();
        fft_inverse(&mut buf);
        CircleFunction {
            grid: self.grid,
            samples: buf,
            spectrum: OnceLock::new(),
        }
    }
}

/// Complex samples of a function on the circle.
#[derive(Debug, Clone)]
pub struct CircleFunction {
    grid: Grid,
    samples: Vec<Complex64>,
    spectrum: OnceLock<Spectrum>,
}

impl PartialEq for CircleFunction {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.samples == other.samples
    }
}

impl CircleFunction {
    pub fn from_samples(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.size() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a grid of size {}",
                samples.len(),
                grid.size()
            )));
        }
        Ok(Self {
            grid,
            samples,
            spectrum: OnceLock::new(),
        })
    }

    pub fn from_real(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::from_samples(
            grid,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Sample `f(z)` at the nodes `z = e^{iθ_j}`.
    pub fn from_fn(grid: Grid, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid,
            samples: grid.points().map(f).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Sample `f(θ)` at the angles `θ_j`.
    pub fn from_angle_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            samples: grid.angles().map(f).collect(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_spectrum(spectrum: &Spectrum) -> Self {
        spectrum.synthesize()
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        Self {
            grid,
            samples: vec![c; grid.size()],
            spectrum: OnceLock::new(),
        }
    }

    /// `z^k` for any integer `k` (negative powers are `z̄^{|k|}`).
    pub fn monomial(grid: Grid, k: i64) -> Self {
        let n = grid.size() as i64;
        Self::from_samples(
            grid,
            (0..grid.size())
                .map(|j| grid.point(((k * j as i64).rem_euclid(n)) as usize))
                .collect(),
        )
        .expect("length matches grid")
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.samples
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.first_non_finite() {
            Some(index) => Err(Error::NumericInput { index }),
            None => Ok(()),
        }
    }

    /// Cached spectrum; fails on non-finite samples.
    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        self.ensure_finite()?;
        let mut buf = self.samples.clone();
        fft_forward(&mut buf);
        let scale = self.grid.weight();
        for c in &mut buf {
            *c *= scale;
        }
        Ok(self.spectrum.get_or_init(|| Spectrum {
            grid: self.grid,
            coeffs: buf,
        }))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&c| f(c)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    /// Pointwise modulus as a real-valued function.
    pub fn modulus(&self) -> Self {
        self.map(|c| Complex64::new(c.norm(), 0.0))
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm()).collect()
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c| c * s)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch(format!(
                "grid sizes {} and {}",
                self.grid.size(),
                other.grid.size()
            )));
        }
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            spectrum: OnceLock::new(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a / b)
    }

    /// Multiplication by `z^k`, a cyclic shift of the spectrum on the grid.
    pub fn shift(&self, k: i64) -> Self {
        let n = self.grid.size() as i64;
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, &c)| c * self.grid.point(((k * j as i64).rem_euclid(n)) as usize))
            .collect();
        Self {
            grid: self.grid,
            samples,
            spectrum: OnceLock::new(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Quadrature of `f dm`.
    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.grid.weight()
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).sum::<f64>() * self.grid.weight()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.weight()).sqrt()
    }

    /// Largest `|f_j - g_j|`.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    /// Largest imaginary part relative to the largest modulus (0 for the zero function).
    pub fn imaginary_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.samples.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / m
    }

    /// Real parts, after checking the function is real to relative tolerance `tol`.
    pub fn real_values(&self, tol: f64) -> Result<Vec<f64>> {
        self.ensure_finite()?;
        let ratio = self.imaginary_ratio();
        if ratio > tol {
            return Err(Error::Domain(format!(
                "expected a real-valued function, imaginary/max ratio is {ratio:e}"
            )));
        }
        Ok(self.samples.iter().map(|c| c.re).collect())
    }

    /// Values of a nonnegative real function; small negative rounding noise is clipped.
    pub fn nonnegative_values(&self) -> Result<Vec<f64>> {
        let values = self.real_values(REAL_TOLERANCE)?;
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if let Some(v) = values.iter().find(|v| **v < -REAL_TOLERANCE * scale) {
            return Err(Error::Domain(format!(
                "expected a nonnegative function, found {v}"
            )));
        }
        Ok(values.into_iter().map(|v| v.max(0.0)).collect())
    }
}

/// Relative size of imaginary parts tolerated when a real function is expected.
pub const REAL_TOLERANCE: f64 = 1e-12;

/// Fourier coefficients `c_k`, `-n/2 < k <= n/2`.
pub fn fourier_coefficients(f: &CircleFunction) -> Result<Spectrum> {
    f.spectrum().cloned()
}

/// Fejér mean `σ_m(f) = (S_0 + … + S_m)/(m+1)`.
pub fn cesaro_mean(f: &CircleFunction, m: usize) -> Result<CircleFunction> {
    let n = f.grid().size();
    if m >= n / 2 {
        return Err(Error::Resolution(format!(
            "Cesàro degree {m} needs a grid larger than {n}"
        )));
    }
    let spectrum = f.spectrum()?;
    let denom = (m + 1) as f64;
    Ok(spectrum
        .map_signed(|k, c| {
            let a = k.unsigned_abs() as usize;
            if a > m {
                Complex64::new(0.0, 0.0)
            } else {
                c * (1.0 - a as f64 / denom)
            }
        })
        .synthesize())
}

/// Projection onto the closed span of `{z^k : k >= 0}`.
pub fn riesz_projection(f: &CircleFunction) -> Result<CircleFunction> {
    Ok(f
        .spectrum()?
        .map_signed(|k, c| if k < 0 { Complex64::new(0.0, 0.0) } else { c })
        .synthesize())
}

/// Harmonic conjugate on the circle: `(Qu)_k = -i·sgn(k)·u_k`, with the
/// mean and the Nyquist coefficient sent to zero.
pub fn conjugate_function(u: &CircleFunction) -> Result<CircleFunction> {
    u.real_values(REAL_TOLERANCE)?;
    let nyquist = (u.grid().size() / 2) as i64;
    let q = u
        .spectrum()?
        .map_signed(|k, c| {
            if k == 0 || k == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, -(k.signum() as f64))
            }
        })
        .synthesize();
    Ok(q.map(|c| Complex64::new(c.re, 0.0)))
}

/// `u + iQu` for a real `u`: keeps `c_0` and `c_{n/2}`, doubles `0 < k < n/2`
/// and drops the rest, so the real part equals `u` on the grid.
pub fn analytic_completion(u: &CircleFunction) -> Result<CircleFunction> {
    u.real_values(REAL_TOLERANCE)?;
    let nyquist = (u.grid().size() / 2) as i64;
    let real_mean = u.spectrum()?.coeff(0).re;
    Ok(u
        .spectrum()?
        .map_signed(|k, c| match k {
            0 => Complex64::new(real_mean, 0.0),
            k if k > 0 && k < nyquist => c * 2.0,
            k if k == nyquist => Complex64::new(c.re, 0.0),
            _ => Complex64::new(0.0, 0.0),
        })
        .synthesize())
}

/// Outer function `g(z) = exp ∫ (w+z)/(w-z) log φ(w) dm(w)` at an interior
/// point, by the trapezoid rule on the grid. Boundary zeros of integer order
/// found by [`prepare_log_modulus`] are factored out and restored exactly.
pub fn herglotz_evaluate_interior(phi: &CircleFunction, z: Complex64) -> Result<Complex64> {
    let log_mod = prepare_log_modulus(phi)?;
    log_mod.evaluate_interior(z)
}
