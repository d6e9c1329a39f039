//! Logarithm of a sampled modulus, prepared for harmonic extension.
//!
//! Samples are floored at [`LOG_FLOOR`] before taking logs. Nodes below
//! [`VANISHING_THRESHOLD`] count as vanishing; more than
//! [`MAX_VANISHING_FRACTION`] of them means the modulus is treated as not
//! log-integrable.
//!
//! An isolated vanishing node whose neighbours grow like `|θ-θ0|^m` for a
//! small integer `m` is treated as a boundary zero of order `m`: the factor
//! `|1 - e^{-iθ0} z|^m` is divided out, the log of the smooth remainder is
//! interpolated across the node, and the factor is restored exactly wherever
//! the outer function is evaluated. Since `∫ log|1 - e^{-iθ0} w| dm(w) = 0`
//! the factor does not change the geometric mean.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{analytic_completion, CircleFunction, Grid};
use crate::error::{Error, Result};

pub const LOG_FLOOR: f64 = 1e-12;
pub const VANISHING_THRESHOLD: f64 = 1e-8;
pub const MAX_VANISHING_FRACTION: f64 = 1e-3;

const MAX_ZERO_ORDER: u32 = 8;
const ORDER_TOLERANCE: f64 = 0.05;
const FILL_RADIUS: i64 = 4;

/// Boundary zero `(1 - e^{-iθ0} z)^order` located at a grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryZero {
    pub node: usize,
    pub order: u32,
}

/// Log of a modulus with detected boundary zeros divided out.
#[derive(Debug, Clone)]
pub struct LogModulus {
    grid: Grid,
    vanishing: Vec<usize>,
    zeros: Vec<BoundaryZero>,
    log_values: Vec<f64>,
    floored_mean: f64,
}

impl LogModulus {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Nodes where the modulus is below [`VANISHING_THRESHOLD`].
    pub fn vanishing_nodes(&self) -> &[usize] {
        &self.vanishing
    }

    pub fn vanishing_fraction(&self) -> f64 {
        self.vanishing.len() as f64 / self.grid.size() as f64
    }

    pub fn boundary_zeros(&self) -> &[BoundaryZero] {
        &self.zeros
    }

    /// `log ψ` on the grid, where `φ = ψ · Π|1 - e^{-iθ0} w|^m`.
    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// Quadrature of `log φ dm` with boundary zeros accounted for exactly.
    pub fn mean_log(&self) -> f64 {
        self.log_values.iter().sum::<f64>() * self.grid.weight()
    }

    /// Plain trapezoid rule on `log max(φ, LOG_FLOOR)`.
    pub fn floored_mean_log(&self) -> f64 {
        self.floored_mean
    }

    /// Vanishing nodes not accounted for by a detected boundary zero.
    pub fn unresolved_fraction(&self) -> f64 {
        (self.vanishing.len() - self.zeros.len()) as f64 / self.grid.size() as f64
    }

    pub fn is_log_integrable(&self) -> bool {
        self.unresolved_fraction() <= MAX_VANISHING_FRACTION
    }

    pub fn check_integrable(&self) -> Result<()> {
        if self.is_log_integrable() {
            Ok(())
        } else {
            Err(Error::NotLogIntegrable {
                vanishing: self.vanishing.len(),
                total: self.grid.size(),
                threshold: VANISHING_THRESHOLD,
            })
        }
    }

    /// `Π (1 - e^{-iθ0} z)^m` over the detected boundary zeros.
    pub fn zero_factor(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, bz| {
            acc * (Complex64::new(1.0, 0.0) - self.grid.point(bz.node).conj() * z)
                .powu(bz.order)
        })
    }

    /// Boundary values of the outer function with modulus `φ`.
    pub fn outer_boundary_values(&self) -> Result<CircleFunction> {
        let l = CircleFunction::from_real(self.grid, self.log_values.clone())?;
        let h = analytic_completion(&l)?;
        let grid = self.grid;
        let samples = h
            .samples()
            .iter()
            .enumerate()
            .map(|(j, v)| v.exp() * self.zero_factor(grid.point(j)))
            .collect();
        CircleFunction::from_samples(grid, samples)
    }

    /// Outer function at an interior point by the trapezoid rule.
    pub fn evaluate_interior(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        if !r.is_finite() || r >= 1.0 {
            return Err(Error::Domain(format!(
                "point {z} is not inside the unit disc"
            )));
        }
        let limit = 1.0 - self.grid.weight();
        if r > limit {
            return Err(Error::NearBoundary { radius: r, limit });
        }
        let integral: Complex64 = self
            .grid
            .points()
            .zip(&self.log_values)
            .map(|(w, &l)| (w + z) / (w - z) * l)
            .sum::<Complex64>()
            * self.grid.weight();
        Ok(integral.exp() * self.zero_factor(z))
    }
}

/// Log-modulus of a nonnegative function without enforcing integrability.
pub fn analyze_log_modulus(phi: &CircleFunction) -> Result<LogModulus> {
    let values = phi.nonnegative_values()?;
    Ok(analyze_values(phi.grid(), &values))
}

/// Log-modulus of a nonnegative function; fails when too many nodes vanish.
pub fn prepare_log_modulus(phi: &CircleFunction) -> Result<LogModulus> {
    let lm = analyze_log_modulus(phi)?;
    lm.check_integrable()?;
    Ok(lm)
}

pub(crate) fn analyze_values(grid: Grid, values: &[f64]) -> LogModulus {
    let n = grid.size();
    let at = |j: i64| values[j.rem_euclid(n as i64) as usize];
    let vanishing: Vec<usize> = (0..n).filter(|&j| values[j] < VANISHING_THRESHOLD).collect();
    let is_vanishing = |j: i64| at(j) < VANISHING_THRESHOLD;

    let floored: Vec<f64> = values.iter().map(|v| v.max(LOG_FLOOR).ln()).collect();
    let floored_mean = floored.iter().sum::<f64>() / n as f64;

    let mut zeros = Vec::new();
    for &j0 in &vanishing {
        let j = j0 as i64;
        if (1..=2).any(|d| is_vanishing(j + d) || is_vanishing(j - d)) {
            continue;
        }
        let side = |s: i64| {
            let (v1, v2) = (at(j + s), at(j + 2 * s));
            (v2 / v1).log2()
        };
        let (a, b) = (side(1), side(-1));
        let m = a.round();
        if m < 1.0
            || m > MAX_ZERO_ORDER as f64
            || (a - m).abs() > ORDER_TOLERANCE
            || (b - m).abs() > ORDER_TOLERANCE
        {
            continue;
        }
        zeros.push(BoundaryZero {
            node: j0,
            order: m as u32,
        });
    }

    let mut log_values = floored;
    for bz in &zeros {
        let m = bz.order as f64;
        for (j, l) in log_values.iter_mut().enumerate() {
            if j == bz.node {
                continue;
            }
            let d = (j as i64 - bz.node as i64).rem_euclid(n as i64) as f64;
            *l -= m * (2.0 * (PI * d / n as f64).sin()).abs().ln();
        }
    }
    for bz in &zeros {
        let j = bz.node as i64;
        let offsets: Vec<i64> = (1..=FILL_RADIUS)
            .flat_map(|d| [-d, d])
            .filter(|&d| !is_vanishing(j + d))
            .collect();
        let filled = offsets
            .iter()
            .map(|&d| {
                let weight: f64 = offsets
                    .iter()
                    .filter(|&&e| e != d)
                    .map(|&e| e as f64 / (e - d) as f64)
                    .product();
                weight * log_values[(j + d).rem_euclid(n as i64) as usize]
            })
            .sum();
        log_values[bz.node] = filled;
    }

    LogModulus {
        grid,
        vanishing,
        zeros,
        log_values,
        floored_mean,
    }
}
