//! Hardy-class membership, outer functions and inner-outer factorization.
//!
//! Outer functions are built from boundary samples: `g = exp(L + iQL)` with
//! `L = log φ`, where boundary zeros of integer order are divided out of
//! `φ` first and restored exactly (see [`crate::spectral::LogModulus`]).
//! The analytic completion keeps the mean of `L` real, so `g(0) > 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauge::{extend_to_measurable, ExtendedValue, GaugeNorm, DEFAULT_CAP};
use crate::spectral::{analyze_log_modulus, herglotz_evaluate_interior, CircleFunction, LogModulus};

/// Negative-frequency energy allowed, relative to total energy, for a
/// function to count as analytic.
pub const ANALYTIC_TOLERANCE: f64 = 1e-8;

/// Quotients are only formed where the divisor is at least this large.
pub const DIVISION_GUARD: f64 = 1e-10;

const FILL_RADIUS: i64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub negative_energy: f64,
    pub energy: f64,
    /// `negative_energy <= tol * energy`.
    pub analytic: bool,
    /// `None` when the norm is infinite.
    pub norm_value: Option<f64>,
    pub member: bool,
}

/// Two-sided membership test: analytic (negative spectrum below `tol`
/// relative to the total energy) and of finite norm.
pub fn is_in_halpha(f: &CircleFunction, norm: &dyn GaugeNorm, tol: f64) -> Result<MembershipReport> {
    if !norm.is_continuous() {
        return Err(Error::UnsupportedNorm(format!(
            "{} is not a continuous norm",
            norm.name()
        )));
    }
    let spectrum = f.spectrum()?;
    let negative_energy = spectrum.negative_energy();
    let energy = spectrum.energy();
    let analytic = negative_energy <= tol * energy;
    let norm_value = match extend_to_measurable(norm, f, DEFAULT_CAP)? {
        ExtendedValue::Finite { value, .. } => Some(value),
        ExtendedValue::Infinite { .. } => None,
    };
    Ok(MembershipReport {
        negative_energy,
        energy,
        analytic,
        member: analytic && norm_value.is_some(),
        norm_value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogIntegrability {
    /// Quadrature of `log φ` with boundary zeros integrated exactly.
    pub mean_log: f64,
    /// Plain trapezoid rule on `log max(φ, floor)`.
    pub floored_mean_log: f64,
    pub vanishing_fraction: f64,
    pub boundary_zeros: usize,
    pub passed: bool,
}

pub fn log_integrability(phi: &CircleFunction) -> Result<LogIntegrability> {
    let lm = analyze_log_modulus(phi)?;
    Ok(LogIntegrability {
        mean_log: lm.mean_log(),
        floored_mean_log: lm.floored_mean_log(),
        vanishing_fraction: lm.vanishing_fraction(),
        boundary_zeros: lm.boundary_zeros().len(),
        passed: lm.is_log_integrable(),
    })
}

fn gated_log_modulus(phi: &CircleFunction) -> Result<LogModulus> {
    let lm = analyze_log_modulus(phi)?;
    lm.check_integrable().map_err(|e| Error::VanishingModulus(e.to_string()))?;
    Ok(lm)
}

fn outer_parts(phi: &CircleFunction) -> Result<(LogModulus, CircleFunction)> {
    let lm = gated_log_modulus(phi)?;
    let g = lm.outer_boundary_values()?;
    // the completion already makes g(0) real; remove any rounding phase
    let c0 = g.spectrum()?.coeff(0);
    let g = if c0.im != 0.0 && c0.norm() > 0.0 {
        g.scale(c0.conj() / c0.norm())
    } else {
        g
    };
    Ok((lm, g))
}

/// Boundary values of the outer function with modulus `phi`, normalized
/// so that its value at the origin is positive.
pub fn outer_from_modulus(phi: &CircleFunction) -> Result<CircleFunction> {
    outer_parts(phi).map(|(_, g)| g)
}

/// Value at the origin of the outer function with modulus `phi`.
pub fn outer_at_origin(phi: &CircleFunction) -> Result<f64> {
    let lm = gated_log_modulus(phi)?;
    let g0 = herglotz_evaluate_interior(phi, Complex64::new(0.0, 0.0))?;
    debug_assert!((g0.re - lm.mean_log().exp()).abs() <= 1e-12 * g0.re.abs());
    Ok(g0.re)
}

#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub unimodular: CircleFunction,
    pub outer: CircleFunction,
    /// `max |f - u g|`.
    pub residual_reconstruction: f64,
    /// `max ||u| - 1|`.
    pub residual_unimodularity: f64,
    /// `Σ_{k<0} |ĝ_k|^2`.
    pub outer_negative_energy: f64,
    /// Membership of the inverse of the outer part, when it was checked.
    pub inverse_membership: Option<MembershipReport>,
}

impl FactorizationResult {
    fn new(
        f: &CircleFunction,
        unimodular: CircleFunction,
        outer: CircleFunction,
        inverse_membership: Option<MembershipReport>,
    ) -> Result<Self> {
        let residual_reconstruction = f.max_distance(&unimodular.try_mul(&outer)?)?;
        let residual_unimodularity = unimodular
            .samples()
            .iter()
            .fold(0.0_f64, |m, u| m.max((u.norm() - 1.0).abs()));
        let outer_negative_energy = outer.spectrum()?.negative_energy();
        Ok(Self {
            unimodular,
            outer,
            residual_reconstruction,
            residual_unimodularity,
            outer_negative_energy,
            inverse_membership,
        })
    }
}

/// `f / g`, filling nodes at detected boundary zeros of `g` by
/// interpolating the quotient from its neighbours.
fn guarded_quotient(f: &CircleFunction, g: &CircleFunction, lm: &LogModulus) -> Result<CircleFunction> {
    let n = g.len() as i64;
    let small: Vec<usize> = (0..g.len())
        .filter(|&j| g.samples()[j].norm() < DIVISION_GUARD)
        .collect();
    let zero_nodes: Vec<usize> = lm.boundary_zeros().iter().map(|z| z.node).collect();
    if let Some(j) = small.iter().find(|j| !zero_nodes.contains(j)) {
        return Err(Error::VanishingModulus(format!(
            "outer factor below {DIVISION_GUARD:e} at node {j}"
        )));
    }
    let mut q: Vec<Complex64> = f
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(a, b)| a / b)
        .collect();
    let is_small = |j: i64| small.contains(&(j.rem_euclid(n) as usize));
    for &j0 in &small {
        let j = j0 as i64;
        let offsets: Vec<i64> = (1..=FILL_RADIUS)
            .flat_map(|d| [-d, d])
            .filter(|&d| !is_small(j + d))
            .collect();
        q[j0] = offsets
            .iter()
            .map(|&d| {
                let weight: f64 = offsets
                    .iter()
                    .filter(|&&e| e != d)
                    .map(|&e| e as f64 / (e - d) as f64)
                    .product();
                q[(j + d).rem_euclid(n) as usize] * weight
            })
            .sum();
    }
    CircleFunction::from_samples(f.grid(), q)
}

/// `f = u g` with `g = outer(|f|)` and `u` unimodular, for any `f` whose
/// modulus is log-integrable.
pub fn unimodular_outer_split(f: &CircleFunction) -> Result<(CircleFunction, CircleFunction)> {
    let (lm, g) = outer_parts(&f.modulus())?;
    let u = guarded_quotient(f, &g, &lm)?;
    Ok((u, g))
}

/// `f = u g` with `g` outer and `u` inner.
pub fn inner_outer_factorize(f: &CircleFunction) -> Result<FactorizationResult> {
    let spectrum = f.spectrum()?;
    let (neg, total) = (spectrum.negative_energy(), spectrum.energy());
    if neg > ANALYTIC_TOLERANCE * total {
        return Err(Error::NotHardy(format!(
            "negative-frequency energy {neg:e} exceeds {ANALYTIC_TOLERANCE:e} of {total:e}"
        )));
    }
    let (u, g) = unimodular_outer_split(f)?;
    FactorizationResult::new(f, u, g, None)
}

/// `k = w h` with `w` unimodular, `h` bounded outer and `1/h` of finite norm.
pub fn factorize_inverse_bounded(k: &CircleFunction, norm: &dyn GaugeNorm) -> Result<FactorizationResult> {
    k.ensure_finite()?;
    let inverse = k.map(|c| Complex64::new(1.0, 0.0) / c);
    match extend_to_measurable(norm, &inverse, DEFAULT_CAP)? {
        ExtendedValue::Infinite { reason, truncation, .. } => {
            return Err(Error::InverseUnbounded(format!(
                "{} of 1/k diverges ({reason}, truncation {truncation:e})",
                norm.name()
            )))
        }
        ExtendedValue::Finite { .. } => {}
    }
    if let Some(j) = inverse.first_non_finite() {
        return Err(Error::InverseUnbounded(format!(
            "k vanishes at node {j}, so 1/k is not bounded on the grid"
        )));
    }
    let g = outer_from_modulus(&inverse.modulus())?;
    let h = g.map(|c| Complex64::new(1.0, 0.0) / c);
    let w = k.try_mul(&g)?;
    let membership = is_in_halpha(&g, norm, ANALYTIC_TOLERANCE)?;
    FactorizationResult::new(k, w, h, Some(membership))
}
