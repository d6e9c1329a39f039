//! Norms of unbounded functions as limits of truncations.
//!
//! Non-finite samples mark isolated singularities. Each marked cell is
//! modelled by a power law `|f| = B d^{-a}` on either side, with `d` the
//! distance to the node in grid spacings, fitted to the two finite
//! neighbours on that side. The truncation `min(|f|, c)` of the model is
//! discretized on geometric value levels (rounded down), so every truncated
//! value is a lower bound of the model's.

use super::{Distribution, GaugeNorm};
use crate::error::Result;
use crate::spectral::CircleFunction;

pub const DEFAULT_CAP: f64 = 1e12;
const STABLE_INCREMENT: f64 = 1e-8;
const LEVELS_PER_OCTAVE: f64 = 64.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedValue {
    Finite {
        value: f64,
        /// Truncation level at which the increment fell below tolerance.
        truncation: f64,
        doublings: usize,
    },
    Infinite {
        last_value: f64,
        truncation: f64,
        reason: String,
    },
}

impl ExtendedValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            ExtendedValue::Finite { value, .. } => Some(*value),
            ExtendedValue::Infinite { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite { .. })
    }
}

#[derive(Debug, Clone, Copy)]
struct PowerLaw {
    scale: f64,
    exponent: f64,
}

impl PowerLaw {
    /// Fraction of a half-cell (length 1/2) where the model exceeds `y`.
    fn length_above(&self, y: f64) -> f64 {
        (self.scale / y).powf(1.0 / self.exponent).min(0.5)
    }

    fn edge_value(&self) -> f64 {
        self.scale * 2f64.powf(self.exponent)
    }

    /// Atoms of `min(model, c)` on one half-cell of measure `half`.
    fn atoms(&self, c: f64, half: f64, out: &mut Vec<(f64, f64)>) {
        let edge = self.edge_value();
        if c <= edge {
            out.push((c, half));
            return;
        }
        let ratio = 2f64.powf(1.0 / LEVELS_PER_OCTAVE);
        let mut upper = c;
        let mut covered = self.length_above(c);
        out.push((c, covered * 2.0 * half));
        loop {
            let lower = upper / ratio;
            if lower <= edge {
                out.push((edge, (0.5 - covered) * 2.0 * half));
                break;
            }
            let len = self.length_above(lower);
            out.push((lower, (len - covered) * 2.0 * half));
            covered = len;
            upper = lower;
        }
    }
}

fn fit_side(mag: &[f64], node: usize, dir: isize) -> Option<PowerLaw> {
    let n = mag.len() as isize;
    let at = |k: isize| mag[(node as isize + k * dir).rem_euclid(n) as usize];
    let (near, far) = (at(1), at(2));
    if !near.is_finite() || !far.is_finite() || far <= 0.0 || near <= far {
        return None;
    }
    Some(PowerLaw {
        scale: near,
        exponent: (near / far).log2(),
    })
}

/// `sup_c α(min(|f|, c))` over truncations `c = c_0 2^k ≤ cap`, where `c_0`
/// is the largest finite sample. Reported as finite once the relative
/// increment over a doubling falls below `1e-8`.
pub fn extend_to_measurable(
    norm: &dyn GaugeNorm,
    f: &CircleFunction,
    cap: f64,
) -> Result<ExtendedValue> {
    let mag = f.moduli();
    let n = mag.len();
    let half = 0.5 / n as f64;
    let markers: Vec<usize> = (0..n).filter(|&j| !mag[j].is_finite()).collect();
    let finite: Vec<f64> = mag.iter().copied().filter(|v| v.is_finite()).collect();
    let c0 = finite.iter().fold(0.0_f64, |m, v| m.max(*v));

    if c0 > cap {
        return Ok(ExtendedValue::Infinite {
            last_value: f64::INFINITY,
            truncation: cap,
            reason: format!("largest finite sample {c0:e} exceeds the cap"),
        });
    }
    if markers.is_empty() {
        let value = norm.evaluate(f)?;
        return Ok(ExtendedValue::Finite {
            value,
            truncation: c0,
            doublings: 0,
        });
    }

    let mut models = Vec::with_capacity(2 * markers.len());
    for &j in &markers {
        for dir in [1, -1] {
            match fit_side(&mag, j, dir) {
                Some(m) => models.push(m),
                None => {
                    return Ok(ExtendedValue::Infinite {
                        last_value: f64::INFINITY,
                        truncation: c0,
                        reason: format!("no decaying power law fits the neighbours of node {j}"),
                    })
                }
            }
        }
    }

    let weight = 1.0 / n as f64;
    let value_at = |c: f64| -> Result<f64> {
        let mut atoms: Vec<(f64, f64)> = finite.iter().map(|&v| (v.min(c), weight)).collect();
        for m in &models {
            m.atoms(c, half, &mut atoms);
        }
        norm.evaluate_distribution(&Distribution::from_atoms(&atoms)?)
    };

    let mut c = c0;
    let mut prev = value_at(c)?;
    let mut doublings = 0;
    while 2.0 * c <= cap {
        c *= 2.0;
        doublings += 1;
        let value = value_at(c)?;
        if value - prev <= STABLE_INCREMENT * value {
            return Ok(ExtendedValue::Finite {
                value,
                truncation: c,
                doublings,
            });
        }
        prev = value;
    }
    Ok(ExtendedValue::Infinite {
        last_value: prev,
        truncation: c,
        reason: "truncations did not stabilize below the cap".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeNormSpec;
    use crate::spectral::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn inverse_sqrt(grid: Grid) -> CircleFunction {
        CircleFunction::from_angle_fn(grid, |t| {
            let theta = if t > PI { t - 2.0 * PI } else { t };
            Complex64::new(theta.abs().powf(-0.5), 0.0)
        })
    }

    #[test]
    fn bounded_function_equals_evaluate() {
        let g = Grid::new(256).unwrap();
        let f = CircleFunction::from_angle_fn(g, |t| Complex64::new(2.0 + t.sin(), t.cos()));
        for spec in crate::gauge::shipped_continuous_specs() {
            let ext = extend_to_measurable(&spec, &f, DEFAULT_CAP).unwrap();
            assert_eq!(ext.value(), Some(spec.evaluate(&f).unwrap()));
        }
    }

    #[test]
    fn integrable_singularity_stabilizes() {
        let g = Grid::new(4096).unwrap();
        let f = inverse_sqrt(g);
        assert!(f.samples()[0].re.is_infinite());
        let ext = extend_to_measurable(&GaugeNormSpec::lp(1.0).unwrap(), &f, DEFAULT_CAP).unwrap();
        let value = ext.value().expect("finite");
        let exact = 2.0 / PI.sqrt();
        assert!((value - exact).abs() < 1e-2, "{value} vs {exact}");
    }

    #[test]
    fn square_non_integrable_is_infinite() {
        let g = Grid::new(4096).unwrap();
        let ext = extend_to_measurable(&GaugeNormSpec::lp(2.0).unwrap(), &inverse_sqrt(g), DEFAULT_CAP)
            .unwrap();
        assert!(!ext.is_finite(), "{ext:?}");
    }

    #[test]
    fn truncations_increase() {
        let g = Grid::new(1024).unwrap();
        let f = inverse_sqrt(g);
        let spec = GaugeNormSpec::lp(1.5).unwrap();
        let mut prev = 0.0;
        for cap in [1e2, 1e3, 1e4, 1e6] {
            let v = match extend_to_measurable(&spec, &f, cap).unwrap() {
                ExtendedValue::Finite { value, .. } => value,
                ExtendedValue::Infinite { last_value, .. } => last_value,
            };
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn unfittable_marker_is_infinite() {
        let g = Grid::new(64).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 64];
        v[10] = Complex64::new(f64::NAN, 0.0);
        let f = CircleFunction::from_samples(g, v).unwrap();
        let ext = extend_to_measurable(&GaugeNormSpec::lp(1.0).unwrap(), &f, DEFAULT_CAP).unwrap();
        assert!(!ext.is_finite());
    }
}
