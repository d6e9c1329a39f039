use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GaugeNorm;
use crate::error::{Error, Result};
use crate::spectral::{CircleFunction, Grid};

/// Grid used for the random simple functions of [`validate_axioms`].
const VALIDATION_GRID: usize = 64;
const MAX_LEVEL_SETS: usize = 6;

/// First violation of a check.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub trial: usize,
    pub description: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub evaluated: usize,
    pub failures: usize,
    /// Largest amount by which `lhs` exceeded `rhs`, scaled by the inputs.
    pub worst_excess: f64,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            evaluated: 0,
            failures: 0,
            worst_excess: 0.0,
            witness: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Record `lhs ≤ rhs` up to `slack`.
    fn record_le(&mut self, trial: usize, lhs: f64, rhs: f64, slack: f64, what: impl FnOnce() -> String) {
        self.evaluated += 1;
        let excess = lhs - rhs;
        if excess > self.worst_excess {
            self.worst_excess = excess;
        }
        if excess > slack || lhs.is_nan() || rhs.is_nan() {
            self.fail(trial, lhs, rhs, what());
        }
    }

    fn record_eq(&mut self, trial: usize, lhs: f64, rhs: f64, what: impl FnOnce() -> String) {
        self.evaluated += 1;
        let excess = (lhs - rhs).abs();
        if excess > self.worst_excess {
            self.worst_excess = excess;
        }
        if lhs != rhs {
            self.fail(trial, lhs, rhs, what());
        }
    }

    fn record_error(&mut self, trial: usize, err: &Error) {
        self.evaluated += 1;
        self.fail(trial, f64::NAN, f64::NAN, format!("evaluation failed: {err}"));
    }

    fn fail(&mut self, trial: usize, lhs: f64, rhs: f64, description: String) {
        self.failures += 1;
        if self.witness.is_none() {
            self.witness = Some(Witness {
                trial,
                description,
                lhs,
                rhs,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub norm: String,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            return format!("{}: all checks passed over {} trials", self.norm, self.trials);
        }
        let failed: Vec<String> = self
            .failed_checks()
            .map(|c| match &c.witness {
                Some(w) => format!("{} (trial {}: {})", c.name, w.trial, w.description),
                None => c.name.to_string(),
            })
            .collect();
        format!("{}: failed {}", self.norm, failed.join("; "))
    }
}

fn random_simple(rng: &mut ChaCha8Rng, grid: Grid) -> CircleFunction {
    let levels: Vec<Complex64> = (0..rng.gen_range(1..=MAX_LEVEL_SETS))
        .map(|_| Complex64::from_polar(rng.gen_range(0.01..10.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let zero_chance = rng.gen_range(0.0..0.5);
    CircleFunction::from_samples(
        grid,
        (0..grid.size())
            .map(|_| {
                if rng.gen_bool(zero_chance) {
                    Complex64::new(0.0, 0.0)
                } else {
                    levels[rng.gen_range(0..levels.len())]
                }
            })
            .collect(),
    )
    .expect("length matches grid")
}

fn random_multiplier(rng: &mut ChaCha8Rng, grid: Grid) -> CircleFunction {
    let bound = rng.gen_range(0.1..3.0);
    CircleFunction::from_samples(
        grid,
        (0..grid.size())
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..bound), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect(),
    )
    .expect("length matches grid")
}

/// Randomized check of the norm axioms on simple functions.
///
/// Checks normalization `α(1) = 1` and the gauge property `α(f) = α(|f|)`
/// exactly, and with the norm's relative tolerance: `‖f‖₁ ≤ α(f)`,
/// monotonicity, `α(fg) ≤ α(f)‖g‖_∞`, `α(g) ≤ ‖g‖_∞`, the triangle
/// inequality and absolute homogeneity. Failures are reported, not raised.
pub fn validate_axioms(norm: &dyn GaugeNorm, trials: usize, seed: u64) -> ValidationReport {
    let grid = Grid::new(VALIDATION_GRID).expect("valid grid");
    let tol = norm.tolerance();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut normalization = AxiomCheck::new("normalization");
    let mut gauge = AxiomCheck::new("gauge");
    let mut domination = AxiomCheck::new("l1_domination");
    let mut monotone = AxiomCheck::new("monotonicity");
    let mut multiplicative = AxiomCheck::new("multiplicative_bound");
    let mut sup_bound = AxiomCheck::new("sup_bound");
    let mut triangle = AxiomCheck::new("triangle");
    let mut homogeneity = AxiomCheck::new("homogeneity");

    let one = CircleFunction::constant(grid, Complex64::new(1.0, 0.0));
    match norm.evaluate(&one) {
        Ok(v) => normalization.record_eq(0, v, 1.0, || "f = 1".into()),
        Err(e) => normalization.record_error(0, &e),
    }

    for trial in 0..trials {
        let f = random_simple(&mut rng, grid);
        let g = random_multiplier(&mut rng, grid);
        let boost = CircleFunction::from_real(
            grid,
            (0..grid.size()).map(|_| 1.0 + rng.gen_range(0.0..1.0)).collect(),
        )
        .expect("length matches grid");
        let c = Complex64::from_polar(rng.gen_range(0.0..5.0), rng.gen_range(0.0..std::f64::consts::TAU));

        let dominating = f.try_mul(&boost).expect("same grid");
        let product = f.try_mul(&g).expect("same grid");
        let sum = f.try_add(&g).expect("same grid");
        let scaled = f.scale(c);

        let values = (|| -> Result<[f64; 7]> {
            Ok([
                norm.evaluate(&f)?,
                norm.evaluate(&f.modulus())?,
                norm.evaluate(&g)?,
                norm.evaluate(&dominating)?,
                norm.evaluate(&product)?,
                norm.evaluate(&sum)?,
                norm.evaluate(&scaled)?,
            ])
        })();
        let [af, af_abs, ag, adom, aprod, asum, ascaled] = match values {
            Ok(v) => v,
            Err(e) => {
                for check in [
                    &mut gauge,
                    &mut domination,
                    &mut monotone,
                    &mut multiplicative,
                    &mut sup_bound,
                    &mut triangle,
                    &mut homogeneity,
                ] {
                    check.record_error(trial, &e);
                }
                continue;
            }
        };
        let f_sup = f.max_abs();
        let g_sup = g.max_abs();

        gauge.record_eq(trial, af, af_abs, || "α(f) ≠ α(|f|)".into());
        domination.record_le(trial, f.l1_norm(), af, tol * f_sup, || {
            "‖f‖₁ > α(f)".into()
        });
        monotone.record_le(trial, af, adom, tol * 2.0 * f_sup, || {
            "|f| ≤ |g| but α(f) > α(g)".into()
        });
        multiplicative.record_le(trial, aprod, af * g_sup, tol * f_sup * g_sup, || {
            "α(fg) > α(f)‖g‖_∞".into()
        });
        sup_bound.record_le(trial, ag, g_sup, tol * g_sup, || "α(g) > ‖g‖_∞".into());
        triangle.record_le(trial, asum, af + ag, tol * (f_sup + g_sup), || {
            "α(f+g) > α(f)+α(g)".into()
        });
        let expected = c.norm() * af;
        homogeneity.record_le(
            trial,
            (ascaled - expected).abs(),
            0.0,
            tol * c.norm() * f_sup,
            || format!("α(cf) ≠ |c|α(f) for c = {c}"),
        );
    }

    ValidationReport {
        norm: norm.name(),
        trials,
        seed,
        tolerance: tol,
        checks: vec![
            normalization,
            gauge,
            domination,
            monotone,
            multiplicative,
            sup_bound,
            triangle,
            homogeneity,
        ],
    }
}

/// `α(χ_E)` for arcs `E` starting at angle 0 with the requested measures.
pub fn continuity_modulus(
    norm: &dyn GaugeNorm,
    grid: Grid,
    measures: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let n = grid.size();
    measures
        .iter()
        .map(|&t| {
            let count = t * n as f64;
            let rounded = count.round();
            if !(t > 0.0 && t <= 1.0) || (count - rounded).abs() > 1e-9 * n as f64 {
                return Err(Error::Resolution(format!(
                    "measure {t} is not a multiple of 1/{n}"
                )));
            }
            let count = rounded as usize;
            let chi = CircleFunction::from_real(
                grid,
                (0..n).map(|j| if j < count { 1.0 } else { 0.0 }).collect(),
            )?;
            Ok((t, norm.evaluate(&chi)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityProbe {
    pub points: Vec<(f64, f64)>,
    pub continuous: bool,
}

/// Evaluates arcs of measure `2^{-1}, …, 2^{-10}` and calls the norm
/// continuous when the values never increase and the last is below half the first.
pub fn probe_continuity(norm: &dyn GaugeNorm, grid: Grid) -> Result<ContinuityProbe> {
    let levels = 10.min(grid.size().trailing_zeros() as i32);
    let measures: Vec<f64> = (1..=levels).map(|k| 0.5f64.powi(k)).collect();
    let points = continuity_modulus(norm, grid, &measures)?;
    let values: Vec<f64> = points.iter().map(|p| p.1).collect();
    let decreasing = values.windows(2).all(|w| w[1] <= w[0]);
    let continuous = decreasing && values[values.len() - 1] < 0.5 * values[0];
    Ok(ContinuityProbe { points, continuous })
}
