//! Shift-invariant subspaces generated by a function, their classification
//! as simply or doubly invariant, and bounded approximation of members.
//!
//! A model works in the truncated Fourier space spanned by `z^k`,
//! `|k| <= M`. The vectors are the windowed spectra of `z^s f` for
//! `0 <= s <= N`, read off exactly from the spectrum of `f`, and
//! orthonormalized by classical Gram-Schmidt with reorthogonalization.
//! Vectors whose residual falls below `1e-10` of their norm are dropped.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauge::GaugeNorm;
use crate::hardy::{
    factorize_inverse_bounded, is_in_halpha, log_integrability, unimodular_outer_split,
    LogIntegrability, ANALYTIC_TOLERANCE,
};
use crate::spectral::{cesaro_mean, CircleFunction, Grid};

pub const DROP_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_N_BASIS: usize = 64;
pub const DEFAULT_M_TRUNC: usize = 1024;
pub const DEFAULT_TAU_DOUBLY: f64 = 1e-6;
/// Nodes with `|f| > E_MASK_THRESHOLD · max|f|` belong to `E`.
pub const E_MASK_THRESHOLD: f64 = 1e-8;
pub const FORWARD_TOLERANCE: f64 = 1e-8;
pub const UNIMODULAR_TOLERANCE: f64 = 1e-8;
const ZERO_GENERATOR: f64 = 1e-12;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Windowed spectrum of `z^shift f` on `-m..=m`.
fn window(f: &CircleFunction, shift: i64, m: usize) -> Result<Vec<Complex64>> {
    let spectrum = f.spectrum()?;
    let m = m as i64;
    Ok((-m..=m).map(|k| spectrum.coeff(k - shift)).collect())
}

fn check_truncation(grid: Grid, n_basis: usize, m_trunc: usize) -> Result<()> {
    let half = grid.size() / 2;
    if n_basis == 0 || m_trunc == 0 || n_basis >= m_trunc || m_trunc + n_basis + 1 >= half {
        return Err(Error::Resolution(format!(
            "truncation (N = {n_basis}, M = {m_trunc}) needs 0 < N < M and M + N + 1 < {half}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SubspaceModel {
    generators: Vec<CircleFunction>,
    n_basis: usize,
    m_trunc: usize,
    basis: Vec<Vec<Complex64>>,
    /// `(generator, degree)` of each candidate vector that was kept.
    retained: Vec<(usize, usize)>,
    conditioning: f64,
}

/// Model of the closed span of `{z^s f : 0 <= s <= n_basis}`.
pub fn build_cyclic_subspace(f: &CircleFunction, n_basis: usize, m_trunc: usize) -> Result<SubspaceModel> {
    build_subspace(std::slice::from_ref(f), n_basis, m_trunc)
}

/// Joint model of several generators.
pub fn build_subspace(generators: &[CircleFunction], n_basis: usize, m_trunc: usize) -> Result<SubspaceModel> {
    let first = generators
        .first()
        .ok_or_else(|| Error::DegenerateGenerator("no generators".into()))?;
    let grid = first.grid();
    for (i, g) in generators.iter().enumerate() {
        if g.grid() != grid {
            return Err(Error::ShapeMismatch("generators live on different grids".into()));
        }
        g.ensure_finite()?;
        if g.max_abs() <= ZERO_GENERATOR {
            return Err(Error::DegenerateGenerator(format!(
                "generator {i} has max modulus {:e}",
                g.max_abs()
            )));
        }
    }
    check_truncation(grid, n_basis, m_trunc)?;

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut retained = Vec::new();
    let mut kept_columns = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        for s in 0..=n_basis {
            let v = window(g, s as i64, m_trunc)?;
            let size = norm2(&v);
            if size == 0.0 {
                continue;
            }
            let mut r = v.clone();
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &r);
                    r.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let rn = norm2(&r);
            if rn < DROP_TOLERANCE * size {
                continue;
            }
            r.iter_mut().for_each(|x| *x /= rn);
            basis.push(r);
            retained.push((i, s));
            kept_columns.push(v.into_iter().map(|x| x / size).collect::<Vec<_>>());
        }
    }
    if basis.is_empty() {
        return Err(Error::DegenerateGenerator(
            "generator has no spectrum inside the truncation window".into(),
        ));
    }
    // A = QR with Q orthonormal, so A and R share singular values.
    let k = kept_columns.len();
    let r = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &kept_columns[j]));
    let sv = r.singular_values();
    let conditioning = sv
        .iter()
        .fold(f64::INFINITY, |m, s| m.min(*s));

    Ok(SubspaceModel {
        generators: generators.to_vec(),
        n_basis,
        m_trunc,
        basis,
        retained,
        conditioning,
    })
}

impl SubspaceModel {
    pub fn generators(&self) -> &[CircleFunction] {
        &self.generators
    }

    pub fn grid(&self) -> Grid {
        self.generators[0].grid()
    }

    pub fn truncation(&self) -> (usize, usize) {
        (self.n_basis, self.m_trunc)
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Orthonormal basis in coefficient order `-M..=M`.
    pub fn orthonormal_basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn retained_degrees(&self) -> &[(usize, usize)] {
        &self.retained
    }

    /// Smallest singular value of the retained, column-normalized vectors.
    pub fn conditioning(&self) -> f64 {
        self.conditioning
    }

    /// Windowed coefficients, split into projection and residual.
    fn project(&self, v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, &r);
                r.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let p = v.iter().zip(&r).map(|(a, b)| a - b).collect();
        (p, r)
    }

    fn windowed(&self, g: &CircleFunction) -> Result<Vec<Complex64>> {
        if g.grid() != self.grid() {
            return Err(Error::ShapeMismatch(format!(
                "function on {} nodes, model on {}",
                g.len(),
                self.grid().size()
            )));
        }
        window(g, 0, self.m_trunc)
    }

    /// Norm of `g` inside the truncation window.
    pub fn window_norm(&self, g: &CircleFunction) -> Result<f64> {
        Ok(norm2(&self.windowed(g)?))
    }

    /// Norm of the projection of `g` onto the model.
    pub fn projection_norm(&self, g: &CircleFunction) -> Result<f64> {
        Ok(norm2(&self.project(&self.windowed(g)?).0))
    }

    /// `dist(z̄ f_i, W) / ‖f_i‖` for each generator.
    pub fn backward_distances(&self) -> Result<Vec<f64>> {
        self.generators
            .iter()
            .map(|f| Ok(distance_to_subspace(&f.shift(-1), self)? / self.window_norm(f)?))
            .collect()
    }

    /// `dist(z f_i, W) / ‖f_i‖` for each generator.
    pub fn forward_distances(&self) -> Result<Vec<f64>> {
        self.generators
            .iter()
            .map(|f| Ok(distance_to_subspace(&f.shift(1), self)? / self.window_norm(f)?))
            .collect()
    }
}

/// ℓ² distance from the windowed spectrum of `g` to the model.
pub fn distance_to_subspace(g: &CircleFunction, model: &SubspaceModel) -> Result<f64> {
    let v = model.windowed(g)?;
    Ok(norm2(&model.project(&v).1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    pub n_basis: usize,
    pub m_trunc: usize,
    pub tau_doubly: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            n_basis: DEFAULT_N_BASIS,
            m_trunc: DEFAULT_M_TRUNC,
            tau_doubly: DEFAULT_TAU_DOUBLY,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    DoublyInvariant { e_mask: Vec<bool> },
    SimplyInvariant { phi: CircleFunction },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::DoublyInvariant { .. } => "doubly",
            Verdict::SimplyInvariant { .. } => "simply",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Certificate {
    /// `dist(z̄ f, W) / ‖f‖`.
    pub dist_backward: f64,
    /// `dist(z f, W) / ‖f‖`.
    pub dist_forward: f64,
    /// `max ||φ| - 1|`, zero for the doubly invariant branch.
    pub phi_unimodularity: f64,
    /// `dist(f, span{z^s φ}) / ‖f‖`, zero for the doubly invariant branch.
    pub regeneration_residual: f64,
    pub log_integrability: LogIntegrability,
    pub model_dimension: usize,
    pub conditioning: f64,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub params: ClassifyParams,
}

/// Decide whether `span{z^s f}` is doubly (`χ_E L`) or simply (`φ H`)
/// invariant, from the distance of `z̄ f` to the model, and cross-check
/// the decision against the log-integrability of `|f|`.
pub fn classify(f: &CircleFunction, norm: &dyn GaugeNorm, params: ClassifyParams) -> Result<Classification> {
    if !norm.is_continuous() {
        return Err(Error::UnsupportedNorm(format!(
            "{} is not a continuous norm",
            norm.name()
        )));
    }
    let model = build_cyclic_subspace(f, params.n_basis, params.m_trunc)?;
    let dist_backward = model.backward_distances()?[0];
    let dist_forward = model.forward_distances()?[0];
    let log_report = log_integrability(&f.modulus())?;
    let doubly = dist_backward < params.tau_doubly;

    if doubly == log_report.passed {
        return Err(Error::InconsistentCrossCheck(format!(
            "backward distance {dist_backward:e} (threshold {:e}) says {}, but the log-integrability gate {} (vanishing fraction {:e})",
            params.tau_doubly,
            if doubly { "doubly invariant" } else { "simply invariant" },
            if log_report.passed { "passes" } else { "fails" },
            log_report.vanishing_fraction,
        )));
    }

    let certificate = |phi_unimodularity, regeneration_residual| Certificate {
        dist_backward,
        dist_forward,
        phi_unimodularity,
        regeneration_residual,
        log_integrability: log_report.clone(),
        model_dimension: model.dimension(),
        conditioning: model.conditioning(),
    };

    if doubly {
        let cut = E_MASK_THRESHOLD * f.max_abs();
        let e_mask = f.samples().iter().map(|v| v.norm() > cut).collect();
        return Ok(Classification {
            verdict: Verdict::DoublyInvariant { e_mask },
            certificate: certificate(0.0, 0.0),
            params,
        });
    }

    let (phi, _) = unimodular_outer_split(f)?;
    let phi_unimodularity = unimodularity(&phi);
    let regen = build_cyclic_subspace(&phi, params.n_basis, params.m_trunc)?;
    let regeneration_residual = distance_to_subspace(f, &regen)? / model.window_norm(f)?;
    Ok(Classification {
        verdict: Verdict::SimplyInvariant { phi },
        certificate: certificate(phi_unimodularity, regeneration_residual),
        params,
    })
}

fn unimodularity(u: &CircleFunction) -> f64 {
    u.samples()
        .iter()
        .fold(0.0_f64, |m, v| m.max((v.norm() - 1.0).abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CertificateCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn at_most(&mut self, name: &'static str, value: f64, tolerance: f64) {
        self.checks.push(CertificateCheck {
            name,
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }

    fn above(&mut self, name: &'static str, value: f64, tolerance: f64) {
        self.checks.push(CertificateCheck {
            name,
            value,
            tolerance,
            passed: value > tolerance,
        });
    }
}

/// Distances from `z f` and `z̄ f` to the model, recomputed with a
/// Householder QR of the shifted spectra.
fn qr_distances(f: &CircleFunction, n_basis: usize, m_trunc: usize) -> Result<(f64, f64)> {
    check_truncation(f.grid(), n_basis, m_trunc)?;
    let rows = 2 * m_trunc + 1;
    let mut columns = Vec::with_capacity(n_basis + 1);
    for s in 0..=n_basis {
        let v = window(f, s as i64, m_trunc)?;
        let size = norm2(&v);
        columns.push(v.into_iter().map(|x| x / size).collect::<Vec<_>>());
    }
    let a = DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r]);
    let q = a.qr().q();
    let size = norm2(&window(f, 0, m_trunc)?);
    let residual = |shift: i64| -> Result<f64> {
        let v = nalgebra::DVector::from_vec(window(f, shift, m_trunc)?);
        let mut r = v.clone();
        for _ in 0..2 {
            let c = q.ad_mul(&r);
            r -= &q * c;
        }
        Ok(r.norm() / size)
    };
    Ok((residual(1)?, residual(-1)?))
}

/// Recheck a classification of `f` without reusing its model.
pub fn verify_certificate(c: &Classification, f: &CircleFunction, norm: &dyn GaugeNorm) -> Result<VerificationReport> {
    let p = c.params;
    let (forward, backward) = qr_distances(f, p.n_basis, p.m_trunc)?;
    let mut report = VerificationReport { checks: Vec::new() };
    report.at_most("forward_invariance", forward, FORWARD_TOLERANCE);
    match &c.verdict {
        Verdict::DoublyInvariant { e_mask } => {
            report.at_most("backward_invariance", backward, p.tau_doubly);
            let outside = f
                .samples()
                .iter()
                .zip(e_mask)
                .filter(|(_, inside)| !**inside)
                .fold(0.0_f64, |m, (v, _)| m.max(v.norm()));
            report.at_most("mask_reproduces", outside, E_MASK_THRESHOLD * f.max_abs());
        }
        Verdict::SimplyInvariant { phi } => {
            report.at_most("phi_unimodular", unimodularity(phi), UNIMODULAR_TOLERANCE);
            report.above("strict_inclusion", backward, 10.0 * p.tau_doubly);
            let membership = is_in_halpha(f, norm, ANALYTIC_TOLERANCE)?;
            if membership.member {
                let spectrum = phi.spectrum()?;
                report.at_most(
                    "phi_analytic",
                    spectrum.negative_energy(),
                    ANALYTIC_TOLERANCE * spectrum.energy(),
                );
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ApproximationStage {
    pub degree: usize,
    /// `σ_n(1/h) h f`, a bounded function.
    pub function: CircleFunction,
    /// `α(σ_n(1/h) h f - f)`.
    pub error: f64,
}

/// Cesàro degrees `floor((n/2)^{j/(S-1)}) - 1`, from 0 up to `n/2 - 1`.
pub fn approximation_degrees(grid: Grid, stages: usize) -> Vec<usize> {
    let top = (grid.size() / 2) as f64;
    if stages == 1 {
        return vec![0];
    }
    (0..stages)
        .map(|j| {
            let x = top.powf(j as f64 / (stages - 1) as f64);
            // powers that should be integers may land just below them
            let x = if (x - x.round()).abs() <= 1e-9 * x { x.round() } else { x.floor() };
            x as usize - 1
        })
        .collect()
}

/// Bounded approximants of `f` in the same invariant subspace:
/// with `k = 1/(|f|+1) = u h` (`h` bounded outer, `1/h` of finite norm),
/// the functions `σ_n(1/h) h f` are bounded and tend to `f`.
pub fn bounded_approximation(
    f: &CircleFunction,
    norm: &dyn GaugeNorm,
    stages: usize,
) -> Result<Vec<ApproximationStage>> {
    if stages == 0 {
        return Err(Error::Resolution("at least one stage is needed".into()));
    }
    if !norm.is_continuous() {
        return Err(Error::UnsupportedNorm(format!(
            "{} is not a continuous norm",
            norm.name()
        )));
    }
    f.ensure_finite()?;
    norm.evaluate(f)?;
    let k = f.map(|v| Complex64::new(1.0 / (v.norm() + 1.0), 0.0));
    let fact = factorize_inverse_bounded(&k, norm)?;
    let h = fact.outer;
    let inverse = h.map(|v| Complex64::new(1.0, 0.0) / v);
    let hf = h.try_mul(f)?;
    approximation_degrees(f.grid(), stages)
        .into_iter()
        .map(|degree| {
            let function = cesaro_mean(&inverse, degree)?.try_mul(&hf)?;
            let error = norm.evaluate(&function.try_sub(f)?)?;
            Ok(ApproximationStage {
                degree,
                function,
                error,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{shipped_continuous_specs, GaugeNormSpec};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> Grid {
        Grid::new(4096).unwrap()
    }

    fn arc(g: Grid, from: f64, to: f64) -> CircleFunction {
        CircleFunction::from_angle_fn(g, |t| c(if t >= from && t < to { 1.0 } else { 0.0 }, 0.0))
    }

    fn blaschke(a: f64) -> impl Fn(Complex64) -> Complex64 {
        move |z| (z - a) / (1.0 - z * a)
    }

    fn l2() -> GaugeNormSpec {
        GaugeNormSpec::lp(2.0).unwrap()
    }

    #[test]
    fn monomial_basis_is_orthonormal() {
        let g = Grid::new(64).unwrap();
        let model = build_cyclic_subspace(&CircleFunction::constant(g, c(1.0, 0.0)), 4, 16).unwrap();
        assert_eq!(model.dimension(), 5);
        for (s, q) in model.orthonormal_basis().iter().enumerate() {
            for (i, v) in q.iter().enumerate() {
                let expected = if i as i64 - 16 == s as i64 { 1.0 } else { 0.0 };
                assert!((v - c(expected, 0.0)).norm() < 1e-14);
            }
        }
        let shifted = build_cyclic_subspace(&CircleFunction::monomial(g, 2), 4, 16).unwrap();
        assert!(distance_to_subspace(&CircleFunction::monomial(g, 6), &shifted).unwrap() < 1e-14);
        assert!((distance_to_subspace(&CircleFunction::monomial(g, 7), &shifted).unwrap() - 1.0).abs() < 1e-14);
        assert!((distance_to_subspace(&CircleFunction::monomial(g, -1), &model).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn basis_orthonormal_and_self_consistent() {
        let g = grid();
        let f = CircleFunction::from_fn(g, |z| blaschke(0.5)(z) * (1.0 + z) / 2.0);
        let model = build_cyclic_subspace(&f, 64, 1024).unwrap();
        let b = model.orthonormal_basis();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&b[i], &b[j]) - c(expected, 0.0)).norm() < 1e-10);
            }
        }
        for s in 0..=64 {
            assert!(distance_to_subspace(&f.shift(s), &model).unwrap() <= 1e-8);
        }
        assert!(model.conditioning() > 0.0);
    }

    #[test]
    fn pythagoras() {
        let g = Grid::new(256).unwrap();
        let f = CircleFunction::from_fn(g, |z| (z / 3.0).exp());
        let model = build_cyclic_subspace(&f, 8, 64).unwrap();
        let h = CircleFunction::from_angle_fn(g, |t| c((3.0 * t).sin(), t.cos() * t.cos()));
        let d = distance_to_subspace(&h, &model).unwrap();
        let p = model.projection_norm(&h).unwrap();
        let w = model.window_norm(&h).unwrap();
        assert!((d * d + p * p - w * w).abs() < 1e-10);
    }

    #[test]
    fn indicator_projector_commutes_with_shift() {
        let g = grid();
        let model = build_cyclic_subspace(&arc(g, 0.0, PI / 2.0), 64, 1024).unwrap();
        let d = model.backward_distances().unwrap()[0];
        assert!(d < 1e-8, "{d}");
        assert!(model.forward_distances().unwrap()[0] < 1e-8);
    }

    #[test]
    fn errors() {
        let g = Grid::new(64).unwrap();
        let zero = CircleFunction::constant(g, c(0.0, 0.0));
        assert!(matches!(build_cyclic_subspace(&zero, 4, 16), Err(Error::DegenerateGenerator(_))));
        let one = CircleFunction::constant(g, c(1.0, 0.0));
        assert!(matches!(build_cyclic_subspace(&one, 4, 32), Err(Error::Resolution(_))));
        let model = build_cyclic_subspace(&one, 4, 16).unwrap();
        let other = CircleFunction::constant(Grid::new(128).unwrap(), c(1.0, 0.0));
        assert!(matches!(distance_to_subspace(&other, &model), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn classification_examples() {
        let g = grid();
        let params = ClassifyParams::default();

        let half = arc(g, 0.0, PI);
        let r = classify(&half, &l2(), params).unwrap();
        eprintln!("arc: {:?}", r.certificate);
        match &r.verdict {
            Verdict::DoublyInvariant { e_mask } => {
                let expected: Vec<bool> = half.samples().iter().map(|v| v.re > 0.5).collect();
                assert_eq!(e_mask, &expected);
            }
            v => panic!("{v:?}"),
        }
        assert!(verify_certificate(&r, &half, &l2()).unwrap().passed());

        let outer = CircleFunction::from_fn(g, |z| 1.0 + z / 2.0);
        let r = classify(&outer, &l2(), params).unwrap();
        eprintln!("outer: {:?}", r.certificate);
        let Verdict::SimplyInvariant { phi } = &r.verdict else { panic!() };
        assert!(phi.max_distance(&CircleFunction::constant(g, c(1.0, 0.0))).unwrap() <= 1e-8);
        assert!(verify_certificate(&r, &outer, &l2()).unwrap().passed());

        let z2 = CircleFunction::monomial(g, 2);
        let r = classify(&z2, &l2(), params).unwrap();
        let Verdict::SimplyInvariant { phi } = &r.verdict else { panic!() };
        assert!(phi.max_distance(&z2).unwrap() <= 1e-8);
        assert!(verify_certificate(&r, &z2, &l2()).unwrap().passed());

        let f = CircleFunction::from_fn(g, |z| blaschke(0.5)(z) * (1.0 + z) / 2.0);
        let r = classify(&f, &l2(), params).unwrap();
        eprintln!("blaschke outer: {:?}", r.certificate);
        let Verdict::SimplyInvariant { phi } = &r.verdict else { panic!() };
        assert!(phi.max_distance(&CircleFunction::from_fn(g, blaschke(0.5))).unwrap() <= 1e-8);
        let report = verify_certificate(&r, &f, &l2()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(r.certificate.regeneration_residual <= 1e-6);
    }

    #[test]
    fn scale_and_norm_independence() {
        let g = grid();
        let f = CircleFunction::from_fn(g, |z| blaschke(-0.3)(z) * (z / 2.0).exp());
        let base = classify(&f, &l2(), ClassifyParams::default()).unwrap();
        let Verdict::SimplyInvariant { phi } = &base.verdict else { panic!() };
        let scaled = classify(&f.scale(c(-2.0, 3.0)), &l2(), ClassifyParams::default()).unwrap();
        let Verdict::SimplyInvariant { phi: phi2 } = &scaled.verdict else { panic!() };
        let ratio = phi2.try_div(phi).unwrap();
        let r0 = ratio.samples()[0];
        assert!((r0.norm() - 1.0).abs() < 1e-8);
        assert!(ratio.max_distance(&CircleFunction::constant(g, r0)).unwrap() < 1e-8);
        for spec in shipped_continuous_specs() {
            let r = classify(&f, &spec, ClassifyParams::default()).unwrap();
            assert_eq!(r.verdict.name(), "simply");
        }
        assert!(matches!(
            classify(&f, &GaugeNormSpec::linfinity(), ClassifyParams::default()),
            Err(Error::UnsupportedNorm(_))
        ));
    }

    #[test]
    fn backward_distance_trends() {
        let g = grid();
        let simple = CircleFunction::from_fn(g, |z| blaschke(0.5)(z) * (1.0 + z / 2.0));
        let doubly = arc(g, 1.0, 4.0);
        let mut prev = f64::INFINITY;
        for n in [4, 16, 64] {
            let ds = build_cyclic_subspace(&simple, n, 1024).unwrap().backward_distances().unwrap()[0];
            assert!(ds <= prev * (1.0 + 1e-12) && ds > 10.0 * DEFAULT_TAU_DOUBLY, "{n}: {ds}");
            prev = ds;
        }
        let d4 = build_cyclic_subspace(&doubly, 4, 1024).unwrap().backward_distances().unwrap()[0];
        let d64 = build_cyclic_subspace(&doubly, 64, 1024).unwrap().backward_distances().unwrap()[0];
        eprintln!("arc d_back: {d4:e} -> {d64:e}");
        assert!(d64 < 1e-3 * d4 && d64 < DEFAULT_TAU_DOUBLY);
    }

    #[test]
    fn joint_model_of_two_generators() {
        let g = Grid::new(256).unwrap();
        let gens = [CircleFunction::monomial(g, 3), CircleFunction::monomial(g, 5)];
        let model = build_subspace(&gens, 8, 64).unwrap();
        assert_eq!(model.dimension(), 11);
        let d = model.backward_distances().unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12 && d[1] < 1e-12, "{d:?}");
    }

    #[test]
    fn inconsistent_cross_check_is_reported() {
        // an arc seen through a tiny truncation looks simply invariant
        let g = Grid::new(256).unwrap();
        let params = ClassifyParams { n_basis: 1, m_trunc: 8, tau_doubly: 1e-6 };
        assert!(matches!(
            classify(&arc(g, 0.0, PI), &l2(), params),
            Err(Error::InconsistentCrossCheck(_))
        ));
    }

    #[test]
    fn long_arc_is_surfaced_as_inconsistent() {
        // three quarters of the circle is not resolved at N = 64
        let g = grid();
        assert!(matches!(
            classify(&arc(g, 0.0, 1.5 * PI), &l2(), ClassifyParams::default()),
            Err(Error::InconsistentCrossCheck(_))
        ));
    }

    #[test]
    fn approximation_degrees_grow_geometrically() {
        assert_eq!(approximation_degrees(grid(), 5), vec![0, 5, 44, 303, 2047]);
        assert_eq!(approximation_degrees(grid(), 1), vec![0]);
    }

    #[test]
    fn bounded_approximation_of_one_is_exact() {
        let g = Grid::new(256).unwrap();
        let one = CircleFunction::constant(g, c(1.0, 0.0));
        let stages = bounded_approximation(&one, &l2(), 5).unwrap();
        for s in stages {
            assert!(s.error < 1e-14, "{}", s.error);
        }
    }

    #[test]
    fn bounded_approximation_errors_decrease() {
        let g = grid();
        let l1 = GaugeNormSpec::lp(1.0).unwrap();
        let f = CircleFunction::from_angle_fn(g, |t| {
            let d = (t - PI).abs().max(PI / 4096.0);
            c(d.powf(-0.5), 0.0)
        });
        let stages = bounded_approximation(&f, &l1, 5).unwrap();
        let errors: Vec<f64> = stages.iter().map(|s| s.error).collect();
        eprintln!("spike errors {errors:?}");
        for w in errors.windows(2) {
            assert!(w[1] <= w[0] + 1e-10);
        }
        for s in &stages {
            assert!(s.function.max_abs().is_finite());
        }
    }
}
