//! Dual norm `α′(f) = sup{∫|fh| dm : α(h) ≤ 1}`.
//!
//! For a rearrangement-invariant `α` the supremum is attained by `h` that is
//! constant on the level sets of `|f|` and decreasing along them. Writing such
//! an `h` as `Σ c_k e_k` with `e_k = χ_{S_k}/P_k`, where `S_k` is the union of
//! the `k` highest level sets and `P_k = ∫_{S_k}|f|`, the pairing is `Σ c_k`, so
//! `α′(f) = 1 / min{α(Σ c_k e_k) : c in the probability simplex}`. The ascent
//! method minimizes that convex function; `1/F(c)` at any iterate is a lower
//! bound for `α′(f)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use super::{lp_levels, Distribution, GaugeNorm, GaugeNormSpec, LevelTerm, NormVariant, YoungFunction};
use crate::error::{Error, Result};
use crate::spectral::{CircleFunction, Grid};

pub const ASCENT_ITERATION_CAP: usize = 10_000;
const GAP_TOLERANCE: f64 = 1e-9;
const CHANGE_TOLERANCE: f64 = 1e-9;
const CHANGE_WINDOW: usize = 100;
const WARM_START_ITERATIONS: usize = 300;
const LINE_SEARCH_STEPS: usize = 64;
const NEWTON_MAX_LEVELS: usize = 512;
const NEWTON_ITERATIONS: usize = 100;
const STRUCTURED_ITERATIONS: usize = 200;

const BRUTE_MAX_GRID: usize = 16;
const BRUTE_LATTICE_BUDGET: usize = 60_000;
const BRUTE_SEEDS: usize = 6;
const BRUTE_MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DualMethod {
    ClosedForm,
    Ascent,
    BruteSmall,
}

impl fmt::Display for DualMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualMethod::ClosedForm => "closed_form",
            DualMethod::Ascent => "ascent",
            DualMethod::BruteSmall => "brute_small",
        })
    }
}

impl FromStr for DualMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "closed_form" => Ok(DualMethod::ClosedForm),
            "ascent" => Ok(DualMethod::Ascent),
            "brute_small" => Ok(DualMethod::BruteSmall),
            other => Err(Error::Parse(format!("unknown dual method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualOutcome {
    pub value: f64,
    pub iterations: usize,
    /// Frank–Wolfe gap of the final iterate relative to `F`.
    pub relative_gap: f64,
    pub converged: bool,
}

/// `α′(f)` by the requested method.
pub fn dual_norm(spec: &GaugeNormSpec, f: &CircleFunction, method: DualMethod) -> Result<f64> {
    f.ensure_finite()?;
    match method {
        DualMethod::ClosedForm => closed_form(spec, &Distribution::from_function(f)?),
        DualMethod::Ascent => Ok(dual_ascent(spec, &Distribution::from_function(f)?)?.value),
        DualMethod::BruteSmall => brute_small(spec, f),
    }
}

fn closed_form(spec: &GaugeNormSpec, dist: &Distribution) -> Result<f64> {
    if dist.is_empty() {
        return Ok(0.0);
    }
    match spec.variant() {
        NormVariant::Lp { p } if *p == 1.0 => Ok(dist.max()),
        NormVariant::Lp { p } => Ok(lp_levels(p / (p - 1.0), dist.values(), dist.measures())),
        NormVariant::LInfinity => Ok(dist.l1()),
        _ => Err(Error::UnsupportedNorm(format!(
            "no closed-form dual for {spec}"
        ))),
    }
}

struct Simplex<'a> {
    spec: &'a GaugeNormSpec,
    mu: &'a [f64],
    prefix: Vec<f64>,
}

impl Simplex<'_> {
    fn levels(&self, c: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; c.len()];
        let mut acc = 0.0;
        for k in (0..c.len()).rev() {
            acc += c[k] / self.prefix[k];
            h[k] = acc;
        }
        h
    }

    fn value(&self, c: &[f64]) -> Result<f64> {
        self.spec.eval_levels(&self.levels(c), self.mu)
    }

    fn grad(&self, c: &[f64]) -> Result<Vec<f64>> {
        let g = self.spec.grad_levels(&self.levels(c), self.mu)?;
        let mut acc = 0.0;
        Ok(g
            .iter()
            .zip(&self.prefix)
            .map(|(gi, p)| {
                acc += gi;
                acc / p
            })
            .collect())
    }

    fn vertex(&self, k: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.prefix.len()];
        c[k] = 1.0;
        c
    }
}

fn along(c: &[f64], d: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(d).map(|(a, b)| (a + t * b).max(0.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `F` on `c + t d`, `t ∈ [0, t_max]`; returns the step and value.
fn line_search(sx: &Simplex, c: &[f64], d: &[f64], t_max: f64, f0: f64) -> Result<(f64, f64)> {
    let slope = |t: f64| -> Result<f64> { Ok(dot(&sx.grad(&along(c, d, t))?, d)) };
    let t = if slope(t_max)? <= 0.0 {
        t_max
    } else {
        let (mut lo, mut hi) = (0.0, t_max);
        for _ in 0..LINE_SEARCH_STEPS {
            let mid = 0.5 * (lo + hi);
            if slope(mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    };
    let ft = sx.value(&along(c, d, t))?;
    if ft < f0 {
        return Ok((t, ft));
    }
    // subgradient information was misleading at a kink; fall back to values
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, t_max);
    let mut x1 = b - golden * (b - a);
    let mut x2 = a + golden * (b - a);
    let mut f1 = sx.value(&along(c, d, x1))?;
    let mut f2 = sx.value(&along(c, d, x2))?;
    for _ in 0..LINE_SEARCH_STEPS + 16 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = sx.value(&along(c, d, x1))?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = sx.value(&along(c, d, x2))?;
        }
    }
    let (t, ft) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if ft < f0 {
        Ok((t, ft))
    } else {
        Ok((0.0, f0))
    }
}

/// Dual norm of the distribution by minimizing over the simplex of aligned
/// decreasing test functions: an exponentiated-gradient warm start followed
/// by pairwise Frank–Wolfe steps with exact line search.
pub fn dual_ascent(spec: &GaugeNormSpec, dist: &Distribution) -> Result<DualOutcome> {
    let k = dist.len();
    if k == 0 {
        return Ok(DualOutcome {
            value: 0.0,
            iterations: 0,
            relative_gap: 0.0,
            converged: true,
        });
    }
    let mut acc = 0.0;
    let prefix: Vec<f64> = dist
        .values()
        .iter()
        .zip(dist.measures())
        .map(|(v, m)| {
            acc += v * m;
            acc
        })
        .collect();
    let sx = Simplex {
        spec,
        mu: dist.measures(),
        prefix,
    };

    let (best_vertex, best_vertex_value) = (0..k)
        .map(|i| Ok((i, sx.value(&sx.vertex(i))?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    if k == 1 {
        return Ok(DualOutcome {
            value: 1.0 / best_vertex_value,
            iterations: 0,
            relative_gap: 0.0,
            converged: true,
        });
    }

    let mut c = vec![1.0 / k as f64; k];
    let mut fc = sx.value(&c)?;
    let mut eta = 1.0;
    for _ in 0..WARM_START_ITERATIONS {
        let g = sx.grad(&c)?;
        let scale = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            break;
        }
        let mut next: Vec<f64> = c
            .iter()
            .zip(&g)
            .map(|(ci, gi)| ci * (-eta * gi / scale).exp())
            .collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let fnext = sx.value(&next)?;
        if fnext < fc {
            c = next;
            fc = fnext;
            eta *= 1.5;
        } else {
            eta *= 0.5;
            if eta < 1e-10 {
                break;
            }
        }
    }
    if best_vertex_value <= fc {
        c = sx.vertex(best_vertex);
        fc = best_vertex_value;
    }
    if let NormVariant::Orlicz { young } = spec.variant() {
        let h = orlicz_multiplier_levels(young, spec.normalization(), dist.values(), dist.measures());
        let mut start: Vec<f64> = (0..k)
            .map(|i| (h[i] - h.get(i + 1).copied().unwrap_or(0.0)).max(0.0) * sx.prefix[i])
            .collect();
        let total: f64 = start.iter().sum();
        if total > 0.0 && total.is_finite() {
            start.iter_mut().for_each(|x| *x /= total);
            let fstart = sx.value(&start)?;
            if fstart < fc {
                c = start;
                fc = fstart;
            }
        }
    }

    if let Some(terms) = spec.level_terms(dist.measures()) {
        (c, fc) = structured_polish(&sx, &terms, c, fc)?;
    } else if k <= NEWTON_MAX_LEVELS {
        (c, fc) = newton_polish(&sx, c, fc)?;
    }

    let mut history = Vec::with_capacity(ASCENT_ITERATION_CAP + 1);
    history.push(fc);
    let mut relative_gap = f64::INFINITY;
    for it in 0..ASCENT_ITERATION_CAP {
        let g = sx.grad(&c)?;
        let s = (0..k).min_by(|&a, &b| g[a].total_cmp(&g[b])).expect("k > 0");
        let a = (0..k)
            .filter(|&i| c[i] > 0.0)
            .max_by(|&x, &y| g[x].total_cmp(&g[y]))
            .expect("c on the simplex");
        relative_gap = (dot(&c, &g) - g[s]) / fc;
        if relative_gap <= GAP_TOLERANCE {
            return Ok(DualOutcome {
                value: 1.0 / fc,
                iterations: it,
                relative_gap,
                converged: true,
            });
        }
        let mut d = vec![0.0; k];
        d[s] += 1.0;
        d[a] -= 1.0;
        let (mut t, mut ft) = if s == a { (0.0, fc) } else { line_search(&sx, &c, &d, c[a], fc)? };
        if t == 0.0 {
            d = c.iter().map(|x| -x).collect();
            d[s] += 1.0;
            (t, ft) = line_search(&sx, &c, &d, 1.0, fc)?;
        }
        if t == 0.0 {
            // no descent along the available directions: the iterate is stationary
            return Ok(DualOutcome {
                value: 1.0 / fc,
                iterations: it,
                relative_gap,
                converged: false,
            });
        }
        c = along(&c, &d, t);
        let total: f64 = c.iter().sum();
        c.iter_mut().for_each(|x| *x /= total);
        fc = ft.min(sx.value(&c)?);
        history.push(fc);
    }
    let old = history[history.len().saturating_sub(CHANGE_WINDOW + 1)];
    if (old - fc) / fc > CHANGE_TOLERANCE {
        return Err(Error::OptimizationFailure {
            iterations: ASCENT_ITERATION_CAP,
            best_lower_bound: 1.0 / fc,
        });
    }
    Ok(DualOutcome {
        value: 1.0 / fc,
        iterations: ASCENT_ITERATION_CAP,
        relative_gap,
        converged: false,
    })
}

/// Step along a descent direction `d` on the face: projected steps of
/// halving length while they overshoot the face (they can retire many
/// coordinates at once), then the step to the first blocking coordinate or an
/// Armijo step.
fn accept_step(
    sx: &Simplex,
    c: &[f64],
    fc: f64,
    g: &[f64],
    d: &[f64],
    face: &[usize],
) -> Result<Option<(Vec<f64>, f64)>> {
    let slope = dot(g, d);
    if slope >= 0.0 {
        return Ok(None);
    }
    let (t, blocking) = face
        .iter()
        .filter(|&&i| d[i] < 0.0)
        .map(|&i| (c[i] / -d[i], Some(i)))
        .fold((1.0_f64, None), |acc, x| if x.0 < acc.0 { x } else { acc });
    let mut step = 1.0;
    while step > t {
        let mut projected = along(c, d, step);
        let total: f64 = projected.iter().sum();
        projected.iter_mut().for_each(|x| *x /= total);
        let fp = sx.value(&projected)?;
        if fp < fc {
            return Ok(Some((projected, fp)));
        }
        step *= 0.5;
    }
    let mut trial = along(c, d, t);
    if let Some(b) = blocking {
        trial[b] = 0.0;
    }
    let ft = sx.value(&trial)?;
    let pinned = blocking.is_some() && ft <= fc;
    Ok((ft < fc + 1e-4 * t * slope || pinned).then_some((trial, ft)))
}

/// Newton iterations for norms that are sums of [`LevelTerm`]s. On a face of
/// the simplex the level function is constant on blocks of merged levels, and
/// in block values each term has Hessian `diag − rank one`; the Newton system
/// with the pairing constraint then reduces to one small dense solve.
fn structured_polish(sx: &Simplex, terms: &[LevelTerm], c: Vec<f64>, fc: f64) -> Result<(Vec<f64>, f64)> {
    if terms.iter().all(|t| t.exponent == 1.0) {
        // F is linear on the simplex, so the best vertex is optimal
        return Ok((c, fc));
    }
    let k = c.len();
    let pairing: Vec<f64> = (0..k)
        .map(|j| sx.prefix[j] - if j == 0 { 0.0 } else { sx.prefix[j - 1] })
        .collect();
    let (best_c, best_f) = (c.clone(), fc);
    // an interior start makes the first face the whole simplex
    let mut c: Vec<f64> = c.iter().map(|x| 0.9 * x + 0.1 / k as f64).collect();
    let total: f64 = c.iter().sum();
    c.iter_mut().for_each(|x| *x /= total);
    let mut fc = sx.value(&c)?;
    let mut damping = 1e-10;
    for _ in 0..STRUCTURED_ITERATIONS {
        let g = sx.grad(&c)?;
        let s = (0..k).min_by(|&a, &b| g[a].total_cmp(&g[b])).expect("k > 0");
        let avg = dot(&c, &g);
        let gap = (avg - g[s]) / fc;
        if gap <= GAP_TOLERANCE {
            break;
        }
        let face: Vec<usize> = (0..k).filter(|&i| c[i] > 0.0 || g[i] < avg).collect();
        let h = sx.levels(&c);
        let mut accepted = None;
        while damping <= 1e12 {
            let mut active = face.clone();
            let d = loop {
                let (d, dh) = block_direction(sx, terms, &pairing, &h, &active, damping);
                let before = active.len();
                active.retain(|&i| !(c[i] == 0.0 && d[i] < 0.0));
                if active.len() == before {
                    break Some((d, dh));
                }
                if active.is_empty() {
                    break None;
                }
            };
            if let Some((d, dh)) = d {
                if dot(&g, &d) < 0.0 {
                    // projecting the levels onto h ≥ 0 retires a whole zero tail at once
                    let mut t = 1.0;
                    while t > 1e-6 && accepted.is_none() {
                        let trial = level_step(sx, &h, &dh, t);
                        let ft = sx.value(&trial)?;
                        if ft < fc {
                            accepted = Some((trial, ft));
                        }
                        t *= 0.5;
                    }
                    if accepted.is_some() {
                        break;
                    }
                }
                if let Some(step) = accept_step(sx, &c, fc, &g, &d, &face)? {
                    accepted = Some(step);
                    break;
                }
            }
            damping *= 10.0;
        }
        let Some((mut next, ft)) = accepted else {
            break;
        };
        damping = (damping * 0.1).max(1e-12);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        c = next;
        fc = ft.min(sx.value(&c)?);
    }
    Ok(if fc <= best_f { (c, fc) } else { (best_c, best_f) })
}

/// Damped Newton direction in `c` coordinates on the face whose breakpoints
/// are `active` (sorted): levels `start..=i` between breakpoints share one
/// value, levels after the last breakpoint stay at zero.
fn block_direction(
    sx: &Simplex,
    terms: &[LevelTerm],
    pairing: &[f64],
    h: &[f64],
    active: &[usize],
    damping: f64,
) -> (Vec<f64>, Vec<f64>) {
    let k = h.len();
    let mut blocks = Vec::with_capacity(active.len());
    let mut start = 0;
    for &i in active {
        blocks.push(start..i + 1);
        start = i + 1;
    }
    let m = blocks.len();
    let value: Vec<f64> = blocks.iter().map(|b| h[b.start]).collect();
    let a: Vec<f64> = blocks.iter().map(|b| pairing[b.clone()].iter().sum()).collect();
    let mut grad = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut columns: Vec<(f64, Vec<f64>)> = Vec::new();
    for term in terms {
        let omega: Vec<f64> = blocks.iter().map(|b| term.omega[b.clone()].iter().sum()).collect();
        let p = term.exponent;
        if p == 1.0 {
            grad.iter_mut().zip(&omega).for_each(|(g, o)| *g += term.weight * o);
            continue;
        }
        let top = value.iter().fold(0.0_f64, |t, v| t.max(*v));
        if top == 0.0 {
            continue;
        }
        let norm = top
            * omega
                .iter()
                .zip(&value)
                .map(|(o, v)| o * (v / top).powf(p))
                .sum::<f64>()
                .powf(1.0 / p);
        let s = term.weight * (p - 1.0) / norm;
        let v: Vec<f64> = omega
            .iter()
            .zip(&value)
            .map(|(o, b)| o * (b / norm).powf(p - 1.0))
            .collect();
        for i in 0..m {
            grad[i] += term.weight * v[i];
            diag[i] += s * omega[i] * (value[i] / norm).max(1e-12).powf(p - 2.0);
        }
        columns.push((s, v));
    }
    let scale = diag.iter().sum::<f64>() / m as f64;
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let inv: Vec<f64> = diag.iter().map(|d| 1.0 / (d + damping * scale)).collect();
    let wdot = |x: &[f64], y: &[f64]| -> f64 { (0..m).map(|i| x[i] * inv[i] * y[i]).sum() };

    // unknowns y_n = s_n v_nᵀd and the multiplier ν of aᵀd = 0
    let r = columns.len();
    let mut sys = DMatrix::<f64>::zeros(r + 1, r + 1);
    let mut rhs = DVector::<f64>::zeros(r + 1);
    for (n, (s, vn)) in columns.iter().enumerate() {
        for (l, (_, vl)) in columns.iter().enumerate() {
            sys[(n, l)] = -s * wdot(vn, vl);
        }
        sys[(n, n)] += 1.0;
        sys[(n, r)] = s * wdot(vn, &a);
        sys[(r, n)] = wdot(vn, &a);
        rhs[n] = -s * wdot(vn, &grad);
    }
    sys[(r, r)] = -wdot(&a, &a);
    rhs[r] = wdot(&a, &grad);
    let mut d = vec![0.0; k];
    let Some(sol) = sys.lu().solve(&rhs) else {
        return (d, vec![0.0; k]);
    };
    let nu = sol[r];
    let mut dh = vec![0.0; k + 1];
    for (i, b) in blocks.iter().enumerate() {
        let mut x = -grad[i] - nu * a[i];
        for (n, (_, vn)) in columns.iter().enumerate() {
            x += vn[i] * sol[n];
        }
        dh[b.clone()].iter_mut().for_each(|e| *e = inv[i] * x);
    }
    for i in 0..k {
        d[i] = (dh[i] - dh[i + 1]) * sx.prefix[i];
    }
    dh.pop();
    (d, dh)
}

/// `c` for the levels `max(h + t dh, 0)`, with any increase between
/// adjacent levels flattened.
fn level_step(sx: &Simplex, h: &[f64], dh: &[f64], t: f64) -> Vec<f64> {
    let k = h.len();
    let next: Vec<f64> = h.iter().zip(dh).map(|(a, b)| (a + t * b).max(0.0)).collect();
    let mut c: Vec<f64> = (0..k)
        .map(|i| ((next[i] - next.get(i + 1).copied().unwrap_or(0.0)) * sx.prefix[i]).max(0.0))
        .collect();
    let total: f64 = c.iter().sum();
    if total > 0.0 {
        c.iter_mut().for_each(|x| *x /= total);
    }
    c
}

/// Damped Newton iterations on the faces of the simplex, with a
/// finite-difference Hessian of the analytic gradient. The damping grows
/// whenever a step fails to decrease `F` enough, so the direction degrades
/// gracefully towards a projected gradient step.
fn newton_polish(sx: &Simplex, mut c: Vec<f64>, mut fc: f64) -> Result<(Vec<f64>, f64)> {
    let k = c.len();
    let top = c.iter().fold(0.0_f64, |m, x| m.max(*x));
    c.iter_mut().for_each(|x| {
        if *x < 1e-14 * top {
            *x = 0.0
        }
    });
    let total: f64 = c.iter().sum();
    c.iter_mut().for_each(|x| *x /= total);
    fc = fc.min(sx.value(&c)?);
    let mut damping = 1e-8;
    for _ in 0..NEWTON_ITERATIONS {
        let g = sx.grad(&c)?;
        let s = (0..k).min_by(|&a, &b| g[a].total_cmp(&g[b])).expect("k > 0");
        if (dot(&c, &g) - g[s]) / fc <= GAP_TOLERANCE {
            break;
        }
        let mut face: Vec<usize> = (0..k).filter(|&i| c[i] > 0.0).collect();
        if c[s] == 0.0 {
            face.push(s);
        }
        let hess = face_hessian(sx, &c, &g, &face)?;
        let scale = (0..face.len()).map(|i| hess[(i, i)].abs()).sum::<f64>() / face.len() as f64;
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let mut accepted = None;
        while damping <= 1e12 {
            let mut active: Vec<usize> = (0..face.len()).collect();
            let d = loop {
                let d = damped_direction(&hess, &g, &face, &active, damping * scale, k);
                match active
                    .iter()
                    .position(|&a| c[face[a]] == 0.0 && d[face[a]] < 0.0)
                {
                    Some(pos) if active.len() > 2 => {
                        active.remove(pos);
                    }
                    Some(_) => break None,
                    None => break Some(d),
                }
            };
            if let Some(d) = d {
                if let Some(step) = accept_step(sx, &c, fc, &g, &d, &face)? {
                    accepted = Some(step);
                    break;
                }
            }
            damping *= 10.0;
        }
        let Some((mut next, ft)) = accepted else {
            break;
        };
        damping = (damping * 0.1).max(1e-12);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        c = next;
        fc = ft.min(sx.value(&c)?);
    }
    Ok((c, fc))
}

/// Symmetrized forward-difference Hessian of `F` on the face coordinates.
fn face_hessian(sx: &Simplex, c: &[f64], g: &[f64], face: &[usize]) -> Result<DMatrix<f64>> {
    let m = face.len();
    let eps = 1e-7;
    let mut hess = DMatrix::<f64>::zeros(m, m);
    for (col, &j) in face.iter().enumerate() {
        let mut probe = c.to_vec();
        probe[j] += eps;
        let gp = sx.grad(&probe)?;
        for (row, &i) in face.iter().enumerate() {
            hess[(row, col)] = (gp[i] - g[i]) / eps;
        }
    }
    Ok((&hess + hess.transpose()) * 0.5)
}

/// Solves `(H + λI) d + ν 1 = -g`, `Σ d = 0` on the `active` subset of the face.
fn damped_direction(
    hess: &DMatrix<f64>,
    g: &[f64],
    face: &[usize],
    active: &[usize],
    damping: f64,
    k: usize,
) -> Vec<f64> {
    let m = active.len();
    let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
    let mut rhs = DVector::<f64>::zeros(m + 1);
    for (r, &a) in active.iter().enumerate() {
        for (col, &b) in active.iter().enumerate() {
            kkt[(r, col)] = hess[(a, b)];
        }
        kkt[(r, r)] += damping;
        kkt[(r, m)] = 1.0;
        kkt[(m, r)] = 1.0;
        rhs[r] = -g[face[a]];
    }
    let mut d = vec![0.0; k];
    if let Some(sol) = kkt.lu().solve(&rhs) {
        for (r, &a) in active.iter().enumerate() {
            d[face[a]] = sol[r];
        }
    }
    d
}

/// Maximizer of `Σ μ_i u_i h_i` subject to `Σ μ_i Φ(h_i/N) ≤ 1` for
/// decreasing `u`. The constraint is separable, so for a multiplier `ν` each
/// level independently maximizes `N u_i x - ν Φ(x)`; bisection on `ν` locates
/// the value where the constraint becomes active and the two bracketing
/// configurations are blended (Φ is linear between adjacent knots).
fn orlicz_multiplier_levels(young: &YoungFunction, norm: f64, u: &[f64], mu: &[f64]) -> Vec<f64> {
    let config = |nu: f64| -> Vec<f64> {
        u.iter()
            .map(|ui| young.smallest_maximizer(norm * ui / nu))
            .collect()
    };
    let modular = |x: &[f64]| -> f64 {
        x.iter()
            .zip(mu)
            .map(|(xi, m)| if xi.is_finite() { m * young.eval(*xi) } else { f64::INFINITY })
            .sum()
    };
    let slope = young.final_slope();
    let mut lo = norm * u[0] / slope * (1.0 + 4.0 * f64::EPSILON);
    let x_lo = config(lo);
    let g_lo = modular(&x_lo);
    if g_lo <= 1.0 {
        // the top level alone runs along the final linear piece
        let top: f64 = u
            .iter()
            .zip(mu)
            .filter(|(ui, _)| **ui == u[0])
            .map(|(_, m)| m)
            .sum();
        let extra = (1.0 - g_lo) / (slope * top);
        return x_lo
            .iter()
            .zip(u)
            .map(|(x, ui)| norm * if *ui == u[0] { x + extra } else { *x })
            .collect();
    }
    let mut hi = 2.0 * lo;
    while modular(&config(hi)) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(&config(mid)) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (x_lo, x_hi) = (config(lo), config(hi));
    let (g_lo, g_hi) = (modular(&x_lo), modular(&x_hi));
    let theta = if g_lo.is_finite() && g_lo > g_hi {
        (1.0 - g_hi) / (g_lo - g_hi)
    } else {
        0.0
    };
    x_lo.iter()
        .zip(&x_hi)
        .map(|(a, b)| {
            if a.is_finite() {
                norm * (b + theta * (a - b))
            } else {
                norm * b
            }
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exhaustive oracle for grids of at most 16 nodes: a lattice over the whole
/// simplex of nonnegative `h`, every normalized subset indicator, then a
/// pairwise compass search from the best candidates. Makes no use of the
/// alignment argument.
fn brute_small(spec: &GaugeNormSpec, f: &CircleFunction) -> Result<f64> {
    let n = f.len();
    if n > BRUTE_MAX_GRID {
        return Err(Error::Resolution(format!(
            "brute_small needs a grid of at most {BRUTE_MAX_GRID} nodes, got {n}"
        )));
    }
    let u = f.moduli();
    if u.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let weight = 1.0 / n as f64;
    let ratio = |h: &[f64]| -> Result<f64> {
        let alpha = spec.evaluate_distribution(&Distribution::from_magnitudes(h, weight))?;
        if alpha == 0.0 {
            return Ok(0.0);
        }
        Ok(dot(&u, h) * weight / alpha)
    };

    let mut lattice = 1usize;
    while binomial(lattice + 1 + n - 1, n - 1) <= BRUTE_LATTICE_BUDGET as f64 {
        lattice += 1;
    }
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut keep = |score: f64, h: &[f64]| {
        if candidates.len() < BRUTE_SEEDS || score > candidates[candidates.len() - 1].0 {
            candidates.push((score, h.to_vec()));
            candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
            candidates.truncate(BRUTE_SEEDS);
        }
    };

    let mut counts = vec![0usize; n];
    let mut h = vec![0.0; n];
    fn compositions(
        pos: usize,
        left: usize,
        counts: &mut [usize],
        visit: &mut dyn FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if pos == counts.len() - 1 {
            counts[pos] = left;
            return visit(counts);
        }
        for take in 0..=left {
            counts[pos] = take;
            compositions(pos + 1, left - take, counts, visit)?;
        }
        Ok(())
    }
    compositions(0, lattice, &mut counts, &mut |cs| {
        for (hi, &ci) in h.iter_mut().zip(cs) {
            *hi = ci as f64 / lattice as f64;
        }
        let r = ratio(&h)?;
        keep(r, &h);
        Ok(())
    })?;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as f64;
        let h: Vec<f64> = (0..n)
            .map(|j| if mask >> j & 1 == 1 { 1.0 / size } else { 0.0 })
            .collect();
        keep(ratio(&h)?, &h);
    }

    let mut best = candidates[0].0;
    for (score, start) in candidates {
        let mut h = start;
        let mut current = score;
        let mut step = 0.5 / lattice as f64;
        while step >= BRUTE_MIN_STEP {
            let mut improved = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j || h[j] <= 0.0 {
                        continue;
                    }
                    let delta = step.min(h[j]);
                    let mut trial = h.clone();
                    trial[i] += delta;
                    trial[j] -= delta;
                    let r = ratio(&trial)?;
                    if r > current {
                        current = r;
                        h = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(current);
    }
    Ok(best)
}

/// `α′` as a norm in its own right.
#[derive(Debug, Clone, PartialEq)]
pub struct DualNorm {
    spec: GaugeNormSpec,
    method: DualMethod,
}

impl DualNorm {
    pub fn new(spec: GaugeNormSpec, method: DualMethod) -> Self {
        Self { spec, method }
    }

    pub fn spec(&self) -> &GaugeNormSpec {
        &self.spec
    }

    pub fn method(&self) -> DualMethod {
        self.method
    }
}

impl GaugeNorm for DualNorm {
    fn name(&self) -> String {
        format!("dual of {} ({})", self.spec, self.method)
    }

    /// `α′(χ_E) = m(E)/α(χ_E)`, which tends to zero unless `α` is `L¹`.
    fn is_continuous(&self) -> bool {
        !matches!(self.spec.variant(), NormVariant::Lp { p } if *p == 1.0)
    }

    fn evaluate_distribution(&self, dist: &Distribution) -> Result<f64> {
        match self.method {
            DualMethod::ClosedForm => closed_form(&self.spec, dist),
            DualMethod::Ascent => Ok(dual_ascent(&self.spec, dist)?.value),
            DualMethod::BruteSmall => {
                let n = (3..=BRUTE_MAX_GRID.trailing_zeros())
                    .map(|e| 1usize << e)
                    .find(|&n| {
                        dist.measures()
                            .iter()
                            .all(|m| (m * n as f64).fract() == 0.0)
                    })
                    .ok_or_else(|| {
                        Error::Resolution("distribution does not fit a 16-node grid".into())
                    })?;
                let mut samples = Vec::with_capacity(n);
                for (v, m) in dist.values().iter().zip(dist.measures()) {
                    samples.extend(std::iter::repeat_n(*v, (m * n as f64) as usize));
                }
                samples.resize(n, 0.0);
                brute_small(&self.spec, &CircleFunction::from_real(Grid::new(n)?, samples)?)
            }
        }
    }

    fn evaluate(&self, f: &CircleFunction) -> Result<f64> {
        dual_norm(&self.spec, f, self.method)
    }

    fn tolerance(&self) -> f64 {
        match self.method {
            DualMethod::ClosedForm => 1e-12,
            DualMethod::Ascent => 1e-7,
            DualMethod::BruteSmall => 1e-6,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{pairing, shipped_continuous_specs, validate_axioms};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(grid: Grid, seed: u64) -> CircleFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CircleFunction::from_samples(
            grid,
            (0..grid.size())
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn dual_of_one_is_one() {
        let g = Grid::new(64).unwrap();
        let one = CircleFunction::constant(g, Complex64::new(1.0, 0.0));
        for spec in shipped_continuous_specs() {
            assert_eq!(dual_norm(&spec, &one, DualMethod::Ascent).unwrap(), 1.0, "{spec}");
        }
    }

    #[test]
    fn lp_duals_match_holder() {
        let g = Grid::new(64).unwrap();
        for (i, p) in [1.0, 1.5, 2.0, 3.0].into_iter().enumerate() {
            let spec = GaugeNormSpec::lp(p).unwrap();
            for seed in 0..5 {
                let f = random(g, 10 * i as u64 + seed);
                let exact = dual_norm(&spec, &f, DualMethod::ClosedForm).unwrap();
                let ascent = dual_norm(&spec, &f, DualMethod::Ascent).unwrap();
                assert!(((ascent - exact) / exact).abs() < 1e-6, "p={p} {ascent} vs {exact}");
            }
        }
        let f = random(g, 99);
        let l2 = GaugeNormSpec::lp(2.0).unwrap();
        let d = dual_norm(&l2, &f, DualMethod::ClosedForm).unwrap();
        assert!((d - f.l2_norm()).abs() < 1e-12 * d);
    }

    #[test]
    fn l1_dual_is_max_by_brute_force() {
        let g = Grid::new(8).unwrap();
        let f = random(g, 5);
        let spec = GaugeNormSpec::lp(1.0).unwrap();
        let brute = dual_norm(&spec, &f, DualMethod::BruteSmall).unwrap();
        assert!((brute - f.max_abs()).abs() < 1e-9 * f.max_abs());
    }

    #[test]
    fn ascent_agrees_with_brute_force() {
        let g = Grid::new(8).unwrap();
        let mut specs = shipped_continuous_specs();
        specs.push(GaugeNormSpec::linfinity());
        for spec in specs {
            for seed in 0..3 {
                let f = random(g, 100 + seed);
                let a = dual_norm(&spec, &f, DualMethod::Ascent).unwrap();
                let b = dual_norm(&spec, &f, DualMethod::BruteSmall).unwrap();
                assert!((a - b).abs() <= 1e-3 * b, "{spec}: ascent {a} brute {b}");
            }
        }
    }

    /// Amemiya form of the dual of a normalized Luxemburg norm:
    /// `N inf_k (1 + ∫Ψ(k|h|)) / k` with `Ψ` the conjugate Young function.
    fn amemiya_dual(spec: &GaugeNormSpec, h: &CircleFunction) -> f64 {
        let NormVariant::Orlicz { young } = spec.variant() else {
            unreachable!()
        };
        let knots: Vec<(f64, f64)> = young.knots().collect();
        let psi = |y: f64| knots.iter().fold(0.0_f64, |m, (x, p)| m.max(y * x - p));
        let dist = Distribution::from_function(h).unwrap();
        // convex in t = 1/k: t (1 + ∫Ψ(|h|/t))
        let g = |t: f64| {
            t * (1.0
                + dist
                    .values()
                    .iter()
                    .zip(dist.measures())
                    .map(|(v, m)| m * psi(v / t))
                    .sum::<f64>())
        };
        let mut lo = dist.max() / young.final_slope();
        let mut hi = g(lo);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - ratio * (hi - lo);
            let b = lo + ratio * (hi - lo);
            if g(a) <= g(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        spec.normalization() * g(0.5 * (lo + hi))
    }

    #[test]
    fn orlicz_ascent_matches_amemiya_form() {
        let spec = GaugeNormSpec::l_log_l().unwrap();
        for (n, seed) in [(64, 0), (64, 1), (256, 2)] {
            let h = random(Grid::new(n).unwrap(), 400 + seed);
            let oracle = amemiya_dual(&spec, &h);
            let a = dual_norm(&spec, &h, DualMethod::Ascent).unwrap();
            assert!(((a - oracle) / oracle).abs() < 1e-6, "n={n}: ascent {a} oracle {oracle}");
        }
    }

    #[test]
    fn unsupported_closed_form() {
        let g = Grid::new(8).unwrap();
        let spec = GaugeNormSpec::lorentz(2.0, 1.0).unwrap();
        assert!(matches!(
            dual_norm(&spec, &random(g, 1), DualMethod::ClosedForm),
            Err(Error::UnsupportedNorm(_))
        ));
        let big = Grid::new(32).unwrap();
        assert!(matches!(
            dual_norm(&spec, &random(big, 1), DualMethod::BruteSmall),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn pairing_bounded_by_norm_times_dual() {
        let g = Grid::new(64).unwrap();
        for spec in shipped_continuous_specs() {
            for seed in 0..4 {
                let f = random(g, 200 + seed);
                let h = random(g, 300 + seed);
                let lhs = pairing(&f, &h).unwrap().norm();
                let rhs = spec.evaluate(&f).unwrap() * dual_norm(&spec, &h, DualMethod::Ascent).unwrap();
                assert!(lhs <= rhs + 1e-9, "{spec}");
            }
        }
    }

    #[test]
    fn dual_evaluator_is_a_normalized_gauge_norm() {
        for spec in [
            GaugeNormSpec::lp(1.5).unwrap(),
            GaugeNormSpec::lorentz(2.0, 1.0).unwrap(),
        ] {
            let dual = DualNorm::new(spec, DualMethod::Ascent);
            let report = validate_axioms(&dual, 20, 9);
            assert!(report.passed(), "{}", report.summary());
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in [DualMethod::ClosedForm, DualMethod::Ascent, DualMethod::BruteSmall] {
            assert_eq!(m.to_string().parse::<DualMethod>().unwrap(), m);
        }
        assert!("newton".parse::<DualMethod>().is_err());
    }
}
