//! Deterministic test corpus with known invariant-subspace verdicts.
//!
//! Arcs and unions of arcs generate doubly invariant subspaces; monomials,
//! Blaschke products, outer functions and their products generate simply
//! invariant ones. Random parameters are drawn from a seeded ChaCha8
//! stream. Arcs are kept short enough (total measure at most 1/2, gaps of
//! at least one radian between the pieces of a union) for the backward
//! distance to resolve them at 64 shifts.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{write_function, FileKind};
use crate::spectral::{CircleFunction, Grid};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpectedVerdict {
    Simply,
    Doubly,
}

#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub name: String,
    pub description: String,
    pub function: CircleFunction,
    pub expected: ExpectedVerdict,
    /// Closed-form inner factor, when known.
    pub inner: Option<(String, CircleFunction)>,
    /// Closed-form outer factor, when known.
    pub outer: Option<(String, CircleFunction)>,
}

impl CorpusItem {
    pub fn is_analytic(&self) -> bool {
        self.expected == ExpectedVerdict::Simply
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one() -> Complex64 {
    c(1.0, 0.0)
}

/// `(z - a) / (1 - ā z)`.
pub fn blaschke_factor(a: Complex64) -> impl Fn(Complex64) -> Complex64 {
    move |z| (z - a) / (one() - a.conj() * z)
}

/// Indicator of a union of arcs `[from, from + len)` (angles mod 2π).
pub fn arc_indicator(grid: Grid, arcs: &[(f64, f64)]) -> CircleFunction {
    CircleFunction::from_angle_fn(grid, |t| {
        let inside = arcs
            .iter()
            .any(|&(from, len)| (t - from).rem_euclid(2.0 * PI) < len);
        c(if inside { 1.0 } else { 0.0 }, 0.0)
    })
}

fn fmt_c(a: Complex64) -> String {
    format!("{:.6}{:+.6}i", a.re, a.im)
}

struct Builder {
    grid: Grid,
    rng: ChaCha8Rng,
    items: Vec<CorpusItem>,
}

impl Builder {
    fn zero_in_disc(&mut self, max_radius: f64) -> Complex64 {
        let r = self.rng.gen_range(0.1..max_radius);
        let t = self.rng.gen_range(0.0..2.0 * PI);
        Complex64::from_polar(r, t)
    }

    fn simply(
        &mut self,
        name: &str,
        description: String,
        inner: (String, CircleFunction),
        outer: (String, CircleFunction),
    ) {
        let function = inner.1.try_mul(&outer.1).expect("same grid");
        self.items.push(CorpusItem {
            name: name.into(),
            description,
            function,
            expected: ExpectedVerdict::Simply,
            inner: Some(inner),
            outer: Some(outer),
        });
    }

    fn doubly(&mut self, name: &str, arcs: Vec<(f64, f64)>) {
        let description = arcs
            .iter()
            .map(|(a, l)| format!("[{a:.6}, {:.6})", a + l))
            .collect::<Vec<_>>()
            .join(" ∪ ");
        self.items.push(CorpusItem {
            name: name.into(),
            description: format!("indicator of {description}"),
            function: arc_indicator(self.grid, &arcs),
            expected: ExpectedVerdict::Doubly,
            inner: None,
            outer: None,
        });
    }

    fn fun(&self, f: impl Fn(Complex64) -> Complex64) -> CircleFunction {
        CircleFunction::from_fn(self.grid, f)
    }

    fn unit(&self) -> (String, CircleFunction) {
        ("1".into(), CircleFunction::constant(self.grid, one()))
    }
}

/// The canonical corpus on `grid`, deterministic in `seed`.
pub fn canonical_corpus(grid: Grid, seed: u64) -> Vec<CorpusItem> {
    let mut b = Builder {
        grid,
        rng: ChaCha8Rng::seed_from_u64(seed),
        items: Vec::new(),
    };

    for k in 0..=3 {
        let inner = (format!("z^{k}"), CircleFunction::monomial(grid, k));
        let unit = b.unit();
        b.simply(&format!("monomial_{k}"), format!("z^{k}"), inner, unit);
    }

    let half = Complex64::new(0.5, 0.0);
    let inner = ("B(0.5)".to_string(), b.fun(blaschke_factor(half)));
    let unit = b.unit();
    b.simply("blaschke_half", "(z - 1/2)/(1 - z/2)".into(), inner, unit);
    for i in 0..2 {
        let a = b.zero_in_disc(0.8);
        let inner = (format!("B({})", fmt_c(a)), b.fun(blaschke_factor(a)));
        let unit = b.unit();
        b.simply(&format!("blaschke_random_{i}"), format!("Blaschke factor with zero {}", fmt_c(a)), inner, unit);
    }
    for (i, count) in [2, 3].into_iter().enumerate() {
        let zeros: Vec<Complex64> = (0..count).map(|_| b.zero_in_disc(0.7)).collect();
        let label = zeros.iter().map(|a| format!("B({})", fmt_c(*a))).collect::<Vec<_>>().join("·");
        let zs = zeros.clone();
        let inner = (label.clone(), b.fun(move |z| zs.iter().map(|a| blaschke_factor(*a)(z)).product()));
        let unit = b.unit();
        b.simply(&format!("blaschke_product_{i}"), format!("Blaschke product {label}"), inner, unit);
    }

    let outer = ("exp(z)".to_string(), b.fun(|z| z.exp()));
    b.simply("outer_exp_cos", "outer function with modulus exp(cos θ)".into(), b.unit(), outer);
    let outer = ("1+z".to_string(), b.fun(|z| one() + z));
    b.simply("outer_abs_one_plus_z", "outer function with modulus |1 + z|".into(), b.unit(), outer);
    let outer = ("1+z/2".to_string(), b.fun(|z| one() + z / 2.0));
    b.simply("outer_one_plus_half_z", "1 + z/2".into(), b.unit(), outer);
    let (alpha, beta) = ((1.0 + 1.0 / SQRT_2) / 2.0, (1.0 - 1.0 / SQRT_2) / 2.0);
    let outer = (
        format!("({alpha:.6} + {beta:.6} z)^2"),
        b.fun(move |z| (z * beta + alpha).powu(2)),
    );
    b.simply("outer_three_plus_cos", "outer function with modulus (3 + cos θ)/4".into(), b.unit(), outer);
    let a = b.zero_in_disc(0.6);
    let outer = (format!("1/(1 - {} z)", fmt_c(a)), b.fun(move |z| one() / (one() - a * z)));
    b.simply("outer_rational", "outer rational function".into(), b.unit(), outer);

    let inner = ("B(0.5)".to_string(), b.fun(blaschke_factor(half)));
    let outer = ("(1+z)/2".to_string(), b.fun(|z| (one() + z) / 2.0));
    b.simply("mixed_blaschke_half_one_plus_z", "B(1/2)·(1 + z)/2".into(), inner, outer);
    let inner = ("z".to_string(), CircleFunction::monomial(grid, 1));
    let outer = ("exp(z/2)".to_string(), b.fun(|z| (z / 2.0).exp()));
    b.simply("mixed_z_exp", "z·exp(z/2)".into(), inner, outer);
    let inner = ("z^2".to_string(), CircleFunction::monomial(grid, 2));
    let outer = ("(2+z)/3".to_string(), b.fun(|z| (z + 2.0) / 3.0));
    b.simply("mixed_z2_linear", "z²·(2 + z)/3".into(), inner, outer);
    let a = b.zero_in_disc(0.7);
    let inner = (format!("B({})", fmt_c(a)), b.fun(blaschke_factor(a)));
    let outer = ("exp(z)".to_string(), b.fun(|z| z.exp()));
    b.simply("mixed_blaschke_exp", format!("B({})·exp(z)", fmt_c(a)), inner, outer);

    let zeros = [b.zero_in_disc(0.7), b.zero_in_disc(0.7)];
    let w = b.zero_in_disc(0.5);
    let label = format!("B({})·B({})", fmt_c(zeros[0]), fmt_c(zeros[1]));
    let inner = (label.clone(), b.fun(move |z| blaschke_factor(zeros[0])(z) * blaschke_factor(zeros[1])(z)));
    let outer = (format!("1/(1 - {} z)", fmt_c(w)), b.fun(move |z| one() / (one() - w * z)));
    b.simply("mixed_product_rational", format!("{label}·1/(1 - {} z)", fmt_c(w)), inner, outer);

    b.doubly("arc_half", vec![(0.0, PI)]);
    let start = b.rng.gen_range(0.0..2.0 * PI);
    b.doubly("arc_quarter", vec![(start, PI / 2.0)]);
    let start = b.rng.gen_range(0.0..2.0 * PI);
    b.doubly("arc_eighth", vec![(start, PI / 4.0)]);
    let start = b.rng.gen_range(0.0..2.0 * PI);
    let (l1, l2) = (b.rng.gen_range(0.3..0.6), b.rng.gen_range(0.3..0.6));
    let gap = b.rng.gen_range(1.0..2.0);
    b.doubly("arc_union_two", vec![(start, l1), (start + l1 + gap, l2)]);
    let start = b.rng.gen_range(0.0..2.0 * PI);
    let lens: Vec<f64> = (0..3).map(|_| b.rng.gen_range(0.2..0.4)).collect();
    let mut arcs = Vec::new();
    let mut at = start;
    for l in lens {
        arcs.push((at, l));
        at += l + 1.2;
    }
    b.doubly("arc_union_three", arcs);

    b.items
}

#[derive(Debug, Serialize)]
struct ManifestEntry<'a> {
    name: &'a str,
    file: String,
    description: &'a str,
    expected_verdict: ExpectedVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_inner: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_outer: Option<&'a str>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    grid_size: usize,
    seed: u64,
    items: Vec<ManifestEntry<'a>>,
}

pub fn manifest_json(items: &[CorpusItem], grid: Grid, seed: u64) -> String {
    let manifest = Manifest {
        grid_size: grid.size(),
        seed,
        items: items
            .iter()
            .map(|it| ManifestEntry {
                name: &it.name,
                file: format!("{}.txt", it.name),
                description: &it.description,
                expected_verdict: it.expected,
                expected_inner: it.inner.as_ref().map(|(s, _)| s.as_str()),
                expected_outer: it.outer.as_ref().map(|(s, _)| s.as_str()),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    text
}

/// Write every item as a samples file plus `manifest.json` into `dir`.
pub fn write_corpus(dir: &Path, grid: Grid, seed: u64) -> Result<Vec<CorpusItem>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let items = canonical_corpus(grid, seed);
    for it in &items {
        write_function(&dir.join(format!("{}.txt", it.name)), &it.function, FileKind::Samples)?;
    }
    let manifest = dir.join("manifest.json");
    std::fs::write(&manifest, manifest_json(&items, grid, seed))
        .map_err(|e| Error::Io(format!("{}: {e}", manifest.display())))?;
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_large_and_deterministic() {
        let g = Grid::new(256).unwrap();
        let a = canonical_corpus(g, DEFAULT_SEED);
        let b = canonical_corpus(g, DEFAULT_SEED);
        assert!(a.len() >= 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.function.samples(), y.function.samples());
        }
        assert_eq!(manifest_json(&a, g, 42), manifest_json(&b, g, 42));
        let other = canonical_corpus(g, 7);
        assert_ne!(manifest_json(&a, g, 42), manifest_json(&other, g, 7));
    }

    #[test]
    fn manifest_contents() {
        let g = Grid::new(64).unwrap();
        let items = canonical_corpus(g, DEFAULT_SEED);
        let m: serde_json::Value = serde_json::from_str(&manifest_json(&items, g, 42)).unwrap();
        let entries = m["items"].as_array().unwrap();
        for e in entries {
            if e["name"].as_str().unwrap().starts_with("arc") {
                assert_eq!(e["expected_verdict"], "doubly");
            }
        }
        let b = entries.iter().find(|e| e["name"] == "blaschke_half").unwrap();
        assert_eq!(b["expected_outer"], "1");
        assert_eq!(b["expected_verdict"], "simply");
    }

    #[test]
    fn simply_items_are_products_of_their_factors() {
        let g = Grid::new(256).unwrap();
        for it in canonical_corpus(g, 3) {
            if let (Some((_, u)), Some((_, o))) = (&it.inner, &it.outer) {
                let unimodular = u.samples().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12);
                assert!(unimodular, "{}", it.name);
                assert!(it.function.max_distance(&u.try_mul(o).unwrap()).unwrap() == 0.0);
            }
        }
    }
}
