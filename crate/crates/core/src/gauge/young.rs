use crate::error::{Error, Result};

/// Convex piecewise-linear Young function given by knots `(x, Φ(x))`,
/// extended linearly past the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungFunction {
    label: String,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl YoungFunction {
    /// Checked constructor: `x_0 = 0`, `Φ(0) = 0`, increasing abscissae,
    /// nondecreasing convex values and a positive final slope.
    pub fn from_table(label: impl Into<String>, knots: &[(f64, f64)]) -> Result<Self> {
        let yf = Self::from_table_unchecked(label, knots)?;
        yf.check_convex()?;
        Ok(yf)
    }

    /// Only checks the shape of the table, not convexity.
    pub fn from_table_unchecked(label: impl Into<String>, knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidSpec(
                "a Young function table needs at least two knots".into(),
            ));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidSpec("non-finite Young function knot".into()));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::InvalidSpec(format!(
                "Young function must start at (0, 0), got {:?}",
                knots[0]
            )));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSpec(
                "Young function abscissae must be strictly increasing".into(),
            ));
        }
        let yf = Self {
            label: label.into(),
            xs: knots.iter().map(|k| k.0).collect(),
            ys: knots.iter().map(|k| k.1).collect(),
        };
        if yf.slope(yf.xs.len() - 2) <= 0.0 {
            return Err(Error::InvalidSpec(
                "Young function must have a positive final slope".into(),
            ));
        }
        Ok(yf)
    }

    /// Tabulate `phi` at `knots` equispaced points on `[0, x_max]`.
    pub fn tabulate(
        label: impl Into<String>,
        phi: impl Fn(f64) -> f64,
        x_max: f64,
        knots: usize,
    ) -> Result<Self> {
        if knots < 2 || x_max.is_nan() || x_max <= 0.0 {
            return Err(Error::InvalidSpec("bad tabulation range".into()));
        }
        let table: Vec<(f64, f64)> = (0..knots)
            .map(|i| {
                let x = x_max * i as f64 / (knots - 1) as f64;
                (x, if i == 0 { 0.0 } else { phi(x) })
            })
            .collect();
        Self::from_table(label, &table)
    }

    /// `Φ(x) = x log(1 + x)` tabulated on `[0, 64]` with 257 knots.
    pub fn l_log_l() -> Self {
        Self::tabulate("L log L", |x| x * x.ln_1p(), 64.0, 257)
            .expect("x log(1+x) is convex")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn slope(&self, seg: usize) -> f64 {
        (self.ys[seg + 1] - self.ys[seg]) / (self.xs[seg + 1] - self.xs[seg])
    }

    fn segment(&self, x: f64) -> usize {
        let last = self.xs.len() - 2;
        match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            i => (i - 1).min(last),
        }
    }

    fn check_convex(&self) -> Result<()> {
        let slopes: Vec<f64> = (0..self.xs.len() - 1).map(|s| self.slope(s)).collect();
        let scale = slopes.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        if slopes[0] < 0.0 {
            return Err(Error::InvalidSpec("Young function must be nondecreasing".into()));
        }
        if let Some(w) = slopes.windows(2).position(|w| w[1] < w[0] - 1e-12 * scale) {
            return Err(Error::InvalidSpec(format!(
                "Young function is not convex at knot {}",
                w + 1
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = self.segment(x);
        self.ys[s] + self.slope(s) * (x - self.xs[s])
    }

    pub(crate) fn final_slope(&self) -> f64 {
        self.slope(self.xs.len() - 2)
    }

    /// Smallest maximizer of `ρx - Φ(x)` over `x ≥ 0` (infinite past the final slope).
    pub(crate) fn smallest_maximizer(&self, rho: f64) -> f64 {
        let segments = self.xs.len() - 1;
        let below = (0..segments).take_while(|&s| self.slope(s) < rho).count();
        if below == segments {
            f64::INFINITY
        } else {
            self.xs[below]
        }
    }

    /// Right derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        self.slope(self.segment(x))
    }

    /// Smallest `x` with `Φ(x) = y`, for `y > 0`.
    pub fn inverse(&self, y: f64) -> f64 {
        let last = self.xs.len() - 2;
        let seg = match self.ys.partition_point(|&v| v < y) {
            0 => 0,
            i => (i - 1).min(last),
        };
        let seg = (seg..=last)
            .find(|&s| self.slope(s) > 0.0)
            .unwrap_or(last);
        self.xs[seg] + (y - self.ys[seg]) / self.slope(seg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_linear_evaluation() {
        let yf = YoungFunction::from_table("t", &[(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(yf.eval(0.5), 0.5);
        assert_eq!(yf.eval(1.5), 2.0);
        assert_eq!(yf.eval(4.0), 7.0);
        assert_eq!(yf.derivative(1.0), 2.0);
        assert_eq!(yf.inverse(2.0), 1.5);
        assert_eq!(yf.inverse(7.0), 4.0);
    }

    #[test]
    fn flat_start_inverse() {
        let yf = YoungFunction::from_table("t", &[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]).unwrap();
        assert_eq!(yf.inverse(0.5), 1.5);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(YoungFunction::from_table("t", &[(0.0, 0.0)]).is_err());
        assert!(YoungFunction::from_table("t", &[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(YoungFunction::from_table("t", &[(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)]).is_err());
        assert!(YoungFunction::from_table_unchecked("t", &[(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)]).is_ok());
        assert!(YoungFunction::from_table("t", &[(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn l_log_l_table() {
        let yf = YoungFunction::l_log_l();
        assert_eq!(yf.knots().count(), 257);
        assert!((yf.eval(1.0) - 2f64.ln()).abs() < 1e-15);
        let x = yf.inverse(1.0);
        assert!((yf.eval(x) - 1.0).abs() < 1e-14);
    }
}
