//! Pass/fail records for grid-checked inequalities.

use std::fmt;

/// How a margin is judged against the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// Strict inequality: passes iff every margin is `> tol`.
    Positive,
    /// Non-strict inequality: passes iff every margin is `≥ -tol`.
    NonNegative,
    /// Equality: passes iff every `|margin| ≤ tol`.
    Zero,
}

impl Check {
    pub fn passes(self, margin: f64, tol: f64) -> bool {
        !margin.is_nan()
            && match self {
                Check::Positive => margin > tol,
                Check::NonNegative => margin >= -tol,
                Check::Zero => margin.abs() <= tol,
            }
    }
}

/// Outcome of one grid check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub lemma_id: String,
    pub d: Option<u32>,
    pub check: Check,
    pub passed: bool,
    /// Smallest margin for inequalities, largest `|margin|` for equalities.
    pub worst_margin: f64,
    /// `name=value` pairs separated by `;`.
    pub worst_point: String,
    pub grid: String,
    pub tolerance: f64,
    pub samples: usize,
}

impl VerificationReport {
    pub fn builder(lemma_id: impl Into<String>, check: Check, tolerance: f64) -> ReportBuilder {
        ReportBuilder {
            lemma_id: lemma_id.into(),
            d: None,
            check,
            tolerance,
            grid: String::new(),
            worst: None,
            samples: 0,
        }
    }

    /// Re-judge the worst margin under a different tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.passed = self.check.passes(self.worst_margin, tol);
        self
    }

    /// `worst_point` prefixed with the dimension, as written to CSV.
    pub fn point_with_dim(&self) -> String {
        match self.d {
            Some(d) if self.worst_point.is_empty() => format!("d={d}"),
            Some(d) => format!("d={d};{}", self.worst_point),
            None => self.worst_point.clone(),
        }
    }

    /// Fields in the order of [`CSV_HEADER`].
    pub fn csv_fields(&self) -> [String; 6] {
        [
            self.lemma_id.clone(),
            self.passed.to_string(),
            format!("{:.16e}", self.worst_margin),
            self.point_with_dim(),
            self.grid.clone(),
            format!("{:.16e}", self.tolerance),
        ]
    }
}

/// Combine reports of the same check (e.g. one per tension) into the worst
/// one. Grids are joined and sample counts summed.
pub fn worst_of(reports: Vec<VerificationReport>) -> Option<VerificationReport> {
    let mut it = reports.into_iter();
    let first = it.next()?;
    let (mut best, mut samples, mut passed) = (first.clone(), first.samples, first.passed);
    let mut grids = vec![first.grid];
    for r in it {
        debug_assert_eq!(r.lemma_id, best.lemma_id);
        debug_assert_eq!(r.check, best.check);
        samples += r.samples;
        passed &= r.passed;
        if !grids.contains(&r.grid) {
            grids.push(r.grid.clone());
        }
        let worse = match best.check {
            Check::Positive | Check::NonNegative => r.worst_margin.is_nan() || r.worst_margin < best.worst_margin,
            Check::Zero => r.worst_margin.is_nan() || r.worst_margin.abs() > best.worst_margin.abs(),
        };
        if worse && !best.worst_margin.is_nan() {
            best = r;
        }
    }
    best.samples = samples;
    best.passed = passed;
    best.grid = grids.join(" | ");
    Some(best)
}

pub const CSV_HEADER: [&str; 6] = ["lemma_id", "passed", "worst_margin", "worst_point", "grid", "tolerance"];

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {} worst margin {:.3e} at {} (tol {:.1e}, {})",
            self.lemma_id,
            self.d.map_or(String::from("-"), |d| format!("d={d}")),
            if self.passed { "PASS" } else { "FAIL" },
            self.worst_margin,
            self.worst_point,
            self.tolerance,
            self.grid
        )
    }
}

/// Accumulates margins in a fixed order so the worst point is reproducible.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    lemma_id: String,
    d: Option<u32>,
    check: Check,
    tolerance: f64,
    grid: String,
    worst: Option<(f64, String)>,
    samples: usize,
}

impl ReportBuilder {
    pub fn dim(mut self, d: u32) -> Self {
        self.d = Some(d);
        self
    }

    pub fn grid(mut self, grid: impl Into<String>) -> Self {
        self.grid = grid.into();
        self
    }

    fn badness(&self, margin: f64) -> f64 {
        if margin.is_nan() {
            return f64::INFINITY;
        }
        match self.check {
            Check::Positive | Check::NonNegative => -margin,
            Check::Zero => margin.abs(),
        }
    }

    /// Record one margin; `point` is only formatted when it becomes the worst.
    pub fn observe(&mut self, margin: f64, point: impl FnOnce() -> String) {
        self.samples += 1;
        let worse = match &self.worst {
            None => true,
            Some((m, _)) => self.badness(margin) > self.badness(*m),
        };
        if worse {
            self.worst = Some((margin, point()));
        }
    }

    /// Record a slice of `(margin, point)` pairs in order.
    pub fn observe_all(&mut self, items: impl IntoIterator<Item = (f64, String)>) {
        for (m, p) in items {
            self.observe(m, || p);
        }
    }

    pub fn finish(self) -> VerificationReport {
        let (worst_margin, worst_point) = self.worst.unwrap_or((f64::NAN, String::from("empty grid")));
        let passed = self.check.passes(worst_margin, self.tolerance);
        VerificationReport {
            lemma_id: self.lemma_id,
            d: self.d,
            check: self.check,
            passed,
            worst_margin,
            worst_point,
            grid: self.grid,
            tolerance: self.tolerance,
            samples: self.samples,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_check_keeps_minimum() {
        let mut b = VerificationReport::builder("t", Check::Positive, 0.0);
        b.observe(3.0, || "x=0".into());
        b.observe(1.0, || "x=1".into());
        b.observe(2.0, || "x=2".into());
        let r = b.finish();
        assert!(r.passed);
        assert_eq!(r.worst_margin, 1.0);
        assert_eq!(r.worst_point, "x=1");
    }

    #[test]
    fn zero_check_uses_absolute_value() {
        let mut b = VerificationReport::builder("t", Check::Zero, 1e-3);
        b.observe(1e-4, || "a".into());
        b.observe(-2e-3, || "b".into());
        let r = b.finish();
        assert!(!r.passed);
        assert_eq!(r.worst_point, "b");
    }

    #[test]
    fn nan_fails() {
        let mut b = VerificationReport::builder("t", Check::NonNegative, 1e-9);
        b.observe(1.0, || "a".into());
        b.observe(f64::NAN, || "b".into());
        assert!(!b.finish().passed);
    }

    #[test]
    fn worst_of_picks_smallest_margin() {
        let mk = |m: f64, g: &str| {
            let mut b = VerificationReport::builder("t", Check::Positive, 0.0).grid(g);
            b.observe(m, || format!("m={m}"));
            b.finish()
        };
        let r = worst_of(vec![mk(2.0, "a"), mk(-1.0, "b"), mk(0.5, "a")]).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst_margin, -1.0);
        assert_eq!(r.grid, "a | b");
        assert_eq!(r.samples, 3);
    }

    #[test]
    fn empty_grid_fails() {
        assert!(!VerificationReport::builder("t", Check::Positive, 0.0).finish().passed);
    }
}
