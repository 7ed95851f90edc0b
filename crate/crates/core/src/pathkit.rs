//! Piecewise-constant càdlàg paths on finite time grids.
//!
//! A [`CadlagPath`] holds `values[i]` on `[t_i, t_{i+1})` and `values[n-1]` on
//! `[t_{n-1}, ∞)`. Suprema and infima over closed windows whose endpoints are
//! grid instants are therefore attained at grid points, which is what makes the
//! reflection formulas exact on this class.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Strictly increasing, finite sample instants starting at the origin.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    times: Arc<[f64]>,
}

impl PartialEq for TimeGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.times, &other.times) || self.times[..] == other.times[..]
    }
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Grid("grid must contain at least one instant".into()));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::Grid(format!("non-finite time at index {i}")));
        }
        if times[0] != 0.0 {
            return Err(Error::Grid(format!("first instant must be 0, found {}", times[0])));
        }
        if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::Grid(format!("times not strictly increasing at index {}", i + 1)));
        }
        Ok(Self { times: times.into() })
    }

    /// `n` equally spaced instants on `[0, horizon]`.
    pub fn uniform(n: usize, horizon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Grid("grid must contain at least one instant".into()));
        }
        if !(horizon > 0.0 && horizon.is_finite()) && n > 1 {
            return Err(Error::Grid(format!("horizon must be positive, got {horizon}")));
        }
        let times = if n == 1 {
            vec![0.0]
        } else {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { horizon } else { horizon * i as f64 / last })
                .collect()
        };
        Self::new(times)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    /// Last sampled instant.
    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Index of `t` if it is exactly a grid instant.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let i = self.times.partition_point(|&s| s < t);
        (i < self.times.len() && self.times[i] == t).then_some(i)
    }

    /// Largest `i` with `t_i <= t`. Requires `t >= 0`.
    pub fn locate(&self, t: f64) -> Result<usize> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        Ok(self.times.partition_point(|&s| s <= t) - 1)
    }

    /// Union of both instant sets.
    pub fn merge(&self, other: &TimeGrid) -> TimeGrid {
        if self == other {
            return self.clone();
        }
        let (a, b) = (self.times(), other.times());
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        TimeGrid { times: out.into() }
    }

    fn tail(&self, from: usize) -> TimeGrid {
        let d = self.times[from];
        TimeGrid {
            times: self.times[from..].iter().map(|t| t - d).collect(),
        }
    }
}

/// Which value a path takes just before the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreOrigin {
    /// Inputs: `S_{0-} = S_0`.
    Input,
    /// Regulators: `K_{0-} = 0`.
    Regulator,
}

/// Right-continuous piecewise-constant path sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CadlagPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl CadlagPath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Path(format!(
                "{} values for a grid of {} instants",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Path(format!("non-finite value at index {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_points(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(TimeGrid::new(times)?, values)
    }

    /// Constant path on the single-instant grid `{0}`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(TimeGrid::new(vec![0.0])?, vec![value])
    }

    pub fn filled(grid: &TimeGrid, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: &TimeGrid) -> Self {
        Self::filled(grid, 0.0)
    }

    // Callers guarantee matching length and finite values.
    pub(crate) fn from_raw(grid: TimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Right-continuous lookup: `values[i]` for the largest `i` with `t_i <= t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.grid.locate(t)?])
    }

    pub fn left_limit(&self, i: usize, pre_origin: PreOrigin) -> Result<f64> {
        self.check_index(i)?;
        Ok(match (i, pre_origin) {
            (0, PreOrigin::Input) => self.values[0],
            (0, PreOrigin::Regulator) => 0.0,
            _ => self.values[i - 1],
        })
    }

    /// Minimum and maximum over the closed index window `[i, j]`.
    pub fn window_extrema(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        self.check_window(i, j)?;
        Ok(self.values[i..=j]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            }))
    }

    pub fn oscillation(&self, i: usize, j: usize) -> Result<f64> {
        let (lo, hi) = self.window_extrema(i, j)?;
        Ok(hi - lo)
    }

    /// `T_d`: `t ↦ ψ_{d+t} − ψ_d` on the renormalised tail grid.
    pub fn shift_centered(&self, d: f64) -> Result<CadlagPath> {
        let from = self.grid_index(d)?;
        let base = self.values[from];
        Ok(CadlagPath {
            grid: self.grid.tail(from),
            values: self.values[from..].iter().map(|v| v - base).collect(),
        })
    }

    /// `H_d`: `t ↦ ψ_{d+t}` on the renormalised tail grid.
    pub fn shift_plain(&self, d: f64) -> Result<CadlagPath> {
        let from = self.grid_index(d)?;
        Ok(CadlagPath {
            grid: self.grid.tail(from),
            values: self.values[from..].to_vec(),
        })
    }

    /// `t ↦ ψ_{d+t}` for any `d >= 0`, on grid `{0} ∪ {t_i − d : t_i > d}`.
    pub fn tail_from(&self, d: f64) -> Result<CadlagPath> {
        let at = self.grid.locate(d)?;
        let mut times = vec![0.0];
        let mut values = vec![self.values[at]];
        for i in at + 1..self.len() {
            times.push(self.grid.time(i) - d);
            values.push(self.values[i]);
        }
        CadlagPath::from_points(times, values)
    }

    /// Values carried onto `grid` by right-continuous lookup.
    pub fn resample(&self, grid: &TimeGrid) -> CadlagPath {
        if &self.grid == grid {
            return self.clone();
        }
        let values = grid
            .times()
            .iter()
            .map(|&t| self.values[self.grid.partition(t)])
            .collect();
        CadlagPath {
            grid: grid.clone(),
            values,
        }
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<CadlagPath> {
        CadlagPath::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two paths on the same grid.
    pub fn zip_with(&self, other: &CadlagPath, f: impl Fn(f64, f64) -> f64) -> Result<CadlagPath> {
        self.same_grid(other)?;
        CadlagPath::new(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    /// `max_i |self_i − other_i|` on a shared grid.
    pub fn sup_distance(&self, other: &CadlagPath) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Instants (index ≥ 1) at which the value changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        (1..self.len())
            .filter(|&i| self.values[i] != self.values[i - 1])
            .map(|i| self.grid.time(i))
            .collect()
    }

    pub fn same_grid(&self, other: &CadlagPath) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Domain("paths are sampled on different grids".into()));
        }
        Ok(())
    }

    fn grid_index(&self, d: f64) -> Result<usize> {
        self.grid
            .index_of(d)
            .ok_or_else(|| Error::Domain(format!("shift {d} is not a grid instant")))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::Domain(format!(
                "index {i} out of range for {} samples",
                self.len()
            )));
        }
        Ok(())
    }

    fn check_window(&self, i: usize, j: usize) -> Result<()> {
        if i > j {
            return Err(Error::Domain(format!("empty window [{i}, {j}]")));
        }
        self.check_index(j)
    }
}

impl TimeGrid {
    // Like `locate`, for times already known to be >= 0.
    fn partition(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t).saturating_sub(1)
    }
}

/// Sparse table answering window min/max queries in O(1) after O(n log n) setup.
#[derive(Debug, Clone)]
pub struct RangeExtrema {
    mins: Vec<Vec<f64>>,
    maxs: Vec<Vec<f64>>,
}

impl RangeExtrema {
    pub fn new(values: &[f64]) -> Self {
        let mut mins = vec![values.to_vec()];
        let mut maxs = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let (pmin, pmax) = (&mins[mins.len() - 1], &maxs[maxs.len() - 1]);
            let count = values.len() + 1 - 2 * width;
            let lmin = (0..count).map(|i| pmin[i].min(pmin[i + width])).collect();
            let lmax = (0..count).map(|i| pmax[i].max(pmax[i + width])).collect();
            mins.push(lmin);
            maxs.push(lmax);
            width *= 2;
        }
        Self { mins, maxs }
    }

    /// `(min, max)` over `[i, j]`; panics on an empty or out-of-range window.
    pub fn query(&self, i: usize, j: usize) -> (f64, f64) {
        assert!(i <= j && j < self.mins[0].len(), "bad window [{i}, {j}]");
        let level = (usize::BITS - 1 - (j - i + 1).leading_zeros()) as usize;
        let w = 1 << level;
        let lo = self.mins[level][i].min(self.mins[level][j + 1 - w]);
        let hi = self.maxs[level][i].max(self.maxs[level][j + 1 - w]);
        (lo, hi)
    }

    pub fn oscillation(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = self.query(i, j);
        hi - lo
    }
}
