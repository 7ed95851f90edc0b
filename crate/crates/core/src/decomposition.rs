//! Variation split of `K`, the activation schedule of the two constraints, the
//! segment-wise representation of `K` it induces, and the support condition
//! that `Kr` (resp. `Kl`) only grows on contact with `R` (resp. `L`).

use serde::{Deserialize, Serialize};

use crate::boundaries::BoundaryPair;
use crate::error::{Error, Result};
use crate::pathkit::CadlagPath;
use crate::reflector::SkorokhodSolution;

/// `(Kr, Kl, TV)` with `ΔKr = (ΔK)^+`, `ΔKl = (ΔK)^−` and `K_{0−} = 0`.
///
/// `Kr − Kl` reproduces `K` up to rounding in the running sums.
pub fn split_variation(k: &CadlagPath) -> (CadlagPath, CadlagPath, CadlagPath) {
    let n = k.len();
    let (mut kr, mut kl, mut tv) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut up, mut down, mut prev) = (0.0f64, 0.0f64, 0.0f64);
    for &v in k.values() {
        let d = v - prev;
        if d > 0.0 {
            up += d;
        } else if d < 0.0 {
            down -= d;
        }
        kr.push(up);
        kl.push(down);
        tv.push(up + down);
        prev = v;
    }
    let grid = k.grid().clone();
    (
        CadlagPath::from_raw(grid.clone(), kr),
        CadlagPath::from_raw(grid.clone(), kl),
        CadlagPath::from_raw(grid, tv),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleCase {
    /// Neither constraint ever binds; `K ≡ 0`.
    #[serde(rename = "never")]
    NeverActive,
    /// `L` binds first (`σ* < τ*`).
    #[serde(rename = "upper_first")]
    UpperFirst,
    /// `R` binds first (`τ* < σ*`).
    #[serde(rename = "lower_first")]
    LowerFirst,
}

/// Grid indices at which the regulator switches between following `Φ` and `Ψ`.
///
/// `K` follows the running minimum of `Φ` on `[σ_{k−1}, τ_k)` and the running
/// maximum of `Ψ` on `[τ_k, σ_k)`. In the upper-first case `τ_0 = 0` is
/// nominal and `K = 0` on `[0, σ_0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OscillationSchedule {
    #[serde(rename = "case")]
    pub case_tag: ScheduleCase,
    pub sigma_star: Option<usize>,
    pub tau_star: Option<usize>,
    pub taus: Vec<usize>,
    pub sigmas: Vec<usize>,
}

impl OscillationSchedule {
    /// `(index, follows_phi)` for each segment start, in time order.
    fn segments(&self) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        let skip_tau0 = self.case_tag == ScheduleCase::UpperFirst;
        let len = self.taus.len().max(self.sigmas.len());
        for k in 0..len {
            if let Some(&t) = self.taus.get(k) {
                if !(k == 0 && skip_tau0) {
                    out.push((t, false));
                }
            }
            if let Some(&s) = self.sigmas.get(k) {
                out.push((s, true));
            }
        }
        out
    }
}

fn check_order(phi: &CadlagPath, psi: &CadlagPath) -> Result<()> {
    phi.same_grid(psi)?;
    for (i, (p, q)) in phi.values().iter().zip(psi.values()).enumerate() {
        if !(p > q) {
            return Err(Error::EnvelopeOrder { index: i, gap: p - q });
        }
    }
    Ok(())
}

// First i > from with min_{[from, i]} Φ <= Ψ_i.
fn next_tau(p: &[f64], q: &[f64], from: usize) -> Option<usize> {
    let mut run = p[from];
    (from + 1..p.len()).find(|&i| {
        run = run.min(p[i]);
        run <= q[i]
    })
}

// First i > from with max_{[from, i]} Ψ >= Φ_i.
fn next_sigma(p: &[f64], q: &[f64], from: usize) -> Option<usize> {
    let mut run = q[from];
    (from + 1..p.len()).find(|&i| {
        run = run.max(q[i]);
        run >= p[i]
    })
}

/// Activation schedule on the grid.
///
/// `σ*` is index 0 when `Φ_0 < 0` and otherwise the first `i >= 1` with
/// `Φ_i <= 0`; `τ*` likewise with `Ψ_0 > 0` and `Ψ_i >= 0`.
pub fn oscillation_times(phi: &CadlagPath, psi: &CadlagPath) -> Result<OscillationSchedule> {
    check_order(phi, psi)?;
    let (p, q) = (phi.values(), psi.values());
    let sigma_star = if p[0] < 0.0 {
        Some(0)
    } else {
        (1..p.len()).find(|&i| p[i] <= 0.0)
    };
    let tau_star = if q[0] > 0.0 {
        Some(0)
    } else {
        (1..q.len()).find(|&i| q[i] >= 0.0)
    };
    let mut sched = OscillationSchedule {
        case_tag: ScheduleCase::NeverActive,
        sigma_star,
        tau_star,
        taus: Vec::new(),
        sigmas: Vec::new(),
    };
    let mut sigma = match (sigma_star, tau_star) {
        (None, None) => return Ok(sched),
        (Some(s), t) if t.is_none_or(|t| s < t) => {
            sched.case_tag = ScheduleCase::UpperFirst;
            sched.taus.push(0);
            sched.sigmas.push(s);
            s
        }
        (_, Some(t)) => {
            sched.case_tag = ScheduleCase::LowerFirst;
            sched.taus.push(t);
            match next_sigma(p, q, t) {
                Some(s) => {
                    sched.sigmas.push(s);
                    s
                }
                None => return Ok(sched),
            }
        }
        (Some(_), None) => unreachable!("covered by the upper-first arm"),
    };
    while let Some(t) = next_tau(p, q, sigma) {
        sched.taus.push(t);
        match next_sigma(p, q, t) {
            Some(s) => {
                sched.sigmas.push(s);
                sigma = s;
            }
            None => break,
        }
    }
    Ok(sched)
}

/// Assembles `K` segment by segment from a schedule.
pub fn piecewise_representation(phi: &CadlagPath, psi: &CadlagPath, sched: &OscillationSchedule) -> Result<CadlagPath> {
    let expected = oscillation_times(phi, psi)?;
    if &expected != sched {
        return Err(Error::Consistency(format!(
            "schedule {sched:?} does not match the envelopes (expected {expected:?})"
        )));
    }
    let (p, q) = (phi.values(), psi.values());
    let mut k = vec![0.0; p.len()];
    let segments = sched.segments();
    for (n, &(start, follows_phi)) in segments.iter().enumerate() {
        let end = segments.get(n + 1).map_or(p.len(), |s| s.0);
        let mut run = if follows_phi { f64::INFINITY } else { f64::NEG_INFINITY };
        for i in start..end {
            run = if follows_phi { run.min(p[i]) } else { run.max(q[i]) };
            k[i] = run + 0.0;
        }
    }
    CadlagPath::new(phi.grid().clone(), k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Kr` growing away from `R = 0`.
    Lower,
    /// `Kl` growing away from `L = 0`.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportViolation {
    pub index: usize,
    pub side: Side,
    pub increment: f64,
    /// `|R(t, X_t)|` or `|L(t, X_t)|` at the increment.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub passed: bool,
    pub violations: Vec<SupportViolation>,
}

/// Flags every increment of `Kr` (resp. `Kl`) above `tol` taken while
/// `|R(t, X_t)|` (resp. `|L(t, X_t)|`) exceeds `tol`.
pub fn support_check(sol: &SkorokhodSolution, pair: &BoundaryPair, tol: f64) -> Result<SupportReport> {
    let grid = sol.x.grid();
    let bu = pair.upper().offset().resample(grid);
    let bl = pair.lower().offset().resample(grid);
    let mut violations = Vec::new();
    for i in 0..sol.len() {
        let x = sol.x.value(i);
        let (kr0, kl0) = if i == 0 {
            (0.0, 0.0)
        } else {
            (sol.kr.value(i - 1), sol.kl.value(i - 1))
        };
        let checks = [
            (
                Side::Lower,
                sol.kr.value(i) - kr0,
                pair.lower().apply_offset(bl.value(i), x),
            ),
            (
                Side::Upper,
                sol.kl.value(i) - kl0,
                pair.upper().apply_offset(bu.value(i), x),
            ),
        ];
        for (side, increment, g) in checks {
            if increment > tol && g.abs() > tol {
                violations.push(SupportViolation {
                    index: i,
                    side,
                    increment,
                    residual: g.abs(),
                });
            }
        }
    }
    Ok(SupportReport {
        passed: violations.is_empty(),
        violations,
    })
}
