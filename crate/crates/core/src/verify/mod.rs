//! Executable checks of the solution properties.
//!
//! Each check quantifies its inequality at every grid instant and reports the
//! largest excess over the allowed bound (clipped at zero), where it occurred,
//! and whether it stayed within tolerance. `check_*` functions solve whatever
//! they need from raw inputs; the matching `assess_*` functions take solved
//! instances so that corrupted solutions can be fed through the same
//! assertions as negative controls.

mod j1;
pub mod suite;

pub use j1::{assess_j1, check_j1_bound, j1_distance, TimeChange};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boundaries::{BoundaryFunction, BoundaryPair};
use crate::decomposition::{oscillation_times, piecewise_representation, support_check, ScheduleCase};
use crate::error::{Error, Result};
use crate::genpaths::rng_from_seed;
use crate::pathkit::{CadlagPath, RangeExtrema};
use crate::reflector::{coupled_fixpoint, reflect_direct, solve, solve_one_sided, SkorokhodSolution};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub passed: bool,
    /// Largest excess over the asserted bound; `null` in JSON when unbounded.
    #[serde(with = "finite_or_null")]
    pub worst_violation: f64,
    pub location: Option<usize>,
    pub details: String,
    pub tolerance: f64,
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl VerificationReport {
    /// A check that could not run counts as failed with unbounded violation.
    pub fn from_error(check_name: &str, tolerance: f64, err: &Error) -> Self {
        Self {
            check_name: check_name.to_string(),
            passed: false,
            worst_violation: f64::INFINITY,
            location: None,
            details: format!("error: {err}"),
            tolerance,
        }
    }

    /// Worst of several reports of the same check.
    pub fn combine(check_name: &str, reports: Vec<VerificationReport>) -> Self {
        let tolerance = reports.first().map_or(0.0, |r| r.tolerance);
        let passed = reports.iter().all(|r| r.passed);
        let worst = reports
            .iter()
            .max_by(|a, b| a.worst_violation.total_cmp(&b.worst_violation));
        Self {
            check_name: check_name.to_string(),
            passed,
            worst_violation: worst.map_or(0.0, |r| r.worst_violation),
            location: worst.and_then(|r| r.location),
            details: reports
                .iter()
                .map(|r| r.details.as_str())
                .collect::<Vec<_>>()
                .join(" | "),
            tolerance,
        }
    }
}

/// Running record of the largest violation seen.
#[derive(Debug)]
pub(crate) struct Worst {
    excess: f64,
    location: Option<usize>,
    note: String,
}

impl Worst {
    pub(crate) fn new() -> Self {
        Self {
            excess: 0.0,
            location: None,
            note: String::new(),
        }
    }

    /// Records `excess = lhs − rhs` of an inequality `lhs <= rhs` at index `i`.
    pub(crate) fn record(&mut self, i: usize, excess: f64, what: impl FnOnce() -> String) {
        let e = if excess.is_nan() { f64::INFINITY } else { excess };
        if e > self.excess {
            self.excess = e;
            self.location = Some(i);
            self.note = what();
        }
    }

    pub(crate) fn report(self, check_name: &str, tolerance: f64, summary: String) -> VerificationReport {
        let details = if self.note.is_empty() {
            summary
        } else {
            format!("{summary}; worst: {}", self.note)
        };
        VerificationReport {
            check_name: check_name.to_string(),
            passed: self.excess <= tolerance,
            worst_violation: self.excess,
            location: self.location,
            details,
            tolerance,
        }
    }
}

/// `g(t_i, x_i)` along a path, with offsets read on the path's grid.
fn eval_along(g: &BoundaryFunction, x: &CadlagPath) -> Vec<f64> {
    let b = g.offset().resample(x.grid());
    x.values()
        .iter()
        .zip(b.values())
        .map(|(&xi, &bi)| g.apply_offset(bi, xi))
        .collect()
}

/// Constraints, variation split, flat-off-contact and the initial-jump rule.
pub fn check_definition(sol: &SkorokhodSolution, pair: &BoundaryPair, tol: &Tolerances) -> VerificationReport {
    const NAME: &str = "definition";
    let t = tol.check;
    let mut w = Worst::new();
    let upper = eval_along(pair.upper(), &sol.x);
    let lower = eval_along(pair.lower(), &sol.x);
    let (mut kr0, mut kl0) = (0.0, 0.0);
    for i in 0..sol.len() {
        let (s, k, x) = (sol.s.value(i), sol.k.value(i), sol.x.value(i));
        if x != s + k {
            w.record(i, f64::INFINITY, || format!("X != S + K at {i}"));
        }
        w.record(i, upper[i], || format!("L(t, X) = {:e} at {i}", upper[i]));
        w.record(i, -lower[i], || format!("R(t, X) = {:e} at {i}", lower[i]));
        w.record(i, k - sol.phi.value(i), || format!("K above Phi at {i}"));
        w.record(i, sol.psi.value(i) - k, || format!("K below Psi at {i}"));
        let (kr, kl, tv) = (sol.kr.value(i), sol.kl.value(i), sol.tv.value(i));
        let (dr, dl) = (kr - kr0, kl - kl0);
        w.record(i, -dr, || format!("Kr decreases by {:e} at {i}", -dr));
        w.record(i, -dl, || format!("Kl decreases by {:e} at {i}", -dl));
        w.record(i, dr.min(dl), || format!("Kr and Kl both increase at {i}"));
        w.record(i, (kr - kl - k).abs(), || {
            format!("Kr - Kl - K = {:e} at {i}", kr - kl - k)
        });
        w.record(i, (tv - kr - kl).abs(), || {
            format!("TV - Kr - Kl = {:e} at {i}", tv - kr - kl)
        });
        kr0 = kr;
        kl0 = kl;
    }
    // A jump of K at the origin must land on the constraint it pushes away from.
    let k0 = sol.k.value(0);
    if k0 > t {
        w.record(0, lower[0].abs(), || {
            format!("K_0 = {k0:e} > 0 but R(0, X_0) = {:e}", lower[0])
        });
    } else if k0 < -t {
        w.record(0, upper[0].abs(), || {
            format!("K_0 = {k0:e} < 0 but L(0, X_0) = {:e}", upper[0])
        });
    }
    match support_check(sol, pair, t) {
        Ok(rep) => {
            for v in rep.violations {
                w.record(v.index, v.residual, || {
                    format!(
                        "{:?} regulator grows by {:e} off contact (|g| = {:e}) at {}",
                        v.side, v.increment, v.residual, v.index
                    )
                });
            }
        }
        Err(e) => return VerificationReport::from_error(NAME, t, &e),
    }
    w.report(NAME, t, format!("n = {}", sol.len()))
}

/// Re-solves from `d` with driver `T_d(S) + X_d` and boundaries shifted by `d`
/// and compares against the tail of `sol`.
pub fn check_shift(
    sol: &SkorokhodSolution,
    pair: &BoundaryPair,
    d: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    const NAME: &str = "shift";
    let from = sol
        .s
        .grid()
        .index_of(d)
        .ok_or_else(|| Error::Input(format!("shift {d} is not a grid instant")))?;
    let x_d = sol.x.value(from);
    let driver = sol.s.shift_centered(d)?.map(|v| v + x_d)?;
    let shifted = match solve(&driver, &pair.time_shifted(d)?, tol) {
        Ok(s) => s,
        Err(e) => return Ok(VerificationReport::from_error(NAME, tol.check, &e)),
    };
    let x_tail = sol.x.shift_plain(d)?;
    let k_tail = sol.k.shift_centered(d)?;
    let mut w = Worst::new();
    for j in 0..shifted.len() {
        let i = from + j;
        let dx = (shifted.x.value(j) - x_tail.value(j)).abs();
        let dk = (shifted.k.value(j) - k_tail.value(j)).abs();
        w.record(i, dx, || format!("|X^d - H_d X| = {dx:e} at {i}"));
        w.record(i, dk, || format!("|K^d - T_d K| = {dk:e} at {i}"));
    }
    Ok(w.report(NAME, tol.check, format!("d = {d} (index {from})")))
}

fn validate_comparison(s1: &CadlagPath, s2: &CadlagPath, nu: &CadlagPath, exact: bool) -> Result<()> {
    s1.same_grid(s2)?;
    s1.same_grid(nu)?;
    if s1.value(0) != 0.0 || s2.value(0) != 0.0 {
        return Err(Error::Input("comparison drivers must start at 0".into()));
    }
    let v = nu.values();
    if v[0] < 0.0 || v.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Input("nu must be nonnegative and nondecreasing".into()));
    }
    for i in 0..s1.len() {
        let (a, b, n) = (s1.value(i), s2.value(i), nu.value(i));
        let ok = if exact { a == b + n } else { b <= a && a <= b + n };
        if !ok {
            return Err(Error::Input(format!(
                "driver ordering violated at {i}: S1 = {a}, S2 = {b}, nu = {n}"
            )));
        }
    }
    Ok(())
}

fn shifted_start(s: &CadlagPath, c0: f64) -> Result<CadlagPath> {
    s.map(|v| c0 + v)
}

/// Net sandwiches for `K` and `X` of two problems started at `c0^i + S^i`.
#[allow(clippy::too_many_arguments)]
pub fn assess_comparison(
    name: &str,
    k1: &CadlagPath,
    k2: &CadlagPath,
    x1: &CadlagPath,
    x2: &CadlagPath,
    nu: &CadlagPath,
    c01: f64,
    c02: f64,
    tol: &Tolerances,
) -> VerificationReport {
    let p = (c02 - c01).max(0.0);
    let q = (c01 - c02).max(0.0);
    let mut w = Worst::new();
    for i in 0..k1.len() {
        let (a1, a2, y1, y2, n) = (k1.value(i), k2.value(i), x1.value(i), x2.value(i), nu.value(i));
        w.record(i, a1 - p - a2, || format!("K1 - (c02-c01)^+ > K2 at {i}"));
        w.record(i, a2 - (a1 + n + q), || format!("K2 > K1 + nu + (c01-c02)^+ at {i}"));
        w.record(i, y2 - n - p - y1, || format!("X2 - nu - (c02-c01)^+ > X1 at {i}"));
        w.record(i, y1 - (y2 + n + q), || format!("X1 > X2 + nu + (c01-c02)^+ at {i}"));
    }
    w.report(
        name,
        tol.check,
        format!("c01 = {c01}, c02 = {c02}, nu_T = {}", nu.last()),
    )
}

/// One-sided comparison for `S2 <= S1 <= S2 + ν`.
#[allow(clippy::too_many_arguments)]
pub fn check_comparison_one_sided(
    s1: &CadlagPath,
    s2: &CadlagPath,
    c01: f64,
    c02: f64,
    nu: &CadlagPath,
    r: &BoundaryFunction,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    validate_comparison(s1, s2, nu, false)?;
    let (x1, k1) = solve_one_sided(&shifted_start(s1, c01)?, r, tol)?;
    let (x2, k2) = solve_one_sided(&shifted_start(s2, c02)?, r, tol)?;
    Ok(assess_comparison(
        "comparison_one_sided",
        &k1,
        &k2,
        &x1,
        &x2,
        nu,
        c01,
        c02,
        tol,
    ))
}

/// Two-sided net comparison for `S2 <= S1 <= S2 + ν`.
#[allow(clippy::too_many_arguments)]
pub fn check_comparison_net(
    s1: &CadlagPath,
    s2: &CadlagPath,
    c01: f64,
    c02: f64,
    nu: &CadlagPath,
    pair: &BoundaryPair,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    validate_comparison(s1, s2, nu, false)?;
    let a = solve(&shifted_start(s1, c01)?, pair, tol)?;
    let b = solve(&shifted_start(s2, c02)?, pair, tol)?;
    Ok(assess_comparison(
        "comparison_net",
        &a.k,
        &b.k,
        &a.x,
        &b.x,
        nu,
        c01,
        c02,
        tol,
    ))
}

/// Componentwise bounds on `Kr` and `Kl` when `S1 = S2 + ν`.
pub fn assess_split(
    sol1: &SkorokhodSolution,
    sol2: &SkorokhodSolution,
    nu: &CadlagPath,
    c01: f64,
    c02: f64,
    tol: &Tolerances,
) -> VerificationReport {
    let p = (c02 - c01).max(0.0);
    let q = (c01 - c02).max(0.0);
    let mut w = Worst::new();
    for i in 0..sol1.len() {
        let (r1, r2, l1, l2, n) = (
            sol1.kr.value(i),
            sol2.kr.value(i),
            sol1.kl.value(i),
            sol2.kl.value(i),
            nu.value(i),
        );
        w.record(i, r1 - p - r2, || format!("Kr1 - (c02-c01)^+ > Kr2 at {i}"));
        w.record(i, r2 - (r1 + n + q), || format!("Kr2 > Kr1 + nu + (c01-c02)^+ at {i}"));
        w.record(i, l2 - p - l1, || format!("Kl2 - (c02-c01)^+ > Kl1 at {i}"));
        w.record(i, l1 - (l2 + n + q), || format!("Kl1 > Kl2 + nu + (c01-c02)^+ at {i}"));
    }
    w.report(
        "comparison_split",
        tol.check,
        format!("c01 = {c01}, c02 = {c02}, nu_T = {}", nu.last()),
    )
}

/// Split comparison; `S1` is built as `S2 + ν` here.
pub fn check_comparison_split(
    s2: &CadlagPath,
    c01: f64,
    c02: f64,
    nu: &CadlagPath,
    pair: &BoundaryPair,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let s1 = s2.zip_with(nu, |a, b| a + b)?;
    validate_comparison(&s1, s2, nu, true)?;
    let a = solve(&shifted_start(&s1, c01)?, pair, tol)?;
    let b = solve(&shifted_start(s2, c02)?, pair, tol)?;
    Ok(assess_split(&a, &b, nu, c01, c02, tol))
}

/// `Kr2 >= Kr1` and `Kl2 >= Kl1`.
pub fn assess_monotone(sol1: &SkorokhodSolution, sol2: &SkorokhodSolution, tol: &Tolerances) -> VerificationReport {
    let mut w = Worst::new();
    for i in 0..sol1.len() {
        let (dr, dl) = (sol1.kr.value(i) - sol2.kr.value(i), sol1.kl.value(i) - sol2.kl.value(i));
        w.record(i, dr, || format!("Kr1 - Kr2 = {dr:e} at {i}"));
        w.record(i, dl, || format!("Kl1 - Kl2 = {dl:e} at {i}"));
    }
    w.report("monotone_boundaries", tol.check, format!("n = {}", sol1.len()))
}

/// `pair2` must satisfy `L1 <= L2` and `R1 >= R2`, i.e. a narrower band.
pub fn check_monotone_boundaries(
    s: &CadlagPath,
    pair1: &BoundaryPair,
    pair2: &BoundaryPair,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    if pair1.family() != pair2.family() {
        return Err(Error::Input("monotonicity check needs pairs of one family".into()));
    }
    let ordered = |a: &CadlagPath, b: &CadlagPath| {
        let g = a.grid().merge(b.grid());
        let (a, b) = (a.resample(&g), b.resample(&g));
        a.values().iter().zip(b.values()).all(|(x, y)| x >= y)
    };
    if !ordered(pair1.upper().offset(), pair2.upper().offset()) {
        return Err(Error::Input("L1 <= L2 violated: upper offsets not ordered".into()));
    }
    if !ordered(pair2.lower().offset(), pair1.lower().offset()) {
        return Err(Error::Input("R1 >= R2 violated: lower offsets not ordered".into()));
    }
    let a = solve(s, pair1, tol)?;
    let b = solve(s, pair2, tol)?;
    Ok(assess_monotone(&a, &b, tol))
}

/// Envelope bounds per instant and the sup bound on `K1 − K2`.
pub fn assess_continuity(
    sol1: &SkorokhodSolution,
    sol2: &SkorokhodSolution,
    pair1: &BoundaryPair,
    pair2: &BoundaryPair,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    sol1.s.same_grid(&sol2.s)?;
    if pair1.family() != pair2.family() {
        return Err(Error::Input("continuity check needs pairs of one family".into()));
    }
    let (c, big_c) = (pair1.lower_lipschitz(), pair1.upper_lipschitz());
    let scale = pair1.family().offset_scale();
    let grid = sol1.s.grid();
    let gaps = |a: &BoundaryFunction, b: &BoundaryFunction| -> Vec<f64> {
        let (x, y) = (a.offset().resample(grid), b.offset().resample(grid));
        x.values()
            .iter()
            .zip(y.values())
            .map(|(p, q)| scale * (p - q).abs())
            .collect()
    };
    let l_gap = gaps(pair1.upper(), pair2.upper());
    let r_gap = gaps(pair1.lower(), pair2.lower());
    let mut w = Worst::new();
    let mut sup_ds = 0.0f64;
    let mut sup_dk = (0.0f64, 0);
    for i in 0..sol1.len() {
        let ds = (sol1.s.value(i) - sol2.s.value(i)).abs();
        sup_ds = sup_ds.max(ds);
        let dphi = (sol1.phi.value(i) - sol2.phi.value(i)).abs();
        let dpsi = (sol1.psi.value(i) - sol2.psi.value(i)).abs();
        let bphi = big_c / c * ds + l_gap[i] / c;
        let bpsi = big_c / c * ds + r_gap[i] / c;
        w.record(i, dphi - bphi, || format!("|dPhi| = {dphi:e} > {bphi:e} at {i}"));
        w.record(i, dpsi - bpsi, || format!("|dPsi| = {dpsi:e} > {bpsi:e} at {i}"));
        let dk = (sol1.k.value(i) - sol2.k.value(i)).abs();
        if dk > sup_dk.0 {
            sup_dk = (dk, i);
        }
    }
    let l_bar = l_gap.iter().copied().fold(0.0, f64::max);
    let r_bar = r_gap.iter().copied().fold(0.0, f64::max);
    let bound = big_c / c * sup_ds + l_bar.max(r_bar) / c;
    w.record(sup_dk.1, sup_dk.0 - bound, || {
        format!("sup|dK| = {:e} > {bound:e}", sup_dk.0)
    });
    Ok(w.report(
        "uniform_continuity",
        tol.check,
        format!(
            "sup|dK| = {:e}, bound = {bound:e}, sup|dS| = {sup_ds:e}, Lbar = {l_bar:e}, Rbar = {r_bar:e}",
            sup_dk.0
        ),
    ))
}

pub fn check_uniform_continuity(
    s1: &CadlagPath,
    s2: &CadlagPath,
    pair1: &BoundaryPair,
    pair2: &BoundaryPair,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    s1.same_grid(s2)?;
    if pair1.family() != pair2.family() {
        return Err(Error::Input("continuity check needs pairs of one family".into()));
    }
    let a = solve(s1, pair1, tol)?;
    let b = solve(s2, pair2, tol)?;
    assess_continuity(&a, &b, pair1, pair2, tol)
}

/// Windows beyond which domination is sampled instead of exhaustive.
pub const EXHAUSTIVE_WINDOW_LIMIT: usize = 512;
const SAMPLED_WINDOWS: usize = 200_000;

/// `osc(K) <= osc(Φ) + osc(Ψ)` on grid windows.
pub fn check_oscillation_domination(sol: &SkorokhodSolution, tol: &Tolerances) -> VerificationReport {
    const NAME: &str = "oscillation_domination";
    let (k, p, q) = (sol.k.values(), sol.phi.values(), sol.psi.values());
    let n = k.len();
    let mut w = Worst::new();
    if n <= EXHAUSTIVE_WINDOW_LIMIT {
        for i in 0..n {
            let (mut kl, mut kh) = (k[i], k[i]);
            let (mut pl, mut ph) = (p[i], p[i]);
            let (mut ql, mut qh) = (q[i], q[i]);
            for j in i..n {
                kl = kl.min(k[j]);
                kh = kh.max(k[j]);
                pl = pl.min(p[j]);
                ph = ph.max(p[j]);
                ql = ql.min(q[j]);
                qh = qh.max(q[j]);
                let excess = (kh - kl) - (ph - pl) - (qh - ql);
                w.record(i, excess, || format!("window [{i}, {j}] exceeds by {excess:e}"));
            }
        }
        return w.report(NAME, tol.check, format!("all {} windows", n * (n + 1) / 2));
    }
    let (rk, rp, rq) = (RangeExtrema::new(k), RangeExtrema::new(p), RangeExtrema::new(q));
    let mut rng = rng_from_seed(n as u64);
    for _ in 0..SAMPLED_WINDOWS {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (i, j) = (a.min(b), a.max(b));
        let excess = rk.oscillation(i, j) - rp.oscillation(i, j) - rq.oscillation(i, j);
        w.record(i, excess, || format!("window [{i}, {j}] exceeds by {excess:e}"));
    }
    w.report(NAME, tol.check, format!("{SAMPLED_WINDOWS} sampled windows"))
}

/// `min(Φ − Ψ) >= α / C`.
pub fn check_separation(sol: &SkorokhodSolution, pair: &BoundaryPair, tol: &Tolerances) -> VerificationReport {
    let floor = pair.alpha() / pair.upper_lipschitz();
    let mut w = Worst::new();
    let mut min_gap = f64::INFINITY;
    for i in 0..sol.len() {
        let gap = sol.phi.value(i) - sol.psi.value(i);
        min_gap = min_gap.min(gap);
        w.record(i, floor - gap, || format!("Phi - Psi = {gap:e} < {floor:e} at {i}"));
    }
    w.report(
        "separation",
        tol.sep,
        format!("min(Phi - Psi) = {min_gap:e}, alpha/C = {floor:e}"),
    )
}

/// The stored `K` must equal the literal lattice formula bit for bit.
pub fn check_oracle(sol: &SkorokhodSolution) -> VerificationReport {
    const NAME: &str = "oracle_equivalence";
    let direct = match reflect_direct(&sol.phi, &sol.psi) {
        Ok(k) => k,
        Err(e) => return VerificationReport::from_error(NAME, 0.0, &e),
    };
    let mut w = Worst::new();
    for i in 0..sol.len() {
        let (a, b) = (sol.k.value(i), direct.value(i));
        if a.to_bits() != b.to_bits() {
            w.record(i, (a - b).abs().max(f64::MIN_POSITIVE), || {
                format!("K = {a:e}, direct = {b:e} at {i}")
            });
        }
    }
    w.report(NAME, 0.0, format!("n = {}", sol.len()))
}

/// Segment-wise representation and boundary-touch identities, exactly.
pub fn check_representation(sol: &SkorokhodSolution) -> VerificationReport {
    const NAME: &str = "representation";
    let run = || -> Result<VerificationReport> {
        let sched = oscillation_times(&sol.phi, &sol.psi)?;
        let rep = piecewise_representation(&sol.phi, &sol.psi, &sched)?;
        let mut w = Worst::new();
        let mut mismatch = |i: usize, a: f64, b: f64, what: &str| {
            if a.to_bits() != b.to_bits() {
                w.record(i, (a - b).abs().max(f64::MIN_POSITIVE), || {
                    format!("{what}: {a:e} vs {b:e} at {i}")
                });
            }
        };
        for i in 0..sol.len() {
            mismatch(i, rep.value(i), sol.k.value(i), "representation");
        }
        for &s in &sched.sigmas {
            mismatch(s, sol.k.value(s), sol.phi.value(s), "K at sigma_k vs Phi");
        }
        let skip = usize::from(sched.case_tag == ScheduleCase::UpperFirst);
        for &t in sched.taus.iter().skip(skip) {
            mismatch(t, sol.k.value(t), sol.psi.value(t), "K at tau_k vs Psi");
        }
        Ok(w.report(
            NAME,
            0.0,
            format!(
                "{:?}, {} taus, {} sigmas",
                sched.case_tag,
                sched.taus.len(),
                sched.sigmas.len()
            ),
        ))
    };
    run().unwrap_or_else(|e| VerificationReport::from_error(NAME, 0.0, &e))
}

/// Coupled running-max system reproduces the variation split.
pub fn check_coupled_fixpoint(sol: &SkorokhodSolution, pair: &BoundaryPair, tol: &Tolerances) -> VerificationReport {
    const NAME: &str = "coupled_fixpoint";
    match coupled_fixpoint(&sol.s, pair, sol, tol) {
        Ok(fp) => VerificationReport {
            check_name: NAME.into(),
            passed: true,
            worst_violation: 0.0,
            location: None,
            details: format!("{} sweeps, residual {:e}", fp.sweeps, fp.residual),
            tolerance: tol.fix,
        },
        Err(e) => VerificationReport::from_error(NAME, tol.fix, &e),
    }
}
