//! Time changes and the J1 continuity check.
//!
//! For a fixed time change `λ`, `K ∘ λ` solves the problem with driver
//! `S ∘ λ` and boundaries `g(λ(t), x)`, so the uniform estimate applied to the
//! pair `(K', K ∘ λ)` gives a per-`λ` bound. The J1 distance itself is an
//! infimum over all `λ`; for step functions on small grids it is computed
//! exactly by [`j1_distance`].

use crate::boundaries::{BoundaryFunction, BoundaryPair};
use crate::error::{Error, Result};
use crate::pathkit::{CadlagPath, TimeGrid};
use crate::reflector::{solve, SkorokhodSolution};
use crate::verify::{VerificationReport, Worst};
use crate::Tolerances;

/// Largest merged grid on which the exact J1 distance is evaluated.
pub const J1_ORACLE_LIMIT: usize = 12;

/// Increasing map of `[0, T]` onto itself, piecewise linear between the
/// samples `λ(t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChange {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl TimeChange {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Input(format!(
                "time change has {} values for {} instants",
                values.len(),
                grid.len()
            )));
        }
        if values[0] != 0.0 || values[values.len() - 1] != grid.horizon() {
            return Err(Error::Input("time change must fix 0 and the horizon".into()));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Input("time change must be strictly increasing".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn identity(grid: &TimeGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.times().to_vec(),
        }
    }

    /// The map through `(0, 0)`, `(knot, image)`, `(T, T)`, sampled on the
    /// preimage of `target` so that its values are exactly `target`'s instants.
    pub fn two_piece_onto(target: &TimeGrid, knot: f64, image: f64) -> Result<Self> {
        let horizon = target.horizon();
        if !(0.0 < knot && knot < horizon && 0.0 < image && image < horizon) {
            return Err(Error::Input(format!(
                "knot ({knot}, {image}) must lie inside (0, {horizon})^2"
            )));
        }
        let last = target.len() - 1;
        let times = target
            .times()
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                if i == 0 || i == last {
                    s
                } else if s <= image {
                    s * knot / image
                } else {
                    knot + (s - image) * (horizon - knot) / (horizon - image)
                }
            })
            .collect();
        Self::new(TimeGrid::new(times)?, target.times().to_vec())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sup_t |λ(t) − t|`, attained at a sample for a piecewise-linear map.
    pub fn displacement(&self) -> f64 {
        self.grid
            .times()
            .iter()
            .zip(&self.values)
            .map(|(t, l)| (l - t).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact J1 distance on `[0, T]` between two step functions.
///
/// A time change is described by where it sends the jump instants of `g`;
/// feasibility at level `ε` is a shortest-path question over the order in
/// which the jumps of `f` and of `g ∘ λ` occur, and the distance is the least
/// feasible level among the finitely many candidates where feasibility changes.
pub fn j1_distance(f: &CadlagPath, g: &CadlagPath) -> Result<f64> {
    let horizon = f.grid().horizon();
    if g.grid().horizon() != horizon {
        return Err(Error::Domain("J1 distance needs a common horizon".into()));
    }
    let (a, fv, b, gv) = (f.times(), f.values(), g.times(), g.values());
    let mut candidates = vec![0.0];
    for i in 0..a.len() {
        for j in 0..b.len() {
            candidates.push((fv[i] - gv[j]).abs());
            candidates.push((a[i] - b[j]).abs());
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    candidates
        .into_iter()
        .find(|&eps| matching_exists(a, fv, b, gv, horizon, eps))
        .ok_or_else(|| Error::Consistency("no feasible time change found".into()))
}

// Earliest entry time of each state (i, j) = (piece of f, piece of g ∘ λ).
fn matching_exists(a: &[f64], fv: &[f64], b: &[f64], gv: &[f64], horizon: f64, eps: f64) -> bool {
    let (nf, ng) = (a.len(), b.len());
    let close = |i: usize, j: usize| (fv[i] - gv[j]).abs() <= eps;
    if !close(0, 0) {
        return false;
    }
    let mut earliest = vec![f64::INFINITY; nf * ng];
    earliest[0] = 0.0;
    let relax = |slot: &mut f64, t: f64| *slot = slot.min(t);
    for i in 0..nf {
        for j in 0..ng {
            let e = earliest[i * ng + j];
            if !e.is_finite() {
                continue;
            }
            let f_end = if i + 1 < nf { a[i + 1] } else { horizon };
            // Latest instant at which g ∘ λ may still leave piece j.
            let g_latest = match b.get(j + 1) {
                Some(&bj) if bj < horizon => (bj + eps).min(horizon),
                _ => horizon,
            };
            // Both final pieces are the single instant T, entered together by a
            // diagonal move only.
            if i + 1 < nf && a[i + 1] < horizon && a[i + 1] >= e && a[i + 1] <= g_latest && close(i + 1, j) {
                relax(&mut earliest[(i + 1) * ng + j], a[i + 1]);
            }
            if let Some(&bj) = b.get(j + 1) {
                let c = (bj - eps).max(0.0).max(e);
                if bj < horizon && c <= g_latest && c <= f_end && close(i, j + 1) {
                    relax(&mut earliest[i * ng + j + 1], c);
                }
                if i + 1 < nf {
                    let ai = a[i + 1];
                    let forced_ok = (bj == horizon) == (ai == horizon);
                    if ai >= e && (ai - bj).abs() <= eps && forced_ok && close(i + 1, j + 1) {
                        relax(&mut earliest[(i + 1) * ng + j + 1], ai);
                    }
                }
            }
        }
    }
    earliest[nf * ng - 1] <= horizon
}

fn offsets_on(g: &BoundaryFunction, grid: &TimeGrid) -> Vec<f64> {
    g.offset().resample(grid).into_values()
}

// Offsets constant between common instants of both grids.
fn offsets_are_steps_on(g: &BoundaryFunction, a: &TimeGrid, b: &TimeGrid, horizon: f64) -> bool {
    g.offset()
        .breakpoints()
        .into_iter()
        .filter(|&t| t <= horizon)
        .all(|t| a.index_of(t).is_some() && b.index_of(t).is_some())
}

fn offset_range(g: &BoundaryFunction, horizon: f64) -> f64 {
    let o = g.offset();
    let vals = o
        .times()
        .iter()
        .zip(o.values())
        .filter(|(t, _)| **t <= horizon)
        .map(|(_, v)| *v);
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    g.family().offset_scale() * (hi - lo)
}

/// Per-`λ` bound for solved `sol` (driver `S` on `λ`'s image grid) and
/// `sol_prime` (driver `S'` on `λ`'s domain grid), plus the exact-J1
/// consistency checks on small grids.
pub fn assess_j1(
    sol: &SkorokhodSolution,
    sol_prime: &SkorokhodSolution,
    lambda: &TimeChange,
    pair: &BoundaryPair,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    check_compatible(&sol.s, &sol_prime.s, lambda)?;
    let (c, big_c) = (pair.lower_lipschitz(), pair.upper_lipschitz());
    let scale = pair.family().offset_scale();
    let (g_dom, g_img) = (lambda.grid(), sol.s.grid());
    let hat = |g: &BoundaryFunction| {
        offsets_on(g, g_dom)
            .iter()
            .zip(offsets_on(g, g_img))
            .map(|(p, q)| scale * (p - q).abs())
            .fold(0.0, f64::max)
    };
    let (l_hat, r_hat) = (hat(pair.upper()), hat(pair.lower()));
    let ds = sol
        .s
        .values()
        .iter()
        .zip(sol_prime.s.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (mut lhs, mut at) = (0.0f64, 0);
    for i in 0..sol.len() {
        let d = (sol_prime.k.value(i) - sol.k.value(i)).abs();
        if d > lhs || d.is_nan() {
            lhs = d;
            at = i;
        }
    }
    let rhs = l_hat.max(r_hat) / c + big_c / c * ds;
    let mut w = Worst::new();
    w.record(at, lhs - rhs, || format!("sup|K' - K o lambda| = {lhs:e} > {rhs:e}"));
    let mut summary = format!("lhs = {lhs:e}, rhs = {rhs:e}");

    let horizon = g_img.horizon();
    if sol.len() <= J1_ORACLE_LIMIT {
        let d_k = j1_distance(&sol_prime.k, &sol.k)?;
        let via_lambda = lambda.displacement().max(lhs);
        w.record(at, d_k - via_lambda, || {
            format!("J1(K', K) = {d_k:e} exceeds the value {via_lambda:e} attained by lambda")
        });
        summary.push_str(&format!(", J1(K', K) = {d_k:e}"));
        let steps = [pair.upper(), pair.lower()]
            .into_iter()
            .all(|g| offsets_are_steps_on(g, g_dom, g_img, horizon));
        if steps {
            let d_s = j1_distance(&sol_prime.s, &sol.s)?;
            let l_hat_t = offset_range(pair.upper(), horizon);
            let r_hat_t = offset_range(pair.lower(), horizon);
            let bound = l_hat_t.max(r_hat_t) / c + big_c / c * d_s;
            w.record(at, d_k - bound, || format!("J1(K', K) = {d_k:e} > {bound:e}"));
            summary.push_str(&format!(", J1(S', S) = {d_s:e}, J1 bound = {bound:e}"));
        }
    }
    Ok(w.report("j1_bound", tol.check, summary))
}

fn check_compatible(s: &CadlagPath, s_prime: &CadlagPath, lambda: &TimeChange) -> Result<()> {
    if s.times() != lambda.values() {
        return Err(Error::Input("lambda must map its grid onto the grid of S".into()));
    }
    if s_prime.grid() != lambda.grid() {
        return Err(Error::Input("S' must be sampled on the domain grid of lambda".into()));
    }
    Ok(())
}

/// `S` lives on `λ`'s image grid and `S'` on its domain grid.
pub fn check_j1_bound(
    s: &CadlagPath,
    s_prime: &CadlagPath,
    lambda: &TimeChange,
    pair: &BoundaryPair,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    check_compatible(s, s_prime, lambda)?;
    let sol = solve(s, pair, tol)?;
    let sol_prime = solve(s_prime, pair, tol)?;
    assess_j1(&sol, &sol_prime, lambda, pair, tol)
}
