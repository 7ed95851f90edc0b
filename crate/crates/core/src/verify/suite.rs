//! Seeded verification campaigns driven by a JSON manifest.
//!
//! Every `(check, instance, seed)` triple builds its inputs deterministically
//! from the seed, runs one check and yields one record. Instances marked
//! `corrupt` push a tampered solution through the same assertions and are
//! expected to fail.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::boundaries::{BoundaryFunction, BoundaryPair, Family};
use crate::error::{Error, Result};
use crate::genpaths::{generate, rng_from_seed, GenSpec, PathKind};
use crate::pathkit::CadlagPath;
use crate::reflector::{solve, solve_one_sided, SkorokhodSolution};
use crate::verify::{self, TimeChange, VerificationReport};
use crate::Tolerances;

pub const ALL_CHECKS: [&str; 13] = [
    "definition",
    "shift",
    "comparison_one_sided",
    "comparison_net",
    "comparison_split",
    "monotone_boundaries",
    "uniform_continuity",
    "j1_bound",
    "oscillation_domination",
    "representation",
    "oracle_equivalence",
    "separation",
    "coupled_fixpoint",
];

/// Environment variable capping the number of suite worker threads.
pub const THREADS_ENV: &str = "NLSKP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Linear,
    Scaled,
    Sine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverKind {
    #[default]
    Brownian,
    Jump,
}

fn one() -> f64 {
    1.0
}
fn five() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub family: FamilyKind,
    pub n: usize,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default)]
    pub driver: DriverKind,
    #[serde(default = "one")]
    pub vol: f64,
    #[serde(default = "five")]
    pub intensity: f64,
    #[serde(default = "one")]
    pub jump_scale: f64,
    /// Negative control: tamper with the solution before asserting.
    #[serde(default)]
    pub corrupt: bool,
}

impl InstanceSpec {
    pub fn new(family: FamilyKind, n: usize) -> Self {
        Self {
            name: None,
            family,
            n,
            horizon: 1.0,
            driver: DriverKind::Brownian,
            vol: 1.0,
            intensity: 5.0,
            jump_scale: 1.0,
            corrupt: false,
        }
    }

    pub fn jumps(mut self, intensity: f64, jump_scale: f64) -> Self {
        self.driver = DriverKind::Jump;
        self.intensity = intensity;
        self.jump_scale = jump_scale;
        self
    }

    pub fn corrupted(mut self) -> Self {
        self.corrupt = true;
        self
    }

    pub fn label(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let family = match self.family {
            FamilyKind::Linear => "linear",
            FamilyKind::Scaled => "scaled",
            FamilyKind::Sine => "sine",
        };
        let driver = match self.driver {
            DriverKind::Brownian => "brownian",
            DriverKind::Jump => "jump",
        };
        let tag = if self.corrupt { "-corrupt" } else { "" };
        format!("{family}-{driver}-n{}{tag}", self.n)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub instances: Vec<InstanceSpec>,
}

impl Manifest {
    /// Every check on each family plus a jump stress instance, 200 seeds.
    pub fn standard() -> Self {
        Self {
            checks: ALL_CHECKS.iter().map(|s| s.to_string()).collect(),
            seeds: (0..200).collect(),
            instances: vec![
                InstanceSpec::new(FamilyKind::Linear, 64),
                InstanceSpec::new(FamilyKind::Scaled, 64),
                InstanceSpec::new(FamilyKind::Sine, 64),
                InstanceSpec::new(FamilyKind::Linear, 64).jumps(5.0, 2.0),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.checks {
            if !ALL_CHECKS.contains(&c.as_str()) {
                return Err(Error::Input(format!("unknown check `{c}`")));
            }
        }
        for inst in &self.instances {
            if inst.n < 2 {
                return Err(Error::Input(format!("instance `{}` needs n >= 2", inst.label())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub instance: String,
    pub seed: u64,
    #[serde(flatten)]
    pub report: VerificationReport,
}

/// A generated driver and boundary pair.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Driver with origin 0.
    pub base: CadlagPath,
    /// Initial position, so that `s = c0 + base`.
    pub c0: f64,
    pub s: CadlagPath,
    pub pair: BoundaryPair,
}

/// Independent generator stream for one purpose within a seed.
pub fn stream(seed: u64, tag: &str) -> rand_xoshiro::Xoshiro256PlusPlus {
    // FNV-1a of the tag keeps streams distinct across purposes.
    let h = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    rng_from_seed(seed ^ h)
}

fn walk(seed: u64, n: usize, horizon: f64, vol: f64) -> Result<CadlagPath> {
    generate(
        &GenSpec::new(PathKind::Brownian, seed, n)
            .with_horizon(horizon)
            .with_vol(vol),
    )
}

/// Driver with optional initial jump; offsets `l_t` (random walk) and
/// `r_t = l_t + width_t` with `width_t >= w0 ∈ [0.2, 1]`.
pub fn build_instance(spec: &InstanceSpec, seed: u64) -> Result<Instance> {
    let mut rng = stream(seed, "instance");
    let kind = match spec.driver {
        DriverKind::Brownian => PathKind::Brownian,
        DriverKind::Jump => PathKind::Jump,
    };
    let base = generate(
        &GenSpec::new(kind, rng.gen(), spec.n)
            .with_horizon(spec.horizon)
            .with_vol(spec.vol)
            .with_jumps(spec.intensity, spec.jump_scale),
    )?;
    let c0 = if rng.gen_bool(0.25) {
        rng.gen_range(-1.5..1.5)
    } else {
        0.0
    };
    let s = base.map(|v| c0 + v)?;
    let w0: f64 = rng.gen_range(0.2..1.0);
    let low = walk(rng.gen(), spec.n, spec.horizon, 0.3)?.map(|v| v - 0.5 * w0)?;
    let width = walk(rng.gen(), spec.n, spec.horizon, 0.3)?.map(|v| w0 + 0.5 * v.abs())?;
    let high = low.zip_with(&width, |a, b| a + b)?;
    let family = match spec.family {
        FamilyKind::Linear => Family::Linear,
        FamilyKind::Scaled => Family::Scaled {
            a: rng.gen_range(0.5..3.0),
        },
        FamilyKind::Sine => Family::SinePerturbed {
            eps: rng.gen_range(0.1..0.4),
            omega: rng.gen_range(0.5..2.0),
        },
    };
    let pair = BoundaryPair::new(
        BoundaryFunction::new(family, high)?,
        BoundaryFunction::new(family, low)?,
        &Tolerances::default(),
    )?;
    Ok(Instance { base, c0, s, pair })
}

/// Tampers with `K` from the middle index on and pinches the envelopes there.
pub fn corrupt(sol: &SkorokhodSolution) -> Result<SkorokhodSolution> {
    let mid = sol.len() / 2;
    let k: Vec<f64> = sol
        .k
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if i >= mid { v + 100.0 } else { v })
        .collect();
    let mut phi = sol.phi.values().to_vec();
    phi[mid] = sol.psi.value(mid);
    let grid = sol.s.grid().clone();
    SkorokhodSolution::from_parts(
        sol.s.clone(),
        CadlagPath::new(grid.clone(), phi)?,
        sol.psi.clone(),
        CadlagPath::new(grid, k)?,
    )
}

fn bump_tail(p: &CadlagPath) -> Result<CadlagPath> {
    let mid = p.len() / 2;
    CadlagPath::new(
        p.grid().clone(),
        p.values()
            .iter()
            .enumerate()
            .map(|(i, &v)| if i >= mid { v + 100.0 } else { v })
            .collect(),
    )
}

fn maybe_corrupt(sol: SkorokhodSolution, on: bool) -> Result<SkorokhodSolution> {
    if on {
        corrupt(&sol)
    } else {
        Ok(sol)
    }
}

/// Nondecreasing `ν` from 0 on the instance grid.
fn staircase(seed: u64, inst: &Instance) -> Result<CadlagPath> {
    let g = inst.base.grid();
    let spec = GenSpec::new(PathKind::StaircaseNu, seed, g.len())
        .with_horizon(g.horizon())
        .with_jumps(5.0, 0.3);
    generate(&spec)
}

/// Runs one check on the instance generated from `seed`.
pub fn run_check(check: &str, spec: &InstanceSpec, seed: u64, tol: &Tolerances) -> VerificationReport {
    let tolerance = match check {
        "separation" => tol.sep,
        "coupled_fixpoint" => tol.fix,
        "oracle_equivalence" | "representation" => 0.0,
        _ => tol.check,
    };
    run_check_inner(check, spec, seed, tol).unwrap_or_else(|e| VerificationReport::from_error(check, tolerance, &e))
}

fn run_check_inner(check: &str, spec: &InstanceSpec, seed: u64, tol: &Tolerances) -> Result<VerificationReport> {
    let inst = build_instance(spec, seed)?;
    let mut rng = stream(seed, check);
    let bad = spec.corrupt;
    let pair = &inst.pair;
    let solved = || -> Result<SkorokhodSolution> { maybe_corrupt(solve(&inst.s, pair, tol)?, bad) };
    let n = inst.s.len();
    let report = match check {
        "definition" => verify::check_definition(&solved()?, pair, tol),
        "shift" => {
            let sol = solved()?;
            let reports = (0..3)
                .map(|_| {
                    let d = sol.s.grid().time(rng.gen_range(0..n));
                    verify::check_shift(&sol, pair, d, tol)
                })
                .collect::<Result<Vec<_>>>()?;
            VerificationReport::combine(check, reports)
        }
        "comparison_one_sided" | "comparison_net" | "comparison_split" => {
            let nu = staircase(rng.gen(), &inst)?;
            let s2 = &inst.base;
            let s1 = if check == "comparison_split" {
                s2.zip_with(&nu, |a, b| a + b)?
            } else {
                let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
                let bumped: Vec<f64> = (0..n).map(|i| s2.value(i) + u[i] * nu.value(i)).collect();
                CadlagPath::new(s2.grid().clone(), bumped)?
            };
            let (c01, c02) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            match check {
                "comparison_one_sided" if !bad => {
                    verify::check_comparison_one_sided(&s1, s2, c01, c02, &nu, pair.lower(), tol)?
                }
                "comparison_net" if !bad => verify::check_comparison_net(&s1, s2, c01, c02, &nu, pair, tol)?,
                "comparison_split" if !bad => verify::check_comparison_split(s2, c01, c02, &nu, pair, tol)?,
                "comparison_one_sided" => {
                    let (x1, k1) = solve_one_sided(&s1.map(|v| v + c01)?, pair.lower(), tol)?;
                    let (x2, k2) = solve_one_sided(&s2.map(|v| v + c02)?, pair.lower(), tol)?;
                    let (x1, k1) = (bump_tail(&x1)?, bump_tail(&k1)?);
                    verify::assess_comparison(check, &k1, &k2, &x1, &x2, &nu, c01, c02, tol)
                }
                _ => {
                    let a = corrupt(&solve(&s1.map(|v| v + c01)?, pair, tol)?)?;
                    let b = solve(&s2.map(|v| v + c02)?, pair, tol)?;
                    if check == "comparison_net" {
                        verify::assess_comparison(check, &a.k, &b.k, &a.x, &b.x, &nu, c01, c02, tol)
                    } else {
                        verify::assess_split(&a, &b, &nu, c01, c02, tol)
                    }
                }
            }
        }
        "monotone_boundaries" => {
            let pair2 = narrower(pair, &mut rng)?;
            if bad {
                let a = corrupt(&solve(&inst.s, pair, tol)?)?;
                verify::assess_monotone(&a, &solve(&inst.s, &pair2, tol)?, tol)
            } else {
                verify::check_monotone_boundaries(&inst.s, pair, &pair2, tol)?
            }
        }
        "uniform_continuity" => {
            let noisy = inst
                .s
                .values()
                .iter()
                .map(|v| v + 0.1 * (2.0 * rng.gen::<f64>() - 1.0))
                .collect();
            let s2 = CadlagPath::new(inst.s.grid().clone(), noisy)?;
            let pair2 = translated(pair, &mut rng)?;
            let a = solved()?;
            let b = solve(&s2, &pair2, tol)?;
            verify::assess_continuity(&a, &b, pair, &pair2, tol)?
        }
        "j1_bound" => {
            let horizon = inst.s.grid().horizon();
            let knot = rng.gen_range(0.3..0.7) * horizon;
            let image = knot + rng.gen_range(-0.1..0.1) * horizon;
            let lambda = TimeChange::two_piece_onto(inst.s.grid(), knot, image)?;
            let noise = if rng.gen_bool(0.5) { 0.05 } else { 0.0 };
            let s_prime = CadlagPath::new(
                lambda.grid().clone(),
                inst.s
                    .values()
                    .iter()
                    .map(|v| v + noise * (2.0 * rng.gen::<f64>() - 1.0))
                    .collect(),
            )?;
            let sol = solved()?;
            let sol_prime = solve(&s_prime, pair, tol)?;
            verify::assess_j1(&sol, &sol_prime, &lambda, pair, tol)?
        }
        "oscillation_domination" => verify::check_oscillation_domination(&solved()?, tol),
        "representation" => verify::check_representation(&solved()?),
        "oracle_equivalence" => verify::check_oracle(&solved()?),
        "separation" => verify::check_separation(&solved()?, pair, tol),
        "coupled_fixpoint" => verify::check_coupled_fixpoint(&solved()?, pair, tol),
        other => return Err(Error::Input(format!("unknown check `{other}`"))),
    };
    Ok(VerificationReport {
        check_name: check.to_string(),
        ..report
    })
}

/// Same family, `L` raised and `R` lowered pointwise by nonnegative walks
/// keeping at least 40% of the original gap.
fn narrower(pair: &BoundaryPair, rng: &mut impl Rng) -> Result<BoundaryPair> {
    let (hi, lo) = (pair.upper().offset(), pair.lower().offset());
    let gap = hi.zip_with(lo, |a, b| a - b)?;
    let n = hi.len();
    let g = hi.grid();
    let squeeze = |seed: u64| -> Result<Vec<f64>> {
        let w = walk(seed, n, g.horizon(), 0.5)?;
        Ok((0..n).map(|i| w.value(i).abs().min(0.3 * gap.value(i))).collect())
    };
    let (dr, dl) = (squeeze(rng.gen())?, squeeze(rng.gen())?);
    let hi2 = CadlagPath::new(g.clone(), (0..n).map(|i| hi.value(i) - dr[i]).collect())?;
    let lo2 = CadlagPath::new(g.clone(), (0..n).map(|i| lo.value(i) + dl[i]).collect())?;
    BoundaryPair::new(
        pair.upper().with_offset(hi2),
        pair.lower().with_offset(lo2),
        &Tolerances::default(),
    )
}

/// Both offsets moved by one common perturbation, so the gap is unchanged.
fn translated(pair: &BoundaryPair, rng: &mut impl Rng) -> Result<BoundaryPair> {
    let (hi, lo) = (pair.upper().offset(), pair.lower().offset());
    let shift: f64 = rng.gen_range(-0.2..0.2);
    let w = walk(rng.gen(), hi.len(), hi.grid().horizon(), 0.1)?.map(|v| v + shift)?;
    BoundaryPair::new(
        pair.upper().with_offset(hi.zip_with(&w, |a, b| a + b)?),
        pair.lower().with_offset(lo.zip_with(&w, |a, b| a + b)?),
        &Tolerances::default(),
    )
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs every `(check, instance, seed)` triple; records are ordered by check,
/// then instance position in the manifest, then seed.
pub fn run_suite(manifest: &Manifest, tol: &Tolerances, threads: Option<usize>) -> Result<Vec<SuiteRecord>> {
    manifest.validate()?;
    let mut tasks = Vec::new();
    for check in &manifest.checks {
        for (idx, inst) in manifest.instances.iter().enumerate() {
            for &seed in &manifest.seeds {
                tasks.push((check.as_str(), idx, inst, seed));
            }
        }
    }
    let work = || {
        let mut out: Vec<(usize, SuiteRecord, &str)> = tasks
            .par_iter()
            .map(|&(check, idx, inst, seed)| {
                let report = run_check(check, inst, seed, tol);
                (
                    idx,
                    SuiteRecord {
                        instance: inst.label(),
                        seed,
                        report,
                    },
                    check,
                )
            })
            .collect();
        out.sort_by(|a, b| (a.2, a.0, a.1.seed).cmp(&(b.2, b.0, b.1.seed)));
        out.into_iter().map(|(_, r, _)| r).collect()
    };
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

/// One JSON object per line.
pub fn to_jsonl(records: &[SuiteRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_runs_nothing() {
        let m: Manifest = serde_json::from_str("{}").unwrap();
        assert!(run_suite(&m, &Tolerances::default(), Some(1)).unwrap().is_empty());
    }

    #[test]
    fn rejects_unknown_checks() {
        let m = Manifest {
            checks: vec!["bogus".into()],
            ..Manifest::default()
        };
        assert!(run_suite(&m, &Tolerances::default(), None).is_err());
    }

    #[test]
    fn instances_are_deterministic() {
        let spec = InstanceSpec::new(FamilyKind::Sine, 50);
        let (a, b) = (build_instance(&spec, 9).unwrap(), build_instance(&spec, 9).unwrap());
        assert_eq!(a.s, b.s);
        assert_eq!(a.pair, b.pair);
        assert!(a.pair.alpha() >= 0.2 - 1e-12);
        let c = build_instance(&spec, 10).unwrap();
        assert_ne!(a.s, c.s);
    }

    #[test]
    fn some_instances_start_with_a_jump() {
        let spec = InstanceSpec::new(FamilyKind::Linear, 8);
        let jumps = (0..40)
            .filter(|&seed| {
                let inst = build_instance(&spec, seed).unwrap();
                let sol = solve(&inst.s, &inst.pair, &Tolerances::default()).unwrap();
                sol.k.value(0) != 0.0
            })
            .count();
        assert!(jumps > 0);
    }

    #[test]
    fn every_check_passes_and_every_control_fails() {
        let tol = Tolerances::default();
        let families = [FamilyKind::Linear, FamilyKind::Scaled, FamilyKind::Sine];
        for check in ALL_CHECKS {
            for family in families {
                for seed in 0..3 {
                    let spec = InstanceSpec::new(family, 10);
                    let rep = run_check(check, &spec, seed, &tol);
                    assert!(rep.passed, "{check} {family:?} {seed}: {}", rep.details);
                    assert_eq!(rep.check_name, check);
                    let rep = run_check(check, &spec.clone().corrupted(), seed, &tol);
                    assert!(!rep.passed, "control {check} {family:?} {seed}: {}", rep.details);
                }
            }
        }
    }

    #[test]
    fn records_are_ordered_and_serialised() {
        let m = Manifest {
            checks: vec!["separation".into(), "definition".into()],
            seeds: vec![3, 1, 2],
            instances: vec![
                InstanceSpec::new(FamilyKind::Linear, 16),
                InstanceSpec::new(FamilyKind::Scaled, 16),
            ],
        };
        let recs = run_suite(&m, &Tolerances::default(), Some(2)).unwrap();
        assert_eq!(recs.len(), 12);
        assert_eq!(recs[0].report.check_name, "definition");
        assert_eq!(recs[0].instance, "linear-brownian-n16");
        assert_eq!(recs.iter().take(3).map(|r| r.seed).collect::<Vec<_>>(), vec![1, 2, 3]);
        let text = to_jsonl(&recs).unwrap();
        assert_eq!(text.lines().count(), 12);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["check_name"], "definition");
        assert_eq!(first["seed"], 1);
        assert!(first["passed"].as_bool().unwrap());
    }
}
