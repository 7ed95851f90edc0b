//! Acceptance campaign: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every criterion also runs its negative controls, which must fail.

use std::process::ExitCode;
use std::time::Instant;

use nlskp::boundaries::BoundaryFunction;
use nlskp::reflector::solve_one_sided;
use nlskp::verify::suite::{build_instance, corrupt, run_check, DriverKind, FamilyKind, InstanceSpec};
use nlskp::verify::{self, VerificationReport};
use nlskp::{solve, BoundaryPair, CadlagPath, SkorokhodSolution, TimeGrid, Tolerances};

const FAMILIES: [FamilyKind; 3] = [FamilyKind::Linear, FamilyKind::Scaled, FamilyKind::Sine];
const SIZES: [usize; 3] = [8, 64, 512];

struct Case {
    spec: InstanceSpec,
    seed: u64,
    pair: BoundaryPair,
    sol: SkorokhodSolution,
}

/// 1000 instances cycling through every family and size; every fourth has jumps.
fn instances(tol: &Tolerances) -> Vec<Case> {
    (0..1000u64)
        .map(|k| {
            let mut spec = InstanceSpec::new(FAMILIES[(k % 3) as usize], SIZES[((k / 3) % 3) as usize]);
            if k % 4 == 3 {
                spec = spec.jumps(8.0, 1.0);
            }
            let inst = build_instance(&spec, k).expect("instance builds");
            let sol = solve(&inst.s, &inst.pair, tol).expect("instance solves");
            Case {
                spec,
                seed: k,
                pair: inst.pair,
                sol,
            }
        })
        .collect()
}

#[derive(Default)]
struct Tally {
    runs: usize,
    failed: usize,
    samples: Vec<String>,
}

impl Tally {
    fn expect(&mut self, what: &str, ok: bool) {
        self.runs += 1;
        if !ok {
            self.failed += 1;
            if self.samples.len() < 5 {
                self.samples.push(what.to_string());
            }
        }
    }

    fn expect_pass(&mut self, what: &str, rep: &VerificationReport) {
        self.expect(&format!("{what}: {}", rep.details), rep.passed);
    }

    fn expect_fail(&mut self, what: &str, rep: &VerificationReport) {
        self.expect(&format!("negative control passed: {what}"), !rep.passed);
    }

    fn verdict(self, name: &str, started: Instant) -> bool {
        let secs = started.elapsed().as_secs_f64();
        if self.failed == 0 {
            println!("PASS {name} ({} assertions, {secs:.1}s)", self.runs);
        } else {
            println!(
                "FAIL {name} ({} of {} assertions failed): {}",
                self.failed,
                self.runs,
                self.samples.join("; ")
            );
        }
        self.failed == 0
    }
}

fn label(c: &Case) -> String {
    format!("{} seed {}", c.spec.label(), c.seed)
}

fn oracle_equivalence(cases: &[Case]) -> Tally {
    let mut t = Tally::default();
    for c in cases {
        t.expect_pass(&label(c), &verify::check_oracle(&c.sol));
    }
    for c in cases.iter().take(30) {
        t.expect_fail(&label(c), &verify::check_oracle(&corrupt(&c.sol).unwrap()));
    }
    t
}

/// Double-max formula for the time-dependent interval `[l, r]`, written
/// directly in terms of `S`, `l` and `r`.
#[allow(clippy::needless_range_loop)]
fn interval_formula(s: &[f64], l: &[f64], r: &[f64]) -> Vec<f64> {
    let n = s.len();
    let mut k = vec![0.0; n];
    for t in 0..n {
        let floor_all = (0..=t).map(|u| s[u] - l[u]).fold(f64::INFINITY, f64::min);
        let first = (s[0] - r[0]).max(0.0).min(floor_all);
        let mut second = f64::NEG_INFINITY;
        let mut floor = f64::INFINITY;
        for q in (0..=t).rev() {
            floor = floor.min(s[q] - l[q]);
            second = second.max((s[q] - r[q]).min(floor));
        }
        k[t] = -first.max(second);
    }
    k
}

fn literature_degeneration(tol: &Tolerances) -> Tally {
    let mut t = Tally::default();
    for seed in 0..300u64 {
        let mut spec = InstanceSpec::new(FamilyKind::Linear, SIZES[(seed % 3) as usize]);
        if seed % 2 == 1 {
            spec = spec.jumps(8.0, 1.0);
        }
        let inst = build_instance(&spec, seed).unwrap();
        let grid = inst.s.grid();
        let r = inst.pair.upper().offset().resample(grid);
        let l = inst.pair.lower().offset().resample(grid);
        let want = interval_formula(inst.s.values(), l.values(), r.values());
        let got = solve(&inst.s, &inst.pair, tol).unwrap();
        let err = got
            .k
            .values()
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        t.expect(&format!("linear seed {seed}: |K - formula| = {err:e}"), err <= 1e-12);
    }
    // Constant interval [0, a].
    let s = CadlagPath::from_points(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 2.5, -1.0, 0.2]).unwrap();
    let pair =
        BoundaryPair::linear_band(CadlagPath::constant(1.5).unwrap(), CadlagPath::constant(0.0).unwrap()).unwrap();
    let got = solve(&s, &pair, tol).unwrap();
    let want = interval_formula(s.values(), &[0.0; 4], &[1.5; 4]);
    t.expect("constant interval", got.k.values() == want.as_slice());

    // One-sided R(t, x) = x with S_t = -t: K_t = t.
    let grid = TimeGrid::uniform(1001, 1.0).unwrap();
    let s = CadlagPath::new(grid.clone(), grid.times().iter().map(|t| -t).collect()).unwrap();
    let r = BoundaryFunction::linear(CadlagPath::constant(0.0).unwrap());
    let (x, k) = solve_one_sided(&s, &r, tol).unwrap();
    let err = k
        .values()
        .iter()
        .zip(grid.times())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    t.expect(&format!("one-sided ramp: |K - t| = {err:e}"), err <= 1e-12);
    t.expect("one-sided ramp: X = 0", x.values().iter().all(|v| v.abs() <= 1e-12));
    t
}

fn per_solution(cases: &[Case], check: impl Fn(&SkorokhodSolution, &BoundaryPair) -> VerificationReport) -> Tally {
    let mut t = Tally::default();
    for c in cases {
        t.expect_pass(&label(c), &check(&c.sol, &c.pair));
    }
    for c in cases.iter().take(30) {
        t.expect_fail(&label(c), &check(&corrupt(&c.sol).unwrap(), &c.pair));
    }
    t
}

/// Runs `check` through the seeded campaign on `seeds` rotating families,
/// with controls on the first `controls` seeds.
fn campaign(t: &mut Tally, check: &str, seeds: u64, n: usize, controls: u64, stress: bool, tol: &Tolerances) {
    for seed in 0..seeds {
        let mut spec = InstanceSpec::new(FAMILIES[(seed % 3) as usize], n);
        if stress {
            spec = spec.jumps(20.0, 2.0);
        }
        let what = format!("{check} {} seed {seed}", spec.label());
        t.expect_pass(&what, &run_check(check, &spec, seed, tol));
        if seed < controls {
            t.expect_fail(&what, &run_check(check, &spec.corrupted(), seed, tol));
        }
    }
}

fn comparison_suite(tol: &Tolerances) -> Tally {
    let mut t = Tally::default();
    for check in [
        "comparison_one_sided",
        "comparison_net",
        "comparison_split",
        "monotone_boundaries",
    ] {
        campaign(&mut t, check, 200, 64, 30, false, tol);
        campaign(&mut t, check, 50, 64, 10, true, tol);
    }
    t
}

fn continuity_suite(cases: &[Case], tol: &Tolerances) -> Tally {
    let mut t = Tally::default();
    campaign(&mut t, "uniform_continuity", 200, 64, 30, false, tol);
    campaign(&mut t, "j1_bound", 100, 64, 20, false, tol);
    // Every small instance also runs the exact J1 oracle inside the check.
    let mut small = 0;
    for c in cases.iter().filter(|c| c.spec.n <= 12) {
        small += 1;
        let rep = run_check("j1_bound", &c.spec, c.seed, tol);
        t.expect(
            &format!("j1 oracle {}: {}", label(c), rep.details),
            rep.passed && rep.details.contains("J1(K', K)"),
        );
    }
    t.expect("small instances present", small > 0);
    t
}

fn non_anticipation(cases: &[Case], tol: &Tolerances) -> Tally {
    let mut t = Tally::default();
    for c in cases.iter().take(100) {
        let rep = run_check("shift", &c.spec, c.seed, tol);
        t.expect_pass(&label(c), &rep);
        t.expect(
            &format!("three shifts on {}", label(c)),
            rep.details.matches("d = ").count() == 3,
        );
    }
    for c in cases.iter().take(20) {
        t.expect_fail(&label(c), &run_check("shift", &c.spec.clone().corrupted(), c.seed, tol));
    }
    t
}

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let started = Instant::now();
    let cases = instances(&tol);
    let jumps = cases.iter().filter(|c| c.spec.driver == DriverKind::Jump).count();
    println!(
        "acceptance: {} instances ({jumps} with jumps) built in {:.1}s",
        cases.len(),
        started.elapsed().as_secs_f64()
    );

    let mut all = true;
    let mut run = |name: &str, f: &mut dyn FnMut() -> Tally| {
        let t0 = Instant::now();
        let tally = f();
        all &= tally.verdict(name, t0);
    };
    run("oracle equivalence", &mut || oracle_equivalence(&cases));
    run("literature degeneration", &mut || literature_degeneration(&tol));
    run("definition conformance", &mut || {
        per_solution(&cases, |s, p| verify::check_definition(s, p, &tol))
    });
    run("representation", &mut || {
        per_solution(&cases, |s, _| verify::check_representation(s))
    });
    run("separation", &mut || {
        per_solution(&cases, |s, p| verify::check_separation(s, p, &tol))
    });
    run("comparison suite", &mut || comparison_suite(&tol));
    run("continuity suite", &mut || continuity_suite(&cases, &tol));
    run("non-anticipation", &mut || non_anticipation(&cases, &tol));
    run("coupled fixed point", &mut || {
        per_solution(&cases, |s, p| verify::check_coupled_fixpoint(s, p, &tol))
    });
    run("oscillation domination", &mut || {
        per_solution(&cases, |s, _| verify::check_oscillation_domination(s, &tol))
    });
    println!("acceptance: total {:.1}s", started.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
