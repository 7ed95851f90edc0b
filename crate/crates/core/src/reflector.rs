//! Envelopes `Φ, Ψ` and the regulator `K`.
//!
//! `reflect_direct` evaluates the closed-form lattice expression for `K`
//! literally in O(n²); `reflect_stream` is the O(n) recursion used in
//! production. Both select every output from `{0} ∪ {Φ_i} ∪ {Ψ_i}`, so they
//! agree bitwise (after mapping `-0.0` to `0.0`).

use crate::boundaries::{BoundaryFunction, BoundaryPair};
use crate::decomposition::split_variation;
use crate::error::{Error, Result};
use crate::pathkit::CadlagPath;
use crate::Tolerances;

/// Every path lives on the grid of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkorokhodSolution {
    pub s: CadlagPath,
    pub phi: CadlagPath,
    pub psi: CadlagPath,
    pub k: CadlagPath,
    pub x: CadlagPath,
    pub kr: CadlagPath,
    pub kl: CadlagPath,
    /// Running total variation of `K`.
    pub tv: CadlagPath,
}

impl SkorokhodSolution {
    /// Assembles a solution from a driver, envelopes and regulator, deriving
    /// `X` and the variation split. Does not check that `k` solves anything.
    pub fn from_parts(s: CadlagPath, phi: CadlagPath, psi: CadlagPath, k: CadlagPath) -> Result<Self> {
        s.same_grid(&phi)?;
        s.same_grid(&psi)?;
        s.same_grid(&k)?;
        let x = s.zip_with(&k, |a, b| a + b)?;
        let (kr, kl, tv) = split_variation(&k);
        Ok(Self {
            s,
            phi,
            psi,
            k,
            x,
            kr,
            kl,
            tv,
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// `Φ_t` with `L(t, S_t + Φ_t) = 0` and `Ψ_t` with `R(t, S_t + Ψ_t) = 0`.
pub fn envelopes(s: &CadlagPath, pair: &BoundaryPair, tol: &Tolerances) -> Result<(CadlagPath, CadlagPath)> {
    let phi = invert_along(pair.upper(), s, tol)?;
    let psi = invert_along(pair.lower(), s, tol)?;
    let floor = pair.alpha() / pair.upper_lipschitz() - tol.sep;
    for (i, (p, q)) in phi.values().iter().zip(psi.values()).enumerate() {
        if !(p - q >= floor) {
            return Err(Error::EnvelopeOrder { index: i, gap: p - q });
        }
    }
    Ok((phi, psi))
}

/// `t ↦ x` solving `g(t, S_t + x) = 0` on the grid of `s`.
pub(crate) fn invert_along(g: &BoundaryFunction, s: &CadlagPath, tol: &Tolerances) -> Result<CadlagPath> {
    invert_shifted(g, s, None, tol)
}

// Solves g(t_i, S_i + shift_i + x) = 0 for each grid instant.
fn invert_shifted(g: &BoundaryFunction, s: &CadlagPath, shift: Option<&[f64]>, tol: &Tolerances) -> Result<CadlagPath> {
    let b = g.offset().resample(s.grid());
    let values = s
        .values()
        .iter()
        .zip(b.values())
        .enumerate()
        .map(|(i, (&v, &bi))| {
            let v = shift.map_or(v, |d| v + d[i]);
            g.invert_with_offset(bi, v, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    CadlagPath::new(s.grid().clone(), values)
}

fn check_envelopes(phi: &CadlagPath, psi: &CadlagPath) -> Result<()> {
    phi.same_grid(psi)?;
    for (i, (p, q)) in phi.values().iter().zip(psi.values()).enumerate() {
        if !(p > q) {
            return Err(Error::EnvelopeOrder { index: i, gap: p - q });
        }
    }
    Ok(())
}

#[inline]
fn unsigned_zero(v: f64) -> f64 {
    v + 0.0
}

/// Literal O(n²) evaluation of
/// `K_t = −max( (−Φ_0)^+ ∧ inf_{[0,t]}(−Ψ), sup_{s<=t} [(−Φ_s) ∧ inf_{[s,t]}(−Ψ)] )`.
pub fn reflect_direct(phi: &CadlagPath, psi: &CadlagPath) -> Result<CadlagPath> {
    check_envelopes(phi, psi)?;
    let (p, q) = (phi.values(), psi.values());
    let mut k = Vec::with_capacity(p.len());
    for t in 0..p.len() {
        let mut inf_neg_psi = f64::INFINITY;
        let mut sup_term = f64::NEG_INFINITY;
        for s in (0..=t).rev() {
            inf_neg_psi = inf_neg_psi.min(-q[s]);
            sup_term = sup_term.max((-p[s]).min(inf_neg_psi));
        }
        let initial = (-p[0]).max(0.0).min(inf_neg_psi);
        k.push(unsigned_zero(-initial.max(sup_term)));
    }
    CadlagPath::new(phi.grid().clone(), k)
}

/// O(n) recursion `K_0 = (Φ_0 ∧ 0) ∨ Ψ_0`, `K_i = Φ_i ∧ (K_{i−1} ∨ Ψ_i)`.
pub fn reflect_stream(phi: &CadlagPath, psi: &CadlagPath) -> Result<CadlagPath> {
    check_envelopes(phi, psi)?;
    let (p, q) = (phi.values(), psi.values());
    let mut k = Vec::with_capacity(p.len());
    let mut prev = unsigned_zero(p[0].min(0.0).max(q[0]));
    k.push(prev);
    for i in 1..p.len() {
        prev = unsigned_zero(p[i].min(prev.max(q[i])));
        k.push(prev);
    }
    CadlagPath::new(phi.grid().clone(), k)
}

pub fn solve(s: &CadlagPath, pair: &BoundaryPair, tol: &Tolerances) -> Result<SkorokhodSolution> {
    let (phi, psi) = envelopes(s, pair, tol)?;
    let k = reflect_stream(&phi, &psi)?;
    SkorokhodSolution::from_parts(s.clone(), phi, psi, k)
}

/// Single lower constraint `R(t, X_t) >= 0`: `K_t = sup_{s<=t} Ψ_s^+`.
pub fn solve_one_sided(s: &CadlagPath, r: &BoundaryFunction, tol: &Tolerances) -> Result<(CadlagPath, CadlagPath)> {
    let psi = invert_along(r, s, tol)?;
    let k = running_max_positive(psi.values());
    let k = CadlagPath::new(s.grid().clone(), k)?;
    let x = s.zip_with(&k, |a, b| a + b)?;
    Ok((x, k))
}

fn running_max_positive(v: &[f64]) -> Vec<f64> {
    let mut m = 0.0f64;
    v.iter()
        .map(|&x| {
            m = m.max(x);
            m
        })
        .collect()
}

/// Outcome of the Picard iteration on the coupled running-max system.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledFixpoint {
    pub kr: CadlagPath,
    pub kl: CadlagPath,
    pub sweeps: usize,
    /// Sup distance between the last two iterates.
    pub residual: f64,
}

/// Iterates
/// `Kr = sup (Ψ^r)^+` with `R(t, S_t − Kl_t + Ψ^r_t) = 0`, then
/// `Kl = sup (Φ^l)^+` with `L(t, S_t + Kr_t − Φ^l_t) = 0`,
/// from `(0, 0)` until successive iterates are within `tol.fix`.
pub fn picard_iterate(s: &CadlagPath, pair: &BoundaryPair, tol: &Tolerances) -> Result<CoupledFixpoint> {
    let n = s.len();
    let mut kr = vec![0.0; n];
    let mut kl = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for sweep in 1..=tol.max_sweeps {
        let neg_kl: Vec<f64> = kl.iter().map(|v| -v).collect();
        let psi_r = invert_shifted(pair.lower(), s, Some(&neg_kl), tol)?;
        let next_kr = running_max_positive(psi_r.values());
        let phi_l = invert_shifted(pair.upper(), s, Some(&next_kr), tol)?;
        let neg_phi_l: Vec<f64> = phi_l.values().iter().map(|v| -v).collect();
        let next_kl = running_max_positive(&neg_phi_l);
        residual = sup_diff(&kr, &next_kr).max(sup_diff(&kl, &next_kl));
        kr = next_kr;
        kl = next_kl;
        if residual < tol.fix {
            return Ok(CoupledFixpoint {
                kr: CadlagPath::new(s.grid().clone(), kr)?,
                kl: CadlagPath::new(s.grid().clone(), kl)?,
                sweeps: sweep,
                residual,
            });
        }
    }
    Err(Error::FixpointNotConverged {
        sweeps: tol.max_sweeps,
        residual,
    })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs [`picard_iterate`] and requires the fixed point to reproduce the
/// variation split of `sol` within `tol.fix`.
pub fn coupled_fixpoint(
    s: &CadlagPath,
    pair: &BoundaryPair,
    sol: &SkorokhodSolution,
    tol: &Tolerances,
) -> Result<CoupledFixpoint> {
    let fp = picard_iterate(s, pair, tol)?;
    let gap = fp.kr.sup_distance(&sol.kr)?.max(fp.kl.sup_distance(&sol.kl)?);
    if gap >= tol.fix {
        return Err(Error::Consistency(format!(
            "coupled fixed point differs from the variation split by {gap:e}"
        )));
    }
    Ok(fp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathkit::TimeGrid;
    use proptest::prelude::*;

    fn konst(v: f64) -> CadlagPath {
        CadlagPath::constant(v).unwrap()
    }

    fn path(v: &[f64]) -> CadlagPath {
        let times = (0..v.len()).map(|i| i as f64).collect();
        CadlagPath::from_points(times, v.to_vec()).unwrap()
    }

    fn band(r: f64, l: f64) -> BoundaryPair {
        BoundaryPair::linear_band(konst(r), konst(l)).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn envelopes_of_linear_pair() {
        let s = path(&[0.0, 0.0]);
        let (phi, psi) = envelopes(&s, &band(1.0, 0.0), &tol()).unwrap();
        assert_eq!(phi.values(), &[1.0, 1.0]);
        assert_eq!(psi.values(), &[0.0, 0.0]);

        let s = path(&[0.3, -1.2, 2.0]);
        let r = path(&[2.0, 1.5, 3.0]);
        let l = path(&[0.0, -1.0, 0.5]);
        let (phi, psi) = envelopes(&s, &BoundaryPair::linear_band(r, l).unwrap(), &tol()).unwrap();
        assert_eq!(phi.values(), &[2.0 - 0.3, 1.5 + 1.2, 3.0 - 2.0]);
        assert_eq!(psi.values(), &[0.0 - 0.3, -1.0 + 1.2, 0.5 - 2.0]);
    }

    #[test]
    fn direct_examples() {
        let k = reflect_direct(&path(&[1.0, 2.0, 0.5]), &path(&[-1.0, -0.2, -3.0])).unwrap();
        assert_eq!(k.values(), &[0.0, 0.0, 0.0]);

        let k = reflect_direct(&path(&[1.0, 1.5, 2.5]), &path(&[0.0, 0.5, 1.5])).unwrap();
        assert_eq!(k.values(), &[0.0, 0.5, 1.5]);

        let k = reflect_direct(&path(&[1.0, -1.0]), &path(&[0.0, -2.0])).unwrap();
        assert_eq!(k.values(), &[0.0, -1.0]);
    }

    #[test]
    fn stream_examples() {
        let k = reflect_stream(&path(&[1.0, 1.5, 2.5]), &path(&[0.0, 0.5, 1.5])).unwrap();
        assert_eq!(k.values(), &[0.0, 0.5, 1.5]);
        let k = reflect_stream(&path(&[1.0, -1.0]), &path(&[0.0, -2.0])).unwrap();
        assert_eq!(k.values(), &[0.0, -1.0]);
        let k = reflect_stream(&path(&[0.5; 4]), &path(&[-0.5; 4])).unwrap();
        assert_eq!(k.values(), &[0.0; 4]);
    }

    #[test]
    fn initial_value_is_the_median() {
        for ((p, q), want) in [((1.0, 0.0), 0.0), ((2.0, 0.5), 0.5), ((-1.0, -3.0), -1.0)] {
            let k = reflect_stream(&konst(p), &konst(q)).unwrap();
            assert_eq!(k.values(), &[want]);
            assert_eq!(reflect_direct(&konst(p), &konst(q)).unwrap().values(), &[want]);
        }
    }

    #[test]
    fn zero_is_unsigned() {
        let k = reflect_direct(&konst(0.0), &konst(-1.0)).unwrap();
        assert!(k.value(0).is_sign_positive());
        let k = reflect_stream(&konst(1.0), &konst(-0.0)).unwrap();
        assert!(k.value(0).is_sign_positive());
    }

    #[test]
    fn rejects_crossed_envelopes() {
        let err = reflect_direct(&path(&[1.0, 0.0]), &path(&[0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::EnvelopeOrder { index: 1, .. }));
        assert!(reflect_stream(&path(&[1.0, 0.0]), &path(&[0.0, 0.5])).is_err());
    }

    #[test]
    fn solve_examples() {
        let s = path(&[0.0, 0.0, 0.0]);
        let pair = BoundaryPair::linear_band(konst(1.0), konst(-1.0)).unwrap();
        let sol = solve(&s, &pair, &tol()).unwrap();
        assert_eq!(sol.k.values(), &[0.0; 3]);
        assert_eq!(sol.x, s);

        let s = path(&[0.0, -0.5, -1.5]);
        let sol = solve(&s, &band(1.0, 0.0), &tol()).unwrap();
        assert_eq!(sol.k.values(), &[0.0, 0.5, 1.5]);
        assert_eq!(sol.x.values(), &[0.0, 0.0, 0.0]);
        assert_eq!(sol.kr.values(), &[0.0, 0.5, 1.5]);
        assert_eq!(sol.kl.values(), &[0.0; 3]);
        assert_eq!(sol.tv.values(), &[0.0, 0.5, 1.5]);

        let s = path(&[0.0, 2.0]);
        let sol = solve(&s, &band(1.0, 0.0), &tol()).unwrap();
        assert_eq!(sol.k.values(), &[0.0, -1.0]);
        assert_eq!(sol.x.values(), &[0.0, 1.0]);
        assert_eq!(sol.kl.values(), &[0.0, 1.0]);
    }

    #[test]
    fn wide_upper_constraint_gives_classical_reflection() {
        let grid = TimeGrid::uniform(101, 1.0).unwrap();
        let s = CadlagPath::new(grid.clone(), grid.times().iter().map(|t| -t).collect()).unwrap();
        let sol = solve(&s, &band(1e6, 0.0), &tol()).unwrap();
        for (k, t) in sol.k.values().iter().zip(grid.times()) {
            assert_eq!(*k, *t);
        }
        assert!(sol.x.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn one_sided_examples() {
        let grid = TimeGrid::uniform(11, 1.0).unwrap();
        let s = CadlagPath::new(grid.clone(), grid.times().iter().map(|t| -t).collect()).unwrap();
        let r = BoundaryFunction::linear(konst(0.0));
        let (x, k) = solve_one_sided(&s, &r, &tol()).unwrap();
        assert_eq!(k.values(), grid.times());
        assert!(x.values().iter().all(|&v| v == 0.0));

        let s = path(&[0.0, 1.0, 0.5, 3.0]);
        let (x, k) = solve_one_sided(&s, &r, &tol()).unwrap();
        assert_eq!(k.values(), &[0.0; 4]);
        assert_eq!(x, s);
    }

    #[test]
    fn one_sided_matches_wide_band_for_sine() {
        let s = path(&[0.2, -0.4, -1.3, 0.6, -2.2, -0.1, 1.7, -3.0]);
        let r = BoundaryFunction::sine(0.3, 1.5, konst(0.1)).unwrap();
        let (_, k1) = solve_one_sided(&s, &r, &tol()).unwrap();
        let pair = BoundaryPair::new(r.with_offset(konst(1e6)), r.clone(), &tol()).unwrap();
        let sol = solve(&s, &pair, &tol()).unwrap();
        assert!(k1.sup_distance(&sol.k).unwrap() < 1e-10);
    }

    #[test]
    fn coupled_fixpoint_examples() {
        let s = path(&[0.0, 0.2, -0.3]);
        let sol = solve(&s, &band(1.0, -1.0), &tol()).unwrap();
        let fp = coupled_fixpoint(&s, &band(1.0, -1.0), &sol, &tol()).unwrap();
        assert_eq!(fp.sweeps, 1);
        assert_eq!(fp.kr.values(), &[0.0; 3]);

        let s = path(&[0.0, -0.5, -1.5]);
        let sol = solve(&s, &band(1.0, 0.0), &tol()).unwrap();
        let fp = coupled_fixpoint(&s, &band(1.0, 0.0), &sol, &tol()).unwrap();
        assert_eq!(fp.kr.values(), &[0.0, 0.5, 1.5]);
        assert_eq!(fp.kl.values(), &[0.0; 3]);

        let s = path(&[0.0, 2.0]);
        let sol = solve(&s, &band(1.0, 0.0), &tol()).unwrap();
        let fp = coupled_fixpoint(&s, &band(1.0, 0.0), &sol, &tol()).unwrap();
        assert_eq!(fp.kr.values(), &[0.0, 0.0]);
        assert_eq!(fp.kl.values(), &[0.0, 1.0]);
    }

    #[test]
    fn fixpoint_reports_non_convergence() {
        let s = path(&[0.0, -2.0, 2.0, -2.0, 2.0, -2.0]);
        let t = Tolerances { max_sweeps: 1, ..tol() };
        let err = picard_iterate(&s, &band(1.0, 0.0), &t).unwrap_err();
        assert!(err.is_numeric());
    }

    fn envelope_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-3.0..3.0f64, n),
                prop::collection::vec(0.01..2.0f64, n),
            )
                .prop_map(|(psi, w)| {
                    let phi = psi.iter().zip(&w).map(|(a, b)| a + b).collect();
                    (phi, psi)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn stream_equals_direct((phi, psi) in envelope_pair()) {
            let (phi, psi) = (path(&phi), path(&psi));
            let a = reflect_direct(&phi, &psi).unwrap();
            let b = reflect_stream(&phi, &psi).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }

        #[test]
        fn regulator_is_a_lattice_selection((phi, psi) in envelope_pair()) {
            let (phi, psi) = (path(&phi), path(&psi));
            let k = reflect_stream(&phi, &psi).unwrap();
            for i in 0..k.len() {
                let v = k.value(i);
                prop_assert!(psi.value(i) <= v && v <= phi.value(i));
                prop_assert!(v == 0.0 || phi.values().contains(&v) || psi.values().contains(&v));
            }
        }

        #[test]
        fn oscillation_dominated((phi, psi) in envelope_pair(), a in 0usize..40, b in 0usize..40) {
            let (phi, psi) = (path(&phi), path(&psi));
            let k = reflect_stream(&phi, &psi).unwrap();
            let (i, j) = (a.min(b) % k.len(), a.max(b) % k.len());
            let (i, j) = (i.min(j), i.max(j));
            prop_assert!(k.oscillation(i, j).unwrap()
                <= phi.oscillation(i, j).unwrap() + psi.oscillation(i, j).unwrap());
        }
    }
}
