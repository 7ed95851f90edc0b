//! Nonlinear constraint functions `g(t, x)` that are strictly increasing and
//! bi-Lipschitz in `x`, and the ordered pairs `(L, R)` built from them.
//!
//! Every family carries analytic Lipschitz constants `c <= C`. Pairs must share
//! family and shape parameters so that `R(t, x) − L(t, x)` does not depend on
//! `x`; the separation `alpha = inf (R − L)` is then read off the two offset
//! paths exactly.

use crate::error::{Error, Result};
use crate::pathkit::{CadlagPath, TimeGrid};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `g(t, x) = x − b_t`
    Linear,
    /// `g(t, x) = a (x − b_t)`
    Scaled { a: f64 },
    /// `g(t, x) = x + eps sin(omega x) − b_t`
    SinePerturbed { eps: f64, omega: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Scaled { .. } => "scaled",
            Family::SinePerturbed { .. } => "sine",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Family::Linear => Ok(()),
            Family::Scaled { a } if a > 0.0 && a.is_finite() => Ok(()),
            Family::Scaled { a } => Err(Error::Boundary(format!("scale must be positive and finite, got {a}"))),
            Family::SinePerturbed { eps, omega } => {
                if !(eps.is_finite() && omega.is_finite()) {
                    return Err(Error::Boundary("eps and omega must be finite".into()));
                }
                if (eps * omega).abs() >= 1.0 {
                    return Err(Error::Boundary(format!(
                        "|eps * omega| = {} leaves no positive lower Lipschitz constant",
                        (eps * omega).abs()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Lower Lipschitz constant `c`.
    pub fn lower_lipschitz(&self) -> f64 {
        match *self {
            Family::Linear => 1.0,
            Family::Scaled { a } => a,
            Family::SinePerturbed { eps, omega } => 1.0 - (eps * omega).abs(),
        }
    }

    /// Upper Lipschitz constant `C`.
    pub fn upper_lipschitz(&self) -> f64 {
        match *self {
            Family::Linear => 1.0,
            Family::Scaled { a } => a,
            Family::SinePerturbed { eps, omega } => 1.0 + (eps * omega).abs(),
        }
    }

    /// Factor multiplying the offset, so that `sup_x |g(t,x) − g(s,x)| = scale |b_t − b_s|`.
    pub fn offset_scale(&self) -> f64 {
        match *self {
            Family::Scaled { a } => a,
            _ => 1.0,
        }
    }

    #[inline]
    fn apply(&self, b: f64, x: f64) -> f64 {
        match *self {
            Family::Linear => x - b,
            Family::Scaled { a } => a * (x - b),
            Family::SinePerturbed { eps, omega } => x + eps * (omega * x).sin() - b,
        }
    }
}

/// `g(t, x)` of a shipped family with a càdlàg offset `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    family: Family,
    offset: CadlagPath,
}

impl BoundaryFunction {
    pub fn new(family: Family, offset: CadlagPath) -> Result<Self> {
        family.validate()?;
        Ok(Self { family, offset })
    }

    pub fn linear(offset: CadlagPath) -> Self {
        Self {
            family: Family::Linear,
            offset,
        }
    }

    pub fn scaled(a: f64, offset: CadlagPath) -> Result<Self> {
        Self::new(Family::Scaled { a }, offset)
    }

    pub fn sine(eps: f64, omega: f64, offset: CadlagPath) -> Result<Self> {
        Self::new(Family::SinePerturbed { eps, omega }, offset)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn offset(&self) -> &CadlagPath {
        &self.offset
    }

    pub fn lower_lipschitz(&self) -> f64 {
        self.family.lower_lipschitz()
    }

    pub fn upper_lipschitz(&self) -> f64 {
        self.family.upper_lipschitz()
    }

    pub fn offset_at(&self, t: f64) -> Result<f64> {
        self.offset.eval(t)
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.family.apply(self.offset.eval(t)?, x))
    }

    /// Solves `g(t, v + x) = 0` for `x`.
    ///
    /// The root lies between `−g(t,v)/c` and `−g(t,v)/C` by the Lipschitz
    /// sandwich; the affine families are inverted in closed form, the sine
    /// family by bisection on that bracket.
    pub fn invert_offset(&self, t: f64, v: f64, tol: &Tolerances) -> Result<f64> {
        let b = self.offset.eval(t)?;
        self.invert_with_offset(b, v, tol)
    }

    pub(crate) fn invert_with_offset(&self, b: f64, v: f64, tol: &Tolerances) -> Result<f64> {
        let g0 = self.family.apply(b, v);
        if g0 == 0.0 {
            return Ok(0.0);
        }
        if let Family::Linear | Family::Scaled { .. } = self.family {
            return Ok(b - v);
        }
        let (c, big_c) = (self.lower_lipschitz(), self.upper_lipschitz());
        let (lo, hi) = if g0 > 0.0 {
            (-g0 / c, -g0 / big_c)
        } else {
            (-g0 / big_c, -g0 / c)
        };
        let pad = 1e-9 * (hi - lo) + 8.0 * f64::EPSILON * (1.0 + v.abs() + hi.abs().max(lo.abs()));
        let h = |x: f64| self.family.apply(b, v + x);
        let resolution = 4.0 * f64::EPSILON * (1.0 + v.abs());
        bisect_increasing(
            h,
            lo - pad,
            hi + pad,
            tol.root * g0.abs().max(1.0),
            resolution,
            tol.root_max_iter,
        )
    }

    /// `sup_x |g(t, x) − g(s, x)|`.
    pub fn temporal_gap(&self, t: f64, s: f64) -> Result<f64> {
        Ok(self.family.offset_scale() * (self.offset.eval(t)? - self.offset.eval(s)?).abs())
    }

    /// `(t, x) ↦ g(t + d, x)`.
    pub fn time_shifted(&self, d: f64) -> Result<Self> {
        Ok(Self {
            family: self.family,
            offset: self.offset.tail_from(d)?,
        })
    }

    /// Same family with a different offset path.
    pub fn with_offset(&self, offset: CadlagPath) -> Self {
        Self {
            family: self.family,
            offset,
        }
    }

    pub(crate) fn apply_offset(&self, b: f64, x: f64) -> f64 {
        self.family.apply(b, x)
    }
}

/// Bisection for an increasing `h` with `h(lo) <= 0 <= h(hi)`.
///
/// Runs until the bracket is narrower than `resolution` and returns the
/// endpoint with the smaller residual, which must be within `tol`.
pub fn bisect_increasing(
    h: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    resolution: f64,
    max_iter: usize,
) -> Result<f64> {
    let (mut flo, mut fhi) = (h(lo), h(hi));
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::RootNotConverged {
            iterations: 0,
            residual: flo.abs().min(fhi.abs()),
        });
    }
    let mut iterations = 0;
    while hi - lo > resolution && iterations < max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = h(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        iterations += 1;
    }
    let (x, residual) = if flo.abs() <= fhi.abs() {
        (lo, flo.abs())
    } else {
        (hi, fhi.abs())
    };
    if residual > tol {
        return Err(Error::RootNotConverged { iterations, residual });
    }
    Ok(x)
}

/// Ordered pair `(L, R)`: a solution must satisfy `L(t, X_t) <= 0 <= R(t, X_t)`.
///
/// `L` caps the path from above and `R` holds it from below.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    upper: BoundaryFunction,
    lower: BoundaryFunction,
    alpha: f64,
}

impl BoundaryPair {
    /// Builds `(L, R)`; both must share family and shape parameters.
    pub fn new(upper: BoundaryFunction, lower: BoundaryFunction, tol: &Tolerances) -> Result<Self> {
        if upper.family != lower.family {
            return Err(Error::Boundary(format!(
                "L and R must share family and parameters ({:?} vs {:?})",
                upper.family, lower.family
            )));
        }
        let alpha = offset_gap_inf(&upper, &lower);
        if !(alpha > tol.sep) {
            return Err(Error::Separation {
                alpha,
                required: tol.sep,
            });
        }
        Ok(Self { upper, lower, alpha })
    }

    /// Linear band `l_t <= x <= r_t`.
    pub fn linear_band(r: CadlagPath, l: CadlagPath) -> Result<Self> {
        Self::new(
            BoundaryFunction::linear(r),
            BoundaryFunction::linear(l),
            &Tolerances::default(),
        )
    }

    /// `L`.
    pub fn upper(&self) -> &BoundaryFunction {
        &self.upper
    }

    /// `R`.
    pub fn lower(&self) -> &BoundaryFunction {
        &self.lower
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn family(&self) -> Family {
        self.upper.family
    }

    pub fn lower_lipschitz(&self) -> f64 {
        self.upper.lower_lipschitz()
    }

    pub fn upper_lipschitz(&self) -> f64 {
        self.upper.upper_lipschitz()
    }

    /// `R(t, x) − L(t, x)`, which is independent of `x`.
    pub fn gap_at(&self, t: f64) -> Result<f64> {
        Ok(self.family().offset_scale() * (self.upper.offset_at(t)? - self.lower.offset_at(t)?))
    }

    /// `(L^d, R^d)`.
    pub fn time_shifted(&self, d: f64) -> Result<Self> {
        Ok(Self {
            upper: self.upper.time_shifted(d)?,
            lower: self.lower.time_shifted(d)?,
            alpha: self.alpha,
        }
        .with_alpha())
    }

    fn with_alpha(mut self) -> Self {
        self.alpha = offset_gap_inf(&self.upper, &self.lower);
        self
    }
}

fn offset_gap_inf(upper: &BoundaryFunction, lower: &BoundaryFunction) -> f64 {
    let grid = upper.offset.grid().merge(lower.offset.grid());
    let (u, l) = (upper.offset.resample(&grid), lower.offset.resample(&grid));
    let scale = upper.family.offset_scale();
    u.values()
        .iter()
        .zip(l.values())
        .map(|(a, b)| scale * (a - b))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Largest sampled decrease of `g(t, ·)` between consecutive samples (0 if none).
    pub monotonicity_violation: f64,
    /// Largest excursion of a sampled difference quotient outside `[c, C]`.
    pub sandwich_violation: f64,
    /// Smallest sampled `R − L`.
    pub min_separation: f64,
    /// Largest deviation of sampled `R − L` from its `x`-free value.
    pub gap_dependence: f64,
    pub alpha: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Sampled smoke test of the monotonicity, Lipschitz and separation conditions.
///
/// Sampling cannot certify them; the analytic constants are what the solver
/// relies on.
pub fn validate_assumption(
    pair: &BoundaryPair,
    grid: &TimeGrid,
    x_lo: f64,
    x_hi: f64,
    m: usize,
    tol: &Tolerances,
) -> Result<ValidationReport> {
    if !(x_lo < x_hi) || m < 2 {
        return Err(Error::Input(format!(
            "need x_lo < x_hi and at least two samples (got [{x_lo}, {x_hi}], m = {m})"
        )));
    }
    let xs: Vec<f64> = (0..m)
        .map(|k| x_lo + (x_hi - x_lo) * k as f64 / (m - 1) as f64)
        .collect();
    let (c, big_c) = (pair.lower_lipschitz(), pair.upper_lipschitz());
    let mut report = ValidationReport {
        monotonicity_violation: 0.0,
        sandwich_violation: 0.0,
        min_separation: f64::INFINITY,
        gap_dependence: 0.0,
        alpha: pair.alpha,
        passed: true,
        failures: Vec::new(),
    };
    for &t in grid.times() {
        let gap = pair.gap_at(t)?;
        for g in [&pair.upper, &pair.lower] {
            let b = g.offset_at(t)?;
            let vals: Vec<f64> = xs.iter().map(|&x| g.apply_offset(b, x)).collect();
            for k in 1..m {
                let dx = xs[k] - xs[k - 1];
                let dg = vals[k] - vals[k - 1];
                report.monotonicity_violation = report.monotonicity_violation.max(-dg);
                let q = dg / dx;
                let slack = tol.check * (1.0 + q.abs());
                let excess = (c - q).max(q - big_c);
                if excess > slack {
                    report.sandwich_violation = report.sandwich_violation.max(excess);
                }
            }
        }
        let (bu, bl) = (pair.upper.offset_at(t)?, pair.lower.offset_at(t)?);
        for &x in &xs {
            let sep = pair.lower.apply_offset(bl, x) - pair.upper.apply_offset(bu, x);
            report.min_separation = report.min_separation.min(sep);
            let dev = (sep - gap).abs();
            if dev > tol.check * (1.0 + x.abs()) {
                report.gap_dependence = report.gap_dependence.max(dev);
            }
        }
    }
    if report.monotonicity_violation > 0.0 {
        report
            .failures
            .push(format!("g(t,.) decreases by {:e}", report.monotonicity_violation));
    }
    if report.sandwich_violation > 0.0 {
        report.failures.push(format!(
            "difference quotient leaves [c, C] by {:e}",
            report.sandwich_violation
        ));
    }
    if report.gap_dependence > 0.0 {
        report
            .failures
            .push(format!("R - L depends on x by {:e}", report.gap_dependence));
    }
    if !(pair.alpha > 0.0) || report.min_separation < pair.alpha - tol.check {
        report.failures.push(format!(
            "separation: alpha = {:e}, sampled min(R - L) = {:e}",
            pair.alpha, report.min_separation
        ));
    }
    report.passed = report.failures.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn konst(v: f64) -> CadlagPath {
        CadlagPath::constant(v).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn evaluates_families() {
        assert_eq!(BoundaryFunction::linear(konst(2.0)).eval(0.0, 5.0).unwrap(), 3.0);
        let s = BoundaryFunction::scaled(2.0, konst(0.0)).unwrap();
        assert_eq!(s.eval(0.0, -1.0).unwrap(), -2.0);
        let w = BoundaryFunction::sine(0.5, 1.0, konst(0.0)).unwrap();
        assert_eq!(w.eval(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn constants_per_family() {
        let w = BoundaryFunction::sine(0.5, -1.2, konst(0.0)).unwrap();
        assert!((w.lower_lipschitz() - 0.4).abs() < 1e-15);
        assert!((w.upper_lipschitz() - 1.6).abs() < 1e-15);
        let s = BoundaryFunction::scaled(3.0, konst(0.0)).unwrap();
        assert_eq!((s.lower_lipschitz(), s.upper_lipschitz()), (3.0, 3.0));
    }

    #[test]
    fn rejects_degenerate_families() {
        assert!(BoundaryFunction::sine(1.5, 1.0, konst(0.0)).is_err());
        assert!(BoundaryFunction::sine(0.5, 2.0, konst(0.0)).is_err());
        assert!(BoundaryFunction::scaled(0.0, konst(0.0)).is_err());
        assert!(BoundaryFunction::scaled(-1.0, konst(0.0)).is_err());
    }

    #[test]
    fn inverts_affine_families() {
        let g = BoundaryFunction::linear(konst(0.0));
        assert_eq!(g.invert_offset(0.0, 3.0, &tol()).unwrap(), -3.0);
        // 2x + 1 = 2 (x - (-0.5))
        let g = BoundaryFunction::scaled(2.0, konst(-0.5)).unwrap();
        assert_eq!(g.invert_offset(0.0, 0.0, &tol()).unwrap(), -0.5);
    }

    // Plain bisection on a fixed wide bracket, independent of the sandwich bracket.
    fn oracle_root(f: impl Fn(f64) -> f64) -> f64 {
        let (mut lo, mut hi) = (-1.0e4, 1.0e4);
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn inverts_sine_family() {
        let f = |x: f64| 1.0 + x + 0.5 * (1.0 + x).sin();
        let expected = oracle_root(f);
        // Root of 1 + x + 0.5 sin(1 + x) is x = -1 (since y + 0.5 sin y = 0 only at y = 0).
        assert!((expected + 1.0).abs() < 1e-12);
        let g = BoundaryFunction::sine(0.5, 1.0, konst(0.0)).unwrap();
        let x = g.invert_offset(0.0, 1.0, &tol()).unwrap();
        assert!((x - expected).abs() < 1e-12);

        let g = BoundaryFunction::sine(0.3, 2.5, konst(0.7)).unwrap();
        for v in [-40.0, -3.3, 0.0, 0.1, 2.0, 17.5] {
            let expected = oracle_root(|x| v + x + 0.3 * (2.5 * (v + x)).sin() - 0.7);
            let x = g.invert_offset(0.0, v, &tol()).unwrap();
            assert!((x - expected).abs() < 1e-11, "v = {v}: {x} vs {expected}");
        }
    }

    #[test]
    fn bisection_rejects_bad_bracket() {
        let err = bisect_increasing(|x| x - 5.0, 0.0, 1.0, 1e-12, 1e-15, 200).unwrap_err();
        assert!(err.is_numeric());
    }

    #[test]
    fn temporal_gaps() {
        let b = CadlagPath::from_points(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(BoundaryFunction::linear(b.clone()).temporal_gap(0.0, 1.0).unwrap(), 1.0);
        let s = BoundaryFunction::scaled(2.0, b.clone()).unwrap();
        assert_eq!(s.temporal_gap(0.0, 1.0).unwrap(), 2.0);
        assert_eq!(s.temporal_gap(1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn pair_requires_shared_family_and_separation() {
        let r = BoundaryFunction::linear(konst(1.0));
        let l = BoundaryFunction::linear(konst(0.0));
        let pair = BoundaryPair::new(r.clone(), l.clone(), &tol()).unwrap();
        assert_eq!(pair.alpha(), 1.0);

        let other = BoundaryFunction::scaled(2.0, konst(0.0)).unwrap();
        assert!(matches!(
            BoundaryPair::new(r.clone(), other, &tol()),
            Err(Error::Boundary(_))
        ));
        assert!(matches!(
            BoundaryPair::new(l.clone(), r, &tol()),
            Err(Error::Separation { .. })
        ));

        let crossing = CadlagPath::from_points(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            BoundaryPair::linear_band(crossing, konst(0.0)),
            Err(Error::Separation { .. })
        ));
    }

    #[test]
    fn alpha_uses_merged_offsets() {
        let r = CadlagPath::from_points(vec![0.0, 2.0], vec![3.0, 1.5]).unwrap();
        let l = CadlagPath::from_points(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let pair = BoundaryPair::new(
            BoundaryFunction::scaled(2.0, r).unwrap(),
            BoundaryFunction::scaled(2.0, l).unwrap(),
            &tol(),
        )
        .unwrap();
        assert_eq!(pair.alpha(), 1.0);
    }

    #[test]
    fn validates_linear_pair() {
        let pair = BoundaryPair::linear_band(konst(1.0), konst(0.0)).unwrap();
        let grid = TimeGrid::uniform(4, 1.0).unwrap();
        let rep = validate_assumption(&pair, &grid, -5.0, 5.0, 50, &tol()).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert!((rep.min_separation - 1.0).abs() <= 1e-12);
        assert!(validate_assumption(&pair, &grid, 1.0, 1.0, 50, &tol()).is_err());
    }

    #[test]
    fn validation_flags_wrong_constants() {
        // A hand-assembled pair claiming linear constants but with crossing offsets.
        let pair = BoundaryPair {
            upper: BoundaryFunction::linear(konst(0.0)),
            lower: BoundaryFunction::linear(konst(0.5)),
            alpha: -0.5,
        };
        let grid = TimeGrid::uniform(2, 1.0).unwrap();
        let rep = validate_assumption(&pair, &grid, -1.0, 1.0, 10, &tol()).unwrap();
        assert!(!rep.passed);
    }

    #[test]
    fn sine_pair_validates() {
        let pair = BoundaryPair::new(
            BoundaryFunction::sine(0.4, 2.0, konst(1.0)).unwrap(),
            BoundaryFunction::sine(0.4, 2.0, konst(-0.5)).unwrap(),
            &tol(),
        )
        .unwrap();
        let grid = TimeGrid::uniform(3, 1.0).unwrap();
        let rep = validate_assumption(&pair, &grid, -20.0, 20.0, 2000, &tol()).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert!((rep.alpha - 1.5).abs() < 1e-15);
    }

    fn any_family() -> impl Strategy<Value = Family> {
        prop_oneof![
            Just(Family::Linear),
            (0.1..5.0f64).prop_map(|a| Family::Scaled { a }),
            (-0.9..0.9f64, 0.1..3.0f64).prop_map(|(k, omega)| Family::SinePerturbed { eps: k / omega, omega }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn lipschitz_sandwich(fam in any_family(), b in -5.0..5.0f64,
                              x in -100.0..100.0f64, y in -100.0..100.0f64) {
            prop_assume!((x - y).abs() > 1e-6);
            let g = BoundaryFunction::new(fam, konst(b)).unwrap();
            let d = (g.eval(0.0, x).unwrap() - g.eval(0.0, y).unwrap()).abs();
            let dx = (x - y).abs();
            let slack = 1e-9 * (1.0 + x.abs() + y.abs());
            prop_assert!(d >= g.lower_lipschitz() * dx - slack);
            prop_assert!(d <= g.upper_lipschitz() * dx + slack);
        }

        #[test]
        fn inversion_round_trip(fam in any_family(), b in -5.0..5.0f64, v in -1.0e3..1.0e3f64) {
            let t = Tolerances::default();
            let g = BoundaryFunction::new(fam, konst(b)).unwrap();
            let x = g.invert_offset(0.0, v, &t).unwrap();
            let g0 = g.eval(0.0, v).unwrap();
            prop_assert!(g.eval(0.0, v + x).unwrap().abs() <= t.root * g0.abs().max(1.0));
        }

        #[test]
        fn inversion_is_monotone_and_lipschitz(fam in any_family(), v in -50.0..50.0f64, dv in 0.0..10.0f64) {
            let t = Tolerances::default();
            let g = BoundaryFunction::new(fam, konst(0.3)).unwrap();
            let a = g.invert_offset(0.0, v, &t).unwrap();
            let b = g.invert_offset(0.0, v + dv, &t).unwrap();
            // Root of g(v + x) = 0 moves as v + x = const, so x decreases one-for-one.
            prop_assert!(b <= a + 1e-9);
            prop_assert!(((a - b) - dv).abs() <= 1e-9 * (1.0 + v.abs() + dv));
        }

        #[test]
        fn pair_gap_is_x_free(fam in any_family(), x in -1.0e3..1.0e3f64, w in 0.1..3.0f64) {
            let pair = BoundaryPair::new(
                BoundaryFunction::new(fam, konst(w)).unwrap(),
                BoundaryFunction::new(fam, konst(0.0)).unwrap(),
                &Tolerances::default(),
            ).unwrap();
            let sep = pair.lower().eval(0.0, x).unwrap() - pair.upper().eval(0.0, x).unwrap();
            prop_assert!((sep - pair.gap_at(0.0).unwrap()).abs() <= 1e-12 * (1.0 + x.abs()) * fam.offset_scale());
            prop_assert!(sep >= pair.alpha() - 1e-9 * (1.0 + x.abs()));
        }
    }
}
