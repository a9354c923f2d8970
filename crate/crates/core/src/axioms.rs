//! Executable checks of the orthogonal-independence axioms and the
//! geometric consequences of spherical preferences.
//!
//! The random checkers test necessity: a spherical preference never
//! violates them, while an arbitrary comparison oracle may. A report with
//! zero violations only says that no violation was found.
//!
//! Orthogonality is constructed by projection (never by rejection), so
//! every trial is a genuine instance of the axiom. In float mode a
//! suspected violation is re-evaluated with comparisons that treat
//! near-ties within a relative margin as indifference, and only counted if
//! it survives. Exact mode uses true signs.

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};

use crate::cardinal::UtilityOracle;
use crate::error::{Error, Result};
use crate::geometry::{check_dims, project_out, Vector};
use crate::preference::{compare_values, Comparison, PreferenceClass, SphericalParams};
use crate::sampling::{random_equal_norm, random_positive, random_vector, rng_from_seed};
use crate::scalar::{Scalar, STRICT_MARGIN, TIE_TOLERANCE};

/// Anything that ranks pairs of points in a fixed dimension.
///
/// Oracles must be deterministic within a run.
pub trait ComparisonOracle<T: Scalar> {
    fn dimension(&self) -> usize;

    fn compare(&self, x: &Vector<T>, y: &Vector<T>) -> Comparison;

    /// Comparison that treats relative near-ties as indifference. Oracles
    /// without a notion of magnitude keep their plain answer.
    fn compare_with_margin(&self, x: &Vector<T>, y: &Vector<T>, _margin: f64) -> Comparison {
        self.compare(x, y)
    }
}

impl<T: Scalar> ComparisonOracle<T> for SphericalParams<T> {
    fn dimension(&self) -> usize {
        self.dim()
    }

    fn compare(&self, x: &Vector<T>, y: &Vector<T>) -> Comparison {
        compare_values(&self.utility_unchecked(x), &self.utility_unchecked(y), TIE_TOLERANCE)
    }

    fn compare_with_margin(&self, x: &Vector<T>, y: &Vector<T>, margin: f64) -> Comparison {
        compare_values(&self.utility_unchecked(x), &self.utility_unchecked(y), margin)
    }
}

/// Ranks points by a utility function.
#[derive(Clone, Debug)]
pub struct ByUtility<O>(pub O);

impl<T: Scalar, O: UtilityOracle<T>> ComparisonOracle<T> for ByUtility<O> {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    fn compare(&self, x: &Vector<T>, y: &Vector<T>) -> Comparison {
        compare_values(&self.0.eval(x), &self.0.eval(y), TIE_TOLERANCE)
    }

    fn compare_with_margin(&self, x: &Vector<T>, y: &Vector<T>, margin: f64) -> Comparison {
        compare_values(&self.0.eval(x), &self.0.eval(y), margin)
    }
}

/// Sampling parameters shared by the random checkers.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub trials: usize,
    pub seed: u64,
    /// Points are drawn from `[-radius, radius]ⁿ`.
    pub radius: f64,
    /// Float-mode strictness margin.
    pub margin: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { trials: 1000, seed: 0, radius: 10.0, margin: STRICT_MARGIN }
    }
}

impl CheckOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        CheckOptions { trials, seed, ..Self::default() }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("oracle dimension must be at least 1".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument("sampling radius must be positive".into()));
        }
        Ok(())
    }
}

/// Named points of a failing trial, in sampling order.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample<T> {
    pub points: Vec<(&'static str, Vector<T>)>,
}

impl<T: Scalar> Counterexample<T> {
    fn of(points: &[(&'static str, &Vector<T>)]) -> Self {
        Counterexample { points: points.iter().map(|(k, v)| (*k, (*v).clone())).collect() }
    }

    pub fn get(&self, name: &str) -> Option<&Vector<T>> {
        self.points.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

/// Result of running one checker.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport<T> {
    pub axiom: String,
    pub trials: usize,
    pub violations: usize,
    /// First failing trial; present iff `violations > 0`.
    pub counterexample: Option<Counterexample<T>>,
    /// Largest observed spread, for checkers that measure one.
    pub max_spread: Option<f64>,
}

impl<T: Scalar> AxiomReport<T> {
    pub(crate) fn new(axiom: &str, trials: usize) -> Self {
        AxiomReport { axiom: axiom.to_string(), trials, violations: 0, counterexample: None, max_spread: None }
    }

    pub(crate) fn record(&mut self, holds: bool, witness: impl FnOnce() -> Counterexample<T>) {
        if !holds {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl<T: Scalar> Serialize for Counterexample<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.points.len()))?;
        for (k, v) in &self.points {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<T: Scalar> Serialize for AxiomReport<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let len = if self.max_spread.is_some() { 5 } else { 4 };
        let mut st = s.serialize_struct("AxiomReport", len)?;
        st.serialize_field("axiom", &self.axiom)?;
        st.serialize_field("trials", &self.trials)?;
        st.serialize_field("violations", &self.violations)?;
        st.serialize_field("counterexample", &self.counterexample)?;
        if let Some(spread) = self.max_spread {
            st.serialize_field("max_spread", &spread)?;
        }
        st.end()
    }
}

type Cmp<'a, T> = &'a dyn Fn(&Vector<T>, &Vector<T>) -> Comparison;

/// Evaluates `pred` with the oracle's own comparisons and, if it fails in
/// float mode, again with margin-based comparisons. The instance holds
/// unless both evaluations fail.
fn holds_robustly<T, O>(o: &O, margin: f64, pred: impl Fn(Cmp<'_, T>) -> bool) -> bool
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    if pred(&|a, b| o.compare(a, b)) {
        return true;
    }
    if T::EXACT {
        return false;
    }
    pred(&|a, b| o.compare_with_margin(a, b, margin))
}

fn check_all<T: Scalar>(n: usize, vs: &[&Vector<T>]) -> Result<()> {
    vs.iter().try_for_each(|v| check_dims(n, v.dim()))
}

/// One OIOI instance: `w+x` vs `w+y` must rank like `w+x+z` vs `w+y+z`.
/// The caller is responsible for `z ⊥ x` and `z ⊥ y`.
pub fn oioi_holds<T, O>(o: &O, margin: f64, w: &Vector<T>, x: &Vector<T>, y: &Vector<T>, z: &Vector<T>) -> Result<bool>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    check_all(o.dimension(), &[w, x, y, z])?;
    let (wx, wy) = (w + x, w + y);
    let (wxz, wyz) = (&wx + z, &wy + z);
    Ok(holds_robustly(o, margin, |cmp| cmp(&wx, &wy) == cmp(&wxz, &wyz)))
}

/// One instance of the shifted form: for `d ⊥ (x−y)`, `x` vs `y` must rank
/// like `x+d` vs `y+d`.
pub fn perp_diff_holds<T, O>(o: &O, margin: f64, x: &Vector<T>, y: &Vector<T>, d: &Vector<T>) -> Result<bool>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    check_all(o.dimension(), &[x, y, d])?;
    let (xd, yd) = (x + d, y + d);
    Ok(holds_robustly(o, margin, |cmp| cmp(x, y) == cmp(&xd, &yd)))
}

/// One SOIOI instance with `x ⊥ y` and `a ⊥ b`. Both orientations of the
/// axiom are checked, so a trial is vacuous only when the two antecedent
/// comparisons point in opposite strict directions.
pub fn soioi_holds<T, O>(
    o: &O,
    margin: f64,
    w: &Vector<T>,
    x: &Vector<T>,
    y: &Vector<T>,
    a: &Vector<T>,
    b: &Vector<T>,
) -> Result<bool>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    check_all(o.dimension(), &[w, x, y, a, b])?;
    let (wx, wa, wy, wb) = (w + x, w + a, w + y, w + b);
    let (wxy, wab) = (&wx + y, &wa + b);
    Ok(holds_robustly(o, margin, |cmp| {
        let first = cmp(&wx, &wa);
        let second = cmp(&wy, &wb);
        let sum = cmp(&wxy, &wab);
        let forward = !(first.is_weakly_better() && second.is_weakly_better())
            || (sum.is_weakly_better()
                && (sum == Comparison::Better
                    || (first != Comparison::Better && second != Comparison::Better)));
        let backward = !(first.reverse().is_weakly_better() && second.reverse().is_weakly_better())
            || (sum.reverse().is_weakly_better()
                && (sum == Comparison::Worse || (first != Comparison::Worse && second != Comparison::Worse)));
        forward && backward
    }))
}

/// One homotheticity instance for `‖x‖ = ‖y‖` and `beta > 0`.
pub fn homotheticity_holds<T, O>(
    o: &O,
    margin: f64,
    w: &Vector<T>,
    x: &Vector<T>,
    y: &Vector<T>,
    beta: &T,
) -> Result<bool>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    check_all(o.dimension(), &[w, x, y])?;
    if !beta.is_positive() {
        return Err(Error::InvalidArgument("beta must be positive".into()));
    }
    let (wx, wy) = (w + x, w + y);
    let (wbx, wby) = (w + &x.scale(beta), w + &y.scale(beta));
    Ok(holds_robustly(o, margin, |cmp| cmp(&wx, &wy) == cmp(&wbx, &wby)))
}

/// Samples `w, x, y, z`, makes `z` orthogonal to `x` and `y`, and checks
/// origin-independent orthogonal independence.
pub fn check_oioi<T, O>(o: &O, opts: &CheckOptions) -> Result<AxiomReport<T>>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    let n = o.dimension();
    opts.validate(n)?;
    let mut rng = rng_from_seed(opts.seed);
    let mut report = AxiomReport::new("oioi", opts.trials);
    for _ in 0..opts.trials {
        let w = random_vector(&mut rng, n, opts.radius);
        let x = random_vector(&mut rng, n, opts.radius);
        let y = random_vector(&mut rng, n, opts.radius);
        let z = random_vector(&mut rng, n, opts.radius);
        let z = project_out(&z, &[x.clone(), y.clone()])?;
        let holds = oioi_holds(o, opts.margin, &w, &x, &y, &z)?;
        report.record(holds, || Counterexample::of(&[("w", &w), ("x", &x), ("y", &y), ("z", &z)]));
    }
    Ok(report)
}

/// Samples `x, y, d`, makes `d ⊥ (x−y)`, and checks that the ranking of
/// `x` vs `y` survives the shift by `d`.
pub fn check_perp_diff<T, O>(o: &O, opts: &CheckOptions) -> Result<AxiomReport<T>>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    let n = o.dimension();
    opts.validate(n)?;
    let mut rng = rng_from_seed(opts.seed);
    let mut report = AxiomReport::new("perp_diff", opts.trials);
    for _ in 0..opts.trials {
        let x = random_vector(&mut rng, n, opts.radius);
        let y = random_vector(&mut rng, n, opts.radius);
        let d = random_vector(&mut rng, n, opts.radius);
        let d = project_out(&d, &[&x - &y])?;
        let holds = perp_diff_holds(o, opts.margin, &x, &y, &d)?;
        report.record(holds, || Counterexample::of(&[("x", &x), ("y", &y), ("d", &d)]));
    }
    Ok(report)
}

/// Samples `w, x, y ⊥ x, a, b ⊥ a` and checks the strong form of the axiom.
pub fn check_soioi<T, O>(o: &O, opts: &CheckOptions) -> Result<AxiomReport<T>>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    let n = o.dimension();
    opts.validate(n)?;
    let mut rng = rng_from_seed(opts.seed);
    let mut report = AxiomReport::new("soioi", opts.trials);
    for _ in 0..opts.trials {
        let w = random_vector(&mut rng, n, opts.radius);
        let x = random_vector(&mut rng, n, opts.radius);
        let y = random_vector(&mut rng, n, opts.radius);
        let a = random_vector(&mut rng, n, opts.radius);
        let b = random_vector(&mut rng, n, opts.radius);
        let y = project_out(&y, std::slice::from_ref(&x))?;
        let b = project_out(&b, std::slice::from_ref(&a))?;
        let holds = soioi_holds(o, opts.margin, &w, &x, &y, &a, &b)?;
        report.record(holds, || Counterexample::of(&[("w", &w), ("x", &x), ("y", &y), ("a", &a), ("b", &b)]));
    }
    Ok(report)
}

/// Samples `w`, `x`, an equal-norm `y` and `beta ∈ (0, 10]`, and checks
/// that scaling both marginal changes by `beta` keeps their ranking.
pub fn check_homotheticity<T, O>(o: &O, opts: &CheckOptions) -> Result<AxiomReport<T>>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    let n = o.dimension();
    opts.validate(n)?;
    let mut rng = rng_from_seed(opts.seed);
    let mut report = AxiomReport::new("homotheticity", opts.trials);
    for _ in 0..opts.trials {
        let w = random_vector(&mut rng, n, opts.radius);
        let x = random_vector(&mut rng, n, opts.radius);
        let y = random_equal_norm(&mut rng, &x);
        let beta: T = random_positive(&mut rng, 10.0);
        let holds = homotheticity_holds(o, opts.margin, &w, &x, &y, &beta)?;
        report.record(holds, || {
            let b = Vector::new(vec![beta.clone()]).expect("non-empty");
            Counterexample::of(&[("w", &w), ("x", &x), ("y", &y), ("beta", &b)])
        });
    }
    Ok(report)
}

/// Runs the four necessity checkers with the same options.
pub fn check_necessity<T, O>(o: &O, opts: &CheckOptions) -> Result<Vec<AxiomReport<T>>>
where
    T: Scalar,
    O: ComparisonOracle<T> + ?Sized,
{
    Ok(vec![check_oioi(o, opts)?, check_perp_diff(o, opts)?, check_soioi(o, opts)?, check_homotheticity(o, opts)?])
}

/// A direction `z` with `x + z ⪰ x` everywhere. Only linear preferences
/// (and total indifference, where the zero vector works) admit one.
pub fn find_monotone_direction<T: Scalar>(p: &SphericalParams<T>) -> Option<Vector<T>> {
    p.c.is_zero().then(|| p.d.clone())
}

/// One strict-convexity instance: if `x ⪰ y` and `x ≠ y`, the midpoint
/// must be strictly better than `y`. Returns `true` for vacuous instances.
pub fn strict_convexity_holds<T: Scalar>(
    p: &SphericalParams<T>,
    margin: f64,
    x: &Vector<T>,
    y: &Vector<T>,
) -> Result<bool> {
    check_all(p.dim(), &[x, y])?;
    if x == y {
        return Ok(true);
    }
    let (x, y) = match ComparisonOracle::compare(p, x, y) {
        Comparison::Worse => (y, x),
        _ => (x, y),
    };
    let mid = (x + y).scale(&T::half());
    Ok(holds_robustly(p, margin, |cmp| cmp(&mid, y) == Comparison::Better))
}

/// Samples pairs and checks strict convexity. Half of the trials use pairs
/// built to be indifferent (reflections through the center, or shifts
/// orthogonal to `d`), since random pairs almost never tie. Zero
/// violations is expected exactly for Euclidean preferences.
pub fn check_strict_convexity<T: Scalar>(p: &SphericalParams<T>, opts: &CheckOptions) -> Result<AxiomReport<T>> {
    let n = p.dim();
    opts.validate(n)?;
    let mut rng = rng_from_seed(opts.seed);
    let mut report = AxiomReport::new("strict_convexity", opts.trials);
    let center = p.center();
    for trial in 0..opts.trials {
        let y = random_vector(&mut rng, n, opts.radius);
        let v: Vector<T> = random_vector(&mut rng, n, opts.radius);
        let x = if trial % 2 == 1 {
            v
        } else if let Some(center) = &center {
            // Reflect y across a hyperplane through the center.
            let rel = &y - center;
            let vv = v.sq_norm_unchecked();
            if vv.is_zero() {
                y.clone()
            } else {
                let k = -T::two() * rel.dot_unchecked(&v) / vv;
                y.axpy(&k, &v)
            }
        } else {
            &y + &project_out(&v, std::slice::from_ref(&p.d))?
        };
        let holds = strict_convexity_holds(p, opts.margin, &x, &y)?;
        report.record(holds, || Counterexample::of(&[("x", &x), ("y", &y)]));
    }
    Ok(report)
}

/// Finds antipodal points `x`, `y` on the circle
/// `{w + r(cos θ·e₁ + sin θ·e₂)}` with `u(x) ≈ u(y)`.
///
/// Bisection on `g(θ) = u(θ) − u(θ + π)` over `[0, π]`; since
/// `g(θ + π) = −g(θ)` a sign change always exists.
pub fn antipodal_indifference(
    p: &SphericalParams<f64>,
    w: &Vector<f64>,
    r: f64,
    plane: (&Vector<f64>, &Vector<f64>),
) -> Result<(Vector<f64>, Vector<f64>)> {
    let (e1, e2) = plane;
    check_all(p.dim(), &[w, e1, e2])?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let orthonormal = (e1.sq_norm_unchecked() - 1.0).abs() <= 1e-9
        && (e2.sq_norm_unchecked() - 1.0).abs() <= 1e-9
        && e1.dot_unchecked(e2).abs() <= 1e-9;
    if !orthonormal {
        return Err(Error::InvalidArgument("plane vectors must be orthonormal".into()));
    }

    let point = |theta: f64| {
        let (s, c) = theta.sin_cos();
        w.axpy(&(r * c), e1).axpy(&(r * s), e2)
    };
    let g = |theta: f64| {
        p.utility_unchecked(&point(theta)) - p.utility_unchecked(&point(theta + std::f64::consts::PI))
    };
    let tol = 1e-9 * (1.0 + r * r);
    let pair = |theta: f64| (point(theta), point(theta + std::f64::consts::PI));

    let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo.abs() <= tol {
        return Ok(pair(lo));
    }
    if g_hi.abs() <= tol {
        return Ok(pair(hi));
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Numerical("no sign change of the antipodal difference".into()));
    }
    let lo_sign = g_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 || hi - lo <= f64::EPSILON {
            return Ok(pair(mid));
        }
        if g_mid.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    if g(theta).abs() <= tol {
        Ok(pair(theta))
    } else {
        Err(Error::Numerical("bisection did not reach the indifference tolerance".into()))
    }
}

/// Whether the class admits strict convexity (Euclidean only).
pub fn is_strictly_convex_class<T>(class: &PreferenceClass<T>) -> bool {
    matches!(class, PreferenceClass::Euclidean { .. })
}
