//! Cardinal utilities: quadratic + linear decomposition and endogenous
//! orthogonality.
//!
//! For a utility `U` with `U(0) = 0`, the symmetric average
//! `f(x) = ½[U(z+x) − U(z)] + ½[U(z−x) − U(z)]` is the quadratic part
//! whenever it does not depend on the status quo `z`, and `g = U − f` is the
//! linear part. The bilinear form `S` with `f(x) = S(x, x)` is recovered by
//! polarization on the standard basis; a residual over a probe grid rejects
//! utilities outside the family instead of fitting them.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::axioms::{AxiomReport, CheckOptions, Counterexample};
use crate::error::{Error, Result};
use crate::geometry::{check_dims, Vector};
use crate::sampling::{random_vector, rng_from_seed};
use crate::scalar::Scalar;

/// A real-valued utility on ℝⁿ.
pub trait UtilityOracle<T: Scalar> {
    fn dimension(&self) -> usize;

    /// Callers pass points of dimension [`Self::dimension`].
    fn eval(&self, x: &Vector<T>) -> T;
}

impl<T: Scalar, O: UtilityOracle<T> + ?Sized> UtilityOracle<T> for &O {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn eval(&self, x: &Vector<T>) -> T {
        (**self).eval(x)
    }
}

/// `U(x) = xᵀAx + b·x`. `A` need not be symmetric; only its symmetric part
/// matters.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticUtility<T> {
    a: Vec<Vec<T>>,
    b: Vector<T>,
}

impl<T: Scalar> QuadraticUtility<T> {
    pub fn new(a: Vec<Vec<T>>, b: Vector<T>) -> Result<Self> {
        let n = b.dim();
        check_dims(n, a.len())?;
        for row in &a {
            check_dims(n, row.len())?;
        }
        Ok(QuadraticUtility { a, b })
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.a
    }

    pub fn linear(&self) -> &Vector<T> {
        &self.b
    }
}

impl<T: Scalar> UtilityOracle<T> for QuadraticUtility<T> {
    fn dimension(&self) -> usize {
        self.b.dim()
    }

    fn eval(&self, x: &Vector<T>) -> T {
        quadratic_form(&self.a, x, x) + self.b.dot_unchecked(x)
    }
}

/// Utility given by a closure.
#[derive(Clone)]
pub struct FnUtility<F> {
    dim: usize,
    f: F,
}

impl<F> FnUtility<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnUtility { dim, f }
    }
}

impl<T: Scalar, F: Fn(&Vector<T>) -> T> UtilityOracle<T> for FnUtility<F> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &Vector<T>) -> T {
        (self.f)(x)
    }
}

/// Built-in test utilities outside the quadratic + linear family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// `x₁³ + x₂`.
    Cubic1 { dim: usize },
    /// `x₁³`.
    Cube { dim: usize },
}

impl Builtin {
    pub const NAMES: [&'static str; 2] = ["cubic1", "cube"];

    pub fn cubic1(dim: usize) -> Result<Self> {
        Self::from_name("cubic1", dim)
    }

    pub fn from_name(name: &str, dim: usize) -> Result<Self> {
        match name {
            "cubic1" if dim >= 2 => Ok(Builtin::Cubic1 { dim }),
            "cubic1" => Err(Error::InvalidArgument("cubic1 needs dimension at least 2".into())),
            "cube" if dim >= 1 => Ok(Builtin::Cube { dim }),
            _ => Err(Error::InvalidArgument(format!("unknown built-in oracle {name:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Cubic1 { .. } => "cubic1",
            Builtin::Cube { .. } => "cube",
        }
    }
}

impl<T: Scalar> UtilityOracle<T> for Builtin {
    fn dimension(&self) -> usize {
        match *self {
            Builtin::Cubic1 { dim } | Builtin::Cube { dim } => dim,
        }
    }

    fn eval(&self, x: &Vector<T>) -> T {
        let cube = x[0].clone() * x[0].clone() * x[0].clone();
        match self {
            Builtin::Cubic1 { .. } => cube + x[1].clone(),
            Builtin::Cube { .. } => cube,
        }
    }
}

/// Wraps a utility so that it vanishes at the origin.
#[derive(Clone, Debug)]
pub struct ZeroAnchored<T, O> {
    inner: O,
    offset: T,
}

impl<T: Scalar, O: UtilityOracle<T>> ZeroAnchored<T, O> {
    /// Checks `U(0) = 0`; with `auto_shift` the oracle is replaced by
    /// `U − U(0)` instead of being rejected.
    pub fn new(inner: O, auto_shift: bool) -> Result<Self> {
        let u0 = inner.eval(&Vector::zeros(inner.dimension()));
        if auto_shift || vanishes(&u0) {
            Ok(ZeroAnchored { inner, offset: u0 })
        } else {
            Err(Error::NonzeroAtOrigin(u0.to_f64()))
        }
    }
}

impl<T: Scalar, O: UtilityOracle<T>> UtilityOracle<T> for ZeroAnchored<T, O> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn eval(&self, x: &Vector<T>) -> T {
        self.inner.eval(x) - self.offset.clone()
    }
}

fn vanishes<T: Scalar>(v: &T) -> bool {
    v.abs() <= T::tie_tolerance(v, &T::zero(), 1e-12)
}

/// `xᵀMy`.
fn quadratic_form<T: Scalar>(m: &[Vec<T>], x: &Vector<T>, y: &Vector<T>) -> T {
    m.iter().zip(x.iter()).fold(T::zero(), |acc, (row, xi)| {
        let row_dot = row.iter().zip(y.iter()).fold(T::zero(), |s, (a, yj)| s + a.clone() * yj.clone());
        acc + xi.clone() * row_dot
    })
}

/// The symmetric status-quo average
/// `½[U(z+x) − U(z)] + ½[U(z−x) − U(z)]`.
pub fn extract_f<T: Scalar, O: UtilityOracle<T> + ?Sized>(u: &O, x: &Vector<T>, z: &Vector<T>) -> Result<T> {
    check_dims(u.dimension(), x.dim())?;
    check_dims(u.dimension(), z.dim())?;
    Ok(extract_f_unchecked(u, x, z))
}

fn extract_f_unchecked<T: Scalar, O: UtilityOracle<T> + ?Sized>(u: &O, x: &Vector<T>, z: &Vector<T>) -> T {
    let uz = u.eval(z);
    let up = u.eval(&(z + x));
    let um = u.eval(&(z - x));
    T::half() * (up - uz.clone()) + T::half() * (um - uz)
}

/// `S` and `g` with `U(x) = xᵀSx + g·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadLinDecomposition<T> {
    /// Symmetric bilinear form.
    pub s: Vec<Vec<T>>,
    pub g: Vector<T>,
    /// Largest `|U(x) − (xᵀSx + g·x)|` over the probe grid.
    pub residual: T,
}

impl<T: Scalar> QuadLinDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `S(x, z) = xᵀSz`.
    pub fn bilinear(&self, x: &Vector<T>, z: &Vector<T>) -> Result<T> {
        check_dims(self.dim(), x.dim())?;
        check_dims(self.dim(), z.dim())?;
        Ok(quadratic_form(&self.s, x, z))
    }

    /// Reconstructed utility `xᵀSx + g·x`.
    pub fn eval(&self, x: &Vector<T>) -> Result<T> {
        Ok(self.bilinear(x, x)? + self.g.dot_unchecked(x))
    }
}

impl<T: Scalar> Serialize for QuadLinDecomposition<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<serde_json::Value>> =
            self.s.iter().map(|r| r.iter().map(Scalar::to_json).collect()).collect();
        let mut st = s.serialize_struct("QuadLinDecomposition", 3)?;
        st.serialize_field("S", &rows)?;
        st.serialize_field("g", &self.g)?;
        st.serialize_field("residual", &self.residual.to_json())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeOptions {
    /// Float oracles are rejected when the residual exceeds
    /// `rel_threshold · (1 + max |U|)` on the probe grid. Exact oracles must
    /// reproduce exactly.
    pub rel_threshold: f64,
    /// Seed of the random part of the probe grid.
    pub seed: u64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { rel_threshold: 1e-6, seed: 0x5eed }
    }
}

/// Recovers `S` and `g` using the first probe as the reference status quo.
pub fn decompose<T, O>(u: &O, probe_z: &[Vector<T>]) -> Result<QuadLinDecomposition<T>>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    decompose_with(u, probe_z, &DecomposeOptions::default())
}

pub fn decompose_with<T, O>(u: &O, probe_z: &[Vector<T>], opts: &DecomposeOptions) -> Result<QuadLinDecomposition<T>>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    let n = u.dimension();
    let z0 = probe_z
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one status-quo probe is required".into()))?;
    for z in probe_z {
        check_dims(n, z.dim())?;
    }
    let u0 = u.eval(&Vector::zeros(n));
    if !vanishes(&u0) {
        return Err(Error::NonzeroAtOrigin(u0.to_f64()));
    }

    let f = |x: &Vector<T>| extract_f_unchecked(u, x, z0);
    let basis: Vec<Vector<T>> = (0..n).map(|i| Vector::unit(n, i)).collect();
    let quarter = T::from_ratio(1, 4);
    let mut s = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        s[i][i] = f(&basis[i]);
        for j in i + 1..n {
            let sij = quarter.clone() * (f(&(&basis[i] + &basis[j])) - f(&(&basis[i] - &basis[j])));
            s[i][j] = sij.clone();
            s[j][i] = sij;
        }
    }
    let g = Vector::new((0..n).map(|i| u.eval(&basis[i]) - s[i][i].clone()).collect())?;
    let mut dec = QuadLinDecomposition { s, g, residual: T::zero() };

    let mut residual = T::zero();
    let mut max_u = 0.0f64;
    for x in probe_grid(n, probe_z, opts.seed) {
        let ux = u.eval(&x);
        max_u = max_u.max(ux.to_f64().abs());
        let r = (ux - dec.eval(&x)?).abs();
        if r > residual {
            residual = r;
        }
    }
    dec.residual = residual.clone();

    let threshold = if T::EXACT { 0.0 } else { opts.rel_threshold * (1.0 + max_u) };
    let rejected = if T::EXACT { !residual.is_zero() } else { residual.to_f64() > threshold };
    if rejected {
        return Err(Error::NotQuadLin { residual: residual.to_f64(), threshold });
    }
    Ok(dec)
}

/// Points at several radii, the probes and their unit neighbours, and a
/// seeded random sample.
fn probe_grid<T: Scalar>(n: usize, probe_z: &[Vector<T>], seed: u64) -> Vec<Vector<T>> {
    let mut grid = Vec::new();
    for r in [1, 3, 10] {
        let r = T::from_i64(r);
        for i in 0..n {
            let ei = Vector::<T>::unit(n, i).scale(&r);
            grid.push(-&ei);
            for j in i + 1..n {
                let ej = Vector::<T>::unit(n, j).scale(&r);
                grid.push(&ei + &ej);
                grid.push(&ei - &ej);
            }
            grid.push(ei);
        }
    }
    for z in probe_z {
        grid.push(z.clone());
        for i in 0..n {
            let ei = Vector::unit(n, i);
            grid.push(z + &ei);
            grid.push(z - &ei);
        }
    }
    let mut rng = rng_from_seed(seed);
    grid.extend((0..16).map(|_| random_vector(&mut rng, n, 10.0)));
    grid
}

/// Samples `x` and four status quos (the origin and three random points)
/// per trial and checks that the symmetric average does not depend on the
/// status quo. Float spreads above `tol · (1 + max |f|)` count as
/// violations; exact spreads must vanish.
pub fn check_status_quo_independence<T, O>(u: &O, opts: &CheckOptions, tol: f64) -> Result<AxiomReport<T>>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    let n = u.dimension();
    if opts.trials < 2 {
        return Err(Error::InvalidArgument("status quo independence needs at least 2 trials".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("oracle dimension must be at least 1".into()));
    }
    let mut rng = rng_from_seed(opts.seed);
    let mut report = AxiomReport::new("status_quo_independence", opts.trials);
    let mut max_spread = 0.0f64;
    for _ in 0..opts.trials {
        let x: Vector<T> = random_vector(&mut rng, n, opts.radius);
        let mut quos = vec![Vector::zeros(n)];
        quos.extend((0..3).map(|_| random_vector(&mut rng, n, opts.radius)));
        let values: Vec<T> = quos.iter().map(|w| extract_f_unchecked(u, &x, w)).collect();
        let (lo, hi) = min_max_index(&values);
        let spread = values[hi].clone() - values[lo].clone();
        max_spread = max_spread.max(spread.to_f64());
        let holds = if T::EXACT {
            spread.is_zero()
        } else {
            let scale = values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
            spread.to_f64() <= tol * (1.0 + scale)
        };
        report.record(holds, || Counterexample { points: vec![("x", x.clone()), ("w", quos[lo].clone()), ("w2", quos[hi].clone())] });
    }
    report.max_spread = Some(max_spread);
    Ok(report)
}

fn min_max_index<T: Scalar>(values: &[T]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = i;
        }
        if *v > values[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

/// `U(w+(x+y)) − U(w−(x+y)) − [U(w+x) − U(w−x) + U(w+y) − U(w−y)]` together
/// with the magnitude of the terms involved.
pub fn eventual_linearity_residual<T, O>(u: &O, w: &Vector<T>, x: &Vector<T>, y: &Vector<T>) -> Result<T>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    for v in [w, x, y] {
        check_dims(u.dimension(), v.dim())?;
    }
    Ok(el_residual(u, w, x, y).0)
}

fn el_residual<T: Scalar, O: UtilityOracle<T> + ?Sized>(u: &O, w: &Vector<T>, x: &Vector<T>, y: &Vector<T>) -> (T, T, T) {
    let s = x + y;
    let lhs = u.eval(&(w + &s)) - u.eval(&(w - &s));
    let rhs = u.eval(&(w + x)) - u.eval(&(w - x)) + u.eval(&(w + y)) - u.eval(&(w - y));
    (lhs.clone() - rhs.clone(), lhs, rhs)
}

/// Budget for the eventual-linearity root search.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSearch {
    pub directions: usize,
    /// Brackets are tried at radii `2⁰, 2¹, …, 2^max_doublings`.
    pub max_doublings: u32,
    pub bisection_steps: usize,
    pub seed: u64,
    /// Relative tolerance on the residual (float mode).
    pub tol: f64,
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch { directions: 16, max_doublings: 10, bisection_steps: 80, seed: 0, tol: 1e-9 }
    }
}

/// Looks for a status quo `w` at which the symmetric differences of `x`,
/// `y` and `x + y` add up. Searches along seeded lines through the origin,
/// bracketing sign changes of the residual and bisecting. `None` means no
/// root was found within the budget, not that none exists.
pub fn check_eventual_linearity<T, O>(u: &O, x: &Vector<T>, y: &Vector<T>, search: &LineSearch) -> Result<Option<Vector<T>>>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    let n = u.dimension();
    check_dims(n, x.dim())?;
    check_dims(n, y.dim())?;
    let accept = |w: &Vector<T>| -> (bool, T) {
        let (h, lhs, rhs) = el_residual(u, w, x, y);
        (h.abs() <= T::tie_tolerance(&lhs, &rhs, search.tol), h)
    };

    let origin = Vector::zeros(n);
    let (ok, h0) = accept(&origin);
    if ok {
        return Ok(Some(origin));
    }
    let mut rng = rng_from_seed(search.seed);
    for _ in 0..search.directions {
        let dir: Vector<T> = random_vector(&mut rng, n, 1.0);
        if dir.is_zero() {
            continue;
        }
        for k in 0..=search.max_doublings {
            let t = T::from_i64(1i64 << k);
            for end in [dir.scale(&t), dir.scale(&-t)] {
                let (ok, h) = accept(&end);
                if ok {
                    return Ok(Some(end));
                }
                if h.is_positive() != h0.is_positive() {
                    if let Some(w) = bisect(&accept, origin.clone(), h0.clone(), end, search.bisection_steps) {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn bisect<T: Scalar>(
    accept: &dyn Fn(&Vector<T>) -> (bool, T),
    mut lo: Vector<T>,
    h_lo: T,
    mut hi: Vector<T>,
    steps: usize,
) -> Option<Vector<T>> {
    let lo_positive = h_lo.is_positive();
    for _ in 0..steps {
        let mid = (&lo + &hi).scale(&T::half());
        let (ok, h) = accept(&mid);
        if ok {
            return Some(mid);
        }
        if h.is_positive() == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}

/// `|xᵀSz| ≤ tol`: orthogonality induced by the utility itself.
pub fn u_orthogonal<T: Scalar>(dec: &QuadLinDecomposition<T>, x: &Vector<T>, z: &Vector<T>, tol: &T) -> Result<bool> {
    Ok(dec.bilinear(x, z)?.abs() <= *tol)
}

/// `f(x+y) + f(x−y) − 2f(x) − 2f(y)` with `f` taken at status quo `z`.
pub fn parallelogram_residual<T, O>(u: &O, x: &Vector<T>, y: &Vector<T>, z: &Vector<T>) -> Result<T>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    for v in [x, y, z] {
        check_dims(u.dimension(), v.dim())?;
    }
    let f = |v: &Vector<T>| extract_f_unchecked(u, v, z);
    Ok(f(&(x + y)) + f(&(x - y)) - T::two() * f(x) - T::two() * f(y))
}

/// `g(x+y) − g(x) − g(y)` for `g = U − f`, with `f` taken at status quo `z`.
pub fn additivity_residual<T, O>(u: &O, x: &Vector<T>, y: &Vector<T>, z: &Vector<T>) -> Result<T>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    for v in [x, y, z] {
        check_dims(u.dimension(), v.dim())?;
    }
    let g = |v: &Vector<T>| u.eval(v) - extract_f_unchecked(u, v, z);
    Ok(g(&(x + y)) - g(x) - g(y))
}

/// `U(x+z) − U(x) − U(z)`; vanishes when `x` and `z` are U-orthogonal.
pub fn additivity_gap<T, O>(u: &O, x: &Vector<T>, z: &Vector<T>) -> Result<T>
where
    T: Scalar,
    O: UtilityOracle<T> + ?Sized,
{
    check_dims(u.dimension(), x.dim())?;
    check_dims(u.dimension(), z.dim())?;
    Ok(u.eval(&(x + z)) - u.eval(x) - u.eval(z))
}
