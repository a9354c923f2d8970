//! Spherical preferences `u(x) = c·(x·x) + d·x`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{check_dims, Vector};
use crate::scalar::{Scalar, TIE_TOLERANCE};

/// Outcome of comparing `x` against `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Better,
    Worse,
    Indifferent,
}

impl Comparison {
    pub fn reverse(self) -> Self {
        match self {
            Comparison::Better => Comparison::Worse,
            Comparison::Worse => Comparison::Better,
            Comparison::Indifferent => Comparison::Indifferent,
        }
    }

    /// `x ⪰ y`.
    pub fn is_weakly_better(self) -> bool {
        self != Comparison::Worse
    }
}

/// Compares two utility values. Within `tie_tolerance(a, b, rel)` the values
/// are indifferent; in exact mode only equal values are.
pub fn compare_values<T: Scalar>(a: &T, b: &T, rel: f64) -> Comparison {
    let diff = a.clone() - b.clone();
    let tol = T::tie_tolerance(a, b, rel);
    if diff.abs() <= tol {
        Comparison::Indifferent
    } else if diff.is_positive() {
        Comparison::Better
    } else {
        Comparison::Worse
    }
}

/// Parameters `(c, d)` of a spherical preference.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalParams<T> {
    pub c: T,
    pub d: Vector<T>,
}

/// The three families of a spherical preference, plus total indifference.
#[derive(Clone, Debug, PartialEq)]
pub enum PreferenceClass<T> {
    /// `x ⪰ y` iff `u·x ≥ u·y`.
    Linear { u: Vector<T> },
    /// Closer to `center` is better.
    Euclidean { center: Vector<T> },
    /// Farther from `center` is better.
    AntiEuclidean { center: Vector<T> },
    Indifference,
}

impl<T> PreferenceClass<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            PreferenceClass::Linear { .. } => "linear",
            PreferenceClass::Euclidean { .. } => "euclidean",
            PreferenceClass::AntiEuclidean { .. } => "anti_euclidean",
            PreferenceClass::Indifference => "indifference",
        }
    }
}

impl<T: Scalar> SphericalParams<T> {
    pub fn new(c: T, d: Vector<T>) -> Self {
        SphericalParams { c, d }
    }

    pub fn from_f64s(c: f64, d: &[f64]) -> Result<Self> {
        let c = T::from_f64(c).ok_or_else(|| Error::InvalidArgument("non-finite c".into()))?;
        Ok(SphericalParams { c, d: Vector::from_f64s(d)? })
    }

    /// Total indifference in dimension `n`.
    pub fn indifference(n: usize) -> Self {
        SphericalParams { c: T::zero(), d: Vector::zeros(n) }
    }

    /// Euclidean preference with ideal point `center`, i.e. `−‖x − center‖²`
    /// up to a constant.
    pub fn euclidean(center: &Vector<T>) -> Self {
        SphericalParams { c: -T::one(), d: center.scale(&T::two()) }
    }

    /// Anti-Euclidean preference with worst point `center`.
    pub fn anti_euclidean(center: &Vector<T>) -> Self {
        SphericalParams { c: T::one(), d: center.scale(&-T::two()) }
    }

    pub fn linear(u: Vector<T>) -> Self {
        SphericalParams { c: T::zero(), d: u }
    }

    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.d.is_zero()
    }

    /// The entries `(c, d₁, …, dₙ)` as one list.
    pub fn as_entries(&self) -> Vec<T> {
        std::iter::once(self.c.clone()).chain(self.d.iter().cloned()).collect()
    }

    pub fn from_entries(entries: &[T]) -> Result<Self> {
        let (c, d) = entries.split_first().ok_or(Error::EmptyVector)?;
        Ok(SphericalParams { c: c.clone(), d: Vector::new(d.to_vec())? })
    }

    pub fn scaled(&self, k: &T) -> Self {
        SphericalParams { c: self.c.clone() * k.clone(), d: self.d.scale(k) }
    }

    pub fn reversed(&self) -> Self {
        SphericalParams { c: -self.c.clone(), d: -&self.d }
    }

    pub fn to_f64(&self) -> SphericalParams<f64> {
        SphericalParams { c: self.c.to_f64(), d: self.d.to_f64() }
    }

    pub(crate) fn utility_unchecked(&self, x: &Vector<T>) -> T {
        self.c.clone() * x.sq_norm_unchecked() + self.d.dot_unchecked(x)
    }

    /// `c·(x·x) + d·x`.
    pub fn utility(&self, x: &Vector<T>) -> Result<T> {
        check_dims(self.dim(), x.dim())?;
        Ok(self.utility_unchecked(x))
    }

    /// Ranks `x` against `y` with the default tie tolerance.
    pub fn compare(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Comparison> {
        self.compare_with_tolerance(x, y, TIE_TOLERANCE)
    }

    /// Ranks `x` against `y`; in float mode utilities within
    /// `rel·(1 + |u(x)| + |u(y)|)` are indifferent.
    pub fn compare_with_tolerance(&self, x: &Vector<T>, y: &Vector<T>, rel: f64) -> Result<Comparison> {
        let ux = self.utility(x)?;
        let uy = self.utility(y)?;
        Ok(compare_values(&ux, &uy, rel))
    }

    pub fn classify(&self) -> PreferenceClass<T> {
        if self.c.is_zero() {
            if self.d.is_zero() {
                PreferenceClass::Indifference
            } else {
                PreferenceClass::Linear { u: self.d.clone() }
            }
        } else {
            let center = self.center().expect("c is nonzero");
            if self.c.is_negative() {
                PreferenceClass::Euclidean { center }
            } else {
                PreferenceClass::AntiEuclidean { center }
            }
        }
    }

    /// The ideal (or worst) point `−d / (2c)`, when `c ≠ 0`.
    pub fn center(&self) -> Option<Vector<T>> {
        if self.c.is_zero() {
            return None;
        }
        let k = -T::one() / (T::two() * self.c.clone());
        Some(self.d.scale(&k))
    }

    /// Positive rescaling to canonical form: unit Euclidean norm in float
    /// mode, unit max-abs entry in exact mode.
    pub fn canonicalize(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroParameters);
        }
        let divisor = T::canonical_divisor(&self.as_entries());
        Ok(self.scaled(&(T::one() / divisor)))
    }

    /// `2c·w + d`: on any sphere centred at `w`, two points are indifferent
    /// iff their inner products with this vector agree.
    pub fn sphere_normal(&self, w: &Vector<T>) -> Result<Vector<T>> {
        check_dims(self.dim(), w.dim())?;
        Ok(self.d.axpy(&(T::two() * self.c.clone()), w))
    }
}

/// Geodesic distance on the unit sphere between the float-canonicalized
/// parameter vectors. Zero iff the preferences coincide; `π` for reversed
/// preferences.
pub fn preference_distance<T: Scalar>(p1: &SphericalParams<T>, p2: &SphericalParams<T>) -> Result<f64> {
    check_dims(p1.dim(), p2.dim())?;
    let a = p1.to_f64().canonicalize()?.as_entries();
    let b = p2.to_f64().canonicalize()?.as_entries();
    let cos: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let angle = cos.clamp(-1.0, 1.0).acos();
    Ok(angle.clamp(0.0, PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn qv(v: &[i64]) -> Vector<Rational> {
        Vector::from_i64s(v).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn qp(c: i64, d: &[i64]) -> SphericalParams<Rational> {
        SphericalParams::new(q(c), qv(d))
    }

    #[test]
    fn utility_examples() {
        assert_eq!(qp(-1, &[0, 0, 0]).utility(&qv(&[1, 1, 1])).unwrap(), q(-3));
        assert_eq!(qp(0, &[1, 2, 3]).utility(&qv(&[1, 1, 1])).unwrap(), q(6));
        assert_eq!(qp(-1, &[2, 0, 0]).utility(&qv(&[1, 0, 0])).unwrap(), q(1));
        assert!(qp(0, &[1, 2]).utility(&qv(&[1, 1, 1])).is_err());
    }

    #[test]
    fn compare_examples() {
        let origin = qv(&[0, 0, 0]);
        let (x, y) = (qv(&[1, 0, 0]), qv(&[2, 0, 0]));
        let euclid = SphericalParams::euclidean(&origin);
        assert_eq!(euclid.compare(&x, &y).unwrap(), Comparison::Better);
        let anti = SphericalParams::anti_euclidean(&origin);
        assert_eq!(anti.compare(&x, &y).unwrap(), Comparison::Worse);
        let lin = qp(0, &[1, 0, 0]);
        assert_eq!(lin.compare(&qv(&[5, 9, -2]), &qv(&[5, -4, 7])).unwrap(), Comparison::Indifferent);
    }

    #[test]
    fn float_ties_are_relative() {
        let p = SphericalParams::<f64>::from_f64s(0.0, &[1.0, 0.0]).unwrap();
        let x = Vector::from_f64s(&[1e6, 0.0]).unwrap();
        let y = Vector::from_f64s(&[1e6 + 1e-5, 0.0]).unwrap();
        assert_eq!(p.compare(&x, &y).unwrap(), Comparison::Indifferent);
        let y = Vector::from_f64s(&[1e6 + 1.0, 0.0]).unwrap();
        assert_eq!(p.compare(&x, &y).unwrap(), Comparison::Worse);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(qp(0, &[1, 0, 0]).classify(), PreferenceClass::Linear { u: qv(&[1, 0, 0]) });
        assert_eq!(
            qp(1, &[0, 0, 0]).classify(),
            PreferenceClass::AntiEuclidean { center: qv(&[0, 0, 0]) }
        );
        assert_eq!(qp(-1, &[2, 0, 0]).classify(), PreferenceClass::Euclidean { center: qv(&[1, 0, 0]) });
        assert_eq!(qp(0, &[0, 0, 0]).classify(), PreferenceClass::Indifference);
    }

    #[test]
    fn euclidean_center_maximizes_utility_on_grid() {
        // Oracle for the classify example: grid search over [-3, 3]^3 in
        // quarter steps.
        let p = qp(-1, &[2, 0, 0]);
        let mut best: Option<(Rational, Vector<Rational>)> = None;
        let steps: Vec<Rational> = (-12..=12).map(|k| Rational::from_ratio(k, 4)).collect();
        for a in &steps {
            for b in &steps {
                for c in &steps {
                    let x = Vector::new(vec![a.clone(), b.clone(), c.clone()]).unwrap();
                    let u = p.utility(&x).unwrap();
                    if best.as_ref().is_none_or(|(bu, _)| u > *bu) {
                        best = Some((u, x));
                    }
                }
            }
        }
        assert_eq!(best.unwrap().1, qv(&[1, 0, 0]));
    }

    #[test]
    fn canonicalize_examples() {
        let f = SphericalParams::<f64>::from_f64s(-2.0, &[4.0, 0.0, 0.0]).unwrap().canonicalize().unwrap();
        let r = 20f64.sqrt();
        assert!((f.c + 2.0 / r).abs() < 1e-15);
        assert!((f.d[0] - 4.0 / r).abs() < 1e-15);

        assert_eq!(qp(0, &[0, 3, 0]).canonicalize().unwrap(), qp(0, &[0, 1, 0]));
        assert_eq!(qp(3, &[0, 0, 0]).canonicalize().unwrap(), qp(1, &[0, 0, 0]));
        assert_eq!(qp(0, &[0, 0, 0]).canonicalize().unwrap_err(), Error::ZeroParameters);
    }

    #[test]
    fn sphere_normal_examples() {
        let w = qv(&[3, -1, 2]);
        assert_eq!(qp(0, &[1, 2, 3]).sphere_normal(&w).unwrap(), qv(&[1, 2, 3]));
        let center = qv(&[1, 2, 3]);
        assert_eq!(SphericalParams::euclidean(&center).sphere_normal(&center).unwrap(), qv(&[0, 0, 0]));
        assert_eq!(qp(-1, &[2, 0, 0]).sphere_normal(&qv(&[0, 1, 0])).unwrap(), qv(&[2, -2, 0]));
    }

    #[test]
    fn sphere_normal_decides_indifference_on_sampled_spheres() {
        use rand::{Rng, SeedableRng};
        let p = SphericalParams::<f64>::from_f64s(-1.0, &[2.0, 0.0, 0.0]).unwrap();
        let w = Vector::from_f64s(&[0.0, 1.0, 0.0]).unwrap();
        let normal = p.sphere_normal(&w).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = Vector::from_f64s(&s).unwrap();
            // u(w + s) - u(w) is linear in s on the sphere |s| = r.
            let x = &w + &s;
            let lhs = p.utility(&x).unwrap() - p.utility(&w).unwrap() - p.c * crate::geometry::sq_norm(&s);
            let rhs = normal.dot_unchecked(&s);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_examples() {
        let a = qp(0, &[1, 0, 0]);
        assert!(preference_distance(&a, &a).unwrap().abs() < 1e-7);
        assert!((preference_distance(&a, &qp(0, &[-1, 0, 0])).unwrap() - PI).abs() < 1e-12);
        assert!((preference_distance(&qp(1, &[0, 0, 0]), &a).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(preference_distance(&a, &qp(0, &[0, 0, 0])).is_err());
    }

    fn params_strategy() -> impl Strategy<Value = SphericalParams<Rational>> {
        (-8i64..=8, proptest::collection::vec(-8i64..=8, 3))
            .prop_filter("nonzero", |(c, d)| *c != 0 || d.iter().any(|&v| v != 0))
            .prop_map(|(c, d)| qp(c, &d))
    }

    fn point() -> impl Strategy<Value = Vector<Rational>> {
        proptest::collection::vec((-20i64..=20, 1i64..=4), 3)
            .prop_map(|c| Vector::new(c.into_iter().map(|(n, d)| Rational::from_ratio(n, d)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn positive_scaling_preserves_comparisons(p in params_strategy(), x in point(), y in point(), k in 1i64..50) {
            let scaled = p.scaled(&Rational::from_ratio(k, 7));
            prop_assert_eq!(scaled.compare(&x, &y).unwrap(), p.compare(&x, &y).unwrap());
        }

        #[test]
        fn negation_reverses(p in params_strategy(), x in point(), y in point()) {
            prop_assert_eq!(p.reversed().compare(&x, &y).unwrap(), p.compare(&x, &y).unwrap().reverse());
        }

        #[test]
        fn canonicalization_keeps_class_and_order(p in params_strategy(), x in point(), y in point()) {
            let canon = p.canonicalize().unwrap();
            prop_assert_eq!(canon.classify().tag(), p.classify().tag());
            prop_assert_eq!(canon.compare(&x, &y).unwrap(), p.compare(&x, &y).unwrap());
            prop_assert_eq!(Rational::canonical_divisor(&canon.as_entries()), Rational::from_i64(1));
        }

        #[test]
        fn euclidean_classes_rank_by_distance(p in params_strategy(), x in point(), y in point()) {
            let dist = |center: &Vector<Rational>, v: &Vector<Rational>| crate::geometry::sq_norm(&(v - center));
            match p.classify() {
                PreferenceClass::Euclidean { center } => {
                    let expected = compare_values(&dist(&center, &y), &dist(&center, &x), 0.0);
                    prop_assert_eq!(p.compare(&x, &y).unwrap(), expected);
                }
                PreferenceClass::AntiEuclidean { center } => {
                    let expected = compare_values(&dist(&center, &x), &dist(&center, &y), 0.0);
                    prop_assert_eq!(p.compare(&x, &y).unwrap(), expected);
                }
                _ => {}
            }
        }
    }
}
