//! Finite-data rationalizability by spherical preferences.
//!
//! Data `(R, P)` is rationalizable iff some `(c, u)` satisfies
//! `c(x·x − y·y) + u·(x − y) ≥ 0` on `R` and `> 0` on `P`. The primal test
//! maximizes a margin `ε` over the box `[-1, 1]` for `(c, u)`, which is
//! enough because the system is positively homogeneous. When no positive
//! margin exists, a simplex weighting of the observations with positive mass
//! on `P` annihilates every constraint column.

use std::fmt;

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{check_dims, Vector};
use crate::lp::{self, Bounds, LinearProgram, LpOutcome, Relation};
use crate::preference::{Comparison, SphericalParams};
use crate::sampling::{random_vector, rng_from_seed};
use crate::scalar::{Scalar, TIE_TOLERANCE};

/// `better` is weakly (in `R`) or strictly (in `P`) preferred to `worse`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair<T> {
    pub better: Vector<T>,
    pub worse: Vector<T>,
}

impl<T: Scalar> Pair<T> {
    /// Coefficients of `(c, u₁..uₙ)` in `U(better) − U(worse)`.
    pub fn row(&self) -> Vec<T> {
        let x = &self.better;
        let y = &self.worse;
        let mut row = Vec::with_capacity(x.dim() + 1);
        row.push(x.sq_norm_unchecked() - y.sq_norm_unchecked());
        row.extend(x.iter().zip(y.iter()).map(|(a, b)| a.clone() - b.clone()));
        row
    }
}

/// Weak (`R`) and strict (`P`) comparisons in a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSet<T> {
    dim: usize,
    weak: Vec<Pair<T>>,
    strict: Vec<Pair<T>>,
}

impl<T: Scalar> ObservationSet<T> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(ObservationSet { dim, weak: Vec::new(), strict: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weak(&self) -> &[Pair<T>] {
        &self.weak
    }

    pub fn strict(&self) -> &[Pair<T>] {
        &self.strict
    }

    pub fn len(&self) -> usize {
        self.weak.len() + self.strict.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn pair(&self, better: Vector<T>, worse: Vector<T>) -> Result<Pair<T>> {
        check_dims(self.dim, better.dim())?;
        check_dims(self.dim, worse.dim())?;
        Ok(Pair { better, worse })
    }

    pub fn add_weak(&mut self, better: Vector<T>, worse: Vector<T>) -> Result<&mut Self> {
        let p = self.pair(better, worse)?;
        self.weak.push(p);
        Ok(self)
    }

    pub fn add_strict(&mut self, better: Vector<T>, worse: Vector<T>) -> Result<&mut Self> {
        let p = self.pair(better, worse)?;
        self.strict.push(p);
        Ok(self)
    }

    /// Records indifference as two weak pairs.
    pub fn add_indifferent(&mut self, a: Vector<T>, b: Vector<T>) -> Result<&mut Self> {
        self.add_weak(a.clone(), b.clone())?;
        self.add_weak(b, a)
    }

    /// Parses `{"dimension": n, "weak": [{"better": [...], "worse": [...]}], "strict": [...]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v
            .get("dimension")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("dataset needs an integer \"dimension\"".into()))?;
        let mut data = ObservationSet::new(dim as usize)?;
        for (key, strict) in [("weak", false), ("strict", true)] {
            let Some(list) = v.get(key) else { continue };
            let list = list.as_array().ok_or_else(|| Error::Parse(format!("\"{key}\" must be a list")))?;
            for (i, entry) in list.iter().enumerate() {
                let side = |name: &str| -> Result<Vector<T>> {
                    let raw = entry
                        .get(name)
                        .ok_or_else(|| Error::Parse(format!("{key}[{i}] is missing \"{name}\"")))?;
                    Vector::from_json(raw)
                };
                let (better, worse) = (side("better")?, side("worse")?);
                if strict {
                    data.add_strict(better, worse)?;
                } else {
                    data.add_weak(better, worse)?;
                }
            }
        }
        Ok(data)
    }
}

impl<T: Scalar> Serialize for Pair<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Pair", 2)?;
        st.serialize_field("better", &self.better)?;
        st.serialize_field("worse", &self.worse)?;
        st.end()
    }
}

impl<T: Scalar> Serialize for ObservationSet<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ObservationSet", 3)?;
        st.serialize_field("dimension", &self.dim)?;
        st.serialize_field("weak", &self.weak)?;
        st.serialize_field("strict", &self.strict)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// `c = 0`.
    Linear,
    /// `c < 0`.
    Euclidean,
    /// `c > 0`.
    AntiEuclidean,
}

impl Restriction {
    pub fn name(self) -> &'static str {
        match self {
            Restriction::Linear => "linear",
            Restriction::Euclidean => "euclidean",
            Restriction::AntiEuclidean => "anti-euclidean",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "linear" => Ok(Restriction::Linear),
            "euclidean" => Ok(Restriction::Euclidean),
            "anti-euclidean" | "anti_euclidean" => Ok(Restriction::AntiEuclidean),
            _ => Err(Error::InvalidArgument(format!("unknown restriction {name:?}"))),
        }
    }

    /// Coefficient of `c` in the extra strict row `±c > 0`.
    fn sign<T: Scalar>(self) -> Option<T> {
        match self {
            Restriction::Linear => None,
            Restriction::Euclidean => Some(-T::one()),
            Restriction::AntiEuclidean => Some(T::one()),
        }
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Simplex weights on the observations (and on the sign restriction, when
/// there is one) that cancel every free coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<T> {
    pub weak: Vec<T>,
    pub strict: Vec<T>,
    /// Weight on the strict row `±c > 0` of a signed restriction.
    pub restriction: Option<T>,
    pub pmass: T,
}

impl<T: Scalar> Certificate<T> {
    /// Nonzero weights keyed `weak:<i>`, `strict:<i>` and `restriction`.
    pub fn entries(&self) -> Vec<(String, &T)> {
        let weak = self.weak.iter().enumerate().map(|(i, v)| (format!("weak:{i}"), v));
        let strict = self.strict.iter().enumerate().map(|(i, v)| (format!("strict:{i}"), v));
        let restriction = self.restriction.iter().map(|v| ("restriction".to_string(), v));
        weak.chain(strict).chain(restriction).filter(|(_, v)| !v.is_zero()).collect()
    }
}

impl<T: Scalar> Serialize for Certificate<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self.entries();
        let mut map = s.serialize_map(Some(entries.len()))?;
        for (k, v) in entries {
            map.serialize_entry(&k, &v.to_json())?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalizabilityVerdict<T> {
    pub rationalizable: bool,
    /// Present iff rationalizable.
    pub witness: Option<SphericalParams<T>>,
    /// Present iff not rationalizable.
    pub certificate: Option<Certificate<T>>,
    /// Optimal margin of the primal program.
    pub epsilon: T,
    pub restriction: Option<Restriction>,
    pub notes: Vec<String>,
}

impl<T: Scalar> RationalizabilityVerdict<T> {
    pub fn pmass(&self) -> T {
        self.certificate.as_ref().map_or_else(T::zero, |c| c.pmass.clone())
    }
}

impl<T: Scalar> Serialize for RationalizabilityVerdict<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RationalizabilityVerdict", 7)?;
        st.serialize_field("rationalizable", &self.rationalizable)?;
        st.serialize_field("restriction", &self.restriction.map(Restriction::name))?;
        st.serialize_field("epsilon", &self.epsilon.to_json())?;
        st.serialize_field("witness", &self.witness)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.serialize_field("pmass", &self.pmass().to_json())?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalizeOptions {
    pub restriction: Option<Restriction>,
    pub lp: lp::SolveOptions,
}

pub fn rationalize<T: Scalar>(data: &ObservationSet<T>) -> Result<RationalizabilityVerdict<T>> {
    rationalize_with(data, &RationalizeOptions::default())
}

/// Rationalizability within one of the three subclasses.
pub fn rationalize_restricted<T: Scalar>(data: &ObservationSet<T>, restriction: Restriction) -> Result<RationalizabilityVerdict<T>> {
    rationalize_with(data, &RationalizeOptions { restriction: Some(restriction), ..Default::default() })
}

/// The margin program over `(c, u, ε)`: maximize `ε` with weak rows `≥ 0`,
/// strict rows `≥ ε` and box bounds. A signed restriction adds the strict
/// row `±c ≥ ε`; the linear one pins `c` to zero.
pub fn epsilon_lp<T: Scalar>(data: &ObservationSet<T>, restriction: Option<Restriction>) -> LinearProgram<T> {
    let n = data.dim();
    let width = n + 2;
    let mut objective = vec![T::zero(); width];
    objective[n + 1] = T::one();
    let mut lp = LinearProgram::new(objective);
    for j in 0..=n {
        lp.bound(j, Bounds::between(-T::one(), T::one()));
    }
    lp.bound(n + 1, Bounds::between(T::zero(), T::one()));
    let with_margin = |mut row: Vec<T>, margin: bool| {
        row.push(if margin { -T::one() } else { T::zero() });
        row
    };
    for p in &data.weak {
        lp.constrain(with_margin(p.row(), false), Relation::Ge, T::zero());
    }
    for p in &data.strict {
        lp.constrain(with_margin(p.row(), true), Relation::Ge, T::zero());
    }
    match restriction {
        Some(Restriction::Linear) => {
            lp.bound(0, Bounds::between(T::zero(), T::zero()));
        }
        Some(r) => {
            let mut row = vec![T::zero(); width];
            row[0] = r.sign().expect("signed restriction");
            row[n + 1] = -T::one();
            lp.constrain(row, Relation::Ge, T::zero());
        }
        None => {}
    }
    lp
}

pub fn rationalize_with<T: Scalar>(data: &ObservationSet<T>, opts: &RationalizeOptions) -> Result<RationalizabilityVerdict<T>> {
    let n = data.dim();
    let lp = epsilon_lp(data, opts.restriction);
    let sol = match lp::solve_with(&lp, &opts.lp)? {
        LpOutcome::Optimal(sol) => sol,
        other => {
            return Err(Error::Numerical(format!("margin program ended {:?}", other.status())));
        }
    };
    let epsilon = sol.x[n + 1].clone();
    let mut notes = Vec::new();
    if n < 3 {
        notes.push(format!(
            "dimension {n} is below 3; the verdict concerns the spherical family, whose axiomatic characterization needs n >= 3"
        ));
    }
    if epsilon.is_pos() {
        let c = sol.x[0].clone();
        let u = Vector::new(sol.x[1..=n].to_vec())?;
        return Ok(RationalizabilityVerdict {
            rationalizable: true,
            witness: Some(SphericalParams::new(c, u)),
            certificate: None,
            epsilon,
            restriction: opts.restriction,
            notes,
        });
    }
    let certificate = certificate_lp_with(data, opts.restriction, &opts.lp)?;
    if certificate.is_none() {
        notes.push("no certificate with positive strict mass was found".into());
    }
    Ok(RationalizabilityVerdict {
        rationalizable: false,
        witness: None,
        certificate,
        epsilon,
        restriction: opts.restriction,
        notes,
    })
}

/// Maximum strict mass of a simplex weighting of `R ∪ P` whose weighted
/// sums of `x·x − y·y` and of `x − y` all vanish. The data is
/// rationalizable iff the returned mass is zero.
pub fn certificate_lp<T: Scalar>(data: &ObservationSet<T>) -> Result<(T, Option<Certificate<T>>)> {
    let cert = certificate_lp_with(data, None, &lp::SolveOptions::default())?;
    Ok(match cert {
        Some(c) => (c.pmass.clone(), Some(c)),
        None => (T::zero(), None),
    })
}

/// As [`certificate_lp`], relative to a restriction. Returns `None` when
/// the best strict mass is zero.
pub fn certificate_lp_with<T: Scalar>(
    data: &ObservationSet<T>,
    restriction: Option<Restriction>,
    opts: &lp::SolveOptions,
) -> Result<Option<Certificate<T>>> {
    let n = data.dim();
    let mut rows: Vec<Vec<T>> = data.weak.iter().chain(&data.strict).map(Pair::row).collect();
    let signed = restriction.and_then(|r| r.sign::<T>());
    if let Some(sign) = &signed {
        let mut row = vec![T::zero(); n + 1];
        row[0] = sign.clone();
        rows.push(row);
    }
    let first_col = usize::from(restriction == Some(Restriction::Linear));
    let k = rows.len();
    if k == 0 {
        return Ok(None);
    }
    let nw = data.weak.len();
    let objective: Vec<T> = (0..k).map(|i| if i < nw { T::zero() } else { T::one() }).collect();
    let mut lp = LinearProgram::new(objective);
    for i in 0..k {
        lp.bound(i, Bounds::nonnegative());
    }
    lp.constrain(vec![T::one(); k], Relation::Eq, T::one());
    for col in first_col..=n {
        lp.constrain(rows.iter().map(|r| r[col].clone()).collect(), Relation::Eq, T::zero());
    }
    let sol = match lp::solve_with(&lp, opts)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible(_) => return Ok(None),
        LpOutcome::Unbounded => return Err(Error::Numerical("certificate program is unbounded".into())),
    };
    if !sol.objective.is_pos() {
        return Ok(None);
    }
    let mut lambda = sol.x;
    let restriction_weight = signed.map(|_| lambda.pop().expect("restriction weight"));
    let strict = lambda.split_off(nw);
    Ok(Some(Certificate { weak: lambda, strict, restriction: restriction_weight, pmass: sol.objective }))
}

/// Whether `witness` reproduces every weak pair as `≥` and every strict
/// pair as `>`, exactly in exact mode and up to the tie tolerance in float
/// mode.
pub fn verify_witness<T: Scalar>(data: &ObservationSet<T>, witness: &SphericalParams<T>) -> Result<bool> {
    check_dims(data.dim(), witness.dim())?;
    for p in &data.weak {
        if witness.compare(&p.better, &p.worse)? == Comparison::Worse {
            return Ok(false);
        }
    }
    for p in &data.strict {
        let diff = witness.utility_unchecked(&p.better) - witness.utility_unchecked(&p.worse);
        if !diff.is_pos() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks simplex membership, positive strict mass and the vanishing
/// weighted sums, exactly in exact mode.
pub fn verify_certificate<T: Scalar>(data: &ObservationSet<T>, cert: &Certificate<T>, restriction: Option<Restriction>) -> bool {
    let signed = restriction.and_then(|r| r.sign::<T>());
    if cert.weak.len() != data.weak.len()
        || cert.strict.len() != data.strict.len()
        || cert.restriction.is_some() != signed.is_some()
    {
        return false;
    }
    let weights: Vec<&T> = cert.weak.iter().chain(&cert.strict).chain(&cert.restriction).collect();
    if weights.iter().any(|w| w.is_neg()) {
        return false;
    }
    let near = |v: T, scale: f64| v.abs() <= T::from_f64(TIE_TOLERANCE * (1.0 + scale)).unwrap_or_else(T::zero);
    let total = weights.iter().fold(T::zero(), |s, w| s + (*w).clone());
    let pmass = cert.strict.iter().chain(&cert.restriction).fold(T::zero(), |s, w| s + w.clone());
    if !near(total - T::one(), 1.0) || !pmass.is_pos() || !near(pmass - cert.pmass.clone(), 1.0) {
        return false;
    }
    let n = data.dim();
    let mut sums = vec![T::zero(); n + 1];
    let mut scale = 0.0f64;
    for (w, p) in cert.weak.iter().zip(&data.weak).chain(cert.strict.iter().zip(&data.strict)) {
        if w.is_zero() {
            continue;
        }
        for (s, r) in sums.iter_mut().zip(p.row()) {
            scale = scale.max(r.to_f64().abs());
            *s = s.clone() + w.clone() * r;
        }
    }
    if let (Some(w), Some(sign)) = (&cert.restriction, signed) {
        sums[0] = sums[0].clone() + w.clone() * sign;
    }
    let first = usize::from(restriction == Some(Restriction::Linear));
    let exact_zero = |s: &T| if T::EXACT { s.is_zero() } else { near(s.clone(), scale) };
    sums[first..].iter().all(exact_zero)
}

/// Samples `count` pairs from the box `[-radius, radius]ⁿ`, ordered by `p`:
/// strict comparisons go to `P` and ties to `R` in both orientations.
pub fn generate_dataset<T: Scalar>(p: &SphericalParams<T>, count: usize, seed: u64, radius: f64) -> Result<ObservationSet<T>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let n = p.dim();
    let mut rng = rng_from_seed(seed);
    let mut data = ObservationSet::new(n)?;
    for _ in 0..count {
        let x: Vector<T> = random_vector(&mut rng, n, radius);
        let y: Vector<T> = random_vector(&mut rng, n, radius);
        match p.compare(&x, &y)? {
            Comparison::Better => data.add_strict(x, y)?,
            Comparison::Worse => data.add_strict(y, x)?,
            Comparison::Indifferent => data.add_indifferent(x, y)?,
        };
    }
    Ok(data)
}
