//! JSON encoding of vectors, parameters, classes and oracle inputs.
//!
//! Numbers are JSON numbers or `"p/q"` strings. Exact mode writes integers
//! as numbers and other rationals as strings.

use serde::ser::{Serialize, SerializeMap, SerializeSeq, SerializeStruct, Serializer};
use serde_json::Value;

use crate::cardinal::QuadraticUtility;
use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::preference::{PreferenceClass, SphericalParams};
use crate::scalar::Scalar;

impl<T: Scalar> Serialize for Vector<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for v in self.iter() {
            seq.serialize_element(&v.to_json())?;
        }
        seq.end()
    }
}

impl<T: Scalar> Vector<T> {
    pub fn from_json(v: &Value) -> Result<Self> {
        let list = v.as_array().ok_or_else(|| Error::Parse(format!("expected a list of numbers, found {v}")))?;
        Vector::new(list.iter().map(T::from_json).collect::<Result<_>>()?)
    }
}

impl<T: Scalar> Serialize for SphericalParams<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SphericalParams", 2)?;
        st.serialize_field("c", &self.c.to_json())?;
        st.serialize_field("d", &self.d)?;
        st.end()
    }
}

impl<T: Scalar> SphericalParams<T> {
    /// Parses `{"c": .., "d": [..]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let c = v.get("c").ok_or_else(|| Error::Parse("parameters need \"c\"".into()))?;
        let d = v.get("d").ok_or_else(|| Error::Parse("parameters need \"d\"".into()))?;
        Ok(SphericalParams::new(T::from_json(c)?, Vector::from_json(d)?))
    }
}

impl<T: Scalar> Serialize for PreferenceClass<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("class", self.tag())?;
        match self {
            PreferenceClass::Linear { u } => map.serialize_entry("u", u)?,
            PreferenceClass::Euclidean { center } | PreferenceClass::AntiEuclidean { center } => {
                map.serialize_entry("center", center)?
            }
            PreferenceClass::Indifference => {}
        }
        map.end()
    }
}

impl<T: Scalar> QuadraticUtility<T> {
    /// Parses the coefficient form `{"A": [[..]..], "b": [..]}` of
    /// `U(x) = xᵀAx + b·x`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let a = v
            .get("A")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("oracle needs a matrix \"A\"".into()))?;
        let b = v.get("b").ok_or_else(|| Error::Parse("oracle needs a vector \"b\"".into()))?;
        let a = a.iter().map(|row| Vector::<T>::from_json(row).map(Vector::into_coords)).collect::<Result<_>>()?;
        QuadraticUtility::new(a, Vector::from_json(b)?)
    }
}
