//! Seeded random inputs shared by the checkers and the dataset generator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vector;
use crate::preference::SphericalParams;
use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform scalar in `[-radius, radius]`, mapped into the arithmetic mode.
pub fn random_scalar<T: Scalar>(rng: &mut SeededRng, radius: f64) -> T {
    T::from_sample(rng.random_range(-radius..=radius))
}

/// Uniform point of the box `[-radius, radius]ⁿ`.
pub fn random_vector<T: Scalar>(rng: &mut SeededRng, n: usize, radius: f64) -> Vector<T> {
    Vector::new((0..n).map(|_| random_scalar(rng, radius)).collect()).expect("n >= 1")
}

/// Scale factor in `(0, max]`.
pub fn random_positive<T: Scalar>(rng: &mut SeededRng, max: f64) -> T {
    let v: T = T::from_sample(rng.random_range(0.0..max));
    if v.is_positive() {
        v
    } else {
        T::from_sample(1.0 / 64.0)
    }
}

/// A vector with the same norm as `x`.
///
/// Exact mode permutes coordinates and flips signs, which preserves the norm
/// exactly. Float mode applies a chain of random Givens rotations.
pub fn random_equal_norm<T: Scalar>(rng: &mut SeededRng, x: &Vector<T>) -> Vector<T> {
    let n = x.dim();
    let mut coords = x.coords().to_vec();
    if T::EXACT {
        coords.shuffle(rng);
        for v in coords.iter_mut() {
            if rng.random_bool(0.5) {
                *v = -v.clone();
            }
        }
    } else if n >= 2 {
        let mut f: Vec<f64> = coords.iter().map(Scalar::to_f64).collect();
        for _ in 0..2 * n {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = theta.sin_cos();
            let (a, b) = (f[i], f[j]);
            f[i] = c * a - s * b;
            f[j] = s * a + c * b;
        }
        coords = f.into_iter().map(T::from_sample).collect();
    } else if rng.random_bool(0.5) {
        coords[0] = -coords[0].clone();
    }
    Vector::new(coords).expect("n >= 1")
}

/// Random nonzero parameters brought to canonical form.
pub fn random_canonical_params<T: Scalar>(rng: &mut SeededRng, n: usize) -> SphericalParams<T> {
    loop {
        let c: T = random_scalar(rng, 1.0);
        let d = random_vector(rng, n, 1.0);
        let p = SphericalParams::new(c, d);
        if let Ok(canon) = p.canonicalize() {
            return canon;
        }
    }
}
