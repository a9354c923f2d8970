//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use spherical::axioms::{antipodal_indifference, check_homotheticity, check_oioi, check_perp_diff, check_soioi, CheckOptions};
use spherical::cardinal::{
    additivity_residual, decompose, parallelogram_residual, Builtin, QuadraticUtility, UtilityOracle,
};
use spherical::rationalize::{
    certificate_lp, generate_dataset, rationalize, rationalize_restricted, verify_certificate, verify_witness,
};
use spherical::sampling::{random_canonical_params, random_scalar, random_vector, rng_from_seed, SeededRng};
use spherical::scalar::Zero;
use spherical::{Comparison, ObservationSet, Rational, Restriction, Scalar, SphericalParams, Vector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn necessity<T: Scalar>(seed_base: u64) -> (usize, usize) {
    let dims = [3usize, 4, 5, 6];
    let results: Vec<usize> = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let n = dims[(k % 4) as usize];
            let p: SphericalParams<T> = random_canonical_params(&mut rng_from_seed(seed_base + k), n);
            let opts = CheckOptions::new(1000, seed_base + k);
            let reports = [
                check_oioi(&p, &opts).unwrap(),
                check_perp_diff(&p, &opts).unwrap(),
                check_soioi(&p, &opts).unwrap(),
                check_homotheticity(&p, &opts).unwrap(),
            ];
            reports.iter().map(|r| r.violations).sum()
        })
        .collect();
    (results.len(), results.iter().sum())
}

fn criterion_1() -> Outcome {
    let (exact_params, exact_violations) = necessity::<Rational>(1_000);
    let (float_params, float_violations) = necessity::<f64>(2_000);
    outcome(
        exact_violations == 0 && float_violations == 0,
        format!(
            "{exact_params} exact and {float_params} float parameter sets, 4 axioms x 1000 trials; violations exact={exact_violations} float={float_violations}"
        ),
    )
}

/// Reverses one strict pair in place, or appends a strict 3-cycle.
fn corrupt(data: &ObservationSet<Rational>, rng: &mut SeededRng, k: u64) -> ObservationSet<Rational> {
    let n = data.dim();
    let mut out = ObservationSet::new(n).unwrap();
    let flip = if k.is_multiple_of(2) && !data.strict().is_empty() {
        Some((k as usize / 2) % data.strict().len())
    } else {
        None
    };
    for p in data.weak() {
        out.add_weak(p.better.clone(), p.worse.clone()).unwrap();
    }
    for (i, p) in data.strict().iter().enumerate() {
        if Some(i) == flip {
            out.add_strict(p.worse.clone(), p.better.clone()).unwrap();
        } else {
            out.add_strict(p.better.clone(), p.worse.clone()).unwrap();
        }
    }
    if flip.is_none() {
        let pts: Vec<Vector<Rational>> = (0..3).map(|_| random_vector(rng, n, 5.0)).collect();
        for i in 0..3 {
            out.add_strict(pts[i].clone(), pts[(i + 1) % 3].clone()).unwrap();
        }
    }
    out
}

struct AgreementRun {
    agree: bool,
    rationalizable: bool,
    valid: bool,
}

fn agreement_run(k: u64) -> AgreementRun {
    let mut rng = rng_from_seed(30_000 + k);
    let n = 3 + (k % 3) as usize;
    let p: SphericalParams<Rational> = random_canonical_params(&mut rng, n);
    let mut data = generate_dataset(&p, 25, 40_000 + k, 5.0).unwrap();
    if k >= 250 {
        data = corrupt(&data, &mut rng, k);
    }
    let verdict = rationalize(&data).unwrap();
    let (pmass, cert) = certificate_lp(&data).unwrap();
    let agree = verdict.rationalizable == pmass.is_zero();
    let valid = match (&verdict.witness, &verdict.certificate) {
        (Some(w), None) => verify_witness(&data, w).unwrap(),
        (None, Some(c)) => verify_certificate(&data, c, None),
        _ => false,
    } && cert.as_ref().is_none_or(|c| verify_certificate(&data, c, None));
    AgreementRun { agree, rationalizable: verdict.rationalizable, valid }
}

fn criteria_2_and_3() -> (Outcome, Outcome) {
    let runs: Vec<AgreementRun> = (0..500u64).into_par_iter().map(agreement_run).collect();
    let agree = runs.iter().filter(|r| r.agree).count();
    let yes = runs.iter().filter(|r| r.rationalizable).count();
    let valid = runs.iter().filter(|r| r.valid).count();
    let generated_ok = runs[..250].iter().all(|r| r.rationalizable);
    (
        outcome(
            agree == runs.len() && generated_ok,
            format!("{agree}/{} verdicts agree with the certificate program ({yes} rationalizable)", runs.len()),
        ),
        outcome(valid == runs.len(), format!("{valid}/{} witnesses and certificates verified exactly", runs.len())),
    )
}

fn criterion_4() -> Outcome {
    let q = |v: [i64; 3]| Vector::<Rational>::from_i64s(&v).unwrap();
    let mut data = ObservationSet::new(3).unwrap();
    for v in [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]] {
        data.add_strict(q([0, 0, 0]), q(v)).unwrap();
    }
    let free = rationalize(&data).unwrap();
    let linear = rationalize_restricted(&data, Restriction::Linear).unwrap();
    let euclid = rationalize_restricted(&data, Restriction::Euclidean).unwrap();
    let center_ok = euclid
        .witness
        .as_ref()
        .and_then(SphericalParams::center)
        .is_some_and(|c| c[0].is_zero() && c[1].is_zero());
    let linear_cert_ok = linear
        .certificate
        .as_ref()
        .is_some_and(|c| verify_certificate(&data, c, Some(Restriction::Linear)));
    outcome(
        free.rationalizable && !linear.rationalizable && linear_cert_ok && euclid.rationalizable && center_ok,
        format!(
            "unrestricted={} linear={} euclidean={} (center on the bliss axis: {center_ok})",
            free.rationalizable, linear.rationalizable, euclid.rationalizable
        ),
    )
}

#[allow(clippy::needless_range_loop)]
fn random_symmetric<T: Scalar>(rng: &mut SeededRng, n: usize) -> Vec<Vec<T>> {
    let mut a = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v: T = random_scalar(rng, 3.0);
            a[i][j] = v.clone();
            a[j][i] = v;
        }
    }
    a
}

fn max_entry_gap<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x.to_f64() - y.to_f64()).abs()))
        .fold(0.0, f64::max)
}

fn criterion_5() -> Outcome {
    let float_worst = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(50_000 + k);
            let n = 1 + (k % 6) as usize;
            let a: Vec<Vec<f64>> = random_symmetric(&mut rng, n);
            let b: Vector<f64> = random_vector(&mut rng, n, 3.0);
            let u = QuadraticUtility::new(a.clone(), b.clone()).unwrap();
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let z: Vector<f64> = random_vector(&mut rng, n, 5.0);
                let dec = decompose(&u, &[z]).unwrap();
                worst = worst.max(max_entry_gap(&dec.s, &a));
                let g_gap = dec.g.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                worst = worst.max(g_gap);
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let exact_ok = (0..100u64).into_par_iter().all(|k| {
        let mut rng = rng_from_seed(60_000 + k);
        let n = 1 + (k % 6) as usize;
        let a: Vec<Vec<Rational>> = random_symmetric(&mut rng, n);
        let b: Vector<Rational> = random_vector(&mut rng, n, 3.0);
        let u = QuadraticUtility::new(a.clone(), b.clone()).unwrap();
        (0..10).all(|_| {
            let z: Vector<Rational> = random_vector(&mut rng, n, 5.0);
            let dec = decompose(&u, &[z]).unwrap();
            dec.s == a && dec.g == b && dec.residual.is_zero()
        })
    });
    let cubic_rejected = [Builtin::Cubic1 { dim: 3 }, Builtin::Cube { dim: 3 }].iter().all(|o| {
        let z = Vector::zeros(3);
        decompose::<Rational, _>(o, std::slice::from_ref(&z)).is_err() && decompose::<f64, _>(o, &[Vector::zeros(3)]).is_err()
    });
    outcome(
        float_worst <= 1e-9 && exact_ok && cubic_rejected,
        format!(
            "float max deviation {float_worst:.2e} over 100 oracles x 10 probes; exact recovery {exact_ok}; cubic rejected {cubic_rejected}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let worst = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(70_000 + k);
            let n = 1 + (k % 6) as usize;
            let u = QuadraticUtility::new(random_symmetric::<f64>(&mut rng, n), random_vector(&mut rng, n, 3.0)).unwrap();
            let mut worst = 0.0f64;
            for _ in 0..1000 {
                let x: Vector<f64> = random_vector(&mut rng, n, 10.0);
                let y: Vector<f64> = random_vector(&mut rng, n, 10.0);
                let z: Vector<f64> = random_vector(&mut rng, n, 10.0);
                let scale = 1.0 + [&x, &y, &(&x + &y), &(&x - &y)].iter().map(|v| u.eval(v).abs()).fold(0.0, f64::max);
                let p = parallelogram_residual(&u, &x, &y, &z).unwrap().abs() / scale;
                let a = additivity_residual(&u, &x, &y, &z).unwrap().abs() / scale;
                worst = worst.max(p).max(a);
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 1e-9, format!("max relative residual {worst:.2e} over 20 oracles x 1000 pairs"))
}

fn orthonormal_pair(rng: &mut SeededRng, n: usize) -> (Vector<f64>, Vector<f64>) {
    loop {
        let a: Vector<f64> = random_vector(rng, n, 1.0);
        let b: Vector<f64> = random_vector(rng, n, 1.0);
        let na = spherical::sq_norm(&a).sqrt();
        if na < 1e-3 {
            continue;
        }
        let e1 = a.scale(&(1.0 / na));
        let b = spherical::project_out(&b, std::slice::from_ref(&e1)).unwrap();
        let nb = spherical::sq_norm(&b).sqrt();
        if nb < 1e-3 {
            continue;
        }
        return (e1, b.scale(&(1.0 / nb)));
    }
}

fn criterion_7() -> Outcome {
    let mut rng = rng_from_seed(80_000);
    let mut worst_normal = 0.0f64;
    let mut failures = 0;
    for k in 0..100 {
        let n = 3 + k % 4;
        let p: SphericalParams<f64> = random_canonical_params(&mut rng, n);
        let w: Vector<f64> = random_vector(&mut rng, n, 2.0);
        let r = 0.5 + rng_scalar(&mut rng);
        let plane = orthonormal_pair(&mut rng, n);
        match antipodal_indifference(&p, &w, r, (&plane.0, &plane.1)) {
            Ok((x, y)) => {
                if p.compare(&x, &y).unwrap() != Comparison::Indifferent {
                    failures += 1;
                }
                let normal = p.sphere_normal(&w).unwrap();
                worst_normal = worst_normal.max(spherical::dot(&normal, &(&x - &y)).unwrap().abs());
            }
            Err(_) => failures += 1,
        }
    }
    let mut euclid_ties = 0;
    for k in 0..100 {
        let n = 3 + k % 4;
        let center: Vector<f64> = random_vector(&mut rng, n, 3.0);
        let p = SphericalParams::euclidean(&center);
        let radius = 0.5 + 2.0 * rng_scalar(&mut rng);
        let on_sphere = |rng: &mut SeededRng| {
            let v: Vector<f64> = random_vector(rng, n, 1.0);
            let len = spherical::sq_norm(&v).sqrt().max(1e-6);
            &center + &v.scale(&(radius / len))
        };
        let (x, y) = (on_sphere(&mut rng), on_sphere(&mut rng));
        if p.compare(&x, &y).unwrap() == Comparison::Indifferent {
            euclid_ties += 1;
        }
    }
    outcome(
        failures == 0 && worst_normal <= 1e-8 && euclid_ties == 100,
        format!("antipodal failures {failures}/100, max |normal.(x-y)| {worst_normal:.2e}; euclidean sphere ties {euclid_ties}/100"),
    )
}

fn rng_scalar(rng: &mut SeededRng) -> f64 {
    random_scalar::<f64>(rng, 1.0).abs()
}

fn criterion_8() -> Outcome {
    let distinguished = (0..100u64)
        .into_par_iter()
        .filter(|&k| {
            let mut rng = rng_from_seed(90_000 + k);
            let n = 3 + (k % 4) as usize;
            let p: SphericalParams<Rational> = random_canonical_params(&mut rng, n);
            let q: SphericalParams<Rational> = loop {
                let q = random_canonical_params(&mut rng, n);
                if q != p {
                    break q;
                }
            };
            (0..1000).any(|_| {
                let x: Vector<Rational> = random_vector(&mut rng, n, 5.0);
                let y: Vector<Rational> = random_vector(&mut rng, n, 5.0);
                p.compare(&x, &y).unwrap() != q.compare(&x, &y).unwrap()
            })
        })
        .count();
    outcome(distinguished == 100, format!("{distinguished}/100 parameter pairs distinguished within 1000 probes"))
}

fn criterion_9() -> Outcome {
    let exact_ok = (0..100u64)
        .into_par_iter()
        .filter(|&k| {
            let mut rng = rng_from_seed(100_000 + k);
            let n = 3 + (k % 3) as usize;
            let p: SphericalParams<Rational> = random_canonical_params(&mut rng, n);
            let data = generate_dataset(&p, 200, 110_000 + k, 5.0).unwrap();
            let verdict = rationalize(&data).unwrap();
            verdict.rationalizable && verify_witness(&data, verdict.witness.as_ref().unwrap()).unwrap()
        })
        .count();
    let results: Vec<(bool, f64)> = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(120_000 + k);
            let n = 3 + (k % 3) as usize;
            let p: SphericalParams<f64> = random_canonical_params(&mut rng, n);
            let data = generate_dataset(&p, 2000, 130_000 + k, 5.0).unwrap();
            let verdict = rationalize(&data).unwrap();
            let Some(w) = verdict.witness.filter(|_| verdict.rationalizable) else {
                return (false, 0.0);
            };
            let mut agree = 0;
            let mut seen = 0;
            while seen < 1000 {
                let x: Vector<f64> = random_vector(&mut rng, n, 5.0);
                let y: Vector<f64> = random_vector(&mut rng, n, 5.0);
                let truth = p.compare(&x, &y).unwrap();
                if truth == Comparison::Indifferent {
                    continue;
                }
                seen += 1;
                if w.compare(&x, &y).unwrap() == truth {
                    agree += 1;
                }
            }
            (true, agree as f64 / 1000.0)
        })
        .collect();
    let float_ok = results.iter().filter(|r| r.0).count();
    let worst = results.iter().map(|r| r.1).fold(1.0, f64::min);
    let mean = results.iter().map(|r| r.1).sum::<f64>() / results.len() as f64;
    outcome(
        exact_ok == 100 && float_ok == 100 && worst >= 0.99,
        format!("exact round trips {exact_ok}/100, float round trips {float_ok}/100; holdout agreement worst {worst:.3}, mean {mean:.4}"),
    )
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut report = |id: &str, name: &str, o: Outcome, t: Duration| {
        all_pass &= o.pass;
        println!("criterion {id} {name}: {} ({:.1}s) {}", if o.pass { "PASS" } else { "FAIL" }, t.as_secs_f64(), o.detail);
    };

    let t = Instant::now();
    report("1", "necessity suite", criterion_1(), t.elapsed());
    let t = Instant::now();
    let (c2, c3) = criteria_2_and_3();
    let elapsed = t.elapsed();
    report("2", "primal/dual agreement", c2, elapsed);
    report("3", "certificate and witness validity", c3, elapsed);
    let t = Instant::now();
    report("4", "subclass restrictions", criterion_4(), t.elapsed());
    let t = Instant::now();
    report("5", "cardinal decomposition", criterion_5(), t.elapsed());
    let t = Instant::now();
    report("6", "parallelogram and additivity residuals", criterion_6(), t.elapsed());
    let t = Instant::now();
    report("7", "geometry of indifference", criterion_7(), t.elapsed());
    let t = Instant::now();
    report("8", "injectivity probe", criterion_8(), t.elapsed());
    let t = Instant::now();
    report("9", "round trip", criterion_9(), t.elapsed());

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
