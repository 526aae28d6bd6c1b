//! Koszul-complex properties on seeded tuples: the complex identity at
//! random points, agreement of the Taylor spectrum with the oracle, and the
//! last-differential classification against the approximate spectrum.

use num_complex::Complex64;
use rand::Rng;

use jspec_core::fixtures::{self, F4Options};
use jspec_core::koszul::{
    build_complex, last_differential_classify, taylor_spectrum, LastDifferentialVerdict,
};
use jspec_core::linalg::{candidate_points, joint_eigenvalues, CommutingTuple, ToleranceConfig};
use jspec_core::rng::{stream_rng, Stream};
use jspec_core::spectra::approximate_membership;

const SEED: u64 = 77;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn random_lambda(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
        .collect()
}

#[test]
fn complex_property_at_random_points() {
    let mut rng = stream_rng(SEED, Stream::Probe, 10);
    for index in 0..4 {
        let n = 2 + (index as usize % 2);
        let tuple = fixtures::f4(SEED, index, &F4Options::new(n, 4)).unwrap();
        for _ in 0..50 {
            let lambda = random_lambda(n, &mut rng);
            let complex = build_complex(&tuple, &lambda).unwrap();
            assert!(
                complex.complex_residual() <= 1e-10,
                "complex property failed at a random point"
            );
        }
    }
}

#[test]
fn taylor_spectrum_agrees_with_oracle_on_random_tuples() {
    let cfg = cfg();
    for index in 0..6 {
        let n = 2 + (index as usize % 2);
        let d = 2 + (index as usize % 4);
        let tuple = fixtures::f4(SEED, 100 + index, &F4Options::new(n, d)).unwrap();
        let taylor = taylor_spectrum(&tuple, &cfg).unwrap();
        let oracle = joint_eigenvalues(&tuple, &cfg, SEED).unwrap();
        assert!(
            taylor.hausdorff(&oracle) < 1e-7,
            "Taylor spectrum drifted from the oracle: {:.3e}",
            taylor.hausdorff(&oracle)
        );
    }
}

/// Classification of the last differential must match approximate-spectrum
/// membership point for point: candidates, perturbed candidates, and far
/// random probes.
fn classification_matches_membership(tuple: &CommutingTuple, samples: usize, stream_index: u64) {
    let cfg = cfg();
    let mut rng = stream_rng(SEED, Stream::Probe, stream_index);
    let candidates = candidate_points(tuple, &cfg).unwrap();
    let mut disagreements = 0usize;
    let mut checked = 0usize;
    while checked < samples {
        let lambda: Vec<Complex64> = match checked % 3 {
            0 => {
                let p = &candidates.points()[checked / 3 % candidates.len()];
                p.clone()
            }
            1 => {
                let p = &candidates.points()[checked / 3 % candidates.len()];
                p.iter()
                    .map(|z| {
                        z + Complex64::new(
                            rng.random_range(-1e-3..1e-3),
                            rng.random_range(-1e-3..1e-3),
                        )
                    })
                    .collect()
            }
            _ => random_lambda(tuple.n(), &mut rng),
        };
        let verdict = last_differential_classify(tuple, &lambda, &cfg).unwrap();
        let member = approximate_membership(tuple, &lambda, &cfg).unwrap().member;
        let injective = verdict == LastDifferentialVerdict::InjectiveClosedRange;
        if member == injective {
            disagreements += 1;
        }
        checked += 1;
    }
    assert_eq!(
        disagreements, 0,
        "classification disagreed with membership {disagreements}/{samples} times"
    );
}

#[test]
fn last_differential_matches_membership_on_fixtures() {
    for (i, tuple) in [fixtures::f1(), fixtures::f2(), fixtures::f3(), fixtures::f5()]
        .into_iter()
        .enumerate()
    {
        classification_matches_membership(&tuple, 200, 20 + i as u64);
    }
}

#[test]
fn last_differential_matches_membership_on_random_tuples() {
    for index in 0..3 {
        let tuple = fixtures::f4(SEED, 200 + index, &F4Options::new(2, 4)).unwrap();
        classification_matches_membership(&tuple, 120, 30 + index);
    }
}
