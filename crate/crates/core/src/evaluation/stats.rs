//! Paired two-sided t-test for per-user metric samples.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::util;

/// Outcome of a paired t-test at the 0.05 level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

/// Paired two-sided t-test on equal-length samples, differences taken as
/// `a − b`, p-value from the t distribution with n − 1 degrees of
/// freedom.
///
/// Degenerate inputs follow the usual conventions: identical samples are
/// not significant (t = 0, p = 1); a constant nonzero difference has no
/// variance to test against and is reported as significant with p = 0.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::invalid("paired t-test needs at least 2 pairs"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = util::mean(&diffs);
    let sd = util::sample_sd(&diffs);
    if sd == 0.0 {
        return Ok(if mean == 0.0 {
            TTest { t: 0.0, p: 1.0, significant: false }
        } else {
            TTest {
                t: if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                p: 0.0,
                significant: true,
            }
        });
    }
    let n = diffs.len() as f64;
    let t = mean / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("n ≥ 2 gives valid dof");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(TTest {
        t,
        p,
        significant: p < 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_samples_are_null() {
        let r = paired_t_test(&[0.3, 0.5, 0.9], &[0.3, 0.5, 0.9]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
        assert!(!r.significant);
    }

    #[test]
    fn constant_nonzero_difference_is_degenerate_significant() {
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[1.5, 2.5, 3.5]).unwrap();
        assert!(r.significant);
        assert_eq!(r.p, 0.0);
        assert!(r.t.is_infinite() && r.t < 0.0);
    }

    #[test]
    fn hand_oracle_three_pairs() {
        // a = (1,2,3), b = (2,4,6): differences a − b = (−1,−2,−3) with
        // mean −2 and sample sd 1, so t = −2·√3 ≈ −3.4641.
        let r = paired_t_test(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((r.t + 2.0 * 3.0_f64.sqrt()).abs() < 1e-9, "t = {}", r.t);
        // Two-sided p with 2 degrees of freedom is ≈ 0.0742: |t| is large
        // but n is tiny, so this does not clear 0.05.
        assert!((r.p - 0.0742).abs() < 5e-4, "p = {}", r.p);
        assert!(!r.significant);
    }

    #[test]
    fn swapping_the_samples_negates_t_and_keeps_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.gen_range(2..=12);
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let ab = paired_t_test(&a, &b).unwrap();
            let ba = paired_t_test(&b, &a).unwrap();
            if ab.t.is_finite() {
                assert!((ab.t + ba.t).abs() < 1e-9);
                assert!((ab.p - ba.p).abs() < 1e-9);
            }
            assert_eq!(ab.significant, ba.significant);
            assert!((0.0..=1.0).contains(&ab.p));
        }
    }

    #[test]
    fn clearly_separated_samples_are_significant() {
        let a = [0.9, 0.85, 0.95, 0.88, 0.92];
        let b = [0.1, 0.15, 0.05, 0.12, 0.14];
        let r = paired_t_test(&a, &b).unwrap();
        assert!(r.significant);
        assert!(r.t > 0.0);
        assert!(r.p < 0.001);
    }

    #[test]
    fn length_mismatch_and_tiny_samples_error() {
        assert!(paired_t_test(&[1.0], &[1.0, 2.0]).is_err());
        assert!(paired_t_test(&[1.0], &[1.0]).is_err());
    }
}
