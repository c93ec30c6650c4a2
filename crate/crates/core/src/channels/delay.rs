use rand::Rng;

/// Detection latency of the periodic ranging pipeline:
/// `U(3·T_k, 27·T_k) + proc_delay` seconds.
pub fn detection_delay_sample<R: Rng + ?Sized>(t_k: f64, proc_delay: f64, rng: &mut R) -> f64 {
    debug_assert!(t_k > 0.0 && proc_delay >= 0.0);
    3.0 * t_k + 24.0 * t_k * rng.random::<f64>() + proc_delay
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn support_and_mean() {
        let mut r = rng::stream(1, rng::labels::S3_DELAY, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let d = detection_delay_sample(0.1, 0.0, &mut r);
            assert!((0.3..=2.7).contains(&d), "{d}");
            sum += d;
        }
        let mean = sum / n as f64;
        assert!((mean - 1.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn processing_delay_shifts_support() {
        let mut r = rng::stream(2, rng::labels::S3_DELAY, 0);
        for _ in 0..10_000 {
            let d = detection_delay_sample(0.1, 0.5, &mut r);
            assert!((0.8..=3.2).contains(&d), "{d}");
        }
    }
}
