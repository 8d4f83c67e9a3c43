//! Deterministic splittable random streams.
//!
//! A `RandomStream` is a ChaCha8 generator keyed by (master_seed, stream_id).
//! ChaCha is counter-based, so distinct stream ids from one master seed give
//! independent sequences and every draw sequence is a pure function of the
//! pair. Monte-Carlo trials take one stream per trial index, which makes
//! results identical for any worker count.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::numerics::gamma::ln_gamma;

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    master_seed: u64,
    stream_id: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        RandomStream {
            rng,
            master_seed,
            stream_id,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        // 52 random bits centered in the cell: never exactly 0 or 1.
        ((self.rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
    }

    /// Unit-mean exponential draw; always strictly positive.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Poisson draw. Sequential inversion below mean 10, Hormann's PTRS
    /// transformed rejection above.
    pub fn poisson(&mut self, mean: f64) -> Result<u64> {
        if !mean.is_finite() || mean < 0.0 {
            return Err(Error::domain(
                "sample_poisson",
                format!("mean must be finite and nonnegative, got {mean}"),
            ));
        }
        if mean == 0.0 {
            return Ok(0);
        }
        if mean < 10.0 {
            Ok(self.poisson_inversion(mean))
        } else {
            Ok(self.poisson_ptrs(mean))
        }
    }

    fn poisson_inversion(&mut self, mean: f64) -> u64 {
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        let u = self.uniform();
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p < f64::MIN_POSITIVE {
                break; // u in the far tail; cdf has saturated
            }
        }
        k
    }

    fn poisson_ptrs(&mut self, mean: f64) -> u64 {
        let b = 0.931 + 2.53 * mean.sqrt();
        let a = -0.059 + 0.024_83 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        let ln_mean = mean.ln();
        loop {
            let u = self.uniform() - 0.5;
            let v = self.uniform();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            if (v * inv_alpha / (a / (us * us) + b)).ln() <= k * ln_mean - mean - ln_gamma(k + 1.0)
            {
                return k as u64;
            }
        }
    }
}
