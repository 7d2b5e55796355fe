//! Counter-based random numbers keyed by `(seed, stream name, index)`.
//!
//! Every draw is a pure function of its key, so sampling can be sharded
//! across threads in any order without changing the values.

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: &str) -> Self {
        Self {
            key: splitmix64(seed ^ splitmix64(fnv1a(stream))),
        }
    }

    pub fn bits(&self, index: u64, lane: u64) -> u64 {
        splitmix64(
            splitmix64(self.key ^ splitmix64(index)) ^ lane.wrapping_mul(0xD6E8_FEB8_6659_FD93),
        )
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&self, index: u64, lane: u64) -> f64 {
        (self.bits(index, lane) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&self, index: u64, lane: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform(index, lane)
    }

    /// `dim` uniforms in `[lo, hi)` for sample `index`.
    pub fn vector(&self, index: u64, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..dim as u64)
            .map(|l| self.uniform_in(index, l, lo, hi))
            .collect()
    }
}
