//! Normal distribution functions and reproducible Gaussian streams.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::function::erf::erfc_inv;

use crate::error::{invalid, Result};

/// A correlation coefficient in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation(f64);

impl Correlation {
    pub fn new(value: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&value) {
            return invalid(format!("correlation {value} outside [-1, 1]"));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function Φ.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Inverse of Φ on the open unit interval.
pub fn std_normal_inv(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    // One Halley step against the accurate forward function.
    let e = std_normal_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

// Gauss-Legendre abscissae on [-1, 1] (negative half) with weights.
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705, 0.9324695142031522),
    (0.3607615730481384, 0.6612093864662647),
    (0.4679139345726904, 0.2386191860831970),
];

const GL12: [(f64, f64); 6] = [
    (0.4717533638651177e-01, 0.9815606342467191),
    (0.1069393259953183, 0.9041172563704750),
    (0.1600783285433464, 0.7699026741943050),
    (0.2031674267230659, 0.5873179542866171),
    (0.2334925365383547, 0.3678314989981802),
    (0.2491470458134029, 0.1252334085114692),
];

const GL20: [(f64, f64); 10] = [
    (0.1761400713915212e-01, 0.9931285991850949),
    (0.4060142980038694e-01, 0.9639719272779138),
    (0.6267204833410906e-01, 0.9122344282513259),
    (0.8327674157670475e-01, 0.8391169718222188),
    (0.1019301198172404, 0.7463319064601508),
    (0.1181945319615184, 0.6360536807265150),
    (0.1316886384491766, 0.5108670019508271),
    (0.1420961093183821, 0.3737060887154196),
    (0.1491729864726037, 0.2277858511416451),
    (0.1527533871307259, 0.7652652113349733e-01),
];

/// Φ₂(a, b; ρ) = P(X ≤ a, Y ≤ b) for standard normals with correlation ρ.
pub fn bivariate_normal_cdf(a: f64, b: f64, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return invalid(format!("correlation {rho} outside [-1, 1]"));
    }
    if a.is_nan() || b.is_nan() {
        return invalid("NaN integration limit");
    }
    Ok(bvn_upper(-a, -b, rho))
}

/// Upper orthant probability P(X > h, Y > k), after Drezner-Wesolowsky with
/// Genz's double precision modifications.
fn bvn_upper(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::INFINITY || k == f64::INFINITY {
        return 0.0;
    }
    if h == f64::NEG_INFINITY {
        return if k == f64::NEG_INFINITY {
            1.0
        } else {
            std_normal_cdf(-k)
        };
    }
    if k == f64::NEG_INFINITY {
        return std_normal_cdf(-h);
    }
    if r == 0.0 {
        return std_normal_cdf(-h) * std_normal_cdf(-k);
    }
    let two_pi = 2.0 * PI;
    let quad: &[(f64, f64)] = if r.abs() < 0.3 {
        &GL6
    } else if r.abs() < 0.75 {
        &GL12
    } else {
        &GL20
    };
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = 0.5 * r.asin();
        for &(w, x) in quad {
            for t in [1.0 - x, 1.0 + x] {
                let sn = (asr * t).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        return (bvn * asr / two_pi + std_normal_cdf(-h) * std_normal_cdf(-k)).clamp(0.0, 1.0);
    }
    let mut k = k;
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    if r.abs() < 1.0 {
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let b_s = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 80.0;
        let asr = -0.5 * (b_s / a_s + hk);
        if asr > -100.0 {
            bvn =
                a * asr.exp() * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s) / 3.0 + c * d * a_s * a_s);
        }
        if hk > -100.0 {
            let b = b_s.sqrt();
            let sp = two_pi.sqrt() * std_normal_cdf(-b / a);
            bvn -= (-0.5 * hk).exp() * sp * b * (1.0 - c * b_s * (1.0 - d * b_s) / 3.0);
        }
        a *= 0.5;
        let mut acc = 0.0;
        for &(w, x) in quad {
            for t in [1.0 - x, 1.0 + x] {
                let xs = (a * t) * (a * t);
                let asr = -0.5 * (b_s / xs + hk);
                if asr > -100.0 {
                    let sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                    let rs = (1.0 - xs).sqrt();
                    let ep = (-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))).exp() / rs;
                    acc += w * asr.exp() * (sp - ep);
                }
            }
        }
        bvn = (a * acc - bvn) / two_pi;
    }
    let p = if r > 0.0 {
        bvn + std_normal_cdf(-h.max(k))
    } else if h >= k {
        -bvn
    } else {
        let l = if h < 0.0 {
            std_normal_cdf(k) - std_normal_cdf(h)
        } else {
            std_normal_cdf(-h) - std_normal_cdf(-k)
        };
        l - bvn
    };
    p.clamp(0.0, 1.0)
}

/// Descriptor of a reproducible standard normal sample stream.
///
/// Each `(seed, stream_index)` pair selects an independent ChaCha stream;
/// uniforms are mapped through Φ⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussianStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl GaussianStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    /// A fresh cursor positioned at the start of the stream.
    pub fn cursor(&self) -> GaussianCursor {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        GaussianCursor { rng }
    }
}

/// Iterator over the samples of a [`GaussianStream`].
#[derive(Debug, Clone)]
pub struct GaussianCursor {
    rng: ChaCha12Rng,
}

impl GaussianCursor {
    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        std_normal_inv(self.next_uniform())
    }
}

impl Iterator for GaussianCursor {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

/// The first `n` samples of `stream`.
pub fn gaussian_samples(stream: GaussianStream, n: usize) -> Vec<f64> {
    stream.cursor().take(n).collect()
}
