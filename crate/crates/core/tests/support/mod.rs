#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use samkit::rng::substream;

pub fn gaussian(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = substream(seed, 0xfeed);
    Array2::from_shape_fn((n, d), |_| rng.sample(StandardNormal))
}

/// Upper normal tail `Q(z) = 1 - Phi(z)` from scratch: Marsaglia's Taylor
/// series near the origin, a Lentz continued fraction in the tails.
pub fn upper_tail(z: f64) -> f64 {
    if z.abs() < 3.0 {
        0.5 - taylor_phi_minus_half(z)
    } else if z > 0.0 {
        mills_tail(z)
    } else {
        1.0 - mills_tail(-z)
    }
}

fn density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

// Phi(z) - 1/2 = phi(z) * sum_k z^(2k+1) / (1*3*...*(2k+1))
fn taylor_phi_minus_half(z: f64) -> f64 {
    let mut term = z;
    let mut sum = z;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        term *= z * z / (2.0 * k + 1.0);
        sum += term;
        k += 1.0;
    }
    density(z) * sum
}

// Q(z) = phi(z) / (z + 1/(z + 2/(z + 3/(z + ...)))) for z > 0.
fn mills_tail(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    density(z) / f
}
