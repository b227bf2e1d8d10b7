//! Point sets on spheres and in balls: low-discrepancy boundary nodes, random directions, Haar rotations.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::linalg::Mat;
use crate::scalar::{norm, Real};

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Inverse of the standard normal CDF (Acklam rational approximation without refinement, absolute error below 2e-5).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549671010466170,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let low = 0.02425;
    if p < low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf(1.0 - p)
    }
}

/// Quasi-uniform unit vectors on `S^{dim-1}`: Halton points pushed through the inverse normal CDF
/// and normalized. `stream` offsets the Halton index so separate point sets do not coincide.
pub fn sphere_points<T: Real>(count: usize, dim: usize, stream: u64) -> Vec<Vec<T>> {
    assert!(dim <= PRIMES.len(), "dimension {dim} exceeds the Halton prime table");
    let offset = 1 + stream * 1_000_003;
    (0..count as u64)
        .map(|i| {
            let g: Vec<f64> = PRIMES[..dim]
                .iter()
                .enumerate()
                .map(|(d, &b)| {
                    // Cranley-Patterson shift per coordinate keeps streams decorrelated.
                    let shift = radical_inverse(stream + 7 + d as u64, 2) * 0.5;
                    let u = (radical_inverse(offset + i, b) + shift).fract();
                    inverse_normal_cdf(u.clamp(1e-12, 1.0 - 1e-12))
                })
                .collect();
            let r = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            g.into_iter().map(|x| T::lit(x / r)).collect()
        })
        .collect()
}

pub fn random_direction<T: Real>(rng: &mut dyn RngCore, dim: usize) -> Vec<T> {
    loop {
        let g: Vec<T> = (0..dim).map(|_| T::lit(rng.sample(StandardNormal))).collect();
        let r = norm(&g);
        if r > T::lit(1e-12) {
            return g.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Uniform point in the ball of the given center and radius.
pub fn random_in_ball<T: Real>(rng: &mut dyn RngCore, center: &[T], radius: T) -> Vec<T> {
    let dim = center.len();
    let dir = random_direction::<T>(rng, dim);
    let u: f64 = rng.random();
    let r = radius * T::lit(u.powf(1.0 / dim as f64));
    center.iter().zip(&dir).map(|(&c, &d)| c + r * d).collect()
}

/// Haar-distributed orthogonal matrix (Gram–Schmidt on a Gaussian matrix).
pub fn random_rotation<T: Real>(rng: &mut dyn RngCore, dim: usize) -> Mat<T> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
            }
        }
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-8 {
            cols.push(v.into_iter().map(|x| x / r).collect());
        }
    }
    Mat::from_fn(dim, dim, |i, j| T::lit(cols[j][i]))
}
