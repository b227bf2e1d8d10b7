//! Surface integrals over spheres `∂B_θ(c) ⊂ R^N`.
//!
//! The Monte Carlo rule draws groups of `2N` nodes `±Q e_i` (a cross-polytope under a Haar
//! rotation `Q`). Each group is exact for polynomials of degree up to three, and the spread of
//! the group means gives the standard error. The product rule uses hyperspherical angles with
//! Gauss–Gegenbauer nodes in the cosines of the polar angles and a uniform azimuth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bubble::{gamma_half, sphere_area};
use crate::error::{Error, Result};
use crate::green::GreenFunction;
use crate::linalg::{sym_eigen, Mat};
use crate::sampling::random_rotation;
use crate::scalar::{dist, Real};

const GROUPS_PER_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// At least `samples` nodes, rounded up to whole groups of `2N`.
    MonteCarlo { samples: usize, seed: u64 },
    /// `resolution` Gauss–Gegenbauer nodes per polar angle, `2 * resolution` azimuthal nodes.
    Product { resolution: usize },
}

/// Integral estimate; `std_error` is zero for the product rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub std_error: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereQuadrature<T> {
    pub center: Vec<T>,
    pub radius: T,
    pub scheme: Scheme,
}

impl<T: Real> SphereQuadrature<T> {
    pub fn new(center: Vec<T>, radius: T, scheme: Scheme) -> Result<Self> {
        if center.len() < 2 {
            return Err(Error::Geometry("sphere quadrature needs dimension at least 2".into()));
        }
        if !(radius.is_finite() && radius > T::zero()) {
            return Err(Error::Geometry(format!("radius {radius} must be positive")));
        }
        match scheme {
            Scheme::MonteCarlo { samples, .. } if samples < 4 * center.len() => {
                return Err(Error::Geometry(format!(
                    "{samples} samples do not give two node groups in dimension {}",
                    center.len()
                )));
            }
            Scheme::Product { resolution } if resolution < 2 => {
                return Err(Error::Geometry("product resolution must be at least 2".into()));
            }
            _ => {}
        }
        Ok(Self { center, radius, scheme })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Checks that the closed ball lies inside the domain and keeps clear of the other poles.
    pub fn check_placement<G: GreenFunction<T> + ?Sized>(&self, g: &G, other_poles: &[Vec<T>]) -> Result<()> {
        let d = g.boundary_distance(&self.center);
        if g.component(&self.center).is_none() || !(self.radius < d) {
            return Err(Error::Geometry(format!(
                "ball of radius {} around the pole reaches the boundary (distance {d})",
                self.radius
            )));
        }
        for p in other_poles {
            let sep = dist(p, &self.center);
            if sep == T::zero() {
                continue;
            }
            if !(self.radius < sep / T::lit(2.0)) {
                return Err(Error::Geometry(format!(
                    "radius {} is not below half the distance {sep} to another pole",
                    self.radius
                )));
            }
        }
        Ok(())
    }

    /// Same rule on a sphere of another radius, with an independent random stream.
    pub fn with_radius(&self, radius: T, stream: u64) -> Result<Self> {
        let scheme = match self.scheme {
            Scheme::MonteCarlo { samples, seed } => Scheme::MonteCarlo {
                samples,
                seed: seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            },
            s => s,
        };
        Self::new(self.center.clone(), radius, scheme)
    }

    /// `∫_{∂B_θ(c)} f` for a scalar integrand of the unit normal `ν` and the point `y = c + θν`.
    pub fn integrate<F>(&self, f: F) -> Result<Estimate<T>>
    where
        F: Fn(&[T], &[T]) -> Result<T> + Sync,
    {
        Ok(self.integrate_many(1, |nu, y| Ok(vec![f(nu, y)?]))?.remove(0))
    }

    /// Integrates `count` integrands evaluated together at each node.
    pub fn integrate_many<F>(&self, count: usize, f: F) -> Result<Vec<Estimate<T>>>
    where
        F: Fn(&[T], &[T]) -> Result<Vec<T>> + Sync,
    {
        let n = self.dim();
        let surface = sphere_area::<T>(n)? * self.radius.powi(n as i32 - 1);
        let point = |nu: &[T]| -> Vec<T> {
            self.center.iter().zip(nu).map(|(&c, &v)| c + self.radius * v).collect()
        };
        let eval = |nu: &[T]| -> Result<Vec<T>> {
            let v = f(nu, &point(nu))?;
            if v.len() != count {
                return Err(Error::InvalidArgument(format!(
                    "integrand returned {} values, expected {count}",
                    v.len()
                )));
            }
            Ok(v)
        };
        match self.scheme {
            Scheme::MonteCarlo { samples, seed } => {
                let groups = samples.div_ceil(2 * n);
                let chunks = groups.div_ceil(GROUPS_PER_CHUNK);
                // Per chunk: group count, mean of group means, and sum of squared deviations.
                let partial: Vec<(T, Vec<T>, Vec<T>)> = (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(c as u64);
                        let mut seen = T::zero();
                        let mut mean = vec![T::zero(); count];
                        let mut m2 = vec![T::zero(); count];
                        let lo = c * GROUPS_PER_CHUNK;
                        let inv = T::one() / T::from_usize_exact(2 * n);
                        for _ in lo..groups.min(lo + GROUPS_PER_CHUNK) {
                            let q = random_rotation::<T>(&mut rng, n);
                            let mut group = vec![T::zero(); count];
                            for axis in 0..n {
                                for sign in [T::one(), -T::one()] {
                                    let nu: Vec<T> = (0..n).map(|r| sign * q[(r, axis)]).collect();
                                    for (m, v) in group.iter_mut().zip(eval(&nu)?) {
                                        *m = *m + v;
                                    }
                                }
                            }
                            seen = seen + T::one();
                            for ((mu, m2), x) in mean.iter_mut().zip(m2.iter_mut()).zip(group) {
                                let x = x * inv;
                                let d = x - *mu;
                                *mu = *mu + d / seen;
                                *m2 = *m2 + d * (x - *mu);
                            }
                        }
                        Ok((seen, mean, m2))
                    })
                    .collect::<Result<_>>()?;
                let mut total = T::zero();
                let mut mean = vec![T::zero(); count];
                let mut m2 = vec![T::zero(); count];
                for (nb, mb, m2b) in partial {
                    let na = total;
                    total = total + nb;
                    for i in 0..count {
                        let d = mb[i] - mean[i];
                        mean[i] = mean[i] + d * nb / total;
                        m2[i] = m2[i] + m2b[i] + d * d * na * nb / total;
                    }
                }
                Ok((0..count)
                    .map(|i| {
                        let var = m2[i] / (total - T::one());
                        Estimate { value: surface * mean[i], std_error: surface * (var / total).sqrt() }
                    })
                    .collect())
            }
            Scheme::Product { resolution } => {
                let nodes = product_nodes::<T>(n, resolution);
                let partial: Vec<Vec<T>> = nodes
                    .par_chunks(4096)
                    .map(|chunk| {
                        let mut acc = vec![T::zero(); count];
                        for (nu, w) in chunk {
                            for (a, v) in acc.iter_mut().zip(eval(nu)?) {
                                *a = *a + *w * v;
                            }
                        }
                        Ok(acc)
                    })
                    .collect::<Result<_>>()?;
                let mut acc = vec![T::zero(); count];
                for p in partial {
                    for (a, v) in acc.iter_mut().zip(p) {
                        *a = *a + v;
                    }
                }
                let scale = self.radius.powi(n as i32 - 1);
                Ok(acc
                    .into_iter()
                    .map(|v| Estimate { value: scale * v, std_error: T::zero() })
                    .collect())
            }
        }
    }
}

/// Gauss–Gegenbauer rule for the weight `(1 − t²)^{power/2 − 1/2}` on `[-1, 1]` (Golub–Welsch).
fn gauss_gegenbauer(m: usize, power: usize) -> Vec<(f64, f64)> {
    let alpha = (power as f64 - 1.0) / 2.0;
    let jacobi = Mat::from_fn(m, m, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            let a = 2.0 * k + 2.0 * alpha;
            (k * (k + 2.0 * alpha) / ((a + 1.0) * (a - 1.0))).sqrt()
        } else {
            0.0
        }
    });
    let mu0: f64 = gamma_half::<f64>(1) * gamma_half::<f64>(power + 1) / gamma_half::<f64>(power + 2);
    let e = sym_eigen(&jacobi);
    (0..m)
        .map(|j| (e.values[j], mu0 * e.vectors[(0, j)] * e.vectors[(0, j)]))
        .collect()
}

/// Unit vectors and weights of the product rule on `S^{n-1}`; weights sum to `|S^{n-1}|`.
/// Polar levels use `t = cos φ` with the Gegenbauer weight of their `sin^p φ` factor, so
/// polynomial integrands of degree below `2 * resolution` are integrated exactly.
fn product_nodes<T: Real>(n: usize, resolution: usize) -> Vec<(Vec<T>, T)> {
    let pi = std::f64::consts::PI;
    let naz = 2 * resolution;
    // Partial products: (coordinates so far, running sine product, weight).
    let mut partial: Vec<(Vec<f64>, f64, f64)> = vec![(Vec::new(), 1.0, 1.0)];
    for level in 0..n.saturating_sub(2) {
        let rule = gauss_gegenbauer(resolution, n - 2 - level);
        partial = partial
            .into_iter()
            .flat_map(|(coords, s, w)| {
                rule.iter()
                    .map(|&(t, wq)| {
                        let mut c = coords.clone();
                        c.push(s * t);
                        (c, s * (1.0 - t * t).sqrt(), w * wq)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    partial
        .into_iter()
        .flat_map(|(coords, s, w)| {
            (0..naz)
                .map(|a| {
                    let phi = 2.0 * pi * a as f64 / naz as f64;
                    let mut c = coords.clone();
                    c.push(s * phi.cos());
                    c.push(s * phi.sin());
                    (c.into_iter().map(T::lit).collect(), T::lit(w * 2.0 * pi / naz as f64))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}
