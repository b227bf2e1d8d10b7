use rand::RngCore;

use super::{singular_constant, singular_with, GreenFunction, Kernel, Order};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::sampling::random_in_ball;
use crate::scalar::{dist, dot, norm, to_f64_vec, Real};

/// Exact regular part for the ball `B_ρ(c)` via the Kelvin image.
///
/// With `x' = x − c`, `y' = y − c` the image kernel is `H = c_N D^{(2−N)/2}` where
/// `D = |x'|²|y'|²/ρ² − 2 x'·y' + ρ²`. `D` is symmetric, smooth at `x = c`, and positive for
/// interior points.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGreen<T> {
    center: Vec<T>,
    radius: T,
    c_n: T,
}

impl<T: Real> BallGreen<T> {
    pub fn new(center: Vec<T>, radius: T) -> Self {
        let c_n = singular_constant(center.len());
        Self { center, radius, c_n }
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Closed-form Robin function `c_N (ρ/(ρ² − |x'|²))^{N−2}`.
    pub fn robin_closed_form(&self, x: &[T]) -> T {
        let r2: T = x.iter().zip(&self.center).map(|(&a, &c)| (a - c) * (a - c)).sum();
        let n = self.center.len();
        self.c_n * (self.radius / (self.radius * self.radius - r2)).powi(n as i32 - 2)
    }

    fn kernel(&self, x: &[T], y: &[T], order: Order) -> Kernel<T> {
        let n = x.len();
        let xs: Vec<T> = x.iter().zip(&self.center).map(|(&a, &c)| a - c).collect();
        let ys: Vec<T> = y.iter().zip(&self.center).map(|(&a, &c)| a - c).collect();
        let rho2 = self.radius * self.radius;
        let x2 = dot(&xs, &xs);
        let y2 = dot(&ys, &ys);
        let two = T::lit(2.0);
        let d = x2 * y2 / rho2 - two * dot(&xs, &ys) + rho2;
        let p = (T::lit(2.0) - T::from_usize_exact(n)) / two;
        let dp = d.powf(p);
        let mut k = Kernel::empty(self.c_n * dp);
        if order == Order::Value {
            return k;
        }
        let dx: Vec<T> = (0..n).map(|i| two * xs[i] * y2 / rho2 - two * ys[i]).collect();
        let dy: Vec<T> = (0..n).map(|i| two * ys[i] * x2 / rho2 - two * xs[i]).collect();
        let f1 = self.c_n * p * dp / d;
        k.dx = dx.iter().map(|&v| f1 * v).collect();
        k.dy = dy.iter().map(|&v| f1 * v).collect();
        if order == Order::Second {
            let f2 = self.c_n * p * (p - T::one()) * dp / (d * d);
            let delta = |i: usize, j: usize| if i == j { T::one() } else { T::zero() };
            k.dxx = Mat::from_fn(n, n, |i, j| f2 * dx[i] * dx[j] + f1 * two * delta(i, j) * y2 / rho2);
            k.dyy = Mat::from_fn(n, n, |i, j| f2 * dy[i] * dy[j] + f1 * two * delta(i, j) * x2 / rho2);
            k.dxy = Mat::from_fn(n, n, |i, j| {
                f2 * dx[i] * dy[j] + f1 * (T::lit(4.0) * xs[i] * ys[j] / rho2 - two * delta(i, j))
            });
        }
        k
    }
}

impl<T: Real> GreenFunction<T> for BallGreen<T> {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn boundary_distance(&self, x: &[T]) -> T {
        self.radius - dist(x, &self.center)
    }

    fn component(&self, x: &[T]) -> Option<usize> {
        (dist(x, &self.center) < self.radius).then_some(0)
    }

    fn diameter(&self) -> T {
        T::lit(2.0) * self.radius
    }

    fn nearest_boundary(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        let d: Vec<T> = x.iter().zip(&self.center).map(|(&a, &c)| a - c).collect();
        let r = norm(&d);
        let u: Vec<T> = if r > T::zero() {
            d.iter().map(|&v| v / r).collect()
        } else {
            let mut e = vec![T::zero(); d.len()];
            e[0] = T::one();
            e
        };
        let p = self.center.iter().zip(&u).map(|(&c, &v)| c + self.radius * v).collect();
        (p, u)
    }

    fn regular(&self, x: &[T], y: &[T], order: Order) -> Result<Kernel<T>> {
        self.check_interior(x)?;
        self.check_interior(y)?;
        Ok(self.kernel(x, y, order))
    }

    fn sample_interior(&self, rng: &mut dyn RngCore, margin: T) -> Vec<T> {
        random_in_ball(rng, &self.center, (self.radius - margin).max(T::zero()))
    }
}

/// Union of pairwise disjoint balls. Within a component the ball kernel applies; across
/// components `H = S`, so `G` vanishes identically.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointBallsGreen<T> {
    balls: Vec<BallGreen<T>>,
}

impl<T: Real> DisjointBallsGreen<T> {
    pub fn new(balls: Vec<BallGreen<T>>) -> Self {
        assert!(!balls.is_empty(), "need at least one ball");
        Self { balls }
    }

    pub fn balls(&self) -> &[BallGreen<T>] {
        &self.balls
    }
}

impl<T: Real> GreenFunction<T> for DisjointBallsGreen<T> {
    fn dim(&self) -> usize {
        self.balls[0].dim()
    }

    fn boundary_distance(&self, x: &[T]) -> T {
        self.balls
            .iter()
            .map(|b| b.boundary_distance(x))
            .fold(T::neg_infinity(), |a, b| a.max(b))
    }

    fn component(&self, x: &[T]) -> Option<usize> {
        self.balls.iter().position(|b| b.component(x).is_some())
    }

    fn diameter(&self) -> T {
        let mut d = T::zero();
        for a in &self.balls {
            for b in &self.balls {
                d = d.max(dist(&a.center, &b.center) + a.radius + b.radius);
            }
        }
        d
    }

    fn boundary_margin(&self) -> T {
        let dmin = self.balls.iter().fold(T::infinity(), |m, b| m.min(b.diameter()));
        T::lit(1e-3) * dmin
    }

    fn nearest_boundary(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        let i = self.component(x).unwrap_or_else(|| {
            let mut best = 0;
            for (k, b) in self.balls.iter().enumerate() {
                if b.boundary_distance(x) > self.balls[best].boundary_distance(x) {
                    best = k;
                }
            }
            best
        });
        self.balls[i].nearest_boundary(x)
    }

    fn regular(&self, x: &[T], y: &[T], order: Order) -> Result<Kernel<T>> {
        let cx = self.component(x).ok_or_else(|| Error::OutsideDomain { point: to_f64_vec(x) })?;
        let cy = self.component(y).ok_or_else(|| Error::OutsideDomain { point: to_f64_vec(y) })?;
        if cx == cy {
            self.balls[cx].regular(x, y, order)
        } else {
            singular_with(self.balls[cx].c_n, x, y, order)
        }
    }

    fn sample_interior(&self, rng: &mut dyn RngCore, margin: T) -> Vec<T> {
        let n = self.dim() as i32;
        let weights: Vec<f64> = self
            .balls
            .iter()
            .map(|b| (b.radius - margin).max(T::zero()).as_f64().powi(n))
            .collect();
        let total: f64 = weights.iter().sum();
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * total;
        let mut acc = 0.0;
        let mut pick = self.balls.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = i;
                break;
            }
        }
        self.balls[pick].sample_interior(rng, margin)
    }
}
