//! Dirichlet Green function `G = S − H` of the domain, its regular part and the Robin function.

mod ball;
mod mfs;

pub use ball::{BallGreen, DisjointBallsGreen};
pub use mfs::MfsGreen;

use rand::RngCore;
use serde::Serialize;

use crate::bubble::sphere_area;
use crate::domain::{DomainSpec, Shape, SurfaceSpec};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{to_f64_vec, Real};

/// How many derivatives an evaluation should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Value,
    First,
    Second,
}

/// A two-point kernel `K(x, y)` with derivatives in both slots.
///
/// Fields beyond the requested [`Order`] are left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<T> {
    pub value: T,
    pub dx: Vec<T>,
    pub dy: Vec<T>,
    /// `dxx[(i, j)] = ∂²K/∂x_i∂x_j`.
    pub dxx: Mat<T>,
    /// `dxy[(i, j)] = ∂²K/∂x_i∂y_j`.
    pub dxy: Mat<T>,
    pub dyy: Mat<T>,
}

impl<T: Real> Kernel<T> {
    pub(crate) fn empty(value: T) -> Self {
        Self {
            value,
            dx: Vec::new(),
            dy: Vec::new(),
            dxx: Mat::zeros(0, 0),
            dxy: Mat::zeros(0, 0),
            dyy: Mat::zeros(0, 0),
        }
    }

    pub(crate) fn zero(n: usize, order: Order) -> Self {
        let mut k = Self::empty(T::zero());
        if order >= Order::First {
            k.dx = vec![T::zero(); n];
            k.dy = vec![T::zero(); n];
        }
        if order >= Order::Second {
            k.dxx = Mat::zeros(n, n);
            k.dxy = Mat::zeros(n, n);
            k.dyy = Mat::zeros(n, n);
        }
        k
    }

    /// `self − other`, slot by slot.
    pub(crate) fn minus(mut self, other: &Self) -> Self {
        self.value = self.value - other.value;
        for (a, b) in self.dx.iter_mut().zip(&other.dx) {
            *a = *a - *b;
        }
        for (a, b) in self.dy.iter_mut().zip(&other.dy) {
            *a = *a - *b;
        }
        for (m, o) in [
            (&mut self.dxx, &other.dxx),
            (&mut self.dxy, &other.dxy),
            (&mut self.dyy, &other.dyy),
        ] {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    m[(i, j)] = m[(i, j)] - o[(i, j)];
                }
            }
        }
        self
    }

    /// Kernel with the two slots exchanged: `K'(x, y) = K(y, x)`.
    pub fn swapped(&self) -> Self {
        Self {
            value: self.value,
            dx: self.dy.clone(),
            dy: self.dx.clone(),
            dxx: self.dyy.clone(),
            dxy: self.dxy.transpose(),
            dyy: self.dxx.clone(),
        }
    }
}

/// `c_N = 1/((N−2) ω_N)`, the normalization of the fundamental solution.
pub fn singular_constant<T: Real>(n: usize) -> T {
    let omega: T = sphere_area(n).expect("n >= 2");
    T::one() / (T::from_usize_exact(n - 2) * omega)
}

/// Free-space fundamental solution `S(x,y) = c_N |x−y|^{2−N}` and its derivatives.
pub fn singular<T: Real>(x: &[T], y: &[T], order: Order) -> Result<Kernel<T>> {
    let n = x.len();
    let c = singular_constant::<T>(n);
    singular_with(c, x, y, order)
}

pub(crate) fn singular_with<T: Real>(c: T, x: &[T], y: &[T], order: Order) -> Result<Kernel<T>> {
    let n = x.len();
    let d: Vec<T> = y.iter().zip(x).map(|(&a, &b)| a - b).collect();
    let r2: T = d.iter().map(|&v| v * v).sum();
    if !(r2 > T::zero()) {
        return Err(Error::Singular);
    }
    let two_minus_n = T::lit(2.0) - T::from_usize_exact(n);
    let rpow = r2.powf(two_minus_n / T::lit(2.0));
    let mut k = Kernel::empty(c * rpow);
    if order >= Order::First {
        // ∂_y S = c (2−N) r^{−N} d, ∂_x S = −∂_y S.
        let f = c * two_minus_n * rpow / r2;
        k.dy = d.iter().map(|&v| f * v).collect();
        k.dx = k.dy.iter().map(|&v| -v).collect();
    }
    if order >= Order::Second {
        let f = c * two_minus_n * rpow / r2;
        let nf = T::from_usize_exact(n);
        let yy = Mat::from_fn(n, n, |i, j| {
            let delta = if i == j { T::one() } else { T::zero() };
            f * (delta - nf * d[i] * d[j] / r2)
        });
        k.dxy = Mat::from_fn(n, n, |i, j| -yy[(i, j)]);
        k.dxx = yy.clone();
        k.dyy = yy;
    }
    Ok(k)
}

/// Evaluator of the regular part `H` of the Dirichlet Green function of a fixed domain.
pub trait GreenFunction<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// Distance to the boundary; non-positive outside the domain.
    fn boundary_distance(&self, x: &[T]) -> T;

    /// Connected component containing `x`, or `None` outside the domain.
    fn component(&self, x: &[T]) -> Option<usize>;

    fn diameter(&self) -> T;

    /// Nearest boundary point and outward unit normal there.
    fn nearest_boundary(&self, x: &[T]) -> (Vec<T>, Vec<T>);

    /// Regular part `H(x, y)` with derivatives up to `order`; `x` is the pole.
    fn regular(&self, x: &[T], y: &[T], order: Order) -> Result<Kernel<T>>;

    /// Uniform sample among interior points at distance at least `margin` from the boundary.
    fn sample_interior(&self, rng: &mut dyn RngCore, margin: T) -> Vec<T>;

    /// Points closer than this to the boundary produce flagged evaluations.
    fn boundary_margin(&self) -> T {
        T::lit(1e-3) * self.diameter()
    }

    fn check_interior(&self, x: &[T]) -> Result<usize> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, domain dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        match self.component(x) {
            Some(c) if self.boundary_distance(x) > T::zero() => Ok(c),
            _ => Err(Error::OutsideDomain { point: to_f64_vec(x) }),
        }
    }
}

/// `G(x, y)` with derivatives up to `order`.
pub fn green_kernel<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    x: &[T],
    y: &[T],
    order: Order,
) -> Result<Kernel<T>> {
    let s = singular(x, y, order)?;
    let h = g.regular(x, y, order)?;
    Ok(s.minus(&h))
}

pub fn green<T: Real, G: GreenFunction<T> + ?Sized>(g: &G, x: &[T], y: &[T]) -> Result<T> {
    Ok(green_kernel(g, x, y, Order::Value)?.value)
}

pub fn grad_x_green<T: Real, G: GreenFunction<T> + ?Sized>(g: &G, x: &[T], y: &[T]) -> Result<Vec<T>> {
    Ok(green_kernel(g, x, y, Order::First)?.dx)
}

pub fn grad_y_green<T: Real, G: GreenFunction<T> + ?Sized>(g: &G, x: &[T], y: &[T]) -> Result<Vec<T>> {
    Ok(green_kernel(g, x, y, Order::First)?.dy)
}

/// Which slots a second derivative `∂²G/∂·_i∂·_h` acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slots {
    XX,
    XY,
    YY,
}

pub fn second_green<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    x: &[T],
    y: &[T],
    slots: Slots,
    i: usize,
    h: usize,
) -> Result<T> {
    let k = green_kernel(g, x, y, Order::Second)?;
    if i >= x.len() || h >= x.len() {
        return Err(Error::InvalidArgument(format!("derivative index out of range: ({i}, {h})")));
    }
    Ok(match slots {
        Slots::XX => k.dxx[(i, h)],
        Slots::XY => k.dxy[(i, h)],
        Slots::YY => k.dyy[(i, h)],
    })
}

/// `R(x) = H(x, x)` with gradient and Hessian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobinEvaluation<T> {
    pub location: Vec<T>,
    pub value: T,
    pub gradient: Vec<T>,
    pub hessian: Vec<Vec<T>>,
    /// Set when the location lies within the provider's boundary margin.
    pub near_boundary: bool,
}

/// Robin function and its derivatives, assembled from the second partials of `H` on the diagonal.
pub fn robin<T: Real, G: GreenFunction<T> + ?Sized>(g: &G, x: &[T]) -> Result<RobinEvaluation<T>> {
    let k = g.regular(x, x, Order::Second)?;
    let n = x.len();
    let gradient = (0..n).map(|i| k.dx[i] + k.dy[i]).collect();
    let hessian = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| k.dxx[(i, j)] + k.dxy[(i, j)] + k.dxy[(j, i)] + k.dyy[(i, j)])
                .collect()
        })
        .collect();
    Ok(RobinEvaluation {
        location: x.to_vec(),
        value: k.value,
        gradient,
        hessian,
        near_boundary: g.boundary_distance(x) < g.boundary_margin(),
    })
}

pub fn robin_value<T: Real, G: GreenFunction<T> + ?Sized>(g: &G, x: &[T]) -> Result<T> {
    Ok(g.regular(x, x, Order::Value)?.value)
}

/// Provider built from a [`DomainSpec`].
pub enum GreenProvider<T: Real> {
    Ball(BallGreen<T>),
    DisjointBalls(DisjointBallsGreen<T>),
    Mfs(Box<MfsGreen<T>>),
}

impl<T: Real> std::fmt::Debug for GreenProvider<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Ball(b) => f.debug_tuple("Ball").field(b).finish(),
            Self::DisjointBalls(b) => f.debug_tuple("DisjointBalls").field(b).finish(),
            Self::Mfs(m) => f.debug_tuple("Mfs").field(&m.source_count()).finish(),
        }
    }
}

/// Builds the provider. Ball shapes use closed forms; smooth shapes set up an MFS engine whose
/// per-pole fits run lazily on first use.
pub fn make_provider<T: Real>(spec: &DomainSpec) -> Result<GreenProvider<T>> {
    spec.validate()?;
    let n = spec.dimension.get();
    let conv = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
    Ok(match &spec.shape {
        Shape::Ball { center, radius } => GreenProvider::Ball(BallGreen::new(conv(center), T::lit(*radius))),
        Shape::DisjointBalls { balls } => GreenProvider::DisjointBalls(DisjointBallsGreen::new(
            balls
                .iter()
                .map(|b| BallGreen::new(conv(&b.center), T::lit(b.radius)))
                .collect(),
        )),
        Shape::Smooth {
            surface,
            mfs_offset,
            mfs_sources,
            collocation_points,
            fit_tolerance,
        } => {
            let SurfaceSpec::Ellipsoid { center, semi_axes } = surface;
            let e = crate::domain::Ellipsoid::new(conv(center), conv(semi_axes));
            debug_assert_eq!(e.dim(), n);
            GreenProvider::Mfs(Box::new(MfsGreen::new(
                e,
                T::lit(*mfs_offset),
                *mfs_sources,
                *collocation_points,
                T::lit(*fit_tolerance),
            )?))
        }
    })
}

macro_rules! delegate {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            GreenProvider::Ball($p) => $e,
            GreenProvider::DisjointBalls($p) => $e,
            GreenProvider::Mfs($p) => $e,
        }
    };
}

impl<T: Real> GreenFunction<T> for GreenProvider<T> {
    fn dim(&self) -> usize {
        delegate!(self, p => p.dim())
    }
    fn boundary_distance(&self, x: &[T]) -> T {
        delegate!(self, p => p.boundary_distance(x))
    }
    fn component(&self, x: &[T]) -> Option<usize> {
        delegate!(self, p => p.component(x))
    }
    fn diameter(&self) -> T {
        delegate!(self, p => p.diameter())
    }
    fn nearest_boundary(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        delegate!(self, p => p.nearest_boundary(x))
    }
    fn regular(&self, x: &[T], y: &[T], order: Order) -> Result<Kernel<T>> {
        delegate!(self, p => p.regular(x, y, order))
    }
    fn sample_interior(&self, rng: &mut dyn RngCore, margin: T) -> Vec<T> {
        delegate!(self, p => p.sample_interior(rng, margin))
    }
}
