use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::{singular_constant, singular_with, GreenFunction, Kernel, Order};
use crate::domain::Ellipsoid;
use crate::error::{Error, Result};
use crate::linalg::{Mat, PivotedQr};
use crate::sampling::sphere_points;
use crate::scalar::{dist, norm, Real};

/// Ray points at 1 to 4 boundary distances beyond the nearest boundary point.
const RAY_NEAR: usize = 10;
/// Ray points from 6 to 200 boundary distances out.
const RAY_FAR: usize = 6;
const HOLDOUT_POINTS: usize = 256;
/// Extra collocation points on the boundary patch closest to the pole.
const LOCAL_COLLOCATION: usize = 200;
/// Extra held-out points on that patch.
const LOCAL_HOLDOUT: usize = 64;
const CACHE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Charge,
    Dipole(usize),
    Quadrupole(usize, usize),
}

/// Fundamental solution or one of its derivatives in the source position, placed at `z`.
#[derive(Debug, Clone)]
struct Source<T> {
    z: Vec<T>,
    kind: Kind,
}

/// Radial derivative coefficients of `f(r) = c r^{-m}`: with `d = y − z`,
/// `∂_i f = a1 d_i`, `∂_ij f = a1 δ_ij + a2 d_i d_j`, and so on up to fourth order.
struct Radial<T> {
    d: Vec<T>,
    f: T,
    a1: T,
    a2: T,
    a3: T,
    a4: T,
}

impl<T: Real> Radial<T> {
    fn new(c: T, z: &[T], y: &[T]) -> Self {
        let n = z.len();
        let d: Vec<T> = y.iter().zip(z).map(|(&a, &b)| a - b).collect();
        let r2: T = d.iter().map(|&v| v * v).sum();
        let m = T::from_usize_exact(n - 2);
        let two = T::lit(2.0);
        let f = c * r2.powf(-m / two);
        let a1 = -m * f / r2;
        let a2 = -(m + two) * a1 / r2;
        let a3 = -(m + T::lit(4.0)) * a2 / r2;
        let a4 = -(m + T::lit(6.0)) * a3 / r2;
        Self { d, f, a1, a2, a3, a4 }
    }

    fn d1(&self, i: usize) -> T {
        self.a1 * self.d[i]
    }

    fn d2(&self, i: usize, j: usize) -> T {
        let dl = if i == j { self.a1 } else { T::zero() };
        dl + self.a2 * self.d[i] * self.d[j]
    }

    fn d3(&self, i: usize, j: usize, k: usize) -> T {
        let d = &self.d;
        let mut s = T::zero();
        if i == j {
            s = s + d[k];
        }
        if i == k {
            s = s + d[j];
        }
        if j == k {
            s = s + d[i];
        }
        self.a2 * s + self.a3 * d[i] * d[j] * d[k]
    }

    fn d4(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        let d = &self.d;
        let del = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
        let pairs = del(i, j) * del(k, l) + del(i, k) * del(j, l) + del(i, l) * del(j, k);
        let mixed = del(i, j) * d[k] * d[l]
            + del(i, k) * d[j] * d[l]
            + del(i, l) * d[j] * d[k]
            + del(j, k) * d[i] * d[l]
            + del(j, l) * d[i] * d[k]
            + del(k, l) * d[i] * d[j];
        self.a2 * pairs + self.a3 * mixed + self.a4 * d[i] * d[j] * d[k] * d[l]
    }
}

impl<T: Real> Source<T> {
    fn value(&self, c: T, y: &[T]) -> T {
        let r = Radial::new(c, &self.z, y);
        match self.kind {
            Kind::Charge => r.f,
            Kind::Dipole(i) => -r.d1(i),
            Kind::Quadrupole(i, j) => r.d2(i, j),
        }
    }

    /// Value, y-gradient and y-Hessian (gradient and Hessian only when `order` asks for them).
    fn eval(&self, c: T, y: &[T], order: Order) -> (T, Vec<T>, Option<Mat<T>>) {
        let n = y.len();
        let r = Radial::new(c, &self.z, y);
        let first = order >= Order::First;
        let (v, g): (T, Vec<T>) = match self.kind {
            Kind::Charge => (r.f, if first { (0..n).map(|k| r.d1(k)).collect() } else { vec![] }),
            Kind::Dipole(i) => (-r.d1(i), if first { (0..n).map(|k| -r.d2(i, k)).collect() } else { vec![] }),
            Kind::Quadrupole(i, j) => (
                r.d2(i, j),
                if first { (0..n).map(|k| r.d3(i, j, k)).collect() } else { vec![] },
            ),
        };
        let h = (order >= Order::Second).then(|| match self.kind {
            Kind::Charge => Mat::from_fn(n, n, |k, l| r.d2(k, l)),
            Kind::Dipole(i) => Mat::from_fn(n, n, |k, l| -r.d3(i, k, l)),
            Kind::Quadrupole(i, j) => Mat::from_fn(n, n, |k, l| r.d4(i, j, k, l)),
        });
        (v, g, h)
    }
}

/// Coefficients of one pole's fit: `H(x, y) ≈ Σ_s w[α][s] Φ_s(y)` where `α = 0` is the value
/// and the remaining rows hold the x-derivatives in the order of [`rhs_index`].
#[derive(Debug)]
struct PoleFit<T> {
    extras: Vec<Source<T>>,
    weights: Vec<Vec<T>>,
}

/// Method-of-fundamental-solutions provider for a smooth (ellipsoidal) domain.
///
/// Global charges sit on the boundary dilated by `1 + offset`. Each pole additionally gets
/// charges, dipoles and quadrupoles on the outward normal ray through its nearest boundary point,
/// where the reflected singularity of `S(x, ·)` lives, and extra collocation points on the boundary
/// patch nearest to it. The global block is factorized once; per pole the patch rows are folded into
/// that factorization and only the ray block is solved. Derivatives in the pole come from fitting the analytic
/// x-derivatives of the boundary data in the same basis.
pub struct MfsGreen<T: Real> {
    surface: Ellipsoid<T>,
    c_n: T,
    collocation: Vec<Vec<T>>,
    sources: Vec<Source<T>>,
    source_scale: Vec<T>,
    qr: PivotedQr<T>,
    holdout: Vec<Vec<T>>,
    fit_tolerance: T,
    cache: Mutex<HashMap<Vec<u64>, Arc<PoleFit<T>>>>,
}

/// Row of the fitted coefficient table: 0 value, `1 + i` for `∂_i`, then `∂_i∂_j` for `i <= j`.
fn rhs_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    1 + n + i * n - i * (i + 1) / 2 + j
}

fn rhs_count(n: usize) -> usize {
    1 + n + n * (n + 1) / 2
}

fn ray_extra_count(n: usize) -> usize {
    RAY_NEAR * rhs_count(n) + RAY_FAR * (1 + n)
}

impl<T: Real> MfsGreen<T> {
    pub fn new(
        surface: Ellipsoid<T>,
        offset: T,
        n_sources: usize,
        n_collocation: usize,
        fit_tolerance: T,
    ) -> Result<Self> {
        let n = surface.dim();
        let extra = ray_extra_count(n);
        if n_sources + extra > n_collocation {
            return Err(Error::InvalidDomain(format!(
                "collocation_points ({n_collocation}) must be at least mfs_sources + {extra} ray terms"
            )));
        }
        let c_n = singular_constant(n);
        let collocation: Vec<Vec<T>> = sphere_points::<T>(n_collocation, n, 1)
            .iter()
            .map(|u| surface.surface_point(u))
            .collect();
        let dilated = surface.dilated(T::one() + offset);
        let sources: Vec<Source<T>> = sphere_points::<T>(n_sources, n, 2)
            .iter()
            .map(|u| Source { z: dilated.surface_point(u), kind: Kind::Charge })
            .collect();
        let holdout = sphere_points::<T>(HOLDOUT_POINTS, n, 3)
            .iter()
            .map(|u| surface.surface_point(u))
            .collect();
        let m = collocation.len();
        let columns: Vec<(Vec<T>, T)> = sources
            .par_iter()
            .map(|s| {
                let col: Vec<T> = collocation.iter().map(|p| s.value(c_n, p)).collect();
                let scale = norm(&col);
                (col.into_iter().map(|v| v / scale).collect(), scale)
            })
            .collect();
        let mut cols = Vec::with_capacity(m * n_sources);
        let mut source_scale = Vec::with_capacity(n_sources);
        for (col, scale) in columns {
            cols.extend(col);
            source_scale.push(scale);
        }
        let qr = PivotedQr::new(cols, m, n_sources, T::epsilon() * T::lit(1e3));
        Ok(Self {
            surface,
            c_n,
            collocation,
            sources,
            source_scale,
            qr,
            holdout,
            fit_tolerance,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn surface(&self) -> &Ellipsoid<T> {
        &self.surface
    }

    fn ray_sources(&self, x: &[T]) -> Vec<Source<T>> {
        let n = x.len();
        let p = self.surface.nearest_point(x);
        let nrm = self.surface.outward_normal(&p);
        let delta = dist(&p, x).max(T::lit(1e-6) * self.surface.diameter());
        let at = |t: f64| -> Vec<T> {
            p.iter()
                .zip(&nrm)
                .map(|(&pi, &ni)| pi + T::lit(t) * delta * ni)
                .collect()
        };
        let near = (0..RAY_NEAR).map(|k| {
            2.5 + 1.5 * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * RAY_NEAR) as f64).cos()
        });
        let far = (0..RAY_FAR).map(|k| 6.0 * (200.0f64 / 6.0).powf(k as f64 / (RAY_FAR - 1) as f64));
        let mut out = Vec::with_capacity(ray_extra_count(n));
        for (k, t) in near.chain(far).enumerate() {
            let z = at(t);
            out.push(Source { z: z.clone(), kind: Kind::Charge });
            for i in 0..n {
                out.push(Source { z: z.clone(), kind: Kind::Dipole(i) });
            }
            if k >= RAY_NEAR {
                continue;
            }
            for i in 0..n {
                for j in i..n {
                    out.push(Source { z: z.clone(), kind: Kind::Quadrupole(i, j) });
                }
            }
        }
        out
    }

    /// Boundary points clustered around the point of `∂Ω` nearest to `x`, where the boundary
    /// data of a pole close to the boundary concentrates.
    fn local_points(&self, x: &[T], count: usize, stream: u64) -> Vec<Vec<T>> {
        let n = x.len();
        let p = self.surface.nearest_point(x);
        let delta = dist(&p, x);
        let u: Vec<f64> = p
            .iter()
            .zip(&self.surface.center)
            .zip(&self.surface.semi_axes)
            .map(|((&p, &c), &a)| ((p - c) / a).as_f64())
            .collect();
        let amin = self.surface.semi_axes.iter().fold(f64::INFINITY, |m, a| m.min(a.as_f64()));
        let spread = (3.0 * delta.as_f64() / amin).min(1.0);
        sphere_points::<f64>(count, n, stream)
            .into_iter()
            .enumerate()
            .map(|(k, g)| {
                let radius = spread * ((k as f64 + 0.5) / count as f64).sqrt();
                let v: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a + radius * b).collect();
                let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                let dir: Vec<T> = v.iter().map(|&a| T::lit(a / r)).collect();
                self.surface.surface_point(&dir)
            })
            .collect()
    }

    /// Boundary data `S(x, p)` and its x-derivatives at every point of `pts`, one vector per row
    /// of the coefficient table.
    fn boundary_data(&self, x: &[T], pts: &[Vec<T>]) -> Vec<Vec<T>> {
        let n = x.len();
        let mut out = vec![vec![T::zero(); pts.len()]; rhs_count(n)];
        for (k, p) in pts.iter().enumerate() {
            let s = singular_with(self.c_n, x, p, Order::Second).expect("boundary point differs from pole");
            out[0][k] = s.value;
            for i in 0..n {
                out[1 + i][k] = s.dx[i];
                for j in i..n {
                    out[rhs_index(n, i, j)][k] = s.dxx[(i, j)];
                }
            }
        }
        out
    }

    fn fit(&self, x: &[T]) -> Result<Arc<PoleFit<T>>> {
        let key: Vec<u64> = x.iter().map(|v| v.as_f64().to_bits()).collect();
        if let Some(f) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(f));
        }
        let fit = Arc::new(self.solve_pole(x)?);
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.len() >= CACHE_CAP {
            cache.clear();
        }
        Ok(Arc::clone(cache.entry(key).or_insert(fit)))
    }

    /// Least-squares fit of every boundary-data row on the global collocation points plus a
    /// local patch. The global factorization `A P = Q R` is reused: `Q^T` maps the global rows to
    /// `[R; 0]`, the local rows are folded into `R` by Householder updates, and the remaining
    /// ray block is solved on the leftover rows.
    fn solve_pole(&self, x: &[T]) -> Result<PoleFit<T>> {
        let m = self.collocation.len();
        let r = self.qr.rank();
        let perm = self.qr.perm();
        let extras = self.ray_sources(x);
        let ne = extras.len();
        let local = self.local_points(x, LOCAL_COLLOCATION, 5);
        let nl = local.len();

        // Every column carries its leading r entries (the triangle rows) and its nl local rows.
        let mut gcols: Vec<(Vec<T>, Vec<T>)> = (0..r)
            .into_par_iter()
            .map(|k| {
                let top = (0..r).map(|i| if i <= k { self.qr.r_entry(i, k) } else { T::zero() }).collect();
                let s = &self.sources[perm[k]];
                let scale = self.source_scale[perm[k]];
                let loc = local.iter().map(|p| s.value(self.c_n, p) / scale).collect();
                (top, loc)
            })
            .collect();
        let mut ecols: Vec<(Vec<T>, Vec<T>, Vec<T>, T)> = extras
            .par_iter()
            .map(|s| {
                let mut col: Vec<T> = self.collocation.iter().map(|p| s.value(self.c_n, p)).collect();
                let scale = norm(&col);
                col.iter_mut().for_each(|v| *v = *v / scale);
                self.qr.apply_qt(&mut col);
                let loc = local.iter().map(|p| s.value(self.c_n, p) / scale).collect();
                let bottom = col.split_off(r);
                (col, loc, bottom, scale)
            })
            .collect();
        let global_data = self.boundary_data(x, &self.collocation);
        let local_data = self.boundary_data(x, &local);
        let mut bcols: Vec<(Vec<T>, Vec<T>, Vec<T>)> = global_data
            .into_par_iter()
            .zip(local_data)
            .map(|(mut b, loc)| {
                self.qr.apply_qt(&mut b);
                let bottom = b.split_off(r);
                (b, loc, bottom)
            })
            .collect();

        for k in 0..r {
            let (head, tail) = gcols.split_at_mut(k + 1);
            let pivot = &mut head[k];
            let norm2 = pivot.0[k] * pivot.0[k] + pivot.1.iter().map(|&v| v * v).sum::<T>();
            let nrm = norm2.sqrt();
            if nrm == T::zero() {
                continue;
            }
            let alpha = if pivot.0[k] >= T::zero() { -nrm } else { nrm };
            let v0 = pivot.0[k] - alpha;
            let vloc = pivot.1.clone();
            let vtv = v0 * v0 + vloc.iter().map(|&v| v * v).sum::<T>();
            pivot.0[k] = alpha;
            pivot.1.iter_mut().for_each(|v| *v = T::zero());
            if vtv == T::zero() {
                continue;
            }
            let beta = T::lit(2.0) / vtv;
            let reflect = |top: &mut T, loc: &mut [T]| {
                let s = beta * (v0 * *top + vloc.iter().zip(loc.iter()).map(|(&a, &b)| a * b).sum::<T>());
                *top = *top - s * v0;
                loc.iter_mut().zip(&vloc).for_each(|(l, &vi)| *l = *l - s * vi);
            };
            tail.par_iter_mut().for_each(|(top, loc)| reflect(&mut top[k], loc));
            ecols.par_iter_mut().for_each(|(top, loc, _, _)| reflect(&mut top[k], loc));
            bcols.par_iter_mut().for_each(|(top, loc, _)| reflect(&mut top[k], loc));
        }

        let rows = m - r + nl;
        let mut reduced = Vec::with_capacity(rows * ne);
        for (_, loc, bottom, _) in &ecols {
            reduced.extend_from_slice(bottom);
            reduced.extend_from_slice(loc);
        }
        let small = PivotedQr::new(reduced, rows, ne, T::epsilon() * T::lit(1e3));
        let weights: Vec<Vec<T>> = bcols
            .into_par_iter()
            .map(|(top, loc, bottom)| {
                let mut rhs = bottom;
                rhs.extend(loc);
                let d = small.solve(&rhs);
                let mut top = top;
                for ((etop, _, _, _), &dk) in ecols.iter().zip(&d) {
                    if dk != T::zero() {
                        top.iter_mut().zip(etop).for_each(|(t, &e)| *t = *t - e * dk);
                    }
                }
                let mut z = vec![T::zero(); r];
                for i in (0..r).rev() {
                    let mut s = top[i];
                    for j in (i + 1)..r {
                        s = s - gcols[j].0[i] * z[j];
                    }
                    z[i] = s / gcols[i].0[i];
                }
                let mut c = vec![T::zero(); self.sources.len()];
                for (k, &zk) in z.iter().enumerate() {
                    c[perm[k]] = zk / self.source_scale[perm[k]];
                }
                c.extend(d.iter().zip(&ecols).map(|(&d, e)| d / e.3));
                c
            })
            .collect();
        let fit = PoleFit { extras, weights };
        let residual = self.row_residuals_of(x, &fit)[0];
        if !(residual <= self.fit_tolerance) {
            return Err(Error::FitFailure {
                residual: residual.as_f64(),
                tolerance: self.fit_tolerance.as_f64(),
            });
        }
        Ok(fit)
    }

    fn row_residuals_of(&self, x: &[T], fit: &PoleFit<T>) -> Vec<T> {
        let mut points = self.holdout.clone();
        points.extend(self.local_points(x, LOCAL_HOLDOUT, 4));
        let data = self.boundary_data(x, &points);
        let basis: Vec<Vec<T>> = points
            .par_iter()
            .map(|p| {
                self.sources
                    .iter()
                    .chain(&fit.extras)
                    .map(|s| s.value(self.c_n, p))
                    .collect()
            })
            .collect();
        data.iter()
            .zip(&fit.weights)
            .map(|(row, w)| {
                let mut worst = T::zero();
                let mut scale = T::zero();
                for (phi, &target) in basis.iter().zip(row) {
                    let h: T = phi.iter().zip(w).map(|(&a, &b)| a * b).sum();
                    worst = worst.max((h - target).abs());
                    scale = scale.max(target.abs());
                }
                worst / scale
            })
            .collect()
    }

    /// Held-out boundary mismatch of every fitted row (value first, then x-derivatives), each
    /// relative to the largest magnitude of its boundary data.
    pub fn row_residuals(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_interior(x)?;
        let fit = self.fit(x)?;
        Ok(self.row_residuals_of(x, &fit))
    }

    /// Held-out relative boundary residual of the value fit at pole `x`.
    pub fn boundary_residual(&self, x: &[T]) -> Result<T> {
        Ok(self.row_residuals(x)?[0])
    }

    fn sum_sources(&self, fit: &PoleFit<T>, y: &[T], order: Order) -> Kernel<T> {
        let n = y.len();
        let mut k = Kernel::zero(n, order);
        let w = &fit.weights;
        for (s, src) in self.sources.iter().chain(&fit.extras).enumerate() {
            let (v, g, h) = src.eval(self.c_n, y, order);
            k.value = k.value + w[0][s] * v;
            if order >= Order::First {
                for i in 0..n {
                    k.dx[i] = k.dx[i] + w[1 + i][s] * v;
                    k.dy[i] = k.dy[i] + w[0][s] * g[i];
                }
            }
            if let Some(h) = h {
                for i in 0..n {
                    for j in 0..n {
                        k.dxx[(i, j)] = k.dxx[(i, j)] + w[rhs_index(n, i, j)][s] * v;
                        k.dxy[(i, j)] = k.dxy[(i, j)] + w[1 + i][s] * g[j];
                        k.dyy[(i, j)] = k.dyy[(i, j)] + w[0][s] * h[(i, j)];
                    }
                }
            }
        }
        k
    }
}

impl<T: Real> GreenFunction<T> for MfsGreen<T> {
    fn dim(&self) -> usize {
        self.surface.dim()
    }

    fn boundary_distance(&self, x: &[T]) -> T {
        self.surface.signed_distance(x)
    }

    fn component(&self, x: &[T]) -> Option<usize> {
        self.surface.contains(x).then_some(0)
    }

    fn diameter(&self) -> T {
        self.surface.diameter()
    }

    fn nearest_boundary(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        let p = self.surface.nearest_point(x);
        let n = self.surface.outward_normal(&p);
        (p, n)
    }

    fn regular(&self, x: &[T], y: &[T], order: Order) -> Result<Kernel<T>> {
        self.check_interior(x)?;
        self.check_interior(y)?;
        let fit = self.fit(x)?;
        Ok(self.sum_sources(&fit, y, order))
    }

    fn sample_interior(&self, rng: &mut dyn RngCore, margin: T) -> Vec<T> {
        let n = self.dim();
        loop {
            let x: Vec<T> = (0..n)
                .map(|i| {
                    let u: f64 = rng.random::<f64>() * 2.0 - 1.0;
                    self.surface.center[i] + self.surface.semi_axes[i] * T::lit(u)
                })
                .collect();
            if self.surface.contains(&x) && self.boundary_distance(&x) >= margin {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_indices_are_dense() {
        let n = 6;
        let mut seen = vec![false; rhs_count(n)];
        seen[0] = true;
        for i in 0..n {
            seen[1 + i] = true;
            for j in 0..n {
                seen[rhs_index(n, i, j)] = true;
                assert_eq!(rhs_index(n, i, j), rhs_index(n, j, i));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn multipole_derivatives_match_differences() {
        let c = 0.3f64;
        let y: [f64; 5] = [0.2, -0.1, 0.4, 0.0, 0.1];
        let z: Vec<f64> = vec![1.5, 0.3, -0.2, 0.4, 0.0];
        for kind in [Kind::Charge, Kind::Dipole(2), Kind::Quadrupole(0, 3), Kind::Quadrupole(1, 1)] {
            let s = Source { z: z.clone(), kind };
            let (_, g, h) = s.eval(c, &y, Order::Second);
            let h = h.unwrap();
            let eps = 1e-5;
            for k in 0..5 {
                let mut yp = y;
                let mut ym = y;
                yp[k] += eps;
                ym[k] -= eps;
                let (vp, gp, _) = s.eval(c, &yp, Order::First);
                let (vm, gm, _) = s.eval(c, &ym, Order::First);
                assert!(((vp - vm) / (2.0 * eps) - g[k]).abs() < 1e-7, "{kind:?} grad {k}");
                for l in 0..5 {
                    assert!(((gp[l] - gm[l]) / (2.0 * eps) - h[(k, l)]).abs() < 1e-6, "{kind:?} hess");
                }
            }
            // Dipoles are source-position derivatives of the charge.
            if let Kind::Dipole(i) = kind {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[i] += 1e-5;
                zm[i] -= 1e-5;
                let fd = (Source { z: zp, kind: Kind::Charge }.value(c, &y)
                    - Source { z: zm, kind: Kind::Charge }.value(c, &y))
                    / 2e-5;
                assert!((fd - s.value(c, &y)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn too_few_collocation_points_rejected() {
        let e = Ellipsoid::new(vec![0.0; 5], vec![1.0; 5]);
        assert!(MfsGreen::new(e, 0.5, 100, 110, 1e-3).is_err());
    }
}
