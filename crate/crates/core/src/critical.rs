//! Critical points of `Ψ_k`: seeded multistart damped Newton, classification, the sets `S_k`
//! and `T_k`, and the solution count.
//!
//! Newton runs in the variables `z = (a / diam Ω, ln λ)`. The reported `grad_norm` is the
//! z-gradient divided by `B Σ λ_j²`, which makes it independent of the domain size and of the
//! overall scale of `Ψ_k`; its λ-components equal `2 λ_j² / Σ λ_i²` times the balance residual.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bubble::UniversalConstants;
use crate::error::{Error, Result};
use crate::green::GreenFunction;
use crate::linalg::{sym_eigen, Mat};
use crate::psi::{is_positive, m_matrix, psi_grad, psi_grad_hess, psi_value, PeakConfig};
use crate::scalar::{dist, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig<T> {
    pub starts: usize,
    pub max_newton_iters: usize,
    /// Bound on the dimensionless gradient norm described at module level.
    pub grad_tol: T,
    /// Two points closer than this (after optimal peak matching) are the same critical point.
    pub dedup_radius: T,
    /// Relative tolerance on the scales for the same matching.
    pub scale_rel_tol: T,
    pub nondegeneracy_tol: T,
    pub seed: u64,
    /// Distance from `∂Ω` below which starts are not drawn.
    pub interior_margin: T,
    pub scale_bounds: (T, T),
}

impl<T: Real> SearchConfig<T> {
    /// Defaults scaled to a domain of the given diameter.
    pub fn for_diameter(diameter: T) -> Self {
        Self {
            starts: 200,
            max_newton_iters: 100,
            grad_tol: T::lit(1e-10),
            dedup_radius: T::lit(1e-4) * diameter,
            scale_rel_tol: T::lit(1e-4),
            nondegeneracy_tol: T::lit(1e-6),
            seed: 0,
            interior_margin: T::lit(0.01) * diameter,
            scale_bounds: (T::lit(1e-3), T::lit(1e3)),
        }
    }

    pub fn for_domain<G: GreenFunction<T> + ?Sized>(g: &G) -> Self {
        Self::for_diameter(g.diameter())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v.is_finite() && v > T::zero();
        let (lo, hi) = self.scale_bounds;
        if self.starts == 0 || self.max_newton_iters == 0 {
            return Err(Error::InvalidArgument("starts and max_newton_iters must be positive".into()));
        }
        if !positive(self.grad_tol) || !positive(self.dedup_radius) || !positive(self.scale_rel_tol) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if !positive(self.nondegeneracy_tol) || !positive(self.interior_margin) {
            return Err(Error::InvalidArgument(
                "nondegeneracy_tol and interior_margin must be positive".into(),
            ));
        }
        if !(positive(lo) && positive(hi) && lo < hi) {
            return Err(Error::InvalidArgument(format!("invalid scale bounds ({lo}, {hi})")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint<T> {
    pub config: PeakConfig<T>,
    pub psi_value: T,
    pub grad_norm: T,
    /// Ascending eigenvalues of the Hessian in the `(a / diam Ω, ln λ)` variables.
    pub hessian_eigenvalues: Vec<T>,
    pub morse_index: usize,
    pub nondegenerate: bool,
    pub m_matrix_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCount<T> {
    pub k: usize,
    /// Nondegenerate critical points with positive `M_k`.
    pub t_set: Vec<CriticalPoint<T>>,
    pub count: usize,
    /// Critical points found but left out of the count, with their flags.
    pub excluded: Vec<CriticalPoint<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport<T> {
    pub per_k: Vec<KCount<T>>,
    pub k_max: usize,
    pub total: usize,
}

/// Gradient in the z variables together with the normalization `B Σ λ²`.
struct Scaled<T> {
    gz: Vec<T>,
    scale: T,
}

impl<T: Real> Scaled<T> {
    fn norm(&self) -> T {
        self.gz.iter().map(|&v| v * v).sum::<T>().sqrt() / self.scale
    }
}

fn scale_gradient<T: Real>(c: &PeakConfig<T>, grad: &[T], diam: T, b: T) -> Scaled<T> {
    let kn = c.k() * c.dim();
    let gz = grad
        .iter()
        .enumerate()
        .map(|(i, &v)| if i < kn { v * diam } else { v * c.scales()[i - kn] })
        .collect();
    let scale = b * c.scales().iter().map(|&l| l * l).sum::<T>();
    Scaled { gz, scale }
}

/// Dimensionless gradient norm used as the convergence measure.
pub fn grad_norm<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    c: &PeakConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<T> {
    let grad = psi_grad(g, c, consts)?;
    Ok(scale_gradient(c, &grad, g.diameter(), consts.b_const).norm())
}

/// Hessian in the z variables; `fixed_x` restricts it to the λ block.
fn scaled_hessian<T: Real>(c: &PeakConfig<T>, grad: &[T], hess: &Mat<T>, diam: T, fixed_x: bool) -> Mat<T> {
    let kn = c.k() * c.dim();
    let d = |i: usize| if i < kn { diam } else { c.scales()[i - kn] };
    let full = Mat::from_fn(hess.rows(), hess.cols(), |i, j| {
        let mut v = d(i) * hess[(i, j)] * d(j);
        if i == j && i >= kn {
            v = v + grad[i] * c.scales()[i - kn];
        }
        v
    });
    if fixed_x {
        let k = c.k();
        Mat::from_fn(k, k, |i, j| full[(kn + i, kn + j)])
    } else {
        full
    }
}

struct Search<'a, T: Real, G: GreenFunction<T> + ?Sized> {
    g: &'a G,
    cfg: &'a SearchConfig<T>,
    consts: &'a UniversalConstants<T>,
    diam: T,
}

impl<T: Real, G: GreenFunction<T> + ?Sized> Search<'_, T, G> {
    fn feasible(&self, c: &PeakConfig<T>) -> bool {
        let margin = self.g.boundary_margin();
        let (lo, hi) = self.cfg.scale_bounds;
        c.points().iter().all(|a| self.g.component(a).is_some() && self.g.boundary_distance(a) >= margin)
            && c.scales().iter().all(|&l| l >= lo && l <= hi)
    }

    /// Merit `½ ‖∇_z Ψ / (B Σ λ²)‖²`, restricted to the λ-components when `fixed_x`.
    fn merit(&self, c: &PeakConfig<T>, fixed_x: bool) -> Option<T> {
        if !self.feasible(c) {
            return None;
        }
        let grad = psi_grad(self.g, c, self.consts).ok()?;
        let s = scale_gradient(c, &grad, self.diam, self.consts.b_const);
        let skip = if fixed_x { c.k() * c.dim() } else { 0 };
        let v = s.gz[skip..].iter().map(|&v| v * v).sum::<T>() / (s.scale * s.scale);
        v.is_finite().then(|| v / T::lit(2.0))
    }

    /// Damped Newton on `∇Ψ_k = 0` (or on `∇_λ Ψ_k = 0` when `fixed_x`); `None` when the
    /// iteration stalls or is pushed out of the feasible region.
    fn newton(&self, start: PeakConfig<T>, fixed_x: bool) -> Option<PeakConfig<T>> {
        let n = start.dim();
        let kn = start.k() * n;
        let mut c = start;
        if !self.feasible(&c) {
            return None;
        }
        let half = T::lit(0.5);
        for _ in 0..self.cfg.max_newton_iters {
            let (grad, hess) = psi_grad_hess(self.g, &c, self.consts).ok()?;
            let s = scale_gradient(&c, &grad, self.diam, self.consts.b_const);
            let skip = if fixed_x { kn } else { 0 };
            let gz = &s.gz[skip..];
            let current = gz.iter().map(|&v| v * v).sum::<T>().sqrt() / s.scale;
            if current <= self.cfg.grad_tol {
                return Some(c);
            }
            let hz = scaled_hessian(&c, &grad, &hess, self.diam, fixed_x);
            let eig = sym_eigen(&hz);
            let top = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let cut = T::lit(1e-12) * top;
            let mut step = vec![T::zero(); gz.len()];
            for (j, &e) in eig.values.iter().enumerate() {
                if e.abs() <= cut {
                    continue;
                }
                let coef = (0..gz.len()).map(|i| eig.vectors[(i, j)] * gz[i]).sum::<T>() / e;
                for (i, st) in step.iter_mut().enumerate() {
                    *st = *st - coef * eig.vectors[(i, j)];
                }
            }
            // Step caps: a tenth of the diameter per peak, one unit in ln λ.
            let mut shrink = T::one();
            for (i, &st) in step.iter().enumerate() {
                let cap = if i + skip < kn { T::lit(0.1) } else { T::one() };
                if st.abs() > cap {
                    shrink = shrink.min(cap / st.abs());
                }
            }
            step.iter_mut().for_each(|v| *v = *v * shrink);

            let merit0 = half * current * current;
            let z0 = c.to_flat();
            let mut t = T::one();
            let mut accepted = None;
            for _ in 0..40 {
                let mut z = z0.clone();
                for (i, &st) in step.iter().enumerate() {
                    let idx = i + skip;
                    z[idx] = if idx < kn { z[idx] + t * st * self.diam } else { z[idx] * (t * st).exp() };
                }
                if let Ok(trial) = PeakConfig::from_flat(n, &z) {
                    if let Some(m) = self.merit(&trial, fixed_x) {
                        if m < (T::one() - T::lit(1e-4) * t) * merit0 {
                            accepted = Some(trial);
                            break;
                        }
                    }
                }
                t = t * half;
            }
            c = accepted?;
        }
        (self.merit(&c, fixed_x)? * T::lit(2.0)).sqrt().le(&self.cfg.grad_tol).then_some(c)
    }

    fn random_start(&self, rng: &mut ChaCha8Rng, k: usize) -> Option<PeakConfig<T>> {
        let (lo, hi) = self.cfg.scale_bounds;
        let (llo, lhi) = (lo.as_f64().ln(), hi.as_f64().ln());
        let points = (0..k).map(|_| self.g.sample_interior(rng, self.cfg.interior_margin)).collect();
        let scales = (0..k).map(|_| T::lit(rng.random_range(llo..lhi).exp())).collect();
        PeakConfig::new(points, scales).ok()
    }

    fn classify(&self, c: PeakConfig<T>) -> Result<CriticalPoint<T>> {
        let (grad, hess) = psi_grad_hess(self.g, &c, self.consts)?;
        let s = scale_gradient(&c, &grad, self.diam, self.consts.b_const);
        // Normalized like the gradient so the spectrum is scale free.
        let hz = scaled_hessian(&c, &grad, &hess, self.diam, false);
        let hz = Mat::from_fn(hz.rows(), hz.cols(), |i, j| hz[(i, j)] / s.scale);
        let values = sym_eigen(&hz).values;
        let top = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let low = values.iter().fold(T::infinity(), |m, v| m.min(v.abs()));
        let m = m_matrix(self.g, c.points())?;
        Ok(CriticalPoint {
            psi_value: psi_value(self.g, &c, self.consts)?,
            grad_norm: s.norm(),
            morse_index: values.iter().filter(|&&v| v < T::zero()).count(),
            nondegenerate: low > self.cfg.nondegeneracy_tol * top,
            m_matrix_positive: is_positive(&m, m.default_tolerance()),
            hessian_eigenvalues: values,
            config: c,
        })
    }

    fn same(&self, a: &PeakConfig<T>, b: &PeakConfig<T>) -> bool {
        let close = |i: usize, j: usize| {
            dist(&a.points()[i], &b.points()[j]) <= self.cfg.dedup_radius
                && (a.scales()[i] - b.scales()[j]).abs() <= self.cfg.scale_rel_tol * a.scales()[i]
        };
        permutations(a.k()).iter().any(|p| (0..a.k()).all(|i| close(i, p[i])))
    }

    fn same_scales(&self, a: &[T], b: &[T]) -> bool {
        a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= self.cfg.scale_rel_tol * x)
    }
}

fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// All permutations of `0..k` for `k <= 6`; the identity alone beyond that, where peaks are
/// compared in canonical order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k > 6 {
        return vec![(0..k).collect()];
    }
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..k)
                    .filter(|i| !p.contains(i))
                    .map(|i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn lex<T: Real>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.as_f64().total_cmp(&y.as_f64()))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Peaks sorted lexicographically by location.
fn canonical<T: Real>(c: &PeakConfig<T>) -> PeakConfig<T> {
    let mut order: Vec<usize> = (0..c.k()).collect();
    order.sort_by(|&i, &j| lex(&c.points()[i], &c.points()[j]));
    c.permuted(&order)
}

pub fn find_critical<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    k: usize,
    cfg: &SearchConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<Vec<CriticalPoint<T>>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    cfg.validate()?;
    let search = Search { g, cfg, consts, diam: g.diameter() };
    let converged: Vec<PeakConfig<T>> = (0..cfg.starts)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = rng_for(cfg.seed, i);
            let start = search.random_start(&mut rng, k)?;
            search.newton(start, false).map(|c| canonical(&c))
        })
        .collect();
    let mut unique: Vec<PeakConfig<T>> = Vec::new();
    for c in converged {
        if !unique.iter().any(|u| search.same(u, &c)) {
            unique.push(c);
        }
    }
    let mut points = unique
        .into_iter()
        .map(|c| search.classify(c))
        .collect::<Result<Vec<_>>>()?;
    points.retain(|p| p.grad_norm <= cfg.grad_tol);
    points.sort_by(|a, b| {
        a.psi_value
            .as_f64()
            .total_cmp(&b.psi_value.as_f64())
            .then_with(|| lex(&a.config.to_flat(), &b.config.to_flat()))
    });
    Ok(points)
}

/// `S_k` at fixed base points: every `Λ` with `∇_λ Ψ_k = 0` at which the full gradient also
/// vanishes.
pub fn s_set<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    base_points: &[Vec<T>],
    cfg: &SearchConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<Vec<Vec<T>>> {
    cfg.validate()?;
    if base_points.is_empty() {
        return Err(Error::InvalidArgument("at least one base point is required".into()));
    }
    for a in base_points {
        g.check_interior(a)?;
    }
    let k = base_points.len();
    let search = Search { g, cfg, consts, diam: g.diameter() };
    let (lo, hi) = cfg.scale_bounds;
    let (llo, lhi) = (lo.as_f64().ln(), hi.as_f64().ln());
    let solved: Vec<PeakConfig<T>> = (0..cfg.starts)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = rng_for(cfg.seed, i);
            let scales = (0..k).map(|_| T::lit(rng.random_range(llo..lhi).exp())).collect();
            let start = PeakConfig::new(base_points.to_vec(), scales).ok()?;
            search.newton(start, true)
        })
        .collect();
    let mut unique: Vec<PeakConfig<T>> = Vec::new();
    for c in solved {
        if !unique.iter().any(|u| search.same_scales(u.scales(), c.scales())) {
            unique.push(c);
        }
    }
    let mut worst_x = T::zero();
    let mut accepted = Vec::new();
    for c in unique {
        let grad = psi_grad(g, &c, consts)?;
        let s = scale_gradient(&c, &grad, search.diam, consts.b_const);
        if s.norm() <= cfg.grad_tol {
            accepted.push(c.scales().to_vec());
        } else {
            let kn = k * c.dim();
            let xg = s.gz[..kn].iter().map(|&v| v * v).sum::<T>().sqrt() / s.scale;
            worst_x = worst_x.max(xg);
        }
    }
    if accepted.is_empty() && worst_x > T::zero() {
        return Err(Error::InconsistentBasePoints { x_gradient: worst_x.as_f64() });
    }
    accepted.sort_by(|a, b| lex(a, b));
    Ok(accepted)
}

pub fn count_solutions<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    k_max: usize,
    cfg: &SearchConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<CountReport<T>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let mut per_k = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (t_set, excluded): (Vec<_>, Vec<_>) = find_critical(g, k, cfg, consts)?
            .into_iter()
            .partition(|p| p.nondegenerate && p.m_matrix_positive);
        per_k.push(KCount { k, count: t_set.len(), t_set, excluded });
    }
    let total = per_k.iter().map(|c| c.count).sum();
    Ok(CountReport { per_k, k_max, total })
}
