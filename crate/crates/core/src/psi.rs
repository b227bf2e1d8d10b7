//! Reduced energy `Ψ_k(a, λ) = A²⟨M_k(a) μ, μ⟩ − B Σ λ_j²` with `μ_j = λ_j^{(N−2)/2}`, its
//! analytic gradient and Hessian, and the interaction matrix `M_k`.
//!
//! Flat layout of the `kN + k` variables: the peak-major x-block `a_1, …, a_k`, then `λ_1, …, λ_k`.

use serde::{Deserialize, Serialize};

use crate::bubble::UniversalConstants;
use crate::error::{Error, Result};
use crate::green::{green, green_kernel, robin, robin_value, GreenFunction, Kernel, Order, RobinEvaluation};
use crate::linalg::{sym_eigen, Mat};
use crate::scalar::{dist, Real};

/// Peak locations `a_1..a_k` and scales `λ_1..λ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPeakConfig<T>", bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct PeakConfig<T> {
    points: Vec<Vec<T>>,
    scales: Vec<T>,
}

#[derive(Deserialize)]
struct RawPeakConfig<T> {
    points: Vec<Vec<T>>,
    scales: Vec<T>,
}

impl<T: Real> TryFrom<RawPeakConfig<T>> for PeakConfig<T> {
    type Error = Error;

    fn try_from(raw: RawPeakConfig<T>) -> Result<Self> {
        PeakConfig::new(raw.points, raw.scales)
    }
}

impl<T: Real> PeakConfig<T> {
    pub fn new(points: Vec<Vec<T>>, scales: Vec<T>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("a peak configuration needs at least one peak".into()));
        }
        if points.len() != scales.len() {
            return Err(Error::InvalidArgument(format!(
                "{} points but {} scales",
                points.len(),
                scales.len()
            )));
        }
        let n = points[0].len();
        if n == 0 || points.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidArgument("peak points must share one positive dimension".into()));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("peak points must be finite".into()));
        }
        if let Some(s) = scales.iter().find(|s| !(s.is_finite() && **s > T::zero())) {
            return Err(Error::InvalidArgument(format!("scale {s} is not a positive finite number")));
        }
        for i in 0..points.len() {
            for j in 0..i {
                if !(dist(&points[i], &points[j]) > T::zero()) {
                    return Err(Error::Singular);
                }
            }
        }
        Ok(Self { points, scales })
    }

    /// Rebuilds a configuration from the flat `kN + k` layout.
    pub fn from_flat(n: usize, v: &[T]) -> Result<Self> {
        if n == 0 || v.len() % (n + 1) != 0 {
            return Err(Error::InvalidArgument(format!(
                "flat vector of length {} does not fit dimension {n}",
                v.len()
            )));
        }
        let k = v.len() / (n + 1);
        let points = v[..k * n].chunks(n).map(<[T]>::to_vec).collect();
        Self::new(points, v[k * n..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<T> {
        self.points.iter().flatten().copied().chain(self.scales.iter().copied()).collect()
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn scales(&self) -> &[T] {
        &self.scales
    }

    /// Peak `i` of the result is peak `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            points: perm.iter().map(|&p| self.points[p].clone()).collect(),
            scales: perm.iter().map(|&p| self.scales[p]).collect(),
        }
    }
}

/// `M_k` with `m_ii = R(a_i)` and `m_ij = −G(a_i, a_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionMatrix<T: Real> {
    pub entries: Mat<T>,
    pub smallest_eigenvalue: T,
}

impl<T: Real> InteractionMatrix<T> {
    /// `1e-10` times the spectral norm.
    pub fn default_tolerance(&self) -> T {
        let e = sym_eigen(&self.entries);
        let norm = e.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        T::lit(1e-10) * norm
    }
}

pub fn m_matrix<T: Real, G: GreenFunction<T> + ?Sized>(g: &G, points: &[Vec<T>]) -> Result<InteractionMatrix<T>> {
    let k = points.len();
    let mut entries = Mat::zeros(k, k);
    for i in 0..k {
        entries[(i, i)] = robin_value(g, &points[i])?;
        for j in 0..i {
            let v = -green(g, &points[i], &points[j])?;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    let smallest_eigenvalue = sym_eigen(&entries).values[0];
    Ok(InteractionMatrix { entries, smallest_eigenvalue })
}

pub fn is_positive<T: Real>(m: &InteractionMatrix<T>, tol: T) -> bool {
    m.smallest_eigenvalue > tol
}

/// Robin data on the diagonal and the Green kernel for every pair `i < j` (pole `a_i`, field point `a_j`).
struct Pieces<T> {
    robin: Vec<RobinEvaluation<T>>,
    pairs: Vec<(usize, usize, Kernel<T>)>,
}

fn gather<T: Real, G: GreenFunction<T> + ?Sized>(g: &G, c: &PeakConfig<T>, order: Order) -> Result<Pieces<T>> {
    if c.dim() != g.dim() {
        return Err(Error::InvalidArgument(format!(
            "configuration dimension {} differs from domain dimension {}",
            c.dim(),
            g.dim()
        )));
    }
    let robin = c.points.iter().map(|a| robin(g, a)).collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..c.k() {
        for j in (i + 1)..c.k() {
            pairs.push((i, j, green_kernel(g, &c.points[i], &c.points[j], order)?));
        }
    }
    Ok(Pieces { robin, pairs })
}

/// `μ = λ^p`, `μ'`, `μ''` with `p = (N−2)/2`.
fn mu<T: Real>(lambda: T, p: T) -> (T, T, T) {
    let m = lambda.powf(p);
    (m, p * m / lambda, p * (p - T::one()) * m / (lambda * lambda))
}

fn check_consts<T: Real>(c: &PeakConfig<T>, consts: &UniversalConstants<T>) -> Result<()> {
    if consts.n != c.dim() {
        return Err(Error::InvalidArgument(format!(
            "constants for N = {} used with a configuration in dimension {}",
            consts.n,
            c.dim()
        )));
    }
    Ok(())
}

pub fn psi_value<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    c: &PeakConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<T> {
    check_consts(c, consts)?;
    let m = m_matrix(g, &c.points)?;
    let p = consts.half_exponent();
    let mus: Vec<T> = c.scales.iter().map(|&l| l.powf(p)).collect();
    let quad: T = (0..c.k())
        .map(|i| (0..c.k()).map(|j| m.entries[(i, j)] * mus[i] * mus[j]).sum::<T>())
        .sum();
    let a2 = consts.a_const * consts.a_const;
    Ok(a2 * quad - consts.b_const * c.scales.iter().map(|&l| l * l).sum::<T>())
}

pub fn psi_grad<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    c: &PeakConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<Vec<T>> {
    check_consts(c, consts)?;
    let pieces = gather(g, c, Order::First)?;
    Ok(assemble(c, consts, &pieces, false).0)
}

pub fn psi_hess<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    c: &PeakConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<Mat<T>> {
    check_consts(c, consts)?;
    let pieces = gather(g, c, Order::Second)?;
    Ok(assemble(c, consts, &pieces, true).1.expect("hessian requested"))
}

/// Gradient and Hessian from one set of Green evaluations.
pub fn psi_grad_hess<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    c: &PeakConfig<T>,
    consts: &UniversalConstants<T>,
) -> Result<(Vec<T>, Mat<T>)> {
    check_consts(c, consts)?;
    let pieces = gather(g, c, Order::Second)?;
    let (grad, hess) = assemble(c, consts, &pieces, true);
    Ok((grad, hess.expect("hessian requested")))
}

fn assemble<T: Real>(
    c: &PeakConfig<T>,
    consts: &UniversalConstants<T>,
    pieces: &Pieces<T>,
    want_hess: bool,
) -> (Vec<T>, Option<Mat<T>>) {
    let k = c.k();
    let n = c.dim();
    let dim = k * n + k;
    let xi = |j: usize, s: usize| j * n + s;
    let li = |j: usize| k * n + j;
    let two = T::lit(2.0);
    let a2 = consts.a_const * consts.a_const;
    let b = consts.b_const;
    let p = consts.half_exponent();
    let mus: Vec<(T, T, T)> = c.scales.iter().map(|&l| mu(l, p)).collect();

    let mut grad = vec![T::zero(); dim];
    let mut hess = want_hess.then(|| Mat::zeros(dim, dim));
    let add = |h: &mut Option<Mat<T>>, r: usize, q: usize, v: T| {
        if let Some(h) = h {
            h[(r, q)] = h[(r, q)] + v;
            if r != q {
                h[(q, r)] = h[(q, r)] + v;
            }
        }
    };

    for (j, rb) in pieces.robin.iter().enumerate() {
        let (m, m1, m2) = mus[j];
        let lambda = c.scales[j];
        for s in 0..n {
            grad[xi(j, s)] = grad[xi(j, s)] + a2 * m * m * rb.gradient[s];
            add(&mut hess, xi(j, s), li(j), two * a2 * m * m1 * rb.gradient[s]);
            for t in s..n {
                add(&mut hess, xi(j, s), xi(j, t), a2 * m * m * rb.hessian[s][t]);
            }
        }
        grad[li(j)] = grad[li(j)] + two * a2 * rb.value * m * m1 - two * b * lambda;
        add(&mut hess, li(j), li(j), two * a2 * rb.value * (m1 * m1 + m * m2) - two * b);
    }

    for (i, j, kern) in &pieces.pairs {
        let (i, j) = (*i, *j);
        let (mi, mi1, mi2) = mus[i];
        let (mj, mj1, mj2) = mus[j];
        let w = -two * a2;
        for s in 0..n {
            grad[xi(i, s)] = grad[xi(i, s)] + w * mi * mj * kern.dx[s];
            grad[xi(j, s)] = grad[xi(j, s)] + w * mi * mj * kern.dy[s];
        }
        grad[li(i)] = grad[li(i)] + w * kern.value * mi1 * mj;
        grad[li(j)] = grad[li(j)] + w * kern.value * mi * mj1;
        if !want_hess {
            continue;
        }
        for s in 0..n {
            for t in s..n {
                add(&mut hess, xi(i, s), xi(i, t), w * mi * mj * kern.dxx[(s, t)]);
                add(&mut hess, xi(j, s), xi(j, t), w * mi * mj * kern.dyy[(s, t)]);
            }
            for t in 0..n {
                add(&mut hess, xi(i, s), xi(j, t), w * mi * mj * kern.dxy[(s, t)]);
            }
            add(&mut hess, xi(i, s), li(i), w * mi1 * mj * kern.dx[s]);
            add(&mut hess, xi(i, s), li(j), w * mi * mj1 * kern.dx[s]);
            add(&mut hess, xi(j, s), li(i), w * mi1 * mj * kern.dy[s]);
            add(&mut hess, xi(j, s), li(j), w * mi * mj1 * kern.dy[s]);
        }
        add(&mut hess, li(i), li(j), w * kern.value * mi1 * mj1);
        add(&mut hess, li(i), li(i), w * kern.value * mi2 * mj);
        add(&mut hess, li(j), li(j), w * kern.value * mi * mj2);
    }
    (grad, hess)
}

/// Componentwise λ-balance `(M_k μ)_j · A²(N−2) λ_j^{(N−6)/2} / (2B) − 1`; zero at every
/// λ-critical point of `Ψ_k`.
pub fn balance_identity<T: Real>(
    m: &InteractionMatrix<T>,
    scales: &[T],
    consts: &UniversalConstants<T>,
) -> Vec<T> {
    let p = consts.half_exponent();
    let k = scales.len();
    let mus: Vec<T> = scales.iter().map(|&l| l.powf(p)).collect();
    let n = T::from_usize_exact(consts.n);
    let two = T::lit(2.0);
    let factor = consts.a_const * consts.a_const * (n - two) / (two * consts.b_const);
    (0..k)
        .map(|j| {
            let mmu: T = (0..k).map(|i| m.entries[(j, i)] * mus[i]).sum();
            mmu * factor * scales[j].powf((n - T::lit(6.0)) / two) - T::one()
        })
        .collect()
}
