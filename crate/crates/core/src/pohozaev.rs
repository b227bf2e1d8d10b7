//! Pohozaev-type surface forms on small spheres around a pole, their closed-form values for
//! Green functions, and the λ-balance consequence at critical points.
//!
//! With `ν` the outer normal of `∂B_θ`:
//!
//! `P(u, v) = ∫ −θ ∂_ν u ∂_ν v + (θ/2) ∇u·∇v + ((2−N)/4)(∂_ν u v + ∂_ν v u)`
//!
//! `Q_i(u, v) = ∫ −∂_ν v ∂_i u − ∂_ν u ∂_i v + (∇u·∇v) ν_i`
//!
//! `P_1` and `Q_1` are the same integrals applied to a Green function and a pole derivative
//! `∂_h G(x_l, ·)`. For fields harmonic on the punctured ball all four are independent of `θ`.

use serde::Serialize;

use crate::bubble::UniversalConstants;
use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::green::{green, green_kernel, robin, robin_value, GreenFunction, Kernel, Order, RobinEvaluation};
use crate::quadrature::{Estimate, Scheme, SphereQuadrature};
use crate::scalar::{dist, dot, Real};

/// A scalar field with its gradient, evaluated on the quadrature sphere.
pub trait SurfaceField<T>: Sync {
    fn eval(&self, y: &[T]) -> Result<(T, Vec<T>)>;
}

impl<T, F> SurfaceField<T> for F
where
    F: Fn(&[T]) -> Result<(T, Vec<T>)> + Sync,
{
    fn eval(&self, y: &[T]) -> Result<(T, Vec<T>)> {
        self(y)
    }
}

/// `G(pole, ·)`.
pub struct GreenField<'a, T, G: ?Sized> {
    pub g: &'a G,
    pub pole: Vec<T>,
}

impl<T: Real, G: GreenFunction<T> + ?Sized> SurfaceField<T> for GreenField<'_, T, G> {
    fn eval(&self, y: &[T]) -> Result<(T, Vec<T>)> {
        let k = green_kernel(self.g, &self.pole, y, Order::First)?;
        Ok((k.value, k.dy))
    }
}

/// `∂_h G(pole, ·)`, the derivative in the pole coordinate `h`.
pub struct PoleDerivativeField<'a, T, G: ?Sized> {
    pub g: &'a G,
    pub pole: Vec<T>,
    pub h: usize,
}

impl<T: Real, G: GreenFunction<T> + ?Sized> SurfaceField<T> for PoleDerivativeField<'_, T, G> {
    fn eval(&self, y: &[T]) -> Result<(T, Vec<T>)> {
        let k = green_kernel(self.g, &self.pole, y, Order::Second)?;
        Ok((k.dx[self.h], k.dxy.row(self.h).to_vec()))
    }
}

fn p_integrand<T: Real>(theta: T, nu: &[T], u: &(T, Vec<T>), v: &(T, Vec<T>)) -> T {
    let n = T::from_usize_exact(nu.len());
    let du = dot(&u.1, nu);
    let dv = dot(&v.1, nu);
    let two = T::lit(2.0);
    -theta * du * dv + theta / two * dot(&u.1, &v.1) + (two - n) / T::lit(4.0) * (du * v.0 + dv * u.0)
}

fn q_integrand<T: Real>(i: usize, nu: &[T], u: &(T, Vec<T>), v: &(T, Vec<T>)) -> T {
    let du = dot(&u.1, nu);
    let dv = dot(&v.1, nu);
    -dv * u.1[i] - du * v.1[i] + dot(&u.1, &v.1) * nu[i]
}

fn check_direction<T: Real>(q: &SphereQuadrature<T>, i: usize) -> Result<()> {
    if i >= q.dim() {
        return Err(Error::InvalidArgument(format!("direction {i} out of range for dimension {}", q.dim())));
    }
    Ok(())
}

pub fn form_p<T: Real>(u: &dyn SurfaceField<T>, v: &dyn SurfaceField<T>, q: &SphereQuadrature<T>) -> Result<Estimate<T>> {
    q.integrate(|nu, y| Ok(p_integrand(q.radius, nu, &u.eval(y)?, &v.eval(y)?)))
}

pub fn form_q<T: Real>(
    u: &dyn SurfaceField<T>,
    v: &dyn SurfaceField<T>,
    i: usize,
    q: &SphereQuadrature<T>,
) -> Result<Estimate<T>> {
    check_direction(q, i)?;
    q.integrate(|nu, y| Ok(q_integrand(i, nu, &u.eval(y)?, &v.eval(y)?)))
}

/// `P_1(u, v)`; intended for `v = ∂_h G(x_l, ·)`.
pub fn form_p1<T: Real>(u: &dyn SurfaceField<T>, v: &dyn SurfaceField<T>, q: &SphereQuadrature<T>) -> Result<Estimate<T>> {
    form_p(u, v, q)
}

/// `Q_1(u, v)` in direction `i`; intended for `v = ∂_h G(x_l, ·)`.
pub fn form_q1<T: Real>(
    u: &dyn SurfaceField<T>,
    v: &dyn SurfaceField<T>,
    i: usize,
    q: &SphereQuadrature<T>,
) -> Result<Estimate<T>> {
    form_q(u, v, i, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    P,
    Q,
    P1,
    Q1,
}

/// Which of `u = G(x_m, ·)` and `v = G(x_l, ·)` (or `∂_h G(x_l, ·)`) have their pole at the
/// sphere center `x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `l = m = j`
    SelfPair,
    /// `m = j`, `l ≠ j`
    MAtCenter,
    /// `m ≠ j`, `l = j`
    LAtCenter,
    /// `l, m ≠ j`
    Away,
}

/// Coefficient set used for the `P_1` self and `l = j` cases and the `Q_1` self case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForms {
    /// `((N−2)/4 + (1−N)/(2N)) ∂_h R`, `((N−2)/4 + (1−N)/N) ∂_h G(x_j, x_m)` and `−∂²_{ih} R`.
    #[default]
    Published,
    /// `−(N−1)/4 ∂_h R`, `(N/4) ∂_h G(x_j, x_m)` and `−½ ∂²_{ih} R`, obtained by evaluating
    /// the forms on `S − H` directly.
    Rederived,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySettings<T> {
    pub scheme: Scheme,
    /// Sphere radius; by default `0.1 · dist(x_j, ∂Ω)`, capped at a quarter of the distance to
    /// the nearest other pole.
    pub theta: Option<T>,
    pub closed_forms: ClosedForms,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual<T> {
    pub name: String,
    pub family: Family,
    pub case: Case,
    /// Index `j` of the pole at the sphere center.
    pub center: usize,
    pub m: usize,
    pub l: usize,
    pub i: Option<usize>,
    pub h: Option<usize>,
    pub theta: T,
    pub numeric_lhs: T,
    pub closed_form_rhs: T,
    pub std_error: T,
    pub abs_residual: T,
    /// `abs_residual / |rhs|`, or `abs_residual` over the largest `|rhs|` of the family at this
    /// center when `|rhs|` is below `1e-6` of it.
    pub rel_residual: T,
    /// Largest `|rhs|` of the family at this center.
    pub family_scale: T,
    /// `|value(θ) − value(θ/2)|`.
    pub theta_pair_drift: T,
    /// Combined standard error of the two values entering the drift.
    pub drift_se: T,
}

impl<T: Real> IdentityResidual<T> {
    /// Drift within `k_sigma` combined standard errors, plus a rounding floor for exact rules.
    pub fn drift_within(&self, k_sigma: T) -> bool {
        let floor = T::lit(1e3) * T::epsilon() * (self.numeric_lhs.abs() + self.family_scale);
        self.theta_pair_drift <= k_sigma * self.drift_se + floor
    }
}

struct Term {
    family: Family,
    m: usize,
    l: usize,
    i: Option<usize>,
    h: Option<usize>,
}

fn terms(k: usize, n: usize) -> Vec<Term> {
    let mut out = Vec::new();
    for m in 0..k {
        for l in 0..k {
            out.push(Term { family: Family::P, m, l, i: None, h: None });
            for i in 0..n {
                out.push(Term { family: Family::Q, m, l, i: Some(i), h: None });
            }
            for h in 0..n {
                out.push(Term { family: Family::P1, m, l, i: None, h: Some(h) });
            }
            for i in 0..n {
                for h in 0..n {
                    out.push(Term { family: Family::Q1, m, l, i: Some(i), h: Some(h) });
                }
            }
        }
    }
    out
}

fn case_of(j: usize, m: usize, l: usize) -> Case {
    match (m == j, l == j) {
        (true, true) => Case::SelfPair,
        (true, false) => Case::MAtCenter,
        (false, true) => Case::LAtCenter,
        (false, false) => Case::Away,
    }
}

/// Closed-form value of one term; `kern(a, b)` is the Green kernel with pole `x_a` at `x_b`.
fn closed_form<T: Real>(
    t: &Term,
    j: usize,
    n: usize,
    rj: &RobinEvaluation<T>,
    kern: &dyn Fn(usize, usize) -> Result<Kernel<T>>,
    forms: ClosedForms,
) -> Result<T> {
    let nn = T::from_usize_exact(n);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let quarter = (nn - two) / four;
    let (m, l) = (t.m, t.l);
    Ok(match (t.family, case_of(j, m, l)) {
        (_, Case::Away) => T::zero(),
        (Family::P, Case::SelfPair) => -(nn - two) * rj.value / two,
        (Family::P, Case::MAtCenter) => quarter * kern(j, l)?.value,
        (Family::P, Case::LAtCenter) => quarter * kern(j, m)?.value,
        (Family::Q, Case::SelfPair) => -rj.gradient[t.i.unwrap()],
        (Family::Q, Case::LAtCenter) => kern(m, j)?.dy[t.i.unwrap()],
        (Family::Q, Case::MAtCenter) => kern(l, j)?.dy[t.i.unwrap()],
        (Family::P1, case) => {
            let h = t.h.unwrap();
            match (case, forms) {
                (Case::SelfPair, ClosedForms::Published) => {
                    (quarter + (T::one() - nn) / (two * nn)) * rj.gradient[h]
                }
                (Case::SelfPair, ClosedForms::Rederived) => -(nn - T::one()) / four * rj.gradient[h],
                (Case::MAtCenter, _) => quarter * kern(l, j)?.dx[h],
                (Case::LAtCenter, ClosedForms::Published) => (quarter + (T::one() - nn) / nn) * kern(j, m)?.dx[h],
                (Case::LAtCenter, ClosedForms::Rederived) => nn / four * kern(j, m)?.dx[h],
                (Case::Away, _) => T::zero(),
            }
        }
        (Family::Q1, case) => {
            let (i, h) = (t.i.unwrap(), t.h.unwrap());
            match (case, forms) {
                (Case::SelfPair, ClosedForms::Published) => -rj.hessian[i][h],
                (Case::SelfPair, ClosedForms::Rederived) => -rj.hessian[i][h] / two,
                (Case::LAtCenter, _) => kern(m, j)?.dyy[(i, h)],
                (Case::MAtCenter, _) => kern(l, j)?.dxy[(h, i)],
                (Case::Away, _) => T::zero(),
            }
        }
    })
}

/// All terms at once on one sphere: per node, one second-order kernel per pole.
fn integrate_terms<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    poles: &[Vec<T>],
    list: &[Term],
    q: &SphereQuadrature<T>,
) -> Result<Vec<Estimate<T>>> {
    let theta = q.radius;
    q.integrate_many(list.len(), |nu, y| {
        let kernels = poles
            .iter()
            .map(|p| green_kernel(g, p, y, Order::Second))
            .collect::<Result<Vec<_>>>()?;
        let gf = |p: usize| (kernels[p].value, kernels[p].dy.clone());
        let df = |p: usize, h: usize| (kernels[p].dx[h], kernels[p].dxy.row(h).to_vec());
        Ok(list
            .iter()
            .map(|t| match t.family {
                Family::P => p_integrand(theta, nu, &gf(t.m), &gf(t.l)),
                Family::Q => q_integrand(t.i.unwrap(), nu, &gf(t.m), &gf(t.l)),
                Family::P1 => p_integrand(theta, nu, &gf(t.m), &df(t.l, t.h.unwrap())),
                Family::Q1 => q_integrand(t.i.unwrap(), nu, &gf(t.m), &df(t.l, t.h.unwrap())),
            })
            .collect())
    })
}

/// Evaluates every case of the four identity families on a sphere around each pole and
/// compares with the closed forms computed from the Green provider.
pub fn verify_identities<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    poles: &[Vec<T>],
    settings: &IdentitySettings<T>,
) -> Result<Vec<IdentityResidual<T>>> {
    if poles.is_empty() {
        return Err(Error::InvalidArgument("at least one pole is required".into()));
    }
    let n = g.dim();
    for p in poles {
        g.check_interior(p)?;
    }
    let list = terms(poles.len(), n);
    let mut out = Vec::with_capacity(list.len() * poles.len());
    for (j, xj) in poles.iter().enumerate() {
        let others: Vec<Vec<T>> = poles.iter().enumerate().filter(|(p, _)| *p != j).map(|(_, x)| x.clone()).collect();
        let min_sep = others.iter().fold(T::infinity(), |m, p| m.min(dist(p, xj)));
        if min_sep == T::zero() {
            return Err(Error::Singular);
        }
        let theta = match settings.theta {
            Some(t) => t,
            None => (T::lit(0.1) * g.boundary_distance(xj)).min(min_sep / T::lit(4.0)),
        };
        if !(T::lit(4.0) * theta < min_sep) && min_sep.is_finite() {
            return Err(Error::Geometry(format!(
                "poles must be separated by more than 4θ = {}",
                T::lit(4.0) * theta
            )));
        }
        let stream = 2 * j as u64;
        let base = SphereQuadrature::new(xj.clone(), theta, settings.scheme)?.with_radius(theta, stream)?;
        base.check_placement(g, &others)?;
        let half = base.with_radius(theta / T::lit(2.0), stream + 1)?;
        let full_est = integrate_terms(g, poles, &list, &base)?;
        let half_est = integrate_terms(g, poles, &list, &half)?;

        let rj = robin(g, xj)?;
        let kern = |a: usize, b: usize| green_kernel(g, &poles[a], &poles[b], Order::Second);
        let rhs = list
            .iter()
            .map(|t| closed_form(t, j, n, &rj, &kern, settings.closed_forms))
            .collect::<Result<Vec<_>>>()?;
        let family_scale = |f: Family| {
            list.iter()
                .zip(&rhs)
                .filter(|(t, _)| t.family == f)
                .fold(T::zero(), |m, (_, r)| m.max(r.abs()))
        };
        let scales = [Family::P, Family::Q, Family::P1, Family::Q1].map(|f| (f, family_scale(f)));
        for ((t, r), (e, e2)) in list.iter().zip(&rhs).zip(full_est.iter().zip(&half_est)) {
            let scale = scales.iter().find(|(f, _)| *f == t.family).map(|s| s.1).unwrap_or(T::zero());
            let abs = (e.value - *r).abs();
            let rel = if r.abs() >= T::lit(1e-6) * scale && *r != T::zero() {
                abs / r.abs()
            } else if scale > T::zero() {
                abs / scale
            } else {
                abs
            };
            let case = case_of(j, t.m, t.l);
            let mut name = format!("{:?} {} j={j} m={} l={}", t.family, case_label(case), t.m, t.l);
            if let Some(i) = t.i {
                name.push_str(&format!(" i={i}"));
            }
            if let Some(h) = t.h {
                name.push_str(&format!(" h={h}"));
            }
            out.push(IdentityResidual {
                name,
                family: t.family,
                case,
                center: j,
                m: t.m,
                l: t.l,
                i: t.i,
                h: t.h,
                theta,
                numeric_lhs: e.value,
                closed_form_rhs: *r,
                std_error: e.std_error,
                abs_residual: abs,
                rel_residual: rel,
                family_scale: scale,
                theta_pair_drift: (e.value - e2.value).abs(),
                drift_se: (e.std_error * e.std_error + e2.std_error * e2.std_error).sqrt(),
            });
        }
    }
    Ok(out)
}

fn case_label(c: Case) -> &'static str {
    match c {
        Case::SelfPair => "l=m=j",
        Case::MAtCenter => "m=j,l!=j",
        Case::LAtCenter => "m!=j,l=j",
        Case::Away => "l,m!=j",
    }
}

/// Per-peak balance residual at concentration scales `λ_{j,ε} = ε^{−1/(N−4)} / λ_j`:
/// `R(x_j)/λ_{j,ε}^{N−2} − Σ_{l≠j} G(x_j,x_l)/(λ_{j,ε}λ_{l,ε})^{(N−2)/2} − 2Bε/(A²(N−2)λ_{j,ε}²)`,
/// divided by the largest of the three terms.
pub fn balance_residual<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    cp: &CriticalPoint<T>,
    epsilon: T,
    consts: &UniversalConstants<T>,
) -> Result<Vec<T>> {
    if !(epsilon.is_finite() && epsilon > T::zero()) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let c = &cp.config;
    if c.dim() != consts.n {
        return Err(Error::InvalidArgument("constants and configuration differ in dimension".into()));
    }
    let n = T::from_usize_exact(consts.n);
    let two = T::lit(2.0);
    let p = (n - two) / two;
    let shrink = epsilon.powf(-T::one() / (n - T::lit(4.0)));
    let lam: Vec<T> = c.scales().iter().map(|&l| shrink / l).collect();
    let k = c.k();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let t1 = robin_value(g, &c.points()[j])? / lam[j].powf(n - two);
        let mut t2 = T::zero();
        for l in (0..k).filter(|&l| l != j) {
            t2 = t2 + green(g, &c.points()[j], &c.points()[l])? / (lam[j] * lam[l]).powf(p);
        }
        let a2 = consts.a_const * consts.a_const;
        let t3 = two * consts.b_const * epsilon / (a2 * (n - two) * lam[j] * lam[j]);
        let largest = t1.abs().max(t2.abs()).max(t3.abs());
        out.push((t1 - t2 - t3) / largest);
    }
    Ok(out)
}
