//! Aubin–Talenti bubbles and the dimension constants built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::GreenFunction;
use crate::scalar::{dist, Real};

/// Space dimension of the problem. Always at least 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub const MIN: usize = 5;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN {
            return Err(Error::InvalidDimension { n, min: Self::MIN });
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `N = 5` is accepted but several asymptotic statements only hold from `N = 6` on.
    pub fn is_borderline(self) -> bool {
        self.0 == 5
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// Center `x` and concentration scale `λ` of a bubble.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleParams<T> {
    center: Vec<T>,
    scale: T,
}

impl<T: Real> BubbleParams<T> {
    pub fn new(center: Vec<T>, scale: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!("bubble scale must be positive, got {scale}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("bubble center has non-finite coordinates".into()));
        }
        Ok(Self { center, scale })
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn scale(&self) -> T {
        self.scale
    }
}

/// Γ(n/2) for a positive integer `n`, by the exact half-integer recurrence.
pub fn gamma_half<T: Real>(n: usize) -> T {
    assert!(n >= 1, "gamma_half needs n >= 1");
    let (mut acc, mut k) = if n % 2 == 0 {
        (T::one(), 2)
    } else {
        (T::PI().sqrt(), 1)
    };
    while k < n {
        acc = acc * T::from_usize_exact(k) / T::lit(2.0);
        k += 2;
    }
    acc
}

/// Surface measure of the unit sphere `S^{n-1}`.
pub fn sphere_area<T: Real>(n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::InvalidDimension { n, min: 2 });
    }
    let half = T::from_usize_exact(n) / T::lit(2.0);
    Ok(T::lit(2.0) * T::PI().powf(half) / gamma_half::<T>(n))
}

/// `C_N = (N(N-2))^{(N-2)/4}`.
pub fn bubble_normalization<T: Real>(n: Dimension) -> T {
    let nf = T::from_usize_exact(n.get());
    (nf * (nf - T::lit(2.0))).powf((nf - T::lit(2.0)) / T::lit(4.0))
}

/// `U_{x,λ}(y) = C_N λ^{(N-2)/2} / (1 + λ²|y-x|²)^{(N-2)/2}`.
pub fn bubble_value<T: Real>(p: &BubbleParams<T>, y: &[T], n: Dimension) -> T {
    let half = T::from_usize_exact(n.get() - 2) / T::lit(2.0);
    let r = dist(&p.center, y);
    let lr = p.scale * r;
    bubble_normalization::<T>(n) * (p.scale / (T::one() + lr * lr)).powf(half)
}

/// `A = ∫ U_{0,1}^{(N+2)/(N-2)}`, evaluated through the flux identity `(N-2) ω_N C_N`.
pub fn constant_a<T: Real>(n: usize) -> Result<T> {
    let d = Dimension::new(n)?;
    let omega = sphere_area::<T>(n)?;
    Ok(T::from_usize_exact(n - 2) * omega * bubble_normalization::<T>(d))
}

/// `B = ∫ U_{0,1}² = C_N² ω_N · ½ Beta(N/2, (N-4)/2)`.
pub fn constant_b<T: Real>(n: usize) -> Result<T> {
    let d = Dimension::new(n)?;
    let omega = sphere_area::<T>(n)?;
    let beta = gamma_half::<T>(n) * gamma_half::<T>(n - 4) / gamma_half::<T>(2 * n - 4);
    let c = bubble_normalization::<T>(d);
    Ok(c * c * omega * beta / T::lit(2.0))
}

/// Dimension-determined constants shared by every reduced-energy computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniversalConstants<T> {
    pub n: usize,
    pub omega_n: T,
    pub c_n: T,
    pub a_const: T,
    pub b_const: T,
}

impl<T: Real> UniversalConstants<T> {
    pub fn new(n: usize) -> Result<Self> {
        let d = Dimension::new(n)?;
        Ok(Self {
            n,
            omega_n: sphere_area(n)?,
            c_n: bubble_normalization(d),
            a_const: constant_a(n)?,
            b_const: constant_b(n)?,
        })
    }

    pub fn dimension(&self) -> Dimension {
        Dimension(self.n)
    }

    /// `(N-2)/2`, the exponent relating `λ` to the peak height.
    pub fn half_exponent(&self) -> T {
        T::from_usize_exact(self.n - 2) / T::lit(2.0)
    }
}

/// First-order projection `PU(y) ≈ U_{x,λ}(y) − A λ^{-(N-2)/2} H(x,y)`.
///
/// Accurate to `O(λ^{-(N-2)/2})` in `C¹`; not the exact harmonic projection.
pub fn projected_bubble<T: Real, G: GreenFunction<T> + ?Sized>(
    p: &BubbleParams<T>,
    y: &[T],
    g: &G,
    consts: &UniversalConstants<T>,
) -> Result<T> {
    let h = g.regular(p.center(), y, crate::green::Order::Value)?.value;
    let u = bubble_value(p, y, consts.dimension());
    Ok(u - consts.a_const * p.scale.powf(-consts.half_exponent()) * h)
}
