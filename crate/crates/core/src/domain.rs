//! Declarative description of the bounded domain and the geometry helpers the providers need.

use serde::{Deserialize, Serialize};

use crate::bubble::Dimension;
use crate::error::{Error, Result};
use crate::scalar::{dist, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Ellipsoid { center: Vec<f64>, semi_axes: Vec<f64> },
}

fn default_offset() -> f64 {
    0.5
}
fn default_sources() -> usize {
    800
}
fn default_collocation() -> usize {
    2000
}
fn default_fit_tolerance() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    DisjointBalls {
        balls: Vec<BallSpec>,
    },
    Smooth {
        surface: SurfaceSpec,
        #[serde(default = "default_offset")]
        mfs_offset: f64,
        #[serde(default = "default_sources")]
        mfs_sources: usize,
        #[serde(default = "default_collocation")]
        collocation_points: usize,
        /// Largest accepted held-out boundary residual, relative to the boundary size of `S(x,·)`.
        #[serde(default = "default_fit_tolerance")]
        fit_tolerance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub dimension: Dimension,
    pub shape: Shape,
}

impl DomainSpec {
    pub fn ball(n: usize, center: Vec<f64>, radius: f64) -> Result<Self> {
        let spec = Self {
            dimension: Dimension::new(n)?,
            shape: Shape::Ball { center, radius },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn unit_ball(n: usize) -> Result<Self> {
        Self::ball(n, vec![0.0; n], 1.0)
    }

    pub fn disjoint_balls(n: usize, balls: Vec<BallSpec>) -> Result<Self> {
        let spec = Self {
            dimension: Dimension::new(n)?,
            shape: Shape::DisjointBalls { balls },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses and validates a JSON document. Parse errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::InvalidDomain(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dimension.get();
        let check_point = |what: &str, p: &[f64]| -> Result<()> {
            if p.len() != n {
                return Err(Error::InvalidDomain(format!(
                    "{what} has {} coordinates, expected {n}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidDomain(format!("{what} has non-finite coordinates")));
            }
            Ok(())
        };
        let check_radius = |r: f64| -> Result<()> {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidDomain(format!("radius must be positive, got {r}")));
            }
            Ok(())
        };
        match &self.shape {
            Shape::Ball { center, radius } => {
                check_point("ball center", center)?;
                check_radius(*radius)?;
            }
            Shape::DisjointBalls { balls } => {
                if balls.is_empty() {
                    return Err(Error::InvalidDomain("disjoint_balls needs at least one ball".into()));
                }
                for b in balls {
                    check_point("ball center", &b.center)?;
                    check_radius(b.radius)?;
                }
                for (i, a) in balls.iter().enumerate() {
                    for (j, b) in balls.iter().enumerate().skip(i + 1) {
                        if dist(&a.center, &b.center) <= a.radius + b.radius {
                            return Err(Error::InvalidDomain(format!(
                                "balls {i} and {j} intersect or touch"
                            )));
                        }
                    }
                }
            }
            Shape::Smooth {
                surface,
                mfs_offset,
                mfs_sources,
                collocation_points,
                fit_tolerance,
            } => {
                match surface {
                    SurfaceSpec::Ellipsoid { center, semi_axes } => {
                        check_point("ellipsoid center", center)?;
                        check_point("ellipsoid semi_axes", semi_axes)?;
                        for &a in semi_axes {
                            check_radius(a)?;
                        }
                    }
                }
                if !(*mfs_offset > 0.0 && mfs_offset.is_finite()) {
                    return Err(Error::InvalidDomain("mfs_offset must be positive".into()));
                }
                if *mfs_sources == 0 || *collocation_points == 0 {
                    return Err(Error::InvalidDomain("MFS point counts must be positive".into()));
                }
                if mfs_sources > collocation_points {
                    return Err(Error::InvalidDomain(format!(
                        "mfs_sources ({mfs_sources}) must not exceed collocation_points ({collocation_points})"
                    )));
                }
                if !(*fit_tolerance > 0.0) {
                    return Err(Error::InvalidDomain("fit_tolerance must be positive".into()));
                }
                if n > 16 {
                    return Err(Error::InvalidDomain("smooth domains support N <= 16".into()));
                }
            }
        }
        Ok(())
    }
}

/// Axis-aligned ellipsoid `Σ ((x_i - c_i)/a_i)² < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid<T> {
    pub center: Vec<T>,
    pub semi_axes: Vec<T>,
}

impl<T: Real> Ellipsoid<T> {
    pub fn new(center: Vec<T>, semi_axes: Vec<T>) -> Self {
        Self { center, semi_axes }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn level(&self, x: &[T]) -> T {
        x.iter()
            .zip(&self.center)
            .zip(&self.semi_axes)
            .map(|((&x, &c), &a)| ((x - c) / a).powi(2))
            .sum()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.level(x) < T::one()
    }

    pub fn diameter(&self) -> T {
        T::lit(2.0) * self.semi_axes.iter().fold(T::zero(), |m, &a| m.max(a))
    }

    /// Point on the surface in the direction `u` (unit vector) as seen from the center along the axes map.
    pub fn surface_point(&self, u: &[T]) -> Vec<T> {
        self.center
            .iter()
            .zip(&self.semi_axes)
            .zip(u)
            .map(|((&c, &a), &u)| c + a * u)
            .collect()
    }

    pub fn outward_normal(&self, p: &[T]) -> Vec<T> {
        let g: Vec<T> = p
            .iter()
            .zip(&self.center)
            .zip(&self.semi_axes)
            .map(|((&p, &c), &a)| (p - c) / (a * a))
            .collect();
        let r = crate::scalar::norm(&g);
        g.into_iter().map(|x| x / r).collect()
    }

    /// Closest surface point to an interior point `x`.
    ///
    /// Solves `Σ a_i² z_i² / (a_i² + t)² = 1` for the Lagrange multiplier `t ∈ (-a_min², 0]`.
    pub fn nearest_point(&self, x: &[T]) -> Vec<T> {
        let z: Vec<T> = x.iter().zip(&self.center).map(|(&x, &c)| x - c).collect();
        let a2: Vec<T> = self.semi_axes.iter().map(|&a| a * a).collect();
        let amin2 = a2.iter().fold(T::infinity(), |m, &v| m.min(v));
        let f = |t: T| -> T {
            a2.iter()
                .zip(&z)
                .map(|(&a2, &z)| (a2 * z / (a2 + t)).powi(2) / a2)
                .sum::<T>()
                - T::one()
        };
        let tiny = amin2 * T::lit(1e-14);
        let mut lo = -amin2 + tiny;
        let mut hi = T::zero().max(-lo);
        while f(hi) > T::zero() {
            hi = hi * T::lit(2.0) + amin2;
        }
        if f(lo) <= T::zero() {
            // Degenerate case: z vanishes along the shortest axes, so t = -a_min².
            let t = -amin2;
            let mut p: Vec<T> = Vec::with_capacity(z.len());
            let mut used = T::zero();
            let mut free = None;
            for (i, (&a2i, &zi)) in a2.iter().zip(&z).enumerate() {
                if (a2i - amin2).abs() <= tiny {
                    free.get_or_insert(i);
                    p.push(T::zero());
                } else {
                    let pi = a2i * zi / (a2i + t);
                    used = used + pi * pi / a2i;
                    p.push(pi);
                }
            }
            if let Some(k) = free {
                p[k] = self.semi_axes[k] * (T::one() - used).max(T::zero()).sqrt();
            }
            return p.iter().zip(&self.center).map(|(&p, &c)| p + c).collect();
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (lo + hi) / T::lit(2.0);
        a2.iter()
            .zip(&z)
            .zip(&self.center)
            .map(|((&a2, &z), &c)| c + a2 * z / (a2 + t))
            .collect()
    }

    /// Distance to the surface, positive inside and negative outside.
    pub fn signed_distance(&self, x: &[T]) -> T {
        if self.contains(x) {
            dist(x, &self.nearest_point(x))
        } else {
            // Outside: a lower bound is enough for rejecting the point.
            let r = self.level(x).sqrt();
            let amin = self.semi_axes.iter().fold(T::infinity(), |m, &a| m.min(a));
            -(r - T::one()) * amin
        }
    }

    /// Image of the surface under the dilation `c + factor (p - c)`.
    pub fn dilated(&self, factor: T) -> Self {
        Self {
            center: self.center.clone(),
            semi_axes: self.semi_axes.iter().map(|&a| a * factor).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_shapes() {
        let ball = DomainSpec::from_json(
            r#"{"dimension":6,"shape":{"type":"ball","center":[0,0,0,0,0,0],"radius":1}}"#,
        )
        .unwrap();
        assert_eq!(ball, DomainSpec::unit_ball(6).unwrap());
        let two = DomainSpec::from_json(
            r#"{"dimension":5,"shape":{"type":"disjoint_balls","balls":[
                {"center":[0,0,0,0,0],"radius":1},{"center":[4,0,0,0,0],"radius":1}]}}"#,
        )
        .unwrap();
        assert!(matches!(two.shape, Shape::DisjointBalls { ref balls } if balls.len() == 2));
        let smooth = DomainSpec::from_json(
            r#"{"dimension":6,"shape":{"type":"smooth","surface":{"kind":"ellipsoid",
                "center":[0,0,0,0,0,0],"semi_axes":[1,1,1,1,1,0.8]}}}"#,
        )
        .unwrap();
        match smooth.shape {
            Shape::Smooth { mfs_sources, collocation_points, mfs_offset, .. } => {
                assert_eq!((mfs_sources, collocation_points), (800, 2000));
                assert_eq!(mfs_offset, 0.5);
            }
            _ => panic!("wrong shape"),
        }
    }

    #[test]
    fn reports_invalid_documents() {
        let err = DomainSpec::from_json(r#"{"dimension":6,"shape":{"type":"ball","center":[0,0],"radius":1}}"#);
        assert!(matches!(err, Err(Error::InvalidDomain(m)) if m.contains("coordinates")));
        let err = DomainSpec::from_json("{\"dimension\":6,\n\"shape\": 3}");
        assert!(matches!(err, Err(Error::InvalidDomain(m)) if m.contains("line 2")));
        let err = DomainSpec::from_json(r#"{"dimension":4,"shape":{"type":"ball","center":[0,0,0,0],"radius":1}}"#);
        assert!(err.is_err());
        let overlap = DomainSpec::disjoint_balls(
            6,
            vec![
                BallSpec { center: vec![0.0; 6], radius: 1.0 },
                BallSpec { center: vec![1.5, 0.0, 0.0, 0.0, 0.0, 0.0], radius: 1.0 },
            ],
        );
        assert!(overlap.is_err());
    }

    #[test]
    fn ellipsoid_projection() {
        let e: Ellipsoid<f64> = Ellipsoid::new(vec![0.0; 3], vec![2.0, 1.0, 1.0]);
        let p = e.nearest_point(&[1.0, 0.2, 0.0]);
        assert!((e.level(&p) - 1.0).abs() < 1e-12);
        // The residual x - p must be parallel to the normal at p.
        let n = e.outward_normal(&p);
        let d: Vec<f64> = p.iter().zip([1.0, 0.2, 0.0]).map(|(p, x)| p - x).collect();
        let dn: f64 = d.iter().zip(&n).map(|(a, b)| a * b).sum();
        let dd = crate::scalar::norm(&d);
        assert!((dn - dd).abs() < 1e-10);
        // Degenerate center point: nearest point lies on the short axis.
        let q = e.nearest_point(&[0.0, 0.0, 0.0]);
        assert!((crate::scalar::norm(&q) - 1.0).abs() < 1e-12);
        assert!((e.signed_distance(&[0.0, 0.0, 0.0]) - 1.0).abs() < 1e-12);
    }
}
