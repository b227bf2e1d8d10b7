//! Blow-up asymptotics read off a critical point of `Ψ_k`.

use std::io::Write;

use serde::Serialize;

use crate::bubble::{projected_bubble, BubbleParams, UniversalConstants};
use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::green::{green, GreenFunction};
use crate::scalar::{dist, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityNote {
    Ok,
    NEquals5Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakPrediction<T> {
    pub location: Vec<T>,
    pub lambda_eps: T,
    /// `λ_{j,ε}^{(N−2)/2}`, the predicted `u_ε(a_j)` up to the factor `C_N`.
    pub height: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupPrediction<T> {
    pub epsilon: T,
    pub dimension: usize,
    pub per_peak: Vec<PeakPrediction<T>>,
    pub validity_note: ValidityNote,
}

impl<T: Real> BlowupPrediction<T> {
    /// Order of the neglected remainder `‖w_ε‖` in terms of `λ = λ_ε` and `ε`.
    pub fn neglected_error_order(&self) -> &'static str {
        match self.dimension {
            5 => "O(lambda^-3 + eps*lambda^-3/2)",
            6 => "O((log lambda)^(2/3)*lambda^-4 + eps*(log lambda)^(2/3)*lambda^-2)",
            _ => "O(lambda^-(N+2)/2 + eps*lambda^-2)",
        }
    }

    /// Order of the far-field error away from the peaks.
    pub fn far_field_error_order(&self) -> &'static str {
        "O(lambda^-(N+2)/2)"
    }

    /// Default exclusion radius around the peaks:
    /// `0.1 · min(peak separation, distance of a peak to ∂Ω)`.
    pub fn default_radius<G: GreenFunction<T> + ?Sized>(&self, g: &G) -> T {
        let mut m = T::infinity();
        for (j, p) in self.per_peak.iter().enumerate() {
            m = m.min(g.boundary_distance(&p.location));
            for q in &self.per_peak[j + 1..] {
                m = m.min(dist(&p.location, &q.location));
            }
        }
        T::lit(0.1) * m
    }
}

/// `λ_{j,ε} = ε^{−1/(N−4)} / λ_j` and `height_j = λ_{j,ε}^{(N−2)/2}` for every peak.
pub fn predict<T: Real>(cp: &CriticalPoint<T>, epsilon: T, n: usize) -> Result<BlowupPrediction<T>> {
    if n == 4 {
        return Err(Error::ExponentSingularity { n });
    }
    if n < 4 {
        return Err(Error::InvalidDimension { n, min: 5 });
    }
    if n != cp.config.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension {n} does not match the critical point dimension {}",
            cp.config.dim()
        )));
    }
    if !(epsilon.is_finite() && epsilon > T::zero()) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let nn = T::from_usize_exact(n);
    let shrink = epsilon.powf(-T::one() / (nn - T::lit(4.0)));
    let half = (nn - T::lit(2.0)) / T::lit(2.0);
    let per_peak = cp
        .config
        .points()
        .iter()
        .zip(cp.config.scales())
        .map(|(a, &l)| {
            let lambda_eps = shrink / l;
            PeakPrediction { location: a.clone(), lambda_eps, height: lambda_eps.powf(half) }
        })
        .collect();
    Ok(BlowupPrediction {
        epsilon,
        dimension: n,
        per_peak,
        validity_note: if n == 5 { ValidityNote::NEquals5Warning } else { ValidityNote::Ok },
    })
}

fn check_consts<T: Real>(pred: &BlowupPrediction<T>, consts: &UniversalConstants<T>) -> Result<()> {
    if pred.dimension != consts.n {
        return Err(Error::InvalidArgument("constants and prediction differ in dimension".into()));
    }
    Ok(())
}

/// Leading far-field term `A · Σ_j G(a_j, x) / λ_{j,ε}^{(N−2)/2}`.
pub fn far_field<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    pred: &BlowupPrediction<T>,
    x: &[T],
    consts: &UniversalConstants<T>,
) -> Result<T> {
    check_consts(pred, consts)?;
    let radius = pred.default_radius(g);
    let mut sum = T::zero();
    for p in &pred.per_peak {
        let d = dist(&p.location, x);
        if d <= radius {
            return Err(Error::NearPeak { distance: d.as_f64(), radius: radius.as_f64() });
        }
        sum = sum + green(g, &p.location, x)? / p.height;
    }
    Ok(consts.a_const * sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMetadata<T> {
    pub prediction: BlowupPrediction<T>,
    pub neglected_error_order: String,
    pub far_field_error_order: String,
}

/// `Σ_j PU_{a_j, λ_{j,ε}}` sampled on a set of interior points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSamples<T> {
    pub points: Vec<Vec<T>>,
    pub values: Vec<T>,
    pub metadata: FieldMetadata<T>,
}

impl<T: Real> FieldSamples<T> {
    /// Header `x1,…,xN,value`, one row per sample.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv export failed: {e}"));
        let mut out = csv::Writer::from_writer(w);
        let n = self.metadata.prediction.dimension;
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.push("value".into());
        out.write_record(&header).map_err(io)?;
        for (p, v) in self.points.iter().zip(&self.values) {
            let row: Vec<String> = p.iter().chain(std::iter::once(v)).map(|x| format!("{:e}", x.as_f64())).collect();
            out.write_record(&row).map_err(io)?;
        }
        out.flush().map_err(|e| Error::InvalidArgument(format!("csv export failed: {e}")))
    }

    /// JSON sidecar with the prediction and the neglected-error orders.
    pub fn sidecar_json(&self) -> String
    where
        T: Serialize,
    {
        serde_json::to_string_pretty(&self.metadata).expect("metadata serializes")
    }
}

pub fn approximate_field<T: Real, G: GreenFunction<T> + ?Sized>(
    g: &G,
    pred: &BlowupPrediction<T>,
    grid: &[Vec<T>],
    consts: &UniversalConstants<T>,
) -> Result<FieldSamples<T>> {
    use rayon::prelude::*;
    check_consts(pred, consts)?;
    let bubbles = pred
        .per_peak
        .iter()
        .map(|p| BubbleParams::new(p.location.clone(), p.lambda_eps))
        .collect::<Result<Vec<_>>>()?;
    let values = grid
        .par_iter()
        .map(|y| {
            let comp = g.check_interior(y)?;
            let mut s = T::zero();
            for b in &bubbles {
                if g.component(b.center()) == Some(comp) {
                    s = s + projected_bubble(b, y, g, consts)?;
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldSamples {
        points: grid.to_vec(),
        values,
        metadata: FieldMetadata {
            prediction: pred.clone(),
            neglected_error_order: pred.neglected_error_order().into(),
            far_field_error_order: pred.far_field_error_order().into(),
        },
    })
}
