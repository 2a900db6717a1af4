use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, OrderStatistics};

use crate::format::float;
use crate::statmodel::PredictionCurve;
use crate::{Error, Result};

/// Measured `(E, value)` points, ascending in energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSeries {
    pub quantity: String,
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
}

impl EmpiricalSeries {
    pub fn new(quantity: impl Into<String>, points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let (energies, values) = points.into_iter().unzip();
        Self {
            quantity: quantity.into(),
            energies,
            values,
        }
    }
}

/// Column of a [`PredictionCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Rho,
    /// Index into `orders`.
    Moment(usize),
    Participation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub energy: f64,
    pub empirical: f64,
    pub predicted: f64,
    /// `(predicted - empirical) / |empirical|`.
    pub deviation: f64,
    pub in_bulk: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulkDefinition {
    /// Central fraction of the series points, by index.
    pub fraction: f64,
    pub e_lo: f64,
    pub e_hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub quantity: String,
    pub label: String,
    pub points: Vec<ComparisonPoint>,
    pub bulk: BulkDefinition,
    /// Median of `|deviation|` over the bulk.
    pub median_deviation: f64,
    pub p90_deviation: f64,
    /// Mean of `|predicted - empirical|` over the bulk.
    pub mean_absolute_error: f64,
    /// Series points outside the prediction's energy range, not compared.
    pub outside_range: usize,
}

impl ComparisonReport {
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// `E,empirical,predicted,deviation,in_bulk` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "E,empirical,predicted,deviation,in_bulk,label")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                float(p.energy),
                float(p.empirical),
                float(p.predicted),
                float(p.deviation),
                p.in_bulk,
                self.label
            )?;
        }
        Ok(())
    }
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> Option<f64> {
    if x.is_empty() || at < x[0] || at > x[x.len() - 1] {
        return None;
    }
    let j = x.partition_point(|&v| v < at);
    if x[j] == at {
        return Some(y[j]);
    }
    let t = (at - x[j - 1]) / (x[j] - x[j - 1]);
    Some(y[j - 1] + t * (y[j] - y[j - 1]))
}

/// Compare `series` with a column of `curve`, linearly interpolated at the
/// series energies.
pub fn compare(
    curve: &PredictionCurve,
    quantity: Quantity,
    series: &EmpiricalSeries,
    bulk_fraction: f64,
) -> Result<ComparisonReport> {
    let column = match quantity {
        Quantity::Rho => &curve.rho,
        Quantity::Participation => &curve.participation,
        Quantity::Moment(i) => curve
            .moments
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("prediction has no moment column {i}")))?,
    };
    let label = format!("{}:k={}", curve.corrections, curve.momentum);
    compare_with(
        |e| interpolate(&curve.energies, column, e),
        series,
        bulk_fraction,
        &label,
    )
}

/// Compare `series` with a prediction evaluated directly; `None` marks energies
/// outside its range.
pub fn compare_with(
    predict: impl Fn(f64) -> Option<f64>,
    series: &EmpiricalSeries,
    bulk_fraction: f64,
    label: &str,
) -> Result<ComparisonReport> {
    if !(bulk_fraction > 0.0 && bulk_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("bulk fraction {bulk_fraction}")));
    }
    let n = series.energies.len();
    let cut = ((1.0 - bulk_fraction) / 2.0 * n as f64).floor() as usize;
    let mut points = Vec::with_capacity(n);
    let mut outside_range = 0;
    for (i, (&energy, &empirical)) in series.energies.iter().zip(&series.values).enumerate() {
        let Some(predicted) = predict(energy) else {
            outside_range += 1;
            continue;
        };
        let deviation = (predicted - empirical) / empirical.abs();
        if !deviation.is_finite() {
            outside_range += 1;
            continue;
        }
        points.push(ComparisonPoint {
            energy,
            empirical,
            predicted,
            deviation,
            in_bulk: i >= cut && i < n - cut,
        });
    }
    let bulk: Vec<&ComparisonPoint> = points.iter().filter(|p| p.in_bulk).collect();
    if bulk.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let mut data = Data::new(bulk.iter().map(|p| p.deviation.abs()).collect::<Vec<_>>());
    let mean_absolute_error = bulk.iter().map(|p| (p.predicted - p.empirical).abs()).sum::<f64>() / bulk.len() as f64;
    Ok(ComparisonReport {
        quantity: series.quantity.clone(),
        label: label.to_string(),
        bulk: BulkDefinition {
            fraction: bulk_fraction,
            e_lo: bulk[0].energy,
            e_hi: bulk[bulk.len() - 1].energy,
            points: bulk.len(),
        },
        median_deviation: data.median(),
        p90_deviation: data.quantile(0.9),
        mean_absolute_error,
        points,
        outside_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series() -> EmpiricalSeries {
        EmpiricalSeries::new("Pr", (0..50).map(|i| (i as f64, 10.0 + i as f64)))
    }

    #[test]
    fn identical_prediction() {
        let s = series();
        let r = compare_with(|e| Some(10.0 + e), &s, 0.6, "exact").unwrap();
        assert!(r.points.iter().all(|p| p.deviation == 0.0));
        assert_eq!(r.median_deviation, 0.0);
        assert_eq!(r.points.len(), 50);
        assert_eq!(r.bulk.points, 30);
        assert_eq!(r.points.iter().filter(|p| !p.in_bulk).count(), 20);
    }

    #[test]
    fn ten_percent_offset() {
        let s = series();
        let r = compare_with(|e| Some(1.1 * (10.0 + e)), &s, 0.6, "offset").unwrap();
        assert!((r.median_deviation - 0.1).abs() < 1e-12);
        assert!((r.p90_deviation - 0.1).abs() < 1e-12);
    }

    #[test]
    fn empty_overlap() {
        let s = series();
        assert!(matches!(
            compare_with(|_| None, &s, 0.6, "none"),
            Err(Error::EmptyOverlap)
        ));
        let shifted = compare_with(|e| (e < 20.0).then_some(10.0 + e), &s, 0.6, "part").unwrap();
        assert_eq!(shifted.outside_range, 30);
    }

    #[test]
    fn interpolation() {
        let x = [0.0, 1.0, 3.0];
        let y = [1.0, 3.0, -1.0];
        assert_eq!(interpolate(&x, &y, 0.5), Some(2.0));
        assert_eq!(interpolate(&x, &y, 3.0), Some(-1.0));
        assert_eq!(interpolate(&x, &y, 2.0), Some(1.0));
        assert_eq!(interpolate(&x, &y, 3.5), None);
        assert_eq!(interpolate(&x, &y, 0.0), Some(1.0));
    }
}
