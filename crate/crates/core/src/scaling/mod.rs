//! Geometric k-scans of any Z(k) producer and the scaling-law fits run on them.

mod fit;
mod producer;
mod report;

pub use fit::{fit_log_quadratic, fit_power, LogQuadraticFit, PowerFit, DECADE};
pub use producer::{
    AnalyticProducer, FnProducer, GtmProducer, PurePointProducer, SquarefreeProducer, TmFourierProducer, TmUpperBoundProducer,
    ZProducer,
};
pub use report::{catalogue_report, ReportRow, ScalingReport, SYSTEMS};

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::fmt_real;

/// Leading scan samples dropped before fitting, as they may lie outside the asymptotic regime.
pub const DEFAULT_SKIP: usize = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScalingError {
    #[error("producer failed at k = {k}: {source}")]
    Producer { k: f64, source: Box<crate::Error> },
    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("sample {index} has non-positive Z (ln Z = {ln_z})")]
    NonPositive { index: usize, ln_z: f64 },
    #[error("fit needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate design matrix")]
    Degenerate,
    #[error("report needs at least one fit")]
    EmptyReport,
    #[error("unknown system {name}; known: {known}")]
    UnknownSystem { name: String, known: String },
}

/// One scan point k_ℓ = k₀λ^{−ℓ}; Z is kept in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub level: usize,
    pub k: f64,
    pub ln_k: f64,
    pub ln_z: f64,
}

impl ScanSample {
    /// Z itself; underflows to 0 for the deepest Thue–Morse samples.
    pub fn z(&self) -> f64 {
        self.ln_z.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub producer: String,
    pub ratio: f64,
    pub k0: f64,
    pub depth: usize,
    pub samples: Vec<ScanSample>,
}

/// Evaluate `producer` at k₀λ^{−ℓ} for ℓ = 0..depth, in parallel, in scan order.
pub fn scan(producer: &dyn ZProducer, k0: f64, ratio: f64, depth: usize) -> Result<ScanResult, ScalingError> {
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(ScalingError::Parameter { name: "ratio", reason: format!("{ratio} must exceed 1") });
    }
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(ScalingError::Parameter { name: "k0", reason: format!("{k0} must be positive") });
    }
    if depth < 3 {
        return Err(ScalingError::Parameter { name: "depth", reason: format!("{depth} is below 3") });
    }
    let ln_ratio = ratio.ln();
    let samples = (0..depth)
        .into_par_iter()
        .map(|level| {
            let ln_k = k0.ln() - level as f64 * ln_ratio;
            let k = k0 / ratio.powi(level as i32);
            let ln_z = producer.ln_z(k).map_err(|e| ScalingError::Producer { k, source: Box::new(e) })?;
            Ok(ScanSample { level, k, ln_k, ln_z })
        })
        .collect::<Result<Vec<_>, ScalingError>>()?;
    Ok(ScanResult { producer: producer.id(), ratio, k0, depth, samples })
}

impl ScanResult {
    /// Build from (k, ln Z) pairs already in scan order, e.g. read back from CSV.
    pub fn from_samples(producer: impl Into<String>, samples: &[(f64, f64)]) -> Self {
        let samples: Vec<ScanSample> = samples
            .iter()
            .enumerate()
            .map(|(level, &(k, ln_z))| ScanSample { level, k, ln_k: k.ln(), ln_z })
            .collect();
        let k0 = samples.first().map_or(f64::NAN, |s| s.k);
        let ratio = match samples.as_slice() {
            [a, b, ..] => a.k / b.k,
            _ => f64::NAN,
        };
        Self { producer: producer.into(), ratio, k0, depth: samples.len(), samples }
    }

    /// The scan without its first `n` samples.
    pub fn skip(&self, n: usize) -> Self {
        let samples = self.samples.iter().skip(n).copied().collect::<Vec<_>>();
        Self { samples, ..self.clone() }
    }

    /// ln Z non-increasing along the scan.
    pub fn is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].ln_z <= w[0].ln_z)
    }

    /// CSV with header `level,k,ln_k,Z,ln_Z`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["level", "k", "ln_k", "Z", "ln_Z"])?;
        for s in &self.samples {
            wr.write_record([s.level.to_string(), fmt_real(s.k), fmt_real(s.ln_k), fmt_real(s.z()), fmt_real(s.ln_z)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutproject::CutProjectScheme;
    use crate::riesz::TmFourierSeries;
    use crate::{FieldNumber, QuadraticOrder};

    #[test]
    fn constant_producer() {
        let p = FnProducer::new("const", |_| Ok(3f64.ln()));
        let s = scan(&p, 0.5, 2.0, 6).unwrap();
        assert_eq!(s.samples.len(), 6);
        assert!(s.samples.iter().all(|x| (x.z() - 3.0).abs() < 1e-15));
        assert!((s.samples[5].k - 0.5 / 32.0).abs() < 1e-18);
        assert!(scan(&p, 0.5, 1.0, 6).is_err());
        assert!(scan(&p, 0.5, 2.0, 2).is_err());
    }

    #[test]
    fn failures_carry_k() {
        let p = FnProducer::new("bad", |k| if k < 0.1 { Err(crate::riesz::RieszError::Domain { what: "k", value: k }.into()) } else { Ok(0.0) });
        match scan(&p, 0.5, 2.0, 5) {
            Err(ScalingError::Producer { k, .. }) => assert!((k - 0.0625).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fibonacci_scan_decreases() {
        let p = PurePointProducer::new(CutProjectScheme::golden(), FieldNumber::from(QuadraticOrder::golden().theta_element()), 50.0);
        let s = scan(&p, 0.4, QuadraticOrder::golden().theta(), 10).unwrap();
        assert!(s.samples.windows(2).all(|w| w[1].ln_z < w[0].ln_z));
    }

    #[test]
    fn thue_morse_scan_stays_in_log_space() {
        let series = std::sync::Arc::new(TmFourierSeries::new(1 << 16).unwrap());
        let s = scan(&TmFourierProducer::new(series), 0.5, 2.0, 12).unwrap();
        let last = s.samples.last().unwrap();
        assert!(last.ln_z.is_finite() && last.ln_z < -60.0, "{last:?}");
        assert!(s.is_monotone());
    }

    #[test]
    fn csv_roundtrip_columns() {
        let p = FnProducer::new("lin", |k: f64| Ok(k.ln()));
        let s = scan(&p, 1.0, 10.0, 3).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("level,k,ln_k,Z,ln_Z\n"));
        let back = ScanResult::from_samples("lin", &s.samples.iter().map(|x| (x.k, x.ln_z)).collect::<Vec<_>>());
        assert!((back.ratio - 10.0).abs() < 1e-12);
    }
}
