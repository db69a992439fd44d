//! Scalar observables over a Cartesian parameter grid.
//!
//! Observables are registered by name. Rows come out in lexicographic order
//! of `(sigma, upsilon, modulus, rho)` with `rho` varying fastest.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::composite::{squeezed_expectations, CompositeLabel};
use crate::error::{Error, Result};
use crate::fock::{StretchLabel, TruncationConfig};
use crate::operators::SqueezeLabel;
use crate::states::{annihilation_residual, overlap, photon_stats};

/// Values of one swept parameter.
///
/// Parsed from either a comma list `a,b,c` or `start:stop:count`, which
/// gives `count` equispaced values including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSpec(pub Vec<f64>);

impl RangeSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |why: &str| Error::domain(format!("malformed range '{text}': {why}"));
        if text.is_empty() {
            return Err(bad("empty"));
        }
        let values = if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected start:stop:count"));
            }
            let start: f64 = parts[0].trim().parse().map_err(|_| bad("start is not a number"))?;
            let stop: f64 = parts[1].trim().parse().map_err(|_| bad("stop is not a number"))?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad("count is not a positive integer"))?;
            if count == 0 {
                return Err(bad("count must be >= 1"));
            }
            if count == 1 {
                if start != stop {
                    return Err(bad("count 1 needs start == stop"));
                }
                vec![start]
            } else {
                if stop < start {
                    return Err(bad("stop < start"));
                }
                let step = (stop - start) / (count - 1) as f64;
                (0..count)
                    .map(|k| if k + 1 == count { stop } else { start + step * k as f64 })
                    .collect()
            }
        } else {
            text.split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| bad(&format!("'{p}' is not a number"))))
                .collect::<Result<Vec<f64>>>()?
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("values must be finite"));
        }
        Ok(Self(values))
    }
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub sigma: f64,
    pub upsilon: f64,
    /// `|zeta|`; the displacement label is `modulus * e^{i phase}`.
    pub modulus: f64,
    pub rho: f64,
    pub phase: f64,
    pub theta: f64,
    /// Bra label of the overlap observable, at the same `sigma`.
    pub alpha: Complex64,
    /// Basis size for truncated observables; `None` picks it from the tail bound.
    pub dim: Option<usize>,
    pub tail_tol: f64,
}

impl SweepPoint {
    pub fn stretch(&self) -> Result<StretchLabel> {
        StretchLabel::from_polar(self.modulus, self.phase, self.sigma)
    }

    pub fn squeeze(&self) -> Result<SqueezeLabel> {
        SqueezeLabel::from_polar(self.rho, self.theta, self.upsilon)
    }

    fn cfg(&self, mean: f64) -> Result<TruncationConfig> {
        match self.dim {
            Some(d) => TruncationConfig::new(d, self.tail_tol),
            None => TruncationConfig::for_mean(mean, self.tail_tol),
        }
    }
}

/// A scalar evaluated at a grid point. `NaN` marks an undefined value.
pub trait Observable: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, p: &SweepPoint) -> Result<f64>;
}

pub fn registry() -> Vec<Box<dyn Observable>> {
    vec![
        Box::new(Mean),
        Box::new(SecondMoment),
        Box::new(MandelQ),
        Box::new(SqueezedNumber),
        Box::new(OverlapAbs),
        Box::new(Residual),
    ]
}

pub fn observable_names() -> Vec<&'static str> {
    registry().iter().map(|o| o.name()).collect()
}

/// Observables in the order requested. Unknown or repeated names are a
/// domain error.
pub fn select(names: &[String]) -> Result<Vec<Box<dyn Observable>>> {
    let mut out: Vec<Box<dyn Observable>> = Vec::new();
    for n in names {
        if out.iter().any(|o| o.name() == n) {
            return Err(Error::domain(format!("observable '{n}' requested twice")));
        }
        let found = registry().into_iter().find(|o| o.name() == n).ok_or_else(|| {
            Error::domain(format!(
                "unknown observable '{n}' (known: {})",
                observable_names().join(", ")
            ))
        })?;
        out.push(found);
    }
    if out.is_empty() {
        return Err(Error::domain("no observables requested"));
    }
    Ok(out)
}

struct Mean;
impl Observable for Mean {
    fn name(&self) -> &'static str {
        "mean"
    }
    fn evaluate(&self, p: &SweepPoint) -> Result<f64> {
        Ok(photon_stats(&p.stretch()?).mean)
    }
}

struct SecondMoment;
impl Observable for SecondMoment {
    fn name(&self) -> &'static str {
        "second_moment"
    }
    fn evaluate(&self, p: &SweepPoint) -> Result<f64> {
        Ok(photon_stats(&p.stretch()?).second_moment)
    }
}

struct MandelQ;
impl Observable for MandelQ {
    fn name(&self) -> &'static str {
        "mandel_q"
    }
    fn evaluate(&self, p: &SweepPoint) -> Result<f64> {
        Ok(photon_stats(&p.stretch()?).mandel_q.unwrap_or(f64::NAN))
    }
}

struct SqueezedNumber;
impl Observable for SqueezedNumber {
    fn name(&self) -> &'static str {
        "en"
    }
    fn evaluate(&self, p: &SweepPoint) -> Result<f64> {
        let label = CompositeLabel::new(p.stretch()?, p.squeeze()?, 0);
        Ok(squeezed_expectations(&label).en)
    }
}

struct OverlapAbs;
impl Observable for OverlapAbs {
    fn name(&self) -> &'static str {
        "overlap_abs"
    }
    fn evaluate(&self, p: &SweepPoint) -> Result<f64> {
        let bra = StretchLabel::new(p.alpha, p.sigma)?;
        Ok(overlap(&bra, &p.stretch()?)?.norm())
    }
}

struct Residual;
impl Observable for Residual {
    fn name(&self) -> &'static str {
        "residual"
    }
    fn evaluate(&self, p: &SweepPoint) -> Result<f64> {
        let label = p.stretch()?;
        annihilation_residual(&label, &p.cfg(label.mean())?)
    }
}

/// Axes of the sweep plus the fixed parameters shared by every point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub sigmas: RangeSpec,
    pub upsilons: RangeSpec,
    pub moduli: RangeSpec,
    pub rhos: RangeSpec,
    pub template: SweepPoint,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &sigma in &self.sigmas.0 {
            for &upsilon in &self.upsilons.0 {
                for &modulus in &self.moduli.0 {
                    for &rho in &self.rhos.0 {
                        out.push(SweepPoint {
                            sigma,
                            upsilon,
                            modulus,
                            rho,
                            ..self.template
                        });
                    }
                }
            }
        }
        out
    }
}

/// A grid point with its observable values, in the requested order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub values: Vec<f64>,
}

/// Evaluates every observable at every point. Points run in parallel; rows
/// keep grid order. The first failing point aborts the sweep.
pub fn run_sweep(grid: &SweepGrid, observables: &[Box<dyn Observable>]) -> Result<Vec<SweepRow>> {
    grid.points()
        .par_iter()
        .map(|p| {
            let values = observables.iter().map(|o| o.evaluate(p)).collect::<Result<Vec<f64>>>()?;
            Ok(SweepRow { point: *p, values })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template() -> SweepPoint {
        SweepPoint {
            sigma: 1.0,
            upsilon: 1.0,
            modulus: 0.0,
            rho: 0.0,
            phase: 0.0,
            theta: 0.0,
            alpha: Complex64::new(0.0, 0.0),
            dim: None,
            tail_tol: 1e-12,
        }
    }

    fn grid(s: &str, u: &str, m: &str, r: &str) -> SweepGrid {
        SweepGrid {
            sigmas: RangeSpec::parse(s).unwrap(),
            upsilons: RangeSpec::parse(u).unwrap(),
            moduli: RangeSpec::parse(m).unwrap(),
            rhos: RangeSpec::parse(r).unwrap(),
            template: template(),
        }
    }

    #[test]
    fn range_forms() {
        assert_eq!(RangeSpec::parse("0.5,1").unwrap().0, vec![0.5, 1.0]);
        assert_eq!(RangeSpec::parse("0:1:3").unwrap().0, vec![0.0, 0.5, 1.0]);
        assert_eq!(RangeSpec::parse("2:2:1").unwrap().0, vec![2.0]);
        for bad in ["", "1,,2", "0:1", "0:1:0", "1:0:3", "a", "0:1:x", "nan", "1:2:1"] {
            assert!(RangeSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn mean_rows() {
        let rows = run_sweep(&grid("0.5,1", "1", "2", "0"), &select(&["mean".into()]).unwrap()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].point.sigma, 0.5);
        assert!((rows[0].values[0] - 2.0).abs() < 1e-14);
        assert!((rows[1].values[0] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn mandel_rows_vanish() {
        let rows = run_sweep(&grid("0.25:1:4", "1", "0.5,2,4", "0"), &select(&["mandel_q".into()]).unwrap()).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.values[0].abs() < 1e-10));
    }

    #[test]
    fn squeezed_number_rows() {
        let rows = run_sweep(&grid("1", "1", "0", "0,1"), &select(&["en".into()]).unwrap()).unwrap();
        assert_eq!(rows[0].values[0], 0.0);
        assert!((rows[1].values[0] - 1f64.sinh().powi(2)).abs() < 1e-14);
        assert!((rows[1].values[0] - 1.381098).abs() < 1e-6);
    }

    #[test]
    fn row_order_is_rho_fastest() {
        let rows = run_sweep(&grid("0.5,1", "1", "1,2", "0,1"), &select(&["en".into()]).unwrap()).unwrap();
        let keys: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r.point.sigma, r.point.modulus, r.point.rho)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
    }

    #[test]
    fn selection_errors() {
        assert!(select(&[]).is_err());
        assert!(select(&["nope".into()]).is_err());
        assert!(select(&["mean".into(), "mean".into()]).is_err());
    }
}
