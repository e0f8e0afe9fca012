use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bethe::SolveOptions;
use crate::eigen::EigenMode;
use crate::error::{Error, Result};
use crate::root_system::{CartanKind, Multiplicity, RootSystem};
use crate::suite::SuiteOptions;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub system: Option<SystemSpec>,
    pub multiplicity: Option<MultiplicitySpec>,
    pub weight: Option<Vec<i64>>,
    /// Eigenfunction used by `eval`; defaults to `bethe_k`.
    pub mode: Option<EigenMode>,
    /// `"lo:hi:n,..."`, one block per axis.
    pub grid: Option<String>,
    pub sweep: Option<SweepSpec>,
    pub tolerance: Option<ToleranceSpec>,
    pub verify: Option<SuiteOptions>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplicitySpec {
    pub long: f64,
    /// Ignored for simply-laced systems; defaults to `long`.
    pub short: Option<f64>,
}

impl MultiplicitySpec {
    pub fn resolve(&self) -> Multiplicity {
        Multiplicity::new(self.long, self.short.unwrap_or(self.long))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KValue {
    Constant(f64),
    Classes(MultiplicitySpec),
}

impl KValue {
    pub fn resolve(&self) -> Multiplicity {
        match self {
            KValue::Constant(k) => Multiplicity::constant(*k),
            KValue::Classes(m) => m.resolve(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub k: Option<Vec<KValue>>,
    pub weights: Option<Vec<Vec<i64>>>,
    #[serde(rename = "box")]
    pub weight_box: Option<WeightBox>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl WeightBox {
    /// All integer points, first coordinate varying slowest.
    pub fn points(&self) -> Result<Vec<Vec<i64>>> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::Config("sweep box bounds differ in length".into()));
        }
        let mut out = vec![Vec::new()];
        for (&lo, &hi) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (lo..=hi).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub solver: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

pub fn parse_grid(spec: &str) -> Result<Vec<Axis>> {
    spec.split(',')
        .map(|block| {
            let parts: Vec<&str> = block.trim().split(':').collect();
            let bad = || Error::Config(format!("grid axis `{block}` is not lo:hi:n"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
            if n == 0 || !lo.is_finite() || !hi.is_finite() {
                return Err(bad());
            }
            Ok(Axis { lo, hi, n })
        })
        .collect()
}

/// Cartesian product of the axes, first axis varying slowest.
pub fn grid_points(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let vals = axis.values();
        out = out
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn root_system(&self) -> Result<RootSystem> {
        let s = self
            .system
            .as_ref()
            .ok_or_else(|| Error::Config("missing `system`".into()))?;
        let kind: CartanKind = s.kind.parse()?;
        RootSystem::new(kind, s.rank)
    }

    /// Validated multiplicity; strict positivity unless `allow_zero`.
    pub fn multiplicity(&self, rs: &RootSystem, allow_zero: bool) -> Result<Multiplicity> {
        let k = self
            .multiplicity
            .ok_or_else(|| Error::Config("missing `multiplicity`".into()))?
            .resolve();
        if allow_zero {
            k.validate()?;
        } else {
            k.require_positive(rs)?;
        }
        Ok(k)
    }

    pub fn weight(&self, rs: &RootSystem) -> Result<Vec<i64>> {
        let w = self
            .weight
            .clone()
            .ok_or_else(|| Error::Config("missing `weight`".into()))?;
        if w.len() != rs.rank {
            return Err(Error::WeightDimension {
                expected: rs.rank,
                got: w.len(),
            });
        }
        Ok(w)
    }

    pub fn solve_options(&self) -> SolveOptions {
        let mut o = SolveOptions::default();
        if let Some(t) = self.tolerance {
            if let Some(x) = t.solver {
                o.tol = x;
            }
            if let Some(m) = t.max_iter {
                o.max_iter = m;
            }
        }
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let axes = parse_grid("0:1:3, -1:1:1").unwrap();
        assert_eq!(axes[0].values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(axes[1].values(), vec![-1.0]);
        assert_eq!(grid_points(&axes).len(), 3);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"system":{"type":"B","rank":2},"multiplicity":{"long":1.0,"short":0.5},
            "weight":[1,1],"sweep":{"k":[1.0,{"long":2.0,"short":3.0}],"box":{"lo":[0,0],"hi":[1,2]}}}"#;
        let c: JobConfig = serde_json::from_str(text).unwrap();
        let rs = c.root_system().unwrap();
        assert_eq!(c.multiplicity(&rs, false).unwrap(), Multiplicity::new(1.0, 0.5));
        let sweep = c.sweep.clone().unwrap();
        assert_eq!(sweep.weight_box.unwrap().points().unwrap().len(), 6);
        assert_eq!(sweep.k.unwrap()[1].resolve(), Multiplicity::new(2.0, 3.0));
        let again: JobConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(again.weight, c.weight);
        assert!(serde_json::from_str::<JobConfig>(r#"{"sytem":{}}"#).is_err());
    }
}
