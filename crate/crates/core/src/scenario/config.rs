//! Declarative scenario files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GrowthDescriptor, ProfileDescriptor, ProfileParams};
use crate::quadrature::log_space;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Echoed into the manifest; every built-in grid is deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

/// `count` points from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Ok(Vec::new());
        }
        if !(self.end >= self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::Config(format!(
                "grid needs start <= end, got {} and {}",
                self.start, self.end
            )));
        }
        match self.spacing {
            Spacing::Log => {
                if !(self.start > 0.0) {
                    return Err(Error::Config("log-spaced grid needs start > 0".into()));
                }
                Ok(log_space(self.start, self.end, self.count))
            }
            Spacing::Linear => {
                if self.count == 1 {
                    return Ok(vec![self.start]);
                }
                let h = (self.end - self.start) / (self.count - 1) as f64;
                Ok((0..self.count).map(|i| self.start + h * i as f64).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L1,
    L1g,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Absorbing,
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub m: f64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Check {
        grid: GridSpec,
    },
    Green {
        radii: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c2: Option<f64>,
    },
    L1g {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
        /// CSV file with columns `r,f`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<String>,
    },
    Bound {
        times: GridSpec,
        norm: f64,
        #[serde(default = "default_norm_kind")]
        norm_kind: NormKind,
        #[serde(default = "one")]
        c_large: f64,
        #[serde(default = "one")]
        c_small: f64,
    },
    Solve {
        /// `barenblatt:A:eps`, `powerlaw:a` or `table:path`.
        init: String,
        r_max: f64,
        cells: usize,
        #[serde(default = "default_scheme")]
        scheme: SchemeKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dt: Option<f64>,
        #[serde(default = "default_boundary")]
        boundary: BoundaryKind,
        t_end: f64,
        snapshots: usize,
        #[serde(default)]
        full_profiles: bool,
    },
    Optimality {
        k: usize,
        a: f64,
        eps: f64,
        cells: usize,
        r_max: f64,
        times: GridSpec,
        fit_window: [f64; 2],
    },
    Sweep {
        points: Vec<SweepPoint>,
        a: f64,
        eps: f64,
        cells: usize,
        r_max: f64,
        times: GridSpec,
        fit_window: [f64; 2],
    },
}

fn default_norm_kind() -> NormKind {
    NormKind::L1
}

fn one() -> f64 {
    1.0
}

fn default_scheme() -> SchemeKind {
    SchemeKind::Explicit
}

fn default_boundary() -> BoundaryKind {
    BoundaryKind::Absorbing
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Check { .. } => "check",
            Experiment::Green { .. } => "green",
            Experiment::L1g { .. } => "l1g",
            Experiment::Bound { .. } => "bound",
            Experiment::Solve { .. } => "solve",
            Experiment::Optimality { .. } => "optimality",
            Experiment::Sweep { .. } => "sweep",
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        if scenario.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "field schema_version: expected {SCHEMA_VERSION}, got {}",
                scenario.schema_version
            )));
        }
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn profile(&self) -> Result<&ProfileDescriptor> {
        self.profile
            .as_ref()
            .ok_or_else(|| Error::Config(format!("field profile is required for '{}'", self.experiment.kind())))
    }

    pub fn growth(&self) -> Result<&GrowthDescriptor> {
        self.growth
            .as_ref()
            .ok_or_else(|| Error::Config(format!("field growth is required for '{}'", self.experiment.kind())))
    }

    pub fn m(&self) -> Result<f64> {
        self.m
            .ok_or_else(|| Error::Config(format!("field m is required for '{}'", self.experiment.kind())))
    }
}

fn num(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Config(format!("{what}: '{s}' is not a number")))
}

/// `euclidean:N`, `power:N:lambda[:scale]`, `power_log:N:lambda:sigma[:scale]`,
/// `warped:N:flat|sinh`, `warped:N:cone:c[:r0]`, `tabulated:N:path`.
pub fn parse_profile_spec(spec: &str) -> Result<ProfileDescriptor> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("unrecognised profile '{spec}'"));
    let dimension: usize = parts
        .get(1)
        .ok_or_else(bad)?
        .parse()
        .map_err(|_| Error::Config(format!("profile '{spec}': dimension must be an integer")))?;
    let mut params = ProfileParams::default();
    let mut table = None;
    let form = parts[0];
    let opt = |i: usize, what: &str| parts.get(i).map(|s| num(s, what)).transpose();
    match (form, parts.len()) {
        ("euclidean", 2) => {}
        ("power", 3 | 4) => {
            params.lambda = opt(2, "lambda")?;
            params.scale = opt(3, "scale")?;
        }
        ("power_log", 4 | 5) => {
            params.lambda = opt(2, "lambda")?;
            params.sigma = opt(3, "sigma")?;
            params.scale = opt(4, "scale")?;
        }
        ("warped", 3) => params.phi = Some(parts[2].to_string()),
        ("warped", 4 | 5) if parts[2] == "cone" => {
            params.phi = Some("cone".into());
            params.c = opt(3, "c")?;
            params.r0 = opt(4, "r0")?;
        }
        ("tabulated", 3) => table = Some(read_table(Path::new(parts[2]))?.into_iter().map(|(a, b)| [a, b]).collect()),
        _ => return Err(bad()),
    }
    Ok(ProfileDescriptor {
        dimension,
        form: form.into(),
        params,
        table,
    })
}

/// `power:k[:r0]` or `power_log:k:b[:r0]`.
pub fn parse_growth_spec(spec: &str) -> Result<GrowthDescriptor> {
    let parts: Vec<&str> = spec.split(':').collect();
    let get = |i: usize, what: &str| parts.get(i).map(|s| num(s, what)).transpose();
    match (parts[0], parts.len()) {
        ("power", 2 | 3) => Ok(GrowthDescriptor {
            form: "power".into(),
            k: num(parts[1], "k")?,
            b: None,
            r0: get(2, "r0")?.unwrap_or(1.0),
        }),
        ("power_log", 3 | 4) => Ok(GrowthDescriptor {
            form: "power_log".into(),
            k: num(parts[1], "k")?,
            b: get(2, "b")?,
            r0: get(3, "r0")?.unwrap_or(1.0),
        }),
        _ => Err(Error::Config(format!("unrecognised growth function '{spec}'"))),
    }
}

/// `start:end:count`, log-spaced.
pub fn parse_grid_spec(spec: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("grid '{spec}' must read start:end:count")));
    }
    Ok(GridSpec {
        start: num(parts[0], "start")?,
        end: num(parts[1], "end")?,
        count: parts[2]
            .parse()
            .map_err(|_| Error::Config(format!("grid '{spec}': count must be an integer")))?,
        spacing: Spacing::Log,
    })
}

/// Two-column numeric CSV with a header row.
pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Config(format!(
                "{}: row {} must have two columns",
                path.display(),
                line + 2
            )));
        }
        let a = num(&record[0], "table")?;
        let b = num(&record[1], "table")?;
        rows.push((a, b));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GREEN: &str = r#"{
        "schema_version": 1,
        "name": "euclid-green-n3",
        "profile": {"dimension": 3, "form": "euclidean"},
        "growth": {"form": "power", "k": 3},
        "experiment": {"kind": "green", "radii": [0.5, 1, 2]}
    }"#;

    #[test]
    fn parses_green_scenario() {
        let s = Scenario::parse(GREEN).unwrap();
        assert_eq!(s.experiment.kind(), "green");
        assert_eq!(s.profile().unwrap().dimension, 3);
    }

    #[test]
    fn unknown_key_reports_position() {
        let text = GREEN.replace("\"radii\"", "\"radius\"");
        let err = Scenario::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line") && err.contains("radius"), "{err}");
    }

    #[test]
    fn wrong_schema_version() {
        let text = GREEN.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(Scenario::parse(&text).unwrap_err().to_string().contains("schema_version"));
    }

    #[test]
    fn profile_specs() {
        assert_eq!(parse_profile_spec("euclidean:5").unwrap(), ProfileDescriptor::euclidean(5));
        let p = parse_profile_spec("power:5:3.5").unwrap();
        assert_eq!(p.params.lambda, Some(3.5));
        let c = parse_profile_spec("warped:4:cone:0.5").unwrap();
        assert_eq!(c.params.c, Some(0.5));
        assert!(parse_profile_spec("sphere:3").is_err());
    }

    #[test]
    fn empty_grid() {
        let g = GridSpec { start: 1.0, end: 2.0, count: 0, spacing: Spacing::Log };
        assert!(g.points().unwrap().is_empty());
    }
}
