//! Regression corpus: JSON scenarios naming a command, its inputs and the
//! expected machine value.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use tropcalc_core::linalg;
use tropcalc_core::rat::{int, serde_rat_mat};
use tropcalc_core::{Error, RatVector, Result};

use crate::commands::{self, Report};
use crate::schema::{decode, read};

#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Where the expected value comes from (hand computation, module
    /// example, ...).
    pub source: String,
    pub command: String,
    pub inputs: Value,
    pub expect: Value,
    /// Hand-written cochain complexes keyed by `p`, checked against `hpq`.
    #[serde(default)]
    pub oracle: Option<BTreeMap<String, OracleComplex>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct OracleComplex {
    pub dims: Vec<usize>,
    /// `maps[q]` has `dims[q+1]` rows and `dims[q]` columns.
    pub maps: Vec<Matrix>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Matrix(#[serde(with = "serde_rat_mat")] pub Vec<RatVector>);

impl OracleComplex {
    pub fn cohomology(&self) -> Result<Vec<usize>> {
        for (q, m) in self.maps.iter().enumerate() {
            let rows_ok = m.0.len() == self.dims[q + 1];
            let cols_ok = m.0.iter().all(|r| r.len() == self.dims[q]);
            if !rows_ok || !cols_ok {
                return Err(Error::Schema(format!("oracle map {q} has the wrong shape")));
            }
        }
        let ranks: Vec<usize> = self.maps.iter().map(|m| linalg::rank(&m.0)).collect();
        Ok((0..self.dims.len())
            .map(|q| {
                let out = ranks.get(q).copied().unwrap_or(0);
                let inc = if q > 0 { ranks[q - 1] } else { 0 };
                self.dims[q] - out - inc
            })
            .collect())
    }

    fn composes_to_zero(&self) -> bool {
        self.maps.windows(2).all(|w| {
            w[1].0.iter().all(|row| {
                let cols = w[0].0.first().map_or(0, |r| r.len());
                (0..cols).all(|j| {
                    row.iter()
                        .zip(&w[0].0)
                        .fold(int(0), |acc, (a, brow)| acc + a * &brow[j])
                        == int(0)
                })
            })
        })
    }
}

fn field<T: serde::de::DeserializeOwned>(inputs: &Value, key: &str) -> Result<T> {
    let v = inputs
        .get(key)
        .cloned()
        .ok_or_else(|| Error::Schema(format!("missing input {key:?}")))?;
    decode(v)
}

fn opt_field<T: serde::de::DeserializeOwned>(inputs: &Value, key: &str) -> Result<Option<T>> {
    inputs.get(key).cloned().map(decode).transpose()
}

/// Runs one scenario's command.
pub fn execute(command: &str, inputs: &Value) -> Result<Report> {
    match command {
        "check-balance" => commands::check_balance(&field(inputs, "cycle")?),
        "degree" => commands::degree(&field(inputs, "cycle")?),
        "integrate" => commands::integrate_cmd(&field(inputs, "form")?, &field(inputs, "cycle")?),
        "stokes" => {
            let form = field(inputs, "form")?;
            match opt_field(inputs, "region")? {
                Some(region) => commands::stokes_region(&form, &region),
                None => {
                    let set: Vec<usize> = field(inputs, "set")?;
                    let set = commands::parse_set(
                        &set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
                    )?;
                    commands::stokes_tube(&form, &field(inputs, "tube")?, &set)
                }
            }
        }
        "hpq" => {
            let ps: Option<Vec<usize>> = opt_field(inputs, "p")?;
            Ok(commands::hpq(&field(inputs, "complex")?, ps.as_deref())?.0)
        }
        "cycle-class" => commands::cycle_class(&field(inputs, "class")?),
        "tau" => commands::tau(&field(inputs, "symbol")?),
        "pair" => commands::pair(&field(inputs, "class")?, &field(inputs, "form")?),
        "demo-cauchy" => commands::demo_cauchy(
            field(inputs, "n")?,
            field(inputs, "q")?,
            opt_field(inputs, "m")?.unwrap_or(1),
        ),
        "demo-degree" => {
            let pts: Vec<i64> = field(inputs, "points")?;
            commands::demo_degree(&pts, opt_field(inputs, "n")?.unwrap_or(2))
        }
        other => Err(Error::Schema(format!("unknown command {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn run_scenario(s: &Scenario) -> Outcome {
    let fail = |detail: String| Outcome {
        name: s.name.clone(),
        passed: false,
        detail,
    };
    let report = match execute(&s.command, &s.inputs) {
        Ok(r) => r,
        Err(e) => {
            // expected errors are written as {"error": "<Variant>"}
            return match s.expect.get("error").and_then(Value::as_str) {
                Some(name) if format!("{e:?}").starts_with(name) => Outcome {
                    name: s.name.clone(),
                    passed: true,
                    detail: format!("error {name} as expected"),
                },
                _ => fail(format!("error: {e}")),
            };
        }
    };
    if report.value != s.expect {
        return fail(format!("got {}, expected {}", report.value, s.expect));
    }
    if let Some(oracle) = &s.oracle {
        for (p, cc) in oracle {
            if !cc.composes_to_zero() {
                return fail(format!("oracle complex for p={p} is not a complex"));
            }
            let dims = match cc.cohomology() {
                Ok(d) => d,
                Err(e) => return fail(e.to_string()),
            };
            let got = if oracle.len() == 1 && !s.expect.is_object() {
                s.expect.clone()
            } else {
                s.expect.get(p).cloned().unwrap_or(Value::Null)
            };
            if serde_json::to_value(&dims).unwrap() != got {
                return fail(format!("oracle for p={p} gives {dims:?}, hpq gave {got}"));
            }
        }
    }
    let expect_ok = s.expect.get("balanced").and_then(Value::as_bool).unwrap_or(true);
    if report.ok != expect_ok {
        return fail("the command's own check disagrees".into());
    }
    Outcome {
        name: s.name.clone(),
        passed: true,
        detail: report.value.to_string(),
    }
}

pub fn default_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}

/// Loads every `*.json` scenario under `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<Scenario>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read(p)).collect()
}
