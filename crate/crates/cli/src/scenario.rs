//! Scenario files: named objects plus an ordered list of jobs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use cutkit_core::blowup::{BlowupLiftInput, PolarDiffeoPair};
use cutkit_core::cutting::{DistributionFrame, LocalMap};
use cutkit_core::forms::{DiscForm, HalfForm, Model};
use cutkit_core::funcalg::{DiscFunc, HalfFunc};
use cutkit_core::verify::SamplePlan;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ops;

pub const SCHEMA: &str = "cutkit-scenario/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Object {
    HalfFunc(HalfFunc),
    DiscFunc(DiscFunc),
    HalfForm(HalfForm),
    DiscForm(DiscForm),
    LocalMap(LocalMap),
    Frame(DistributionFrame),
    LiftInput(BlowupLiftInput),
    PolarPair(PolarDiffeoPair),
    /// Exact rational written as `"p/q"`.
    Rational(String),
    Bool(bool),
    Report(Value),
}

impl Object {
    pub fn type_name(&self) -> &'static str {
        match self {
            Object::HalfFunc(_) => "half_func",
            Object::DiscFunc(_) => "disc_func",
            Object::HalfForm(_) => "half_form",
            Object::DiscForm(_) => "disc_form",
            Object::LocalMap(_) => "local_map",
            Object::Frame(_) => "frame",
            Object::LiftInput(_) => "lift_input",
            Object::PolarPair(_) => "polar_pair",
            Object::Rational(_) => "rational",
            Object::Bool(_) => "bool",
            Object::Report(_) => "report",
        }
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::HalfFunc(x) => write!(f, "{x}"),
            Object::DiscFunc(x) => write!(f, "{x}"),
            Object::HalfForm(x) => write!(f, "{x}"),
            Object::DiscForm(x) => write!(f, "{x}"),
            Object::Rational(x) => write!(f, "{x}"),
            Object::Bool(x) => write!(f, "{x}"),
            other => {
                let v = match other {
                    Object::Report(v) => v.clone(),
                    _ => serde_json::to_value(other).map_err(|_| fmt::Error)?["value"].clone(),
                };
                write!(f, "{v}")
            }
        }
    }
}

/// Sample plan fields for a job; model and dimension come from the arguments.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_boundary: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<Vec<f64>>,
}

impl Sampling {
    pub fn plan(&self, model: Model, dim: usize, default_seed: u64) -> SamplePlan {
        let mut plan = SamplePlan::new(model, dim, self.seed.unwrap_or(default_seed));
        if let Some(n) = self.interior {
            plan.interior = n;
        }
        if let Some(n) = self.boundary {
            plan.boundary = n;
        }
        if let Some(n) = self.near_boundary {
            plan.near_boundary = n;
        }
        if let Some(x) = self.delta {
            plan.delta = x;
        }
        if let Some(x) = self.eps {
            plan.eps = x;
        }
        plan.extra = self.extra.clone();
        plan
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    /// Result equals this object exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equals: Option<Object>,
    /// Display string of the result.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    /// Boolean verdict of the result.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    /// The operation fails with this error kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The residual of the result is strictly below this bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below: Option<f64>,
    /// Top-level fields of the result report; numbers compare within the job tolerance.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fields: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub name: String,
    pub op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub store: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Sampling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Documentation of the local model a scenario works on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub id: String,
    pub model: Model,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub models: Vec<ModelDescriptor>,
    #[serde(default)]
    pub objects: BTreeMap<String, Object>,
    pub jobs: Vec<Job>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| e.to_string())?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes") + "\n"
    }

    /// Schema version, known operations and arities, and that every argument
    /// refers to an object or to a value stored by an earlier job.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema != SCHEMA {
            return Err(format!("unsupported schema `{}`, expected `{SCHEMA}`", self.schema));
        }
        let mut defined: BTreeSet<&str> = self.objects.keys().map(String::as_str).collect();
        let mut names = BTreeSet::new();
        for job in &self.jobs {
            if !names.insert(job.name.as_str()) {
                return Err(format!("duplicate job name `{}`", job.name));
            }
            let arity = ops::arity(&job.op).ok_or_else(|| format!("job `{}`: unknown op `{}`", job.name, job.op))?;
            if !arity.contains(&job.args.len()) {
                return Err(format!(
                    "job `{}`: op `{}` takes {:?} arguments, got {}",
                    job.name,
                    job.op,
                    arity,
                    job.args.len()
                ));
            }
            for a in &job.args {
                if !defined.contains(a.as_str()) {
                    return Err(format!("job `{}`: undefined object `{a}`", job.name));
                }
            }
            if let Some(s) = &job.store {
                defined.insert(s.as_str());
            }
        }
        Ok(())
    }
}
