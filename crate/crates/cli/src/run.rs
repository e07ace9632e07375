//! Sequential job execution and report assembly.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::ops::{self, Outcome, RunError};
use crate::scenario::{Expect, Job, Object, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Malformed job: wrong argument types or missing parameters.
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct JobReport {
    pub name: String,
    pub op: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    pub status: Status,
    pub jobs: Vec<JobReport>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scenario {} (seed {})\n", self.scenario, self.seed);
        for j in &self.jobs {
            let tag = match j.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            out += &format!("{tag} {}: {}\n", j.name, j.detail);
        }
        let (pass, total) = (self.jobs.iter().filter(|j| j.status == Status::Pass).count(), self.jobs.len());
        out += &format!("{pass}/{total} jobs passed\n");
        out
    }
}

fn numbers_close(a: &Value, b: &Value, tol: f64) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            (x - y).abs() <= tol
        }
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(a, b)| numbers_close(a, b, tol))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| numbers_close(v, w, tol)))
        }
        _ => a == b,
    }
}

/// Compares an outcome against the expectation; returns the first mismatch.
fn check(expect: &Expect, out: &Outcome, tol: f64) -> Result<(), String> {
    if let Some(kind) = &expect.error {
        return Err(format!("expected error {kind}, got a value"));
    }
    if let Some(want) = &expect.equals {
        if want != &out.value {
            return Err(format!("expected {want}, got {}", out.value));
        }
    }
    if let Some(want) = &expect.text {
        let got = out.value.to_string();
        if want != &got {
            return Err(format!("expected `{want}`, got `{got}`"));
        }
    }
    if let Some(want) = expect.holds {
        match out.holds {
            Some(h) if h == want => {}
            Some(h) => return Err(format!("expected holds = {want}, got {h}")),
            None => return Err("operation has no verdict".into()),
        }
    }
    if let Some(bound) = expect.below {
        match out.residual {
            Some(r) if r < bound => {}
            Some(r) => return Err(format!("residual {r:e} not below {bound:e}")),
            None => return Err("operation has no residual".into()),
        }
    }
    if !expect.fields.is_empty() {
        let report = match &out.value {
            Object::Report(v) => v,
            other => return Err(format!("field checks need a report, got {}", other.type_name())),
        };
        for (key, want) in &expect.fields {
            match report.get(key) {
                Some(got) if numbers_close(want, got, tol) => {}
                Some(got) => return Err(format!("field {key}: expected {want}, got {got}")),
                None => return Err(format!("field {key} missing")),
            }
        }
    }
    Ok(())
}

fn summary(out: &Outcome) -> String {
    match (&out.value, out.holds, out.residual) {
        (Object::Report(_), Some(h), Some(r)) => format!("holds = {h}, residual {r:.3e}"),
        (Object::Report(_), Some(h), None) => format!("holds = {h}"),
        (Object::Report(_), None, Some(r)) => format!("residual {r:.3e}"),
        (Object::Report(v), None, None) => v.to_string(),
        (v, _, _) => v.to_string(),
    }
}

fn run_job(job: &Job, env: &mut BTreeMap<String, Object>, seed: u64) -> JobReport {
    let expect = job.expect.clone().unwrap_or_default();
    let tol = job.tolerance.unwrap_or(1e-12);
    let (status, detail, value, text) = match ops::execute(job, env, seed) {
        Ok(out) => {
            let value = serde_json::to_value(&out.value).ok().map(|v| v["value"].clone());
            let text = out.value.to_string();
            let (status, detail) = match check(&expect, &out, tol) {
                Ok(()) => (Status::Pass, summary(&out)),
                Err(e) => (Status::Fail, e),
            };
            if let Some(id) = &job.store {
                env.insert(id.clone(), out.value);
            }
            (status, detail, value, Some(text))
        }
        Err(RunError::Cut(e)) => match &expect.error {
            Some(kind) if kind == e.kind() => (Status::Pass, format!("{} raised as expected", e.kind()), None, None),
            _ => (Status::Fail, format!("{}: {e}", e.kind()), None, None),
        },
        Err(RunError::Schema(msg)) => (Status::Error, msg, None, None),
    };
    JobReport { name: job.name.clone(), op: job.op.clone(), status, detail, value, text }
}

/// Runs every job in order. Jobs excluded by `filter` still run when they
/// store a value, but are left out of the report.
pub fn run_scenario(scenario: &Scenario, seed: Option<u64>, filter: Option<&str>) -> ScenarioReport {
    let seed = seed.unwrap_or(scenario.seed);
    let mut env = scenario.objects.clone();
    let mut jobs = Vec::new();
    for job in &scenario.jobs {
        let selected = filter.is_none_or(|f| job.name.contains(f));
        if !selected && job.store.is_none() {
            continue;
        }
        let report = run_job(job, &mut env, seed);
        if selected {
            jobs.push(report);
        }
    }
    let status = if jobs.iter().any(|j| j.status == Status::Error) {
        Status::Error
    } else if jobs.iter().all(|j| j.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    ScenarioReport { scenario: scenario.name.clone(), seed, status, jobs }
}
