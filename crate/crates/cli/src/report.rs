//! Report assembly, canonical JSON and CSV emission.

use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Largest integer every IEEE double reader keeps exact.
const MAX_SAFE_INT: u64 = 1 << 53;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Finding {
    pub id: String,
    pub message: String,
    pub data: Value,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    command: String,
    config: Value,
    result: Map<String, Value>,
    checks: Vec<Check>,
    findings: Vec<Finding>,
    table: Option<Table>,
    timings: Vec<(String, f64)>,
    started: Instant,
    incomplete: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            command: command.to_string(),
            config,
            result: Map::new(),
            checks: vec![],
            findings: vec![],
            table: None,
            timings: vec![],
            started: Instant::now(),
            incomplete: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.result.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check { name: name.into(), pass });
    }

    pub fn finding(&mut self, id: &str, message: impl Into<String>, data: Value) {
        self.findings.push(Finding { id: id.to_string(), message: message.into(), data });
    }

    pub fn table(&mut self, table: Table) {
        self.table = Some(table);
    }

    /// Runs `f` and records its wall-clock time under `phase`.
    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.push((phase.to_string(), t.elapsed().as_secs_f64() * 1e3));
        out
    }

    /// Marks the result as a budget-limited lower bound.
    pub fn incomplete(&mut self, reason: impl Into<String>) {
        self.incomplete = Some(reason.into());
    }

    pub fn incomplete_reason(&self) -> Option<&str> {
        self.incomplete.as_deref()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The digested body: everything except the manifest.
    fn body(&self) -> Result<Value> {
        Ok(canonical(json!({
            "command": self.command,
            "config": self.config,
            "result": self.result,
            "checks": serde_json::to_value(&self.checks)?,
            "findings": serde_json::to_value(&self.findings)?,
            "pass": self.passed(),
        })))
    }

    pub fn digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(serde_json::to_vec(&self.body()?)?)))
    }

    pub fn to_json(&self, threads: usize) -> Result<String> {
        let digest = self.digest()?;
        let mut out = self.body()?;
        let timings: Map<String, Value> = self.timings.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let total = self.started.elapsed().as_secs_f64() * 1e3;
        out["manifest"] = canonical(json!({
            "config": self.config,
            "version": env!("CARGO_PKG_VERSION"),
            "digest": digest,
            "threads": threads,
            "timings_ms": timings,
            "total_ms": total,
        }));
        if let Value::Object(m) = &mut out {
            m.remove("config");
        }
        Ok(serde_json::to_string_pretty(&out)? + "\n")
    }

    pub fn to_csv(&self) -> Option<String> {
        let t = self.table.as_ref()?;
        let mut s = t.header.join(",") + "\n";
        for row in &t.rows {
            s += &row.join(",");
            s.push('\n');
        }
        Some(s)
    }
}

/// Sorted keys (the default `serde_json` map) and integers beyond `2^53`
/// written as decimal strings.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let big = n.as_u64().is_some_and(|u| u > MAX_SAFE_INT) || n.as_i64().is_some_and(|i| i.unsigned_abs() > MAX_SAFE_INT);
            if big {
                Value::String(n.to_string())
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_integers_become_strings() {
        let v = canonical(json!({"b": 9007199254740993u64, "a": [1, -9007199254740993i64], "c": 9007199254740992u64}));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":[1,"-9007199254740993"],"b":"9007199254740993","c":9007199254740992}"#);
    }

    #[test]
    fn digest_ignores_timings() {
        let mut a = Report::new("x", json!({"p": 7}));
        a.set("v", 3).unwrap();
        a.timed("phase", || std::thread::sleep(std::time::Duration::from_millis(2)));
        let mut b = Report::new("x", json!({"p": 7}));
        b.set("v", 3).unwrap();
        assert_eq!(a.digest().unwrap(), b.digest().unwrap());
        b.check("c", false);
        assert_ne!(a.digest().unwrap(), b.digest().unwrap());
    }
}
