//! Reports: a list of check records plus a summary, rendered as canonical
//! JSON (sorted keys) or a Markdown table.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    /// Stable identifier of the statement being checked.
    pub anchor: String,
    pub status: Status,
    pub detail: String,
    /// A witness for a success or a counterexample for a failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Deterministic work count (elements visited, samples drawn).
    pub work: u64,
}

impl Record {
    pub fn new(
        name: impl Into<String>,
        anchor: &str,
        passed: bool,
        detail: impl Into<String>,
    ) -> Self {
        Record {
            name: name.into(),
            anchor: anchor.to_string(),
            status: if passed { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            witness: None,
            work: 0,
        }
    }

    pub fn info(name: impl Into<String>, anchor: &str, detail: impl Into<String>) -> Self {
        Record {
            status: Status::Info,
            ..Record::new(name, anchor, true, detail)
        }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn with_work(mut self, work: u64) -> Self {
        self.work = work;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub info: usize,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub records: Vec<Record>,
    /// Structured command output (tables, instance data).
    pub data: Value,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, seed: u64, config: Value, records: Vec<Record>, data: Value) -> Self {
        let count = |s: Status| records.iter().filter(|r| r.status == s).count();
        let failed = count(Status::Fail);
        let summary = Summary {
            passed: count(Status::Pass),
            failed,
            info: count(Status::Info),
            verdict: if failed == 0 { "pass" } else { "fail" }.into(),
        };
        Report {
            command: command.into(),
            seed,
            config,
            records,
            data,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("reports serialize");
        let mut s = serde_json::to_string_pretty(&sort_keys(value)).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# dualpair {}\n\nseed: {}\n\n", self.command, self.seed);
        out.push_str("| check | anchor | status | work | detail |\n|---|---|---|---|---|\n");
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "**FAIL**",
                Status::Info => "info",
            };
            let mut detail = r.detail.clone();
            if let Some(w) = &r.witness {
                detail.push_str(&format!(" [{w}]"));
            }
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                cell(&r.name),
                cell(&r.anchor),
                status,
                r.work,
                cell(&detail)
            ));
        }
        out.push_str(&format!(
            "\n**{}**: {} passed, {} failed, {} informational\n",
            self.summary.verdict, self.summary.passed, self.summary.failed, self.summary.info
        ));
        out
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

/// `serde_json` maps are ordered by key unless `preserve_order` is enabled;
/// rebuilding the tree makes the ordering explicit either way.
fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, sort_keys(v)))
                    .collect(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_sorted() {
        let r = Report::new(
            "x",
            1,
            serde_json::json!({"b": 1, "a": {"d": 2, "c": 3}}),
            vec![Record::new("n", "a", true, "d")],
            Value::Null,
        );
        let s = r.to_json();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
        assert!(r.passed());
    }

    #[test]
    fn failures_flip_the_verdict() {
        let r = Report::new(
            "x",
            1,
            Value::Null,
            vec![Record::new("n", "a", false, "d")],
            Value::Null,
        );
        assert_eq!(r.summary.verdict, "fail");
        assert!(r.to_markdown().contains("**FAIL**"));
    }
}
