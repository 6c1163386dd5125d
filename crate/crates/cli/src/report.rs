//! Check records, summaries and their text and JSON renderings.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    pub kind: String,
    pub subject: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Value>,
}

impl Record {
    pub fn new(kind: &str, subject: &str, status: Status) -> Self {
        Self {
            id: String::new(),
            kind: kind.to_owned(),
            subject: subject.to_owned(),
            measure: None,
            status,
            reason: None,
            lhs: None,
            rhs: None,
            trace: None,
        }
    }

    pub fn pass_if(kind: &str, subject: &str, ok: bool) -> Self {
        Self::new(kind, subject, if ok { Status::Pass } else { Status::Fail })
    }

    pub fn measure(mut self, m: impl Into<String>) -> Self {
        self.measure = Some(m.into());
        self
    }

    pub fn reason(mut self, r: impl Into<String>) -> Self {
        self.reason = Some(r.into());
        self
    }

    pub fn sides(mut self, lhs: impl ToString, rhs: impl ToString) -> Self {
        self.lhs = Some(lhs.to_string());
        self.rhs = Some(rhs.to_string());
        self
    }

    pub fn trace(mut self, t: Value) -> Self {
        self.trace = Some(t);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    pub measures: Vec<String>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub header: Header,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    /// Numbers the records in order and tallies them.
    pub fn new(header: Header, mut records: Vec<Record>) -> Self {
        let mut summary = Summary::default();
        for (k, r) in records.iter_mut().enumerate() {
            r.id = format!("{k:05}");
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        summary.total = records.len();
        Report { header, records, summary }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per record, grouped by subject and then check kind.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<&Record> = self.records.iter().collect();
        rows.sort_by(|a, b| (&a.subject, &a.kind, &a.id).cmp(&(&b.subject, &b.kind, &b.id)));
        let mut out = String::new();
        for r in rows {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("[{tag}] {} {}", r.kind, r.subject));
            if let Some(m) = &r.measure {
                out.push_str(&format!(" ({m})"));
            }
            match (&r.lhs, &r.rhs) {
                (Some(l), Some(rr)) if l != rr || r.status != Status::Pass => out.push_str(&format!(": {l} vs {rr}")),
                (Some(l), _) => out.push_str(&format!(": {l}")),
                _ => {}
            }
            if let Some(why) = &r.reason {
                out.push_str(&format!(" [{why}]"));
            }
            out.push('\n');
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} checks: {} passed, {} failed, {} skipped\n",
            s.total, s.pass, s.fail, s.skipped
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header {
            tool: "cutpaste".into(),
            version: "0".into(),
            command: "check".into(),
            recipe: None,
            seed: None,
            size: None,
            measures: vec![],
            depth: 3,
        }
    }

    #[test]
    fn tallies() {
        let r = Report::new(
            header(),
            vec![
                Record::pass_if("a", "x", true),
                Record::pass_if("a", "y", false).sides(1, 2),
                Record::new("b", "x", Status::Skipped).reason("why"),
            ],
        );
        assert_eq!(r.summary, Summary { total: 3, pass: 1, fail: 1, skipped: 1 });
        assert!(r.has_failures());
        assert_eq!(r.records[1].id, "00001");
        let text = r.to_text();
        assert!(text.contains("[FAIL] a y: 1 vs 2"));
        assert!(text.ends_with("3 checks: 1 passed, 1 failed, 1 skipped\n"));
        let empty = Report::new(header(), vec![]);
        assert_eq!(empty.summary, Summary::default());
        assert!(!empty.has_failures());
    }
}
