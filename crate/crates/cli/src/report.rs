use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub lhs: String,
    pub rhs: String,
    pub value: String,
}

impl Entry {
    pub fn new(lhs: impl Into<String>, rhs: impl Into<String>, value: impl ToString) -> Self {
        Self {
            kind: None,
            lhs: lhs.into(),
            rhs: rhs.into(),
            value: value.to_string(),
        }
    }

    pub fn with_kind(mut self, kind: impl Into<String>) -> Self {
        self.kind = Some(kind.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationRecord {
    pub context: String,
    pub lhs: String,
    pub rhs: String,
    pub expected: String,
    pub actual: String,
    pub note: String,
}

/// The theorem table as a symbolic header plus one value row per basis pair.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TableLayout {
    pub row_names: Vec<String>,
    /// `symbolic[row][family]` for the families `(L,L)`, `(L,E)`, `(E,E)`.
    pub symbolic: Vec<[String; 3]>,
    /// `(lhs, rhs, one value per row)`.
    pub values: Vec<(String, String, Vec<String>)>,
}

/// Result of one command; serialized with a fixed field order and exact rationals only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Map<String, Value>,
    pub status: Status,
    pub entries: Vec<Entry>,
    pub violations: Vec<ViolationRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub layout: Option<TableLayout>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            params: Map::new(),
            status: Status::Pass,
            entries: Vec::new(),
            violations: Vec::new(),
            notes: Vec::new(),
            layout: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Sets the status from the violation list.
    pub fn settle(mut self) -> Self {
        self.status = if self.violations.is_empty() { Status::Pass } else { Status::Fail };
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Md => self.to_markdown(),
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let row = |w: &mut csv::Writer<Vec<u8>>, fields: &[&str]| w.write_record(fields).expect("in-memory write");
        row(&mut w, &["section", "kind", "lhs", "rhs", "value", "expected", "note"]);
        for (k, v) in &self.params {
            row(&mut w, &["param", "", k, "", &v.to_string(), "", ""]);
        }
        for e in &self.entries {
            row(&mut w, &["entry", e.kind.as_deref().unwrap_or(""), &e.lhs, &e.rhs, &e.value, "", ""]);
        }
        for v in &self.violations {
            row(&mut w, &["violation", &v.context, &v.lhs, &v.rhs, &v.actual, &v.expected, &v.note]);
        }
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
        };
        row(&mut w, &["status", "", "", "", status, "", ""]);
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}\n", self.command);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        if !params.is_empty() {
            let _ = writeln!(s, "Parameters: {}\n", params.join(", "));
        }
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
        };
        let _ = writeln!(s, "Status: **{status}**\n");
        if let Some(layout) = &self.layout {
            write_layout(&mut s, layout);
        } else if !self.entries.is_empty() {
            let with_kind = self.entries.iter().any(|e| e.kind.is_some());
            if with_kind {
                let _ = writeln!(s, "| kind | lhs | rhs | value |\n|---|---|---|---|");
            } else {
                let _ = writeln!(s, "| lhs | rhs | value |\n|---|---|---|");
            }
            for e in &self.entries {
                if with_kind {
                    let _ = write!(s, "| {} ", e.kind.as_deref().unwrap_or(""));
                }
                let _ = writeln!(s, "| {} | {} | {} |", e.lhs, e.rhs, e.value);
            }
            s.push('\n');
        }
        if !self.violations.is_empty() {
            let _ = writeln!(s, "## Violations\n\n| context | lhs | rhs | expected | actual | note |\n|---|---|---|---|---|---|");
            for v in &self.violations {
                let _ = writeln!(s, "| {} | {} | {} | {} | {} | {} |", v.context, v.lhs, v.rhs, v.expected, v.actual, v.note);
            }
            s.push('\n');
        }
        for note in &self.notes {
            let _ = writeln!(s, "> {note}\n");
        }
        s
    }
}

fn write_layout(s: &mut String, layout: &TableLayout) {
    let _ = writeln!(s, "|  | (L_r,L_s) | (L_r,E_ij^s) | (E_ij^r,E_kl^s) |\n|---|---|---|---|");
    for (name, cells) in layout.row_names.iter().zip(&layout.symbolic) {
        let _ = writeln!(s, "| {name} | {} | {} | {} |", cells[0], cells[1], cells[2]);
    }
    s.push('\n');
    if layout.values.is_empty() {
        return;
    }
    let _ = write!(s, "| lhs | rhs |");
    for name in &layout.row_names {
        let _ = write!(s, " {name} |");
    }
    let _ = write!(s, "\n|---|---|");
    for _ in &layout.row_names {
        s.push_str("---|");
    }
    s.push('\n');
    for (lhs, rhs, vals) in &layout.values {
        let _ = write!(s, "| {lhs} | {rhs} |");
        for v in vals {
            let _ = write!(s, " {v} |");
        }
        s.push('\n');
    }
    s.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("cocycle").param("n", 1).param("beta", 0);
        r.entries.push(Entry::new("E(1,2;3)", "E(2,1;-3)", "-3"));
        r
    }

    #[test]
    fn json_shape() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["command", "entries", "params", "status", "violations"]);
        assert_eq!(v["status"], "pass");
        assert_eq!(v["entries"][0]["value"], "-3");
    }

    #[test]
    fn csv_quotes_commas() {
        let csv = sample().render(Format::Csv);
        assert!(csv.contains("entry,,\"E(1,2;3)\",\"E(2,1;-3)\",-3,,"), "{csv}");
        assert!(csv.trim_end().ends_with("status,,,,pass,,"));
    }

    #[test]
    fn settle_sets_status() {
        let mut r = sample();
        r.violations.push(ViolationRecord {
            context: "x".into(),
            lhs: "a".into(),
            rhs: "b".into(),
            expected: "1".into(),
            actual: "2".into(),
            note: String::new(),
        });
        let r = r.settle();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.exit_code(), 1);
        assert!(r.render(Format::Md).contains("FAIL"));
    }
}
