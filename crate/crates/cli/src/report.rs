use serde::{Deserialize, Serialize};

use crate::config::{CliError, CliResult, OutputFormat};

pub const SCHEMA_VERSION: u32 = 1;

/// One output line in the machine format. Only the fields relevant to the
/// record kind are present.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportRecord {
    pub schema_version: u32,
    pub command: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub jt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operands: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ReportRecord {
    pub fn new(command: &str, kind: &str) -> Self {
        ReportRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            kind: kind.to_string(),
            ..Default::default()
        }
    }
}

/// A command's output in all three formats, plus whether a checked property
/// failed.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<ReportRecord>,
    pub text: Vec<String>,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    pub violation: Option<String>,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> CliResult<String> {
        match format {
            OutputFormat::Text => {
                let mut s = self.text.join("\n");
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Jsonl => {
                let mut s = String::new();
                for r in &self.records {
                    s.push_str(&serde_json::to_string(r).map_err(|e| CliError::Usage(e.to_string()))?);
                    s.push('\n');
                }
                Ok(s)
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| CliError::Usage(e.to_string());
                w.write_record(&self.csv_header).map_err(io)?;
                for row in &self.csv_rows {
                    w.write_record(row).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_records_omit_absent_fields() {
        let mut r = ReportRecord::new("strata", "stratum");
        r.jt = Some("2[3]+[2]".into());
        r.count = Some(64);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"schema_version":1,"command":"strata","kind":"stratum","type":"2[3]+[2]","count":64}"#);
        assert_eq!(serde_json::from_str::<ReportRecord>(&s).unwrap(), r);
        assert!(serde_json::from_str::<ReportRecord>(r#"{"schema_version":1,"command":"x","kind":"y","z":1}"#).is_err());
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let rep = Report {
            csv_header: vec!["type", "representatives"],
            csv_rows: vec![vec!["[3]+[1]".into(), "(1, 0)".into()]],
            ..Default::default()
        };
        assert_eq!(rep.render(OutputFormat::Csv).unwrap(), "type,representatives\n[3]+[1],\"(1, 0)\"\n");
    }
}
