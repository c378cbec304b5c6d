use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::fit::LineFit;

/// Version of every CSV schema written by the harness.
pub const SCHEMA_VERSION: u32 = 1;

/// Rows of formatted cells under named columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Locale-independent shortest round-trip formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// A numeric column parsed back to `f64`.
    pub fn f64_column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .column(name)
            .ok_or_else(|| Error::Invalid(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|r| {
                r[i].parse::<f64>()
                    .map_err(|e| Error::Invalid(format!("column `{name}`: {e}")))
            })
            .collect()
    }

    /// CSV body with a versioned schema comment line.
    pub fn to_csv(&self, experiment: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        let mut out = format!("# schema: hybrid-degen/{experiment}/v{SCHEMA_VERSION}\n");
        out.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
        Ok(out)
    }
}

/// Result of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Subcommand name, e.g. `lyap-slope`.
    pub experiment: String,
    /// `<experiment>-<first 12 hex digits of the config hash>`.
    pub id: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    /// Per-cell results, written as the CSV.
    pub table: Table,
    /// Scalar results and diagnostics.
    pub summary: Map<String, Value>,
    pub fit: Option<LineFit>,
    /// Seconds since the Unix epoch when the record was created.
    pub created_unix: u64,
}

impl ResultRecord {
    pub fn new(experiment: &str, config: &ExperimentConfig, table: Table) -> Self {
        let config_hash = config.hash();
        ResultRecord {
            experiment: experiment.to_string(),
            id: format!("{experiment}-{}", &config_hash[..12]),
            config_hash,
            config: config.clone(),
            table,
            summary: Map::new(),
            fit: None,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("summary value serializes");
        self.summary.insert(key.to_string(), v);
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    pub fn csv(&self) -> Result<String> {
        self.table.to_csv(&self.experiment)
    }

    /// Writes `<id>.csv` and `<id>.json` to `dir` and appends a line to
    /// `records.jsonl`. Returns the CSV and JSON paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.id));
        fs::write(&csv_path, self.csv()?)?;
        let json_path = dir.join(format!("{}.json", self.id));
        fs::write(&json_path, serde_json::to_string_pretty(self)?)?;
        let mut log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join("records.jsonl"))?;
        let line = serde_json::json!({
            "id": self.id,
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "created_unix": self.created_unix,
            "fit": self.fit,
        });
        writeln!(log, "{line}")?;
        Ok((csv_path, json_path))
    }

    /// Loads a JSON record and checks it was produced by `config`.
    pub fn load(path: &Path, config: &ExperimentConfig) -> Result<Self> {
        let rec: ResultRecord = serde_json::from_str(&fs::read_to_string(path)?)?;
        let expected = config.hash();
        if rec.config_hash != expected || rec.config.hash() != expected {
            return Err(Error::Config(format!(
                "record {} was produced by config {}, not {expected}",
                path.display(),
                rec.config_hash
            )));
        }
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_schema_header() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![fmt_f64(0.1), fmt_f64(-2.0)]);
        let csv = t.to_csv("demo").unwrap();
        assert_eq!(csv, "# schema: hybrid-degen/demo/v1\na,b\n0.1,-2.0\n");
        assert_eq!(t.f64_column("b").unwrap(), vec![-2.0]);
    }

    #[test]
    fn load_checks_hash() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::from_toml("family = \"z^2\"").unwrap();
        let rec = ResultRecord::new("demo", &cfg, Table::new(&["x"]));
        let (_, json) = rec.write(dir.path()).unwrap();
        assert_eq!(ResultRecord::load(&json, &cfg).unwrap(), rec);
        let mut other = cfg.clone();
        other.r = 0.25;
        assert!(matches!(
            ResultRecord::load(&json, &other),
            Err(Error::Config(_))
        ));
        rec.write(dir.path()).unwrap();
        let log = fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
        assert_eq!(log.lines().count(), 2);
    }
}
