//! CSV ingestion, lag subsampling and JSON export of significance maps.
//!
//! Input CSV: comma separated, header row, UTF-8, `.` decimal separator.
//! Lines starting with `#` are comments.

use std::f64::consts::PI;
use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::circkernel::{wrap, Angle, Concentration};
use crate::density::CircularSample;
use crate::error::{Error, Result};
use crate::inference::{BootstrapConfig, CellState, Data, Mode};
use crate::regression::CircLinearSample;
use crate::sizermap::{Cell, FeatureRow, Provenance, SizerMap, SmoothingGrid};

pub const MAP_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Degrees,
    Radians,
}

/// How raw angles are laid out on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Clockwise from North.
    Compass,
    /// Counterclockwise from East. The internal convention.
    #[default]
    Math,
}

/// Converts a raw angle to internal radians.
pub fn to_internal(raw: f64, unit: AngleUnit, convention: Convention) -> Result<Angle> {
    match (unit, convention) {
        (AngleUnit::Degrees, Convention::Compass) => wrap((90.0 - raw) * (PI / 180.0)),
        (AngleUnit::Degrees, Convention::Math) => wrap(raw * (PI / 180.0)),
        (AngleUnit::Radians, Convention::Compass) => wrap(PI / 2.0 - raw),
        (AngleUnit::Radians, Convention::Math) => wrap(raw),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestSpec {
    pub angle_column: String,
    /// Present for regression data.
    pub response_column: Option<String>,
    pub angle_unit: AngleUnit,
    pub convention: Convention,
    /// Only used to warn about irregular sampling.
    pub timestamp_column: Option<String>,
    /// Keep every `lag`-th record, counted over all data rows of the file.
    pub lag: Option<usize>,
    /// Raw values treated as missing (for example a calm code such as 999).
    pub sentinels: Vec<f64>,
}

impl IngestSpec {
    pub fn density(angle_column: impl Into<String>) -> Self {
        IngestSpec {
            angle_column: angle_column.into(),
            response_column: None,
            angle_unit: AngleUnit::Radians,
            convention: Convention::Math,
            timestamp_column: None,
            lag: None,
            sentinels: Vec::new(),
        }
    }

    pub fn regression(angle_column: impl Into<String>, response_column: impl Into<String>) -> Self {
        IngestSpec {
            response_column: Some(response_column.into()),
            ..IngestSpec::density(angle_column)
        }
    }
}

/// A data row that was skipped, with its 1-based line number in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct DroppedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub data: Data,
    /// Data rows in the file, before lag selection.
    pub rows_read: usize,
    pub dropped: Vec<DroppedRow>,
    pub warnings: Vec<String>,
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::Schema {
            path: path.to_path_buf(),
            message: format!(
                "column '{name}' not found (available: {})",
                headers.iter().map(str::trim).collect::<Vec<_>>().join(", ")
            ),
        })
}

fn parse_value(field: Option<&str>, what: &str, sentinels: &[f64]) -> std::result::Result<f64, String> {
    let text = field.map(str::trim).unwrap_or("");
    if text.is_empty() {
        return Err(format!("{what} is missing"));
    }
    let v: f64 = text
        .parse()
        .map_err(|_| format!("{what} '{text}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what} '{text}' is not finite"));
    }
    if sentinels.contains(&v) {
        return Err(format!("{what} {text} is a missing-value code"));
    }
    Ok(v)
}

fn parse_timestamp(text: &str) -> Option<i64> {
    let t = text.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(t) {
        return Some(dt.timestamp());
    }
    ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(t, f).ok())
        .map(|dt| dt.and_utc().timestamp())
}

fn timestamp_warning(stamps: &[(u64, i64)]) -> Option<String> {
    if stamps.len() < 3 {
        return None;
    }
    let mut steps: Vec<i64> = stamps.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let irregular: Vec<(u64, i64)> = {
        let mut sorted = steps.clone();
        sorted.sort_unstable();
        let typical = sorted[sorted.len() / 2];
        stamps
            .windows(2)
            .filter(|w| w[1].1 - w[0].1 != typical)
            .map(|w| (w[1].0, w[1].1 - w[0].1))
            .collect()
    };
    if irregular.is_empty() {
        return None;
    }
    steps.sort_unstable();
    let typical = steps[steps.len() / 2];
    let (line, gap) = irregular[0];
    Some(format!(
        "timestamps are irregular: {} step(s) differ from the typical {typical} s \
         (first at line {line}, step {gap} s); the lag counts rows, not time",
        irregular.len()
    ))
}

/// Reads angle (and optionally response) data from a CSV file.
pub fn ingest(path: impl AsRef<Path>, spec: &IngestSpec) -> Result<Ingested> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(file, path, spec)
}

/// As [`ingest`], reading from any source. `path` is only used in messages.
pub fn ingest_reader(reader: impl std::io::Read, path: &Path, spec: &IngestSpec) -> Result<Ingested> {
    if spec.lag == Some(0) {
        return Err(Error::contract("lag must be >= 1"));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let angle_idx = column_index(&headers, &spec.angle_column, path)?;
    let response_idx = spec
        .response_column
        .as_deref()
        .map(|c| column_index(&headers, c, path))
        .transpose()?;
    let stamp_idx = spec
        .timestamp_column
        .as_deref()
        .map(|c| column_index(&headers, c, path))
        .transpose()?;
    let lag = spec.lag.unwrap_or(1);

    let mut angles = Vec::new();
    let mut responses = Vec::new();
    let mut dropped = Vec::new();
    let mut stamps = Vec::new();
    let mut rows_read = 0;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        rows_read += 1;
        if i % lag != 0 {
            continue;
        }
        let line = record.position().map_or(0, |p| p.line());
        if let Some(t) = stamp_idx.and_then(|k| record.get(k)).and_then(parse_timestamp) {
            stamps.push((line, t));
        }
        let parsed = parse_value(record.get(angle_idx), "angle", &spec.sentinels)
            .and_then(|a| to_internal(a, spec.angle_unit, spec.convention).map_err(|e| e.to_string()))
            .and_then(|a| match response_idx {
                Some(k) => parse_value(record.get(k), "response", &spec.sentinels).map(|y| (a, Some(y))),
                None => Ok((a, None)),
            });
        match parsed {
            Ok((a, y)) => {
                angles.push(a);
                if let Some(y) = y {
                    responses.push(y);
                }
            }
            Err(reason) => dropped.push(DroppedRow { line, reason }),
        }
    }
    if angles.is_empty() {
        return Err(Error::EmptyData(path.to_path_buf()));
    }
    let mut warnings = Vec::new();
    if stamp_idx.is_some() {
        warnings.extend(timestamp_warning(&stamps));
    }
    let data = if response_idx.is_some() {
        Data::Regression(CircLinearSample::new(angles, responses)?)
    } else {
        Data::Density(CircularSample::new(angles)?)
    };
    Ok(Ingested {
        data,
        rows_read,
        dropped,
        warnings,
    })
}

/// Keeps items `0, lag, 2 lag, ...` in order.
pub fn lag_subsample<T: Clone>(items: &[T], lag: usize) -> Result<Vec<T>> {
    if lag == 0 {
        return Err(Error::contract("lag must be >= 1"));
    }
    Ok(items.iter().step_by(lag).cloned().collect())
}

pub fn lag_subsample_sample(sample: &CircularSample, lag: usize) -> Result<CircularSample> {
    CircularSample::new(lag_subsample(sample.angles(), lag)?)
}

pub fn lag_subsample_pairs(sample: &CircLinearSample, lag: usize) -> Result<CircLinearSample> {
    CircLinearSample::new(
        lag_subsample(sample.angles(), lag)?,
        lag_subsample(sample.responses(), lag)?,
    )
}

/// Writes a sample as CSV (`theta[,y]`, math-convention radians), with
/// optional leading comment lines.
pub fn write_sample_csv(data: &Data, comments: &[String], mut out: impl std::io::Write) -> Result<()> {
    let mut text = String::new();
    for c in comments {
        for line in c.lines() {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
    }
    match data {
        Data::Density(s) => {
            text.push_str("theta\n");
            for a in s.angles() {
                text.push_str(&format!("{}\n", a.radians()));
            }
        }
        Data::Regression(s) => {
            text.push_str("theta,y\n");
            for (a, y) in s.pairs() {
                text.push_str(&format!("{},{}\n", a.radians(), y));
            }
        }
    }
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io(PathBuf::from("<output>"), e))
}

// --- map export ---------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct MapDocument {
    schema_version: u32,
    mode: Mode,
    grid: GridDoc,
    config: ConfigDoc,
    #[serde(default)]
    provenance: Option<Provenance>,
    cells: Vec<CellDoc>,
    features: Vec<FeatureRow>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridDoc {
    ngrid: usize,
    theta: Vec<f64>,
    nu: Vec<Concentration>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConfigDoc {
    alpha: f64,
    #[serde(rename = "B")]
    b: usize,
    #[serde(rename = "B2")]
    b2: usize,
    seed: u64,
    ess_threshold: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CellDoc {
    nu_index: usize,
    theta_index: usize,
    state: CellState,
    ess: f64,
    estimate: Option<f64>,
    sd: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn finite(v: Option<f64>) -> Option<f64> {
    v.filter(|x| x.is_finite())
}

fn document(map: &SizerMap) -> MapDocument {
    let cells = map
        .cells
        .iter()
        .enumerate()
        .flat_map(|(k, ring)| {
            ring.iter().enumerate().map(move |(j, c)| CellDoc {
                nu_index: k,
                theta_index: j,
                state: c.state,
                ess: c.ess,
                estimate: finite(c.estimate),
                sd: finite(c.sd),
                lower: finite(c.lower),
                upper: finite(c.upper),
            })
        })
        .collect();
    MapDocument {
        schema_version: MAP_SCHEMA_VERSION,
        mode: map.mode,
        grid: GridDoc {
            ngrid: map.grid.ngrid(),
            theta: map.grid.theta_grid().into_iter().map(Angle::radians).collect(),
            nu: map.grid.nu_grid().to_vec(),
        },
        config: ConfigDoc {
            alpha: map.config.alpha,
            b: map.config.b,
            b2: map.config.b2,
            seed: map.config.seed,
            ess_threshold: map.ess_threshold,
        },
        provenance: map.provenance.clone(),
        cells,
        features: map.features(),
    }
}

/// Serializes a map to pretty-printed JSON (trailing newline included).
pub fn map_to_json(map: &SizerMap) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&document(map))?;
    s.push('\n');
    Ok(s)
}

pub fn map_from_json(text: &str) -> Result<SizerMap> {
    let doc: MapDocument = serde_json::from_str(text)?;
    let bad = |message: String| Error::Schema {
        path: PathBuf::from("<map json>"),
        message,
    };
    if doc.schema_version != MAP_SCHEMA_VERSION {
        return Err(bad(format!("unsupported schema_version {}", doc.schema_version)));
    }
    let grid = SmoothingGrid::new(doc.grid.ngrid, doc.grid.nu)?;
    let (rings, ngrid) = (grid.nu_grid().len(), grid.ngrid());
    if doc.cells.len() != rings * ngrid {
        return Err(bad(format!(
            "expected {} cells, found {}",
            rings * ngrid,
            doc.cells.len()
        )));
    }
    let mut cells: Vec<Vec<Option<Cell>>> = vec![vec![None; ngrid]; rings];
    for c in doc.cells {
        let slot = cells
            .get_mut(c.nu_index)
            .and_then(|r| r.get_mut(c.theta_index))
            .ok_or_else(|| bad(format!("cell index ({}, {}) out of range", c.nu_index, c.theta_index)))?;
        if slot.is_some() {
            return Err(bad(format!("duplicate cell ({}, {})", c.nu_index, c.theta_index)));
        }
        *slot = Some(Cell {
            state: c.state,
            ess: c.ess,
            estimate: c.estimate,
            sd: c.sd,
            lower: c.lower,
            upper: c.upper,
        });
    }
    Ok(SizerMap {
        grid,
        mode: doc.mode,
        config: BootstrapConfig {
            alpha: doc.config.alpha,
            b: doc.config.b,
            b2: doc.config.b2,
            seed: doc.config.seed,
        },
        ess_threshold: doc.config.ess_threshold,
        // every slot was filled: count matched and duplicates were rejected
        cells: cells
            .into_iter()
            .map(|r| r.into_iter().map(|c| c.expect("filled")).collect())
            .collect(),
        provenance: doc.provenance,
    })
}

pub fn export_map(map: &SizerMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, map_to_json(map)?).map_err(|e| Error::io(path, e))
}

pub fn import_map(path: impl AsRef<Path>) -> Result<SizerMap> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    map_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circkernel::{compass_to_math, math_to_compass};
    use std::f64::consts::TAU;
    use std::io::Write;

    fn ingest_str(csv: &str, spec: &IngestSpec) -> Result<Ingested> {
        ingest_reader(csv.as_bytes(), Path::new("mem.csv"), spec)
    }

    #[test]
    fn compass_degrees_conversion() {
        let n = to_internal(0.0, AngleUnit::Degrees, Convention::Compass).unwrap();
        assert!((n.radians() - PI / 2.0).abs() < 1e-12);
        let e = to_internal(90.0, AngleUnit::Degrees, Convention::Compass).unwrap();
        assert_eq!(e.radians(), 0.0);
        let s = to_internal(180.0, AngleUnit::Degrees, Convention::Compass).unwrap();
        assert!((s.radians() - 1.5 * PI).abs() < 1e-12);
        let w = to_internal(270.0, AngleUnit::Degrees, Convention::Compass).unwrap();
        assert!((w.radians() - PI).abs() < 1e-12);
    }

    #[test]
    fn radians_math_is_wrap() {
        let a = to_internal(7.0, AngleUnit::Radians, Convention::Math).unwrap();
        assert!((a.radians() - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn compass_radians_agrees_with_kernel_conversion() {
        for k in 0..100 {
            let b = Angle::new(TAU * k as f64 / 100.0).unwrap();
            let via_io = to_internal(b.radians(), AngleUnit::Radians, Convention::Compass).unwrap();
            assert_eq!(via_io, compass_to_math(b));
            assert!(math_to_compass(via_io).distance(b) < 1e-12);
        }
    }

    #[test]
    fn lag_examples() {
        let rows: Vec<usize> = (0..10).collect();
        assert_eq!(lag_subsample(&rows, 1).unwrap(), rows);
        assert_eq!(lag_subsample(&rows, 3).unwrap(), vec![0, 3, 6, 9]);
        assert_eq!(lag_subsample(&rows, 10).unwrap(), vec![0]);
        assert_eq!(lag_subsample(&rows, 50).unwrap(), vec![0]);
        assert!(lag_subsample(&rows, 0).is_err());
    }

    #[test]
    fn lag_on_samples() {
        let s = CircularSample::from_radians(&[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(lag_subsample_sample(&s, 2).unwrap().radians(), vec![0.0, 2.0, 4.0]);
        let r = CircLinearSample::from_radians(&[0.0, 1.0, 2.0, 3.0], &[5.0, 6.0, 7.0, 8.0]).unwrap();
        let sub = lag_subsample_pairs(&r, 2).unwrap();
        assert_eq!(sub.responses(), &[5.0, 7.0]);
    }

    #[test]
    fn ingest_density_and_drop_report() {
        let csv = "# comment\ndir,speed\n0,1\n90,2\nabc,3\n,4\n999,5\n180,6\n";
        let spec = IngestSpec {
            angle_unit: AngleUnit::Degrees,
            convention: Convention::Compass,
            sentinels: vec![999.0],
            ..IngestSpec::density("dir")
        };
        let got = ingest_str(csv, &spec).unwrap();
        assert_eq!(got.rows_read, 6);
        assert_eq!(got.data.len(), 3);
        assert_eq!(got.dropped.len(), 3);
        assert_eq!(got.dropped[0].line, 5);
        assert!(got.dropped[0].reason.contains("abc"));
        assert!(got.dropped[1].reason.contains("missing"));
        assert!(got.dropped[2].reason.contains("missing-value"));
        assert_eq!(got.data.angles()[1].radians(), 0.0);
    }

    #[test]
    fn ingest_regression_requires_response_column() {
        let csv = "theta,y\n0.1,1\n0.2,2\n";
        assert!(matches!(
            ingest_str(csv, &IngestSpec::regression("theta", "speed")),
            Err(Error::Schema { .. })
        ));
        assert!(matches!(
            ingest_str(csv, &IngestSpec::density("phi")),
            Err(Error::Schema { .. })
        ));
        let got = ingest_str(csv, &IngestSpec::regression("theta", "y")).unwrap();
        assert_eq!(got.data.mode(), Mode::Regression);
    }

    #[test]
    fn ingest_empty_is_error() {
        let csv = "theta\nx\n\n";
        assert!(matches!(
            ingest_str(csv, &IngestSpec::density("theta")),
            Err(Error::EmptyData(_))
        ));
    }

    #[test]
    fn ingest_missing_file_names_path() {
        let err = ingest("/nonexistent/winds.csv", &IngestSpec::density("theta")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/winds.csv"));
    }

    #[test]
    fn ingest_is_idempotent_on_clean_data() {
        let csv = "theta\n0.5\n1.5\n6.0\n";
        let first = ingest_str(csv, &IngestSpec::density("theta")).unwrap();
        let mut out = Vec::new();
        write_sample_csv(&first.data, &["note".into()], &mut out).unwrap();
        let second = ingest_str(std::str::from_utf8(&out).unwrap(), &IngestSpec::density("theta")).unwrap();
        assert_eq!(first.data, second.data);
    }

    #[test]
    fn timestamp_gap_warning() {
        let csv = "t,dir\n2020-01-01 00:00:00,10\n2020-01-01 01:00:00,20\n2020-01-01 02:00:00,30\n2020-01-01 05:00:00,40\n";
        let spec = IngestSpec {
            timestamp_column: Some("t".into()),
            angle_unit: AngleUnit::Degrees,
            ..IngestSpec::density("dir")
        };
        let got = ingest_str(csv, &spec).unwrap();
        assert_eq!(got.warnings.len(), 1, "{:?}", got.warnings);
        let regular = "t,dir\n2020-01-01T00:00:00Z,10\n2020-01-01T01:00:00Z,20\n2020-01-01T02:00:00Z,30\n";
        assert!(ingest_str(regular, &spec).unwrap().warnings.is_empty());
    }

    #[test]
    fn hourly_record_with_lag_95_keeps_about_200_rows() {
        // nine winters of hourly observations, roughly 90 days each
        let hours = 9 * 90 * 24;
        let mut csv = String::from("time,direction\n");
        let start = chrono::NaiveDate::from_ymd_opt(2000, 12, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
        for h in 0..hours {
            let t = start + chrono::Duration::hours(h);
            csv.push_str(&format!("{},{}\n", t.format("%Y-%m-%d %H:%M:%S"), (h * 7) % 360));
        }
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(csv.as_bytes()).unwrap();
        let spec = IngestSpec {
            angle_unit: AngleUnit::Degrees,
            convention: Convention::Compass,
            timestamp_column: Some("time".into()),
            lag: Some(95),
            ..IngestSpec::density("direction")
        };
        let got = ingest(file.path(), &spec).unwrap();
        assert_eq!(got.rows_read, hours as usize);
        assert!((190..=240).contains(&got.data.len()), "{}", got.data.len());
        assert!(got.warnings.is_empty());
        // first row: compass 0 degrees
        assert!((got.data.angles()[0].radians() - PI / 2.0).abs() < 1e-12);
    }

    fn small_map() -> SizerMap {
        let sample = CircularSample::from_radians(&[0.1, 0.2, 0.4, 0.5, 3.0, 3.1, 3.3, 3.5, 5.0]).unwrap();
        let grid = SmoothingGrid::from_values(12, &[1.0, 4.0, 9.5]).unwrap();
        let config = BootstrapConfig {
            b: 40,
            seed: 3,
            ..Default::default()
        };
        let mut map = crate::sizermap::build_map(&Data::Density(sample), &grid, &config, 2.0).unwrap();
        map.provenance = Some(Provenance {
            kind: "scenario".into(),
            source: "D2".into(),
            n: 9,
            note: Some("stand-in".into()),
            details: [("ngrid".to_string(), "12".to_string())].into(),
        });
        map
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let map = small_map();
        let first = map_to_json(&map).unwrap();
        let back = map_from_json(&first).unwrap();
        assert_eq!(back, map);
        assert_eq!(map_to_json(&back).unwrap(), first);
    }

    #[test]
    fn json_structure() {
        let map = small_map();
        let v: serde_json::Value = serde_json::from_str(&map_to_json(&map).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["cells"].as_array().unwrap().len(), 3 * 12);
        assert_eq!(v["config"]["B"], 40);
        assert_eq!(v["config"]["ess_threshold"], 2.0);
        assert_eq!(v["provenance"]["source"], "D2");
        let tokens = ["increasing", "decreasing", "flat", "sparse"];
        for c in v["cells"].as_array().unwrap() {
            assert!(tokens.contains(&c["state"].as_str().unwrap()));
        }
    }

    #[test]
    fn file_export_import() {
        let map = small_map();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("map.json");
        export_map(&map, &p).unwrap();
        assert_eq!(import_map(&p).unwrap(), map);
        assert!(export_map(&map, dir.path().join("missing/dir/map.json")).is_err());
    }

    #[test]
    fn import_rejects_wrong_cell_count() {
        let json = map_to_json(&small_map()).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["cells"].as_array_mut().unwrap().pop();
        assert!(map_from_json(&v.to_string()).is_err());
        v["schema_version"] = 2.into();
        assert!(map_from_json(&v.to_string()).is_err());
    }
}
