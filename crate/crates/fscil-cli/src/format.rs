//! The embedding dataset file format.
//!
//! UTF-8 text. The first line is a fixed-order header of `key=value`
//! pairs; every following line is one labeled sample:
//!
//! ```text
//! format_version=1 dim=2 total_classes=4 base_classes=2 sessions=1 way=2 shot=2
//! train 0 0 0.25 -1.5
//! test 1 3 0.125 2.75
//! ```
//!
//! Columns: split (`train`|`test`), session, class id, then exactly `dim`
//! feature values. Floats are written with Rust's shortest round-trip
//! formatting, so write/load is bit-exact. Parsing is locale-independent.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fscil_core::{ClassId, FeatureVector, LabeledSample, ProtocolConfig, SessionDataset};

use crate::{CliError, Result};

pub const FORMAT_VERSION: u64 = 1;

const HEADER_KEYS: [&str; 7] = [
    "format_version",
    "dim",
    "total_classes",
    "base_classes",
    "sessions",
    "way",
    "shot",
];

fn format_err(path: &Path, message: String) -> CliError {
    CliError::Format { path: path.display().to_string(), message }
}

/// Serialize a dataset. Row order is deterministic: all train rows in
/// session order, then all test rows, each preserving in-session order.
pub fn write_dataset(dataset: &SessionDataset, path: &Path) -> Result<()> {
    let cfg = &dataset.config;
    let mut out = String::new();
    writeln!(
        out,
        "format_version={FORMAT_VERSION} dim={} total_classes={} base_classes={} sessions={} way={} shot={}",
        cfg.dim, cfg.total_classes, cfg.base_classes, cfg.sessions, cfg.way, cfg.shot
    )
    .expect("write to string");
    for (split, sessions) in [("train", &dataset.train), ("test", &dataset.test)] {
        for (t, samples) in sessions.iter().enumerate() {
            for s in samples {
                write!(out, "{split} {t} {}", s.label.0).expect("write to string");
                for v in s.feature.as_slice() {
                    write!(out, " {v}").expect("write to string");
                }
                out.push('\n');
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

fn parse_header(path: &Path, line: &str) -> Result<ProtocolConfig> {
    let mut values = [0u64; 7];
    let mut seen = [false; 7];
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| format_err(path, format!("malformed header: token `{token}`")))?;
        let idx = HEADER_KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| format_err(path, format!("malformed header: unknown field `{key}`")))?;
        if seen[idx] {
            return Err(format_err(path, format!("malformed header: duplicate field `{key}`")));
        }
        values[idx] = value
            .parse()
            .map_err(|_| format_err(path, format!("malformed header: bad value for `{key}`")))?;
        seen[idx] = true;
    }
    if let Some(idx) = seen.iter().position(|s| !s) {
        return Err(format_err(
            path,
            format!("malformed header: missing field `{}`", HEADER_KEYS[idx]),
        ));
    }
    if values[0] != FORMAT_VERSION {
        return Err(format_err(path, format!("unsupported format_version {}", values[0])));
    }
    Ok(ProtocolConfig {
        dim: values[1] as usize,
        total_classes: values[2] as usize,
        base_classes: values[3] as usize,
        sessions: values[4] as usize,
        way: values[5] as usize,
        shot: values[6] as usize,
    })
}

/// Parse a dataset file and validate it; validation failures are forwarded
/// as [`CliError::Validation`].
pub fn load_dataset(path: &Path) -> Result<SessionDataset> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| format_err(path, "empty file".into()))?;
    let config = parse_header(path, header)?;
    let n_sessions = config.sessions + 1;
    let mut train = vec![Vec::new(); n_sessions];
    let mut test = vec![Vec::new(); n_sessions];

    for (idx, line) in lines {
        let row = idx + 1; // 1-based line number
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let split = fields
            .next()
            .ok_or_else(|| format_err(path, format!("row {row}: missing split column")))?;
        let target = match split {
            "train" => &mut train,
            "test" => &mut test,
            other => {
                return Err(format_err(
                    path,
                    format!("row {row}: split must be `train` or `test`, got `{other}`"),
                ))
            }
        };
        let session: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| format_err(path, format!("row {row}: bad session column")))?;
        if session >= n_sessions {
            return Err(format_err(
                path,
                format!("row {row}: session {session} out of range 0..{n_sessions}"),
            ));
        }
        let class: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| format_err(path, format!("row {row}: bad class column")))?;
        let mut values = Vec::with_capacity(config.dim);
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| format_err(path, format!("row {row}: bad feature value `{f}`")))?;
            values.push(v);
        }
        if values.len() != config.dim {
            return Err(format_err(
                path,
                format!("row {row}: expected {} values, got {}", config.dim, values.len()),
            ));
        }
        let feature = FeatureVector::new(values)
            .map_err(|e| format_err(path, format!("row {row}: {e}")))?;
        target[session].push(LabeledSample { feature, label: ClassId(class) });
    }

    let dataset = SessionDataset { config, train, test };
    let report = dataset.validate();
    if !report.ok {
        return Err(CliError::Validation(report));
    }
    Ok(dataset)
}
