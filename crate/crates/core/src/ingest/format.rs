//! On-disk session format.
//!
//! A session is stored as two sibling UTF-8 text files with Unix line
//! endings, named from a common base path:
//!
//! `<base>.session.csv`
//! ```text
//! agent=P1
//! group=1
//! day=1
//! sample_rate=50
//! time_s,potential_mv,awx,awy,awz,acx,acy,acz,valid
//! 0,0.013,-0.01,0.02,1.003,0,0,0.98,1
//! ...
//! ```
//! Four `key=value` header lines in exactly that order, a fixed column
//! header, then one comma-separated row per sample. `valid` is `1` or `0`;
//! a `0` marks data loss. Floats are written in shortest round-trip form, so
//! a load/write cycle reproduces the file byte for byte. NaN never appears;
//! lost samples keep a placeholder value and a `0` mask instead.
//!
//! `<base>.labels.csv`
//! ```text
//! start_s,end_s,class,joint,partner
//! 0,10,A3,0,
//! 10,20,A5,1,P2
//! ```
//! Intervals are half-open `[start_s, end_s)`, sorted, non-overlapping.
//! `joint` is `1`/`0` and `partner` is empty exactly when `joint` is `0`.
//! Only `A1`..`A10` may appear: unlabeled time is simply not covered and
//! data loss lives in the session mask.
//!
//! A dataset directory additionally carries a `manifest.json` listing every
//! session base; [`load_dataset`] falls back to a directory scan when the
//! manifest is absent.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::label::{LabelClass, LabelInterval};
use crate::ingest::session::SessionData;

pub const SESSION_SUFFIX: &str = ".session.csv";
pub const LABELS_SUFFIX: &str = ".labels.csv";
pub const MANIFEST_NAME: &str = "manifest.json";

const SESSION_COLUMNS: &str = "time_s,potential_mv,awx,awy,awz,acx,acy,acz,valid";
const LABEL_COLUMNS: &str = "start_s,end_s,class,joint,partner";

/// Absolute tolerance when checking that the time column matches the uniform
/// clock implied by the header sample rate.
const TIME_TOLERANCE_S: f64 = 1e-6;

pub fn session_file(base: &Path) -> PathBuf {
    PathBuf::from(format!("{}{SESSION_SUFFIX}", base.display()))
}

pub fn labels_file(base: &Path) -> PathBuf {
    PathBuf::from(format!("{}{LABELS_SUFFIX}", base.display()))
}

// ---------------------------------------------------------------------------
// writing
// ---------------------------------------------------------------------------

/// Writes both files for a session. The session is validated first, so a
/// file that lands on disk always loads back cleanly.
pub fn write_session(session: &SessionData, base: &Path) -> Result<()> {
    session.validate()?;
    let path = session_file(base);
    let mut out = String::new();
    out.push_str(&format!("agent={}\n", session.agent_id));
    out.push_str(&format!("group={}\n", session.group_id));
    out.push_str(&format!("day={}\n", session.day_index));
    out.push_str(&format!("sample_rate={}\n", session.sample_rate_hz));
    out.push_str(SESSION_COLUMNS);
    out.push('\n');
    let rate = session.sample_rate_hz;
    for i in 0..session.n_samples() {
        let t = i as f64 / rate;
        let [awx, awy, awz] = session.accel_wrist[i];
        let [acx, acy, acz] = session.accel_calf[i];
        out.push_str(&format!(
            "{t},{},{awx},{awy},{awz},{acx},{acy},{acz},{}\n",
            session.potential_mv[i],
            u8::from(session.valid[i]),
        ));
    }
    std::fs::write(&path, out).map_err(|e| Error::io(path.display().to_string(), e))?;

    let path = labels_file(base);
    let mut out = String::new();
    out.push_str(LABEL_COLUMNS);
    out.push('\n');
    for l in &session.labels {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            l.start_s,
            l.end_s,
            l.class,
            u8::from(l.joint),
            l.partner.as_deref().unwrap_or(""),
        ));
    }
    std::fs::write(&path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

// ---------------------------------------------------------------------------
// reading
// ---------------------------------------------------------------------------

struct LineParser<'a> {
    path: String,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> LineParser<'a> {
    fn new(path: &Path, text: &'a str) -> Self {
        LineParser {
            path: path.display().to_string(),
            lines: text.lines().enumerate(),
        }
    }

    fn fail<T>(&self, line: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        })
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.lines.next().map(|(i, l)| (i + 1, l))
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.next_line() {
            Some(hit) => Ok(hit),
            None => self.fail(0, format!("file ended early, expected {what}")),
        }
    }
}

fn parse_field<T: FromStr>(
    parser: &LineParser<'_>,
    line: usize,
    name: &str,
    raw: &str,
) -> Result<T> {
    raw.trim()
        .parse::<T>()
        .map_err(|_| Error::Parse {
            path: parser.path.clone(),
            line,
            message: format!("cannot parse {name} from {raw:?}"),
        })
}

fn header_value<'a>(parser: &mut LineParser<'a>, key: &str) -> Result<(usize, &'a str)> {
    let (line_no, line) = parser.expect_line(&format!("header line `{key}=...`"))?;
    match line.split_once('=') {
        Some((k, v)) if k == key => Ok((line_no, v)),
        _ => parser.fail(line_no, format!("expected header line `{key}=...`, got {line:?}")),
    }
}

/// Loads and validates the session stored under `base`.
pub fn load_session(base: &Path) -> Result<SessionData> {
    let session_path = session_file(base);
    let text = std::fs::read_to_string(&session_path)
        .map_err(|e| Error::io(session_path.display().to_string(), e))?;
    let mut parser = LineParser::new(&session_path, &text);

    let (line, raw) = header_value(&mut parser, "agent")?;
    let agent_id: String = raw.trim().to_string();
    if agent_id.is_empty() {
        return parser.fail(line, "agent id is empty");
    }
    let (line, raw) = header_value(&mut parser, "group")?;
    let group_id: u32 = parse_field(&parser, line, "group", raw)?;
    let (line, raw) = header_value(&mut parser, "day")?;
    let day_index: u32 = parse_field(&parser, line, "day", raw)?;
    let (line, raw) = header_value(&mut parser, "sample_rate")?;
    let sample_rate_hz: f64 = parse_field(&parser, line, "sample_rate", raw)?;
    if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
        return parser.fail(line, format!("sample_rate must be positive, got {raw}"));
    }

    let (line, columns) = parser.expect_line("column header")?;
    if columns != SESSION_COLUMNS {
        return parser.fail(line, format!("expected columns {SESSION_COLUMNS:?}, got {columns:?}"));
    }

    let mut potential_mv = Vec::new();
    let mut accel_wrist = Vec::new();
    let mut accel_calf = Vec::new();
    let mut valid = Vec::new();
    while let Some((line_no, line)) = parser.next_line() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return parser.fail(line_no, format!("expected 9 fields, got {}", fields.len()));
        }
        let t: f64 = parse_field(&parser, line_no, "time_s", fields[0])?;
        let i = potential_mv.len();
        let expected_t = i as f64 / sample_rate_hz;
        if (t - expected_t).abs() > TIME_TOLERANCE_S {
            return parser.fail(
                line_no,
                format!("sample {i} carries time {t}, expected {expected_t} at {sample_rate_hz} Hz"),
            );
        }
        let mut nums = [0.0f64; 7];
        for (k, slot) in nums.iter_mut().enumerate() {
            let value: f64 = parse_field(&parser, line_no, "channel value", fields[k + 1])?;
            if !value.is_finite() {
                return parser.fail(line_no, format!("non-finite channel value {value}"));
            }
            *slot = value;
        }
        let valid_flag = match fields[8].trim() {
            "1" => true,
            "0" => false,
            other => return parser.fail(line_no, format!("valid must be 0 or 1, got {other:?}")),
        };
        potential_mv.push(nums[0]);
        accel_wrist.push([nums[1], nums[2], nums[3]]);
        accel_calf.push([nums[4], nums[5], nums[6]]);
        valid.push(valid_flag);
    }

    let labels = load_labels(&labels_file(base))?;
    let session = SessionData {
        agent_id,
        group_id,
        day_index,
        sample_rate_hz,
        potential_mv,
        accel_wrist,
        accel_calf,
        valid,
        labels,
    };
    session.validate()?;
    Ok(session)
}

fn load_labels(path: &Path) -> Result<Vec<LabelInterval>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut parser = LineParser::new(path, &text);
    let (line, columns) = parser.expect_line("column header")?;
    if columns != LABEL_COLUMNS {
        return parser.fail(line, format!("expected columns {LABEL_COLUMNS:?}, got {columns:?}"));
    }
    let mut labels = Vec::new();
    while let Some((line_no, line)) = parser.next_line() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return parser.fail(line_no, format!("expected 5 fields, got {}", fields.len()));
        }
        let start_s: f64 = parse_field(&parser, line_no, "start_s", fields[0])?;
        let end_s: f64 = parse_field(&parser, line_no, "end_s", fields[1])?;
        let class: LabelClass = parse_field(&parser, line_no, "class", fields[2])?;
        let joint = match fields[3].trim() {
            "1" => true,
            "0" => false,
            other => return parser.fail(line_no, format!("joint must be 0 or 1, got {other:?}")),
        };
        let partner = match fields[4].trim() {
            "" => None,
            name => Some(name.to_string()),
        };
        if joint != partner.is_some() {
            return parser.fail(line_no, "joint flag and partner column must agree");
        }
        labels.push(LabelInterval {
            start_s,
            end_s,
            class,
            joint,
            partner,
        });
    }
    Ok(labels)
}

// ---------------------------------------------------------------------------
// dataset directories
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    /// Session base name, relative to the dataset directory.
    pub base: String,
    pub agent: String,
    pub group: u32,
    pub day: u32,
    pub samples: usize,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub version: u32,
    pub sessions: Vec<ManifestEntry>,
}

pub const MANIFEST_VERSION: u32 = 1;

/// Writes every session plus a manifest into `dir`. Bases are
/// `g<group>d<day>_<agent>`; entries are sorted by (group, day, agent).
pub fn write_dataset(sessions: &[SessionData], dir: &Path) -> Result<DatasetManifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut order: Vec<usize> = (0..sessions.len()).collect();
    order.sort_by_key(|&i| {
        let s = &sessions[i];
        (s.group_id, s.day_index, s.agent_id.clone())
    });
    let mut entries = Vec::new();
    for i in order {
        let session = &sessions[i];
        let base_name = session.session_id();
        write_session(session, &dir.join(&base_name))?;
        entries.push(ManifestEntry {
            base: base_name,
            agent: session.agent_id.clone(),
            group: session.group_id,
            day: session.day_index,
            samples: session.n_samples(),
            duration_s: session.duration_s(),
        });
    }
    let manifest = DatasetManifest {
        version: MANIFEST_VERSION,
        sessions: entries,
    };
    let path = dir.join(MANIFEST_NAME);
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::config(format!("manifest serialisation failed: {e}")))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(manifest)
}

/// Session bases found in a dataset directory: manifest order when a
/// manifest exists, otherwise every `*.session.csv`, sorted by name.
pub fn dataset_bases(dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest_path = dir.join(MANIFEST_NAME);
    if manifest_path.exists() {
        let text = std::fs::read_to_string(&manifest_path)
            .map_err(|e| Error::io(manifest_path.display().to_string(), e))?;
        let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: manifest_path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        if manifest.version != MANIFEST_VERSION {
            return Err(Error::config(format!(
                "unsupported manifest version {} in {}",
                manifest.version,
                manifest_path.display()
            )));
        }
        return Ok(manifest.sessions.iter().map(|e| dir.join(&e.base)).collect());
    }
    let entries =
        std::fs::read_dir(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut bases = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir.display().to_string(), e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(stem) = name.strip_suffix(SESSION_SUFFIX) {
            bases.push(dir.join(stem));
        }
    }
    bases.sort();
    if bases.is_empty() {
        return Err(Error::invalid(format!(
            "no sessions found under {}",
            dir.display()
        )));
    }
    Ok(bases)
}

/// Loads a whole dataset directory.
pub fn load_dataset(dir: &Path) -> Result<Vec<SessionData>> {
    dataset_bases(dir)?.iter().map(|b| load_session(b)).collect()
}
