//! Trajectory files. CSV columns are `t` followed by `<channel>.<monomial>`
//! for every basis monomial of the channel's parity; floats are written with
//! 17 significant digits so output is bit-stable and round-trips exactly.
//!
//! Written CSV starts with a metadata line
//! `# q=2 dt=1e-3 model_hash=… channels=x:even,psi:odd`, which the reader
//! uses when present. Without it, `q` and the channels are inferred from
//! the header, so an odd channel at q = 0 (which has no columns) is lost.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::grassmann::{Blade, GrassmannElement, Parity};
use crate::modelio::TrajectoryIoError;
use crate::scurves::{Channel, Trajectory, TrajectoryMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Csv,
    Json,
}

impl TrajectoryFormat {
    pub fn from_path(path: &Path) -> TrajectoryFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => TrajectoryFormat::Json,
            _ => TrajectoryFormat::Csv,
        }
    }
}

/// Hex SHA-256 of a model's canonical text.
pub fn model_hash(canonical_text: &str) -> String {
    Sha256::digest(canonical_text.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(traj: &Trajectory) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for (i, c) in traj.channels().iter().enumerate() {
        for b in traj.blades(i) {
            cols.push(format!("{}.{}", c.name, b.label()));
        }
    }
    cols
}

fn row(traj: &Trajectory, i: usize) -> Vec<f64> {
    let mut out = vec![traj.times()[i]];
    for (c, v) in traj.sample(i).iter().enumerate() {
        out.extend(traj.blades(c).into_iter().map(|b| v.component(b)));
    }
    out
}

fn channel_list(traj: &Trajectory) -> String {
    traj.channels().iter().map(|c| format!("{}:{}", c.name, c.parity)).collect::<Vec<_>>().join(",")
}

fn parse_channel_list(text: &str, line: usize) -> Result<Vec<Channel>, TrajectoryIoError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|item| {
            let (name, parity) =
                item.split_once(':').ok_or_else(|| schema(line, format!("channel '{item}' is not <name>:<parity>")))?;
            let parity = match parity {
                "even" => Parity::Even,
                "odd" => Parity::Odd,
                other => return Err(schema(line, format!("unknown parity '{other}'"))),
            };
            Ok(Channel::new(name, parity))
        })
        .collect()
}

pub fn write_trajectory_csv(traj: &Trajectory) -> String {
    let mut out = format!("# q={}", traj.q());
    if let Some(dt) = traj.meta.dt {
        let _ = write!(out, " dt={}", fmt_float(dt));
    }
    if let Some(h) = &traj.meta.model_hash {
        let _ = write!(out, " model_hash={h}");
    }
    let _ = writeln!(out, " channels={}", channel_list(traj));
    out.push_str(&header(traj).join(","));
    out.push('\n');
    for i in 0..traj.len() {
        let cells: Vec<String> = row(traj, i).into_iter().map(fmt_float).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonMeta {
    q: u32,
    dt: Option<f64>,
    model_hash: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonTrajectory {
    meta: JsonMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    channels: Option<String>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

pub fn write_trajectory_json(traj: &Trajectory) -> String {
    let doc = JsonTrajectory {
        meta: JsonMeta { q: traj.q(), dt: traj.meta.dt, model_hash: traj.meta.model_hash.clone() },
        channels: Some(channel_list(traj)),
        columns: header(traj),
        rows: (0..traj.len()).map(|i| row(traj, i)).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

fn schema(line: usize, message: impl Into<String>) -> TrajectoryIoError {
    TrajectoryIoError::Schema { line, message: message.into() }
}

/// Channels from a header; `q` is inferred from the largest generator when
/// not given. All-even trajectories over Λ_1 read back with q = 0, which
/// stores the same numbers.
fn parse_header(cols: &[String], q: Option<u32>) -> Result<(u32, Vec<Channel>), TrajectoryIoError> {
    if cols.first().map(String::as_str) != Some("t") {
        return Err(schema(1, "first column must be 't'"));
    }
    let mut groups: Vec<(String, Vec<Blade>)> = Vec::new();
    for col in &cols[1..] {
        let (name, label) =
            col.rsplit_once('.').ok_or_else(|| schema(1, format!("column '{col}' is not <channel>.<monomial>")))?;
        let blade = Blade::parse_label(label).ok_or_else(|| schema(1, format!("bad monomial label in '{col}'")))?;
        match groups.last_mut() {
            Some((n, blades)) if n == name => blades.push(blade),
            _ => {
                if groups.iter().any(|(n, _)| n == name) {
                    return Err(schema(1, format!("columns of '{name}' are not contiguous")));
                }
                groups.push((name.to_string(), vec![blade]));
            }
        }
    }
    let max_gen = groups.iter().flat_map(|(_, bs)| bs.iter().flat_map(|b| b.generators())).max().unwrap_or(0);
    let q = q.unwrap_or(max_gen);
    let mut channels = Vec::new();
    for (name, blades) in groups {
        let parity = blades[0].parity();
        if blades != Blade::all_with_parity(q, parity) {
            return Err(schema(1, format!("channel '{name}' must list every {parity} monomial of q = {q} in order")));
        }
        channels.push(Channel::new(name, parity));
    }
    Ok((q, channels))
}

/// Checks a header against declared channels.
fn check_header(cols: &[String], q: u32, channels: Vec<Channel>, line: usize) -> Result<(u32, Vec<Channel>), TrajectoryIoError> {
    let probe = Trajectory::new(q, channels.clone());
    let expected = header(&probe);
    if cols != expected.as_slice() {
        return Err(schema(line, format!("header does not match the declared channels (expected {})", expected.join(","))));
    }
    Ok((q, channels))
}

fn fill(traj: &mut Trajectory, rows: impl Iterator<Item = (usize, Vec<f64>)>, width: usize) -> Result<(), TrajectoryIoError> {
    let q = traj.q();
    let layout: Vec<(Parity, Vec<Blade>)> =
        (0..traj.channels().len()).map(|c| (traj.channels()[c].parity, traj.blades(c))).collect();
    for (line, cells) in rows {
        if cells.len() != width {
            return Err(schema(line, format!("expected {width} values, found {}", cells.len())));
        }
        let mut k = 1;
        let mut values = Vec::with_capacity(layout.len());
        for (_, blades) in &layout {
            let terms = blades.iter().map(|b| {
                k += 1;
                (*b, cells[k - 1])
            });
            values.push(GrassmannElement::from_terms(q, terms.collect::<Vec<_>>())?);
        }
        traj.push(cells[0], values).map_err(|e| schema(line, e.to_string()))?;
    }
    Ok(())
}

pub fn read_trajectory_csv(text: &str) -> Result<Trajectory, TrajectoryIoError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
    let mut meta = TrajectoryMeta::default();
    let mut declared: Option<(u32, Vec<Channel>)> = None;
    if let Some((i, first)) = lines.next_if(|(_, l)| l.trim_start().starts_with('#')) {
        let (mut q, mut channels) = (None, None);
        for field in first.trim_start().trim_start_matches('#').split_whitespace() {
            let (key, value) =
                field.split_once('=').ok_or_else(|| schema(i + 1, format!("metadata field '{field}' is not key=value")))?;
            match key {
                "q" => q = Some(value.parse::<u32>().map_err(|e| schema(i + 1, e.to_string()))?),
                "dt" => meta.dt = Some(value.parse::<f64>().map_err(|e| schema(i + 1, e.to_string()))?),
                "model_hash" => meta.model_hash = Some(value.to_string()),
                "channels" => channels = Some(parse_channel_list(value, i + 1)?),
                other => return Err(schema(i + 1, format!("unknown metadata field '{other}'"))),
            }
        }
        if let (Some(q), Some(c)) = (q, channels) {
            declared = Some((q, c));
        }
    }
    let (h, head) = lines.next().ok_or_else(|| schema(1, "empty trajectory file"))?;
    let cols: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
    let (q, channels) = match declared {
        Some((q, c)) => check_header(&cols, q, c, h + 1)?,
        None => parse_header(&cols, None)?,
    };
    let mut traj = Trajectory::new(q, channels);
    traj.meta = meta;
    let mut parsed = Vec::new();
    for (i, l) in lines {
        let cells = l
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| schema(i + 1, e.to_string()))?;
        parsed.push((i + 1, cells));
    }
    fill(&mut traj, parsed.into_iter(), cols.len())?;
    Ok(traj)
}

pub fn read_trajectory_json(text: &str) -> Result<Trajectory, TrajectoryIoError> {
    let doc: JsonTrajectory = serde_json::from_str(text)?;
    let (q, channels) = match &doc.channels {
        Some(list) => check_header(&doc.columns, doc.meta.q, parse_channel_list(list, 1)?, 1)?,
        None => parse_header(&doc.columns, Some(doc.meta.q))?,
    };
    let mut traj = Trajectory::new(q, channels);
    traj.meta = TrajectoryMeta { dt: doc.meta.dt, model_hash: doc.meta.model_hash };
    let width = doc.columns.len();
    fill(&mut traj, doc.rows.into_iter().enumerate().map(|(i, r)| (i + 1, r)), width)?;
    Ok(traj)
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory, TrajectoryIoError> {
    let text = std::fs::read_to_string(path)?;
    match TrajectoryFormat::from_path(path) {
        TrajectoryFormat::Json => read_trajectory_json(&text),
        TrajectoryFormat::Csv => read_trajectory_csv(&text),
    }
}
