//! Time series (CSV) and field snapshots.
//!
//! Time series: one header line, then one line per record. Reals are
//! written with `{:.16e}` (17 significant digits), so every value reads
//! back bit-exactly. Undefined bubble metrics are empty cells.
//!
//! Snapshot: an ASCII header of `key value...` lines ending with `end`,
//! followed by the raw fields as little-endian IEEE-754 `f64`, in the order
//! listed on the `fields` line:
//!
//! ```text
//! chns-snapshot 1
//! grid <nx> <ny> <hx> <hy>
//! time <t> <step>
//! fields phi:<len> mu:<len> p:<len> u:<len> v:<len>
//! end
//! ```
//!
//! `phi`, `mu` and `p` are cell values with `i` fastest; `u` and `v` are the
//! face arrays of the velocity, also with `i` fastest.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::state::SimState;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub step: usize,
    pub time: f64,
    pub original_energy: f64,
    pub modified_energy: f64,
    pub volume: f64,
    /// `[r, Q, R, T, K]`.
    pub sav: [f64; 5],
    pub y_c: Option<f64>,
    pub v_c: Option<f64>,
    pub iters_ch: usize,
    pub iters_momentum: usize,
    pub iters_poisson: usize,
    pub wall_time: f64,
}

pub const TIMESERIES_HEADER: &str = "step,time,original_energy,modified_energy,volume,r,Q,R,T,K,y_c,V_c,iters_ch,iters_momentum,iters_poisson,wall_time";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

impl TimeSeriesRecord {
    pub fn to_csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(real).unwrap_or_default();
        let mut cols = vec![
            self.step.to_string(),
            real(self.time),
            real(self.original_energy),
            real(self.modified_energy),
            real(self.volume),
        ];
        cols.extend(self.sav.iter().map(|v| real(*v)));
        cols.extend([
            opt(self.y_c),
            opt(self.v_c),
            self.iters_ch.to_string(),
            self.iters_momentum.to_string(),
            self.iters_poisson.to_string(),
            real(self.wall_time),
        ]);
        cols.join(",")
    }
}

pub fn timeseries_text(records: &[TimeSeriesRecord]) -> String {
    let mut s = String::from(TIMESERIES_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

pub fn write_timeseries(path: &Path, records: &[TimeSeriesRecord]) -> Result<()> {
    fs::write(path, timeseries_text(records)).map_err(|e| io_err(path, e))
}

/// Decoded snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub time: f64,
    pub step: usize,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Snapshot {
    pub fn of_state(state: &SimState) -> Self {
        let g = &state.grid;
        Snapshot {
            nx: g.nx,
            ny: g.ny,
            hx: g.hx,
            hy: g.hy,
            time: state.time,
            step: state.step_index,
            fields: vec![
                ("phi".into(), state.phi.data.clone()),
                ("mu".into(), state.mu.data.clone()),
                ("p".into(), state.p.data.clone()),
                ("u".into(), state.vel.u.clone()),
                ("v".into(), state.vel.v.clone()),
            ],
        }
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, d)| d.as_slice())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let fields: Vec<String> = self.fields.iter().map(|(n, d)| format!("{n}:{}", d.len())).collect();
        let header = format!(
            "chns-snapshot 1\ngrid {} {} {} {}\ntime {} {}\nfields {}\nend\n",
            self.nx,
            self.ny,
            real(self.hx),
            real(self.hy),
            real(self.time),
            self.step,
            fields.join(" ")
        );
        out.extend_from_slice(header.as_bytes());
        for (_, d) in &self.fields {
            for v in d {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_reader(r: impl Read) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut lines = Vec::new();
        loop {
            let mut line = String::new();
            let n = r.read_line(&mut line).map_err(|e| Error::Format(e.to_string()))?;
            if n == 0 {
                return Err(Error::Format("snapshot header has no 'end' line".into()));
            }
            let line = line.trim_end().to_string();
            if line == "end" {
                break;
            }
            lines.push(line);
        }
        let bad = |m: &str| Error::Format(format!("snapshot header: {m}"));
        if lines.first().map(String::as_str) != Some("chns-snapshot 1") {
            return Err(bad("missing magic line"));
        }
        let mut snap = Snapshot {
            nx: 0,
            ny: 0,
            hx: 0.0,
            hy: 0.0,
            time: 0.0,
            step: 0,
            fields: Vec::new(),
        };
        let mut layout = Vec::new();
        for line in &lines[1..] {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |k: usize| -> Result<f64> {
                parts.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| bad(line))
            };
            let int = |k: usize| -> Result<usize> {
                parts.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| bad(line))
            };
            match parts.first().copied() {
                Some("grid") => {
                    snap.nx = int(1)?;
                    snap.ny = int(2)?;
                    snap.hx = num(3)?;
                    snap.hy = num(4)?;
                }
                Some("time") => {
                    snap.time = num(1)?;
                    snap.step = int(2)?;
                }
                Some("fields") => {
                    for f in &parts[1..] {
                        let (name, len) = f.split_once(':').ok_or_else(|| bad(f))?;
                        layout.push((name.to_string(), len.parse::<usize>().map_err(|_| bad(f))?));
                    }
                }
                _ => return Err(bad(line)),
            }
        }
        for (name, len) in layout {
            let mut buf = vec![0u8; 8 * len];
            r.read_exact(&mut buf)
                .map_err(|e| Error::Format(format!("field {name}: {e}")))?;
            let data = buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect();
            snap.fields.push((name, data));
        }
        Ok(snap)
    }
}

pub fn write_snapshot(path: &Path, state: &SimState) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&Snapshot::of_state(state).to_bytes())
        .map_err(|e| io_err(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let f = fs::File::open(path).map_err(|e| io_err(path, e))?;
    Snapshot::from_reader(f)
}
