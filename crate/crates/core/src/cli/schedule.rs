//! Gain-schedule files.
//!
//! Plain UTF-8 text. A header of `key = value` lines is followed by the
//! `P_k` blocks and then the `K_k` blocks, each introduced by a `P k` or
//! `K k` line and written row-major, one matrix row per line:
//!
//! ```text
//! magnetic-lqr gain schedule
//! format_version = 1
//! n = 6
//! m = 3
//! p = 100
//! ts = 58.63521929377358
//! solver = gamma-schur
//! config_hash = 3f1c...
//! P 0
//! 1.0460336018578476e-5 2.4712436735046343e-9 ...
//! ...
//! K 99
//! ...
//! ```
//!
//! Numbers are printed with Rust's shortest round-trip formatting for `f64`,
//! so reading a file back reproduces every value bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::riccati::{GainSchedule, SolverTag};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "magnetic-lqr gain schedule";

/// A schedule together with the digest of the config that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleFile {
    pub schedule: GainSchedule,
    pub config_hash: String,
}

fn write_block(out: &mut String, tag: char, k: usize, m: &DMatrix<f64>) {
    let _ = writeln!(out, "{tag} {k}");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn schedule_to_string(schedule: &GainSchedule, config_hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(out, "n = {}", schedule.state_dim());
    let _ = writeln!(out, "m = {}", schedule.input_dim());
    let _ = writeln!(out, "p = {}", schedule.period());
    let _ = writeln!(out, "ts = {:e}", schedule.ts());
    let _ = writeln!(out, "solver = {}", schedule.solver());
    let _ = writeln!(out, "config_hash = {config_hash}");
    for (k, pk) in schedule.p_list().iter().enumerate() {
        write_block(&mut out, 'P', k, pk);
    }
    for (k, kk) in schedule.k_list().iter().enumerate() {
        write_block(&mut out, 'K', k, kk);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| {
                Error::ScheduleFormat(format!("unexpected end of file, expected {what}"))
            })
    }

    fn header<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, text) = self.next(key)?;
        let value = text
            .split_once('=')
            .filter(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim())
            .ok_or_else(|| Error::ScheduleFormat(format!("line {line}: expected `{key} = ...`")))?;
        value.parse().map_err(|_| {
            Error::ScheduleFormat(format!("line {line}: bad value for {key}: {value}"))
        })
    }

    fn block(&mut self, tag: char, k: usize, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        let expected = format!("{tag} {k}");
        let (line, text) = self.next(&expected)?;
        if text != expected {
            return Err(Error::ScheduleFormat(format!(
                "line {line}: expected `{expected}`, found `{text}`"
            )));
        }
        let mut m = DMatrix::zeros(rows, cols);
        for i in 0..rows {
            let (line, text) = self.next("matrix row")?;
            let values: Vec<&str> = text.split_whitespace().collect();
            if values.len() != cols {
                return Err(Error::ScheduleFormat(format!(
                    "line {line}: expected {cols} values, found {}",
                    values.len()
                )));
            }
            for (j, v) in values.iter().enumerate() {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::ScheduleFormat(format!("line {line}: bad number `{v}`")))?;
                if !x.is_finite() {
                    return Err(Error::ScheduleFormat(format!(
                        "line {line}: non-finite value"
                    )));
                }
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }
}

pub fn schedule_from_str(text: &str) -> Result<ScheduleFile> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (_, magic) = lines.next("header")?;
    if magic != MAGIC {
        return Err(Error::ScheduleFormat("not a gain schedule file".into()));
    }
    let version: u32 = lines.header("format_version")?;
    if version != FORMAT_VERSION {
        return Err(Error::ScheduleFormat(format!(
            "unsupported format_version {version}"
        )));
    }
    let n: usize = lines.header("n")?;
    let m: usize = lines.header("m")?;
    let p: usize = lines.header("p")?;
    let ts: f64 = lines.header("ts")?;
    let solver: SolverTag = lines.header("solver")?;
    let config_hash: String = lines.header("config_hash")?;
    if n == 0 || m == 0 || p == 0 {
        return Err(Error::ScheduleFormat("n, m and p must be positive".into()));
    }
    let p_list = (0..p)
        .map(|k| lines.block('P', k, n, n))
        .collect::<Result<Vec<_>>>()?;
    let k_list = (0..p)
        .map(|k| lines.block('K', k, m, n))
        .collect::<Result<Vec<_>>>()?;
    if let Some((line, extra)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::ScheduleFormat(format!(
            "line {}: trailing content `{}`",
            line + 1,
            extra.trim()
        )));
    }
    let schedule = GainSchedule::new(p_list, k_list, ts, solver)
        .map_err(|e| Error::ScheduleFormat(e.to_string()))?;
    Ok(ScheduleFile {
        schedule,
        config_hash,
    })
}

pub fn write_schedule(path: &Path, schedule: &GainSchedule, config_hash: &str) -> Result<()> {
    std::fs::write(path, schedule_to_string(schedule, config_hash))?;
    Ok(())
}

pub fn read_schedule(path: &Path) -> Result<ScheduleFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ScheduleFormat(format!("{}: {e}", path.display())))?;
    schedule_from_str(&text)
}
