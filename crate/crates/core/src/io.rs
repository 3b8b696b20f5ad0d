//! Text formats: trajectory files and the CSV reports of the diagnostics.
//!
//! A trajectory file holds one block per snapshot:
//!
//! ```text
//! # t=<time> n=<cells> dx=<dx> gamma=<gamma>
//! i,x_center,rho,mom
//! 0,<x>,<rho>,<mom>
//! ...
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so parsing a file
//! and writing it back reproduces it byte for byte.

use std::fmt::Write as _;

use crate::diagnostics::{GronwallReport, SpeedFit};
use crate::error::{LabError, Result};
use crate::solver::{Conserved, Field, Grid1D, Trajectory};

pub const TRAJECTORY_COLUMNS: &str = "i,x_center,rho,mom";
pub const GRONWALL_COLUMNS: &str = "tau,lhs,rhs,residual,c1_norm";
pub const SPEED_COLUMNS: &str = "t,radius";

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRow {
    pub i: usize,
    pub x_center: f64,
    pub rho: f64,
    pub mom: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotBlock {
    pub time: f64,
    pub n: usize,
    pub dx: f64,
    pub gamma: f64,
    pub rows: Vec<SnapshotRow>,
}

impl SnapshotBlock {
    pub fn from_field(f: &Field, gamma: f64) -> Self {
        let grid = f.grid();
        let rows = f
            .cells()
            .iter()
            .enumerate()
            .map(|(i, c)| SnapshotRow {
                i,
                x_center: grid.center(i),
                rho: c.rho,
                mom: c.mom,
            })
            .collect();
        Self {
            time: f.time(),
            n: grid.n_cells(),
            dx: grid.dx(),
            gamma,
            rows,
        }
    }

    /// Rebuilds a field on `grid`, which must match the block's cell count.
    pub fn to_field(&self, grid: Grid1D) -> Result<Field> {
        if grid.n_cells() != self.n {
            return Err(LabError::Domain(format!(
                "block has {} cells, grid has {}",
                self.n,
                grid.n_cells()
            )));
        }
        let cells = self.rows.iter().map(|r| Conserved::new(r.rho, r.mom)).collect();
        Field::new(grid, cells, self.time)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryFile {
    pub blocks: Vec<SnapshotBlock>,
}

impl TrajectoryFile {
    pub fn from_trajectory(t: &Trajectory) -> Self {
        let gamma = t.config().gas.gamma();
        Self {
            blocks: t
                .snapshots()
                .iter()
                .map(|s| SnapshotBlock::from_field(s, gamma))
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let _ = writeln!(
                out,
                "# t={:?} n={} dx={:?} gamma={:?}",
                b.time, b.n, b.dx, b.gamma
            );
            out.push_str(TRAJECTORY_COLUMNS);
            out.push('\n');
            for r in &b.rows {
                let _ = writeln!(out, "{},{:?},{:?},{:?}", r.i, r.x_center, r.rho, r.mom);
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut blocks: Vec<SnapshotBlock> = Vec::new();
        let mut expect_columns = false;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let err = |msg: String| LabError::Parse { line: lineno, msg };
            if let Some(header) = line.strip_prefix("# ") {
                if let Some(prev) = blocks.last() {
                    check_block_len(prev, lineno)?;
                }
                blocks.push(parse_header(header).map_err(err)?);
                expect_columns = true;
            } else if expect_columns {
                if line != TRAJECTORY_COLUMNS {
                    return Err(err(format!("expected column line '{TRAJECTORY_COLUMNS}'")));
                }
                expect_columns = false;
            } else {
                let block = blocks
                    .last_mut()
                    .ok_or_else(|| err("data row before any header".into()))?;
                let row = parse_row(line).map_err(err)?;
                if row.i != block.rows.len() {
                    return Err(err(format!("row index {} out of sequence", row.i)));
                }
                block.rows.push(row);
            }
        }
        if expect_columns {
            return Err(LabError::Parse {
                line: text.lines().count(),
                msg: "header without column line".into(),
            });
        }
        if let Some(last) = blocks.last() {
            check_block_len(last, text.lines().count())?;
        }
        Ok(Self { blocks })
    }
}

fn check_block_len(b: &SnapshotBlock, line: usize) -> Result<()> {
    if b.rows.len() != b.n {
        return Err(LabError::Parse {
            line,
            msg: format!("block at t={} has {} rows, header says {}", b.time, b.rows.len(), b.n),
        });
    }
    Ok(())
}

fn parse_header(h: &str) -> std::result::Result<SnapshotBlock, String> {
    let mut time = None;
    let mut n = None;
    let mut dx = None;
    let mut gamma = None;
    for tok in h.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("malformed header token '{tok}'"))?;
        let float = || v.parse::<f64>().map_err(|e| format!("{k}: {e}"));
        match k {
            "t" => time = Some(float()?),
            "n" => n = Some(v.parse::<usize>().map_err(|e| format!("n: {e}"))?),
            "dx" => dx = Some(float()?),
            "gamma" => gamma = Some(float()?),
            _ => return Err(format!("unknown header key '{k}'")),
        }
    }
    Ok(SnapshotBlock {
        time: time.ok_or("missing t")?,
        n: n.ok_or("missing n")?,
        dx: dx.ok_or("missing dx")?,
        gamma: gamma.ok_or("missing gamma")?,
        rows: Vec::new(),
    })
}

fn parse_row(line: &str) -> std::result::Result<SnapshotRow, String> {
    let parts: Vec<&str> = line.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 columns, got {}", parts.len()));
    }
    let f = |s: &str| s.parse::<f64>().map_err(|e| format!("'{s}': {e}"));
    Ok(SnapshotRow {
        i: parts[0].parse().map_err(|e| format!("index: {e}"))?,
        x_center: f(parts[1])?,
        rho: f(parts[2])?,
        mom: f(parts[3])?,
    })
}

pub fn write_trajectory(t: &Trajectory) -> String {
    TrajectoryFile::from_trajectory(t).to_text()
}

pub fn gronwall_csv(r: &GronwallReport) -> String {
    let mut out = String::from(GRONWALL_COLUMNS);
    out.push('\n');
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?}",
            row.tau, row.lhs, row.rhs, row.residual, row.c1_norm
        );
    }
    out
}

pub fn speed_csv(times: &[f64], radii: &[f64], fit: &SpeedFit, c_bound: f64) -> String {
    let mut out = String::from(SPEED_COLUMNS);
    out.push('\n');
    for (t, r) in times.iter().zip(radii) {
        let _ = writeln!(out, "{t:?},{r:?}");
    }
    let _ = writeln!(
        out,
        "speed={:?} intercept={:?} c_bound={:?}",
        fit.speed, fit.intercept, c_bound
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasParams;
    use crate::solver::{simulate, Boundary, SolverConfig};

    fn small_run() -> Trajectory {
        let grid = Grid1D::new(-1.0, 1.0, 8, Boundary::Periodic).unwrap();
        let f = Field::from_fn(grid, 0.0, |x| (1.0 + 0.1 * (3.0 * x).cos(), 0.05 * x)).unwrap();
        let cfg = SolverConfig::new(0.45, GasParams::new(1.4).unwrap(), 0.1, 0.05).unwrap();
        simulate(&f, &cfg).unwrap()
    }

    #[test]
    fn header_layout() {
        let text = write_trajectory(&small_run());
        let first = text.lines().next().unwrap();
        assert_eq!(first, "# t=0.0 n=8 dx=0.25 gamma=1.4");
        assert_eq!(text.lines().nth(1).unwrap(), TRAJECTORY_COLUMNS);
        assert_eq!(text.lines().filter(|l| l.starts_with("# ")).count(), 3);
    }

    #[test]
    fn parse_and_rebuild_fields() {
        let traj = small_run();
        let file = TrajectoryFile::parse(&write_trajectory(&traj)).unwrap();
        assert_eq!(file.blocks.len(), traj.snapshots().len());
        for (b, s) in file.blocks.iter().zip(traj.snapshots()) {
            let f = b.to_field(*traj.grid()).unwrap();
            assert_eq!(&f, s);
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(TrajectoryFile::parse("0,1,2,3\n").is_err());
        assert!(TrajectoryFile::parse("# t=0 n=1 dx=1 gamma=2\nbad\n").is_err());
        assert!(TrajectoryFile::parse("# t=0 n=2 dx=1 gamma=2\ni,x_center,rho,mom\n0,0.5,1,0\n").is_err());
        assert!(TrajectoryFile::parse("# t=0 n=1 dx=1 gamma=2 foo=3\n").is_err());
        let ok = TrajectoryFile::parse("# t=0 n=1 dx=1 gamma=2\ni,x_center,rho,mom\n0,0.5,1,0\n");
        assert!(ok.is_ok());
    }
}
