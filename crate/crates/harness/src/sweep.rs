//! Parameter sweeps emitting one CSV row per grid cell.
//!
//! Columns: `cell`, `seed`, one per axis in grid order, `overall`, `passed`,
//! `wall_time_ms`, then `sub:<name>` for each subtest of the first record.
//! A grid with no axes, or with an empty axis, has no cells.

use std::io::Write;

use qmaplus::property::TestMode;
use qmaplus::rng::split;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiments::run;
use crate::record::ResultRecord;

pub const MAX_CELLS: usize = 10_000;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn cells(&self) -> usize {
        if self.axes.is_empty() {
            0
        } else {
            self.axes.iter().map(|a| a.values.len()).product()
        }
    }

    /// Axis values of cell `i`, last axis fastest.
    pub fn cell(&self, mut i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            *slot = axis.values[i % axis.values.len()];
            i /= axis.values.len();
        }
        out
    }
}

/// Seed of cell `i` under `master`; independent of evaluation order.
pub fn cell_seed(master: u64, cell: usize) -> u64 {
    split(master, cell as u64).next_u64()
}

/// Config for one cell. A `trials` axis switches the run to Monte Carlo.
pub fn cell_config(template: &ExperimentConfig, grid: &Grid, cell: usize) -> Result<ExperimentConfig> {
    let mut c = template.clone();
    c.seed = cell_seed(template.seed, cell);
    for (axis, v) in grid.axes.iter().zip(grid.cell(cell)) {
        c.params.set(&axis.param, v)?;
    }
    if let Some(trials) = c.params.trials {
        c.mode = TestMode::MonteCarlo { seed: c.seed, trials };
    } else if let TestMode::MonteCarlo { trials, .. } = c.mode {
        c.mode = TestMode::MonteCarlo { seed: c.seed, trials };
    }
    Ok(c)
}

pub fn sweep(template: &ExperimentConfig, grid: &Grid) -> Result<Vec<ResultRecord>> {
    let cells = grid.cells();
    if cells > MAX_CELLS {
        return Err(HarnessError::Budget(format!("{cells} cells, limit {MAX_CELLS}")));
    }
    (0..cells).into_par_iter().map(|i| run(&cell_config(template, grid, i)?)).collect()
}

pub fn write_csv(grid: &Grid, records: &[ResultRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let subtests: Vec<String> = records.first().map(|r| r.subtests.iter().map(|s| s.name.clone()).collect()).unwrap_or_default();
    let mut header: Vec<String> = vec!["cell".into(), "seed".into()];
    header.extend(grid.axes.iter().map(|a| a.param.clone()));
    header.extend(["overall", "passed", "wall_time_ms"].map(String::from));
    header.extend(subtests.iter().map(|s| format!("sub:{s}")));
    w.write_record(&header)?;
    for (i, r) in records.iter().enumerate() {
        let mut row = vec![i.to_string(), r.config.seed.to_string()];
        row.extend(grid.cell(i).iter().map(f64::to_string));
        row.push(r.overall.map(|v| v.to_string()).unwrap_or_default());
        row.push(r.passed().to_string());
        row.push(r.wall_time_ms.to_string());
        for name in &subtests {
            let v = r.subtests.iter().find(|s| &s.name == name).map(|s| s.acceptance.to_string());
            row.push(v.unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_are_row_major() {
        let g = Grid {
            axes: vec![Axis { param: "n".into(), values: vec![8.0, 16.0] }, Axis { param: "eta".into(), values: vec![0.1, 0.2, 0.3] }],
        };
        assert_eq!(g.cells(), 6);
        assert_eq!(g.cell(0), vec![8.0, 0.1]);
        assert_eq!(g.cell(4), vec![16.0, 0.2]);
        assert_eq!(Grid::default().cells(), 0);
        assert_ne!(cell_seed(1, 0), cell_seed(1, 1));
    }
}
