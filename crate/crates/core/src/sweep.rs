//! Parameter-plane sweeps. Each cell is classified independently with its own
//! counter-derived random streams, so results do not depend on the number of
//! worker threads or on scheduling.

use crate::cycle::{classify_parameter_point, Budgets, ClassifyOptions, PointVerdict};
use crate::error::{Error, Result};
use crate::map::MapParameters;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub re_steps: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub im_steps: usize,
    /// Value of the parameter that is not swept.
    pub fixed_other_parameter: Complex64,
    pub target: SweepTarget,
}

impl GridSpec {
    pub fn cell_count(&self) -> usize {
        self.re_steps.saturating_mul(self.im_steps)
    }

    pub fn validate(&self, max_cells: usize) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite())
            && self.fixed_other_parameter.is_finite();
        if !finite {
            return Err(Error::InvalidInput("grid bounds must be finite".into()));
        }
        if !(self.re_min < self.re_max && self.im_min < self.im_max) {
            return Err(Error::InvalidInput("grid needs re_min < re_max and im_min < im_max".into()));
        }
        if self.re_steps == 0 || self.im_steps == 0 {
            return Err(Error::InvalidInput("grid step counts must be positive".into()));
        }
        if self.cell_count() > max_cells {
            return Err(Error::InvalidInput(format!(
                "{} cells exceed the budget of {max_cells}",
                self.cell_count()
            )));
        }
        Ok(())
    }

    /// Centre of cell `index` in row-major order (rows run along the imaginary axis).
    pub fn cell_center(&self, index: usize) -> Complex64 {
        let (row, col) = (index / self.re_steps, index % self.re_steps);
        let dre = (self.re_max - self.re_min) / self.re_steps as f64;
        let dim = (self.im_max - self.im_min) / self.im_steps as f64;
        Complex64::new(
            self.re_min + (col as f64 + 0.5) * dre,
            self.im_min + (row as f64 + 0.5) * dim,
        )
    }

    pub fn params_for(&self, index: usize) -> MapParameters {
        let z = self.cell_center(index);
        match self.target {
            SweepTarget::Alpha => MapParameters::new(z, self.fixed_other_parameter),
            SweepTarget::Beta => MapParameters::new(self.fixed_other_parameter, z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub n_seeds: usize,
    pub budgets: Budgets,
    pub rng_seed: u64,
    pub workers: usize,
    pub max_cells: usize,
}

impl SweepOptions {
    pub fn new(n_seeds: usize, budgets: Budgets, rng_seed: u64, workers: usize) -> Self {
        Self {
            n_seeds,
            budgets,
            rng_seed,
            workers,
            max_cells: DEFAULT_CELL_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub cell_re: f64,
    pub cell_im: f64,
    pub classification: PointVerdict,
    pub lambda_max: Option<f64>,
    pub agree_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<CellRecord>,
}

pub fn run_sweep(grid: &GridSpec, opts: &SweepOptions) -> Result<SweepResult> {
    grid.validate(opts.max_cells)?;
    if opts.n_seeds == 0 || opts.workers == 0 {
        return Err(Error::InvalidInput("n_seeds and workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;

    let records = pool.install(|| {
        (0..grid.cell_count())
            .into_par_iter()
            .map(|index| {
                let params = grid.params_for(index);
                let center = grid.cell_center(index);
                let classify = ClassifyOptions {
                    n_seeds: opts.n_seeds,
                    rng_seed: opts.rng_seed,
                    cell: index as u64,
                    budgets: opts.budgets,
                };
                match classify_parameter_point(&params, &classify) {
                    Ok(r) => CellRecord {
                        cell_re: center.re,
                        cell_im: center.im,
                        classification: r.verdict,
                        lambda_max: r.lambda_max,
                        agree_fraction: r.agree_fraction,
                    },
                    Err(_) => CellRecord {
                        cell_re: center.re,
                        cell_im: center.im,
                        classification: PointVerdict::Inconclusive,
                        lambda_max: None,
                        agree_fraction: 0.0,
                    },
                }
            })
            .collect()
    });
    Ok(SweepResult { records })
}
