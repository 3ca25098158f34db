//! Uniform interface over the ATSP solvers.

use crate::asadpour::{asadpour_solve, AsadpourParams};
use crate::error::Result;
use crate::feige_singh::repeated_cycle_cover_atsp;
use crate::model::{Instance, Tour};
use crate::oracle::exact_atsp;

pub trait AtspSolver: Send + Sync {
    fn id(&self) -> &'static str;
    fn solve(&self, inst: &Instance, seed: u64) -> Result<Tour>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CycleCoverSolver;

impl AtspSolver for CycleCoverSolver {
    fn id(&self) -> &'static str {
        "cyclecover"
    }

    fn solve(&self, inst: &Instance, _seed: u64) -> Result<Tour> {
        Ok(repeated_cycle_cover_atsp(inst)?.tour)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AsadpourSolver {
    pub params: AsadpourParams,
}

impl AtspSolver for AsadpourSolver {
    fn id(&self) -> &'static str {
        "asadpour"
    }

    fn solve(&self, inst: &Instance, seed: u64) -> Result<Tour> {
        Ok(asadpour_solve(inst, seed, &self.params)?.tour)
    }
}

/// Bitmask dynamic program; `n <= 18` only.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactSolver;

impl AtspSolver for ExactSolver {
    fn id(&self) -> &'static str {
        "exact"
    }

    fn solve(&self, inst: &Instance, _seed: u64) -> Result<Tour> {
        exact_atsp(inst)
    }
}
