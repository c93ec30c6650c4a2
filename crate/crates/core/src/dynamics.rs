//! Per-drone motion: an isotropic fixed-step random walk, straight-line
//! return flight to the cell center, and the two-state mode automaton.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;
use crate::geometry::{Arena, CellId, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Walking,
    Returning,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Walking => "walking",
            Mode::Returning => "returning",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DroneState {
    pub id: usize,
    pub pos: Vec2,
    pub mode: Mode,
    /// Center of `assigned_cell`.
    pub home: Vec2,
    pub assigned_cell: CellId,
}

impl DroneState {
    /// Drone `id` parked at the center of its cell, walking.
    pub fn at_home(id: usize, cell: CellId, arena: &Arena) -> Self {
        let home = arena.cell_center(cell);
        Self {
            id,
            pos: home,
            mode: Mode::Walking,
            home,
            assigned_cell: cell,
        }
    }

    /// One drone per cell, in row-major order.
    pub fn swarm(arena: &Arena) -> Vec<DroneState> {
        arena
            .cells()
            .enumerate()
            .map(|(id, cell)| DroneState::at_home(id, cell, arena))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkParams {
    /// Distance covered in one slot, in both modes.
    pub step_len: f64,
    /// A returning drone closer than this to home snaps onto it.
    #[serde(default)]
    pub arrival_eps: f64,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            step_len: 0.5,
            arrival_eps: 0.0,
        }
    }
}

impl WalkParams {
    pub fn new(step_len: f64, arrival_eps: f64) -> Result<Self, DynamicsError> {
        let p = Self {
            step_len,
            arrival_eps,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.step_len.is_finite() && self.step_len > 0.0) {
            return Err(DynamicsError::InvalidParams(format!(
                "step_len must be positive, got {}",
                self.step_len
            )));
        }
        if !(self.arrival_eps >= 0.0 && self.arrival_eps < self.step_len) {
            return Err(DynamicsError::InvalidParams(format!(
                "arrival_eps must lie in [0, step_len), got {}",
                self.arrival_eps
            )));
        }
        Ok(())
    }
}

/// Uniform heading on `[0, 2π)`.
pub fn draw_heading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * TAU
}

fn require_mode(state: &DroneState, expected: Mode) -> Result<(), DynamicsError> {
    if state.mode == expected {
        Ok(())
    } else {
        Err(DynamicsError::WrongMode {
            drone: state.id,
            expected,
            found: state.mode,
        })
    }
}

/// One random-walk step with a heading drawn from `rng`.
pub fn step_walk<R: Rng + ?Sized>(
    state: &DroneState,
    params: &WalkParams,
    rng: &mut R,
) -> Result<DroneState, DynamicsError> {
    require_mode(state, Mode::Walking)?;
    Ok(step_walk_heading(state, params, draw_heading(rng)))
}

/// One random-walk step along a given heading. Caller checks the mode.
pub fn step_walk_heading(state: &DroneState, params: &WalkParams, heading: f64) -> DroneState {
    DroneState {
        pos: state.pos + Vec2::from_heading(heading) * params.step_len,
        ..*state
    }
}

/// Takes effect immediately; idempotent on a drone that is already returning.
pub fn command_return(state: &DroneState) -> DroneState {
    DroneState {
        mode: Mode::Returning,
        ..*state
    }
}

/// One step of the return flight. On arrival the drone is placed exactly at
/// home and resumes walking.
pub fn step_return(state: &DroneState, params: &WalkParams) -> Result<DroneState, DynamicsError> {
    require_mode(state, Mode::Returning)?;
    let to_home = state.home - state.pos;
    let dist = to_home.norm();
    // Relative slack so that a distance of exactly n·step_len takes n steps
    // despite rounding in the intermediate positions.
    let slack = 1e-12 * dist.max(params.step_len);
    let (pos, remaining) = if dist <= params.step_len + slack {
        (state.home, 0.0)
    } else {
        let rem = dist - params.step_len;
        (state.home - to_home * (rem / dist), rem)
    };
    if remaining <= params.arrival_eps {
        Ok(DroneState {
            pos: state.home,
            mode: Mode::Walking,
            ..*state
        })
    } else {
        Ok(DroneState { pos, ..*state })
    }
}
