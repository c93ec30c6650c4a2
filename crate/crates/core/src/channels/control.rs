use crate::dynamics::{command_return, DroneState};
use crate::metrics::EnergyLedger;

/// Broadcast control channel from the decision-maker to the drones.
/// Error-free; a command issued in slot `k` acts on the drone at the start
/// of slot `k + 1`.
#[derive(Debug, Clone, Default)]
pub struct ControlChannel {
    pending: Vec<usize>,
}

impl ControlChannel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Queues a return command and charges one transmission to `target`.
    pub fn broadcast(&mut self, target: usize, ledger: &mut EnergyLedger) {
        ledger.record_command(target);
        self.pending.push(target);
    }

    pub fn pending(&self) -> &[usize] {
        &self.pending
    }

    /// Applies queued commands to the swarm (drone ids index `drones`).
    pub fn deliver(&mut self, drones: &mut [DroneState]) {
        for target in self.pending.drain(..) {
            drones[target] = command_return(&drones[target]);
        }
    }
}

pub fn broadcast_command(channel: &mut ControlChannel, target: usize, ledger: &mut EnergyLedger) {
    channel.broadcast(target, ledger);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Mode;
    use crate::geometry::Arena;

    #[test]
    fn command_acts_next_slot() {
        let arena = Arena::default();
        let mut swarm = DroneState::swarm(&arena);
        let mut ledger = EnergyLedger::new(9, 0.1);
        let mut ch = ControlChannel::new();
        broadcast_command(&mut ch, 4, &mut ledger);
        assert_eq!(swarm[4].mode, Mode::Walking);
        ch.deliver(&mut swarm);
        assert_eq!(swarm[4].mode, Mode::Returning);
        assert_eq!(ledger.command_count[4], 1);
        assert!(ch.pending().is_empty());
    }

    #[test]
    fn repeated_commands_cost_each_time() {
        let arena = Arena::default();
        let mut swarm = DroneState::swarm(&arena);
        let mut ledger = EnergyLedger::new(9, 0.1);
        let mut ch = ControlChannel::new();
        ch.broadcast(2, &mut ledger);
        ch.deliver(&mut swarm);
        ch.broadcast(2, &mut ledger);
        ch.deliver(&mut swarm);
        assert_eq!(swarm[2].mode, Mode::Returning);
        assert_eq!(ledger.command_count[2], 2);
    }
}
