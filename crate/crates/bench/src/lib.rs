//! Fixtures shared by the benchmarks.

use epdm_core::dm::{DmState, StaticNetwork};
use epdm_core::models::{CollidingParticles, ColoredParticles};
use epdm_core::Engine;

pub fn colliding_engine(n: u64, seed: u64) -> Engine<CollidingParticles> {
    let m = CollidingParticles::new(n, 0.5, 50).expect("valid parameters");
    Engine::new(m.clone(), &m.initial_state(), seed).expect("valid initial state")
}

pub fn colored_engine(n: u64, omega: u64, seed: u64) -> Engine<ColoredParticles> {
    let m = ColoredParticles::new(n, omega, 0.5, 1).expect("valid parameters");
    Engine::new(m.clone(), &m.initial_state(), seed).expect("valid initial state")
}

pub fn colliding_oracle(n: u64, seed: u64) -> (StaticNetwork, DmState) {
    let m = CollidingParticles::new(n, 0.5, 50).expect("valid parameters");
    let net = StaticNetwork::enumerate(&m, &m.universe()).expect("finite universe");
    let state = DmState::new(&net, &m.initial_state(), seed).expect("valid initial state");
    (net, state)
}
