//! Shared setup for the benchmarks.

use isav_core::{Field, Grid, ModelParams, Potential, Scheme, SchemeState, Stepper};

/// An Ex-2 style double-well stepper and a started state on an `n × n` grid.
pub fn ch_setup(n: usize, scheme: Scheme) -> (Stepper, SchemeState) {
    let grid = Grid::square(n, 6.4).expect("valid grid");
    let eps = 0.04;
    let potential = Potential::double_well(eps, 1.0).expect("valid potential");
    let params = ModelParams::new(1.0, 0.01, 3.0 / (eps * eps), 1e-3, potential).expect("valid params");
    let stepper = Stepper::new(grid, params).expect("stepper");
    let phi0 = isav_core::harness::squares(grid).expect("initial data");
    let mut state = SchemeState::initial(scheme, phi0, &potential).expect("initial state");
    if scheme.is_bdf() {
        state = stepper.step(&state).expect("bootstrap");
    }
    (stepper, state)
}

pub fn smooth_field(n: usize) -> Field {
    let grid = Grid::square(n, 2.0 * std::f64::consts::PI).expect("valid grid");
    Field::from_fn(grid, |x, y| 1.0 + 0.5 * x.sin() * y.sin()).expect("finite")
}
