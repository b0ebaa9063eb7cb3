//! Initial conditions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

use super::config::{output_path, InitConfig};
use super::io::read_snapshot;

/// `1 + 0.5 sin x sin y`.
pub fn ex1(grid: Grid) -> Result<Field> {
    Field::from_fn(grid, |x, y| 1.0 + 0.5 * x.sin() * y.sin())
}

/// +1 on `|x−3.2|,|y−3.2| ≤ 1` and on `|x−5|,|y−5| ≤ 0.36`, −1 elsewhere.
pub fn squares(grid: Grid) -> Result<Field> {
    Field::from_fn(grid, |x, y| {
        let big = (x - 3.2).abs() <= 1.0 && (y - 3.2).abs() <= 1.0;
        let small = (x - 5.0).abs() <= 0.36 && (y - 5.0).abs() <= 0.36;
        if big || small {
            1.0
        } else {
            -1.0
        }
    })
}

/// 0.7 inside the disks of radius 1.4 about `(π−0.8, π)` and 0.5 about
/// `(π+1.7, π)`, 0.3 outside.
pub fn disks(grid: Grid) -> Result<Field> {
    Field::from_fn(grid, |x, y| {
        let d1 = (x - (PI - 0.8)).hypot(y - PI);
        let d2 = (x - (PI + 1.7)).hypot(y - PI);
        if d1 <= 1.4 || d2 <= 0.5 {
            0.7
        } else {
            0.3
        }
    })
}

/// `0.5 + 0.2 U[−1, 1]`, nodes filled in storage order.
pub fn random(grid: Grid, seed: u64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| 0.5 + 0.2 * rng.random_range(-1.0..=1.0)).collect();
    Field::new(grid, values)
}

pub fn initial_field(init: &InitConfig, grid: Grid) -> Result<Field> {
    match init {
        InitConfig::Ex1 => ex1(grid),
        InitConfig::Squares => squares(grid),
        InitConfig::Disks => disks(grid),
        InitConfig::Random { seed } => random(grid, *seed),
        InitConfig::File { path } => {
            let (field, _) = read_snapshot(output_path(path))?;
            if *field.grid() != grid {
                return Err(Error::config(
                    "init.path",
                    format!(
                        "snapshot grid {}x{} on {}x{} does not match the configured grid",
                        field.grid().nx(),
                        field.grid().ny(),
                        field.grid().lx(),
                        field.grid().ly()
                    ),
                ));
            }
            Ok(field)
        }
    }
}
