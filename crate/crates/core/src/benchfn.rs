//! Closed-form benchmark objectives with their usual search boxes.
//!
//! The checked entry points ([`sphere`], [`rosenbrock`], ...) validate their
//! input. Optimizers go through [`BenchmarkSpec::evaluate`], which skips the
//! validation on the hot path.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const ACKLEY_AMPLITUDE: f64 = 20.0;
const ACKLEY_DECAY: f64 = 0.2;

/// One of the five supported benchmark functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchmarkId {
    Sphere,
    Rosenbrock,
    Ackley,
    Griewank,
    Rastrigin,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 5] = [
        BenchmarkId::Sphere,
        BenchmarkId::Rosenbrock,
        BenchmarkId::Ackley,
        BenchmarkId::Griewank,
        BenchmarkId::Rastrigin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::Sphere => "sphere",
            BenchmarkId::Rosenbrock => "rosenbrock",
            BenchmarkId::Ackley => "ackley",
            BenchmarkId::Griewank => "griewank",
            BenchmarkId::Rastrigin => "rastrigin",
        }
    }

    /// Standard symmetric search box `[lower, upper]` used for every dimension.
    pub fn domain(self) -> (f64, f64) {
        match self {
            BenchmarkId::Sphere => (-100.0, 100.0),
            BenchmarkId::Rosenbrock => (-30.0, 30.0),
            BenchmarkId::Ackley => (-32.0, 32.0),
            BenchmarkId::Griewank => (-600.0, 600.0),
            BenchmarkId::Rastrigin => (-5.12, 5.12),
        }
    }

    fn minimum_dims(self) -> usize {
        match self {
            BenchmarkId::Rosenbrock => 2,
            _ => 1,
        }
    }

    /// Unchecked evaluation. Callers guarantee a valid, finite input.
    #[inline]
    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            BenchmarkId::Sphere => sphere_raw(x),
            BenchmarkId::Rosenbrock => rosenbrock_raw(x),
            BenchmarkId::Ackley => ackley_raw(x),
            BenchmarkId::Griewank => griewank_raw(x),
            BenchmarkId::Rastrigin => rastrigin_raw(x),
        }
    }

    /// Checked evaluation.
    pub fn evaluate(self, x: &[f64]) -> Result<f64> {
        validate(self, x)?;
        Ok(self.eval(x))
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        BenchmarkId::ALL
            .into_iter()
            .find(|id| id.name() == wanted)
            .ok_or_else(|| {
                let names: Vec<_> = BenchmarkId::ALL.iter().map(|id| id.name()).collect();
                Error::config(format!(
                    "unknown benchmark `{s}` (expected one of: {})",
                    names.join(", ")
                ))
            })
    }
}

/// A benchmark instantiated at a concrete dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub id: BenchmarkId,
    pub dims: usize,
    pub lower: f64,
    pub upper: f64,
    pub optimum_position: Vec<f64>,
    pub optimum_value: f64,
}

impl BenchmarkSpec {
    #[inline]
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dims);
        self.id.eval(x)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }
}

/// Instantiates benchmark `id` at `dims` dimensions.
pub fn lookup(id: BenchmarkId, dims: usize) -> Result<BenchmarkSpec> {
    if dims < 2 {
        return Err(Error::config(format!(
            "{id} needs at least 2 dimensions, got {dims}"
        )));
    }
    let (lower, upper) = id.domain();
    let optimum = match id {
        BenchmarkId::Rosenbrock => 1.0,
        _ => 0.0,
    };
    Ok(BenchmarkSpec {
        id,
        dims,
        lower,
        upper,
        optimum_position: vec![optimum; dims],
        optimum_value: 0.0,
    })
}

fn validate(id: BenchmarkId, x: &[f64]) -> Result<()> {
    if x.len() < id.minimum_dims() {
        return Err(Error::invalid(format!(
            "{id} needs at least {} coordinates, got {}",
            id.minimum_dims(),
            x.len()
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "{id}: coordinate {i} is not finite ({})",
            x[i]
        )));
    }
    Ok(())
}

pub fn sphere(x: &[f64]) -> Result<f64> {
    BenchmarkId::Sphere.evaluate(x)
}

pub fn rosenbrock(x: &[f64]) -> Result<f64> {
    BenchmarkId::Rosenbrock.evaluate(x)
}

pub fn ackley(x: &[f64]) -> Result<f64> {
    BenchmarkId::Ackley.evaluate(x)
}

pub fn griewank(x: &[f64]) -> Result<f64> {
    BenchmarkId::Griewank.evaluate(x)
}

pub fn rastrigin(x: &[f64]) -> Result<f64> {
    BenchmarkId::Rastrigin.evaluate(x)
}

fn sphere_raw(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rosenbrock_raw(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let valley = w[1] - w[0] * w[0];
            let offset = w[0] - 1.0;
            100.0 * valley * valley + offset * offset
        })
        .sum()
}

fn ackley_raw(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (squares, cosines) = x.iter().fold((0.0, 0.0), |(sq, cs), v| {
        (sq + v * v, cs + (2.0 * PI * v).cos())
    });
    let value = -ACKLEY_AMPLITUDE * (-ACKLEY_DECAY * (squares / n).sqrt()).exp()
        - (cosines / n).exp()
        + ACKLEY_AMPLITUDE
        + E;
    // -20 - e + 20 + e leaves a rounding residue at the origin
    value.max(0.0)
}

fn griewank_raw(x: &[f64]) -> f64 {
    let (sum, product) = x
        .iter()
        .enumerate()
        .fold((0.0, 1.0), |(s, p), (i, v)| {
            (s + v * v / 4000.0, p * (v / ((i + 1) as f64).sqrt()).cos())
        });
    sum - product + 1.0
}

fn rastrigin_raw(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}
