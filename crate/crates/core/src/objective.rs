//! Benchmark objectives: Sphere, Rastrigin, Ackley, Griewank and Rosenbrock.
//!
//! Every function is evaluated on whatever slice it is handed. Index-dependent
//! terms (Griewank's `sqrt(i)`, Rosenbrock's neighbour coupling) restart at 1
//! within the slice, so a block of columns is treated as a standalone problem.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Sphere,
    Rastrigin,
    Ackley,
    Griewank,
    Rosenbrock,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::Sphere,
        Objective::Rastrigin,
        Objective::Ackley,
        Objective::Griewank,
        Objective::Rosenbrock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::Sphere => "sphere",
            Objective::Rastrigin => "rastrigin",
            Objective::Ackley => "ackley",
            Objective::Griewank => "griewank",
            Objective::Rosenbrock => "rosenbrock",
        }
    }

    /// Box bounds `(lower, upper)` applied to every variable.
    pub fn bounds(self) -> Bounds {
        let (lower, upper) = match self {
            Objective::Sphere | Objective::Rosenbrock => (-100.0, 100.0),
            Objective::Rastrigin => (-5.0, 5.0),
            Objective::Ackley => (-32.0, 32.0),
            Objective::Griewank => (-600.0, 600.0),
        };
        Bounds { lower, upper }
    }

    pub fn min_arity(self) -> usize {
        match self {
            Objective::Rosenbrock => 2,
            _ => 1,
        }
    }

    /// Coordinate value of the global minimiser (the minimiser is that value repeated).
    pub fn optimum_coordinate(self) -> f64 {
        match self {
            Objective::Rosenbrock => 1.0,
            _ => 0.0,
        }
    }

    pub fn optimum_point(self, dim: usize) -> Vec<f64> {
        vec![self.optimum_coordinate(); dim]
    }

    pub fn optimum_value(self) -> f64 {
        0.0
    }

    /// Checked evaluation.
    pub fn evaluate(self, x: &[f64]) -> Result<f64> {
        self.check_arity(x.len())?;
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(self.value(x))
    }

    pub fn check_arity(self, dim: usize) -> Result<()> {
        if dim < self.min_arity() {
            return Err(Error::Arity {
                function: self.name(),
                required: self.min_arity(),
                got: dim,
            });
        }
        Ok(())
    }

    /// Unchecked evaluation used on the hot path. Callers guarantee the arity.
    #[inline]
    pub fn value(self, x: &[f64]) -> f64 {
        debug_assert!(x.len() >= self.min_arity());
        match self {
            Objective::Sphere => x.iter().map(|v| v * v).sum(),
            Objective::Rastrigin => {
                let d = x.len() as f64;
                10.0 * d + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
            }
            Objective::Ackley => {
                let d = x.len() as f64;
                let (sq, cs) = x
                    .iter()
                    .fold((0.0, 0.0), |(sq, cs), v| (sq + v * v, cs + (2.0 * PI * v).cos()));
                -20.0 * (-0.2 * (sq / d).sqrt()).exp() - (cs / d).exp() + 20.0 + E
            }
            Objective::Griewank => {
                let mut sum = 0.0;
                let mut prod = 1.0;
                for (i, v) in x.iter().enumerate() {
                    sum += v * v;
                    prod *= (v / ((i + 1) as f64).sqrt()).cos();
                }
                1.0 + sum / 4000.0 - prod
            }
            Objective::Rosenbrock => x
                .windows(2)
                .map(|w| {
                    let a = w[0] * w[0] - w[1];
                    let b = 1.0 - w[0];
                    100.0 * a * a + b * b
                })
                .sum(),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Objective::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown function `{s}`")))
    }
}

/// Closed interval `[lower, upper]` shared by all variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::Config(format!(
                "bounds require lower < upper, got ({lower}, {upper})"
            )));
        }
        Ok(Bounds { lower, upper })
    }

    #[inline]
    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn optimum_is_zero() {
        for f in Objective::ALL {
            for d in f.min_arity()..40 {
                let v = f.evaluate(&f.optimum_point(d)).unwrap();
                assert!(v.abs() <= 1e-12, "{f} d={d}: {v}");
            }
        }
    }

    #[test]
    fn table_examples() {
        assert_eq!(Objective::Sphere.evaluate(&[1.0, 2.0]).unwrap(), 5.0);
        assert_eq!(Objective::Sphere.evaluate(&[0.0; 7]).unwrap(), 0.0);
        assert_eq!(Objective::Rosenbrock.evaluate(&[1.0, 1.0]).unwrap(), 0.0);
        assert!(Objective::Ackley.evaluate(&[0.0; 4]).unwrap().abs() < 1e-12);
        assert_eq!(Objective::Griewank.evaluate(&[0.0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn rastrigin_half() {
        // Term by term: 2*10 + 2*(0.25 - 10*cos(pi)) = 20 + 2*10.25 = 40.5
        let v = Objective::Rastrigin.evaluate(&[0.5, 0.5]).unwrap();
        assert!((v - 40.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn bounds_and_arity() {
        assert_eq!(
            Objective::Sphere.bounds(),
            Bounds {
                lower: -100.0,
                upper: 100.0
            }
        );
        assert_eq!(
            Objective::Rastrigin.bounds(),
            Bounds {
                lower: -5.0,
                upper: 5.0
            }
        );
        assert_eq!(
            Objective::Ackley.bounds(),
            Bounds {
                lower: -32.0,
                upper: 32.0
            }
        );
        assert_eq!(
            Objective::Griewank.bounds(),
            Bounds {
                lower: -600.0,
                upper: 600.0
            }
        );
        assert_eq!(
            Objective::Rosenbrock.bounds(),
            Bounds {
                lower: -100.0,
                upper: 100.0
            }
        );
        assert_eq!(Objective::Rosenbrock.min_arity(), 2);
        assert_eq!(Objective::Sphere.min_arity(), 1);
        assert_eq!(Objective::Ackley.min_arity(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            Objective::Rosenbrock.evaluate(&[1.0]),
            Err(Error::Arity {
                required: 2,
                got: 1,
                ..
            })
        ));
        assert!(matches!(Objective::Sphere.evaluate(&[]), Err(Error::Arity { .. })));
        assert_eq!(
            Objective::Ackley.evaluate(&[0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert!(Bounds::new(0.0, 0.0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in Objective::ALL {
            assert_eq!(f.name().parse::<Objective>().unwrap(), f);
        }
        assert!("schwefel".parse::<Objective>().is_err());
    }

    #[test]
    fn griewank_indices_are_slice_local() {
        let x = [3.0, -7.0, 11.0, 2.5];
        let tail = Objective::Griewank.value(&x[2..]);
        let standalone = Objective::Griewank.value(&[11.0, 2.5]);
        assert_eq!(tail.to_bits(), standalone.to_bits());
    }

    fn point(dim: std::ops::Range<usize>, lim: f64) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-lim..lim, dim)
    }

    proptest! {
        #[test]
        fn nonnegative(x in point(1..32, 600.0)) {
            prop_assert!(Objective::Sphere.value(&x) >= 0.0);
            prop_assert!(Objective::Griewank.value(&x) >= -1e-12);
            let r: Vec<f64> = x.iter().map(|v| v / 120.0).collect();
            prop_assert!(Objective::Rastrigin.value(&r) >= -1e-9);
        }

        #[test]
        fn permutation_symmetry(mut x in point(1..24, 5.0), seed in any::<u64>()) {
            let fs = [Objective::Sphere, Objective::Rastrigin, Objective::Ackley];
            let before: Vec<f64> = fs.iter().map(|f| f.value(&x)).collect();
            let len = x.len();
            x.rotate_left((seed as usize) % len);
            x.swap(0, len - 1);
            for (f, b) in fs.iter().zip(before) {
                prop_assert!((f.value(&x) - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }

        #[test]
        fn deterministic(x in point(2..16, 100.0)) {
            for f in Objective::ALL {
                prop_assert_eq!(f.value(&x).to_bits(), f.value(&x).to_bits());
            }
        }
    }
}
