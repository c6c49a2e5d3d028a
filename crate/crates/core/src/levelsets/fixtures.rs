use crate::error::{Error, Result};
use crate::grid::{DomainSpec, Grid, ScalarField};

/// Analytic difference-field fixtures used by tests and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    /// x² − y²: 4 arcs through the origin saddle.
    Saddle,
    /// Re((x+iy)³) = x³ − 3xy²: 6 arcs, degenerate critical point.
    MonkeySaddle,
    /// v = y: one horizontal arc, no critical point.
    Line,
    /// x² + y² − 1: closed loop plus a critical point off the zero set.
    Circle,
    /// y(2−y)e^{−x}: monotone tail region fixture.
    MonotoneTail,
}

impl Fixture {
    pub fn parse(name: &str) -> Result<Fixture> {
        Ok(match name {
            "saddle" => Fixture::Saddle,
            "monkey-saddle" | "monkey" => Fixture::MonkeySaddle,
            "line" => Fixture::Line,
            "circle" => Fixture::Circle,
            "monotone-tail" => Fixture::MonotoneTail,
            other => {
                return Err(Error::Format(format!(
                    "unknown fixture '{other}' (saddle, monkey-saddle, line, circle, monotone-tail)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Fixture::Saddle => "saddle",
            Fixture::MonkeySaddle => "monkey-saddle",
            Fixture::Line => "line",
            Fixture::Circle => "circle",
            Fixture::MonotoneTail => "monotone-tail",
        }
    }

    pub fn default_domain(&self, h: f64) -> DomainSpec {
        match self {
            Fixture::MonotoneTail => DomainSpec::window(0.0, 8.0, -0.5, 2.5, h),
            _ => DomainSpec::window(-1.0, 1.0, -1.0, 1.0, h),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Fixture::Saddle => x * x - y * y,
            Fixture::MonkeySaddle => x.powi(3) - 3.0 * x * y * y,
            Fixture::Line => y,
            Fixture::Circle => x * x + y * y - 1.0,
            Fixture::MonotoneTail => y * (2.0 - y) * (-x).exp(),
        }
    }

    pub fn sample(&self, h: f64) -> Result<ScalarField> {
        let grid = Grid::build(&self.default_domain(h))?;
        Ok(ScalarField::from_fn(grid, |x, y| self.eval(x, y)))
    }
}
