//! Scalar tilt protocols `f(t)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Time dependence of the tilt term.
#[derive(Clone)]
pub enum DriveFunction {
    /// Sudden release: `f = 0` for `t >= 0`.
    CaseA,
    /// Sawtooth from 100 to 0 on each half of `[0, 10]`.
    CaseB,
    /// Chirped cosine of amplitude 10, restarted at `t = 5`.
    CaseC,
    /// As `CaseC` with amplitude 100.
    CaseD,
    Constant(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl DriveFunction {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::CaseA => 0.0,
            Self::CaseB => 100.0 * (1.0 - 0.2 * restart(t)),
            Self::CaseC => 10.0 * chirp(restart(t)),
            Self::CaseD => 100.0 * chirp(restart(t)),
            Self::Constant(v) => *v,
            Self::Custom(f) => f(t),
        }
    }

    /// `Some(value)` when `f` does not depend on time.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Self::CaseA => Some(0.0),
            Self::Constant(v) => Some(*v),
            _ => None,
        }
    }
}

fn restart(t: f64) -> f64 {
    if t < 5.0 {
        t
    } else {
        t - 5.0
    }
}

fn chirp(s: f64) -> f64 {
    (2.0 * PI * s * s).cos()
}

impl fmt::Debug for DriveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CaseA => write!(f, "CaseA"),
            Self::CaseB => write!(f, "CaseB"),
            Self::CaseC => write!(f, "CaseC"),
            Self::CaseD => write!(f, "CaseD"),
            Self::Constant(v) => write!(f, "Constant({v})"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}
