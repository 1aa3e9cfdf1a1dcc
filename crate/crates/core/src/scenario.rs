//! End-to-end scenario: build the model, prepare the ground state at the
//! initial tilt, propagate, and serialize the series, report and state.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::drive::DriveFunction;
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::groundstate::ground_state;
use crate::linsolve::GmresConfig;
use crate::model::WellModel;
use crate::propagators::{
    propagate_al1, propagate_al2, propagate_alc, propagate_cn_fixed, propagate_rk4_fixed, propagate_rk8,
    Method, Problem, PropagationRecord, RunOptions,
};
use crate::vector::{self, StateVector};

/// The four tilt protocols of the benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    A,
    B,
    C,
    D,
}

impl Case {
    pub const ALL: [Case; 4] = [Self::A, Self::B, Self::C, Self::D];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
        }
    }

    pub fn drive(&self) -> DriveFunction {
        match self {
            Self::A => DriveFunction::CaseA,
            Self::B => DriveFunction::CaseB,
            Self::C => DriveFunction::CaseC,
            Self::D => DriveFunction::CaseD,
        }
    }

    /// Tilt under which the initial ground state is prepared.
    pub fn initial_tilt(&self) -> f64 {
        match self {
            Self::C => 10.0,
            _ => 100.0,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown case `{s}` (expected a, b, c or d)")))
    }
}

/// Everything needed to reproduce one benchmark run.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub particles: usize,
    pub orbitals: usize,
    pub g: f64,
    pub case: Case,
    pub method: Method,
    /// Local error tolerance of the adaptive methods.
    pub tol: f64,
    /// Krylov dimension cap (AL1, AL2) or fixed dimension (ALC).
    pub dk_max: usize,
    pub t_end: f64,
    /// Overrides the case's preparation tilt.
    pub f0: Option<f64>,
    /// Fixed step of RK4 and CN.
    pub dt: Option<f64>,
    /// Step endpoints are forced onto multiples of this interval.
    pub max_dt: Option<f64>,
    pub gmres_tol: f64,
    pub ground_tol: f64,
    /// Record observables at every accepted step, not only on the output grid.
    pub sample_steps: bool,
}

impl ScenarioConfig {
    pub fn new(particles: usize, orbitals: usize, case: Case, method: Method) -> Self {
        Self {
            particles,
            orbitals,
            g: 2.0,
            case,
            method,
            tol: 1e-6,
            dk_max: 30,
            t_end: 10.0,
            f0: None,
            dt: None,
            max_dt: None,
            gmres_tol: 1e-6,
            ground_tol: 1e-10,
            sample_steps: true,
        }
    }

    pub fn initial_tilt(&self) -> f64 {
        self.f0.unwrap_or_else(|| self.case.initial_tilt())
    }

    pub fn validate(&self) -> Result<()> {
        if self.method == Method::Alc && self.case != Case::A {
            return Err(Error::Config(format!(
                "method alc needs a constant Hamiltonian, case {} is time dependent",
                self.case
            )));
        }
        match (self.method, self.dt) {
            (Method::Rk4 | Method::Cn, None) => {
                return Err(Error::Config(format!("method {} needs a fixed step (--dt)", self.method)))
            }
            (Method::Rk4 | Method::Cn, Some(dt)) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::Config(format!("fixed step must be positive, got {dt}")))
            }
            (m, Some(_)) if m.is_adaptive() => {
                return Err(Error::Config(format!("method {m} is adaptive and takes no fixed step")))
            }
            _ => {}
        }
        let positive = [
            ("tol", self.tol),
            ("t-end", self.t_end),
            ("gmres-tol", self.gmres_tol),
            ("ground-tol", self.ground_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if let Some(h) = self.max_dt {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("max-dt must be positive, got {h}")));
            }
        }
        if !self.initial_tilt().is_finite() {
            return Err(Error::Config("f0 must be finite".into()));
        }
        if self.dk_max < 2 {
            return Err(Error::Config(format!("dkmax must be at least 2, got {}", self.dk_max)));
        }
        Ok(())
    }
}

/// In-memory result of [`run_scenario`].
#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub dimension: usize,
    pub ground_energy: f64,
    pub initial_state: StateVector,
    pub final_state: StateVector,
    pub record: PropagationRecord,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let basis = FockBasis::enumerate(cfg.particles, cfg.orbitals)?;
    let (a, b) = WellModel::new(cfg.particles, cfg.orbitals, cfg.g)?.assemble(&basis)?;
    let (psi0, ground_energy) = ground_state(&a, &b, cfg.initial_tilt(), cfg.ground_tol)?;
    let drive = cfg.case.drive();
    let problem = Problem::new(&a, &b, &drive, cfg.particles)?;
    let options = RunOptions {
        sample_steps: cfg.sample_steps,
        output_interval: cfg.max_dt,
    };
    let span = (0.0, cfg.t_end);
    let (final_state, record) = match cfg.method {
        Method::Alc => {
            let f = drive
                .constant_value()
                .ok_or_else(|| Error::Config("alc needs a constant drive".into()))?;
            propagate_alc(&problem, f, &psi0, span, cfg.tol, cfg.dk_max, options)?
        }
        Method::Al1 => propagate_al1(&problem, &psi0, span, cfg.tol, cfg.dk_max, options)?,
        Method::Al2 => propagate_al2(&problem, &psi0, span, cfg.tol, cfg.dk_max, options)?,
        Method::Rk8 => propagate_rk8(&problem, &psi0, span, cfg.tol, options)?,
        Method::Rk4 => propagate_rk4_fixed(&problem, &psi0, span, fixed_step(cfg)?, options)?,
        Method::Cn => {
            let gmres = GmresConfig {
                residual_tol: cfg.gmres_tol,
                ..GmresConfig::default()
            };
            propagate_cn_fixed(&problem, &psi0, span, fixed_step(cfg)?, gmres, options)?
        }
    };
    Ok(ScenarioOutcome {
        dimension: basis.dimension(),
        ground_energy,
        initial_state: psi0,
        final_state,
        record,
    })
}

fn fixed_step(cfg: &ScenarioConfig) -> Result<f64> {
    cfg.dt
        .ok_or_else(|| Error::Config(format!("method {} needs a fixed step", cfg.method)))
}

pub const SERIES_HEADER: &str = "t,x_mean,norm,energy,dt,d_k,matvecs_cumulative";

/// Writes the sampled observables as CSV with 17 significant digits.
pub fn write_series<W: Write>(mut w: W, record: &PropagationRecord) -> Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for s in &record.samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            s.t, s.x_mean, s.norm, s.energy, s.dt, s.krylov_dim, s.matvecs_cumulative
        )?;
    }
    Ok(())
}

/// Flat `key=value` benchmark report. Contains no timing, so identical
/// configurations give identical reports.
pub fn write_report<W: Write>(mut w: W, cfg: &ScenarioConfig, outcome: &ScenarioOutcome) -> Result<()> {
    let r = &outcome.record;
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:.16e}"));
    let last = r.samples.last();
    writeln!(w, "method={}", r.method)?;
    writeln!(w, "case={}", cfg.case)?;
    writeln!(w, "particles={}", cfg.particles)?;
    writeln!(w, "orbitals={}", cfg.orbitals)?;
    writeln!(w, "dimension={}", outcome.dimension)?;
    writeln!(w, "g={:.16e}", cfg.g)?;
    writeln!(w, "tol={:.16e}", cfg.tol)?;
    writeln!(w, "dkmax={}", cfg.dk_max)?;
    writeln!(w, "t_end={:.16e}", cfg.t_end)?;
    writeln!(w, "f0={:.16e}", cfg.initial_tilt())?;
    writeln!(w, "dt={}", opt(cfg.dt))?;
    writeln!(w, "max_dt={}", opt(cfg.max_dt))?;
    writeln!(w, "ground_energy={:.16e}", outcome.ground_energy)?;
    writeln!(w, "matvecs_total={}", r.matvecs_total)?;
    writeln!(w, "matvecs_rejected={}", r.matvecs_rejected)?;
    writeln!(w, "steps_accepted={}", r.steps_accepted)?;
    writeln!(w, "steps_rejected={}", r.steps_rejected)?;
    let max_dk = r.accepted_steps().map(|s| s.krylov_dim).max().unwrap_or(0);
    writeln!(w, "max_krylov_dim={max_dk}")?;
    let iterations: usize = r.accepted_steps().map(|s| s.solver_iterations).sum();
    writeln!(w, "solver_iterations={iterations}")?;
    writeln!(w, "max_norm_deviation={:.16e}", r.max_norm_deviation)?;
    if let Some(s) = last {
        writeln!(w, "final_x_mean={:.16e}", s.x_mean)?;
        writeln!(w, "final_energy={:.16e}", s.energy)?;
    }
    writeln!(w, "state_sha256={}", state_checksum(&outcome.final_state))?;
    Ok(())
}

/// Parses a `key=value` report back into ordered pairs.
pub fn parse_report(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Format(format!("report line without `=`: {l}")))
        })
        .collect()
}

fn state_bytes(psi: &[Complex64]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(8 + 16 * psi.len());
    bytes.extend_from_slice(&(psi.len() as u64).to_le_bytes());
    for z in psi {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    bytes
}

/// SHA-256 of the state dump bytes, hex encoded.
pub fn state_checksum(psi: &[Complex64]) -> String {
    Sha256::digest(state_bytes(psi))
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Binary dump: little-endian `u64` dimension, then `(re, im)` pairs of
/// little-endian `f64`.
pub fn write_state<W: Write>(mut w: W, psi: &[Complex64]) -> Result<()> {
    w.write_all(&state_bytes(psi))?;
    Ok(())
}

pub fn read_state<R: Read>(mut r: R) -> Result<StateVector> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)
        .map_err(|e| Error::Format(format!("missing state header: {e}")))?;
    let dim = usize::try_from(u64::from_le_bytes(word))
        .map_err(|_| Error::Format("state dimension does not fit in memory".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if dim.checked_mul(16) != Some(bytes.len()) {
        return Err(Error::Format(format!(
            "state header says {dim} amplitudes but the payload has {} bytes",
            bytes.len()
        )));
    }
    let psi = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8-byte slice"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8-byte slice"));
            Complex64::new(re, im)
        })
        .collect();
    Ok(psi)
}

pub fn save_state(path: &Path, psi: &[Complex64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_state(&mut w, psi)?;
    w.flush()?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<StateVector> {
    read_state(BufReader::new(File::open(path)?))
}

/// Euclidean distance between two dumped states after removing the
/// relative global phase.
pub fn compare_states(first: &Path, second: &Path) -> Result<f64> {
    let x = load_state(first)?;
    let y = load_state(second)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(vector::phase_aligned_distance(&x, &y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_names_and_tilts() {
        for c in Case::ALL {
            assert_eq!(c.as_str().parse::<Case>().unwrap(), c);
        }
        assert_eq!(Case::C.initial_tilt(), 10.0);
        assert_eq!(Case::D.initial_tilt(), 100.0);
        assert!("e".parse::<Case>().is_err());
    }

    #[test]
    fn alc_only_for_constant_drive() {
        let cfg = ScenarioConfig::new(2, 3, Case::B, Method::Alc);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(ScenarioConfig::new(2, 3, Case::A, Method::Alc).validate().is_ok());
    }

    #[test]
    fn fixed_step_methods_need_dt() {
        let mut cfg = ScenarioConfig::new(2, 3, Case::A, Method::Rk4);
        assert!(cfg.validate().is_err());
        cfg.dt = Some(0.01);
        assert!(cfg.validate().is_ok());
        let mut cfg = ScenarioConfig::new(2, 3, Case::A, Method::Al1);
        cfg.dt = Some(0.01);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn state_round_trip() {
        let psi = vec![Complex64::new(0.6, -0.0), Complex64::new(0.0, 0.8)];
        let mut buf = Vec::new();
        write_state(&mut buf, &psi).unwrap();
        assert_eq!(buf.len(), 8 + 32);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        let back = read_state(buf.as_slice()).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn truncated_state_is_rejected() {
        let mut buf = Vec::new();
        write_state(&mut buf, &[Complex64::new(1.0, 0.0)]).unwrap();
        buf.pop();
        assert!(matches!(read_state(buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn report_parses() {
        let pairs = parse_report("method=al1\nmatvecs_total=12\n").unwrap();
        assert_eq!(pairs[1], ("matvecs_total".to_string(), "12".to_string()));
        assert!(parse_report("garbage").is_err());
    }
}
