//! Werner-family sweep of discord and observable locking, and the
//! cross-method agreement suite on random states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QlockError, Result};
use crate::optim::OptimConfig;
use crate::passive::BipartiteObservable;
use crate::states::random::{random_bell_diagonal_with, random_density_with, rng_from_seed};
use crate::states::{bloch_decompose, werner};

use super::discord::discord_entropic;
use super::observable::{
    observable_locking_bruteforce, observable_locking_corollary1, observable_locking_theorem3,
};

pub const SWEEP_HEADER: [&str; 3] = ["alpha", "discord_bits", "locking_energy"];

/// Caps worker threads for sweeps.
pub const THREADS_ENV: &str = "QLOCK_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WernerRow {
    pub alpha: f64,
    pub discord_bits: f64,
    pub locking_energy: f64,
    /// Sphere-route value, when the levels are non-degenerate and the gaps
    /// differ.
    pub theorem3: Option<f64>,
    /// Brute-force value, when requested.
    pub bruteforce: Option<f64>,
}

impl WernerRow {
    pub fn csv_fields(&self) -> Vec<f64> {
        vec![self.alpha, self.discord_bits, self.locking_energy]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub eps1: f64,
    pub eps2: f64,
    /// Also run the SU(2) oracle on every row.
    pub bruteforce: bool,
    pub sphere: OptimConfig,
    pub su2: OptimConfig,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            eps1: 2.0,
            eps2: 2.0,
            bruteforce: false,
            sphere: OptimConfig::default(),
            su2: OptimConfig::su2_default(),
        }
    }
}

/// Parses `start:stop:step` into an inclusive grid inside [0, 1]. A single
/// number is a one-point grid.
pub fn parse_alpha_range(range: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = range.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| QlockError::Parse(format!("bad number {s:?} in range {range:?}")))
    };
    let (start, stop, step) = match parts.as_slice() {
        [a] => {
            let a = num(a)?;
            (a, a, 1.0)
        }
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(QlockError::Parse(format!("range {range:?} is not start:stop:step"))),
    };
    for x in [start, stop] {
        if !(0.0..=1.0).contains(&x) {
            return Err(QlockError::OutOfRange {
                value: x,
                min: 0.0,
                max: 1.0,
            });
        }
    }
    if step <= 0.0 || stop < start {
        return Err(QlockError::Parse(format!("range {range:?} needs start ≤ stop and step > 0")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| (start + k as f64 * step).min(stop)).collect())
}

/// Runs `f` on a pool of at most `QLOCK_THREADS` workers, if set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// One row per α in input order; locking via the closed form.
pub fn werner_sweep(alphas: &[f64], opts: &SweepOptions) -> Result<Vec<WernerRow>> {
    let bobs = BipartiteObservable::from_gaps(opts.eps1, opts.eps2)?;
    with_thread_cap(|| {
        alphas
            .par_iter()
            .map(|&alpha| {
                let rho = werner(alpha)?;
                let b = bloch_decompose(&rho)?;
                let locking_energy = observable_locking_corollary1(&b, &bobs)?.value;
                let theorem3 = if opts.eps1 != opts.eps2 && !bobs.degenerate {
                    Some(observable_locking_theorem3(&b, &bobs, &opts.sphere)?.value)
                } else {
                    None
                };
                let bruteforce = if opts.bruteforce {
                    Some(observable_locking_bruteforce(&rho, &bobs, &opts.su2)?.value)
                } else {
                    None
                };
                Ok(WernerRow {
                    alpha,
                    discord_bits: discord_entropic(&rho, &opts.sphere)?,
                    locking_energy,
                    theorem3,
                    bruteforce,
                })
            })
            .collect()
    })
}

pub fn write_sweep_csv<W: std::io::Write>(w: W, rows: &[WernerRow]) -> std::io::Result<()> {
    let table: Vec<Vec<f64>> = rows.iter().map(WernerRow::csv_fields).collect();
    crate::io::write_csv(w, &SWEEP_HEADER, &table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub seed: u64,
    pub samples: usize,
    /// Random states: sphere route vs brute force.
    pub max_theorem3_vs_bruteforce: f64,
    /// Bell-diagonal states: closed form vs sphere route.
    pub max_corollary1_vs_theorem3: f64,
    /// Bell-diagonal states: closed form vs brute force.
    pub max_corollary1_vs_bruteforce: f64,
    pub max_deviation: f64,
    /// Sample index of the worst deviation, if any samples ran.
    pub worst_sample: Option<usize>,
}

/// Cross-method agreement on `samples` random two-qubit states and as many
/// random Bell-diagonal states, with levels (0, 1, 2, 3).
pub fn oracle_compare(seed: u64, samples: usize, sphere: &OptimConfig, su2: &OptimConfig) -> Result<OracleSummary> {
    let bobs = BipartiteObservable::from_gaps(1.0, 2.0)?;
    let mut rng = rng_from_seed(seed);
    let states: Vec<_> = (0..samples)
        .map(|_| (random_density_with(2, 2, &mut rng), random_bell_diagonal_with(&mut rng)))
        .collect();
    let devs: Vec<(f64, f64, f64)> = with_thread_cap(|| {
        states
            .par_iter()
            .map(|(rho, bell)| -> Result<(f64, f64, f64)> {
                let t3 = observable_locking_theorem3(&bloch_decompose(rho)?, &bobs, sphere)?.value;
                let bf = observable_locking_bruteforce(rho, &bobs, su2)?.value;
                let bb = bloch_decompose(bell)?;
                let c1 = observable_locking_corollary1(&bb, &bobs)?.value;
                let bt3 = observable_locking_theorem3(&bb, &bobs, sphere)?.value;
                let bbf = observable_locking_bruteforce(bell, &bobs, su2)?.value;
                Ok(((t3 - bf).abs(), (c1 - bt3).abs(), (c1 - bbf).abs()))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut s = OracleSummary {
        seed,
        samples,
        max_theorem3_vs_bruteforce: 0.0,
        max_corollary1_vs_theorem3: 0.0,
        max_corollary1_vs_bruteforce: 0.0,
        max_deviation: 0.0,
        worst_sample: None,
    };
    for (k, &(a, b, c)) in devs.iter().enumerate() {
        s.max_theorem3_vs_bruteforce = s.max_theorem3_vs_bruteforce.max(a);
        s.max_corollary1_vs_theorem3 = s.max_corollary1_vs_theorem3.max(b);
        s.max_corollary1_vs_bruteforce = s.max_corollary1_vs_bruteforce.max(c);
        let worst = a.max(b).max(c);
        if s.worst_sample.is_none() || worst > s.max_deviation {
            s.max_deviation = worst;
            s.worst_sample = Some(k);
        }
    }
    Ok(s)
}
