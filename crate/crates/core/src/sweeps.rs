//! Sweeps over `zeta` and `N`, and the balance point where the mean
//! per-user throughput equals the mean DAP utilization.

use std::fmt;

use crate::analytic::AnalyticModel;
use crate::montecarlo::{run_campaign, DEFAULT_TRIALS};
use crate::params::{SystemParams, UserDistribution};
use crate::{Error, Result};

/// Stop bisecting once the bracket is this narrow, in decades.
pub const BISECTION_WIDTH: f64 = 1e-2;
/// Stop bisecting once `|E[tau_u] - E[tau_d]|` is this small.
pub const CROSSING_TOL: f64 = 1e-3;
pub const DEFAULT_SEARCH: (f64, f64) = (1e-4, 1e-1);

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..points)
                .map(|i| {
                    if i == points - 1 {
                        hi
                    } else {
                        10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// Default grid: 25 points over `[1e-4, 1e-1]`.
pub fn default_zeta_grid() -> Vec<f64> {
    log_grid(DEFAULT_SEARCH.0, DEFAULT_SEARCH.1, 25)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Simulation,
    Analytic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Simulation => "simulation",
            Method::Analytic => "analytic",
        })
    }
}

/// Mean throughputs at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub tau_u: f64,
    pub tau_d: f64,
    pub mean_n: f64,
}

pub trait Evaluator: Sync {
    fn method(&self) -> Method;
    fn evaluate(&self, params: &SystemParams, dist: &UserDistribution) -> Result<Evaluation>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Analytic;

impl Evaluator for Analytic {
    fn method(&self) -> Method {
        Method::Analytic
    }

    fn evaluate(&self, params: &SystemParams, dist: &UserDistribution) -> Result<Evaluation> {
        let model = AnalyticModel::new(params, dist)?;
        let t = model.expected_throughputs()?;
        Ok(Evaluation {
            tau_u: t.tau_u,
            tau_d: t.tau_d,
            mean_n: model.tier_counts.mean(),
        })
    }
}

/// Monte Carlo with a fixed seed, so every operating point sees the same
/// positions and shadowing.
#[derive(Debug, Clone, Copy)]
pub struct Simulation {
    pub trials: u64,
    pub seed: u64,
}

impl Default for Simulation {
    fn default() -> Self {
        Simulation {
            trials: DEFAULT_TRIALS,
            seed: 1,
        }
    }
}

impl Evaluator for Simulation {
    fn method(&self) -> Method {
        Method::Simulation
    }

    fn evaluate(&self, params: &SystemParams, dist: &UserDistribution) -> Result<Evaluation> {
        let set = run_campaign(params, dist, self.trials, self.seed)?;
        Ok(Evaluation {
            tau_u: set.mean_tau_u().ok_or(Error::NoDapUsers)?,
            tau_d: set.mean_tau_d(),
            mean_n: set.mean_n(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub zeta: f64,
    pub users: u32,
    pub e_tau_u_sim: Option<f64>,
    pub e_tau_d_sim: Option<f64>,
    pub e_tau_u_analytic: Option<f64>,
    pub e_tau_d_analytic: Option<f64>,
    /// Simulated mean number of DAP users.
    pub mean_n: f64,
    pub q: Option<f64>,
    /// Failures of either path at this point.
    pub errors: Vec<(Method, Error)>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("zeta_grid", "must not be empty"));
    }
    if grid.iter().any(|z| !(*z > 0.0 && *z <= 1.0)) {
        return Err(Error::invalid("zeta_grid", "values must lie in (0, 1]"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("zeta_grid", "must be strictly increasing"));
    }
    Ok(())
}

/// Both paths at each grid point. Failed points keep `None` columns and
/// carry their errors.
pub fn sweep_zeta(
    params: &SystemParams,
    dist: &UserDistribution,
    grid: &[f64],
    sim: &Simulation,
) -> Result<Vec<SweepRow>> {
    params.validate()?;
    dist.validate()?;
    check_grid(grid)?;
    let row = |&zeta: &f64| -> Result<SweepRow> {
        let p = params.with_zeta(zeta);
        let mut errors = vec![];
        let set = run_campaign(&p, dist, sim.trials, sim.seed)?;
        let e_tau_u_sim = set.mean_tau_u();
        if e_tau_u_sim.is_none() {
            errors.push((Method::Simulation, Error::NoDapUsers));
        }
        let (analytic, q) = match AnalyticModel::new(&p, dist) {
            Ok(m) => (m.expected_throughputs(), Some(m.tier_counts.q)),
            Err(e) => (Err(e), None),
        };
        let analytic = analytic.map_err(|e| errors.push((Method::Analytic, e))).ok();
        Ok(SweepRow {
            zeta,
            users: p.users,
            e_tau_u_sim,
            e_tau_d_sim: Some(set.mean_tau_d()),
            e_tau_u_analytic: analytic.map(|t| t.tau_u),
            e_tau_d_analytic: analytic.map(|t| t.tau_d),
            mean_n: set.mean_n(),
            q,
            errors,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_iter().map(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.iter().map(row).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancePoint {
    pub zeta_star: f64,
    pub tau_star: f64,
    pub users: u32,
    pub method: Method,
    /// `E[tau_u] - E[tau_d]` at `zeta_star`.
    pub residual: f64,
}

/// Bisection on `log10(zeta)` for a sign change of `E[tau_u] - E[tau_d]`.
pub fn find_balance(
    params: &SystemParams,
    dist: &UserDistribution,
    evaluator: &dyn Evaluator,
    interval: (f64, f64),
) -> Result<BalancePoint> {
    let (lo, hi) = interval;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("search_interval", "need 0 < lo < hi"));
    }
    let diff = |log_zeta: f64| -> Result<(f64, Evaluation)> {
        let e = evaluator.evaluate(&params.with_zeta(10f64.powf(log_zeta)), dist)?;
        Ok((e.tau_u - e.tau_d, e))
    };
    let (mut a, mut b) = (lo.log10(), hi.log10());
    let (mut fa, ea) = diff(a)?;
    let (fb, eb) = diff(b)?;
    let point = |log_zeta: f64, f: f64, e: &Evaluation| BalancePoint {
        zeta_star: 10f64.powf(log_zeta),
        tau_star: 0.5 * (e.tau_u + e.tau_d),
        users: params.users,
        method: evaluator.method(),
        residual: f,
    };
    if fa.abs() <= CROSSING_TOL {
        return Ok(point(a, fa, &ea));
    }
    if fb.abs() <= CROSSING_TOL {
        return Ok(point(b, fb, &eb));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoCrossing {
            lo,
            hi,
            diff_lo: fa,
            diff_hi: fb,
        });
    }
    let (mut best, mut best_f, mut best_e) = if fa.abs() < fb.abs() { (a, fa, ea) } else { (b, fb, eb) };
    while b - a > BISECTION_WIDTH {
        let m = 0.5 * (a + b);
        let (fm, em) = diff(m)?;
        if fm.abs() < best_f.abs() {
            (best, best_f, best_e) = (m, fm, em);
        }
        if fm.abs() <= CROSSING_TOL {
            break;
        }
        if fm.signum() == fa.signum() {
            (a, fa) = (m, fm);
        } else {
            b = m;
        }
    }
    Ok(point(best, best_f, &best_e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NRow {
    pub users: u32,
    pub balance: Result<BalancePoint>,
}

/// Balance point for each user count; failures are kept per row.
pub fn sweep_n(
    params: &SystemParams,
    dist: &UserDistribution,
    users: &[u32],
    evaluator: &dyn Evaluator,
    interval: (f64, f64),
) -> Result<Vec<NRow>> {
    params.validate()?;
    dist.validate()?;
    let k = params.pole_capacity();
    if let Some(&bad) = users.iter().find(|&&n| n < 2 || f64::from(n) > k.ceil() + 4.0) {
        return Err(Error::invalid(
            "n_values",
            format!("{bad} is outside [2, ceil(K) + 4]"),
        ));
    }
    let row = |&n: &u32| NRow {
        users: n,
        balance: find_balance(&params.with_users(n), dist, evaluator, interval),
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(users.par_iter().map(row).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(users.iter().map(row).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotspotComparison {
    pub uniform: BalancePoint,
    pub hotspot: BalancePoint,
}

impl HotspotComparison {
    pub fn delta_zeta(&self) -> f64 {
        self.hotspot.zeta_star - self.uniform.zeta_star
    }

    pub fn delta_tau(&self) -> f64 {
        self.hotspot.tau_star - self.uniform.tau_star
    }
}

pub fn compare_hotspot(
    params: &SystemParams,
    hotspot: &UserDistribution,
    evaluator: &dyn Evaluator,
    interval: (f64, f64),
) -> Result<HotspotComparison> {
    hotspot.validate()?;
    Ok(HotspotComparison {
        uniform: find_balance(params, &UserDistribution::Uniform, evaluator, interval)?,
        hotspot: find_balance(params, hotspot, evaluator, interval)?,
    })
}
