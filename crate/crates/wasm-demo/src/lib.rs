//! Browser bindings: CDF overlays, the zeta sweep with its balance point,
//! and a single user layout.

use twotier::analytic::AnalyticModel;
use twotier::ecdf::{ks_distance, Cdf};
use twotier::model::sample_user;
use twotier::montecarlo::{run_campaign, trial_rng};
use twotier::sweeps::{find_balance, log_grid, sweep_zeta, Analytic, Simulation, DEFAULT_SEARCH};
use twotier::{SystemParams, Tier, UserDistribution};
use wasm_bindgen::prelude::*;

fn params(zeta: f64, users: u32) -> SystemParams {
    SystemParams::table1().with_zeta(zeta).with_users(users)
}

fn js(e: twotier::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct CdfCurves {
    x: Vec<f64>,
    rate_sim: Vec<f64>,
    rate_analytic: Vec<f64>,
    tau_sim: Vec<f64>,
    tau_analytic: Vec<f64>,
    ks_rate: f64,
    ks_tau: f64,
}

#[wasm_bindgen]
impl CdfCurves {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rate_sim(&self) -> Vec<f64> {
        self.rate_sim.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rate_analytic(&self) -> Vec<f64> {
        self.rate_analytic.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn tau_sim(&self) -> Vec<f64> {
        self.tau_sim.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn tau_analytic(&self) -> Vec<f64> {
        self.tau_analytic.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn ks_rate(&self) -> f64 {
        self.ks_rate
    }
    #[wasm_bindgen(getter)]
    pub fn ks_tau(&self) -> f64 {
        self.ks_tau
    }
}

pub fn compute_cdfs(zeta: f64, users: u32, trials: u32, seed: u32, points: u32) -> twotier::Result<CdfCurves> {
    let p = params(zeta, users);
    let dist = UserDistribution::Uniform;
    let set = run_campaign(&p, &dist, u64::from(trials), u64::from(seed))?;
    let model = AnalyticModel::new(&p, &dist)?;
    let (rs, ra) = (set.rate_cdf()?, model.rate_mixture()?);
    let (ts, ta) = (set.tau_u_cdf()?, model.tau_u_mixture()?);
    let k = points.max(2) - 1;
    let x: Vec<f64> = (0..=k).map(|i| f64::from(i) / f64::from(k)).collect();
    let eval = |c: &dyn Cdf| x.iter().map(|&v| c.cdf(v)).collect::<Vec<_>>();
    Ok(CdfCurves {
        rate_sim: eval(&rs),
        rate_analytic: eval(&ra),
        tau_sim: eval(&ts),
        tau_analytic: eval(&ta),
        ks_rate: ks_distance(&rs, &ra),
        ks_tau: ks_distance(&ts, &ta),
        x,
    })
}

/// Simulated and analytic CDFs of the DAP rate and of per-user throughput.
#[wasm_bindgen]
pub fn cdf_curves(zeta: f64, users: u32, trials: u32, seed: u32, points: u32) -> Result<CdfCurves, JsError> {
    compute_cdfs(zeta, users, trials, seed, points).map_err(js)
}

#[wasm_bindgen]
pub struct SweepCurves {
    zeta: Vec<f64>,
    tau_u_sim: Vec<f64>,
    tau_d_sim: Vec<f64>,
    tau_u_analytic: Vec<f64>,
    tau_d_analytic: Vec<f64>,
    zeta_star: f64,
    tau_star: f64,
}

#[wasm_bindgen]
impl SweepCurves {
    #[wasm_bindgen(getter)]
    pub fn zeta(&self) -> Vec<f64> {
        self.zeta.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn tau_u_sim(&self) -> Vec<f64> {
        self.tau_u_sim.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn tau_d_sim(&self) -> Vec<f64> {
        self.tau_d_sim.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn tau_u_analytic(&self) -> Vec<f64> {
        self.tau_u_analytic.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn tau_d_analytic(&self) -> Vec<f64> {
        self.tau_d_analytic.clone()
    }
    /// Analytic balance point; NaN when there is no crossing.
    #[wasm_bindgen(getter)]
    pub fn zeta_star(&self) -> f64 {
        self.zeta_star
    }
    #[wasm_bindgen(getter)]
    pub fn tau_star(&self) -> f64 {
        self.tau_star
    }
}

pub fn compute_sweep(users: u32, trials: u32, seed: u32, points: u32) -> twotier::Result<SweepCurves> {
    let p = params(0.005, users);
    let dist = UserDistribution::Uniform;
    let grid = log_grid(DEFAULT_SEARCH.0, DEFAULT_SEARCH.1, points.max(2) as usize);
    let sim = Simulation {
        trials: u64::from(trials),
        seed: u64::from(seed),
    };
    let rows = sweep_zeta(&p, &dist, &grid, &sim)?;
    let col = |f: fn(&twotier::sweeps::SweepRow) -> Option<f64>| rows.iter().map(|r| f(r).unwrap_or(f64::NAN)).collect();
    let balance = find_balance(&p, &dist, &Analytic, DEFAULT_SEARCH).ok();
    Ok(SweepCurves {
        tau_u_sim: col(|r| r.e_tau_u_sim),
        tau_d_sim: col(|r| r.e_tau_d_sim),
        tau_u_analytic: col(|r| r.e_tau_u_analytic),
        tau_d_analytic: col(|r| r.e_tau_d_analytic),
        zeta_star: balance.map_or(f64::NAN, |b| b.zeta_star),
        tau_star: balance.map_or(f64::NAN, |b| b.tau_star),
        zeta: grid,
    })
}

/// Mean throughputs over a log-spaced zeta grid, with the balance point.
#[wasm_bindgen]
pub fn zeta_sweep(users: u32, trials: u32, seed: u32, points: u32) -> Result<SweepCurves, JsError> {
    compute_sweep(users, trials, seed, points).map_err(js)
}

pub fn compute_layout(
    zeta: f64,
    users: u32,
    seed: u32,
    hotspot_fraction: f64,
    hotspot_radius: f64,
) -> twotier::Result<Vec<f64>> {
    let p = params(zeta, users);
    p.validate()?;
    let dist = if hotspot_fraction > 0.0 {
        UserDistribution::Hotspot {
            fraction: hotspot_fraction,
            radius: hotspot_radius,
        }
    } else {
        UserDistribution::Uniform
    };
    dist.validate()?;
    let mut rng = trial_rng(u64::from(seed), 0);
    let mut out = Vec::with_capacity(3 * users as usize);
    for _ in 0..users {
        let u = sample_user(&p, &dist, &mut rng);
        out.extend([u.position.x, u.position.y, if u.tier == Tier::Micro { 1.0 } else { 0.0 }]);
    }
    Ok(out)
}

/// One snapshot as `[x, y, tier]` triples; tier 1 is the microcell.
#[wasm_bindgen]
pub fn user_layout(
    zeta: f64,
    users: u32,
    seed: u32,
    hotspot_fraction: f64,
    hotspot_radius: f64,
) -> Result<Vec<f64>, JsError> {
    compute_layout(zeta, users, seed, hotspot_fraction, hotspot_radius).map_err(js)
}

/// Region side and base separation, meters.
#[wasm_bindgen]
pub fn geometry() -> Vec<f64> {
    let p = SystemParams::table1();
    vec![p.region_side_l, p.base_separation_d]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdfs_are_monotone() {
        let c = compute_cdfs(0.005, 26, 500, 1, 21).unwrap();
        assert_eq!(c.x.len(), 21);
        for v in [&c.rate_sim, &c.rate_analytic, &c.tau_sim, &c.tau_analytic] {
            assert!(v.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(*v.last().unwrap(), 1.0);
        }
        assert!(c.ks_rate < 0.2);
    }

    #[test]
    fn sweep_has_a_balance_point() {
        let s = compute_sweep(26, 200, 1, 6).unwrap();
        assert_eq!(s.zeta.len(), 6);
        assert!((0.003..0.02).contains(&s.zeta_star));
    }

    #[test]
    fn layout_triples() {
        let v = compute_layout(0.01, 26, 3, 0.0, 100.0).unwrap();
        assert_eq!(v.len(), 78);
        assert!(v.chunks(3).all(|t| t[0].abs() <= 500.0 && t[1].abs() <= 500.0 && (t[2] == 0.0 || t[2] == 1.0)));
        assert!(compute_layout(0.01, 26, 3, 1.5, 100.0).is_err());
    }
}
