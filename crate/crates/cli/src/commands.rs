//! Subcommands. Each returns the files it produced as (name, contents);
//! the caller writes them and the manifest.

use std::fmt;

use twotier::analytic::{compose_imu_moments, AnalyticModel};
use twotier::ecdf::Cdf;
use twotier::montecarlo::{run_campaign, SampleSet};
use twotier::sweeps::{
    compare_hotspot, sweep_n, sweep_zeta, Analytic, BalancePoint, Evaluator, Simulation,
    DEFAULT_SEARCH,
};
use twotier::Error;

use crate::config::{ConfigError, RunConfig, SweepMethod};
use crate::svg::{Chart, Series};
use crate::table::{num, opt, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Analyze,
    SweepZeta,
    SweepN,
    Hotspot,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Analyze => "analyze",
            Command::SweepZeta => "sweep-zeta",
            Command::SweepN => "sweep-n",
            Command::Hotspot => "hotspot",
            Command::Report => "report",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Model(Error),
    Io(std::io::Error),
}

impl CliError {
    /// 1 for invalid input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration error: {e}"),
            CliError::Model(Error::NoDapUsers) => write!(
                f,
                "NoDapUsers: no user can select the microcell at this desensitivity (p_0 = 1)"
            ),
            CliError::Model(e @ Error::NoCrossing { .. }) => write!(f, "NoCrossing: {e}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type Outputs = Vec<(String, String)>;

pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Outputs, CliError> {
    match cmd {
        Command::Simulate => simulate(cfg),
        Command::Analyze => analyze(cfg),
        Command::SweepZeta => sweep_zeta_cmd(cfg),
        Command::SweepN => sweep_n_cmd(cfg),
        Command::Hotspot => hotspot(cfg),
        Command::Report => report(cfg),
    }
}

fn samples_table(set: &SampleSet) -> Table {
    let mut t = Table::new(&["trial", "n", "turn", "r", "tau_u", "i_m", "i_mu", "tau_d"]);
    let mut k = 0;
    for (trial, (&n, (&i_mu, &tau_d))) in set.n.iter().zip(set.i_micro.iter().zip(&set.tau_d)).enumerate() {
        if n == 0 {
            t.row([trial.to_string(), "0".into(), String::new(), String::new(), String::new(), String::new(), num(i_mu), num(tau_d)]);
            continue;
        }
        for turn in 0..n as usize {
            let r = set.rates[k + turn];
            t.row([
                trial.to_string(),
                n.to_string(),
                turn.to_string(),
                num(r),
                num(r / f64::from(n)),
                num(set.i_macro[k + turn]),
                num(i_mu),
                num(tau_d),
            ]);
        }
        k += n as usize;
    }
    t
}

fn cdf_table(grid: &[f64], sim: &dyn Cdf, analytic: Option<&dyn Cdf>) -> Table {
    let mut t = Table::new(&["value", "F_sim", "F_analytic"]);
    for &x in grid {
        t.row([num(x), num(sim.cdf(x)), opt(analytic.map(|a| a.cdf(x)))]);
    }
    t
}

fn analytic_cdf_table(grid: &[f64], analytic: &dyn Cdf) -> Table {
    let mut t = Table::new(&["value", "F_analytic"]);
    for &x in grid {
        t.row([num(x), num(analytic.cdf(x))]);
    }
    t
}

fn simulate(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let dist = cfg.distribution();
    let set = run_campaign(&cfg.params, &dist, cfg.trials, cfg.seed)?;
    if set.active_trials() == 0 {
        return Err(Error::NoDapUsers.into());
    }
    let model = match AnalyticModel::new(&cfg.params, &dist) {
        Ok(m) => Some(m),
        Err(e) => {
            eprintln!("warning: analytic columns left empty: {e}");
            None
        }
    };
    let grid = cfg.cdf_grid();
    let rate_sim = set.rate_cdf()?;
    let tau_sim = set.tau_u_cdf()?;
    let rate_an = model.as_ref().map(|m| m.rate_mixture()).transpose()?;
    let tau_an = model.as_ref().map(|m| m.tau_u_mixture()).transpose()?;
    println!(
        "simulated {} trials: {} with DAP users, mean n = {}, E[tau_u] = {}, E[tau_d] = {}",
        set.trials,
        set.active_trials(),
        set.mean_n(),
        opt(set.mean_tau_u()),
        set.mean_tau_d()
    );
    Ok(vec![
        ("samples.csv".into(), samples_table(&set).render()),
        (
            "cdf_r.csv".into(),
            cdf_table(&grid, &rate_sim, rate_an.as_ref().map(|c| c as &dyn Cdf)).render(),
        ),
        (
            "cdf_tau_u.csv".into(),
            cdf_table(&grid, &tau_sim, tau_an.as_ref().map(|c| c as &dyn Cdf)).render(),
        ),
    ])
}

fn analyze(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let model = AnalyticModel::new(&cfg.params, &cfg.distribution())?;
    let grid = cfg.cdf_grid();
    let th = model.expected_throughputs()?;
    let mut moments = Table::new(&[
        "n", "p_n", "E_IM", "E_IM2", "E_Imu", "E_Imu2", "m_IM", "sigma_IM", "m_Imu", "sigma_Imu", "mu_z",
        "sigma_z", "E_r",
    ]);
    let (e_im, e_im2) = model.moments.i_macro;
    let (t1, t2) = model.moments.term;
    for (n, &p) in model.tier_counts.p.iter().enumerate() {
        if n == 0 {
            moments.row([
                "0".to_string(),
                num(p),
                String::new(),
                String::new(),
                num(compose_imu_moments(cfg.params.users, t1, t2).0),
                num(compose_imu_moments(cfg.params.users, t1, t2).1),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "0".to_string(),
            ]);
            continue;
        }
        let (imu1, imu2) = compose_imu_moments(cfg.params.users - n as u32, t1, t2);
        let (im, imu) = model.fits[n];
        let (mu_z, sigma_z) = match model.per_n[n] {
            twotier::analytic::RateDistribution::TruncatedLognormal { mu, sigma } => (Some(mu), Some(sigma)),
            twotier::analytic::RateDistribution::PointMass(_) => (None, None),
        };
        moments.row([
            n.to_string(),
            num(p),
            num(e_im),
            num(e_im2),
            num(imu1),
            num(imu2),
            opt(im.map(|f| f.m)),
            opt(im.map(|f| f.sigma)),
            opt(imu.map(|f| f.m)),
            opt(imu.map(|f| f.sigma)),
            opt(mu_z),
            opt(sigma_z),
            num(model.per_n[n].mean()),
        ]);
    }
    println!(
        "q = {}, E[n] = {}, E[tau_u] = {}, E[tau_d] = {}",
        model.tier_counts.q,
        model.tier_counts.mean(),
        th.tau_u,
        th.tau_d
    );
    Ok(vec![
        ("analytic_cdf_r.csv".into(), analytic_cdf_table(&grid, &model.rate_mixture()?).render()),
        (
            "analytic_cdf_tau_u.csv".into(),
            analytic_cdf_table(&grid, &model.tau_u_mixture()?).render(),
        ),
        ("moments.csv".into(), moments.render()),
    ])
}

fn simulation(cfg: &RunConfig) -> Simulation {
    Simulation {
        trials: cfg.trials,
        seed: cfg.seed,
    }
}

fn sweep_zeta_cmd(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let dist = cfg.distribution();
    let rows = sweep_zeta(&cfg.params, &dist, &cfg.zeta_grid(), &simulation(cfg))?;
    let mut t = Table::new(&[
        "zeta",
        "N",
        "E_tau_u_sim",
        "E_tau_d_sim",
        "E_tau_u_analytic",
        "E_tau_d_analytic",
        "mean_n",
        "q",
    ]);
    for r in &rows {
        for (method, e) in &r.errors {
            eprintln!("warning: zeta = {}: {method} path failed: {e}", r.zeta);
        }
        t.row([
            num(r.zeta),
            r.users.to_string(),
            opt(r.e_tau_u_sim),
            opt(r.e_tau_d_sim),
            opt(r.e_tau_u_analytic),
            opt(r.e_tau_d_analytic),
            num(r.mean_n),
            opt(r.q),
        ]);
    }
    let series = |name: &str, dashed: bool, color: usize, f: &dyn Fn(&twotier::sweeps::SweepRow) -> Option<f64>| Series {
        name: name.into(),
        points: rows.iter().filter_map(|r| f(r).map(|v| (r.zeta, v))).collect(),
        dashed,
        color,
    };
    let chart = Chart {
        title: format!("Mean throughputs, N = {}", cfg.params.users),
        x_label: "zeta".into(),
        y_label: "throughput".into(),
        log_x: true,
        series: vec![
            series("E[tau_u] sim", false, 0, &|r| r.e_tau_u_sim),
            series("E[tau_u] analytic", true, 0, &|r| r.e_tau_u_analytic),
            series("E[tau_d] sim", false, 1, &|r| r.e_tau_d_sim),
            series("E[tau_d] analytic", true, 1, &|r| r.e_tau_d_analytic),
        ],
    };
    Ok(vec![
        ("sweep_zeta.csv".into(), t.render()),
        ("fig4.svg".into(), chart.render()),
    ])
}

fn evaluators(cfg: &RunConfig) -> Vec<Box<dyn Evaluator>> {
    let mut v: Vec<Box<dyn Evaluator>> = vec![];
    if matches!(cfg.sweep_method, SweepMethod::Simulation | SweepMethod::Both) {
        v.push(Box::new(simulation(cfg)));
    }
    if matches!(cfg.sweep_method, SweepMethod::Analytic | SweepMethod::Both) {
        v.push(Box::new(Analytic));
    }
    v
}

fn status(e: &Error) -> &'static str {
    match e {
        Error::NoCrossing { .. } => "no_crossing",
        Error::NoDapUsers => "no_dap_users",
        Error::DegenerateConditioning { .. } => "degenerate_conditioning",
        Error::QuadratureNonConvergence { .. } => "quadrature_nonconvergence",
        _ => "failed",
    }
}

fn sweep_n_cmd(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let dist = cfg.distribution();
    let mut t = Table::new(&["N", "method", "zeta_star", "tau_star", "residual", "status"]);
    let mut zeta_series = vec![];
    let mut tau_series = vec![];
    for (i, ev) in evaluators(cfg).iter().enumerate() {
        let rows = sweep_n(&cfg.params, &dist, &cfg.n_values, ev.as_ref(), DEFAULT_SEARCH)?;
        let mut zs = vec![];
        let mut ts = vec![];
        for r in &rows {
            match &r.balance {
                Ok(b) => {
                    t.row([
                        r.users.to_string(),
                        ev.method().to_string(),
                        num(b.zeta_star),
                        num(b.tau_star),
                        num(b.residual),
                        "ok".into(),
                    ]);
                    zs.push((f64::from(r.users), b.zeta_star));
                    ts.push((f64::from(r.users), b.tau_star));
                }
                Err(e) => {
                    eprintln!("warning: N = {}: {} balance point: {e}", r.users, ev.method());
                    t.row([
                        r.users.to_string(),
                        ev.method().to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        status(e).into(),
                    ]);
                }
            }
        }
        let dashed = ev.method() == twotier::sweeps::Method::Analytic;
        zeta_series.push(Series { name: ev.method().to_string(), points: zs, dashed, color: i });
        tau_series.push(Series { name: ev.method().to_string(), points: ts, dashed, color: i });
    }
    let charts = [
        Chart {
            title: "Balance desensitivity".into(),
            x_label: "N".into(),
            y_label: "zeta*".into(),
            log_x: false,
            series: zeta_series,
        },
        Chart {
            title: "Balance throughput".into(),
            x_label: "N".into(),
            y_label: "tau*".into(),
            log_x: false,
            series: tau_series,
        },
    ];
    Ok(vec![
        ("sweep_n.csv".into(), t.render()),
        ("fig5.svg".into(), crate::svg::stack(&charts)),
    ])
}

fn hotspot(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let mut t = Table::new(&[
        "method",
        "distribution",
        "hotspot_fraction",
        "hotspot_radius",
        "zeta_star",
        "tau_star",
        "delta_zeta",
        "delta_tau",
    ]);
    for ev in evaluators(cfg) {
        let c = compare_hotspot(&cfg.params, &cfg.hotspot(), ev.as_ref(), DEFAULT_SEARCH)?;
        let row = |b: &BalancePoint, kind: &str, delta: Option<(f64, f64)>, t: &mut Table| {
            t.row([
                ev.method().to_string(),
                kind.to_string(),
                if delta.is_some() { num(cfg.hotspot_fraction) } else { String::new() },
                if delta.is_some() { num(cfg.hotspot_radius) } else { String::new() },
                num(b.zeta_star),
                num(b.tau_star),
                opt(delta.map(|d| d.0)),
                opt(delta.map(|d| d.1)),
            ]);
        };
        row(&c.uniform, "uniform", None, &mut t);
        row(&c.hotspot, "hotspot", Some((c.delta_zeta(), c.delta_tau())), &mut t);
        println!(
            "{}: zeta* {} -> {}, tau* {} -> {}",
            ev.method(),
            c.uniform.zeta_star,
            c.hotspot.zeta_star,
            c.uniform.tau_star,
            c.hotspot.tau_star
        );
    }
    Ok(vec![("hotspot.csv".into(), t.render())])
}

fn report(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let dist = cfg.distribution();
    let grid = cfg.cdf_grid();
    let mut rate = vec![];
    let mut tau = vec![];
    for (i, &zeta) in cfg.report_zetas.iter().enumerate() {
        let p = cfg.params.with_zeta(zeta);
        let set = run_campaign(&p, &dist, cfg.trials, cfg.seed)?;
        let model = AnalyticModel::new(&p, &dist)?;
        let curves = |sim: &dyn Cdf, an: &dyn Cdf, out: &mut Vec<Series>| {
            out.push(Series {
                name: format!("sim, zeta = {zeta}"),
                points: grid.iter().map(|&x| (x, sim.cdf(x))).collect(),
                dashed: false,
                color: i,
            });
            out.push(Series {
                name: format!("analytic, zeta = {zeta}"),
                points: grid.iter().map(|&x| (x, an.cdf(x))).collect(),
                dashed: true,
                color: i,
            });
        };
        curves(&set.rate_cdf()?, &model.rate_mixture()?, &mut rate);
        curves(&set.tau_u_cdf()?, &model.tau_u_mixture()?, &mut tau);
    }
    let chart = |title: &str, x: &str, series| Chart {
        title: title.into(),
        x_label: x.into(),
        y_label: "CDF".into(),
        log_x: false,
        series,
    };
    Ok(vec![
        ("fig2.svg".into(), chart("CDF of the DAP rate", "r", rate).render()),
        ("fig3.svg".into(), chart("CDF of per-user throughput", "tau_u", tau).render()),
    ])
}
