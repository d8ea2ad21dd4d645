//! Snapshot simulation of the two-tier uplink.
//!
//! Every trial redraws all users. Trial `i` of a campaign draws from a
//! ChaCha8 stream keyed by `(seed, i)`, so a campaign's output does not
//! depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::ecdf::EmpiricalCdf;
use crate::interference::{macro_user_term, max_rate};
use crate::model::sample_user;
use crate::params::{SystemParams, Tier, UserDistribution};
use crate::{Error, Result};

/// Default campaign size.
pub const DEFAULT_TRIALS: u64 = 10_000;

/// Minimum number of samples behind a moment estimate.
pub const DEFAULT_MIN_SAMPLES: usize = 200;

const BLOCK: u64 = 512;

/// One snapshot: the DAP users take turns, each with its own rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub n: u32,
    /// Rate of each DAP user while it is the active one.
    pub rates: Vec<f64>,
    /// `rates[i] / n`.
    pub tau_u: Vec<f64>,
    /// Mean of `rates`, 0 when the DAP is empty.
    pub tau_d: f64,
    /// `T_M / T_mu` of each DAP user, aligned with `rates`.
    pub i_macro: Vec<f64>,
    /// Interference of all macrocell users into the microcell base.
    pub i_micro: f64,
    /// Per-macrocell-user terms of `i_micro`.
    pub macro_terms: Vec<f64>,
}

/// The RNG used for trial `index` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_trial<R: Rng + ?Sized>(
    params: &SystemParams,
    dist: &UserDistribution,
    rng: &mut R,
) -> TrialOutcome {
    let mut i_macro = Vec::new();
    let mut macro_terms = Vec::with_capacity(params.users as usize);
    for _ in 0..params.users {
        let user = sample_user(params, dist, rng);
        match user.tier {
            Tier::Micro => i_macro.push(user.gain_macro / user.gain_micro),
            Tier::Macro => macro_terms.push(macro_user_term(&user)),
        }
    }
    let i_micro: f64 = macro_terms.iter().sum();
    let n = i_macro.len() as u32;
    let k = params.pole_capacity();
    let rates: Vec<f64> = i_macro
        .iter()
        .map(|&im| max_rate(k, params.users, n, params.gamma_micro, im, i_micro))
        .collect();
    let (tau_u, tau_d) = if n == 0 {
        (Vec::new(), 0.0)
    } else {
        let nf = f64::from(n);
        (
            rates.iter().map(|r| r / nf).collect(),
            rates.iter().sum::<f64>() / nf,
        )
    };
    TrialOutcome {
        n,
        rates,
        tau_u,
        tau_d,
        i_macro,
        i_micro,
        macro_terms,
    }
}

/// Aggregated campaign output. Per-DAP-turn vectors (`rates`, `i_macro`,
/// `rate_n`) are aligned; per-trial vectors (`n`, `tau_d`, `i_micro`) are
/// aligned; `macro_terms` and `term_n` are aligned.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    pub users: u32,
    pub trials: u64,
    pub n_histogram: Vec<u64>,
    pub n: Vec<u32>,
    pub tau_d: Vec<f64>,
    pub i_micro: Vec<f64>,
    pub rates: Vec<f64>,
    pub i_macro: Vec<f64>,
    pub rate_n: Vec<u32>,
    pub macro_terms: Vec<f64>,
    pub term_n: Vec<u32>,
}

impl SampleSet {
    fn new(users: u32) -> Self {
        SampleSet {
            users,
            n_histogram: vec![0; users as usize + 1],
            ..Default::default()
        }
    }

    fn push(&mut self, t: TrialOutcome) {
        self.trials += 1;
        self.n_histogram[t.n as usize] += 1;
        self.n.push(t.n);
        self.tau_d.push(t.tau_d);
        self.i_micro.push(t.i_micro);
        self.rate_n.extend(std::iter::repeat_n(t.n, t.rates.len()));
        self.rates.extend(t.rates);
        self.i_macro.extend(t.i_macro);
        self.term_n
            .extend(std::iter::repeat_n(t.n, t.macro_terms.len()));
        self.macro_terms.extend(t.macro_terms);
    }

    /// Trials with at least one DAP user.
    pub fn active_trials(&self) -> u64 {
        self.trials - self.n_histogram[0]
    }

    pub fn mean_n(&self) -> f64 {
        let total: u64 = self
            .n_histogram
            .iter()
            .enumerate()
            .map(|(n, c)| n as u64 * c)
            .sum();
        total as f64 / self.trials as f64
    }

    /// Empirical probability that a single user selects the microcell.
    pub fn micro_fraction(&self) -> f64 {
        self.mean_n() / f64::from(self.users)
    }

    /// Weight of each DAP turn so that every active trial counts once.
    fn turn_weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.rate_n.iter().map(|&n| 1.0 / f64::from(n))
    }

    /// Distribution of the active user's rate, given at least one DAP user.
    /// Each active trial carries unit mass split evenly over its turns.
    pub fn rate_cdf(&self) -> Result<EmpiricalCdf> {
        EmpiricalCdf::weighted(self.rates.iter().copied().zip(self.turn_weights()))
    }

    /// Distribution of per-user throughput `r / n`, given at least one DAP user.
    pub fn tau_u_cdf(&self) -> Result<EmpiricalCdf> {
        EmpiricalCdf::weighted(
            self.rates
                .iter()
                .zip(&self.rate_n)
                .map(|(r, &n)| r / f64::from(n))
                .zip(self.turn_weights()),
        )
    }

    /// Mean per-user throughput over active trials; `None` if there are none.
    pub fn mean_tau_u(&self) -> Option<f64> {
        let active = self.active_trials();
        if active == 0 {
            return None;
        }
        let sum: f64 = self
            .tau_d
            .iter()
            .zip(&self.n)
            .filter(|(_, &n)| n > 0)
            .map(|(td, &n)| td / f64::from(n))
            .sum();
        Some(sum / active as f64)
    }

    /// Mean DAP utilization over all trials (empty DAP counts as 0).
    pub fn mean_tau_d(&self) -> f64 {
        self.tau_d.iter().sum::<f64>() / self.trials as f64
    }
}

/// Runs `trials` independent snapshots.
///
/// The result is identical for identical inputs, whatever the thread count.
pub fn run_campaign(
    params: &SystemParams,
    dist: &UserDistribution,
    trials: u64,
    seed: u64,
) -> Result<SampleSet> {
    params.validate()?;
    dist.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let run_block = |block: u64| -> Vec<TrialOutcome> {
        let start = block * BLOCK;
        let end = (start + BLOCK).min(trials);
        (start..end)
            .map(|i| run_trial(params, dist, &mut trial_rng(seed, i)))
            .collect()
    };
    let blocks = trials.div_ceil(BLOCK);
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Vec<TrialOutcome>> = (0..blocks).into_par_iter().map(run_block).collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Vec<TrialOutcome>> = (0..blocks).map(run_block).collect();

    let mut set = SampleSet::new(params.users);
    for t in outcomes.into_iter().flatten() {
        set.push(t);
    }
    Ok(set)
}

/// Sample first and second moments with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub count: usize,
    pub mean: f64,
    pub second: f64,
    pub mean_se: f64,
    pub second_se: f64,
    /// False when `count` is below the configured minimum.
    pub available: bool,
}

impl MomentEstimate {
    pub fn from_samples<'a>(samples: impl IntoIterator<Item = &'a f64>, min_count: usize) -> Self {
        let mut count = 0usize;
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for &x in samples {
            let x2 = x * x;
            count += 1;
            s1 += x;
            s2 += x2;
            s4 += x2 * x2;
        }
        if count == 0 {
            return MomentEstimate {
                count,
                mean: f64::NAN,
                second: f64::NAN,
                mean_se: f64::NAN,
                second_se: f64::NAN,
                available: false,
            };
        }
        let c = count as f64;
        let mean = s1 / c;
        let second = s2 / c;
        let fourth = s4 / c;
        let se = |m: f64, m_sq: f64| {
            if count > 1 {
                ((m_sq - m * m).max(0.0) / (c - 1.0)).sqrt()
            } else {
                f64::NAN
            }
        };
        MomentEstimate {
            count,
            mean,
            second,
            mean_se: se(mean, second),
            second_se: se(second, fourth),
            available: count >= min_count,
        }
    }
}

/// Moments of the interference quantities, per DAP-user count `n` and
/// pooled over all `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMoments {
    pub min_count: usize,
    /// Indexed by `n`.
    pub i_macro: Vec<MomentEstimate>,
    pub i_micro: Vec<MomentEstimate>,
    pub term: Vec<MomentEstimate>,
    pub i_macro_pooled: MomentEstimate,
    pub term_pooled: MomentEstimate,
}

pub fn estimate_conditional_moments(set: &SampleSet, min_count: usize) -> ConditionalMoments {
    let by_n = |values: &[f64], ns: &[u32], n: u32| -> MomentEstimate {
        MomentEstimate::from_samples(
            values.iter().zip(ns).filter(|(_, &k)| k == n).map(|(v, _)| v),
            min_count,
        )
    };
    let ns = 0..=set.users;
    ConditionalMoments {
        min_count,
        i_macro: ns.clone().map(|n| by_n(&set.i_macro, &set.rate_n, n)).collect(),
        i_micro: ns.clone().map(|n| by_n(&set.i_micro, &set.n, n)).collect(),
        term: ns.map(|n| by_n(&set.macro_terms, &set.term_n, n)).collect(),
        i_macro_pooled: MomentEstimate::from_samples(&set.i_macro, min_count),
        term_pooled: MomentEstimate::from_samples(&set.macro_terms, min_count),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::interference_micro;
    use crate::model::UserRealization;
    use proptest::prelude::*;

    fn check_invariants(t: &TrialOutcome, params: &SystemParams) {
        assert_eq!(t.rates.len(), t.n as usize);
        assert_eq!(t.i_macro.len(), t.n as usize);
        assert_eq!(t.n as usize + t.macro_terms.len(), params.users as usize);
        assert!(t.rates.iter().all(|r| (0.0..=1.0).contains(r)));
        if t.n > 0 {
            let mean = t.rates.iter().sum::<f64>() / f64::from(t.n);
            assert!((t.tau_d - mean).abs() <= 1e-15);
        } else {
            assert_eq!(t.tau_d, 0.0);
        }
        let delta = params.delta();
        assert!(t.i_macro.iter().all(|&im| im > 0.0 && im <= delta));
        assert!(t.macro_terms.iter().all(|&x| x > 0.0 && x < 1.0 / delta));
    }

    #[test]
    fn vanishing_zeta_empties_the_dap() {
        let p = SystemParams::table1().with_zeta(1e-12);
        let mut rng = trial_rng(1, 0);
        for _ in 0..200 {
            let t = run_trial(&p, &UserDistribution::Uniform, &mut rng);
            assert_eq!(t.n, 0);
            assert_eq!(t.tau_d, 0.0);
        }
    }

    #[test]
    fn lone_dap_user_gets_full_rate() {
        // One user sitting on the microcell base with a huge zeta is Micro.
        let p = SystemParams::table1().with_users(1).with_zeta(1e3);
        let dist = UserDistribution::Hotspot { fraction: 1.0, radius: 1.0 };
        let t = run_trial(&p, &dist, &mut trial_rng(4, 0));
        assert_eq!(t.n, 1);
        assert_eq!(t.i_micro, 0.0);
        assert_eq!(t.rates, vec![1.0]);
        assert_eq!(t.tau_u, vec![1.0]);
        assert_eq!(t.tau_d, 1.0);
    }

    #[test]
    fn turns_share_macro_interference() {
        let p = SystemParams::table1().with_zeta(0.05);
        let mut rng = trial_rng(9, 3);
        let mut seen = 0;
        for _ in 0..500 {
            let mut users: Vec<UserRealization> = Vec::new();
            for _ in 0..p.users {
                users.push(sample_user(&p, &UserDistribution::Uniform, &mut rng));
            }
            let macros: Vec<_> = users.iter().filter(|u| u.tier == Tier::Macro).collect();
            let imu = interference_micro(macros.iter().copied()).unwrap();
            let n = (users.len() - macros.len()) as u32;
            for u in users.iter().filter(|u| u.tier == Tier::Micro) {
                let r = max_rate(p.pole_capacity(), p.users, n, p.gamma_micro, u.gain_macro / u.gain_micro, imu);
                assert!((0.0..=1.0).contains(&r));
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn campaign_is_deterministic() {
        let p = SystemParams::table1().with_zeta(0.01);
        let a = run_campaign(&p, &UserDistribution::Uniform, 2_000, 42).unwrap();
        let b = run_campaign(&p, &UserDistribution::Uniform, 2_000, 42).unwrap();
        assert_eq!(a, b);
        let c = run_campaign(&p, &UserDistribution::Uniform, 2_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_trial_campaign_matches_run_trial() {
        let p = SystemParams::table1().with_zeta(0.05);
        let set = run_campaign(&p, &UserDistribution::Uniform, 1, 8).unwrap();
        let t = run_trial(&p, &UserDistribution::Uniform, &mut trial_rng(8, 0));
        assert_eq!(set.trials, 1);
        assert_eq!(set.n, vec![t.n]);
        assert_eq!(set.rates, t.rates);
        assert_eq!(set.tau_d, vec![t.tau_d]);
        assert_eq!(set.macro_terms, t.macro_terms);
        assert_eq!(set.n_histogram.iter().sum::<u64>(), 1);
    }

    #[test]
    fn campaign_rejects_zero_trials() {
        let p = SystemParams::table1();
        assert!(run_campaign(&p, &UserDistribution::Uniform, 0, 1).is_err());
    }

    #[test]
    fn histogram_and_vectors_are_consistent() {
        let p = SystemParams::table1().with_zeta(0.02);
        let set = run_campaign(&p, &UserDistribution::Uniform, 3_000, 5).unwrap();
        assert_eq!(set.n_histogram.iter().sum::<u64>(), set.trials);
        let turns: u64 = set.n.iter().map(|&n| u64::from(n)).sum();
        assert_eq!(set.rates.len() as u64, turns);
        assert_eq!(set.macro_terms.len() as u64, set.trials * u64::from(p.users) - turns);
        let f = set.rate_cdf().unwrap();
        assert_eq!(*f.heights().last().unwrap(), 1.0);
        // Weighted means agree with per-trial means.
        let direct = set.mean_tau_u().unwrap();
        let via_cdf = set.tau_u_cdf().unwrap().mean();
        assert!((direct - via_cdf).abs() < 1e-12);
    }

    #[test]
    fn moment_estimates() {
        let c = [2.5; 300];
        let m = MomentEstimate::from_samples(&c, 200);
        assert_eq!(m.mean, 2.5);
        assert_eq!(m.second, 6.25);
        assert!(m.available);
        assert!(m.mean_se.abs() < 1e-12);
        let few = MomentEstimate::from_samples(&c[..10], 200);
        assert!(!few.available);
    }

    #[test]
    fn terms_respect_selection_bound() {
        let p = SystemParams::table1().with_zeta(0.007);
        let set = run_campaign(&p, &UserDistribution::Uniform, 2_000, 2).unwrap();
        let m = estimate_conditional_moments(&set, DEFAULT_MIN_SAMPLES);
        assert!(set.macro_terms.iter().all(|&t| t < 1.0 / p.delta()));
        assert!(m.term_pooled.available);
        assert!(m.term_pooled.mean < 1.0 / p.delta());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn trial_invariants_hold(seed in any::<u64>(), zeta in 1e-4f64..0.5, users in 1u32..40) {
            let p = SystemParams::table1().with_zeta(zeta).with_users(users);
            for i in 0..20 {
                let t = run_trial(&p, &UserDistribution::Uniform, &mut trial_rng(seed, i));
                check_invariants(&t, &p);
            }
        }
    }
}
