//! Truncated-lognormal approximation of the DAP rate distribution.
//!
//! Users are i.i.d., so the number `n` on the microcell is binomial with the
//! single-user selection probability `q`. Given the tier labels, a DAP user's
//! `I_M` and each macrocell user's interference term `t` are independent
//! draws from their tier-conditional laws, whose first two moments are
//! computed here by integrating closed-form per-position lognormal partial
//! moments over the user density. Both `I_M` and the sum `I_mu` of `N - n`
//! terms are then replaced by lognormals with matching moments, making
//! `Z = (K - N + n) / (gamma_mu I_M I_mu)` lognormal and `r = min(Z, 1)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::ecdf::Cdf;
use crate::model::log_median_ratio;
use crate::montecarlo::ConditionalMoments;
use crate::normal;
use crate::params::{Position, SystemParams, Tier, UserDistribution};
use crate::quadrature::{integrate_1d, integrate_2d, Rect, Tolerance};
use crate::{Error, Result};

/// Tolerance on the selection probability.
pub const SELECTION_TOL: Tolerance = Tolerance::new(1e-14, 1e-6);
/// Tolerance on the conditional moments.
pub const MOMENT_TOL: Tolerance = Tolerance::new(1e-300, 1e-5);
/// Tolerance on the per-user throughput mean.
pub const THROUGHPUT_TOL: Tolerance = Tolerance::new(1e-6, 0.0);
/// Conditioning probabilities below this are degenerate.
pub const MIN_CONDITIONING: f64 = 1e-12;

const MAX_REGIONS: usize = 400_000;

/// Parameters of `ln X ~ N(m, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalParams {
    pub m: f64,
    pub sigma: f64,
}

impl LognormalParams {
    /// `E[X^k]`.
    pub fn moment(&self, k: f64) -> f64 {
        (k * self.m + 0.5 * k * k * self.sigma * self.sigma).exp()
    }
}

/// Two-moment lognormal fit: `m = ln(E1^2 / sqrt(E2))`, `sigma^2 = ln(E2 / E1^2)`.
pub fn lognormal_from_moments(first: f64, second: f64) -> Result<LognormalParams> {
    if !(first > 0.0 && first.is_finite() && second.is_finite()) {
        return Err(Error::InconsistentMoments { first, second });
    }
    if second < first * first {
        return Err(Error::InconsistentMoments { first, second });
    }
    let ln1 = first.ln();
    let ln2 = second.ln();
    let var = (ln2 - 2.0 * ln1).max(0.0);
    Ok(LognormalParams {
        m: 2.0 * ln1 - 0.5 * ln2,
        sigma: var.sqrt(),
    })
}

/// Binomial law of the number of DAP users.
#[derive(Debug, Clone, PartialEq)]
pub struct TierCountDistribution {
    pub q: f64,
    /// `p[n]` for `n = 0..=N`.
    pub p: Vec<f64>,
    /// `1 - p[0]`, computed without cancellation.
    pub p_active: f64,
}

impl TierCountDistribution {
    pub fn binomial(users: u32, q: f64) -> Self {
        let n_users = f64::from(users);
        let p = (0..=users)
            .map(|n| {
                let k = f64::from(n);
                if q == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                if q == 1.0 {
                    return if n == users { 1.0 } else { 0.0 };
                }
                let ln_choose =
                    libm::lgamma(n_users + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n_users - k + 1.0);
                (ln_choose + k * q.ln() + (n_users - k) * (-q).ln_1p()).exp()
            })
            .collect();
        let p_active = if q >= 1.0 {
            1.0
        } else {
            -(n_users * (-q).ln_1p()).exp_m1()
        };
        TierCountDistribution { q, p, p_active }
    }

    pub fn users(&self) -> u32 {
        (self.p.len() - 1) as u32
    }

    pub fn mean(&self) -> f64 {
        f64::from(self.users()) * self.q
    }
}

/// Expectation of a vector-valued function of a user's position under
/// `dist`, by adaptive quadrature over the region (and the hotspot disc).
pub fn expect_over_positions<F>(
    params: &SystemParams,
    dist: &UserDistribution,
    tol: &[Tolerance],
    f: F,
) -> Result<Vec<f64>>
where
    F: Fn(Position, &mut [f64]),
{
    let (fraction, radius) = match *dist {
        UserDistribution::Uniform => (0.0, 0.0),
        UserDistribution::Hotspot { fraction, radius } => (fraction, radius),
    };
    let mut out = vec![0.0; tol.len()];
    if fraction < 1.0 {
        let uniform = expect_uniform(params, tol, &f)?;
        for (o, u) in out.iter_mut().zip(uniform) {
            *o += (1.0 - fraction) * u;
        }
    }
    if fraction > 0.0 {
        let disc = expect_disc(params, radius, tol, &f)?;
        for (o, d) in out.iter_mut().zip(disc) {
            *o += fraction * d;
        }
    }
    Ok(out)
}

fn expect_uniform<F>(params: &SystemParams, tol: &[Tolerance], f: &F) -> Result<Vec<f64>>
where
    F: Fn(Position, &mut [f64]),
{
    let half = params.region_side_l / 2.0;
    let d = params.base_separation_d;
    let (bm, bu) = (params.breakpoint_macro, params.breakpoint_micro);
    // Bases on piece corners; breakpoint circles roughly bracketed.
    let pieces = Rect::new(-half, half, -half, half).grid(
        &[-bm, 0.0, bm, d - bu, d, d + bu],
        &[-bm.max(bu), 0.0, bm.max(bu)],
    );
    let area = params.region_side_l * params.region_side_l;
    let res = integrate_2d(
        |x, y, out| {
            f(Position::new(x, y), out);
            out.iter_mut().for_each(|v| *v /= area);
        },
        &pieces,
        tol,
        MAX_REGIONS,
    )?;
    Ok(res.values)
}

/// Uniform on the disc around the microcell base, clipped to the region.
fn expect_disc<F>(params: &SystemParams, radius: f64, tol: &[Tolerance], f: &F) -> Result<Vec<f64>>
where
    F: Fn(Position, &mut [f64]),
{
    let center = params.micro_base();
    let half = params.region_side_l / 2.0;
    // Polar coordinates with rho = u * rho_max(theta), so the clipped edge
    // maps to u = 1. The last component is the clipped area.
    let rho_max = |theta: f64| -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let mut m = radius;
        if c > 0.0 {
            m = m.min((half - center.x) / c);
        } else if c < 0.0 {
            m = m.min((-half - center.x) / c);
        }
        if s > 0.0 {
            m = m.min((half - center.y) / s);
        } else if s < 0.0 {
            m = m.min((-half - center.y) / s);
        }
        m
    };
    let mut theta_cuts = vec![FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
    for (cx, cy) in [(half, half), (-half, half), (-half, -half), (half, -half)] {
        theta_cuts.push((cy - center.y).atan2(cx - center.x).rem_euclid(TAU));
    }
    // Where the circle crosses each side.
    for (dist, angle) in [
        (half - center.x, 0.0),
        (half - center.y, FRAC_PI_2),
        (half + center.x, PI),
        (half + center.y, 3.0 * FRAC_PI_2),
    ] {
        if dist < radius {
            let a = (dist / radius).acos();
            theta_cuts.push((angle + a).rem_euclid(TAU));
            theta_cuts.push((angle - a).rem_euclid(TAU));
        }
    }
    let mut u_cuts = vec![];
    if params.breakpoint_micro < radius {
        u_cuts.push(params.breakpoint_micro / radius);
    }

    let dim = tol.len();
    let mut tols = tol.to_vec();
    tols.push(Tolerance::new(1e-9 * radius * radius, 1e-9));
    let pieces = Rect::new(0.0, 1.0, 0.0, TAU).grid(&u_cuts, &theta_cuts);
    let res = integrate_2d(
        |u, theta, out| {
            let m = rho_max(theta);
            let rho = u * m;
            let p = Position::new(center.x + rho * theta.cos(), center.y + rho * theta.sin());
            debug_assert!(dim <= 8);
            let mut local = [0.0; 8];
            let local = &mut local[..dim];
            f(p, local);
            let jac = rho * m;
            for (o, v) in out.iter_mut().zip(local.iter()) {
                *o = jac * v;
            }
            out[dim] = jac;
        },
        &pieces,
        &tols,
        MAX_REGIONS,
    )?;
    let area = res.values[dim];
    Ok(res.values[..dim].iter().map(|v| v / area).collect())
}

/// Probability that a single user selects the microcell:
/// the position average of `Phi(ln(delta T_mu / T_M) / s)` over unshadowed
/// gains, `s` the log-sd of the shadowing difference.
pub fn selection_probability(params: &SystemParams, dist: &UserDistribution) -> Result<f64> {
    params.validate()?;
    dist.validate()?;
    let s = params.ratio_log_sigma();
    let ln_delta = params.delta().ln();
    let v = expect_over_positions(params, dist, &[SELECTION_TOL], |pos, out| {
        out[0] = normal::cdf((ln_delta + log_median_ratio(params, pos)) / s);
    })?;
    Ok(v[0].clamp(0.0, 1.0))
}

/// Tier-conditional moments of the interference quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceMoments {
    /// Single-user microcell selection probability.
    pub q: f64,
    /// `E[I_M]`, `E[I_M^2]` given the user is on the microcell.
    pub i_macro: (f64, f64),
    /// `E[t]`, `E[t^2]` with `t = T_mu / T_M`, given the user is on the macrocell.
    pub term: (f64, f64),
}

/// `E[X^k 1{X < c}]` for `ln X ~ N(m, s^2)`.
fn partial_moment(m: f64, s: f64, k: f64, ln_c: f64) -> f64 {
    normal::scaled_cdf(k * m + 0.5 * k * k * s * s, (ln_c - m - k * s * s) / s)
}

/// First and second moments of `I_M` given Micro and of the per-user term
/// `t` given Macro, with the selection probability.
///
/// At a fixed position, `t = T_mu / T_M` is lognormal with log-sd `s`;
/// Macro truncates `t` below `1 / delta` and Micro truncates `I_M = 1 / t`
/// at `delta`.
pub fn conditional_term_moments(
    params: &SystemParams,
    dist: &UserDistribution,
) -> Result<InterferenceMoments> {
    params.validate()?;
    dist.validate()?;
    let s = params.ratio_log_sigma();
    let ln_delta = params.delta().ln();
    let tol = [SELECTION_TOL, MOMENT_TOL, MOMENT_TOL, MOMENT_TOL, MOMENT_TOL];
    let v = expect_over_positions(params, dist, &tol, |pos, out| {
        let m_t = log_median_ratio(params, pos);
        out[0] = normal::cdf((ln_delta + m_t) / s);
        // ln I_M ~ N(-m_t, s^2), kept when I_M <= delta.
        out[1] = partial_moment(-m_t, s, 1.0, ln_delta);
        out[2] = partial_moment(-m_t, s, 2.0, ln_delta);
        // ln t ~ N(m_t, s^2), kept when t < 1 / delta.
        out[3] = partial_moment(m_t, s, 1.0, -ln_delta);
        out[4] = partial_moment(m_t, s, 2.0, -ln_delta);
    })?;
    let q = v[0].clamp(0.0, 1.0);
    if q < MIN_CONDITIONING {
        return Err(Error::DegenerateConditioning {
            tier: Tier::Micro,
            probability: q,
        });
    }
    if 1.0 - q < MIN_CONDITIONING {
        return Err(Error::DegenerateConditioning {
            tier: Tier::Macro,
            probability: 1.0 - q,
        });
    }
    Ok(InterferenceMoments {
        q,
        i_macro: (v[1] / q, v[2] / q),
        term: (v[3] / (1.0 - q), v[4] / (1.0 - q)),
    })
}

/// Moments of a sum of `count` i.i.d. terms with moments `(e1, e2)`.
pub fn compose_imu_moments(count: u32, e1: f64, e2: f64) -> (f64, f64) {
    let c = f64::from(count);
    (c * e1, c * e2 + c * (c - 1.0) * e1 * e1)
}

/// Conditional law of the DAP rate given `n` DAP users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateDistribution {
    /// All mass at one rate: 0 when the macrocell alone is over its pole
    /// capacity, 1 when there is no cross-tier interference.
    PointMass(f64),
    /// `r = min(Z, 1)` with `ln Z ~ N(mu, sigma^2)`; `sigma` may be 0.
    TruncatedLognormal { mu: f64, sigma: f64 },
}

impl RateDistribution {
    /// `F(r | n)`.
    pub fn cdf(&self, r: f64) -> f64 {
        match *self {
            RateDistribution::PointMass(v) => {
                if r >= v {
                    1.0
                } else {
                    0.0
                }
            }
            RateDistribution::TruncatedLognormal { mu, sigma } => {
                if r >= 1.0 {
                    1.0
                } else if r <= 0.0 {
                    0.0
                } else if sigma == 0.0 {
                    if r >= mu.exp() {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    normal::cdf((r.ln() - mu) / sigma)
                }
            }
        }
    }

    /// `P(r < x | n)`.
    pub fn cdf_left(&self, r: f64) -> f64 {
        match *self {
            RateDistribution::PointMass(v) => {
                if r > v {
                    1.0
                } else {
                    0.0
                }
            }
            RateDistribution::TruncatedLognormal { mu, sigma } => {
                if r > 1.0 {
                    1.0
                } else if r <= 0.0 {
                    0.0
                } else if sigma == 0.0 {
                    if r > mu.exp() {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    normal::cdf((r.ln() - mu) / sigma)
                }
            }
        }
    }

    /// Mass at `r = 1`.
    pub fn full_rate_mass(&self) -> f64 {
        match *self {
            RateDistribution::PointMass(v) => {
                if v >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            RateDistribution::TruncatedLognormal { mu, sigma } => {
                if sigma == 0.0 {
                    if mu >= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    normal::cdf(mu / sigma)
                }
            }
        }
    }

    /// `E[r | n] = E[Z 1{Z < 1}] + P(Z >= 1)`.
    pub fn mean(&self) -> f64 {
        match *self {
            RateDistribution::PointMass(v) => v,
            RateDistribution::TruncatedLognormal { mu, sigma } => {
                if sigma == 0.0 {
                    return mu.exp().min(1.0);
                }
                partial_moment(mu, sigma, 1.0, 0.0) + normal::cdf(mu / sigma)
            }
        }
    }

    /// Locations of atoms.
    pub fn atoms(&self) -> Vec<f64> {
        match *self {
            RateDistribution::PointMass(v) => vec![v],
            RateDistribution::TruncatedLognormal { mu, sigma } => {
                if sigma == 0.0 {
                    vec![mu.exp().min(1.0)]
                } else {
                    vec![1.0]
                }
            }
        }
    }
}

/// Rate law for `n` DAP users, given lognormal fits of `I_M` and (when
/// `n < N`) of `I_mu`.
pub fn rate_cdf_given_n(
    params: &SystemParams,
    n: u32,
    ln_i_macro: &LognormalParams,
    ln_i_micro: Option<&LognormalParams>,
) -> RateDistribution {
    let headroom = params.pole_capacity() - f64::from(params.users) + f64::from(n);
    if headroom <= 0.0 {
        return RateDistribution::PointMass(0.0);
    }
    match ln_i_micro {
        None => RateDistribution::PointMass(1.0),
        Some(imu) => RateDistribution::TruncatedLognormal {
            mu: (headroom / params.gamma_micro).ln() - ln_i_macro.m - imu.m,
            sigma: ln_i_macro.sigma.hypot(imu.sigma),
        },
    }
}

/// Where the interference moments come from.
#[derive(Debug, Clone, Copy, Default)]
pub enum MomentSource<'a> {
    /// Position quadrature of the tier-conditional moments.
    #[default]
    Quadrature,
    /// Simulation estimates, per `n`; counts below the estimate's minimum
    /// fall back to quadrature.
    Simulation(&'a ConditionalMoments),
}

/// The full analytic model at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticModel {
    pub params: SystemParams,
    pub moments: InterferenceMoments,
    pub tier_counts: TierCountDistribution,
    /// Indexed by `n`; entry 0 is unused and set to a point mass at 0.
    pub per_n: Vec<RateDistribution>,
    /// Fitted `ln I_M` and `ln I_mu` per `n` (`None` where undefined).
    pub fits: Vec<(Option<LognormalParams>, Option<LognormalParams>)>,
}

impl AnalyticModel {
    pub fn new(params: &SystemParams, dist: &UserDistribution) -> Result<Self> {
        Self::with_moments(params, dist, MomentSource::Quadrature)
    }

    pub fn with_moments(
        params: &SystemParams,
        dist: &UserDistribution,
        source: MomentSource<'_>,
    ) -> Result<Self> {
        let q = selection_probability(params, dist)?;
        let tier_counts = TierCountDistribution::binomial(params.users, q);
        if q == 0.0 || tier_counts.p_active == 0.0 {
            return Err(Error::NoDapUsers);
        }
        let moments = conditional_term_moments(params, dist)?;
        let quad_im = lognormal_from_moments(moments.i_macro.0, moments.i_macro.1)?;

        let mut per_n = vec![RateDistribution::PointMass(0.0)];
        let mut fits = vec![(None, None)];
        for n in 1..=params.users {
            let n_macro = params.users - n;
            let mut im = quad_im;
            let mut imu_moments = (n_macro > 0)
                .then(|| compose_imu_moments(n_macro, moments.term.0, moments.term.1));
            if let MomentSource::Simulation(sim) = source {
                let e = &sim.i_macro[n as usize];
                if e.available {
                    im = lognormal_from_moments(e.mean, e.second)?;
                }
                let e = &sim.i_micro[n as usize];
                if n_macro > 0 && e.available {
                    imu_moments = Some((e.mean, e.second));
                }
            }
            let imu = imu_moments
                .map(|(e1, e2)| lognormal_from_moments(e1, e2))
                .transpose()?;
            per_n.push(rate_cdf_given_n(params, n, &im, imu.as_ref()));
            fits.push((Some(im), imu));
        }
        Ok(AnalyticModel {
            params: params.clone(),
            moments,
            tier_counts,
            per_n,
            fits,
        })
    }

    /// Distribution of the active user's rate given at least one DAP user.
    pub fn rate_mixture(&self) -> Result<RateMixture<'_>> {
        mixture_rate_cdf(&self.tier_counts, &self.per_n)
    }

    /// Distribution of per-user throughput given at least one DAP user.
    pub fn tau_u_mixture(&self) -> Result<TauUMixture<'_>> {
        user_throughput_cdf(&self.tier_counts, &self.per_n)
    }

    pub fn expected_throughputs(&self) -> Result<Throughputs> {
        expected_throughputs(&self.tier_counts, &self.per_n)
    }
}

fn check_active(pn: &TierCountDistribution) -> Result<()> {
    if pn.p_active <= 0.0 {
        Err(Error::NoDapUsers)
    } else {
        Ok(())
    }
}

/// `F(r) = sum_{n>=1} p_n F(r | n) / (1 - p_0)`.
#[derive(Debug, Clone, Copy)]
pub struct RateMixture<'a> {
    pn: &'a TierCountDistribution,
    per_n: &'a [RateDistribution],
}

pub fn mixture_rate_cdf<'a>(
    pn: &'a TierCountDistribution,
    per_n: &'a [RateDistribution],
) -> Result<RateMixture<'a>> {
    check_active(pn)?;
    Ok(RateMixture { pn, per_n })
}

impl Cdf for RateMixture<'_> {
    fn cdf(&self, r: f64) -> f64 {
        mix(self.pn, |n| self.per_n[n].cdf(r))
    }

    fn cdf_left(&self, r: f64) -> f64 {
        mix(self.pn, |n| self.per_n[n].cdf_left(r))
    }

    fn jumps(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.per_n[1..].iter().flat_map(|d| d.atoms()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

fn mix(pn: &TierCountDistribution, f: impl Fn(usize) -> f64) -> f64 {
    let s: f64 = pn.p.iter().enumerate().skip(1).map(|(n, p)| p * f(n)).sum();
    let active: f64 = pn.p[1..].iter().sum();
    (s / active).clamp(0.0, 1.0)
}

/// `F(t) = sum_{n>=1} p_n F(n t | n) / (1 - p_0)`.
#[derive(Debug, Clone, Copy)]
pub struct TauUMixture<'a> {
    pn: &'a TierCountDistribution,
    per_n: &'a [RateDistribution],
}

pub fn user_throughput_cdf<'a>(
    pn: &'a TierCountDistribution,
    per_n: &'a [RateDistribution],
) -> Result<TauUMixture<'a>> {
    check_active(pn)?;
    Ok(TauUMixture { pn, per_n })
}

impl Cdf for TauUMixture<'_> {
    fn cdf(&self, t: f64) -> f64 {
        mix(self.pn, |n| self.per_n[n].cdf(n as f64 * t))
    }

    fn cdf_left(&self, t: f64) -> f64 {
        mix(self.pn, |n| self.per_n[n].cdf_left(n as f64 * t))
    }

    fn jumps(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .per_n
            .iter()
            .enumerate()
            .skip(1)
            .flat_map(|(n, d)| d.atoms().into_iter().map(move |a| a / n as f64))
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughputs {
    /// Per-user throughput, given at least one DAP user.
    pub tau_u: f64,
    /// DAP utilization, with an empty DAP counted as 0.
    pub tau_d: f64,
}

/// `E[tau_d] = sum_n p_n E[r | n]`; `E[tau_u]` integrates the survival
/// function of the per-user throughput mixture.
pub fn expected_throughputs(
    pn: &TierCountDistribution,
    per_n: &[RateDistribution],
) -> Result<Throughputs> {
    let tau_d = pn
        .p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, p)| p * per_n[n].mean())
        .sum::<f64>();
    let mixture = user_throughput_cdf(pn, per_n)?;
    let breaks = mixture.jumps();
    let res = integrate_1d(
        |t, out| out[0] = 1.0 - mixture.cdf(t),
        0.0,
        1.0,
        &breaks,
        &[THROUGHPUT_TOL],
    )?;
    Ok(Throughputs {
        tau_u: res.values[0],
        tau_d,
    })
}

/// Closed form of `E[tau_u] = sum_{n>=1} p_n E[r | n] / n / (1 - p_0)`.
pub fn mean_tau_u_closed_form(pn: &TierCountDistribution, per_n: &[RateDistribution]) -> f64 {
    mix(pn, |n| per_n[n].mean() / n as f64)
}
