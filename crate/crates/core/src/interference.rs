//! Cross-tier interference, feasibility and the maximum DAP rate.
//!
//! Powers and rates are normalized: `r = R_mu / W`, so the microcell
//! processing gain is `1 / r`, and the macrocell one is `G = W / R_M`.

use crate::model::UserRealization;
use crate::params::SystemParams;
use crate::{Error, Result, Tier};

/// Single-cell pole capacity `K = G / gamma_M + 1`.
pub fn pole_capacity(spreading_factor_g: f64, gamma_macro: f64) -> f64 {
    spreading_factor_g / gamma_macro + 1.0
}

/// Interference the active DAP user puts into the macrocell base,
/// normalized by its own power-controlled received level: `T_M / T_mu`.
pub fn interference_macro(dap_user: &UserRealization) -> Result<f64> {
    if dap_user.tier != Tier::Micro {
        return Err(Error::WrongTier {
            expected: Tier::Micro,
            actual: dap_user.tier,
        });
    }
    Ok(dap_user.gain_macro / dap_user.gain_micro)
}

/// Per-user term `T_mu,k / T_M,k` of the macrocell users' interference
/// into the microcell base.
pub(crate) fn macro_user_term(user: &UserRealization) -> f64 {
    user.gain_micro / user.gain_macro
}

/// Total interference from macrocell users into the microcell base.
pub fn interference_micro<'a, I>(macro_users: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a UserRealization>,
{
    macro_users.into_iter().try_fold(0.0, |acc, u| {
        if u.tier != Tier::Macro {
            return Err(Error::WrongTier {
                expected: Tier::Macro,
                actual: u.tier,
            });
        }
        Ok(acc + macro_user_term(u))
    })
}

/// Largest normalized rate the active DAP user can sustain with `n` of the
/// `total_users` on the microcell, capped at 1 (spreading factor of one).
///
/// Returns 0 when the macrocell load alone is infeasible (`K - N + n <= 0`)
/// and 1 when there is no cross-tier coupling.
pub fn max_rate(
    pole_capacity: f64,
    total_users: u32,
    n: u32,
    gamma_micro: f64,
    i_macro: f64,
    i_micro: f64,
) -> f64 {
    debug_assert!(n >= 1 && n <= total_users);
    let headroom = pole_capacity - f64::from(total_users) + f64::from(n);
    if headroom <= 0.0 {
        return 0.0;
    }
    let coupling = gamma_micro * i_macro * i_micro;
    if coupling <= 0.0 {
        return 1.0;
    }
    (headroom / coupling).min(1.0)
}

/// Whether both SINR targets can be met with positive powers, i.e.
/// `(K - N_M) / r - gamma_mu * I_M * I_mu >= 0`.
pub fn feasible(
    pole_capacity: f64,
    macro_users: u32,
    rate: f64,
    gamma_micro: f64,
    i_macro: f64,
    i_micro: f64,
) -> bool {
    (pole_capacity - f64::from(macro_users)) / rate - gamma_micro * i_macro * i_micro >= 0.0
}

/// Received powers meeting both SINR targets with equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSolution {
    /// Per macrocell user, at the macrocell base.
    pub macro_power: f64,
    /// Active DAP user, at the microcell base.
    pub micro_power: f64,
}

/// Solves the two SINR equations at equality directly:
///
/// ```text
/// G S_M        = gamma_M [(N_M - 1) S_M + I_M S_mu + eta W]
/// (1 / r) S_mu = gamma_mu [I_mu S_M + eta W]
/// ```
///
/// Returns `None` when the system is singular or either power is not
/// strictly positive. This is independent of [`feasible`] and serves as its
/// oracle.
pub fn solve_powers(
    params: &SystemParams,
    macro_users: u32,
    rate: f64,
    i_macro: f64,
    i_micro: f64,
) -> Option<PowerSolution> {
    let SystemParams {
        spreading_factor_g,
        gamma_macro,
        gamma_micro,
        noise_power,
        ..
    } = *params;
    // a11 S_M + a12 S_mu = b1
    // a21 S_M + a22 S_mu = b2
    let a11 = spreading_factor_g - gamma_macro * (f64::from(macro_users) - 1.0);
    let a12 = -gamma_macro * i_macro;
    let a21 = -gamma_micro * i_micro;
    let a22 = 1.0 / rate;
    let b1 = gamma_macro * noise_power;
    let b2 = gamma_micro * noise_power;

    let det = a11 * a22 - a12 * a21;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let macro_power = (b1 * a22 - a12 * b2) / det;
    let micro_power = (a11 * b2 - a21 * b1) / det;
    (macro_power > 0.0 && micro_power > 0.0).then_some(PowerSolution {
        macro_power,
        micro_power,
    })
}
