//! Dual-slope lognormal path gain, user placement and base selection.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::params::{db_to_linear, Position, SystemParams, Tier, UserDistribution};
use crate::{Error, Result};

/// Distances below this are treated as this value; the gain law is singular at 0.
pub const MIN_DISTANCE: f64 = 1.0;

/// Path gain at distance `d` with breakpoint `b`, gain constant `h` and
/// shadowing `chi_db`: exponent 2 inside the breakpoint, 4 beyond it.
pub fn path_gain(d: f64, b: f64, h: f64, chi_db: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid("distance", format!("must be > 0, got {d}")));
    }
    if !(b > 0.0) {
        return Err(Error::invalid("breakpoint", format!("must be > 0, got {b}")));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("gain_constant", format!("must be > 0, got {h}")));
    }
    Ok(median_gain(d, b, h) * db_to_linear(chi_db))
}

/// Path gain without shadowing. Callers guarantee positive arguments.
pub(crate) fn median_gain(d: f64, b: f64, h: f64) -> f64 {
    let ratio = b / d;
    let sq = ratio * ratio;
    if d <= b {
        h * sq
    } else {
        h * sq * sq
    }
}

/// Natural log of the unshadowed gain ratio T_mu / T_M at `pos`.
pub(crate) fn log_median_ratio(params: &SystemParams, pos: Position) -> f64 {
    let (d_macro, d_micro) = clamped_distances(params, pos);
    let g_macro = median_gain(d_macro, params.breakpoint_macro, params.gain_macro());
    let g_micro = median_gain(d_micro, params.breakpoint_micro, params.gain_micro());
    g_micro.ln() - g_macro.ln()
}

fn clamped_distances(params: &SystemParams, pos: Position) -> (f64, f64) {
    let d_macro = pos.distance_to(Position::new(0.0, 0.0)).max(MIN_DISTANCE);
    let d_micro = pos.distance_to(params.micro_base()).max(MIN_DISTANCE);
    (d_macro, d_micro)
}

/// Macro iff `t_macro > delta * t_micro`; ties go to the microcell.
///
/// The comparison is made on the ratio so that a Micro user's `t_macro /
/// t_micro` never exceeds `delta` after rounding.
pub fn select_base(t_macro: f64, t_micro: f64, delta: f64) -> Tier {
    if t_macro / t_micro > delta {
        Tier::Macro
    } else {
        Tier::Micro
    }
}

/// One user's snapshot: where it is, how it is shadowed, and where it attaches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserRealization {
    pub position: Position,
    pub chi_macro_db: f64,
    pub chi_micro_db: f64,
    pub gain_macro: f64,
    pub gain_micro: f64,
    pub tier: Tier,
}

impl UserRealization {
    /// Builds the realization for a known position and shadowing.
    pub fn from_parts(
        params: &SystemParams,
        position: Position,
        chi_macro_db: f64,
        chi_micro_db: f64,
    ) -> Self {
        let (d_macro, d_micro) = clamped_distances(params, position);
        let gain_macro = median_gain(d_macro, params.breakpoint_macro, params.gain_macro())
            * db_to_linear(chi_macro_db);
        let gain_micro = median_gain(d_micro, params.breakpoint_micro, params.gain_micro())
            * db_to_linear(chi_micro_db);
        UserRealization {
            position,
            chi_macro_db,
            chi_micro_db,
            gain_macro,
            gain_micro,
            tier: select_base(gain_macro, gain_micro, params.delta()),
        }
    }
}

/// Draws a position from `dist` inside the region.
pub fn sample_position<R: Rng + ?Sized>(
    params: &SystemParams,
    dist: &UserDistribution,
    rng: &mut R,
) -> Position {
    let half = params.region_side_l / 2.0;
    let uniform = |rng: &mut R| {
        Position::new(
            rng.random_range(-half..=half),
            rng.random_range(-half..=half),
        )
    };
    match *dist {
        UserDistribution::Uniform => uniform(rng),
        UserDistribution::Hotspot { fraction, radius } => {
            if rng.random::<f64>() >= fraction {
                return uniform(rng);
            }
            let center = params.micro_base();
            loop {
                let rho = radius * rng.random::<f64>().sqrt();
                let theta = std::f64::consts::TAU * rng.random::<f64>();
                let p = Position::new(center.x + rho * theta.cos(), center.y + rho * theta.sin());
                if p.in_square(params.region_side_l) {
                    return p;
                }
            }
        }
    }
}

/// Draws one user: position from `dist`, independent zero-mean Gaussian
/// shadowing (dB) towards each base, then the tier by the selection rule.
pub fn sample_user<R: Rng + ?Sized>(
    params: &SystemParams,
    dist: &UserDistribution,
    rng: &mut R,
) -> UserRealization {
    let position = sample_position(params, dist, rng);
    let z_macro: f64 = StandardNormal.sample(rng);
    let z_micro: f64 = StandardNormal.sample(rng);
    UserRealization::from_parts(
        params,
        position,
        params.shadow_sigma_macro_db * z_macro,
        params.shadow_sigma_micro_db * z_micro,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_gain_examples() {
        assert_eq!(path_gain(100.0, 100.0, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(path_gain(200.0, 100.0, 1.0, 0.0).unwrap(), 0.0625);
        assert!((path_gain(50.0, 100.0, 2.0, 10.0).unwrap() - 80.0).abs() < 1e-12);
    }

    #[test]
    fn path_gain_rejects_bad_input() {
        assert!(path_gain(0.0, 100.0, 1.0, 0.0).is_err());
        assert!(path_gain(10.0, -1.0, 1.0, 0.0).is_err());
        assert!(path_gain(10.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn path_gain_continuous_at_breakpoint() {
        let b = 100.0;
        let below = path_gain(b * (1.0 - 1e-12), b, 3.0, 2.0).unwrap();
        let above = path_gain(b * (1.0 + 1e-12), b, 3.0, 2.0).unwrap();
        assert!((below - above).abs() < 1e-9);
    }

    #[test]
    fn select_base_examples() {
        assert_eq!(select_base(1.0, 1.0, 0.5), Tier::Macro);
        assert_eq!(select_base(1.0, 1.0, 2.0), Tier::Micro);
        assert_eq!(select_base(0.5, 1.0, 0.5), Tier::Micro);
    }

    #[test]
    fn equidistant_user_gain_ratio_is_h() {
        let p = SystemParams::table1();
        // Midpoint between the bases, both breakpoints 100 m.
        let u = UserRealization::from_parts(&p, Position::new(150.0, 40.0), 3.0, 3.0);
        assert!((u.gain_macro / u.gain_micro - p.gain_ratio_h).abs() < 1e-12);
    }

    #[test]
    fn distance_zero_is_clamped() {
        let p = SystemParams::table1();
        let u = UserRealization::from_parts(&p, p.micro_base(), 0.0, 0.0);
        assert!(u.gain_micro.is_finite());
        assert_eq!(u.gain_micro, path_gain(MIN_DISTANCE, 100.0, 1.0, 0.0).unwrap());
        assert_eq!(u.tier, Tier::Micro);
    }

    #[test]
    fn uniform_positions_have_uniform_marginals() {
        let p = SystemParams::table1();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 40_000;
        let mut below_x = 0;
        let mut below_y = 0;
        for _ in 0..n {
            let pos = sample_position(&p, &UserDistribution::Uniform, &mut rng);
            assert!(pos.in_square(p.region_side_l));
            // P(x < 250) = 0.75 on [-500, 500].
            if pos.x < 250.0 {
                below_x += 1;
            }
            if pos.y < -250.0 {
                below_y += 1;
            }
        }
        let fx = below_x as f64 / n as f64;
        let fy = below_y as f64 / n as f64;
        // 5 standard errors.
        assert!((fx - 0.75).abs() < 5.0 * (0.75f64 * 0.25 / n as f64).sqrt());
        assert!((fy - 0.25).abs() < 5.0 * (0.75f64 * 0.25 / n as f64).sqrt());
    }

    #[test]
    fn full_hotspot_stays_on_disc() {
        let p = SystemParams::table1();
        let dist = UserDistribution::Hotspot { fraction: 1.0, radius: 50.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5_000 {
            let pos = sample_position(&p, &dist, &mut rng);
            assert!(pos.distance_to(p.micro_base()) <= 50.0 + 1e-9);
        }
    }

    #[test]
    fn hotspot_disc_is_clipped_to_region() {
        let mut p = SystemParams::table1();
        p.base_separation_d = 450.0;
        let dist = UserDistribution::Hotspot { fraction: 1.0, radius: 200.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5_000 {
            assert!(sample_position(&p, &dist, &mut rng).in_square(p.region_side_l));
        }
    }

    #[test]
    fn raising_zeta_only_moves_users_to_micro() {
        let base = SystemParams::table1();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2_000 {
            let u = sample_user(&base, &UserDistribution::Uniform, &mut rng);
            let mut prev = Tier::Macro;
            for zeta in [1e-4, 1e-3, 5e-3, 1e-2, 0.1, 1.0] {
                let tier = UserRealization::from_parts(
                    &base.with_zeta(zeta),
                    u.position,
                    u.chi_macro_db,
                    u.chi_micro_db,
                )
                .tier;
                assert!(!(prev == Tier::Micro && tier == Tier::Macro));
                prev = tier;
            }
        }
    }

    proptest! {
        #[test]
        fn path_gain_decreasing_in_distance(d in 1.0f64..2000.0, step in 1e-3f64..100.0, chi in -20.0f64..20.0) {
            let a = path_gain(d, 100.0, 2.0, chi).unwrap();
            let b = path_gain(d + step, 100.0, 2.0, chi).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn path_gain_log_linear_in_shadowing(d in 1.0f64..2000.0, chi in -20.0f64..20.0, dchi in -10.0f64..10.0) {
            let a = path_gain(d, 100.0, 1.0, chi).unwrap().log10();
            let b = path_gain(d, 100.0, 1.0, chi + dchi).unwrap().log10();
            prop_assert!((b - a - dchi / 10.0).abs() < 1e-9);
        }

        #[test]
        fn selection_is_scale_free(tm in 1e-8f64..1e3, tmu in 1e-8f64..1e3, delta in 1e-4f64..10.0, c in 1e-3f64..1e3) {
            // Ratios within rounding of the threshold may legitimately flip.
            prop_assume!(((tm / tmu) / delta - 1.0).abs() > 1e-12);
            prop_assert_eq!(select_base(tm, tmu, delta), select_base(c * tm, c * tmu, delta));
        }
    }
}
