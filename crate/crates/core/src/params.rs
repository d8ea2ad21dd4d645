//! Deployment, propagation and load parameters.

use std::fmt;

use crate::{Error, Result};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Which base a user is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    Macro,
    Micro,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tier::Macro => f.write_str("macrocell"),
            Tier::Micro => f.write_str("microcell"),
        }
    }
}

/// Full parameterization of the two-tier uplink.
///
/// SINR targets are stored linear. The macrocell base sits at the origin and
/// the microcell base at `(base_separation_d, 0)`; the square region is
/// centered on the macrocell base.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// W / R_M.
    pub spreading_factor_g: f64,
    pub gamma_macro: f64,
    pub gamma_micro: f64,
    pub region_side_l: f64,
    pub base_separation_d: f64,
    pub breakpoint_macro: f64,
    pub breakpoint_micro: f64,
    /// Shadowing standard deviations, dB.
    pub shadow_sigma_macro_db: f64,
    pub shadow_sigma_micro_db: f64,
    /// H_M / H_mu.
    pub gain_ratio_h: f64,
    /// Normalized desensitivity; the selection threshold is `zeta * h`.
    pub zeta: f64,
    pub users: u32,
    /// Received noise power in bandwidth W, normalized.
    pub noise_power: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::table1()
    }
}

impl SystemParams {
    /// Reference deployment: G = 128, 7 dB / 8.45 dB SINR targets, 1 km
    /// square, 300 m base separation, 100 m breakpoints, 8 dB / 4 dB
    /// shadowing, h = 10, with N = 26 users at zeta = 0.005.
    pub fn table1() -> Self {
        SystemParams {
            spreading_factor_g: 128.0,
            gamma_macro: db_to_linear(7.0),
            gamma_micro: db_to_linear(8.45),
            region_side_l: 1000.0,
            base_separation_d: 300.0,
            breakpoint_macro: 100.0,
            breakpoint_micro: 100.0,
            shadow_sigma_macro_db: 8.0,
            shadow_sigma_micro_db: 4.0,
            gain_ratio_h: 10.0,
            zeta: 0.005,
            users: 26,
            noise_power: 1.0,
        }
    }

    pub fn with_zeta(&self, zeta: f64) -> Self {
        SystemParams {
            zeta,
            ..self.clone()
        }
    }

    pub fn with_users(&self, users: u32) -> Self {
        SystemParams {
            users,
            ..self.clone()
        }
    }

    /// Desensitivity threshold delta = zeta * h.
    pub fn delta(&self) -> f64 {
        self.zeta * self.gain_ratio_h
    }

    /// Gain constant of the macrocell base. The microcell constant is 1.
    pub fn gain_macro(&self) -> f64 {
        self.gain_ratio_h
    }

    pub fn gain_micro(&self) -> f64 {
        1.0
    }

    pub fn pole_capacity(&self) -> f64 {
        crate::interference::pole_capacity(self.spreading_factor_g, self.gamma_macro)
    }

    pub fn micro_base(&self) -> Position {
        Position::new(self.base_separation_d, 0.0)
    }

    /// Log-domain standard deviation of a gain ratio T_mu / T_M, in nepers.
    pub fn ratio_log_sigma(&self) -> f64 {
        let db = self.shadow_sigma_macro_db.hypot(self.shadow_sigma_micro_db);
        db * std::f64::consts::LN_10 / 10.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("spreading_factor_g", self.spreading_factor_g),
            ("gamma_macro", self.gamma_macro),
            ("gamma_micro", self.gamma_micro),
            ("region_side_l", self.region_side_l),
            ("base_separation_d", self.base_separation_d),
            ("breakpoint_macro", self.breakpoint_macro),
            ("breakpoint_micro", self.breakpoint_micro),
            ("gain_ratio_h", self.gain_ratio_h),
            ("zeta", self.zeta),
            ("noise_power", self.noise_power),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {value}")));
            }
        }
        for (name, value) in [
            ("shadow_sigma_macro_db", self.shadow_sigma_macro_db),
            ("shadow_sigma_micro_db", self.shadow_sigma_micro_db),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")));
            }
        }
        if self.shadow_sigma_macro_db == 0.0 && self.shadow_sigma_micro_db == 0.0 {
            return Err(Error::invalid(
                "shadow_sigma_macro_db",
                "at least one shadowing deviation must be positive",
            ));
        }
        if self.users == 0 {
            return Err(Error::invalid("users", "must be at least 1"));
        }
        if self.base_separation_d >= self.region_side_l / 2.0 {
            return Err(Error::invalid(
                "base_separation_d",
                format!(
                    "microcell base must lie inside the region: {} >= L/2 = {}",
                    self.base_separation_d,
                    self.region_side_l / 2.0
                ),
            ));
        }
        Ok(())
    }
}

/// A point in the plane, meters, origin at the macrocell base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance_to(&self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn in_square(&self, side: f64) -> bool {
        let half = side / 2.0;
        self.x.abs() <= half && self.y.abs() <= half
    }
}

/// Spatial law of user positions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum UserDistribution {
    /// Uniform over the square region.
    #[default]
    Uniform,
    /// With probability `fraction` a user is uniform on a disc of `radius`
    /// around the microcell base (clipped to the region), otherwise uniform
    /// over the region.
    Hotspot { fraction: f64, radius: f64 },
}

impl UserDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            UserDistribution::Uniform => Ok(()),
            UserDistribution::Hotspot { fraction, radius } => {
                if !(0.0..=1.0).contains(&fraction) {
                    return Err(Error::invalid(
                        "hotspot_fraction",
                        format!("must lie in [0, 1], got {fraction}"),
                    ));
                }
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::invalid(
                        "hotspot_radius",
                        format!("must be finite and > 0, got {radius}"),
                    ));
                }
                Ok(())
            }
        }
    }
}
