//! Per-link radio chain: 3GPP UMi path loss, RSRP with a load-based power
//! share, thermal noise, interference-free SINR and the clamped linear
//! spectral-efficiency regression.
//!
//! Everything is computed in dB and converted to linear power only for the
//! RSRP/noise ratio.

use crate::geometry::{self, breakpoint_distance, dist2d, dist3d, los_class, Cuboid, LosClass, Point3, Segment};

/// Valid 2D link range of the UMi model, in meters.
pub const MIN_LINK_DISTANCE: f64 = 10.0;
pub const MAX_LINK_DISTANCE: f64 = 5000.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadioError {
    #[error("numerology {0} is not an FR1 numerology (expected 0..=3)")]
    UnsupportedNumerology(u32),
    #[error("2D distance {0} m is outside the UMi model range [10, 5000] m")]
    OutOfModelRange(f64),
    #[error("power share requested for an unloaded cell")]
    ZeroShare,
    #[error("radio parameter `{0}` is invalid")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
}

/// Radio configuration. [`Default`] is the reference deployment: 24 dBm,
/// numerology 1, 133 RBs of 9 subcarriers, MIAB at 5 m / 3.9 GHz and FIAB at
/// 10 m / 3.8 GHz, UEs at 1.5 m.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    pub pt_dbm: f64,
    pub numerology: u32,
    pub rb_per_slot: u32,
    pub subcarriers_per_rb: u32,
    pub scs_base_hz: f64,
    /// Noise power is `10^noise_exponent` W per Hz of occupied bandwidth.
    pub noise_exponent: f64,
    pub q_rx_lev_min_dbm: f64,
    pub se_slope: f64,
    pub se_intercept: f64,
    pub se_max: f64,
    pub f_miab_ghz: f64,
    pub f_fiab_ghz: f64,
    pub h_miab: f64,
    pub h_fiab: f64,
    pub h_ut: f64,
    pub h_e: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            pt_dbm: 24.0,
            numerology: 1,
            rb_per_slot: 133,
            subcarriers_per_rb: 9,
            scs_base_hz: 15_000.0,
            noise_exponent: -19.9,
            q_rx_lev_min_dbm: -122.0,
            se_slope: 0.23,
            se_intercept: 0.21,
            se_max: 6.4,
            f_miab_ghz: 3.9,
            f_fiab_ghz: 3.8,
            h_miab: 5.0,
            h_fiab: 10.0,
            h_ut: 1.5,
            h_e: 1.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), RadioError> {
        let positive = [
            ("pt_dbm", self.pt_dbm),
            ("scs_base_hz", self.scs_base_hz),
            ("se_slope", self.se_slope),
            ("se_intercept", self.se_intercept),
            ("se_max", self.se_max),
            ("f_miab_ghz", self.f_miab_ghz),
            ("f_fiab_ghz", self.f_fiab_ghz),
            ("h_miab", self.h_miab),
            ("h_fiab", self.h_fiab),
            ("h_ut", self.h_ut),
            ("h_e", self.h_e),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(RadioError::InvalidParameter(name));
            }
        }
        if !self.noise_exponent.is_finite() {
            return Err(RadioError::InvalidParameter("noise_exponent"));
        }
        if !self.q_rx_lev_min_dbm.is_finite() {
            return Err(RadioError::InvalidParameter("q_rx_lev_min_dbm"));
        }
        if self.rb_per_slot == 0 {
            return Err(RadioError::InvalidParameter("rb_per_slot"));
        }
        if self.subcarriers_per_rb == 0 {
            return Err(RadioError::InvalidParameter("subcarriers_per_rb"));
        }
        for (name, h) in [("h_miab", self.h_miab), ("h_fiab", self.h_fiab), ("h_ut", self.h_ut)] {
            if h <= self.h_e {
                return Err(RadioError::InvalidParameter(name));
            }
        }
        self.delta_hz().map(|_| ())
    }

    /// Frequency span of one resource block, in Hz.
    pub fn delta_hz(&self) -> Result<f64, RadioError> {
        if self.numerology > 3 {
            return Err(RadioError::UnsupportedNumerology(self.numerology));
        }
        Ok(f64::from(1u32 << self.numerology) * self.scs_base_hz * f64::from(self.subcarriers_per_rb))
    }

    pub fn noise_w(&self) -> Result<f64, RadioError> {
        Ok(noise_power_w(self.noise_exponent, f64::from(self.rb_per_slot), self.delta_hz()?))
    }

    /// Clamped regression `clamp(slope * sinr - intercept, 0, se_max)`.
    pub fn spectral_efficiency(&self, sinr_db: f64) -> f64 {
        (self.se_slope * sinr_db - self.se_intercept).clamp(0.0, self.se_max)
    }
}

/// Resource-block width `2^mu * 15 kHz * 9` for FR1 numerology `mu`.
pub fn delta_fr1(mu: u32) -> Result<f64, RadioError> {
    RadioParams { numerology: mu, ..RadioParams::default() }.delta_hz()
}

/// UMi LoS path loss in dB, with the breakpoint at `dbp`.
pub fn pathloss_los_db(d2d: f64, d3d: f64, dbp: f64, f_ghz: f64, h_bs: f64, h_ut: f64) -> Result<f64, RadioError> {
    if !(MIN_LINK_DISTANCE..=MAX_LINK_DISTANCE).contains(&d2d) {
        return Err(RadioError::OutOfModelRange(d2d));
    }
    let freq = 20.0 * libm::log10(f_ghz);
    Ok(if d2d <= dbp {
        32.4 + 21.0 * libm::log10(d3d) + freq
    } else {
        let dh = h_bs - h_ut;
        32.4 + 40.0 * libm::log10(d3d) + freq - 9.5 * libm::log10(dbp * dbp + dh * dh)
    })
}

/// UMi NLoS path loss: the larger of the LoS loss and the NLoS fit.
pub fn pathloss_nlos_db(d3d: f64, f_ghz: f64, h_ut: f64, los_pl_db: f64) -> f64 {
    let nlos = 22.4 + 35.3 * libm::log10(d3d) + 21.3 * libm::log10(f_ghz) - 0.3 * (h_ut - 1.5);
    los_pl_db.max(nlos)
}

/// Thermal noise `10^exponent * B * delta` in W.
pub fn noise_power_w(noise_exponent: f64, rb_per_slot: f64, delta_hz: f64) -> f64 {
    libm::pow(10.0, noise_exponent) * (rb_per_slot * delta_hz)
}

/// Received power when the transmitter splits its power over `share` links.
pub fn rsrp_w(pt_dbm: f64, share: u32, pl_db: f64) -> Result<f64, RadioError> {
    if share == 0 {
        return Err(RadioError::ZeroShare);
    }
    let full = dbm_to_w(pt_dbm) / libm::pow(10.0, pl_db / 10.0);
    Ok(full / f64::from(share))
}

pub fn sinr_db(rsrp_w: f64, noise_w: f64) -> f64 {
    10.0 * libm::log10(rsrp_w / noise_w)
}

/// Spectral efficiency for the reference regression (0.23, 0.21, max 6.4).
pub fn spectral_efficiency(sinr_db: f64) -> f64 {
    RadioParams::default().spectral_efficiency(sinr_db)
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

pub fn w_to_dbm(w: f64) -> f64 {
    10.0 * libm::log10(w) + 30.0
}

/// Derived quantities of one transmitter-receiver link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub los: LosClass,
    pub d2d: f64,
    pub d3d: f64,
    pub pl_db: f64,
    pub rsrp_w: f64,
    pub rsrp_dbm: f64,
    pub sinr_db: f64,
    pub se: f64,
    pub above_rsrp_floor: bool,
}

/// Full chain for a link. Heights come from the `z` of each endpoint; the
/// transmitter is the base-station side of the breakpoint formula.
pub fn link_budget(
    tx: Point3,
    rx: Point3,
    f_ghz: f64,
    share: u32,
    params: &RadioParams,
    obstacles: &[Cuboid],
) -> Result<LinkBudget, RadioError> {
    let d2d = dist2d(tx, rx);
    if !(MIN_LINK_DISTANCE..=MAX_LINK_DISTANCE).contains(&d2d) {
        return Err(RadioError::OutOfModelRange(d2d));
    }
    let los = los_class(&Segment::new(tx, rx)?, obstacles);
    budget_for(d2d, dist3d(tx, rx), tx.z, rx.z, los, f_ghz, share, params)
}

/// Chain from already-known distances and LoS class.
#[allow(clippy::too_many_arguments)]
pub(crate) fn budget_for(
    d2d: f64,
    d3d: f64,
    h_bs: f64,
    h_ut: f64,
    los: LosClass,
    f_ghz: f64,
    share: u32,
    params: &RadioParams,
) -> Result<LinkBudget, RadioError> {
    let dbp = breakpoint_distance(h_bs, h_ut, params.h_e, f_ghz)?;
    let los_pl = pathloss_los_db(d2d, d3d, dbp, f_ghz, h_bs, h_ut)?;
    let pl_db = match los {
        LosClass::Los => los_pl,
        LosClass::Nlos => pathloss_nlos_db(d3d, f_ghz, h_ut, los_pl),
    };
    let rsrp = rsrp_w(params.pt_dbm, share, pl_db)?;
    let rsrp_dbm = w_to_dbm(rsrp);
    let sinr = sinr_db(rsrp, params.noise_w()?);
    Ok(LinkBudget {
        los,
        d2d,
        d3d,
        pl_db,
        rsrp_w: rsrp,
        rsrp_dbm,
        sinr_db: sinr,
        se: params.spectral_efficiency(sinr),
        above_rsrp_floor: rsrp_dbm >= params.q_rx_lev_min_dbm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rb_width() {
        assert_eq!(delta_fr1(1).unwrap(), 270_000.0);
        assert_eq!(delta_fr1(0).unwrap(), 135_000.0);
        assert_relative_eq!(133.0 * delta_fr1(1).unwrap(), 35.91e6, max_relative = 1e-12);
        assert_eq!(delta_fr1(4), Err(RadioError::UnsupportedNumerology(4)));
    }

    #[test]
    fn los_branches() {
        assert_relative_eq!(pathloss_los_db(50.0, 100.0, 104.0, 3.9, 5.0, 1.5).unwrap(), 86.221_292_140_53, max_relative = 1e-9);
        assert_relative_eq!(pathloss_los_db(499.0, 500.0, 104.0, 3.9, 5.0, 1.5).unwrap(), 113.851_788_710_03, max_relative = 1e-9);
        assert_eq!(pathloss_los_db(5.0, 6.0, 104.0, 3.9, 5.0, 1.5), Err(RadioError::OutOfModelRange(5.0)));
        assert!(pathloss_los_db(5000.1, 5000.1, 104.0, 3.9, 5.0, 1.5).is_err());
    }

    #[test]
    fn nlos_is_max() {
        assert_relative_eq!(pathloss_nlos_db(100.0, 3.9, 1.5, 86.22), 105.589_676_129_66, max_relative = 1e-9);
        assert_eq!(pathloss_nlos_db(100.0, 3.9, 1.5, 200.0), 200.0);
        // Height correction vanishes at the reference height.
        let at_ref = pathloss_nlos_db(100.0, 3.9, 1.5, 0.0);
        assert_relative_eq!(at_ref, 22.4 + 35.3 * 2.0 + 21.3 * libm::log10(3.9), max_relative = 1e-15);
    }

    #[test]
    fn noise() {
        let n = noise_power_w(-19.9, 133.0, 270e3);
        assert_relative_eq!(n, 4.520_801_153_752_869e-13, max_relative = 1e-9);
        assert!((10.0 * libm::log10(n) + 123.45).abs() < 0.1);
        assert_relative_eq!(noise_power_w(-19.9, 133.0, 540e3), 2.0 * n, max_relative = 1e-12);
        assert_relative_eq!(noise_power_w(-19.9, 1.0, 1.0), libm::pow(10.0, -19.9), max_relative = 1e-15);
    }

    #[test]
    fn rsrp_and_sinr() {
        let r = rsrp_w(24.0, 1, 86.221_292_140_53).unwrap();
        assert_relative_eq!(r, 5.996_126_491_491_843e-10, max_relative = 1e-9);
        assert_relative_eq!(rsrp_w(24.0, 2, 86.221_292_140_53).unwrap(), r / 2.0, max_relative = 1e-15);
        assert_eq!(rsrp_w(24.0, 0, 80.0), Err(RadioError::ZeroShare));
        assert_relative_eq!(rsrp_w(24.0, 1, 105.589_676_129_66).unwrap(), 6.934_775_194_119_603e-12, max_relative = 1e-9);
        assert_eq!(sinr_db(1e-12, 1e-12), 0.0);
    }

    #[test]
    fn se_clamps() {
        assert_eq!(spectral_efficiency(31.2), 6.4);
        assert_eq!(spectral_efficiency(0.21 / 0.23), 0.0);
        assert_eq!(spectral_efficiency(-10.0), 0.0);
        assert_relative_eq!(spectral_efficiency(11.858_169_819_074_806), 2.517_379_058_387_205_8, max_relative = 1e-12);
    }

    #[test]
    fn fiab_link_budget() {
        let p = RadioParams::default();
        let fiab = Point3::new(0.0, 0.0, 10.0);
        let ue = Point3::new(100.0, 0.0, 1.5);
        let los = link_budget(fiab, ue, p.f_fiab_ghz, 1, &p, &[]).unwrap();
        assert_eq!(los.los, LosClass::Los);
        assert_relative_eq!(los.pl_db, 86.028_500_147_832_02, max_relative = 1e-9);
        assert_eq!(los.se, 6.4);
        assert!(los.above_rsrp_floor);

        let wall = Cuboid::axis_aligned(Point3::new(40.0, -20.0, 0.0), Point3::new(50.0, 20.0, 15.0)).unwrap();
        let nlos = link_budget(fiab, ue, p.f_fiab_ghz, 1, &p, &[wall]).unwrap();
        assert_eq!(nlos.los, LosClass::Nlos);
        assert!(nlos.pl_db > los.pl_db);
        assert!(nlos.se < los.se);
        assert_relative_eq!(nlos.se, 2.559_952_714_974_249_6, max_relative = 1e-9);
    }

    #[test]
    fn rsrp_floor_flag() {
        let p = RadioParams::default();
        let wall = Cuboid::axis_aligned(Point3::new(40.0, -20.0, 0.0), Point3::new(50.0, 20.0, 15.0)).unwrap();
        let fiab = Point3::new(0.0, 0.0, 10.0);
        let far = link_budget(fiab, Point3::new(4000.0, 0.0, 1.5), p.f_fiab_ghz, 5, &p, &[wall]).unwrap();
        assert!(far.rsrp_dbm < -122.0);
        assert!(!far.above_rsrp_floor);
        assert!(link_budget(fiab, Point3::new(5.0, 0.0, 1.5), p.f_fiab_ghz, 1, &p, &[]).is_err());
    }

    #[test]
    fn default_params_validate() {
        assert!(RadioParams::default().validate().is_ok());
        let bad = RadioParams { h_ut: 1.0, ..RadioParams::default() };
        assert_eq!(bad.validate(), Err(RadioError::InvalidParameter("h_ut")));
    }

    proptest! {
        #[test]
        fn pathloss_monotone_within_branch(d in 10.0..4000.0f64, step in 0.01..100.0f64, f in 0.5..6.0f64) {
            let dbp = 228.0;
            let (a, b) = (d, d + step);
            if b <= dbp || a > dbp {
                let pa = pathloss_los_db(a, a, dbp, f, 10.0, 1.5).unwrap();
                let pb = pathloss_los_db(b.min(5000.0), b.min(5000.0), dbp, f, 10.0, 1.5).unwrap();
                prop_assert!(pb >= pa);
            }
            let na = pathloss_nlos_db(a, f, 1.5, 0.0);
            let nb = pathloss_nlos_db(b, f, 1.5, 0.0);
            prop_assert!(nb > na);
            let los = pathloss_los_db(a, a, dbp, f, 10.0, 1.5).unwrap();
            prop_assert!(pathloss_nlos_db(a, f, 1.5, los) >= los);
        }

        #[test]
        fn se_bounded(sinr in -1e6..1e6f64) {
            let se = spectral_efficiency(sinr);
            prop_assert!((0.0..=6.4).contains(&se));
        }

        #[test]
        fn rsrp_share_linearity(pt in -10.0..40.0f64, k in 1u32..100, pl in 40.0..200.0f64) {
            let one = rsrp_w(pt, 1, pl).unwrap();
            prop_assert_eq!(rsrp_w(pt, k, pl).unwrap(), one / f64::from(k));
        }

        #[test]
        fn sinr_round_trip(pt in -10.0..40.0f64, pl in 40.0..200.0f64, n in 1e-16..1e-9f64) {
            let s = sinr_db(rsrp_w(pt, 1, pl).unwrap(), n);
            prop_assert!((s - ((pt - 30.0) - pl - 10.0 * libm::log10(n))).abs() < 1e-9);
        }

        #[test]
        fn obstacles_never_help(x in 10.0..400.0f64, y in -200.0..200.0f64, ox in 0.0..300.0f64, oy in -150.0..150.0f64) {
            let p = RadioParams::default();
            let fiab = Point3::new(0.0, 0.0, 10.0);
            let ue = Point3::new(x, y, 1.5);
            let obs = Cuboid::axis_aligned(Point3::new(ox, oy, 0.0), Point3::new(ox + 20.0, oy + 20.0, 12.0)).unwrap();
            let clear = link_budget(fiab, ue, 3.8, 3, &p, &[]).unwrap();
            let shadowed = link_budget(fiab, ue, 3.8, 3, &p, &[obs]).unwrap();
            prop_assert!(shadowed.pl_db >= clear.pl_db);
            prop_assert!(shadowed.se <= clear.se);
        }
    }
}
