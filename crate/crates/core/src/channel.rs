//! Closed-form received powers and SSNR.
//!
//! Two forms are provided. The full form works in watts: every dynamic path
//! (direct target echo plus wall-relayed echoes) is summed coherently and
//! divided by the interference power `gamma * P_LoS + b`. The simplified form
//! drops the constants and keeps only the distance dependence, weighted by
//! `alpha1 = R^2 / 4pi` and `alpha2 = R / sqrt(pi)`.
//!
//! With `b = 0` the two are related by a constant factor,
//! `full = sigma / (4 pi gamma) * simplified`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{PathSet, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite")]
    NonFinite { name: &'static str },
    #[error("wall reflection coefficient must lie in [0, 1], got {0}")]
    ReflectionOutOfRange(f64),
    #[error("interference floor must be non-negative, got {0}")]
    NegativeFloor(f64),
    #[error("path set is singular (target on a device)")]
    Singular,
    #[error("path power must be non-negative, got {0}")]
    NegativePower(f64),
    #[error("interference power is zero")]
    ZeroInterference,
}

fn positive(name: &'static str, value: f64) -> Result<f64, ChannelError> {
    if !value.is_finite() {
        return Err(ChannelError::NonFinite { name });
    }
    if value <= 0.0 {
        return Err(ChannelError::NonPositive { name, value });
    }
    Ok(value)
}

/// Physical link constants. Derived quantities are computed on demand so
/// they can never drift from the primaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfParameters {
    pub ptx_w: f64,
    pub gain_tx: f64,
    pub gain_rx: f64,
    pub wavelength_m: f64,
    pub rcs_m2: f64,
    pub r_wall: f64,
    pub gamma: f64,
    pub floor_w: f64,
}

impl Default for RfParameters {
    /// 1 W, unity gains, 5 GHz, 1 m^2 target, R = 0.3, gamma = 1e-3, b = 1e-12 W.
    fn default() -> Self {
        Self {
            ptx_w: 1.0,
            gain_tx: 1.0,
            gain_rx: 1.0,
            wavelength_m: 0.06,
            rcs_m2: 1.0,
            r_wall: 0.3,
            gamma: 1e-3,
            floor_w: 1e-12,
        }
    }
}

impl RfParameters {
    /// Returns the name of the offending field on failure.
    pub fn validate(&self) -> Result<(), (&'static str, ChannelError)> {
        let checks = [
            ("ptx_w", self.ptx_w),
            ("gain_tx", self.gain_tx),
            ("gain_rx", self.gain_rx),
            ("wavelength_m", self.wavelength_m),
            ("rcs_m2", self.rcs_m2),
            ("gamma", self.gamma),
        ];
        for (name, v) in checks {
            positive(name, v).map_err(|e| (name, e))?;
        }
        if !(0.0..=1.0).contains(&self.r_wall) {
            return Err(("r_wall", ChannelError::ReflectionOutOfRange(self.r_wall)));
        }
        if !self.floor_w.is_finite() {
            return Err(("floor_w", ChannelError::NonFinite { name: "floor_w" }));
        }
        if self.floor_w < 0.0 {
            return Err(("floor_w", ChannelError::NegativeFloor(self.floor_w)));
        }
        Ok(())
    }

    /// Effective receive aperture `G_R lambda^2 / 4pi`, m^2.
    pub fn aperture_m2(&self) -> f64 {
        self.gain_rx * self.wavelength_m * self.wavelength_m / (4.0 * PI)
    }

    /// `K = P_T G_T A_R / 4pi`.
    pub fn k(&self) -> f64 {
        self.ptx_w * self.gain_tx * self.aperture_m2() / (4.0 * PI)
    }

    pub fn alpha1(&self) -> f64 {
        self.r_wall * self.r_wall / (4.0 * PI)
    }

    pub fn alpha2(&self) -> f64 {
        self.r_wall / PI.sqrt()
    }

    /// Factor mapping the simplified SSNR onto the full one when the
    /// interference floor is negligible.
    pub fn simplified_to_full(&self) -> f64 {
        self.rcs_m2 / (4.0 * PI * self.gamma)
    }

    fn eirp_aperture(&self) -> f64 {
        self.ptx_w * self.gain_tx * self.aperture_m2()
    }
}

/// An SSNR expressed both ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsnrValue {
    pub linear: f64,
    pub db: f64,
}

impl SsnrValue {
    pub fn from_linear(linear: f64) -> Self {
        Self {
            linear,
            db: linear_to_db(linear),
        }
    }
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Static LoS power at the receiver, watts.
pub fn p_los(params: &RfParameters, r_d: f64) -> Result<f64, ChannelError> {
    let r_d = positive("r_d", r_d)?;
    Ok(params.eirp_aperture() / (4.0 * PI * r_d * r_d))
}

/// Target echo over the direct tx -> target -> rx path, watts.
pub fn p_dyn_los(params: &RfParameters, r_t: f64, r_r: f64) -> Result<f64, ChannelError> {
    let r_t = positive("r_t", r_t)?;
    let r_r = positive("r_r", r_r)?;
    let rr = r_t * r_r;
    Ok(params.eirp_aperture() * params.rcs_m2 / ((4.0 * PI).powi(2) * rr * rr))
}

/// Target echo relayed once by the wall: `d1` device to wall, `d2` wall to
/// target, `r_far` target to the other device. Watts.
pub fn p_dyn_wall(
    params: &RfParameters,
    d1: f64,
    d2: f64,
    r_far: f64,
) -> Result<f64, ChannelError> {
    let d1 = positive("d1", d1)?;
    let d2 = positive("d2", d2)?;
    let r_far = positive("r_far", r_far)?;
    let prod = d1 * d2 * r_far;
    Ok(
        params.eirp_aperture() * params.r_wall * params.r_wall * params.rcs_m2
            / ((4.0 * PI).powi(3) * prod * prod),
    )
}

/// Phase of the wall-relayed echo relative to the direct echo, radians,
/// not wrapped.
pub fn phase_difference(
    d1: f64,
    d2: f64,
    r_direct: f64,
    wavelength_m: f64,
) -> Result<f64, ChannelError> {
    let wavelength_m = positive("wavelength_m", wavelength_m)?;
    Ok(2.0 * PI * (d1 + d2 - r_direct) / wavelength_m)
}

/// A dynamic path's received power and its total propagation length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicPath {
    pub power_w: f64,
    pub length_m: f64,
}

/// Coherent power of several echoes, `|sum_k sqrt(P_k) exp(-j 2pi L_k / lambda)|^2`.
///
/// Phases are taken relative to the first path so long absolute lengths do
/// not cost precision.
pub fn p_dyn_combined(paths: &[DynamicPath], wavelength_m: f64) -> Result<f64, ChannelError> {
    let wavelength_m = positive("wavelength_m", wavelength_m)?;
    let Some(first) = paths.first() else {
        return Ok(0.0);
    };
    let (mut re, mut im) = (0.0, 0.0);
    for p in paths {
        if p.power_w < 0.0 || p.power_w.is_nan() {
            return Err(ChannelError::NegativePower(p.power_w));
        }
        positive("length_m", p.length_m)?;
        let amp = p.power_w.sqrt();
        let phase = 2.0 * PI * (p.length_m - first.length_m) / wavelength_m;
        re += amp * phase.cos();
        im -= amp * phase.sin();
    }
    Ok(re * re + im * im)
}

/// Every dynamic path in the set with its power, direct echo first.
pub fn dynamic_paths(
    params: &RfParameters,
    paths: &PathSet,
) -> Result<Vec<DynamicPath>, ChannelError> {
    if paths.singular {
        return Err(ChannelError::Singular);
    }
    let mut out = Vec::with_capacity(1 + paths.reflected.len());
    out.push(DynamicPath {
        power_w: p_dyn_los(params, paths.r_t, paths.r_r)?,
        length_m: paths.r_t + paths.r_r,
    });
    for leg in paths.valid_legs() {
        let far = far_leg(paths, leg.side);
        out.push(DynamicPath {
            power_w: p_dyn_wall(params, leg.path.d1, leg.path.d2, far)?,
            length_m: leg.path.d1 + leg.path.d2 + far,
        });
    }
    Ok(out)
}

/// Direct leg on the bounce side (the one the wall path replaces).
fn near_leg(paths: &PathSet, side: Side) -> f64 {
    match side {
        Side::Tx => paths.r_t,
        Side::Rx => paths.r_r,
    }
}

/// Direct leg shared by the wall path and the direct echo.
fn far_leg(paths: &PathSet, side: Side) -> f64 {
    match side {
        Side::Tx => paths.r_r,
        Side::Rx => paths.r_t,
    }
}

/// Interference power `gamma * P_LoS + b`, watts.
pub fn interference_power(params: &RfParameters, r_d: f64) -> Result<f64, ChannelError> {
    Ok(params.gamma * p_los(params, r_d)? + params.floor_w)
}

/// Full-form SSNR over all valid dynamic paths.
pub fn ssnr_full(params: &RfParameters, paths: &PathSet) -> Result<SsnrValue, ChannelError> {
    let dynamic = p_dyn_combined(&dynamic_paths(params, paths)?, params.wavelength_m)?;
    let interference = interference_power(params, paths.r_d)?;
    if interference <= 0.0 {
        return Err(ChannelError::ZeroInterference);
    }
    Ok(SsnrValue::from_linear(dynamic / interference))
}

fn check_lengths(paths: &PathSet) -> Result<(), ChannelError> {
    if paths.singular {
        return Err(ChannelError::Singular);
    }
    positive("r_d", paths.r_d)?;
    positive("r_t", paths.r_t)?;
    positive("r_r", paths.r_r)?;
    Ok(())
}

/// Direct-echo term `r_D^2 / (r_T r_R)^2`.
pub fn ssnr_los_simplified(paths: &PathSet) -> Result<f64, ChannelError> {
    check_lengths(paths)?;
    let rr = paths.r_t * paths.r_r;
    Ok(paths.r_d * paths.r_d / (rr * rr))
}

/// Wall term `r_D^2 / (d1 d2 r_far)^2`, summed over valid legs (zero when
/// the wall is out of reach).
pub fn ssnr_wall_simplified(paths: &PathSet) -> Result<f64, ChannelError> {
    check_lengths(paths)?;
    let mut total = 0.0;
    for leg in paths.valid_legs() {
        let prod = leg.path.d1 * leg.path.d2 * far_leg(paths, leg.side);
        total += paths.r_d * paths.r_d / (prod * prod);
    }
    Ok(total)
}

/// Simplified SSNR including wall terms and phase interaction.
///
/// For one reflected leg this is
/// `alpha1 W + L + alpha2 cos(dphi) r_D^2 / (d1 d2 r_near r_far^2)`.
/// When both a tx-side and an rx-side leg are valid, the two wall echoes
/// also interfere with each other; that pair contributes
/// `2 alpha1 cos(dphi_tr) r_D^2 / (d1 d2 r_R * d1' d2' r_T)`.
pub fn ssnr_simplified(
    paths: &PathSet,
    alpha1: f64,
    alpha2: f64,
    wavelength_m: f64,
) -> Result<f64, ChannelError> {
    let los = ssnr_los_simplified(paths)?;
    positive("wavelength_m", wavelength_m)?;
    let rd2 = paths.r_d * paths.r_d;
    let mut total = los;
    let legs: Vec<_> = paths.valid_legs().collect();
    for leg in &legs {
        let (near, far) = (near_leg(paths, leg.side), far_leg(paths, leg.side));
        let d1d2 = leg.path.d1 * leg.path.d2;
        let prod = d1d2 * far;
        let dphi = phase_difference(leg.path.d1, leg.path.d2, near, wavelength_m)?;
        total += alpha1 * rd2 / (prod * prod);
        total += alpha2 * dphi.cos() * rd2 / (d1d2 * near * far * far);
    }
    for (i, a) in legs.iter().enumerate() {
        for b in &legs[i + 1..] {
            let (la, lb) = (
                a.path.length() + far_leg(paths, a.side),
                b.path.length() + far_leg(paths, b.side),
            );
            let dphi = 2.0 * PI * (la - lb) / wavelength_m;
            let pa = a.path.d1 * a.path.d2 * far_leg(paths, a.side);
            let pb = b.path.d1 * b.path.d2 * far_leg(paths, b.side);
            total += 2.0 * alpha1 * dphi.cos() * rd2 / (pa * pb);
        }
    }
    Ok(total)
}

/// Boundary value of `r_T r_R` at which the no-wall simplified SSNR equals
/// `ssnr_min` (linear), m^2.
pub fn cassini_constant(r_d: f64, ssnr_min: f64) -> Result<f64, ChannelError> {
    let r_d = positive("r_d", r_d)?;
    let ssnr_min = positive("ssnr_min", ssnr_min)?;
    Ok(r_d / ssnr_min.sqrt())
}

/// Scale that puts a reference geometry whose raw simplified SSNR is
/// `raw_ssnr` exactly on `threshold_db`.
pub fn calibrate_scale(raw_ssnr: f64, threshold_db: f64) -> Result<f64, ChannelError> {
    let raw = positive("raw_ssnr", raw_ssnr)?;
    if !threshold_db.is_finite() {
        return Err(ChannelError::NonFinite {
            name: "threshold_db",
        });
    }
    Ok(db_to_linear(threshold_db) / raw)
}
