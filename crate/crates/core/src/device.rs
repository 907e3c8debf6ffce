//! Single-FeFET model: a programmable threshold-voltage switch.
//!
//! A positive write pulse leaves the ferroelectric polarized towards the
//! channel and the device in the low-V_TH state; a negative pulse leaves it in
//! the high-V_TH state. The drain current is either a hard switch at V_TH or a
//! clamped log-linear subthreshold characteristic centred on V_TH.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default read voltage applied to the selected FeFET in AND/NOR arrays.
pub const DEFAULT_V_READ: f64 = 0.6;

/// Sampled V_TH offsets are clamped to this many standard deviations.
pub const VTH_CLAMP_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VthState {
    #[serde(rename = "LVT")]
    Lvt,
    #[serde(rename = "HVT")]
    Hvt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulsePolarity {
    Positive,
    Negative,
}

impl PulsePolarity {
    pub fn target_state(self) -> VthState {
        match self {
            PulsePolarity::Positive => VthState::Lvt,
            PulsePolarity::Negative => VthState::Hvt,
        }
    }
}

/// Gate-voltage to drain-current characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeMode {
    /// `i_on` strictly above V_TH, `i_off` at or below it.
    HardSwitch,
    /// Log-linear subthreshold slope in volts per decade. The current is the
    /// geometric mean of `i_on` and `i_off` at V_TH and is clamped to
    /// `[i_off, i_on]`.
    Sigmoid { volts_per_decade: f64 },
}

/// Write pulse metadata. Pulses act instantaneously; amplitude and width are
/// kept for reporting only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WritePulse {
    pub amplitude_v: f64,
    pub width_s: f64,
}

impl Default for WritePulse {
    fn default() -> Self {
        Self {
            amplitude_v: 4.0,
            width_s: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeviceParams {
    pub vth_low: f64,
    pub vth_high: f64,
    pub i_on: f64,
    pub i_off: f64,
    /// Standard deviation of the V_TH offset sampled at each program event.
    pub vth_sigma: f64,
    pub slope_mode: SlopeMode,
    pub write_pulse: WritePulse,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            vth_low: 0.3,
            vth_high: 1.5,
            i_on: 10e-6,
            i_off: 10e-12,
            vth_sigma: 0.0,
            slope_mode: SlopeMode::HardSwitch,
            write_pulse: WritePulse::default(),
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.vth_low < self.vth_high) {
            return Err(Error::InvalidParams("vth_low must be below vth_high"));
        }
        if !(self.i_off > 0.0 && self.i_off < self.i_on) {
            return Err(Error::InvalidParams("currents must satisfy 0 < i_off < i_on"));
        }
        if !(self.vth_sigma >= 0.0 && self.vth_sigma.is_finite()) {
            return Err(Error::InvalidParams("vth_sigma must be finite and non-negative"));
        }
        if let SlopeMode::Sigmoid { volts_per_decade } = self.slope_mode {
            if !(volts_per_decade > 0.0) {
                return Err(Error::InvalidParams("subthreshold slope must be positive"));
            }
        }
        Ok(())
    }

    pub fn nominal_vth(&self, state: VthState) -> f64 {
        match state {
            VthState::Lvt => self.vth_low,
            VthState::Hvt => self.vth_high,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeFetDevice {
    pub state: VthState,
    #[serde(rename = "vth")]
    pub vth_effective: f64,
}

impl FeFetDevice {
    /// A device sitting exactly at the nominal V_TH of `state`.
    pub fn nominal(state: VthState, params: &DeviceParams) -> Self {
        Self {
            state,
            vth_effective: params.nominal_vth(state),
        }
    }

    /// Applies a write pulse and resamples the V_TH offset.
    pub fn program<R: Rng + ?Sized>(
        &mut self,
        polarity: PulsePolarity,
        params: &DeviceParams,
        rng: &mut R,
    ) {
        self.state = polarity.target_state();
        self.vth_effective = params.nominal_vth(self.state) + sample_offset(params.vth_sigma, rng);
    }

    /// Value-returning form of [`FeFetDevice::program`].
    pub fn programmed<R: Rng + ?Sized>(
        mut self,
        polarity: PulsePolarity,
        params: &DeviceParams,
        rng: &mut R,
    ) -> Self {
        self.program(polarity, params, rng);
        self
    }

    pub fn drain_current(&self, v_gate: f64, params: &DeviceParams) -> f64 {
        match params.slope_mode {
            SlopeMode::HardSwitch => {
                if v_gate > self.vth_effective {
                    params.i_on
                } else {
                    params.i_off
                }
            }
            SlopeMode::Sigmoid { volts_per_decade } => {
                let log_on = libm::log10(params.i_on);
                let log_off = libm::log10(params.i_off);
                let mid = 0.5 * (log_on + log_off);
                let log_i = mid + (v_gate - self.vth_effective) / volts_per_decade;
                libm::pow(10.0, log_i.clamp(log_off, log_on)).clamp(params.i_off, params.i_on)
            }
        }
    }
}

fn sample_offset<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is validated as finite and non-negative");
    let limit = VTH_CLAMP_SIGMAS * sigma;
    normal.sample(rng).clamp(-limit, limit)
}
