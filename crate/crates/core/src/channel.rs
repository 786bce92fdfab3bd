//! Indoor line-of-sight Lambertian optical channel.
//!
//! LEDs face straight down, photodiodes face straight up, so the emission
//! angle at the LED equals the incidence angle at the PD. Gains are pure
//! functions of geometry and device constants; there is no multipath.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Device constants of an LED/PD pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalParams {
    /// Half-power semi-angle of the LED, degrees.
    pub semi_angle_deg: f64,
    /// Detection area of the PD, m².
    pub detector_area: f64,
    /// PD responsivity, A/W.
    pub responsivity: f64,
    /// Optical filter gain (unitless).
    pub filter_gain: f64,
    /// Refractive index of the optical concentrator.
    pub refractive_index: f64,
    /// Field of view of the PD, degrees.
    pub fov_deg: f64,
}

impl OpticalParams {
    /// Simulation constants used throughout the reference scenarios:
    /// 60° semi-angle, 1 cm² PD, 0.4 A/W, unit filter gain, n = 1.5, 60° FOV.
    pub fn reference() -> Self {
        OpticalParams {
            semi_angle_deg: 60.0,
            detector_area: 1e-4,
            responsivity: 0.4,
            filter_gain: 1.0,
            refractive_index: 1.5,
            fov_deg: 60.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.semi_angle_deg > 0.0 && self.semi_angle_deg < 90.0) {
            return Err(Error::Domain(format!(
                "semi-angle must be in (0, 90) degrees, got {}",
                self.semi_angle_deg
            )));
        }
        if self.detector_area <= 0.0 {
            return Err(Error::Domain("detector area must be positive".into()));
        }
        if self.responsivity <= 0.0 {
            return Err(Error::Domain("responsivity must be positive".into()));
        }
        if self.filter_gain <= 0.0 {
            return Err(Error::Domain("filter gain must be positive".into()));
        }
        if self.refractive_index < 1.0 {
            return Err(Error::Domain("refractive index must be >= 1".into()));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg <= 90.0) {
            return Err(Error::Domain(format!(
                "FOV must be in (0, 90] degrees, got {}",
                self.fov_deg
            )));
        }
        Ok(())
    }
}

/// LED/PD placement for a single link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub led_position: [f64; 3],
    pub pd_position: [f64; 3],
}

impl LinkGeometry {
    pub fn new(led_position: [f64; 3], pd_position: [f64; 3]) -> Self {
        LinkGeometry { led_position, pd_position }
    }

    /// Vertical drop H from LED down to PD plane.
    pub fn vertical_drop(&self) -> f64 {
        self.led_position[2] - self.pd_position[2]
    }

    /// Radial (top view) offset S between LED and PD.
    pub fn radial_offset(&self) -> f64 {
        let dx = self.led_position[0] - self.pd_position[0];
        let dy = self.led_position[1] - self.pd_position[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Euclidean LED-PD distance d.
    pub fn distance(&self) -> f64 {
        let h = self.vertical_drop();
        let s = self.radial_offset();
        (h * h + s * s).sqrt()
    }

    /// Emission angle at the LED, radians. With the down/up orientation
    /// convention this equals the incidence angle at the PD.
    pub fn emission_angle(&self) -> f64 {
        (self.vertical_drop() / self.distance()).acos()
    }

    /// Incidence angle at the PD, radians.
    pub fn incidence_angle(&self) -> f64 {
        self.emission_angle()
    }
}

/// Lambertian order ζ = −1 / log₂(cos Φ½).
pub fn lambertian_order(semi_angle_deg: f64) -> Result<f64> {
    if !(semi_angle_deg > 0.0 && semi_angle_deg < 90.0) {
        return Err(Error::Domain(format!(
            "semi-angle must be in (0, 90) degrees, got {semi_angle_deg}"
        )));
    }
    Ok(-1.0 / semi_angle_deg.to_radians().cos().log2())
}

/// Non-imaging concentrator gain: n²/sin²(ψ_fov) inside the FOV, 0 outside.
pub fn concentrator_gain(params: &OpticalParams, incidence_rad: f64) -> f64 {
    let fov_rad = params.fov_deg.to_radians();
    if incidence_rad <= fov_rad + ANGLE_EPS {
        let n = params.refractive_index;
        n * n / fov_rad.sin().powi(2)
    } else {
        0.0
    }
}

// Tolerance for FOV boundary comparisons; keeps ψ == ψ_fov inside the FOV
// despite radian conversion round-off.
const ANGLE_EPS: f64 = 1e-12;

/// Line-of-sight channel gain h for one LED/PD link.
///
/// h = (ζ+1)·A_D·R_p·cosᶻ(φ)·T·g(ψ)·cos(ψ) / (2π d²) inside the FOV, else 0.
pub fn channel_gain(geometry: &LinkGeometry, params: &OpticalParams) -> Result<f64> {
    params.validate()?;
    let d = geometry.distance();
    if d == 0.0 {
        return Err(Error::Domain("LED and PD positions coincide".into()));
    }
    if geometry.vertical_drop() <= 0.0 {
        return Err(Error::Domain("LED must be above the PD plane".into()));
    }
    let psi = geometry.incidence_angle();
    if psi > params.fov_deg.to_radians() + ANGLE_EPS {
        return Ok(0.0);
    }
    let zeta = lambertian_order(params.semi_angle_deg)?;
    let phi = geometry.emission_angle();
    let g = concentrator_gain(params, psi);
    let h = (zeta + 1.0) * params.detector_area * params.responsivity * phi.cos().powf(zeta)
        * params.filter_gain
        * g
        * psi.cos()
        / (2.0 * std::f64::consts::PI * d * d);
    Ok(h)
}

/// Room layout: LED and PD positions plus shared device constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Room dimensions (length, breadth, height), m.
    pub room: [f64; 3],
    pub leds: Vec<[f64; 3]>,
    pub pds: Vec<[f64; 3]>,
    /// Device constants; defaults to [`OpticalParams::reference`] when omitted.
    #[serde(default = "OpticalParams::reference")]
    pub params: OpticalParams,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.leds.is_empty() || self.pds.is_empty() {
            return Err(Error::Config("scenario needs at least one LED and one PD".into()));
        }
        for p in self.leds.iter().chain(self.pds.iter()) {
            for axis in 0..3 {
                if p[axis] < 0.0 || p[axis] > self.room[axis] {
                    return Err(Error::Config(format!(
                        "position {p:?} lies outside the {:?} room",
                        self.room
                    )));
                }
            }
        }
        self.params.validate()
    }

    /// Built-in scenario by name: `fig3a` (2-Tx MAC), `fig3b` (4-Tx MAC),
    /// `fig3c` (1 Tx, 2 users BC). Coordinates are documented approximations
    /// of the reference room layouts in a 4×4×3 m room.
    pub fn builtin(name: &str) -> Result<Scenario> {
        let params = OpticalParams::reference();
        let room = [4.0, 4.0, 3.0];
        match name {
            "fig3a" => Ok(Scenario {
                room,
                leds: vec![[1.0, 1.0, 3.0], [3.0, 3.0, 3.0]],
                pds: vec![[0.5, 0.5, 0.0]],
                params,
            }),
            "fig3b" => Ok(Scenario {
                room,
                leds: vec![
                    [1.0, 1.0, 3.0],
                    [1.0, 3.0, 3.0],
                    [3.0, 1.0, 3.0],
                    [3.0, 3.0, 3.0],
                ],
                pds: vec![[1.8, 1.9, 0.0]],
                params,
            }),
            "fig3c" => Ok(Scenario {
                room,
                leds: vec![[2.0, 2.0, 3.0]],
                pds: vec![[1.0, 1.0, 0.0], [3.0, 2.5, 0.0]],
                params,
            }),
            other => Err(Error::Config(format!("unknown built-in scenario `{other}`"))),
        }
    }

    /// True when the scenario describes a multiple access channel
    /// (many LEDs, one PD).
    pub fn is_mac(&self) -> bool {
        self.pds.len() == 1
    }
}

/// Channel gains sorted ascending with the permutation back to scenario order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedGains {
    /// h₁ ≤ h₂ ≤ … ≤ h_L.
    pub gains: Vec<f64>,
    /// `source_index[i]` is the scenario LED index (MAC) or PD index (BC)
    /// that produced `gains[i]`.
    pub source_index: Vec<usize>,
}

/// Computes all link gains of a scenario and sorts them ascending.
///
/// For a MAC scenario (1 PD) the varying side is the LED list; for a BC
/// scenario (1 LED) it is the PD list. Ties keep input order.
pub fn scenario_gains(scenario: &Scenario) -> Result<SortedGains> {
    scenario.validate()?;
    let links: Vec<LinkGeometry> = if scenario.pds.len() == 1 {
        scenario
            .leds
            .iter()
            .map(|led| LinkGeometry::new(*led, scenario.pds[0]))
            .collect()
    } else if scenario.leds.len() == 1 {
        scenario
            .pds
            .iter()
            .map(|pd| LinkGeometry::new(scenario.leds[0], *pd))
            .collect()
    } else {
        return Err(Error::Config(
            "scenario must have exactly one PD (MAC) or exactly one LED (BC)".into(),
        ));
    };
    let mut indexed: Vec<(usize, f64)> = links
        .iter()
        .enumerate()
        .map(|(i, link)| channel_gain(link, &scenario.params).map(|h| (i, h)))
        .collect::<Result<_>>()?;
    indexed.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    Ok(SortedGains {
        gains: indexed.iter().map(|&(_, h)| h).collect(),
        source_index: indexed.iter().map(|&(i, _)| i).collect(),
    })
}
