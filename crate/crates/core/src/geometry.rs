//! Bistatic kinematics: single-leg range histories, the bistatic range sum,
//! and the closed-form Doppler history of a heaving marine target.
//!
//! Each leg follows the second-order model
//!
//! ```text
//! R(t) = R0 + δ(t) + (V·Φ + v_rad)·t + ½·(V_eff²/R0 − 2·V·v_al/R0 + a_rad)·t²
//! ```
//!
//! where `δ(t)` is the harmonic heave displacement shared by both legs. The
//! scene is flat; both platforms fly straight and level along +x over the
//! (short) aperture.

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Kinematics of one platform relative to the target it observes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformTrack<T> {
    pub absolute_velocity: T,
    pub ground_velocity: T,
    /// `sqrt(absolute_velocity * ground_velocity)`, kept in sync by the constructors.
    pub effective_velocity: T,
    /// Squint angle in radians; positive when range opens at `t = 0`.
    pub squint_angle: T,
    pub altitude: T,
    pub initial_range: T,
}

/// Effective velocity of a platform over a flat earth.
pub fn effective_velocity<T: Real>(absolute: T, ground: T) -> Result<T> {
    if !(absolute > T::zero()) || !(ground > T::zero()) {
        return domain(format!(
            "velocities must be positive (absolute {absolute}, ground {ground})"
        ));
    }
    Ok((absolute * ground).sqrt())
}

impl<T: Real> PlatformTrack<T> {
    pub fn new(absolute: T, ground: T, squint: T, altitude: T, initial_range: T) -> Result<Self> {
        let effective = effective_velocity(absolute, ground)?;
        if !(initial_range > T::zero()) {
            return domain(format!("initial range must be positive, got {initial_range}"));
        }
        if !(altitude >= T::zero()) {
            return domain(format!("altitude must be non-negative, got {altitude}"));
        }
        Ok(Self {
            absolute_velocity: absolute,
            ground_velocity: ground,
            effective_velocity: effective,
            squint_angle: squint,
            altitude,
            initial_range,
        })
    }

    /// Aircraft: absolute, ground and effective velocity coincide.
    pub fn airborne(velocity: T, squint: T, altitude: T, initial_range: T) -> Result<Self> {
        Self::new(velocity, velocity, squint, altitude, initial_range)
    }

    /// Coefficient of `t²/2` for a stationary target.
    pub fn stationary_curvature(&self) -> T {
        self.effective_velocity * self.effective_velocity / self.initial_range
    }
}

/// One `(Ω, p, q)` term of the heave series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeaveComponent<T> {
    /// Encounter wave frequency, rad/s.
    pub omega: T,
    /// In-phase amplitude, m.
    pub p: T,
    /// Quadrature amplitude, m.
    pub q: T,
}

impl<T: Real> HeaveComponent<T> {
    pub fn amplitude(&self) -> T {
        self.p.hypot(self.q)
    }
}

/// Vertical displacement `δ(t) = Σ p_k cos(Ω_k t) + q_k sin(Ω_k t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeaveModel<T> {
    components: Vec<HeaveComponent<T>>,
}

impl<T: Real> HeaveModel<T> {
    pub fn new(components: Vec<HeaveComponent<T>>) -> Result<Self> {
        for (i, c) in components.iter().enumerate() {
            if !(c.omega > T::zero()) {
                return domain(format!("heave component {i}: omega must be positive"));
            }
            if components[..i].iter().any(|o| o.omega == c.omega) {
                return domain(format!("heave component {i}: duplicate omega {}", c.omega));
            }
        }
        Ok(Self { components })
    }

    pub fn none() -> Self {
        Self { components: Vec::new() }
    }

    /// Single cosine swell of the given amplitude and period, peaking at `t = 0`.
    pub fn swell(amplitude: T, period: T) -> Result<Self> {
        if !(period > T::zero()) {
            return domain("heave period must be positive");
        }
        Self::new(vec![HeaveComponent {
            omega: T::TAU() / period,
            p: amplitude,
            q: T::zero(),
        }])
    }

    pub fn components(&self) -> &[HeaveComponent<T>] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn displacement(&self, t: T) -> T {
        self.components
            .iter()
            .map(|c| c.p * (c.omega * t).cos() + c.q * (c.omega * t).sin())
            .fold(T::zero(), |a, b| a + b)
    }

    /// `dδ/dt`.
    pub fn rate(&self, t: T) -> T {
        self.components
            .iter()
            .map(|c| c.omega * (c.q * (c.omega * t).cos() - c.p * (c.omega * t).sin()))
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Shorthand for [`HeaveModel::displacement`].
pub fn heave_displacement<T: Real>(heave: &HeaveModel<T>, t: T) -> T {
    heave.displacement(t)
}

/// Target motion resolved per platform, plus the heave model and the
/// (constant) reflectivity amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMotion<T> {
    pub v_rad_tx: T,
    pub v_rad_rx: T,
    pub v_al_tx: T,
    pub v_al_rx: T,
    pub a_rad_tx: T,
    pub a_rad_rx: T,
    pub heave: HeaveModel<T>,
    pub reflectivity: T,
    /// Horizontal speed the components were resolved from (0 if built by hand).
    pub speed: T,
    /// Heading relative to the receiver velocity, rad.
    pub heading: T,
    /// Acceleration magnitude along the heading.
    pub acceleration: T,
}

impl<T: Real> TargetMotion<T> {
    pub fn stationary(reflectivity: T) -> Self {
        Self {
            v_rad_tx: T::zero(),
            v_rad_rx: T::zero(),
            v_al_tx: T::zero(),
            v_al_rx: T::zero(),
            a_rad_tx: T::zero(),
            a_rad_rx: T::zero(),
            heave: HeaveModel::none(),
            reflectivity,
            speed: T::zero(),
            heading: T::zero(),
            acceleration: T::zero(),
        }
    }

    /// Same translational motion, heave removed.
    pub fn without_heave(&self) -> Self {
        Self {
            heave: HeaveModel::none(),
            ..self.clone()
        }
    }
}

/// Dimensionless motion parameters of the expanded range-compressed signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedMotion<T> {
    pub mu_tx: T,
    pub mu_rx: T,
    pub nu_tx: T,
    pub nu_rx: T,
    pub eta_tx: T,
    pub eta_rx: T,
}

impl<T: Real> NormalizedMotion<T> {
    pub fn new(tx: &PlatformTrack<T>, rx: &PlatformTrack<T>, m: &TargetMotion<T>) -> Self {
        let vs = tx.absolute_velocity;
        let vp = rx.absolute_velocity;
        Self {
            mu_tx: m.v_rad_tx / vs,
            mu_rx: m.v_rad_rx / vp,
            nu_tx: m.v_al_tx / vs,
            nu_rx: m.v_al_rx / vp,
            eta_tx: tx.initial_range * m.a_rad_tx / (vs * vs),
            eta_rx: rx.initial_range * m.a_rad_rx / (vp * vp),
        }
    }
}

#[derive(Clone, Copy)]
enum Leg {
    Tx,
    Rx,
}

struct LegCoefficients<T> {
    linear: T,
    quadratic: T,
}

fn leg_coefficients<T: Real>(track: &PlatformTrack<T>, m: &TargetMotion<T>, leg: Leg) -> LegCoefficients<T> {
    let (v_rad, v_al, a_rad) = match leg {
        Leg::Tx => (m.v_rad_tx, m.v_al_tx, m.a_rad_tx),
        Leg::Rx => (m.v_rad_rx, m.v_al_rx, m.a_rad_rx),
    };
    let v = track.absolute_velocity;
    let r0 = track.initial_range;
    let two = T::lit(2.0);
    LegCoefficients {
        linear: v * track.squint_angle + v_rad,
        quadratic: track.stationary_curvature() - two * v * v_al / r0 + a_rad,
    }
}

fn leg_offset<T: Real>(track: &PlatformTrack<T>, m: &TargetMotion<T>, leg: Leg, t: T) -> T {
    let c = leg_coefficients(track, m, leg);
    m.heave.displacement(t) + c.linear * t + T::lit(0.5) * c.quadratic * t * t
}

/// Transmitter-to-target range at slow time `t`.
pub fn range_history_tx<T: Real>(track: &PlatformTrack<T>, motion: &TargetMotion<T>, t: T) -> T {
    track.initial_range + leg_offset(track, motion, Leg::Tx, t)
}

/// Target-to-receiver range at slow time `t`.
pub fn range_history_rx<T: Real>(track: &PlatformTrack<T>, motion: &TargetMotion<T>, t: T) -> T {
    track.initial_range + leg_offset(track, motion, Leg::Rx, t)
}

/// `R_T(t) + R_R(t)`; the heave enters once per leg.
pub fn bistatic_range<T: Real>(
    tx: &PlatformTrack<T>,
    rx: &PlatformTrack<T>,
    motion: &TargetMotion<T>,
    t: T,
) -> T {
    range_history_tx(tx, motion, t) + range_history_rx(rx, motion, t)
}

/// `R_B(t) - R_T0 - R_R0`, evaluated without the large constant ranges so
/// carrier phases stay accurate for geosynchronous distances.
pub fn bistatic_range_offset<T: Real>(
    tx: &PlatformTrack<T>,
    rx: &PlatformTrack<T>,
    motion: &TargetMotion<T>,
    t: T,
) -> T {
    leg_offset(tx, motion, Leg::Tx, t) + leg_offset(rx, motion, Leg::Rx, t)
}

/// `dR_B/dt` in closed form.
pub fn bistatic_range_rate<T: Real>(
    tx: &PlatformTrack<T>,
    rx: &PlatformTrack<T>,
    motion: &TargetMotion<T>,
    t: T,
) -> T {
    let a = leg_coefficients(tx, motion, Leg::Tx);
    let b = leg_coefficients(rx, motion, Leg::Rx);
    T::lit(2.0) * motion.heave.rate(t) + a.linear + b.linear + (a.quadratic + b.quadratic) * t
}

/// Doppler history `f_D(t) = -(1/λ)·dR_B/dt` in Hz.
///
/// The linear part is the centroid `-(V_SΦ_T + v_rad_T + V_PΦ_R + v_rad_R)/λ`
/// plus the rate term; the heave adds
/// `-(2/λ)·Σ (q_k Ω_k cos Ω_k t − p_k Ω_k sin Ω_k t)`.
pub fn doppler_history<T: Real>(
    tx: &PlatformTrack<T>,
    rx: &PlatformTrack<T>,
    motion: &TargetMotion<T>,
    wavelength: T,
    t: T,
) -> Result<T> {
    if !(wavelength > T::zero()) {
        return domain(format!("wavelength must be positive, got {wavelength}"));
    }
    Ok(-bistatic_range_rate(tx, rx, motion, t) / wavelength)
}

/// Linear (centroid, rate) terms of the Doppler history, without heave.
pub fn doppler_linear_terms<T: Real>(
    tx: &PlatformTrack<T>,
    rx: &PlatformTrack<T>,
    motion: &TargetMotion<T>,
    wavelength: T,
) -> (T, T) {
    let a = leg_coefficients(tx, motion, Leg::Tx);
    let b = leg_coefficients(rx, motion, Leg::Rx);
    (
        -(a.linear + b.linear) / wavelength,
        -(a.quadratic + b.quadratic) / wavelength,
    )
}

/// Placement of one platform relative to the scene centre at `t = 0`.
///
/// `look_angle` is measured from nadir, `bearing` is the ground azimuth of
/// the line of sight away from broadside (positive = platform ahead of the
/// scene). Velocity is along +x for every platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformGeometry<T> {
    pub altitude: T,
    pub look_angle: T,
    pub bearing: T,
    pub speed: T,
    pub ground_speed: T,
}

impl<T: Real> PlatformGeometry<T> {
    pub fn position(&self) -> [T; 3] {
        let ground = self.altitude * self.look_angle.tan();
        [
            ground * self.bearing.sin(),
            -ground * self.bearing.cos(),
            self.altitude,
        ]
    }

    /// Unit vector from the point `at` toward the platform, and the distance.
    pub fn line_of_sight(&self, at: [T; 3]) -> ([T; 3], T) {
        let p = self.position();
        let d = [p[0] - at[0], p[1] - at[1], p[2] - at[2]];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        ([d[0] / r, d[1] / r, d[2] / r], r)
    }

    /// Track parameters for a scatterer displaced by `offset` from the scene centre.
    pub fn track_for(&self, offset: [T; 3]) -> Result<PlatformTrack<T>> {
        let (u, r0) = self.line_of_sight(offset);
        // velocity direction is +x
        PlatformTrack::new(self.speed, self.ground_speed, u[0].asin(), self.altitude, r0)
    }
}

/// Transmitter and receiver placements plus the carrier wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistaticGeometry<T> {
    pub tx: PlatformGeometry<T>,
    pub rx: PlatformGeometry<T>,
    pub wavelength: T,
}

impl<T: Real> BistaticGeometry<T> {
    pub fn tracks_for(&self, offset: [T; 3]) -> Result<(PlatformTrack<T>, PlatformTrack<T>)> {
        Ok((self.tx.track_for(offset)?, self.rx.track_for(offset)?))
    }

    /// Projects a horizontal velocity/acceleration (heading measured from
    /// the receiver velocity, counter-clockwise) onto each platform's line
    /// of sight and track.
    pub fn resolve_motion(
        &self,
        speed: T,
        heading: T,
        acceleration: T,
        heave: HeaveModel<T>,
        reflectivity: T,
        offset: [T; 3],
    ) -> TargetMotion<T> {
        let dir = [heading.cos(), heading.sin(), T::zero()];
        let dot = |a: [T; 3], b: [T; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let (u_tx, _) = self.tx.line_of_sight(offset);
        let (u_rx, _) = self.rx.line_of_sight(offset);
        // range closes when the target moves toward the platform
        TargetMotion {
            v_rad_tx: -speed * dot(dir, u_tx),
            v_rad_rx: -speed * dot(dir, u_rx),
            v_al_tx: speed * dir[0],
            v_al_rx: speed * dir[0],
            a_rad_tx: -acceleration * dot(dir, u_tx),
            a_rad_rx: -acceleration * dot(dir, u_rx),
            heave,
            reflectivity,
            speed,
            heading,
            acceleration,
        }
    }

    /// Bistatic angle at a scene point, rad.
    pub fn bistatic_angle(&self, at: [T; 3]) -> T {
        let (a, _) = self.tx.line_of_sight(at);
        let (b, _) = self.rx.line_of_sight(at);
        let c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).max(-T::one()).min(T::one());
        c.acos()
    }
}
