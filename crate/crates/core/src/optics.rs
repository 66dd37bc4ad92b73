//! Two-dimensional infinite-row irradiance model.
//!
//! The array is a periodic sequence of flat, opaque, zero-thickness module
//! chords seen in the vertical plane perpendicular to the rows. Coordinates are
//! `(u, z)`: `u` runs across the rows (east for north-south rows, toward the
//! equator for east-west rows) and `z` is height above the ground. Row `j` has
//! its hub at `(j * pitch, height)`.
//!
//! Beam light is handled by exact projection of the chords along the sun's
//! profile direction. Isotropic sky diffuse light uses 2-D view factors: from
//! a surface the differential view factor toward a direction at angle `b`
//! from its normal is `cos(b) db / 2`, so every angular interval reduces to a
//! difference of sines. Ground-reflected light on the modules assumes the
//! pitch-averaged ground irradiance as a uniform radiosity.

use alloc::vec::Vec;

use crate::error::check_range;
use crate::math::{atan2, ceil, cos, rem_euclid, sin, sqrt, to_rad, PI};
use crate::solar::{RotationState, SunPosition};
use crate::Result;

pub const DEFAULT_CHORD: f64 = 2.0;
pub const DEFAULT_HEIGHT: f64 = 3.0;
pub const DEFAULT_GROUND_POINTS: usize = 100;
pub const MIN_GROUND_POINTS: usize = 32;

/// Sample points along each module chord for sky and ground view factors.
const CHORD_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayLayout {
    /// Row-to-row distance, m.
    pub pitch: f64,
    /// Module chord width in the cross-section, m.
    pub chord: f64,
    /// Hub height above ground, m.
    pub height: f64,
    /// Weight of rear-side irradiance in module energy, `[0, 1]`.
    pub bifaciality: f64,
}

impl ArrayLayout {
    pub fn new(pitch: f64, chord: f64, height: f64, bifaciality: f64) -> Result<Self> {
        let layout = Self {
            pitch,
            chord,
            height,
            bifaciality,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// Layout with the given land-to-module ratio and default chord and height.
    pub fn with_a_lm(a_lm: f64) -> Result<Self> {
        Self::new(a_lm * DEFAULT_CHORD, DEFAULT_CHORD, DEFAULT_HEIGHT, 0.0)
    }

    pub fn a_lm(&self) -> f64 {
        self.pitch / self.chord
    }

    pub fn resized(&self, a_lm: f64) -> Result<Self> {
        Self::new(a_lm * self.chord, self.chord, self.height, self.bifaciality)
    }

    pub fn with_bifaciality(mut self, weight: f64) -> Result<Self> {
        self.bifaciality = weight;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("layout.chord", self.chord, self.chord > 0.0, "> 0 m")?;
        check_range("layout.pitch", self.pitch, self.pitch > 0.0, "> 0 m")?;
        check_range(
            "layout.a_lm",
            self.pitch / self.chord,
            self.pitch >= self.chord * (1.0 - 1e-12),
            ">= 1 (pitch >= chord)",
        )?;
        // Modules may turn vertical, so the hub must clear half a chord.
        check_range(
            "layout.height",
            self.height,
            self.height > self.chord / 2.0,
            "> chord / 2 so a vertical module clears the ground",
        )?;
        check_range(
            "layout.bifaciality",
            self.bifaciality,
            (0.0..=1.0).contains(&self.bifaciality),
            "[0, 1]",
        )
    }

    /// Endpoints of row `j`'s chord.
    pub fn chord_endpoints(&self, rotation: &RotationState, j: i64) -> [(f64, f64); 2] {
        let r = to_rad(rotation.rotation);
        let (tu, tz) = (cos(r) * self.chord / 2.0, sin(r) * self.chord / 2.0);
        let cu = j as f64 * self.pitch;
        [(cu - tu, self.height - tz), (cu + tu, self.height + tz)]
    }

    // Rows either side of a viewpoint needed for the far-field sky slivers to be negligible.
    fn row_reach(&self) -> i64 {
        let top = self.height + self.chord / 2.0;
        (ceil(40.0 * top / self.pitch) as i64).max(20)
    }
}

/// Horizontal-plane beam quantities for one timestep, per unit length of row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Sun direction projected into the cross-section `(u, z)`.
    pub sun_u: f64,
    pub sun_z: f64,
    /// Start of row 0's shadow on the ground.
    pub shadow_start: f64,
    /// Shadow length of one chord on the ground (may exceed the pitch).
    pub shadow_len: f64,
}

impl BeamGeometry {
    /// `None` at night or with the module parked.
    pub fn new(layout: &ArrayLayout, rotation: &RotationState, sun: &SunPosition) -> Option<Self> {
        if !sun.is_up || rotation.parked {
            return None;
        }
        let (sun_u, sun_z) = rotation.axis.project(sun);
        if sun_z <= 0.0 {
            return None;
        }
        let slope = sun_u / sun_z;
        let [a, b] = layout.chord_endpoints(rotation, 0);
        let ga = a.0 - a.1 * slope;
        let gb = b.0 - b.1 * slope;
        Some(Self {
            sun_u,
            sun_z,
            shadow_start: ga.min(gb),
            shadow_len: (ga - gb).abs(),
        })
    }

    /// Fraction of the ground reached by the beam.
    pub fn lit_fraction(&self, layout: &ArrayLayout) -> f64 {
        (1.0 - self.shadow_len / layout.pitch).max(0.0)
    }

    /// Fraction of each chord not shaded by its neighbours.
    pub fn unshaded_fraction(&self, layout: &ArrayLayout) -> f64 {
        if self.shadow_len <= layout.pitch {
            1.0
        } else {
            layout.pitch / self.shadow_len
        }
    }

    pub fn is_lit(&self, layout: &ArrayLayout, u: f64) -> bool {
        self.shadow_len < layout.pitch && rem_euclid(u - self.shadow_start, layout.pitch) >= self.shadow_len
    }
}

/// Ground irradiance sampled across one pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundProfile {
    /// Sample positions in `[0, pitch)` measured from a hub.
    pub points: Vec<f64>,
    /// W/m² at each point.
    pub irradiance: Vec<f64>,
    /// Horizontal irradiance with no modules present, W/m².
    pub unshaded_ghi: f64,
}

impl GroundProfile {
    pub fn mean(&self) -> f64 {
        self.irradiance.iter().sum::<f64>() / self.irradiance.len() as f64
    }
}

/// Ground light with modules over ground light without; `None` when there is no light.
pub fn shading_ratio(profile: &GroundProfile) -> Option<f64> {
    (profile.unshaded_ghi > 0.0).then(|| profile.mean() / profile.unshaded_ghi)
}

/// Horizontal irradiance without modules, from the beam and diffuse components.
pub fn unshaded_ghi(dni: f64, dhi: f64, sun: &SunPosition) -> f64 {
    if !sun.is_up {
        return 0.0;
    }
    dni * sun.direction()[2] + dhi
}

pub fn ground_sample_points(layout: &ArrayLayout, k: usize) -> Vec<f64> {
    (0..k).map(|i| (i as f64 + 0.5) * layout.pitch / k as f64).collect()
}

/// Sky view factor of a horizontal ground point at `u`, with all rows in reach occluding.
pub fn ground_sky_view(layout: &ArrayLayout, rotation: &RotationState, u: f64) -> f64 {
    let reach = layout.row_reach();
    let centre = crate::math::round(u / layout.pitch) as i64;
    // Work in sin(angle from zenith); both endpoints of successive rows move
    // monotonically, so intervals arrive sorted by their lower end.
    let mut blocked = 0.0;
    let mut open: Option<(f64, f64)> = None;
    for j in centre - reach..=centre + reach {
        let [a, b] = layout.chord_endpoints(rotation, j);
        let sa = sine_from_zenith(a.0 - u, a.1);
        let sb = sine_from_zenith(b.0 - u, b.1);
        let (lo, hi) = if sa <= sb { (sa, sb) } else { (sb, sa) };
        open = match open {
            Some((olo, ohi)) if lo <= ohi => Some((olo, ohi.max(hi))),
            Some((olo, ohi)) => {
                blocked += ohi - olo;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((lo, hi)) = open {
        blocked += hi - lo;
    }
    (1.0 - blocked / 2.0).clamp(0.0, 1.0)
}

fn sine_from_zenith(du: f64, dz: f64) -> f64 {
    du / sqrt(du * du + dz * dz)
}

/// Sky view factor at each ground sample point.
pub fn ground_sky_views(layout: &ArrayLayout, rotation: &RotationState, k: usize) -> Vec<f64> {
    ground_sample_points(layout, k)
        .into_iter()
        .map(|u| ground_sky_view(layout, rotation, u))
        .collect()
}

/// Ground irradiance profile for one timestep. `k` below 32 is raised to 32.
pub fn ground_profile(
    layout: &ArrayLayout,
    rotation: &RotationState,
    dni: f64,
    dhi: f64,
    sun: &SunPosition,
    k: usize,
) -> GroundProfile {
    let k = k.max(MIN_GROUND_POINTS);
    let views = ground_sky_views(layout, rotation, k);
    ground_profile_with_views(layout, rotation, dni, dhi, sun, &views)
}

/// As [`ground_profile`] with precomputed sky view factors per point.
pub fn ground_profile_with_views(
    layout: &ArrayLayout,
    rotation: &RotationState,
    dni: f64,
    dhi: f64,
    sun: &SunPosition,
    sky_views: &[f64],
) -> GroundProfile {
    let points = ground_sample_points(layout, sky_views.len());
    let beam = BeamGeometry::new(layout, rotation, sun);
    let ghi = unshaded_ghi(dni, dhi, sun);
    let irradiance = points
        .iter()
        .zip(sky_views)
        .map(|(&u, &vf)| {
            if !sun.is_up {
                return 0.0;
            }
            let direct = match &beam {
                Some(b) if b.is_lit(layout, u) => dni * b.sun_z,
                Some(_) => 0.0,
                // Parked modules at night: no beam either way.
                None => 0.0,
            };
            direct + dhi * vf
        })
        .collect();
    GroundProfile {
        points,
        irradiance,
        unshaded_ghi: ghi,
    }
}

/// View factors from one module face to the sky and to the ground.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaceView {
    pub sky: f64,
    pub ground: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModuleViews {
    pub front: FaceView,
    pub rear: FaceView,
}

fn wrap_angle(a: f64) -> f64 {
    let w = rem_euclid(a + PI, 2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

// (sin hi - sin lo) / 2 for angles from the face normal.
fn face_measure(lo: f64, hi: f64) -> f64 {
    (sin(hi) - sin(lo)) / 2.0
}

fn push_clipped(out: &mut Vec<(f64, f64)>, lo: f64, hi: f64) {
    let (lo, hi) = (lo.max(-PI / 2.0), hi.min(PI / 2.0));
    if hi > lo {
        out.push((lo, hi));
    }
}

fn merge(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn face_view(layout: &ArrayLayout, rotation: &RotationState, point: (f64, f64), normal_angle: f64) -> FaceView {
    let reach = layout.row_reach();
    let mut blocked = Vec::with_capacity(2 * reach as usize + 2);
    for j in -reach..=reach {
        if j == 0 {
            continue;
        }
        let [a, b] = layout.chord_endpoints(rotation, j);
        let ba = wrap_angle(atan2(a.0 - point.0, a.1 - point.1) - normal_angle);
        let bb = wrap_angle(atan2(b.0 - point.0, b.1 - point.1) - normal_angle);
        let (lo, hi) = if ba <= bb { (ba, bb) } else { (bb, ba) };
        if hi - lo <= PI {
            push_clipped(&mut blocked, lo, hi);
        } else {
            push_clipped(&mut blocked, hi, PI);
            push_clipped(&mut blocked, -PI, lo);
        }
    }
    let blocked = merge(blocked);

    // Upward directions, expressed as angles from the face normal.
    let centre = -normal_angle;
    let mut sky = Vec::new();
    for c in [centre - 2.0 * PI, centre, centre + 2.0 * PI] {
        push_clipped(&mut sky, c - PI / 2.0, c + PI / 2.0);
    }
    let sky = merge(sky);

    let blocked_total: f64 = blocked.iter().map(|&(lo, hi)| face_measure(lo, hi)).sum();
    let mut sky_free = 0.0;
    for &(slo, shi) in &sky {
        sky_free += face_measure(slo, shi);
        for &(blo, bhi) in &blocked {
            let (lo, hi) = (slo.max(blo), shi.min(bhi));
            if hi > lo {
                sky_free -= face_measure(lo, hi);
            }
        }
    }
    let sky_free = sky_free.clamp(0.0, 1.0);
    FaceView {
        sky: sky_free,
        ground: (1.0 - blocked_total - sky_free).clamp(0.0, 1.0),
    }
}

/// Chord-averaged sky and ground view factors of both module faces.
pub fn module_views(layout: &ArrayLayout, rotation: &RotationState) -> ModuleViews {
    let r = to_rad(rotation.rotation);
    // Absolute direction angles are measured from the zenith toward +u.
    let front_angle = -r;
    let rear_angle = wrap_angle(front_angle + PI);
    let [a, b] = layout.chord_endpoints(rotation, 0);
    let mut views = ModuleViews::default();
    for s in 0..CHORD_SAMPLES {
        let t = (s as f64 + 0.5) / CHORD_SAMPLES as f64;
        let p = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
        let f = face_view(layout, rotation, p, front_angle);
        let k = face_view(layout, rotation, p, rear_angle);
        views.front.sky += f.sky;
        views.front.ground += f.ground;
        views.rear.sky += k.sky;
        views.rear.ground += k.ground;
    }
    let n = CHORD_SAMPLES as f64;
    views.front.sky /= n;
    views.front.ground /= n;
    views.rear.sky /= n;
    views.rear.ground /= n;
    views
}

/// Plane-of-array irradiance on both faces, W/m².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Poa {
    pub front: f64,
    pub rear: f64,
}

impl Poa {
    /// Irradiance converted by a module with the layout's rear-side weight.
    pub fn effective(&self, layout: &ArrayLayout) -> f64 {
        self.front + layout.bifaciality * self.rear
    }
}

/// Front and rear irradiance given the pitch-mean ground irradiance and precomputed views.
#[allow(clippy::too_many_arguments)]
pub fn poa_with_ground(
    layout: &ArrayLayout,
    rotation: &RotationState,
    views: &ModuleViews,
    dni: f64,
    dhi: f64,
    albedo: f64,
    sun: &SunPosition,
    ground_mean: f64,
) -> Poa {
    if !sun.is_up || rotation.parked {
        return Poa::default();
    }
    let (beam_front, beam_rear) = match BeamGeometry::new(layout, rotation, sun) {
        Some(beam) => {
            let cos_i = rotation.cos_incidence(sun);
            let f = beam.unshaded_fraction(layout);
            (dni * cos_i.max(0.0) * f, dni * (-cos_i).max(0.0) * f)
        }
        None => (0.0, 0.0),
    };
    let reflected = albedo * ground_mean;
    Poa {
        front: beam_front + dhi * views.front.sky + reflected * views.front.ground,
        rear: beam_rear + dhi * views.rear.sky + reflected * views.rear.ground,
    }
}

/// Front and rear plane-of-array irradiance for one timestep.
pub fn poa_irradiance(
    layout: &ArrayLayout,
    rotation: &RotationState,
    dni: f64,
    dhi: f64,
    albedo: f64,
    sun: &SunPosition,
) -> Poa {
    let ground = ground_profile(layout, rotation, dni, dhi, sun, DEFAULT_GROUND_POINTS);
    let views = module_views(layout, rotation);
    poa_with_ground(layout, rotation, &views, dni, dhi, albedo, sun, ground.mean())
}

/// Direct-beam flux per pitch and unit row length, W/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamBalance {
    pub incident: f64,
    pub on_modules: f64,
    pub on_ground: f64,
}

/// Splits the beam crossing one pitch between the modules and the ground.
pub fn beam_balance(layout: &ArrayLayout, rotation: &RotationState, dni: f64, sun: &SunPosition) -> BeamBalance {
    match BeamGeometry::new(layout, rotation, sun) {
        Some(beam) => {
            let cos_i = rotation.cos_incidence(sun).abs();
            BeamBalance {
                incident: dni * beam.sun_z * layout.pitch,
                on_modules: dni * cos_i * layout.chord * beam.unshaded_fraction(layout),
                on_ground: dni * beam.sun_z * layout.pitch * beam.lit_fraction(layout),
            }
        }
        None => BeamBalance {
            incident: 0.0,
            on_modules: 0.0,
            on_ground: 0.0,
        },
    }
}
