//! Brute-force ray casting through an infinite field of module chords.

/// One cross-section: chords of width `chord` with hubs at `(j * pitch, height)`,
/// tilted `rotation` degrees (normal `(-sin r, cos r)`).
#[derive(Debug, Clone, Copy)]
pub struct Field {
    pub pitch: f64,
    pub chord: f64,
    pub height: f64,
    pub rotation: f64,
}

impl Field {
    fn half_tangent(&self) -> (f64, f64) {
        let r = self.rotation.to_radians();
        (r.cos() * self.chord / 2.0, r.sin() * self.chord / 2.0)
    }

    /// Whether the ray from ground point `(u0, 0)` along `(du, dz)`, `dz > 0`, hits any chord.
    pub fn blocked(&self, u0: f64, du: f64, dz: f64) -> bool {
        let (tu, tz) = self.half_tangent();
        let (z_lo, z_hi) = (self.height - tz.abs(), self.height + tz.abs());
        let slope = du / dz;
        let (ua, ub) = (u0 + slope * z_lo, u0 + slope * z_hi);
        let (u_min, u_max) = (ua.min(ub) - tu.abs(), ua.max(ub) + tu.abs());
        let first = (u_min / self.pitch).floor() as i64;
        let last = (u_max / self.pitch).ceil() as i64;
        (first..=last).any(|j| {
            let cu = j as f64 * self.pitch;
            let (ax, az) = (cu - tu, self.height - tz);
            let (bx, bz) = (cu + tu, self.height + tz);
            segment_hit(u0, du, dz, (ax, az), (bx, bz))
        })
    }

    /// Sky view factor of a ground point from `rays` stratified cosine-weighted rays.
    pub fn sky_view(&self, u0: f64, rays: usize) -> f64 {
        let open = (0..rays)
            .filter(|&i| {
                let s = -1.0 + (2.0 * i as f64 + 1.0) / rays as f64;
                let (du, dz) = (s, (1.0 - s * s).sqrt());
                !self.blocked(u0, du, dz)
            })
            .count();
        open as f64 / rays as f64
    }
}

// Ray (u0, 0) + t (du, dz), t > 0, against segment a-b.
fn segment_hit(u0: f64, du: f64, dz: f64, a: (f64, f64), b: (f64, f64)) -> bool {
    let (ex, ez) = (b.0 - a.0, b.1 - a.1);
    let det = du * (-ez) - dz * (-ex);
    if det.abs() < 1e-15 {
        return false;
    }
    let (rx, rz) = (a.0 - u0, a.1);
    let t = (rx * (-ez) - rz * (-ex)) / det;
    let s = (du * rz - dz * rx) / det;
    t > 0.0 && (0.0..=1.0).contains(&s)
}

/// Ground irradiance at `u0` for beam `dni` from profile direction `(su, sz)` and isotropic `dhi`.
pub fn ground_irradiance(field: &Field, u0: f64, dni: f64, dhi: f64, sun: (f64, f64), rays: usize) -> f64 {
    let (su, sz) = sun;
    let beam = if sz > 0.0 && !field.blocked(u0, su, sz) {
        dni * sz
    } else {
        0.0
    };
    beam + dhi * field.sky_view(u0, rays)
}
