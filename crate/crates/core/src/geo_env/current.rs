//! Planar current field built from superposed Lamb–Oseen vortices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::GridMap;
use crate::error::{Error, Result};
use crate::rng::{Purpose, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambVortex {
    pub center: [f64; 2],
    /// Signed circulation in m²/s; positive spins counter-clockwise.
    pub circulation: f64,
    pub core_radius: f64,
}

impl LambVortex {
    pub fn new(center: [f64; 2], circulation: f64, core_radius: f64) -> Result<Self> {
        let v = Self { center, circulation, core_radius };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.core_radius > 0.0 && self.core_radius.is_finite()) {
            return Err(Error::Config(format!("vortex core_radius must be positive, got {}", self.core_radius)));
        }
        if !self.circulation.is_finite() || !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::Config("vortex circulation and center must be finite".into()));
        }
        Ok(())
    }

    /// Swirl velocity induced at `p`.
    #[inline]
    pub fn velocity(&self, p: [f64; 2]) -> [f64; 2] {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let r2 = dx * dx + dy * dy;
        let rc2 = self.core_radius * self.core_radius;
        // v_θ / r = Γ (1 - e^{-r²/rc²}) / (2π r²), which tends to Γ / (2π rc²) as r -> 0
        let factor = if r2 < 1e-12 * rc2 {
            // first-order expansion keeps tiny radii exact without 0/0
            self.circulation / (2.0 * PI * rc2) * (1.0 - 0.5 * r2 / rc2)
        } else {
            self.circulation * (-(-r2 / rc2).exp_m1()) / (2.0 * PI * r2)
        };
        [-factor * dy, factor * dx]
    }
}

/// Superposition of vortices on a uniform background flow.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurrentField {
    pub vortices: Vec<LambVortex>,
    pub background: [f64; 2],
    #[serde(skip)]
    cache: Option<CellCache>,
}

#[derive(Debug, Clone, PartialEq)]
struct CellCache {
    map: GridMap,
    uv: Vec<[f64; 2]>,
}

impl CurrentField {
    pub fn new(vortices: Vec<LambVortex>, background: [f64; 2]) -> Result<Self> {
        for v in &vortices {
            v.validate()?;
        }
        Ok(Self { vortices, background, cache: None })
    }

    pub fn still() -> Self {
        Self::default()
    }

    pub fn uniform(background: [f64; 2]) -> Self {
        Self { vortices: Vec::new(), background, cache: None }
    }

    /// Seeded random vortices with centers inside `area` (`[x0, y0, x1, y1]`).
    pub fn random(
        count: usize,
        area: [f64; 4],
        circulation: [f64; 2],
        core_radius: [f64; 2],
        background: [f64; 2],
        seed: u64,
    ) -> Result<Self> {
        let mut rng = Stream::for_purpose(seed, Purpose::Vortices, &[]);
        let vortices = (0..count)
            .map(|_| {
                let center = [rng.uniform_in(area[0], area[2]), rng.uniform_in(area[1], area[3])];
                let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
                let gamma = sign * rng.uniform_in(circulation[0], circulation[1]);
                LambVortex::new(center, gamma, rng.uniform_in(core_radius[0], core_radius[1]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vortices, background)
    }

    /// Analytic velocity at `p`.
    pub fn sample(&self, p: [f64; 2]) -> [f64; 2] {
        let mut u = self.background;
        for v in &self.vortices {
            let s = v.velocity(p);
            u[0] += s[0];
            u[1] += s[1];
        }
        u
    }

    /// Precomputes the cell-center velocity of every cell of `map`; afterwards
    /// [`lookup`](Self::lookup) answers in-map queries from the table.
    pub fn cached_on(mut self, map: &GridMap) -> Self {
        let mut uv = Vec::with_capacity(map.width() * map.height());
        for row in 0..map.height() {
            for col in 0..map.width() {
                uv.push(self.sample(map.cell_center(col, row)));
            }
        }
        self.cache = Some(CellCache { map: map.clone(), uv });
        self
    }

    pub fn is_cached(&self) -> bool {
        self.cache.is_some()
    }

    /// Cell-resolution velocity when a cache covers `p`, analytic otherwise.
    #[inline]
    pub fn lookup(&self, p: [f64; 2]) -> [f64; 2] {
        if let Some(cache) = &self.cache {
            if let Some((c, r)) = cache.map.cell_of(p) {
                return cache.uv[r * cache.map.width() + c];
            }
        }
        self.sample(p)
    }

    pub fn is_still(&self) -> bool {
        self.vortices.iter().all(|v| v.circulation == 0.0) && self.background == [0.0, 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagnitudeStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Speed statistics over the cell centers of water cells.
pub fn current_magnitude_stats(field: &CurrentField, map: &GridMap) -> Result<MagnitudeStats> {
    let mut n = 0usize;
    let mut stats = MagnitudeStats { min: f64::INFINITY, max: f64::NEG_INFINITY, mean: 0.0 };
    let mut sum = 0.0;
    for (c, r) in map.allowed_cells() {
        let [u, v] = field.sample(map.cell_center(c, r));
        let m = u.hypot(v);
        stats.min = stats.min.min(m);
        stats.max = stats.max.max(m);
        sum += m;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyDomain("map has no water cells"));
    }
    stats.mean = sum / n as f64;
    Ok(stats)
}
