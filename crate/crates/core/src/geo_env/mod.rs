//! Operating terrain: land/water grid, current field and uncertain obstacles.

mod current;
mod grid;
mod obstacles;

pub use current::{current_magnitude_stats, CurrentField, LambVortex, MagnitudeStats};
pub use grid::{
    cluster_map, kmeans_intensity, read_pgm, write_pgm, Clustering, GridMap, Raster, SyntheticTerrain, DEFAULT_CELL_SIZE,
};
pub use obstacles::{Obstacle, ObstacleKind, ObstacleSet, RealizedObstacle, DEFAULT_RADIUS_SIGMA};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use proptest::prelude::*;

    /// Central-difference divergence at `p` with step `h`.
    fn divergence(field: &CurrentField, p: [f64; 2], h: f64) -> f64 {
        let du = field.sample([p[0] + h, p[1]])[0] - field.sample([p[0] - h, p[1]])[0];
        let dv = field.sample([p[0], p[1] + h])[1] - field.sample([p[0], p[1] - h])[1];
        (du + dv) / (2.0 * h)
    }

    #[test]
    fn random_fields_are_divergence_free() {
        let map = GridMap::open(100, 100, 10.0).unwrap();
        let h = map.cell_size() / 10.0;
        for seed in 0..5 {
            let field =
                CurrentField::random(6, [0.0, 0.0, 1000.0, 1000.0], [300.0, 1500.0], [50.0, 200.0], [0.2, 0.1], seed).unwrap();
            let max = current_magnitude_stats(&field, &map).unwrap().max;
            let mut rng = Stream::new(seed, &[1]);
            for _ in 0..100 {
                let p = [rng.uniform_in(0.0, 1000.0), rng.uniform_in(0.0, 1000.0)];
                assert!(divergence(&field, p, h).abs() <= 1e-6 * max / h);
            }
        }
    }

    proptest! {
        #[test]
        fn realized_radius_stays_in_bounds(
            base in 1.0f64..100.0,
            lo_off in 0.0f64..50.0,
            width in 0.0f64..80.0,
            sigma in 0.0f64..60.0,
            seed in any::<u64>(),
            steps in 1usize..20,
            u in -2.0f64..2.0,
            v in -2.0f64..2.0,
        ) {
            let lo = (base - lo_off).max(0.5);
            let bounds = [lo, lo + width];
            let set = ObstacleSet::new(vec![
                Obstacle::fixed([0.0, 0.0, 0.0], base, bounds).with_sigma(sigma),
                Obstacle::moving([10.0, 10.0, 0.0], base, bounds, [u, v], true).with_sigma(sigma),
            ]).unwrap();
            let field = CurrentField::uniform([u, v]);
            let mut cur = set;
            for epoch in 0..steps as u64 {
                for r in cur.realize(seed, epoch) {
                    prop_assert!(r.radius >= bounds[0] && r.radius <= bounds[1]);
                }
                cur = cur.advance(&field, 3.0, 1.5);
            }
        }
    }
}
