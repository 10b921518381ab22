//! Occupancy grid and the raster it is clustered from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Purpose, Stream};

pub const DEFAULT_CELL_SIZE: f64 = 10.0;

/// 8-bit grayscale image, row-major, row 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyDomain("raster has no pixels"));
        }
        if pixels.len() != width * height {
            return Err(Error::Config(format!("raster {width}x{height} needs {} pixels, got {}", width * height, pixels.len())));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

/// Binary occupancy raster: `true` cells are land (forbidden).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    width: usize,
    height: usize,
    cell_size: f64,
    origin: [f64; 2],
    occupancy: Vec<bool>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, cell_size: f64, occupancy: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyDomain("grid map has no cells"));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::Config(format!("cell_size must be positive, got {cell_size}")));
        }
        if occupancy.len() != width * height {
            return Err(Error::Config(format!("occupancy length {} does not match {width}x{height}", occupancy.len())));
        }
        Ok(Self { width, height, cell_size, origin: [0.0, 0.0], occupancy })
    }

    /// All-water map.
    pub fn open(width: usize, height: usize, cell_size: f64) -> Result<Self> {
        Self::new(width, height, cell_size, vec![false; width * height])
    }

    pub fn with_origin(mut self, origin: [f64; 2]) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_cell_size(mut self, cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::Config(format!("cell_size must be positive, got {cell_size}")));
        }
        self.cell_size = cell_size;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    /// World extent `[x_max, y_max]` of the far corner.
    pub fn extent(&self) -> [f64; 2] {
        [self.origin[0] + self.width as f64 * self.cell_size, self.origin[1] + self.height as f64 * self.cell_size]
    }

    pub fn occupied(&self, col: usize, row: usize) -> bool {
        self.occupancy[row * self.width + col]
    }

    pub fn set_occupied(&mut self, col: usize, row: usize, value: bool) {
        self.occupancy[row * self.width + col] = value;
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    /// Cell containing `p`. Shared edges belong to the higher-index cell.
    pub fn cell_of(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let fx = ((p[0] - self.origin[0]) / self.cell_size).floor();
        let fy = ((p[1] - self.origin[1]) / self.cell_size).floor();
        if !(fx >= 0.0 && fy >= 0.0) || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn cell_center(&self, col: usize, row: usize) -> [f64; 2] {
        [self.origin[0] + (col as f64 + 0.5) * self.cell_size, self.origin[1] + (row as f64 + 0.5) * self.cell_size]
    }

    /// Land or outside the map.
    pub fn is_forbidden(&self, p: [f64; 2]) -> bool {
        match self.cell_of(p) {
            Some((c, r)) => self.occupied(c, r),
            None => true,
        }
    }

    pub fn allowed_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| (c, r))).filter(move |&(c, r)| !self.occupied(c, r))
    }

    /// Black land on white water, the inverse of [`cluster_map`].
    pub fn to_raster(&self) -> Raster {
        let pixels = self.occupancy.iter().map(|&o| if o { 0 } else { 255 }).collect();
        Raster { width: self.width, height: self.height, pixels }
    }
}

/// Result of 1-D k-means over pixel intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centroids: Vec<f64>,
    /// Cluster index per pixel.
    pub labels: Vec<usize>,
    pub iterations: usize,
}

/// Lloyd's algorithm on scalar intensities.
///
/// Initial centroids are `k` distinct pixel values chosen by a seeded draw.
/// Assignment ties go to the lower-index centroid; an empty cluster keeps its
/// previous centroid.
pub fn kmeans_intensity(raster: &Raster, k: usize, max_iters: usize, seed: u64) -> Result<Clustering> {
    if raster.pixels.is_empty() {
        return Err(Error::EmptyDomain("raster has no pixels"));
    }
    if k == 0 || max_iters == 0 {
        return Err(Error::Config("k and max_iters must be at least 1".into()));
    }
    let mut histogram = [0u64; 256];
    for &p in &raster.pixels {
        histogram[p as usize] += 1;
    }
    let mut distinct: Vec<u8> = (0..=255u8).filter(|&v| histogram[v as usize] > 0).collect();
    if distinct.len() < k {
        return Err(Error::DegenerateClustering { distinct: distinct.len(), k });
    }

    let mut rng = Stream::for_purpose(seed, Purpose::Clustering, &[]);
    for i in 0..k {
        let j = i + rng.index(distinct.len() - i);
        distinct.swap(i, j);
    }
    let mut centroids: Vec<f64> = distinct[..k].iter().map(|&v| v as f64).collect();

    // Every pixel of one intensity lands in the same cluster, so Lloyd runs on
    // the 256-bin histogram.
    let assign = |centroids: &[f64]| -> [usize; 256] {
        let mut label = [0usize; 256];
        for v in 0..256 {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, &m) in centroids.iter().enumerate() {
                let d = (v as f64 - m).abs();
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            label[v] = best;
        }
        label
    };

    let mut label = assign(&centroids);
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        let mut sum = vec![0.0; k];
        let mut count = vec![0u64; k];
        for v in 0..256 {
            if histogram[v] > 0 {
                sum[label[v]] += v as f64 * histogram[v] as f64;
                count[label[v]] += histogram[v];
            }
        }
        for c in 0..k {
            if count[c] > 0 {
                centroids[c] = sum[c] / count[c] as f64;
            }
        }
        let next = assign(&centroids);
        let changed = (0..256).any(|v| histogram[v] > 0 && next[v] != label[v]);
        label = next;
        if !changed {
            break;
        }
    }

    let labels = raster.pixels.iter().map(|&p| label[p as usize]).collect();
    Ok(Clustering { centroids, labels, iterations })
}

/// Clusters a grayscale raster into a land/water grid. The darkest cluster is
/// land; with `k == 1` there is nothing darker and every cell is water.
pub fn cluster_map(raster: &Raster, k: usize, max_iters: usize, seed: u64) -> Result<GridMap> {
    let clustering = kmeans_intensity(raster, k, max_iters, seed)?;
    let occupancy = if k == 1 {
        vec![false; raster.pixels.len()]
    } else {
        let darkest = clustering.centroids.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
        clustering.labels.iter().map(|&l| l == darkest).collect()
    };
    GridMap::new(raster.width, raster.height, DEFAULT_CELL_SIZE, occupancy)
}

/// Parameters for the seeded land-blob generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticTerrain {
    pub width: usize,
    pub height: usize,
    #[serde(default = "default_blobs")]
    pub blobs: usize,
    /// Blob radius range in cells.
    #[serde(default = "default_blob_radius")]
    pub blob_radius: [f64; 2],
    /// Width in cells of a coastal strip along the left and top edges; 0 disables it.
    #[serde(default)]
    pub coast: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_blobs() -> usize {
    8
}

fn default_blob_radius() -> [f64; 2] {
    [6.0, 18.0]
}

impl SyntheticTerrain {
    /// Renders a grayscale raster: noisy dark land blobs on flat bright water. Pixels within `clear` cells of any point in
    /// `keep_clear` (given in cell coordinates) stay water.
    pub fn raster(&self, keep_clear: &[([f64; 2], f64)]) -> Result<Raster> {
        let (w, h) = (self.width, self.height);
        if w == 0 || h == 0 {
            return Err(Error::EmptyDomain("synthetic terrain has no cells"));
        }
        let mut rng = Stream::for_purpose(self.seed, Purpose::Terrain, &[]);
        let blobs: Vec<([f64; 2], f64, [f64; 3])> = (0..self.blobs)
            .map(|_| {
                let c = [rng.uniform() * w as f64, rng.uniform() * h as f64];
                let r = rng.uniform_in(self.blob_radius[0], self.blob_radius[1]);
                // lobes make the outline less circular
                let lobes = [rng.uniform_in(0.0, 0.35), rng.uniform_in(0.0, 6.3), rng.uniform_in(2.0, 5.0)];
                (c, r, lobes)
            })
            .collect();
        let coast_phase = rng.uniform_in(0.0, 6.3);

        let mut pixels = Vec::with_capacity(w * h);
        for row in 0..h {
            for col in 0..w {
                let p = [col as f64 + 0.5, row as f64 + 0.5];
                let mut land = blobs.iter().any(|&(c, r, [amp, phase, freq])| {
                    let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
                    let ang = dy.atan2(dx);
                    let reach = r * (1.0 + amp * (freq.round() * ang + phase).sin());
                    dx * dx + dy * dy <= reach * reach
                });
                if self.coast > 0 {
                    let wobble = 0.3 * self.coast as f64 * (p[0] / 17.0 + coast_phase).sin();
                    let edge = (self.coast as f64 + wobble).max(1.0);
                    land |= p[0] < edge || p[1] < edge;
                }
                let clear = keep_clear.iter().any(|&(c, rad)| {
                    let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
                    dx * dx + dy * dy <= rad * rad
                });
                if clear {
                    land = false;
                }
                let noise = (rng.uniform() * 30.0) as u8;
                pixels.push(if land { 25 + noise } else { 220 });
            }
        }
        Raster::new(w, h, pixels)
    }
}

/// Reads a binary (P5) 8-bit PGM.
pub fn read_pgm(bytes: &[u8]) -> Result<Raster> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // whitespace and comments between header tokens
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Pgm("truncated header".into()));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| Error::Pgm("non-ASCII header".into()))?);
    }
    if fields[0] != "P5" {
        return Err(Error::Pgm(format!("unsupported magic {:?}, expected P5", fields[0])));
    }
    let parse = |s: &str, what: &str| -> Result<usize> { s.parse().map_err(|_| Error::Pgm(format!("bad {what} {s:?}"))) };
    let width = parse(fields[1], "width")?;
    let height = parse(fields[2], "height")?;
    let maxval = parse(fields[3], "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!("maxval {maxval} unsupported, need 1..=255")));
    }
    // exactly one whitespace byte separates the header from the data
    pos += 1;
    let n = width * height;
    if bytes.len() < pos + n {
        return Err(Error::Pgm(format!("expected {n} data bytes, found {}", bytes.len().saturating_sub(pos))));
    }
    let pixels = bytes[pos..pos + n]
        .iter()
        .map(|&b| if maxval == 255 { b } else { ((b as usize * 255 + maxval / 2) / maxval) as u8 })
        .collect();
    Raster::new(width, height, pixels)
}

pub fn write_pgm(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend_from_slice(&raster.pixels);
    out
}
