//! Planar currents given by a piecewise-constant vector field on a rectangular grid:
//! `T(f dπ) = ∫ f ⟨∇π, l⟩ dx`.

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::space::{EmbeddedSpace, Norm};

#[derive(Debug, Clone, PartialEq)]
pub struct GridCurrent {
    rect: [f64; 4],
    nx: usize,
    ny: usize,
    /// Row-major by cell: index `j * nx + i` for column `i`, row `j`.
    field: Vec<[f64; 2]>,
    norm: Norm,
}

impl GridCurrent {
    pub fn new(
        rect: [f64; 4],
        shape: (usize, usize),
        field: Vec<[f64; 2]>,
        norm: Norm,
    ) -> Result<Self> {
        let [x0, y0, x1, y1] = rect;
        if rect.iter().any(|v| !v.is_finite()) || !(x1 > x0) || !(y1 > y0) {
            return Err(Error::InvalidGrid(format!("degenerate rectangle {rect:?}")));
        }
        let (nx, ny) = shape;
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGrid(
                "grid needs at least one cell per axis".into(),
            ));
        }
        if field.len() != nx * ny {
            return Err(Error::InvalidGrid(format!(
                "field has {} cells, shape {nx}x{ny} needs {}",
                field.len(),
                nx * ny
            )));
        }
        if field.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid field entry".into()));
        }
        Ok(Self {
            rect,
            nx,
            ny,
            field,
            norm,
        })
    }

    pub fn constant(
        rect: [f64; 4],
        shape: (usize, usize),
        l: [f64; 2],
        norm: Norm,
    ) -> Result<Self> {
        Self::new(rect, shape, vec![l; shape.0 * shape.1], norm)
    }

    /// Builds a grid by averaging `l` over each cell with `samples²` midpoint samples.
    pub fn from_fn(
        rect: [f64; 4],
        shape: (usize, usize),
        norm: Norm,
        samples: usize,
        l: impl Fn(f64, f64) -> [f64; 2],
    ) -> Result<Self> {
        let samples = samples.max(1);
        let (nx, ny) = shape;
        let hx = (rect[2] - rect[0]) / nx as f64;
        let hy = (rect[3] - rect[1]) / ny as f64;
        let mut field = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let mut acc = [0.0, 0.0];
                for a in 0..samples {
                    for b in 0..samples {
                        let x = rect[0] + hx * (i as f64 + (a as f64 + 0.5) / samples as f64);
                        let y = rect[1] + hy * (j as f64 + (b as f64 + 0.5) / samples as f64);
                        let v = l(x, y);
                        acc[0] += v[0];
                        acc[1] += v[1];
                    }
                }
                let k = (samples * samples) as f64;
                field.push([acc[0] / k, acc[1] / k]);
            }
        }
        Self::new(rect, shape, field, norm)
    }

    pub fn rect(&self) -> [f64; 4] {
        self.rect
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn field(&self) -> &[[f64; 2]] {
        &self.field
    }

    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.rect[2] - self.rect[0]) / self.nx as f64,
            (self.rect[3] - self.rect[1]) / self.ny as f64,
        )
    }

    pub fn cell_area(&self) -> f64 {
        let (hx, hy) = self.cell_size();
        hx * hy
    }

    pub fn cell(&self, i: usize, j: usize) -> [f64; 2] {
        self.field[j * self.nx + i]
    }

    /// `[x0, y0, x1, y1]` of cell `(i, j)`. Shared faces get bitwise-identical coordinates.
    pub fn cell_rect(&self, i: usize, j: usize) -> [f64; 4] {
        let [x0, y0, ..] = self.node(i, j);
        let [x1, y1, ..] = self.node(i + 1, j + 1);
        [x0, y0, x1, y1]
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let x = if i == self.nx {
            self.rect[2]
        } else {
            self.rect[0] + (self.rect[2] - self.rect[0]) * i as f64 / self.nx as f64
        };
        let y = if j == self.ny {
            self.rect[3]
        } else {
            self.rect[1] + (self.rect[3] - self.rect[1]) * j as f64 / self.ny as f64
        };
        [x, y]
    }

    /// The grid nodes as an embedded space, indexed by [`node_index`](Self::node_index).
    pub fn node_space(&self) -> EmbeddedSpace {
        let mut pts = Vec::with_capacity(self.node_count());
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                pts.push(self.node(i, j).to_vec());
            }
        }
        EmbeddedSpace::new(2, self.norm, pts).expect("grid nodes are distinct")
    }

    /// `Σ ‖l‖ · cell area`.
    pub fn mass(&self) -> f64 {
        let area = self.cell_area();
        self.field
            .iter()
            .map(|l| self.norm.of(l) * area)
            .fold(0.0, |acc, x| acc + x)
    }

    /// Boundary tested against the bilinear hat function of each node:
    /// the atom at node `k` is `∫ ⟨∇φ_k, l⟩ dx`.
    pub fn boundary(&self) -> AtomicMeasure {
        let (hx, hy) = self.cell_size();
        let mut pairs = Vec::with_capacity(4 * self.field.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                let [lx, ly] = self.cell(i, j);
                if lx == 0.0 && ly == 0.0 {
                    continue;
                }
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let gx = if di == 0 { -0.5 * hy } else { 0.5 * hy };
                    let gy = if dj == 0 { -0.5 * hx } else { 0.5 * hx };
                    pairs.push((self.node_index(i + di, j + dj), lx * gx + ly * gy));
                }
            }
        }
        AtomicMeasure::from_pairs(pairs)
    }

    /// Fine discretization of the boundary as a measure on cell faces: the normal jump of
    /// `l` across every face, sampled at `samples` midpoints per face.
    pub fn face_flux_samples(&self, samples: usize) -> Vec<([f64; 2], f64)> {
        let samples = samples.max(1);
        let (hx, hy) = self.cell_size();
        let mut out = Vec::new();
        // vertical faces: x = node(i, ·), between cells (i-1, j) and (i, j)
        for j in 0..self.ny {
            for i in 0..=self.nx {
                let left = if i > 0 { self.cell(i - 1, j)[0] } else { 0.0 };
                let right = if i < self.nx { self.cell(i, j)[0] } else { 0.0 };
                let jump = left - right;
                if jump == 0.0 {
                    continue;
                }
                let [x, y0] = self.node(i, j);
                for s in 0..samples {
                    let y = y0 + hy * (s as f64 + 0.5) / samples as f64;
                    out.push(([x, y], jump * hy / samples as f64));
                }
            }
        }
        // horizontal faces: y = node(·, j), between cells (i, j-1) and (i, j)
        for j in 0..=self.ny {
            for i in 0..self.nx {
                let below = if j > 0 { self.cell(i, j - 1)[1] } else { 0.0 };
                let above = if j < self.ny { self.cell(i, j)[1] } else { 0.0 };
                let jump = below - above;
                if jump == 0.0 {
                    continue;
                }
                let [x0, y] = self.node(i, j);
                for s in 0..samples {
                    let x = x0 + hx * (s as f64 + 0.5) / samples as f64;
                    out.push(([x, y], jump * hx / samples as f64));
                }
            }
        }
        out
    }
}
