//! Antenna array layouts.
//!
//! Two layouts are supported: the on-screen uniform planar grid and the
//! edge-mounted baseline that spreads the same number of elements along the
//! chassis perimeter. Downstream code only consumes the pairwise distance
//! matrix, so absolute placement does not affect any channel statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// On-screen grid of `sx × sy` elements with uniform spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenArrayConfig<T> {
    /// Elements along x.
    pub sx: usize,
    /// Elements along y.
    pub sy: usize,
    /// Element spacing in meters.
    pub spacing: T,
}

impl<T: Scalar> ScreenArrayConfig<T> {
    pub fn new(sx: usize, sy: usize, spacing: T) -> Result<Self> {
        let cfg = Self { sx, sy, spacing };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sx == 0 || self.sy == 0 {
            return Err(Error::InvalidConfig(format!(
                "screen grid must have at least one element per axis, got {}x{}",
                self.sx, self.sy
            )));
        }
        if !(self.spacing > T::zero() && self.spacing.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "element spacing must be positive, got {}",
                self.spacing
            )));
        }
        Ok(())
    }

    pub fn elements(&self) -> usize {
        self.sx * self.sy
    }
}

/// Edge-mounted baseline: `elements` points on a `chassis_width × chassis_height` rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeArrayConfig<T> {
    pub elements: usize,
    pub chassis_width: T,
    pub chassis_height: T,
}

impl<T: Scalar> EdgeArrayConfig<T> {
    pub fn new(elements: usize, chassis_width: T, chassis_height: T) -> Result<Self> {
        let cfg = Self {
            elements,
            chassis_width,
            chassis_height,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements == 0 {
            return Err(Error::InvalidConfig(
                "edge array needs at least one element".into(),
            ));
        }
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.chassis_width) || !positive(self.chassis_height) {
            return Err(Error::InvalidConfig(format!(
                "chassis dimensions must be positive, got {} x {}",
                self.chassis_width, self.chassis_height
            )));
        }
        Ok(())
    }

    pub fn perimeter(&self) -> T {
        T::lit(2.0) * (self.chassis_width + self.chassis_height)
    }

    /// Arc-length position of every element, measured clockwise from the top-left corner.
    pub fn arc_lengths(&self) -> Vec<T> {
        let step = self.perimeter() / T::from_usize_lossy(self.elements);
        (0..self.elements)
            .map(|i| T::from_usize_lossy(i) * step)
            .collect()
    }
}

/// How elements are arranged, which decides the blockage patterns that apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Row-major grid; element `s` (0-based) sits in column `s % cols`, row `s / cols`.
    Grid { cols: usize, rows: usize },
    /// Elements listed in clockwise perimeter order.
    Perimeter,
}

impl Layout {
    pub fn name(&self) -> &'static str {
        match self {
            Layout::Grid { .. } => "grid",
            Layout::Perimeter => "perimeter",
        }
    }
}

/// Element coordinates together with their pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry<T> {
    coords: Vec<Point<T>>,
    distances: Matrix<T>,
    layout: Layout,
}

impl<T: Scalar> ArrayGeometry<T> {
    pub fn from_points(coords: Vec<Point<T>>, layout: Layout) -> Self {
        let distances = pairwise_distances(&coords);
        Self {
            coords,
            distances,
            layout,
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Point<T>] {
        &self.coords
    }

    pub fn distances(&self) -> &Matrix<T> {
        &self.distances
    }

    pub fn distance(&self, s: usize, t: usize) -> T {
        self.distances.get(s, t)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn centroid(&self) -> Point<T> {
        let n = T::from_usize_lossy(self.len().max(1));
        Point::new(
            self.coords.iter().map(|p| p.x).sum::<T>() / n,
            self.coords.iter().map(|p| p.y).sum::<T>() / n,
        )
    }

    /// Same geometry shifted by `(dx, dy)`; distances are recomputed from the new coordinates.
    pub fn translated(&self, dx: T, dy: T) -> Self {
        let coords = self
            .coords
            .iter()
            .map(|p| Point::new(p.x + dx, p.y + dy))
            .collect();
        Self::from_points(coords, self.layout)
    }

    /// Shifts the layout so its centroid sits at the origin (presentation only).
    pub fn centered(&self) -> Self {
        let c = self.centroid();
        let coords = self
            .coords
            .iter()
            .map(|p| Point::new(p.x - c.x, p.y - c.y))
            .collect();
        Self {
            coords,
            distances: self.distances.clone(),
            layout: self.layout,
        }
    }
}

fn pairwise_distances<T: Scalar>(coords: &[Point<T>]) -> Matrix<T> {
    let n = coords.len();
    let mut d = Matrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = coords[i].distance(&coords[j]);
            d.set(i, j, v);
            d.set(j, i, v);
        }
    }
    d
}

/// On-screen grid coordinates.
///
/// Element `s ∈ {1..S}` maps to column index `mod(s−1, sx)+1` and row index
/// `⌊(s−1)/sx⌋+1`, and lies at `x = d(−(sx−1)/2 + col)`, `y = d((sy−1)/2 − row)`.
/// This mapping is kept exactly, so the grid's centroid sits at `(d, −d)`
/// rather than the origin; use [`ArrayGeometry::centered`] for plotting.
pub fn screen_layout<T: Scalar>(cfg: &ScreenArrayConfig<T>) -> Result<ArrayGeometry<T>> {
    cfg.validate()?;
    let half = T::lit(0.5);
    let x0 = -T::from_usize_lossy(cfg.sx - 1) * half;
    let y0 = T::from_usize_lossy(cfg.sy - 1) * half;
    let coords = (0..cfg.elements())
        .map(|s| {
            let col = T::from_usize_lossy(s % cfg.sx + 1);
            let row = T::from_usize_lossy(s / cfg.sx + 1);
            Point::new(cfg.spacing * (x0 + col), cfg.spacing * (y0 - row))
        })
        .collect();
    Ok(ArrayGeometry::from_points(
        coords,
        Layout::Grid {
            cols: cfg.sx,
            rows: cfg.sy,
        },
    ))
}

/// Point at arc length `arc` along a `width × height` rectangle centered on the
/// origin, walking clockwise from the top-left corner.
pub fn perimeter_point<T: Scalar>(width: T, height: T, arc: T) -> Point<T> {
    let half = T::lit(0.5);
    let (left, right) = (-width * half, width * half);
    let (top, bottom) = (height * half, -height * half);
    let arc = arc % (T::lit(2.0) * (width + height));
    if arc < width {
        Point::new(left + arc, top)
    } else if arc < width + height {
        Point::new(right, top - (arc - width))
    } else if arc < width + width + height {
        Point::new(right - (arc - width - height), bottom)
    } else {
        Point::new(left, bottom + (arc - width - width - height))
    }
}

/// Edge-mounted layout: elements at equal arc-length intervals along the chassis perimeter.
pub fn edge_layout<T: Scalar>(cfg: &EdgeArrayConfig<T>) -> Result<ArrayGeometry<T>> {
    cfg.validate()?;
    let coords = cfg
        .arc_lengths()
        .into_iter()
        .map(|arc| perimeter_point(cfg.chassis_width, cfg.chassis_height, arc))
        .collect();
    Ok(ArrayGeometry::from_points(coords, Layout::Perimeter))
}
