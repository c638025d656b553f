//! Bounded domains and the uniform Cartesian grids that discretize them.
//!
//! A [`GridDomain`] is a box of nodes with spacing `h`. Nodes strictly inside
//! the region are the degrees of freedom; every other node carries the value
//! zero, which is how the homogeneous Dirichlet condition is imposed. The
//! integration cells are all grid cells having at least one interior corner,
//! i.e. the support of any grid function's multilinear interpolant.

use crate::error::{Error, Result};

/// Points are stored in three slots; unused trailing coordinates are zero.
pub type Point = [f64; 3];

/// An invertible (or not) linear map of R^n, n <= 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap {
    dim: usize,
    m: [[f64; 3]; 3],
}

impl LinearMap {
    pub fn identity(dim: usize) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        LinearMap { dim, m }
    }

    /// Builds a map from row-major entries; `rows` must be square with n in {1, 2, 3}.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if !(1..=3).contains(&dim) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidSpec(format!(
                "matrix must be square with size 1..=3, got {} rows",
                dim
            )));
        }
        let mut m = [[0.0; 3]; 3];
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] = rows[i][j];
            }
        }
        Ok(LinearMap { dim, m })
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut lm = LinearMap::identity(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            lm.m[i][i] = e;
        }
        lm
    }

    /// A scalar multiple of the identity.
    pub fn scaling(dim: usize, s: f64) -> Self {
        LinearMap::diag(&vec![s; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        match self.dim {
            1 => m[0][0],
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            }
        }
    }

    /// Fails with [`Error::SingularMatrix`] when `|det| < 1e-12`.
    pub fn check_invertible(&self) -> Result<()> {
        let det = self.det();
        if !(det.abs() >= 1e-12) {
            return Err(Error::SingularMatrix { det });
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.check_invertible()?;
        let det = self.det();
        let m = &self.m;
        let mut inv = [[0.0; 3]; 3];
        match self.dim {
            1 => inv[0][0] = 1.0 / m[0][0],
            2 => {
                inv[0][0] = m[1][1] / det;
                inv[0][1] = -m[0][1] / det;
                inv[1][0] = -m[1][0] / det;
                inv[1][1] = m[0][0] / det;
            }
            _ => {
                for i in 0..3 {
                    for j in 0..3 {
                        // cofactor of (j, i)
                        let r: Vec<usize> = (0..3).filter(|&k| k != j).collect();
                        let c: Vec<usize> = (0..3).filter(|&k| k != i).collect();
                        let minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]];
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        inv[i][j] = sign * minor / det;
                    }
                }
            }
        }
        Ok(LinearMap { dim: self.dim, m: inv })
    }

    pub fn apply(&self, x: &Point) -> Point {
        let mut y = [0.0; 3];
        for i in 0..self.dim {
            let mut s = 0.0;
            for j in 0..self.dim {
                s += self.m[i][j] * x[j];
            }
            y[i] = s;
        }
        y
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut s = 0.0;
                for k in 0..self.dim {
                    s += self.m[i][k] * other.m[k][j];
                }
                m[i][j] = s;
            }
        }
        LinearMap { dim: self.dim, m }
    }

    pub fn transpose(&self) -> LinearMap {
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[i][j] = self.m[j][i];
            }
        }
        LinearMap { dim: self.dim, m }
    }
}

/// Analytic description of a bounded open set.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// Axis-aligned box `|x_i - c_i| < a_i`.
    Rectangle { center: Vec<f64>, half_axes: Vec<f64> },
    /// Open ball (a disk when n = 2).
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned ellipse / ellipsoid.
    Ellipsoid { center: Vec<f64>, half_axes: Vec<f64> },
    /// Simple closed polygon in the plane, membership by even–odd ray casting.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        DomainSpec::Rectangle { center: vec![0.5, 0.5], half_axes: vec![0.5, 0.5] }
    }

    pub fn unit_ball(dim: usize) -> Self {
        DomainSpec::Ball { center: vec![0.0; dim], radius: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Rectangle { center, .. }
            | DomainSpec::Ball { center, .. }
            | DomainSpec::Ellipsoid { center, .. } => center.len(),
            DomainSpec::Polygon { .. } => 2,
        }
    }

    /// Checks parameter signs and dimensions. Zero extents are accepted and
    /// surface later as [`Error::EmptyDomain`].
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self {
            DomainSpec::Rectangle { center, half_axes } | DomainSpec::Ellipsoid { center, half_axes } => {
                if !(2..=3).contains(&center.len()) {
                    return bad(format!("dimension must be 2 or 3, got {}", center.len()));
                }
                if half_axes.len() != center.len() {
                    return bad("half_axes and center differ in length".into());
                }
                if center.iter().chain(half_axes).any(|v| !v.is_finite()) {
                    return bad("non-finite parameter".into());
                }
                if half_axes.iter().any(|&a| a < 0.0) {
                    return bad("half axes must be non-negative".into());
                }
                Ok(())
            }
            DomainSpec::Ball { center, radius } => {
                if !(2..=3).contains(&center.len()) {
                    return bad(format!("dimension must be 2 or 3, got {}", center.len()));
                }
                if !radius.is_finite() || *radius < 0.0 || center.iter().any(|v| !v.is_finite()) {
                    return bad("radius must be finite and non-negative".into());
                }
                Ok(())
            }
            DomainSpec::Polygon { vertices } => {
                let ring = polygon_ring(vertices);
                if ring.len() < 3 {
                    return bad("polygon needs at least three vertices".into());
                }
                if ring.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("non-finite polygon vertex".into());
                }
                if signed_area(&ring).abs() < 1e-300 {
                    return bad("polygon has zero area".into());
                }
                if !is_simple(&ring) {
                    return bad("polygon is not simple".into());
                }
                Ok(())
            }
        }
    }

    /// Lower and upper corners of an axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        match self {
            DomainSpec::Rectangle { center, half_axes } | DomainSpec::Ellipsoid { center, half_axes } => {
                for i in 0..center.len() {
                    lo[i] = center[i] - half_axes[i];
                    hi[i] = center[i] + half_axes[i];
                }
            }
            DomainSpec::Ball { center, radius } => {
                for i in 0..center.len() {
                    lo[i] = center[i] - radius;
                    hi[i] = center[i] + radius;
                }
            }
            DomainSpec::Polygon { vertices } => {
                lo = [f64::INFINITY, f64::INFINITY, 0.0];
                hi = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0];
                for v in vertices {
                    for i in 0..2 {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
            }
        }
        (lo, hi)
    }

    /// Strict membership: `x` must lie inside by more than `margin`.
    pub fn contains(&self, x: &Point, margin: f64) -> bool {
        match self {
            DomainSpec::Rectangle { center, half_axes } => {
                (0..center.len()).all(|i| (x[i] - center[i]).abs() < half_axes[i] - margin)
            }
            DomainSpec::Ball { center, radius } => {
                let r2: f64 = (0..center.len()).map(|i| (x[i] - center[i]).powi(2)).sum();
                r2.sqrt() < radius - margin
            }
            DomainSpec::Ellipsoid { center, half_axes } => {
                if half_axes.iter().any(|&a| a <= 0.0) {
                    return false;
                }
                let amax = half_axes.iter().copied().fold(0.0, f64::max);
                let s: f64 = (0..center.len()).map(|i| ((x[i] - center[i]) / half_axes[i]).powi(2)).sum();
                s.sqrt() < 1.0 - margin / amax
            }
            DomainSpec::Polygon { vertices } => {
                let ring = polygon_ring(vertices);
                let p = [x[0], x[1]];
                if !ray_cast_inside(&ring, p) {
                    return false;
                }
                let tol = margin.max(0.0) + 1e-13 * bbox_scale(&ring);
                (0..ring.len()).all(|k| segment_distance(p, ring[k], ring[(k + 1) % ring.len()]) > tol)
            }
        }
    }

    /// Boundary points with outward unit normals, sampled deterministically.
    /// Fails with [`Error::UnsupportedShape`] when a polygon edge has zero
    /// length, so that no normal is defined there.
    /// A Lipschitz function that is positive inside, zero on the boundary and
    /// negative outside. Exact distance for balls, boxes and polygons.
    pub fn depth(&self, x: &Point) -> f64 {
        let n = self.dim();
        match self {
            DomainSpec::Ball { center, radius } => {
                radius - (0..n).map(|i| (x[i] - center[i]).powi(2)).sum::<f64>().sqrt()
            }
            DomainSpec::Rectangle { center, half_axes } => {
                (0..n).map(|i| half_axes[i] - (x[i] - center[i]).abs()).fold(f64::INFINITY, f64::min)
            }
            DomainSpec::Ellipsoid { center, half_axes } => {
                let rho = (0..n).map(|i| ((x[i] - center[i]) / half_axes[i]).powi(2)).sum::<f64>().sqrt();
                let amin = half_axes.iter().copied().fold(f64::INFINITY, f64::min);
                (1.0 - rho) * amin
            }
            DomainSpec::Polygon { vertices } => {
                let ring = polygon_ring(vertices);
                let p = [x[0], x[1]];
                let d = (0..ring.len())
                    .map(|k| segment_distance(p, ring[k], ring[(k + 1) % ring.len()]))
                    .fold(f64::INFINITY, f64::min);
                if ray_cast_inside(&ring, p) {
                    d
                } else {
                    -d
                }
            }
        }
    }

    pub fn boundary_samples(&self) -> Result<Vec<(Point, Point)>> {
        let mut out = Vec::new();
        match self {
            DomainSpec::Ball { center, radius } => {
                for d in sphere_sample_directions(center.len()) {
                    let mut x = [0.0; 3];
                    for i in 0..center.len() {
                        x[i] = center[i] + radius * d[i];
                    }
                    out.push((x, d));
                }
            }
            DomainSpec::Ellipsoid { center, half_axes } => {
                for d in sphere_sample_directions(center.len()) {
                    let mut x = [0.0; 3];
                    let mut nrm = [0.0; 3];
                    for i in 0..center.len() {
                        x[i] = center[i] + half_axes[i] * d[i];
                        nrm[i] = d[i] / half_axes[i];
                    }
                    out.push((x, normalize(nrm)));
                }
            }
            DomainSpec::Rectangle { center, half_axes } => {
                let n = center.len();
                const K: usize = 9;
                for axis in 0..n {
                    for sign in [-1.0, 1.0] {
                        let others: Vec<usize> = (0..n).filter(|&d| d != axis).collect();
                        let count = K.pow(others.len() as u32);
                        for idx in 0..count {
                            let mut x = [0.0; 3];
                            x[..n].copy_from_slice(&center[..n]);
                            x[axis] = center[axis] + sign * half_axes[axis];
                            let mut rem = idx;
                            for &d in &others {
                                let k = rem % K;
                                rem /= K;
                                let t = (k as f64 + 1.0) / (K as f64 + 1.0);
                                x[d] = center[d] - half_axes[d] + 2.0 * half_axes[d] * t;
                            }
                            let mut nrm = [0.0; 3];
                            nrm[axis] = sign;
                            out.push((x, nrm));
                        }
                    }
                }
            }
            DomainSpec::Polygon { vertices } => {
                let ring = polygon_ring(vertices);
                let orient = signed_area(&ring).signum();
                for k in 0..ring.len() {
                    let a = ring[k];
                    let b = ring[(k + 1) % ring.len()];
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    let len = (dx * dx + dy * dy).sqrt();
                    if len == 0.0 {
                        return Err(Error::UnsupportedShape(format!(
                            "polygon edge {} has zero length; no outward normal",
                            k
                        )));
                    }
                    let nrm = [orient * dy / len, -orient * dx / len, 0.0];
                    for t in [0.25, 0.5, 0.75] {
                        out.push(([a[0] + t * dx, a[1] + t * dy, 0.0], nrm));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// True iff `(x - center) · ν(x) > 0` at every sampled boundary point.
pub fn is_star_shaped(spec: &DomainSpec, center: &[f64]) -> Result<bool> {
    spec.validate()?;
    let samples = spec.boundary_samples()?;
    let n = spec.dim();
    Ok(samples.iter().all(|(x, nu)| {
        let s: f64 = (0..n).map(|i| (x[i] - center.get(i).copied().unwrap_or(0.0)) * nu[i]).sum();
        s > 0.0
    }))
}

/// A region: an analytic shape, possibly pulled back by a linear map.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Shape(DomainSpec),
    /// `{ x : map(x) ∈ base }`, i.e. `map^{-1}(base)`.
    Mapped { base: DomainSpec, map: LinearMap },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Shape(s) => s.dim(),
            Region::Mapped { base, .. } => base.dim(),
        }
    }

    pub fn contains(&self, x: &Point, margin: f64) -> bool {
        match self {
            Region::Shape(s) => s.contains(x, margin),
            Region::Mapped { base, map } => base.contains(&map.apply(x), margin),
        }
    }

    /// Depth of `x` below the boundary, measured in the base shape.
    pub fn depth(&self, x: &Point) -> f64 {
        match self {
            Region::Shape(s) => s.depth(x),
            Region::Mapped { base, map } => base.depth(&map.apply(x)),
        }
    }

    pub fn bounding_box(&self) -> Result<(Point, Point)> {
        match self {
            Region::Shape(s) => Ok(s.bounding_box()),
            Region::Mapped { base, map } => {
                let inv = map.inverse()?;
                let (lo, hi) = base.bounding_box();
                let n = base.dim();
                let mut blo = [f64::INFINITY; 3];
                let mut bhi = [f64::NEG_INFINITY; 3];
                for corner in 0..(1usize << n) {
                    let mut c = [0.0; 3];
                    for d in 0..n {
                        c[d] = if corner >> d & 1 == 1 { hi[d] } else { lo[d] };
                    }
                    let y = inv.apply(&c);
                    for d in 0..n {
                        blo[d] = blo[d].min(y[d]);
                        bhi[d] = bhi[d].max(y[d]);
                    }
                }
                for d in n..3 {
                    blo[d] = 0.0;
                    bhi[d] = 0.0;
                }
                Ok((blo, bhi))
            }
        }
    }
}

/// One integration cell: the lower-corner node and the centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub base: usize,
    pub centroid: Point,
}

/// A uniform grid over a bounded region with its zero-trace mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    dim: usize,
    origin: Point,
    h: f64,
    shape: [usize; 3],
    strides: [usize; 3],
    inside: Vec<bool>,
    cells: Vec<Cell>,
    corner_offsets: Vec<usize>,
    region: Option<Region>,
}

impl GridDomain {
    fn assemble(dim: usize, origin: Point, h: f64, shape: [usize; 3], inside: Vec<bool>, region: Option<Region>) -> Self {
        let strides = [1, shape[0], shape[0] * shape[1]];
        let corner_offsets: Vec<usize> = (0..(1usize << dim))
            .map(|k| (0..dim).map(|d| ((k >> d) & 1) * strides[d]).sum())
            .collect();
        let cell_shape = [
            shape[0].saturating_sub(1),
            if dim >= 2 { shape[1].saturating_sub(1) } else { 1 },
            if dim >= 3 { shape[2].saturating_sub(1) } else { 1 },
        ];
        let mut cells = Vec::new();
        for k in 0..cell_shape[2] {
            for j in 0..cell_shape[1] {
                for i in 0..cell_shape[0] {
                    let base = i + strides[1] * j + strides[2] * k;
                    if corner_offsets.iter().any(|&o| inside[base + o]) {
                        let idx = [i, j, k];
                        let mut centroid = [0.0; 3];
                        for d in 0..dim {
                            centroid[d] = origin[d] + (idx[d] as f64 + 0.5) * h;
                        }
                        cells.push(Cell { base, centroid });
                    }
                }
            }
        }
        GridDomain { dim, origin, h, shape, strides, inside, cells, corner_offsets, region }
    }

    fn from_region(region: Region, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidSpec(format!("grid spacing must be positive, got {}", h)));
        }
        let dim = region.dim();
        let (lo, hi) = region.bounding_box()?;
        let mut origin = [0.0; 3];
        let mut shape = [1usize; 3];
        for d in 0..dim {
            let extent = hi[d] - lo[d];
            let intervals = ((extent / h) - 1e-9).ceil().max(0.0) as usize;
            let mid = 0.5 * (lo[d] + hi[d]);
            origin[d] = mid - 0.5 * intervals as f64 * h;
            shape[d] = intervals + 1;
        }
        let total: usize = shape.iter().product();
        if total > 50_000_000 {
            return Err(Error::InvalidSpec(format!("grid with {} nodes is too large", total)));
        }
        let margin = 1e-9 * h;
        let strides = [1, shape[0], shape[0] * shape[1]];
        let mut inside = vec![false; total];
        for (idx, flag) in inside.iter_mut().enumerate() {
            let ijk = [idx % shape[0], (idx / strides[1]) % shape[1], idx / strides[2]];
            // boundary layer of the box is never interior
            if (0..dim).any(|d| ijk[d] == 0 || ijk[d] + 1 == shape[d]) {
                continue;
            }
            let mut x = [0.0; 3];
            for d in 0..dim {
                x[d] = origin[d] + ijk[d] as f64 * h;
            }
            *flag = region.contains(&x, margin);
        }
        if !inside.iter().any(|&b| b) {
            return Err(Error::EmptyDomain);
        }
        Ok(GridDomain::assemble(dim, origin, h, shape, inside, Some(region)))
    }

    /// A box of `shape` nodes where every node is a free value. Used for
    /// exactness checks on linear data; it has no zero trace.
    pub fn patch(dim: usize, origin: Point, h: f64, shape: [usize; 3]) -> Self {
        let mut shape = shape;
        for s in shape.iter_mut().skip(dim) {
            *s = 1;
        }
        let total: usize = shape.iter().product();
        GridDomain::assemble(dim, origin, h, shape, vec![true; total], None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn origin(&self) -> Point {
        self.origin
    }
    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }
    pub fn strides(&self) -> [usize; 3] {
        self.strides
    }
    pub fn num_nodes(&self) -> usize {
        self.inside.len()
    }
    pub fn is_inside(&self, node: usize) -> bool {
        self.inside[node]
    }
    pub fn inside_mask(&self) -> &[bool] {
        &self.inside
    }
    pub fn num_inside(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
    /// Node offsets of the `2^n` cell corners relative to [`Cell::base`];
    /// bit `d` of the corner index selects the upper node along axis `d`.
    pub fn corner_offsets(&self) -> &[usize] {
        &self.corner_offsets
    }
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }
    /// Total volume of the integration cells.
    pub fn volume(&self) -> f64 {
        self.cells.len() as f64 * self.cell_volume()
    }
    pub fn region(&self) -> Option<&Region> {
        self.region.as_ref()
    }

    pub fn node_index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.strides[1] * ijk[1] + self.strides[2] * ijk[2]
    }

    pub fn node_multi_index(&self, node: usize) -> [usize; 3] {
        [node % self.shape[0], (node / self.strides[1]) % self.shape[1], node / self.strides[2]]
    }

    pub fn node_coords(&self, node: usize) -> Point {
        let ijk = self.node_multi_index(node);
        let mut x = [0.0; 3];
        for d in 0..self.dim {
            x[d] = self.origin[d] + ijk[d] as f64 * self.h;
        }
        x
    }

    /// Same node layout and mask (the cheap pointer check is done by callers).
    pub fn same_grid(&self, other: &GridDomain) -> bool {
        self.dim == other.dim
            && self.shape == other.shape
            && self.h == other.h
            && self.origin == other.origin
            && self.inside == other.inside
    }
}

/// Discretizes `spec` with spacing `h`.
pub fn build_grid(spec: &DomainSpec, h: f64) -> Result<GridDomain> {
    spec.validate()?;
    GridDomain::from_region(Region::Shape(spec.clone()), h)
}

/// Grid over `T^{-1}(Ω)` at the same spacing, so that `u ∘ T` lives on it.
pub fn transform_domain(dom: &GridDomain, t: &LinearMap) -> Result<GridDomain> {
    t.check_invertible()?;
    if t.dim() != dom.dim() {
        return Err(Error::GridMismatch(format!("map of size {} on a {}-D domain", t.dim(), dom.dim())));
    }
    let region = match dom.region() {
        Some(Region::Shape(s)) => Region::Mapped { base: s.clone(), map: *t },
        Some(Region::Mapped { base, map }) => Region::Mapped { base: base.clone(), map: map.compose(t) },
        None => return Err(Error::UnsupportedShape("patch grids have no analytic region to transform".into())),
    };
    GridDomain::from_region(region, dom.h())
}

fn normalize(v: Point) -> Point {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn sphere_sample_directions(dim: usize) -> Vec<Point> {
    if dim == 2 {
        const M: usize = 720;
        (0..M)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / M as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect()
    } else {
        // Fibonacci lattice
        const M: usize = 2000;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..M)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / M as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * k as f64;
                [r * phi.cos(), r * phi.sin(), z]
            })
            .collect()
    }
}

fn polygon_ring(vertices: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut ring = vertices.to_vec();
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    ring
}

fn signed_area(ring: &[[f64; 2]]) -> f64 {
    let n = ring.len();
    0.5 * (0..n)
        .map(|k| {
            let a = ring[k];
            let b = ring[(k + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

fn bbox_scale(ring: &[[f64; 2]]) -> f64 {
    ring.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0)
}

fn ray_cast_inside(ring: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x_cross = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (a[0] + t * dx, a[1] + t * dy);
    ((p[0] - qx).powi(2) + (p[1] - qy).powi(2)).sqrt()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: [f64; 2], q: [f64; 2], r: [f64; 2], o: f64| {
        o == 0.0 && r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

fn is_simple(ring: &[[f64; 2]]) -> bool {
    let n = ring.len();
    let edges: Vec<(usize, usize)> = (0..n).map(|k| (k, (k + 1) % n)).filter(|&(a, b)| ring[a] != ring[b]).collect();
    let m = edges.len();
    for i in 0..m {
        for j in (i + 1)..m {
            let (a0, a1) = edges[i];
            let (b0, b1) = edges[j];
            let touch = |x: usize, y: usize| ring[x] == ring[y];
            if touch(a0, b0) || touch(a0, b1) || touch(a1, b0) || touch(a1, b1) {
                continue;
            }
            if segments_intersect(ring[a0], ring[a1], ring[b0], ring[b1]) {
                return false;
            }
        }
    }
    true
}
