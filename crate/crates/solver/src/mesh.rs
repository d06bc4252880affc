use numeric::{lit, Real};

use crate::error::SolverError;

/// Supported domains. Discs and annuli are centred at the origin; rectangles
/// span `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry<T> {
    Interval { a: T, b: T },
    Rectangle { width: T, height: T },
    Disc { radius: T },
    Annulus { inner: T, outer: T },
}

impl<T: Real> Geometry<T> {
    pub fn dimension(&self) -> usize {
        match self {
            Geometry::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Exact measure of the continuous domain.
    pub fn measure(&self) -> T {
        match *self {
            Geometry::Interval { a, b } => b - a,
            Geometry::Rectangle { width, height } => width * height,
            Geometry::Disc { radius } => T::PI() * radius * radius,
            Geometry::Annulus { inner, outer } => T::PI() * (outer * outer - inner * inner),
        }
    }

    /// Whether `x` lies strictly inside the domain.
    pub fn contains_strictly(&self, x: [T; 2]) -> bool {
        match *self {
            Geometry::Interval { a, b } => x[0] > a && x[0] < b,
            Geometry::Rectangle { width, height } => {
                x[0] > T::zero() && x[0] < width && x[1] > T::zero() && x[1] < height
            }
            Geometry::Disc { radius } => x[0].hypot(x[1]) < radius,
            Geometry::Annulus { inner, outer } => {
                let r = x[0].hypot(x[1]);
                r > inner && r < outer
            }
        }
    }

    /// Inclusive membership for points on or inside the boundary.
    pub fn contains(&self, x: [T; 2]) -> bool {
        let tol: T = lit(1e-12);
        match *self {
            Geometry::Interval { a, b } => x[0] >= a - tol && x[0] <= b + tol,
            Geometry::Rectangle { width, height } => {
                x[0] >= -tol && x[0] <= width + tol && x[1] >= -tol && x[1] <= height + tol
            }
            Geometry::Disc { radius } => x[0].hypot(x[1]) <= radius * (T::one() + tol),
            Geometry::Annulus { inner, outer } => {
                let r = x[0].hypot(x[1]);
                r >= inner * (T::one() - tol) && r <= outer * (T::one() + tol)
            }
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        let ok = match *self {
            Geometry::Interval { a, b } => a.is_finite() && b.is_finite() && b > a,
            Geometry::Rectangle { width, height } => {
                width.is_finite() && height.is_finite() && width > T::zero() && height > T::zero()
            }
            Geometry::Disc { radius } => radius.is_finite() && radius > T::zero(),
            Geometry::Annulus { inner, outer } => {
                inner.is_finite() && outer.is_finite() && inner > T::zero() && outer > inner
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SolverError::UnsupportedGeometry(format!("{self:?}")))
        }
    }
}

/// Conforming simplicial mesh with precomputed element geometry.
///
/// Elements always store three vertex indices; in one dimension only the
/// first two are meaningful.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    pub(crate) dim: usize,
    pub(crate) geometry: Geometry<T>,
    pub(crate) nodes: Vec<[T; 2]>,
    pub(crate) elements: Vec<[usize; 3]>,
    pub(crate) measures: Vec<T>,
    pub(crate) grads: Vec<[[T; 2]; 3]>,
    pub(crate) boundary: Vec<bool>,
    pub(crate) h: T,
}

impl<T: Real> Mesh<T> {
    pub(crate) fn assemble(
        dim: usize,
        geometry: Geometry<T>,
        nodes: Vec<[T; 2]>,
        mut elements: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        h: T,
    ) -> Result<Self, SolverError> {
        let mut measures = Vec::with_capacity(elements.len());
        let mut grads = Vec::with_capacity(elements.len());
        for e in elements.iter_mut() {
            if dim == 1 {
                let len = nodes[e[1]][0] - nodes[e[0]][0];
                if !(len > T::zero()) {
                    return Err(SolverError::DegenerateElement);
                }
                measures.push(len);
                let z = T::zero();
                grads.push([[-T::one() / len, z], [T::one() / len, z], [z, z]]);
            } else {
                let [p0, p1, p2] = [nodes[e[0]], nodes[e[1]], nodes[e[2]]];
                let mut det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
                if det < T::zero() {
                    e.swap(1, 2);
                    det = -det;
                }
                if !(det > T::zero()) {
                    return Err(SolverError::DegenerateElement);
                }
                let [p0, p1, p2] = [nodes[e[0]], nodes[e[1]], nodes[e[2]]];
                let g = |a: [T; 2], b: [T; 2]| [(a[1] - b[1]) / det, (b[0] - a[0]) / det];
                grads.push([g(p1, p2), g(p2, p0), g(p0, p1)]);
                measures.push(det * lit(0.5));
            }
        }
        Ok(Mesh { dim, geometry, nodes, elements, measures, grads, boundary, h })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn geometry(&self) -> &Geometry<T> {
        &self.geometry
    }

    pub fn nodes(&self) -> &[[T; 2]] {
        &self.nodes
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    /// Vertex indices of element `e`.
    pub fn vertices(&self, e: usize) -> &[usize] {
        &self.elements[e][..self.dim + 1]
    }

    pub fn measures(&self) -> &[T] {
        &self.measures
    }

    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    /// Nominal resolution the mesh was built for.
    pub fn h(&self) -> T {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn total_measure(&self) -> T {
        self.measures.iter().copied().sum()
    }

    /// Gradients of the barycentric coordinates on element `e`.
    pub fn shape_gradients(&self, e: usize) -> &[[T; 2]; 3] {
        &self.grads[e]
    }

    pub fn barycenter(&self, e: usize) -> [T; 2] {
        let vs = self.vertices(e);
        let k = T::from_usize(vs.len()).unwrap();
        let mut c = [T::zero(); 2];
        for &v in vs {
            c[0] += self.nodes[v][0];
            c[1] += self.nodes[v][1];
        }
        [c[0] / k, c[1] / k]
    }

    /// Largest interior angle over all triangles, in radians.
    pub fn max_angle(&self) -> T {
        if self.dim == 1 {
            return T::zero();
        }
        let mut worst = T::zero();
        for e in &self.elements {
            for i in 0..3 {
                let (a, b, c) = (self.nodes[e[i]], self.nodes[e[(i + 1) % 3]], self.nodes[e[(i + 2) % 3]]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                worst = worst.max(cos.max(-T::one()).min(T::one()).acos());
            }
        }
        worst
    }
}

/// Builds a uniform mesh of resolution `h`.
pub fn build_mesh<T: Real>(geometry: Geometry<T>, h: T) -> Result<Mesh<T>, SolverError> {
    build_mesh_graded(geometry, h, T::one())
}

/// Builds a mesh whose disc rings sit at radii `R·(j/N)^γ`; `γ` is ignored for other geometries.
pub fn build_mesh_graded<T: Real>(geometry: Geometry<T>, h: T, grading: T) -> Result<Mesh<T>, SolverError> {
    geometry.validate()?;
    if !(h > T::zero() && h.is_finite()) {
        return Err(SolverError::InvalidResolution(h.to_f64_lossy()));
    }
    if !(grading >= T::one() && grading.is_finite()) {
        return Err(SolverError::InvalidResolution(grading.to_f64_lossy()));
    }
    match geometry {
        Geometry::Interval { a, b } => interval(geometry, a, b, h),
        Geometry::Rectangle { width, height } => rectangle(geometry, width, height, h),
        Geometry::Disc { radius } => disc(geometry, radius, h, grading),
        Geometry::Annulus { inner, outer } => annulus(geometry, inner, outer, h),
    }
}

fn cells<T: Real>(len: T, h: T) -> usize {
    (len / h).round().to_usize().unwrap_or(1).max(1)
}

fn interval<T: Real>(g: Geometry<T>, a: T, b: T, h: T) -> Result<Mesh<T>, SolverError> {
    let n = cells(b - a, h);
    let step = (b - a) / T::from_usize(n).unwrap();
    let nodes = (0..=n)
        .map(|i| [if i == n { b } else { a + step * T::from_usize(i).unwrap() }, T::zero()])
        .collect();
    let elements = (0..n).map(|i| [i, i + 1, i + 1]).collect();
    let boundary = (0..=n).map(|i| i == 0 || i == n).collect();
    Mesh::assemble(1, g, nodes, elements, boundary, h)
}

fn rectangle<T: Real>(g: Geometry<T>, w: T, ht: T, h: T) -> Result<Mesh<T>, SolverError> {
    let (nx, ny) = (cells(w, h), cells(ht, h));
    let (dx, dy) = (w / T::from_usize(nx).unwrap(), ht / T::from_usize(ny).unwrap());
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut boundary = Vec::with_capacity(nodes.capacity());
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([dx * T::from_usize(i).unwrap(), dy * T::from_usize(j).unwrap()]);
            boundary.push(i == 0 || j == 0 || i == nx || j == ny);
        }
    }
    let mut elements = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            elements.push([a, b, c]);
            elements.push([a, c, d]);
        }
    }
    Mesh::assemble(2, g, nodes, elements, boundary, h)
}

/// Triangulates the band between two closed rings of node indices, each listed
/// by increasing angle starting near angle zero.
fn stitch<T: Real>(inner: &[(usize, T)], outer: &[(usize, T)], out: &mut Vec<[usize; 3]>) {
    let (na, nb) = (inner.len(), outer.len());
    let tau = T::PI() + T::PI();
    let ang = |ring: &[(usize, T)], i: usize| {
        let n = ring.len();
        ring[i % n].1 + tau * T::from_usize(i / n).unwrap()
    };
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let take_inner = j == nb || (i < na && ang(inner, i + 1) <= ang(outer, j + 1));
        if take_inner {
            out.push([inner[i % na].0, inner[(i + 1) % na].0, outer[j % nb].0]);
            i += 1;
        } else {
            out.push([inner[i % na].0, outer[(j + 1) % nb].0, outer[j % nb].0]);
            j += 1;
        }
    }
}

fn ring<T: Real>(nodes: &mut Vec<[T; 2]>, r: T, n: usize, offset: T) -> Vec<(usize, T)> {
    let tau = T::PI() + T::PI();
    (0..n)
        .map(|i| {
            let th = offset + tau * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
            nodes.push([r * th.cos(), r * th.sin()]);
            (nodes.len() - 1, th)
        })
        .collect()
}

/// Ring of `6 m` nodes at the angles of a hexagonal lattice ring, projected
/// onto the circle of radius `r`. Keeps uniform disc meshes non-obtuse.
fn hex_ring<T: Real>(nodes: &mut Vec<[T; 2]>, r: T, m: usize) -> Vec<(usize, T)> {
    let third = T::PI() / lit(3.0);
    let tau = T::PI() + T::PI();
    let mf = T::from_usize(m).unwrap();
    let mut out = Vec::with_capacity(6 * m);
    for side in 0..6 {
        let (a0, a1) = (third * T::from_usize(side).unwrap(), third * T::from_usize(side + 1).unwrap());
        for i in 0..m {
            let s = T::from_usize(i).unwrap() / mf;
            let x = a0.cos() + (a1.cos() - a0.cos()) * s;
            let y = a0.sin() + (a1.sin() - a0.sin()) * s;
            let mut th = y.atan2(x);
            if th < T::zero() {
                th = th + tau;
            }
            nodes.push([r * th.cos(), r * th.sin()]);
            out.push((nodes.len() - 1, th));
        }
    }
    out
}

fn disc<T: Real>(g: Geometry<T>, radius: T, h: T, gamma: T) -> Result<Mesh<T>, SolverError> {
    let nr = cells(radius, h);
    let nrf = T::from_usize(nr).unwrap();
    let rad = |j: usize| {
        if j == nr {
            radius
        } else {
            radius * (T::from_usize(j).unwrap() / nrf).powf(gamma)
        }
    };
    let mut nodes = vec![[T::zero(), T::zero()]];
    let mut elements = Vec::new();
    let mut prev: Vec<(usize, T)> = Vec::new();
    for j in 1..=nr {
        let (r, dr) = (rad(j), rad(j) - rad(j - 1));
        let count = 6 * (r / dr).round().to_usize().unwrap_or(1).max(1);
        let cur = hex_ring(&mut nodes, r, count / 6);
        if j == 1 {
            for i in 0..count {
                elements.push([0, cur[i].0, cur[(i + 1) % count].0]);
            }
        } else {
            stitch(&prev, &cur, &mut elements);
        }
        prev = cur;
    }
    let first_outer = prev[0].0;
    let boundary = (0..nodes.len()).map(|i| i >= first_outer).collect();
    Mesh::assemble(2, g, nodes, elements, boundary, h)
}

fn annulus<T: Real>(g: Geometry<T>, inner: T, outer: T, h: T) -> Result<Mesh<T>, SolverError> {
    let nr = cells(outer - inner, h);
    let tau = T::PI() + T::PI();
    let mut nodes = Vec::new();
    let mut elements = Vec::new();
    let mut rings: Vec<Vec<(usize, T)>> = Vec::new();
    for j in 0..=nr {
        let r = if j == nr { outer } else { inner + (outer - inner) * T::from_usize(j).unwrap() / T::from_usize(nr).unwrap() };
        let count = (tau * r / h).round().to_usize().unwrap_or(6).max(6);
        let cur = ring(&mut nodes, r, count, T::zero());
        if let Some(prev) = rings.last() {
            stitch(prev, &cur, &mut elements);
        }
        rings.push(cur);
    }
    let mut boundary = vec![false; nodes.len()];
    for &(i, _) in rings[0].iter().chain(rings[nr].iter()) {
        boundary[i] = true;
    }
    Mesh::assemble(2, g, nodes, elements, boundary, h)
}
