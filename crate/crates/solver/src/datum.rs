use numeric::{adaptive, lit, Real};
use rearrange::DiscreteField;

use crate::error::SolverError;
use crate::mesh::{Geometry, Mesh};
use crate::problem::BoundaryCondition;

/// Radial profile `ρ` of a mollifier supported in the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mollifier {
    /// `exp(−1/(1 − r²))`.
    Exponential,
    /// `(1 − r²)³`.
    Polynomial,
}

impl Mollifier {
    fn raw<T: Real>(self, r: T) -> T {
        if !(r < T::one()) {
            return T::zero();
        }
        let s = T::one() - r * r;
        match self {
            Mollifier::Exponential => (-T::one() / s).exp(),
            Mollifier::Polynomial => s * s * s,
        }
    }

    /// Normalization making `∫_{ℝⁿ} ρ = 1`.
    pub fn constant<T: Real>(self, n: usize) -> T {
        let radial = adaptive(|r: T| r.powi(n as i32 - 1) * self.raw(r), T::zero(), T::one(), lit(1e-14), T::zero()).value;
        let sphere = if n == 1 { lit(2.0) } else { T::PI() + T::PI() };
        T::one() / (sphere * radial)
    }

    /// `kⁿ ρ(k r)` normalized to unit mass.
    pub fn scaled<T: Real>(self, n: usize, k: T, r: T) -> T {
        self.constant::<T>(n) * k.powi(n as i32) * self.raw(k * r)
    }
}

/// Closed-form densities, defined on all of `ℝⁿ` so that mollification
/// needs no boundary extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityFn<T> {
    Constant(T),
    /// `c + g·x`.
    Affine { c: T, g: [T; 2] },
    /// `mass·(2πw²)^{−n/2}·exp(−|x − x₀|²/(2w²))`.
    Gaussian { center: [T; 2], width: T, mass: T },
}

impl<T: Real> DensityFn<T> {
    pub fn eval(&self, x: [T; 2], n: usize) -> T {
        match *self {
            DensityFn::Constant(c) => c,
            DensityFn::Affine { c, g } => c + g[0] * x[0] + g[1] * x[1],
            DensityFn::Gaussian { center, width, mass } => {
                let d2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                let norm = (T::PI() + T::PI()).sqrt() * width;
                mass / norm.powi(n as i32) * (-d2 / (lit::<T>(2.0) * width * width)).exp()
            }
        }
    }

    fn is_affine(&self) -> bool {
        !matches!(self, DensityFn::Gaussian { .. })
    }

    /// `∫_Ω f`, exact for affine densities.
    pub fn integral_over(&self, geometry: &Geometry<T>, mesh: Option<&Mesh<T>>) -> T {
        let centroid = match *geometry {
            Geometry::Interval { a, b } => [(a + b) * lit(0.5), T::zero()],
            Geometry::Rectangle { width, height } => [width * lit(0.5), height * lit(0.5)],
            _ => [T::zero(), T::zero()],
        };
        match (self, mesh) {
            (DensityFn::Gaussian { .. }, Some(m)) => element_averages(m, |x| self.eval(x, m.dimension()))
                .iter()
                .zip(m.measures())
                .map(|(v, a)| *v * *a)
                .sum(),
            _ => self.eval(centroid, geometry.dimension()) * geometry.measure(),
        }
    }
}

/// Signed point mass `weight·δ_at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass<T> {
    pub at: [T; 2],
    pub weight: T,
}

/// Right-hand side: an optional density plus any number of signed point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Datum<T> {
    pub density: Option<DensityFn<T>>,
    pub masses: Vec<PointMass<T>>,
}

impl<T: Real> Datum<T> {
    pub fn density(f: DensityFn<T>) -> Self {
        Datum { density: Some(f), masses: Vec::new() }
    }

    pub fn point_mass(at: [T; 2], weight: T) -> Self {
        Datum { density: None, masses: vec![PointMass { at, weight }] }
    }

    pub fn combination(masses: Vec<PointMass<T>>) -> Self {
        Datum { density: None, masses }
    }

    pub fn has_masses(&self) -> bool {
        !self.masses.is_empty()
    }

    /// `f(Ω)` or `μ(Ω)`.
    pub fn total(&self, geometry: &Geometry<T>, mesh: Option<&Mesh<T>>) -> T {
        let d = self.density.map_or(T::zero(), |f| f.integral_over(geometry, mesh));
        d + self.masses.iter().map(|m| m.weight).sum::<T>()
    }

    /// Total variation `‖f‖_{L¹} + Σ|wᵢ|`, with the density part measured on `mesh`.
    pub fn total_variation(&self, mesh: &Mesh<T>) -> T {
        let d = self.density.map_or(T::zero(), |f| {
            element_averages(mesh, |x| f.eval(x, mesh.dimension()))
                .iter()
                .zip(mesh.measures())
                .map(|(v, a)| v.abs() * *a)
                .sum()
        });
        d + self.masses.iter().map(|m| m.weight.abs()).sum::<T>()
    }
}

const TRI_RULE: [(f64, f64, f64); 7] = [
    (1.0 / 3.0, 1.0 / 3.0, 0.225),
    (0.059_715_871_789_769_8, 0.470_142_064_105_115_1, 0.132_394_152_788_506_2),
    (0.470_142_064_105_115_1, 0.059_715_871_789_769_8, 0.132_394_152_788_506_2),
    (0.470_142_064_105_115_1, 0.470_142_064_105_115_1, 0.132_394_152_788_506_2),
    (0.797_426_985_353_087_3, 0.101_286_507_323_456_3, 0.125_939_180_544_827_2),
    (0.101_286_507_323_456_3, 0.797_426_985_353_087_3, 0.125_939_180_544_827_2),
    (0.101_286_507_323_456_3, 0.101_286_507_323_456_3, 0.125_939_180_544_827_2),
];
const SEG_RULE: [(f64, f64); 3] = [(0.112_701_665_379_258_3, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.887_298_334_620_741_7, 5.0 / 18.0)];

fn element_average<T: Real>(mesh: &Mesh<T>, e: usize, f: &impl Fn([T; 2]) -> T) -> T {
    let v = mesh.vertices(e);
    let p = |i: usize| mesh.nodes()[v[i]];
    if mesh.dimension() == 1 {
        let (a, b) = (p(0)[0], p(1)[0]);
        SEG_RULE.iter().map(|&(x, w)| lit::<T>(w) * f([a + (b - a) * lit(x), T::zero()])).sum()
    } else {
        let (p0, p1, p2) = (p(0), p(1), p(2));
        TRI_RULE
            .iter()
            .map(|&(l1, l2, w)| {
                let (l1, l2) = (lit::<T>(l1), lit::<T>(l2));
                let l0 = T::one() - l1 - l2;
                let x = [l0 * p0[0] + l1 * p1[0] + l2 * p2[0], l0 * p0[1] + l1 * p1[1] + l2 * p2[1]];
                lit::<T>(w) * f(x)
            })
            .sum()
    }
}

/// Element averages of `f` by a degree-5 rule (triangles) or 3-point Gauss (segments).
pub fn element_averages<T: Real>(mesh: &Mesh<T>, f: impl Fn([T; 2]) -> T) -> Vec<T> {
    (0..mesh.element_count()).map(|e| element_average(mesh, e, &f)).collect()
}

/// Distance from `x` to the boundary of the domain.
fn boundary_distance<T: Real>(g: &Geometry<T>, x: [T; 2]) -> T {
    match *g {
        Geometry::Interval { a, b } => (x[0] - a).min(b - x[0]),
        Geometry::Rectangle { width, height } => x[0].min(width - x[0]).min(x[1]).min(height - x[1]),
        Geometry::Disc { radius } => radius - x[0].hypot(x[1]),
        Geometry::Annulus { inner, outer } => {
            let r = x[0].hypot(x[1]);
            (r - inner).min(outer - r)
        }
    }
}

/// Mollifies a density by convolution with `kⁿρ(k·)`, using a tensor rule on the support ball.
fn convolve<T: Real>(f: &DensityFn<T>, shape: Mollifier, n: usize, k: T, x: [T; 2]) -> T {
    const RAD: usize = 16;
    const ANG: usize = 32;
    let gl = gauss_legendre_16();
    let mut acc = T::zero();
    let mut wsum = T::zero();
    if n == 1 {
        for &(s, w) in &gl {
            for sign in [-T::one(), T::one()] {
                let r = (lit::<T>(s) + T::one()) * lit(0.5);
                let wt = lit::<T>(w) * shape.raw(r);
                acc += wt * f.eval([x[0] + sign * r / k, T::zero()], 1);
                wsum += wt;
            }
        }
    } else {
        for &(s, w) in gl.iter().take(RAD) {
            let r = (lit::<T>(s) + T::one()) * lit(0.5);
            for j in 0..ANG {
                let th = (T::PI() + T::PI()) * (T::from_usize(j).unwrap() + lit(0.5)) / T::from_usize(ANG).unwrap();
                let wt = lit::<T>(w) * r * shape.raw(r);
                acc += wt * f.eval([x[0] + r * th.cos() / k, x[1] + r * th.sin() / k], 2);
                wsum += wt;
            }
        }
    }
    acc / wsum
}

fn gauss_legendre_16() -> [(f64, f64); 16] {
    const X: [f64; 8] = [
        0.095_012_509_837_637_44,
        0.281_603_550_779_258_9,
        0.458_016_777_657_227_4,
        0.617_876_244_402_643_7,
        0.755_404_408_355_003_0,
        0.865_631_202_387_831_7,
        0.944_575_023_073_232_6,
        0.989_400_934_991_649_9,
    ];
    const W: [f64; 8] = [
        0.189_450_610_455_068_5,
        0.182_603_415_044_923_6,
        0.169_156_519_395_002_5,
        0.149_595_988_816_576_7,
        0.124_628_971_255_533_9,
        0.095_158_511_682_492_8,
        0.062_253_523_938_647_9,
        0.027_152_459_411_754_1,
    ];
    let mut out = [(0.0, 0.0); 16];
    for i in 0..8 {
        out[i] = (-X[7 - i], W[7 - i]);
        out[8 + i] = (X[i], W[i]);
    }
    out
}

/// The `k`-th approximant `f_k` of the datum as one value per element.
///
/// Point masses become `w·kⁿρ(k|x − a|)`, renormalized to carry exactly `w`
/// when the support ball lies inside the domain. Affine densities are fixed by
/// symmetric mollification and are projected directly. For Neumann problems the
/// discrete mean is removed.
pub fn mollify_datum<T: Real>(
    mesh: &Mesh<T>,
    datum: &Datum<T>,
    k: usize,
    bc: BoundaryCondition,
    shape: Mollifier,
) -> Result<DiscreteField<T>, SolverError> {
    let n = mesh.dimension();
    let kf = T::from_usize(k.max(1)).unwrap();
    let mut values = vec![T::zero(); mesh.element_count()];
    if let Some(f) = &datum.density {
        let avg = if f.is_affine() {
            element_averages(mesh, |x| f.eval(x, n))
        } else {
            element_averages(mesh, |x| convolve(f, shape, n, kf, x))
        };
        values.iter_mut().zip(avg).for_each(|(v, a)| *v += a);
    }
    let c = shape.constant::<T>(n);
    let support = T::one() / kf;
    for m in &datum.masses {
        let bump = |x: [T; 2]| {
            let r = (x[0] - m.at[0]).hypot(x[1] - m.at[1]);
            c * kf.powi(n as i32) * shape.raw(kf * r)
        };
        let mut part = vec![T::zero(); mesh.element_count()];
        let mut mass = T::zero();
        for (e, slot) in part.iter_mut().enumerate() {
            let c = mesh.barycenter(e);
            let reach = mesh
                .vertices(e)
                .iter()
                .map(|&v| (mesh.nodes()[v][0] - c[0]).hypot(mesh.nodes()[v][1] - c[1]))
                .fold(T::zero(), T::max);
            let near = (c[0] - m.at[0]).hypot(c[1] - m.at[1]) <= support + reach;
            if near {
                *slot = element_average(mesh, e, &bump);
                mass += *slot * mesh.measures()[e];
            }
        }
        if mass == T::zero() {
            let e = (0..mesh.element_count())
                .min_by(|&a, &b| {
                    let d = |e: usize| {
                        let c = mesh.barycenter(e);
                        (c[0] - m.at[0]).hypot(c[1] - m.at[1])
                    };
                    d(a).partial_cmp(&d(b)).unwrap()
                })
                .unwrap();
            part[e] = T::one() / mesh.measures()[e];
            mass = T::one();
        }
        let inside = boundary_distance(mesh.geometry(), m.at) >= support;
        let scale = if inside { m.weight / mass } else { m.weight };
        values.iter_mut().zip(&part).for_each(|(v, p)| *v += *p * scale);
    }
    if bc == BoundaryCondition::Neumann {
        let total = mesh.total_measure();
        for _ in 0..2 {
            let mean = values.iter().zip(mesh.measures()).map(|(v, a)| *v * *a).sum::<T>() / total;
            values.iter_mut().for_each(|v| *v -= mean);
        }
        let mean = values.iter().zip(mesh.measures()).map(|(v, a)| *v * *a).sum::<T>() / total;
        let scale = values.iter().fold(T::one(), |s, v| s.max(v.abs()));
        if mean.abs() > lit::<T>(1e-12) * scale {
            return Err(SolverError::MassViolation { mean: mean.to_f64_lossy() });
        }
    }
    Ok(DiscreteField::new(values, mesh.measures().to_vec()).expect("mesh measures are positive"))
}
