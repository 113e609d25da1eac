//! The gasket as a subset of the plane: the three contractions, the map
//! from addresses to points, the coalgebra `σ = τ⁻¹`, bilipschitz
//! distortion sampling and rendering.
//!
//! Coordinates are binary64; address-side quantities stay exact.

use std::fmt::{self, Write as _};

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::address::{enumerate, Address, Corner, Letter};
use crate::error::{Error, Result};
use crate::metric::address_distance;
use crate::space::{random_address, TripointedSpace, REL_TOL};
use crate::universal::{Algebra, Coalgebra};

pub const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Tolerance for point equalities.
pub const POINT_TOL: f64 = 1e-12;
/// Slack for carrier membership and for detecting ties at gluing points.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Deepest render level.
pub const RENDER_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The vertex of the outer triangle named by a corner.
pub fn vertex(z: Corner) -> Point2 {
    match z {
        Corner::T => Point2::new(0.5, SQRT3_2),
        Corner::L => Point2::new(0.0, 0.0),
        Corner::R => Point2::new(1.0, 0.0),
    }
}

/// `σ_m(p) = p/2 + offset(m)`; fixes the vertex `corner(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IfsMap {
    pub letter: Letter,
}

impl IfsMap {
    pub fn new(letter: Letter) -> Self {
        IfsMap { letter }
    }

    fn offset(self) -> Point2 {
        match self.letter {
            Letter::A => Point2::new(0.25, SQRT3_2 / 2.0),
            Letter::B => Point2::new(0.0, 0.0),
            Letter::C => Point2::new(0.5, 0.0),
        }
    }

    pub fn apply(self, p: Point2) -> Point2 {
        let o = self.offset();
        Point2::new(p.x / 2.0 + o.x, p.y / 2.0 + o.y)
    }

    pub fn inverse(self, p: Point2) -> Point2 {
        let o = self.offset();
        Point2::new(2.0 * (p.x - o.x), 2.0 * (p.y - o.y))
    }
}

/// `σ_{m0} ∘ ⋯ ∘ σ_{m(n-1)}` applied to the corner's vertex.
pub fn address_to_point(addr: &Address) -> Point2 {
    addr.word()
        .iter()
        .rev()
        .fold(vertex(addr.corner()), |p, &m| IfsMap::new(m).apply(p))
}

/// Barycentric weights of `p` against `T`, `L`, `R`.
pub fn barycentric(p: Point2) -> [f64; 3] {
    let t = p.y / SQRT3_2;
    let r = p.x - t / 2.0;
    [t, 1.0 - t - r, r]
}

fn from_barycentric(u: [f64; 3]) -> Point2 {
    Point2::new(u[0] / 2.0 + u[2], u[0] * SQRT3_2)
}

pub fn in_triangle(p: Point2) -> bool {
    barycentric(p).iter().all(|&u| u >= -CLASSIFY_TOL)
}

fn clamp_to_triangle(p: Point2) -> Point2 {
    let u = barycentric(p);
    if u.iter().all(|&c| c >= 0.0) {
        return p;
    }
    let clipped = u.map(|c| c.max(0.0));
    let total: f64 = clipped.iter().sum();
    from_barycentric(clipped.map(|c| c / total))
}

/// One step of `σ = τ⁻¹`: the sub-triangle containing `p` (least letter on
/// ties) and the preimage of `p` under its contraction.
///
/// Defined on the whole closed outer triangle: a point of the central hole
/// goes to the copy of its largest barycentric weight, and the preimage is
/// clamped back into the triangle.
pub fn sigma_step(p: Point2) -> Result<(Letter, Point2)> {
    if !p.x.is_finite() || !p.y.is_finite() || !in_triangle(p) {
        return Err(Error::NotInCarrier(format!(
            "{p} is outside the outer triangle"
        )));
    }
    let u = barycentric(p);
    let m = Letter::ALL
        .into_iter()
        .find(|m| u[m.corner().index()] >= 0.5 - CLASSIFY_TOL)
        .unwrap_or_else(|| {
            Letter::ALL.into_iter().fold(Letter::A, |best, m| {
                if u[m.corner().index()] > u[best.corner().index()] {
                    m
                } else {
                    best
                }
            })
        });
    Ok((m, clamp_to_triangle(IfsMap::new(m).inverse(p))))
}

/// `(𝕊, τ)` as an algebra and `(𝕊, σ)` as a coalgebra, with the Euclidean
/// metric. Samples are images of random addresses of `sample_level`.
#[derive(Clone, Copy, Debug)]
pub struct EuclideanGasket {
    pub sample_level: usize,
}

impl Default for EuclideanGasket {
    fn default() -> Self {
        EuclideanGasket { sample_level: 16 }
    }
}

impl TripointedSpace for EuclideanGasket {
    type Point = Point2;

    fn distance(&self, x: &Point2, y: &Point2) -> f64 {
        x.dist(*y)
    }

    fn distinguished(&self, z: Corner) -> Point2 {
        vertex(z)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Point2 {
        address_to_point(&random_address(rng, self.sample_level))
    }
}

impl Algebra for EuclideanGasket {
    fn structure(&self, m: Letter, x: &Point2) -> Point2 {
        IfsMap::new(m).apply(*x)
    }
}

impl Coalgebra for EuclideanGasket {
    fn structure(&self, x: &Point2) -> Result<(Letter, Point2)> {
        sigma_step(*x)
    }

    fn contains(&self, x: &Point2) -> bool {
        in_triangle(*x)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DistortionPair {
    pub x: String,
    pub y: String,
    pub euclidean: f64,
    pub address: f64,
    pub ratio: f64,
}

impl DistortionPair {
    fn measure(x: &Address, y: &Address) -> Option<Self> {
        let address = address_distance(x, y).to_f64();
        if address == 0.0 {
            return None;
        }
        let euclidean = address_to_point(x).dist(address_to_point(y));
        Some(DistortionPair {
            x: x.to_string(),
            y: y.to_string(),
            euclidean,
            address,
            ratio: euclidean / address,
        })
    }
}

/// Observed bilipschitz distortion between `d_G` and the Euclidean metric.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DistortionReport {
    pub depth: usize,
    pub pairs: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_witness: Option<DistortionPair>,
    pub max_witness: Option<DistortionPair>,
    /// `(b⊗L, a⊗R)`: Euclidean `√3/2` against address distance 1.
    pub reference: DistortionPair,
}

impl DistortionReport {
    /// Whether every observed ratio lies in `[lower, upper]`, up to
    /// rounding in the Euclidean distances.
    pub fn within(&self, lower: f64, upper: f64) -> bool {
        self.min_ratio >= lower * (1.0 - REL_TOL) && self.max_ratio <= upper * (1.0 + REL_TOL)
    }

    fn from_pairs(depth: usize, pairs: impl Iterator<Item = (Address, Address)>) -> Self {
        let reference = DistortionPair::measure(
            &"b:L".parse().expect("literal"),
            &"a:R".parse().expect("literal"),
        )
        .expect("distinct points");
        let mut report = DistortionReport {
            depth,
            pairs: 0,
            min_ratio: f64::INFINITY,
            max_ratio: 0.0,
            min_witness: None,
            max_witness: None,
            reference,
        };
        for (x, y) in pairs {
            let Some(pair) = DistortionPair::measure(&x, &y) else {
                continue;
            };
            report.pairs += 1;
            if pair.ratio < report.min_ratio {
                report.min_ratio = pair.ratio;
                report.min_witness = Some(pair.clone());
            }
            if pair.ratio > report.max_ratio {
                report.max_ratio = pair.ratio;
                report.max_witness = Some(pair);
            }
        }
        report
    }
}

/// Distortion over `samples` random address pairs of length `depth`.
pub fn distortion_report(samples: usize, depth: usize, rng: &mut dyn RngCore) -> DistortionReport {
    let pairs: Vec<_> = (0..samples)
        .map(|_| (random_address(rng, depth), random_address(rng, depth)))
        .collect();
    DistortionReport::from_pairs(depth, pairs.into_iter())
}

/// Distortion over every pair of canonical addresses of length `depth`.
pub fn distortion_exhaustive(depth: usize) -> Result<DistortionReport> {
    let pts = enumerate(depth)?;
    let pairs = pts
        .iter()
        .enumerate()
        .flat_map(|(i, x)| pts[i + 1..].iter().map(move |y| (x.clone(), y.clone())));
    Ok(DistortionReport::from_pairs(depth, pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Points,
}

/// Deterministic rendering: SVG with one filled path per depth-`n` triangle,
/// or a `word,corner,x,y` CSV of every canonical address of length `n`.
pub fn render(depth: usize, format: RenderFormat, fill: &str) -> Result<String> {
    if depth > RENDER_CAP {
        return Err(Error::DepthCap {
            depth,
            cap: RENDER_CAP,
        });
    }
    Ok(match format {
        RenderFormat::Svg => render_svg(depth, fill),
        RenderFormat::Points => render_points(depth)?,
    })
}

/// Corner vertices of every depth-`n` triangle, in lexicographic word order.
pub fn triangles(depth: usize) -> Vec<[Point2; 3]> {
    let mut out = vec![Corner::ALL.map(vertex)];
    for _ in 0..depth {
        // the `m` sub-triangle of σ_w(Δ) is σ_w(σ_m(Δ)): halve towards its corner
        out = out
            .into_iter()
            .flat_map(|tri| {
                Letter::ALL.map(|m| {
                    let fixed = tri[m.corner().index()];
                    tri.map(|p| Point2::new((p.x + fixed.x) / 2.0, (p.y + fixed.y) / 2.0))
                })
            })
            .collect();
    }
    out
}

fn render_svg(depth: usize, fill: &str) -> String {
    let tris = triangles(depth);
    let mut svg = String::with_capacity(80 * tris.len() + 200);
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1 0.8660254\">\n",
    );
    for [t, l, r] in tris {
        let y = |p: Point2| SQRT3_2 - p.y;
        let _ = writeln!(
            svg,
            "<path d=\"M{:.7} {:.7} L{:.7} {:.7} L{:.7} {:.7} Z\" fill=\"{}\"/>",
            t.x,
            y(t),
            l.x,
            y(l),
            r.x,
            y(r),
            fill
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn render_points(depth: usize) -> Result<String> {
    let mut csv = String::from("word,corner,x,y\n");
    for addr in enumerate(depth)? {
        let p = address_to_point(&addr);
        let word: String = addr.word().iter().map(|m| m.as_char()).collect();
        let _ = writeln!(csv, "{},{},{:.12},{:.12}", word, addr.corner(), p.x, p.y);
    }
    Ok(csv)
}

/// Uniformly random point of the gasket at address resolution `level`.
pub fn random_gasket_point(rng: &mut dyn RngCore, level: usize) -> Point2 {
    address_to_point(&random_address(rng, level))
}

/// A random point of the closed outer triangle (not necessarily in 𝕊).
pub fn random_triangle_point(rng: &mut dyn RngCore) -> Point2 {
    let (mut s, mut t): (f64, f64) = (rng.gen(), rng.gen());
    if s + t > 1.0 {
        s = 1.0 - s;
        t = 1.0 - t;
    }
    from_barycentric([s, t, 1.0 - s - t])
}
