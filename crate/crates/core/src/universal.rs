//! The two universal constructions.
//!
//! Initiality: every algebra `α : M⊗A → A` receives a unique map from the
//! addresses, defined by recursion on length. Finality: every coalgebra
//! `e : X → M⊗X` maps into the completion `S` by corecursion, reading off
//! the letters that iterating `e` emits.
//!
//! Also here: the built-in test coalgebras (the Cantor-staircase family,
//! the unit edge, the three-point space) and the Lipschitz blow-up
//! experiment.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::address::{Address, Corner, Letter};
use crate::completion::{
    depth_for_tolerance, s_structure, stream_distance, stream_distance_at_depth,
    tensor_stream_distance, AddressStream, ApproxReal,
};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::metric::address_distance;
use crate::space::{
    check_pairs, sample_pairs, tensor_space, RegularityClass, RegularityReport, TensorPoint,
    TripointedSpace, ABS_TOL,
};

/// `α : M⊗A → A`. Must agree on glued representatives.
pub trait Algebra: TripointedSpace {
    fn structure(&self, m: Letter, x: &Self::Point) -> Self::Point;
}

/// `e : X → M⊗X`, returning a chosen representative `(m, x')` of `m⊗x'`.
pub trait Coalgebra: TripointedSpace {
    fn structure(&self, x: &Self::Point) -> Result<(Letter, Self::Point)>;

    fn contains(&self, _x: &Self::Point) -> bool {
        true
    }
}

fn fold_address<A: Algebra>(alg: &A, addr: &Address) -> A::Point {
    addr.word()
        .iter()
        .rev()
        .fold(alg.distinguished(addr.corner()), |p, &m| {
            alg.structure(m, &p)
        })
}

/// `φ(z) = z_A`, `φ(m·w⊗z) = α(m⊗φ(w⊗z))`.
///
/// When `addr` has a glued twin, both are evaluated and must agree; a
/// disagreement means `α` is not well defined on `M⊗A`.
pub fn initial_morphism<A: Algebra>(alg: &A, addr: &Address) -> Result<A::Point> {
    let p = fold_address(alg, addr);
    if let Some(alt) = addr.alternative() {
        let q = fold_address(alg, &alt);
        let d = alg.distance(&p, &q);
        if d > ABS_TOL {
            return Err(Error::IllDefinedAlgebra(format!(
                "{addr} ↦ {p:?} but {alt} ↦ {q:?} (distance {d})"
            )));
        }
    }
    Ok(p)
}

/// `χₙ = m₀⊗⋯⊗m_{n-1}⊗xₙ`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationState<P> {
    pub emitted: Vec<Letter>,
    pub current: P,
}

impl<P> IterationState<P> {
    pub fn new(x: P) -> Self {
        IterationState {
            emitted: Vec::new(),
            current: x,
        }
    }
}

/// Apply `e` to the current point; the emitted prefix only grows.
pub fn corecursive_step<C: Coalgebra>(
    co: &C,
    mut st: IterationState<C::Point>,
) -> Result<IterationState<C::Point>> {
    let (m, next) = co.structure(&st.current)?;
    if !co.contains(&next) {
        return Err(Error::NotInCarrier(format!(
            "step {} from {:?} produced {:?}",
            st.emitted.len(),
            st.current,
            next
        )));
    }
    st.emitted.push(m);
    st.current = next;
    Ok(st)
}

pub fn iterate<C: Coalgebra>(co: &C, x: &C::Point, n: usize) -> Result<IterationState<C::Point>> {
    (0..n).try_fold(IterationState::new(x.clone()), |st, _| {
        corecursive_step(co, st)
    })
}

/// `θₙ(x) = m₀⋯m_{n-1}⊗T`.
pub fn theta<C: Coalgebra>(co: &C, x: &C::Point, n: usize) -> Result<Address> {
    theta_with_corner(co, x, n, Corner::T)
}

pub fn theta_with_corner<C: Coalgebra>(
    co: &C,
    x: &C::Point,
    n: usize,
    z: Corner,
) -> Result<Address> {
    Ok(Address::new(iterate(co, x, n)?.emitted, z).canonicalize())
}

/// `f(x) = lim θₙ(x)` as a lazy stream. Letters are produced on demand and
/// cached, so `truncate(f(x), n) == θₙ(x)` up to canonical form.
pub fn final_morphism<C>(co: Arc<C>, x: C::Point) -> AddressStream
where
    C: Coalgebra + Send + Sync + 'static,
    C::Point: Send + 'static,
{
    let mut state = Some(IterationState::new(x));
    AddressStream::from_generator(move || {
        let st = state
            .take()
            .expect("generator not re-entered after failure");
        let st = corecursive_step(&*co, st)?;
        let m = *st.emitted.last().expect("one letter emitted");
        // keep only the current point; the stream caches the letters
        state = Some(IterationState::new(st.current));
        Ok(m)
    })
}

/// Stream depth guaranteeing `d_S(f(x), θₙ(x)) ≤ tol`: `⌈log₂(1/tol)⌉ + 1`.
pub fn depth_for_answer(tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let n = (1.0 / tol).log2().ceil().max(0.0) as usize + 1;
    if n > crate::completion::MAX_DEPTH {
        return Err(Error::ToleranceTooSmall(tol));
    }
    Ok(n)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SquareWitness {
    pub x: String,
    pub letter: char,
    pub distance: ApproxReal,
}

/// Outcome of sampling `(M⊗f)∘e = s∘f`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SquareReport {
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
    pub worst: Option<SquareWitness>,
    pub failures: usize,
}

/// Check the finality square with the mediating map.
pub fn check_square<C>(
    co: &Arc<C>,
    samples: usize,
    tol: f64,
    rng: &mut dyn RngCore,
) -> Result<SquareReport>
where
    C: Coalgebra + Send + Sync + 'static,
    C::Point: Send + 'static,
{
    let co2 = Arc::clone(co);
    check_square_with(
        &**co,
        move |x| final_morphism(Arc::clone(&co2), x.clone()),
        samples,
        tol,
        rng,
    )
}

/// Check the square with an arbitrary candidate `f : X → S`; used for
/// negative controls.
pub fn check_square_with<C: Coalgebra>(
    co: &C,
    f: impl Fn(&C::Point) -> AddressStream,
    samples: usize,
    tol: f64,
    rng: &mut dyn RngCore,
) -> Result<SquareReport> {
    depth_for_tolerance(tol)?;
    let mut report = SquareReport {
        samples,
        tol,
        pass: true,
        worst: None,
        failures: 0,
    };
    for _ in 0..samples {
        let x = co.sample(rng);
        let (m, x1) = co.structure(&x)?;
        let (head, tail) = s_structure(&f(&x))?;
        let d = tensor_stream_distance(head, &tail, m, &f(&x1), tol)?;
        if d.lo() > Dyadic::ZERO {
            report.pass = false;
            report.failures += 1;
        }
        if report
            .worst
            .as_ref()
            .is_none_or(|w| d.value > w.distance.value)
        {
            report.worst = Some(SquareWitness {
                x: format!("{x:?}"),
                letter: m.as_char(),
                distance: d,
            });
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ShortStatus {
    Pass,
    Fail,
    PreconditionUnmet,
}

impl fmt::Display for ShortStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShortStatus::Pass => "pass",
            ShortStatus::Fail => "fail",
            ShortStatus::PreconditionUnmet => "precondition unmet",
        })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ShortWitness {
    pub x: String,
    pub y: String,
    pub domain_distance: f64,
    pub image_distance: ApproxReal,
}

/// Shortness of `e` (the precondition), then of `f` on the same pairs.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ShortPreservationReport {
    pub status: ShortStatus,
    pub precondition: RegularityReport,
    pub pairs: usize,
    pub max_excess: f64,
    pub witnesses: Vec<ShortWitness>,
}

/// For a short `e`, check `sup d_S(f x, f y) ≤ d_X(x, y) + tol` on `pairs`.
/// If `e` itself expands some pair the report is `PreconditionUnmet` and
/// carries the expanding pairs.
pub fn check_short_preservation<C>(
    co: &Arc<C>,
    pairs: &[(C::Point, C::Point)],
    tol: f64,
) -> Result<ShortPreservationReport>
where
    C: Coalgebra + Clone + Send + Sync + 'static,
    C::Point: Send + 'static,
{
    for (x, y) in pairs {
        co.structure(x)?;
        co.structure(y)?;
    }
    let target = tensor_space((**co).clone());
    let precondition = check_pairs(
        &**co,
        &target,
        |x| {
            let (m, p) = co.structure(x).expect("checked above");
            TensorPoint::new(m, p)
        },
        &RegularityClass::Short,
        pairs,
    );
    let mut report = ShortPreservationReport {
        status: ShortStatus::Pass,
        pairs: pairs.len(),
        precondition,
        max_excess: f64::NEG_INFINITY,
        witnesses: Vec::new(),
    };
    if !report.precondition.pass {
        report.status = ShortStatus::PreconditionUnmet;
        return Ok(report);
    }
    for (x, y) in pairs {
        let dx = co.distance(x, y);
        let fx = final_morphism(Arc::clone(co), x.clone());
        let fy = final_morphism(Arc::clone(co), y.clone());
        // half the budget for the certificate radius, the rest is slack
        let d = stream_distance(&fx, &fy, tol / 2.0)?;
        let excess = d.hi().to_f64() - dx;
        report.max_excess = report.max_excess.max(excess);
        if excess > tol {
            report.status = ShortStatus::Fail;
            report.witnesses.push(ShortWitness {
                x: format!("{x:?}"),
                y: format!("{y:?}"),
                domain_distance: dx,
                image_distance: d,
            });
        }
    }
    Ok(report)
}

/// Sampled-pair variant of [`check_short_preservation`].
pub fn check_short_preservation_sampled<C>(
    co: &Arc<C>,
    samples: usize,
    tol: f64,
    rng: &mut dyn RngCore,
) -> Result<ShortPreservationReport>
where
    C: Coalgebra + Clone + Send + Sync + 'static,
    C::Point: Send + 'static,
{
    let pairs = sample_pairs(&**co, samples, rng);
    check_short_preservation(co, &pairs, tol)
}

// ---------------------------------------------------------------------------
// Built-in coalgebras

/// A point of the Cantor-staircase carrier: the unit segment on the x-axis
/// (exact rational abscissa) or the apex above it.
#[derive(Clone, PartialEq, Eq)]
pub enum CantorPoint {
    Segment(BigRational),
    Apex,
}

impl CantorPoint {
    pub fn segment(numer: i64, denom: i64) -> Self {
        CantorPoint::Segment(BigRational::new(numer.into(), denom.into()))
    }

    fn x_f64(&self) -> f64 {
        match self {
            CantorPoint::Segment(x) => x.to_f64().unwrap_or(f64::NAN),
            CantorPoint::Apex => 0.5,
        }
    }
}

impl fmt::Debug for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CantorPoint::Segment(x) => write!(f, "({x}, 0)"),
            CantorPoint::Apex => write!(f, "apex"),
        }
    }
}

/// The blow-up coalgebra with parameter `j ≥ 4`.
///
/// The segment `[0, 1]` is cut at `1/j, 2/j, 1 - 2/j, 1 - 1/j`. The outer
/// pieces collapse to `L` or `R`, the pieces next to them are stretched by
/// `j` onto the whole segment, and the middle piece goes to the glued
/// point `b⊗R = c⊗L`. The apex goes to `a⊗T`. Stretching by `j` into a
/// half-scale copy makes `e` Lipschitz with constant `j/2` and no better.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorCoalgebra {
    j: u32,
}

impl CantorCoalgebra {
    pub fn new(j: u32) -> Result<Self> {
        if j < 4 {
            return Err(Error::InvalidJ(j));
        }
        Ok(CantorCoalgebra { j })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    fn frac(&self, k: u32) -> BigRational {
        BigRational::new(BigInt::from(k), BigInt::from(self.j))
    }
}

impl TripointedSpace for CantorCoalgebra {
    type Point = CantorPoint;

    fn distance(&self, x: &CantorPoint, y: &CantorPoint) -> f64 {
        match (x, y) {
            (CantorPoint::Apex, CantorPoint::Apex) => 0.0,
            (CantorPoint::Segment(a), CantorPoint::Segment(b)) => {
                (a - b).abs().to_f64().unwrap_or(f64::NAN)
            }
            (CantorPoint::Apex, p) | (p, CantorPoint::Apex) => {
                (p.x_f64() - 0.5).hypot(crate::euclid::SQRT3_2)
            }
        }
    }

    fn distinguished(&self, z: Corner) -> CantorPoint {
        match z {
            Corner::T => CantorPoint::Apex,
            Corner::L => CantorPoint::segment(0, 1),
            Corner::R => CantorPoint::segment(1, 1),
        }
    }

    /// Mixes the apex, points of the `j`-adic grids (where the case
    /// boundaries live) and generic rationals.
    fn sample(&self, rng: &mut dyn RngCore) -> CantorPoint {
        match rng.gen_range(0..20) {
            0 => CantorPoint::Apex,
            1..=9 => {
                let denom = BigInt::from(self.j).pow(rng.gen_range(1..=6));
                let k = rng.gen_range(0..=denom.to_u64().expect("small grid"));
                CantorPoint::Segment(BigRational::new(k.into(), denom))
            }
            _ => {
                let denom: u64 = rng.gen_range(1..=1_000_000);
                let k = rng.gen_range(0..=denom);
                CantorPoint::Segment(BigRational::new(k.into(), denom.into()))
            }
        }
    }
}

impl Coalgebra for CantorCoalgebra {
    fn structure(&self, p: &CantorPoint) -> Result<(Letter, CantorPoint)> {
        let x = match p {
            CantorPoint::Apex => return Ok((Letter::A, CantorPoint::Apex)),
            CantorPoint::Segment(x) => x,
        };
        if x.is_negative() || *x > BigRational::one() {
            return Err(Error::NotInCarrier(format!("{p:?}")));
        }
        let j = BigRational::from_integer(BigInt::from(self.j));
        let jm2 = BigRational::from_integer(BigInt::from(self.j - 2));
        let step = if *x <= self.frac(1) {
            (Letter::B, CantorPoint::segment(0, 1))
        } else if *x <= self.frac(2) {
            (Letter::B, CantorPoint::Segment(&j * x - BigRational::one()))
        } else if *x <= self.frac(self.j - 2) {
            (Letter::B, CantorPoint::segment(1, 1))
        } else if *x < self.frac(self.j - 1) {
            (Letter::C, CantorPoint::Segment(&j * x - jm2))
        } else {
            (Letter::C, CantorPoint::segment(1, 1))
        };
        Ok(step)
    }

    fn contains(&self, p: &CantorPoint) -> bool {
        match p {
            CantorPoint::Apex => true,
            CantorPoint::Segment(x) => !x.is_negative() && *x <= BigRational::one(),
        }
    }
}

/// A point of the unit edge with an apex at distance 1 from everything.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgePoint {
    Segment(f64),
    Apex,
}

/// Binary expansion on the edge: `t ↦ b⊗2t` on `[0, ½]`, `c⊗(2t - 1)`
/// above, apex `↦ a⊗T`. A short coalgebra; its mediating map sends `t` to
/// the `b`/`c` stream of its binary digits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeCoalgebra;

impl TripointedSpace for EdgeCoalgebra {
    type Point = EdgePoint;

    fn distance(&self, x: &EdgePoint, y: &EdgePoint) -> f64 {
        match (x, y) {
            (EdgePoint::Segment(s), EdgePoint::Segment(t)) => (s - t).abs(),
            (EdgePoint::Apex, EdgePoint::Apex) => 0.0,
            _ => 1.0,
        }
    }

    fn distinguished(&self, z: Corner) -> EdgePoint {
        match z {
            Corner::T => EdgePoint::Apex,
            Corner::L => EdgePoint::Segment(0.0),
            Corner::R => EdgePoint::Segment(1.0),
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> EdgePoint {
        match rng.gen_range(0..10) {
            0 => EdgePoint::Apex,
            1..=3 => {
                let e = rng.gen_range(1..=8);
                EdgePoint::Segment(rng.gen_range(0..=1u32 << e) as f64 / (1u32 << e) as f64)
            }
            _ => EdgePoint::Segment(rng.gen()),
        }
    }
}

impl Coalgebra for EdgeCoalgebra {
    fn structure(&self, p: &EdgePoint) -> Result<(Letter, EdgePoint)> {
        match *p {
            EdgePoint::Apex => Ok((Letter::A, EdgePoint::Apex)),
            EdgePoint::Segment(t) if !(0.0..=1.0).contains(&t) => {
                Err(Error::NotInCarrier(format!("{p:?}")))
            }
            EdgePoint::Segment(t) if t <= 0.5 => Ok((Letter::B, EdgePoint::Segment(2.0 * t))),
            EdgePoint::Segment(t) => Ok((Letter::C, EdgePoint::Segment(2.0 * t - 1.0))),
        }
    }

    fn contains(&self, p: &EdgePoint) -> bool {
        match *p {
            EdgePoint::Apex => true,
            EdgePoint::Segment(t) => (0.0..=1.0).contains(&t),
        }
    }
}

/// The three-point space `I` with `e(z) = letter(z)⊗z`; `f` sends each
/// corner to its constant stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CornerCoalgebra;

impl TripointedSpace for CornerCoalgebra {
    type Point = Corner;

    fn distance(&self, x: &Corner, y: &Corner) -> f64 {
        if x == y {
            0.0
        } else {
            1.0
        }
    }

    fn distinguished(&self, z: Corner) -> Corner {
        z
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Corner {
        Corner::ALL[rng.gen_range(0..3)]
    }
}

impl Coalgebra for CornerCoalgebra {
    fn structure(&self, z: &Corner) -> Result<(Letter, Corner)> {
        Ok((z.letter(), *z))
    }
}

/// A built-in coalgebra by name, as loaded from JSON:
/// `{"cantor": {"j": 8}}`, `"gasket"`, `"edge"` or `"corner"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoalgebraConfig {
    Cantor { j: u32 },
    Gasket,
    Edge,
    Corner,
}

impl CoalgebraConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: CoalgebraConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let CoalgebraConfig::Cantor { j } = config {
            CantorCoalgebra::new(j)?;
        }
        Ok(config)
    }
}

// ---------------------------------------------------------------------------
// Blow-up experiment

/// Deepest `n` for the blow-up table.
pub const BLOWUP_MAX_N: usize = 20;
/// Extra stream depth beyond `n` used to certify `d_S`.
const BLOWUP_EXTRA_DEPTH: usize = 20;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BlowupRow {
    pub n: usize,
    /// `d_C(xₙ, yₙ) = j⁻ⁿ`, exact.
    pub d_c: String,
    pub d_s: ApproxReal,
    /// `d_S / d_C` at the interval midpoint.
    pub ratio: f64,
    /// `(j/2)ⁿ`.
    pub expected_ratio: f64,
    /// Whether `2⁻ⁿ` lies in the certified `d_S` interval.
    pub within_radius: bool,
}

impl BlowupRow {
    pub fn d_c_f64(&self) -> f64 {
        parse_fraction(&self.d_c)
    }
}

fn parse_fraction(s: &str) -> f64 {
    let r: BigRational = s.parse().expect("formatted by BigRational");
    r.to_f64().unwrap_or(f64::NAN)
}

/// `xₙ = Σ_{k=1..n} j⁻ᵏ` and `yₙ = xₙ + j⁻ⁿ`.
pub fn blowup_points(j: u32, n: usize) -> (BigRational, BigRational) {
    let inv = BigRational::new(BigInt::one(), BigInt::from(j));
    let mut x = BigRational::zero();
    let mut term = BigRational::one();
    for _ in 0..n {
        term = &term * &inv;
        x = &x + &term;
    }
    let y = &x + &term;
    (x, y)
}

/// For `n = 1..=max_n`: `d_C(xₙ, yₙ) = j⁻ⁿ` against the certified
/// `d_S(f xₙ, f yₙ)`, whose exact value is `2⁻ⁿ`; the ratio is `(j/2)ⁿ`.
pub fn blowup_experiment(j: u32, max_n: usize) -> Result<Vec<BlowupRow>> {
    let co = Arc::new(CantorCoalgebra::new(j)?);
    if max_n > BLOWUP_MAX_N {
        return Err(Error::DepthCap {
            depth: max_n,
            cap: BLOWUP_MAX_N,
        });
    }
    (1..=max_n)
        .map(|n| {
            let (x, y) = blowup_points(j, n);
            let d_c = &y - &x;
            let fx = final_morphism(Arc::clone(&co), CantorPoint::Segment(x));
            let fy = final_morphism(Arc::clone(&co), CantorPoint::Segment(y));
            let d_s = stream_distance_at_depth(&fx, &fy, n + BLOWUP_EXTRA_DEPTH)?;
            let d_c_f = d_c.to_f64().unwrap_or(f64::NAN);
            Ok(BlowupRow {
                n,
                d_c: d_c.to_string(),
                d_s,
                ratio: d_s.value.to_f64() / d_c_f,
                expected_ratio: (j as f64 / 2.0).powi(n as i32),
                within_radius: (d_s.value - Dyadic::pow2_neg(n as u32)).abs() <= d_s.radius,
            })
        })
        .collect()
}

/// `d_G(θ_p(x), θ_q(x)) - bound(min(p, q))` maximized over `1 ≤ p, q ≤ max`,
/// from a single run of `max` steps, with the pair attaining it. With
/// `bound(n) = 2^-n` the Cauchy estimate says the result is `≤ 0`.
pub fn cauchy_excess<C: Coalgebra>(
    co: &C,
    x: &C::Point,
    max: usize,
    bound: impl Fn(usize) -> Dyadic,
) -> Result<(Dyadic, (usize, usize))> {
    let letters = iterate(co, x, max)?.emitted;
    let thetas: Vec<Address> = (0..=max)
        .map(|n| Address::new(letters[..n].to_vec(), Corner::T).canonicalize())
        .collect();
    let mut worst: Option<(Dyadic, (usize, usize))> = None;
    for p in 1..=max {
        for q in 1..=max {
            let excess = address_distance(&thetas[p], &thetas[q]) - bound(p.min(q));
            if worst.is_none_or(|(w, _)| excess > w) {
                worst = Some((excess, (p, q)));
            }
        }
    }
    Ok(worst.unwrap_or((Dyadic::ZERO, (0, 0))))
}
