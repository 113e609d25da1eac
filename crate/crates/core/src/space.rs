//! Tripointed metric spaces presented by a metric callback and a sampler,
//! the functor `M⊗-` on spaces and on maps, and sample-based regularity
//! checks (short, Lipschitz, ε-δ continuity).

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::address::{Address, Corner, Letter};
use crate::error::{Error, Result};
use crate::metric::{address_distance, tensor_distance, CornerDistances};

/// Absolute slack when comparing floating-point distances.
pub const ABS_TOL: f64 = 1e-12;
/// Relative slack on ratio bounds.
pub const REL_TOL: f64 = 1e-9;

/// A 1-bounded metric space with distinguished `T`, `L`, `R` at pairwise
/// distance 1. Carriers may be uncountable, so they are given by a metric
/// and a sampler rather than an enumeration.
pub trait TripointedSpace {
    type Point: Clone + fmt::Debug;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn distinguished(&self, z: Corner) -> Self::Point;

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Point;

    fn corner_distances(&self, x: &Self::Point) -> CornerDistances<f64> {
        Corner::ALL.map(|z| self.distance(x, &self.distinguished(z)))
    }
}

/// Spot-check the tripointed-space axioms on `samples` random triples.
/// Returns a description of every violation found.
pub fn spot_check_space<X: TripointedSpace>(
    space: &X,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Vec<String> {
    let mut problems = Vec::new();
    for (i, z) in Corner::ALL.iter().enumerate() {
        for w in &Corner::ALL[i + 1..] {
            let d = space.distance(&space.distinguished(*z), &space.distinguished(*w));
            if (d - 1.0).abs() > ABS_TOL {
                problems.push(format!("d({z}, {w}) = {d}, expected 1"));
            }
        }
    }
    for _ in 0..samples {
        let (x, y, z) = (space.sample(rng), space.sample(rng), space.sample(rng));
        let dxy = space.distance(&x, &y);
        if (dxy - space.distance(&y, &x)).abs() > ABS_TOL {
            problems.push(format!("asymmetric at {x:?}, {y:?}"));
        }
        if !(-ABS_TOL..=1.0 + ABS_TOL).contains(&dxy) {
            problems.push(format!("d({x:?}, {y:?}) = {dxy} outside [0, 1]"));
        }
        if dxy > space.distance(&x, &z) + space.distance(&z, &y) + ABS_TOL {
            problems.push(format!("triangle inequality fails at {x:?}, {z:?}, {y:?}"));
        }
        if space.distance(&x, &x).abs() > ABS_TOL {
            problems.push(format!("d(x, x) != 0 at {x:?}"));
        }
    }
    problems
}

/// `m⊗x`, the class of `(m, x)` in `M⊗X`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPoint<P> {
    pub letter: Letter,
    pub inner: P,
}

impl<P> TensorPoint<P> {
    pub fn new(letter: Letter, inner: P) -> Self {
        TensorPoint { letter, inner }
    }
}

/// `M⊗X`: three half-scaled copies of `X` glued at corners, with the
/// quotient metric.
#[derive(Clone, Debug)]
pub struct TensorSpace<X> {
    pub base: X,
}

pub fn tensor_space<X: TripointedSpace>(base: X) -> TensorSpace<X> {
    TensorSpace { base }
}

impl<X: TripointedSpace> TensorSpace<X> {
    /// Whether two representatives name the same point of `M⊗X`.
    pub fn same_point(&self, x: &TensorPoint<X::Point>, y: &TensorPoint<X::Point>) -> bool {
        self.distance(x, y) <= ABS_TOL
    }
}

impl<X: TripointedSpace> TripointedSpace for TensorSpace<X> {
    type Point = TensorPoint<X::Point>;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        if x.letter == y.letter {
            return self.base.distance(&x.inner, &y.inner) / 2.0;
        }
        let tx = self.base.corner_distances(&x.inner).map(clamp_unit);
        let ty = self.base.corner_distances(&y.inner).map(clamp_unit);
        tensor_distance(x.letter, &tx, y.letter, &ty, 0.0).expect("base space metric is 1-bounded")
    }

    fn distinguished(&self, z: Corner) -> Self::Point {
        TensorPoint::new(z.letter(), self.base.distinguished(z))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Point {
        let letter = Letter::ALL[rng.gen_range(0..3)];
        TensorPoint::new(letter, self.base.sample(rng))
    }
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

type MapFn<X, Y> =
    Arc<dyn Fn(&<X as TripointedSpace>::Point) -> <Y as TripointedSpace>::Point + Send + Sync>;

/// A function between tripointed spaces, meant to preserve `T`, `L`, `R`.
pub struct PointedMap<X: TripointedSpace, Y: TripointedSpace> {
    pub domain: X,
    pub codomain: Y,
    func: MapFn<X, Y>,
}

impl<X, Y> Clone for PointedMap<X, Y>
where
    X: TripointedSpace + Clone,
    Y: TripointedSpace + Clone,
{
    fn clone(&self) -> Self {
        PointedMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            func: Arc::clone(&self.func),
        }
    }
}

impl<X: TripointedSpace, Y: TripointedSpace> PointedMap<X, Y> {
    pub fn new(
        domain: X,
        codomain: Y,
        func: impl Fn(&X::Point) -> Y::Point + Send + Sync + 'static,
    ) -> Self {
        PointedMap {
            domain,
            codomain,
            func: Arc::new(func),
        }
    }

    pub fn apply(&self, x: &X::Point) -> Y::Point {
        (self.func)(x)
    }

    /// Check `f(T) = T`, `f(L) = L`, `f(R) = R`.
    pub fn check_pointed(&self) -> Result<()> {
        for z in Corner::ALL {
            let image = self.apply(&self.domain.distinguished(z));
            let d = self
                .codomain
                .distance(&image, &self.codomain.distinguished(z));
            if d > ABS_TOL {
                return Err(Error::NotTripointed(format!(
                    "{z} maps to {image:?}, at distance {d} from {z} of the codomain"
                )));
            }
        }
        Ok(())
    }
}

/// `M⊗f : m⊗x ↦ m⊗f(x)`.
pub fn tensor_map<X, Y>(f: &PointedMap<X, Y>) -> Result<PointedMap<TensorSpace<X>, TensorSpace<Y>>>
where
    X: TripointedSpace + Clone,
    Y: TripointedSpace + Clone,
    X::Point: 'static,
    Y::Point: 'static,
{
    f.check_pointed()?;
    let func = Arc::clone(&f.func);
    Ok(PointedMap::new(
        tensor_space(f.domain.clone()),
        tensor_space(f.codomain.clone()),
        move |p: &TensorPoint<X::Point>| TensorPoint::new(p.letter, func(&p.inner)),
    ))
}

/// The regularity class a map is checked against.
#[derive(Clone, Debug, PartialEq)]
pub enum RegularityClass {
    Short,
    Lipschitz(f64),
    /// `(ε, δ)` rows: sampled pairs closer than `δ` must map closer than `ε`.
    Continuous(Vec<(f64, f64)>),
}

impl fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityClass::Short => write!(f, "short"),
            RegularityClass::Lipschitz(k) => write!(f, "lipschitz({k})"),
            RegularityClass::Continuous(_) => write!(f, "continuous"),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Witness {
    pub x: String,
    pub y: String,
    pub domain_distance: f64,
    pub image_distance: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ContinuityRow {
    pub epsilon: f64,
    pub delta: f64,
    /// Smallest sampled domain distance among pairs whose images are at
    /// least `ε` apart; any `δ` up to this value works on the samples.
    pub observed_delta: Option<f64>,
}

/// Outcome of a sampled regularity check. Aggregates by [`merge`](Self::merge).
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RegularityReport {
    pub class: String,
    pub samples: usize,
    pub max_ratio: f64,
    pub pass: bool,
    pub worst: Option<Witness>,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub continuity: Vec<ContinuityRow>,
}

const MAX_WITNESSES: usize = 10;

impl RegularityReport {
    fn empty(class: &RegularityClass) -> Self {
        let continuity = match class {
            RegularityClass::Continuous(rows) => rows
                .iter()
                .map(|&(epsilon, delta)| ContinuityRow {
                    epsilon,
                    delta,
                    observed_delta: None,
                })
                .collect(),
            _ => Vec::new(),
        };
        RegularityReport {
            class: class.to_string(),
            samples: 0,
            max_ratio: 0.0,
            pass: true,
            worst: None,
            witnesses: Vec::new(),
            continuity,
        }
    }

    pub fn merge(mut self, other: RegularityReport) -> RegularityReport {
        assert_eq!(
            self.class, other.class,
            "merging reports of different classes"
        );
        self.samples += other.samples;
        self.pass &= other.pass;
        if other.max_ratio > self.max_ratio {
            self.max_ratio = other.max_ratio;
            self.worst = other.worst;
        }
        self.witnesses.extend(other.witnesses);
        sort_witnesses(&mut self.witnesses);
        for (row, o) in self.continuity.iter_mut().zip(other.continuity) {
            row.observed_delta = match (row.observed_delta, o.observed_delta) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn sort_witnesses(w: &mut Vec<Witness>) {
    w.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    w.truncate(MAX_WITNESSES);
}

/// Draw `count` random pairs from a space.
pub fn sample_pairs<X: TripointedSpace>(
    space: &X,
    count: usize,
    rng: &mut dyn RngCore,
) -> Vec<(X::Point, X::Point)> {
    (0..count)
        .map(|_| (space.sample(rng), space.sample(rng)))
        .collect()
}

/// Check `f` against `class` on the given pairs. Pairs at domain distance
/// zero are left out of the ratio statistics; they only count as
/// violations when their images differ.
pub fn check_pairs<X, Y, F>(
    domain: &X,
    codomain: &Y,
    f: F,
    class: &RegularityClass,
    pairs: &[(X::Point, X::Point)],
) -> RegularityReport
where
    X: TripointedSpace,
    Y: TripointedSpace,
    F: Fn(&X::Point) -> Y::Point,
{
    let mut report = RegularityReport::empty(class);
    report.samples = pairs.len();
    for (x, y) in pairs {
        let dd = domain.distance(x, y);
        let di = codomain.distance(&f(x), &f(y));
        let ratio = if dd > ABS_TOL { di / dd } else { 0.0 };
        let witness = || Witness {
            x: format!("{x:?}"),
            y: format!("{y:?}"),
            domain_distance: dd,
            image_distance: di,
            ratio: if dd > ABS_TOL { ratio } else { f64::INFINITY },
        };
        if dd > ABS_TOL && ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst = Some(witness());
        }
        let violated = if dd <= ABS_TOL {
            di > ABS_TOL
        } else {
            match class {
                RegularityClass::Short => di > dd * (1.0 + REL_TOL) + ABS_TOL,
                RegularityClass::Lipschitz(k) => di > k * dd * (1.0 + REL_TOL) + ABS_TOL,
                RegularityClass::Continuous(rows) => {
                    rows.iter().any(|&(eps, delta)| dd < delta && di >= eps)
                }
            }
        };
        for row in &mut report.continuity {
            if di >= row.epsilon {
                row.observed_delta = Some(row.observed_delta.map_or(dd, |d: f64| d.min(dd)));
            }
        }
        if violated {
            report.pass = false;
            report.witnesses.push(witness());
        }
    }
    sort_witnesses(&mut report.witnesses);
    report
}

/// Sampled regularity check of a pointed map.
pub fn check_regularity<X: TripointedSpace, Y: TripointedSpace>(
    f: &PointedMap<X, Y>,
    class: &RegularityClass,
    samples: usize,
    rng: &mut dyn RngCore,
) -> RegularityReport {
    let pairs = sample_pairs(&f.domain, samples, rng);
    check_pairs(&f.domain, &f.codomain, |x| f.apply(x), class, &pairs)
}

/// A carrier re-metrized discretely: distinct points are at distance 1.
#[derive(Clone, Debug)]
pub struct DiscreteWrapper<X> {
    pub base: X,
}

impl<X: TripointedSpace> TripointedSpace for DiscreteWrapper<X> {
    type Point = X::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        if self.base.distance(x, y) == 0.0 {
            0.0
        } else {
            1.0
        }
    }

    fn distinguished(&self, z: Corner) -> Self::Point {
        self.base.distinguished(z)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Self::Point {
        self.base.sample(rng)
    }
}

/// The colimit `G` of finite addresses with its exact metric, sampled up to
/// `max_level`.
#[derive(Clone, Copy, Debug)]
pub struct AddressSpace {
    pub max_level: usize,
}

impl AddressSpace {
    pub fn new(max_level: usize) -> Self {
        AddressSpace { max_level }
    }
}

pub fn random_address(rng: &mut dyn RngCore, level: usize) -> Address {
    let word = (0..level)
        .map(|_| Letter::ALL[rng.gen_range(0..3)])
        .collect();
    Address::new(word, Corner::ALL[rng.gen_range(0..3)]).canonicalize()
}

impl TripointedSpace for AddressSpace {
    type Point = Address;

    fn distance(&self, x: &Address, y: &Address) -> f64 {
        address_distance(x, y).to_f64()
    }

    fn distinguished(&self, z: Corner) -> Address {
        Address::corner_point(z)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Address {
        let level = rng.gen_range(0..=self.max_level);
        random_address(rng, level)
    }
}

/// `G_ρ`: addresses with the discrete metric.
pub type DiscreteAddressSpace = DiscreteWrapper<AddressSpace>;

/// The algebra structure `g : M⊗G_ρ → G_ρ`, i.e. prepend on the discrete wrapper.
pub fn discrete_prepend(
    max_level: usize,
) -> PointedMap<TensorSpace<DiscreteAddressSpace>, DiscreteAddressSpace> {
    let g = DiscreteWrapper {
        base: AddressSpace::new(max_level),
    };
    PointedMap::new(tensor_space(g.clone()), g, |p: &TensorPoint<Address>| {
        p.inner.prepend(p.letter)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    /// The three-point space `I` with the discrete metric.
    #[derive(Clone, Copy, Debug)]
    struct Initial;

    impl TripointedSpace for Initial {
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

    #[test]
    fn tensor_of_initial_matches_level_one_addresses() {
        let fi = tensor_space(Initial);
        for m in Letter::ALL {
            for z in Corner::ALL {
                for n in Letter::ALL {
                    for w in Corner::ALL {
                        let d = fi.distance(&TensorPoint::new(m, z), &TensorPoint::new(n, w));
                        let exact =
                            address_distance(&Address::new(vec![m], z), &Address::new(vec![n], w));
                        assert_eq!(d, exact.to_f64());
                    }
                }
            }
        }
        let t = TensorPoint::new(Letter::A, Corner::T);
        assert_eq!(
            fi.distance(&t, &TensorPoint::new(Letter::B, Corner::L)),
            1.0
        );
        assert_eq!(
            fi.distance(&t, &TensorPoint::new(Letter::A, Corner::L)),
            0.5
        );
        assert!(fi.same_point(
            &TensorPoint::new(Letter::A, Corner::L),
            &TensorPoint::new(Letter::B, Corner::T)
        ));
    }

    #[test]
    fn tensor_space_distinguished_points_at_distance_one() {
        let mut rng = StdRng::seed_from_u64(1);
        let ffg = tensor_space(tensor_space(AddressSpace::new(4)));
        assert!(spot_check_space(&ffg, 200, &mut rng).is_empty());
    }

    #[test]
    fn discrete_tensor_values() {
        let mut rng = StdRng::seed_from_u64(2);
        let fg = tensor_space(DiscreteWrapper {
            base: AddressSpace::new(6),
        });
        for (x, y) in sample_pairs(&fg, 1000, &mut rng) {
            let d = fg.distance(&x, &y);
            assert!([0.0, 0.5, 1.0].contains(&d), "{d}");
        }
    }

    #[test]
    fn identity_and_constant_maps_are_short() {
        let mut rng = StdRng::seed_from_u64(3);
        let g = AddressSpace::new(6);
        let id = PointedMap::new(g, g, |x: &Address| x.clone());
        let report = check_regularity(&id, &RegularityClass::Short, 1000, &mut rng);
        assert!(report.pass);
        assert!((report.max_ratio - 1.0).abs() < 1e-12);

        let constant = PointedMap::new(g, g, |_: &Address| Address::corner_point(Corner::T));
        assert!(check_regularity(&constant, &RegularityClass::Short, 1000, &mut rng).pass);
        assert!(matches!(
            constant.check_pointed(),
            Err(Error::NotTripointed(_))
        ));
        assert!(matches!(
            tensor_map(&constant),
            Err(Error::NotTripointed(_))
        ));
    }

    #[test]
    fn tensor_map_of_identity_is_identity() {
        let mut rng = StdRng::seed_from_u64(4);
        let g = AddressSpace::new(5);
        let id = PointedMap::new(g, g, |x: &Address| x.clone());
        let fid = tensor_map(&id).unwrap();
        fid.check_pointed().unwrap();
        for p in (0..200).map(|_| fid.domain.sample(&mut rng)) {
            assert_eq!(fid.apply(&p), p);
        }
    }

    #[test]
    fn doubling_violates_short_but_not_lipschitz_two() {
        let mut rng = StdRng::seed_from_u64(5);
        // prepend is a half-scaling; its "inverse" on a-prefixed words doubles
        let g = AddressSpace::new(6);
        let pairs: Vec<_> = sample_pairs(&g, 300, &mut rng)
            .into_iter()
            .map(|(x, y)| (x.prepend(Letter::A), y.prepend(Letter::A)))
            .collect();
        let strip = |x: &Address| x.tail().unwrap_or_else(|| x.clone());
        let short = check_pairs(&g, &g, strip, &RegularityClass::Short, &pairs);
        assert!(!short.pass);
        assert!(!short.witnesses.is_empty());
        assert!((short.max_ratio - 2.0).abs() < 1e-12);
        let lip = check_pairs(&g, &g, strip, &RegularityClass::Lipschitz(2.0), &pairs);
        assert!(lip.pass);
        let merged = short.clone().merge(short);
        assert_eq!(merged.samples, 600);
        assert!(!merged.pass);
    }

    #[test]
    fn discrete_prepend_is_lipschitz_two_and_continuous() {
        let mut rng = StdRng::seed_from_u64(6);
        let g = discrete_prepend(6);
        g.check_pointed().unwrap();
        let lip = check_regularity(&g, &RegularityClass::Lipschitz(2.0), 1000, &mut rng);
        assert!(lip.pass, "{}", lip.to_json());
        let cont = check_regularity(
            &g,
            &RegularityClass::Continuous(vec![(0.5, 0.25), (1.0, 0.25)]),
            1000,
            &mut rng,
        );
        assert!(cont.pass);
        for row in &cont.continuity {
            assert!(row.observed_delta.is_none_or(|d| d >= 0.25));
        }
        let json: serde_json::Value = serde_json::from_str(&cont.to_json()).unwrap();
        for key in ["class", "samples", "max_ratio", "witnesses"] {
            assert!(json.get(key).is_some());
        }
    }
}
