//! The quotient metric on `M⊗X`, its exact form on finite addresses, and a
//! brute-force shortest-path oracle for cross-checking it.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::OnceLock;

use crate::address::{enumerate, glue_corner, third_letter, Address, Corner, Letter};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Largest level the shortest-path oracle accepts.
pub const ORACLE_MAX_LEVEL: usize = 8;

/// Scalars a 1-bounded metric can take: exact dyadics on addresses, `f64`
/// on user-supplied spaces.
pub trait MetricValue: Copy + PartialOrd + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn half(self) -> Self;

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn in_unit_interval(self) -> bool {
        self >= Self::zero() && self <= Self::one()
    }
}

impl MetricValue for Dyadic {
    fn zero() -> Self {
        Dyadic::ZERO
    }
    fn one() -> Self {
        Dyadic::ONE
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn half(self) -> Self {
        Dyadic::half(self)
    }
}

impl MetricValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn half(self) -> Self {
        self / 2.0
    }
    fn in_unit_interval(self) -> bool {
        // absorb rounding from Euclidean carriers
        (-1e-12..=1.0 + 1e-12).contains(&self)
    }
}

/// Distances from a point to `T`, `L`, `R`, indexed by [`Corner::index`].
pub type CornerDistances<D> = [D; 3];

/// The corner-distance triple of a distinguished point itself.
pub fn corner_triple<D: MetricValue>(z: Corner) -> CornerDistances<D> {
    Corner::ALL.map(|c| if c == z { D::zero() } else { D::one() })
}

/// Distance between `m1⊗x` and `m2⊗y` in `M⊗X`.
///
/// `x_dists` and `y_dists` are the distances of `x` and `y` to the corners
/// of `X`; `same_copy` is `d_X(x, y)` and is only read when `m1 == m2`.
/// Between different copies the shortest chain either crosses the gluing
/// point of the two copies directly, or runs through the third copy between
/// its two glued corners (which are at distance 1 in `X`).
pub fn tensor_distance<D: MetricValue>(
    m1: Letter,
    x_dists: &CornerDistances<D>,
    m2: Letter,
    y_dists: &CornerDistances<D>,
    same_copy: D,
) -> Result<D> {
    for v in x_dists
        .iter()
        .chain(y_dists)
        .chain(std::iter::once(&same_copy))
    {
        if !v.in_unit_interval() {
            return Err(Error::NotOneBounded(format!(
                "distance {v:?} outside [0, 1]"
            )));
        }
    }
    if m1 == m2 {
        return Ok(same_copy.half());
    }
    let m3 = third_letter(m1, m2);
    let direct = x_dists[glue_corner(m1, m2).index()].add(y_dists[glue_corner(m2, m1).index()]);
    let through = x_dists[glue_corner(m1, m3).index()]
        .add(D::one())
        .add(y_dists[glue_corner(m2, m3).index()]);
    Ok(direct.min(through).half().min(D::one()))
}

/// Corner-distance triple of `word⊗z` in `M^len(word)⊗I`, computed from the
/// innermost letter outwards.
fn address_corner_triple(word: &[Letter], z: Corner) -> CornerDistances<Dyadic> {
    let mut triple = corner_triple::<Dyadic>(z);
    for &m in word.iter().rev() {
        let inner = triple;
        triple = Corner::ALL.map(|c| {
            // corner c of M⊗X is letter(c)⊗c_X
            tensor_distance(m, &inner, c.letter(), &corner_triple(c), inner[c.index()])
                .expect("address distances are 1-bounded")
        });
    }
    triple
}

/// Exact `d_G(x, y)`.
pub fn address_distance(x: &Address, y: &Address) -> Dyadic {
    let n = x.len().max(y.len());
    let x = x.padded(n);
    let y = y.padded(n);
    let k = x.common_prefix_len(&y);
    if k == n {
        return if x.corner() == y.corner() {
            Dyadic::ZERO
        } else {
            Dyadic::pow2_neg(n as u32)
        };
    }
    let (xw, yw) = (&x.word()[k..], &y.word()[k..]);
    let tx = address_corner_triple(&xw[1..], x.corner());
    let ty = address_corner_triple(&yw[1..], y.corner());
    tensor_distance(xw[0], &tx, yw[0], &ty, Dyadic::ZERO)
        .expect("address distances are 1-bounded")
        .scale_pow2(k as u32)
}

/// `2^-n` where `n` is the length of the shared word prefix of `x` and `y`
/// (after padding to a common length); an upper bound on their distance.
pub fn common_prefix_bound(x: &Address, y: &Address) -> Dyadic {
    let n = x.len().max(y.len());
    let k = x.padded(n).common_prefix_len(&y.padded(n));
    Dyadic::pow2_neg(k as u32)
}

/// All pairwise distances between canonical addresses of one level.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    level: usize,
    entries: BTreeMap<(Address, Address), Dyadic>,
}

impl DistanceTable {
    pub fn build(level: usize) -> Result<Self> {
        let points = enumerate(level)?;
        let mut entries = BTreeMap::new();
        for (i, x) in points.iter().enumerate() {
            for y in &points[i..] {
                entries.insert((x.clone(), y.clone()), address_distance(x, y));
            }
        }
        Ok(DistanceTable { level, entries })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, x: &Address, y: &Address) -> Option<Dyadic> {
        let (x, y) = (x.canonicalize(), y.canonicalize());
        let key = if x <= y { (x, y) } else { (y, x) };
        self.entries.get(&key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Address, Address), &Dyadic)> {
        self.entries.iter()
    }
}

/// Weighted graph on the points of `Mⁿ⊗I`, weights in units of `2^-n`.
///
/// Vertices are canonical addresses plus one hub per cell of depth `k < n`.
/// Every raw tuple `w⊗z` is joined to the hubs of the cells containing it:
/// entering a depth-`k` hub costs `2^(n-k)` units and leaving it is free,
/// which realises the unit-distance jump between different copies of that
/// cell. Each depth-`n` cell contributes unit edges between its three
/// corners. Gluings are realised by mapping raw tuples to canonical vertices.
struct OracleGraph {
    index: HashMap<Address, usize>,
    adjacency: Vec<Vec<(usize, u64)>>,
}

impl OracleGraph {
    fn build(n: usize) -> Self {
        let points = enumerate(n).expect("oracle level within enumeration cap");
        let index: HashMap<Address, usize> = points
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let mut hub_base = Vec::with_capacity(n);
        let mut hubs = 0usize;
        for k in 0..n {
            hub_base.push(points.len() + hubs);
            hubs += 3usize.pow(k as u32);
        }
        let mut adjacency = vec![Vec::new(); points.len() + hubs];

        let cells = 3usize.pow(n as u32);
        for cell in 0..cells {
            let word = digits_to_word(cell, n);
            let corners = Corner::ALL.map(|z| index[&Address::new(word.clone(), z).canonicalize()]);
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        adjacency[corners[i]].push((corners[j], 1));
                    }
                }
            }
            for z in Corner::ALL {
                let v = corners[z.index()];
                for (k, &base) in hub_base.iter().enumerate() {
                    // prefix of length k, as a base-3 number
                    let hub = base + cell / 3usize.pow((n - k) as u32);
                    adjacency[v].push((hub, 1u64 << (n - k)));
                    adjacency[hub].push((v, 0));
                }
            }
        }
        OracleGraph { index, adjacency }
    }

    fn shortest(&self, from: usize, to: usize) -> u64 {
        let mut dist = vec![u64::MAX; self.adjacency.len()];
        let mut heap = BinaryHeap::new();
        dist[from] = 0;
        heap.push(Reverse((0u64, from)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if v == to {
                return d;
            }
            if d > dist[v] {
                continue;
            }
            for &(w, cost) in &self.adjacency[v] {
                let nd = d + cost;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        unreachable!("oracle graph is connected")
    }
}

fn digits_to_word(mut cell: usize, n: usize) -> Vec<Letter> {
    let mut word = vec![Letter::A; n];
    for slot in word.iter_mut().rev() {
        *slot = Letter::ALL[cell % 3];
        cell /= 3;
    }
    word
}

fn oracle_graph(n: usize) -> &'static OracleGraph {
    static GRAPHS: [OnceLock<OracleGraph>; ORACLE_MAX_LEVEL + 1] =
        [const { OnceLock::new() }; ORACLE_MAX_LEVEL + 1];
    GRAPHS[n].get_or_init(|| OracleGraph::build(n))
}

/// `d_G(x, y)` by Dijkstra on the explicit quotient graph of `Mⁿ⊗I`.
pub fn oracle_distance(x: &Address, y: &Address) -> Result<Dyadic> {
    let n = x.len().max(y.len());
    if n > ORACLE_MAX_LEVEL {
        return Err(Error::OracleTooLarge {
            level: n,
            max: ORACLE_MAX_LEVEL,
        });
    }
    let graph = oracle_graph(n);
    let from = graph.index[&x.padded(n).canonicalize()];
    let to = graph.index[&y.padded(n).canonicalize()];
    let units = graph.shortest(from, to);
    Ok(Dyadic::new(units as i128, n as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(s: &str) -> Address {
        s.parse().unwrap()
    }

    fn d(s: &str, t: &str) -> Dyadic {
        address_distance(&addr(s), &addr(t))
    }

    #[test]
    fn tensor_distance_examples() {
        let half = Dyadic::pow2_neg(1);
        let x = corner_triple::<Dyadic>(Corner::L);
        let y = corner_triple::<Dyadic>(Corner::T);
        // same copy halves
        assert_eq!(
            tensor_distance(Letter::A, &x, Letter::A, &y, Dyadic::ONE).unwrap(),
            half
        );
        // glued point a⊗L = b⊗T
        assert_eq!(
            tensor_distance(Letter::A, &x, Letter::B, &y, Dyadic::ZERO).unwrap(),
            Dyadic::ZERO
        );
        // a⊗R vs b⊗R: the route through copy c wins
        let r = corner_triple::<Dyadic>(Corner::R);
        assert_eq!(
            tensor_distance(Letter::A, &r, Letter::B, &r, Dyadic::ZERO).unwrap(),
            half
        );
        assert!(matches!(
            tensor_distance(Letter::A, &[0.0, 1.5, 1.0], Letter::B, &[0.0; 3], 0.0),
            Err(Error::NotOneBounded(_))
        ));
    }

    #[test]
    fn address_distance_examples() {
        assert_eq!(d("a:T", "b:L"), Dyadic::ONE);
        assert_eq!(d("a:T", "b:R"), Dyadic::ONE);
        assert_eq!(d("a:T", "a:L"), Dyadic::pow2_neg(1));
        assert_eq!(d("aa:L", "aa:R"), Dyadic::pow2_neg(2));
        assert_eq!(d("b:L", "a:R"), Dyadic::ONE);
        assert_eq!(d("a:L", "b:T"), Dyadic::ZERO);
        assert_eq!(d(":L", "bbbb:L"), Dyadic::ZERO);
    }

    #[test]
    fn oracle_examples() {
        let o = |s: &str, t: &str| oracle_distance(&addr(s), &addr(t)).unwrap();
        assert_eq!(o("a:L", "b:T"), Dyadic::ZERO);
        assert_eq!(o("a:L", "c:R"), Dyadic::ONE);
        assert_eq!(o("b:L", "a:R"), Dyadic::ONE);
        assert_eq!(
            oracle_distance(&addr("aaaaaaaaa:T"), &addr(":L")),
            Err(Error::OracleTooLarge { level: 9, max: 8 })
        );
    }

    #[test]
    fn hand_expanded_case_split() {
        // a⊗L vs c⊗R: direct a→c costs d(L,R)+d(T,R) = 2,
        // through b costs d(L,L)+1+d(L,R) = 2; halved gives 1.
        assert_eq!(d("a:L", "c:R"), Dyadic::ONE);
        // a⊗L vs c⊗L: direct costs 2, through b costs 0+1+0.
        assert_eq!(d("a:L", "c:L"), Dyadic::pow2_neg(1));
    }

    #[test]
    fn common_prefix_bound_examples() {
        assert_eq!(common_prefix_bound(&addr("a:T"), &addr("b:L")), Dyadic::ONE);
        let (x, y) = (addr("aa:L"), addr("aa:R"));
        assert_eq!(common_prefix_bound(&x, &y), Dyadic::pow2_neg(2));
        assert_eq!(address_distance(&x, &y), Dyadic::pow2_neg(2));
    }

    #[test]
    fn prefix_bound_dominates_oracle_at_level_6() {
        // all level-6 pairs sharing a 5-prefix
        for x in enumerate(6).unwrap() {
            for y in enumerate(6).unwrap() {
                if x.common_prefix_len(&y) >= 5 {
                    let actual = oracle_distance(&x, &y).unwrap();
                    assert!(actual <= Dyadic::pow2_neg(5), "{x} {y}");
                    assert!(actual <= common_prefix_bound(&x, &y));
                }
            }
        }
    }

    #[test]
    fn distance_table_is_a_metric_at_level_3() {
        let table = DistanceTable::build(3).unwrap();
        let pts = enumerate(3).unwrap();
        assert_eq!(table.len(), pts.len() * (pts.len() + 1) / 2);
        for x in &pts {
            for y in &pts {
                let dxy = table.get(x, y).unwrap();
                assert_eq!(dxy.is_zero(), x == y);
                assert!(dxy <= Dyadic::ONE);
                for z in &pts {
                    assert!(dxy <= table.get(x, z).unwrap() + table.get(z, y).unwrap());
                }
            }
        }
    }
}
