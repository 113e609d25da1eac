//! The completion `S` of `G`: points are infinite letter streams, read
//! through their truncations `prefix(n)⊗T`, which form a Cauchy sequence
//! with modulus `2^-n`.
//!
//! Equality on `S` is only decidable to a tolerance, so distances come back
//! as [`ApproxReal`] intervals. Eventually periodic streams additionally
//! have an exact descriptor ([`PeriodicStream`]) on which equality is
//! decidable through [`canonical_tail`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::address::{glued_partner, Address, Corner, Letter};
use crate::dyadic::{Dyadic, MAX_EXPONENT};
use crate::error::{Error, Result};
use crate::metric::address_distance;

/// Deepest truncation used for certified distances.
pub const MAX_DEPTH: usize = (MAX_EXPONENT - 8) as usize;

/// A value with a certified error radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ApproxReal {
    pub value: Dyadic,
    pub radius: Dyadic,
}

impl ApproxReal {
    pub fn exact(value: Dyadic) -> Self {
        ApproxReal {
            value,
            radius: Dyadic::ZERO,
        }
    }

    pub fn lo(&self) -> Dyadic {
        self.value - self.radius
    }

    pub fn hi(&self) -> Dyadic {
        self.value + self.radius
    }

    pub fn contains(&self, x: Dyadic) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo().to_f64() <= x && x <= self.hi().to_f64()
    }

    pub fn overlaps(&self, other: &ApproxReal) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }
}

impl fmt::Display for ApproxReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ± {}",
            self.value.to_decimal_string(),
            self.radius.to_decimal_string()
        )
    }
}

/// An eventually periodic stream `head · block^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicStream {
    head: Vec<Letter>,
    block: Vec<Letter>,
}

impl PeriodicStream {
    pub fn new(head: Vec<Letter>, block: Vec<Letter>) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::Parse("repeated block must be non-empty".into()));
        }
        let mut p = PeriodicStream { head, block };
        p.normalize();
        Ok(p)
    }

    /// `m^ω`.
    pub fn constant(m: Letter) -> Self {
        PeriodicStream {
            head: Vec::new(),
            block: vec![m],
        }
    }

    /// The stream of a finite address, padded with `letter(z)` forever.
    pub fn from_address(addr: &Address) -> Self {
        PeriodicStream::new(addr.word().to_vec(), vec![addr.corner().letter()])
            .expect("non-empty block")
    }

    pub fn head(&self) -> &[Letter] {
        &self.head
    }

    pub fn block(&self) -> &[Letter] {
        &self.block
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.block[(i - self.head.len()) % self.block.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<Letter> {
        (0..n).map(|i| self.letter_at(i)).collect()
    }

    /// Shortest head and primitive block describing the same sequence.
    fn normalize(&mut self) {
        let p = self.block.len();
        if let Some(q) = (1..=p)
            .find(|&q| p.is_multiple_of(q) && (q..p).all(|i| self.block[i] == self.block[i - q]))
        {
            self.block.truncate(q);
        }
        while let Some(&last) = self.head.last() {
            if last != *self.block.last().expect("non-empty block") {
                break;
            }
            self.head.pop();
            self.block.rotate_right(1);
        }
    }

    /// Lexicographic order of the infinite sequences.
    pub fn cmp_sequence(&self, other: &PeriodicStream) -> Ordering {
        let horizon = self.head.len().max(other.head.len()) + self.block.len() * other.block.len();
        (0..horizon)
            .map(|i| self.letter_at(i).cmp(&other.letter_at(i)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// The other expansion of the same point of `S`, if it has one: streams
    /// ending `u·m·x^ω` where corner `letter⁻¹(x)` of copy `m` is glued.
    pub fn dual(&self) -> Option<PeriodicStream> {
        let [x] = self.block[..] else {
            return None;
        };
        let (&m, u) = self.head.split_last()?;
        let (m2, z2) = glued_partner(m, x.corner())?;
        let mut head = u.to_vec();
        head.push(m2);
        PeriodicStream::new(head, vec![z2.letter()]).ok()
    }

    /// Exact equality as points of `S`.
    pub fn same_point(&self, other: &PeriodicStream) -> bool {
        canonical_tail(self) == canonical_tail(other)
    }
}

/// The lexicographically least descriptor among the gluing-induced
/// expansions of the same point.
pub fn canonical_tail(p: &PeriodicStream) -> PeriodicStream {
    match p.dual() {
        Some(d) if d.cmp_sequence(p) == Ordering::Less => d,
        _ => p.clone(),
    }
}

impl fmt::Display for PeriodicStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.head {
            write!(f, "{m}")?;
        }
        write!(f, "(")?;
        for m in &self.block {
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("invalid letter {c:?}"))))
        .collect()
}

impl FromStr for PeriodicStream {
    type Err = Error;

    /// `"ab(c)"` for `a·b·c^ω`; a finite address such as `"ab:L"` lifts to
    /// `a·b·b^ω`.
    fn from_str(s: &str) -> Result<Self> {
        if s.contains(':') {
            return Ok(PeriodicStream::from_address(&s.parse()?));
        }
        let (head, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Parse(format!("expected head(block) in {s:?}")))?;
        let block = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
        PeriodicStream::new(parse_letters(head)?, parse_letters(block)?)
    }
}

type Generator = Box<dyn FnMut() -> Result<Letter> + Send>;

struct LazySource {
    cache: Vec<Letter>,
    next: Generator,
    failure: Option<Error>,
}

enum Node {
    Periodic(PeriodicStream),
    Lazy(Mutex<LazySource>),
    Cons(Letter, AddressStream),
    Shift(AddressStream),
}

/// A point of `S`: an infinite letter stream with monotone prefix access.
/// Cloning is cheap; lazily generated letters are cached and shared.
#[derive(Clone)]
pub struct AddressStream(Arc<Node>);

impl AddressStream {
    pub fn periodic(p: PeriodicStream) -> Self {
        AddressStream(Arc::new(Node::Periodic(p)))
    }

    /// A stream whose letters are produced one at a time by `next`. The
    /// generator is called at most once per position.
    pub fn from_generator(next: impl FnMut() -> Result<Letter> + Send + 'static) -> Self {
        AddressStream(Arc::new(Node::Lazy(Mutex::new(LazySource {
            cache: Vec::new(),
            next: Box::new(next),
            failure: None,
        }))))
    }

    /// `ψ(m, p) = m·p`.
    pub fn cons(m: Letter, tail: AddressStream) -> Self {
        if let Some(p) = tail.descriptor() {
            let mut head = vec![m];
            head.extend_from_slice(p.head());
            return AddressStream::periodic(
                PeriodicStream::new(head, p.block().to_vec()).expect("non-empty block"),
            );
        }
        AddressStream(Arc::new(Node::Cons(m, tail)))
    }

    /// Drop the first letter.
    pub fn shift(&self) -> Self {
        if let Some(p) = self.descriptor() {
            return AddressStream::periodic(shift_periodic(&p));
        }
        AddressStream(Arc::new(Node::Shift(self.clone())))
    }

    /// The exact descriptor, when the stream is known to be eventually periodic.
    pub fn descriptor(&self) -> Option<PeriodicStream> {
        match &*self.0 {
            Node::Periodic(p) => Some(p.clone()),
            _ => None,
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Result<Vec<Letter>> {
        match &*self.0 {
            Node::Periodic(p) => Ok(p.prefix(n)),
            Node::Lazy(source) => {
                let mut src = source.lock().expect("stream generator panicked");
                while src.cache.len() < n {
                    if let Some(e) = &src.failure {
                        return Err(e.clone());
                    }
                    match (src.next)() {
                        Ok(m) => src.cache.push(m),
                        Err(e) => {
                            src.failure = Some(e.clone());
                            return Err(e);
                        }
                    }
                }
                Ok(src.cache[..n].to_vec())
            }
            Node::Cons(m, tail) => {
                if n == 0 {
                    return Ok(Vec::new());
                }
                let mut out = vec![*m];
                out.extend(tail.prefix(n - 1)?);
                Ok(out)
            }
            Node::Shift(inner) => Ok(inner.prefix(n + 1)?.split_off(1)),
        }
    }

    pub fn head(&self) -> Result<Letter> {
        Ok(self.prefix(1)?[0])
    }
}

fn shift_periodic(p: &PeriodicStream) -> PeriodicStream {
    if let Some((_, rest)) = p.head().split_first() {
        PeriodicStream::new(rest.to_vec(), p.block().to_vec())
    } else {
        let mut block = p.block().to_vec();
        block.rotate_left(1);
        PeriodicStream::new(Vec::new(), block)
    }
    .expect("non-empty block")
}

impl fmt::Debug for AddressStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.descriptor() {
            Some(p) => write!(f, "AddressStream({p})"),
            None => match self.prefix(12) {
                Ok(letters) => {
                    let s: String = letters.iter().map(|m| m.as_char()).collect();
                    write!(f, "AddressStream({s}…)")
                }
                Err(e) => write!(f, "AddressStream(<{e}>)"),
            },
        }
    }
}

impl From<PeriodicStream> for AddressStream {
    fn from(p: PeriodicStream) -> Self {
        AddressStream::periodic(p)
    }
}

/// `T_S = a^ω`, `L_S = b^ω`, `R_S = c^ω`.
pub fn distinguished_stream(z: Corner) -> AddressStream {
    AddressStream::periodic(PeriodicStream::constant(z.letter()))
}

/// `prefix(n)⊗T`.
pub fn truncate(p: &AddressStream, n: usize) -> Result<Address> {
    truncate_with_corner(p, n, Corner::T)
}

pub fn truncate_with_corner(p: &AddressStream, n: usize, z: Corner) -> Result<Address> {
    Ok(Address::new(p.prefix(n)?, z))
}

/// Smallest `n ≥ 2` with `2^(2-n) ≤ tol`.
pub fn depth_for_tolerance(tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let mut n = 2usize;
    while 2f64.powi(2 - n as i32) > tol {
        n += 1;
        if n > MAX_DEPTH {
            return Err(Error::ToleranceTooSmall(tol));
        }
    }
    Ok(n)
}

/// `d_S(p, q)` to within `tol`: the exact distance of the depth-`n`
/// truncations, with radius `2^(2-n) ≤ tol`.
pub fn stream_distance(p: &AddressStream, q: &AddressStream, tol: f64) -> Result<ApproxReal> {
    let n = depth_for_tolerance(tol)?;
    stream_distance_at_depth(p, q, n)
}

pub fn stream_distance_at_depth(
    p: &AddressStream,
    q: &AddressStream,
    n: usize,
) -> Result<ApproxReal> {
    let value = address_distance(&truncate(p, n)?, &truncate(q, n)?);
    Ok(ApproxReal {
        value,
        radius: Dyadic::new(4, n as u32),
    })
}

/// `d_{M⊗S}(m1⊗p, m2⊗q)`, computed through the isometry `ψ`.
pub fn tensor_stream_distance(
    m1: Letter,
    p: &AddressStream,
    m2: Letter,
    q: &AddressStream,
    tol: f64,
) -> Result<ApproxReal> {
    stream_distance(
        &AddressStream::cons(m1, p.clone()),
        &AddressStream::cons(m2, q.clone()),
        tol,
    )
}

/// The final-coalgebra structure `s : S → M⊗S`, head and shifted tail.
pub fn s_structure(p: &AddressStream) -> Result<(Letter, AddressStream)> {
    Ok((p.head()?, p.shift()))
}

/// `ψ = s⁻¹ : M⊗S → S`.
pub fn psi(m: Letter, p: &AddressStream) -> AddressStream {
    AddressStream::cons(m, p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    fn ps(s: &str) -> PeriodicStream {
        s.parse().unwrap()
    }

    fn st(s: &str) -> AddressStream {
        AddressStream::periodic(ps(s))
    }

    const TOL: f64 = 1.0 / 1024.0;

    #[test]
    fn parse_print_normalize() {
        assert_eq!(ps("ab(c)").to_string(), "ab(c)");
        assert_eq!(ps("abcc(cc)").to_string(), "ab(c)");
        assert_eq!(ps("(abab)").to_string(), "(ab)");
        assert_eq!(ps("b(ab)").to_string(), "(ba)");
        assert_eq!(ps("ab:L").to_string(), "a(b)");
        assert_eq!(ps(":T").to_string(), "(a)");
        assert!("ab".parse::<PeriodicStream>().is_err());
        assert!("ab()".parse::<PeriodicStream>().is_err());
        assert!("ab(d)".parse::<PeriodicStream>().is_err());
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(truncate(&st("(b)"), 3).unwrap(), "bbb:T".parse().unwrap());
        assert_eq!(truncate(&st("a(b)"), 2).unwrap(), "ab:T".parse().unwrap());
        let l = distinguished_stream(Corner::L);
        let t2 = truncate(&l, 2).unwrap();
        assert_eq!(t2, "bb:T".parse().unwrap());
        assert!(address_distance(&t2, &"bb:L".parse().unwrap()) <= Dyadic::pow2_neg(2));
    }

    #[test]
    fn stream_distance_examples() {
        let p = st("ab(ca)");
        let d = stream_distance(&p, &p, TOL).unwrap();
        assert!(d.contains(Dyadic::ZERO));
        assert!(d.radius.to_f64() <= TOL);

        let d = stream_distance(&st("a(b)"), &st("b(a)"), TOL).unwrap();
        assert!(d.contains(Dyadic::ZERO), "{d}");

        let d = stream_distance(&st("(b)"), &st("(c)"), TOL).unwrap();
        assert!(d.contains(Dyadic::ONE), "{d}");

        assert_eq!(
            stream_distance(&p, &p, 0.0),
            Err(Error::NonPositiveTolerance(0.0))
        );
        assert!(stream_distance(&p, &p, -1.0).is_err());
    }

    #[test]
    fn s_structure_examples() {
        let (m, tail) = s_structure(&st("(b)")).unwrap();
        assert_eq!(m, B);
        assert_eq!(tail.descriptor(), Some(ps("(b)")));
        let (m, tail) = s_structure(&st("a(c)")).unwrap();
        assert_eq!(m, A);
        assert_eq!(tail.descriptor(), Some(ps("(c)")));

        for s in ["ab(c)", "(abc)", "ca(b)", "c(ab)"] {
            let p = st(s);
            let (m, tail) = s_structure(&p).unwrap();
            let back = psi(m, &tail);
            assert!(stream_distance(&back, &p, TOL)
                .unwrap()
                .contains(Dyadic::ZERO));
            assert_eq!(back.descriptor(), p.descriptor());
        }
    }

    #[test]
    fn canonical_tail_examples() {
        assert_eq!(canonical_tail(&ps("b(a)")), ps("a(b)"));
        assert_eq!(canonical_tail(&ps("(a)")), ps("(a)"));
        assert_eq!(canonical_tail(&ps("abcc(b)")), ps("abcb(c)"));
        assert_eq!(canonical_tail(&ps("c(a)")), ps("a(c)"));
        assert_eq!(canonical_tail(&ps("c(b)")), ps("b(c)"));
        assert!(ps("b(a)").same_point(&ps("a(b)")));
        assert!(!ps("b(a)").same_point(&ps("a(c)")));
        // each dual pair is certified at distance zero
        for (x, y) in [("b(a)", "a(b)"), ("abcc(b)", "abcb(c)"), ("c(a)", "a(c)")] {
            assert!(stream_distance(&st(x), &st(y), TOL)
                .unwrap()
                .contains(Dyadic::ZERO));
        }
    }

    #[test]
    fn lazy_streams_share_a_monotone_cache() {
        let mut count = 0;
        let s = AddressStream::from_generator(move || {
            count += 1;
            Ok(Letter::ALL[count % 3])
        });
        let long = s.prefix(10).unwrap();
        assert_eq!(s.prefix(4).unwrap(), long[..4]);
        let shifted = s.shift();
        assert_eq!(shifted.prefix(9).unwrap(), long[1..]);
        let consed = AddressStream::cons(C, s.clone());
        assert_eq!(consed.prefix(3).unwrap(), vec![C, long[0], long[1]]);

        let failing = AddressStream::from_generator(|| Err(Error::NotInCarrier("x".into())));
        assert!(failing.prefix(1).is_err());
        assert!(failing.prefix(1).is_err());
        assert_eq!(failing.prefix(0).unwrap(), vec![]);
    }

    #[test]
    fn truncations_are_cauchy_with_modulus() {
        for s in ["ab(c)", "(abc)", "cab(ba)", "(b)", "bca(cab)"] {
            let p = st(s);
            for n in 0..=20 {
                for m in 0..=20 {
                    let d = address_distance(&truncate(&p, n).unwrap(), &truncate(&p, m).unwrap());
                    assert!(d <= Dyadic::pow2_neg(n.min(m) as u32));
                }
            }
        }
    }

    #[test]
    fn certified_intervals_nest() {
        let (p, q) = (st("ab(ca)"), st("ac(b)"));
        let coarse = stream_distance_at_depth(&p, &q, 6).unwrap();
        for n in 7..30 {
            let fine = stream_distance_at_depth(&p, &q, n).unwrap();
            assert!(coarse.contains(fine.value));
        }
    }
}
