//! Seeded property suites with machine-readable reports.
//!
//! Each check is a plain function returning a [`Check`], so the same code
//! serves the `props` command and the test suites with different sample
//! counts. Reports are versioned JSON (`"schema": 1`).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::address::{enumerate, Address, Corner, Letter, GLUED_PAIRS};
use crate::completion::{
    psi, s_structure, stream_distance, stream_distance_at_depth, truncate, AddressStream,
    PeriodicStream,
};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::euclid::{
    address_to_point, distortion_exhaustive, random_gasket_point, EuclideanGasket, IfsMap, Point2,
    POINT_TOL, SQRT3_2,
};
use crate::metric::{address_distance, oracle_distance, DistanceTable};
use crate::space::{
    check_regularity, discrete_prepend, random_address, sample_pairs, tensor_map, AddressSpace,
    PointedMap, RegularityClass, RegularityReport, TensorPoint, TripointedSpace,
};
use crate::universal::{
    blowup_experiment, cauchy_excess, check_short_preservation, check_short_preservation_sampled,
    check_square, check_square_with, final_morphism, initial_morphism, theta_with_corner,
    CantorCoalgebra, CantorPoint, Coalgebra, EdgeCoalgebra, EdgePoint, ShortStatus,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest number of witnesses copied into a check's detail.
const WITNESS_LIMIT: usize = 5;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: &str, pass: bool, detail: Value) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }

    fn from_error(name: &str, e: &Error) -> Self {
        Check::new(name, false, json!({ "error": e.to_string() }))
    }
}

fn or_error(name: &str, r: Result<Check>) -> Check {
    r.unwrap_or_else(|e| Check::from_error(name, &e))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PropsReport {
    pub schema: u32,
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl PropsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Functor,
    Initiality,
    Finality,
    Completion,
    Euclid,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Metric,
        Suite::Functor,
        Suite::Initiality,
        Suite::Finality,
        Suite::Completion,
        Suite::Euclid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Functor => "functor",
            Suite::Initiality => "initiality",
            Suite::Finality => "finality",
            Suite::Completion => "completion",
            Suite::Euclid => "euclid",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PropsOptions {
    pub seed: u64,
    /// Base sample count; individual checks scale from it.
    pub samples: usize,
    /// Replace the mediating map by a constant and tighten the Cauchy
    /// bound by a factor of two; the affected checks must then fail.
    pub negative_control: bool,
}

impl Default for PropsOptions {
    fn default() -> Self {
        PropsOptions {
            seed: 0,
            samples: 200,
            negative_control: false,
        }
    }
}

pub fn run(suite: Suite, opts: &PropsOptions) -> PropsReport {
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let reports: Vec<SuiteReport> = suites.into_iter().map(|s| run_one(s, opts)).collect();
    PropsReport {
        schema: SCHEMA_VERSION,
        seed: opts.seed,
        pass: reports.iter().all(|r| r.pass),
        suites: reports,
    }
}

fn run_one(suite: Suite, opts: &PropsOptions) -> SuiteReport {
    // one stream per suite, so suites are reproducible on their own
    let mut rng = StdRng::seed_from_u64(opts.seed ^ (suite as u64).wrapping_mul(0x9e37_79b9));
    let n = opts.samples.max(1);
    let tol = 2f64.powi(-10);
    let gasket = Arc::new(EuclideanGasket::default());
    let cantor = Arc::new(CantorCoalgebra::new(4).expect("j = 4 is valid"));
    let checks = match suite {
        Suite::Metric => vec![
            oracle_equivalence(3, n, &mut rng),
            prepend_isometry(4),
            metric_axioms(3),
        ],
        Suite::Functor => vec![
            functor_preservation(n, &mut rng),
            discrete_value_set(n, 6, &mut rng),
        ],
        Suite::Initiality => vec![concrete_constants(), initial_matches_render(6)],
        Suite::Finality => {
            let cauchy_bound_shift = u32::from(opts.negative_control);
            let mut checks = vec![
                cauchy_modulus("gasket", &*gasket, n, 14, cauchy_bound_shift, &mut rng),
                cauchy_modulus("cantor(4)", &*cantor, n, 14, cauchy_bound_shift, &mut rng),
                representative_independence("gasket", &*gasket, n / 4 + 1, 14, &mut rng),
                representative_independence("cantor(4)", &*cantor, n / 4 + 1, 14, &mut rng),
            ];
            if opts.negative_control {
                checks.push(constant_square(
                    "gasket",
                    &*gasket,
                    n / 2 + 1,
                    tol,
                    &mut rng,
                ));
            } else {
                checks.push(finality_square("gasket", &gasket, n / 2 + 1, tol, &mut rng));
                checks.push(finality_square(
                    "cantor(4)",
                    &cantor,
                    n / 2 + 1,
                    tol,
                    &mut rng,
                ));
            }
            checks.push(short_transfer(n, tol, &mut rng));
            checks
        }
        Suite::Completion => vec![
            truncation_bound("gasket", &gasket, n / 4 + 1, &mut rng),
            truncation_bound("cantor(4)", &cantor, n / 4 + 1, &mut rng),
            structure_inverse(n, &mut rng),
            blowup(&[4, 8, 16], 10),
        ],
        Suite::Euclid => vec![
            round_trip(n, 12, &mut rng),
            glued_coincidence(6),
            distortion_bound(5),
        ],
        Suite::All => unreachable!("expanded by run"),
    };
    SuiteReport {
        suite: suite.name().to_string(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

// ---------------------------------------------------------------------------
// Metric

fn addresses_up_to(level: usize) -> Result<Vec<Address>> {
    let mut out = Vec::new();
    for n in 0..=level {
        out.extend(enumerate(n)?);
    }
    Ok(out)
}

/// Closed form against the shortest-path oracle: every pair of canonical
/// addresses of length `≤ exhaustive_level`, plus `random_pairs` seeded
/// pairs at levels 5–8.
pub fn oracle_equivalence(
    exhaustive_level: usize,
    random_pairs: usize,
    rng: &mut dyn RngCore,
) -> Check {
    let name = "oracle_equivalence";
    or_error(
        name,
        (|| {
            let pts = addresses_up_to(exhaustive_level)?;
            let mut mismatches = Vec::new();
            let mut exhaustive = 0usize;
            for (i, x) in pts.iter().enumerate() {
                for y in &pts[i..] {
                    exhaustive += 1;
                    let (d, o) = (address_distance(x, y), oracle_distance(x, y)?);
                    if d != o {
                        mismatches.push(json!([
                            x.to_string(),
                            y.to_string(),
                            d.to_string(),
                            o.to_string()
                        ]));
                    }
                }
            }
            for _ in 0..random_pairs {
                let (lx, ly) = (rng.gen_range(5..=8), rng.gen_range(5..=8));
                let x = random_address(rng, lx);
                let y = random_address(rng, ly);
                let (d, o) = (address_distance(&x, &y), oracle_distance(&x, &y)?);
                if d != o {
                    mismatches.push(json!([
                        x.to_string(),
                        y.to_string(),
                        d.to_string(),
                        o.to_string()
                    ]));
                }
            }
            Ok(Check::new(
                name,
                mismatches.is_empty(),
                json!({
                    "exhaustive_pairs": exhaustive,
                    "random_pairs": random_pairs,
                    "mismatches": mismatches.len(),
                    "witnesses": mismatches.into_iter().take(WITNESS_LIMIT).collect::<Vec<_>>(),
                }),
            ))
        })(),
    )
}

/// `d(m·x, m·y) = ½·d(x, y)` exactly, for all pairs of length `≤ level`.
pub fn prepend_isometry(level: usize) -> Check {
    let name = "prepend_isometry";
    or_error(
        name,
        (|| {
            let pts = addresses_up_to(level)?;
            let mut pairs = 0usize;
            let mut witnesses = Vec::new();
            for x in &pts {
                for y in &pts {
                    let d = address_distance(x, y);
                    for m in Letter::ALL {
                        pairs += 1;
                        if address_distance(&x.prepend(m), &y.prepend(m)) != d.half() {
                            witnesses.push(json!([m.to_string(), x.to_string(), y.to_string()]));
                        }
                    }
                }
            }
            Ok(Check::new(
                name,
                witnesses.is_empty(),
                json!({ "level": level, "checked": pairs, "violations": witnesses.len(),
                    "witnesses": witnesses.into_iter().take(WITNESS_LIMIT).collect::<Vec<_>>() }),
            ))
        })(),
    )
}

/// Metric axioms on the full distance table of one level.
pub fn metric_axioms(level: usize) -> Check {
    let name = "metric_axioms";
    or_error(
        name,
        (|| {
            let table = DistanceTable::build(level)?;
            let pts = enumerate(level)?;
            let mut problems = Vec::new();
            for x in &pts {
                for y in &pts {
                    let dxy = table.get(x, y).expect("full table");
                    if (dxy == Dyadic::ZERO) != (x == y) || dxy > Dyadic::ONE {
                        problems.push(format!("d({x}, {y}) = {dxy}"));
                    }
                    for z in &pts {
                        let via = table.get(x, z).expect("full table")
                            + table.get(z, y).expect("full table");
                        if dxy > via {
                            problems.push(format!("triangle fails at {x}, {z}, {y}"));
                        }
                    }
                }
            }
            Ok(Check::new(
                name,
                problems.is_empty(),
                json!({ "level": level, "points": pts.len(), "violations": problems.len(),
                    "witnesses": problems.into_iter().take(WITNESS_LIMIT).collect::<Vec<_>>() }),
            ))
        })(),
    )
}

// ---------------------------------------------------------------------------
// Initiality

/// The handful of concrete numbers: `|FI| = 6`, `|F²I| = 15`,
/// `d(a⊗T, b⊗L) = 1`, halving within a copy, `τ(a⊗R) = (¾, √3/4)` and
/// `|τ(b⊗L) - τ(a⊗R)| = √3/2`.
pub fn concrete_constants() -> Check {
    let name = "concrete_constants";
    or_error(
        name,
        (|| {
            let a = |s: &str| s.parse::<Address>();
            let fi = enumerate(1)?.len();
            let f2i = enumerate(2)?.len();
            let d_at_bl = address_distance(&a("a:T")?, &a("b:L")?);
            let halving = Letter::ALL.iter().all(|&m| {
                Corner::ALL.iter().all(|&z| {
                    Corner::ALL.iter().all(|&w| {
                        address_distance(&Address::new(vec![m], z), &Address::new(vec![m], w))
                            == address_distance(
                                &Address::corner_point(z),
                                &Address::corner_point(w),
                            )
                            .half()
                    })
                })
            });
            let gasket = EuclideanGasket::default();
            let tau_ar = initial_morphism(&gasket, &a("a:R")?)?;
            let tau_bl = initial_morphism(&gasket, &a("b:L")?)?;
            let tau_ok = tau_ar.dist(Point2::new(0.75, SQRT3_2 / 2.0)) <= POINT_TOL;
            let d_euclid = tau_bl.dist(tau_ar);
            let pass = fi == 6
                && f2i == 15
                && d_at_bl == Dyadic::ONE
                && halving
                && tau_ok
                && (d_euclid - SQRT3_2).abs() <= POINT_TOL;
            Ok(Check::new(
                name,
                pass,
                json!({
                    "|FI|": fi,
                    "|F2I|": f2i,
                    "d(a:T, b:L)": d_at_bl.describe(),
                    "halving_within_copy": halving,
                    "tau(a:R)": [tau_ar.x, tau_ar.y],
                    "euclid(tau(b:L), tau(a:R))": d_euclid,
                }),
            ))
        })(),
    )
}

/// The recursion into `(𝕊, τ)` agrees with the direct IFS evaluation.
pub fn initial_matches_render(level: usize) -> Check {
    let name = "initial_matches_render";
    or_error(
        name,
        (|| {
            let gasket = EuclideanGasket::default();
            let mut worst = 0f64;
            let mut count = 0usize;
            for a in addresses_up_to(level)? {
                count += 1;
                worst = worst.max(initial_morphism(&gasket, &a)?.dist(address_to_point(&a)));
            }
            Ok(Check::new(
                name,
                worst <= POINT_TOL,
                json!({ "level": level, "addresses": count, "max_deviation": worst }),
            ))
        })(),
    )
}

// ---------------------------------------------------------------------------
// Finality

/// `d_G(θ_p(x), θ_q(x)) ≤ 2^-(min(p, q) + shift)` for `1 ≤ p, q ≤ max`.
/// `shift = 0` is the real estimate; `shift = 1` is a deliberately broken
/// bound for negative controls.
pub fn cauchy_modulus<C: Coalgebra>(
    label: &str,
    co: &C,
    samples: usize,
    max: usize,
    shift: u32,
    rng: &mut dyn RngCore,
) -> Check {
    let name = format!("cauchy_modulus[{label}]");
    or_error(
        &name,
        (|| {
            let mut witnesses = Vec::new();
            let mut worst = Dyadic::from_int(-1);
            for _ in 0..samples {
                let x = co.sample(rng);
                let (excess, (p, q)) =
                    cauchy_excess(co, &x, max, |n| Dyadic::pow2_neg((n as u32) + shift))?;
                let letters = theta_with_corner(co, &x, p.max(q), Corner::T)?;
                worst = worst.max(excess);
                if excess > Dyadic::ZERO {
                    witnesses.push(json!({ "x": format!("{x:?}"), "p": p, "q": q, "theta": letters.to_string() }));
                }
            }
            Ok(Check::new(
                &name,
                witnesses.is_empty(),
                json!({ "samples": samples, "max_depth": max, "bound_shift": shift,
                    "worst_excess": worst.to_f64(), "violations": witnesses.len(),
                    "witnesses": witnesses.into_iter().take(WITNESS_LIMIT).collect::<Vec<_>>() }),
            ))
        })(),
    )
}

/// Changing the fixed corner of `θₙ` from `T` to `L` moves it by at most
/// `2^(1-n)`.
pub fn representative_independence<C: Coalgebra>(
    label: &str,
    co: &C,
    samples: usize,
    max: usize,
    rng: &mut dyn RngCore,
) -> Check {
    let name = format!("representative_independence[{label}]");
    or_error(
        &name,
        (|| {
            let mut violations = 0usize;
            for _ in 0..samples {
                let x = co.sample(rng);
                for n in 0..=max {
                    let t = theta_with_corner(co, &x, n, Corner::T)?;
                    let l = theta_with_corner(co, &x, n, Corner::L)?;
                    if address_distance(&t, &l) > Dyadic::new(2, n as u32) {
                        violations += 1;
                    }
                }
            }
            Ok(Check::new(
                &name,
                violations == 0,
                json!({ "samples": samples, "max_depth": max, "violations": violations }),
            ))
        })(),
    )
}

pub fn finality_square<C>(
    label: &str,
    co: &Arc<C>,
    samples: usize,
    tol: f64,
    rng: &mut dyn RngCore,
) -> Check
where
    C: Coalgebra + Send + Sync + 'static,
    C::Point: Send + 'static,
{
    let name = format!("finality_square[{label}]");
    or_error(
        &name,
        (|| {
            let r = check_square(co, samples, tol, rng)?;
            Ok(Check::new(
                &name,
                r.pass,
                serde_json::to_value(&r).expect("serializes"),
            ))
        })(),
    )
}

/// The square with the constant-`T` map in place of `f`; expected to fail.
pub fn constant_square<C: Coalgebra>(
    label: &str,
    co: &C,
    samples: usize,
    tol: f64,
    rng: &mut dyn RngCore,
) -> Check {
    let name = format!("finality_square[{label}, constant map]");
    or_error(
        &name,
        (|| {
            let t = AddressStream::periodic(PeriodicStream::constant(Letter::A));
            let r = check_square_with(co, |_| t.clone(), samples, tol, rng)?;
            Ok(Check::new(
                &name,
                r.pass,
                serde_json::to_value(&r).expect("serializes"),
            ))
        })(),
    )
}

/// Shortness carries over from the edge coalgebra to its mediating map, and
/// the gasket's `σ` is flagged as not short on `(b⊗L, a⊗R)`.
pub fn short_transfer(samples: usize, tol: f64, rng: &mut dyn RngCore) -> Check {
    let name = "short_transfer";
    or_error(
        name,
        (|| {
            let edge =
                check_short_preservation_sampled(&Arc::new(EdgeCoalgebra), samples, tol, rng)?;
            let gasket = Arc::new(EuclideanGasket::default());
            let mut pairs = sample_pairs(&*gasket, samples / 4, rng);
            pairs.insert(0, (Point2::new(0.0, 0.0), Point2::new(0.75, SQRT3_2 / 2.0)));
            let sigma = check_short_preservation(&gasket, &pairs, tol)?;
            let pass =
                edge.status == ShortStatus::Pass && sigma.status == ShortStatus::PreconditionUnmet;
            Ok(Check::new(
                name,
                pass,
                json!({
                    "edge": { "status": edge.status, "pairs": edge.pairs,
                              "max_excess": edge.max_excess, "witnesses": edge.witnesses },
                    "gasket_sigma": { "status": sigma.status,
                                      "max_ratio": sigma.precondition.max_ratio,
                                      "witnesses": sigma.precondition.witnesses.iter().take(WITNESS_LIMIT).collect::<Vec<_>>() },
                }),
            ))
        })(),
    )
}

// ---------------------------------------------------------------------------
// Completion

/// `d_S(f(x), θₙ(x)) ≤ 2^(1-n)` certified, for `n ≤ 20`.
pub fn truncation_bound<C>(label: &str, co: &Arc<C>, samples: usize, rng: &mut dyn RngCore) -> Check
where
    C: Coalgebra + Send + Sync + 'static,
    C::Point: Send + 'static,
{
    let name = format!("truncation_bound[{label}]");
    or_error(
        &name,
        (|| {
            let mut violations = 0usize;
            for _ in 0..samples {
                let f = final_morphism(Arc::clone(co), co.sample(rng));
                for n in [0usize, 1, 2, 5, 10, 20] {
                    let t =
                        AddressStream::periodic(PeriodicStream::from_address(&truncate(&f, n)?));
                    let d = stream_distance_at_depth(&f, &t, n + 24)?;
                    if d.hi() > Dyadic::new(2, n as u32) {
                        violations += 1;
                    }
                }
            }
            Ok(Check::new(
                &name,
                violations == 0,
                json!({ "samples": samples, "violations": violations }),
            ))
        })(),
    )
}

/// `s(ψ(m, p)) = (m, p)` on random streams, compared by long prefixes.
pub fn structure_inverse(samples: usize, rng: &mut dyn RngCore) -> Check {
    let name = "structure_inverse";
    or_error(
        name,
        (|| {
            let mut violations = 0usize;
            for _ in 0..samples {
                let head: Vec<Letter> = (0..rng.gen_range(0..6))
                    .map(|_| Letter::ALL[rng.gen_range(0..3)])
                    .collect();
                let block: Vec<Letter> = (0..rng.gen_range(1..4))
                    .map(|_| Letter::ALL[rng.gen_range(0..3)])
                    .collect();
                let p = AddressStream::periodic(PeriodicStream::new(head, block)?);
                let m = Letter::ALL[rng.gen_range(0..3)];
                let (m2, p2) = s_structure(&psi(m, &p))?;
                if m2 != m || p2.prefix(40)? != p.prefix(40)? {
                    violations += 1;
                }
                if stream_distance(&psi(m, &p), &psi(m, &p2), 1e-9)?.lo() > Dyadic::ZERO {
                    violations += 1;
                }
            }
            Ok(Check::new(
                name,
                violations == 0,
                json!({ "samples": samples, "violations": violations }),
            ))
        })(),
    )
}

/// The blow-up table for each `j`: ratios `(j/2)ⁿ` within the certified
/// radius.
pub fn blowup(js: &[u32], max_n: usize) -> Check {
    let name = "blowup";
    or_error(
        name,
        (|| {
            let mut tables = serde_json::Map::new();
            let mut pass = true;
            for &j in js {
                let rows = blowup_experiment(j, max_n)?;
                pass &= rows.iter().all(|r| r.within_radius);
                tables.insert(
                j.to_string(),
                json!(rows.iter().map(|r| json!({ "n": r.n, "d_C": r.d_c, "d_S": r.d_s.to_string(), "ratio": r.ratio })).collect::<Vec<_>>()),
            );
            }
            Ok(Check::new(name, pass, Value::Object(tables)))
        })(),
    )
}

// ---------------------------------------------------------------------------
// Functor

/// `t ↦ (t, 0)` and apex to apex: the edge inside the Cantor carrier.
pub fn edge_inclusion() -> PointedMap<EdgeCoalgebra, CantorCoalgebra> {
    PointedMap::new(
        EdgeCoalgebra,
        CantorCoalgebra::new(4).expect("valid j"),
        |p: &EdgePoint| match *p {
            EdgePoint::Apex => CantorPoint::Apex,
            EdgePoint::Segment(t) => {
                CantorPoint::Segment(BigRational::from_float(t).expect("finite"))
            }
        },
    )
}

/// `t ↦ min(1, 2t)` on the edge: Lipschitz with constant 2, not short.
pub fn edge_tent() -> PointedMap<EdgeCoalgebra, EdgeCoalgebra> {
    PointedMap::new(EdgeCoalgebra, EdgeCoalgebra, |p: &EdgePoint| match *p {
        EdgePoint::Apex => EdgePoint::Apex,
        EdgePoint::Segment(t) => EdgePoint::Segment((2.0 * t).min(1.0)),
    })
}

/// `G → 𝕊`, short.
pub fn address_embedding(max_level: usize) -> PointedMap<AddressSpace, EuclideanGasket> {
    PointedMap::new(
        AddressSpace::new(max_level),
        EuclideanGasket::default(),
        address_to_point,
    )
}

/// Check `f` and `M⊗f` against the same class.
pub fn preservation_pair<X, Y>(
    f: &PointedMap<X, Y>,
    class: &RegularityClass,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<(RegularityReport, RegularityReport)>
where
    X: TripointedSpace + Clone,
    Y: TripointedSpace + Clone,
    X::Point: 'static,
    Y::Point: 'static,
{
    let base = check_regularity(f, class, samples, rng);
    let lifted = check_regularity(&tensor_map(f)?, class, samples, rng);
    Ok((base, lifted))
}

pub fn functor_preservation(samples: usize, rng: &mut dyn RngCore) -> Check {
    let name = "functor_preservation";
    or_error(
        name,
        (|| {
            let mut detail = serde_json::Map::new();
            let mut pass = true;
            let mut record = |label: &str, (base, lifted): (RegularityReport, RegularityReport)| {
                pass &= base.pass && lifted.pass;
                detail.insert(
                label.to_string(),
                json!({ "class": base.class, "base_pass": base.pass, "base_max_ratio": base.max_ratio,
                        "tensor_pass": lifted.pass, "tensor_max_ratio": lifted.max_ratio,
                        "tensor_witnesses": lifted.witnesses.iter().take(WITNESS_LIMIT).collect::<Vec<_>>() }),
            );
            };
            record(
                "address_to_point",
                preservation_pair(&address_embedding(8), &RegularityClass::Short, samples, rng)?,
            );
            record(
                "edge_inclusion",
                preservation_pair(&edge_inclusion(), &RegularityClass::Short, samples, rng)?,
            );
            record(
                "edge_tent",
                preservation_pair(&edge_tent(), &RegularityClass::Lipschitz(2.0), samples, rng)?,
            );
            Ok(Check::new(name, pass, Value::Object(detail)))
        })(),
    )
}

/// Values of the quotient metric on `M⊗G_ρ` over random pairs, plus every
/// glued pair of corners; all must lie in `{0, ½, 1}`.
pub fn discrete_value_set(samples: usize, max_level: usize, rng: &mut dyn RngCore) -> Check {
    let name = "discrete_value_set";
    let g = discrete_prepend(max_level);
    let space = &g.domain;
    let mut pairs = sample_pairs(space, samples, rng);
    for glued in GLUED_PAIRS {
        let (m1, z1) = glued.left;
        let (m2, z2) = glued.right;
        pairs.push((
            TensorPoint::new(m1, Address::corner_point(z1)),
            TensorPoint::new(m2, Address::corner_point(z2)),
        ));
    }
    let values: BTreeSet<String> = pairs
        .iter()
        .map(|(x, y)| space.distance(x, y).to_string())
        .collect();
    let allowed = ["0", "0.5", "1"];
    let pass = values.iter().all(|v| allowed.contains(&v.as_str()));
    Check::new(
        name,
        pass,
        json!({ "pairs": pairs.len(), "max_level": max_level, "values": values }),
    )
}

// ---------------------------------------------------------------------------
// Euclid

/// `|address_to_point(θ_depth(p)) - p| ≤ 2^-depth` for gasket points `p`.
pub fn round_trip(samples: usize, depth: usize, rng: &mut dyn RngCore) -> Check {
    let name = "round_trip";
    or_error(
        name,
        (|| {
            let gasket = Arc::new(EuclideanGasket::default());
            let bound = 2f64.powi(-(depth as i32));
            let mut worst = 0f64;
            let mut witnesses = Vec::new();
            for _ in 0..samples {
                let p = random_gasket_point(rng, depth);
                let f = final_morphism(Arc::clone(&gasket), p);
                let q = address_to_point(&truncate(&f, depth)?);
                let e = p.dist(q);
                worst = worst.max(e);
                if e > bound + POINT_TOL {
                    witnesses.push(json!({ "p": [p.x, p.y], "error": e }));
                }
            }
            Ok(Check::new(
                name,
                witnesses.is_empty(),
                json!({ "samples": samples, "depth": depth, "bound": bound, "max_error": worst,
                    "witnesses": witnesses.into_iter().take(WITNESS_LIMIT).collect::<Vec<_>>() }),
            ))
        })(),
    )
}

pub fn glued_coincidence(level: usize) -> Check {
    let name = "glued_coincidence";
    or_error(
        name,
        (|| {
            let mut worst = 0f64;
            let mut pairs = 0usize;
            for a in addresses_up_to(level)? {
                if let Some(alt) = a.alternative() {
                    pairs += 1;
                    worst = worst.max(address_to_point(&a).dist(address_to_point(&alt)));
                }
            }
            Ok(Check::new(
                name,
                worst <= POINT_TOL,
                json!({ "level": level, "glued_pairs": pairs, "max_gap": worst }),
            ))
        })(),
    )
}

/// `½ ≤ |p - q| / d_G ≤ 1` over all pairs at one level.
pub fn distortion_bound(level: usize) -> Check {
    let name = "distortion";
    or_error(
        name,
        (|| {
            let r = distortion_exhaustive(level)?;
            let pass = r.within(0.5, 1.0);
            Ok(Check::new(
                name,
                pass,
                serde_json::to_value(&r).expect("serializes"),
            ))
        })(),
    )
}

/// Self-similarity at one level: the images of level `n` under the three
/// contractions are exactly the points of level `n + 1`.
pub fn self_similarity(level: usize) -> Check {
    let name = "self_similarity";
    or_error(
        name,
        (|| {
            let key = |p: Point2| ((p.x * 1e9).round() as i64, (p.y * 1e9).round() as i64);
            let next: BTreeSet<_> = enumerate(level + 1)?
                .iter()
                .map(|a| key(address_to_point(a)))
                .collect();
            let images: BTreeSet<_> = enumerate(level)?
                .iter()
                .flat_map(|a| Letter::ALL.map(|m| key(IfsMap::new(m).apply(address_to_point(a)))))
                .collect();
            Ok(Check::new(
                name,
                next == images,
                json!({ "level": level, "points": next.len() }),
            ))
        })(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PropsOptions {
        PropsOptions {
            samples: 40,
            ..PropsOptions::default()
        }
    }

    #[test]
    fn every_suite_passes_on_small_samples() {
        let report = run(Suite::All, &small());
        for s in &report.suites {
            for c in &s.checks {
                assert!(c.pass, "{} / {}: {}", s.suite, c.name, c.detail);
            }
        }
        assert!(report.pass);
        assert_eq!(report.schema, 1);
    }

    #[test]
    fn negative_control_fails_with_witness() {
        let opts = PropsOptions {
            negative_control: true,
            ..small()
        };
        let report = run(Suite::Finality, &opts);
        assert!(!report.pass);
        let failed: Vec<&Check> = report.suites[0].checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.iter().any(|c| c.name.starts_with("cauchy_modulus")));
        assert!(failed.iter().any(|c| c.name.contains("constant map")));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn seeded_runs_are_deterministic() {
        let a = run(Suite::Functor, &small()).to_json();
        let b = run(Suite::Functor, &small()).to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn self_similarity_holds() {
        for n in 0..4 {
            assert!(self_similarity(n).pass);
        }
    }
}
