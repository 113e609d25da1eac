//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Seeded; every criterion draws from its own stream.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::Value;

use sierpinski_core::euclid::{EuclideanGasket, Point2, SQRT3_2};
use sierpinski_core::props::{self, Check};
use sierpinski_core::universal::{
    blowup_experiment, check_short_preservation, CantorCoalgebra, ShortStatus,
};
use sierpinski_core::Dyadic;

const SEED: u64 = 0;

fn rng(criterion: u64) -> StdRng {
    StdRng::seed_from_u64(SEED + criterion)
}

struct Outcome {
    pass: bool,
    summary: String,
}

fn from_checks(checks: &[Check]) -> Outcome {
    let pass = checks.iter().all(|c| c.pass);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    let summary = if pass {
        checks
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    } else {
        failed.join("; ")
    };
    Outcome { pass, summary }
}

fn field(c: &Check, key: &str) -> Value {
    c.detail.get(key).cloned().unwrap_or(Value::Null)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let c = props::oracle_equivalence(4, 10_000, &mut rng(1));
    let elapsed = start.elapsed();
    let pass = c.pass && elapsed < Duration::from_secs(60);
    Outcome {
        pass,
        summary: format!(
            "{} exhaustive pairs (levels ≤ 4) + {} random pairs (levels 5–8), {} mismatches, {:.2?}",
            field(&c, "exhaustive_pairs"),
            field(&c, "random_pairs"),
            field(&c, "mismatches"),
            elapsed
        ),
    }
}

fn constants() -> Outcome {
    let c = props::concrete_constants();
    Outcome {
        pass: c.pass,
        summary: c.detail.to_string(),
    }
}

fn isometry() -> Outcome {
    let c = props::prepend_isometry(5);
    Outcome {
        pass: c.pass,
        summary: format!(
            "{} (letter, pair) cases at levels ≤ 5, {} violations",
            field(&c, "checked"),
            field(&c, "violations")
        ),
    }
}

fn cauchy() -> Outcome {
    let mut r = rng(4);
    let gasket = EuclideanGasket::default();
    let checks = [
        props::cauchy_modulus("gasket", &gasket, 200, 14, 0, &mut r),
        props::cauchy_modulus(
            "cantor(4)",
            &CantorCoalgebra::new(4).unwrap(),
            200,
            14,
            0,
            &mut r,
        ),
        props::cauchy_modulus(
            "cantor(8)",
            &CantorCoalgebra::new(8).unwrap(),
            200,
            14,
            0,
            &mut r,
        ),
    ];
    let mut o = from_checks(&checks);
    if o.pass {
        let violations: i64 = checks
            .iter()
            .map(|c| field(c, "violations").as_i64().unwrap_or(-1))
            .sum();
        o.summary = format!("200 points × 3 coalgebras, p, q ≤ 14, {violations} violations");
    }
    o
}

fn square() -> Outcome {
    let mut r = rng(5);
    let tol = 2f64.powi(-10);
    let checks = [
        props::finality_square(
            "gasket",
            &Arc::new(EuclideanGasket::default()),
            100,
            tol,
            &mut r,
        ),
        props::finality_square(
            "cantor(4)",
            &Arc::new(CantorCoalgebra::new(4).unwrap()),
            100,
            tol,
            &mut r,
        ),
        props::finality_square(
            "cantor(8)",
            &Arc::new(CantorCoalgebra::new(8).unwrap()),
            100,
            tol,
            &mut r,
        ),
    ];
    let mut o = from_checks(&checks);
    if o.pass {
        o.summary = format!(
            "100 points each for gasket, cantor(4), cantor(8) at tol 2^-10; {}",
            o.summary
        );
    }
    o
}

fn shortness() -> Outcome {
    let tol = 2f64.powi(-10);
    let transfer = props::short_transfer(1000, tol, &mut rng(6));
    // the named witness on its own: σ(b⊗L) against σ(a⊗R)
    let gasket = Arc::new(EuclideanGasket::default());
    let pair = (Point2::new(0.0, 0.0), Point2::new(0.75, SQRT3_2 / 2.0));
    let witness = check_short_preservation(&gasket, &[pair], tol).expect("points in carrier");
    let w = witness.precondition.worst.clone();
    let witness_ok = witness.status == ShortStatus::PreconditionUnmet
        && w.as_ref().is_some_and(|w| {
            (w.domain_distance - SQRT3_2).abs() < 1e-12 && (w.image_distance - 1.0).abs() < 1e-12
        });
    let edge = &transfer.detail["edge"];
    Outcome {
        pass: transfer.pass && witness_ok,
        summary: format!(
            "edge coalgebra: {} on {} pairs, max excess {}; gasket σ: {} with witness (b⊗L, a⊗R): d = {:.6} ↦ {:.6}",
            edge["status"],
            edge["pairs"],
            edge["max_excess"],
            witness.status,
            w.as_ref().map_or(f64::NAN, |w| w.domain_distance),
            w.as_ref().map_or(f64::NAN, |w| w.image_distance),
        ),
    }
}

fn blowup() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut j4_last = 0.0;
    let mut mismatches = Vec::new();
    for j in [4u32, 8, 16] {
        match blowup_experiment(j, 10) {
            Ok(rows) => {
                for r in &rows {
                    // d_S's certified interval must contain 2^-n, and the
                    // ratio at the midpoint must be exactly (j/2)^n
                    let exact = r.d_s.contains(Dyadic::pow2_neg(r.n as u32));
                    if !(exact && r.within_radius && r.ratio == r.expected_ratio) {
                        pass = false;
                        mismatches.push(format!(
                            "j={j} n={}: {} vs {}",
                            r.n, r.ratio, r.expected_ratio
                        ));
                    }
                }
                if j == 4 {
                    j4_last = rows.last().map_or(0.0, |r| r.ratio);
                }
            }
            Err(e) => {
                pass = false;
                mismatches.push(e.to_string());
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= j4_last > 1000.0 && elapsed < Duration::from_secs(10);
    Outcome {
        pass,
        summary: format!(
            "j ∈ {{4, 8, 16}}, n ≤ 10: {} mismatches; j=4 ratio at n=10 is {j4_last}; {:.2?}{}",
            mismatches.len(),
            elapsed,
            if mismatches.is_empty() {
                String::new()
            } else {
                format!(" [{}]", mismatches.join(", "))
            }
        ),
    }
}

fn round_trip() -> Outcome {
    let c = props::round_trip(500, 12, &mut rng(8));
    Outcome {
        pass: c.pass,
        summary: format!(
            "500 points, depth 12: max error {} ≤ bound {}",
            field(&c, "max_error"),
            field(&c, "bound")
        ),
    }
}

fn functor() -> Outcome {
    let c = props::functor_preservation(1000, &mut rng(9));
    let summary = ["address_to_point", "edge_inclusion", "edge_tent"]
        .iter()
        .map(|k| {
            let d = &c.detail[*k];
            format!(
                "{k} {} (tensor max ratio {:.4})",
                d["class"].as_str().unwrap_or("?"),
                d["tensor_max_ratio"].as_f64().unwrap_or(f64::NAN)
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    Outcome {
        pass: c.pass,
        summary: if c.pass {
            summary
        } else {
            c.detail.to_string()
        },
    }
}

fn discrete() -> Outcome {
    let c = props::discrete_value_set(1000, 6, &mut rng(10));
    Outcome {
        pass: c.pass,
        summary: format!(
            "{} pairs, observed values {}",
            field(&c, "pairs"),
            field(&c, "values")
        ),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("concrete constants", constants),
        ("prepend is a ½-isometry", isometry),
        ("Cauchy modulus of θ", cauchy),
        ("finality square", square),
        ("shortness transfer", shortness),
        ("Lipschitz blow-up", blowup),
        ("round trip 𝕊 ↔ S", round_trip),
        ("functor preserves regularity", functor),
        ("discrete algebra value set", discrete),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} — {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.summary
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
