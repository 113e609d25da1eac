use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use sierpinski_core::address::enumerate;
use sierpinski_core::completion::{truncate, AddressStream};
use sierpinski_core::euclid::{address_to_point, render, EuclideanGasket, Point2, RenderFormat};
use sierpinski_core::metric::{address_distance, oracle_distance};
use sierpinski_core::props::{self, PropsOptions, Suite};
use sierpinski_core::universal::{
    blowup_experiment, depth_for_answer, final_morphism, CantorCoalgebra, CantorPoint, Coalgebra,
    CoalgebraConfig, CornerCoalgebra, EdgeCoalgebra, EdgePoint,
};
use sierpinski_core::{Address, Corner, Error};

#[derive(Parser)]
#[command(
    name = "sierpinski",
    version,
    about = "The Sierpinski gasket as initial algebra and final coalgebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Target accuracy for certified distances and stream answers.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Address length / render depth / table size.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Base sample count for property suites.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distance between two addresses, e.g. `dist a:T b:L`.
    Dist { x: String, y: String },
    /// The same distance from the shortest-path oracle (length ≤ 8).
    Oracle { x: String, y: String },
    /// All canonical addresses of length `--depth`.
    Enum,
    /// Render the depth-`--depth` approximation as SVG or a CSV point cloud.
    Render {
        #[arg(long, default_value = "black")]
        fill: String,
    },
    /// The address of a gasket point `x,y`, to `--depth` letters.
    AddressOf { point: String },
    /// The plane point of an address.
    PointOf { address: String },
    /// Run a coalgebra's mediating map into S from a point.
    Finality {
        /// `"gasket"`, `"edge"`, `"corner"` or `{"cantor": {"j": 8}}`.
        #[arg(long, default_value = "\"gasket\"")]
        coalgebra: String,
        /// `x,y` for the gasket, `p/q` or `apex` for cantor and edge, `T|L|R` for corner.
        point: String,
    },
    /// d_C against d_S along the blow-up sequences, as CSV.
    Blowup {
        #[arg(long)]
        j: u32,
    },
    /// Run a property suite: metric, functor, initiality, finality, completion, euclid or all.
    Props {
        suite: String,
        /// Inject a known-broken check; the run must then fail.
        #[arg(long)]
        negative_control: bool,
    },
}

/// An error with its exit status: 1 for failed properties, 2 for misuse.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

fn parse_address(s: &str) -> Result<Address, Failure> {
    s.parse::<Address>().map_err(Failure::from)
}

fn parse_point2(s: &str) -> Result<Point2, Failure> {
    let bad = || Failure::usage(format!("expected a point 'x,y', got '{s}'"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok(Point2::new(
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_rational(s: &str) -> Result<BigRational, Failure> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Failure::usage(format!("expected a rational 'p/q', got '{s}'")))
}

fn parse_corner(s: &str) -> Result<Corner, Failure> {
    match s.trim() {
        "T" => Ok(Corner::T),
        "L" => Ok(Corner::L),
        "R" => Ok(Corner::R),
        _ => Err(Failure::usage(format!("expected T, L or R, got '{s}'"))),
    }
}

fn stream_depth(cli: &Cli, default: usize) -> Result<usize, Failure> {
    match (cli.depth, cli.tol) {
        (Some(d), _) => Ok(d),
        (None, Some(tol)) => Ok(depth_for_answer(tol)?),
        (None, None) => Ok(default),
    }
}

fn letters(stream: &AddressStream, n: usize) -> Result<String, Failure> {
    Ok(stream.prefix(n)?.iter().map(|m| m.as_char()).collect())
}

struct Finality {
    point: String,
    prefix: String,
    theta: Address,
}

fn finality_for<C>(co: C, x: C::Point, depth: usize, label: &str) -> Result<Finality, Failure>
where
    C: Coalgebra + Send + Sync + 'static,
    C::Point: Send + 'static,
{
    if !co.contains(&x) {
        return Err(Failure::usage(format!(
            "{x:?} is not in the carrier of {label}"
        )));
    }
    let point = format!("{x:?}");
    let f = final_morphism(Arc::new(co), x);
    Ok(Finality {
        point,
        prefix: letters(&f, depth)?,
        theta: truncate(&f, depth)?,
    })
}

fn show_finality(r: &Finality, label: &str, depth: usize, format: Option<Format>) -> String {
    let canonical = r.theta.canonicalize();
    if format == Some(Format::Json) {
        let v = json!({ "coalgebra": label, "point": r.point, "depth": depth, "prefix": r.prefix,
                        "theta": r.theta.to_string(), "canonical": canonical.to_string() });
        format!(
            "{}\n",
            serde_json::to_string_pretty(&v).expect("serializes")
        )
    } else {
        format!(
            "coalgebra: {label}\npoint: {}\ndepth: {depth}\nprefix: {}\ntheta: {} (canonical {canonical})\n",
            r.point, r.prefix, r.theta
        )
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Dist { x, y } => {
            let d = address_distance(&parse_address(x)?, &parse_address(y)?);
            Ok((format!("{}\n", d.describe()), true))
        }
        Command::Oracle { x, y } => {
            let d = oracle_distance(&parse_address(x)?, &parse_address(y)?)?;
            Ok((format!("{}\n", d.describe()), true))
        }
        Command::Enum => {
            let pts = enumerate(cli.depth.unwrap_or(2))?;
            let text = match cli.format {
                Some(Format::Json) => {
                    let v: Vec<String> = pts.iter().map(ToString::to_string).collect();
                    format!("{}\n", serde_json::to_string(&v).expect("serializes"))
                }
                Some(Format::Svg) => return Err(Failure::usage("enum supports csv or json")),
                _ => pts.iter().fold(String::new(), |mut s, a| {
                    let _ = writeln!(s, "{a}");
                    s
                }),
            };
            Ok((text, true))
        }
        Command::Render { fill } => {
            let format = match cli.format {
                None | Some(Format::Svg) => RenderFormat::Svg,
                Some(Format::Csv) => RenderFormat::Points,
                Some(Format::Json) => return Err(Failure::usage("render supports svg or csv")),
            };
            Ok((render(cli.depth.unwrap_or(5), format, fill)?, true))
        }
        Command::AddressOf { point } => {
            let depth = stream_depth(cli, 12)?;
            let r = finality_for(
                EuclideanGasket::default(),
                parse_point2(point)?,
                depth,
                "gasket",
            )?;
            Ok((format!("{}\n", r.theta.canonicalize()), true))
        }
        Command::PointOf { address } => {
            let p = address_to_point(&parse_address(address)?);
            Ok((format!("{},{}\n", p.x, p.y), true))
        }
        Command::Finality { coalgebra, point } => {
            let depth = stream_depth(cli, 16)?;
            let config = CoalgebraConfig::from_json(coalgebra)?;
            let (label, r) = match config {
                CoalgebraConfig::Gasket => (
                    "gasket".to_string(),
                    finality_for(
                        EuclideanGasket::default(),
                        parse_point2(point)?,
                        depth,
                        "gasket",
                    )?,
                ),
                CoalgebraConfig::Cantor { j } => {
                    let x = if point.trim() == "apex" {
                        CantorPoint::Apex
                    } else {
                        CantorPoint::Segment(parse_rational(point)?)
                    };
                    let label = format!("cantor(j={j})");
                    let r = finality_for(CantorCoalgebra::new(j)?, x, depth, &label)?;
                    (label, r)
                }
                CoalgebraConfig::Edge => {
                    let x = if point.trim() == "apex" {
                        EdgePoint::Apex
                    } else {
                        let t = point.trim().parse::<f64>().map_err(|_| {
                            Failure::usage(format!("expected a number or 'apex', got '{point}'"))
                        })?;
                        EdgePoint::Segment(t)
                    };
                    (
                        "edge".to_string(),
                        finality_for(EdgeCoalgebra, x, depth, "edge")?,
                    )
                }
                CoalgebraConfig::Corner => (
                    "corner".to_string(),
                    finality_for(CornerCoalgebra, parse_corner(point)?, depth, "corner")?,
                ),
            };
            Ok((show_finality(&r, &label, depth, cli.format), true))
        }
        Command::Blowup { j } => {
            let rows = blowup_experiment(*j, cli.depth.unwrap_or(10))?;
            if cli.format == Some(Format::Json) {
                let text = serde_json::to_string_pretty(&rows).expect("serializes");
                return Ok((format!("{text}\n"), true));
            }
            let mut csv = String::from("n,d_C,d_S_lo,d_S_hi,ratio\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    r.n,
                    r.d_c,
                    r.d_s.lo().to_decimal_string(),
                    r.d_s.hi().to_decimal_string(),
                    r.ratio
                );
            }
            Ok((csv, true))
        }
        Command::Props {
            suite,
            negative_control,
        } => {
            let suite: Suite = suite.parse()?;
            let opts = PropsOptions {
                seed: cli.seed,
                samples: cli.samples.unwrap_or(PropsOptions::default().samples),
                negative_control: *negative_control,
            };
            let report = props::run(suite, &opts);
            Ok((format!("{}\n", report.to_json()), report.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, pass)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &text),
                None => io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
