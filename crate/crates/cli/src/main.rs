use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use contrax::complex::{path_object, validate_complex, Complex, GradedMap};
use contrax::error::Error;
use contrax::harness::{run_campaign_with, Execution, GenConfig, CAMPAIGNS};
use contrax::linalg::Field;
use contrax::model::{factor_ar, factor_coch, factor_contr, lift_ar, lift_coch, lift_contr, Flavor, Square};
use contrax::perturb::{trick2, trick3};
use contrax::report::Report;
use contrax::retract::{
    check_ar, check_ar_morphism, check_contr_morphism, check_contraction, check_sdr, trick1,
    AcyclicRetraction, ArMorphism, ContrMorphism, Morphism, Sdr,
};
use contrax::semifree::{exhibit_retract, LiftingProblem};

#[derive(Parser)]
#[command(name = "contrax", version, about = "Contractions, normalization tricks and model-structure factorizations over exact fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a diagram; the `kind` field picks the validator.
    Check { input: PathBuf },
    /// Normalize a chain map between acyclic retractions.
    Trick1 {
        input: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Turn an SDR into a contraction.
    Trick2 {
        input: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Turn a morphism of acyclic retractions between contractions into a
    /// morphism of contractions.
    Trick3 {
        input: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    Factor {
        input: PathBuf,
        #[arg(long, value_enum)]
        category: Category,
        #[arg(long, default_value = "c-fw")]
        flavor: Flavor,
        #[arg(long)]
        emit_cells: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    Lift {
        input: PathBuf,
        #[arg(long, value_enum)]
        category: Category,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Path object of a complex.
    Path {
        input: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Present an injective chain map as a retract of a semifree extension.
    Retract {
        input: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    Fuzz {
        #[arg(long)]
        campaign: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `fp:P` or `q`.
        #[arg(long)]
        field: Option<Field>,
        #[arg(long)]
        max_dim: Option<usize>,
        /// Lowest and highest degree, as `LO,HI`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_support)]
        support: Option<(i32, i32)>,
        #[arg(long)]
        sequential: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Category {
    Coch,
    Ar,
    Contr,
}

enum Failure {
    Parse(String),
    Violation(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Parse(e.to_string()),
            Error::Invariant(_) | Error::NonTermination { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Violation(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::Parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })
}

fn write(out: Option<&Path>, v: &Value) -> Outcome {
    let text = serde_json::to_string_pretty(v).expect("values serialize") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Internal(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn tagged(mut v: Value, kind: &str) -> Value {
    v["kind"] = json!(kind);
    v
}

fn kind_of(v: &Value) -> Result<String, Failure> {
    if let Some(k) = v.get("kind").and_then(Value::as_str) {
        return Ok(k.to_string());
    }
    let has = |k: &str| v.get(k).is_some();
    let guess = if has("A") && has("i") {
        "coch-square"
    } else if has("src") && has("tgt") && has("f") {
        if v["src"].get("h").is_some() {
            "contr-morphism"
        } else {
            "ar-morphism"
        }
    } else if has("src") && has("tgt") && has("map") {
        "chain-map"
    } else if has("iota") && has("h") {
        "contraction"
    } else if has("iota") {
        "ar"
    } else if has("dims") {
        "complex"
    } else {
        return Err(Failure::Parse("$: cannot tell the kind of diagram; add a `kind` field".into()));
    };
    Ok(guess.to_string())
}

fn chain_map_json(f: &GradedMap) -> Value {
    json!({"kind": "chain-map", "src": f.src().to_json(), "tgt": f.tgt().to_json(), "map": f.to_json()})
}

fn parse_chain_map(v: &Value) -> Result<GradedMap, Failure> {
    let get = |k: &str| v.get(k).ok_or_else(|| Failure::Parse(format!("$: missing `{k}`")));
    let src = Complex::from_json(get("src")?, "$.src")?.into_arc();
    let tgt = Complex::from_json(get("tgt")?, "$.tgt")?.into_arc();
    if src.field() != tgt.field() {
        return Err(Failure::Parse("$: src and tgt live over different fields".into()));
    }
    Ok(GradedMap::from_json(get("map")?, &src, &tgt, "$.map")?)
}

fn verdict(report: &Report) -> Outcome {
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.identity.as_str()).collect();
        Err(Failure::Violation(format!("violated: {}", names.join(", "))))
    }
}

fn parse_support(s: &str) -> Result<(i32, i32), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: i32 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i32 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("LO must not exceed HI".into());
    }
    Ok((lo, hi))
}

fn single(subject: &str, identity: &str, ok: bool) -> Report {
    let mut r = Report::new(subject);
    r.check(identity, ok);
    r
}

fn check(input: &Path) -> Outcome {
    let v = read(input)?;
    let report = match kind_of(&v)?.as_str() {
        "complex" => validate_complex(&Complex::from_json(&v, "$")?),
        "chain-map" => {
            let f = parse_chain_map(&v)?;
            single("chain map", "d f = f d", f.is_chain_map())
        }
        "ar" => check_ar(&AcyclicRetraction::from_json(&v, "$")?, true),
        "sdr" => check_sdr(&Sdr::from_json(&v, "$")?),
        "contraction" => check_contraction(&Sdr::from_json(&v, "$")?),
        "ar-morphism" => {
            let f = ArMorphism::from_json(&v, "$")?;
            single("AR morphism", "f iota = iota' F, F pi = pi' f", check_ar_morphism(&f))
        }
        "contr-morphism" => {
            let f = ContrMorphism::from_json(&v, "$")?;
            single("Contr morphism", "AR morphism and f h = h' f", check_contr_morphism(&f))
        }
        "coch-square" => {
            let sq = LiftingProblem::from_json(&v, "$")?;
            single("lifting square", "p f = g i", &sq.p * &sq.f == &sq.g * &sq.i)
        }
        k => return Err(Failure::Parse(format!("$.kind: unknown kind `{k}`"))),
    };
    verdict(&report)
}

fn factor(input: &Path, category: Category, flavor: Flavor, emit_cells: bool, out: Option<&Path>) -> Outcome {
    let v = read(input)?;
    let mut result = match category {
        Category::Coch => {
            let alpha = parse_chain_map(&v)?;
            let fac = factor_coch(&alpha, flavor)?;
            let mut r = json!({
                "kind": "coch-factorization",
                "flavor": flavor.to_string(),
                "left": chain_map_json(&fac.left),
                "right": chain_map_json(&fac.right),
            });
            if emit_cells {
                r["cells"] = fac.witness.to_json();
            }
            r
        }
        Category::Ar => {
            let f = ArMorphism::from_json(&v, "$")?;
            let fac = factor_ar(&f, flavor)?;
            let report = fac.check();
            if !report.passed() {
                return Err(Failure::Internal(report.to_string()));
            }
            let mut r = fac.to_json();
            if emit_cells {
                r["cells"] = fac.witness.to_json();
            }
            r
        }
        Category::Contr => {
            let f = ContrMorphism::from_json(&v, "$")?;
            let fac = factor_contr(&f, flavor)?;
            let report = fac.check();
            if !report.passed() {
                return Err(Failure::Internal(report.to_string()));
            }
            let mut r = fac.to_json();
            if emit_cells {
                r["cells"] = fac.ar.witness.to_json();
            }
            r
        }
    };
    if result.get("kind").is_none() {
        result = tagged(result, "factorization");
    }
    write(out, &result)
}

fn square_of<D: contrax::retract::Diagram>(
    v: &Value,
    parse: fn(&Value, &str) -> contrax::error::Result<Morphism<D>>,
) -> Result<Square<D>, Failure> {
    let get = |k: &str| -> Result<Morphism<D>, Failure> {
        let x = v.get(k).ok_or_else(|| Failure::Parse(format!("$: missing `{k}`")))?;
        Ok(parse(x, &format!("$.{k}"))?)
    };
    Square::new(get("i")?, get("f")?, get("p")?, get("g")?)
        .map_err(|e| Failure::Parse(format!("$: {e}")))
}

fn lift(input: &Path, category: Category, out: Option<&Path>) -> Outcome {
    let v = read(input)?;
    let result = match category {
        Category::Coch => {
            let prob = LiftingProblem::from_json(&v, "$")?;
            let h = lift_coch(&prob, None)?;
            json!({"kind": "coch-lift", "h": chain_map_json(&h)})
        }
        Category::Ar => {
            let sq = square_of(&v, ArMorphism::from_json)?;
            tagged(lift_ar(&sq, None)?.to_json(), "ar-lift")
        }
        Category::Contr => {
            let sq = square_of(&v, ContrMorphism::from_json)?;
            tagged(lift_contr(&sq, None)?.to_json(), "contr-lift")
        }
    };
    write(out, &result)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { input } => check(&input),
        Command::Trick1 { input, o } => {
            let m = ArMorphism::from_json(&read(&input)?, "$")?;
            let out = trick1(&m.f, &m.src, &m.tgt)?;
            write(o.as_deref(), &out.to_json())
        }
        Command::Trick2 { input, o } => {
            let x = Sdr::from_json(&read(&input)?, "$")?;
            write(o.as_deref(), &tagged(trick2(&x)?.to_json(), "contraction"))
        }
        Command::Trick3 { input, o } => {
            let m = ContrMorphism::from_json(&read(&input)?, "$")?;
            write(o.as_deref(), &trick3(&m)?.to_json())
        }
        Command::Factor { input, category, flavor, emit_cells, o } => {
            factor(&input, category, flavor, emit_cells, o.as_deref())
        }
        Command::Lift { input, category, o } => lift(&input, category, o.as_deref()),
        Command::Path { input, o } => {
            let b: Arc<Complex> = Complex::from_json(&read(&input)?, "$")?.into_arc();
            let po = path_object(&b);
            write(
                o.as_deref(),
                &json!({
                    "kind": "path-object",
                    "base": b.to_json(),
                    "object": po.object.to_json(),
                    "incl": po.incl.to_json(),
                    "proj": po.proj.to_json(),
                }),
            )
        }
        Command::Retract { input, o } => {
            let g = parse_chain_map(&read(&input)?)?;
            let pres = exhibit_retract(&g)?;
            let report = pres.validate();
            if !report.passed() {
                return Err(Failure::Internal(report.to_string()));
            }
            write(o.as_deref(), &tagged(pres.to_json(), "retract-presentation"))
        }
        Command::Fuzz { campaign, trials, seed, field, max_dim, support, sequential, o } => {
            if !CAMPAIGNS.contains(&campaign.as_str()) {
                return Err(Failure::Parse(format!(
                    "--campaign: unknown `{campaign}`; known: {}",
                    CAMPAIGNS.join(", ")
                )));
            }
            let mut cfg = GenConfig::for_campaign(&campaign).with_seed(seed);
            if let Some(f) = field {
                cfg.field = f;
            }
            if let Some(d) = max_dim {
                cfg.max_dim = d;
            }
            if let Some(s) = support {
                cfg.support = s;
            }
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let report = run_campaign_with(&campaign, trials, &cfg, exec)?;
            write(o.as_deref(), &report.to_json())?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Violation(report.to_string()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Parse(m) | Failure::Violation(m) | Failure::Internal(m)) = &f;
            eprintln!("{m}");
            ExitCode::from(f.code())
        }
    }
}
