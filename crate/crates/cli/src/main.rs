use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boundary_lattice::cones::{generators, ray_count, verify_duality};
use boundary_lattice::global_divisors::{
    enumerate_strata, enumerate_strata_multi, simple_partitions,
};
use boundary_lattice::intlinalg::{self, IntMatrix};
use boundary_lattice::local_divisors::{
    local_cartier_generators, minimally_complete_subsets, partition_of_subset, ray_of_subset,
    subset_of_partition, LocalCartierChecker, LocalDivisorVector,
};
use boundary_lattice::trees::{compatibility_witness, enumerate_trees, validate_tree};
use boundary_lattice::weights::{
    label_weights, pairing_certificate, total_weight, weight_sum_equal, EdgeMultiset,
};
use boundary_lattice::{
    local_global_crosscheck, pullback_fij, pullback_fij_type_i, pullback_forgetful,
    pushpull_matrix, relations_basis, CartierLattice, ColoredTree, DivisorVector, Error, Partition,
    RawTree, Subset,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "boundary-lattice",
    version,
    about = "Boundary divisor lattices of moduli of scaled marked lines"
)]
struct Cli {
    /// Output format. Not every command supports csv, dot or text.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Wrap JSON output as {"schema_version", "command", "result"}.
    #[arg(long, global = true)]
    envelope: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary strata labels.
    Strata {
        #[arg(long)]
        n: usize,
        /// Number of scalings; omit for the singly scaled space.
        #[arg(long)]
        s: Option<usize>,
    },
    /// Computations on one colored tree.
    Tree {
        #[arg(value_enum)]
        action: TreeAction,
        #[command(flatten)]
        input: TreeInput,
        /// Local divisor JSON, e.g. {"1,2": 1, "3,4,5,6": -1}.
        #[arg(long)]
        divisor: Option<PathBuf>,
        /// Edge multiset for `pairing`, e.g. "1:3,3:2,4,5".
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Partition key for `compatible`, e.g. "1,2|3,4".
        #[arg(long)]
        partition: Option<String>,
    },
    /// Global computations for n markings.
    Global {
        #[arg(value_enum)]
        action: GlobalAction,
        #[arg(long)]
        n: usize,
        /// Divisor JSON: {"n": 4, "typeI": {"1,2": 1}, "typeII": {"1|2|3|4": 1}}.
        #[arg(long)]
        divisor: Option<PathBuf>,
        /// Subset for the forgetful pullback, e.g. "1,2".
        #[arg(long, conflicts_with = "fij")]
        subset: Option<String>,
        /// Pair of markings for the f_ij pullback, e.g. "1,4".
        #[arg(long)]
        fij: Option<String>,
        /// With --fij: return the type-I pullback instead of the type-II one.
        #[arg(long, requires = "fij")]
        type_i: bool,
    },
    /// All trees with n colored vertices whose uncolored vertices have at least two children.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_uncolored: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TreeInput {
    /// Tree JSON file.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Tree in nested notation, e.g. "((1,2),(3,4))".
    #[arg(long)]
    nested: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeAction {
    Validate,
    Show,
    Weights,
    Cone,
    Rays,
    Mcs,
    Generators,
    CartierLocal,
    Pairing,
    Compatible,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GlobalAction {
    Rank,
    Relations,
    Decide,
    Witness,
    Pullback,
    Crosscheck,
    Pushpull,
    Simple,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PropertyViolation(_) => EXIT_VIOLATION,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<intlinalg::LinalgError> for Failure {
    fn from(e: intlinalg::LinalgError) -> Self {
        Error::from(e).into()
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

/// What a command produced: a JSON result plus optional renderings in the
/// other formats, and whether a checked property failed.
struct Output {
    command: String,
    result: Value,
    text: Option<String>,
    csv: Option<String>,
    dot: Option<String>,
    violation: Option<String>,
    /// The report is printed but the input was rejected.
    invalid: bool,
}

impl Output {
    fn new(command: impl Into<String>, result: Value) -> Self {
        Output {
            command: command.into(),
            result,
            text: None,
            csv: None,
            dot: None,
            violation: None,
            invalid: false,
        }
    }

    fn text(mut self, t: String) -> Self {
        self.text = Some(t);
        self
    }

    fn csv(mut self, c: String) -> Self {
        self.csv = Some(c);
        self
    }
}

fn env_limit(var: &str, default: usize) -> Result<usize, Failure> {
    match std::env::var(var) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{var}={v:?} is not a number"))),
        Err(_) => Ok(default),
    }
}

fn check_n(n: usize, var: &str, default: usize) -> Result<(), Failure> {
    let max = env_limit(var, default)?;
    if !(2..=max).contains(&n) {
        return Err(invalid(format!(
            "n = {n} is outside 2..={max} (set {var} to raise the bound)"
        )));
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_tree(input: &TreeInput) -> Result<(Option<RawTree>, Option<ColoredTree>), Failure> {
    match (&input.tree, &input.nested) {
        (Some(path), _) => {
            let raw: RawTree = serde_json::from_str(&read(path)?)
                .map_err(|e| invalid(format!("malformed tree JSON in {}: {e}", path.display())))?;
            let reduced = boundary_lattice::reduce_tree(&raw).ok();
            Ok((Some(raw), reduced))
        }
        (None, Some(s)) => Ok((None, Some(ColoredTree::from_nested(s)?))),
        (None, None) => Err(invalid("one of --tree or --nested is required")),
    }
}

fn parse_multiset(s: &str) -> Result<EdgeMultiset, Failure> {
    let mut m = EdgeMultiset::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (e, k) = item.split_once(':').unwrap_or((item, "1"));
        let e = e.trim().trim_start_matches('x');
        let e: usize = e.parse().map_err(|_| invalid(format!("bad edge {e:?}")))?;
        let k: u32 = k
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad multiplicity {k:?}")))?;
        *m.entry(e).or_default() += k;
    }
    Ok(m)
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(big_json).collect()))
            .collect(),
    )
}

fn big_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn matrix_csv(header: &[String], m: &IntMatrix) -> String {
    let mut out = header
        .iter()
        .map(|h| format!("\"{h}\""))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    out.push_str(&m.to_csv());
    out
}

fn run_tree(
    action: TreeAction,
    input: &TreeInput,
    divisor: Option<&Path>,
    a: Option<&str>,
    b: Option<&str>,
    partition: Option<&str>,
) -> Result<Output, Failure> {
    let (raw, tree) = load_tree(input)?;
    if action == TreeAction::Validate {
        let raw = match raw {
            Some(r) => r,
            None => tree
                .as_ref()
                .expect("nested input parses to a tree")
                .to_raw(),
        };
        let report = validate_tree(&raw);
        let mut out = Output::new(
            "tree validate",
            json!({ "valid": report.is_valid(), "checks": to_json(&report.checks) }),
        )
        .text(if report.is_valid() {
            "valid".into()
        } else {
            "invalid".into()
        });
        if !report.is_valid() {
            out.invalid = true;
        }
        return Ok(out);
    }
    let t = match tree {
        Some(t) => t,
        None => {
            let raw = raw.expect("file input");
            return Err(boundary_lattice::reduce_tree(&raw)
                .expect_err("tree failed to reduce")
                .into());
        }
    };
    let out = match action {
        TreeAction::Validate => unreachable!(),
        TreeAction::Show => {
            let mut o = Output::new(
                "tree show",
                json!({
                    "nested": t.to_nested(),
                    "g": t.g(),
                    "n": t.n(),
                    "tree": to_json(&t.to_raw()),
                }),
            )
            .text(t.to_nested());
            o.dot = Some(t.to_dot());
            o
        }
        TreeAction::Weights => {
            let w = label_weights(&t);
            let edges: BTreeMap<String, Value> =
                w.iter().map(|(e, v)| (e.to_string(), to_json(v))).collect();
            let s = total_weight(&t);
            let text = w
                .iter()
                .map(|(e, v)| format!("x{e} {:?}", v.coords()))
                .chain(std::iter::once(format!("s {:?}", s.coords())))
                .collect::<Vec<_>>()
                .join("\n");
            Output::new(
                "tree weights",
                json!({ "edges": edges, "total": to_json(&s) }),
            )
            .text(text)
        }
        TreeAction::Cone => {
            let gens = generators(&t);
            let report = verify_duality(&t)?;
            let rows: Vec<Vec<i64>> = gens.iter().map(|v| v.coords().to_vec()).collect();
            let m = IntMatrix::from_i64_rows(&rows, t.g())?;
            let header: Vec<String> = (1..=t.g()).map(|k| format!("e{k}")).collect();
            let mut o = Output::new(
                "tree cone",
                json!({ "generators": to_json(&gens), "ray_count": ray_count(&t), "checks": to_json(&report) }),
            )
            .csv(matrix_csv(&header, &m))
            .text(rows.iter().map(|r| format!("{r:?}")).collect::<Vec<_>>().join("\n"));
            if !report.passed() {
                o.violation = Some("duality checks failed".into());
            }
            o
        }
        TreeAction::Rays => {
            let mut items = Vec::new();
            for y in minimally_complete_subsets(&t) {
                let ray = ray_of_subset(&t, &y)?;
                let partition = partition_of_subset(&t, &y).ok().map(|p| p.key());
                items.push(
                    json!({ "subset": y.key(), "ray": to_json(&ray), "partition": partition }),
                );
            }
            Output::new("tree rays", Value::Array(items))
        }
        TreeAction::Mcs => {
            let keys: Vec<String> = minimally_complete_subsets(&t)
                .iter()
                .map(|y| y.key())
                .collect();
            let text = keys
                .iter()
                .map(|k| format!("{{{k}}}"))
                .collect::<Vec<_>>()
                .join("\n");
            Output::new("tree mcs", to_json(&keys)).text(text)
        }
        TreeAction::Generators => {
            let gens = local_cartier_generators(&t);
            Output::new("tree generators", to_json(&gens))
        }
        TreeAction::CartierLocal => {
            let path = divisor.ok_or_else(|| invalid("tree cartier-local needs --divisor"))?;
            let a = LocalDivisorVector::from_json(&read(path)?)?;
            let checker = LocalCartierChecker::new(&t)?;
            let decision = checker.decide(&a)?;
            let mut result = to_json(&decision);
            let subsets: Vec<String> = checker.subsets().iter().map(|y| y.key()).collect();
            result["subsets"] = to_json(&subsets);
            if decision.cartier {
                let c = checker.decompose(&a)?;
                result["generator_coefficients"] = Value::Array(c.iter().map(big_json).collect());
            }
            Output::new("tree cartier-local", result).text(decision.cartier.to_string())
        }
        TreeAction::Pairing => {
            let a = parse_multiset(a.ok_or_else(|| invalid("tree pairing needs --a"))?)?;
            let b = parse_multiset(b.ok_or_else(|| invalid("tree pairing needs --b"))?)?;
            let equal = weight_sum_equal(&t, &a, &b)?;
            let cert = pairing_certificate(&t, &a, &b)?;
            if equal != cert.is_some() {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message: "weight equality and certificate construction disagree".into(),
                });
            }
            Output::new(
                "tree pairing",
                json!({ "equal": equal, "certificate": to_json(&cert) }),
            )
            .text(equal.to_string())
        }
        TreeAction::Compatible => {
            let key = partition.ok_or_else(|| invalid("tree compatible needs --partition"))?;
            let p = Partition::parse_in(key, t.n())?;
            let witness = compatibility_witness(&p, &t);
            let subset = subset_of_partition(&t, &p).ok().map(|y| y.key());
            if witness.is_some() != subset.is_some() {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message: "homomorphism search and edge-subset dictionary disagree".into(),
                });
            }
            Output::new(
                "tree compatible",
                json!({
                    "compatible": witness.is_some(),
                    "map": witness.map(|h| h.map),
                    "subset": subset,
                }),
            )
        }
    };
    Ok(out)
}

const MAX_N_VAR: &str = "BOUNDARY_LATTICE_MAX_N";
const CROSSCHECK_VAR: &str = "BOUNDARY_LATTICE_CROSSCHECK_MAX_N";

fn load_divisor(path: Option<&Path>, n: usize) -> Result<DivisorVector, Failure> {
    let path = path.ok_or_else(|| invalid("this command needs --divisor"))?;
    let d = DivisorVector::from_json(&read(path)?)?;
    if d.n != n {
        return Err(invalid(format!(
            "divisor file has n = {}, command has --n {n}",
            d.n
        )));
    }
    Ok(d)
}

fn run_global(
    action: GlobalAction,
    n: usize,
    divisor: Option<&Path>,
    subset: Option<&str>,
    fij: Option<&str>,
    type_i: bool,
) -> Result<Output, Failure> {
    if action == GlobalAction::Crosscheck {
        check_n(n, CROSSCHECK_VAR, 5)?;
    } else {
        check_n(n, MAX_N_VAR, 8)?;
    }
    let out = match action {
        GlobalAction::Rank => {
            let pp = pushpull_matrix(n)?;
            let r = intlinalg::rank(&pp.matrix)?;
            Output::new("global rank", json!(r)).text(r.to_string())
        }
        GlobalAction::Relations => {
            let pp = pushpull_matrix(n)?;
            let basis = relations_basis(n)?;
            let cols: Vec<String> = pp.cols.iter().map(|p| p.key()).collect();
            Output::new(
                "global relations",
                json!({ "n": n, "columns": cols, "relations": matrix_json(&basis) }),
            )
            .csv(matrix_csv(&cols, &basis))
        }
        GlobalAction::Decide => {
            let d = load_divisor(divisor, n)?;
            let c = CartierLattice::new(n)?.is_cartier(&d)?;
            Output::new("global decide", json!({ "cartier": c })).text(c.to_string())
        }
        GlobalAction::Witness => {
            let d = load_divisor(divisor, n)?;
            let lattice = CartierLattice::new(n)?;
            let k = lattice.witness(&d)?;
            let rows: Vec<String> = lattice.pushpull().rows.iter().map(|s| s.key()).collect();
            let text = rows
                .iter()
                .zip(&k)
                .map(|(r, v)| format!("{r} {v}"))
                .collect::<Vec<_>>()
                .join("\n");
            Output::new(
                "global witness",
                json!({ "n": n, "subsets": rows, "witness": k }),
            )
            .text(text)
        }
        GlobalAction::Pullback => {
            let d = match (subset, fij) {
                (Some(s), None) => pullback_forgetful(n, Subset::parse_in(s, n)?)?,
                (None, Some(pair)) => {
                    let (i, j) = pair
                        .split_once(',')
                        .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
                        .ok_or_else(|| invalid(format!("--fij expects \"i,j\", got {pair:?}")))?;
                    if type_i {
                        pullback_fij_type_i(n, i, j)?
                    } else {
                        pullback_fij(n, i, j)?
                    }
                }
                _ => {
                    return Err(invalid(
                        "global pullback needs exactly one of --subset or --fij",
                    ))
                }
            };
            let cartier = CartierLattice::new(n)?.is_cartier(&d)?;
            let mut o = Output::new(
                "global pullback",
                json!({ "divisor": to_json(&d), "cartier": cartier }),
            )
            .text(d.to_json());
            if !cartier {
                o.violation = Some("pullback divisor is not Cartier".into());
            }
            o
        }
        GlobalAction::Crosscheck => {
            let report = local_global_crosscheck(n)?;
            let mut o = Output::new("global crosscheck", to_json(&report))
                .text(report.passed().to_string());
            if !report.passed() {
                o.violation = Some("local and global Cartier lattices differ".into());
            }
            o
        }
        GlobalAction::Pushpull => {
            let pp = pushpull_matrix(n)?;
            Output::new(
                "global pushpull",
                json!({
                    "n": n,
                    "rows": pp.rows.iter().map(|s| s.key()).collect::<Vec<_>>(),
                    "columns": pp.cols.iter().map(|p| p.key()).collect::<Vec<_>>(),
                    "matrix": matrix_json(&pp.matrix),
                }),
            )
            .csv(pp.to_csv())
        }
        GlobalAction::Simple => {
            let keys: Vec<String> = simple_partitions(n)?.iter().map(|p| p.key()).collect();
            let text = keys.join("\n");
            Output::new("global simple", to_json(&keys)).text(text)
        }
    };
    Ok(out)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Strata { n, s } => match s {
            None => {
                check_n(*n, MAX_N_VAR, 8)?;
                let strata = enumerate_strata(*n)?;
                let text = format!(
                    "typeI {}\ntypeII {}",
                    strata.type_i.len(),
                    strata.type_ii.len()
                );
                Ok(Output::new("strata", to_json(&strata)).text(text))
            }
            Some(s) => {
                if *n != 1 {
                    check_n(*n, MAX_N_VAR, 8)?;
                }
                let strata = enumerate_strata_multi(*n, *s)?;
                let text = format!(
                    "typeI {}\ntypeII {}",
                    strata.type_i.len(),
                    strata.type_ii.len()
                );
                Ok(Output::new("strata", to_json(&strata)).text(text))
            }
        },
        Command::Tree {
            action,
            input,
            divisor,
            a,
            b,
            partition,
        } => run_tree(
            *action,
            input,
            divisor.as_deref(),
            a.as_deref(),
            b.as_deref(),
            partition.as_deref(),
        ),
        Command::Global {
            action,
            n,
            divisor,
            subset,
            fij,
            type_i,
        } => run_global(
            *action,
            *n,
            divisor.as_deref(),
            subset.as_deref(),
            fij.as_deref(),
            *type_i,
        ),
        Command::Enumerate { n, max_uncolored } => {
            check_n(*n, MAX_N_VAR, 8)?;
            let trees = enumerate_trees(*n, *max_uncolored);
            let nested: Vec<String> = trees.iter().map(|t| t.to_nested()).collect();
            let text = nested.join("\n");
            Ok(Output::new(
                "enumerate",
                json!({ "n": n, "count": trees.len(), "trees": nested }),
            )
            .text(text))
        }
    }
}

fn envelope(o: &Output) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": o.command,
        "result": o.result,
    })
}

fn render(o: &Output, format: Format, wrap: bool) -> Result<String, Failure> {
    let unsupported = || {
        invalid(format!(
            "`{}` has no {} output",
            o.command,
            format_name(format)
        ))
    };
    match format {
        Format::Json if wrap => Ok(serde_json::to_string_pretty(&envelope(o)).expect("json")),
        Format::Json => Ok(serde_json::to_string_pretty(&o.result).expect("json")),
        Format::Text => o.text.clone().ok_or_else(unsupported),
        Format::Csv => o.csv.clone().ok_or_else(unsupported),
        Format::Dot => o.dot.clone().ok_or_else(unsupported),
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Dot => "dot",
        Format::Text => "text",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| render(&o, cli.format, cli.envelope).map(|s| (s, o)));
    match result {
        Ok((s, o)) => {
            println!("{}", s.trim_end());
            match o.violation {
                Some(v) => {
                    eprintln!("property violation: {v}");
                    ExitCode::from(EXIT_VIOLATION)
                }
                None if o.invalid => ExitCode::from(EXIT_INVALID),
                None => ExitCode::SUCCESS,
            }
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
