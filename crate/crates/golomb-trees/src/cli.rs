//! Command-line front end.
//!
//! Subcommands: `gen` (recursion engine), `tree` (leaf-weight engine),
//! `closed` (λ = 1 closed form), `freq` (empirical run lengths beside the
//! formula), `prune` (one pruning trace with the identity check), `verify`
//! (the cross-verification suite), `dot` (tree drawing), and `bfile`
//! (OEIS b-file export).
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
//! 3 engine error (out-of-range nested argument, overflow, or an oversized
//! tree), with the offending index on stderr.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::closed_forms::{closed_form_lambda1, frequency_lambda1};
use crate::pruning::prune;
use crate::recurrence::{
    eval_general, eval_golomb, FrequencyTable, GeneralParams, GolombParams, InitialConditions,
    Params, SequenceBuffer, Source,
};
use crate::tree::{
    assign_labels, build_skeleton, initial_conditions, leaf_weight_sequence, prefix_view,
    LabelRange, NodeKind, TreeVariant,
};
use crate::verify::{run_suite, GridConfig};

const MAX_SEQUENCE_LEN: i64 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "golomb-trees",
    version,
    about = "Nested recursions solved three ways: recursion, labeled trees, closed forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the recursion engine
    Gen(GenArgs),
    /// Evaluate the leaf-weight engine on the labeled tree
    Tree(TreeArgs),
    /// Evaluate the lambda = 1 closed form
    Closed(ClosedArgs),
    /// Print empirical run lengths beside the formula
    Freq(FreqArgs),
    /// Prune one prefix view and check the descent identity
    Prune(PruneArgs),
    /// Run the cross-verification suite over a parameter grid
    Verify(VerifyArgs),
    /// Emit a DOT drawing of the labeled tree
    Dot(DotArgs),
    /// Emit an OEIS b-file of the recursion values
    Bfile(BfileArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Knot,
    Tail,
}

impl From<VariantArg> for TreeVariant {
    fn from(arg: VariantArg) -> Self {
        match arg {
            VariantArg::Knot => TreeVariant::Knot,
            VariantArg::Tail => TreeVariant::Tail,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Plain,
    Csv,
    Bfile,
    Json,
}

#[derive(Args)]
struct GenArgs {
    /// Shift applied inside the nested call
    #[arg(long)]
    j: i64,
    /// Outer shift
    #[arg(long, default_value_t = 0)]
    s: i64,
    /// Chains per subtree; the additive constant becomes lambda * j
    #[arg(long, conflicts_with_all = ["k", "nu"])]
    lambda: Option<i64>,
    /// Number of summands of the general family (needs --nu and --init)
    #[arg(long, requires = "nu")]
    k: Option<i64>,
    /// Additive constant of the general family
    #[arg(long, requires = "k")]
    nu: Option<i64>,
    /// Comma-separated initial values for indices 1, 2, ...
    #[arg(long, value_delimiter = ',', conflicts_with = "init_file")]
    init: Option<Vec<i64>>,
    /// File of whitespace-separated initial values
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// Tree supplying derived initial conditions
    #[arg(long, value_enum, default_value_t = VariantArg::Knot)]
    variant: VariantArg,
    /// Number of terms to produce
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_SEQUENCE_LEN))]
    n: i64,
    #[arg(long, value_enum, default_value_t = FormatArg::Plain)]
    format: FormatArg,
}

#[derive(Args)]
struct TreeArgs {
    #[arg(long)]
    j: i64,
    #[arg(long, default_value_t = 0)]
    s: i64,
    #[arg(long, default_value_t = 1)]
    lambda: i64,
    #[arg(long, value_enum, default_value_t = VariantArg::Knot)]
    variant: VariantArg,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_SEQUENCE_LEN))]
    n: i64,
    #[arg(long, value_enum, default_value_t = FormatArg::Plain)]
    format: FormatArg,
}

#[derive(Args)]
struct ClosedArgs {
    #[arg(long)]
    j: i64,
    #[arg(long, default_value_t = 0)]
    s: i64,
    /// Must be 1: no closed form exists for more chains
    #[arg(long, default_value_t = 1)]
    lambda: i64,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_SEQUENCE_LEN))]
    n: i64,
    #[arg(long, value_enum, default_value_t = FormatArg::Plain)]
    format: FormatArg,
}

#[derive(Args)]
struct FreqArgs {
    #[arg(long)]
    j: i64,
    #[arg(long, default_value_t = 0)]
    s: i64,
    #[arg(long, default_value_t = 1)]
    lambda: i64,
    /// Prefix length the counts are taken over
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_SEQUENCE_LEN))]
    n: i64,
    /// Output format (plain or json)
    #[arg(long, value_enum, default_value_t = FormatArg::Plain)]
    format: FormatArg,
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    j: i64,
    #[arg(long, default_value_t = 0)]
    s: i64,
    #[arg(long, default_value_t = 1)]
    lambda: i64,
    /// Cutoff label of the view to prune
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_SEQUENCE_LEN))]
    n: i64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Use the default grid (same as giving no bounds)
    #[arg(long, conflicts_with_all = ["j_max", "lambda_max", "s_max", "n_tree", "n_closed"])]
    grid_default: bool,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(1..=8))]
    j_max: i64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(1..=8))]
    lambda_max: i64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(0..=8))]
    s_max: i64,
    /// Cutoff for tree-backed checks
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(i64).range(1..=1_000_000))]
    n_tree: i64,
    /// Cutoff for closed-form checks
    #[arg(long, default_value_t = 20000, value_parser = clap::value_parser!(i64).range(1..=10_000_000))]
    n_closed: i64,
}

#[derive(Args)]
struct DotArgs {
    #[arg(long)]
    j: i64,
    #[arg(long, default_value_t = 0)]
    s: i64,
    #[arg(long, default_value_t = 1)]
    lambda: i64,
    #[arg(long, value_enum, default_value_t = VariantArg::Knot)]
    variant: VariantArg,
    /// Deepest subtree index to draw
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..=100_000))]
    depth: i64,
}

#[derive(Args)]
struct BfileArgs {
    #[arg(long)]
    j: i64,
    #[arg(long, default_value_t = 0)]
    s: i64,
    #[arg(long, default_value_t = 1)]
    lambda: i64,
    #[arg(long, value_enum, default_value_t = VariantArg::Knot)]
    variant: VariantArg,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_SEQUENCE_LEN))]
    n: i64,
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn engine(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

fn verification(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

/// Parses arguments and runs one command; this is the whole binary.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("{}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Tree(args) => cmd_tree(args),
        Command::Closed(args) => cmd_closed(args),
        Command::Freq(args) => cmd_freq(args),
        Command::Prune(args) => cmd_prune(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Dot(args) => cmd_dot(args),
        Command::Bfile(args) => cmd_bfile(args),
    }
}

fn golomb_params(j: i64, s: i64, lambda: i64) -> Result<GolombParams, Failure> {
    GolombParams::new(j, s, lambda).map_err(|err| invalid(err.to_string()))
}

fn read_init_file(path: &Path) -> Result<Vec<i64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| invalid(format!("cannot read {}: {err}", path.display())))?;
    let mut values = Vec::new();
    for token in text.split_whitespace() {
        let value = token
            .parse()
            .map_err(|_| invalid(format!("bad initial value {token:?} in {}", path.display())))?;
        values.push(value);
    }
    Ok(values)
}

fn explicit_init(
    init: Option<Vec<i64>>,
    init_file: Option<&Path>,
) -> Result<Option<InitialConditions>, Failure> {
    let values = match (init, init_file) {
        (Some(values), _) => Some(values),
        (None, Some(path)) => Some(read_init_file(path)?),
        (None, None) => None,
    };
    match values {
        Some(values) => InitialConditions::new(values)
            .map(Some)
            .map_err(|err| invalid(err.to_string())),
        None => Ok(None),
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let n_max = args.n as usize;
    let init = explicit_init(args.init, args.init_file.as_deref())?;
    let buf = if let (Some(k), Some(nu)) = (args.k, args.nu) {
        let params = GeneralParams::new(k, args.j, args.s, nu)
            .map_err(|err| invalid(err.to_string()))?;
        let init = init.ok_or_else(|| {
            invalid("the general family needs explicit initial conditions (--init or --init-file)")
        })?;
        eval_general(params, &init, n_max).map_err(|err| engine(err.to_string()))?
    } else {
        let params = golomb_params(args.j, args.s, args.lambda.unwrap_or(1))?;
        let init = match init {
            Some(init) => init,
            None => initial_conditions(args.variant.into(), params),
        };
        eval_golomb(params, &init, n_max).map_err(|err| engine(err.to_string()))?
    };
    emit_sequence(&buf, args.format)
}

fn cmd_tree(args: TreeArgs) -> Result<(), Failure> {
    let params = golomb_params(args.j, args.s, args.lambda)?;
    let buf = leaf_weight_sequence(args.variant.into(), params, args.n as usize);
    emit_sequence(&buf, args.format)
}

fn cmd_closed(args: ClosedArgs) -> Result<(), Failure> {
    if args.lambda != 1 {
        return Err(invalid(format!(
            "the closed form needs lambda = 1, got {}",
            args.lambda
        )));
    }
    let params = golomb_params(args.j, args.s, 1)?;
    let mut values = Vec::with_capacity(args.n as usize);
    for n in 1..=args.n {
        let value = closed_form_lambda1(params.j(), params.s(), n)
            .map_err(|err| engine(err.to_string()))?;
        values.push(value);
    }
    let buf = SequenceBuffer::from_parts(Params::Golomb(params), Source::ClosedForm, values);
    emit_sequence(&buf, args.format)
}

fn cmd_freq(args: FreqArgs) -> Result<(), Failure> {
    let params = golomb_params(args.j, args.s, args.lambda)?;
    let init = initial_conditions(TreeVariant::Knot, params);
    let seq = eval_golomb(params, &init, args.n as usize)
        .map_err(|err| engine(err.to_string()))?;
    let table = FrequencyTable::from_values(seq.values());
    let with_formula = params.lambda() == 1;
    match args.format {
        FormatArg::Plain => {
            let stdout = std::io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            for (value, count) in table.iter() {
                if with_formula {
                    let formula = frequency_lambda1(params.j(), params.s(), value)
                        .map_err(|err| engine(err.to_string()))?;
                    writeln!(out, "{value} {count} {formula}").expect("stdout is writable");
                } else {
                    writeln!(out, "{value} {count}").expect("stdout is writable");
                }
            }
            out.flush().expect("stdout is writable");
            Ok(())
        }
        FormatArg::Json => {
            let mut entries = Vec::new();
            for (value, count) in table.iter() {
                let mut entry = json!({"value": value, "count": count});
                if with_formula {
                    let formula = frequency_lambda1(params.j(), params.s(), value)
                        .map_err(|err| engine(err.to_string()))?;
                    entry["formula"] = json!(formula);
                }
                entries.push(entry);
            }
            let doc = json!({
                "params": params_json(&Params::Golomb(params)),
                "n": args.n,
                "entries": entries,
            });
            println!("{doc}");
            Ok(())
        }
        _ => Err(invalid("freq supports plain or json output")),
    }
}

fn cmd_prune(args: PruneArgs) -> Result<(), Failure> {
    let params = golomb_params(args.j, args.s, args.lambda)?;
    let view = prefix_view(TreeVariant::Knot, params, args.n);
    let pruned = prune(&view).map_err(|err| invalid(err.to_string()))?;
    let weights = leaf_weight_sequence(TreeVariant::Knot, params, (args.n - params.j()) as usize);
    let d_formula = args.n - params.s() - weights.get((args.n - params.j()) as usize);
    let expected_drop = params.step().expect("step fits for valid parameters");
    let structural = d_formula >= 1
        && crate::pruning::structurally_equal(
            pruned.result(),
            &prefix_view(TreeVariant::Knot, params, d_formula),
        );
    let pass =
        structural && pruned.d() == d_formula && pruned.weight_drop() == expected_drop;
    println!("params: {params}");
    println!("cutoff: {}", args.n);
    println!("labels removed: {}", pruned.labels_removed());
    println!("pruned cutoff: {}", pruned.d());
    println!("formula cutoff: {d_formula}");
    println!("weight drop: {}", pruned.weight_drop());
    println!("expected drop: {expected_drop}");
    println!("structural match: {}", if structural { "yes" } else { "no" });
    println!("identity: {}", if pass { "PASS" } else { "FAIL" });
    if pass {
        Ok(())
    } else {
        Err(verification("pruning identity failed"))
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let config = GridConfig {
        j_max: args.j_max,
        lambda_max: args.lambda_max,
        s_max: args.s_max,
        n_tree: args.n_tree as usize,
        n_closed: args.n_closed as usize,
    };
    println!(
        "grid: j<={} lambda<={} s<={} n_tree={} n_closed={}",
        config.j_max, config.lambda_max, config.s_max, config.n_tree, config.n_closed
    );
    let report = run_suite(&config);
    for check in report.checks() {
        let detail = if check.detail().is_empty() {
            String::new()
        } else {
            format!(" [{}]", check.detail())
        };
        if check.passed() {
            println!(
                "check {}: ok ({} equalities){detail}",
                check.name(),
                check.cells()
            );
        } else {
            println!(
                "check {}: FAIL ({} of {} equalities failed){detail}",
                check.name(),
                check.failure_count(),
                check.cells()
            );
            for failure in check.failures() {
                println!("  - {failure}");
            }
        }
    }
    if report.passed() {
        println!("suite: PASS ({} equalities)", report.total_cells());
        Ok(())
    } else {
        println!(
            "suite: FAIL ({} equalities, {} failed)",
            report.total_cells(),
            report.total_failures()
        );
        Err(verification("verification failed"))
    }
}

fn cmd_dot(args: DotArgs) -> Result<(), Failure> {
    let params = golomb_params(args.j, args.s, args.lambda)?;
    let skeleton = build_skeleton(
        args.variant.into(),
        params.j(),
        params.lambda(),
        args.depth as usize,
    )
    .map_err(|err| engine(err.to_string()))?;
    let tree = assign_labels(skeleton, params.s()).map_err(|err| engine(err.to_string()))?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let name = match TreeVariant::from(args.variant) {
        TreeVariant::Knot => "knot_tree",
        TreeVariant::Tail => "tail_tree",
    };
    writeln!(out, "digraph {name} {{").expect("stdout is writable");
    writeln!(out, "  rankdir=TB;").expect("stdout is writable");
    writeln!(out, "  node [shape=circle];").expect("stdout is writable");
    for (id, node) in tree.skeleton().nodes().iter().enumerate() {
        let text = label_text(tree.labels()[id]);
        let annotation = match node.kind {
            NodeKind::InitialLeaf => "\\n(initial)".to_string(),
            NodeKind::KnotNode(i) => format!("\\n(knot {i})"),
            NodeKind::TailNode(i) => format!("\\n(tail {i})"),
            _ => String::new(),
        };
        let shape = match node.kind {
            NodeKind::Supernode(_) => ", shape=box",
            _ => "",
        };
        writeln!(out, "  n{id} [label=\"{text}{annotation}\"{shape}];")
            .expect("stdout is writable");
    }
    for (id, node) in tree.skeleton().nodes().iter().enumerate() {
        if let Some(parent) = node.parent {
            writeln!(out, "  n{parent} -> n{id};").expect("stdout is writable");
        }
    }
    writeln!(out, "}}").expect("stdout is writable");
    out.flush().expect("stdout is writable");
    Ok(())
}

fn cmd_bfile(args: BfileArgs) -> Result<(), Failure> {
    let params = golomb_params(args.j, args.s, args.lambda)?;
    let init = initial_conditions(args.variant.into(), params);
    let buf = eval_golomb(params, &init, args.n as usize)
        .map_err(|err| engine(err.to_string()))?;
    emit_sequence(&buf, FormatArg::Bfile)
}

fn label_text(range: LabelRange) -> String {
    if range.is_empty() {
        "∅".to_string()
    } else if range.width == 1 {
        range.start.to_string()
    } else {
        format!("{}–{}", range.start, range.end())
    }
}

fn params_json(params: &Params) -> serde_json::Value {
    match params {
        Params::Golomb(p) => json!({
            "family": "golomb",
            "j": p.j(),
            "s": p.s(),
            "lambda": p.lambda(),
        }),
        Params::General(p) => json!({
            "family": "general",
            "k": p.k(),
            "j": p.j(),
            "s": p.s(),
            "nu": p.nu(),
        }),
    }
}

fn emit_sequence(buf: &SequenceBuffer, format: FormatArg) -> Result<(), Failure> {
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match format {
        FormatArg::Plain => {
            let line: Vec<String> = buf.values().iter().map(i64::to_string).collect();
            writeln!(out, "{}", line.join(" ")).expect("stdout is writable");
        }
        FormatArg::Csv => {
            writeln!(out, "n,value").expect("stdout is writable");
            for (i, value) in buf.values().iter().enumerate() {
                writeln!(out, "{},{value}", i + 1).expect("stdout is writable");
            }
        }
        FormatArg::Bfile => {
            for (i, value) in buf.values().iter().enumerate() {
                writeln!(out, "{} {value}", i + 1).expect("stdout is writable");
            }
        }
        FormatArg::Json => {
            let doc = json!({
                "params": params_json(buf.params()),
                "source": buf.source().as_str(),
                "values": buf.values(),
            });
            writeln!(out, "{doc}").expect("stdout is writable");
        }
    }
    out.flush().expect("stdout is writable");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_text_covers_all_widths() {
        assert_eq!(label_text(LabelRange { start: 3, width: 0 }), "∅");
        assert_eq!(label_text(LabelRange { start: 7, width: 1 }), "7");
        assert_eq!(label_text(LabelRange { start: 2, width: 4 }), "2–5");
    }

    #[test]
    fn params_json_shapes() {
        let golomb = Params::Golomb(GolombParams::new(2, 4, 3).unwrap());
        let doc = params_json(&golomb);
        assert_eq!(doc["family"], "golomb");
        assert_eq!(doc["lambda"], 3);
        let general = Params::General(GeneralParams::new(2, 1, 0, 5).unwrap());
        let doc = params_json(&general);
        assert_eq!(doc["family"], "general");
        assert_eq!(doc["nu"], 5);
    }

    #[test]
    fn cli_declaration_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
