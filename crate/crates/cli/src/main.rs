mod input;

use std::collections::HashMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use factorium::algebra::{algebra_to_json, Algebra, ZeroOneSpec};
use factorium::congruence::all_congruences;
use factorium::factorization::{central_elements, check_bfc, check_determining_property, complementary_pairs, decompose};
use factorium::fol::{
    check_definable_kernels, check_sigma, ef_game, sigma_suite, EvalConfig, Evaluator, GameConfig, Player,
};
use factorium::gallery::{catalog, counterexample_pipeline, figure_checks, standard_u_chain, GallerySpec, PipelineConfig};
use factorium::malcev::{check_malcev_identities, find_u_chain, validate_u_chain, MalcevConfig, MalcevFamily, UChain};

use input::{usage, Loaded, Result, UsageError};

#[derive(Parser)]
#[command(name = "factorium", version, about = "Finite algebra workbench: congruences, factor pairs, definability, EF games")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Print reports as text (the default).
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AlgebraArg {
    /// A JSON algebra file, or `gallery:NAME` (e.g. gallery:L2vxL5v).
    #[arg(long)]
    algebra: String,
}

#[derive(Args)]
struct FormulaArgs {
    /// File holding one formula.
    #[arg(long, value_name = "FILE")]
    formula: Option<String>,
    /// The formula itself.
    #[arg(long, value_name = "TEXT")]
    expr: Option<String>,
    /// Maximum formula nodes visited per evaluation.
    #[arg(long)]
    budget: Option<u64>,
}

impl FormulaArgs {
    fn config(&self) -> EvalConfig {
        EvalConfig { budget: self.budget.unwrap_or(EvalConfig::default().budget), ..EvalConfig::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Gallery algebras.
    #[command(subcommand)]
    Gallery(GalleryCommand),
    /// The congruence lattice.
    Congruences(AlgebraArg),
    /// Every direct decomposition into two factors, with its reconstruction check.
    Decompose(AlgebraArg),
    /// Central elements for the constants 0 and 1.
    Central(AlgebraArg),
    /// Whether the factor congruences form a distributive sublattice.
    Bfc(AlgebraArg),
    /// Whether central elements determine factor pairs, and whether Φ(x,y,z) defines them.
    DfcCheck {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// The Σ axioms for one pair (e, f), or a scan over all pairs.
    SigmaCheck {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long, requires = "f")]
        e: Option<String>,
        #[arg(long, requires = "e")]
        f: Option<String>,
    },
    /// Ehrenfeucht–Fraïssé game between two algebras.
    EfGame {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// The second algebra.
        #[arg(long)]
        other: String,
        #[arg(long)]
        rounds: usize,
        /// Maximum positions explored.
        #[arg(long)]
        budget: Option<u64>,
        /// Exit with 1 unless this player wins.
        #[arg(long)]
        expect: Option<Winner>,
    },
    /// Evaluates a formula; exit code 1 when it is false.
    Eval {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[command(flatten)]
        formula: FormulaArgs,
        /// Free variable values, `x=1` or `x=(0,1)`.
        #[arg(long = "assign", value_name = "VAR=ELEM")]
        assign: Vec<String>,
    },
    /// Checks a Mal'cev family (JSON) on an algebra.
    MalcevCheck {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, value_name = "FILE")]
        family: String,
        /// Maximum term evaluations.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Validates a u-chain (the standard one by default) or searches for one.
    UChain {
        /// Algebras to check; defaults to the gallery up to size 6.
        #[arg(long)]
        algebra: Vec<String>,
        #[arg(long, value_name = "FILE", conflicts_with = "search")]
        chain: Option<String>,
        /// Search terms up to this depth.
        #[arg(long, value_name = "DEPTH")]
        search: Option<usize>,
    },
    /// Dₙ against L₂×Lₙ: indecomposability, decomposability and the (n−3)-round game.
    Counterexample {
        #[arg(long)]
        n: usize,
        /// Maximum game positions explored.
        #[arg(long)]
        budget: Option<u64>,
        /// Skip enumerating the partial maps fixing the core.
        #[arg(long)]
        no_maps: bool,
    },
    /// The subalgebra, congruence and transport checks on L₅^∨×L₂^∨.
    Figures,
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// Prints a gallery algebra as JSON.
    Build { name: String },
    /// Lists gallery names up to a size.
    List {
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        /// The ∨-expanded signature.
        #[arg(long)]
        join: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Winner {
    Exists,
    Forall,
}

/// What a command produced: whether its checks passed, and both renderings.
struct Report {
    passed: bool,
    text: String,
    json: Value,
}

fn report(passed: bool, text: String, json: Value) -> Result<Report> {
    Ok(Report { passed, text, json })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(r) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&r.json).expect("json"));
            } else {
                print!("{}", r.text);
            }
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::Gallery(GalleryCommand::Build { name }) => {
            let built = name.parse::<GallerySpec>()?.build()?;
            let text = algebra_to_json(&built.algebra);
            let json: Value = serde_json::from_str(&text)?;
            report(true, format!("{text}\n"), json)
        }
        Command::Gallery(GalleryCommand::List { max_size, join }) => {
            let specs = catalog(max_size, join);
            let text = specs.iter().map(|s| format!("{s}\t{}\n", s.size())).collect();
            report(true, text, json!(specs.iter().map(|s| json!({"name": s.to_string(), "size": s.size()})).collect::<Vec<_>>()))
        }
        Command::Congruences(a) => congruences(&Loaded::from_arg(&a.algebra)?),
        Command::Decompose(a) => decomposition(&Loaded::from_arg(&a.algebra)?),
        Command::Central(a) => central(&Loaded::from_arg(&a.algebra)?),
        Command::Bfc(a) => {
            let l = Loaded::from_arg(&a.algebra)?;
            let r = check_bfc(&l.algebra)?;
            let text = format!("{}: {} factor congruences, BFC {}\n", l.name, r.factor_congruences.len(), verdict(r.holds));
            report(r.holds, text, serde_json::to_value(&r)?)
        }
        Command::DfcCheck { algebra, formula } => dfc(&Loaded::from_arg(&algebra.algebra)?, &formula),
        Command::SigmaCheck { algebra, formula, e, f } => sigma(&Loaded::from_arg(&algebra.algebra)?, &formula, e.zip(f)),
        Command::EfGame { algebra, other, rounds, budget, expect } => {
            let (a, b) = (Loaded::from_arg(&algebra.algebra)?, Loaded::from_arg(&other)?);
            let config = GameConfig { budget: budget.unwrap_or(GameConfig::default().budget) };
            let r = ef_game(&a.algebra, &b.algebra, rounds, config)?;
            let verified = r.certificate.as_ref().map(|c| c.verify(&a.algebra, &b.algebra));
            let passed = match expect {
                Some(Winner::Exists) => r.winner == Player::Exists,
                Some(Winner::Forall) => r.winner == Player::Forall,
                None => true,
            } && verified != Some(false);
            let mut text = format!("{} vs {}, {rounds} rounds: {:?} wins ({} positions)\n", a.name, b.name, r.winner, r.positions_explored);
            if let Some(c) = &r.certificate {
                text += &format!("certificate: {} moves, replay {}\n", c.moves.len(), verdict(verified == Some(true)));
            }
            if let Some((side, x)) = r.forall_opening {
                text += &format!("∀ opens with {} in {:?}\n", if side == factorium::fol::Side::A { a.show(x) } else { b.show(x) }, side);
            }
            report(passed, text, json!({"a": a.name, "b": b.name, "result": r, "certificate_verified": verified}))
        }
        Command::Eval { algebra, formula, assign } => eval(&Loaded::from_arg(&algebra.algebra)?, &formula, &assign),
        Command::MalcevCheck { algebra, family, budget } => {
            let l = Loaded::from_arg(&algebra.algebra)?;
            let fam = MalcevFamily::from_json(&input::read(&family)?, l.algebra.signature())?;
            let config = MalcevConfig { budget: budget.unwrap_or(MalcevConfig::default().budget) };
            let r = check_malcev_identities(&l.algebra, &fam, config)?;
            let mut text = format!(
                "{}: {} identities over {} assignments, {}\n",
                l.name,
                r.identities.len(),
                r.assignments,
                verdict(r.holds)
            );
            for f in r.failures() {
                text += &format!("  fails [{}] {}", f.block, f.identity);
                if let Some(c) = &f.counter_assignment {
                    text += &format!(" at {}", c.iter().map(|(v, &e)| format!("{v}={}", l.show(e))).collect::<Vec<_>>().join(" "));
                }
                text += "\n";
            }
            report(r.holds, text, serde_json::to_value(&r)?)
        }
        Command::UChain { algebra, chain, search } => u_chain(&algebra, chain.as_deref(), search),
        Command::Counterexample { n, budget, no_maps } => {
            let mut config = PipelineConfig { enumerate_maps: !no_maps, ..PipelineConfig::default() };
            if let Some(b) = budget {
                config.game.budget = b;
            }
            let r = counterexample_pipeline(n, config)?;
            let mut text = format!(
                "{} ({} elements): directly indecomposable {}\n{} ({} elements): decompositions {:?}\n",
                r.d_name, r.d_size, r.d_indecomposable, r.product_name, r.product_size, r.product_decompositions
            );
            text += &format!(
                "game, {} rounds: {:?} wins ({} positions, certificate {})\n",
                r.game.rounds,
                r.game.winner,
                r.game.positions_explored,
                verdict(r.game.certificate_verified)
            );
            text += &format!("stated strategy: {} ({} positions)\n", verdict(r.strategy.wins), r.strategy.positions_checked);
            if let Some(m) = &r.maps {
                text += &format!("partial maps fixing the core: {} checked, {} failures\n", m.maps_checked, m.failures);
            }
            text += &format!("overall: {}\n", verdict(r.holds));
            report(r.holds, text, serde_json::to_value(&r)?)
        }
        Command::Figures => {
            let r = figure_checks()?;
            let mut text = format!("F is an isomorphism: {}\nθ blocks: ", verdict(r.f_is_isomorphism));
            text += &r.theta_blocks.iter().map(|b| format!("{{{}}}", b.join(" "))).collect::<Vec<_>>().join(" ");
            text += &format!("\nθ ⊊ ker π1: {}\n", verdict(r.theta_below_kernel && r.theta_differs_from_kernel));
            for s in &r.transport {
                text += &format!("  {} ⊨ Φ({}, {}, {}): {}\n", s.algebra, s.x, s.y, s.z, s.value);
            }
            text += &format!("transport as expected: {}\n", verdict(r.transport_as_expected));
            report(r.holds, text, serde_json::to_value(&r)?)
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn congruences(l: &Loaded) -> Result<Report> {
    let cons = all_congruences(&l.algebra)?;
    let mut text = format!("{}: {} congruences\n", l.name, cons.len());
    let mut rows = Vec::new();
    for c in &cons {
        let blocks: Vec<String> = c.blocks().iter().map(|b| format!("{{{}}}", l.show_all(b))).collect();
        text += &format!("  {}\n", blocks.join(" "));
        rows.push(c.blocks());
    }
    report(true, text, json!({"algebra": l.name, "count": cons.len(), "congruences": rows}))
}

fn decomposition(l: &Loaded) -> Result<Report> {
    let reports = decompose(&l.algebra)?;
    let mut text = format!("{}: {} decompositions\n", l.name, reports.len());
    let mut ok = true;
    let mut rows = Vec::new();
    for r in &reports {
        let verified = r.verify(&l.algebra);
        ok &= verified;
        text += &format!("  {} × {}, reconstruction {}\n", r.quotient_sizes.0, r.quotient_sizes.1, verdict(verified));
        rows.push(json!({"report": r, "verified": verified}));
    }
    if reports.is_empty() && l.algebra.size() >= 2 {
        text += "  directly indecomposable\n";
    }
    report(ok, text, json!({"algebra": l.name, "decompositions": rows}))
}

fn central(l: &Loaded) -> Result<Report> {
    let r = central_elements(&l.algebra, &ZeroOneSpec::standard())?;
    let mut text = format!("{}: {} central elements\n", l.name, r.distinct_values().len());
    for c in &r.elements {
        text += &format!("  {}\n", l.show_all(&c.value));
    }
    if !r.unsolved.is_empty() {
        text += &format!("  {} factor pairs without a central element\n", r.unsolved.len());
    }
    report(true, text, serde_json::to_value(&r)?)
}

fn dfc(l: &Loaded, f: &FormulaArgs) -> Result<Report> {
    let z = ZeroOneSpec::standard();
    let det = check_determining_property(&l.algebra, &z)?;
    let mut text = format!(
        "{}: {} factor pairs, {} central elements; determining {}\n",
        l.name,
        det.factor_pairs,
        det.central_elements,
        verdict(det.holds())
    );
    let mut passed = det.holds();
    let mut json = json!({"algebra": l.name, "determining": det, "holds": det.holds()});
    let wants_formula = f.formula.is_some() || f.expr.is_some() || l.algebra.op_index(factorium::gallery::JOIN).is_some();
    if wants_formula {
        let phi = input::formula(&l.algebra, f.formula.as_deref(), f.expr.as_deref(), true)?;
        let r = check_definable_kernels(&l.algebra, &phi, &z, f.config())?;
        let defined = r.injective && r.surjective && r.entries.iter().all(|e| e.matches_witness);
        text += &format!(
            "Φ: {} central elements -> {} factor congruences; injective {}, onto {}, matches witnesses {}\n",
            r.central_elements,
            r.factor_congruences.len(),
            r.injective,
            r.surjective,
            r.entries.iter().all(|e| e.matches_witness)
        );
        passed &= defined;
        json["definability"] = serde_json::to_value(&r)?;
        json["holds"] = json!(passed);
    }
    report(passed, text, json)
}

fn sigma(l: &Loaded, f: &FormulaArgs, pair: Option<(String, String)>) -> Result<Report> {
    let z = ZeroOneSpec::standard();
    let phi = input::formula(&l.algebra, f.formula.as_deref(), f.expr.as_deref(), true)?;
    let suite = sigma_suite(l.algebra.signature(), &phi, &z)?;
    if let Some((e, f_)) = pair {
        let (e, f_) = (l.element(&e)?, l.element(&f_)?);
        let r = check_sigma(&l.algebra, &suite, &[e], &[f_], f.config())?;
        let mut text = format!("{}: (e, f) = ({}, {}) {}\n", l.name, l.show(e), l.show(f_), verdict(r.holds));
        for name in r.failed() {
            text += &format!("  fails {name}\n");
        }
        return report(r.holds, text, serde_json::to_value(&r)?);
    }
    // Scan: Σ should pick out exactly the complementary pairs of central elements.
    let expected: Vec<(usize, usize)> = complementary_pairs(&l.algebra, &z)?.into_iter().map(|c| (c.e[0], c.f[0])).collect();
    let mut found = Vec::new();
    for e in l.algebra.elements() {
        for f_ in l.algebra.elements() {
            if check_sigma(&l.algebra, &suite, &[e], &[f_], f.config())?.holds {
                found.push((e, f_));
            }
        }
    }
    let mut sorted = expected.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let passed = found == sorted;
    let mut text = format!("{}: {} pairs satisfy Σ, {} complementary pairs; {}\n", l.name, found.len(), sorted.len(), verdict(passed));
    for &(e, f_) in &found {
        text += &format!("  ({}, {})\n", l.show(e), l.show(f_));
    }
    report(passed, text, json!({"algebra": l.name, "satisfying": found, "complementary": sorted, "holds": passed}))
}

fn eval(l: &Loaded, f: &FormulaArgs, assign: &[String]) -> Result<Report> {
    let phi = input::formula(&l.algebra, f.formula.as_deref(), f.expr.as_deref(), false)?;
    let mut env = HashMap::new();
    for a in assign {
        let (var, value) = a.split_once('=').ok_or_else(|| UsageError(format!("`{a}`: expected VAR=ELEM")))?;
        env.insert(var.trim().to_string(), l.element(value)?);
    }
    let free: Vec<String> = phi.free_vars().into_iter().collect();
    if let Some(missing) = free.iter().find(|v| !env.contains_key(*v)) {
        return usage(format!("free variable `{missing}` has no --assign"));
    }
    let values: Vec<usize> = free.iter().map(|v| env[v]).collect();
    let value = Evaluator::new(&l.algebra, &phi, &free, f.config())?.eval(&values)?;
    report(value, format!("{value}\n"), json!({"algebra": l.name, "formula": phi.to_string(), "value": value}))
}

fn u_chain(args: &[String], chain_file: Option<&str>, search: Option<usize>) -> Result<Report> {
    let loaded: Vec<Loaded> = if args.is_empty() {
        [false, true]
            .into_iter()
            .flat_map(|join| catalog(6, join))
            .map(|s| s.build().map(|b| Loaded { name: b.name, algebra: b.algebra, labels: Some(b.labels) }))
            .collect::<std::result::Result<_, _>>()?
    } else {
        args.iter().map(|a| Loaded::from_arg(a)).collect::<Result<_>>()?
    };
    let named: Vec<(&str, &Algebra)> = loaded.iter().map(|l| (l.name.as_str(), &l.algebra)).collect();
    let chain: UChain = if let Some(depth) = search {
        // Search over the smallest common signature: skip the ∨-expanded members when both kinds are present.
        let base: Vec<(&str, &Algebra)> = named.iter().copied().filter(|(_, a)| a.signature() == named[0].1.signature()).collect();
        match find_u_chain(&base, &ZeroOneSpec::standard(), depth, 1_000_000) {
            Some(c) => c,
            None => return report(false, format!("no u-chain from terms of depth ≤ {depth}\n"), json!({"found": false})),
        }
    } else if let Some(file) = chain_file {
        UChain::from_json(&input::read(file)?, named[0].1.signature())?
    } else {
        standard_u_chain().map_err(|r| UsageError(format!("standard u-chain fails: {r:?}")))?.chain().clone()
    };
    let r = validate_u_chain(&named, &chain);
    let terms: Vec<String> = chain.terms().iter().map(|t| t.to_string()).collect();
    let mut text = format!("u-chain ({}) on {} algebras: {}\n", terms.join(", "), named.len(), verdict(r.valid));
    for v in &r.violations {
        text += &format!("  {}: {} fails at x={} y={}\n", v.algebra, v.text, v.x, v.y);
    }
    report(r.valid, text, json!({"chain": terms, "report": r}))
}
