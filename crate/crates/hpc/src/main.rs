//! Command line front end. Subcommands: decide regularity, print the
//! grammar with word counts, report growth indicators and generating
//! functions, enumerate the completion, or run the full cross-check bundle.
//!
//! Exit codes: 0 on success (both verdicts are data), 2 on input problems,
//! 3 when a cross-check fails. Conversion notes go to stderr; stdout is
//! deterministic for a fixed input.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use hpc::alphabet::{Alphabet, Word};
use hpc::bridges::{build_bridge_nfa, compute_bridges, extract_pair_languages, unique_paths_upto};
use hpc::decide::{decide, validate_witness, DecideOptions, OrientationFilter};
use hpc::grammar::{
    build_grammar, count_by_length, enumerate_grammar, enumerate_with_multiplicity, export_text,
};
use hpc::growth::{growth_report, max_growth, GrowthReport, DETERMINIZE_CAP};
use hpc::instance::{parse_instance, ParsedInstance};
use hpc::oracle::oracle_hairpin_set;
use hpc::series::{generating_function_dfa, grammar_generating_function, RationalSeries};
use hpc::HairpinInstance;

#[derive(Parser)]
#[command(name = "hpc", version, about = "Hairpin completion analyzer", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Both,
    Forward,
    Mirrored,
}

impl From<OrientationArg> for OrientationFilter {
    fn from(o: OrientationArg) -> OrientationFilter {
        match o {
            OrientationArg::Both => OrientationFilter::Both,
            OrientationArg::Forward => OrientationFilter::Forward,
            OrientationArg::Mirrored => OrientationFilter::Mirrored,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the completion is regular; print the verdict as JSON
    Decide {
        /// Instance file (JSON)
        instance: PathBuf,
        /// Override the primer length from the file
        #[arg(long)]
        kappa: Option<usize>,
        /// Recompute tests by literal scans instead of precomputed tables
        #[arg(long)]
        no_fast_path: bool,
        /// Which input orientations to try
        #[arg(long, value_enum, default_value_t = OrientationArg::Both)]
        orientation: OrientationArg,
    },
    /// Print the linear grammar and its word counts by length
    Grammar {
        instance: PathBuf,
        #[arg(long)]
        kappa: Option<usize>,
        /// Count words up to this length
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Print growth indicators and generating functions as JSON
    Growth {
        instance: PathBuf,
        #[arg(long)]
        kappa: Option<usize>,
        /// Numeric tolerance for the growth comparisons
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// List every completion word up to a length, one per line
    Enumerate {
        instance: PathBuf,
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Run the full cross-check bundle; exit 3 if any check fails
    Check {
        instance: PathBuf,
        #[arg(long)]
        kappa: Option<usize>,
        /// Length bound for the enumeration-based checks
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long)]
        no_fast_path: bool,
        #[arg(long, value_enum, default_value_t = OrientationArg::Both)]
        orientation: OrientationArg,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &PathBuf, kappa: Option<usize>) -> Result<HairpinInstance, String> {
    let ParsedInstance { mut instance, notes } =
        parse_instance(path).map_err(|e| e.to_string())?;
    for note in &notes {
        eprintln!("note: {note}");
    }
    if let Some(k) = kappa {
        if k < 1 {
            return Err("kappa must be at least 1, got 0".to_string());
        }
        instance.kappa = k;
    }
    Ok(instance)
}

fn show(al: &Alphabet, w: &[u8]) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        al.render(w)
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report to JSON")
}

/// Write a finished document to stdout; a closed pipe is not an error.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if out.write_all(s.as_bytes()).is_err() || out.flush().is_err() {
        std::process::exit(0);
    }
}

#[derive(Serialize)]
struct SeriesBlock {
    hairpin: Option<RationalSeries>,
    l1: Option<RationalSeries>,
    ov_l2: Option<RationalSeries>,
}

#[derive(Serialize)]
struct GrowthDocument {
    #[serde(flatten)]
    report: GrowthReport,
    series: SeriesBlock,
}

fn series_or_note(r: Result<RationalSeries, String>, what: &str) -> Option<RationalSeries> {
    match r {
        Ok(s) => Some(s),
        Err(e) => {
            eprintln!("note: {what} series unavailable: {e}");
            None
        }
    }
}

#[derive(Serialize)]
struct CheckBundle {
    oracle_grammar_ok: bool,
    decomposition_ok: bool,
    unambiguity_ok: bool,
    unique_path_ok: bool,
    witness_ok: bool,
    fast_direct_ok: bool,
    growth_bounds_ok: bool,
    growth_identity_ok: bool,
    regular_equality_ok: Option<bool>,
    series_ok: bool,
    composed_series_ok: bool,
    window_disagreement: bool,
    max_len: usize,
}

impl CheckBundle {
    fn all_ok(&self) -> bool {
        self.oracle_grammar_ok
            && self.decomposition_ok
            && self.unambiguity_ok
            && self.unique_path_ok
            && self.witness_ok
            && self.fast_direct_ok
            && self.growth_bounds_ok
            && self.growth_identity_ok
            && self.regular_equality_ok != Some(false)
            && self.series_ok
            && self.composed_series_ok
            && !self.window_disagreement
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Decide { instance, kappa, no_fast_path, orientation } => {
            let inst = load(&instance, kappa)?;
            let opts =
                DecideOptions { fast_path: !no_fast_path, orientation: orientation.into() };
            let d = decide(&inst, &opts);
            emit(&format!("{}\n", pretty(&d.to_report(&inst.alphabet))));
            Ok(0)
        }
        Cmd::Grammar { instance, kappa, max_len } => {
            let inst = load(&instance, kappa)?;
            let g = build_grammar(&inst).map_err(|e| e.to_string())?;
            let mut out = export_text(&g, &inst.alphabet);
            out.push_str("\ncounts by length:\n");
            for (m, c) in count_by_length(&g, max_len).iter().enumerate() {
                out.push_str(&format!("{m}: {c}\n"));
            }
            emit(&out);
            Ok(0)
        }
        Cmd::Growth { instance, kappa, tolerance } => {
            let inst = load(&instance, kappa)?;
            let d = decide(&inst, &DecideOptions::default());
            let report = growth_report(&inst, &d, tolerance).map_err(|e| e.to_string())?;
            let series = SeriesBlock {
                hairpin: series_or_note(
                    build_grammar(&inst).map_err(|e| e.to_string()).and_then(|g| {
                        grammar_generating_function(&g).map_err(|e| e.to_string())
                    }),
                    "completion",
                ),
                l1: series_or_note(
                    generating_function_dfa(&inst.dfa1).map_err(|e| e.to_string()),
                    "first language",
                ),
                ov_l2: series_or_note(
                    generating_function_dfa(&inst.dfa2).map_err(|e| e.to_string()),
                    "second language",
                ),
            };
            emit(&format!("{}\n", pretty(&GrowthDocument { report, series })));
            Ok(0)
        }
        Cmd::Enumerate { instance, kappa, max_len } => {
            let inst = load(&instance, kappa)?;
            let words = oracle_hairpin_set(&inst, max_len).map_err(|e| e.to_string())?;
            let mut out = String::new();
            for w in &words {
                out.push_str(&show(&inst.alphabet, w));
                out.push('\n');
            }
            emit(&out);
            Ok(0)
        }
        Cmd::Check { instance, kappa, max_len, tolerance, no_fast_path, orientation } => {
            let inst = load(&instance, kappa)?;
            let opts =
                DecideOptions { fast_path: !no_fast_path, orientation: orientation.into() };
            let bundle = run_checks(&inst, &opts, max_len, tolerance)?;
            emit(&format!("{}\n", pretty(&bundle)));
            Ok(if bundle.all_ok() { 0 } else { 3 })
        }
    }
}

fn run_checks(
    inst: &HairpinInstance,
    opts: &DecideOptions,
    max_len: usize,
    tolerance: f64,
) -> Result<CheckBundle, String> {
    let al = &inst.alphabet;
    let d = decide(inst, opts);
    let witness_ok = validate_witness(&d, inst);

    let fast = decide(inst, &DecideOptions { fast_path: true, orientation: opts.orientation });
    let direct = decide(inst, &DecideOptions { fast_path: false, orientation: opts.orientation });
    let fast_direct_ok = pretty(&fast.to_report(al)) == pretty(&direct.to_report(al));

    let oracle: BTreeSet<Word> =
        oracle_hairpin_set(inst, max_len).map_err(|e| e.to_string())?.into_iter().collect();

    let g = build_grammar(inst).map_err(|e| e.to_string())?;
    let from_grammar: BTreeSet<Word> =
        enumerate_grammar(&g, max_len).map_err(|e| e.to_string())?.into_iter().collect();
    let oracle_grammar_ok = from_grammar == oracle;

    let unambiguity_ok =
        enumerate_with_multiplicity(&g, max_len.min(7)).values().all(|&m| m == 1);

    let tables = compute_bridges(&inst.dfa1, &inst.dfa2, al);
    let a = build_bridge_nfa(inst, &tables);
    let unique_path_ok = unique_paths_upto(&a, max_len.min(6));

    // The completion must be exactly the disjoint union over initial-final
    // pairs of the composed sets { v beta ov(v) }.
    let pairs = extract_pair_languages(&a, &tables);
    let mut union: BTreeSet<Word> = BTreeSet::new();
    let mut decomposition_ok = true;
    for pl in &pairs {
        for v in pl.r_mu.enumerate_language(max_len / 2) {
            for beta in pl.b_mu.enumerate_language(max_len - 2 * v.len()) {
                let mut w = v.clone();
                w.extend_from_slice(&beta);
                w.extend(al.bar_word(&v));
                if !union.insert(w) {
                    decomposition_ok = false;
                }
            }
        }
    }
    decomposition_ok &= union == oracle;

    let report = growth_report(inst, &d, tolerance).map_err(|e| e.to_string())?;
    let growth_bounds_ok = report.bounds_ok;
    let joined = max_growth(report.sigma, report.rho);
    let growth_identity_ok = joined.class == report.lambda.class
        && (joined.indicator - report.lambda.indicator).abs() <= tolerance;
    let regular_equality_ok = report.regular_equality_ok;

    let series_ok = series_matches_counts(inst, &g);
    let composed_series_ok = composed_counts_match(&a, &tables, &g);

    Ok(CheckBundle {
        oracle_grammar_ok,
        decomposition_ok,
        unambiguity_ok,
        unique_path_ok,
        witness_ok,
        fast_direct_ok,
        growth_bounds_ok,
        growth_identity_ok,
        regular_equality_ok,
        series_ok,
        composed_series_ok,
        window_disagreement: d.stats.window_disagreement,
        max_len,
    })
}

fn signed(counts: &[BigUint]) -> Vec<BigInt> {
    counts.iter().cloned().map(BigInt::from).collect()
}

/// Generating-function coefficients must reproduce dynamic-programming word
/// counts, for the grammar and for both input automata.
fn series_matches_counts(inst: &HairpinInstance, g: &hpc::grammar::LinearGrammar) -> bool {
    const LEN: usize = 20;
    let mut ok = true;
    match grammar_generating_function(g) {
        Ok(s) => ok &= s.coefficients(LEN) == signed(&count_by_length(g, LEN)),
        Err(e) => eprintln!("note: completion series check skipped: {e}"),
    }
    for (name, d) in [("first", &inst.dfa1), ("second", &inst.dfa2)] {
        match generating_function_dfa(d) {
            Ok(s) => ok &= s.coefficients(LEN) == signed(&d.count_words_by_length(LEN)),
            Err(e) => eprintln!("note: {name} language series check skipped: {e}"),
        }
    }
    ok
}

/// Word counts of the completion must equal the convolution of path counts
/// of each pair's prefix language with word counts of its bridge language,
/// with the prefix contributing twice its length.
fn composed_counts_match(
    a: &hpc::bridges::BridgeNfa,
    tables: &hpc::bridges::BridgeTables,
    g: &hpc::grammar::LinearGrammar,
) -> bool {
    const LEN: usize = 16;
    let mut composed = vec![BigUint::default(); LEN + 1];
    for pl in extract_pair_languages(a, tables) {
        let r_cnt = pl.r_mu.count_paths_by_length(LEN / 2);
        let b_dfa = match pl.b_mu.determinize_capped(DETERMINIZE_CAP) {
            Some(d) => d,
            None => {
                eprintln!("note: composed series check skipped: bridge language too large");
                return true;
            }
        };
        let b_cnt = b_dfa.count_words_by_length(LEN);
        for (i, rc) in r_cnt.iter().enumerate() {
            for m in 2 * i..=LEN {
                composed[m] += rc * &b_cnt[m - 2 * i];
            }
        }
    }
    composed == count_by_length(g, LEN)
}
