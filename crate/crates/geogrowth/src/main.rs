//! Command-line driver: census tables, growth classification, hull
//! witnesses, generating-set construction, N-sweeps and geodesic automata.
//!
//! Exit codes: 0 success/verified, 1 verification failed, 2 invalid input,
//! 3 resource cap exceeded. Set `GEOGROWTH_ELEMENT_CAP` to override the
//! default ball-size limit.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use geogrowth::automaton::{infer_with_escalation, validate, AutomatonError};
use geogrowth::document::{DocumentError, GroupDocument};
use geogrowth::engine::{bfs_census, Census, CensusOptions, EngineError, DEFAULT_ELEMENT_CAP};
use geogrowth::genset::{g2_short_set, main_theorem_genset, GenSet, GenSetError};
use geogrowth::group::{
    builtin, builtin_va, Group, GroupElement, GroupError, HeisenbergGroup, VirtuallyAbelianGroup,
};
use geogrowth::growth::{classify, ClassifyParams, GrowthError, GrowthSequence};
use geogrowth::hull::{containment_g2, containment_z2, exponential_witness_g2, exponential_witness_z2, HullError};

#[derive(Parser)]
#[command(name = "geogrowth", about = "Exact geodesic growth of virtually abelian groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the ball and print per-length geodesic counts.
    Census {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genset: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated letter labels whose occurrence counts are tracked.
        #[arg(long)]
        track_letters: Option<String>,
        /// Write the table as CSV to this path.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Classify the cumulative geodesic growth sequence.
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genset: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Run the convex-hull exponential witness and containment checks.
    Witness {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genset: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        containment_radius: usize,
    },
    /// Construct a generating set and print it as a document fragment.
    BuildGenset {
        #[arg(long)]
        group: String,
        /// One of: main-theorem, double, substitute, g2-short.
        #[arg(long)]
        kind: String,
        /// Dominating lattice element for main-theorem, e.g. "1,0".
        #[arg(long)]
        x: Option<String>,
        /// Power N for main-theorem.
        #[arg(long)]
        power: Option<u32>,
        /// Seed lattice vectors for main-theorem, e.g. "1,0;0,1" (default {x}).
        #[arg(long)]
        s0: Option<String>,
        /// Base generating set for double/substitute/g2-short.
        #[arg(long)]
        base: Option<String>,
        /// Comma-separated words over the base labels for substitute.
        #[arg(long)]
        words: Option<String>,
    },
    /// Classify main-theorem generating sets over a range of powers N.
    SweepN {
        #[arg(long)]
        group: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        s0: Option<String>,
        /// Inclusive range of powers, e.g. "1..8".
        #[arg(long)]
        n_range: String,
        /// Census radius per power.
        #[arg(long, default_value_t = 30)]
        n: usize,
    },
    /// Infer a geodesic automaton and validate it against the engine.
    Automaton {
        #[arg(long)]
        group: String,
        #[arg(long)]
        genset: String,
        /// Maximum lookahead; smaller values are tried first.
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 12)]
        n_train: usize,
        #[arg(long, default_value_t = 30)]
        n_validate: usize,
        /// Write `<prefix>.dfa.txt` and `<prefix>.counts.csv`.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// Failure plumbing
// ---------------------------------------------------------------------------

struct Failure {
    code: i32,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn verification(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::ElementCap { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        input(e.to_string())
    }
}

impl From<GenSetError> for Failure {
    fn from(e: GenSetError) -> Self {
        input(e.to_string())
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        input(e.to_string())
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Self {
        input(e.to_string())
    }
}

impl From<HullError> for Failure {
    fn from(e: HullError) -> Self {
        input(e.to_string())
    }
}

impl From<AutomatonError> for Failure {
    fn from(e: AutomatonError) -> Self {
        match e {
            AutomatonError::Engine(inner) => inner.into(),
            other => input(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Group and generating-set loading
// ---------------------------------------------------------------------------

enum LoadedGroup {
    Va { group: VirtuallyAbelianGroup, doc: Option<GroupDocument> },
    Heisenberg(HeisenbergGroup),
}

fn load_group(spec: &str) -> Result<LoadedGroup, Failure> {
    if spec == "Heisenberg" {
        return Ok(LoadedGroup::Heisenberg(builtin::heisenberg()));
    }
    if let Some(g) = builtin_va(spec) {
        return Ok(LoadedGroup::Va { group: g, doc: None });
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(input(format!(
            "unknown group {spec:?}: not a built-in (Z, Z2, ZxC2, G1, G2, Dinf, Heisenberg) and no such file"
        )));
    }
    let doc = GroupDocument::from_path(path)?;
    let group = doc.build_group()?;
    Ok(LoadedGroup::Va { group, doc: Some(doc) })
}

fn builtin_va_genset(
    group: &VirtuallyAbelianGroup,
    name: &str,
) -> Result<Option<GenSet<VirtuallyAbelianGroup>>, Failure> {
    let t1 = |v: Vec<i64>| GroupElement::translation(v);
    let flip = |v: Vec<i64>| GroupElement::new(v, 1);
    // keyed on the group's shape rather than its display name so document
    // groups matching a built-in also get the shortcuts
    let base: Option<Vec<(String, GroupElement)>> = match (group.rank, group.finite.order, name) {
        (1, 1, "t") => Some(vec![("t".into(), t1(vec![1]))]),
        (1, 1, "doubled") => Some(vec![("t".into(), t1(vec![1]))]),
        (2, 1, "std") => Some(vec![("a".into(), t1(vec![1, 0])), ("b".into(), t1(vec![0, 1]))]),
        (2, 1, "hex") => Some(vec![
            ("a".into(), t1(vec![1, 0])),
            ("b".into(), t1(vec![0, 1])),
            ("c".into(), t1(vec![1, 1])),
        ]),
        (1, 2, "ta") => Some(vec![("t".into(), t1(vec![1])), ("a".into(), flip(vec![0]))]),
        (1, 2, "tc") => Some(vec![("t".into(), t1(vec![1])), ("c".into(), flip(vec![1]))]),
        (1, 2, "ts") => Some(vec![("t".into(), t1(vec![1])), ("s".into(), flip(vec![0]))]),
        (2, 2, "at") => Some(vec![("a".into(), t1(vec![1, 0])), ("t".into(), flip(vec![0, 0]))]),
        (2, 2, "abt") => Some(vec![
            ("a".into(), t1(vec![1, 0])),
            ("b".into(), t1(vec![0, 1])),
            ("t".into(), flip(vec![0, 0])),
        ]),
        _ => None,
    };
    let Some(base) = base else { return Ok(None) };
    let mut set = GenSet::symmetric_closure(group, base)?;
    if name == "doubled" {
        set = set.double();
    }
    Ok(Some(set))
}

fn load_va_genset(
    group: &VirtuallyAbelianGroup,
    doc: &Option<GroupDocument>,
    name: &str,
) -> Result<GenSet<VirtuallyAbelianGroup>, Failure> {
    if let Some(doc) = doc {
        if doc.gensets.contains_key(name) {
            return Ok(doc.build_genset(group, name)?);
        }
    }
    if let Some(set) = builtin_va_genset(group, name)? {
        return Ok(set);
    }
    Err(input(format!("unknown generating set {name:?} for this group")))
}

fn load_heisenberg_genset(
    group: &HeisenbergGroup,
    name: &str,
) -> Result<GenSet<HeisenbergGroup>, Failure> {
    match name {
        "xy" => Ok(GenSet::symmetric_closure(
            group,
            vec![("x".into(), [1, 0, 0]), ("y".into(), [0, 1, 0])],
        )?),
        _ => Err(input(format!("unknown generating set {name:?} for Heisenberg (try \"xy\")"))),
    }
}

fn census_options() -> CensusOptions {
    let mut opts = CensusOptions::default();
    if let Ok(v) = std::env::var("GEOGROWTH_ELEMENT_CAP") {
        match v.parse::<usize>() {
            Ok(cap) if cap > 0 => opts.element_cap = cap,
            _ => opts.element_cap = DEFAULT_ELEMENT_CAP,
        }
    }
    opts
}

fn parse_vector(s: &str, rank: usize) -> Result<Vec<i64>, Failure> {
    let v: Result<Vec<i64>, _> = s.split(',').map(|p| p.trim().parse::<i64>()).collect();
    let v = v.map_err(|e| input(format!("bad vector {s:?}: {e}")))?;
    if v.len() != rank {
        return Err(input(format!("vector {s:?} has {} entries, rank is {rank}", v.len())));
    }
    Ok(v)
}

fn parse_seed(s0: &Option<String>, x: &[i64], rank: usize) -> Result<Vec<GroupElement>, Failure> {
    match s0 {
        None => Ok(vec![GroupElement::translation(x.to_vec())]),
        Some(s) => s
            .split(';')
            .map(|part| Ok(GroupElement::translation(parse_vector(part, rank)?)))
            .collect(),
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), Failure> {
    let parts: Vec<&str> = s.split("..").collect();
    if parts.len() != 2 {
        return Err(input(format!("bad range {s:?}, expected \"a..b\"")));
    }
    let a: u32 = parts[0].trim().parse().map_err(|_| input(format!("bad range {s:?}")))?;
    let b: u32 = parts[1].trim().parse().map_err(|_| input(format!("bad range {s:?}")))?;
    if a > b {
        return Err(input(format!("empty range {s:?}")));
    }
    Ok((a, b))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn run_census<G: Group>(
    group: &G,
    genset: &GenSet<G>,
    n: usize,
    track_letters: &Option<String>,
    export: &Option<PathBuf>,
) -> Result<i32, Failure> {
    let mut opts = census_options();
    if let Some(spec) = track_letters {
        let mut tracked = BTreeSet::new();
        for label in spec.split(',') {
            let label = label.trim();
            let idx = genset
                .index_of(label)
                .ok_or_else(|| input(format!("unknown letter label {label:?}")))?;
            tracked.insert(idx);
        }
        opts.tracked = Some(tracked);
    }
    let census = bfs_census(group, genset, n, &opts)?;
    print_census_table(&census, opts.tracked.is_some());
    if let Some(path) = export {
        std::fs::write(path, census.to_csv())
            .map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn print_census_table<G: Group>(census: &Census<G>, tracked: bool) {
    let gamma = census.big_gamma();
    let mut cum_gamma: u64 = 0;
    if tracked {
        println!("length  sphere_size  sphere_geodesics  cumulative_gamma  cumulative_Gamma  tracked_max");
    } else {
        println!("length  sphere_size  sphere_geodesics  cumulative_gamma  cumulative_Gamma");
    }
    for (l, stats) in census.per_len.iter().enumerate() {
        cum_gamma += stats.sphere_size;
        if tracked {
            println!(
                "{:<6}  {:<11}  {:<16}  {:<16}  {:<16}  {}",
                l, stats.sphere_size, stats.sphere_geodesics, cum_gamma, gamma[l], stats.tracked_max
            );
        } else {
            println!(
                "{:<6}  {:<11}  {:<16}  {:<16}  {}",
                l, stats.sphere_size, stats.sphere_geodesics, cum_gamma, gamma[l]
            );
        }
    }
}

fn run_classify<G: Group>(
    group: &G,
    genset: &GenSet<G>,
    n: usize,
    delta: f64,
) -> Result<i32, Failure> {
    let census = bfs_census(group, genset, n, &census_options())?;
    let seq = GrowthSequence::cumulative_from_biguint(&census.big_gamma());
    let params = ClassifyParams { delta, ..ClassifyParams::default() };
    let result = classify(&seq, &params)?;
    println!("{}", result.render());
    Ok(0)
}

fn run_witness(
    group: &VirtuallyAbelianGroup,
    genset: &GenSet<VirtuallyAbelianGroup>,
    n: usize,
    containment_radius: usize,
) -> Result<i32, Failure> {
    let opts = census_options();
    let flip = group.finite.order > 1;
    let report = if flip {
        exponential_witness_g2(group, genset, n, &opts)?
    } else {
        exponential_witness_z2(group, genset, n, &opts)?
    };
    println!("{}", report.render());
    let census = bfs_census(group, genset, containment_radius, &opts)?;
    let contained = if flip {
        containment_g2(group, genset, &census)?
    } else {
        containment_z2(group, genset, &census)?
    };
    println!(
        "containment to radius {containment_radius}: {}",
        if contained { "pass" } else { "FAIL" }
    );
    if report.pass && contained {
        Ok(0)
    } else {
        Err(verification("witness or containment check failed"))
    }
}

fn print_genset_fragment(name: &str, genset: &GenSet<VirtuallyAbelianGroup>) {
    println!("[gensets]");
    println!("{name} = [");
    for l in &genset.letters {
        let coords: Vec<String> = l.elem.v.iter().map(|c| c.to_string()).collect();
        let dom = if l.dominant { ", dominant = true" } else { "" };
        println!(
            "    {{ label = \"{}\", v = [{}], f = {}{dom} }},",
            l.label,
            coords.join(", "),
            l.elem.f
        );
    }
    println!("]");
}

#[allow(clippy::too_many_arguments)]
fn run_build_genset(
    group: &VirtuallyAbelianGroup,
    doc: &Option<GroupDocument>,
    kind: &str,
    x: &Option<String>,
    power: &Option<u32>,
    s0: &Option<String>,
    base: &Option<String>,
    words: &Option<String>,
) -> Result<i32, Failure> {
    match kind {
        "main-theorem" => {
            let x = x.as_ref().ok_or_else(|| input("--x is required for main-theorem"))?;
            let n_power = power.ok_or_else(|| input("--power is required for main-theorem"))?;
            let xv = parse_vector(x, group.rank)?;
            let seed = parse_seed(s0, &xv, group.rank)?;
            let set =
                main_theorem_genset(group, &GroupElement::translation(xv), n_power, &seed)?;
            print_genset_fragment("main_theorem", &set);
        }
        "double" => {
            let base = base.as_ref().ok_or_else(|| input("--base is required for double"))?;
            let set = load_va_genset(group, doc, base)?.double();
            print_genset_fragment("doubled", &set);
        }
        "substitute" => {
            let base = base.as_ref().ok_or_else(|| input("--base is required for substitute"))?;
            let words = words.as_ref().ok_or_else(|| input("--words is required for substitute"))?;
            let base_set = load_va_genset(group, doc, base)?;
            let word_list: Vec<&str> = words.split(',').map(str::trim).collect();
            let set = GenSet::from_words(group, &base_set, &word_list)?;
            print_genset_fragment("substituted", &set);
        }
        "g2-short" => {
            let base = base.as_ref().ok_or_else(|| input("--base is required for g2-short"))?;
            let base_set = load_va_genset(group, doc, base)?;
            let shorts = g2_short_set(group, &base_set)?;
            println!("[short_set]");
            for s in &shorts {
                let coords: Vec<String> = s.elem.v.iter().map(|c| c.to_string()).collect();
                println!(
                    "v = [{}]  spelling = \"{}{}\"",
                    coords.join(", "),
                    s.spelling[0],
                    s.spelling[1]
                );
            }
        }
        other => {
            return Err(input(format!(
                "unknown kind {other:?} (expected main-theorem, double, substitute or g2-short)"
            )));
        }
    }
    Ok(0)
}

fn run_sweep_n(
    group: &VirtuallyAbelianGroup,
    x: &str,
    s0: &Option<String>,
    n_range: &str,
    radius: usize,
) -> Result<i32, Failure> {
    let (from, to) = parse_range(n_range)?;
    let xv = parse_vector(x, group.rank)?;
    let seed = parse_seed(s0, &xv, group.rank)?;
    let opts = census_options();
    println!("N       letters  verdict");
    for n_power in from..=to {
        let row = (|| -> Result<String, Failure> {
            let set = main_theorem_genset(
                group,
                &GroupElement::translation(xv.clone()),
                n_power,
                &seed,
            )?;
            let census = bfs_census(group, &set, radius, &opts)?;
            let seq = GrowthSequence::cumulative_from_biguint(&census.big_gamma());
            let result = classify(&seq, &ClassifyParams::default())?;
            Ok(format!("{:<7}  {}", set.len(), result.render()))
        })();
        match row {
            Ok(text) => println!("{n_power:<6}  {text}"),
            Err(f) => println!("{n_power:<6}  -        error: {}", f.message),
        }
    }
    Ok(0)
}

fn run_automaton<G: Group>(
    group: &G,
    genset: &GenSet<G>,
    k_max: usize,
    n_train: usize,
    n_validate: usize,
    export: &Option<PathBuf>,
) -> Result<i32, Failure> {
    let opts = census_options();
    let train = bfs_census(group, genset, n_train, &opts)?;
    let dfa = infer_with_escalation(group, &train, k_max)?;
    println!(
        "automaton: {} states, lookahead {}, training radius {}",
        dfa.num_states(),
        dfa.lookahead,
        dfa.training_radius
    );
    let check = bfs_census(group, genset, n_validate, &opts)?;
    let report = validate(&dfa, &check);
    match report.first_divergence {
        None => println!("validation to n={}: pass", report.checked_to),
        Some(l) => println!("validation to n={}: FAIL at length {l}", report.checked_to),
    }
    if let Some(prefix) = export {
        let dfa_path = prefix.with_extension("dfa.txt");
        let csv_path = prefix.with_extension("counts.csv");
        std::fs::write(&dfa_path, dfa.to_adjacency_text())
            .map_err(|e| input(format!("cannot write {}: {e}", dfa_path.display())))?;
        std::fs::write(&csv_path, dfa.counts_csv(n_validate))
            .map_err(|e| input(format!("cannot write {}: {e}", csv_path.display())))?;
        println!("wrote {} and {}", dfa_path.display(), csv_path.display());
    }
    if report.pass {
        Ok(0)
    } else {
        Err(verification("automaton counts diverge from the engine"))
    }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<i32, Failure> {
    match &cli.cmd {
        Cmd::Census { group, genset, n, track_letters, export } => match load_group(group)? {
            LoadedGroup::Va { group: g, doc } => {
                let x = load_va_genset(&g, &doc, genset)?;
                run_census(&g, &x, *n, track_letters, export)
            }
            LoadedGroup::Heisenberg(h) => {
                let x = load_heisenberg_genset(&h, genset)?;
                run_census(&h, &x, *n, track_letters, export)
            }
        },
        Cmd::Classify { group, genset, n, delta } => match load_group(group)? {
            LoadedGroup::Va { group: g, doc } => {
                let x = load_va_genset(&g, &doc, genset)?;
                run_classify(&g, &x, *n, *delta)
            }
            LoadedGroup::Heisenberg(h) => {
                let x = load_heisenberg_genset(&h, genset)?;
                run_classify(&h, &x, *n, *delta)
            }
        },
        Cmd::Witness { group, genset, n, containment_radius } => match load_group(group)? {
            LoadedGroup::Va { group: g, doc } => {
                let x = load_va_genset(&g, &doc, genset)?;
                run_witness(&g, &x, *n, *containment_radius)
            }
            LoadedGroup::Heisenberg(_) => {
                Err(input("witness requires a rank-2 virtually abelian group"))
            }
        },
        Cmd::BuildGenset { group, kind, x, power, s0, base, words } => match load_group(group)? {
            LoadedGroup::Va { group: g, doc } => {
                run_build_genset(&g, &doc, kind, x, power, s0, base, words)
            }
            LoadedGroup::Heisenberg(_) => {
                Err(input("build-genset requires a virtually abelian group"))
            }
        },
        Cmd::SweepN { group, x, s0, n_range, n } => match load_group(group)? {
            LoadedGroup::Va { group: g, .. } => run_sweep_n(&g, x, s0, n_range, *n),
            LoadedGroup::Heisenberg(_) => Err(input("sweep-n requires a virtually abelian group")),
        },
        Cmd::Automaton { group, genset, k, n_train, n_validate, export } => {
            match load_group(group)? {
                LoadedGroup::Va { group: g, doc } => {
                    let x = load_va_genset(&g, &doc, genset)?;
                    run_automaton(&g, &x, *k, *n_train, *n_validate, export)
                }
                LoadedGroup::Heisenberg(h) => {
                    let x = load_heisenberg_genset(&h, genset)?;
                    run_automaton(&h, &x, *k, *n_train, *n_validate, export)
                }
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}
