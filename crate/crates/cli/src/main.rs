use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recon_core::analysis::{read_coverage_with, CoverageMethod};
use recon_core::codebooks::{count_r_dp, count_r_enumerate, default_period, CodebookSpec};
use recon_core::decoder::candidate_list;
use recon_core::sim::{seed_from_env, SimReport, SimSettings};
use recon_core::{
    decode, hamming_distance, intersection_size, levenshtein_radius, optimal_code_size,
    predicted_intersection, run_simulation, type_a_confusable, type_b_confusable,
    verify_reconstruction, BallKind, Codebook, DecodeOutcome, Error, Family, Verification, Word,
};

/// Sequence-reconstruction codes for single-edit channels.
#[derive(Parser)]
#[command(name = "recon", version, about)]
struct Cli {
    /// Worker threads for parallel scans and simulations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Confusability verdicts and ball intersections for a pair of words.
    ///
    /// Example: recon inspect --x q2:0111 --y q2:1110
    Inspect {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Alphabet size for words given as bare digits.
        #[arg(long)]
        q: Option<u8>,
    },
    /// List the codewords of a codebook.
    ///
    /// Example: recon enumerate --family CD --n 8 --q 2 --P 4 --c 0 --d 0
    Enumerate {
        #[command(flatten)]
        code: CodeArgs,
        /// Print at most this many codewords.
        #[arg(long, default_value_t = 50)]
        limit: usize,
        /// Write all codewords to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Count words whose low-period runs are at most t long.
    ///
    /// Example: recon count-r --n 12 --q 4 --ell 2 --t 4
    CountR {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u8,
        /// Largest period constrained (1 or 2).
        #[arg(long)]
        ell: usize,
        /// Longest allowed run.
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value_t = CountMethod::Auto)]
        method: CountMethod,
    },
    /// Largest ball intersection over pairs of codewords.
    ///
    /// Example: recon coverage --family FULL --n 6 --q 2 --ball EDIT
    Coverage {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        ball: BallKind,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check that no two codewords share N or more reads (exit 1 if they do).
    ///
    /// Example: recon verify --family CD --n 8 --q 2 --P 4 --c 0 --d 0 --N 2 --ball D
    Verify {
        #[command(flatten)]
        code: CodeArgs,
        /// Number of distinct reads.
        #[arg(long = "N")]
        n_reads: usize,
        #[arg(long)]
        ball: BallKind,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exact largest code for N reads over the whole space (q^n <= 16384).
    ///
    /// Example: recon optimal --n 6 --q 2 --N 1 --ball D
    Optimal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u8,
        #[arg(long = "N")]
        n_reads: usize,
        #[arg(long)]
        ball: BallKind,
        /// Also print one optimal code.
        #[arg(long)]
        show_code: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Decode a set of reads.
    ///
    /// Example: recon decode --family C2 --n 8 --q 2 q2:0000000 q2:00000000 q2:000000001
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        /// Reads, as q<q>:<digits> or bare digits.
        #[arg(required = true)]
        reads: Vec<String>,
    },
    /// Monte Carlo estimate of the decoder failure rate.
    ///
    /// Example: recon simulate --family FULL,C0,C2,CEDIT --n 152 --q 4 --n-sys 10 --p-d 1.5e-3 --trials 20000 --csv out.csv
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// FULL, C0, C1, C2, CD, CSD or CEDIT.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u8,
    /// Run bound for CD, CSD and CEDIT (default from n and q).
    #[arg(long = "P")]
    period: Option<usize>,
    /// Inversion residue.
    #[arg(long, default_value_t = 0)]
    c: u64,
    /// Symbol-sum residue.
    #[arg(long, default_value_t = 0)]
    d: u32,
}

impl CodeArgs {
    fn codebook(&self) -> Result<Codebook, Error> {
        let spec = match (self.family.uses_syndromes(), self.period) {
            (true, p) => {
                let p = p.or_else(|| default_period(self.family, self.n, self.q)).unwrap_or(1);
                CodebookSpec::with_syndrome(self.family, self.n, self.q, p, self.c, self.d)
            }
            (false, _) => CodebookSpec::new(self.family, self.n, self.q),
        };
        Codebook::new(spec)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat `key = value` settings file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated families.
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<Family>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<u8>,
    #[arg(long = "P")]
    period: Option<usize>,
    #[arg(long)]
    c: Option<u64>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    n_sys: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    p_d: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    p_i: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    p_s: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed (overrides RECON_SEED and the config file).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Pair,
    Neighborhood,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountMethod {
    Auto,
    Dp,
    Enumerate,
}

fn parse_word(s: &str, q: Option<u8>) -> Result<Word, Error> {
    if s.starts_with('q') {
        return s.parse();
    }
    let q = q.ok_or_else(|| Error::Parse(format!("`{s}` has no q prefix; pass --q")))?;
    format!("q{q}:{s}").parse()
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Error> {
    let file = File::create(path).map_err(io_error(path))?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_error(path))
}

fn spec_fields(cb: &Codebook) -> Vec<String> {
    let s = cb.spec();
    let syn = s.syndrome;
    vec![
        s.family.to_string(),
        s.n.to_string(),
        s.q.to_string(),
        syn.map(|p| p.period.to_string()).unwrap_or_default(),
        syn.map(|p| p.c.to_string()).unwrap_or_default(),
        syn.map(|p| p.d.to_string()).unwrap_or_default(),
    ]
}

const SPEC_HEADER: [&str; 6] = ["family", "n", "q", "P", "c", "d"];

fn inspect(x: &str, y: &str, q: Option<u8>) -> Result<ExitCode, Error> {
    let (x, y) = (parse_word(x, q)?, parse_word(y, q)?);
    println!("x = {x}\ny = {y}");
    println!("Hamming distance: {}", hamming_distance(&x, &y)?);
    println!("Levenshtein radius: {}", levenshtein_radius(&x, &y)?);
    if x == y {
        println!("words are equal");
        return Ok(ExitCode::SUCCESS);
    }
    println!("Type-A check: {}", type_a_confusable(&x, &y)?);
    println!("Type-B check: {}", type_b_confusable(&x, &y)?);
    println!("{:<6} {:>10} {:>10}", "ball", "predicted", "exact");
    for kind in BallKind::SINGLE_EDIT_KINDS {
        let exact = intersection_size(&x, &y, kind)?;
        let predicted = match predicted_intersection(&x, &y, kind) {
            Ok(v) => v.to_string(),
            Err(_) => "-".into(),
        };
        println!("{:<6} {predicted:>10} {exact:>10}", kind.to_string());
    }
    Ok(ExitCode::SUCCESS)
}

fn enumerate(code: &CodeArgs, limit: usize, csv: Option<&Path>) -> Result<ExitCode, Error> {
    let cb = code.codebook()?;
    let words = cb.enumerate()?;
    println!("{}", cb.spec());
    println!("size: {}", words.len());
    match cb.redundancy() {
        Ok(r) => println!("redundancy: {r:.4}"),
        Err(e) => println!("redundancy: {e}"),
    }
    for w in words.iter().take(limit) {
        println!("{w}");
    }
    if words.len() > limit {
        println!("... {} more", words.len() - limit);
    }
    if let Some(path) = csv {
        let rows: Vec<Vec<String>> = words.iter().map(|w| vec![w.to_string()]).collect();
        write_rows(path, &["word"], &rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn count_r(n: usize, q: u8, ell: usize, t: usize, method: CountMethod) -> Result<ExitCode, Error> {
    let count = match method {
        CountMethod::Auto => recon_core::codebooks::count_r(n, q, ell, t)?,
        CountMethod::Dp => count_r_dp(n, q, ell, t)?,
        CountMethod::Enumerate => count_r_enumerate(n, q, ell, t)?,
    };
    let fraction = count as f64 / (q as f64).powi(n as i32);
    println!("|R_{q}({n}, {ell}, {t})| = {count} ({fraction:.6} of all words)");
    Ok(ExitCode::SUCCESS)
}

fn coverage(code: &CodeArgs, kind: BallKind, method: Method, csv: Option<&Path>) -> Result<ExitCode, Error> {
    let cb = code.codebook()?;
    let method = match method {
        Method::Auto => CoverageMethod::Auto,
        Method::Pair => CoverageMethod::PairScan,
        Method::Neighborhood => CoverageMethod::Neighborhood,
    };
    let report = read_coverage_with(&cb, kind, method)?;
    println!("{} ball {kind}", cb.spec());
    println!("codewords: {}", report.codebook_size);
    println!("pairs: {}", report.pairs_scanned);
    println!("ν = {}", report.nu);
    if let Some((x, y)) = &report.witness {
        println!("witness: {x} {y}");
    }
    if let Some(path) = csv {
        let (wx, wy) = report
            .witness
            .as_ref()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .unwrap_or_default();
        let mut row = spec_fields(&cb);
        row.extend([kind.to_string(), report.nu.to_string(), wx, wy]);
        let mut header = SPEC_HEADER.to_vec();
        header.extend(["ball", "nu", "witness_x", "witness_y"]);
        write_rows(path, &header, &[row])?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(code: &CodeArgs, n_reads: usize, kind: BallKind, csv: Option<&Path>) -> Result<ExitCode, Error> {
    let cb = code.codebook()?;
    let result = verify_reconstruction(&cb, n_reads, kind)?;
    println!("{} N={n_reads} ball {kind}", cb.spec());
    println!("{result}");
    if let Some(path) = csv {
        let (status, size, wx, wy) = match &result {
            Verification::Pass { nu } => ("PASS", *nu, String::new(), String::new()),
            Verification::Fail { x, y, intersection } => ("FAIL", *intersection, x.to_string(), y.to_string()),
        };
        let mut row = spec_fields(&cb);
        row.extend([n_reads.to_string(), kind.to_string(), status.into(), size.to_string(), wx, wy]);
        let mut header = SPEC_HEADER.to_vec();
        header.extend(["N", "ball", "result", "intersection", "witness_x", "witness_y"]);
        write_rows(path, &header, &[row])?;
    }
    Ok(if result.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn optimal(n: usize, q: u8, n_reads: usize, kind: BallKind, show: bool, csv: Option<&Path>) -> Result<ExitCode, Error> {
    let r = optimal_code_size(n, q, n_reads, kind)?;
    println!("n={n} q={q} N={n_reads} ball {kind}");
    println!("max code size: {}", r.max_code_size);
    println!("rho: {:.6}", r.rho_exact);
    if show {
        for w in &r.witness {
            println!("{w}");
        }
    }
    if let Some(path) = csv {
        let row = vec![
            n.to_string(),
            q.to_string(),
            n_reads.to_string(),
            kind.to_string(),
            r.max_code_size.to_string(),
            format!("{:.6}", r.rho_exact),
        ];
        write_rows(path, &["n", "q", "N", "ball", "max_code_size", "rho"], &[row])?;
    }
    Ok(ExitCode::SUCCESS)
}

fn decode_reads(code: &CodeArgs, reads: &[String]) -> Result<ExitCode, Error> {
    let cb = code.codebook()?;
    let reads: Vec<Word> = reads
        .iter()
        .map(|r| parse_word(r, Some(cb.q())))
        .collect::<Result<_, _>>()?;
    for y in &reads {
        let list = candidate_list(y, &cb);
        let shown: Vec<String> = list.iter().map(Word::to_string).collect();
        println!("{y}: {} candidate(s) [{}]", list.len(), shown.join(" "));
    }
    let result = decode(&reads, &cb);
    match &result.outcome {
        DecodeOutcome::Decoded(w) => println!("decoded: {w} ({} votes)", result.winning_votes),
        DecodeOutcome::Fail if result.tie => {
            println!("fail: tie at {} votes", result.winning_votes)
        }
        DecodeOutcome::Fail => println!("fail: no candidates"),
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: &SimulateArgs) -> Result<ExitCode, Error> {
    let file = match &args.config {
        Some(path) => SimSettings::from_file(path)?,
        None => SimSettings::default(),
    };
    let env = SimSettings {
        seed: seed_from_env()?,
        ..Default::default()
    };
    let flags = SimSettings {
        families: args.family.clone(),
        n: args.n,
        q: args.q,
        period: args.period,
        c: args.c,
        d: args.d,
        n_sys: args.n_sys.clone(),
        p_d: args.p_d.clone(),
        p_i: args.p_i.clone(),
        p_s: args.p_s.clone(),
        trials: args.trials,
        seed: args.seed,
    };
    let config = file.overridden_by(env).overridden_by(flags).into_config()?;
    let report = run_simulation(&config)?;
    print_report(&report);
    if let Some(path) = &args.csv {
        report.write_csv(path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn print_report(report: &SimReport) {
    println!(
        "{:<6} {:>5} {:>9} {:>9} {:>9} {:>8} {:>9} {:>11} {:>23}",
        "family", "n_sys", "p_d", "p_i", "p_s", "trials", "failures", "rate", "95% CI"
    );
    for r in &report.rows {
        println!(
            "{:<6} {:>5} {:>9.2e} {:>9.2e} {:>9.2e} {:>8} {:>9} {:>11.4e} [{:.3e}, {:.3e}]",
            r.family.to_string(),
            r.n_sys,
            r.p_d,
            r.p_i,
            r.p_s,
            r.trials,
            r.failures,
            r.failure_rate,
            r.ci_low,
            r.ci_high
        );
    }
    if let Some(r) = report.rows.first() {
        println!("seed: {}", r.seed);
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads {threads}: {e}")))?;
    }
    match &cli.command {
        Command::Inspect { x, y, q } => inspect(x, y, *q),
        Command::Enumerate { code, limit, csv } => enumerate(code, *limit, csv.as_deref()),
        Command::CountR { n, q, ell, t, method } => count_r(*n, *q, *ell, *t, *method),
        Command::Coverage { code, ball, method, csv } => coverage(code, *ball, *method, csv.as_deref()),
        Command::Verify { code, n_reads, ball, csv } => verify(code, *n_reads, *ball, csv.as_deref()),
        Command::Optimal { n, q, n_reads, ball, show_code, csv } => {
            optimal(*n, *q, *n_reads, *ball, *show_code, csv.as_deref())
        }
        Command::Decode { code, reads } => decode_reads(code, reads),
        Command::Simulate(args) => simulate(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
