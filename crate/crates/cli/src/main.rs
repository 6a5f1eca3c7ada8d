use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qgo_core::analytics::{
    ais_trace, autocorrelation, complexity_report, enumerate_game_tree, max_ais_exponent, AcfForm, Variant,
};
use qgo_core::kifu::{self, render_board, replay};
use qgo_core::rules::{Bit, BoardConfig};
use qgo_core::selfplay::{run_selfplay, SelfPlayConfig};
use qgo_core::source::{
    extract_bits, format_bit_script, generate_timetags, parse_bit_script, read_tags, visibility, write_tags,
    BitSource, CoincidenceConfig, StateParams, TagFormat,
};

#[derive(Parser)]
#[command(name = "qgo", version, about = "Quantum Go tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play random bots against each other.
    Selfplay(SelfplayArgs),
    /// Verify a kifu and print the final board.
    Replay {
        kifu: PathBuf,
    },
    /// Lagged autocorrelation of a bit stream.
    AnalyzeBits(AnalyzeArgs),
    /// Simulate a time-tag file from the entangled-pair source.
    GenTags(GenTagsArgs),
    /// Extract collapse bits and visibility from a time-tag file.
    Extract(ExtractArgs),
    /// AIS trace of a kifu as CSV.
    Ais {
        kifu: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum AIS, information-set count and branching for an N x N board.
    Bounds {
        #[arg(long)]
        size: usize,
    },
    /// Count game-tree nodes by depth from the empty board.
    Tree {
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = TreeVariant::Both)]
        variant: TreeVariant,
    },
    /// Run the game service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_hh: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_vv: f64,
}

impl SourceArgs {
    fn params(&self) -> StateParams {
        StateParams {
            theta: self.theta,
            phi: self.phi,
            noise_hh: self.noise_hh,
            noise_vv: self.noise_vv,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct SelfplayArgs {
    #[arg(long, default_value_t = 10)]
    games: usize,
    #[arg(long, default_value_t = 19)]
    size: usize,
    #[arg(long, default_value_t = 0.0)]
    komi: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_moves: Option<u32>,
    /// Directory for games.csv, moves.csv, summary.txt and kifu/.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Text file of 0/1 characters.
    #[arg(long, conflicts_with = "tags")]
    input: Option<PathBuf>,
    /// Time-tag file to extract bits from.
    #[arg(long)]
    tags: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
    /// Bits to draw from the simulated source.
    #[arg(long, default_value_t = 200_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    maxlag: usize,
    /// Use separate segment means and variances.
    #[arg(long)]
    exact: bool,
    #[command(flatten)]
    coincidence: CoincidenceArgs,
    /// Correlogram CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoincidenceArgs {
    /// Coincidence window in nanoseconds.
    #[arg(long, default_value_t = 2)]
    window: i64,
    /// Per-channel delays in nanoseconds, `d1,d2,d3,d4`.
    #[arg(long, value_delimiter = ',', num_args = 4, default_value = "0,0,0,0")]
    delays: Vec<i64>,
}

impl CoincidenceArgs {
    fn config(&self) -> CoincidenceConfig {
        CoincidenceConfig {
            window: self.window,
            delays: [self.delays[0], self.delays[1], self.delays[2], self.delays[3]],
        }
    }
}

#[derive(Args)]
struct GenTagsArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 100_000.0)]
    pair_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    dark_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Seconds of simulated acquisition.
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `.csv` selects CSV, anything else the binary format.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    tags: PathBuf,
    #[command(flatten)]
    coincidence: CoincidenceArgs,
    /// Write the extracted bits as 0/1 text.
    #[arg(long)]
    bits_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeVariant {
    Classical,
    Quantum,
    Both,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "QGO_ADDR", default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Where finished games and live snapshots are written.
    #[arg(long, env = "QGO_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Default source angle for new sessions.
    #[arg(long, env = "QGO_THETA", default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 10)]
    snapshot_every: u32,
}

fn write_out(path: Option<&Path>, text: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text).context("writing to stdout"),
    }
}

fn selfplay(a: SelfplayArgs) -> Result<()> {
    let board = BoardConfig::new(a.size).with_komi(a.komi).with_theta(a.theta);
    let mut config = SelfPlayConfig::new(board, a.games, a.seed);
    if let Some(m) = a.max_moves {
        config.max_moves = m;
    }
    if a.games == 0 {
        bail!("--games must be at least 1");
    }
    let (report, kifus) = run_selfplay(&config)?;
    let summary = report.summary();
    print!("{summary}");
    if let Some(dir) = a.out {
        let kdir = dir.join("kifu");
        fs::create_dir_all(&kdir).with_context(|| format!("creating {}", kdir.display()))?;
        let mut games = Vec::new();
        report.write_games_csv(&mut games)?;
        fs::write(dir.join("games.csv"), games)?;
        let mut moves = Vec::new();
        report.write_moves_csv(&mut moves)?;
        fs::write(dir.join("moves.csv"), moves)?;
        fs::write(dir.join("summary.txt"), summary)?;
        for (i, k) in kifus.iter().enumerate() {
            fs::write(kdir.join(format!("game-{i:04}.kifu")), kifu::serialize(k))?;
        }
    }
    Ok(())
}

fn replay_cmd(path: &Path) -> Result<()> {
    let k = kifu::load(path).with_context(|| format!("reading {}", path.display()))?;
    let r = replay(&k)?;
    println!("verified {} moves", k.moves.len());
    let board = r.score.as_ref().map_or(&r.state, |s| &s.final_state);
    print!("{}", render_board(board));
    if let Some(s) = &r.score {
        println!("black {} white {} komi {} -> {} ({:+})", s.black, s.white, k.header.komi, s.winner, s.margin);
    }
    Ok(())
}

fn analyze_bits(a: AnalyzeArgs) -> Result<()> {
    let bits: Vec<Bit> = if let Some(p) = &a.input {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        parse_bit_script(&text)?
    } else if let Some(p) = &a.tags {
        let tags = read_tags(p)?;
        extract_bits(&tags, &a.coincidence.config())?.bits
    } else {
        BitSource::simulated(a.source.params(), a.seed)?.take_bits(a.n)?
    };
    let series: Vec<f64> = bits.iter().map(|b| b.as_u8() as f64).collect();
    let form = if a.exact { AcfForm::Exact } else { AcfForm::Approximate };
    let c = autocorrelation(&series, a.maxlag, form)?;
    let mut csv = Vec::new();
    c.write_csv(&mut csv)?;
    write_out(a.out.as_deref(), &csv)?;
    let ones = bits.iter().filter(|b| **b == Bit::One).count();
    let summary = format!("{}ones = {} zeros = {}\n", c.summary(), ones, bits.len() - ones);
    if a.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn gen_tags(a: GenTagsArgs) -> Result<()> {
    let params = StateParams {
        pair_rate: a.pair_rate,
        dark_rate: a.dark_rate,
        jitter: a.jitter,
        ..a.source.params()
    };
    let tags = generate_timetags(&params, a.duration, a.seed)?;
    write_tags(&a.out, &tags, TagFormat::from_path(&a.out))?;
    println!("wrote {} tags to {}", tags.len(), a.out.display());
    Ok(())
}

fn extract(a: ExtractArgs) -> Result<()> {
    let tags = read_tags(&a.tags)?;
    let ex = extract_bits(&tags, &a.coincidence.config())?;
    let c = &ex.counts;
    println!("tags {}", tags.len());
    println!("coincidences {} (HV {} VH {} HH {} VV {})", c.total(), c.n_hv, c.n_vh, c.n_hh, c.n_vv);
    println!("bits {}", ex.bits.len());
    match visibility(c) {
        Ok(v) => println!("visibility {v:.4}"),
        Err(_) => println!("visibility undefined (no coincidences)"),
    }
    if let Some(p) = a.bits_out {
        fs::write(&p, format_bit_script(&ex.bits) + "\n")?;
    }
    Ok(())
}

fn ais_cmd(path: &Path, out: Option<&Path>) -> Result<()> {
    let k = kifu::load(path).with_context(|| format!("reading {}", path.display()))?;
    let t = ais_trace(&k)?;
    let mut csv = Vec::new();
    t.write_csv(&mut csv)?;
    write_out(out, &csv)
}

fn bounds(size: usize) -> Result<()> {
    let r = complexity_report(size)?;
    println!("board {size}x{size}");
    println!("max AIS = 2^{} = {}", max_ais_exponent(size), r.max_ais);
    println!("information sets = 3^{} = {}", size * size, r.info_set_count);
    println!("branching = C({}, 2) = {}", size * size, r.branching);
    Ok(())
}

fn tree(size: usize, depth: usize, variant: TreeVariant) -> Result<()> {
    let variants = match variant {
        TreeVariant::Classical => vec![Variant::Classical],
        TreeVariant::Quantum => vec![Variant::Quantum],
        TreeVariant::Both => vec![Variant::Classical, Variant::Quantum],
    };
    let config = BoardConfig::new(size);
    let counts: Vec<_> = variants
        .iter()
        .map(|&v| enumerate_game_tree(&config, depth, v))
        .collect::<Result<_, _>>()?;
    let header: Vec<String> = variants.iter().map(|v| format!("{v:?}").to_lowercase()).collect();
    println!("depth,{}", header.join(","));
    for d in 0..depth {
        let row: Vec<String> = counts.iter().map(|c| c.per_depth[d].to_string()).collect();
        println!("{},{}", d + 1, row.join(","));
    }
    Ok(())
}

fn serve(a: ServeArgs) -> Result<()> {
    let config = qgo_server::ServerConfig {
        data_dir: a.data_dir,
        source: StateParams::with_theta(a.theta),
        snapshot_every: a.snapshot_every,
    };
    config.source.validate()?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(qgo_server::serve(a.addr, config))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Selfplay(a) => selfplay(a),
        Command::Replay { kifu } => replay_cmd(&kifu),
        Command::AnalyzeBits(a) => analyze_bits(a),
        Command::GenTags(a) => gen_tags(a),
        Command::Extract(a) => extract(a),
        Command::Ais { kifu, out } => ais_cmd(&kifu, out.as_deref()),
        Command::Bounds { size } => bounds(size),
        Command::Tree { size, depth, variant } => tree(size, depth, variant),
        Command::Serve(a) => serve(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("error: {}", chain.join(": "));
            ExitCode::FAILURE
        }
    }
}
