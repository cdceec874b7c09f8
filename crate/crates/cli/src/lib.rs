//! Experiment configuration and execution behind the `diamtors` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diamtors_core::curves::{count_vs_diam, diam_vs_n, torsion_vs_vertices, CurveKind};
use diamtors_core::gabber::{gabber_scan, GabberScan, GabberTable};
use diamtors_core::geometry::{
    ball_volume, log_ball_volume, sharpness_chain, torsion_bound, GeometryParams, SharpnessParams,
};
use diamtors_core::gl::{arithmetic_fraction_bound, count_noncommensurable, CountOptions, FractionParams};
use diamtors_core::homology::homology;
use diamtors_core::pipeline::{nerve_pipeline, NerveConfig};
use diamtors_core::schreier::{diameter_statistics, enumerate_subgroups, sample_schreier};
use diamtors_core::subgroups::{count_subgroups, count_transitive_pairs_bruteforce, factorial};
use diamtors_core::{BlockTable, FiniteMetricSpace, SimplicialComplex};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] diamtors_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use diamtors_core::Error as E;
        match self {
            CliError::Core(E::ScaleExceeded { .. }) => 3,
            CliError::Core(E::Invariant(_) | E::RejectionCapExceeded { .. }) => 4,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            3 => "scale-exceeded",
            4 => "invariant-violation",
            _ => "invalid-config",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "diamtors", version, about = "Subgroup growth, Schreier diameters, hyperbolic bounds and torsion homology")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Data file; a manifest is written next to it as `<out>.manifest.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            command: self.command.clone(),
            seed: self.seed,
            format: self.format,
        }
    }
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Subgroup counts a_N of the free group of rank 2.
    Subgroups {
        #[arg(long)]
        max_index: usize,
        /// Also count transitive pairs by brute force and check the recursion.
        #[arg(long)]
        oracle: bool,
    },
    #[command(subcommand)]
    Schreier(SchreierCommand),
    #[command(subcommand)]
    Gl(GlCommand),
    #[command(subcommand)]
    Geom(GeomCommand),
    /// Integral homology of a complex file.
    Homology {
        #[arg(long)]
        complex: PathBuf,
    },
    /// Net, nerve and homology of a sampled model space.
    Nerve(NerveArgs),
    /// Empirical torsion-per-vertex constants.
    GabberScan {
        #[arg(long, default_value_t = 12)]
        degree: u64,
        #[arg(long, default_value_t = 40)]
        vmax: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Plot-ready data series.
    Curves(CurveArgs),
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum SchreierCommand {
    /// One uniformly random transitive pair.
    Sample {
        #[arg(long)]
        n: usize,
    },
    /// Every subgroup of index N, one pointed graph each.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Diameters of random Schreier graphs.
    DiamStats {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum GlCommand {
    /// Commensurability classes of glued manifolds up to a diameter.
    Count {
        #[arg(long)]
        dmax: f64,
        #[arg(long, default_value_t = 7)]
        ceiling: usize,
        /// JSON object with keys diam_V0, diam_V1, diam_Aplus, diam_Aminus,
        /// diam_Bplus, diam_Bminus; every block has diameter 1 otherwise.
        #[arg(long)]
        block_table: Option<PathBuf>,
        /// Samples per index above the enumeration ceiling.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Upper bound on the fraction of arithmetic manifolds.
    Fraction {
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        cn: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        cprime: f64,
    },
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum GeomCommand {
    /// Volume of a hyperbolic ball.
    BallVolume {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
        /// Skip the linear-scale volume, which overflows for large radii.
        #[arg(long)]
        log_space: bool,
    },
    /// Bound on log log of the torsion order from the diameter.
    TorsionBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        diam: f64,
        /// A constant table, or the output of `gabber-scan`.
        #[arg(long)]
        gabber_table: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c_inj: f64,
    },
    /// Lower envelope implied by diameter and volume hypotheses.
    Sharpness {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        target: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    FlatTorus,
    Circle,
    RoundSphere,
    ProjectivePlane,
    Explicit,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct NerveArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Sample points; for the flat torus this must be a perfect power of `--dims`.
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Distance matrix (JSON array of rows) for the explicit model.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub sep: f64,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,
    #[arg(long)]
    pub gabber_table: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct CurveArgs {
    /// count-vs-diam, diam-vs-n or torsion-vs-vertices.
    pub kind: String,
    #[arg(long, default_value_t = 2)]
    pub d_min: u32,
    #[arg(long, default_value_t = 12)]
    pub d_max: u32,
    #[arg(long, default_value_t = 1.0)]
    pub block_diam: f64,
    #[arg(long, value_delimiter = ',', default_value = "27,81,243,729")]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
    #[arg(long, default_value_t = 12)]
    pub degree: u64,
    #[arg(long, default_value_t = 40)]
    pub vmax: usize,
}

/// Everything that determines the data written by a run. The worker count
/// and output path are deliberately absent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub format: Option<Format>,
}

impl ExperimentConfig {
    /// SHA-256 of the canonical JSON form of the config.
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(serde_json::to_vec(self).expect("config serialization cannot fail")))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Result of one subcommand before formatting.
struct Data {
    json: Value,
    csv: Option<String>,
    default: Format,
}

impl Data {
    fn json(json: Value) -> Self {
        Data {
            json,
            csv: None,
            default: Format::Json,
        }
    }

    fn csv(json: Value, csv: String) -> Self {
        Data {
            json,
            csv: Some(csv),
            default: Format::Csv,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn render(self, format: Option<Format>) -> Result<String> {
        match format.unwrap_or(self.default) {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json).expect("JSON values serialize") + "\n"),
            Format::Csv => match self.csv {
                Some(csv) => Ok(csv),
                None => flat_csv(&self.json).ok_or_else(|| CliError::Config("no CSV form for this output".into())),
            },
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) if !s.contains([',', '"', '\n']) => Some(s.clone()),
        _ => None,
    }
}

/// Header and one row for an object whose values are all scalars.
fn flat_csv(v: &Value) -> Option<String> {
    let obj = v.as_object()?;
    let values = obj.values().map(scalar).collect::<Option<Vec<_>>>()?;
    let header: Vec<&str> = obj.keys().map(String::as_str).collect();
    Some(format!("{}\n{}\n", header.join(","), values.join(",")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("output types serialize")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// A bare constant table or a full `gabber-scan` output.
fn load_table(path: &Path) -> Result<GabberTable> {
    let text = read(path)?;
    if let Ok(t) = GabberTable::from_json(&text) {
        return Ok(t);
    }
    serde_json::from_str::<GabberScan>(&text)
        .map(|s| s.table())
        .map_err(|e| CliError::Config(format!("{}: neither a constant table nor a scan: {e}", path.display())))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn subgroups(max_index: usize, oracle: bool) -> Result<Data> {
    let table = count_subgroups(max_index)?;
    let a: Vec<String> = (1..=max_index).map(|n| table.a(n).to_string()).collect();
    if !oracle {
        let csv = a.iter().enumerate().fold(String::from("N,a_N\n"), |mut s, (i, x)| {
            let _ = writeln!(s, "{},{x}", i + 1);
            s
        });
        return Ok(Data::csv(to_value(&a), csv));
    }
    let mut brute = Vec::with_capacity(max_index);
    for n in 1..=max_index {
        let b = count_transitive_pairs_bruteforce(n)? / factorial(n - 1);
        if &b != table.a(n) {
            return Err(diamtors_core::Error::Invariant(format!("a_{n}: recursion {} but brute force {b}", table.a(n))).into());
        }
        brute.push(b.to_string());
    }
    let mut csv = String::from("N,a_N,brute_force\n");
    for (i, (x, b)) in a.iter().zip(&brute).enumerate() {
        let _ = writeln!(csv, "{},{x},{b}", i + 1);
    }
    Ok(Data::csv(json!({ "a": a, "brute_force": brute }), csv))
}

fn schreier(cmd: &SchreierCommand, seed: u64) -> Result<Data> {
    let graph_row = |i: usize, g: &diamtors_core::SchreierGraph| {
        format!("{i},{},{},{}\n", join(g.sigma_a()), join(g.sigma_b()), g.base())
    };
    match *cmd {
        SchreierCommand::Sample { n } => {
            let g = sample_schreier(n, seed)?;
            Ok(Data::json(to_value(&g)).with_csv(format!("index,sigma_a,sigma_b,base\n{}", graph_row(0, &g))))
        }
        SchreierCommand::Enumerate { n } => {
            let graphs = enumerate_subgroups(n)?;
            let csv = graphs
                .iter()
                .enumerate()
                .fold(String::from("index,sigma_a,sigma_b,base\n"), |s, (i, g)| s + &graph_row(i, g));
            Ok(Data::json(to_value(&graphs)).with_csv(csv))
        }
        SchreierCommand::DiamStats { n, trials } => {
            let stats = diameter_statistics(n, trials, seed)?;
            Ok(Data::csv(to_value(&stats.summary()), stats.to_csv()))
        }
    }
}

fn gl(cmd: &GlCommand, seed: u64) -> Result<Data> {
    match cmd {
        GlCommand::Count {
            dmax,
            ceiling,
            block_table,
            trials,
        } => {
            let blocks = match block_table {
                Some(p) => parse::<BlockTable>(p)?,
                None => BlockTable::default(),
            };
            let count = count_noncommensurable(*dmax, &blocks, *ceiling, CountOptions { trials: *trials, seed })?;
            let mut csv = String::from("n,method,subgroups,exact,estimated,stderr\n");
            for c in &count.per_n {
                let method = to_value(&c.method);
                let exact = c.exact.as_ref().map_or(String::new(), |e| e.to_string());
                let _ = writeln!(
                    csv,
                    "{},{},{},{exact},{},{}",
                    c.n,
                    method.as_str().unwrap_or_default(),
                    c.subgroups,
                    c.estimated,
                    c.stderr
                );
            }
            Ok(Data::json(to_value(&count)).with_csv(csv))
        }
        GlCommand::Fraction { d, cn, beta, eps, cprime } => {
            let params = FractionParams {
                c_n: *cn,
                beta: *beta,
                eps: *eps,
                c_prime: *cprime,
            };
            let b = arithmetic_fraction_bound(*d, &params)?;
            Ok(Data::json(json!({ "d": d, "log_bound": b.log_bound, "fraction": b.fraction })))
        }
    }
}

fn geom(cmd: &GeomCommand) -> Result<Data> {
    match cmd {
        GeomCommand::BallVolume { n, r, log_space } => {
            let log_volume = log_ball_volume(*n, *r)?;
            let volume = if *log_space { None } else { Some(ball_volume(*n, *r)?) };
            // JSON has no infinities; an overflowed volume is reported as null
            let volume = volume.filter(|v| v.is_finite());
            let log_volume = log_volume.is_finite().then_some(log_volume);
            Ok(Data::json(json!({ "n": n, "r": r, "volume": volume, "log_volume": log_volume })))
        }
        GeomCommand::TorsionBound {
            n,
            diam,
            gabber_table,
            c_inj,
        } => {
            let table = load_table(gabber_table)?;
            let mut params = GeometryParams::new(*n, *diam);
            params.c_inj = *c_inj;
            params.validate()?;
            Ok(Data::json(to_value(&torsion_bound(*n, *diam, &params, &table)?)))
        }
        GeomCommand::Sharpness { a, b, target } => {
            let params = SharpnessParams {
                a: *a,
                b: *b,
                ..SharpnessParams::default()
            };
            Ok(Data::json(to_value(&sharpness_chain(*target, &params)?)))
        }
    }
}

fn homology_of(path: &Path) -> Result<Data> {
    let complex = SimplicialComplex::from_json(&read(path)?)?;
    let h = homology(&complex)?;
    let mut csv = String::from("p,simplices,betti,torsion\n");
    for (p, d) in h.degrees().iter().enumerate() {
        let _ = writeln!(csv, "{p},{},{},{}", complex.count(p), d.betti, join(&d.torsion));
    }
    Ok(Data::json(to_value(&h)).with_csv(csv))
}

fn model(args: &NerveArgs) -> Result<FiniteMetricSpace> {
    let space = match args.model {
        ModelArg::FlatTorus => {
            let res = (args.points as f64).powf(1.0 / args.dims.max(1) as f64).round() as usize;
            if res.checked_pow(args.dims as u32) != Some(args.points) {
                return Err(CliError::Config(format!(
                    "flat torus needs a perfect {}-th power of points, got {}",
                    args.dims, args.points
                )));
            }
            FiniteMetricSpace::flat_torus(args.dims, res)?
        }
        ModelArg::Circle => FiniteMetricSpace::circle(args.points)?,
        ModelArg::RoundSphere => FiniteMetricSpace::round_sphere(args.points)?,
        ModelArg::ProjectivePlane => FiniteMetricSpace::projective_plane(args.points)?,
        ModelArg::Explicit => {
            let path = args
                .matrix
                .as_ref()
                .ok_or_else(|| CliError::Config("the explicit model needs --matrix".into()))?;
            FiniteMetricSpace::from_matrix(parse(path)?)?
        }
    };
    Ok(space)
}

fn nerve(args: &NerveArgs) -> Result<Data> {
    let space = model(args)?;
    let cfg = NerveConfig {
        separation: args.sep,
        radius: args.radius,
        max_dim: args.max_dim,
        gabber: args.gabber_table.as_deref().map(load_table).transpose()?,
    };
    let report = nerve_pipeline(&space, &cfg)?;
    let mut csv = String::from("p,simplices,betti,torsion,trusted\n");
    for (p, d) in report.homology.degrees().iter().enumerate() {
        let _ = writeln!(
            csv,
            "{p},{},{},{},{}",
            report.simplex_counts.get(p).copied().unwrap_or(0),
            d.betti,
            join(&d.torsion),
            p < report.trusted_degrees
        );
    }
    Ok(Data::json(to_value(&report)).with_csv(csv))
}

fn scan(degree: u64, vmax: usize, trials: u64, seed: u64) -> Result<Data> {
    let s = gabber_scan(degree, vmax, trials, seed)?;
    let mut csv = String::from("trial,kind,vertices,max_degree,log_torsion_1,log_torsion_2\n");
    for o in &s.observations {
        let kind = to_value(&o.kind);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            o.trial,
            kind.as_str().unwrap_or_default(),
            o.vertices,
            o.max_degree,
            o.log_torsion[0],
            o.log_torsion[1]
        );
    }
    Ok(Data::json(to_value(&s)).with_csv(csv))
}

fn curves(args: &CurveArgs, seed: u64) -> Result<Data> {
    let kind: CurveKind = args.kind.parse()?;
    let curve = match kind {
        CurveKind::CountVsDiam => count_vs_diam(args.d_min..=args.d_max, args.block_diam)?,
        CurveKind::DiamVsN => diam_vs_n(&args.ns, args.trials as usize, seed)?,
        CurveKind::TorsionVsVertices => torsion_vs_vertices(&gabber_scan(args.degree, args.vmax, args.trials, seed)?),
    };
    Ok(Data::csv(to_value(&curve), curve.to_csv()))
}

/// Computes the data for `cfg`, rendered in the requested format.
pub fn render(cfg: &ExperimentConfig) -> Result<String> {
    let seed = cfg.seed;
    let data = match &cfg.command {
        Command::Subgroups { max_index, oracle } => subgroups(*max_index, *oracle)?,
        Command::Schreier(c) => schreier(c, seed)?,
        Command::Gl(c) => gl(c, seed)?,
        Command::Geom(c) => geom(c)?,
        Command::Homology { complex } => homology_of(complex)?,
        Command::Nerve(args) => nerve(args)?,
        Command::GabberScan { degree, vmax, trials } => scan(*degree, *vmax, *trials, seed)?,
        Command::Curves(args) => curves(args, seed)?,
    };
    data.render(cfg.format)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Versions {
    #[serde(rename = "diamtors-cli")]
    pub cli: String,
    #[serde(rename = "diamtors-core")]
    pub core: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub versions: Versions,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub output: Option<PathBuf>,
    pub output_sha256: String,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Runs `cfg`, writing the data to `out` (or stdout) and, with `out`, the
/// manifest next to it.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Manifest> {
    let start = Instant::now();
    let data = render(cfg)?;
    let manifest = Manifest {
        config_hash: cfg.hash(),
        config: cfg.clone(),
        seed: cfg.seed,
        versions: Versions {
            cli: env!("CARGO_PKG_VERSION").into(),
            core: diamtors_core::VERSION.into(),
        },
        threads: rayon::current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        output: out.map(Path::to_owned),
        output_sha256: hex(&Sha256::digest(data.as_bytes())),
    };
    let write = |path: &Path, text: &str| {
        std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })
    };
    match out {
        Some(path) => {
            write(path, &data)?;
            let m = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            write(&manifest_path(path), &m)?;
        }
        None => print!("{data}"),
    }
    Ok(manifest)
}
