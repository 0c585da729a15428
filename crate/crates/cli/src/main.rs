//! Command-line front end: point counts of the modular curve, rational
//! necklaces on curves over finite fields, reductions of CM points, the
//! collision scan, and necklace diagrams.

mod modpoly;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use necklace::bridge::{pearl_set, rational_geo_necklaces_for, render_necklace, DiagramFormat, GeoNecklace};
use necklace::cartan::{canonical_gamma, Gamma, ProjPoint};
use necklace::cmred::{cm_reduced_necklace, cm_table, parse_cm_table, CmOptions, CmOrder, DEFAULT_PRECISION};
use necklace::ec::parse_curve;
use necklace::util::{is_prime, primes_in};
use necklace::xcount::{candidate_primes, default_threads, fiber_size, injectivity_scan_with, CollisionRecord};
use necklace::Error;
use serde_json::{json, Value};

use modpoly::ModPolyFile;

/// Environment variable naming the data directory.
const DATA_ENV: &str = "NECKLACE_DATA";

#[derive(Parser, Debug)]
#[command(name = "necklace", version, about = "Necklaces of p-isogenies and points of non-split Cartan modular curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Svg,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// #X(F_ℓ) with its fibers, or the whole table when p or ℓ is omitted.
    Count {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        ell: Option<u64>,
    },
    /// Necklaces defined over the base field of a curve.
    Necklaces {
        #[command(flatten)]
        target: CurveTarget,
        #[command(flatten)]
        gamma: GammaArg,
        /// Modular polynomial file used to cross-check codomain j-invariants.
        #[arg(long)]
        modpoly: Option<PathBuf>,
        /// Write one SVG diagram per necklace into this directory.
        #[arg(long)]
        diagrams: Option<PathBuf>,
    },
    /// Reduction modulo ℓ of the rational necklace on a CM curve.
    Cmreduce {
        #[command(flatten)]
        cm: CmTarget,
    },
    /// CM points with equal reductions.
    Scan {
        /// Levels: a list `5,7` or a half-open range `5..50`.
        #[arg(long, default_value = "5..50")]
        p: String,
        /// Characteristics, same syntax; defaults to the primes dividing differences of CM j-invariants.
        #[arg(long)]
        ell: Option<String>,
        #[command(flatten)]
        gamma: GammaArg,
        /// Worker threads.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Diagram of one necklace on a curve or of a reduced CM necklace.
    Render {
        #[arg(long, conflicts_with = "d")]
        curve: Option<String>,
        /// Discriminant of a CM order, with --ell.
        #[arg(long = "D", allow_hyphen_values = true)]
        d: Option<i64>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: Option<u64>,
        /// Which rational necklace on the curve.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[command(flatten)]
        gamma: GammaArg,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
    },
}

#[derive(Args, Debug)]
struct CurveTarget {
    /// Curve such as `p=13,a4=1,a6=4`.
    #[arg(long)]
    curve: String,
    #[arg(long)]
    p: u64,
}

#[derive(Args, Debug)]
struct CmTarget {
    /// Discriminant of the order.
    #[arg(long = "D", allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    ell: u64,
    #[command(flatten)]
    gamma: GammaArg,
    /// Starting precision in bits of the analytic construction.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Args, Debug)]
struct GammaArg {
    /// Generator of F_{p²}^× by trace and norm, `t,n`.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
}

/// Error with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::NoExtraAutomorphisms | Error::Mismatch(_) => 2,
            Error::Parse { .. } => 3,
            _ => 4,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Res<T> = std::result::Result<T, Failure>;

impl GammaArg {
    fn resolve(&self, p: u64) -> Res<Gamma> {
        match &self.gamma {
            None => Ok(canonical_gamma(p)?),
            Some(s) => {
                let (t, n) = s.split_once(',').ok_or_else(|| invalid(format!("gamma `{s}` is not `t,n`")))?;
                let num = |x: &str| x.trim().parse::<i64>().map_err(|_| invalid(format!("bad integer `{}` in gamma", x.trim())));
                let m = p as i64;
                Ok(Gamma::new(p, num(t)?.rem_euclid(m) as u64, num(n)?.rem_euclid(m) as u64)?)
            }
        }
    }
}

/// Primes from a list `5,7,11` or a half-open range `5..50`.
fn parse_primes(s: &str) -> Res<Vec<u64>> {
    let num = |x: &str| x.trim().parse::<u64>().map_err(|_| invalid(format!("bad integer `{}`", x.trim())));
    let v = match s.split_once("..") {
        Some((a, b)) => primes_in(num(a)?, num(b)?),
        None => s.split(',').map(num).collect::<Res<Vec<_>>>()?,
    };
    if let Some(&n) = v.iter().find(|&&n| n < 5 || !is_prime(n)) {
        return Err(invalid(format!("{n} is not a prime >= 5")));
    }
    Ok(v)
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_ENV).map(PathBuf::from)
}

/// The CM table from the data directory, or the shipped one.
fn load_cm_table() -> Res<Vec<CmOrder>> {
    match data_dir().map(|d| d.join("cm_curves.csv")).filter(|p| p.exists()) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Failure { code: 3, msg: format!("{}: {e}", path.display()) })?;
            Ok(parse_cm_table(&text)?)
        }
        None => Ok(cm_table().to_vec()),
    }
}

/// A modular polynomial from `--modpoly` or from `phi_j_<p>.txt` in the data directory.
fn load_modpoly(p: u64, explicit: Option<&Path>) -> Res<Option<ModPolyFile>> {
    let path = match explicit {
        Some(path) => Some(path.to_path_buf()),
        None => data_dir().map(|d| d.join(format!("phi_j_{p}.txt"))).filter(|p| p.exists()),
    };
    path.map(|path| ModPolyFile::read(p, &path).map_err(Failure::from)).transpose()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn fiber_label(j: Option<u64>) -> String {
    j.map_or("inf".to_string(), |j| j.to_string())
}

fn cmd_count(p: Option<u64>, ell: Option<u64>, format: Format) -> Res<String> {
    let (Some(p), Some(ell)) = (p, ell) else {
        return count_table(p, ell, format);
    };
    let mut fibers = Vec::new();
    for j in std::iter::once(None).chain((0..ell).map(Some)) {
        let n = fiber_size(p, ell, j)?;
        if n > 0 {
            fibers.push((j, n));
        }
    }
    let total: u64 = fibers.iter().map(|f| f.1).sum();
    Ok(match format {
        Format::Json => pretty(&json!({
            "p": p,
            "ell": ell,
            "total": total,
            "fibers": fibers.iter().map(|(j, n)| json!({ "j": j, "size": n })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("j,size\n");
            for (j, n) in &fibers {
                s += &format!("{},{n}\n", fiber_label(*j));
            }
            s
        }
        Format::Text => {
            let mut s = format!("#X(F_{ell}) for p = {p}: {total}\n");
            for (j, n) in &fibers {
                s += &format!("  j = {:>4}: {n}\n", fiber_label(*j));
            }
            s
        }
        Format::Svg => return Err(invalid("count has no svg output")),
    })
}

fn count_table(p: Option<u64>, ell: Option<u64>, format: Format) -> Res<String> {
    let range = primes_in(5, 50);
    let ps = p.map_or(range.clone(), |p| vec![p]);
    let ells = ell.map_or(range, |l| vec![l]);
    let mut rows = Vec::new();
    for &p in &ps {
        let mut row = Vec::new();
        for &l in &ells {
            row.push(if p == l { None } else { Some(necklace::xcount::total_points(p, l)?) });
        }
        rows.push(row);
    }
    let cell = |c: &Option<u64>| c.map_or(String::new(), |v| v.to_string());
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("p");
            for l in &ells {
                s += &format!(",{l}");
            }
            s.push('\n');
            for (p, row) in ps.iter().zip(&rows) {
                s += &p.to_string();
                for c in row {
                    s += &format!(",{}", cell(c));
                }
                s.push('\n');
            }
            s
        }
        Format::Json => pretty(&json!(ps
            .iter()
            .zip(&rows)
            .flat_map(|(p, row)| ells.iter().zip(row).filter_map(move |(l, c)| c.map(|t| json!({ "p": p, "ell": l, "total": t }))))
            .collect::<Vec<_>>())),
        Format::Text => {
            let mut s = format!("{:>4}", "p\\l");
            for l in &ells {
                s += &format!("{l:>6}");
            }
            s.push('\n');
            for (p, row) in ps.iter().zip(&rows) {
                s += &format!("{p:>4}");
                for c in row {
                    s += &format!("{:>6}", cell(c));
                }
                s.push('\n');
            }
            s
        }
        Format::Svg => return Err(invalid("count has no svg output")),
    })
}

fn necklace_text(n: &GeoNecklace) -> String {
    let slopes: Vec<String> = n
        .pearls
        .iter()
        .map(|g| match g.slope {
            ProjPoint::Fin(s) => s.to_string(),
            ProjPoint::Inf => "inf".to_string(),
        })
        .collect();
    let mut s = format!("necklace ({})\n", slopes.join(" "));
    for g in &n.pearls {
        let kernel: Vec<String> = g.kernel.poly.iter().map(|c| necklace::bridge::elem_json(&n.field, c).to_string()).collect();
        s += &format!("  kernel [{}]  j {}\n", kernel.join(", "), necklace::bridge::elem_json(&n.field, &g.j));
    }
    s
}

fn cmd_necklaces(target: &CurveTarget, gamma: &GammaArg, modpoly: Option<&Path>, diagrams: Option<&Path>, seed: u64, format: Format) -> Res<String> {
    let e = parse_curve(&target.curve)?;
    let g = gamma.resolve(target.p)?;
    if let Some(m) = load_modpoly(target.p, modpoly)? {
        m.validate(seed)?;
    }
    let set = pearl_set(&e, target.p)?;
    let ns = rational_geo_necklaces_for(&set, &g)?;
    if let Some(dir) = diagrams {
        std::fs::create_dir_all(dir).map_err(|e| Failure { code: 4, msg: format!("{}: {e}", dir.display()) })?;
        for (i, n) in ns.iter().enumerate() {
            let path = dir.join(format!("necklace_{i}.svg"));
            std::fs::write(&path, render_necklace(n, DiagramFormat::Svg)?)
                .map_err(|e| Failure { code: 4, msg: format!("{}: {e}", path.display()) })?;
        }
    }
    Ok(match format {
        Format::Json => pretty(&json!(ns.iter().map(|n| n.to_json()).collect::<Vec<_>>())),
        Format::Text => {
            let mut s = format!("{} rational necklaces for p = {}\n", ns.len(), target.p);
            for n in &ns {
                s += &necklace_text(n);
            }
            s
        }
        _ => return Err(invalid("necklaces supports json and text; use --diagrams or render for svg")),
    })
}

fn cm_point(cm: &CmTarget) -> Res<necklace::cmred::ReducedPoint> {
    let table = load_cm_table()?;
    let o = table
        .iter()
        .find(|o| o.d == cm.d)
        .ok_or_else(|| invalid(format!("{} is not in the CM table", cm.d)))?;
    let g = cm.gamma.resolve(cm.p)?;
    let opts = CmOptions { precision: cm.precision, ..CmOptions::default() };
    Ok(cm_reduced_necklace(o, cm.p, cm.ell, &g, &opts)?)
}

fn cmd_cmreduce(cm: &CmTarget, format: Format) -> Res<String> {
    let pt = cm_point(cm)?;
    Ok(match format {
        Format::Json => pretty(&pt.to_json()),
        Format::Text => format!("E_{} at p = {}, reduced mod {} (j = {}):\n{}", pt.d, pt.p, pt.ell, pt.j, necklace_text(&pt.necklace)),
        Format::Svg => render_necklace(&pt.necklace, DiagramFormat::Svg)?,
        Format::Csv => return Err(invalid("cmreduce has no csv output")),
    })
}

fn scan_text(records: &[CollisionRecord]) -> String {
    let mut s = format!("{:>3} {:>4} {:>4} {:>5} {:>4}  curves\n", "p", "ell", "j", "#X_j", "r_j");
    let mut i = 0;
    while i < records.len() {
        let r = &records[i];
        let same: Vec<&CollisionRecord> = records[i..].iter().take_while(|o| (o.p, o.ell, o.j) == (r.p, r.ell, r.j)).collect();
        let pairs: Vec<String> = same.iter().map(|o| format!("(E{}, E{})", o.pair.0, o.pair.1)).collect();
        s += &format!("{:>3} {:>4} {:>4} {:>5} {:>4}  {}\n", r.p, r.ell, r.j, r.x_j, r.r_j, pairs.join("; "));
        i += same.len();
    }
    s
}

fn cmd_scan(p: &str, ell: Option<&str>, gamma: &GammaArg, threads: Option<usize>, format: Format) -> Res<String> {
    let ps = parse_primes(p)?;
    let ells = match ell {
        Some(s) => parse_primes(s)?,
        None => candidate_primes().into_iter().filter(|&l| l >= 5).collect(),
    };
    if gamma.gamma.is_some() && ps.len() != 1 {
        return Err(invalid("--gamma needs a single p"));
    }
    let table = load_cm_table()?;
    let fixed = match gamma.gamma {
        Some(_) => Some(gamma.resolve(ps[0])?),
        None => None,
    };
    let records = injectivity_scan_with(&table, &ps, &ells, threads.unwrap_or_else(default_threads), &|p| match fixed {
        Some(g) => Ok(g),
        None => canonical_gamma(p),
    })?;
    Ok(match format {
        Format::Json => pretty(&json!(records)),
        Format::Text => scan_text(&records),
        Format::Csv => {
            let mut s = String::from("p,ell,j,x_j,r_j,D1,D2\n");
            for r in &records {
                s += &format!("{},{},{},{},{},{},{}\n", r.p, r.ell, r.j, r.x_j, r.r_j, r.pair.0, r.pair.1);
            }
            s
        }
        Format::Svg => return Err(invalid("scan has no svg output")),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_render(curve: Option<&str>, d: Option<i64>, p: u64, ell: Option<u64>, index: usize, gamma: &GammaArg, precision: usize, format: Format) -> Res<String> {
    let n = match (curve, d) {
        (Some(spec), None) => {
            let e = parse_curve(spec)?;
            let g = gamma.resolve(p)?;
            let mut ns = rational_geo_necklaces_for(&pearl_set(&e, p)?, &g)?;
            if index >= ns.len() {
                return Err(invalid(format!("index {index} out of range: the curve has {} rational necklaces", ns.len())));
            }
            ns.swap_remove(index)
        }
        (None, Some(d)) => {
            let ell = ell.ok_or_else(|| invalid("--ell is required with --D"))?;
            let cm = CmTarget { d, p, ell, gamma: GammaArg { gamma: gamma.gamma.clone() }, precision };
            cm_point(&cm)?.necklace
        }
        _ => return Err(invalid("render needs --curve or --D")),
    };
    let fmt = match format {
        Format::Svg => DiagramFormat::Svg,
        Format::Text => DiagramFormat::Dot,
        _ => return Err(invalid("render supports svg and text (Graphviz dot)")),
    };
    Ok(render_necklace(&n, fmt)?)
}

fn run(cli: &Cli) -> Res<String> {
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.cmd {
        Command::Count { p, ell } => cmd_count(*p, *ell, fmt(Format::Text)),
        Command::Necklaces { target, gamma, modpoly, diagrams } => {
            cmd_necklaces(target, gamma, modpoly.as_deref(), diagrams.as_deref(), cli.seed, fmt(Format::Json))
        }
        Command::Cmreduce { cm } => cmd_cmreduce(cm, fmt(Format::Json)),
        Command::Scan { p, ell, gamma, threads } => cmd_scan(p, ell.as_deref(), gamma, *threads, fmt(Format::Text)),
        Command::Render { curve, d, p, ell, index, gamma, precision } => {
            cmd_render(curve.as_deref(), *d, *p, *ell, *index, gamma, *precision, fmt(Format::Svg))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
