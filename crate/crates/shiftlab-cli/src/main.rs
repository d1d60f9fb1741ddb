use clap::{Parser, Subcommand};
use shiftlab_cli::{
    exit_code, run_check, run_scan, run_sixpoint, run_theorem, tolerance, ScanConfig,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "shiftlab",
    about = "Subnormality and joint hyponormality tests for weighted shifts",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide subnormality of a five-tuple (JSON file) via the ψ/φ criterion
    Check { file: PathBuf },
    /// Check that subnormality agrees with that of all powers (m,n) ≤ (mmax,nmax)
    Theorem {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        mmax: u32,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
    },
    /// Run the Six-point joint hyponormality test on a grid (JSON file)
    Sixpoint {
        file: PathBuf,
        /// Window bound "K1,K2"
        #[arg(long = "K", short = 'K', default_value = "20,20", value_parser = parse_pair)]
        k: (usize, usize),
    },
    /// Scan the (kappa, y0) plane of the worked hyponormal-not-subnormal family
    ScanExample {
        /// Squared completion weights "w0,w1,w2"
        #[arg(long, value_parser = parse_triple, default_value = "0.5,0.66,0.92")]
        omega: (f64, f64, f64),
        /// First weight of row 1
        #[arg(long, default_value_t = 0.3)]
        a: f64,
        #[arg(long, default_value_t = 24)]
        kappa_steps: usize,
        #[arg(long, default_value_t = 160)]
        y0_steps: usize,
        /// Audit this many interior sample points
        #[arg(long, default_value_t = 0)]
        audit: usize,
        /// Output file; .svg renders the region, anything else is CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected K1,K2".into());
    }
    Ok((
        parts[0].trim().parse().map_err(|e| format!("{e}"))?,
        parts[1].trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_triple(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected w0,w1,w2".into());
    }
    let p = |i: usize| parts[i].trim().parse::<f64>().map_err(|e| format!("{e}"));
    Ok((p(0)?, p(1)?, p(2)?))
}

fn read(path: &PathBuf) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read {}: {e}", path.display());
        exit_code::PARSE_ERROR
    })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // keep help/version on stdout with status 0, everything else is a parse error
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(exit_code::PARSE_ERROR);
            }
            print!("{e}");
            std::process::exit(exit_code::PASS);
        }
    };
    let tol = tolerance();
    let mut out = std::io::stdout();
    let code = match cli.command {
        Command::Check { file } => match read(&file) {
            Ok(input) => run_check(&input, tol, &mut out),
            Err(c) => c,
        },
        Command::Theorem { file, mmax, nmax } => match read(&file) {
            Ok(input) => run_theorem(&input, mmax, nmax, tol, &mut out),
            Err(c) => c,
        },
        Command::Sixpoint { file, k } => match read(&file) {
            Ok(input) => run_sixpoint(&input, k, tol, &mut out),
            Err(c) => c,
        },
        Command::ScanExample {
            omega,
            a,
            kappa_steps,
            y0_steps,
            audit,
            out: out_path,
        } => {
            let cfg = ScanConfig {
                omega: [omega.0, omega.1, omega.2],
                a,
                kappa_steps,
                y0_steps,
                tol,
                ..ScanConfig::default()
            };
            run_scan(
                &cfg,
                audit,
                out_path.as_deref(),
                &mut out,
                &mut std::io::stderr(),
            )
        }
    };
    std::process::exit(code);
}
