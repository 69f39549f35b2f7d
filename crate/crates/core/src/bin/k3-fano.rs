use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use k3_fano::census::{self, CensusError};
use k3_fano::geometricity::{decide, DecideOptions, NikulinReading};
use k3_fano::graph::ConfigGraph;

#[derive(Parser)]
#[command(version, about = "Rational curves on polarized K3 surfaces via Fano lattices")]
struct Cli {
    /// Accept l = r - 1 in the 2-adic clause of Nikulin's criterion.
    #[arg(long, global = true)]
    corrected_nikulin: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide admissibility, subgeometricity and geometricity of a graph.
    Decide {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        json: bool,
        /// Allow n at or below the large-n threshold.
        #[arg(long)]
        below_threshold: bool,
    },
    /// Maximal number of curves: closed formula and lattice cross-check.
    Max {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
    },
    /// Residue-class table over one period of n.
    Census {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        odd_n_only: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Period in n of the maximal count.
    Period {
        #[arg(long)]
        d: i64,
    },
    /// Check a registered statement on its residue grid.
    Verify {
        #[arg(long)]
        prop: String,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,9")]
        d_list: Vec<i64>,
    },
}

fn run(cli: Cli) -> Result<bool, CensusError> {
    let mut opts = DecideOptions::default();
    if cli.corrected_nikulin {
        opts.reading = NikulinReading::Corrected;
    }
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Decide { graph, n, d, json, below_threshold } => {
            let g = graph.parse::<ConfigGraph>().map_err(|e| usage(format!("{graph}: {e}")))?;
            opts.enforce_threshold = !below_threshold;
            let v = decide(&g, n, d, opts).map_err(CensusError::from)?;
            if json {
                serde_json::to_writer_pretty(&mut stdout, &v)?;
                writeln!(stdout)?;
            } else {
                writeln!(stdout, "{} n={} d={}: {}", g.pretty(), n, d, v.status)?;
                for p in &v.per_prime {
                    let clause = p.check.as_ref().map(|c| format!("{:?}", c.clause)).unwrap_or_else(|| "-".into());
                    writeln!(stdout, "  p={} length={} |K_p|={} clause={}", p.p, p.length, p.kernel_order, clause)?;
                }
                if let Some(k) = &v.witness_kernel {
                    writeln!(stdout, "  kernel generators: {k:?}")?;
                }
                if v.nikulin_gap_warning {
                    writeln!(stdout, "  warning: 2-adic clause hit l = r - 1")?;
                }
            }
            Ok(true)
        }
        Command::Max { n, d } => {
            let formula = census::max_curves_formula(n, d)?;
            let lat = census::max_curves_lattice(n, d, opts)?;
            writeln!(stdout, "formula {formula}")?;
            writeln!(stdout, "lattice {} ({:?})", lat.count, lat.provenance)?;
            for w in &lat.witnesses {
                writeln!(stdout, "  {}: {}", w.graph, w.status)?;
            }
            Ok(formula == lat.count)
        }
        Command::Census { d, odd_n_only, format, out } => {
            let table = census::census(d, odd_n_only, opts)?;
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(&mut stdout),
            };
            match format {
                Format::Csv => table.write_csv(sink)?,
                Format::Json => table.write_json(sink)?,
            }
            Ok(table.all_agree())
        }
        Command::Period { d } => {
            if d <= 1 {
                return Err(CensusError::DegreeTooSmall(d));
            }
            writeln!(stdout, "{}", census::period(d))?;
            Ok(true)
        }
        Command::Verify { prop, d_list } => {
            let p = census::proposition(&prop)?;
            let report = census::verify(&prop, &p.samples(&d_list), opts)?;
            writeln!(stdout, "{}: {}", report.id, report.statement)?;
            for c in &report.cases {
                let mark = if c.ok { "ok" } else { "MISMATCH" };
                writeln!(stdout, "  n={} d={} expected {:?}, got {}: {mark}", c.n, c.d, c.expected, c.status)?;
            }
            writeln!(stdout, "{}", if report.passed() { "PASS" } else { "FAIL" })?;
            Ok(report.passed())
        }
    }
}

fn usage(msg: String) -> CensusError {
    CensusError::Io(io::Error::new(io::ErrorKind::InvalidInput, msg))
}

fn is_usage(e: &CensusError) -> bool {
    match e {
        CensusError::DegreeTooSmall(_) | CensusError::BadN(_) | CensusError::UnknownProposition(_) => true,
        CensusError::Io(e) => e.kind() == io::ErrorKind::InvalidInput,
        CensusError::Decide(_) => true,
        _ => false,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
