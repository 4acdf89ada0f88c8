use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use symsos::certpipeline::{
    algorithm_one_upto, certify_lower_bound, parse_certificate, parse_polynomial_file, plain_lower_bound,
    render_certificate, round_certificate, sos_lower_bound, verify_certificate, Certificate, Value, DEFAULT_SCHEDULE,
};
use symsos::equivariant::render_equivariant_file;
use symsos::grouprep::{catalog, CatalogSpec};
use symsos::invariantring::{render_invariant, render_presentation};
use symsos::molien::{hilbert_consistency, render_dimension_table};
use symsos::polyring::{Degree, Polynomial};
use symsos::rational::render_rational;
use symsos::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NO_CERTIFICATE: u8 = 2;
const EXIT_VERIFICATION_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "symsos",
    version,
    about = "Symmetry-reduced sum-of-squares lower bounds with exact certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Largest λ with f − λ a sum of squares, computed in the invariant formulation.
    Bound {
        /// Group, e.g. `dihedral:4`, `symmetric:3`, `c2n:3`.
        #[arg(long)]
        group: String,
        /// Polynomial file with `vars` and `poly` records.
        #[arg(long)]
        poly: PathBuf,
        /// Round to an exact rational certificate and verify it.
        #[arg(long)]
        round: bool,
        /// Solve the monomial Gram program, block-diagonalized by the group.
        #[arg(long)]
        plain: bool,
        /// Write the certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isotypic dimensions per degree from the Molien series.
    Molien {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10)]
        dmax: usize,
    },
    /// Invariants, equivariant bases and Π matrices of a group.
    Generators {
        #[arg(long)]
        group: String,
        /// Keep basis vectors whose Π diagonal degree is at most this.
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Check a certificate exactly against a polynomial.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::NoCertificate(_) | Error::Rounding(_) | Error::Infeasible(_) => EXIT_NO_CERTIFICATE,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn read(path: &Path) -> symsos::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_polynomial(path: &Path) -> symsos::Result<Polynomial> {
    Ok(parse_polynomial_file(&read(path)?)?.1)
}

fn run(command: Command) -> symsos::Result<u8> {
    match command {
        Command::Bound {
            group,
            poly,
            round,
            plain,
            out,
        } => bound(
            &CatalogSpec::parse(&group)?,
            &read_polynomial(&poly)?,
            round,
            plain,
            out.as_deref(),
        ),
        Command::Molien { group, dmax } => {
            let cat = catalog(&CatalogSpec::parse(&group)?)?;
            print!("{}", render_dimension_table(&cat, dmax)?);
            let report = hilbert_consistency(&cat)?;
            println!("hilbert series check: {}", if report.holds { "holds" } else { "FAILS" });
            Ok(if report.holds { 0 } else { EXIT_VERIFICATION_FAILED })
        }
        Command::Generators { group, max_degree } => {
            let bundle = algorithm_one_upto(&CatalogSpec::parse(&group)?, max_degree)?;
            let pres = &bundle.presentation;
            print!("{}", render_presentation(pres));
            print!("{}", render_equivariant_file(&bundle.bases, pres.vars()));
            for pi in &bundle.pis {
                println!("# pi {}", pi.label());
                for k in 0..pi.size() {
                    for l in k..pi.size() {
                        println!("pi {} {} {}", k + 1, l + 1, render_invariant(pi.entry(k, l), pres));
                    }
                }
            }
            if let Some(d) = bundle.omitted_from {
                println!("# truncated: basis vectors with Π diagonal degree {d} or more are omitted");
            }
            Ok(0)
        }
        Command::Verify { cert, poly } => {
            let cert = parse_certificate(&read(&cert)?)?;
            let f = read_polynomial(&poly)?;
            let report = verify_certificate(&cert, &f);
            if report.valid {
                println!(
                    "certificate verifies: f - ({}) is a sum of squares",
                    render_value(&cert.lambda)
                );
                Ok(0)
            } else {
                println!("verification failed: {}", report.failure.unwrap_or_default());
                Ok(EXIT_VERIFICATION_FAILED)
            }
        }
    }
}

fn bound(spec: &CatalogSpec, f: &Polynomial, round: bool, plain: bool, out: Option<&Path>) -> symsos::Result<u8> {
    if f.degree() == Degree::NegInfinity {
        return Err(Error::NoCertificate("the zero polynomial has no degree".into()));
    }
    let (lambda, cert) = match (plain, round) {
        (true, _) => {
            let b = plain_lower_bound(f, Some(spec))?;
            let cert = if round {
                round_certificate(&b.certificate, f, &DEFAULT_SCHEDULE)?
            } else {
                b.certificate
            };
            (b.lambda, cert)
        }
        (false, true) => certify_lower_bound(f, spec, &DEFAULT_SCHEDULE)?,
        (false, false) => sos_lower_bound(f, spec)?,
    };
    println!("group {}", spec.name());
    println!("lambda ~ {lambda:.12}");
    println!("blocks {}", sizes(&cert));
    if round {
        let report = verify_certificate(&cert, f);
        if !report.valid {
            eprintln!("rounded certificate fails: {}", report.failure.unwrap_or_default());
            return Ok(EXIT_VERIFICATION_FAILED);
        }
        println!("lambda exact {}", render_value(&cert.lambda));
        println!("certificate verifies");
    }
    if let Some(path) = out {
        std::fs::write(path, render_certificate(&cert)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        println!("certificate written to {}", path.display());
    }
    Ok(0)
}

fn sizes(cert: &Certificate) -> String {
    cert.block_sizes()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Exact(q) => render_rational(q),
        Value::Float(x) => format!("~{x}"),
    }
}
