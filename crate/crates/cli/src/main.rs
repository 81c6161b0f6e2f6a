mod error;
mod input;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subspace_heights::config::{fmt_num, Tolerances};
use subspace_heights::exponents::{estimate_exponents, record_curve, EnumOptions, EstimateOptions, Target};
use subspace_heights::geometry::{mu, mu_wedge, principal_data};
use subspace_heights::goingdown::{going_down, GoingDownOptions};
use subspace_heights::height::{height_ideal, height_lattice, SubspaceSpec};
use subspace_heights::Error;

use error::{CliError, CliResult};
use input::{load_field, load_json, load_numeric, parse_target, to_pretty_json, InstanceFile, TargetArg};

#[derive(Parser)]
#[command(name = "sheights", version, about = "Heights of subspaces over number fields, angles, going down and approximation exponents")]
struct Cli {
    /// Base relative tolerance; overrides SH_PRECISION.
    #[arg(long, global = true)]
    precision: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariants of a number field.
    Field {
        /// Builtin name or field spec file.
        field: String,
    },
    /// Height of a subspace, computed through the ideal and through the lattice.
    Height { subspace: PathBuf },
    /// Principal angles between two subspaces.
    Angles { a: PathBuf, b: PathBuf },
    /// mu(A, B) as a product of sines and as a wedge quotient.
    Mu { a: PathBuf, b: PathBuf },
    /// Run going down on an instance file and print the certificate.
    Goingdown {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Record curve and exponent estimates for a target vector.
    Exponents {
        #[arg(long)]
        field: String,
        /// The target lives in K^(n+1).
        #[arg(long)]
        n: usize,
        /// Subspaces of dimension j + 1.
        #[arg(long)]
        j: usize,
        #[arg(long)]
        qmax: f64,
        /// `re[:im],...` or `algebraic:<json entries>`.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Lower end of the estimation window (default Qmax / 10).
        #[arg(long)]
        floor: Option<f64>,
        /// Search radius safety factor.
        #[arg(long)]
        kappa: Option<f64>,
        /// CSV output for the record curve.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite and print a pass/fail table.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn tolerances(precision: Option<f64>) -> CliResult<Tolerances> {
    let tol = match precision {
        Some(p) => Tolerances::with_base(p),
        None => Tolerances::from_env(),
    };
    if !tol.is_valid() {
        return Err(CliError::Usage(format!("tolerances must be positive, got {}", tol.rel)));
    }
    Ok(tol)
}

fn write_out(path: &PathBuf, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn run(cli: Cli) -> CliResult<u8> {
    let tol = tolerances(cli.precision)?;
    let mut stdout = std::io::stdout().lock();
    let mut say = |s: String| {
        let _ = writeln!(stdout, "{s}");
    };
    match cli.command {
        Command::Field { field } => {
            let k = load_field(&field)?;
            let (r1, r2) = k.signature();
            say(format!("name       {}", k.name()));
            say(format!("degree     {}", k.degree()));
            say(format!("signature  ({r1}, {r2})"));
            say(format!("disc       {}", k.disc()));
            say(format!("delta      {}", fmt_num(k.delta())));
            say(format!("q          {}", k.q()));
            for (i, z) in k.roots().iter().enumerate() {
                say(format!("sigma_{}    {} {}", i + 1, fmt_num(z.re), fmt_num(z.im)));
            }
        }
        Command::Height { subspace } => {
            let spec: SubspaceSpec = load_json(&subspace)?;
            let s = spec.build("$")?;
            let (hi, hl) = (height_ideal(&s)?, height_lattice(&s)?);
            say(format!("ideal    {}", fmt_num(hi)));
            say(format!("lattice  {}", fmt_num(hl)));
            if (hi - hl).abs() > 1e-6 * hi.max(hl) {
                eprintln!("heights disagree");
                return Ok(1);
            }
        }
        Command::Angles { a, b } => {
            let (na, _) = load_numeric(&a, &tol)?;
            let (nb, _) = load_numeric(&b, &tol)?;
            let pd = principal_data(&na, &nb)?;
            for (i, (l, w)) in pd.lambdas.iter().zip(&pd.omegas).enumerate() {
                say(format!("{}  lambda {}  omega {}", i + 1, fmt_num(*l), fmt_num(*w)));
            }
        }
        Command::Mu { a, b } => {
            let (na, ba) = load_numeric(&a, &tol)?;
            let (nb, bb) = load_numeric(&b, &tol)?;
            let m = mu(&na, &nb)?;
            say(format!("product  {}", fmt_num(m)));
            if ba.len() + bb.len() <= na.ambient() {
                let w = mu_wedge(&ba, &bb)?;
                say(format!("wedge    {}", fmt_num(w)));
                if (m - w).abs() > 1e-8 {
                    eprintln!("mu definitions disagree");
                    return Ok(1);
                }
            }
        }
        Command::Goingdown { instance, out } => {
            let inst: InstanceFile = load_json(&instance)?;
            let inp = inst.build(&tol)?;
            let cert = going_down(&inp, &GoingDownOptions { tol: tol.clone(), ..Default::default() })?;
            let text = to_pretty_json(&cert)?;
            match out {
                Some(p) => write_out(&p, &(text + "\n"))?,
                None => say(text),
            }
            if !cert.invariants.all() {
                return Ok(1);
            }
        }
        Command::Exponents { field, n, j, qmax, target, floor, kappa, out } => {
            let k = load_field(&field)?;
            let t = match parse_target(&target)? {
                TargetArg::Floats(u) => Target::numeric(&u)?,
                TargetArg::Algebraic(entries) => {
                    let v = entries
                        .iter()
                        .enumerate()
                        .map(|(i, e)| e.build(&k, &format!("--target[{i}]")))
                        .collect::<Result<Vec<_>, Error>>()?;
                    Target::algebraic(&k, v)?
                }
            };
            if t.len() != n + 1 {
                return Err(CliError::Usage(format!("--target has {} entries, expected n + 1 = {}", t.len(), n + 1)));
            }
            let opts = EnumOptions { kappa, ..Default::default() };
            let curve = record_curve(&k, &t, j, qmax, &opts)?;
            if let Some(p) = &out {
                let mut w = csv::Writer::from_path(p)?;
                w.write_record(["H", "H*omega^q", "plucker"])?;
                for r in &curve.records {
                    let pl: Vec<String> = r.plucker.iter().map(|c| format!("[{}]", c.join(" "))).collect();
                    w.write_record([fmt_num(r.height), fmt_num(r.value), pl.join(" ")])?;
                }
                w.flush().map_err(|source| CliError::Io { path: p.clone(), source })?;
            }
            let cov = &curve.coverage;
            say(format!("records    {}", curve.records.len()));
            say(format!(
                "coverage   kappa={} exact={} shells={} points={} truncated={}",
                fmt_num(cov.kappa),
                cov.exact,
                cov.shells,
                cov.points_examined,
                cov.truncated
            ));
            let est = estimate_exponents(&curve, &EstimateOptions { floor })?;
            say(format!("window     [{}, {}]", fmt_num(est.window_lo), fmt_num(qmax)));
            say(format!("omega      {}", fmt_num(est.omega)));
            say(format!("omega_hat  {}", fmt_num(est.omega_hat)));
            if let Some(s) = est.slope {
                say(format!("slope      {}", fmt_num(s)));
            }
            if let Some((a, b)) = est.decade_delta {
                say(format!("decade_delta  {} {}", fmt_num(a), fmt_num(b)));
            }
        }
        Command::Verify { seed, jobs, out } => {
            let results = verify::run(seed, jobs, &tol)?;
            let text = verify::render(&results);
            match out {
                Some(p) => write_out(&p, &text)?,
                None => say(text.trim_end().to_string()),
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(1);
            }
        }
    }
    Ok(0)
}
