//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bishop::NormalDevelopment;
use crate::curve::CurveSpec;
use crate::error::Error;
use crate::gallery::{self, Payload};
use crate::io::{self, Format, Table};
use crate::lift::lift;
use crate::pipeline::{check, default_samples, prepare, run_frame};
use crate::tolerances::Tolerances;

#[derive(Debug, Parser)]
#[command(name = "framecast", version, about = "Curve frames that survive curvature zeros")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All frame fields of a curve.
    Frame(RunArgs),
    /// Polar lift of a normal development.
    Lift(RunArgs),
    /// Frame-equation residuals and their convergence order.
    Check(RunArgs),
    /// Built-in examples.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum GalleryAction {
    List,
}

#[derive(Debug, Args)]
#[group(id = "input", required = true, multiple = false)]
pub struct Input {
    /// Built-in entry name.
    #[arg(long)]
    pub gallery: Option<String>,
    /// Curve definition, e.g. "(cos(t), sin(t), t) t in (0, 6)".
    #[arg(long)]
    pub dsl: Option<String>,
    /// CSV file: `t,x,y,z` for curves, `s,k1,k2` for developments.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: Input,
    /// Grid size; `check` also takes "COARSE,FINE".
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub tol_kappa: Option<f64>,
    #[arg(long)]
    pub tol_limit: Option<f64>,
    #[arg(long)]
    pub tol_c1: Option<f64>,
}

impl RunArgs {
    fn tolerances(&self) -> Result<Tolerances, Error> {
        let mut t = Tolerances::default();
        for (slot, v, name) in [
            (&mut t.kappa, self.tol_kappa, "tol-kappa"),
            (&mut t.limit, self.tol_limit, "tol-limit"),
            (&mut t.c1, self.tol_c1, "tol-c1"),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Input(format!("--{name} must be positive")));
                }
                *slot = v;
            }
        }
        Ok(t)
    }

    fn sample_list(&self) -> Result<Vec<usize>, Error> {
        let Some(s) = &self.samples else { return Ok(Vec::new()) };
        let v: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Input(format!("bad --samples value {p:?}"))))
            .collect::<Result<_, _>>()?;
        if v.iter().any(|&n| n < 16) {
            return Err(Error::Input("--samples must be at least 16".into()));
        }
        Ok(v)
    }

    fn single_samples(&self) -> Result<Option<usize>, Error> {
        match self.sample_list()?.as_slice() {
            [] => Ok(None),
            [n] => Ok(Some(*n)),
            _ => Err(Error::Input("this command takes a single --samples value".into())),
        }
    }

    fn name(&self) -> String {
        self.input.gallery
            .clone()
            .or_else(|| self.input.csv.as_ref().map(|p| p.display().to_string()))
            .unwrap_or_else(|| "dsl".into())
    }

    fn curve(&self) -> Result<CurveSpec<f64>, Error> {
        if let Some(g) = &self.input.gallery {
            return match gallery::find::<f64>(g).ok_or_else(|| Error::UnknownGallery(g.clone()))?.payload {
                Payload::Curve(c) => Ok(c),
                Payload::Development(_) => Err(Error::Input(format!("{g} is a development; use `lift`"))),
            };
        }
        if let Some(d) = &self.input.dsl {
            return Ok(CurveSpec::parse(d)?);
        }
        let path = self.input.csv.as_ref().expect("clap enforces one input");
        let f = fs::File::open(path)?;
        Ok(CurveSpec::from_csv(path.display().to_string(), f)?)
    }

    /// A development: given directly, or from framing a curve input.
    fn development(&self, tol: &Tolerances) -> Result<(NormalDevelopment<f64>, Option<usize>), Error> {
        if let Some(g) = &self.input.gallery {
            if let Payload::Development(d) = gallery::find::<f64>(g).ok_or_else(|| Error::UnknownGallery(g.clone()))?.payload {
                return Ok((d, None));
            }
        }
        if let Some(p) = &self.input.csv {
            return Ok((io::read_development(fs::File::open(p)?)?, None));
        }
        let run = run_frame(self.curve()?, self.single_samples()?, tol)?;
        let base = run.bishop.base_index;
        Ok((run.development, Some(base)))
    }
}

/// Write every file to a temporary name first, then rename, so a failure
/// leaves nothing behind.
fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::new();
    for (name, bytes) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        let res = fs::File::create(&tmp).and_then(|mut f| f.write_all(bytes));
        if let Err(e) = res {
            let _ = fs::remove_file(&tmp);
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e.into());
        }
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, dst) in staged {
        fs::rename(tmp, dst)?;
    }
    Ok(())
}

fn render(table: &Table, format: Format) -> Vec<u8> {
    let mut buf = Vec::new();
    table.write(format, &mut buf).expect("writing to memory");
    buf
}

fn cmd_frame(a: &RunArgs, stdout: &mut dyn Write) -> Result<(), Error> {
    let tol = a.tolerances()?;
    let run = run_frame(a.curve()?, a.single_samples()?, &tol)?;
    let beta = run.beta()?;
    let ext = a.format.extension();
    let mut files = vec![
        (format!("frenet.{ext}"), render(&io::frenet_table(&run.frenet), a.format)),
        (format!("bishop.{ext}"), render(&io::bishop_table(&run.bishop), a.format)),
        (format!("beta.{ext}"), render(&io::beta_table(beta), a.format)),
        (format!("development.{ext}"), render(&io::development_table(&run.development), a.format)),
    ];
    let mut meta = io::lift_report(&a.name(), &run.analysis, &run.lift);
    meta["samples"] = run.curve.len().into();
    meta["total_length"] = run.curve.total_length().into();
    meta["base_kind"] = serde_json::to_value(run.bishop.base_kind).expect("serializable");
    meta["planar"] = run.planar.is_some().into();
    if let Some(interp) = run.curve.source().interpolation {
        meta["interpolation"] = interp.into();
    }
    files.push(("frame.json".into(), serde_json::to_vec_pretty(&meta).expect("serializable")));
    write_all(&a.out, &files)?;
    writeln!(stdout, "framed {} ({} samples) into {}", a.name(), run.curve.len(), a.out.display())?;
    Ok(())
}

fn cmd_lift(a: &RunArgs, stdout: &mut dyn Write) -> Result<i32, Error> {
    let tol = a.tolerances()?;
    let (nd, base) = a.development(&tol)?;
    let (analysis, l) = lift(&nd, base, &tol);
    let report = io::lift_report(&a.name(), &analysis, &l);
    if !l.verdict.is_liftable() {
        writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
        return Err(verdict_error(&l.verdict));
    }
    let ext = a.format.extension();
    write_all(
        &a.out,
        &[
            (format!("lift.{ext}"), render(&io::lift_table(&l), a.format)),
            ("lift.json".into(), serde_json::to_vec_pretty(&report).expect("serializable")),
        ],
    )?;
    writeln!(stdout, "liftable: {} zero(s), written to {}", analysis.zeros.len(), a.out.display())?;
    Ok(0)
}

fn verdict_error(v: &crate::lift::Verdict<f64>) -> Error {
    use crate::beta::BetaError;
    use crate::lift::Verdict;
    match *v {
        Verdict::NotLiftable { reason, s0, mismatch, .. } => Error::Beta(BetaError::NotLiftable { reason, s0, mismatch }),
        Verdict::Unsupported { s0, .. } => Error::Beta(BetaError::Unsupported { s0 }),
        Verdict::Liftable => unreachable!("only failures are converted"),
    }
}

fn cmd_check(a: &RunArgs, stdout: &mut dyn Write) -> Result<(), Error> {
    let tol = a.tolerances()?;
    let spec = a.curve()?;
    let (coarse, fine) = match a.sample_list()?.as_slice() {
        [] => {
            let n = default_samples(prepare(spec.clone(), Some(257))?.total_length());
            (n, 2 * n - 1)
        }
        [n] => (*n, 2 * n - 1),
        [c, f] => (*c, *f),
        _ => return Err(Error::Input("--samples takes one or two values".into())),
    };
    let rep = check(spec, coarse, fine, &tol)?;
    for r in [&rep.coarse, &rep.fine] {
        writeln!(
            stdout,
            "h={:.6e} residual_T={:.3e} residual_N={:.3e} residual_B={:.3e}",
            r.h, r.tangent, r.normal, r.binormal
        )?;
    }
    let show = |o: Option<f64>| o.map_or("roundoff".to_string(), |v| format!("{v:.3}"));
    writeln!(
        stdout,
        "order_T={} order_N={} order_B={} second_order={}",
        show(rep.order[0]),
        show(rep.order[1]),
        show(rep.order[2]),
        rep.satisfied(3.5)
    )?;
    Ok(())
}

fn cmd_gallery_list(stdout: &mut dyn Write) -> Result<(), Error> {
    for e in gallery::gallery::<f64>() {
        writeln!(stdout, "{:<14} {:<12} {}", e.name, e.kind(), e.expected.summary())?;
    }
    Ok(())
}

/// Parse `args`, run, and return the exit status. Errors go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let res = match &cli.command {
        Command::Frame(a) => cmd_frame(a, stdout).map(|_| 0),
        Command::Lift(a) => cmd_lift(a, stdout),
        Command::Check(a) => cmd_check(a, stdout).map(|_| 0),
        Command::Gallery { action: GalleryAction::List } => cmd_gallery_list(stdout).map(|_| 0),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
