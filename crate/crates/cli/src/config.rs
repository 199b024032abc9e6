use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use dynframe::sequences::{Family, SequenceSpec};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// List the points of a sequence.
    Gen,
    /// Truncated Carleson infimum.
    Carleson,
    /// Frame bounds of the closed-form frame operator.
    Bounds,
    /// Two-factor sweep over truncation sizes.
    Tensor,
    /// Minimal-norm interpolation of random data.
    Interp,
    /// Round-trip reconstruction of random signals.
    Reconstruct,
    /// One table combining separation, bounds and conditioning.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Carleson => "carleson",
            Command::Bounds => "bounds",
            Command::Tensor => "tensor",
            Command::Interp => "interp",
            Command::Reconstruct => "reconstruct",
            Command::Report => "report",
        }
    }

    pub fn randomized(self) -> bool {
        matches!(self, Command::Interp | Command::Reconstruct)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Command-line flags. Every field may also come from `--config`.
#[derive(Debug, Default, Parser)]
#[command(
    name = "dynframe",
    version,
    about = "Dynamical-sampling frame experiments"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// geometric | polynomial | geometric_with_phases
    #[arg(long)]
    pub family: Option<String>,
    /// Base c (geometric families) or power p (polynomial).
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Phase step for geometric_with_phases.
    #[arg(long, allow_negative_numbers = true)]
    pub phase: Option<f64>,
    /// First factor as family:param:count[:phase].
    #[arg(long)]
    pub a: Option<String>,
    /// Second factor as family:param:count[:phase].
    #[arg(long)]
    pub b: Option<String>,
    /// Comma-separated truncation sizes.
    #[arg(long, value_delimiter = ',')]
    pub klist: Option<Vec<usize>>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random draws per truncation (interp, reconstruct).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with the same fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Command>,
    family: Option<String>,
    param: Option<f64>,
    count: Option<usize>,
    phase: Option<f64>,
    a: Option<String>,
    b: Option<String>,
    klist: Option<Vec<usize>>,
    tol: Option<f64>,
    seed: Option<u64>,
    trials: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    /// The sequence, or the first factor for `tensor`.
    pub sequence: SequenceSpec,
    /// Second factor, `tensor` only.
    pub factor_b: Option<SequenceSpec>,
    pub k_list: Vec<usize>,
    pub tol: f64,
    pub seed: Option<u64>,
    pub trials: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn family_spec(
    flag: &str,
    family: &str,
    param: f64,
    count: usize,
    phase: Option<f64>,
) -> Result<SequenceSpec, CliError> {
    let family = match family {
        "geometric" => Family::Geometric { base: param },
        "polynomial" => Family::Polynomial { power: param },
        "geometric_with_phases" => Family::GeometricWithPhases {
            base: param,
            phase_step: phase.ok_or_else(|| {
                config_err(format!("{flag}: geometric_with_phases needs a phase step"))
            })?,
        },
        other => return Err(config_err(format!("{flag}: unknown family '{other}'"))),
    };
    let spec = SequenceSpec { family, count };
    spec.validate()
        .map_err(|e| config_err(format!("{flag}: {e}")))?;
    Ok(spec)
}

/// Parses `family:param:count[:phase]`.
pub fn parse_shorthand(flag: &str, text: &str) -> Result<SequenceSpec, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(config_err(format!(
            "{flag}: expected family:param:count[:phase], got '{text}'"
        )));
    }
    let num = |s: &str, what: &str| {
        s.parse::<f64>()
            .map_err(|_| config_err(format!("{flag}: invalid {what} '{s}'")))
    };
    let param = num(parts[1], "param")?;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|_| config_err(format!("{flag}: invalid count '{}'", parts[2])))?;
    let phase = parts.get(3).map(|p| num(p, "phase")).transpose()?;
    family_spec(flag, parts[0], param, count, phase)
}

/// Shorthand rendering used in report provenance.
pub fn shorthand(spec: &SequenceSpec) -> String {
    match &spec.family {
        Family::Geometric { base } => format!("geometric:{base}:{}", spec.count),
        Family::Polynomial { power } => format!("polynomial:{power}:{}", spec.count),
        Family::GeometricWithPhases { base, phase_step } => {
            format!("geometric_with_phases:{base}:{}:{phase_step}", spec.count)
        }
        Family::Explicit(_) => spec.to_string(),
    }
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("--config {}: {e}", path.display())))
}

/// Parses an argument vector (including the program name).
pub fn parse_config<I, T>(argv: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(CliError::Usage)?;
    resolve(args)
}

/// Merges flags over the optional config file and validates the result.
pub fn resolve(args: Args) -> Result<ExperimentConfig, CliError> {
    let file = match &args.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    let command = args
        .command
        .or(file.command)
        .ok_or_else(|| config_err("no command given"))?;
    let family = args.family.or(file.family);
    let param = args.param.or(file.param);
    let count = args.count.or(file.count);
    let phase = args.phase.or(file.phase);
    let a = args.a.or(file.a);
    let b = args.b.or(file.b);
    let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
    let seed = args.seed.or(file.seed);
    let trials = args.trials.or(file.trials).unwrap_or(1);
    let out = args.out.or(file.out);
    let format = args.format.or(file.format).unwrap_or_default();
    let klist = args.klist.or(file.klist);

    if !(tol > 0.0 && tol < 1.0) {
        return Err(config_err(format!("--tol: {tol} must lie in (0, 1)")));
    }
    if trials == 0 {
        return Err(config_err("--trials: must be at least 1"));
    }
    if command.randomized() && seed.is_none() {
        return Err(config_err(format!(
            "--seed: required by '{}'",
            command.name()
        )));
    }

    let from_flags = || -> Result<Option<SequenceSpec>, CliError> {
        match (&family, param, count) {
            (None, None, None) => Ok(None),
            (Some(f), Some(p), Some(c)) => family_spec("--family", f, p, c, phase).map(Some),
            (None, _, _) => Err(config_err("--family: missing")),
            (_, None, _) => Err(config_err("--param: missing")),
            (_, _, None) => Err(config_err("--count: missing")),
        }
    };

    let (sequence, factor_b) = if command == Command::Tensor {
        let a = a.ok_or_else(|| config_err("--a: required by 'tensor'"))?;
        let b = b.ok_or_else(|| config_err("--b: required by 'tensor'"))?;
        (
            parse_shorthand("--a", &a)?,
            Some(parse_shorthand("--b", &b)?),
        )
    } else {
        let spec = match (from_flags()?, a) {
            (Some(spec), None) => spec,
            (None, Some(a)) => parse_shorthand("--a", &a)?,
            (Some(_), Some(_)) => {
                return Err(config_err("--a: conflicts with --family/--param/--count"))
            }
            (None, None) => return Err(config_err("--family: a sequence is required")),
        };
        if b.is_some() {
            return Err(config_err(format!("--b: not used by '{}'", command.name())));
        }
        (spec, None)
    };

    let max_k = factor_b
        .as_ref()
        .map_or(sequence.count, |b| b.count.min(sequence.count));
    let k_list = match klist {
        Some(list) => list,
        None => vec![max_k],
    };
    if k_list.is_empty() {
        return Err(config_err("--klist: empty"));
    }
    if let Some(&bad) = k_list.iter().find(|&&k| k == 0 || k > max_k) {
        return Err(config_err(format!("--klist: {bad} is outside 1..={max_k}")));
    }

    Ok(ExperimentConfig {
        command,
        sequence,
        factor_b,
        k_list,
        tol,
        seed,
        trials,
        out,
        format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<ExperimentConfig, CliError> {
        parse_config(std::iter::once("dynframe").chain(args.split_whitespace()))
    }

    #[test]
    fn gen_config() {
        let c = parse("gen --family polynomial --param 2 --count 5").unwrap();
        assert_eq!(c.command, Command::Gen);
        assert_eq!(c.sequence, SequenceSpec::polynomial(2.0, 5));
        assert_eq!(c.k_list, vec![5]);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.tol, DEFAULT_TOL);
    }

    #[test]
    fn out_of_range_param() {
        let e = parse("bounds --family geometric --param 1.5 --count 4").unwrap_err();
        assert!(matches!(&e, CliError::Config(m) if m.starts_with("--family")));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn tensor_shorthand() {
        let c = parse("tensor --a geometric:0.5:8 --b polynomial:2:6 --klist 2,4,6").unwrap();
        assert_eq!(c.sequence, SequenceSpec::geometric(0.5, 8));
        assert_eq!(c.factor_b, Some(SequenceSpec::polynomial(2.0, 6)));
        assert_eq!(c.k_list, vec![2, 4, 6]);
        assert!(parse("tensor --a geometric:0.5:8 --b polynomial:2:6 --klist 8").is_err());
        assert!(parse("tensor --a geometric:0.5 --b polynomial:2:6").is_err());
        let p = parse("gen --a geometric_with_phases:0.5:4:0.25").unwrap();
        assert_eq!(shorthand(&p.sequence), "geometric_with_phases:0.5:4:0.25");
    }

    #[test]
    fn randomized_commands_need_seed() {
        let e = parse("interp --family geometric --param 0.5 --count 4").unwrap_err();
        assert!(matches!(&e, CliError::Config(m) if m.starts_with("--seed")));
        assert!(parse("interp --family geometric --param 0.5 --count 4 --seed 1").is_ok());
    }

    #[test]
    fn config_file_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.json");
        std::fs::write(
            &path,
            r#"{"command": "bounds", "family": "geometric", "param": 0.5, "count": 6, "klist": [2, 4], "format": "json"}"#,
        )
        .unwrap();
        let c = parse(&format!("--config {}", path.display())).unwrap();
        assert_eq!(c.command, Command::Bounds);
        assert_eq!(c.k_list, vec![2, 4]);
        assert_eq!(c.format, Format::Json);

        let c = parse(&format!(
            "carleson --config {} --count 8 --format csv",
            path.display()
        ))
        .unwrap();
        assert_eq!(c.command, Command::Carleson);
        assert_eq!(c.sequence.count, 8);
        assert_eq!(c.format, Format::Csv);

        std::fs::write(&path, r#"{"command": "bounds", "colour": 1}"#).unwrap();
        assert!(matches!(
            parse(&format!("--config {}", path.display())),
            Err(CliError::Config(_))
        ));
        let missing = dir.path().join("nope.json");
        assert!(matches!(
            parse(&format!("--config {}", missing.display())),
            Err(CliError::Io(_))
        ));
    }

    #[test]
    fn usage_errors() {
        assert!(matches!(parse("frobnicate"), Err(CliError::Usage(_))));
        assert!(matches!(
            parse("--family geometric"),
            Err(CliError::Config(_))
        ));
        assert!(parse("gen --family geometric --param 0.5").is_err());
        assert!(parse("gen --family geometric --param 0.5 --count 3 --tol 0").is_err());
    }
}
