use std::fmt;
use std::path::PathBuf;

use clap::Parser;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or inputs; exit status 2.
    Usage(String),
    /// A checked property failed; exit status 1.
    Violation(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Violation(m) => write!(f, "property violation: {m}"),
        }
    }
}

impl From<jtcalc_core::Error> for CliError {
    fn from(e: jtcalc_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

#[derive(Parser, Debug, Default, Clone)]
#[command(name = "jtcalc", version, about = "Jordan types of modules for Frobenius kernels of exponential-type groups")]
pub struct Args {
    /// jt, strata, minors, closed, semicont, tensor, dominance, perp, power or suite
    pub command: String,
    /// Jordan types for tensor, dominance, perp and power
    pub operands: Vec<String>,
    /// key = value file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u32>,
    /// GF(p), GF(q) or GF(p)[x]/(f); defaults to GF(p)
    #[arg(long)]
    pub field: Option<String>,
    /// built-in chart name or chart file
    #[arg(long)]
    pub chart: Option<String>,
    /// chart height
    #[arg(long)]
    pub r: Option<usize>,
    /// matrix size N for upper_glN
    #[arg(long)]
    pub size: Option<usize>,
    /// number of additive factors for multi_ga
    #[arg(long)]
    pub factors: Option<usize>,
    #[arg(long)]
    pub module: Option<String>,
    /// full, exp or homotopy
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    /// chart point, `a=1,b=0,...` or positional
    #[arg(long)]
    pub point: Option<String>,
    /// Jordan type for closed
    #[arg(long = "type")]
    pub jt: Option<String>,
    /// substitutions `a=t^2,b=1,...` for semicont
    #[arg(long)]
    pub curve: Option<String>,
    /// number of random curves for semicont
    #[arg(long)]
    pub curves: Option<usize>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// text, jsonl or csv
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// quick or full, for suite
    #[arg(long)]
    pub level: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Jt,
    Strata,
    Minors,
    Closed,
    Semicont,
    Tensor,
    Dominance,
    Perp,
    Power,
    Suite,
}

impl Command {
    fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "jt" => Command::Jt,
            "strata" => Command::Strata,
            "minors" => Command::Minors,
            "closed" => Command::Closed,
            "semicont" => Command::Semicont,
            "tensor" => Command::Tensor,
            "dominance" => Command::Dominance,
            "perp" => Command::Perp,
            "power" => Command::Power,
            "suite" => Command::Suite,
            other => return Err(usage(format!("unknown command `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Jt => "jt",
            Command::Strata => "strata",
            Command::Minors => "minors",
            Command::Closed => "closed",
            Command::Semicont => "semicont",
            Command::Tensor => "tensor",
            Command::Dominance => "dominance",
            Command::Perp => "perp",
            Command::Power => "power",
            Command::Suite => "suite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Jsonl,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VariantSpec {
    Full,
    Exp,
    Homotopy { s: String, t: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

pub const DEFAULT_CURVES: usize = 50;
pub const DEFAULT_SUITE_SEED: u64 = 42;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub operands: Vec<String>,
    pub p: Option<u32>,
    pub field: Option<String>,
    pub chart: Option<String>,
    pub r: Option<usize>,
    pub size: Option<usize>,
    pub factors: Option<usize>,
    pub module: Option<String>,
    pub variant: VariantSpec,
    pub j: Option<u32>,
    pub d: Option<usize>,
    pub point: Option<String>,
    pub jt: Option<String>,
    pub curve: Option<String>,
    pub curves: usize,
    pub budget: u64,
    pub samples: usize,
    pub seed: Option<u64>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub level: Level,
}

const FILE_KEYS: [&str; 23] = [
    "p", "field", "chart", "r", "size", "factors", "module", "variant", "s", "t", "j", "d", "point", "type",
    "curve", "curves", "budget", "samples", "seed", "format", "output", "level", "operands",
];

/// Fills unset flags from a `key = value` file. Blank lines and `#`
/// comments are skipped.
pub fn merge_file(args: &mut Args, text: &str) -> CliResult<()> {
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap();
        if line.trim().is_empty() {
            continue;
        }
        let at = |col: usize, m: String| usage(format!("config {}:{}: {m}", ln + 1, col));
        let Some(eq) = line.find('=') else {
            let col = line.len() - line.trim_start().len() + 1;
            return Err(at(col, format!("expected `key = value`, got `{}`", line.trim())));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim().to_string();
        let kcol = line.len() - line.trim_start().len() + 1;
        let vcol = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        if !FILE_KEYS.contains(&key) {
            return Err(at(kcol, format!("unknown key `{key}`")));
        }
        fn num<T: std::str::FromStr>(v: &str, col: usize, at: &dyn Fn(usize, String) -> CliError) -> CliResult<T> {
            v.parse().map_err(|_| at(col, format!("`{v}` is not a valid number")))
        }
        macro_rules! fill {
            ($slot:expr, $v:expr) => {
                if $slot.is_none() {
                    $slot = Some($v);
                }
            };
        }
        match key {
            "p" => fill!(args.p, num(&value, vcol, &at)?),
            "field" => fill!(args.field, value),
            "chart" => fill!(args.chart, value),
            "r" => fill!(args.r, num(&value, vcol, &at)?),
            "size" => fill!(args.size, num(&value, vcol, &at)?),
            "factors" => fill!(args.factors, num(&value, vcol, &at)?),
            "module" => fill!(args.module, value),
            "variant" => fill!(args.variant, value),
            "s" => fill!(args.s, value),
            "t" => fill!(args.t, value),
            "j" => fill!(args.j, num(&value, vcol, &at)?),
            "d" => fill!(args.d, num(&value, vcol, &at)?),
            "point" => fill!(args.point, value),
            "type" => fill!(args.jt, value),
            "curve" => fill!(args.curve, value),
            "curves" => fill!(args.curves, num(&value, vcol, &at)?),
            "budget" => fill!(args.budget, num(&value, vcol, &at)?),
            "samples" => fill!(args.samples, num(&value, vcol, &at)?),
            "seed" => fill!(args.seed, num(&value, vcol, &at)?),
            "format" => fill!(args.format, value),
            "output" => fill!(args.output, PathBuf::from(value)),
            "level" => fill!(args.level, value),
            "operands" => {
                if args.operands.is_empty() {
                    args.operands = value.split_whitespace().map(str::to_string).collect();
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}

/// Flags, then the optional config file, then defaults; checks that the
/// command has what it needs.
pub fn parse_config(args: Args, file: Option<&str>) -> CliResult<RunConfig> {
    let mut args = args;
    if let Some(text) = file {
        merge_file(&mut args, text)?;
    }
    let command = Command::parse(&args.command)?;
    let variant = match args.variant.as_deref().unwrap_or("full") {
        "full" => VariantSpec::Full,
        "exp" => VariantSpec::Exp,
        "homotopy" => VariantSpec::Homotopy {
            s: args.s.clone().ok_or_else(|| usage("homotopy variant needs --s"))?,
            t: args.t.clone().ok_or_else(|| usage("homotopy variant needs --t"))?,
        },
        other => return Err(usage(format!("unknown variant `{other}`"))),
    };
    if !matches!(variant, VariantSpec::Homotopy { .. }) && (args.s.is_some() || args.t.is_some()) {
        return Err(usage("--s and --t apply only to --variant homotopy"));
    }
    let format = match args.format.as_deref().unwrap_or("text") {
        "text" => OutputFormat::Text,
        "jsonl" => OutputFormat::Jsonl,
        "csv" => OutputFormat::Csv,
        other => return Err(usage(format!("unknown format `{other}`"))),
    };
    let level = match args.level.as_deref().unwrap_or("full") {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => return Err(usage(format!("unknown level `{other}`"))),
    };
    let cfg = RunConfig {
        command,
        operands: args.operands,
        p: args.p,
        field: args.field,
        chart: args.chart,
        r: args.r,
        size: args.size,
        factors: args.factors,
        module: args.module,
        variant,
        j: args.j,
        d: args.d,
        point: args.point,
        jt: args.jt,
        curve: args.curve,
        curves: args.curves.unwrap_or(DEFAULT_CURVES),
        budget: args.budget.unwrap_or(jtcalc_core::strata::DEFAULT_BUDGET),
        samples: args.samples.unwrap_or(jtcalc_core::strata::DEFAULT_SAMPLES),
        seed: args.seed,
        format,
        output: args.output,
        level,
    };
    cfg.check()?;
    Ok(cfg)
}

impl RunConfig {
    fn check(&self) -> CliResult<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(usage(format!("`{}` needs {what}", self.command.name())))
            }
        };
        let operands = |n: usize| need(self.operands.len() == n, &format!("{n} Jordan type operand(s)"));
        let prime = || need(self.p.is_some() || self.field.is_some(), "--p or --field");
        match self.command {
            Command::Jt => {
                need(self.module.is_some(), "--module")?;
                need(self.chart.is_some(), "--chart")?;
                need(self.point.is_some(), "--point")
            }
            Command::Strata | Command::Closed | Command::Semicont => {
                need(self.module.is_some(), "--module")?;
                need(self.chart.is_some(), "--chart")
            }
            Command::Minors => {
                need(self.module.is_some(), "--module")?;
                need(self.chart.is_some(), "--chart")?;
                need(self.j.is_some(), "--j")?;
                need(self.d.is_some(), "--d")
            }
            Command::Tensor | Command::Dominance => {
                operands(2)?;
                prime()
            }
            Command::Perp => {
                operands(1)?;
                prime()
            }
            Command::Power => {
                operands(1)?;
                prime()?;
                need(self.j.is_some(), "--j")
            }
            Command::Suite => Ok(()),
        }?;
        if self.budget == 0 {
            return Err(usage("--budget must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("jtcalc").chain(v.iter().copied())).unwrap()
    }

    #[test]
    fn jt_command() {
        let cfg = parse_config(
            args(&[
                "jt", "--p", "3", "--chart", "sl2_line", "--r", "2", "--module",
                "Sym(1,Std(2))*Tw(1,Sym(1,Std(2)))", "--point", "0,1,0,1,1",
            ]),
            None,
        )
        .unwrap();
        assert_eq!(cfg.command, Command::Jt);
        assert_eq!(cfg.r, Some(2));
        assert_eq!(cfg.variant, VariantSpec::Full);
        assert!(matches!(
            parse_config(args(&["jt", "--p", "3", "--chart", "ga_r", "--point", "1"]), None),
            Err(CliError::Usage(m)) if m.contains("--module")
        ));
    }

    #[test]
    fn homotopy_and_errors() {
        let cfg = parse_config(args(&["strata", "--chart", "ga_r", "--module", "Std(2)", "--variant", "homotopy", "--s", "1", "--t", "1"]), None)
            .unwrap();
        assert_eq!(cfg.variant, VariantSpec::Homotopy { s: "1".into(), t: "1".into() });
        assert!(parse_config(args(&["strata", "--chart", "ga_r", "--module", "Std(2)", "--variant", "homotopy"]), None).is_err());
        assert!(parse_config(args(&["frobnicate"]), None).is_err());
        assert!(parse_config(args(&["dominance", "[3]", "--p", "3"]), None).is_err());
    }

    #[test]
    fn file_values_yield_to_flags() {
        let file = "# defaults\nmodule = Std(2)*Tw(1,Std(2))\nchart = ga_r\np = 5\nseed = 7\n";
        let cfg = parse_config(args(&["strata", "--p", "3"]), Some(file)).unwrap();
        assert_eq!(cfg.p, Some(3));
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.module.as_deref(), Some("Std(2)*Tw(1,Std(2))"));

        let err = parse_config(args(&["strata"]), Some("chart = ga_r\n  colour = red\n")).unwrap_err();
        assert!(matches!(err, CliError::Usage(ref m) if m.contains("config 2:3: unknown key `colour`")), "{err}");
        let err = parse_config(args(&["strata"]), Some("seed = x\n")).unwrap_err();
        assert!(matches!(err, CliError::Usage(ref m) if m.contains("config 1:8")), "{err}");
    }
}
