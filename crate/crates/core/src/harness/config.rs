use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::designer::AnnealSchedule;
use crate::error::{Error, Result};
use crate::meanfield::UpdateParams;
use crate::version_space::{BisectParams, GenErrorMethod, DEFAULT_ENUMERATION_LIMIT};

/// Learning strategy for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Uniform random patterns, mean-field student.
    Passive,
    /// Annealed zero-mean-overlap patterns, mean-field student.
    Design,
    /// As `Design`, plus the orthogonality penalty against recent patterns.
    DesignOrtho,
    /// Exact version space with bisecting patterns.
    ExactSmall,
    /// Exact version space with random patterns.
    ExactPassiveSmall,
    /// Balance-point bisection followed by single-flip deduction.
    Deductive,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Passive,
        Mode::Design,
        Mode::DesignOrtho,
        Mode::ExactSmall,
        Mode::ExactPassiveSmall,
        Mode::Deductive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Passive => "passive",
            Mode::Design => "design",
            Mode::DesignOrtho => "design-ortho",
            Mode::ExactSmall => "exact-small",
            Mode::ExactPassiveSmall => "exact-passive-small",
            Mode::Deductive => "deductive",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::ExactSmall | Mode::ExactPassiveSmall)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    /// Largest pattern density `P / N` to simulate.
    pub alpha_max: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub update: UpdateParams,
    pub schedule: AnnealSchedule,
    /// Weight of the orthogonality penalty.
    pub lambda: f64,
    /// Number of recent patterns in the orthogonality penalty; `None` means `N - 1`.
    pub memory: Option<usize>,
    pub bisect: BisectParams,
    pub gen_error: GenErrorMethod,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, n: usize, alpha_max: f64, runs: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            mode,
            n,
            alpha_max,
            runs,
            master_seed,
            update: UpdateParams::default(),
            schedule: AnnealSchedule::default(),
            lambda: 1.0,
            memory: None,
            bisect: BisectParams::default(),
            gen_error: GenErrorMethod::DistanceClasses,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn memory_len(&self) -> usize {
        self.memory.unwrap_or(self.n.saturating_sub(1))
    }

    /// `ceil(alpha_max * N)`.
    pub fn p_max(&self) -> usize {
        // guard against 2.2 * 5 = 11.000000000000002
        (self.alpha_max * self.n as f64 - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n must be a positive odd integer, got {}",
                self.n
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if !(self.alpha_max > 0.0 && self.alpha_max.is_finite()) {
            return Err(Error::Config(format!(
                "alpha-max must be positive, got {}",
                self.alpha_max
            )));
        }
        if self.mode.is_exact() && self.n > DEFAULT_ENUMERATION_LIMIT {
            return Err(Error::Config(format!(
                "mode {} needs n <= {DEFAULT_ENUMERATION_LIMIT}, got {}",
                self.mode, self.n
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        self.update.validate()?;
        self.schedule.validate()
    }
}

/// Values read from a `key = value` file; every field is optional so
/// command-line flags can fill in or override.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub mode: Option<Mode>,
    pub n: Option<usize>,
    pub alpha_max: Option<f64>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub w0: Option<f64>,
    pub lambda: Option<f64>,
    pub memory: Option<usize>,
    pub beta0: Option<f64>,
    pub rbeta: Option<f64>,
    pub anneal_levels: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: bad value `{value}` for `{key}`")))
}

impl ConfigFile {
    /// Parses `key = value` lines. Blank lines and `#` comments are ignored;
    /// keys accept `-` or `_` separators.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ConfigFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected `key = value`")))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim().trim_matches('"');
            match key.as_str() {
                "mode" => cfg.mode = Some(value.parse()?),
                "n" => cfg.n = Some(parse_value(&key, value, line_no)?),
                "alpha-max" => cfg.alpha_max = Some(parse_value(&key, value, line_no)?),
                "runs" => cfg.runs = Some(parse_value(&key, value, line_no)?),
                "seed" => cfg.seed = Some(parse_value(&key, value, line_no)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "w0" => cfg.w0 = Some(parse_value(&key, value, line_no)?),
                "lambda" => cfg.lambda = Some(parse_value(&key, value, line_no)?),
                "memory" => cfg.memory = Some(parse_value(&key, value, line_no)?),
                "beta0" => cfg.beta0 = Some(parse_value(&key, value, line_no)?),
                "rbeta" => cfg.rbeta = Some(parse_value(&key, value, line_no)?),
                "anneal-levels" => cfg.anneal_levels = Some(parse_value(&key, value, line_no)?),
                other => {
                    return Err(Error::Config(format!(
                        "line {line_no}: unknown key `{other}`"
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fields set in `over` win.
    pub fn merged(self, over: ConfigFile) -> ConfigFile {
        ConfigFile {
            mode: over.mode.or(self.mode),
            n: over.n.or(self.n),
            alpha_max: over.alpha_max.or(self.alpha_max),
            runs: over.runs.or(self.runs),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            w0: over.w0.or(self.w0),
            lambda: over.lambda.or(self.lambda),
            memory: over.memory.or(self.memory),
            beta0: over.beta0.or(self.beta0),
            rbeta: over.rbeta.or(self.rbeta),
            anneal_levels: over.anneal_levels.or(self.anneal_levels),
        }
    }

    /// Builds a validated configuration; `mode`, `n`, `alpha-max`, `runs`,
    /// `seed` and `out` are required.
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let missing = |k: &str| Error::Config(format!("missing required setting `{k}`"));
        let mode = self.mode.ok_or_else(|| missing("mode"))?;
        let n = self.n.ok_or_else(|| missing("n"))?;
        let alpha_max = self.alpha_max.ok_or_else(|| missing("alpha-max"))?;
        let runs = self.runs.ok_or_else(|| missing("runs"))?;
        let seed = self.seed.ok_or_else(|| missing("seed"))?;
        let out = self.out.ok_or_else(|| missing("out"))?;

        let mut cfg = ExperimentConfig::new(mode, n, alpha_max, runs, seed);
        cfg.out_dir = out;
        if let Some(w0) = self.w0 {
            cfg.update.w0 = w0;
        }
        if let Some(lambda) = self.lambda {
            cfg.lambda = lambda;
        }
        cfg.memory = self.memory;
        if let Some(b) = self.beta0 {
            cfg.schedule.beta0 = b;
        }
        if let Some(r) = self.rbeta {
            cfg.schedule.r_beta = r;
        }
        if let Some(t) = self.anneal_levels {
            cfg.schedule.levels = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
        assert!("active".parse::<Mode>().is_err());
    }

    #[test]
    fn p_max_rounds_up() {
        let cfg = ExperimentConfig::new(Mode::Design, 399, 2.4, 1, 0);
        assert_eq!(cfg.p_max(), 958);
        let cfg = ExperimentConfig::new(Mode::ExactSmall, 11, 1.0, 1, 0);
        assert_eq!(cfg.p_max(), 11);
        let cfg = ExperimentConfig::new(Mode::Design, 5, 2.2, 1, 0);
        assert_eq!(cfg.p_max(), 11);
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::new(Mode::ExactSmall, 11, 1.0, 10, 0);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.n = 10;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.n = 27;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.runs = 0;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.alpha_max = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.schedule.r_beta = 0.9;
        assert!(bad.validate().is_err());
        let mut passive = ExperimentConfig::new(Mode::Passive, 1001, 1.0, 1, 0);
        assert!(passive.validate().is_ok());
        assert_eq!(passive.memory_len(), 1000);
        passive.memory = Some(5);
        assert_eq!(passive.memory_len(), 5);
    }

    #[test]
    fn parses_and_merges_files() {
        let text = "# sample\nmode = design\nn = 99\nalpha_max = 2.5\nruns=4\nseed = 17\nout = \"results\"\nw0 = 0.01 # trailing\n\n";
        let file = ConfigFile::parse(text).unwrap();
        assert_eq!(file.mode, Some(Mode::Design));
        assert_eq!(file.alpha_max, Some(2.5));
        let cli = ConfigFile {
            n: Some(199),
            ..Default::default()
        };
        let cfg = file.merged(cli).resolve().unwrap();
        assert_eq!(cfg.n, 199);
        assert_eq!(cfg.runs, 4);
        assert_eq!(cfg.update.w0, 0.01);
        assert_eq!(cfg.out_dir, PathBuf::from("results"));
    }

    #[test]
    fn file_errors() {
        assert!(ConfigFile::parse("n 5").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("n = five").is_err());
        let missing = ConfigFile::parse("mode = passive\nn = 5").unwrap();
        assert!(matches!(missing.resolve(), Err(Error::Config(_))));
    }
}
