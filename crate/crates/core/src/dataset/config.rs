use std::path::PathBuf;
use std::str::FromStr;

use super::apportion;
use crate::error::{Error, Result};
use crate::rng::RNG_ALGORITHM;
use crate::scene::{Environment, SNR_LEVELS};
use crate::spectrogram::PresetSize;

/// Train/val/test proportions used when only a frame count is given.
pub const DEFAULT_SPLIT_RATIO: [usize; 3] = [10, 7, 3];

/// Everything that determines the bytes of a generated dataset.
///
/// `workers` only controls parallelism and is left out of the echo.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub env: Environment,
    pub presets: Vec<PresetSize>,
    pub n_frames: usize,
    pub split_sizes: [usize; 3],
    pub snr_levels: Vec<i32>,
    pub global_seed: u64,
    pub output_root: PathBuf,
    pub emit_raw_iq: bool,
    pub emit_grids: bool,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            env: Environment::Sparse1T,
            presets: PresetSize::ALL.to_vec(),
            n_frames: 40_000,
            split_sizes: [20_000, 14_000, 6_000],
            snr_levels: SNR_LEVELS.to_vec(),
            global_seed: 0,
            output_root: PathBuf::from("dataset"),
            emit_raw_iq: false,
            emit_grids: false,
            workers: 0,
        }
    }
}

impl DatasetConfig {
    /// Sets the frame count and re-derives splits from the default ratio.
    pub fn with_frames(mut self, n_frames: usize) -> Self {
        let s = apportion(n_frames, &DEFAULT_SPLIT_RATIO);
        self.n_frames = n_frames;
        self.split_sizes = [s[0], s[1], s[2]];
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.env == Environment::NistLike {
            return Err(Error::Config(
                "the nist environment is annotated from metadata (use nist-annotate), not generated".into(),
            ));
        }
        if self.n_frames == 0 {
            return Err(Error::Config("frames must be positive".into()));
        }
        let sum: usize = self.split_sizes.iter().sum();
        if sum != self.n_frames {
            return Err(Error::Config(format!(
                "train+val+test = {}+{}+{} = {sum} but frames = {}",
                self.split_sizes[0], self.split_sizes[1], self.split_sizes[2], self.n_frames
            )));
        }
        if self.presets.is_empty() {
            return Err(Error::Config("at least one preset is required".into()));
        }
        if self.snr_levels.is_empty() {
            return Err(Error::Config("at least one SNR level is required".into()));
        }
        for (i, snr) in self.snr_levels.iter().enumerate() {
            if !SNR_LEVELS.contains(snr) {
                return Err(Error::Config(format!("SNR level {snr} dB is not one of {SNR_LEVELS:?}")));
            }
            if self.snr_levels[..i].contains(snr) {
                return Err(Error::Config(format!("SNR level {snr} dB listed twice")));
            }
        }
        Ok(())
    }

    /// Canonical `key=value` lines in key order. Parsing the echo yields the
    /// same config (apart from `workers`).
    pub fn echo(&self) -> String {
        let presets: Vec<String> = self.presets.iter().map(|p| p.to_string()).collect();
        let snrs: Vec<String> = self.snr_levels.iter().map(|s| s.to_string()).collect();
        let mut lines = [
            format!("env={}", self.env.tag()),
            format!("frames={}", self.n_frames),
            format!("grids={}", self.emit_grids),
            format!("iq={}", self.emit_raw_iq),
            format!("out={}", self.output_root.display()),
            format!("presets={}", presets.join(",")),
            format!("rng={RNG_ALGORITHM}"),
            format!("seed={}", self.global_seed),
            format!("snr_levels={}", snrs.join(",")),
            format!("test={}", self.split_sizes[2]),
            format!("train={}", self.split_sizes[0]),
            format!("val={}", self.split_sizes[1]),
        ];
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

/// Partial settings from a config file or command-line flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub env: Option<Environment>,
    pub presets: Option<Vec<PresetSize>>,
    pub frames: Option<usize>,
    pub train: Option<usize>,
    pub val: Option<usize>,
    pub test: Option<usize>,
    pub snr_levels: Option<Vec<i32>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub iq: Option<bool>,
    pub grids: Option<bool>,
    pub workers: Option<usize>,
}

fn parse_list<T: FromStr>(value: &str, what: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("bad {what} `{s}`"))))
        .collect()
}

fn parse_num<T: FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

/// Sorted, de-duplicated preset list.
pub(crate) fn parse_presets(value: &str) -> Result<Vec<PresetSize>> {
    let mut presets: Vec<PresetSize> = parse_list(value, "preset")?;
    presets.sort();
    presets.dedup();
    Ok(presets)
}

impl ConfigOverrides {
    /// Parses flat `key=value` text; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut o = ConfigOverrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: source.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let wrap = |e: Error| err(e.to_string());
            match key {
                "env" => o.env = Some(value.parse().map_err(wrap)?),
                "presets" | "preset" => o.presets = Some(parse_presets(value).map_err(wrap)?),
                "frames" => o.frames = Some(parse_num(value, key).map_err(wrap)?),
                "train" => o.train = Some(parse_num(value, key).map_err(wrap)?),
                "val" => o.val = Some(parse_num(value, key).map_err(wrap)?),
                "test" => o.test = Some(parse_num(value, key).map_err(wrap)?),
                "snr_levels" | "snr" => o.snr_levels = Some(parse_list(value, "SNR level").map_err(wrap)?),
                "seed" => o.seed = Some(parse_num(value, key).map_err(wrap)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "iq" => o.iq = Some(parse_num(value, key).map_err(wrap)?),
                "grids" => o.grids = Some(parse_num(value, key).map_err(wrap)?),
                "workers" => o.workers = Some(parse_num(value, key).map_err(wrap)?),
                "rng" if value == RNG_ALGORITHM => {}
                "rng" => return Err(err(format!("config was produced with RNG `{value}`, this build uses `{RNG_ALGORITHM}`"))),
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        Ok(o)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            env: other.env.or(self.env),
            presets: other.presets.or(self.presets),
            frames: other.frames.or(self.frames),
            train: other.train.or(self.train),
            val: other.val.or(self.val),
            test: other.test.or(self.test),
            snr_levels: other.snr_levels.or(self.snr_levels),
            seed: other.seed.or(self.seed),
            out: other.out.or(self.out),
            iq: other.iq.or(self.iq),
            grids: other.grids.or(self.grids),
            workers: other.workers.or(self.workers),
        }
    }

    /// Fills unset fields from the defaults and validates the result.
    ///
    /// Splits must be given all together or not at all. Without them the
    /// frame count is divided 10:7:3; without a frame count the splits'
    /// sum is used.
    pub fn resolve(self) -> Result<DatasetConfig> {
        let mut cfg = DatasetConfig::default();
        let splits = match (self.train, self.val, self.test) {
            (Some(a), Some(b), Some(c)) => Some([a, b, c]),
            (None, None, None) => None,
            _ => return Err(Error::Config("train, val and test must be given together".into())),
        };
        match (self.frames, splits) {
            (Some(n), Some(s)) => {
                cfg.n_frames = n;
                cfg.split_sizes = s;
            }
            (Some(n), None) => cfg = cfg.with_frames(n),
            (None, Some(s)) => {
                cfg.n_frames = s.iter().sum();
                cfg.split_sizes = s;
            }
            (None, None) => {}
        }
        if let Some(v) = self.env {
            cfg.env = v;
        }
        if let Some(v) = self.presets {
            cfg.presets = v;
        }
        if let Some(v) = self.snr_levels {
            cfg.snr_levels = v;
        }
        if let Some(v) = self.seed {
            cfg.global_seed = v;
        }
        if let Some(v) = self.out {
            cfg.output_root = v;
        }
        cfg.emit_raw_iq = self.iq.unwrap_or(false);
        cfg.emit_grids = self.grids.unwrap_or(false);
        cfg.workers = self.workers.unwrap_or(0);
        cfg.validate()?;
        Ok(cfg)
    }
}
