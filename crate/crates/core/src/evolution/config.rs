use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// GA hyper-parameters. Defaults are the tuned values: innovation rate 7,
/// initial drone share 2 %, population 50, tournament size 5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GAConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    /// Per-slot memeplex resample probability, in tenths.
    pub innovation_rate: u8,
    pub initial_drone_pct: f64,
    pub num_generations: u64,
    /// Drone/truck speed ratio. `None` keeps the instance's own value.
    pub alpha: Option<f64>,
    pub seed: u64,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            tournament_size: 5,
            innovation_rate: 7,
            initial_drone_pct: 2.0,
            num_generations: 1_000_000,
            alpha: None,
            seed: 0,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.population_size < 2 {
            return fail("population_size must be at least 2");
        }
        if self.tournament_size < 1 {
            return fail("tournament_size must be at least 1");
        }
        if self.innovation_rate > 10 {
            return fail("innovation_rate must lie in [0, 10]");
        }
        if !(0.0..=100.0).contains(&self.initial_drone_pct) {
            return fail("initial_drone_pct must lie in [0, 100]");
        }
        if let Some(alpha) = self.alpha {
            if !(alpha.is_finite() && alpha > 0.0) {
                return fail("alpha must be positive and finite");
            }
        }
        Ok(())
    }

    /// Parses either a JSON object or `key = value` lines (`#` comments).
    /// Keys absent from the text keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)?
        } else {
            let mut cfg = GAConfig::default();
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| Error::parse(i + 1, "expected `key = value`"))?;
                cfg.set(key.trim(), value.trim())
                    .map_err(|msg| Error::parse(i + 1, msg))?;
            }
            cfg
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("malformed value `{value}` for `{key}`"))
        }
        match key {
            "population_size" => self.population_size = num(key, value)?,
            "tournament_size" => self.tournament_size = num(key, value)?,
            "innovation_rate" => self.innovation_rate = num(key, value)?,
            "initial_drone_pct" => self.initial_drone_pct = num(key, value)?,
            "num_generations" => self.num_generations = num(key, value)?,
            "alpha" => self.alpha = Some(num(key, value)?),
            "seed" => self.seed = num(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }
}
