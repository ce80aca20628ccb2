//! Flat key=value configuration with command-line overrides.
//!
//! A config file holds one `key = value` pair per line; blank lines and
//! `#` comments are ignored, later duplicates win, and command-line flags
//! override file entries. Key names are checked against the known
//! vocabulary up front so a typo fails loudly with the offending name
//! instead of being silently ignored.

use super::HarnessError;
use crate::counterfactuality::DEFAULT_PRESENCE_EPSILON;
use crate::optics::LightModel;
use crate::protocols::{
    build_ev, build_noh, build_salih, build_vaidman, build_zeno, BobAction, ProtocolCircuit,
    ProtocolFamily, VaidmanAngles, NOH_DEFAULT_THETA,
};
use crate::tuner::{solve_equal_loss, Objective, TuneProblem, TuneResult};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

/// Analyses a report row can carry; the column set of a report depends
/// only on this selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Analysis {
    Outcomes,
    WeakTrace,
    Histories,
    Crossing,
    Loss,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [
        Analysis::Outcomes,
        Analysis::WeakTrace,
        Analysis::Histories,
        Analysis::Crossing,
        Analysis::Loss,
    ];
}

impl FromStr for Analysis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outcomes" => Ok(Analysis::Outcomes),
            "weaktrace" => Ok(Analysis::WeakTrace),
            "histories" => Ok(Analysis::Histories),
            "crossing" => Ok(Analysis::Crossing),
            "loss" => Ok(Analysis::Loss),
            other => Err(HarnessError::Usage(format!(
                "analyses: unknown analysis `{other}` \
                 (outcomes, weaktrace, histories, crossing, loss)"
            ))),
        }
    }
}

const PLAIN_KEYS: [&str; 22] = [
    "protocol",
    "bob",
    "bomb",
    "light",
    "analyses",
    "outcome",
    "epsilon",
    "outer",
    "inner",
    "polarized",
    "cycles",
    "theta",
    "inner_count",
    "theta_0",
    "theta_f",
    "sweep_param",
    "sweep_values",
    "format",
    "output",
    "objective",
    "free",
    "seeds",
];

fn is_inner_slot(key: &str) -> bool {
    let Some(rest) = key.strip_prefix("inner") else {
        return false;
    };
    let Some(digits) = rest
        .strip_suffix("_entry")
        .or_else(|| rest.strip_suffix("_exit"))
    else {
        return false;
    };
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

fn is_known_key(key: &str) -> bool {
    PLAIN_KEYS.contains(&key)
        || is_inner_slot(key)
        || key
            .strip_prefix("fix_")
            .is_some_and(|slot| slot == "theta_0" || slot == "theta_f" || is_inner_slot(slot))
}

/// The merged key=value view of a run.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn new() -> Self {
        RawConfig::default()
    }

    /// Parse a config file. Later assignments to the same key win.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        let mut config = RawConfig::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::Usage(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    number + 1
                )));
            };
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Set one key, rejecting names outside the vocabulary.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        if !is_known_key(key) {
            return Err(HarnessError::Usage(format!("unknown config key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parse_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError>
    where
        T::Err: Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e: T::Err| {
                HarnessError::Usage(format!("{key}: cannot parse `{raw}`: {e}"))
            }),
        }
    }

    fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, HarnessError>
    where
        T::Err: Display,
    {
        Ok(self.parse_value(key)?.unwrap_or(default))
    }

    fn require(&self, key: &str) -> Result<&str, HarnessError> {
        self.get(key)
            .ok_or_else(|| HarnessError::Usage(format!("{key}: required key is missing")))
    }

    /// Bob's actions for this run: the configured one, or both.
    pub fn actions(&self) -> Result<Vec<BobAction>, HarnessError> {
        let word = self.get("bob").or_else(|| self.get("bomb"));
        match word {
            Some(raw) => {
                let action = raw
                    .parse::<BobAction>()
                    .map_err(|e| HarnessError::Usage(format!("bob: cannot parse `{raw}`: {e}")))?;
                Ok(vec![action])
            }
            None => Ok(vec![BobAction::Block, BobAction::Open]),
        }
    }

    pub fn light(&self) -> Result<LightModel, HarnessError> {
        match self.get("light").unwrap_or("fock") {
            "fock" => Ok(LightModel::Fock),
            "classical" => Ok(LightModel::Classical),
            other => Err(HarnessError::Usage(format!(
                "light: unknown model `{other}` (fock or classical)"
            ))),
        }
    }

    /// Requested analyses, or the given default when the key is absent.
    pub fn analyses(&self, default: &[Analysis]) -> Result<Vec<Analysis>, HarnessError> {
        let Some(raw) = self.get("analyses") else {
            return Ok(default.to_vec());
        };
        let mut selected = Vec::new();
        for word in raw.split(',').map(str::trim).filter(|w| !w.is_empty()) {
            let analysis: Analysis = word.parse()?;
            if !selected.contains(&analysis) {
                selected.push(analysis);
            }
        }
        if selected.is_empty() {
            return Err(HarnessError::Usage("analyses: empty selection".into()));
        }
        selected.sort();
        Ok(selected)
    }

    pub fn epsilon(&self) -> Result<f64, HarnessError> {
        let value = self.parse_or("epsilon", DEFAULT_PRESENCE_EPSILON)?;
        if !(value.is_finite() && value > 0.0) {
            return Err(HarnessError::Usage(format!(
                "epsilon: must be a positive finite number, got {value}"
            )));
        }
        Ok(value)
    }

    pub fn outcome_override(&self) -> Option<&str> {
        self.get("outcome")
    }

    /// The sweep request, if any: key to vary and the values to try.
    pub fn sweep(&self) -> Result<Option<(String, Vec<String>)>, HarnessError> {
        match (self.get("sweep_param"), self.get("sweep_values")) {
            (None, None) => Ok(None),
            (Some(_), None) => Err(HarnessError::Usage(
                "sweep_values: required when sweep_param is set".into(),
            )),
            (None, Some(_)) => Err(HarnessError::Usage(
                "sweep_param: required when sweep_values is set".into(),
            )),
            (Some(param), Some(values)) => {
                if !is_known_key(param) || param.starts_with("sweep_") {
                    return Err(HarnessError::Usage(format!(
                        "sweep_param: `{param}` is not a sweepable key"
                    )));
                }
                let values: Vec<String> = values
                    .split(',')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(String::from)
                    .collect();
                if values.is_empty() {
                    return Err(HarnessError::Usage("sweep_values: empty list".into()));
                }
                Ok(Some((param.to_string(), values)))
            }
        }
    }

    /// A copy of this config with one key replaced (one sweep point).
    pub fn with_value(&self, key: &str, value: &str) -> Result<RawConfig, HarnessError> {
        let mut point = self.clone();
        point.set(key, value)?;
        Ok(point)
    }

    pub fn format(&self) -> Result<super::OutputFormat, HarnessError> {
        self.get("format")
            .unwrap_or("json")
            .parse()
            .map_err(HarnessError::Usage)
    }

    pub fn output_path(&self) -> Option<&str> {
        self.get("output")
    }

    /// Build the configured protocol for one of Bob's actions.
    pub fn build_protocol(&self, action: BobAction) -> Result<ProtocolCircuit, HarnessError> {
        let raw = self.require("protocol")?;
        let family: ProtocolFamily = raw
            .parse()
            .map_err(|e| HarnessError::Usage(format!("protocol: cannot parse `{raw}`: {e}")))?;
        let built = match family {
            ProtocolFamily::Ev => build_ev(action),
            ProtocolFamily::Noh => build_noh(self.parse_or("theta", NOH_DEFAULT_THETA)?, action),
            ProtocolFamily::Zeno => {
                let cycles: usize = self
                    .parse_value("cycles")?
                    .ok_or_else(|| HarnessError::Usage("cycles: required for zeno".into()))?;
                build_zeno(cycles, action)
            }
            ProtocolFamily::Salih => {
                let outer: usize = self
                    .parse_value("outer")?
                    .ok_or_else(|| HarnessError::Usage("outer: required for salih".into()))?;
                let inner: usize = self
                    .parse_value("inner")?
                    .ok_or_else(|| HarnessError::Usage("inner: required for salih".into()))?;
                build_salih(outer, inner, self.parse_or("polarized", false)?, action)
            }
            ProtocolFamily::Vaidman => build_vaidman(&self.vaidman_angles()?, action),
        };
        built.map_err(|e| HarnessError::Usage(format!("protocol `{family}`: {e}")))
    }

    /// Chain angles: uniform π/4 defaults overridden by any slot keys.
    pub fn vaidman_angles(&self) -> Result<VaidmanAngles, HarnessError> {
        let inner_count: usize = self.parse_or("inner_count", 2)?;
        if inner_count == 0 {
            return Err(HarnessError::Usage(
                "inner_count: must be at least 1".into(),
            ));
        }
        let mut slots = VaidmanAngles::uniform(inner_count, FRAC_PI_4).to_slots();
        let names: Vec<String> = slots.keys().cloned().collect();
        for name in names {
            if let Some(value) = self.parse_value::<f64>(&name)? {
                slots.insert(name, value);
            }
        }
        // Catch slot keys for interferometers beyond inner_count.
        for key in self.entries.keys() {
            if is_inner_slot(key) && !slots.contains_key(key) {
                return Err(HarnessError::Usage(format!(
                    "{key}: chain has only {inner_count} inner interferometers"
                )));
            }
        }
        VaidmanAngles::from_slots(inner_count, &slots)
            .map_err(|e| HarnessError::Usage(e.to_string()))
    }

    /// Assemble the tuning problem: explicit `free`/`fix_*` keys when
    /// given, otherwise the standard dump-locked search with staggered
    /// default entry angles.
    pub fn tune_problem(&self) -> Result<TuneProblem, HarnessError> {
        let inner_count: usize = self.parse_or("inner_count", 2)?;
        let objective: Objective = self
            .get("objective")
            .unwrap_or("equal_loss_and_zero_crosstalk")
            .parse()
            .map_err(|e: crate::tuner::TuneError| HarnessError::Usage(e.to_string()))?;
        let mut fixed = BTreeMap::new();
        for (key, value) in &self.entries {
            if let Some(slot) = key.strip_prefix("fix_") {
                let parsed: f64 = value.parse().map_err(|e| {
                    HarnessError::Usage(format!("{key}: cannot parse `{value}`: {e}"))
                })?;
                fixed.insert(slot.to_string(), parsed);
            }
        }
        let problem = if fixed.is_empty() && self.get("free").is_none() {
            let entries: Vec<f64> = (0..inner_count)
                .map(|i| if i % 2 == 0 { FRAC_PI_4 } else { FRAC_PI_3 })
                .collect();
            TuneProblem::dump_locked(&entries, objective)
        } else {
            let free_raw = self.require("free")?;
            let free: Vec<&str> = free_raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            TuneProblem::new(inner_count, &free, &fixed, objective)
        };
        problem.map_err(|e| HarnessError::Usage(e.to_string()))
    }

    /// Starting points: `seeds=a,b;c,d` if given, else the default grid.
    pub fn solve(&self, problem: &TuneProblem) -> Result<TuneResult, HarnessError> {
        let seeds = match self.get("seeds") {
            None => problem.default_seeds(),
            Some(raw) => {
                let mut seeds = Vec::new();
                for point in raw.split(';').filter(|p| !p.trim().is_empty()) {
                    let mut coords = Vec::new();
                    for coord in point.split(',') {
                        let coord = coord.trim();
                        coords.push(coord.parse::<f64>().map_err(|e| {
                            HarnessError::Usage(format!("seeds: cannot parse `{coord}`: {e}"))
                        })?);
                    }
                    seeds.push(coords);
                }
                seeds
            }
        };
        solve_equal_loss(problem, &seeds).map_err(HarnessError::from)
    }
}
