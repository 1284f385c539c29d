//! Experiment configuration: a flat `key = value` text format, the built-in
//! presets and structural validation.
//!
//! ```text
//! # fully coupled ferromagnet
//! preset      = fig2
//! m_list      = 16, 32, 64
//! methods     = phase-decomposed, trotterized
//! sigma       = all-up, +-+-+-+-+-
//! ```
//!
//! | key | value |
//! |-----|-------|
//! | `name` | output file stem |
//! | `preset` | `fig1`…`fig4`; loaded first, other keys override it |
//! | `n` | number of qubits |
//! | `coupling` | `all-to-all` (uses `j`) or `i-j:J` pairs, comma separated |
//! | `j` | total coupling for `all-to-all`, `J_ij = j/n` |
//! | `h`, `gamma` | one value for every qubit or `n` comma-separated values |
//! | `catalyst_xx` | `i-j:K` pairs |
//! | `catalyst_z` | like `h` |
//! | `catalyst_y` | constant `α` |
//! | `schedule` | `linear` or `t:λ` knots of a monotone cubic, comma separated |
//! | `total_time` | `T` |
//! | `m_list` | strictly increasing slice counts |
//! | `methods` | `discretized`, `trotterized`, `phase-decomposed` |
//! | `sigma` | `all-up`, `all-down` or a `+`/`-` string per qubit (qubit 0 first) |
//! | `reference_tolerance` | 2-norm convergence tolerance of the reference |
//! | `trace` | `true` to write per-step infidelities |
//! | `out` | output directory |
//!
//! Keys that are neither given nor set by a preset take the `fig1` values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use annealsim::model::{CatalystSpec, Schedule, SpinSystem, YField, MAX_QUBITS};
use annealsim::propagators::Method;
use annealsim::{basis, Error};

pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

const KEYS: [&str; 17] = [
    "name",
    "preset",
    "n",
    "coupling",
    "j",
    "h",
    "gamma",
    "catalyst_xx",
    "catalyst_z",
    "catalyst_y",
    "schedule",
    "total_time",
    "m_list",
    "methods",
    "sigma",
    "reference_tolerance",
    "trace",
];

/// One problem with a configuration, tied to the key that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl Violation {
    fn new(key: &str, message: impl Into<String>) -> Self {
        Violation {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    /// `J_ij = j / n` on every pair.
    AllToAll(f64),
    Explicit(Vec<(usize, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Uniform(f64),
    PerQubit(Vec<f64>),
}

impl FieldSpec {
    fn values(&self, n: usize) -> Vec<f64> {
        match self {
            FieldSpec::Uniform(v) => vec![*v; n],
            FieldSpec::PerQubit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    Linear,
    Tabulated(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub preset: Option<String>,
    pub n: usize,
    pub coupling: CouplingSpec,
    pub h: FieldSpec,
    pub gamma: FieldSpec,
    pub catalyst_xx: Vec<(usize, usize, f64)>,
    pub catalyst_z: Option<FieldSpec>,
    pub catalyst_y: Option<f64>,
    pub schedule: ScheduleSpec,
    pub total_time: f64,
    pub m_list: Vec<usize>,
    pub methods: Vec<Method>,
    pub sigma: Vec<String>,
    pub reference_tolerance: f64,
    pub trace: bool,
    pub out: Option<PathBuf>,
}

fn doubling(from: usize, to: usize) -> Vec<usize> {
    std::iter::successors(Some(from), |m| Some(m * 2))
        .take_while(|m| *m <= to)
        .collect()
}

const ALL_METHODS: [Method; 3] = [
    Method::PhaseDecomposed,
    Method::Discretized,
    Method::Trotterized,
];

/// Built-in experiment by name.
pub fn preset(name: &str) -> Result<ExperimentConfig, Violation> {
    let base = ExperimentConfig {
        name: name.to_string(),
        preset: Some(name.to_string()),
        n: 1,
        coupling: CouplingSpec::Explicit(vec![]),
        h: FieldSpec::Uniform(1.0),
        gamma: FieldSpec::Uniform(1.0),
        catalyst_xx: vec![],
        catalyst_z: None,
        catalyst_y: None,
        schedule: ScheduleSpec::Linear,
        total_time: 16.0,
        m_list: doubling(8, 4096),
        methods: ALL_METHODS.to_vec(),
        sigma: vec!["all-up".into()],
        reference_tolerance: 1e-10,
        trace: false,
        out: None,
    };
    match name {
        "fig1" => Ok(base),
        "fig2" => Ok(ExperimentConfig {
            n: 10,
            coupling: CouplingSpec::AllToAll(1.0),
            m_list: doubling(8, 1024),
            ..base
        }),
        "fig3" => Ok(ExperimentConfig {
            n: 10,
            coupling: CouplingSpec::AllToAll(1.0),
            h: FieldSpec::Uniform(0.0),
            total_time: 64.0,
            m_list: doubling(8, 1024),
            ..base
        }),
        "fig4" => Ok(ExperimentConfig {
            m_list: vec![256],
            methods: vec![Method::Discretized, Method::Trotterized],
            trace: true,
            ..base
        }),
        other => Err(Violation::new(
            "preset",
            format!("unknown preset '{other}' (known: {})", PRESETS.join(", ")),
        )),
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(key: &str, v: &str) -> Result<f64, Violation> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Violation::new(key, format!("'{v}' is not a number")))
}

fn parse_fields(key: &str, v: &str) -> Result<FieldSpec, Violation> {
    let vals = split_list(v)
        .map(|x| parse_f64(key, x))
        .collect::<Result<Vec<_>, _>>()?;
    match vals.as_slice() {
        [] => Err(Violation::new(key, "empty value")),
        [one] => Ok(FieldSpec::Uniform(*one)),
        _ => Ok(FieldSpec::PerQubit(vals)),
    }
}

fn parse_pairs(key: &str, v: &str) -> Result<Vec<(usize, usize, f64)>, Violation> {
    split_list(v)
        .map(|item| {
            let bad = || Violation::new(key, format!("'{item}' is not of the form i-j:value"));
            let (pair, val) = item.split_once(':').ok_or_else(bad)?;
            let (i, j) = pair.split_once('-').ok_or_else(bad)?;
            let i = i.trim().parse().map_err(|_| bad())?;
            let j = j.trim().parse().map_err(|_| bad())?;
            Ok((i, j, parse_f64(key, val)?))
        })
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, Violation> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Violation::new(key, format!("'{other}' is not a boolean"))),
    }
}

pub fn parse_m_list(v: &str) -> Result<Vec<usize>, Violation> {
    split_list(v)
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| Violation::new("m_list", format!("'{x}' is not a slice count")))
        })
        .collect()
}

pub fn parse_methods(v: &str) -> Result<Vec<Method>, Violation> {
    split_list(v)
        .map(|x| {
            x.parse::<Method>()
                .map_err(|e| Violation::new("methods", e.to_string()))
        })
        .collect()
}

impl ExperimentConfig {
    /// Parse the key-value format. Every malformed or unknown key is
    /// reported, not just the first.
    pub fn parse(text: &str) -> Result<Self, Vec<Violation>> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        let mut violations = vec![];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                violations.push(Violation::new(
                    &format!("line {}", lineno + 1),
                    format!("expected 'key = value', got '{line}'"),
                ));
                continue;
            };
            let key = k.trim().to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) && key != "out" {
                violations.push(Violation::new(&key, "unknown key"));
            } else if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                violations.push(Violation::new(&key, "given more than once"));
            }
        }
        let mut cfg = match entries.get("preset") {
            Some(p) => match preset(p) {
                Ok(c) => c,
                Err(v) => {
                    violations.push(v);
                    return Err(violations);
                }
            },
            None => ExperimentConfig {
                preset: None,
                name: "experiment".into(),
                ..preset("fig1").expect("built-in preset")
            },
        };
        for (key, v) in &entries {
            let r = cfg.set(key, v);
            if let Err(e) = r {
                violations.push(e);
            }
        }
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(violations)
        }
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), Violation> {
        match key {
            "name" => self.name = v.to_string(),
            "preset" => {}
            "n" => {
                self.n = v
                    .parse()
                    .map_err(|_| Violation::new(key, format!("'{v}' is not a qubit count")))?
            }
            "coupling" => {
                self.coupling = if v == "all-to-all" {
                    match self.coupling {
                        CouplingSpec::AllToAll(j) => CouplingSpec::AllToAll(j),
                        _ => CouplingSpec::AllToAll(1.0),
                    }
                } else {
                    CouplingSpec::Explicit(parse_pairs(key, v)?)
                }
            }
            "j" => self.coupling = CouplingSpec::AllToAll(parse_f64(key, v)?),
            "h" => self.h = parse_fields(key, v)?,
            "gamma" => self.gamma = parse_fields(key, v)?,
            "catalyst_xx" => self.catalyst_xx = parse_pairs(key, v)?,
            "catalyst_z" => self.catalyst_z = Some(parse_fields(key, v)?),
            "catalyst_y" => self.catalyst_y = Some(parse_f64(key, v)?),
            "schedule" => {
                self.schedule = if v == "linear" {
                    ScheduleSpec::Linear
                } else {
                    let knots = split_list(v)
                        .map(|item| {
                            let (t, l) = item.split_once(':').ok_or_else(|| {
                                Violation::new(key, format!("'{item}' is not of the form t:lambda"))
                            })?;
                            Ok((parse_f64(key, t)?, parse_f64(key, l)?))
                        })
                        .collect::<Result<Vec<_>, Violation>>()?;
                    ScheduleSpec::Tabulated(knots)
                }
            }
            "total_time" => self.total_time = parse_f64(key, v)?,
            "m_list" => self.m_list = parse_m_list(v)?,
            "methods" => self.methods = parse_methods(v)?,
            "sigma" => self.sigma = split_list(v).map(str::to_string).collect(),
            "reference_tolerance" => self.reference_tolerance = parse_f64(key, v)?,
            "trace" => self.trace = parse_bool(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            _ => return Err(Violation::new(key, "unknown key")),
        }
        Ok(())
    }

    /// The configuration in its own text format, with every key explicit.
    pub fn to_text(&self) -> String {
        let fields = |f: &FieldSpec| match f {
            FieldSpec::Uniform(v) => v.to_string(),
            FieldSpec::PerQubit(v) => join(v),
        };
        let pairs = |p: &[(usize, usize, f64)]| {
            p.iter()
                .map(|(i, j, v)| format!("{i}-{j}:{v}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut lines = vec![format!("name = {}", self.name)];
        if let Some(p) = &self.preset {
            lines.push(format!("preset = {p}"));
        }
        lines.push(format!("n = {}", self.n));
        match &self.coupling {
            CouplingSpec::AllToAll(j) => {
                lines.push("coupling = all-to-all".into());
                lines.push(format!("j = {j}"));
            }
            CouplingSpec::Explicit(p) => lines.push(format!("coupling = {}", pairs(p))),
        }
        lines.push(format!("h = {}", fields(&self.h)));
        lines.push(format!("gamma = {}", fields(&self.gamma)));
        if !self.catalyst_xx.is_empty() {
            lines.push(format!("catalyst_xx = {}", pairs(&self.catalyst_xx)));
        }
        if let Some(z) = &self.catalyst_z {
            lines.push(format!("catalyst_z = {}", fields(z)));
        }
        if let Some(a) = self.catalyst_y {
            lines.push(format!("catalyst_y = {a}"));
        }
        lines.push(match &self.schedule {
            ScheduleSpec::Linear => "schedule = linear".into(),
            ScheduleSpec::Tabulated(k) => format!(
                "schedule = {}",
                k.iter()
                    .map(|(t, l)| format!("{t}:{l}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        });
        lines.push(format!("total_time = {}", self.total_time));
        lines.push(format!("m_list = {}", join(&self.m_list)));
        lines.push(format!(
            "methods = {}",
            self.methods
                .iter()
                .map(Method::as_str)
                .collect::<Vec<_>>()
                .join(", ")
        ));
        lines.push(format!("sigma = {}", self.sigma.join(", ")));
        lines.push(format!(
            "reference_tolerance = {}",
            self.reference_tolerance
        ));
        lines.push(format!("trace = {}", self.trace));
        if let Some(out) = &self.out {
            lines.push(format!("out = {}", out.display()));
        }
        lines.join("\n") + "\n"
    }

    /// Basis index of a watched-state label.
    pub fn sigma_index(&self, label: &str) -> Result<usize, Violation> {
        match label {
            "all-up" => Ok(basis::all_up()),
            "all-down" => Ok(basis::all_down(self.n)),
            s if s.len() == self.n && s.chars().all(|c| c == '+' || c == '-') => {
                let spins: Vec<i8> = s.chars().map(|c| if c == '+' { 1 } else { -1 }).collect();
                Ok(basis::from_spins(&spins))
            }
            s => Err(Violation::new(
                "sigma",
                format!(
                    "'{s}' is neither all-up, all-down nor a +/- string of length {}",
                    self.n
                ),
            )),
        }
    }

    pub fn system(&self) -> Result<SpinSystem, Error> {
        let mut b = SpinSystem::builder(self.n);
        b = match &self.coupling {
            CouplingSpec::AllToAll(j) => b.all_to_all(*j),
            CouplingSpec::Explicit(p) => p.iter().fold(b, |b, (i, j, v)| b.coupling(*i, *j, *v)),
        };
        b = b
            .fields_z(self.h.values(self.n))
            .fields_x(self.gamma.values(self.n));
        let mut cat = CatalystSpec::new();
        for (i, j, k) in &self.catalyst_xx {
            cat = cat.with_xx(*i, *j, *k);
        }
        if let Some(z) = &self.catalyst_z {
            cat = cat.with_bias_z(z.values(self.n));
        }
        if let Some(a) = self.catalyst_y {
            cat = cat.with_y_field(YField::constant(a));
        }
        if cat.has_xx() || cat.has_bias_z() || cat.has_y_field() {
            b = b.catalyst(cat);
        }
        b.build()
    }

    pub fn build_schedule(&self) -> Result<Schedule, Error> {
        match &self.schedule {
            ScheduleSpec::Linear => Schedule::linear(self.total_time),
            ScheduleSpec::Tabulated(k) => {
                let s = Schedule::tabulated(k, annealsim::model::DEFAULT_QUADRATURE_ORDER)?;
                if (s.total_time() - self.total_time).abs() > 1e-12 * self.total_time.abs().max(1.0)
                {
                    return Err(Error::InvalidSchedule(format!(
                        "last knot at t = {} but total_time = {}",
                        s.total_time(),
                        self.total_time
                    )));
                }
                Ok(s)
            }
        }
    }

    /// All structural problems, without running anything.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = vec![];
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            v.push(Violation::new("name", "must be a non-empty file stem"));
        }
        if self.n == 0 || self.n > MAX_QUBITS {
            v.push(Violation::new("n", format!("must be in 1..={MAX_QUBITS}")));
        } else {
            match self.system() {
                // reported below with the catalyst keys
                Ok(_) | Err(Error::Configuration(_)) => {}
                Err(e) => v.push(Violation::new("system", e.to_string())),
            }
            for label in &self.sigma {
                if let Err(e) = self.sigma_index(label) {
                    v.push(e);
                }
            }
        }
        if let Some(a) = self.catalyst_y {
            if !self.catalyst_xx.is_empty() {
                v.push(Violation::new(
                    "catalyst_y",
                    "XX and Y catalysts cannot be combined: the off-diagonal sector no longer factorizes",
                ));
            }
            if !a.is_finite() {
                v.push(Violation::new("catalyst_y", "must be finite"));
            }
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            v.push(Violation::new("total_time", "must be positive and finite"));
        } else if let Err(e) = self.build_schedule() {
            v.push(Violation::new("schedule", e.to_string()));
        }
        if self.m_list.is_empty() {
            v.push(Violation::new("m_list", "must not be empty"));
        }
        if self.m_list.contains(&0) {
            v.push(Violation::new("m_list", "slice counts must be positive"));
        }
        if self.m_list.windows(2).any(|w| w[0] >= w[1]) {
            v.push(Violation::new("m_list", "must be strictly increasing"));
        }
        if self.trace {
            if let Some(&max) = self.m_list.last() {
                if self.m_list.iter().any(|m| *m > 0 && max % m != 0) {
                    v.push(Violation::new(
                        "m_list",
                        "with trace = true every M must divide the largest M",
                    ));
                }
            }
        }
        if self.methods.is_empty() {
            v.push(Violation::new("methods", "must not be empty"));
        }
        if self.methods.contains(&Method::Reference) {
            v.push(Violation::new(
                "methods",
                "the reference is always computed; do not list it",
            ));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            v.push(Violation::new("methods", "listed more than once"));
        }
        if self.sigma.is_empty() {
            v.push(Violation::new("sigma", "must not be empty"));
        }
        if !(self.reference_tolerance >= 1e-12 && self.reference_tolerance < 1.0) {
            v.push(Violation::new(
                "reference_tolerance",
                "must be in [1e-12, 1)",
            ));
        }
        v
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_experiments() {
        assert_eq!(preset("fig1").unwrap().total_time, 16.0);
        assert_eq!(preset("fig3").unwrap().total_time, 64.0);
        assert_eq!(preset("fig4").unwrap().m_list, vec![256]);
        assert_eq!(preset("fig1").unwrap().m_list.last(), Some(&4096));
        assert_eq!(preset("fig2").unwrap().m_list, doubling(8, 1024));
        for p in PRESETS {
            assert!(preset(p).unwrap().validate().is_empty(), "{p}");
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn text_round_trip() {
        for p in PRESETS {
            let cfg = preset(p).unwrap();
            assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
        }
        let custom = ExperimentConfig::parse(
            "n = 3\ncoupling = 0-1:0.5, 1-2:-1\nh = 0.1, 0.2, 0.3\ncatalyst_z = 0.4\n\
             schedule = 0:0, 2:0.3, 4:1\ntotal_time = 4\nsigma = +-+\n",
        )
        .unwrap();
        assert!(custom.validate().is_empty());
        assert_eq!(ExperimentConfig::parse(&custom.to_text()).unwrap(), custom);
    }

    #[test]
    fn unknown_and_malformed_keys_are_all_listed() {
        let err = ExperimentConfig::parse("preset = fig2\nbogus = 1\nn = x\nwhat\n").unwrap_err();
        let keys: Vec<_> = err.iter().map(|v| v.key.as_str()).collect();
        assert_eq!(keys, vec!["bogus", "line 4", "n"]);
    }

    #[test]
    fn validation_catches_invariants() {
        let mut cfg = preset("fig2").unwrap();
        cfg.m_list = vec![];
        cfg.methods = vec![];
        cfg.sigma = vec!["++".into()];
        let keys: Vec<_> = cfg.validate().into_iter().map(|v| v.key).collect();
        assert!(keys.contains(&"m_list".to_string()));
        assert!(keys.contains(&"methods".to_string()));
        assert!(keys.contains(&"sigma".to_string()));
    }

    #[test]
    fn sigma_labels() {
        let cfg = preset("fig2").unwrap();
        assert_eq!(cfg.sigma_index("all-up").unwrap(), 0);
        assert_eq!(cfg.sigma_index("all-down").unwrap(), 1023);
        assert_eq!(cfg.sigma_index("-+++++++++").unwrap(), 1);
    }
}
