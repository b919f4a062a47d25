//! Scenario files: one JSON document describes a task, `execute` runs it
//! and writes its artifacts.
//!
//! ```json
//! {"command": "run", "protocol": "PP_GV", "n": 8, "seed": 42}
//! ```
//!
//! Every artifact embeds the seed, a SHA-256 of the canonical config and the
//! interpretation label, and contains nothing else that varies between runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    self, build_grid, duality_suite, heisenberg_check, monogamy_suite, ng_oracle_report, threshold_variants,
    tolerable_error, Interpretation, LAMBDA_SEMANTICS, MIN_RESOLUTION,
};
use crate::attacks::AttackParams;
use crate::protocols::{self, GvChannel, Mode, ProtocolConfig, ProtocolId, ProtocolTranscript};
use crate::rng::{self, Stream};
use crate::{Error, Result};

pub const DEFAULT_RESOLUTION: usize = 200;
pub const DEFAULT_SUITE_SAMPLES: usize = 1000;
pub const ORACLE_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Seeded protocol runs.
    Run,
    /// Full (θ, λ) grid.
    Sweep,
    /// Duality, monogamy, Heisenberg and oracle checks.
    Suites,
    /// Tolerable error rate.
    Threshold,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Sweep => "sweep",
            Command::Suites => "suites",
            Command::Threshold => "threshold",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Command::Run | Command::Suites)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown output format {s:?}"))),
        }
    }
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

fn default_runs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: Command,
    /// Required except for `suites`; a `threshold` without one covers every
    /// pair protocol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackParams>,
    /// Independent runs, each seeded from `seed` by index.
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bb84_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bell_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disclosed_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gv: Option<GvChannel>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub interpretation: Interpretation,
    /// `threshold` only: evaluate every interpretation variant.
    #[serde(default)]
    pub all_variants: bool,
    /// `suites` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl ScenarioConfig {
    pub fn new(command: Command) -> Self {
        serde_json::from_value(json!({ "command": command })).expect("defaults")
    }

    pub fn validate(&self) -> Result<()> {
        let cmd = self.command.name();
        if self.command.is_stochastic() && self.seed.is_none() {
            return Err(Error::Config(format!("seed: required for the {cmd} command")));
        }
        if self.formats.is_empty() {
            return Err(Error::Config(
                "formats: at least one output format is needed".into(),
            ));
        }
        match self.command {
            Command::Run => {
                let p = self.protocol.ok_or_else(|| missing("protocol", cmd))?;
                self.n.ok_or_else(|| missing("n", cmd))?;
                if self.runs == 0 {
                    return Err(Error::Config("runs: must be at least 1".into()));
                }
                self.protocol_config(p, self.seed.unwrap_or(0))?.validate()?;
            }
            Command::Sweep | Command::Threshold => {
                if self.command == Command::Sweep && self.protocol.is_none() {
                    return Err(missing("protocol", cmd));
                }
                if self.protocol == Some(ProtocolId::Gv) {
                    return Err(Error::Config(format!(
                        "protocol: GV has no pair model, {cmd} needs one of PP, CL, DLL, PP_GV, CL_GV, DLL_GV"
                    )));
                }
                if self.resolution < MIN_RESOLUTION {
                    return Err(Error::Config(format!(
                        "resolution: {} is below the minimum of {MIN_RESOLUTION}",
                        self.resolution
                    )));
                }
                if self.attack.is_some() {
                    return Err(Error::Config(format!(
                        "attack: {cmd} always scans the symmetric attack; choose legs via interpretation.legs"
                    )));
                }
            }
            Command::Suites => {
                if let Some(s) = self.samples {
                    if s < analysis::MIN_SAMPLES {
                        return Err(Error::Config(format!(
                            "samples: {s} is below the minimum of {}",
                            analysis::MIN_SAMPLES
                        )));
                    }
                }
            }
        }
        if let Some(a) = &self.attack {
            a.validate()?;
        }
        Ok(())
    }

    /// The protocol config of the run with the given seed.
    pub fn protocol_config(&self, protocol: ProtocolId, seed: u64) -> Result<ProtocolConfig> {
        let n = self.n.ok_or_else(|| missing("n", self.command.name()))?;
        let mut c = ProtocolConfig::new(protocol, n, seed);
        c.attack = self.attack.clone();
        c.message = self.message.clone();
        c.mode = self.mode;
        c.bell_threshold = self.bell_threshold;
        if let Some(t) = self.bb84_threshold {
            c.bb84_threshold = t;
        }
        if let Some(f) = self.disclosed_fraction {
            c.disclosed_fraction = f;
        }
        if let Some(g) = self.gv {
            c.gv = g;
        }
        Ok(c)
    }

    /// SHA-256 of the canonical JSON with the output directory blanked,
    /// so moving the output does not change the hash.
    pub fn config_hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn missing(field: &str, cmd: &str) -> Error {
    Error::Config(format!("{field}: required for the {cmd} command"))
}

/// Parse and validate a JSON scenario; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let c: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// One line per task.
    pub summaries: Vec<String>,
}

struct Meta {
    pairs: Vec<(String, String)>,
}

impl Meta {
    fn new(config: &ScenarioConfig, interpretation: Option<&Interpretation>) -> Self {
        let seed = config.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        let mut pairs = vec![
            (
                "tool".to_string(),
                format!("orthoqkd {}", env!("CARGO_PKG_VERSION")),
            ),
            ("command".to_string(), config.command.name().to_string()),
            ("seed".to_string(), seed),
            ("config_sha256".to_string(), config.config_hash()),
        ];
        if let Some(i) = interpretation {
            pairs.push(("interpretation".to_string(), i.label()));
        } else {
            pairs.push(("interpretation".to_string(), "n/a".to_string()));
        }
        Meta { pairs }
    }

    fn json(&self) -> Value {
        let mut m = serde_json::Map::new();
        for (k, v) in &self.pairs {
            m.insert(k.clone(), Value::String(v.clone()));
        }
        m.insert("lambda_semantics".into(), Value::String(LAMBDA_SEMANTICS.into()));
        Value::Object(m)
    }

    fn csv_prefix(&self) -> String {
        self.pairs.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }
}

fn wrap(meta: &Meta, result: Value) -> String {
    let mut s =
        serde_json::to_string_pretty(&json!({ "meta": meta.json(), "result": result })).expect("json");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Compute every artifact without touching the disk.
pub fn render(config: &ScenarioConfig) -> Result<Outcome> {
    config.validate()?;
    let dir = &config.out;
    let wants = |f: Format| config.formats.contains(&f);
    let mut artifacts = Vec::new();
    let mut summaries = Vec::new();
    match config.command {
        Command::Run => {
            let p = config.protocol.expect("validated");
            let base = config.seed.expect("validated");
            let transcripts: Vec<ProtocolTranscript> = (0..config.runs)
                .map(|i| {
                    let seed = if config.runs == 1 {
                        base
                    } else {
                        rng::child_seed(base, i as u64)
                    };
                    protocols::run(&config.protocol_config(p, seed)?)
                })
                .collect::<Result<_>>()?;
            let meta = Meta::new(config, None);
            let stem = format!("run_{p}");
            if wants(Format::Json) {
                let body = if transcripts.len() == 1 {
                    to_value(&transcripts[0])
                } else {
                    to_value(&transcripts)
                };
                artifacts.push(Artifact {
                    path: dir.join(format!("{stem}.json")),
                    contents: wrap(&meta, body),
                });
            }
            if wants(Format::Csv) {
                let rows: Vec<Vec<String>> = transcripts
                    .iter()
                    .map(|t| {
                        let rate = |k: &str| t.error_rates.get(k).map_or(String::new(), |v| v.to_string());
                        vec![
                            t.seed.to_string(),
                            t.aborted.to_string(),
                            t.abort_reason.clone().unwrap_or_default(),
                            t.sent_bits.len().to_string(),
                            t.bit_errors().to_string(),
                            rate("leg1_bb84"),
                            rate("leg1_bell"),
                            rate("leg2_bb84"),
                            rate("leg2_bell"),
                            rate("gv_timing"),
                            rate("gv_sample"),
                            rate("message"),
                        ]
                    })
                    .collect();
                let header = [
                    "seed",
                    "aborted",
                    "abort_reason",
                    "bits",
                    "bit_errors",
                    "leg1_bb84",
                    "leg1_bell",
                    "leg2_bb84",
                    "leg2_bell",
                    "gv_timing",
                    "gv_sample",
                    "message",
                ];
                artifacts.push(Artifact {
                    path: dir.join(format!("{stem}.csv")),
                    contents: meta.csv_prefix() + &csv_text(&header, &rows)?,
                });
            }
            let aborted = transcripts.iter().filter(|t| t.aborted).count();
            let errors: usize = transcripts.iter().map(|t| t.bit_errors()).sum();
            summaries.push(format!(
                "run {p} n={} runs={} aborted={aborted} bit_errors={errors}",
                config.n.expect("validated"),
                transcripts.len()
            ));
        }
        Command::Sweep => {
            let p = config.protocol.expect("validated");
            let interp = config.interpretation;
            let grid = build_grid(p, config.resolution, interp)?;
            let meta = Meta::new(config, Some(&interp));
            let stem = format!("grid_{p}_{}", config.resolution);
            if wants(Format::Csv) {
                artifacts.push(Artifact {
                    path: dir.join(format!("{stem}.csv")),
                    contents: grid.to_csv(&meta.pairs)?,
                });
            }
            if wants(Format::Json) {
                artifacts.push(Artifact {
                    path: dir.join(format!("{stem}.json")),
                    contents: wrap(&meta, to_value(&grid)),
                });
            }
            let secure = grid.cells.iter().filter(|c| c.flag == 1).count();
            summaries.push(format!(
                "sweep {p} {r}x{r}: {} cells, {secure} with I_B > chi",
                grid.cells.len(),
                r = config.resolution
            ));
        }
        Command::Threshold => {
            let targets: Vec<ProtocolId> = match config.protocol {
                Some(p) => vec![p],
                None => analysis::PAIR_PROTOCOLS.to_vec(),
            };
            let interp = config.interpretation;
            let meta = Meta::new(config, (!config.all_variants).then_some(&interp));
            let mut results = Vec::new();
            let mut rows = Vec::new();
            for p in targets {
                if config.all_variants {
                    let vs = threshold_variants(p, config.resolution)?;
                    for v in &vs {
                        rows.push(threshold_row(p, &v.label, v.result.as_ref()));
                    }
                    let best = vs
                        .iter()
                        .filter_map(|v| v.result.as_ref())
                        .map(|r| r.e0)
                        .fold(f64::INFINITY, f64::min);
                    summaries.push(format!(
                        "threshold {p}: {} variants, lowest e0 = {best:.5}",
                        vs.len()
                    ));
                    results.push(json!({ "protocol": p, "variants": vs }));
                } else {
                    let t = tolerable_error(&build_grid(p, config.resolution, interp)?)?;
                    rows.push(threshold_row(p, &interp.label(), Some(&t)));
                    summaries.push(format!(
                        "threshold {p}: e0 = {:.5} at theta = {:.5}, lambda = {:.5}",
                        t.e0, t.theta_star, t.lambda_star
                    ));
                    results.push(to_value(&t));
                }
            }
            let stem = match config.protocol {
                Some(p) => format!("threshold_{p}"),
                None => "threshold_all".to_string(),
            };
            if wants(Format::Json) {
                let body = if results.len() == 1 {
                    results.remove(0)
                } else {
                    Value::Array(results)
                };
                artifacts.push(Artifact {
                    path: dir.join(format!("{stem}.json")),
                    contents: wrap(&meta, body),
                });
            }
            if wants(Format::Csv) {
                let header = [
                    "protocol",
                    "interpretation",
                    "e0",
                    "theta_star",
                    "lambda_star",
                    "resolution",
                ];
                artifacts.push(Artifact {
                    path: dir.join(format!("{stem}.csv")),
                    contents: meta.csv_prefix() + &csv_text(&header, &rows)?,
                });
            }
        }
        Command::Suites => {
            let seed = config.seed.expect("validated");
            let samples = config.samples.unwrap_or(DEFAULT_SUITE_SAMPLES);
            let mut r = rng::stream(seed, Stream::Suite);
            let duality = duality_suite(samples, &mut r)?;
            let monogamy = monogamy_suite(samples, &mut r)?;
            let heisenberg = heisenberg_check()?;
            let oracle = ng_oracle_report(ORACLE_POINTS)?;
            let meta = Meta::new(config, None);
            if wants(Format::Json) {
                let body = json!({
                    "duality": duality,
                    "monogamy": monogamy,
                    "heisenberg": heisenberg,
                    "oracle": oracle,
                });
                artifacts.push(Artifact {
                    path: dir.join("suites.json"),
                    contents: wrap(&meta, body),
                });
            }
            if wants(Format::Csv) {
                let kv = [
                    ("duality.samples", duality.samples as f64),
                    ("duality.pure_max_violation", duality.pure_max_violation),
                    ("duality.mixed_max_excess", duality.mixed_max_excess),
                    ("duality.mixed_violations", duality.mixed_violations as f64),
                    ("duality.entropy_max", duality.entropy_max),
                    ("duality.entropy_argmax", duality.entropy_argmax),
                    ("monogamy.samples", monogamy.samples as f64),
                    ("monogamy.violations", monogamy.violations as f64),
                    ("monogamy.min_slack", monogamy.min_slack),
                    ("monogamy.ghz_tau", monogamy.ghz_tau),
                    ("monogamy.w_tau", monogamy.w_tau),
                    ("heisenberg.r_error", heisenberg.r_error),
                    ("heisenberg.h_d", heisenberg.h_d),
                    ("heisenberg.deviation", heisenberg.deviation),
                    ("oracle.points", oracle.points.len() as f64),
                    ("oracle.max_abs_diff", oracle.max_abs_diff),
                ];
                let rows: Vec<Vec<String>> = kv
                    .iter()
                    .map(|(k, v)| vec![k.to_string(), v.to_string()])
                    .collect();
                artifacts.push(Artifact {
                    path: dir.join("suites.csv"),
                    contents: meta.csv_prefix() + &csv_text(&["quantity", "value"], &rows)?,
                });
            }
            summaries.push(format!(
                "suites: duality |P+C-1| <= {:.2e}, monogamy violations {}, GHZ tau {:.6}, oracle diff {:.2e}",
                duality.pure_max_violation, monogamy.violations, monogamy.ghz_tau, oracle.max_abs_diff
            ));
        }
    }
    Ok(Outcome { artifacts, summaries })
}

fn threshold_row(p: ProtocolId, label: &str, t: Option<&analysis::ThresholdResult>) -> Vec<String> {
    let f = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| x.to_string());
    vec![
        p.to_string(),
        label.to_string(),
        f(t.map(|t| t.e0)),
        f(t.map(|t| t.theta_star)),
        f(t.map(|t| t.lambda_star)),
        t.map_or_else(String::new, |t| t.resolution.to_string()),
    ]
}

fn write_all(artifacts: &[Artifact]) -> Result<()> {
    for a in artifacts {
        if let Some(parent) = a.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
        }
        fs::write(&a.path, &a.contents).map_err(|e| Error::Io(format!("{}: {e}", a.path.display())))?;
    }
    Ok(())
}

/// Render, then write every artifact. A protocol abort is a result, not an
/// error.
pub fn execute(config: &ScenarioConfig) -> Result<Outcome> {
    let outcome = render(config)?;
    write_all(&outcome.artifacts)?;
    Ok(outcome)
}

/// Read a config file and apply command-line overrides.
pub fn load_config(
    path: &Path,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    resolution: Option<usize>,
) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut c: ScenarioConfig = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(o) = out {
        c.out = o;
    }
    if let Some(f) = format {
        c.formats = vec![f];
    }
    if seed.is_some() {
        c.seed = seed;
    }
    if let Some(r) = resolution {
        c.resolution = r;
    }
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run_config() {
        let c = parse_config(r#"{"command":"run","protocol":"PP_GV","n":8,"seed":42}"#).unwrap();
        assert_eq!(c.protocol, Some(ProtocolId::PpGv));
        assert_eq!(c.resolution, DEFAULT_RESOLUTION);
        assert_eq!(c.runs, 1);
    }

    #[test]
    fn out_of_range_lambda_names_the_field() {
        let e = parse_config(
            r#"{"command":"run","protocol":"PP_GV","n":8,"seed":1,
                "attack":{"kind":"symmetric_ng","theta":0.5,"lambda":1.3}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("lambda"), "{e}");
    }

    #[test]
    fn strictness() {
        assert!(parse_config(r#"{"command":"run","protocol":"PP","n":8,"seed":1,"bogus":0}"#).is_err());
        let e = parse_config(r#"{"command":"run","protocol":"PP","n":8}"#).unwrap_err();
        assert!(e.to_string().contains("seed"));
        assert!(parse_config(r#"{"command":"suites"}"#).is_err());
        assert!(parse_config(r#"{"command":"threshold","protocol":"GV"}"#).is_err());
        assert!(parse_config(r#"{"command":"sweep","protocol":"PP","resolution":10}"#).is_err());
        assert!(parse_config(r#"{"command":"threshold"}"#).is_ok());
    }

    #[test]
    fn round_trip() {
        let c = parse_config(
            r#"{"command":"run","protocol":"DLL","n":16,"seed":3,"runs":4,
                "attack":{"kind":"intercept_resend","lambda":0.5},"formats":["csv"]}"#,
        )
        .unwrap();
        assert_eq!(parse_config(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut a = ScenarioConfig::new(Command::Threshold);
        let h = a.config_hash();
        a.out = PathBuf::from("elsewhere");
        assert_eq!(a.config_hash(), h);
        a.seed = Some(1);
        assert_ne!(a.config_hash(), h);
    }

    #[test]
    fn honest_run_renders_clean_transcript() {
        let c = parse_config(r#"{"command":"run","protocol":"PP_GV","n":8,"seed":42}"#).unwrap();
        let o = render(&c).unwrap();
        assert_eq!(o.artifacts.len(), 2);
        let v: Value = serde_json::from_str(&o.artifacts[0].contents).unwrap();
        assert_eq!(v["result"]["aborted"], false);
        assert_eq!(v["result"]["error_rates"]["message"], 0.0);
        assert_eq!(v["meta"]["seed"], "42");
        assert_eq!(render(&c).unwrap(), o);
    }
}
