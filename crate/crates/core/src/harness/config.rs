//! Line-oriented experiment configuration.
//!
//! The format is `key = value` lines grouped under `[section]` headers,
//! with `#` comments. Sections: `[process]` (required), `[estimator]`,
//! `[bandwidth]`, `[experiment]` (each optional, with defaults). Unknown
//! sections and keys are errors, and parse failures report their 1-based
//! line number. `write_config` emits a canonical form that parses back to
//! an equal configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::dependence::{Coefficient, Decay, DependenceBound};
use crate::error::{Error, Result};
use crate::estimators::KernelFamily;
use crate::processes::{DoublingX0, InnovationSpec, ProcessKind, ProcessSpec, Stride};
use crate::rates::{RateParams, Theorem};

use super::experiment::{BandwidthRule, ExperimentConfig, GridSpec, Metric, PILOT_SAMPLES_DEFAULT};

/// Default sample-size grid: 2^9 .. 2^15.
pub fn default_n_grid() -> Vec<usize> {
    (9..=15).map(|k| 1usize << k).collect()
}

/// Named stock processes usable from the CLI and in `[process] preset =`.
pub fn process_preset(name: &str) -> Result<ProcessSpec> {
    match name {
        "doubling" => ProcessSpec::doubling(DoublingX0::Random),
        "linear-gaussian" => Ok(ProcessSpec::linear_gaussian_preset()),
        "iid-uniform" => ProcessSpec::iid(InnovationSpec::Uniform { lo: 0.0, hi: 1.0 }),
        "iid-gaussian" => ProcessSpec::iid(InnovationSpec::Gaussian { mean: 0.0, sd: 1.0 }),
        "iid-cosine" => ProcessSpec::iid(InnovationSpec::RaisedCosine),
        "bilinear-arch" => ProcessSpec::bilinear(
            1.0,
            0.0,
            vec![0.5],
            vec![],
            InnovationSpec::Gaussian { mean: 0.0, sd: 0.9 },
            2.0,
            1000,
        ),
        other => Err(Error::domain(format!(
            "unknown process preset '{other}' (known: doubling, linear-gaussian, iid-uniform, \
             iid-gaussian, iid-cosine, bilinear-arch)"
        ))),
    }
}

pub const PRESET_NAMES: &[&str] =
    &["doubling", "linear-gaussian", "iid-uniform", "iid-gaussian", "iid-cosine", "bilinear-arch"];

struct Section {
    header_line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<(usize, String)> {
        self.take(key).ok_or_else(|| Error::ConfigParse {
            line: self.header_line,
            msg: format!("missing required key '{key}'"),
        })
    }

    fn finish(self) -> Result<()> {
        if let Some((key, (line, _))) = self.entries.into_iter().next() {
            return Err(Error::ConfigParse { line, msg: format!("unknown key '{key}'") });
        }
        Ok(())
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigParse { line, msg: msg.into() }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(err(line_no, "unterminated section header"));
            };
            let name = name.trim().to_string();
            if !matches!(name.as_str(), "process" | "estimator" | "bandwidth" | "experiment") {
                return Err(err(line_no, format!("unknown section '[{name}]'")));
            }
            if sections.contains_key(&name) {
                return Err(err(line_no, format!("duplicate section '[{name}]'")));
            }
            sections
                .insert(name.clone(), Section { header_line: line_no, entries: BTreeMap::new() });
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(line_no, "expected 'key = value'"));
        };
        let Some(section) = current.as_ref() else {
            return Err(err(line_no, "key outside any [section]"));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let entries = &mut sections.get_mut(section).unwrap().entries;
        if entries.contains_key(&key) {
            return Err(err(line_no, format!("duplicate key '{key}'")));
        }
        entries.insert(key, (line_no, value));
    }
    Ok(sections)
}

fn parse_f64(line: usize, v: &str) -> Result<f64> {
    v.parse().map_err(|_| err(line, format!("expected a number, got '{v}'")))
}

fn parse_usize(line: usize, v: &str) -> Result<usize> {
    v.parse().map_err(|_| err(line, format!("expected an integer, got '{v}'")))
}

fn parse_u64(line: usize, v: &str) -> Result<u64> {
    v.parse().map_err(|_| err(line, format!("expected an integer, got '{v}'")))
}

/// `name(arg, arg, ...)` or a bare `name`.
fn parse_call(line: usize, v: &str) -> Result<(String, Vec<f64>)> {
    let v = v.trim();
    let Some(open) = v.find('(') else {
        return Ok((v.to_string(), Vec::new()));
    };
    let Some(inner) = v[open + 1..].strip_suffix(')') else {
        return Err(err(line, format!("missing ')' in '{v}'")));
    };
    let name = v[..open].trim().to_string();
    let mut args = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if !part.is_empty() {
            args.push(parse_f64(line, part)?);
        }
    }
    Ok((name, args))
}

fn parse_innovation(line: usize, v: &str) -> Result<InnovationSpec> {
    let (name, args) = parse_call(line, v)?;
    match (name.as_str(), args.as_slice()) {
        ("bernoulli", [p]) => Ok(InnovationSpec::Bernoulli(*p)),
        ("gaussian", [mean, sd]) => Ok(InnovationSpec::Gaussian { mean: *mean, sd: *sd }),
        ("uniform", [lo, hi]) => Ok(InnovationSpec::Uniform { lo: *lo, hi: *hi }),
        ("raised-cosine", []) => Ok(InnovationSpec::RaisedCosine),
        _ => Err(err(
            line,
            format!(
                "bad law '{v}' (expected bernoulli(p), gaussian(mean,sd), uniform(lo,hi) or \
                 raised-cosine)"
            ),
        )),
    }
}

fn parse_decay(line: usize, v: &str) -> Result<Decay> {
    let (name, args) = parse_call(line, v)?;
    match (name.as_str(), args.as_slice()) {
        ("geometric", [a, b]) => Ok(Decay::Geometric { a: *a, b: *b }),
        ("riemannian", [a]) => Ok(Decay::Riemannian { a: *a }),
        _ => Err(err(line, format!("bad decay '{v}' (geometric(a,b) or riemannian(a))"))),
    }
}

fn parse_coefficient(line: usize, v: &str) -> Result<Coefficient> {
    match v {
        "eta" => Ok(Coefficient::Eta),
        "phitilde" | "phi-tilde" => Ok(Coefficient::PhiTilde),
        _ => Err(err(line, format!("bad coefficient '{v}' (eta or phitilde)"))),
    }
}

fn parse_float_list(line: usize, v: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        if !part.is_empty() {
            out.push(parse_f64(line, part)?);
        }
    }
    Ok(out)
}

fn parse_coeff_map(line: usize, v: &str) -> Result<BTreeMap<i64, f64>> {
    let mut map = BTreeMap::new();
    for part in v.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((k, w)) = part.split_once(':') else {
            return Err(err(line, format!("bad coefficient entry '{part}' (offset:weight)")));
        };
        let offset: i64 = k.trim().parse().map_err(|_| err(line, format!("bad offset '{k}'")))?;
        let weight = parse_f64(line, w.trim())?;
        if map.insert(offset, weight).is_some() {
            return Err(err(line, format!("duplicate coefficient offset {offset}")));
        }
    }
    Ok(map)
}

fn parse_grid(line: usize, v: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() != 3 {
        return Err(err(line, format!("bad grid '{v}' (lo:hi:count)")));
    }
    GridSpec::new(
        parse_f64(line, parts[0].trim())?,
        parse_f64(line, parts[1].trim())?,
        parse_usize(line, parts[2].trim())?,
    )
    .map_err(|e| err(line, e.to_string()))
}

fn parse_process(mut section: Section) -> Result<ProcessSpec> {
    let mut spec = if let Some((line, preset)) = section.take("preset") {
        process_preset(&preset).map_err(|e| err(line, e.to_string()))?
    } else {
        let (kind_line, kind) = section.require("kind")?;
        match kind.as_str() {
            "doubling" => {
                let x0 = match section.take("x0") {
                    None => DoublingX0::Random,
                    Some((_, v)) if v == "random" => DoublingX0::Random,
                    Some((line, v)) => DoublingX0::Fixed(parse_f64(line, &v)?),
                };
                let innovations = match section.take("innovation") {
                    None => InnovationSpec::Bernoulli(0.5),
                    Some((line, v)) => parse_innovation(line, &v)?,
                };
                ProcessSpec::doubling_with(x0, innovations)
                    .map_err(|e| err(kind_line, e.to_string()))?
            }
            "linear" => {
                let (line, v) = section.require("coeffs")?;
                let coeffs = parse_coeff_map(line, &v)?;
                let (line, v) = section.require("innovation")?;
                let innovations = parse_innovation(line, &v)?;
                ProcessSpec::linear(coeffs, innovations)
                    .map_err(|e| err(kind_line, e.to_string()))?
            }
            "bilinear" => {
                let a = match section.take("a") {
                    None => 1.0,
                    Some((line, v)) => parse_f64(line, &v)?,
                };
                let b = match section.take("b") {
                    None => 0.0,
                    Some((line, v)) => parse_f64(line, &v)?,
                };
                let ar = match section.take("ar") {
                    None => vec![],
                    Some((line, v)) => parse_float_list(line, &v)?,
                };
                let ma = match section.take("ma") {
                    None => vec![],
                    Some((line, v)) => parse_float_list(line, &v)?,
                };
                let (line, v) = section.require("innovation")?;
                let innovations = parse_innovation(line, &v)?;
                let norm_order = match section.take("norm_order") {
                    None => 2.0,
                    Some((line, v)) => parse_f64(line, &v)?,
                };
                let burn_in = match section.take("burn_in") {
                    None => crate::processes::BILINEAR_DEFAULT_BURN_IN,
                    Some((line, v)) => parse_usize(line, &v)?,
                };
                ProcessSpec::bilinear(a, b, ar, ma, innovations, norm_order, burn_in)
                    .map_err(|e| err(kind_line, e.to_string()))?
            }
            "iid" => {
                let (line, v) = section.require("law")?;
                let law = parse_innovation(line, &v)?;
                ProcessSpec::iid(law).map_err(|e| err(kind_line, e.to_string()))?
            }
            "sampled" => {
                let (line, v) = section.require("base")?;
                let base = process_preset(&v).map_err(|e| err(line, e.to_string()))?;
                let (line, v) = section.require("stride")?;
                let (name, args) = parse_call(line, &v)?;
                let stride = match (name.as_str(), args.as_slice()) {
                    ("arithmetic", [s]) => Stride::Arithmetic(*s as usize),
                    ("geometric", [b]) => Stride::Geometric(*b as usize),
                    _ => {
                        return Err(err(
                            line,
                            format!("bad stride '{v}' (arithmetic(step) or geometric(base))"),
                        ))
                    }
                };
                ProcessSpec::sampled(base, stride).map_err(|e| err(kind_line, e.to_string()))?
            }
            other => return Err(err(kind_line, format!("unknown process kind '{other}'"))),
        }
    };

    // Optional declared-metadata overrides.
    if let Some((line, v)) = section.take("decay") {
        let decay = parse_decay(line, &v)?;
        let coefficient = match section.take("coefficient") {
            Some((cl, cv)) => parse_coefficient(cl, &cv)?,
            None => spec.dependence.map(|d| d.coefficient).unwrap_or(Coefficient::Eta),
        };
        let constant = match section.take("decay_constant") {
            Some((cl, cv)) => parse_f64(cl, &cv)?,
            None => 1.0,
        };
        let bound = DependenceBound::new(coefficient, decay, constant)
            .map_err(|e| err(line, e.to_string()))?;
        // Consistency with the model family.
        let consistent = match spec.kind {
            ProcessKind::Doubling { .. } => coefficient == Coefficient::PhiTilde,
            ProcessKind::Linear { .. } | ProcessKind::Bilinear { .. } => {
                coefficient == Coefficient::Eta
            }
            _ => true,
        };
        if !consistent {
            return Err(err(
                line,
                format!("coefficient {coefficient} is inconsistent with the model"),
            ));
        }
        spec.dependence = Some(bound);
    } else if let Some((line, _)) = section.take("coefficient") {
        return Err(err(line, "'coefficient' needs a 'decay' key"));
    } else if let Some((line, _)) = section.take("decay_constant") {
        return Err(err(line, "'decay_constant' needs a 'decay' key"));
    }
    if let Some((line, v)) = section.take("regularity") {
        spec.regularity = Some(parse_f64(line, &v)?);
    }
    section.finish()?;
    Ok(spec)
}

fn parse_estimator(mut section: Section) -> Result<KernelFamily> {
    let (kind_line, kind) = section.require("kind")?;
    let fam = match kind.as_str() {
        "compact" => {
            let order = match section.take("order") {
                None => 2,
                Some((line, v)) => parse_usize(line, &v)? as u32,
            };
            KernelFamily::compact(order).map_err(|e| err(kind_line, e.to_string()))?
        }
        "fejer" => KernelFamily::fejer(),
        "haar" => KernelFamily::haar(),
        other => return Err(err(kind_line, format!("unknown estimator kind '{other}'"))),
    };
    section.finish()?;
    Ok(fam)
}

fn parse_bandwidth(mut section: Section) -> Result<BandwidthRule> {
    let (rule_line, rule) = section.require("rule")?;
    let out = match rule.as_str() {
        "theorem" => {
            let (line, v) = section.require("theorem")?;
            let theorem = match v.as_str() {
                "t1" => Theorem::T1,
                "t2" => Theorem::T2,
                "t3mean" => Theorem::T3Mean,
                "t3as" => Theorem::T3AlmostSure,
                other => return Err(err(line, format!("unknown theorem '{other}'"))),
            };
            let (line, v) = section.require("rho")?;
            let rho = parse_f64(line, &v)?;
            let d = match section.take("d") {
                None => 1,
                Some((line, v)) => parse_usize(line, &v)? as u32,
            };
            let (line, v) = section.require("decay")?;
            let decay = parse_decay(line, &v)?;
            let (cl, cv) = section.require("coefficient")?;
            let coefficient = parse_coefficient(cl, &cv)?;
            let constant = match section.take("decay_constant") {
                Some((cl, cv)) => parse_f64(cl, &cv)?,
                None => 1.0,
            };
            let q = match section.take("q") {
                None => 2.0,
                Some((line, v)) => parse_f64(line, &v)?,
            };
            let bound = DependenceBound::new(coefficient, decay, constant)
                .map_err(|e| err(line, e.to_string()))?;
            BandwidthRule::Theorem(RateParams { rho, d, decay: bound, q, theorem })
        }
        "fixed" => {
            let (line, v) = section.require("m")?;
            BandwidthRule::Fixed(parse_usize(line, &v)? as u32)
        }
        "power" => {
            let c = match section.take("c") {
                None => 1.0,
                Some((line, v)) => parse_f64(line, &v)?,
            };
            let (line, v) = section.require("exponent")?;
            BandwidthRule::PowerLaw { c, exponent: parse_f64(line, &v)? }
        }
        other => return Err(err(rule_line, format!("unknown bandwidth rule '{other}'"))),
    };
    section.finish()?;
    Ok(out)
}

struct ExperimentSection {
    n_grid: Vec<usize>,
    replicates: usize,
    metric: Metric,
    seed: u64,
    workers: usize,
    expected_exponent: Option<f64>,
    slope_tol: f64,
    pilot_samples: usize,
    pilot_cache: Option<PathBuf>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            n_grid: default_n_grid(),
            replicates: 500,
            metric: Metric::PointwiseLq { x: 0.0, q: 2.0 },
            seed: 0,
            workers: 0,
            expected_exponent: None,
            slope_tol: 0.1,
            pilot_samples: PILOT_SAMPLES_DEFAULT,
            pilot_cache: None,
        }
    }
}

fn parse_experiment(mut section: Section) -> Result<ExperimentSection> {
    let mut out = ExperimentSection::default();
    if let Some((line, v)) = section.take("n_grid") {
        if v.starts_with("geometric") {
            let (_, args) = parse_call(line, &v)?;
            let [start, factor, count] = args.as_slice() else {
                return Err(err(line, "n_grid geometric needs (start, factor, count)"));
            };
            let (mut n, factor, count) = (*start as usize, *factor as usize, *count as usize);
            if n == 0 || factor < 2 || count == 0 {
                return Err(err(line, "bad geometric n_grid parameters"));
            }
            let mut grid = Vec::with_capacity(count);
            for _ in 0..count {
                grid.push(n);
                n *= factor;
            }
            out.n_grid = grid;
        } else {
            let mut grid = Vec::new();
            for part in v.split(',') {
                let part = part.trim();
                if !part.is_empty() {
                    grid.push(parse_usize(line, part)?);
                }
            }
            out.n_grid = grid;
        }
    }
    if let Some((line, v)) = section.take("replicates") {
        out.replicates = parse_usize(line, &v)?;
    }
    let metric_kind = section.take("metric");
    let x = section.take("x");
    let q = section.take("q");
    let grid = section.take("grid");
    let metric_name = match &metric_kind {
        None => "pointwise_lq".to_string(),
        Some((_, v)) => v.clone(),
    };
    out.metric = match metric_name.as_str() {
        "pointwise_lq" => {
            let x = match x {
                None => 0.0,
                Some((line, v)) => parse_f64(line, &v)?,
            };
            let q = match q {
                None => 2.0,
                Some((line, v)) => parse_f64(line, &v)?,
            };
            if let Some((line, _)) = grid {
                return Err(err(line, "'grid' applies to mise/sup metrics only"));
            }
            Metric::PointwiseLq { x, q }
        }
        "mise" | "sup" => {
            if let Some((line, _)) = x.or(q) {
                return Err(err(line, "'x'/'q' apply to the pointwise metric only"));
            }
            let g = match grid {
                None => GridSpec::new(-3.0, 3.0, 201).unwrap(),
                Some((line, v)) => parse_grid(line, &v)?,
            };
            if metric_name == "mise" {
                Metric::Mise { grid: g }
            } else {
                Metric::SupNorm { grid: g }
            }
        }
        other => {
            let line = metric_kind.map(|(l, _)| l).unwrap_or(section.header_line);
            return Err(err(line, format!("unknown metric '{other}'")));
        }
    };
    if let Some((line, v)) = section.take("seed") {
        out.seed = parse_u64(line, &v)?;
    }
    if let Some((line, v)) = section.take("workers") {
        out.workers = parse_usize(line, &v)?;
    }
    if let Some((line, v)) = section.take("expected_exponent") {
        out.expected_exponent = Some(parse_f64(line, &v)?);
    }
    if let Some((line, v)) = section.take("slope_tol") {
        out.slope_tol = parse_f64(line, &v)?;
    }
    if let Some((line, v)) = section.take("pilot_samples") {
        out.pilot_samples = parse_usize(line, &v)?;
    }
    if let Some((_, v)) = section.take("pilot_cache") {
        out.pilot_cache = Some(PathBuf::from(v));
    }
    section.finish()?;
    Ok(out)
}

/// Parse a full experiment configuration from text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut sections = split_sections(text)?;
    let process = match sections.remove("process") {
        Some(s) => parse_process(s)?,
        None => {
            return Err(err(1, "missing required section [process]"));
        }
    };
    let estimator = match sections.remove("estimator") {
        Some(s) => parse_estimator(s)?,
        None => KernelFamily::compact(2).expect("order 2 is shipped"),
    };
    let bandwidth = match sections.remove("bandwidth") {
        Some(s) => parse_bandwidth(s)?,
        None => BandwidthRule::PowerLaw { c: 1.0, exponent: 0.2 },
    };
    let exp = match sections.remove("experiment") {
        Some(s) => parse_experiment(s)?,
        None => ExperimentSection::default(),
    };
    let config = ExperimentConfig {
        process,
        estimator,
        bandwidth,
        n_grid: exp.n_grid,
        replicates: exp.replicates,
        metric: exp.metric,
        seed: exp.seed,
        workers: exp.workers,
        expected_exponent: exp.expected_exponent,
        slope_tol: exp.slope_tol,
        pilot_samples: exp.pilot_samples,
        pilot_cache: exp.pilot_cache,
    };
    config.validate()?;
    Ok(config)
}

/// Read and parse a config file.
pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

// String-form parsers shared with the CLI.

pub fn decay_from_str(s: &str) -> Result<Decay> {
    parse_decay(0, s)
}

pub fn coefficient_from_str(s: &str) -> Result<Coefficient> {
    parse_coefficient(0, s)
}

pub fn theorem_from_str(s: &str) -> Result<Theorem> {
    match s {
        "t1" => Ok(Theorem::T1),
        "t2" => Ok(Theorem::T2),
        "t3mean" => Ok(Theorem::T3Mean),
        "t3as" => Ok(Theorem::T3AlmostSure),
        other => Err(Error::domain(format!("unknown theorem '{other}' (t1, t2, t3mean, t3as)"))),
    }
}

pub fn estimator_from_str(s: &str) -> Result<KernelFamily> {
    match s {
        "compact2" => KernelFamily::compact(2),
        "compact4" => KernelFamily::compact(4),
        "fejer" => Ok(KernelFamily::fejer()),
        "haar" => Ok(KernelFamily::haar()),
        other => Err(Error::domain(format!(
            "unknown estimator '{other}' (compact2, compact4, fejer, haar)"
        ))),
    }
}

pub fn grid_from_str(s: &str) -> Result<GridSpec> {
    parse_grid(0, s)
}

fn write_innovation(law: &InnovationSpec) -> Result<String> {
    match law {
        InnovationSpec::Fixed(_) => {
            Err(Error::domain("config files cannot express Fixed innovation sequences"))
        }
        other => Ok(other.to_string()),
    }
}

fn preset_name_of(spec: &ProcessSpec) -> Option<&'static str> {
    PRESET_NAMES
        .iter()
        .find(|name| process_preset(name).map(|p| p == *spec).unwrap_or(false))
        .copied()
}

fn write_process(spec: &ProcessSpec, out: &mut String) -> Result<()> {
    use std::fmt::Write;
    out.push_str("[process]\n");
    match &spec.kind {
        ProcessKind::Doubling { x0, innovations } => {
            out.push_str("kind = doubling\n");
            match x0 {
                DoublingX0::Random => out.push_str("x0 = random\n"),
                DoublingX0::Fixed(v) => {
                    let _ = writeln!(out, "x0 = {v}");
                }
            }
            let _ = writeln!(out, "innovation = {}", write_innovation(innovations)?);
        }
        ProcessKind::Linear { coeffs, innovations } => {
            out.push_str("kind = linear\n");
            let parts: Vec<String> = coeffs.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            let _ = writeln!(out, "coeffs = {}", parts.join(", "));
            let _ = writeln!(out, "innovation = {}", write_innovation(innovations)?);
        }
        ProcessKind::Bilinear { a, b, ar, ma, innovations, norm_order, burn_in } => {
            out.push_str("kind = bilinear\n");
            let _ = writeln!(out, "a = {a}");
            let _ = writeln!(out, "b = {b}");
            let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
            let _ = writeln!(out, "ar = {}", list(ar));
            let _ = writeln!(out, "ma = {}", list(ma));
            let _ = writeln!(out, "innovation = {}", write_innovation(innovations)?);
            let _ = writeln!(out, "norm_order = {norm_order}");
            let _ = writeln!(out, "burn_in = {burn_in}");
        }
        ProcessKind::IidBaseline { law } => {
            out.push_str("kind = iid\n");
            let _ = writeln!(out, "law = {}", write_innovation(law)?);
        }
        ProcessKind::Sampled { base, stride } => {
            out.push_str("kind = sampled\n");
            let Some(name) = preset_name_of(base) else {
                return Err(Error::domain(
                    "config files can only express sampled processes over preset bases",
                ));
            };
            let _ = writeln!(out, "base = {name}");
            let _ = writeln!(out, "stride = {stride}");
        }
    }
    if let Some(dep) = &spec.dependence {
        let _ = writeln!(out, "decay = {}", dep.decay);
        let _ = writeln!(out, "coefficient = {}", dep.coefficient);
        let _ = writeln!(out, "decay_constant = {}", dep.constant);
    }
    if let Some(rho) = spec.regularity {
        let _ = writeln!(out, "regularity = {rho}");
    }
    Ok(())
}

/// Emit a canonical config that parses back to an equal configuration.
pub fn write_config(config: &ExperimentConfig) -> Result<String> {
    use std::fmt::Write;
    let mut out = String::new();
    write_process(&config.process, &mut out)?;

    out.push_str("\n[estimator]\n");
    match config.estimator.kind {
        crate::estimators::KernelKind::Compact { order } => {
            out.push_str("kind = compact\n");
            let _ = writeln!(out, "order = {order}");
        }
        crate::estimators::KernelKind::FejerProjection => out.push_str("kind = fejer\n"),
        crate::estimators::KernelKind::HaarWavelet => out.push_str("kind = haar\n"),
    }

    out.push_str("\n[bandwidth]\n");
    match &config.bandwidth {
        BandwidthRule::Theorem(p) => {
            out.push_str("rule = theorem\n");
            let _ = writeln!(out, "theorem = {}", p.theorem);
            let _ = writeln!(out, "rho = {}", p.rho);
            let _ = writeln!(out, "d = {}", p.d);
            let _ = writeln!(out, "decay = {}", p.decay.decay);
            let _ = writeln!(out, "coefficient = {}", p.decay.coefficient);
            let _ = writeln!(out, "decay_constant = {}", p.decay.constant);
            let _ = writeln!(out, "q = {}", p.q);
        }
        BandwidthRule::Fixed(m) => {
            out.push_str("rule = fixed\n");
            let _ = writeln!(out, "m = {m}");
        }
        BandwidthRule::PowerLaw { c, exponent } => {
            out.push_str("rule = power\n");
            let _ = writeln!(out, "c = {c}");
            let _ = writeln!(out, "exponent = {exponent}");
        }
    }

    out.push_str("\n[experiment]\n");
    let grid: Vec<String> = config.n_grid.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "n_grid = {}", grid.join(", "));
    let _ = writeln!(out, "replicates = {}", config.replicates);
    match config.metric {
        Metric::PointwiseLq { x, q } => {
            out.push_str("metric = pointwise_lq\n");
            let _ = writeln!(out, "x = {x}");
            let _ = writeln!(out, "q = {q}");
        }
        Metric::Mise { grid } => {
            out.push_str("metric = mise\n");
            let _ = writeln!(out, "grid = {}:{}:{}", grid.lo, grid.hi, grid.points);
        }
        Metric::SupNorm { grid } => {
            out.push_str("metric = sup\n");
            let _ = writeln!(out, "grid = {}:{}:{}", grid.lo, grid.hi, grid.points);
        }
    }
    let _ = writeln!(out, "seed = {}", config.seed);
    let _ = writeln!(out, "workers = {}", config.workers);
    if let Some(e) = config.expected_exponent {
        let _ = writeln!(out, "expected_exponent = {e}");
    }
    let _ = writeln!(out, "slope_tol = {}", config.slope_tol);
    let _ = writeln!(out, "pilot_samples = {}", config.pilot_samples);
    if let Some(p) = &config.pilot_cache {
        let _ = writeln!(out, "pilot_cache = {}", p.display());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "\
# slope experiment
[process]
kind = linear
coeffs = -1:0.25, 0:0.5, 1:0.25
innovation = gaussian(0,1)

[estimator]
kind = compact
order = 2

[bandwidth]
rule = power
c = 1
exponent = 0.2

[experiment]
n_grid = geometric(512, 2, 7)
replicates = 500
metric = pointwise_lq
x = 0
q = 2
seed = 42
";

    #[test]
    fn full_config_parses() {
        let config = parse_config(FULL).unwrap();
        assert_eq!(config.n_grid, vec![512, 1024, 2048, 4096, 8192, 16384, 32768]);
        assert_eq!(config.replicates, 500);
        assert_eq!(config.seed, 42);
        assert!(matches!(config.metric, Metric::PointwiseLq { x, q } if x == 0.0 && q == 2.0));
    }

    #[test]
    fn round_trip_reproduces_equal_configs() {
        let mut configs = vec![parse_config(FULL).unwrap()];
        configs.push(
            parse_config(
                "[process]\npreset = doubling\n\n[experiment]\nmetric = mise\ngrid = 0:1:51\n",
            )
            .unwrap(),
        );
        configs.push(
            parse_config("[process]\npreset = bilinear-arch\n\n[bandwidth]\nrule = fixed\nm = 8\n")
                .unwrap(),
        );
        configs.push(
            parse_config(
                "[process]\nkind = sampled\nbase = doubling\nstride = arithmetic(2)\n\
             \n[estimator]\nkind = haar\n",
            )
            .unwrap(),
        );
        configs.push(parse_config(
            "[process]\npreset = linear-gaussian\n\n[bandwidth]\nrule = theorem\ntheorem = t1\n\
             rho = 2\nd = 1\ndecay = riemannian(4)\ncoefficient = eta\nq = 2\n\
             \n[experiment]\nmetric = sup\ngrid = -3:3:201\nseed = 9\n",
        )
        .unwrap());
        for config in configs {
            let text = write_config(&config).unwrap();
            let back = parse_config(&text).unwrap();
            assert_eq!(back, config, "round trip failed for:\n{text}");
        }
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let text = "[process]\npreset = doubling\nbogus_line_without_equals\n";
        match parse_config(text).unwrap_err() {
            Error::ConfigParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = "[process]\npreset = doubling\nturbo = on\n";
        match parse_config(text).unwrap_err() {
            Error::ConfigParse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("turbo"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unknown_sections_and_duplicates_are_errors() {
        assert!(parse_config("[warp]\nspeed = 9\n").is_err());
        let dup = "[process]\npreset = doubling\npreset = doubling\n";
        match parse_config(dup).unwrap_err() {
            Error::ConfigParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn process_section_is_required() {
        assert!(parse_config("[experiment]\nseed = 1\n").is_err());
    }

    #[test]
    fn inconsistent_dependence_override_is_rejected() {
        let text = "[process]\nkind = doubling\ndecay = geometric(0.5,1)\ncoefficient = eta\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn decreasing_n_grid_is_rejected() {
        let text = "[process]\npreset = doubling\n\n[experiment]\nn_grid = 512, 256, 128, 64\n";
        assert!(parse_config(text).is_err());
    }
}
