//! Declarative experiment configs: a flat `key = value` text format, full
//! up-front validation with stable diagnostic codes, and compilation into a
//! runnable [`ExperimentConfig`].
//!
//! Diagnostic codes (stable, matched by tests and scripts):
//! `duplicate-key`, `missing-key`, `unknown-key`, `unknown-experiment`,
//! `unknown-family`, `unknown-function`, `bad-interval`, `domain-mismatch`,
//! `lambda-range`, `bad-lambda`, `missing-derivative`, `bad-n-list`,
//! `bad-x-grid`, `bad-k-list`, `bad-bound-kind`, `bad-tol`, `bad-output`,
//! `bad-flag`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::estimates::BoundKind;
use crate::functions::parse_function;
use crate::interval::Interval;
use crate::operators::Family;
use crate::transform::LambdaSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Moments,
    Converge,
    Voronovskaja,
    Shape,
    Bounds,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Moments => "moments",
            Experiment::Converge => "converge",
            Experiment::Voronovskaja => "voronovskaja",
            Experiment::Shape => "shape",
            Experiment::Bounds => "bounds",
        }
    }

    pub fn from_name(s: &str) -> Option<Experiment> {
        [
            Experiment::Moments,
            Experiment::Converge,
            Experiment::Voronovskaja,
            Experiment::Shape,
            Experiment::Bounds,
        ]
        .into_iter()
        .find(|e| e.name() == s)
    }
}

/// Parseable, displayable lambda schedules: the closed grammar
/// `{constant, "1/n", "x", "c*x"}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaSpec {
    Constant(f64),
    OneOverN,
    ScaledX(f64),
}

impl LambdaSpec {
    pub fn parse(s: &str) -> Option<LambdaSpec> {
        let s = s.trim();
        if s == "1/n" {
            return Some(LambdaSpec::OneOverN);
        }
        if s == "x" {
            return Some(LambdaSpec::ScaledX(1.0));
        }
        if let Some(c) = s.strip_suffix("*x") {
            return c.trim().parse::<f64>().ok().map(LambdaSpec::ScaledX);
        }
        s.parse::<f64>().ok().map(LambdaSpec::Constant)
    }

    pub fn to_schedule(self) -> Result<LambdaSchedule<f64>> {
        match self {
            LambdaSpec::Constant(c) => LambdaSchedule::constant(c),
            LambdaSpec::OneOverN => Ok(LambdaSchedule::one_over_n()),
            LambdaSpec::ScaledX(c) => Ok(LambdaSchedule::scaled_x(c)),
        }
    }

    pub fn display(&self) -> String {
        match self {
            LambdaSpec::Constant(c) => format!("{c}"),
            LambdaSpec::OneOverN => "1/n".into(),
            LambdaSpec::ScaledX(c) if *c == 1.0 => "x".into(),
            LambdaSpec::ScaledX(c) => format!("{c}*x"),
        }
    }

    fn value(&self, n: usize, x: f64) -> f64 {
        match self {
            LambdaSpec::Constant(c) => *c,
            LambdaSpec::OneOverN => 1.0 / n as f64,
            LambdaSpec::ScaledX(c) => c * x,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

fn diag(code: &'static str, message: impl Into<String>) -> Diagnostic {
    Diagnostic { code, message: message.into() }
}

/// A fully validated, runnable experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: Family,
    /// Function domain `I`.
    pub domain: Interval<f64>,
    /// Evaluation domain `J`.
    pub eval_domain: Interval<f64>,
    pub lambda: LambdaSpec,
    pub function: String,
    pub n_list: Vec<usize>,
    pub x_grid: Vec<f64>,
    pub k_list: Vec<usize>,
    pub bound_kind: Option<BoundKind>,
    pub tol: f64,
    pub output: PathBuf,
    pub svg: bool,
    pub seed: u64,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "family",
    "I",
    "J",
    "lambda",
    "function",
    "n_list",
    "x_grid",
    "k_list",
    "bound_kind",
    "tol",
    "output",
    "svg",
    "seed",
];

/// Parse the flat `key = value` text into a key map. Blank lines and lines
/// starting with `#` are ignored. Duplicate keys are diagnostics.
pub fn parse_raw(text: &str) -> (BTreeMap<String, String>, Vec<Diagnostic>) {
    let mut map = BTreeMap::new();
    let mut diags = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            diags.push(diag(
                "unknown-key",
                format!("line {}: expected `key = value`, got `{line}`", lineno + 1),
            ));
            continue;
        };
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            diags.push(diag("duplicate-key", format!("key `{key}` appears twice")));
        }
    }
    (map, diags)
}

fn parse_interval(s: &str) -> Option<Interval<f64>> {
    let (lo, hi) = s.split_once(',')?;
    let parse_end = |t: &str| -> Option<f64> {
        match t.trim() {
            "inf" | "+inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            other => other.parse().ok(),
        }
    };
    let (lo, hi) = (parse_end(lo)?, parse_end(hi)?);
    if lo >= hi {
        return None;
    }
    Some(Interval {
        lo,
        hi,
        lo_closed: lo.is_finite(),
        hi_closed: hi.is_finite(),
    })
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',').map(|t| t.trim().parse::<T>().ok()).collect()
}

/// Validate config text. Returns every violation found; an empty list means
/// `compile` will succeed and `run` will not hit a config error.
pub fn validate(text: &str) -> Vec<Diagnostic> {
    let (map, mut diags) = parse_raw(text);

    for key in map.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            diags.push(diag("unknown-key", format!("unknown key `{key}`")));
        }
    }

    let get = |k: &str| map.get(k).map(String::as_str);

    let experiment = match get("experiment") {
        None => {
            diags.push(diag("missing-key", "`experiment` is required"));
            None
        }
        Some(s) => match Experiment::from_name(s) {
            Some(e) => Some(e),
            None => {
                diags.push(diag(
                    "unknown-experiment",
                    format!("`{s}`; valid: moments, converge, voronovskaja, shape, bounds"),
                ));
                None
            }
        },
    };

    let family = match get("family") {
        None => {
            diags.push(diag("missing-key", "`family` is required"));
            None
        }
        Some(s) => match Family::from_name(s) {
            Some(f) => Some(f),
            None => {
                let valid: Vec<_> = Family::all().iter().map(|f| f.name()).collect();
                diags.push(diag(
                    "unknown-family",
                    format!("`{s}`; valid: {}", valid.join(", ")),
                ));
                None
            }
        },
    };

    // domains: defaults from the family, restrictions allowed, extensions not
    let (mut domain, mut eval_domain) = (None, None);
    if let Some(f) = family {
        let (nat_i, nat_j) = f.domains::<f64>();
        domain = Some(nat_i);
        eval_domain = Some(nat_j);
        if let Some(s) = get("I") {
            match parse_interval(s) {
                Some(i) if nat_i.covers(&i) => domain = Some(i),
                Some(i) => diags.push(diag(
                    "domain-mismatch",
                    format!("I={i} extends beyond the {} domain {nat_i}", f.name()),
                )),
                None => diags.push(diag("bad-interval", format!("I=`{s}`"))),
            }
        }
        if let Some(s) = get("J") {
            match parse_interval(s) {
                Some(j) if nat_j.covers(&j) => eval_domain = Some(j),
                Some(j) => diags.push(diag(
                    "domain-mismatch",
                    format!(
                        "J={j} extends beyond the {} evaluation domain {nat_j}",
                        f.name()
                    ),
                )),
                None => diags.push(diag("bad-interval", format!("J=`{s}`"))),
            }
        }
        if let (Some(i), Some(j)) = (domain, eval_domain) {
            if !i.covers(&j) {
                diags.push(diag("domain-mismatch", format!("J={j} not inside I={i}")));
            }
        }
    }

    let n_list: Option<Vec<usize>> = match get("n_list") {
        None => {
            diags.push(diag("missing-key", "`n_list` is required"));
            None
        }
        Some(s) => match parse_list::<usize>(s) {
            Some(v)
                if !v.is_empty()
                    && v[0] >= 1
                    && v.windows(2).all(|w| w[0] < w[1]) =>
            {
                if experiment == Some(Experiment::Voronovskaja) && v.len() < 3 {
                    diags.push(diag(
                        "bad-n-list",
                        "voronovskaja extrapolation needs at least 3 n values",
                    ));
                }
                Some(v)
            }
            _ => {
                diags.push(diag(
                    "bad-n-list",
                    format!("`{s}` must be strictly increasing integers >= 1"),
                ));
                None
            }
        },
    };

    let x_grid: Option<Vec<f64>> = match get("x_grid") {
        None => {
            diags.push(diag("missing-key", "`x_grid` is required"));
            None
        }
        Some(s) => match parse_list::<f64>(s) {
            Some(v) if !v.is_empty() && v.windows(2).all(|w| w[0] < w[1]) => {
                if let Some(j) = eval_domain {
                    for &x in &v {
                        if !j.contains(x) {
                            diags.push(diag(
                                "bad-x-grid",
                                format!("x={x} outside the evaluation domain {j}"),
                            ));
                        }
                    }
                }
                Some(v)
            }
            _ => {
                diags.push(diag(
                    "bad-x-grid",
                    format!("`{s}` must be strictly increasing reals"),
                ));
                None
            }
        },
    };

    let lambda = match get("lambda") {
        None => {
            diags.push(diag("missing-key", "`lambda` is required"));
            None
        }
        Some(s) => match LambdaSpec::parse(s) {
            Some(spec) => Some(spec),
            None => {
                diags.push(diag(
                    "bad-lambda",
                    format!("`{s}`; grammar: constant | 1/n | x | c*x"),
                ));
                None
            }
        },
    };
    if let (Some(spec), Some(ns), Some(xs)) = (lambda, &n_list, &x_grid) {
        'outer: for &n in ns {
            for &x in xs {
                let v = spec.value(n, x);
                if !(0.0..=1.0).contains(&v) {
                    diags.push(diag(
                        "lambda-range",
                        format!("lambda = {v} at n={n}, x={x} is outside [0,1]"),
                    ));
                    break 'outer;
                }
            }
        }
    }

    match get("function") {
        None => diags.push(diag("missing-key", "`function` is required")),
        Some(s) => {
            let dom = domain.unwrap_or_else(Interval::real_line);
            match parse_function::<f64>(s, dom) {
                Err(e) => diags.push(diag("unknown-function", format!("{e}"))),
                Ok(f) => {
                    let needs_derivs = experiment == Some(Experiment::Voronovskaja)
                        || matches!(
                            get("bound_kind").and_then(BoundKind::from_name),
                            Some(BoundKind::Derivative) | Some(BoundKind::DerivativeH1)
                        );
                    if needs_derivs && f.deriv1().is_none() {
                        diags.push(diag(
                            "missing-derivative",
                            format!("`{s}` has no derivative but the experiment needs one"),
                        ));
                    }
                }
            }
        }
    }

    if let Some(s) = get("k_list") {
        if experiment.is_some() && experiment != Some(Experiment::Moments) {
            diags.push(diag("unknown-key", "`k_list` only applies to moments"));
        }
        match parse_list::<usize>(s) {
            Some(v) if !v.is_empty() && v.iter().all(|&k| (1..=4).contains(&k)) => {}
            _ => diags.push(diag("bad-k-list", format!("`{s}` must be integers in 1..=4"))),
        }
    }

    match (experiment, get("bound_kind")) {
        (Some(Experiment::Converge), Some(s)) => match BoundKind::from_name(s) {
            Some(BoundKind::Omega | BoundKind::Derivative | BoundKind::DerivativeH1) => {}
            Some(k) => diags.push(diag(
                "bad-bound-kind",
                format!("`{}` is not pointwise; converge takes omega, derivative, derivative_H1", k.name()),
            )),
            None => diags.push(diag("bad-bound-kind", format!("unknown kind `{s}`"))),
        },
        (Some(Experiment::Bounds), Some(s)) => match BoundKind::from_name(s) {
            Some(BoundKind::DitzianTotik | BoundKind::Weighted2Dis | BoundKind::ExpCosh) => {
                if BoundKind::from_name(s) == Some(BoundKind::DitzianTotik) {
                    if let Some(f) = family {
                        if !matches!(f, Family::SzaszMirakjan | Family::Baskakov) {
                            diags.push(diag(
                                "bad-bound-kind",
                                "ditzian_totik applies to szasz_mirakjan and baskakov only",
                            ));
                        }
                    }
                }
            }
            Some(k) => diags.push(diag(
                "bad-bound-kind",
                format!("`{}` is pointwise; bounds takes ditzian_totik, weighted_2dis, exp_cosh", k.name()),
            )),
            None => diags.push(diag("bad-bound-kind", format!("unknown kind `{s}`"))),
        },
        (Some(Experiment::Converge | Experiment::Bounds), None) => {
            diags.push(diag("missing-key", "`bound_kind` is required for this experiment"));
        }
        (_, Some(_)) if experiment.is_some() => {
            diags.push(diag("unknown-key", "`bound_kind` only applies to converge/bounds"));
        }
        _ => {}
    }

    if let Some(s) = get("tol") {
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => {}
            _ => diags.push(diag("bad-tol", format!("`{s}` must be a positive real"))),
        }
    }
    match get("output") {
        None => diags.push(diag("missing-key", "`output` is required")),
        Some("") => diags.push(diag("bad-output", "empty output path")),
        Some(_) => {}
    }
    if let Some(s) = get("svg") {
        if !matches!(s, "true" | "false") {
            diags.push(diag("bad-flag", format!("svg=`{s}` must be true or false")));
        }
    }
    if let Some(s) = get("seed") {
        if s.parse::<u64>().is_err() {
            diags.push(diag("bad-flag", format!("seed=`{s}` must be an unsigned integer")));
        }
    }

    diags
}

fn default_tol(experiment: Experiment) -> f64 {
    match experiment {
        Experiment::Moments => 1e-10,
        Experiment::Voronovskaja => 1e-3,
        _ => 1e-10,
    }
}

/// Validate and compile. Any diagnostic becomes a `Config` error listing all
/// of them.
pub fn compile(text: &str) -> Result<ExperimentConfig> {
    let diags = validate(text);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(Error::Config(lines.join("; ")));
    }
    let (map, _) = parse_raw(text);
    let get = |k: &str| map.get(k).map(String::as_str);

    let experiment = Experiment::from_name(get("experiment").unwrap()).unwrap();
    let family = Family::from_name(get("family").unwrap()).unwrap();
    let (nat_i, nat_j) = family.domains::<f64>();
    let domain = get("I").map(|s| parse_interval(s).unwrap()).unwrap_or(nat_i);
    let eval_domain = get("J").map(|s| parse_interval(s).unwrap()).unwrap_or(nat_j);

    Ok(ExperimentConfig {
        experiment,
        family,
        domain,
        eval_domain,
        lambda: LambdaSpec::parse(get("lambda").unwrap()).unwrap(),
        function: get("function").unwrap().to_string(),
        n_list: parse_list(get("n_list").unwrap()).unwrap(),
        x_grid: parse_list(get("x_grid").unwrap()).unwrap(),
        k_list: get("k_list")
            .map(|s| parse_list(s).unwrap())
            .unwrap_or_else(|| vec![1, 2, 4]),
        bound_kind: get("bound_kind").and_then(BoundKind::from_name),
        tol: get("tol")
            .map(|s| s.parse().unwrap())
            .unwrap_or_else(|| default_tol(experiment)),
        output: PathBuf::from(get("output").unwrap()),
        svg: get("svg") == Some("true"),
        seed: get("seed").map(|s| s.parse().unwrap()).unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const VALID: &str = "\
experiment = moments
family = bernstein_schurer
lambda = 1/n
function = e2
n_list = 5, 10, 50
x_grid = 0.1, 0.5, 0.9
output = out.csv
";

    fn codes(text: &str) -> Vec<&'static str> {
        validate(text).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn valid_config_has_no_diagnostics() {
        assert!(validate(VALID).is_empty());
        let cfg = compile(VALID).unwrap();
        assert_eq!(cfg.experiment, Experiment::Moments);
        assert_eq!(cfg.family, Family::BernsteinSchurer);
        assert_eq!(cfg.k_list, vec![1, 2, 4]);
        assert_eq!(cfg.lambda, LambdaSpec::OneOverN);
        assert_eq!(cfg.tol, 1e-10);
        assert!(!cfg.svg);
    }

    #[test]
    fn lambda_range_diagnostic() {
        let text = VALID.replace("lambda = 1/n", "lambda = 1.5");
        assert!(codes(&text).contains(&"lambda-range"));
        let text = VALID.replace("lambda = 1/n", "lambda = 2*x");
        assert!(codes(&text).contains(&"lambda-range"));
        // 0.5*x stays in range on this grid
        let text = VALID.replace("lambda = 1/n", "lambda = 0.5*x");
        assert!(validate(&text).is_empty());
    }

    #[test]
    fn domain_mismatch_diagnostic() {
        let text = VALID.replace("family = bernstein_schurer", "family = bernstein")
            + "J = 0, 2\n";
        assert!(codes(&text).contains(&"domain-mismatch"));
    }

    #[test]
    fn unknown_names() {
        let text = VALID.replace("family = bernstein_schurer", "family = bspline");
        assert!(codes(&text).contains(&"unknown-family"));
        let text = VALID.replace("function = e2", "function = tan");
        assert!(codes(&text).contains(&"unknown-function"));
        let text = VALID.replace("experiment = moments", "experiment = fit");
        assert!(codes(&text).contains(&"unknown-experiment"));
    }

    #[test]
    fn missing_derivative_diagnostic() {
        let text = VALID
            .replace("experiment = moments", "experiment = voronovskaja")
            .replace("function = e2", "function = abs(0.5)")
            .replace("n_list = 5, 10, 50", "n_list = 5, 10, 50, 100");
        assert!(codes(&text).contains(&"missing-derivative"));
    }

    #[test]
    fn list_diagnostics() {
        let text = VALID.replace("n_list = 5, 10, 50", "n_list = 5, 5");
        assert!(codes(&text).contains(&"bad-n-list"));
        let text = VALID.replace("x_grid = 0.1, 0.5, 0.9", "x_grid = 0.1, 0.5, 1.7");
        assert!(codes(&text).contains(&"bad-x-grid"));
        let text = VALID.to_string() + "k_list = 0, 2\n";
        assert!(codes(&text).contains(&"bad-k-list"));
    }

    #[test]
    fn voronovskaja_needs_three_points() {
        let text = VALID
            .replace("experiment = moments", "experiment = voronovskaja")
            .replace("n_list = 5, 10, 50", "n_list = 5, 10");
        assert!(codes(&text).contains(&"bad-n-list"));
    }

    #[test]
    fn bound_kind_rules() {
        let conv = VALID.replace("experiment = moments", "experiment = converge");
        assert!(codes(&conv).contains(&"missing-key"));
        let ok = conv.clone() + "bound_kind = omega\n";
        assert!(validate(&ok).is_empty());
        let bad = conv + "bound_kind = ditzian_totik\n";
        assert!(codes(&bad).contains(&"bad-bound-kind"));
        // ditzian_totik demands szasz/baskakov
        let dt = VALID
            .replace("experiment = moments", "experiment = bounds")
            .replace("family = bernstein_schurer", "family = bernstein")
            + "bound_kind = ditzian_totik\n";
        assert!(codes(&dt).contains(&"bad-bound-kind"));
    }

    #[test]
    fn structural_diagnostics() {
        assert!(codes("experiment = moments\nexperiment = moments\n")
            .contains(&"duplicate-key"));
        assert!(codes(&(VALID.to_string() + "colour = red\n")).contains(&"unknown-key"));
        assert!(codes("not a key value line\n").contains(&"unknown-key"));
        let missing = "experiment = moments\n";
        let c = codes(missing);
        assert!(c.iter().filter(|&&x| x == "missing-key").count() >= 4);
    }

    #[test]
    fn compile_rejects_invalid() {
        let text = VALID.replace("lambda = 1/n", "lambda = nope");
        assert!(matches!(compile(&text), Err(Error::Config(_))));
    }

    #[test]
    fn interval_parsing() {
        assert_eq!(parse_interval("0, 1").unwrap(), Interval::unit());
        let i = parse_interval("0, inf").unwrap();
        assert!(i.hi.is_infinite() && !i.hi_closed);
        assert!(parse_interval("1, 0").is_none());
        assert!(parse_interval("abc").is_none());
    }

    #[test]
    fn lambda_spec_round_trips() {
        for s in ["0.5", "1/n", "x", "0.3*x"] {
            let spec = LambdaSpec::parse(s).unwrap();
            assert_eq!(LambdaSpec::parse(&spec.display()), Some(spec));
        }
        assert_eq!(LambdaSpec::parse("frac"), None);
    }
}
