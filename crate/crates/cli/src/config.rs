//! Line-oriented `key = value` run configuration.
//!
//! ```text
//! # comment
//! lambda1 = 2.718281828459045
//! alpha2  = "sin(1)"             # numbers may be quoted constant expressions
//! f       = "(e - 1/5)*exp(x^2/10) - (x^2/25)*exp(x^2/10)"
//! m       = [3, 7, 15, 31, 63]
//! box     = [0.5, 3.0, 0.5, 3.0]
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use galerkin_collage::forward::{EquationSpec, MAX_DIMENSION};
use galerkin_collage::{BoxConstraint, Expression, ObjectiveMode, ParseError, ProblemSpec};
use thiserror::Error;

pub const FORWARD_DIMENSIONS: [usize; 5] = [3, 7, 15, 31, 63];
pub const INVERSE_TARGETS: [usize; 4] = [3, 7, 15, 31];
pub const DEFAULT_TEST_FUNCTIONS: usize = 7;
pub const DEFAULT_GRID: usize = 251;

const REQUIRED: [&str; 8] = ["lambda1", "lambda2", "alpha1", "alpha2", "beta1", "beta2", "f", "g"];
const OPTIONAL: [&str; 9] = ["exact_u", "exact_v", "m", "n", "box", "mode", "grid", "out", "plot"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: malformed value for `{key}`: {message}")]
    Malformed { line: usize, key: String, message: String },
    #[error("line {line}: expression for `{key}`: {source}")]
    Expression {
        line: usize,
        key: String,
        #[source]
        source: ParseError,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Bare(String),
    Quoted(String),
    List(Vec<String>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bare(s) => f.write_str(s),
            Value::Quoted(s) => write!(f, "\"{s}\""),
            Value::List(items) => write!(f, "[{}]", items.join(", ")),
        }
    }
}

/// Everything a command needs. `m` is `None` when the file leaves the
/// dimension list to the command's default.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    pub m: Option<Vec<usize>>,
    pub n: usize,
    pub bounds: BoxConstraint,
    pub mode: ObjectiveMode,
    pub grid: usize,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl RunConfig {
    pub fn benchmark() -> Self {
        RunConfig {
            spec: ProblemSpec::benchmark(),
            m: None,
            n: DEFAULT_TEST_FUNCTIONS,
            bounds: BoxConstraint::default(),
            mode: ObjectiveMode::L2,
            grid: DEFAULT_GRID,
            out: None,
            plot: None,
        }
    }

    pub fn forward_dimensions(&self) -> Vec<usize> {
        self.m.clone().unwrap_or_else(|| FORWARD_DIMENSIONS.to_vec())
    }

    pub fn inverse_targets(&self) -> Vec<usize> {
        self.m.clone().unwrap_or_else(|| INVERSE_TARGETS.to_vec())
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

struct Entries(HashMap<String, (usize, Value)>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, Value)> {
        self.0.remove(key)
    }

    fn required(&mut self, key: &'static str) -> Result<(usize, Value), ConfigError> {
        self.take(key).ok_or(ConfigError::MissingKey(key))
    }
}

fn malformed(line: usize, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Malformed {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn expression(line: usize, key: &str, value: &Value) -> Result<Expression, ConfigError> {
    match value {
        Value::Quoted(src) => Expression::parse(src).map_err(|source| ConfigError::Expression {
            line,
            key: key.to_string(),
            source,
        }),
        other => Err(malformed(line, key, format!("expected a quoted expression, got {other}"))),
    }
}

fn real(line: usize, key: &str, value: &Value) -> Result<f64, ConfigError> {
    let v = match value {
        Value::Bare(s) => s.parse::<f64>().map_err(|_| malformed(line, key, format!("`{s}` is not a number")))?,
        Value::Quoted(_) => {
            let e = expression(line, key, value)?;
            if e.uses_variable() {
                return Err(malformed(line, key, "constant expected, expression depends on x"));
            }
            e.evaluate(0.0).map_err(|err| malformed(line, key, err.to_string()))?
        }
        Value::List(_) => return Err(malformed(line, key, "expected a number, got a list")),
    };
    if !v.is_finite() {
        return Err(malformed(line, key, "value must be finite"));
    }
    Ok(v)
}

fn integer(line: usize, key: &str, text: &str) -> Result<usize, ConfigError> {
    text.parse::<usize>()
        .map_err(|_| malformed(line, key, format!("`{text}` is not a non-negative integer")))
}

fn text(value: Value) -> String {
    match value {
        Value::Bare(s) | Value::Quoted(s) => s,
        Value::List(items) => items.join(","),
    }
}

pub fn parse_config(source: &str) -> Result<RunConfig, ConfigError> {
    let mut entries = HashMap::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        let value = parse_value(line, value.trim())?;
        if entries.insert(key.to_string(), (line, value)).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    let mut entries = Entries(entries);

    let mut number = |key: &'static str| -> Result<f64, ConfigError> {
        let (line, value) = entries.required(key)?;
        real(line, key, &value)
    };
    let lambda1 = number("lambda1")?;
    let lambda2 = number("lambda2")?;
    let alpha1 = number("alpha1")?;
    let alpha2 = number("alpha2")?;
    let beta1 = number("beta1")?;
    let beta2 = number("beta2")?;
    let (fl, fv) = entries.required("f")?;
    let f = expression(fl, "f", &fv)?;
    let (gl, gv) = entries.required("g")?;
    let g = expression(gl, "g", &gv)?;
    let exact_u = entries.take("exact_u").map(|(l, v)| expression(l, "exact_u", &v)).transpose()?;
    let exact_v = entries.take("exact_v").map(|(l, v)| expression(l, "exact_v", &v)).transpose()?;

    let spec = ProblemSpec::new(
        EquationSpec {
            lambda: lambda1,
            left: alpha1,
            right: beta1,
            source: f,
            exact: exact_u,
        },
        EquationSpec {
            lambda: lambda2,
            left: alpha2,
            right: beta2,
            source: g,
            exact: exact_v,
        },
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    let mut config = RunConfig {
        spec,
        ..RunConfig::benchmark()
    };

    if let Some((line, value)) = entries.take("m") {
        let Value::List(items) = value else {
            return Err(malformed(line, "m", "expected a bracketed list"));
        };
        if items.is_empty() {
            return Err(malformed(line, "m", "dimension list must not be empty"));
        }
        let dims = items.iter().map(|s| integer(line, "m", s)).collect::<Result<Vec<_>, _>>()?;
        if let Some(bad) = dims.iter().find(|&&d| !(1..=MAX_DIMENSION).contains(&d)) {
            return Err(malformed(line, "m", format!("dimension {bad} outside 1..={MAX_DIMENSION}")));
        }
        config.m = Some(dims);
    }
    if let Some((line, value)) = entries.take("n") {
        let n = integer(line, "n", &text(value))?;
        if n == 0 {
            return Err(malformed(line, "n", "need at least one test function"));
        }
        config.n = n;
    }
    if let Some((line, value)) = entries.take("grid") {
        let grid = integer(line, "grid", &text(value))?;
        if grid < 2 {
            return Err(malformed(line, "grid", "need at least 2 points per axis"));
        }
        config.grid = grid;
    }
    if let Some((line, value)) = entries.take("box") {
        let Value::List(items) = value else {
            return Err(malformed(line, "box", "expected [l1min, l1max, l2min, l2max]"));
        };
        if items.len() != 4 {
            return Err(malformed(line, "box", format!("expected 4 numbers, got {}", items.len())));
        }
        let v = items
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| malformed(line, "box", format!("`{s}` is not a number"))))
            .collect::<Result<Vec<_>, _>>()?;
        config.bounds =
            BoxConstraint::new((v[0], v[1]), (v[2], v[3])).map_err(|e| malformed(line, "box", e.to_string()))?;
    }
    if let Some((line, value)) = entries.take("mode") {
        config.mode = text(value).parse().map_err(|e: galerkin_collage::inverse::UnknownMode| malformed(line, "mode", e.to_string()))?;
    }
    if let Some((_, value)) = entries.take("out") {
        config.out = Some(PathBuf::from(text(value)));
    }
    if let Some((_, value)) = entries.take("plot") {
        config.plot = Some(PathBuf::from(text(value)));
    }
    Ok(config)
}

/// Drops a trailing `# ...` that is not inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_value(line: usize, raw: &str) -> Result<Value, ConfigError> {
    let syntax = |message: &str| ConfigError::Syntax {
        line,
        message: message.to_string(),
    };
    if raw.is_empty() {
        return Err(syntax("missing value"));
    }
    if let Some(rest) = raw.strip_prefix('"') {
        let inner = rest.strip_suffix('"').ok_or_else(|| syntax("unterminated string"))?;
        if inner.contains('"') {
            return Err(syntax("stray quote inside string"));
        }
        return Ok(Value::Quoted(inner.to_string()));
    }
    if let Some(rest) = raw.strip_prefix('[') {
        let inner = rest.strip_suffix(']').ok_or_else(|| syntax("unterminated list"))?;
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        let items: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
        if items.iter().any(String::is_empty) {
            return Err(syntax("empty list element"));
        }
        return Ok(Value::List(items));
    }
    if raw.contains(char::is_whitespace) {
        return Err(syntax("unquoted value contains whitespace"));
    }
    Ok(Value::Bare(raw.to_string()))
}
