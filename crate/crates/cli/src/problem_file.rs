//! Line-oriented `key = value` problem files.
//!
//! ```text
//! # pantograph test problem
//! alpha = 0.5
//! l = 1
//! conditions = initial
//! A1 = 0
//! A2 = 0
//! rhs = (3/4)*rho + rho_delay - x^2 + 2
//! exact = x^2
//! ```
//!
//! Recognised keys: `order` (must be 2), `alpha`, `l`, `conditions`
//! (`initial` or `boundary`), `A1`/`A2` or `B1`/`B2`, `transform` (`log` or
//! `none`), `rhs` and `exact`. In `rhs`, `x` is the independent variable and
//! `rho`, `drho`, `rho_delay` stand for the solution, its derivative and its
//! value at `alpha x`. `exact` may use only `x`.

use std::collections::HashMap;
use std::path::Path;

use lucas_tau::tau_solver::{Conditions, ProblemSpec, Transform};
use thiserror::Error;

use crate::expr::{Env, Expr, Var};

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

const KEYS: [&str; 11] = ["order", "alpha", "l", "conditions", "A1", "A2", "B1", "B2", "transform", "rhs", "exact"];

pub fn read_problem_file(path: &Path) -> Result<ProblemSpec, ProblemFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
    parse_problem(&text, name)
}

struct Entry {
    line: usize,
    value: String,
}

pub fn parse_problem(text: &str, name: &str) -> Result<ProblemSpec, ProblemFileError> {
    let mut entries: HashMap<&'static str, Entry> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(syntax(line, "expected `key = value`"));
        };
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(syntax(line, format!("unknown key `{key}`")));
        };
        if let Some(prev) = entries.get(known) {
            return Err(syntax(line, format!("duplicate key `{key}` (first set on line {})", prev.line)));
        }
        entries.insert(
            known,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }

    let real = |key: &'static str| -> Result<Option<f64>, ProblemFileError> {
        match entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| syntax(e.line, format!("`{key}` needs a real number, got `{}`", e.value))),
        }
    };
    let required = |key: &'static str| -> Result<f64, ProblemFileError> { real(key)?.ok_or(ProblemFileError::Missing(key)) };
    let forbid = |keys: [&'static str; 2], conditions: &str| -> Result<(), ProblemFileError> {
        for k in keys {
            if let Some(e) = entries.get(k) {
                return Err(syntax(e.line, format!("`{k}` does not apply to {conditions} conditions")));
            }
        }
        Ok(())
    };

    if let Some(order) = real("order")? {
        if order != 2.0 {
            return Err(syntax(entries["order"].line, "only order = 2 is supported"));
        }
    }
    let length = required("l")?;
    let cond = entries.get("conditions").ok_or(ProblemFileError::Missing("conditions"))?;
    let conditions = match cond.value.as_str() {
        "initial" => {
            forbid(["B1", "B2"], "initial")?;
            Conditions::Initial {
                a1: required("A1")?,
                a2: required("A2")?,
            }
        }
        "boundary" => {
            forbid(["A1", "A2"], "boundary")?;
            Conditions::Boundary {
                b1: required("B1")?,
                b2: required("B2")?,
            }
        }
        other => {
            return Err(syntax(
                cond.line,
                format!("`conditions` must be `initial` or `boundary`, got `{other}`"),
            ))
        }
    };
    let transform = match entries.get("transform") {
        None => Transform::None,
        Some(e) => match e.value.as_str() {
            "none" => Transform::None,
            "log" => Transform::Log,
            other => return Err(syntax(e.line, format!("`transform` must be `log` or `none`, got `{other}`"))),
        },
    };
    let rhs_entry = entries.get("rhs").ok_or(ProblemFileError::Missing("rhs"))?;
    let rhs = expression(rhs_entry)?;

    let invalid = |e: lucas_tau::Error| ProblemFileError::Invalid(e.to_string());
    let mut prob = ProblemSpec::new(
        move |x, rho, drho, rho_delay| {
            rhs.eval(&Env {
                x,
                rho,
                drho,
                rho_delay,
            })
        },
        length,
        conditions,
    )
    .map_err(invalid)?
    .with_transform(transform)
    .with_name(name);
    if let Some(alpha) = real("alpha")? {
        prob = prob.with_alpha(alpha).map_err(invalid)?;
    }
    if let Some(e) = entries.get("exact") {
        let exact = expression(e)?;
        for v in [Var::Rho, Var::DRho, Var::RhoDelay] {
            if exact.uses(v) {
                return Err(syntax(e.line, "`exact` may only use `x`"));
            }
        }
        prob = prob.with_exact(move |x| exact.eval(&Env::at(x)).re);
    }
    Ok(prob)
}

fn expression(e: &Entry) -> Result<Expr, ProblemFileError> {
    Expr::parse(&e.value).map_err(|err| syntax(e.line, err.to_string()))
}

fn syntax(line: usize, message: impl Into<String>) -> ProblemFileError {
    ProblemFileError::Syntax {
        line,
        message: message.into(),
    }
}
