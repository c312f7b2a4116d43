//! JSON code configuration files.
//!
//! ```json
//! {"name": "steane", "m": 7, "alpha": 4, "beta": 10, "delta": 2}
//! ```
//!
//! `c` is optional and defaults to `m(m-1)/2`.

use std::fs;
use std::path::Path;

use ftqc_threshold::CodeParametersF64;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}\n  {context}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
        context: String,
    },

    #[error("invalid code configuration: {0}")]
    Validation(#[from] ftqc_threshold::Error),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCodeConfig {
    name: String,
    m: u32,
    alpha: u32,
    beta: u32,
    delta: f64,
    c: Option<f64>,
}

/// Parses a configuration without checking the parameter invariants.
pub fn parse_code_config_unchecked(text: &str) -> Result<CodeParametersF64, ConfigError> {
    let raw: RawCodeConfig = serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        let context = text
            .lines()
            .nth(line.saturating_sub(1))
            .unwrap_or_default()
            .trim_end()
            .to_owned();
        ConfigError::Parse {
            line,
            column: e.column(),
            message: e.to_string(),
            context,
        }
    })?;
    Ok(CodeParametersF64 {
        c: raw.c.unwrap_or_else(|| CodeParametersF64::default_c(raw.m)),
        name: raw.name,
        m: raw.m,
        alpha: raw.alpha,
        beta: raw.beta,
        delta: raw.delta,
    })
}

pub fn parse_code_config(text: &str) -> Result<CodeParametersF64, ConfigError> {
    let code = parse_code_config_unchecked(text)?;
    code.validate()?;
    Ok(code)
}

pub fn read_code_config_unchecked(path: &Path) -> Result<CodeParametersF64, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_code_config_unchecked(&text)
}

/// Reads and validates a code configuration file.
pub fn load_code_config(path: &Path) -> Result<CodeParametersF64, ConfigError> {
    let code = read_code_config_unchecked(path)?;
    code.validate()?;
    Ok(code)
}
