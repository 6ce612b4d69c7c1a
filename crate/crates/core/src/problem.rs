//! On-disk problem definitions (JSON).
//!
//! ```json
//! {
//!   "k": 2,
//!   "alphas": ["7/10", "9/10"],
//!   "init": [0.0, 1.0],
//!   "rhs": [
//!     [{"coeff": 1.0, "t_exp": "0", "powers": [1, 0]},
//!      {"coeff": 1.0, "t_exp": "0", "powers": [0, 1]}],
//!     [{"coeff": -1.0, "t_exp": "0", "powers": [1, 0]},
//!      {"coeff": 1.0, "t_exp": "0", "powers": [0, 1]}]
//!   ],
//!   "pia": {"iterations": 5}
//! }
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponent::Exponent;
use crate::pia::PiaConfig;
use crate::system::{FdeSystem, RhsExpr, RhsMonomial, ValidationError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub k: usize,
    pub alphas: Vec<Exponent>,
    pub init: Vec<f64>,
    pub rhs: Vec<Vec<MonomialSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pia: Option<PiaSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub coeff: f64,
    #[serde(default)]
    pub t_exp: Exponent,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiaSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prune_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_cap: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: field `k` is {k} but {what} has {found} entries")]
    Count {
        origin: String,
        k: usize,
        what: &'static str,
        found: usize,
    },
    #[error("{origin}: {}", join(.errors))]
    Invalid {
        origin: String,
        errors: Vec<ValidationError>,
    },
    #[error("{origin}: pia: {message}")]
    Config { origin: String, message: String },
}

fn join(errors: &[ValidationError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl ProblemFile {
    pub fn from_system(sys: &FdeSystem, cfg: Option<&PiaConfig>) -> Self {
        ProblemFile {
            k: sys.k(),
            alphas: sys.orders.clone(),
            init: sys.init.clone(),
            rhs: sys
                .rhs
                .iter()
                .map(|f| {
                    f.monomials()
                        .iter()
                        .map(|m| MonomialSpec {
                            coeff: m.coeff,
                            t_exp: m.t_exp,
                            powers: m.powers.clone(),
                        })
                        .collect()
                })
                .collect(),
            pia: cfg.map(|c| PiaSection {
                iterations: Some(c.iterations),
                prune_threshold: Some(c.prune_threshold),
                term_cap: Some(c.term_cap),
            }),
        }
    }

    /// Builds and validates the system; missing `pia` fields take defaults.
    pub fn into_parts(self, origin: &str) -> Result<(FdeSystem, PiaConfig), ProblemError> {
        let counts = [
            ("alphas", self.alphas.len()),
            ("init", self.init.len()),
            ("rhs", self.rhs.len()),
        ];
        if let Some(&(what, found)) = counts.iter().find(|(_, n)| *n != self.k) {
            return Err(ProblemError::Count {
                origin: origin.to_string(),
                k: self.k,
                what,
                found,
            });
        }
        let rhs = self
            .rhs
            .into_iter()
            .map(|ms| RhsExpr::new(ms.into_iter().map(|m| RhsMonomial::new(m.coeff, m.t_exp, m.powers))))
            .collect();
        let sys = FdeSystem::new(self.alphas, rhs, self.init);
        sys.validate().map_err(|errors| ProblemError::Invalid {
            origin: origin.to_string(),
            errors,
        })?;
        let mut cfg = PiaConfig::default();
        if let Some(p) = self.pia {
            cfg.iterations = p.iterations.unwrap_or(cfg.iterations);
            cfg.prune_threshold = p.prune_threshold.unwrap_or(cfg.prune_threshold);
            cfg.term_cap = p.term_cap.unwrap_or(cfg.term_cap);
        }
        cfg.validate().map_err(|message| ProblemError::Config {
            origin: origin.to_string(),
            message,
        })?;
        Ok((sys, cfg))
    }
}

/// Parses problem text; `origin` names the source in error messages.
pub fn parse_problem(text: &str, origin: &str) -> Result<(FdeSystem, PiaConfig), ProblemError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| ProblemError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    file.into_parts(origin)
}

// serde_json appends " at line L column C"; we report those separately
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_problem(path: &Path) -> Result<(FdeSystem, PiaConfig), ProblemError> {
    let text = fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem(&text, &path.display().to_string())
}

/// Pretty-printed JSON; floats use the shortest round-trip representation,
/// so reloading gives back an identical system.
pub fn canonical_json(sys: &FdeSystem, cfg: Option<&PiaConfig>) -> String {
    let mut s = serde_json::to_string_pretty(&ProblemFile::from_system(sys, cfg))
        .expect("problem files always serialise");
    s.push('\n');
    s
}

pub fn save_problem(path: &Path, sys: &FdeSystem, cfg: Option<&PiaConfig>) -> Result<(), ProblemError> {
    fs::write(path, canonical_json(sys, cfg)).map_err(|source| ProblemError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_refs::{example1_system, example2_system};

    #[test]
    fn round_trip() {
        let a = Exponent::new(7, 10).unwrap();
        let sys = example2_system(a, Exponent::new(1, 3).unwrap());
        let cfg = PiaConfig::with_iterations(7);
        let text = canonical_json(&sys, Some(&cfg));
        let (back, back_cfg) = parse_problem(&text, "mem").unwrap();
        assert_eq!(back, sys);
        assert_eq!(back_cfg, cfg);
        assert!(text.contains("\"7/10\""));
    }

    #[test]
    fn decimal_orders_and_defaults() {
        let text = r#"{"k": 1, "alphas": ["0.5"], "init": [2],
                       "rhs": [[{"coeff": -1, "powers": [1]}]]}"#;
        let (sys, cfg) = parse_problem(text, "mem").unwrap();
        assert_eq!(sys.orders[0], Exponent::new(1, 2).unwrap());
        assert_eq!(cfg, PiaConfig::default());
        assert_eq!(sys.rhs[0].monomials()[0].t_exp, Exponent::ZERO);
    }

    #[test]
    fn errors_carry_context() {
        let err = parse_problem("{\n  \"k\": 1,\n  \"alphas\": [\"-1/2\"]\n}", "p.fde").unwrap_err();
        match err {
            ProblemError::Parse { line, ref origin, .. } => {
                assert_eq!(line, 3);
                assert_eq!(origin, "p.fde");
            }
            other => panic!("{other}"),
        }
        let text = canonical_json(&example1_system(Exponent::ONE, Exponent::ONE), None)
            .replacen("\"1\"", "\"0\"", 1);
        let err = parse_problem(&text, "mem").unwrap_err();
        assert!(matches!(err, ProblemError::Invalid { .. }), "{err}");
        assert!(err.to_string().contains("outside (0, 1]"));

        let err = parse_problem(r#"{"k": 2, "alphas": ["1"], "init": [0], "rhs": [[]]}"#, "mem").unwrap_err();
        assert!(matches!(err, ProblemError::Count { what: "alphas", .. }));

        let err = parse_problem(
            r#"{"k": 1, "alphas": ["1"], "init": [0], "rhs": [[]], "pia": {"iterations": 0}}"#,
            "mem",
        )
        .unwrap_err();
        assert!(matches!(err, ProblemError::Config { .. }));
    }

    #[test]
    fn missing_file() {
        let err = load_problem(Path::new("/nonexistent/x.fde")).unwrap_err();
        assert!(err.to_string().starts_with("/nonexistent/x.fde"));
    }
}
