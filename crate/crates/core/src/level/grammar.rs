//! Text form of [`WeightFunction`]:
//! `f0 | f1 | fhalf | softcap:<tau> | log | scale:<alpha>:<inner> |
//!  sum:c=<c>,g0=<g0>,atoms=<w>x<r>;<w>x<r>;...`

use std::fmt;
use std::str::FromStr;

use super::WeightFunction;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid weight function `{input}`: {reason}")]
pub struct ParseWeightError {
    pub input: String,
    pub reason: String,
}

fn err(input: &str, reason: impl Into<String>) -> ParseWeightError {
    ParseWeightError {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn number(input: &str, field: &str, text: &str) -> Result<f64, ParseWeightError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| err(input, format!("{field}: `{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(input, format!("{field} must be finite")));
    }
    Ok(v)
}

fn parse_sum(input: &str, body: &str) -> Result<WeightFunction, ParseWeightError> {
    let mut c = 0.0;
    let mut g0 = 0.0;
    let mut atoms = Vec::new();
    for field in body.split(',').filter(|f| !f.trim().is_empty()) {
        let (name, value) = field
            .split_once('=')
            .ok_or_else(|| err(input, format!("expected key=value, got `{field}`")))?;
        match name.trim() {
            "c" => c = number(input, "c", value)?,
            "g0" => g0 = number(input, "g0", value)?,
            "atoms" => {
                for atom in value.split(';').filter(|a| !a.trim().is_empty()) {
                    let (w, r) = atom
                        .split_once('x')
                        .ok_or_else(|| err(input, format!("atom `{atom}` is not <w>x<r>")))?;
                    atoms.push((number(input, "atom weight", w)?, number(input, "atom rate", r)?));
                }
            }
            other => return Err(err(input, format!("unknown field `{other}`"))),
        }
    }
    Ok(WeightFunction::KilledDriftSum { c, g0, atoms })
}

fn parse(input: &str, s: &str) -> Result<WeightFunction, ParseWeightError> {
    let s = s.trim();
    let (head, rest) = match s.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (s, None),
    };
    let g = match (head, rest) {
        ("f0", None) => WeightFunction::F0,
        ("f1", None) => WeightFunction::F1,
        ("fhalf", None) => WeightFunction::FHalf,
        ("log", None) => WeightFunction::Log,
        ("softcap", Some(tau)) => WeightFunction::SoftCap {
            tau: number(input, "tau", tau)?,
        },
        ("scale", Some(r)) => {
            let (alpha, inner) = r
                .split_once(':')
                .ok_or_else(|| err(input, "scale needs scale:<alpha>:<inner>"))?;
            WeightFunction::scaled(number(input, "alpha", alpha)?, parse(input, inner)?)
        }
        ("sum", Some(body)) => parse_sum(input, body)?,
        ("f0" | "f1" | "fhalf" | "log", Some(_)) => {
            return Err(err(input, format!("`{head}` takes no parameters")))
        }
        ("softcap" | "scale" | "sum", None) => {
            return Err(err(input, format!("`{head}` needs parameters")))
        }
        _ => return Err(err(input, format!("unknown weight function `{head}`"))),
    };
    Ok(g)
}

impl FromStr for WeightFunction {
    type Err = ParseWeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let g = parse(s, s)?;
        g.validate().map_err(|e| err(s, e.to_string()))?;
        Ok(g)
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::F0 => f.write_str("f0"),
            WeightFunction::F1 => f.write_str("f1"),
            WeightFunction::FHalf => f.write_str("fhalf"),
            WeightFunction::Log => f.write_str("log"),
            WeightFunction::SoftCap { tau } => write!(f, "softcap:{tau}"),
            WeightFunction::Scaled { alpha, inner } => write!(f, "scale:{alpha}:{inner}"),
            WeightFunction::KilledDriftSum { c, g0, atoms } => {
                write!(f, "sum:c={c},g0={g0},atoms=")?;
                for (i, (w, r)) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{w}x{r}")?;
                }
                Ok(())
            }
        }
    }
}
