use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use subspace_heights::config::Tolerances;
use subspace_heights::geometry::{CVec, NumericSubspace};
use subspace_heights::goingdown::{Branch, GoingDownInput};
use subspace_heights::height::{EntrySpec, SubspaceSpec};
use subspace_heights::numberfield::{builtins, FieldSpec};
use subspace_heights::NumberField;

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Deserializes `text`, reporting failures with the JSON path that broke.
pub fn parse_json<T: DeserializeOwned>(file: &str, text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Json {
        file: file.to_string(),
        at: e.path().to_string(),
        msg: e.inner().to_string(),
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    parse_json(&path.display().to_string(), &read_text(path)?)
}

/// `--field` accepts a builtin name or a path to a field spec file.
pub fn load_field(arg: &str) -> CliResult<Arc<NumberField>> {
    if let Some(k) = builtins::by_name(arg) {
        return Ok(Arc::new(k));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "unknown field {arg:?}: not a builtin ({}) and not a file",
            builtins::NAMES.join(", ")
        )));
    }
    let spec: FieldSpec = load_json(path)?;
    Ok(Arc::new(spec.build("$")?))
}

/// A subspace given either exactly or as a floating basis of `C^n`.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum SubspaceInput {
    Exact(SubspaceSpec),
    Numeric { basis: Vec<Vec<[f64; 2]>> },
}

pub fn complex_rows(rows: &[Vec<[f64; 2]>]) -> Vec<CVec> {
    rows.iter().map(|r| r.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()).collect()
}

/// Loads a subspace; exact ones are embedded by the distinguished embedding.
pub fn load_numeric(path: &Path, tol: &Tolerances) -> CliResult<(NumericSubspace, Vec<CVec>)> {
    let file = path.display().to_string();
    let value: Value = parse_json(&file, &read_text(path)?)?;
    let basis = if value.get("field").is_some() {
        let spec: SubspaceSpec = parse_json(&file, &value.to_string())?;
        spec.build("$")?.embedded_basis(1)
    } else {
        match parse_json(&file, &value.to_string())? {
            SubspaceInput::Numeric { basis } => complex_rows(&basis),
            SubspaceInput::Exact(spec) => spec.build("$")?.embedded_basis(1),
        }
    };
    Ok((NumericSubspace::from_basis(&basis, tol)?, basis))
}

/// Going-down instance file.
#[derive(Deserialize)]
pub struct InstanceFile {
    /// Basis of `A`, entries as `[re, im]`.
    pub a: Vec<Vec<[f64; 2]>>,
    pub b: SubspaceSpec,
    pub h: usize,
    pub y: Vec<f64>,
    #[serde(rename = "H")]
    pub height: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub branch: Branch,
}

fn one() -> f64 {
    1.0
}

impl InstanceFile {
    pub fn build(&self, tol: &Tolerances) -> CliResult<GoingDownInput> {
        let a = NumericSubspace::from_basis(&complex_rows(&self.a), tol)?;
        let b = self.b.build("$.b")?;
        Ok(GoingDownInput { a, b, h: self.h, y: self.y.clone(), height: self.height, c: self.c, branch: self.branch.clone() })
    }
}

pub enum TargetArg {
    Floats(CVec),
    Algebraic(Vec<EntrySpec>),
}

/// `--target`: comma separated numbers (`re` or `re:im`), or
/// `algebraic:<json list of entries>`.
pub fn parse_target(arg: &str) -> CliResult<TargetArg> {
    if let Some(rest) = arg.strip_prefix("algebraic:") {
        return Ok(TargetArg::Algebraic(parse_json("--target", rest)?));
    }
    let bad = |s: &str| CliError::Usage(format!("--target: cannot read {s:?} as a number"));
    let mut out = Vec::new();
    for item in arg.split(',') {
        let item = item.trim();
        let z = match item.split_once(':') {
            Some((re, im)) => Complex64::new(re.parse().map_err(|_| bad(item))?, im.parse().map_err(|_| bad(item))?),
            None => Complex64::new(item.parse().map_err(|_| bad(item))?, 0.0),
        };
        out.push(z);
    }
    Ok(TargetArg::Floats(out))
}

/// Rounds every float in `v` to twelve significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, x)| (k, round_json(x))).collect()),
        other => other,
    }
}

pub fn to_pretty_json<T: serde::Serialize>(x: &T) -> CliResult<String> {
    let v = serde_json::to_value(x).map_err(subspace_heights::Error::from)?;
    Ok(serde_json::to_string_pretty(&round_json(v)).map_err(subspace_heights::Error::from)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        let v = round_json(serde_json::json!({"x": [std::f64::consts::PI, 1, "s"]}));
        assert_eq!(v.to_string(), r#"{"x":[3.14159265359,1,"s"]}"#);
    }

    #[test]
    fn targets() {
        match parse_target("1, 0.5:-2").unwrap() {
            TargetArg::Floats(z) => assert_eq!(z, vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0)]),
            _ => panic!(),
        }
        assert!(matches!(parse_target("algebraic:[1, [0, 1]]").unwrap(), TargetArg::Algebraic(v) if v.len() == 2));
        assert!(parse_target("1,x").is_err());
    }

    #[test]
    fn json_errors_carry_the_path() {
        let err = parse_json::<InstanceFile>("f.json", r#"{"a": [[[1, 0]]], "b": {"field": {"builtin": "Q"}, "n": 1, "basis": [[1]]}, "h": "one"}"#)
            .err()
            .unwrap();
        assert!(err.to_string().contains("h"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}
