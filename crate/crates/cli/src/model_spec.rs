//! Model formulas of the form `response ~ term + term`.

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub response: String,
    pub terms: Vec<String>,
    pub intercept: bool,
}

impl ModelSpec {
    /// Parse `y ~ a + b`. A `1` term is the intercept (always included unless
    /// `0` or `-1` appears); `y ~ 1` is the intercept-only model.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Validation(format!("model `{s}`: {why}"));
        let (lhs, rhs) = s
            .split_once('~')
            .ok_or_else(|| bad("expected `response ~ terms`"))?;
        let response = lhs.trim().to_owned();
        if response.is_empty() {
            return Err(bad("missing response"));
        }
        let rhs = rhs.trim().replace("- 1", "+ 0").replace("-1", "+ 0");
        let mut terms = Vec::new();
        let mut intercept = true;
        for t in rhs.split('+').map(str::trim) {
            match t {
                "" => return Err(bad("empty term")),
                "1" => {}
                "0" => intercept = false,
                t if t.contains(char::is_whitespace) || t.contains('~') => {
                    return Err(bad(&format!("cannot read term `{t}`")))
                }
                t if terms.iter().any(|x| x == t) => {
                    return Err(bad(&format!("term `{t}` repeated")))
                }
                t => terms.push(t.to_owned()),
            }
        }
        if terms.contains(&response) {
            return Err(bad("response also appears as a predictor"));
        }
        Ok(Self {
            response,
            terms,
            intercept,
        })
    }
}
