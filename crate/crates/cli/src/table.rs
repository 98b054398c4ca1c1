//! Text format for context tables.
//!
//! ```text
//! # comment
//! sites 2                 # optional; defaults to the highest site used + 1
//! obs X1 x@0
//! obs X1Y2 x@0 y@1
//! ctx +1 X1 X2 X1X2
//! state 1 0 0 0 0 0 0 -1  # optional; amplitudes `re` or `re:im`, normalized
//! ```
//!
//! A `state` line makes every context constraint state-dependent.

use weakval_core::contextuality::{Context, ContextTable, Sign};
use weakval_core::hilbert::{pauli_string, Axis};
use weakval_core::{Complex, StateVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

pub fn parse_pauli_term(token: &str) -> Option<(usize, Axis)> {
    let (axis, site) = token.split_once('@')?;
    let mut chars = axis.chars();
    let axis = Axis::from_symbol(chars.next()?.to_ascii_lowercase())?;
    if chars.next().is_some() {
        return None;
    }
    Some((site.parse().ok()?, axis))
}

fn parse_amplitude(token: &str) -> Option<Complex> {
    let (re, im) = token.split_once(':').unwrap_or((token, "0"));
    let c = Complex::new(re.parse().ok()?, im.parse().ok()?);
    (c.re.is_finite() && c.im.is_finite()).then_some(c)
}

struct RawObs {
    line: usize,
    name: String,
    spec: Vec<(usize, Axis)>,
}

pub fn parse_table(text: &str) -> Result<ContextTable, ParseError> {
    let mut sites: Option<(usize, usize)> = None;
    let mut obs: Vec<RawObs> = Vec::new();
    let mut ctxs: Vec<(usize, Sign, Vec<String>)> = Vec::new();
    let mut state: Option<(usize, Vec<Complex>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let rest: Vec<&str> = tokens.collect();
        match keyword {
            "sites" => {
                if sites.is_some() {
                    return Err(err(line, "`sites` given twice"));
                }
                let [n] = rest[..] else {
                    return Err(err(line, "expected `sites <count>`"));
                };
                let n = n
                    .parse()
                    .map_err(|_| err(line, format!("invalid site count `{n}`")))?;
                sites = Some((line, n));
            }
            "obs" => {
                let Some((name, terms)) = rest.split_first() else {
                    return Err(err(line, "expected `obs <name> <pauli-term>...`"));
                };
                if terms.is_empty() {
                    return Err(err(line, format!("observable `{name}` has no Pauli terms")));
                }
                if obs.iter().any(|o| o.name == *name) {
                    return Err(err(line, format!("observable `{name}` defined twice")));
                }
                let spec = terms
                    .iter()
                    .map(|t| {
                        parse_pauli_term(t).ok_or_else(|| {
                            err(line, format!("invalid Pauli term `{t}`, expected e.g. `x@0`"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                obs.push(RawObs {
                    line,
                    name: name.to_string(),
                    spec,
                });
            }
            "ctx" => {
                let Some((sign, names)) = rest.split_first() else {
                    return Err(err(line, "expected `ctx <+1|-1> <name>...`"));
                };
                let sign = match *sign {
                    "+1" | "1" => Sign::Plus,
                    "-1" => Sign::Minus,
                    other => return Err(err(line, format!("context sign must be +1 or -1, got `{other}`"))),
                };
                if names.is_empty() {
                    return Err(err(line, "context has no members"));
                }
                if let Some(dup) = names.iter().enumerate().find(|(k, n)| names[..*k].contains(n)) {
                    return Err(err(line, format!("context lists `{}` twice", dup.1)));
                }
                ctxs.push((line, sign, names.iter().map(|s| s.to_string()).collect()));
            }
            "state" => {
                if state.is_some() {
                    return Err(err(line, "`state` given twice"));
                }
                let amps = rest
                    .iter()
                    .map(|t| parse_amplitude(t).ok_or_else(|| err(line, format!("invalid amplitude `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                state = Some((line, amps));
            }
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }

    if obs.is_empty() {
        return Err(err(text.lines().count().max(1), "table defines no observables"));
    }
    let used = obs
        .iter()
        .flat_map(|o| o.spec.iter().map(|&(s, _)| s + 1))
        .max()
        .unwrap_or(1);
    let n_sites = match sites {
        Some((line, n)) if n < used => {
            return Err(err(line, format!("{n} sites declared but site {} is used", used - 1)))
        }
        Some((_, n)) => n,
        None => used,
    };
    let observables = obs
        .iter()
        .map(|o| {
            pauli_string(&o.spec, n_sites)
                .map(|p| p.renamed(o.name.clone()))
                .map_err(|e| err(o.line, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let contexts = ctxs
        .iter()
        .map(|(line, sign, names)| {
            let members = names
                .iter()
                .map(|n| {
                    observables
                        .iter()
                        .position(|o| o.name() == n)
                        .ok_or_else(|| err(*line, format!("unknown observable `{n}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Context {
                members,
                required: *sign,
            })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    // Names, signs and duplicates are checked above, so this cannot fail on
    // well-formed Pauli observables.
    let table = ContextTable::new(observables, contexts).map_err(|e| err(1, e.to_string()))?;
    match state {
        None => Ok(table),
        Some((line, amps)) => {
            let psi = StateVector::normalize(amps).map_err(|e| err(line, e.to_string()))?;
            table.with_state(psi).map_err(|e| err(line, e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        assert_eq!(parse_pauli_term("x@0"), Some((0, Axis::X)));
        assert_eq!(parse_pauli_term("Y@12"), Some((12, Axis::Y)));
        assert_eq!(parse_pauli_term("q@0"), None);
        assert_eq!(parse_pauli_term("xy@0"), None);
        assert_eq!(parse_pauli_term("x0"), None);
    }

    #[test]
    fn parses_small_table() {
        let t = parse_table("# one qubit\nobs Z z@0\nctx +1 Z\n").unwrap();
        assert_eq!(t.observables().len(), 1);
        assert_eq!(t.contexts()[0].required, Sign::Plus);
        assert!(t.state().is_none());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("obs A x@0\nctx +2 A\n", 2),
            ("obs A x@0\n\nctx +1 B\n", 3),
            ("obs A q@0\n", 1),
            ("obs A x@0\nobs A y@0\n", 2),
            ("sites 1\nobs A x@3\n", 1),
            ("bogus\n", 1),
            ("obs A x@0\nstate 1 zz\n", 2),
            ("obs A x@0 x@0\n", 1),
            ("obs A x@0\nctx +1 A A\n", 2),
        ];
        for (text, line) in cases {
            let e = parse_table(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }

    #[test]
    fn state_line_is_normalized() {
        let t = parse_table("obs Z z@0\nctx +1 Z\nstate 1 0:0\n").unwrap();
        let psi = t.state().unwrap();
        assert_eq!(psi.amplitudes()[0], Complex::new(1.0, 0.0));
    }
}
