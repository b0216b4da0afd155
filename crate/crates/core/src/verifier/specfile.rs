//! Specification files.
//!
//! ```text
//! logic: dl
//! pre: exists U . (Client and exists Request . Proxy)
//! post: forall U . (Proxy => (<= 2 inv C2P top))
//! rules: servernet.ldr
//! strategy: r0 + r1
//! bound: nodes=4
//! concepts: Client, Proxy
//! roles: Request, C2P
//! ```
//!
//! One `key: value` per line; lines starting with whitespace continue the
//! previous value; `#` starts a comment. `rules:` names a rule file,
//! resolved by the caller.

use std::collections::BTreeMap;

use thiserror::Error;

use super::Spec;
use crate::graph::Alphabet;
use crate::logic::LogicKind;
use crate::strategy::rule_set;
use crate::syntax::{parse_formula, parse_rules, parse_strategy, ParseError};

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("in `{key}`: {err}")]
    Parse { key: String, err: ParseError },
    #[error("cannot read rule file `{path}`: {msg}")]
    Rules { path: String, msg: String },
}

const KEYS: [&str; 8] = ["logic", "pre", "post", "rules", "strategy", "bound", "concepts", "roles"];

/// Parses a specification; `load` returns the text of the named rule file.
pub fn parse_spec(
    text: &str,
    load: &mut dyn FnMut(&str) -> Result<String, String>,
) -> Result<Spec, SpecFileError> {
    let mut fields: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    let mut last: Option<&str> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with(char::is_whitespace) {
            let Some(key) = last else {
                return Err(SpecFileError::Format { line: k + 1, msg: "continuation without a key".into() });
            };
            let entry = fields.get_mut(key).expect("key seen");
            entry.1.push(' ');
            entry.1.push_str(line.trim());
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(SpecFileError::Format { line: k + 1, msg: "expected `key: value`".into() });
        };
        let key = key.trim();
        let Some(key) = KEYS.iter().find(|k| **k == key) else {
            return Err(SpecFileError::Format { line: k + 1, msg: format!("unknown key `{key}`") });
        };
        if fields.insert(key, (k + 1, value.trim().to_string())).is_some() {
            return Err(SpecFileError::Format { line: k + 1, msg: format!("`{key}` given twice") });
        }
        last = Some(key);
    }
    let get = |key: &str| -> Result<&(usize, String), SpecFileError> {
        fields.get(key).ok_or_else(|| SpecFileError::Format { line: 0, msg: format!("missing `{key}`") })
    };
    let logic = match fields.get("logic").map(|(l, v)| (*l, v.as_str())) {
        None | Some((_, "dl")) => LogicKind::Dl,
        Some((_, "fol")) => LogicKind::Fol,
        Some((line, other)) => {
            return Err(SpecFileError::Format { line, msg: format!("logic must be dl or fol, not `{other}`") })
        }
    };
    let parse_err = |key: &str| {
        let key = key.to_string();
        move |err| SpecFileError::Parse { key: key.clone(), err }
    };
    let pre = parse_formula(&get("pre")?.1, logic).map_err(parse_err("pre"))?;
    let post = parse_formula(&get("post")?.1, logic).map_err(parse_err("post"))?;
    let strategy = parse_strategy(&get("strategy")?.1, logic).map_err(parse_err("strategy"))?;
    let rules = match fields.get("rules") {
        None => Vec::new(),
        Some((_, path)) => {
            let text = load(path).map_err(|msg| SpecFileError::Rules { path: path.clone(), msg })?;
            parse_rules(&text).map_err(parse_err("rules"))?
        }
    };
    let mut bound_nodes = 4;
    if let Some((line, b)) = fields.get("bound") {
        for part in b.split(',') {
            let bad = || SpecFileError::Format { line: *line, msg: format!("bad bound `{part}`") };
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "nodes" => bound_nodes = v.trim().parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
    }
    let names = |key: &str| -> Vec<String> {
        fields
            .get(key)
            .map(|(_, v)| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default()
    };
    let alphabet = if fields.contains_key("concepts") || fields.contains_key("roles") {
        Some(Alphabet::new(names("concepts"), names("roles")).map_err(|e| SpecFileError::Format {
            line: 0,
            msg: e.to_string(),
        })?)
    } else {
        None
    };
    Ok(Spec { pre, post, rules: rule_set(rules), strategy, logic, alphabet, bound_nodes })
}
