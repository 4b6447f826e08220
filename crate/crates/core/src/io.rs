//! JSON documents for instances and sharings.
//!
//! Rationals travel as `"p/q"` strings. [`instance_to_json`] writes the
//! canonical form: keys in schema order, arrays sorted, defaults omitted.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Assignment, Budget, ExtensionParams, Instance, Rational, Sharing};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairList {
    Named(String),
    Pairs(Vec<[usize; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetField {
    Limited(u64),
    Named(Unbounded),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unbounded {
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub agents: usize,
    pub resources: usize,
    pub utilities: Vec<Vec<u64>>,
    pub allocation: Vec<Vec<usize>>,
    pub sharing_edges: PairList,
    pub attention_arcs: PairList,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<[u64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetField>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDocument {
    pub edge: [usize; 2],
    pub resource: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharingDocument {
    pub bound: usize,
    pub assignments: Vec<AssignmentDocument>,
}

/// 1-based line and column of the first occurrence of `"key"`.
fn key_position(text: &str, key: &str) -> (usize, usize) {
    let quoted = format!("\"{key}\"");
    let Some(offset) = text.find(&quoted) else { return (1, 1) };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

fn positioned(text: &str, key: &str, message: impl Into<String>) -> Error {
    let (line, column) = key_position(text, key);
    Error::Parse { line, column, message: message.into() }
}

/// Key a builder complaint most likely refers to.
fn key_for(message: &str) -> &'static str {
    const KEYS: [(&str, &str); 9] = [
        ("cost", "costs"),
        ("utilit", "utilities"),
        ("alloc", "allocation"),
        ("bundle", "allocation"),
        ("resource", "allocation"),
        ("alpha", "alpha"),
        ("beta", "beta"),
        ("sharing edge", "sharing_edges"),
        ("attention arc", "attention_arcs"),
    ];
    KEYS.iter().find(|(word, _)| message.contains(word)).map_or("agents", |&(_, key)| key)
}

/// Parses `"p/q"` or a plain integer.
pub fn parse_ratio(value: &str) -> Option<Rational> {
    let (p, q) = match value.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (value.trim(), "1"),
    };
    let p: i128 = p.parse().ok()?;
    let q: i128 = q.parse().ok()?;
    (q != 0).then(|| Rational::new(p, q))
}

pub fn format_ratio(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(text: &str, key: &str, value: &str) -> Result<Rational> {
    parse_ratio(value).ok_or_else(|| positioned(text, key, format!("{key} must be a \"p/q\" string, got {value:?}")))
}

fn pairs(list: &[[usize; 2]]) -> impl Iterator<Item = (usize, usize)> + '_ {
    list.iter().map(|&[i, j]| (i, j))
}

impl InstanceDocument {
    /// Builds the instance; `text` is the source the document came from
    /// and is only used to position errors.
    pub fn to_instance(&self, text: &str) -> Result<Instance> {
        let mut builder = Instance::builder(self.agents, self.resources)
            .utilities(self.utilities.clone())
            .allocation(self.allocation.clone());
        builder = match &self.sharing_edges {
            PairList::Named(s) if s == "clique" => builder.sharing_clique(),
            PairList::Named(s) => {
                return Err(positioned(text, "sharing_edges", format!("unknown sharing macro {s:?}")));
            }
            PairList::Pairs(p) => builder.sharing_edges(pairs(p)),
        };
        builder = match &self.attention_arcs {
            PairList::Named(s) if s == "clique" => builder.attention_clique(),
            PairList::Named(s) if s == "same_as_sharing_bidirected" => builder.attention_from_sharing(),
            PairList::Named(s) => {
                return Err(positioned(text, "attention_arcs", format!("unknown attention macro {s:?}")));
            }
            PairList::Pairs(p) => builder.attention_arcs(pairs(p)),
        };
        let mut ext = ExtensionParams::default();
        if let Some(a) = &self.alpha {
            ext.alpha = parse_rational(text, "alpha", a)?;
        }
        if let Some(b) = &self.beta {
            ext.beta = parse_rational(text, "beta", b)?;
        }
        for &[i, j, c] in self.costs.iter().flatten() {
            let (i, j) = (i as usize, j as usize);
            if ext.edge_costs.insert(crate::model::edge_key(i, j), c).is_some() {
                return Err(positioned(text, "costs", format!("duplicate cost for [{i},{j}]")));
            }
        }
        if let Some(BudgetField::Limited(b)) = self.budget {
            ext.budget = Budget::Limited(b);
        }
        builder.extension(ext).build().map_err(|e| match e {
            Error::InvalidInstance(msg) => positioned(text, key_for(&msg), msg),
            other => other,
        })
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let one = Rational::from_integer(1);
        let ext = instance.extension();
        let costs: Vec<[u64; 3]> = ext.edge_costs.iter().map(|(&(i, j), &c)| [i as u64, j as u64, c]).collect();
        InstanceDocument {
            agents: instance.agent_count(),
            resources: instance.resource_count(),
            utilities: instance.utilities().to_vec(),
            allocation: instance.allocation().to_vec(),
            sharing_edges: PairList::Pairs(instance.sharing_edges().iter().map(|&(i, j)| [i, j]).collect()),
            attention_arcs: PairList::Pairs(instance.attention_arcs().iter().map(|&(i, j)| [i, j]).collect()),
            alpha: (ext.alpha != one).then(|| format_ratio(ext.alpha)),
            beta: (ext.beta != one).then(|| format_ratio(ext.beta)),
            costs: (!costs.is_empty()).then_some(costs),
            budget: match ext.budget {
                Budget::Unbounded => None,
                Budget::Limited(b) => Some(BudgetField::Limited(b)),
            },
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line().max(1), column: e.column().max(1), message: e.to_string() }
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let before = &bytes[..e.valid_up_to()];
        let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
        let column = before.len() - before.iter().rposition(|&c| c == b'\n').map_or(0, |p| p + 1) + 1;
        Error::Parse { line, column, message: "input is not valid UTF-8".into() }
    })
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    let text = utf8(bytes)?;
    let doc: InstanceDocument = serde_json::from_str(text).map_err(json_error)?;
    doc.to_instance(text)
}

/// Canonical pretty-printed document, newline terminated.
pub fn instance_to_json(instance: &Instance) -> String {
    let doc = InstanceDocument::from_instance(instance);
    let mut s = serde_json::to_string_pretty(&doc).expect("documents always serialize");
    s.push('\n');
    s
}

/// Parses a sharing and validates it against `instance`.
pub fn parse_sharing(bytes: &[u8], instance: &Instance) -> Result<Sharing> {
    let text = utf8(bytes)?;
    let doc: SharingDocument = serde_json::from_str(text).map_err(json_error)?;
    let sharing = Sharing::new(
        doc.bound,
        doc.assignments.iter().map(|a| Assignment { edge: (a.edge[0], a.edge[1]), resource: a.resource }),
    );
    crate::model::validate_sharing(instance, &sharing).map_err(Error::InvalidSharing)?;
    Ok(sharing)
}

pub fn sharing_to_json(sharing: &Sharing) -> String {
    let doc = SharingDocument {
        bound: sharing.bound(),
        assignments: sharing
            .assignments()
            .iter()
            .map(|a| AssignmentDocument { edge: [a.edge.0, a.edge.1], resource: a.resource })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read(path)?)
}

pub fn read_sharing(path: &Path, instance: &Instance) -> Result<Sharing> {
    parse_sharing(&std::fs::read(path)?, instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{
  "agents": 2,
  "resources": 2,
  "utilities": [[1, 4], [3, 1]],
  "allocation": [[0], [1]],
  "sharing_edges": [[0, 1]],
  "attention_arcs": "same_as_sharing_bidirected"
}"#;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_instance(text.as_bytes()) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn two_agents() {
        let inst = parse_instance(TWO.as_bytes()).unwrap();
        assert_eq!(inst.agent_count(), 2);
        assert_eq!(inst.attention_arcs(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn incomplete_allocation() {
        let text = r#"{"agents": 2, "resources": 4,
"utilities": [[1,1,1,1],[1,1,1,1]],
"allocation": [[0, 1], [3]],
"sharing_edges": "clique", "attention_arcs": "clique"}"#;
        let (line, column, message) = parse_err(text);
        assert_eq!(message, "allocation not complete");
        assert_eq!((line, column), (3, 1));
    }

    #[test]
    fn alpha_out_of_range() {
        let text = TWO.replace("\"attention_arcs\"", "\"alpha\": \"3/2\",\n  \"attention_arcs\"");
        let (line, _, message) = parse_err(&text);
        assert_eq!(message, "alpha out of [0,1]");
        assert_eq!(line, 7);
    }

    #[test]
    fn syntax_errors_have_positions() {
        let (line, column, _) = parse_err("{\n  \"agents\": 2,\n  \"resources\": x\n}");
        assert_eq!((line, column), (3, 16));
        let (_, _, message) = parse_err(&TWO.replace("\"resources\"", "\"extra\": 1, \"resources\""));
        assert!(message.contains("extra"));
        let (_, _, message) = parse_err(&TWO.replace("\"same_as_sharing_bidirected\"", "\"ring\""));
        assert!(message.contains("ring"));
    }

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"agents": 3, "resources": 3,
"utilities": [[1,2,3],[3,2,1],[0,0,5]],
"allocation": [[2,0],[1],[]],
"sharing_edges": "clique", "attention_arcs": [[2,0],[0,1]],
"alpha": "2/4", "beta": "1", "costs": [[1,0,3],[0,2,0]], "budget": 7}"#;
        let inst = parse_instance(text.as_bytes()).unwrap();
        let canonical = instance_to_json(&inst);
        let again = parse_instance(canonical.as_bytes()).unwrap();
        assert_eq!(again, inst);
        assert_eq!(instance_to_json(&again), canonical);
        assert!(canonical.contains("\"alpha\": \"1/2\""));
        assert!(!canonical.contains("beta"));
    }

    #[test]
    fn budget_forms() {
        let inst =
            parse_instance(TWO.replace("\"sharing_edges\"", "\"budget\": \"unbounded\", \"sharing_edges\"").as_bytes())
                .unwrap();
        assert!(inst.extension().budget.is_unbounded());
        assert!(parse_instance(TWO.replace("\"sharing_edges\"", "\"budget\": \"none\", \"sharing_edges\"").as_bytes())
            .is_err());
    }

    #[test]
    fn sharing_round_trip_and_validation() {
        let inst = parse_instance(TWO.as_bytes()).unwrap();
        let text = r#"{"bound": 1, "assignments": [{"edge": [1, 0], "resource": 1}]}"#;
        let s = parse_sharing(text.as_bytes(), &inst).unwrap();
        assert_eq!(parse_sharing(sharing_to_json(&s).as_bytes(), &inst).unwrap(), s);
        let bad = r#"{"bound": 1, "assignments": [{"edge": [0, 1], "resource": 5}]}"#;
        assert!(matches!(parse_sharing(bad.as_bytes(), &inst), Err(Error::InvalidSharing(_))));
    }
}
