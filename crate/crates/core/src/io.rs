//! Hypergraph and layout codecs.
//!
//! JSON hypergraphs look like
//! `{"vertices":[{"id":0,"label":"a"}],"hyperedges":[{"id":0,"label":"e","members":[0]}]}`.
//! Ids may be integers or strings. Integer ids are kept; if any id of a kind
//! is a string, that kind is renumbered densely in order of appearance and
//! the string becomes the label unless one is given.
//!
//! The hMETIS-like text format starts with `m n [fmt]` followed by one line
//! of 1-based vertex indices per hyperedge. Lines starting with `%` are
//! comments. Weights announced by `fmt` (1, 10 or 11) are read and dropped.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{ElementId, Hypergraph, Kind};
use crate::layout::Layout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Json,
    Hmetis,
}

impl InputFormat {
    /// `.json` is JSON; anything else is read as hMETIS-like text.
    pub fn from_path(path: &Path) -> InputFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Hmetis,
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(InputFormat::Json),
            "hmetis" | "hgr" => Ok(InputFormat::Hmetis),
            _ => Err(Error::InvalidConfig(format!("unknown input format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
enum RawId {
    Int(u32),
    Str(String),
}

impl std::fmt::Display for RawId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RawId::Int(i) => write!(f, "{i}"),
            RawId::Str(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: RawId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperedgeDoc {
    id: RawId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    members: Vec<RawId>,
}

/// Serialized form of a hypergraph. Canonical when produced by
/// [`HypergraphDoc::from`]: elements and members in ascending id order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphDoc {
    vertices: Vec<VertexDoc>,
    hyperedges: Vec<HyperedgeDoc>,
}

impl From<&Hypergraph> for HypergraphDoc {
    fn from(h: &Hypergraph) -> Self {
        let label = |x: ElementId| h.label(x).map(str::to_string);
        HypergraphDoc {
            vertices: h
                .vertices()
                .map(|v| VertexDoc {
                    id: RawId::Int(v.index),
                    label: label(v),
                })
                .collect(),
            hyperedges: h
                .hyperedges()
                .map(|e| HyperedgeDoc {
                    id: RawId::Int(e.index),
                    label: label(e),
                    members: h
                        .members(e)
                        .expect("listed hyperedge")
                        .iter()
                        .map(|&v| RawId::Int(v))
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Integer ids are kept when every id is an integer; otherwise ids are
/// assigned densely and string ids fall back to labels.
fn assign_ids<'a>(ids: impl Iterator<Item = &'a RawId> + Clone) -> (Vec<u32>, bool) {
    let all_int = ids.clone().all(|id| matches!(id, RawId::Int(_)));
    let assigned = ids
        .enumerate()
        .map(|(i, id)| match (all_int, id) {
            (true, RawId::Int(v)) => *v,
            _ => i as u32,
        })
        .collect();
    (assigned, !all_int)
}

impl HypergraphDoc {
    pub fn into_hypergraph(self) -> Result<Hypergraph> {
        let (vids, v_renamed) = assign_ids(self.vertices.iter().map(|v| &v.id));
        let (eids, e_renamed) = assign_ids(self.hyperedges.iter().map(|e| &e.id));
        let mut lookup: BTreeMap<&RawId, u32> = BTreeMap::new();
        for (v, &id) in self.vertices.iter().zip(&vids) {
            if lookup.insert(&v.id, id).is_some() {
                return Err(Error::Format(format!("duplicate vertex id `{}`", v.id)));
            }
        }
        let fallback = |renamed: bool, id: &RawId, label: &Option<String>| match (label, renamed, id) {
            (Some(l), _, _) => Some(l.clone()),
            (None, true, RawId::Str(s)) => Some(s.clone()),
            _ => None,
        };
        let mut hyperedges = Vec::with_capacity(self.hyperedges.len());
        for (e, &id) in self.hyperedges.iter().zip(&eids) {
            if e.members.is_empty() {
                return Err(Error::EmptyHyperedge(e.id.to_string()));
            }
            let members = e
                .members
                .iter()
                .map(|m| lookup.get(m).copied().ok_or_else(|| Error::UnknownVertexId(m.to_string())))
                .collect::<Result<Vec<u32>>>()?;
            hyperedges.push((id, fallback(e_renamed, &e.id, &e.label), members));
        }
        let vertices: Vec<(u32, Option<String>)> = self
            .vertices
            .iter()
            .zip(&vids)
            .map(|(v, &id)| (id, fallback(v_renamed, &v.id, &v.label)))
            .collect();
        let h = Hypergraph::from_parts(vertices, hyperedges)?;
        h.ensure_connected()?;
        Ok(h)
    }
}

pub fn parse_json(text: &str) -> Result<Hypergraph> {
    serde_json::from_str::<HypergraphDoc>(text)?.into_hypergraph()
}

/// Canonical pretty-printed JSON.
pub fn to_json(h: &Hypergraph) -> String {
    serde_json::to_string_pretty(&HypergraphDoc::from(h)).expect("hypergraph documents always serialize")
}

pub fn parse_hmetis(text: &str) -> Result<Hypergraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('%'));
    let parse_fields = |line: usize, l: &str| -> Result<Vec<u64>> {
        l.split_whitespace()
            .map(|t| {
                t.parse::<u64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("expected a non-negative integer, found `{t}`"),
                })
            })
            .collect()
    };
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or(Error::Parse { line: 1, message: "missing `m n` header".into() })?;
    let header = parse_fields(hline, header)?;
    let (m, n, fmt) = match header[..] {
        [m, n] => (m, n, 0),
        [m, n, fmt] => (m, n, fmt),
        _ => {
            return Err(Error::Parse {
                line: hline,
                message: "header must be `m n` or `m n fmt`".into(),
            })
        }
    };
    let (edge_weights, vertex_weights) = match fmt {
        0 => (false, false),
        1 => (true, false),
        10 => (false, true),
        11 => (true, true),
        _ => {
            return Err(Error::Parse {
                line: hline,
                message: format!("unsupported fmt field {fmt}"),
            })
        }
    };
    let mut hyperedges = Vec::with_capacity(m as usize);
    for e in 0..m {
        let (line, l) = lines.next().ok_or(Error::Parse {
            line: text.lines().count() + 1,
            message: format!("expected {m} hyperedge lines, found {e}"),
        })?;
        let mut fields = parse_fields(line, l)?;
        if edge_weights && !fields.is_empty() {
            fields.remove(0);
        }
        if fields.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("hyperedge {} is empty", e + 1),
            });
        }
        let members = fields
            .into_iter()
            .map(|v| {
                if v == 0 || v > n {
                    Err(Error::Parse {
                        line,
                        message: format!("vertex index {v} outside 1..={n}"),
                    })
                } else {
                    Ok((v - 1) as u32)
                }
            })
            .collect::<Result<Vec<u32>>>()?;
        hyperedges.push((e as u32, None, members));
    }
    if vertex_weights {
        for v in 0..n {
            let (line, l) = lines.next().ok_or(Error::Parse {
                line: text.lines().count() + 1,
                message: format!("expected {n} vertex weight lines, found {v}"),
            })?;
            if parse_fields(line, l)?.len() != 1 {
                return Err(Error::Parse {
                    line,
                    message: "vertex weight lines hold exactly one integer".into(),
                });
            }
        }
    }
    if let Some((line, _)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(Error::Parse {
            line,
            message: "unexpected content after the last hyperedge".into(),
        });
    }
    let h = Hypergraph::from_parts((0..n as u32).map(|v| (v, None)), hyperedges)?;
    h.ensure_connected()?;
    Ok(h)
}

/// hMETIS-like text; ids are renumbered densely in ascending order and
/// labels are dropped.
pub fn to_hmetis(h: &Hypergraph) -> String {
    let index: BTreeMap<u32, usize> = h.indices(Kind::Vertex).enumerate().map(|(i, v)| (v, i + 1)).collect();
    let mut out = String::new();
    writeln!(out, "{} {}", h.num_hyperedges(), h.num_vertices()).unwrap();
    for e in h.hyperedges() {
        let line: Vec<String> = h.members_unchecked(e).iter().map(|v| index[v].to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn parse(text: &str, format: InputFormat) -> Result<Hypergraph> {
    match format {
        InputFormat::Json => parse_json(text),
        InputFormat::Hmetis => parse_hmetis(text),
    }
}

pub fn parse_input(path: &Path, format: Option<InputFormat>) -> Result<Hypergraph> {
    let text = fs::read_to_string(path)?;
    parse(&text, format.unwrap_or_else(|| InputFormat::from_path(path)))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_layout(path: &Path) -> Result<Layout> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hmetis_path() {
        let h = parse_hmetis("2 3\n1 2\n2 3\n").unwrap();
        assert_eq!(h.num_vertices(), 3);
        assert_eq!(h.num_hyperedges(), 2);
        assert_eq!(h.members(ElementId::hyperedge(0)).unwrap().iter().copied().collect::<Vec<_>>(), [0, 1]);
        assert_eq!(h.members(ElementId::hyperedge(1)).unwrap().iter().copied().collect::<Vec<_>>(), [1, 2]);
        assert_eq!(parse_hmetis(&to_hmetis(&h)).unwrap(), h);
    }

    #[test]
    fn hmetis_comments_and_weights() {
        let h = parse_hmetis("% a comment\n2 3 11\n5 1 2\n% inside\n7 2 3\n1\n1\n1\n").unwrap();
        assert_eq!(h.num_hyperedges(), 2);
        assert_eq!(h.degree(ElementId::vertex(1)).unwrap(), 2);
    }

    #[test]
    fn hmetis_errors_name_the_line() {
        let err = |t: &str| match parse_hmetis(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        };
        assert_eq!(err("2 3\n1 2\n2 4\n"), 3);
        assert_eq!(err("2 3\n1 x\n2 3\n"), 2);
        assert_eq!(err("2 3\n1 2\n\n"), 3);
        assert_eq!(err("2 3\n1 2\n"), 3);
        assert_eq!(err("1 2\n1 2\n1\n"), 3);
        assert_eq!(err("1 2 7\n1 2\n"), 1);
    }

    #[test]
    fn hmetis_rejects_disconnected_input() {
        assert!(matches!(parse_hmetis("2 4\n1 2\n3 4\n"), Err(Error::Disconnected { components: 2 })));
        assert!(matches!(parse_hmetis("1 3\n1 2\n"), Err(Error::IsolatedVertex(_))));
    }

    #[test]
    fn json_unknown_member_names_the_id() {
        let text = r#"{"vertices":[{"id":"a"},{"id":"b"}],"hyperedges":[{"id":"e","members":["a","zz"]}]}"#;
        match parse_json(text) {
            Err(Error::UnknownVertexId(id)) => assert_eq!(id, "zz"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_rejects_empty_and_disconnected() {
        let empty = r#"{"vertices":[{"id":0}],"hyperedges":[{"id":0,"members":[0]},{"id":1,"members":[]}]}"#;
        assert!(matches!(parse_json(empty), Err(Error::EmptyHyperedge(_))));
        let split = r#"{"vertices":[{"id":0},{"id":1}],"hyperedges":[{"id":0,"members":[0]},{"id":1,"members":[1]}]}"#;
        assert!(matches!(parse_json(split), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn json_string_ids_become_labels() {
        let text = r#"{"vertices":[{"id":"a"},{"id":"b","label":"Bee"}],"hyperedges":[{"id":7,"members":["a","b"]}]}"#;
        let h = parse_json(text).unwrap();
        assert_eq!(h.label(ElementId::vertex(0)), Some("a"));
        assert_eq!(h.label(ElementId::vertex(1)), Some("Bee"));
        assert!(h.contains(ElementId::hyperedge(7)));
        assert_eq!(h.label(ElementId::hyperedge(7)), None);
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let h = Hypergraph::build(&[("x", vec!["a", "b", "c"]), ("y", vec!["c", "d"]), ("z", vec!["d"])]).unwrap();
        let text = to_json(&h);
        let back = parse_json(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(to_json(&back), text);
    }
}
