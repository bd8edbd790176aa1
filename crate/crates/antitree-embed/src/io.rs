//! Arc-list text format, its JSON mirror, and DOT export.
//!
//! ```text
//! # comment
//! 3 2 root 0
//! 0 1
//! 2 1
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, VertexId};
use crate::error::GraphError;

/// JSON mirror of the arc-list format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcList {
    pub n: usize,
    pub arcs: Vec<[VertexId; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<VertexId>,
}

impl ArcList {
    pub fn from_digraph(d: &Digraph) -> Self {
        ArcList { n: d.n(), arcs: d.arcs().iter().map(|a| [a.tail, a.head]).collect(), root: None }
    }

    pub fn to_digraph(&self) -> Result<Digraph, GraphError> {
        Digraph::new(self.n, self.arcs.iter().map(|a| (a[0], a[1])))
    }
}

fn parse_num(tok: &str, line: usize) -> Result<usize, GraphError> {
    tok.parse().map_err(|_| GraphError::Parse { line, msg: format!("expected an integer, found `{tok}`") })
}

/// Parses the text format. The header may carry `root r`.
pub fn parse_arc_list(text: &str) -> Result<(Digraph, Option<VertexId>), GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (n, m, root) = match toks.as_slice() {
        [n, m] => (parse_num(n, hl)?, parse_num(m, hl)?, None),
        [n, m, "root", r] => (parse_num(n, hl)?, parse_num(m, hl)?, Some(parse_num(r, hl)?)),
        _ => return Err(GraphError::Parse { line: hl, msg: "header must be `n m [root r]`".into() }),
    };
    let mut arcs = Vec::with_capacity(m);
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [u, v] => arcs.push((parse_num(u, ln)?, parse_num(v, ln)?)),
            _ => return Err(GraphError::Parse { line: ln, msg: "arc lines must be `u v`".into() }),
        }
    }
    if arcs.len() != m {
        return Err(GraphError::Parse { line: hl, msg: format!("header promises {m} arcs, found {}", arcs.len()) });
    }
    if let Some(r) = root.filter(|&r| r >= n) {
        return Err(GraphError::VertexOutOfRange { vertex: r, n });
    }
    Ok((Digraph::new(n, arcs)?, root))
}

/// Accepts either the text format or its JSON mirror.
pub fn parse_any(text: &str) -> Result<(Digraph, Option<VertexId>), GraphError> {
    if text.trim_start().starts_with('{') {
        let al: ArcList = serde_json::from_str(text).map_err(|e| GraphError::Parse { line: e.line(), msg: e.to_string() })?;
        Ok((al.to_digraph()?, al.root))
    } else {
        parse_arc_list(text)
    }
}

pub fn format_arc_list(d: &Digraph, root: Option<VertexId>) -> String {
    let mut s = format!("{} {}", d.n(), d.arc_count());
    if let Some(r) = root {
        let _ = write!(s, " root {r}");
    }
    s.push('\n');
    for a in d.arcs() {
        let _ = writeln!(s, "{} {}", a.tail, a.head);
    }
    s
}

pub fn to_dot(d: &Digraph, name: &str) -> String {
    let mut s = format!("digraph {name} {{\n");
    for v in 0..d.n() {
        let _ = writeln!(s, "  {v};");
    }
    for a in d.arcs() {
        let _ = writeln!(s, "  {} -> {};", a.tail, a.head);
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_text() {
        let d = Digraph::new(4, [(0, 1), (2, 1), (3, 0)]).unwrap();
        let (e, r) = parse_arc_list(&format_arc_list(&d, Some(2))).unwrap();
        assert_eq!((e, r), (d, Some(2)));
    }

    #[test]
    fn comments_and_blank_lines() {
        let (d, r) = parse_arc_list("# host\n3 2\n\n0 1 # first\n2 1\n").unwrap();
        assert_eq!(d.arc_count(), 2);
        assert_eq!(r, None);
    }

    #[test]
    fn bad_inputs() {
        assert!(parse_arc_list("3 2\n0 1\n").is_err());
        assert!(parse_arc_list("2 1\n0 x\n").is_err());
        assert!(parse_arc_list("2 1 root 5\n0 1\n").is_err());
        assert_eq!(parse_arc_list("2 1\n0 0\n"), Err(GraphError::Loop(0)));
    }

    #[test]
    fn json_mirror() {
        let (d, r) = parse_any(r#"{"n": 3, "arcs": [[0,1],[2,1]], "root": 1}"#).unwrap();
        assert_eq!(r, Some(1));
        assert_eq!(ArcList::from_digraph(&d).arcs, vec![[0, 1], [2, 1]]);
    }

    #[test]
    fn dot_lists_arcs() {
        let d = Digraph::new(2, [(0, 1)]).unwrap();
        assert!(to_dot(&d, "D").contains("0 -> 1;"));
    }
}
