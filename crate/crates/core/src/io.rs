//! Plain-text formats.
//!
//! Graph files: a header `n m` or `n m bipartite a` followed by `m` lines
//! `u v` (0-indexed vertices). Subgraph/state files use the same layout with
//! the ambient vertex count in the header; pairing with the ambient graph file
//! happens at the CLI. Blank lines and `#` comments are ignored.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeSet, Graph};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

struct Header {
    n: u32,
    m: usize,
    side_a: Option<u32>,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header> {
    let tok: Vec<&str> = line.split_whitespace().collect();
    if tok.len() != 2 && tok.len() != 4 {
        return Err(parse_err(line_no, "header must be `n m` or `n m bipartite a`"));
    }
    let n: u32 = tok[0]
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad vertex count {:?}", tok[0])))?;
    let m: usize = tok[1]
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad edge count {:?}", tok[1])))?;
    let side_a = if tok.len() == 4 {
        if tok[2] != "bipartite" {
            return Err(parse_err(line_no, format!("expected `bipartite`, got {:?}", tok[2])));
        }
        let a = tok[3]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad part size {:?}", tok[3])))?;
        Some(a)
    } else {
        None
    };
    Ok(Header { n, m, side_a })
}

fn parse_body(text: &str) -> Result<(Header, Vec<(u32, u32)>)> {
    let mut lines = content_lines(text);
    let (line_no, header_line) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file, expected header"))?;
    let header = parse_header(line_no, header_line)?;
    let mut edges = Vec::with_capacity(header.m);
    for (line_no, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 2 {
            return Err(parse_err(line_no, format!("expected `u v`, got {line:?}")));
        }
        let u: u32 = tok[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad vertex {:?}", tok[0])))?;
        let v: u32 = tok[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad vertex {:?}", tok[1])))?;
        if u >= header.n || v >= header.n {
            return Err(parse_err(
                line_no,
                format!("vertex out of range for n={}", header.n),
            ));
        }
        if u == v {
            return Err(parse_err(line_no, format!("loop edge ({u},{u})")));
        }
        edges.push((u, v));
    }
    if edges.len() != header.m {
        return Err(parse_err(
            1,
            format!("header promises {} edges, file has {}", header.m, edges.len()),
        ));
    }
    Ok((header, edges))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let (header, edges) = parse_body(text)?;
    Graph::new(header.n, edges, header.side_a)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = match g.side_a() {
        Some(a) => format!("{} {} bipartite {}\n", g.n(), g.m(), a),
        None => format!("{} {}\n", g.n(), g.m()),
    };
    for e in g.edges() {
        out.push_str(&format!("{} {}\n", e.u(), e.v()));
    }
    out
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    Ok(std::fs::write(path, format_graph(g))?)
}

/// Parse a state/subgraph file. The header's `n` must match the ambient graph;
/// a `bipartite` marker, if present, must match too. Duplicate edges rejected.
pub fn parse_edge_set(text: &str, ambient: &Graph) -> Result<EdgeSet> {
    let (header, pairs) = parse_body(text)?;
    if header.n != ambient.n() {
        return Err(Error::InvalidInput(format!(
            "state file is on {} vertices, ambient graph has {}",
            header.n,
            ambient.n()
        )));
    }
    if header.side_a.is_some() && header.side_a != ambient.side_a() {
        return Err(Error::InvalidInput(
            "state file bipartition does not match ambient graph".into(),
        ));
    }
    let mut set = EdgeSet::new();
    for (u, v) in pairs {
        let e = Edge::new(u, v)?;
        if !set.insert(e) {
            return Err(Error::InvalidInput(format!("duplicate edge {e}")));
        }
    }
    Ok(set)
}

pub fn read_edge_set(path: impl AsRef<Path>, ambient: &Graph) -> Result<EdgeSet> {
    parse_edge_set(&std::fs::read_to_string(path)?, ambient)
}

pub fn format_edge_set(edges: &EdgeSet, ambient: &Graph) -> String {
    let mut out = match ambient.side_a() {
        Some(a) => format!("{} {} bipartite {}\n", ambient.n(), edges.len(), a),
        None => format!("{} {}\n", ambient.n(), edges.len()),
    };
    for e in edges {
        out.push_str(&format!("{} {}\n", e.u(), e.v()));
    }
    out
}

pub fn write_edge_set(path: impl AsRef<Path>, edges: &EdgeSet, ambient: &Graph) -> Result<()> {
    Ok(std::fs::write(path, format_edge_set(edges, ambient))?)
}
