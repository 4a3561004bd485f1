//! The `BOTGRAPH 1` text format:
//!
//! ```text
//! BOTGRAPH 1
//! <n> <m> <bot_count> <topology> <seed>
//! <u> <v>            (m lines, u <= v, ascending)
//! <bot ids>          (space separated, ascending; empty line when bot_count = 0)
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{GraphMeta, LabeledGraph, Topology};
use crate::io_util::{read_to_string, write_atomic};
use crate::{Error, Graph, Result};

const MAGIC: &str = "BOTGRAPH 1";

pub fn format_graph(lg: &LabeledGraph) -> String {
    let g = &lg.graph;
    let mut out = String::with_capacity(16 * (g.m() + 2));
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(
        out,
        "{} {} {} {} {}",
        g.n(),
        g.m(),
        lg.meta.bot_count,
        lg.meta.topology,
        lg.meta.seed
    );
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    let bots: Vec<String> = lg.bot_nodes().iter().map(usize::to_string).collect();
    out.push_str(&bots.join(" "));
    out.push('\n');
    out
}

pub fn write_graph(path: &Path, lg: &LabeledGraph) -> Result<()> {
    write_atomic(path, format_graph(lg).as_bytes())
}

pub fn read_graph(path: &Path) -> Result<LabeledGraph> {
    parse_graph(&read_to_string(path)?, path)
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let (i, l) = self.inner.next()?;
        self.last = i + 1;
        Some((i + 1, l))
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self.last + 1;
        self.next()
            .ok_or_else(|| self.err(line, format!("unexpected end of file, expected {what}")))
    }

    fn field<T: FromStr>(&self, line: usize, token: Option<&str>, name: &str) -> Result<T> {
        let token = token.ok_or_else(|| self.err(line, format!("missing {name}")))?;
        token
            .parse()
            .map_err(|_| self.err(line, format!("invalid {name} '{token}'")))
    }
}

/// Parses a graph file; `path` is used only for error messages.
pub fn parse_graph(text: &str, path: &Path) -> Result<LabeledGraph> {
    let mut lines = Lines {
        path,
        inner: text.lines().enumerate(),
        last: 0,
    };

    let (ln, magic) = lines.expect("header")?;
    if magic.trim_end() != MAGIC {
        return Err(lines.err(ln, format!("expected '{MAGIC}', found '{magic}'")));
    }

    let (ln, header) = lines.expect("size line")?;
    let mut tok = header.split_whitespace();
    let n: usize = lines.field(ln, tok.next(), "node count")?;
    let m: usize = lines.field(ln, tok.next(), "edge count")?;
    let bot_count: usize = lines.field(ln, tok.next(), "bot count")?;
    let topology: Topology = lines.field(ln, tok.next(), "topology")?;
    let seed: u64 = lines.field(ln, tok.next(), "seed")?;
    if tok.next().is_some() {
        return Err(lines.err(ln, "trailing fields in size line"));
    }

    let mut edges = Vec::with_capacity(m);
    let mut prev: Option<(usize, usize)> = None;
    for k in 0..m {
        let (ln, line) = lines.next().ok_or_else(|| {
            lines.err(
                lines.last + 1,
                format!("edge list truncated: {k} of {m} edges"),
            )
        })?;
        let mut tok = line.split_whitespace();
        let u: usize = lines.field(ln, tok.next(), "edge endpoint")?;
        let v: usize = lines.field(ln, tok.next(), "edge endpoint")?;
        if tok.next().is_some() {
            return Err(lines.err(ln, "expected exactly two endpoints"));
        }
        if u > v || v >= n {
            return Err(lines.err(ln, format!("edge ({u}, {v}) must satisfy u <= v < {n}")));
        }
        if prev.is_some_and(|p| p >= (u, v)) {
            return Err(lines.err(ln, "edges must be strictly ascending"));
        }
        prev = Some((u, v));
        edges.push((u, v));
    }

    let mut labels = vec![false; n];
    let label_line = lines.next();
    let (ln, ids) = match label_line {
        Some(l) => l,
        None if bot_count == 0 => (lines.last + 1, ""),
        None => return Err(lines.err(lines.last + 1, "missing bot id line")),
    };
    let mut count = 0;
    let mut prev = None;
    for token in ids.split_whitespace() {
        let id: usize = lines.field(ln, Some(token), "bot id")?;
        if id >= n || prev.is_some_and(|p| p >= id) {
            return Err(lines.err(ln, format!("bot id {id} out of range or not ascending")));
        }
        prev = Some(id);
        labels[id] = true;
        count += 1;
    }
    if count != bot_count {
        return Err(lines.err(
            ln,
            format!("header declares {bot_count} bots, found {count}"),
        ));
    }
    if let Some((ln, extra)) = lines.next().filter(|(_, l)| !l.trim().is_empty()) {
        return Err(lines.err(ln, format!("unexpected content '{extra}'")));
    }

    let graph = Graph::from_edges(n, edges).map_err(|e| lines.err(2, e.to_string()))?;
    Ok(LabeledGraph {
        graph,
        labels,
        meta: GraphMeta {
            topology,
            seed,
            bot_count,
        },
    })
}

/// Reads a plain whitespace-separated edge list (`u v` per line, `#`
/// comments allowed). The node count is one past the largest id seen.
pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let text = read_to_string(path)?;
    let mut edges = Vec::new();
    let mut n = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse = |t: Option<&str>| -> Result<usize> {
            t.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected two node ids, found '{line}'"),
            })
        };
        let mut tok = line.split_whitespace();
        let u = parse(tok.next())?;
        let v = parse(tok.next())?;
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    Graph::from_edges(n, edges)
}
