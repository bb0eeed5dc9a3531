//! Two-file text format: `nodes.tsv` (id, label, name, attrs) and
//! `edges.tsv` (src, dst, label, weight).
//!
//! Attributes are comma-joined decimals; an empty field means "absent".
//! Floats use Rust's shortest round-trip formatting, so write → read → write
//! is byte-identical. Tabs, newlines and backslashes in text fields are
//! backslash-escaped.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{GraphBuilder, HeteroGraph, NodeId};
use crate::error::{Error, Result};

const NODES_HEADER: &str = "id\tlabel\tname\tattrs";
const EDGES_HEADER: &str = "src\tdst\tlabel\tweight";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('t') => out.push('\t'),
                Some('n') => out.push('\n'),
                Some('r') => out.push('\r'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub fn write_graph(g: &HeteroGraph, mut nodes: impl Write, mut edges: impl Write) -> Result<()> {
    writeln!(nodes, "{NODES_HEADER}")?;
    for v in g.node_ids() {
        let attrs = g
            .attrs(v)
            .map(|a| {
                a.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .unwrap_or_default();
        writeln!(
            nodes,
            "{}\t{}\t{}\t{}",
            v.0,
            escape(g.label_of(v)),
            escape(g.name_of(v)),
            attrs
        )?;
    }
    writeln!(edges, "{EDGES_HEADER}")?;
    for e in g.edges() {
        let w = e.weight.map(|w| w.to_string()).unwrap_or_default();
        writeln!(
            edges,
            "{}\t{}\t{}\t{}",
            e.u.0,
            e.v.0,
            escape(g.edge_label_name(e.label)),
            w
        )?;
    }
    Ok(())
}

fn parse_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    }
}

fn fields<'a>(line: &'a str, path: &Path, lineno: usize) -> Result<[&'a str; 4]> {
    let parts: Vec<&str> = line.split('\t').collect();
    <[&str; 4]>::try_from(parts.as_slice()).map_err(|_| {
        parse_err(
            path,
            lineno,
            format!("expected 4 fields, got {}", parts.len()),
        )
    })
}

/// Reads a graph; `source` is only used in error messages.
pub fn read_graph(nodes: impl BufRead, edges: impl BufRead, source: &Path) -> Result<HeteroGraph> {
    let mut b = GraphBuilder::new();
    let nodes_path = source.join("nodes.tsv");
    for (i, line) in nodes.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line != NODES_HEADER {
                return Err(parse_err(&nodes_path, lineno, "bad header"));
            }
            continue;
        }
        let [id, label, name, attrs] = fields(&line, &nodes_path, lineno)?;
        let id: usize = id.parse().map_err(|e| parse_err(&nodes_path, lineno, e))?;
        if id != b.node_count() {
            return Err(parse_err(
                &nodes_path,
                lineno,
                "node ids must be contiguous from 0",
            ));
        }
        let attrs = if attrs.is_empty() {
            None
        } else {
            Some(
                attrs
                    .split(',')
                    .map(str::parse::<f64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| parse_err(&nodes_path, lineno, e))?,
            )
        };
        b.add_node(&unescape(label), attrs, unescape(name))?;
    }
    let edges_path = source.join("edges.tsv");
    for (i, line) in edges.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line != EDGES_HEADER {
                return Err(parse_err(&edges_path, lineno, "bad header"));
            }
            continue;
        }
        let [src, dst, label, weight] = fields(&line, &edges_path, lineno)?;
        let src: usize = src.parse().map_err(|e| parse_err(&edges_path, lineno, e))?;
        let dst: usize = dst.parse().map_err(|e| parse_err(&edges_path, lineno, e))?;
        let weight = if weight.is_empty() {
            None
        } else {
            Some(
                weight
                    .parse::<f64>()
                    .map_err(|e| parse_err(&edges_path, lineno, e))?,
            )
        };
        b.add_edge(NodeId(src), NodeId(dst), &unescape(label), weight)?;
    }
    Ok(b.freeze())
}

pub fn write_graph_dir(g: &HeteroGraph, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let nodes = BufWriter::new(File::create(dir.join("nodes.tsv"))?);
    let edges = BufWriter::new(File::create(dir.join("edges.tsv"))?);
    write_graph(g, nodes, edges)
}

pub fn read_graph_dir(dir: &Path) -> Result<HeteroGraph> {
    let open = |name: &str| -> Result<BufReader<File>> {
        let p: PathBuf = dir.join(name);
        File::open(&p)
            .map(BufReader::new)
            .map_err(|e| Error::Parse {
                path: p,
                message: e.to_string(),
            })
    };
    read_graph(open("nodes.tsv")?, open("edges.tsv")?, dir)
}
