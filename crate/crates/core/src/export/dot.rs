use std::io::Write;
use std::path::Path;

use super::{dyadic_decimal, read_to_string, write_to_path, HeaderFields};
use crate::error::{Error, Result};
use crate::network::StateNetwork;

const FORMAT: &str = "DOT";

/// Nodes in ascending label order, then one edge per node in the same order.
pub fn write_dot<W: Write + ?Sized>(net: &StateNetwork, w: &mut W) -> std::io::Result<()> {
    let bits = net.precision().bits();
    writeln!(w, "digraph state_network {{")?;
    writeln!(
        w,
        "  graph [mu_numerator={}, mu_exponent={}, bits={}, quantization=\"{}\"];",
        net.mu().numerator(),
        net.mu().exponent(),
        bits,
        net.mode()
    )?;
    for i in 0..net.len() {
        writeln!(w, "  {i} [x=\"{}\"];", dyadic_decimal(i as u64, bits))?;
    }
    for (i, s) in net.edges() {
        writeln!(w, "  {i} -> {s};")?;
    }
    writeln!(w, "}}")
}

pub fn export_dot(net: &StateNetwork, path: impl AsRef<Path>) -> Result<()> {
    write_to_path(path.as_ref(), |w| write_dot(net, w))
}

fn attributes(body: &str) -> impl Iterator<Item = (&str, &str)> {
    body.split(',').filter_map(|kv| {
        let (k, v) = kv.split_once('=')?;
        Some((k.trim(), v.trim().trim_matches('"')))
    })
}

fn bracketed(rest: &str) -> Result<&str> {
    rest.trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::format(FORMAT, format!("expected attribute list, got {rest:?}")))
}

/// Reads the subset of DOT produced by [`write_dot`].
pub fn parse_dot(text: &str) -> Result<StateNetwork> {
    let mut header = HeaderFields::default();
    let mut x_attr: Vec<(usize, String)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let label = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::format(FORMAT, format!("bad node id {s:?}")))
    };

    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("//"));
    match lines.next() {
        Some(l) if l.starts_with("digraph") && l.ends_with('{') => {}
        other => {
            return Err(Error::format(
                FORMAT,
                format!("expected digraph header, got {other:?}"),
            ))
        }
    }
    let mut closed = false;
    for line in lines {
        if closed {
            return Err(Error::format(FORMAT, "content after closing brace"));
        }
        if line == "}" {
            closed = true;
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| Error::format(FORMAT, format!("missing ';' in {line:?}")))?;
        if let Some(rest) = stmt.strip_prefix("graph") {
            for (k, v) in attributes(bracketed(rest)?) {
                header.set(FORMAT, k, v)?;
            }
        } else if let Some((a, b)) = stmt.split_once("->") {
            edges.push((label(a)?, label(b)?));
        } else if let Some((id, rest)) = stmt.split_once('[') {
            let x = attributes(bracketed(&format!("[{rest}"))?)
                .find(|(k, _)| *k == "x")
                .map(|(_, v)| v.to_string())
                .unwrap_or_default();
            x_attr.push((label(id)?, x));
        } else {
            return Err(Error::format(
                FORMAT,
                format!("unrecognized statement {line:?}"),
            ));
        }
    }
    if !closed {
        return Err(Error::format(FORMAT, "missing closing brace"));
    }

    let map = header.into_map(FORMAT)?;
    let count = map.precision.node_count() as usize;
    let bits = map.precision.bits();
    let mut seen = vec![false; count];
    for (i, x) in x_attr {
        if i >= count || std::mem::replace(&mut seen[i], true) {
            return Err(Error::format(
                FORMAT,
                format!("unexpected or duplicate node {i}"),
            ));
        }
        if x != dyadic_decimal(i as u64, bits) {
            return Err(Error::format(FORMAT, format!("node {i} has x={x:?}")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::format(FORMAT, "missing node declarations"));
    }
    successors_from_edges(FORMAT, map, count, edges)
}

pub(crate) fn successors_from_edges(
    format: &'static str,
    map: crate::fixed_point::LogisticMap,
    count: usize,
    edges: Vec<(usize, usize)>,
) -> Result<StateNetwork> {
    let mut succ = vec![u32::MAX; count];
    for (a, b) in edges {
        if a >= count || b >= count {
            return Err(Error::format(
                format,
                format!("edge {a} -> {b} leaves the node set"),
            ));
        }
        if succ[a] != u32::MAX {
            return Err(Error::format(
                format,
                format!("node {a} has two outgoing edges"),
            ));
        }
        succ[a] = b as u32;
    }
    if let Some(a) = succ.iter().position(|&s| s == u32::MAX) {
        return Err(Error::format(
            format,
            format!("node {a} has no outgoing edge"),
        ));
    }
    StateNetwork::from_successors(map, succ)
}

pub fn read_dot(path: impl AsRef<Path>) -> Result<StateNetwork> {
    parse_dot(&read_to_string(path.as_ref())?)
}
