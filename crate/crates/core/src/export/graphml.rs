use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::dot::successors_from_edges;
use super::{read_to_string, write_to_path, HeaderFields};
use crate::error::{Error, Result};
use crate::network::StateNetwork;

const FORMAT: &str = "GraphML";
pub const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";
const SCHEMA_LOCATION: &str =
    "http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd";

fn node_value(i: usize, bits: u32) -> f64 {
    i as f64 / (1u64 << bits) as f64
}

/// Directed GraphML; keys declared up front, nodes then edges in label order.
pub fn write_graphml<W: Write + ?Sized>(net: &StateNetwork, w: &mut W) -> std::io::Result<()> {
    let bits = net.precision().bits();
    let label_type = if net.max_label() <= i32::MAX as usize {
        "int"
    } else {
        "long"
    };
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        w,
        r#"<graphml xmlns="{GRAPHML_NS}" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xsi:schemaLocation="{SCHEMA_LOCATION}">"#
    )?;
    let keys = [
        ("mu_numerator", "graph", "long"),
        ("mu_exponent", "graph", "int"),
        ("bits", "graph", "int"),
        ("quantization", "graph", "string"),
        ("label", "node", label_type),
        ("value", "node", "double"),
    ];
    for (id, domain, ty) in keys {
        writeln!(
            w,
            r#"  <key id="{id}" for="{domain}" attr.name="{id}" attr.type="{ty}"/>"#
        )?;
    }
    writeln!(w, r#"  <graph id="state_network" edgedefault="directed">"#)?;
    writeln!(
        w,
        r#"    <data key="mu_numerator">{}</data>"#,
        net.mu().numerator()
    )?;
    writeln!(
        w,
        r#"    <data key="mu_exponent">{}</data>"#,
        net.mu().exponent()
    )?;
    writeln!(w, r#"    <data key="bits">{bits}</data>"#)?;
    writeln!(w, r#"    <data key="quantization">{}</data>"#, net.mode())?;
    for i in 0..net.len() {
        writeln!(
            w,
            r#"    <node id="{i}"><data key="label">{i}</data><data key="value">{}</data></node>"#,
            node_value(i, bits)
        )?;
    }
    for (i, s) in net.edges() {
        writeln!(w, r#"    <edge source="{i}" target="{s}"/>"#)?;
    }
    writeln!(w, "  </graph>")?;
    writeln!(w, "</graphml>")
}

pub fn export_graphml(net: &StateNetwork, path: impl AsRef<Path>) -> Result<()> {
    write_to_path(path.as_ref(), |w| write_graphml(net, w))
}

#[derive(Clone, Debug)]
struct Key {
    domain: String,
    ty: String,
}

/// Generic single-graph GraphML content after structural checks.
#[derive(Debug, Default)]
struct Document {
    keys: HashMap<String, Key>,
    graph_data: BTreeMap<String, String>,
    edge_default: String,
    nodes: Vec<(String, BTreeMap<String, String>)>,
    edges: Vec<(String, String)>,
}

fn err(reason: impl Into<String>) -> Error {
    Error::format(FORMAT, reason)
}

fn attrs(e: &BytesStart<'_>) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for a in e.attributes() {
        let a = a.map_err(|e| err(e.to_string()))?;
        let k = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        let v = a
            .unescape_value()
            .map_err(|e| err(e.to_string()))?
            .into_owned();
        out.insert(k, v);
    }
    Ok(out)
}

fn required<'a>(a: &'a HashMap<String, String>, element: &str, name: &str) -> Result<&'a str> {
    a.get(name)
        .map(String::as_str)
        .ok_or_else(|| err(format!("<{element}> lacks required attribute {name}")))
}

fn typed_ok(ty: &str, value: &str) -> bool {
    let v = value.trim();
    match ty {
        "boolean" => matches!(v, "true" | "false" | "1" | "0"),
        "int" => v.parse::<i32>().is_ok(),
        "long" => v.parse::<i64>().is_ok(),
        "float" => v.parse::<f32>().is_ok(),
        "double" => v.parse::<f64>().is_ok(),
        "string" => true,
        _ => false,
    }
}

const KEY_DOMAINS: [&str; 8] = [
    "all",
    "graphml",
    "graph",
    "node",
    "edge",
    "hyperedge",
    "port",
    "endpoint",
];
const KEY_TYPES: [&str; 6] = ["boolean", "int", "long", "float", "double", "string"];

/// Allowed children per element, in schema order (`None` = text only).
fn allowed_children(parent: &str) -> Option<&'static [&'static str]> {
    match parent {
        "graphml" => Some(&["desc", "key", "graph", "data"]),
        "key" => Some(&["desc", "default"]),
        "graph" => Some(&["desc", "data", "node", "edge", "hyperedge"]),
        "node" => Some(&["desc", "data", "port", "graph"]),
        "edge" => Some(&["desc", "data", "graph"]),
        _ => None,
    }
}

fn parse_document(text: &str) -> Result<Document> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut doc = Document::default();
    let mut stack: Vec<String> = Vec::new();
    let mut seen_graph = false;
    let mut graphs = 0;
    let mut node_ids: HashSet<String> = HashSet::new();
    let mut pending_data: Option<(String, String)> = None;
    let mut data_text = String::new();

    loop {
        let event = reader.read_event().map_err(|e| err(e.to_string()))?;
        let (start, empty) = match &event {
            Event::Start(e) => (Some(e.clone()), false),
            Event::Empty(e) => (Some(e.clone()), true),
            _ => (None, false),
        };
        if let Some(e) = start {
            let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
            if name.contains(':') {
                return Err(err(format!("unexpected prefixed element <{name}>")));
            }
            let a = attrs(&e)?;
            match stack.last() {
                None => {
                    if name != "graphml" {
                        return Err(err(format!("root element is <{name}>, expected <graphml>")));
                    }
                    if a.get("xmlns").map(String::as_str) != Some(GRAPHML_NS) {
                        return Err(err("root element is not in the GraphML namespace"));
                    }
                }
                Some(parent) => {
                    let ok = allowed_children(parent).is_some_and(|c| c.contains(&name.as_str()));
                    if !ok {
                        return Err(err(format!("<{name}> is not allowed inside <{parent}>")));
                    }
                }
            }
            let parent = stack.last().cloned().unwrap_or_default();
            match name.as_str() {
                "key" => {
                    if seen_graph {
                        return Err(err("<key> must precede <graph>"));
                    }
                    let id = required(&a, "key", "id")?.to_string();
                    let domain = a.get("for").cloned().unwrap_or_else(|| "all".into());
                    if !KEY_DOMAINS.contains(&domain.as_str()) {
                        return Err(err(format!("key {id}: invalid for={domain:?}")));
                    }
                    let ty = a
                        .get("attr.type")
                        .cloned()
                        .unwrap_or_else(|| "string".into());
                    if !KEY_TYPES.contains(&ty.as_str()) {
                        return Err(err(format!("key {id}: invalid attr.type={ty:?}")));
                    }
                    if doc.keys.insert(id.clone(), Key { domain, ty }).is_some() {
                        return Err(err(format!("duplicate key id {id}")));
                    }
                }
                "graph" => {
                    seen_graph = true;
                    if parent == "graphml" {
                        graphs += 1;
                        if graphs > 1 {
                            return Err(err("more than one top-level graph"));
                        }
                    } else {
                        return Err(err("nested graphs are not supported"));
                    }
                    let ed = required(&a, "graph", "edgedefault")?;
                    if ed != "directed" && ed != "undirected" {
                        return Err(err(format!("invalid edgedefault {ed:?}")));
                    }
                    doc.edge_default = ed.to_string();
                }
                "node" => {
                    let id = required(&a, "node", "id")?.to_string();
                    if !node_ids.insert(id.clone()) {
                        return Err(err(format!("duplicate node id {id}")));
                    }
                    doc.nodes.push((id, BTreeMap::new()));
                }
                "edge" => {
                    let s = required(&a, "edge", "source")?.to_string();
                    let t = required(&a, "edge", "target")?.to_string();
                    if let Some(d) = a.get("directed") {
                        if d != "true" && d != "false" {
                            return Err(err(format!("invalid directed={d:?}")));
                        }
                    }
                    doc.edges.push((s, t));
                }
                "data" => {
                    let key = required(&a, "data", "key")?.to_string();
                    let k = doc
                        .keys
                        .get(&key)
                        .ok_or_else(|| err(format!("data references undeclared key {key}")))?;
                    if k.domain != "all" && k.domain != parent {
                        return Err(err(format!(
                            "key {key} is declared for {} but used on <{parent}>",
                            k.domain
                        )));
                    }
                    pending_data = Some((parent.clone(), key));
                    data_text.clear();
                }
                _ => {}
            }
            if empty {
                if name == "data" {
                    finish_data(&mut doc, pending_data.take(), "")?;
                }
            } else {
                stack.push(name);
            }
            continue;
        }
        match event {
            Event::End(e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                if name == "data" {
                    finish_data(&mut doc, pending_data.take(), &data_text)?;
                }
                stack.pop();
            }
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| err(e.to_string()))?;
                match stack.last().map(String::as_str) {
                    Some("data") | Some("desc") | Some("default") => data_text.push_str(&s),
                    _ if s.trim().is_empty() => {}
                    other => return Err(err(format!("stray text inside {other:?}"))),
                }
            }
            Event::Eof => {
                if let Some(open) = stack.last() {
                    return Err(err(format!("unclosed <{open}>")));
                }
                break;
            }
            _ => {}
        }
    }
    if graphs != 1 {
        return Err(err("expected exactly one graph"));
    }
    for (s, t) in &doc.edges {
        for end in [s, t] {
            if !node_ids.contains(end) {
                return Err(err(format!("edge endpoint {end} is not a node")));
            }
        }
    }
    Ok(doc)
}

fn finish_data(doc: &mut Document, pending: Option<(String, String)>, text: &str) -> Result<()> {
    let Some((owner, key)) = pending else {
        return Ok(());
    };
    let ty = &doc.keys[&key].ty;
    if !typed_ok(ty, text) {
        return Err(err(format!(
            "value {text:?} for key {key} is not a valid {ty}"
        )));
    }
    let slot = match owner.as_str() {
        "graph" => &mut doc.graph_data,
        "node" => match doc.nodes.last_mut() {
            Some(n) => &mut n.1,
            None => return Ok(()),
        },
        _ => return Ok(()),
    };
    slot.insert(key, text.trim().to_string());
    Ok(())
}

/// Structural validation against the GraphML 1.0 content model: element
/// nesting and order, required attributes, enumerated attribute values,
/// unique key and node ids, key references, edge endpoints, and typed data.
pub fn validate_graphml(text: &str) -> Result<()> {
    parse_document(text).map(|_| ())
}

/// Reads back a file produced by [`write_graphml`].
pub fn parse_graphml(text: &str) -> Result<StateNetwork> {
    let doc = parse_document(text)?;
    if doc.edge_default != "directed" {
        return Err(err("state networks are directed"));
    }
    let mut header = HeaderFields::default();
    for (k, v) in &doc.graph_data {
        header.set(FORMAT, k, v)?;
    }
    let map = header.into_map(FORMAT)?;
    let count = map.precision.node_count() as usize;
    let bits = map.precision.bits();
    let parse_id = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| err(format!("node id {s:?} is not an integer label")))
    };
    if doc.nodes.len() != count {
        return Err(err(format!("{} nodes, expected {count}", doc.nodes.len())));
    }
    for (id, data) in &doc.nodes {
        let i = parse_id(id)?;
        if i >= count {
            return Err(err(format!("node {i} is out of range")));
        }
        if data.get("label").map(String::as_str) != Some(id.as_str()) {
            return Err(err(format!("node {id} has a mismatched label")));
        }
        let value: Option<f64> = data.get("value").and_then(|v| v.parse().ok());
        if value != Some(node_value(i, bits)) {
            return Err(err(format!("node {id} has a mismatched value")));
        }
    }
    let edges = doc
        .edges
        .iter()
        .map(|(s, t)| Ok((parse_id(s)?, parse_id(t)?)))
        .collect::<Result<Vec<_>>>()?;
    successors_from_edges(FORMAT, map, count, edges)
}

pub fn read_graphml(path: impl AsRef<Path>) -> Result<StateNetwork> {
    parse_graphml(&read_to_string(path.as_ref())?)
}
