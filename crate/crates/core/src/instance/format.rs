//! Native `.avrp` instance files.
//!
//! ```text
//! AVRP 1
//! name RC208-10-t0.4
//! source RC208
//! class RC2
//! tau 0.4
//! seed 42
//! customers 10
//! capacity 100
//! vehicles 3
//! NODES
//! 0 0 40 50 0 0 0 960
//! 1 3 22 85 10 10 353 708
//! ...
//! 11 0 40 50 0 0 0 960
//! PRECEDENCE
//! 1 4 AND
//! 2 4 OR
//! END
//! ```
//!
//! Node rows are `id origin x y demand service early late`; the horizon is
//! the depot's `late`. Floats use the shortest representation that parses
//! back to the same bits, so a read after a write is an exact identity.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    Instance, InstanceClass, InstanceMeta, ModelError, Node, NodeId, PrecedenceMatrix, Relation,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("not an AVRP file")]
    NotAvrp,
    #[error("unsupported AVRP version {0}, expected {FORMAT_VERSION}")]
    Version(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header field {0}")]
    MissingField(&'static str),
    #[error("expected {expected} node rows, found {found}")]
    NodeCount { expected: usize, found: usize },
    #[error("invalid instance: {0}")]
    Invalid(#[from] ModelError),
}

pub fn write(inst: &Instance) -> String {
    let m = inst.meta();
    let mut s = String::new();
    let _ = writeln!(s, "AVRP {FORMAT_VERSION}");
    let _ = writeln!(s, "name {}", m.name);
    let _ = writeln!(s, "source {}", m.source);
    let _ = writeln!(s, "class {}", m.class.as_str());
    let _ = writeln!(s, "tau {}", m.tau);
    let _ = writeln!(s, "seed {}", m.seed);
    let _ = writeln!(s, "customers {}", inst.n());
    let _ = writeln!(s, "capacity {}", inst.capacity());
    let _ = writeln!(s, "vehicles {}", inst.max_vehicles());
    s.push_str("NODES\n");
    for n in inst.nodes() {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {} {}",
            n.id, n.origin, n.x, n.y, n.demand, n.service, n.early, n.late
        );
    }
    s.push_str("PRECEDENCE\n");
    for (i, j, r) in inst.precedence().triples() {
        let _ = writeln!(s, "{i} {j} {r}");
    }
    s.push_str("END\n");
    s
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, FormatError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("cannot parse {tok:?}")))
}

#[derive(PartialEq)]
enum Section {
    Header,
    Nodes,
    Precedence,
    Done,
}

pub fn read(text: &str) -> Result<Instance, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, l)) if l.starts_with("AVRP") => {
            let v = l["AVRP".len()..].trim();
            if v != FORMAT_VERSION.to_string() {
                return Err(FormatError::Version(v.to_string()));
            }
        }
        _ => return Err(FormatError::NotAvrp),
    }

    let mut name = None;
    let mut source = None;
    let mut class = None;
    let mut tau = None;
    let mut seed = None;
    let mut customers: Option<usize> = None;
    let mut capacity = None;
    let mut vehicles = None;
    let mut nodes: Vec<Node> = Vec::new();
    let mut triples = Vec::new();
    let mut section = Section::Header;

    for (no, line) in lines {
        match line {
            "NODES" => {
                section = Section::Nodes;
                continue;
            }
            "PRECEDENCE" => {
                section = Section::Precedence;
                continue;
            }
            "END" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::Header => {
                let (key, value) = line
                    .split_once(char::is_whitespace)
                    .map(|(k, v)| (k, v.trim()))
                    .ok_or_else(|| syntax(no, "expected `key value`"))?;
                match key {
                    "name" => name = Some(value.to_string()),
                    "source" => source = Some(value.to_string()),
                    "class" => {
                        class = Some(
                            InstanceClass::parse(value)
                                .ok_or_else(|| syntax(no, "unknown class"))?,
                        )
                    }
                    "tau" => tau = Some(num::<f64>(value, no)?),
                    "seed" => seed = Some(num::<u64>(value, no)?),
                    "customers" => customers = Some(num(value, no)?),
                    "capacity" => capacity = Some(num::<f64>(value, no)?),
                    "vehicles" => vehicles = Some(num::<usize>(value, no)?),
                    other => return Err(syntax(no, format!("unknown header field {other:?}"))),
                }
            }
            Section::Nodes => {
                if toks.len() != 8 {
                    return Err(syntax(no, "node rows have 8 columns"));
                }
                nodes.push(Node {
                    id: NodeId(num(toks[0], no)?),
                    origin: num(toks[1], no)?,
                    x: num(toks[2], no)?,
                    y: num(toks[3], no)?,
                    demand: num(toks[4], no)?,
                    service: num(toks[5], no)?,
                    early: num(toks[6], no)?,
                    late: num(toks[7], no)?,
                });
            }
            Section::Precedence => {
                if toks.len() != 3 {
                    return Err(syntax(no, "precedence rows are `i j AND|OR`"));
                }
                let r = match toks[2] {
                    "AND" => Relation::And,
                    "OR" => Relation::Or,
                    other => return Err(syntax(no, format!("unknown relation {other:?}"))),
                };
                triples.push((num(toks[0], no)?, num(toks[1], no)?, r));
            }
            Section::Done => return Err(syntax(no, "content after END")),
        }
    }
    if section != Section::Done {
        return Err(syntax(text.lines().count(), "missing END"));
    }
    let n = customers.ok_or(FormatError::MissingField("customers"))?;
    if nodes.len() != n + 2 {
        return Err(FormatError::NodeCount {
            expected: n + 2,
            found: nodes.len(),
        });
    }
    let pm = PrecedenceMatrix::from_triples(n, triples)?;
    let meta = InstanceMeta {
        name: name.ok_or(FormatError::MissingField("name"))?,
        source: source.ok_or(FormatError::MissingField("source"))?,
        class: class.ok_or(FormatError::MissingField("class"))?,
        tau: tau.ok_or(FormatError::MissingField("tau"))?,
        seed: seed.ok_or(FormatError::MissingField("seed"))?,
    };
    Ok(Instance::new(
        nodes,
        capacity.ok_or(FormatError::MissingField("capacity"))?,
        vehicles.ok_or(FormatError::MissingField("vehicles"))?,
        pm,
        meta,
    )?)
}
