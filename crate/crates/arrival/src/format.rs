//! File formats: the line-oriented instance format, the flow/certificate CSV,
//! and the trace CSV.
//!
//! Instance format (text, `#` starts a comment, blank lines ignored):
//!
//! ```text
//! arrival v1
//! n 2
//! o 0
//! 0 1 D1
//! 1 0 D0
//! ```
//!
//! After the header, the vertex count, and the origin, exactly `n` lines
//! follow: `<vertex> <even-succ> <odd-succ>`, where a successor is a vertex
//! index, `D0` (the destination d), or `D1` (the destination d̄). Canonical
//! serialization lists vertices in index order.
//!
//! Flow CSV (`tail,slot,head,count` with decimal counts of any size) carries
//! one row per edge slot; it is both the profile export and the certificate
//! format judged by `verify`. Syntax and binding against an instance are
//! separate stages, so a certificate can be parsed without knowing its
//! instance.

use std::io::{self, Write};

use num_bigint::BigUint;
use thiserror::Error;

use crate::flows::EdgeFlow;
use crate::instance::{ArrivalInstance, Destination, InstanceError, Slot, SwitchGraph, VertexId};
use crate::simulate::TraceEvent;

/// Parser guard against absurd allocations from hostile headers.
pub const MAX_VERTICES: u32 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{msg}")]
    Semantic { msg: String },
}

impl ParseError {
    fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            msg: msg.into(),
        }
    }

    fn semantic(msg: impl Into<String>) -> ParseError {
        ParseError::Semantic { msg: msg.into() }
    }
}

impl From<InstanceError> for ParseError {
    fn from(e: InstanceError) -> ParseError {
        ParseError::semantic(e.to_string())
    }
}

/// Content lines with their 1-based line numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn decode_utf8(input: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(input).map_err(|e| {
        let line = input[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        ParseError::syntax(line, "input is not valid UTF-8")
    })
}

fn parse_vertex_token(token: &str, n: u32) -> Result<VertexId, ParseError> {
    match token {
        "D0" => Ok(VertexId::Dest(Destination::D)),
        "D1" => Ok(VertexId::Dest(Destination::Dbar)),
        "Y" => Ok(VertexId::Yard),
        _ => {
            let v: u32 = token
                .parse()
                .map_err(|_| ParseError::semantic(format!("invalid vertex token {token:?}")))?;
            if v >= n {
                return Err(ParseError::semantic(format!(
                    "vertex {v} out of range (n = {n})"
                )));
            }
            Ok(VertexId::Proper(v))
        }
    }
}

/// Parses the instance format. Byte input; non-UTF-8 content is a syntax
/// error located at the offending line.
pub fn parse_instance(input: &[u8]) -> Result<ArrivalInstance, ParseError> {
    let text = decode_utf8(input)?;
    let mut lines = content_lines(text);

    let (line, header) = lines
        .next()
        .ok_or_else(|| ParseError::syntax(1, "empty input, expected header 'arrival v1'"))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["arrival", "v1"] {
        return Err(ParseError::syntax(line, "expected header 'arrival v1'"));
    }

    let (line, n_line) = lines
        .next()
        .ok_or_else(|| ParseError::syntax(line + 1, "expected 'n <count>'"))?;
    let n: u32 = match n_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["n", count] => count
            .parse()
            .map_err(|_| ParseError::syntax(line, format!("invalid vertex count {count:?}")))?,
        _ => return Err(ParseError::syntax(line, "expected 'n <count>'")),
    };
    if n == 0 {
        return Err(ParseError::semantic(
            "instance must have at least one vertex",
        ));
    }
    if n > MAX_VERTICES {
        return Err(ParseError::semantic(format!(
            "vertex count {n} exceeds the supported maximum {MAX_VERTICES}"
        )));
    }

    let (line, o_line) = lines
        .next()
        .ok_or_else(|| ParseError::syntax(line + 1, "expected 'o <origin>'"))?;
    let origin = match o_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["o", token] => match parse_vertex_token(token, n)? {
            VertexId::Proper(v) => v,
            _ => {
                return Err(ParseError::semantic(format!(
                    "origin must be a proper vertex, got {token}"
                )))
            }
        },
        _ => return Err(ParseError::syntax(line, "expected 'o <origin>'")),
    };

    let mut succ_even: Vec<Option<VertexId>> = vec![None; n as usize];
    let mut succ_odd: Vec<Option<VertexId>> = vec![None; n as usize];
    let mut filled = 0u32;
    for (line, text) in lines {
        if filled == n {
            return Err(ParseError::syntax(
                line,
                format!("unexpected content after {n} successor lines"),
            ));
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let [v_tok, even_tok, odd_tok] = tokens[..] else {
            return Err(ParseError::syntax(
                line,
                "expected '<vertex> <even-succ> <odd-succ>'",
            ));
        };
        let v = match parse_vertex_token(v_tok, n)? {
            VertexId::Proper(v) => v,
            _ => {
                return Err(ParseError::semantic(format!(
                    "successor lines must start with a proper vertex, got {v_tok}"
                )))
            }
        };
        if succ_even[v as usize].is_some() {
            return Err(ParseError::semantic(format!(
                "duplicate successor line for vertex {v}"
            )));
        }
        succ_even[v as usize] = Some(parse_vertex_token(even_tok, n)?);
        succ_odd[v as usize] = Some(parse_vertex_token(odd_tok, n)?);
        filled += 1;
    }
    if filled < n {
        let missing = succ_even
            .iter()
            .position(|s| s.is_none())
            .expect("some vertex is missing");
        return Err(ParseError::semantic(format!(
            "missing successor line for vertex {missing}"
        )));
    }

    Ok(ArrivalInstance::new(
        n,
        origin,
        succ_even.into_iter().map(Option::unwrap).collect(),
        succ_odd.into_iter().map(Option::unwrap).collect(),
    )?)
}

/// Canonical serialization: header, counts, then vertices in index order.
pub fn serialize_instance(instance: &ArrivalInstance) -> String {
    let mut out = String::new();
    out.push_str("arrival v1\n");
    out.push_str(&format!("n {}\n", instance.n()));
    out.push_str(&format!("o {}\n", instance.origin()));
    for v in instance.vertices() {
        out.push_str(&format!(
            "{v} {} {}\n",
            instance.succ_even(v),
            instance.succ_odd(v)
        ));
    }
    out
}

/// One syntactically valid flow CSV row, not yet bound to an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCsvRow {
    pub tail: VertexId,
    pub slot: Slot,
    pub head: VertexId,
    pub count: BigUint,
}

const FLOW_HEADER: &str = "tail,slot,head,count";

/// Syntax stage of certificate reading: header plus `tail,slot,head,count`
/// rows. Vertex indices are range-checked only against `u32`; binding
/// validates them against a concrete instance.
pub fn parse_flow_csv(input: &[u8]) -> Result<Vec<FlowCsvRow>, ParseError> {
    let text = decode_utf8(input)?;
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| ParseError::syntax(1, format!("empty input, expected '{FLOW_HEADER}'")))?;
    if header != FLOW_HEADER {
        return Err(ParseError::syntax(
            line,
            format!("expected header '{FLOW_HEADER}'"),
        ));
    }
    let mut rows = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        let [tail, slot, head, count] = fields[..] else {
            return Err(ParseError::syntax(
                line,
                "expected 4 comma-separated fields",
            ));
        };
        let tail = parse_vertex_token(tail, u32::MAX)?;
        let slot = match slot {
            "yard" => Slot::Yard,
            "even" => Slot::Even,
            "odd" => Slot::Odd,
            _ => {
                return Err(ParseError::syntax(
                    line,
                    format!("invalid slot {slot:?}, expected yard/even/odd"),
                ))
            }
        };
        let head = parse_vertex_token(head, u32::MAX)?;
        if count.is_empty() || !count.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseError::syntax(
                line,
                format!("invalid count {count:?}, expected a decimal integer"),
            ));
        }
        let count = BigUint::parse_bytes(count.as_bytes(), 10)
            .ok_or_else(|| ParseError::syntax(line, "invalid count"))?;
        rows.push(FlowCsvRow {
            tail,
            slot,
            head,
            count,
        });
    }
    Ok(rows)
}

/// Binding stage: every edge slot of the instance exactly once, with heads
/// matching the instance's successor maps.
pub fn bind_flow(rows: &[FlowCsvRow], instance: &ArrivalInstance) -> Result<EdgeFlow, ParseError> {
    let graph = SwitchGraph::new(instance);
    let mut flow = EdgeFlow::zeros(instance.n());
    let mut seen = vec![false; graph.edge_count()];
    for row in rows {
        let edge = match (row.tail, row.slot) {
            (VertexId::Yard, Slot::Yard) => graph.yard_edge(),
            (VertexId::Proper(v), Slot::Even) if v < graph.n() => graph.even_edge(v),
            (VertexId::Proper(v), Slot::Odd) if v < graph.n() => graph.odd_edge(v),
            _ => {
                return Err(ParseError::semantic(format!(
                    "no edge slot ({}, {}) in this instance",
                    row.tail, row.slot
                )))
            }
        };
        if graph.edge_head(edge) != row.head {
            return Err(ParseError::semantic(format!(
                "edge ({}, {}) heads to {}, row says {}",
                row.tail,
                row.slot,
                graph.edge_head(edge),
                row.head
            )));
        }
        if seen[edge as usize] {
            return Err(ParseError::semantic(format!(
                "duplicate row for edge ({}, {})",
                row.tail, row.slot
            )));
        }
        seen[edge as usize] = true;
        flow.set(edge, row.count.clone());
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        let e = missing as u32;
        return Err(ParseError::semantic(format!(
            "missing row for edge ({}, {})",
            graph.edge_tail(e),
            graph.edge_slot(e)
        )));
    }
    Ok(flow)
}

/// Parse and bind in one step.
pub fn read_flow_csv(input: &[u8], instance: &ArrivalInstance) -> Result<EdgeFlow, ParseError> {
    bind_flow(&parse_flow_csv(input)?, instance)
}

/// Profile/certificate export: one row per edge slot, yard edge first, then
/// even and odd slots per vertex in index order.
pub fn write_flow_csv<W: Write>(w: &mut W, graph: &SwitchGraph, flow: &EdgeFlow) -> io::Result<()> {
    writeln!(w, "{FLOW_HEADER}")?;
    for e in graph.edges() {
        writeln!(
            w,
            "{},{},{},{}",
            graph.edge_tail(e),
            graph.edge_slot(e),
            graph.edge_head(e),
            flow.get(e)
        )?;
    }
    Ok(())
}

/// Trace export: `step,vertex,tau,slot,head` per traversal batch; start-phase
/// rows carry step 0.
pub fn write_trace_csv<W: Write>(w: &mut W, events: &[TraceEvent]) -> io::Result<()> {
    writeln!(w, "step,vertex,tau,slot,head")?;
    for ev in events {
        writeln!(
            w,
            "{},{},{},{},{}",
            ev.step, ev.vertex, ev.tau, ev.slot, ev.head
        )?;
    }
    Ok(())
}
