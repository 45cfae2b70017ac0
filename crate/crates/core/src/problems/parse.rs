//! Text formats for problem instances.

use std::collections::HashMap;

use super::circuit::{Circuit, Gate, GateOp, MonotoneCircuit};
use super::formula::{CnfFormula, DnfFormula, Lit};
use super::graph::Graph;
use crate::error::{Error, Result};

/// Content lines with their 1-based numbers, skipping blanks and `c`/`#`
/// comments. A lone `%` ends the input (a SATLIB convention).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .take_while(|(_, l)| *l != "%")
        .filter(|(_, l)| {
            !(l.is_empty() || *l == "c" || l.starts_with("c ") || l.starts_with('#'))
        })
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    tok.parse()
        .map_err(|e| Error::parse(line, format!("bad {what} {tok:?}: {e}")))
}

/// Parses `p <kind> N M`, returning `(N, M)`.
fn header(line: usize, l: &str, kind: &str) -> Result<(usize, usize)> {
    let toks: Vec<&str> = l.split_whitespace().collect();
    match toks.as_slice() {
        ["p", k, n, m] if *k == kind => Ok((
            number(line, n, "count")?,
            number(line, m, "count")?,
        )),
        _ => Err(Error::parse(line, format!("expected header 'p {kind} N M'"))),
    }
}

fn malformed_at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::MalformedInstance(m) => Error::parse(line, m),
        e => e,
    }
}

/// `p graph N M` followed by `M` lines `e u v`.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hl, h) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing 'p graph' header"))?;
    let (n, m) = header(hl, h, "graph")?;
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let ["e", u, v] = toks.as_slice() else {
            return Err(Error::parse(ln, "expected an edge line 'e u v'"));
        };
        let e = (number(ln, u, "vertex")?, number(ln, v, "vertex")?);
        Graph::new(n, [e]).map_err(malformed_at(ln))?;
        edges.push(e);
    }
    if edges.len() != m {
        return Err(Error::parse(
            hl,
            format!("header declares {m} edges but {} were given", edges.len()),
        ));
    }
    Graph::new(n, edges)
}

/// Reads signed literals up to the terminating 0 on one line.
fn literal_line(ln: usize, l: &str) -> Result<Vec<Lit>> {
    let mut lits = Vec::new();
    let mut toks = l.split_whitespace();
    loop {
        let Some(tok) = toks.next() else {
            return Err(Error::parse(ln, "line is not terminated by 0"));
        };
        let x: i64 = number(ln, tok, "literal")?;
        match Lit::from_dimacs(x) {
            Some(lit) => lits.push(lit),
            None => break,
        }
    }
    if toks.next().is_some() {
        return Err(Error::parse(ln, "tokens after the terminating 0"));
    }
    Ok(lits)
}

/// `p dnf N M` followed by `M` terms, one per line, each ending in 0.
pub fn parse_dnf(text: &str) -> Result<DnfFormula> {
    let mut lines = content_lines(text);
    let (hl, h) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing 'p dnf' header"))?;
    let (n, m) = header(hl, h, "dnf")?;
    let mut terms = Vec::with_capacity(m);
    for (ln, l) in lines {
        let t = literal_line(ln, l)?;
        DnfFormula::new(n, vec![t.clone()]).map_err(malformed_at(ln))?;
        terms.push(t);
    }
    if terms.len() != m {
        return Err(Error::parse(
            hl,
            format!("header declares {m} terms but {} were given", terms.len()),
        ));
    }
    DnfFormula::new(n, terms)
}

/// DIMACS CNF: `p cnf N M`, then clauses as 0-terminated literal streams
/// that may span or share lines.
pub fn parse_cnf(text: &str) -> Result<CnfFormula> {
    let mut lines = content_lines(text);
    let (hl, h) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing 'p cnf' header"))?;
    let (n, m) = header(hl, h, "cnf")?;
    let mut clauses = Vec::with_capacity(m);
    let mut current = Vec::new();
    let mut last_line = hl;
    for (ln, l) in lines {
        last_line = ln;
        for tok in l.split_whitespace() {
            let x: i64 = number(ln, tok, "literal")?;
            match Lit::from_dimacs(x) {
                Some(lit) => current.push(lit),
                None => {
                    let c = std::mem::take(&mut current);
                    CnfFormula::new(n, vec![c.clone()]).map_err(malformed_at(ln))?;
                    clauses.push(c);
                }
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::parse(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            hl,
            format!("header declares {m} clauses but {} were given", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses)
}

/// Line-based circuits: `input k` declarations, then `gate g OP a b` lines
/// (`OP` one of AND, OR, or NOT with a single operand), then `output g`.
/// Identifiers are integers shared by inputs and gates; inputs are numbered
/// as variables in declaration order.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut wire_of: HashMap<i64, usize> = HashMap::new();
    let mut num_inputs = 0;
    let mut gates = Vec::new();
    let mut output = None;
    let mut last_line = 0;
    for (ln, l) in content_lines(text) {
        last_line = ln;
        if output.is_some() {
            return Err(Error::parse(ln, "nothing may follow the 'output' line"));
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let operand = |tok: &str| -> Result<usize> {
            let id: i64 = number(ln, tok, "identifier")?;
            wire_of
                .get(&id)
                .copied()
                .ok_or_else(|| Error::parse(ln, format!("identifier {id} is used before it is defined")))
        };
        let fresh = |tok: &str| -> Result<i64> {
            let id: i64 = number(ln, tok, "identifier")?;
            if wire_of.contains_key(&id) {
                return Err(Error::parse(ln, format!("identifier {id} is defined twice")));
            }
            Ok(id)
        };
        match toks.as_slice() {
            ["input", k] => {
                if !gates.is_empty() {
                    return Err(Error::parse(ln, "inputs must be declared before gates"));
                }
                let id = fresh(k)?;
                wire_of.insert(id, num_inputs);
                num_inputs += 1;
            }
            ["gate", g, op, rest @ ..] => {
                let gate = match (op.to_ascii_uppercase().as_str(), rest) {
                    ("AND", [a, b]) => Gate { op: GateOp::And, a: operand(a)?, b: operand(b)? },
                    ("OR", [a, b]) => Gate { op: GateOp::Or, a: operand(a)?, b: operand(b)? },
                    ("NOT", [a]) => {
                        let a = operand(a)?;
                        Gate { op: GateOp::Not, a, b: a }
                    }
                    _ => return Err(Error::parse(ln, format!("bad gate line {l:?}"))),
                };
                let id = fresh(g)?;
                wire_of.insert(id, num_inputs + gates.len());
                gates.push(gate);
            }
            ["output", g] => output = Some(operand(g)?),
            _ => return Err(Error::parse(ln, format!("unrecognized line {l:?}"))),
        }
    }
    let output = output.ok_or_else(|| Error::parse(last_line, "missing 'output' line"))?;
    Circuit::new(num_inputs, gates, output)
}

/// [`parse_circuit`], rejecting NOT gates as malformed.
pub fn parse_monotone(text: &str) -> Result<MonotoneCircuit> {
    let c = parse_circuit(text)?;
    if !c.is_monotone() {
        return Err(Error::MalformedInstance(
            "monotone circuit file contains a NOT gate".into(),
        ));
    }
    MonotoneCircuit::from_circuit(c)
}
