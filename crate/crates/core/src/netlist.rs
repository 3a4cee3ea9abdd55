//! The `.onl` netlist format.
//!
//! ```text
//! # comment
//! source <port>
//! bs <hadamard|symmetric> <ratio> <inA> <inB> -> <outC> <outD>
//! phase <port> <radians>
//! atten <port> <t>
//! shift <port> <delta>
//! sorter <in> reject <port> { <label>:<port> ... }
//! merge <out> reject <port> { <label>:<port> ... }
//! hwp <port> <plus45|minus45>
//! lunitary <port> <l1> <l2> <m00re> <m00im> <m01re> <m01im> <m10re> <m10im> <m11re> <m11im>
//! detect <name> <port>
//! ```
//!
//! Labels are signed integers (OAM) or `H`/`V`. Emission is canonical:
//! sources, then elements in the circuit's topological order, then
//! detectors by name. Reals are written in shortest round-trip form, so
//! `parse(emit(c)) == c` exactly.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_complex::Complex;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::element::{hwp_matrix, BsConvention, Diagonal, Element};
use crate::state::{Label, PathId, Polarization};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} error at line {line}, column {column}: {message}")]
pub struct NetlistError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
        })
    }
}

/// Parsed netlist with enough bookkeeping to point diagnostics at lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub text: String,
    pub circuit: Circuit,
    /// Source line of each element, in the circuit's (sorted) element order.
    pub element_lines: Vec<usize>,
    pub detector_lines: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let col = |byte: usize| code[..byte].chars().count() + 1;
    for (i, ch) in code.char_indices() {
        if ch.is_whitespace() || ch == '{' || ch == '}' {
            if let Some(s) = start.take() {
                out.push(Token { text: &code[s..i], column: col(s) });
            }
            if ch == '{' || ch == '}' {
                out.push(Token { text: &code[i..i + 1], column: col(i) });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &code[s..], column: col(s) });
    }
    out
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> Line<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> NetlistError {
        NetlistError { kind: ErrorKind::Syntax, line: self.number, column, message: message.into() }
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>, NetlistError> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| self.err(self.end_column, format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn keyword(&mut self, word: &str) -> Result<(), NetlistError> {
        let t = self.next(&format!("`{word}`"))?;
        if t.text != word {
            return Err(self.err(t.column, format!("expected `{word}`, found `{}`", t.text)));
        }
        Ok(())
    }

    fn port(&mut self) -> Result<PathId, NetlistError> {
        let t = self.next("port name")?;
        check_name(t.text).map_err(|m| self.err(t.column, m))?;
        Ok(PathId::from(t.text))
    }

    fn real(&mut self, what: &str) -> Result<f64, NetlistError> {
        let t = self.next(what)?;
        parse_real(t.text).ok_or_else(|| self.err(t.column, format!("expected {what}, found `{}`", t.text)))
    }

    fn int(&mut self, what: &str) -> Result<i64, NetlistError> {
        let t = self.next(what)?;
        parse_int(t.text).ok_or_else(|| self.err(t.column, format!("expected {what}, found `{}`", t.text)))
    }

    fn label(&mut self) -> Result<Label, NetlistError> {
        let t = self.next("label")?;
        parse_label(t.text).ok_or_else(|| self.err(t.column, format!("invalid label `{}`", t.text)))
    }

    fn table(&mut self) -> Result<BTreeMap<Label, PathId>, NetlistError> {
        let open = self.next("`{`")?;
        if open.text != "{" {
            return Err(self.err(open.column, format!("expected `{{`, found `{}`", open.text)));
        }
        let mut table = BTreeMap::new();
        loop {
            let t = self.next("`label:port` or `}`")?;
            if t.text == "}" {
                break;
            }
            let (l, p) = t.text.split_once(':').ok_or_else(|| self.err(t.column, format!("expected `label:port`, found `{}`", t.text)))?;
            let label = parse_label(l).ok_or_else(|| self.err(t.column, format!("invalid label `{l}`")))?;
            check_name(p).map_err(|m| self.err(t.column + l.chars().count() + 1, m))?;
            if table.insert(label, PathId::from(p)).is_some() {
                return Err(NetlistError {
                    kind: ErrorKind::Semantic,
                    line: self.number,
                    column: t.column,
                    message: format!("label {label} listed twice"),
                });
            }
        }
        Ok(table)
    }

    fn finish(&self) -> Result<(), NetlistError> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(self.err(t.column, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }
}

fn check_name(s: &str) -> Result<(), String> {
    let mut chars = s.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
    if ok {
        Ok(())
    } else {
        Err(format!("invalid name `{s}`"))
    }
}

fn parse_real(s: &str) -> Option<f64> {
    let valid = s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
    if !valid {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_int(s: &str) -> Option<i64> {
    s.parse::<i64>().ok()
}

fn parse_label(s: &str) -> Option<Label> {
    match s {
        "H" => Some(Label::Pol(Polarization::H)),
        "V" => Some(Label::Pol(Polarization::V)),
        _ => parse_int(s).map(Label::Oam),
    }
}

enum Statement {
    Source(PathId),
    Element(Element),
    Detect(String, PathId),
}

fn statement(line: &mut Line<'_>) -> Result<Statement, NetlistError> {
    let head = line.next("statement")?;
    let st = match head.text {
        "source" => Statement::Source(line.port()?),
        "bs" => {
            let conv = line.next("beam splitter convention")?;
            let convention = match conv.text {
                "hadamard" => BsConvention::Hadamard,
                "symmetric" => BsConvention::Symmetric,
                other => return Err(line.err(conv.column, format!("unknown convention `{other}`"))),
            };
            let ratio = line.real("ratio")?;
            let a = line.port()?;
            let b = line.port()?;
            line.keyword("->")?;
            let c = line.port()?;
            let d = line.port()?;
            Statement::Element(Element::BeamSplitter { inputs: [a, b], outputs: [c, d], ratio, convention })
        }
        "phase" => {
            let port = line.port()?;
            Statement::Element(Element::PhaseShift { port, phi: line.real("phase")? })
        }
        "atten" => {
            let port = line.port()?;
            Statement::Element(Element::Attenuator { port, t: line.real("transmission")? })
        }
        "shift" => {
            let port = line.port()?;
            Statement::Element(Element::OamShift { port, delta: line.int("integer shift")? })
        }
        "sorter" => {
            let input = line.port()?;
            line.keyword("reject")?;
            let reject = line.port()?;
            Statement::Element(Element::Sorter { input, reject, table: line.table()? })
        }
        "merge" => {
            let output = line.port()?;
            line.keyword("reject")?;
            let reject = line.port()?;
            Statement::Element(Element::Merge { output, reject, table: line.table()? })
        }
        "hwp" => {
            let port = line.port()?;
            let t = line.next("`plus45` or `minus45`")?;
            let to = match t.text {
                "plus45" => Diagonal::Plus45,
                "minus45" => Diagonal::Minus45,
                other => return Err(line.err(t.column, format!("unknown wave plate setting `{other}`"))),
            };
            Statement::Element(crate::element::half_wave_plate(port, to))
        }
        "lunitary" => {
            let port = line.port()?;
            let l1 = line.label()?;
            let l2 = line.label()?;
            let mut v = [0.0; 8];
            for x in &mut v {
                *x = line.real("matrix entry")?;
            }
            let matrix = [
                [Complex::new(v[0], v[1]), Complex::new(v[2], v[3])],
                [Complex::new(v[4], v[5]), Complex::new(v[6], v[7])],
            ];
            Statement::Element(Element::LabelUnitary { port, labels: (l1, l2), matrix })
        }
        "detect" => {
            let t = line.next("detector name")?;
            check_name(t.text).map_err(|m| line.err(t.column, m))?;
            Statement::Detect(t.text.to_string(), line.port()?)
        }
        other => return Err(line.err(head.column, format!("unknown statement `{other}`"))),
    };
    line.finish()?;
    Ok(st)
}

/// Parses and validates a netlist.
pub fn parse_netlist(text: &str) -> Result<Netlist, NetlistError> {
    let mut sources: Vec<(PathId, usize)> = Vec::new();
    let mut elements: Vec<(Element, usize, usize)> = Vec::new();
    let mut detectors: Vec<(String, PathId, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let end_column = raw.chars().count() + 1;
        let mut line = Line { number: i + 1, tokens, pos: 0, end_column };
        let first_col = line.tokens[0].column;
        match statement(&mut line)? {
            Statement::Source(p) => sources.push((p, i + 1)),
            Statement::Element(e) => {
                if let Err(err) = e.validate() {
                    return Err(NetlistError { kind: ErrorKind::Semantic, line: i + 1, column: first_col, message: err.to_string() });
                }
                elements.push((e, i + 1, first_col));
            }
            Statement::Detect(name, p) => detectors.push((name, p, i + 1)),
        }
    }

    let list: Vec<Element> = elements.iter().map(|(e, _, _)| e.clone()).collect();
    let circuit = Circuit::new(
        sources.iter().map(|(p, _)| p.clone()),
        list,
        detectors.iter().map(|(n, p, _)| (n.clone(), p.clone())),
    )
    .map_err(|err| semantic(&err, &sources, &elements, &detectors))?;

    let mut used = vec![false; elements.len()];
    let element_lines = circuit
        .elements()
        .iter()
        .map(|e| {
            let k = (0..elements.len()).find(|&k| !used[k] && &elements[k].0 == e).unwrap_or(0);
            if let Some(u) = used.get_mut(k) {
                *u = true;
            }
            elements.get(k).map_or(0, |x| x.1)
        })
        .collect();
    let detector_lines = detectors.iter().map(|(n, _, l)| (n.clone(), *l)).collect();

    Ok(Netlist { text: text.to_string(), circuit, element_lines, detector_lines })
}

/// Convenience wrapper returning only the circuit.
pub fn parse(text: &str) -> Result<Circuit, NetlistError> {
    parse_netlist(text).map(|n| n.circuit)
}

fn semantic(
    err: &CircuitError,
    sources: &[(PathId, usize)],
    elements: &[(Element, usize, usize)],
    detectors: &[(String, PathId, usize)],
) -> NetlistError {
    let (line, column) = match err.element() {
        Some(i) => elements.get(i).map_or((0, 1), |(_, l, c)| (*l, *c)),
        None => {
            let line = match err {
                CircuitError::DuplicateDetector { name } => detectors.iter().rev().find(|d| &d.0 == name).map(|d| d.2),
                CircuitError::DuplicatePort { port, .. } => sources.iter().rev().find(|s| &s.0 == port).map(|s| s.1),
                CircuitError::PortConsumedTwice { port, .. } | CircuitError::UnknownPort { port, .. } => {
                    detectors.iter().rev().find(|d| &d.1 == port).map(|d| d.2)
                }
                _ => None,
            };
            (line.unwrap_or(0), 1)
        }
    };
    NetlistError { kind: ErrorKind::Semantic, line, column, message: err.to_string() }
}

fn real(x: f64) -> String {
    format!("{x:?}")
}

fn table_text(table: &BTreeMap<Label, PathId>) -> String {
    let items: Vec<String> = table.iter().map(|(l, p)| format!("{l}:{p}")).collect();
    format!("{{ {} }}", items.join(" "))
}

/// Canonical text of a circuit.
pub fn emit(circuit: &Circuit) -> String {
    let mut out = String::new();
    for s in circuit.sources() {
        writeln!(out, "source {s}").unwrap();
    }
    for e in circuit.elements() {
        match e {
            Element::BeamSplitter { inputs, outputs, ratio, convention } => writeln!(
                out,
                "bs {convention} {} {} {} -> {} {}",
                real(*ratio),
                inputs[0],
                inputs[1],
                outputs[0],
                outputs[1]
            ),
            Element::PhaseShift { port, phi } => writeln!(out, "phase {port} {}", real(*phi)),
            Element::Attenuator { port, t } => writeln!(out, "atten {port} {}", real(*t)),
            Element::OamShift { port, delta } => writeln!(out, "shift {port} {delta}"),
            Element::Sorter { input, reject, table } => {
                writeln!(out, "sorter {input} reject {reject} {}", table_text(table))
            }
            Element::Merge { output, reject, table } => {
                writeln!(out, "merge {output} reject {reject} {}", table_text(table))
            }
            Element::LabelUnitary { port, labels, matrix } => {
                let hv = (Label::Pol(Polarization::H), Label::Pol(Polarization::V));
                let preset = [Diagonal::Plus45, Diagonal::Minus45]
                    .into_iter()
                    .find(|d| *labels == hv && *matrix == hwp_matrix::<f64>(*d));
                match preset {
                    Some(d) => writeln!(out, "hwp {port} {d}"),
                    None => {
                        let m: Vec<String> =
                            matrix.iter().flatten().flat_map(|z| [real(z.re), real(z.im)]).collect();
                        writeln!(out, "lunitary {port} {} {} {}", labels.0, labels.1, m.join(" "))
                    }
                }
            }
        }
        .unwrap();
    }
    for (name, port) in circuit.detectors() {
        writeln!(out, "detect {name} {port}").unwrap();
    }
    out
}
