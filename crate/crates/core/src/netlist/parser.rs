// SPDX-License-Identifier: Apache-2.0
//! Structural Verilog subset reader.
//!
//! Accepted: a single `module` with ANSI or non-ANSI port declarations,
//! `input`/`output`/`wire` declarations with optional `[msb:lsb]` ranges,
//! `(* role = "clock" *)` attributes on inputs, named-connection
//! instantiations, and `assign` of `1'b0`/`1'b1` or another net.

use indexmap::IndexMap;

use super::{Direction, GateKind, Instance, InstanceKind, Netlist, PortDecl, PortRole};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unsupported construct `{construct}`")]
    Unsupported { line: usize, col: usize, construct: String },
    #[error("{line}:{col}: duplicate declaration of `{name}`")]
    Duplicate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: undeclared net `{name}`")]
    Undeclared { line: usize, col: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(i64),
    /// Sized or unsized based literal, e.g. `1'b0`.
    Literal(String),
    Str(String),
    Sym(&'static str),
    /// Character outside the structural subset; reported when reached.
    Other(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 15] = ["(*", "*)", "(", ")", "[", "]", ":", ";", ",", ".", "=", "#", "@", "{", "}"];

const UNSUPPORTED_KEYWORDS: [&str; 18] = [
    "always",
    "initial",
    "reg",
    "inout",
    "parameter",
    "localparam",
    "generate",
    "function",
    "task",
    "integer",
    "genvar",
    "supply0",
    "supply1",
    "tri",
    "logic",
    "defparam",
    "specify",
    "primitive",
];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::Syntax { line: l0, col: c0, msg: "unterminated comment".into() });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let (tl, tc) = (line, col);
        if c == '`' {
            return Err(ParseError::Unsupported { line: tl, col: tc, construct: "compiler directive".into() });
        }
        if c == '"' {
            bump!();
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                bump!();
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(ParseError::Syntax { line: tl, col: tc, msg: "unterminated string".into() });
            }
            let s: String = chars[start..i].iter().collect();
            bump!();
            out.push(Token { tok: Tok::Str(s), line: tl, col: tc });
            continue;
        }
        if c == '\\' {
            bump!();
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                bump!();
            }
            if start == i {
                return Err(ParseError::Syntax { line: tl, col: tc, msg: "empty escaped identifier".into() });
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                bump!();
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_digit() || c == '\'' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '_') {
                bump!();
            }
            if i < chars.len() && chars[i] == '\'' {
                bump!();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    bump!();
                }
                out.push(Token { tok: Tok::Literal(chars[start..i].iter().collect()), line: tl, col: tc });
            } else {
                let s: String = chars[start..i].iter().filter(|c| **c != '_').collect();
                let n = s.parse().map_err(|_| ParseError::Syntax {
                    line: tl,
                    col: tc,
                    msg: format!("bad number `{s}`"),
                })?;
                out.push(Token { tok: Tok::Number(n), line: tl, col: tc });
            }
            continue;
        }
        if let Some(sym) = SYMBOLS.iter().find(|s| {
            let sc: Vec<char> = s.chars().collect();
            chars[i..].starts_with(&sc)
        }) {
            for _ in 0..sym.len() {
                bump!();
            }
            out.push(Token { tok: Tok::Sym(sym), line: tl, col: tc });
            continue;
        }
        bump!();
        out.push(Token { tok: Tok::Other(c), line: tl, col: tc });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// A connection or assignment target before resolution.
struct NetRef {
    name: String,
    index: Option<i64>,
    line: usize,
    col: usize,
}

enum Pending {
    Instance(Instance, Vec<(String, NetRef)>),
    Assign { lhs: NetRef, rhs: AssignRhs },
}

enum AssignRhs {
    Const(bool),
    Net(NetRef),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == kw)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`, found {}", describe(&self.peek().tok))))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                if UNSUPPORTED_KEYWORDS.contains(&s.as_str()) {
                    return Err(ParseError::Unsupported { line: t.line, col: t.col, construct: s });
                }
                self.next();
                Ok((s, t.line, t.col))
            }
            other => Err(self.err(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn number(&mut self) -> Result<i64, ParseError> {
        match self.peek().tok.clone() {
            Tok::Number(n) => {
                self.next();
                Ok(n)
            }
            other => Err(self.err(format!("expected number, found {}", describe(&other)))),
        }
    }

    fn opt_range(&mut self) -> Result<Option<(i64, i64)>, ParseError> {
        if !self.is_sym("[") {
            return Ok(None);
        }
        self.next();
        let msb = self.number()?;
        self.expect_sym(":")?;
        let lsb = self.number()?;
        self.expect_sym("]")?;
        Ok(Some((msb, lsb)))
    }

    /// `(* role = "clock" *)`; other attributes are rejected.
    fn opt_attr(&mut self) -> Result<Option<PortRole>, ParseError> {
        if !self.is_sym("(*") {
            return Ok(None);
        }
        self.next();
        let (key, line, col) = self.ident()?;
        if key != "role" {
            return Err(ParseError::Unsupported { line, col, construct: format!("attribute {key}") });
        }
        self.expect_sym("=")?;
        let t = self.next();
        let value = match t.tok {
            Tok::Ident(s) | Tok::Str(s) => s,
            other => {
                return Err(ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: format!("bad role {}", describe(&other)),
                })
            }
        };
        let role = match value.as_str() {
            "clock" => PortRole::Clock,
            "reset" => PortRole::Reset,
            "data" => PortRole::Data,
            _ => return Err(ParseError::Syntax { line: t.line, col: t.col, msg: format!("unknown role `{value}`") }),
        };
        self.expect_sym("*)")?;
        Ok(Some(role))
    }

    fn net_ref(&mut self) -> Result<NetRef, ParseError> {
        let (name, line, col) = self.ident()?;
        let index = if self.is_sym("[") {
            self.next();
            let i = self.number()?;
            if self.is_sym(":") {
                return Err(ParseError::Unsupported { line, col, construct: "part-select".into() });
            }
            self.expect_sym("]")?;
            Some(i)
        } else {
            None
        };
        Ok(NetRef { name, index, line, col })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(n) => format!("`{n}`"),
        Tok::Literal(s) => format!("`{s}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Other(c) => format!("unexpected character `{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn const_literal(lit: &str) -> Option<bool> {
    let (size, rest) = lit.split_once('\'')?;
    if !size.is_empty() && size != "1" {
        return None;
    }
    let mut it = rest.chars();
    let base = it.next()?.to_ascii_lowercase();
    if !matches!(base, 'b' | 'h' | 'd' | 'o') {
        return None;
    }
    match it.as_str() {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

struct Decls {
    netlist: Netlist,
    /// Header port order for non-ANSI modules, with whether a direction was seen.
    header: Vec<(String, bool)>,
    /// Vector wire bases and ranges for bit-select resolution.
    vectors: IndexMap<String, (i64, i64)>,
}

impl Decls {
    fn declare_port(
        &mut self,
        name: String,
        direction: Direction,
        range: Option<(i64, i64)>,
        role: PortRole,
        line: usize,
        col: usize,
    ) -> Result<(), ParseError> {
        let port = PortDecl { name: name.clone(), direction, range, role };
        if self.vectors.contains_key(&name) || self.netlist.nets.contains(&name) {
            return Err(ParseError::Duplicate { line, col, name });
        }
        self.netlist.add_port(port).map_err(|_| ParseError::Duplicate { line, col, name: name.clone() })?;
        if let Some(r) = range {
            self.vectors.insert(name, r);
        }
        Ok(())
    }

    fn declare_wire(
        &mut self,
        name: String,
        range: Option<(i64, i64)>,
        line: usize,
        col: usize,
    ) -> Result<(), ParseError> {
        let dup = || ParseError::Duplicate { line, col, name: name.clone() };
        if self.vectors.contains_key(&name) || self.netlist.port(&name).is_some() {
            return Err(dup());
        }
        match range {
            None => self.netlist.add_net(name.clone()).map_err(|_| dup())?,
            Some(r) => {
                let bits =
                    PortDecl { name: name.clone(), direction: Direction::Input, range: Some(r), role: PortRole::Data }
                        .bit_names();
                for b in bits {
                    self.netlist.add_net(b).map_err(|_| dup())?;
                }
                self.vectors.insert(name.clone(), r);
            }
        }
        Ok(())
    }

    fn resolve(&self, r: &NetRef) -> Result<String, ParseError> {
        let undeclared = |name: String| ParseError::Undeclared { line: r.line, col: r.col, name };
        match r.index {
            None => {
                if self.netlist.nets.contains(&r.name) {
                    Ok(r.name.clone())
                } else if let Some((msb, lsb)) = self.vectors.get(&r.name) {
                    if msb == lsb {
                        Ok(format!("{}[{}]", r.name, msb))
                    } else {
                        Err(ParseError::Unsupported {
                            line: r.line,
                            col: r.col,
                            construct: format!("vector connection `{}` (connect individual bits)", r.name),
                        })
                    }
                } else {
                    Err(undeclared(r.name.clone()))
                }
            }
            Some(i) => {
                let bit = format!("{}[{}]", r.name, i);
                if self.netlist.nets.contains(&bit) {
                    Ok(bit)
                } else {
                    Err(undeclared(bit))
                }
            }
        }
    }
}

/// Parse a single flat module in the structural subset into a bit-blasted [`Netlist`].
pub fn parse_structural_verilog(text: &str) -> Result<Netlist, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let (kw, line, col) = p.ident()?;
    if kw != "module" {
        return Err(ParseError::Syntax { line, col, msg: format!("expected `module`, found `{kw}`") });
    }
    let (name, _, _) = p.ident()?;
    let mut d = Decls { netlist: Netlist::new(name), header: Vec::new(), vectors: IndexMap::new() };

    if p.is_sym("#") {
        let t = p.peek().clone();
        return Err(ParseError::Unsupported { line: t.line, col: t.col, construct: "parameter".into() });
    }
    if p.is_sym("(") {
        p.next();
        parse_header(&mut p, &mut d)?;
        p.expect_sym(")")?;
    }
    p.expect_sym(";")?;

    let mut pending = Vec::new();
    loop {
        let role = p.opt_attr()?;
        let t = p.peek().clone();
        let word = match &t.tok {
            Tok::Ident(w) => w.clone(),
            Tok::Eof => return Err(p.err("missing `endmodule`")),
            other => return Err(p.err(format!("unexpected {}", describe(other)))),
        };
        match word.as_str() {
            "endmodule" => {
                p.next();
                break;
            }
            "input" | "output" => {
                p.next();
                let dir = if word == "input" { Direction::Input } else { Direction::Output };
                if p.is_kw("wire") {
                    p.next();
                }
                let range = p.opt_range()?;
                loop {
                    let (pname, l, c) = p.ident()?;
                    let has_header = !d.header.is_empty();
                    match d.header.iter_mut().find(|(n, _)| *n == pname) {
                        Some(s) => s.1 = true,
                        None if has_header => {
                            return Err(ParseError::Syntax {
                                line: l,
                                col: c,
                                msg: format!("`{pname}` is not in the port list"),
                            })
                        }
                        None => {}
                    }
                    if dir == Direction::Output && role.is_some_and(|r| r != PortRole::Data) {
                        return Err(ParseError::Syntax { line: l, col: c, msg: "role attribute on output".into() });
                    }
                    d.declare_port(pname, dir, range, role.unwrap_or_default(), l, c)?;
                    if p.is_sym(",") {
                        p.next();
                    } else {
                        break;
                    }
                }
                p.expect_sym(";")?;
            }
            "wire" => {
                p.next();
                let range = p.opt_range()?;
                loop {
                    let (wname, l, c) = p.ident()?;
                    if p.is_sym("=") {
                        return Err(ParseError::Unsupported {
                            line: l,
                            col: c,
                            construct: "net declaration assignment".into(),
                        });
                    }
                    d.declare_wire(wname, range, l, c)?;
                    if p.is_sym(",") {
                        p.next();
                    } else {
                        break;
                    }
                }
                p.expect_sym(";")?;
            }
            "assign" => {
                p.next();
                let lhs = p.net_ref()?;
                p.expect_sym("=")?;
                let t = p.next();
                let rhs = match t.tok {
                    Tok::Literal(ref lit) => match const_literal(lit) {
                        Some(b) => AssignRhs::Const(b),
                        None => {
                            return Err(ParseError::Unsupported {
                                line: t.line,
                                col: t.col,
                                construct: format!("literal `{lit}`"),
                            })
                        }
                    },
                    Tok::Ident(_) => {
                        p.pos -= 1;
                        AssignRhs::Net(p.net_ref()?)
                    }
                    other => {
                        return Err(ParseError::Syntax {
                            line: t.line,
                            col: t.col,
                            msg: format!("unexpected {}", describe(&other)),
                        })
                    }
                };
                if !p.is_sym(";") {
                    let t = p.peek().clone();
                    return Err(ParseError::Unsupported {
                        line: t.line,
                        col: t.col,
                        construct: "assign expression".into(),
                    });
                }
                p.next();
                pending.push(Pending::Assign { lhs, rhs });
            }
            "module" => {
                return Err(ParseError::Unsupported { line: t.line, col: t.col, construct: "multiple modules".into() })
            }
            _ => {
                if role.is_some() {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        msg: "role attribute on instance".into(),
                    });
                }
                pending.push(parse_instance(&mut p)?);
            }
        }
    }
    if !matches!(p.peek().tok, Tok::Eof) {
        let t = p.peek().clone();
        if matches!(&t.tok, Tok::Ident(w) if w == "module") {
            return Err(ParseError::Unsupported { line: t.line, col: t.col, construct: "multiple modules".into() });
        }
        return Err(p.err("trailing input after `endmodule`"));
    }
    if let Some((missing, _)) = d.header.iter().find(|(_, seen)| !seen) {
        return Err(ParseError::Syntax { line: 1, col: 1, msg: format!("port `{missing}` has no direction") });
    }
    // Non-ANSI ports are ordered by the header, not by their declarations.
    if !d.header.is_empty() {
        let order: Vec<String> = d.header.iter().map(|(n, _)| n.clone()).collect();
        d.netlist.ports.sort_by_key(|port| order.iter().position(|n| *n == port.name));
    }

    let mut assign_slots = Vec::new();
    for item in pending {
        match item {
            Pending::Instance(mut inst, conns) => {
                if d.netlist.instance(&inst.name).is_some() {
                    let (line, col) = conns.first().map(|(_, r)| (r.line, r.col)).unwrap_or((0, 0));
                    return Err(ParseError::Duplicate { line, col, name: inst.name });
                }
                for (pin, r) in conns {
                    let net = d.resolve(&r)?;
                    if inst.pins.insert(pin.clone(), net).is_some() {
                        return Err(ParseError::Duplicate {
                            line: r.line,
                            col: r.col,
                            name: format!("{}.{}", inst.name, pin),
                        });
                    }
                }
                d.netlist.instances.push(inst);
            }
            Pending::Assign { lhs, rhs } => {
                let out = d.resolve(&lhs)?;
                let inst = match rhs {
                    AssignRhs::Const(b) => {
                        let g = if b { GateKind::Const1 } else { GateKind::Const0 };
                        Instance::gate(String::new(), g, [("Y", out.as_str())])
                    }
                    AssignRhs::Net(r) => {
                        let src = d.resolve(&r)?;
                        Instance::gate(String::new(), GateKind::Buf, [("A", src.as_str()), ("Y", out.as_str())])
                    }
                };
                assign_slots.push(d.netlist.instances.len());
                d.netlist.instances.push(inst);
            }
        }
    }
    let mut k = 0usize;
    for slot in assign_slots {
        let name = loop {
            let cand = format!("assign${k}");
            k += 1;
            if d.netlist.instance(&cand).is_none() {
                break cand;
            }
        };
        d.netlist.instances[slot].name = name;
    }
    Ok(d.netlist)
}

fn parse_header(p: &mut Parser, d: &mut Decls) -> Result<(), ParseError> {
    if p.is_sym(")") {
        return Ok(());
    }
    let ansi = p.is_sym("(*") || p.is_kw("input") || p.is_kw("output");
    if !ansi {
        loop {
            let (name, line, col) = p.ident()?;
            if d.header.iter().any(|(n, _)| *n == name) {
                return Err(ParseError::Duplicate { line, col, name });
            }
            d.header.push((name, false));
            if p.is_sym(",") {
                p.next();
            } else {
                return Ok(());
            }
        }
    }
    let mut current: Option<(Direction, Option<(i64, i64)>)> = None;
    loop {
        let role = p.opt_attr()?;
        if p.is_kw("input") || p.is_kw("output") {
            let (w, _, _) = p.ident()?;
            let dir = if w == "input" { Direction::Input } else { Direction::Output };
            if p.is_kw("wire") {
                p.next();
            }
            current = Some((dir, p.opt_range()?));
        }
        let Some((dir, range)) = current else {
            return Err(p.err("expected port direction"));
        };
        let (name, line, col) = p.ident()?;
        if dir == Direction::Output && role.is_some_and(|r| r != PortRole::Data) {
            return Err(ParseError::Syntax { line, col, msg: "role attribute on output".into() });
        }
        d.declare_port(name, dir, range, role.unwrap_or_default(), line, col)?;
        if p.is_sym(",") {
            p.next();
        } else {
            return Ok(());
        }
    }
}

fn parse_instance(p: &mut Parser) -> Result<Pending, ParseError> {
    let (type_name, _, _) = p.ident()?;
    if p.is_sym("#") {
        let t = p.peek().clone();
        return Err(ParseError::Unsupported { line: t.line, col: t.col, construct: "parameter override".into() });
    }
    let (inst_name, line, col) = p.ident()?;
    if p.is_sym("[") {
        return Err(ParseError::Unsupported { line, col, construct: "instance array".into() });
    }
    p.expect_sym("(")?;
    let mut conns = Vec::new();
    if !p.is_sym(")") {
        loop {
            if !p.is_sym(".") {
                let t = p.peek().clone();
                return Err(ParseError::Unsupported {
                    line: t.line,
                    col: t.col,
                    construct: "positional connection".into(),
                });
            }
            p.next();
            let (pin, _, _) = p.ident()?;
            p.expect_sym("(")?;
            if p.is_sym(")") {
                // unconnected pin
                p.next();
            } else {
                if let Tok::Literal(lit) = &p.peek().tok {
                    let t = p.peek().clone();
                    return Err(ParseError::Unsupported {
                        line: t.line,
                        col: t.col,
                        construct: format!("constant `{lit}` in port connection (use assign)"),
                    });
                }
                let r = p.net_ref()?;
                p.expect_sym(")")?;
                conns.push((pin, r));
            }
            if p.is_sym(",") {
                p.next();
            } else {
                break;
            }
        }
    }
    p.expect_sym(")")?;
    p.expect_sym(";")?;
    let kind = match GateKind::from_keyword(&type_name) {
        Some(g) => InstanceKind::Gate(g),
        None => InstanceKind::Cell(type_name),
    };
    Ok(Pending::Instance(Instance { name: inst_name, kind, pins: IndexMap::new() }, conns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gate_module() {
        let n = parse_structural_verilog("module t(input a, output y); not g1(.A(a), .Y(y)); endmodule").unwrap();
        assert_eq!(n.name, "t");
        assert_eq!(n.instances.len(), 1);
        assert_eq!(n.instances[0].kind, InstanceKind::Gate(GateKind::Not));
        let ports: Vec<_> = n.ports.iter().map(|p| (p.name.as_str(), p.direction, p.width())).collect();
        assert_eq!(ports, [("a", Direction::Input, 1), ("y", Direction::Output, 1)]);
    }

    #[test]
    fn vector_input_is_bit_blasted() {
        let n = parse_structural_verilog("module t(a, y);\n input [3:0] a;\n output y;\nendmodule").unwrap();
        assert_eq!(n.port("a").unwrap().width(), 4);
        for b in ["a[3]", "a[2]", "a[1]", "a[0]"] {
            assert!(n.nets.contains(b), "{b}");
        }
        assert_eq!(n.nets.len(), 5);
    }

    #[test]
    fn behavioral_code_is_rejected() {
        let err = parse_structural_verilog("module t(input clk, output y);\n always @(posedge clk) y <= 1; endmodule")
            .unwrap_err();
        match err {
            ParseError::Unsupported { construct, line, .. } => {
                assert_eq!(construct, "always");
                assert_eq!(line, 2);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn positional_connections_are_rejected() {
        let err = parse_structural_verilog("module t(input a, output y); not g1(y, a); endmodule").unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { ref construct, .. } if construct == "positional connection"));
    }

    #[test]
    fn duplicate_declarations() {
        let err = parse_structural_verilog("module t(input a, output y); wire a; endmodule").unwrap_err();
        assert!(matches!(err, ParseError::Duplicate { ref name, .. } if name == "a"));
        let err = parse_structural_verilog(
            "module t(input a, output y); wire n; not g(.A(a), .Y(n)); not g(.A(n), .Y(y)); endmodule",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Duplicate { ref name, .. } if name == "g"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err =
            parse_structural_verilog("module t(input a, output y);\n  not g1(.A(a) .Y(y));\nendmodule").unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => assert_eq!((line, col), (2, 16)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn constant_assigns_become_tie_gates() {
        let n = parse_structural_verilog(
            "module t(output y, output z); wire c1; assign c1 = 1'b0; assign z = 1'b1; buf b(.A(c1), .Y(y)); endmodule",
        )
        .unwrap();
        let kinds: Vec<_> = n.instances.iter().map(|i| (i.name.as_str(), i.kind.clone())).collect();
        assert_eq!(
            kinds,
            [
                ("assign$0", InstanceKind::Gate(GateKind::Const0)),
                ("assign$1", InstanceKind::Gate(GateKind::Const1)),
                ("b", InstanceKind::Gate(GateKind::Buf)),
            ]
        );
        assert_eq!(n.instances[0].pins["Y"], "c1");
    }

    #[test]
    fn undeclared_net_is_an_error() {
        let err = parse_structural_verilog("module t(input a, output y); not g(.A(b), .Y(y)); endmodule").unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { ref name, .. } if name == "b"));
        let err = parse_structural_verilog("module t(input [1:0] a, output y); not g(.A(a[2]), .Y(y)); endmodule")
            .unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { ref name, .. } if name == "a[2]"));
    }

    #[test]
    fn role_attributes_and_header_order() {
        let n = parse_structural_verilog(
            "module t(y, clk, d);\n (* role = \"clock\" *) input clk;\n input d;\n output y;\n dff r(.D(d), .CK(clk), .Q(y));\nendmodule",
        )
        .unwrap();
        let names: Vec<_> = n.ports.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["y", "clk", "d"]);
        assert_eq!(n.clock_port().unwrap().name, "clk");
    }

    #[test]
    fn escaped_identifiers_name_bits() {
        let n = parse_structural_verilog(
            "module t(input a, output y); wire \\w[3] ; buf b(.A(a), .Y(w[3])); buf c(.A(\\w[3] ), .Y(y)); endmodule",
        )
        .unwrap();
        assert!(n.nets.contains("w[3]"));
        assert_eq!(n.instances[1].pins["A"], "w[3]");
    }
}
