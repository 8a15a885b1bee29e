// SPDX-License-Identifier: Apache-2.0
//! Liberty boolean function strings.
//!
//! Precedence, tightest first: `!`/postfix `'`, AND (`&`, `*`, or
//! juxtaposition), XOR (`^`), OR (`|`, `+`).

use std::fmt;

use crate::logic::Logic;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    Var(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Xor(Box<BoolExpr>, Box<BoolExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("function `{text}`, offset {offset}: {msg}")]
    Syntax { text: String, offset: usize, msg: String },
    #[error("unbound identifier `{0}`")]
    Unbound(String),
}

impl BoolExpr {
    pub fn var(name: impl Into<String>) -> Self {
        BoolExpr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn xor(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Xor(Box::new(a), Box::new(b))
    }

    pub fn parse(text: &str) -> Result<Self, ExprError> {
        let toks = tokenize(text)?;
        let mut p = ExprParser { text, toks, pos: 0 };
        let e = p.or()?;
        if p.pos != p.toks.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Distinct identifiers in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &BoolExpr, out: &mut Vec<String>) {
            match e {
                BoolExpr::Const(_) => {}
                BoolExpr::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                BoolExpr::Not(a) => walk(a, out),
                BoolExpr::And(a, b) | BoolExpr::Or(a, b) | BoolExpr::Xor(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Rename identifiers; names absent from `map` are kept.
    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> BoolExpr {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Var(v) => BoolExpr::Var(map(v).unwrap_or_else(|| v.clone())),
            BoolExpr::Not(a) => BoolExpr::not(a.rename(map)),
            BoolExpr::And(a, b) => BoolExpr::and(a.rename(map), b.rename(map)),
            BoolExpr::Or(a, b) => BoolExpr::or(a.rename(map), b.rename(map)),
            BoolExpr::Xor(a, b) => BoolExpr::xor(a.rename(map), b.rename(map)),
        }
    }

    /// Kleene three-valued evaluation.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Logic>) -> Result<Logic, ExprError> {
        Ok(match self {
            BoolExpr::Const(b) => Logic::from_bool(*b),
            BoolExpr::Var(v) => lookup(v).ok_or_else(|| ExprError::Unbound(v.clone()))?,
            BoolExpr::Not(a) => a.eval(lookup)?.not(),
            BoolExpr::And(a, b) => a.eval(lookup)?.and(b.eval(lookup)?),
            BoolExpr::Or(a, b) => a.eval(lookup)?.or(b.eval(lookup)?),
            BoolExpr::Xor(a, b) => a.eval(lookup)?.xor(b.eval(lookup)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(..) => 1,
            BoolExpr::Xor(..) => 2,
            BoolExpr::And(..) => 3,
            BoolExpr::Not(_) => 4,
            BoolExpr::Const(_) | BoolExpr::Var(_) => 5,
        }
    }

    /// Compile against a fixed variable order for repeated evaluation.
    pub fn compile(&self, vars: &[&str]) -> Result<Program, ExprError> {
        fn emit(e: &BoolExpr, vars: &[&str], ops: &mut Vec<Op>) -> Result<(), ExprError> {
            match e {
                BoolExpr::Const(b) => ops.push(Op::Const(Logic::from_bool(*b))),
                BoolExpr::Var(v) => {
                    let i = vars.iter().position(|x| x == v).ok_or_else(|| ExprError::Unbound(v.clone()))?;
                    ops.push(Op::Load(i as u16));
                }
                BoolExpr::Not(a) => {
                    emit(a, vars, ops)?;
                    ops.push(Op::Not);
                }
                BoolExpr::And(a, b) | BoolExpr::Or(a, b) | BoolExpr::Xor(a, b) => {
                    emit(a, vars, ops)?;
                    emit(b, vars, ops)?;
                    ops.push(match e {
                        BoolExpr::And(..) => Op::And,
                        BoolExpr::Or(..) => Op::Or,
                        _ => Op::Xor,
                    });
                }
            }
            Ok(())
        }
        let mut ops = Vec::new();
        emit(self, vars, &mut ops)?;
        Ok(Program { ops })
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, parent: u8, c: &BoolExpr, right: bool) -> fmt::Result {
            let p = c.precedence();
            if p < parent || (right && p == parent) {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        let prec = self.precedence();
        match self {
            BoolExpr::Const(b) => write!(f, "{}", u8::from(*b)),
            BoolExpr::Var(v) => f.write_str(v),
            BoolExpr::Not(a) => {
                f.write_str("!")?;
                child(f, prec, a, false)
            }
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) | BoolExpr::Xor(a, b) => {
                let op = match self {
                    BoolExpr::And(..) => "&",
                    BoolExpr::Or(..) => "|",
                    _ => "^",
                };
                child(f, prec, a, false)?;
                write!(f, "{op}")?;
                child(f, prec, b, true)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Load(u16),
    Const(Logic),
    Not,
    And,
    Or,
    Xor,
}

/// A postfix evaluation program over indexed inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    ops: Vec<Op>,
}

impl Program {
    pub fn eval(&self, inputs: &[Logic]) -> Logic {
        let mut stack: eval_stack::Stack = Default::default();
        for op in &self.ops {
            match *op {
                Op::Load(i) => stack.push(inputs[i as usize]),
                Op::Const(v) => stack.push(v),
                Op::Not => {
                    let a = stack.pop();
                    stack.push(a.not());
                }
                Op::And | Op::Or | Op::Xor => {
                    let b = stack.pop();
                    let a = stack.pop();
                    stack.push(match op {
                        Op::And => a.and(b),
                        Op::Or => a.or(b),
                        _ => a.xor(b),
                    });
                }
            }
        }
        stack.pop()
    }
}

mod eval_stack {
    use crate::logic::Logic;

    /// Evaluation stack that stays on the machine stack for typical cell functions.
    #[derive(Default)]
    pub struct Stack {
        inline: [Logic; 16],
        len: usize,
        spill: Vec<Logic>,
    }

    impl Stack {
        pub fn push(&mut self, v: Logic) {
            if self.len < self.inline.len() {
                self.inline[self.len] = v;
            } else {
                self.spill.push(v);
            }
            self.len += 1;
        }

        pub fn pop(&mut self) -> Logic {
            self.len -= 1;
            if self.len >= self.inline.len() {
                self.spill.pop().expect("spilled value")
            } else {
                self.inline[self.len]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ETok {
    Ident(String),
    Const(bool),
    Not,
    Prime,
    And,
    Or,
    Xor,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(ETok, usize)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => ETok::Not,
            '\'' => ETok::Prime,
            '&' | '*' => ETok::And,
            '|' | '+' => ETok::Or,
            '^' => ETok::Xor,
            '(' => ETok::LParen,
            ')' => ETok::RParen,
            '0' | '1' if !chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_') => {
                ETok::Const(c == '1')
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((ETok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            _ => {
                return Err(ExprError::Syntax {
                    text: text.into(),
                    offset: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

struct ExprParser<'a> {
    text: &'a str,
    toks: Vec<(ETok, usize)>,
    pos: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&ETok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn err(&self, msg: &str) -> ExprError {
        let offset = self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.text.len());
        ExprError::Syntax { text: self.text.into(), offset, msg: msg.into() }
    }

    fn or(&mut self) -> Result<BoolExpr, ExprError> {
        let mut lhs = self.xor()?;
        while self.peek() == Some(&ETok::Or) {
            self.pos += 1;
            lhs = BoolExpr::or(lhs, self.xor()?);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<BoolExpr, ExprError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&ETok::Xor) {
            self.pos += 1;
            lhs = BoolExpr::xor(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<BoolExpr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(ETok::And) => {
                    self.pos += 1;
                    lhs = BoolExpr::and(lhs, self.unary()?);
                }
                // juxtaposition
                Some(ETok::Ident(_) | ETok::Const(_) | ETok::Not | ETok::LParen) => {
                    lhs = BoolExpr::and(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<BoolExpr, ExprError> {
        if self.peek() == Some(&ETok::Not) {
            self.pos += 1;
            return Ok(BoolExpr::not(self.unary()?));
        }
        let mut e = self.primary()?;
        while self.peek() == Some(&ETok::Prime) {
            self.pos += 1;
            e = BoolExpr::not(e);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<BoolExpr, ExprError> {
        match self.peek().cloned() {
            Some(ETok::Ident(s)) => {
                self.pos += 1;
                Ok(BoolExpr::Var(s))
            }
            Some(ETok::Const(b)) => {
                self.pos += 1;
                Ok(BoolExpr::Const(b))
            }
            Some(ETok::LParen) => {
                self.pos += 1;
                let e = self.or()?;
                if self.peek() != Some(&ETok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.err("expected operand")),
        }
    }
}
