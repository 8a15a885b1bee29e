// SPDX-License-Identifier: Apache-2.0
//! Generic Liberty group/attribute syntax.

use super::LibertyError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Stmt {
    Group { name: String, args: Vec<String>, body: Vec<Stmt>, line: usize },
    Simple { name: String, value: String, line: usize },
    Complex { name: String, args: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Sym(char),
    Eof,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric()
        || matches!(c, '_' | '.' | '-' | '+' | '[' | ']' | '<' | '>' | '!' | '\'' | '&' | '|' | '*' | '^')
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, LibertyError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        let (line, col) = (lx.line, lx.col);
        let Some(&c) = lx.chars.peek() else {
            out.push((Tok::Eof, line, col));
            return Ok(out);
        };
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        if c == '\\' {
            // line continuation
            lx.bump();
            continue;
        }
        if c == '/' {
            lx.bump();
            match lx.chars.peek() {
                Some('*') => {
                    lx.bump();
                    let mut prev = '\0';
                    loop {
                        match lx.bump() {
                            None => return Err(LibertyError::Syntax { line, col, msg: "unterminated comment".into() }),
                            Some('/') if prev == '*' => break,
                            Some(ch) => prev = ch,
                        }
                    }
                }
                Some('/') => {
                    while lx.chars.peek().is_some_and(|&ch| ch != '\n') {
                        lx.bump();
                    }
                }
                _ => return Err(LibertyError::Syntax { line, col, msg: "unexpected `/`".into() }),
            }
            continue;
        }
        if c == '"' {
            lx.bump();
            let mut s = String::new();
            loop {
                match lx.bump() {
                    None => return Err(LibertyError::Syntax { line, col, msg: "unterminated string".into() }),
                    Some('"') => break,
                    Some('\\') => {
                        // continuation inside a quoted table row
                        if lx.chars.peek() == Some(&'\n') {
                            lx.bump();
                        } else {
                            s.push('\\');
                        }
                    }
                    Some(ch) => s.push(ch),
                }
            }
            out.push((Tok::Str(s), line, col));
            continue;
        }
        if matches!(c, '(' | ')' | '{' | '}' | ':' | ';' | ',') {
            lx.bump();
            out.push((Tok::Sym(c), line, col));
            continue;
        }
        if is_word_char(c) {
            let mut s = String::new();
            while let Some(&ch) = lx.chars.peek() {
                if !is_word_char(ch) {
                    break;
                }
                s.push(ch);
                lx.bump();
            }
            out.push((Tok::Word(s), line, col));
            continue;
        }
        return Err(LibertyError::Syntax { line, col, msg: format!("unexpected character `{c}`") });
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> (Tok, usize, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> LibertyError {
        let (_, line, col) = self.toks[self.pos];
        LibertyError::Syntax { line, col, msg: msg.into() }
    }

    fn stmt(&mut self) -> Result<Stmt, LibertyError> {
        let (tok, line, _) = self.next();
        let name = match tok {
            Tok::Word(w) => w,
            other => {
                self.pos -= 1;
                return Err(self.err(format!("expected attribute or group name, found {}", describe(&other))));
            }
        };
        match self.peek().clone() {
            Tok::Sym(':') => {
                self.next();
                let mut parts = Vec::new();
                while let Tok::Word(w) | Tok::Str(w) = self.peek().clone() {
                    self.next();
                    parts.push(w);
                }
                if parts.is_empty() {
                    return Err(self.err(format!("missing value for attribute `{name}`")));
                }
                if *self.peek() == Tok::Sym(';') {
                    self.next();
                }
                Ok(Stmt::Simple { name, value: parts.join(" "), line })
            }
            Tok::Sym('(') => {
                self.next();
                let mut args = Vec::new();
                loop {
                    match self.peek().clone() {
                        Tok::Sym(')') => {
                            self.next();
                            break;
                        }
                        Tok::Sym(',') => {
                            self.next();
                        }
                        Tok::Word(w) | Tok::Str(w) => {
                            self.next();
                            args.push(w);
                        }
                        other => return Err(self.err(format!("unexpected {} in argument list", describe(&other)))),
                    }
                }
                if *self.peek() == Tok::Sym('{') {
                    self.next();
                    let mut body = Vec::new();
                    while *self.peek() != Tok::Sym('}') {
                        if *self.peek() == Tok::Eof {
                            return Err(self.err(format!("unterminated group `{name}`")));
                        }
                        body.push(self.stmt()?);
                    }
                    self.next();
                    if *self.peek() == Tok::Sym(';') {
                        self.next();
                    }
                    Ok(Stmt::Group { name, args, body, line })
                } else {
                    if *self.peek() == Tok::Sym(';') {
                        self.next();
                    }
                    Ok(Stmt::Complex { name, args })
                }
            }
            other => Err(self.err(format!("expected `:` or `(` after `{name}`, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parse the whole text into its top-level statement (normally `library`).
pub(crate) fn parse(text: &str) -> Result<Stmt, LibertyError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let top = p.stmt()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err("trailing input after top-level group"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_and_attributes() {
        let s = parse("library(x) { /* c */ time_unit : \"1ns\" ; cap(1, ff) ; cell(A) { area : 1.5 ; } }").unwrap();
        let Stmt::Group { name, args, body, .. } = s else { panic!() };
        assert_eq!((name.as_str(), args), ("library", vec!["x".to_string()]));
        assert_eq!(body.len(), 3);
        assert_eq!(body[1], Stmt::Complex { name: "cap".into(), args: vec!["1".into(), "ff".into()] });
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("library(x) {\n  cell(A) {\n    area 3 ;\n  }\n}").unwrap_err();
        assert_eq!(
            err,
            LibertyError::Syntax { line: 3, col: 10, msg: "expected `:` or `(` after `area`, found `3`".into() }
        );
    }

    #[test]
    fn continuation_in_strings() {
        let s = parse("library(x) { values(\"1, 2\", \\\n \"3, 4\"); }").unwrap();
        let Stmt::Group { body, .. } = s else { panic!() };
        assert_eq!(body[0], Stmt::Complex { name: "values".into(), args: vec!["1, 2".into(), "3, 4".into()] });
    }
}
