//! Concrete syntax for terms and open formulas, and the round-tripping
//! printer.
//!
//! The grammar has a single precedence level for binary term operators;
//! chains mixing different operators must be parenthesized. `-1` and `1/2`
//! are single tokens and must be written without internal whitespace.

use thiserror::Error;

use crate::formula::{
    normalize_formula, Atom, BinOp, Constant, OpenFormula, Rel, Signature, Term, UnaryOp,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: `{op}` is not in the `{sig}` language")]
    Signature {
        line: usize,
        col: usize,
        op: String,
        sig: Signature,
    },
}

impl ParseError {
    fn syntax(pos: (usize, usize), msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: pos.0,
            col: pos.1,
            msg: msg.into(),
        }
    }

    fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. } | ParseError::Signature { line, col, .. } => {
                (*line, *col)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(Constant),
    Minus,
    Tilde,
    Bin(BinOp),
    Rel(Rel),
    Amp,
    Pipe,
    Bang,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Const(c) => format!("`{}`", c.symbol()),
            Tok::Minus => "`-`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Bin(op) => format!("`{}`", op.symbol()),
            Tok::Rel(r) => format!("`{}`", r.symbol()),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    i: usize,
    line: usize,
    col: usize,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            i: 0,
            line,
            col: 1,
        }
    }

    fn peek(&self, off: usize) -> u8 {
        *self.src.get(self.i + off).unwrap_or(&0)
    }

    fn bump(&mut self, n: usize) {
        self.i += n;
        self.col += n;
    }

    /// `1/2` only when the three characters are contiguous and not followed
    /// by more digits.
    fn half_at(&self, off: usize) -> bool {
        self.peek(off) == b'1'
            && self.peek(off + 1) == b'/'
            && self.peek(off + 2) == b'2'
            && !self.peek(off + 3).is_ascii_digit()
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, (usize, usize))>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.peek(0).is_ascii_whitespace() {
                self.bump(1);
            }
            let c = self.peek(0);
            if c == 0 {
                return Ok(out);
            }
            if c == b'#' {
                return Ok(out); // rest of line is a comment
            }
            let pos = (self.line, self.col);
            let (tok, len) = match c {
                b'(' => match (self.peek(1), self.peek(2)) {
                    (b'+', b')') => (Tok::Bin(BinOp::OPlus), 3),
                    (b'*', b')') => (Tok::Bin(BinOp::OTimes), 3),
                    _ => (Tok::LParen, 1),
                },
                b')' => (Tok::RParen, 1),
                b'+' => (Tok::Bin(BinOp::Add), 1),
                b'/' if self.peek(1) == b'\\' => (Tok::Bin(BinOp::Meet), 2),
                b'\\' if self.peek(1) == b'/' => (Tok::Bin(BinOp::Join), 2),
                b'-' if self.peek(1) == b'>' => (Tok::Bin(BinOp::Imp), 2),
                b'-' if self.half_at(1) => (Tok::Minus, 1),
                b'-' if self.peek(1) == b'1' && !self.peek(2).is_ascii_digit() => {
                    (Tok::Const(Constant::MinusOne), 2)
                }
                b'-' => (Tok::Minus, 1),
                b'~' => (Tok::Tilde, 1),
                b'=' => (Tok::Rel(Rel::Eq), 1),
                b'<' if self.peek(1) == b'=' => (Tok::Rel(Rel::Le), 2),
                b'<' => (Tok::Rel(Rel::Lt), 1),
                b'&' => (Tok::Amp, 1),
                b'|' => (Tok::Pipe, 1),
                b'!' => (Tok::Bang, 1),
                b'0' if !self.peek(1).is_ascii_digit() => (Tok::Const(Constant::Zero), 1),
                _ if self.half_at(0) => (Tok::Const(Constant::Half), 3),
                b'1' if !self.peek(1).is_ascii_digit() => (Tok::Const(Constant::One), 1),
                _ if c.is_ascii_digit() => {
                    return Err(ParseError::syntax(
                        pos,
                        "numerals other than `0`, `1`, `-1`, `1/2` are not constants",
                    ));
                }
                _ if is_ident_start(c) => {
                    let mut len = 1;
                    while is_ident_char(self.peek(len)) {
                        len += 1;
                    }
                    let name =
                        String::from_utf8_lossy(&self.src[self.i..self.i + len]).into_owned();
                    (Tok::Ident(name), len)
                }
                _ => {
                    return Err(ParseError::syntax(
                        pos,
                        format!("unexpected character `{}`", c as char),
                    ));
                }
            };
            self.bump(len);
            out.push((tok, pos));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, (usize, usize))>,
    i: usize,
    sig: Signature,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> (usize, usize) {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(t, _)| t.clone());
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ParseError::syntax(
                pos,
                format!("expected {}, found {}", want.describe(), t.describe()),
            )),
            None => Err(ParseError::syntax(
                pos,
                format!("expected {}, found end of input", want.describe()),
            )),
        }
    }

    fn check_const(&self, c: Constant, pos: (usize, usize)) -> Result<Term, ParseError> {
        if self.sig.allows_const(c) {
            Ok(Term::Const(c))
        } else {
            Err(ParseError::Signature {
                line: pos.0,
                col: pos.1,
                op: c.symbol().into(),
                sig: self.sig,
            })
        }
    }

    fn check_unary(&self, op: UnaryOp, pos: (usize, usize)) -> Result<(), ParseError> {
        if self.sig.allows_unary(op) {
            Ok(())
        } else {
            Err(ParseError::Signature {
                line: pos.0,
                col: pos.1,
                op: op.symbol().into(),
                sig: self.sig,
            })
        }
    }

    fn check_binary(&self, op: BinOp, pos: (usize, usize)) -> Result<(), ParseError> {
        if self.sig.allows_binary(op) {
            Ok(())
        } else {
            Err(ParseError::Signature {
                line: pos.0,
                col: pos.1,
                op: op.symbol().into(),
                sig: self.sig,
            })
        }
    }

    fn lterm(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Minus) => {
                self.check_unary(UnaryOp::Neg, pos)?;
                Ok(Term::neg(self.lterm()?))
            }
            Some(Tok::Tilde) => {
                self.check_unary(UnaryOp::Not, pos)?;
                Ok(Term::not(self.lterm()?))
            }
            Some(Tok::Ident(name)) => Ok(Term::Var(name)),
            Some(Tok::Const(c)) => self.check_const(c, pos),
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(t) => Err(ParseError::syntax(
                pos,
                format!("expected a term, found {}", t.describe()),
            )),
            None => Err(ParseError::syntax(
                pos,
                "expected a term, found end of input",
            )),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.lterm()?;
        let mut chain_op: Option<BinOp> = None;
        while let Some(Tok::Bin(op)) = self.peek() {
            let op = *op;
            let pos = self.pos();
            self.next();
            self.check_binary(op, pos)?;
            match chain_op {
                None => chain_op = Some(op),
                Some(prev) if prev == op => {}
                Some(prev) => {
                    return Err(ParseError::syntax(
                        pos,
                        format!(
                            "mixed operators `{}` and `{}` in one chain; parenthesize",
                            prev.symbol(),
                            op.symbol()
                        ),
                    ));
                }
            }
            let rhs = self.lterm()?;
            acc = Term::bin(op, acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let left = self.term()?;
        let pos = self.pos();
        match self.next() {
            Some(Tok::Rel(rel)) => {
                let right = self.term()?;
                Ok(Atom::new(left, rel, right))
            }
            Some(t) => Err(ParseError::syntax(
                pos,
                format!("expected `=`, `<=` or `<`, found {}", t.describe()),
            )),
            None => Err(ParseError::syntax(
                pos,
                "expected `=`, `<=` or `<`, found end of input",
            )),
        }
    }

    fn lit(&mut self) -> Result<OpenFormula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.next();
                Ok(OpenFormula::not(self.lit()?))
            }
            Some(Tok::LParen) => {
                // Both "(x + y) = 0" and "(x = 0 & y = 0)" start with `(`;
                // try an atom first, backtrack to a parenthesized formula.
                let save = self.i;
                match self.atom() {
                    Ok(a) => Ok(OpenFormula::Atom(a)),
                    Err(atom_err) => {
                        self.i = save;
                        self.next();
                        let f = match self.disj() {
                            Ok(f) => f,
                            Err(form_err) => {
                                // report whichever attempt got further
                                return Err(if form_err.position() >= atom_err.position() {
                                    form_err
                                } else {
                                    atom_err
                                });
                            }
                        };
                        self.expect(Tok::RParen)?;
                        Ok(f)
                    }
                }
            }
            _ => Ok(OpenFormula::Atom(self.atom()?)),
        }
    }

    fn conj(&mut self) -> Result<OpenFormula, ParseError> {
        let mut acc = self.lit()?;
        while self.peek() == Some(&Tok::Amp) {
            self.next();
            acc = OpenFormula::and(acc, self.lit()?);
        }
        Ok(acc)
    }

    fn disj(&mut self) -> Result<OpenFormula, ParseError> {
        let mut acc = self.conj()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.next();
            acc = OpenFormula::or(acc, self.conj()?);
        }
        Ok(acc)
    }
}

fn make_parser(text: &str, sig: Signature, line: usize) -> Result<Parser, ParseError> {
    let end = (line, text.trim_end().chars().count() + 1);
    let toks = Lexer::new(text, line).tokenize()?;
    Ok(Parser {
        toks,
        i: 0,
        sig,
        end,
    })
}

fn finish<T>(p: &Parser, value: T) -> Result<T, ParseError> {
    match p.peek() {
        None => Ok(value),
        Some(t) => Err(ParseError::syntax(
            p.pos(),
            format!("unexpected {} after a complete input", t.describe()),
        )),
    }
}

/// Parses one formula, in reduced form. `line` is the 1-based line number
/// used in error positions.
pub fn parse_formula_at(
    text: &str,
    sig: Signature,
    line: usize,
) -> Result<OpenFormula, ParseError> {
    let mut p = make_parser(text, sig, line)?;
    let f = p.disj()?;
    finish(&p, normalize_formula(&f))
}

pub fn parse_formula(text: &str, sig: Signature) -> Result<OpenFormula, ParseError> {
    parse_formula_at(text, sig, 1)
}

/// Parses one term, in reduced form.
pub fn parse_term(text: &str, sig: Signature) -> Result<Term, ParseError> {
    let mut p = make_parser(text, sig, 1)?;
    let t = p.term()?;
    finish(&p, crate::formula::normalize_term(&t))
}

fn print_unary_arg(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        // `-(-1)` rather than the unlexable `--1`
        Term::Const(Constant::MinusOne) => out.push_str("(-1)"),
        Term::Const(c) => out.push_str(c.symbol()),
        _ => {
            out.push('(');
            print_term_into(t, out);
            out.push(')');
        }
    }
}

fn print_term_into(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Const(c) => out.push_str(c.symbol()),
        Term::Unary(op, inner) => {
            out.push_str(op.symbol());
            print_unary_arg(inner, out);
        }
        Term::Binary(op, l, r) => {
            out.push('(');
            print_term_into(l, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            print_term_into(r, out);
            out.push(')');
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    print_term_into(t, &mut s);
    s
}

fn print_formula_into(f: &OpenFormula, out: &mut String) {
    match f {
        OpenFormula::Atom(a) => {
            print_term_into(&a.left, out);
            out.push(' ');
            out.push_str(a.rel.symbol());
            out.push(' ');
            print_term_into(&a.right, out);
        }
        OpenFormula::Not(g) => {
            out.push_str("!(");
            print_formula_into(g, out);
            out.push(')');
        }
        OpenFormula::And(l, r) => {
            out.push('(');
            print_formula_into(l, out);
            out.push_str(" & ");
            print_formula_into(r, out);
            out.push(')');
        }
        OpenFormula::Or(l, r) => {
            out.push('(');
            print_formula_into(l, out);
            out.push_str(" | ");
            print_formula_into(r, out);
            out.push(')');
        }
    }
}

/// Fully parenthesized text; `parse_formula(print_formula(F))` is
/// structurally equal to `F` for reduced `F`.
pub fn print_formula(f: &OpenFormula) -> String {
    let mut s = String::new();
    print_formula_into(f, &mut s);
    s
}

/// Parses a formula file: first non-blank line `#lang ab|pab|mv|mvhalf`,
/// then one formula per non-comment line.
pub fn parse_formula_file(text: &str) -> Result<(Signature, Vec<OpenFormula>), ParseError> {
    let mut sig: Option<Signature> = None;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if sig.is_none() {
            if trimmed.is_empty() {
                continue;
            }
            let tag = trimmed
                .strip_prefix("#lang")
                .map(str::trim)
                .and_then(Signature::from_tag)
                .ok_or_else(|| {
                    ParseError::syntax(
                        (line_no, 1),
                        "expected `#lang ab|pab|mv|mvhalf` as the first line",
                    )
                })?;
            sig = Some(tag);
            continue;
        }
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_formula_at(body, sig.unwrap(), line_no)?);
    }
    match sig {
        Some(sig) => Ok((sig, out)),
        None => Err(ParseError::syntax((1, 1), "empty formula file")),
    }
}

pub fn format_formula_file(sig: Signature, formulas: &[OpenFormula]) -> String {
    let mut s = format!("#lang {}\n", sig.tag());
    for f in formulas {
        s.push_str(&print_formula(f));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Term;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }

    #[test]
    fn spec_examples() {
        let f = parse_formula("(x + y) = 0", Signature::Ab).unwrap();
        assert_eq!(
            f,
            OpenFormula::atom(Atom::eq(Term::add(x(), y()), Term::Const(Constant::Zero)))
        );

        let f = parse_formula("!(x <= -1) | (x = 0)", Signature::PAb).unwrap();
        assert_eq!(
            f,
            OpenFormula::or(
                OpenFormula::not(OpenFormula::atom(Atom::le(
                    x(),
                    Term::Const(Constant::MinusOne)
                ))),
                OpenFormula::atom(Atom::eq(x(), Term::Const(Constant::Zero)))
            )
        );

        assert!(matches!(
            parse_formula("x (+) y = 0", Signature::Ab),
            Err(ParseError::Signature { .. })
        ));
    }

    #[test]
    fn printer_examples() {
        let f = OpenFormula::atom(Atom::eq(x(), Term::Const(Constant::Zero)));
        assert_eq!(print_formula(&f), "x = 0");
        let f = parse_formula(&print_formula(&f), Signature::Ab).unwrap();
        assert_eq!(print_formula(&f), "x = 0");

        let t = Term::neg(Term::Const(Constant::MinusOne));
        assert_eq!(print_term(&t), "-(-1)");
        assert_eq!(parse_term("-(-1)", Signature::PAb).unwrap(), t);
    }

    #[test]
    fn contiguous_constants() {
        assert_eq!(
            parse_term("1/2", Signature::MvHalf).unwrap(),
            Term::Const(Constant::Half)
        );
        assert_eq!(
            parse_term("-1/2", Signature::PAb).unwrap_err().position(),
            (1, 2)
        );
        // `- 1/2` in pAb: Neg of Half, but Half is not in pAb
        assert!(matches!(
            parse_term("-1/2", Signature::PAb),
            Err(ParseError::Signature { .. })
        ));
        assert_eq!(
            parse_term("- -1", Signature::PAb).unwrap(),
            Term::neg(Term::Const(Constant::MinusOne))
        );
        assert!(parse_term("x + 3", Signature::Ab).is_err());
        assert!(parse_term("12", Signature::Ab).is_err());
    }

    #[test]
    fn mixed_operators_rejected() {
        assert!(parse_term("x + y + x", Signature::Ab).is_ok());
        let e = parse_term("x + y /\\ x", Signature::Ab).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { .. }));
        assert!(e.to_string().contains("parenthesize"));
        assert!(parse_term("(x + y) /\\ x", Signature::Ab).is_ok());
    }

    #[test]
    fn single_level_left_assoc() {
        let t = parse_term("x + y + x", Signature::Ab).unwrap();
        assert_eq!(t, Term::add(Term::add(x(), y()), x()));
    }

    #[test]
    fn mv_tokens() {
        let t = parse_term("x (+) y", Signature::Mv).unwrap();
        assert_eq!(t, Term::oplus(x(), y()));
        let t = parse_term("x (*) ~y", Signature::Mv).unwrap();
        assert_eq!(t, Term::otimes(x(), Term::not(y())));
        let t = parse_term("(x -> y) -> y", Signature::Mv).unwrap();
        assert_eq!(t, Term::imp(Term::imp(x(), y()), y()));
    }

    #[test]
    fn reduced_on_parse() {
        let t = parse_term("--x", Signature::Ab).unwrap();
        assert_eq!(t, x());
        let f = parse_formula("!!(x = 0)", Signature::Ab).unwrap();
        assert!(matches!(f, OpenFormula::Atom(_)));
    }

    #[test]
    fn paren_backtracking() {
        let f = parse_formula("((x = 0) & (y = 0)) | (x < y)", Signature::Ab).unwrap();
        assert!(matches!(f, OpenFormula::Or(..)));
        let f = parse_formula("((x + y) /\\ 0) = x", Signature::Ab).unwrap();
        assert!(matches!(f, OpenFormula::Atom(_)));
    }

    #[test]
    fn error_positions() {
        let e = parse_formula("x =", Signature::Ab).unwrap_err();
        assert_eq!(e.position(), (1, 4));
        let e = parse_formula("x + * = 0", Signature::Ab).unwrap_err();
        assert_eq!(e.position(), (1, 5));
        let e = parse_formula("x = 0 )", Signature::Ab).unwrap_err();
        assert_eq!(e.position(), (1, 7));
    }

    #[test]
    fn formula_file_roundtrip() {
        let text = "#lang pab\n# a comment\nx = -1\n(x + y) <= 0 # trailing\n";
        let (sig, fs) = parse_formula_file(text).unwrap();
        assert_eq!(sig, Signature::PAb);
        assert_eq!(fs.len(), 2);
        let printed = format_formula_file(sig, &fs);
        let (sig2, fs2) = parse_formula_file(&printed).unwrap();
        assert_eq!(sig, sig2);
        assert_eq!(fs, fs2);

        assert!(parse_formula_file("x = 0\n").is_err());
        assert!(parse_formula_file("").is_err());
        assert!(parse_formula_file("#lang klingon\n").is_err());
    }
}
