//! Lexer, expression parser, and expression printer shared by the three
//! mini-languages.

use std::fmt;

use thiserror::Error;

use crate::modularizer::GenericValue as V;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: expected {expected}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    C,
    Js,
    Lua,
}

const SYMS: [&str; 26] = [
    "==", "!=", "~=", "<=", ">=", "&&", "||", "(", ")", "{", "}", "[", "]", ",", ";", ".", "=", "<", ">", "+", "-",
    "*", "/", "%", "!", ":",
];

pub fn lex(src: &str, dialect: Dialect) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, expected: &str| ParseError { line, col, expected: expected.to_string() };
    while i < chars.len() {
        let c = chars[i];
        let comment = match dialect {
            Dialect::Lua => c == '-' && chars.get(i + 1) == Some(&'-'),
            _ => c == '/' && chars.get(i + 1) == Some(&'/'),
        };
        if comment {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let s: String = chars[i..].iter().take_while(|c| c.is_ascii_alphanumeric() || **c == '_').collect();
            i += s.len();
            col += s.len();
            out.push((Tok::Ident(s), start_line, start_col));
        } else if c.is_ascii_digit() {
            let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
            i += s.len();
            col += s.len();
            let v = s.parse::<i64>().map_err(|_| err(start_line, start_col, "integer in range"))?;
            out.push((Tok::Int(v), start_line, start_col));
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(start_line, start_col, "closing quote")),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') => {
                        let e = match chars.get(i + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => return Err(err(line, col, "escape sequence")),
                        };
                        s.push(e);
                        i += 2;
                        col += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push((Tok::Str(s), start_line, start_col));
        } else {
            let sym = SYMS
                .iter()
                .find(|s| s.chars().enumerate().all(|(k, sc)| chars.get(i + k) == Some(&sc)))
                .ok_or_else(|| err(line, col, "a token"))?;
            i += sym.len();
            col += sym.len();
            out.push((Tok::Sym(sym), start_line, start_col));
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

pub struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    pub dialect: Dialect,
}

impl Parser {
    pub fn new(src: &str, dialect: Dialect) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src, dialect)?, pos: 0, dialect })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, expected: &str) -> ParseError {
        let (tok, line, col) = &self.toks[self.pos];
        ParseError { line: *line, col: *col, expected: format!("{expected}, found {tok}") }
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    pub fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(&format!("`{k}`")))
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    /// A non-keyword identifier.
    pub fn name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s, self.dialect) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("identifier")),
        }
    }

    pub fn ident(&mut self) -> Result<V, ParseError> {
        Ok(ident(&self.name()?))
    }

    /// Comma-separated items up to (not including) `close`.
    pub fn comma_list<T>(
        &mut self,
        close: &str,
        mut item: impl FnMut(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        let mut out = Vec::new();
        if self.is_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    pub fn expr(&mut self) -> Result<V, ParseError> {
        if self.dialect == Dialect::Lua {
            return self.binary(0);
        }
        let lhs = self.binary(0)?;
        if self.is_sym("=") {
            if !is_lvalue(&lhs) {
                return Err(self.error("an assignable expression before `=`"));
            }
            self.bump();
            let rhs = self.expr()?;
            return Ok(V::ctor("Assign", vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn binop(&self) -> Option<(&'static str, u8)> {
        let op = match (self.peek(), self.dialect) {
            (Tok::Ident(k), Dialect::Lua) if k == "or" => "||",
            (Tok::Ident(k), Dialect::Lua) if k == "and" => "&&",
            (Tok::Sym("~="), Dialect::Lua) => "!=",
            (Tok::Sym("!="), Dialect::Lua) => return None,
            (Tok::Sym("&&" | "||"), Dialect::Lua) => return None,
            (Tok::Sym(s), _) => s,
            _ => return None,
        };
        binary_prec(op).map(|p| (op, p))
    }

    fn binary(&mut self, min: u8) -> Result<V, ParseError> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.binop() {
            if prec < min {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = V::ctor("Binary", vec![V::str(op), lhs, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<V, ParseError> {
        let op = match (self.peek(), self.dialect) {
            (Tok::Sym("-"), _) => "-",
            (Tok::Sym("!"), Dialect::C | Dialect::Js) => "!",
            (Tok::Ident(k), Dialect::Lua) if k == "not" => "!",
            _ => return self.postfix(),
        };
        self.bump();
        let e = self.unary()?;
        Ok(V::ctor("Unary", vec![V::str(op), e]))
    }

    fn postfix(&mut self) -> Result<V, ParseError> {
        let mut e = self.primary()?;
        loop {
            if self.eat_sym("[") {
                let i = self.expr()?;
                self.expect_sym("]")?;
                e = V::ctor("Index", vec![e, i]);
            } else if self.dialect != Dialect::C && self.is_sym(".") {
                self.bump();
                let f = self.ident()?;
                e = V::ctor("Field", vec![e, f]);
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<V, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(V::ctor("IntLit", vec![V::Int(i)]))
            }
            Tok::Ident(k) if k == "true" || k == "false" => {
                self.bump();
                Ok(V::ctor("BoolLit", vec![V::Bool(k == "true")]))
            }
            Tok::Ident(k) if k == "nil" && self.dialect == Dialect::Lua => {
                self.bump();
                Ok(V::leaf("Nil"))
            }
            Tok::Ident(_) => {
                let id = self.ident()?;
                if self.eat_sym("(") {
                    let args = self.comma_list(")", |p| p.expr())?;
                    self.expect_sym(")")?;
                    Ok(V::ctor("Call", vec![id, V::List(args)]))
                } else {
                    Ok(V::ctor("Var", vec![id]))
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("[") if self.dialect == Dialect::Js => {
                self.bump();
                let items = self.comma_list("]", |p| p.expr())?;
                self.expect_sym("]")?;
                Ok(V::ctor("ArrayLit", vec![V::List(items)]))
            }
            _ => Err(self.error("expression")),
        }
    }
}

pub fn ident(name: &str) -> V {
    V::ctor("Ident", vec![V::str(name)])
}

pub fn ident_str(v: &V) -> &str {
    v.arg(0).as_str()
}

pub fn is_lvalue(e: &V) -> bool {
    matches!(e.ctor_name(), "Var" | "Index" | "Field")
}

pub fn is_keyword(s: &str, d: Dialect) -> bool {
    let common = ["if", "else", "while", "for", "return", "break", "true", "false"];
    let extra: &[&str] = match d {
        Dialect::C => &["int", "bool", "void", "continue"],
        Dialect::Js => &["var", "function", "continue"],
        Dialect::Lua => &["local", "function", "then", "elseif", "end", "do", "and", "or", "not", "nil"],
    };
    common.contains(&s) || extra.contains(&s)
}

fn binary_prec(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 1,
        "&&" => 2,
        "==" | "!=" => 3,
        "<" | "<=" | ">" | ">=" => 4,
        "+" | "-" => 5,
        "*" | "/" | "%" => 6,
        _ => return None,
    })
}

const ASSIGN_PREC: u8 = 0;
const UNARY_PREC: u8 = 7;
const POSTFIX_PREC: u8 = 8;

fn expr_prec(e: &V) -> u8 {
    match e.ctor_name() {
        "Assign" => ASSIGN_PREC,
        "Binary" => binary_prec(e.arg(0).as_str()).unwrap_or(1),
        "Unary" => UNARY_PREC,
        _ => POSTFIX_PREC,
    }
}

fn op_text(op: &str, d: Dialect) -> &str {
    match (op, d) {
        ("&&", Dialect::Lua) => "and",
        ("||", Dialect::Lua) => "or",
        ("!=", Dialect::Lua) => "~=",
        ("!", Dialect::Lua) => "not ",
        _ => op,
    }
}

pub fn print_expr(e: &V, d: Dialect) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, d, 0);
    s
}

fn write_expr(out: &mut String, e: &V, d: Dialect, min: u8) {
    let prec = expr_prec(e);
    let paren = prec < min;
    if paren {
        out.push('(');
    }
    match e.ctor_name() {
        "IntLit" => out.push_str(&e.arg(0).as_int().to_string()),
        "BoolLit" => out.push_str(if e.arg(0).as_bool() { "true" } else { "false" }),
        "Nil" => out.push_str("nil"),
        "Var" => out.push_str(ident_str(e.arg(0))),
        "Index" => {
            write_expr(out, e.arg(0), d, POSTFIX_PREC);
            out.push('[');
            write_expr(out, e.arg(1), d, 0);
            out.push(']');
        }
        "Field" => {
            write_expr(out, e.arg(0), d, POSTFIX_PREC);
            out.push('.');
            out.push_str(ident_str(e.arg(1)));
        }
        "Call" => {
            out.push_str(ident_str(e.arg(0)));
            out.push('(');
            write_list(out, e.arg(1).as_list(), d);
            out.push(')');
        }
        "ArrayLit" => {
            out.push('[');
            write_list(out, e.arg(0).as_list(), d);
            out.push(']');
        }
        "Unary" => {
            out.push_str(op_text(e.arg(0).as_str(), d));
            write_expr(out, e.arg(1), d, POSTFIX_PREC);
        }
        "Binary" => {
            write_expr(out, e.arg(1), d, prec);
            out.push(' ');
            out.push_str(op_text(e.arg(0).as_str(), d));
            out.push(' ');
            write_expr(out, e.arg(2), d, prec + 1);
        }
        "Assign" => {
            write_expr(out, e.arg(0), d, POSTFIX_PREC);
            out.push_str(" = ");
            write_expr(out, e.arg(1), d, ASSIGN_PREC);
        }
        other => out.push_str(&format!("<{other}>")),
    }
    if paren {
        out.push(')');
    }
}

pub fn write_list(out: &mut String, items: &[V], d: Dialect) {
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a, d, 0);
    }
}

pub fn print_list(items: &[V], d: Dialect) -> String {
    let mut s = String::new();
    write_list(&mut s, items, d);
    s
}

/// Accumulates indented lines.
pub struct Printer {
    pub out: String,
    pub depth: usize,
}

impl Printer {
    pub fn new() -> Printer {
        Printer { out: String::new(), depth: 0 }
    }

    pub fn line(&mut self, s: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }
}

impl Default for Printer {
    fn default() -> Self {
        Printer::new()
    }
}

pub fn quote(s: &str) -> String {
    let mut q = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Token texts of a source file, for layout-insensitive comparison.
pub fn token_texts(src: &str, d: Dialect) -> Result<Vec<String>, ParseError> {
    Ok(lex(src, d)?
        .into_iter()
        .filter(|(t, _, _)| *t != Tok::Eof)
        .map(|(t, _, _)| match t {
            Tok::Ident(s) => s,
            Tok::Int(i) => i.to_string(),
            Tok::Str(s) => quote(&s),
            Tok::Sym(s) => s.to_string(),
            Tok::Eof => String::new(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(src: &str, d: Dialect) -> String {
        let mut p = Parser::new(src, d).unwrap();
        let e = p.expr().unwrap();
        assert!(p.at_eof(), "trailing input in {src}");
        print_expr(&e, d)
    }

    #[test]
    fn precedence_and_parens() {
        assert_eq!(rt("1+2*3", Dialect::C), "1 + 2 * 3");
        assert_eq!(rt("(1+2)*3", Dialect::C), "(1 + 2) * 3");
        assert_eq!(rt("1-(2-3)", Dialect::C), "1 - (2 - 3)");
        assert_eq!(rt("1-2-3", Dialect::C), "1 - 2 - 3");
        assert_eq!(rt("-(-x)", Dialect::Lua), "-(-x)");
        assert_eq!(rt("!(a && b)", Dialect::Js), "!(a && b)");
        assert_eq!(rt("x = y = a[1] + f(2, 3)", Dialect::Js), "x = y = a[1] + f(2, 3)");
        assert_eq!(rt("TC.cov[3]", Dialect::Js), "TC.cov[3]");
    }

    #[test]
    fn lua_operators() {
        assert_eq!(rt("not a and b or c ~= d", Dialect::Lua), "not a and b or c ~= d");
        let mut p = Parser::new("a ~= b", Dialect::Lua).unwrap();
        let e = p.expr().unwrap();
        assert_eq!(e.arg(0).as_str(), "!=");
    }

    #[test]
    fn errors_carry_positions() {
        let mut p = Parser::new("1 +\n  )", Dialect::C).unwrap();
        let e = p.expr().unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(lex("\"abc", Dialect::Js).is_err());
        assert!(lex("a # b", Dialect::C).is_err());
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(token_texts("a // c\nb", Dialect::C).unwrap(), ["a", "b"]);
        assert_eq!(token_texts("a -- c\nb", Dialect::Lua).unwrap(), ["a", "b"]);
    }
}
