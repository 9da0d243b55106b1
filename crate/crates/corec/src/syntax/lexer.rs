//! Hand-rolled lexer for the `.corec` surface language.
//!
//! Identifiers admit primes (`x′`, `x'`); a fixed set of mathematical
//! operator symbols lex as single-character operator tokens usable as
//! function names; `--` starts a line comment.

use crate::base::Span;
use crate::error::SyntaxError;
use num_bigint::BigUint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    OpSym(String),
    Nat(BigUint),
    Kw(Kw),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Dot,
    Eq,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Caret,
    Pipe,
    Arrow,
    Lambda,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Codatatype,
    Corec,
    WellBehaved,
    Force,
    Check,
    Register,
    Prove,
    Upto,
    Via,
    Depth,
    Using,
    Fuel,
    If,
    Then,
    Else,
    True,
    False,
    And,
    Or,
    Not,
    ExistsIn,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::OpSym(s) => format!("operator `{s}`"),
            Tok::Nat(n) => format!("number {n}"),
            Tok::Kw(k) => format!("`{}`", kw_text(*k)),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`−`".into(),
            Tok::Star => "`×`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Lambda => "`λ`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub fn kw_text(k: Kw) -> &'static str {
    match k {
        Kw::Codatatype => "codatatype",
        Kw::Corec => "corec",
        Kw::WellBehaved => "well_behaved",
        Kw::Force => "force",
        Kw::Check => "check",
        Kw::Register => "register",
        Kw::Prove => "prove",
        Kw::Upto => "upto",
        Kw::Via => "via",
        Kw::Depth => "depth",
        Kw::Using => "using",
        Kw::Fuel => "fuel",
        Kw::If => "if",
        Kw::Then => "then",
        Kw::Else => "else",
        Kw::True => "true",
        Kw::False => "false",
        Kw::And => "and",
        Kw::Or => "or",
        Kw::Not => "not",
        Kw::ExistsIn => "exists-in",
    }
}

fn keyword(s: &str) -> Option<Kw> {
    Some(match s {
        "codatatype" => Kw::Codatatype,
        "corec" => Kw::Corec,
        "well_behaved" => Kw::WellBehaved,
        "force" => Kw::Force,
        "check" => Kw::Check,
        "register" => Kw::Register,
        "prove" => Kw::Prove,
        "upto" => Kw::Upto,
        "via" => Kw::Via,
        "depth" => Kw::Depth,
        "using" => Kw::Using,
        "fuel" => Kw::Fuel,
        "if" => Kw::If,
        "then" => Kw::Then,
        "else" => Kw::Else,
        "true" => Kw::True,
        "false" => Kw::False,
        "and" => Kw::And,
        "or" => Kw::Or,
        "not" => Kw::Not,
        _ => return None,
    })
}

const OP_SYMS: &[char] = &[
    '⊕', '⊗', '⊞', '⊠', '⊙', '⊘', '⊚', '⊛', '⋄', '∙', '⨁', '⨂', '⊎', '≀',
];

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '′' || c == '\''
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(text: &str, map: &crate::base::SourceMap) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // line comment
        if c == '-' && matches!(chars.get(i + 1), Some((_, '-'))) {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let start = pos;
        let mut push = |tok: Tok, end: usize, i2: usize| {
            out.push(Spanned {
                tok,
                span: Span::new(start, end),
            });
            i2
        };
        i = match c {
            '(' => push(Tok::LParen, pos + 1, i + 1),
            ')' => push(Tok::RParen, pos + 1, i + 1),
            '[' => push(Tok::LBracket, pos + 1, i + 1),
            ']' => push(Tok::RBracket, pos + 1, i + 1),
            '{' => push(Tok::LBrace, pos + 1, i + 1),
            '}' => push(Tok::RBrace, pos + 1, i + 1),
            ',' => push(Tok::Comma, pos + 1, i + 1),
            ';' => push(Tok::Semi, pos + 1, i + 1),
            ':' => push(Tok::Colon, pos + 1, i + 1),
            '.' => push(Tok::Dot, pos + 1, i + 1),
            '=' => push(Tok::Eq, pos + 1, i + 1),
            '<' => push(Tok::Lt, pos + 1, i + 1),
            '>' => push(Tok::Gt, pos + 1, i + 1),
            '+' => push(Tok::Plus, pos + 1, i + 1),
            '−' => push(Tok::Minus, pos + c.len_utf8(), i + 1),
            '*' => push(Tok::Star, pos + 1, i + 1),
            '×' => push(Tok::Star, pos + c.len_utf8(), i + 1),
            '^' => push(Tok::Caret, pos + 1, i + 1),
            '|' => push(Tok::Pipe, pos + 1, i + 1),
            'λ' => push(Tok::Lambda, pos + c.len_utf8(), i + 1),
            '\\' => push(Tok::Lambda, pos + 1, i + 1),
            '⊔' => push(Tok::Ident("fmax".into()), pos + c.len_utf8(), i + 1),
            '-' => {
                if matches!(chars.get(i + 1), Some((_, '>'))) {
                    push(Tok::Arrow, pos + 2, i + 2)
                } else {
                    push(Tok::Minus, pos + 1, i + 1)
                }
            }
            _ if OP_SYMS.contains(&c) => {
                push(Tok::OpSym(c.to_string()), pos + c.len_utf8(), i + 1)
            }
            _ if c.is_ascii_digit() => {
                let mut j = i;
                let mut digits = String::new();
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    digits.push(chars[j].1);
                    j += 1;
                }
                let end = chars
                    .get(j)
                    .map(|(p, _)| *p)
                    .unwrap_or(text.len());
                let n: BigUint = digits.parse().expect("digits parse");
                push(Tok::Nat(n), end, j)
            }
            _ if is_ident_start(c) => {
                let mut j = i;
                let mut word = String::new();
                while j < chars.len() && is_ident_continue(chars[j].1) {
                    word.push(chars[j].1);
                    j += 1;
                }
                // `exists-in` is one token; the hyphen is otherwise minus.
                if word == "exists"
                    && matches!(chars.get(j), Some((_, '-')))
                    && text[chars.get(j).map(|(p, _)| *p).unwrap_or(0)..].starts_with("-in")
                {
                    let after = j + 3;
                    let boundary_ok = chars
                        .get(after)
                        .map(|(_, ch)| !is_ident_continue(*ch))
                        .unwrap_or(true);
                    if boundary_ok {
                        let end = chars.get(after).map(|(p, _)| *p).unwrap_or(text.len());
                        i = push(Tok::Kw(Kw::ExistsIn), end, after);
                        continue;
                    }
                }
                let end = chars.get(j).map(|(p, _)| *p).unwrap_or(text.len());
                let tok = match keyword(&word) {
                    Some(k) => Tok::Kw(k),
                    None => Tok::Ident(word),
                };
                push(tok, end, j)
            }
            _ => {
                let (line, col) = map.line_col(pos);
                return Err(SyntaxError {
                    line,
                    col,
                    expected: vec!["a token".into()],
                    found: format!("`{c}`"),
                    span: Span::new(pos, pos + c.len_utf8()),
                });
            }
        };
    }
    out.push(Spanned {
        tok: Tok::Eof,
        span: Span::new(text.len(), text.len()),
    });
    Ok(out)
}
