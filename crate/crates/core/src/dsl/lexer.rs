//! Tokenizer for the map grammar. Tracks byte offsets for error reporting.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Number(f64),
    /// Number immediately suffixed with `i`, e.g. `3i`.
    Imag(f64),
    /// The reserved literal `i`.
    ImagUnit,
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Comma,
    Colon,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Lexeme {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) struct LexError {
    pub offset: usize,
    pub message: String,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Lexeme>, LexError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => push_simple(&mut out, Tok::Plus, &mut i),
            b'-' => push_simple(&mut out, Tok::Minus, &mut i),
            b'*' => push_simple(&mut out, Tok::Star, &mut i),
            b'/' => push_simple(&mut out, Tok::Slash, &mut i),
            b'^' => push_simple(&mut out, Tok::Caret, &mut i),
            b',' => push_simple(&mut out, Tok::Comma, &mut i),
            b':' => push_simple(&mut out, Tok::Colon, &mut i),
            b'(' => push_simple(&mut out, Tok::LParen, &mut i),
            b')' => push_simple(&mut out, Tok::RParen, &mut i),
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // exponent only when followed by digits (so `2exp(...)` does
                // not swallow the function name)
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let val: f64 = text[start..i].parse().map_err(|_| LexError {
                    offset: start,
                    message: format!("invalid number literal `{}`", &text[start..i]),
                })?;
                // a trailing `i` not starting a longer identifier makes the
                // literal imaginary
                if i < bytes.len()
                    && bytes[i] == b'i'
                    && !(i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric())
                {
                    i += 1;
                    out.push(Lexeme { tok: Tok::Imag(val), offset: start });
                } else {
                    out.push(Lexeme { tok: Tok::Number(val), offset: start });
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                if word == "i" {
                    out.push(Lexeme { tok: Tok::ImagUnit, offset: start });
                } else {
                    out.push(Lexeme { tok: Tok::Ident(word.to_string()), offset: start });
                }
            }
            _ => {
                return Err(LexError {
                    offset: i,
                    message: format!("unexpected byte `{}`", bytes[i] as char),
                })
            }
        }
    }
    out.push(Lexeme { tok: Tok::Eof, offset: bytes.len() });
    Ok(out)
}

fn push_simple(out: &mut Vec<Lexeme>, tok: Tok, i: &mut usize) {
    out.push(Lexeme { tok, offset: *i });
    *i += 1;
}
