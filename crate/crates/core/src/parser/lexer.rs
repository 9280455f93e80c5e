use super::{ParseError, ParseErrorKind, SourceSpan};
use crate::logic::Name;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned decimal literal; sign is handled by the parser.
    Int(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Token {
    pub fn span(&self, file: &Name) -> SourceSpan {
        SourceSpan {
            file: file.clone(),
            line: self.line,
            col_start: self.col,
            col_end: self.col + self.len.max(1),
        }
    }
}

// longest first so that prefixes do not shadow longer operators
const SYMBOLS: &[&str] = &[
    "<=>", ":=", "->", "=>", "~=", "=<", ">=", "..", "{", "}", "(", ")", "[", "]", ",", ".", ":", "~", "&", "|", "=",
    "<", ">", "+", "-", "*", "!", "?",
];

pub(crate) fn tokenize(text: &str, file: &Name) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln as u32 + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i as u32 + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: line_no,
                    col,
                    len: (i - start) as u32,
                });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let len = (i - start) as u32;
                let value = digits.parse::<u64>().map_err(|_| ParseError {
                    kind: ParseErrorKind::Syntax,
                    span: SourceSpan {
                        file: file.clone(),
                        line: line_no,
                        col_start: col,
                        col_end: col + len,
                    },
                    message: format!("integer literal `{digits}` is too large"),
                })?;
                out.push(Token {
                    tok: Tok::Int(value),
                    line: line_no,
                    col,
                    len,
                });
                continue;
            }
            let rest = &chars[i..];
            let sym = SYMBOLS
                .iter()
                .find(|s| s.chars().count() <= rest.len() && s.chars().zip(rest).all(|(a, b)| a == *b));
            match sym {
                Some(s) => {
                    let n = s.chars().count();
                    out.push(Token {
                        tok: Tok::Sym(s),
                        line: line_no,
                        col,
                        len: n as u32,
                    });
                    i += n;
                }
                None => {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax,
                        span: SourceSpan {
                            file: file.clone(),
                            line: line_no,
                            col_start: col,
                            col_end: col + 1,
                        },
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
    }
    let (line, col) = match text.lines().enumerate().last() {
        Some((n, l)) => (n as u32 + 1, l.chars().count() as u32 + 1),
        None => (1, 1),
    };
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
        len: 1,
    });
    Ok(out)
}
