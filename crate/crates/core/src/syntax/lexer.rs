use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u32),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: [&str; 24] = [
    "->", ">>", ">=", "<=", "=>", "!=", "(", ")", "{", "}", "[", "]", ",", ";", ".", ":", "=",
    "<", ">", "-", "+", "*", "!", "?",
];

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens. `#` starts a comment running to the end of
/// the line. Identifiers may start with `?` (parameter names) and contain
/// primes.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut k, mut line, mut col) = (0, 1, 1);
    let advance = |k: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*k] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *k += 1;
    };
    while k < chars.len() {
        let c = chars[k];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            advance(&mut k, &mut line, &mut col);
            continue;
        }
        if c == '#' {
            while k < chars.len() && chars[k] != '\n' {
                advance(&mut k, &mut line, &mut col);
            }
            continue;
        }
        let param = c == '?' && chars.get(k + 1).is_some_and(|d| ident_start(*d));
        if ident_start(c) || param {
            let mut s = String::new();
            s.push(c);
            advance(&mut k, &mut line, &mut col);
            while k < chars.len() && ident_continue(chars[k]) {
                s.push(chars[k]);
                advance(&mut k, &mut line, &mut col);
            }
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while k < chars.len() && chars[k].is_ascii_digit() {
                s.push(chars[k]);
                advance(&mut k, &mut line, &mut col);
            }
            let n = s.parse().map_err(|_| ParseError::syntax(l0, c0, format!("number `{s}` too large")))?;
            out.push(Token { tok: Tok::Int(n), line: l0, col: c0 });
            continue;
        }
        if c == '"' {
            advance(&mut k, &mut line, &mut col);
            let mut s = String::new();
            loop {
                match chars.get(k) {
                    None => return Err(ParseError::syntax(l0, c0, "unterminated string")),
                    Some('"') => {
                        advance(&mut k, &mut line, &mut col);
                        break;
                    }
                    Some('\\') if k + 1 < chars.len() => {
                        advance(&mut k, &mut line, &mut col);
                        s.push(chars[k]);
                        advance(&mut k, &mut line, &mut col);
                    }
                    Some(d) => {
                        s.push(*d);
                        advance(&mut k, &mut line, &mut col);
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), line: l0, col: c0 });
            continue;
        }
        let rest: String = chars[k..chars.len().min(k + 2)].iter().collect();
        let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(*s)) else {
            return Err(ParseError::syntax(l0, c0, format!("unexpected character `{c}`")));
        };
        for _ in 0..sym.len() {
            advance(&mut k, &mut line, &mut col);
        }
        out.push(Token { tok: Tok::Sym(sym), line: l0, col: c0 });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
