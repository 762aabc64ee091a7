use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Plus,
    Minus,
    Slash,
    Hash,
    At,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Quoted(s) => format!("constant '{s}'"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Hash => "`#`".into(),
            Tok::At => "`@`".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn pos(&self) -> (usize, usize) {
        (self.line, self.col)
    }

    fn bump(&mut self) -> char {
        let c = self.chars.next().unwrap();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while self.peek().is_some_and(&f) {
            s.push(self.bump());
        }
        s
    }
}

/// Splits `text` into tokens, skipping whitespace and `%` comments.
/// `first_line` is the line number of the first line of `text`.
pub fn tokenize(text: &str, first_line: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: first_line,
        col: 1,
    };
    while let Some(c) = cur.peek() {
        let start = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '%' {
            cur.take_while(|c| c != '\n');
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            Tok::Ident(cur.take_while(|c| c.is_ascii_alphanumeric() || c == '_'))
        } else if c.is_ascii_digit() {
            let s = cur.take_while(|c| c.is_ascii_digit());
            let n = s.parse().map_err(|_| {
                ParseError::syntax(SourceSpan::new(start, cur.pos()), "integer literal too large")
            })?;
            Tok::Int(n)
        } else if c == '\'' {
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.peek() {
                    None | Some('\n') => {
                        return Err(ParseError::syntax(
                            SourceSpan::new(start, cur.pos()),
                            "unterminated quoted constant",
                        ))
                    }
                    Some('\'') => {
                        cur.bump();
                        break;
                    }
                    Some('\\') => {
                        cur.bump();
                        if cur.peek().is_some_and(|c| c != '\n') {
                            s.push(cur.bump());
                        }
                    }
                    Some(_) => s.push(cur.bump()),
                }
            }
            Tok::Quoted(s)
        } else if c == '-' {
            cur.bump();
            if cur.peek() == Some('>') {
                cur.bump();
                Tok::Arrow
            } else {
                Tok::Minus
            }
        } else {
            cur.bump();
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '+' => Tok::Plus,
                '/' => Tok::Slash,
                '#' => Tok::Hash,
                '@' => Tok::At,
                _ => {
                    return Err(ParseError::syntax(
                        SourceSpan::new(start, cur.pos()),
                        format!("unexpected character {c:?}"),
                    ))
                }
            }
        };
        out.push(Token {
            tok,
            span: SourceSpan::new(start, cur.pos()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, 1).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn rule_tokens() {
        assert_eq!(
            toks("Shdn(X,T) -> Malf(X,T-2). % note"),
            vec![
                Tok::Ident("Shdn".into()),
                Tok::LParen,
                Tok::Ident("X".into()),
                Tok::Comma,
                Tok::Ident("T".into()),
                Tok::RParen,
                Tok::Arrow,
                Tok::Ident("Malf".into()),
                Tok::LParen,
                Tok::Ident("X".into()),
                Tok::Comma,
                Tok::Ident("T".into()),
                Tok::Minus,
                Tok::Int(2),
                Tok::RParen,
                Tok::Dot,
            ]
        );
    }

    #[test]
    fn quoted_and_spans() {
        let t = tokenize("a\n  'n/a'", 1).unwrap();
        assert_eq!(t[1].tok, Tok::Quoted("n/a".into()));
        assert_eq!((t[1].span.line, t[1].span.col), (2, 3));
        assert!(tokenize("'open", 1).is_err());
        assert!(tokenize("P(X) ; Q", 1).is_err());
    }
}
