use super::{DslError, DslErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Word(String),
    Semi,
    Slash,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Semi => "`;`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '-')
}

pub(super) fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let text = text.replace("\r\n", "\n");
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                    col += 1;
                }
            }
            ';' | '/' => {
                chars.next();
                col += 1;
                out.push(Token { tok: if c == ';' { Tok::Semi } else { Tok::Slash }, line: l0, col: c0 });
            }
            c if is_word_char(c) => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    w.push(c);
                    chars.next();
                    col += 1;
                }
                out.push(Token { tok: Tok::Word(w), line: l0, col: c0 });
            }
            other => {
                return Err(DslError { kind: DslErrorKind::Lexical(format!("{other:?}")), line: l0, col: c0 });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = lex("mode L R; # two modes\nmeasure P A as a+/a-;").unwrap();
        assert_eq!(toks[0], Token { tok: Tok::Word("mode".into()), line: 1, col: 1 });
        assert_eq!(toks[3], Token { tok: Tok::Semi, line: 1, col: 9 });
        assert_eq!(toks[4], Token { tok: Tok::Word("measure".into()), line: 2, col: 1 });
        assert_eq!(toks[8].tok, Tok::Word("a+".into()));
        assert_eq!(toks[9].tok, Tok::Slash);
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn stray_character() {
        let err = lex("phase R pi*3;").unwrap_err();
        assert_eq!((err.line, err.col), (1, 11));
    }
}
