//! Positioned s-expression reader. `;` starts a comment running to end of line.

use super::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexpr {
    Symbol(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Symbol(_, pos) | Sexpr::List(_, pos) => *pos,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexpr::Symbol(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexpr>, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek() {
            None => Ok(None),
            Some(')') => Err(ParseError::at(start, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(ParseError::at(start, "unbalanced `(`: missing `)`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexpr::List(items, start)));
                        }
                        Some(_) => items.push(self.read()?.expect("non-empty input")),
                    }
                }
            }
            Some(_) => {
                let mut sym = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.push(c);
                    self.bump();
                }
                Ok(Some(Sexpr::Symbol(sym, start)))
            }
        }
    }
}

/// Reads every top-level s-expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexpr>, ParseError> {
    let mut reader = Reader { chars: text.chars().peekable(), pos: Pos { line: 1, column: 1 } };
    let mut out = Vec::new();
    while let Some(expr) = reader.read()? {
        out.push(expr);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let exprs = read_all("; header\n(a (b c))\n  d").unwrap();
        assert_eq!(exprs.len(), 2);
        assert_eq!(exprs[0].pos(), Pos { line: 2, column: 1 });
        assert_eq!(exprs[1].pos(), Pos { line: 3, column: 3 });
        let Sexpr::List(items, _) = &exprs[0] else { panic!() };
        assert_eq!(items[1].pos(), Pos { line: 2, column: 4 });
    }

    #[test]
    fn unbalanced_open_points_at_the_paren() {
        let err = read_all("(a)\n  (b (c)").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn stray_close_is_an_error() {
        let err = read_all("(a))").unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
    }
}
