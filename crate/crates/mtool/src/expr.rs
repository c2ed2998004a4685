//! Clopen expression parser for the command line: `[bits]`, `~e`, `e+e`,
//! `e*e`, `{}` and parentheses, with `~` binding tightest, then `*`, then
//! `+`.

use mtool_core::{BitPath, Clopen};

use crate::ParseError;

pub fn parse_clopen(text: &str, max_depth: usize) -> Result<Clopen, ParseError> {
    let mut p = ExprParser {
        chars: text.char_indices().peekable(),
        text,
        max_depth,
    };
    let value = p.expr()?;
    if let Some(&(pos, c)) = p.chars.peek() {
        return Err(p.error(pos, format!("unexpected `{c}`")));
    }
    Ok(value)
}

/// Comma-separated list of clopen expressions.
pub fn parse_clopen_list(text: &str, max_depth: usize) -> Result<Vec<Clopen>, ParseError> {
    text.split(',')
        .map(|part| parse_clopen(part, max_depth))
        .collect()
}

struct ExprParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    max_depth: usize,
}

impl<'a> ExprParser<'a> {
    fn error(&self, pos: usize, msg: String) -> ParseError {
        ParseError {
            line: 1,
            col: pos + 1,
            msg: format!("{msg} in expression `{}`", self.text),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(&(_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn expr(&mut self) -> Result<Clopen, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if matches!(self.chars.peek(), Some(&(_, '+'))) {
                self.chars.next();
                acc = acc.join(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Clopen, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if matches!(self.chars.peek(), Some(&(_, '*'))) {
                self.chars.next();
                acc = acc.meet(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Clopen, ParseError> {
        self.skip_ws();
        match self.chars.peek().copied() {
            Some((_, '~')) => {
                self.chars.next();
                Ok(self.factor()?.complement())
            }
            Some((_, '(')) => {
                self.chars.next();
                let inner = self.expr()?;
                self.skip_ws();
                match self.chars.next() {
                    Some((_, ')')) => Ok(inner),
                    Some((pos, c)) => Err(self.error(pos, format!("expected `)`, got `{c}`"))),
                    None => Err(self.error(self.text.len(), "unclosed `(`".into())),
                }
            }
            Some((start, '[')) => {
                self.chars.next();
                let mut bits = String::new();
                loop {
                    match self.chars.next() {
                        Some((_, ']')) => break,
                        Some((_, c @ ('0' | '1'))) => bits.push(c),
                        Some((pos, c)) => {
                            return Err(self.error(pos, format!("bad path character `{c}`")))
                        }
                        None => return Err(self.error(self.text.len(), "unclosed `[`".into())),
                    }
                }
                let path = BitPath::parse(&bits)
                    .map_err(|e| self.error(start, e.to_string()))?;
                if path.len() > self.max_depth {
                    return Err(self.error(
                        start,
                        format!("path [{path}] exceeds depth limit {}", self.max_depth),
                    ));
                }
                Ok(Clopen::cylinder(path))
            }
            Some((_, '{')) => {
                self.chars.next();
                match self.chars.next() {
                    Some((_, '}')) => Ok(Clopen::empty()),
                    Some((pos, c)) => Err(self.error(pos, format!("expected `}}`, got `{c}`"))),
                    None => Err(self.error(self.text.len(), "unclosed `{`".into())),
                }
            }
            Some((pos, c)) => Err(self.error(pos, format!("unexpected `{c}`"))),
            None => Err(self.error(self.text.len(), "empty expression".into())),
        }
    }
}
