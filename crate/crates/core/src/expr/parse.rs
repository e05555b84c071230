use super::{Expr, Func, Var};
use crate::{Error, Result};

/// Parses an expression in the chart/map grammar.
pub fn parse_expression(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

/// Parses a map component; `conj` and `abs2` are rejected since maps are holomorphic.
pub fn parse_map_component(text: &str) -> Result<Expr> {
    let e = parse_expression(text)?;
    if e.has_antiholomorphic() {
        return Err(Error::Holomorphy(format!("map component '{text}' uses conj/abs2")));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.uint().ok_or_else(|| self.error("expected a nonnegative integer exponent"))?;
            let n = u32::try_from(n).map_err(|_| self.error("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Option<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |s: &mut Self| {
            let b = s.pos;
            while s.pos < s.src.len() && s.src[s.pos].is_ascii_digit() {
                s.pos += 1;
            }
            s.pos > b
        };
        let int_part = digits(self);
        let mut frac_part = false;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac_part = digits(self);
        }
        if !int_part && !frac_part {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if !digits(self) {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            position: start,
            message: format!("malformed number '{text}'"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse { position: start, message: format!("number '{text}' overflows") });
        }
        Ok(Expr::Num(value))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii letters");
                match word {
                    "i" => Ok(Expr::ImagUnit),
                    "z" | "w" => {
                        let letter = word.as_bytes()[0] as char;
                        let index = self
                            .uint()
                            .ok_or_else(|| Error::Parse { position: start, message: format!("'{letter}' needs an index") })?;
                        if index == 0 {
                            return Err(Error::Parse {
                                position: start,
                                message: "variable indices start at 1".into(),
                            });
                        }
                        Ok(Expr::Var(Var { letter, index: index as usize }))
                    }
                    "conj" | "log" | "exp" => {
                        let f = match word {
                            "conj" => Func::Conj,
                            "log" => Func::Log,
                            _ => Func::Exp,
                        };
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::Func(f, Box::new(arg)))
                    }
                    "abs" if self.src.get(self.pos) == Some(&b'2') => {
                        self.pos += 1;
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::Func(Func::Abs2, Box::new(arg)))
                    }
                    _ => Err(Error::Parse { position: start, message: format!("unknown identifier '{word}'") }),
                }
            }
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
        }
    }
}
