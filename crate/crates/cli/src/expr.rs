//! Polynomial input: `q=5:1,0,1`, bare coefficients `1,0,1` (low first), or an
//! expression such as `x^26 - 1` or `2x^3 + x - 4`.

use powercount::gfq::Field;
use powercount::{Error, MonicPoly, Result};

pub fn parse_poly(field: &Field, input: &str) -> Result<MonicPoly> {
    let s = input.trim();
    if s.starts_with("q=") {
        let f = MonicPoly::parse_text(s)?;
        if f.q() != field.q() as u64 {
            return Err(Error::Parse(format!("{s:?} is over F_{}, expected F_{}", f.q(), field.q())));
        }
        return Ok(f);
    }
    if s.contains(',') || s.chars().all(|c| c.is_ascii_digit()) {
        return MonicPoly::parse_coeffs(field, s);
    }
    let coeffs = Parser { src: s.as_bytes(), pos: 0 }.polynomial()?;
    let reduced: Vec<u32> = coeffs.iter().map(|&c| field.from_i64(c)).collect();
    match reduced.iter().rposition(|&c| c != 0) {
        Some(top) if reduced[top] == 1 => MonicPoly::new(field, reduced[..=top].to_vec()),
        _ => Err(Error::Parse(format!("{s:?} is not monic over F_{}", field.q()))),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {}", self.pos))
    }

    fn integer(&mut self) -> Result<Option<i64>> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().map(Some).map_err(|_| self.error("integer out of range"))
    }

    /// `polynomial := ['+'|'-'] term (('+'|'-') term)*`
    fn polynomial(mut self) -> Result<Vec<i64>> {
        let mut coeffs: Vec<i64> = Vec::new();
        let mut sign = if self.eat(b'-') {
            -1
        } else {
            self.eat(b'+');
            1
        };
        loop {
            let (c, e) = self.term()?;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0);
            }
            coeffs[e] += sign * c;
            sign = match self.peek() {
                None => break,
                Some(b'+') => 1,
                Some(b'-') => -1,
                Some(_) => return Err(self.error("expected '+' or '-'")),
            };
            self.pos += 1;
        }
        Ok(coeffs)
    }

    /// `term := integer ['*'] ['x' ['^' integer]] | 'x' ['^' integer]`
    fn term(&mut self) -> Result<(i64, usize)> {
        let coeff = self.integer()?;
        if coeff.is_some() {
            self.eat(b'*');
        }
        if !self.eat(b'x') {
            return coeff.map(|c| (c, 0)).ok_or_else(|| self.error("expected a term"));
        }
        let exp = if self.eat(b'^') {
            let e = self.integer()?.ok_or_else(|| self.error("expected an exponent"))?;
            usize::try_from(e).map_err(|_| self.error("exponent out of range"))?
        } else {
            1
        };
        Ok((coeff.unwrap_or(1), exp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use powercount::FieldCtx;

    #[test]
    fn expressions() {
        let f5 = FieldCtx::of_order(5).unwrap();
        let p = parse_poly(&f5, "x^26-1").unwrap();
        assert_eq!(p.degree(), 26);
        assert_eq!(p.constant_term(), 4);
        assert_eq!(parse_poly(&f5, "x^4 + 3x^3 + 3*x + 1").unwrap().to_text(), "q=5:1,3,0,3,1");
        assert_eq!(parse_poly(&f5, "-1 + x^2 + x^2 - x^2").unwrap().to_text(), "q=5:4,0,1");
        assert_eq!(parse_poly(&f5, "6x^2 + 1").unwrap().to_text(), "q=5:1,0,1");
    }

    #[test]
    fn other_forms_and_errors() {
        let f3 = FieldCtx::of_order(3).unwrap();
        assert_eq!(parse_poly(&f3, "q=3:2,0,1").unwrap().to_text(), "q=3:2,0,1");
        assert_eq!(parse_poly(&f3, "2,0,1").unwrap().to_text(), "q=3:2,0,1");
        assert!(parse_poly(&f3, "q=5:1,1").is_err());
        assert!(parse_poly(&f3, "2x^2 + 1").is_err());
        assert!(parse_poly(&f3, "x^ + 1").is_err());
        assert!(parse_poly(&f3, "x y").is_err());
        assert!(parse_poly(&f3, "3x^2 + x").is_ok());
    }
}
