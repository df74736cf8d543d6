//! Integer polynomials in the single formal symbol `q`.
//!
//! Prime families are written with generators whose coordinates are low
//! degree polynomials in `q` (the residue characteristic being varied). All
//! lattice arithmetic happens after evaluation at a concrete integer.

use crate::matrix::Int;
use num_traits::Zero;
use std::fmt;

/// Polynomial in `q`, coefficients low-order first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<Int>,
}

impl QPoly {
    pub fn constant(c: Int) -> Self {
        QPoly { coeffs: vec![c] }.trimmed()
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(Int::from(c))
    }

    /// The monomial `c * q^deg`.
    pub fn monomial(c: i64, deg: usize) -> Self {
        let mut coeffs = vec![Int::zero(); deg + 1];
        coeffs[deg] = Int::from(c);
        QPoly { coeffs }.trimmed()
    }

    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Int::zero());
        }
        self
    }

    pub fn eval(&self, q: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let body = match deg {
                0 => c.to_string(),
                1 if c == &Int::from(1) => "q".to_string(),
                1 if c == &Int::from(-1) => "-q".to_string(),
                1 => format!("{c}q"),
                _ if c == &Int::from(1) => format!("q^{deg}"),
                _ if c == &Int::from(-1) => format!("-q^{deg}"),
                _ => format!("{c}q^{deg}"),
            };
            terms.push(body);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            if let Some(stripped) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        write!(f, "{out}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_display() {
        // q^2 - 4
        let p = QPoly {
            coeffs: vec![Int::from(-4), Int::zero(), Int::from(1)],
        };
        assert_eq!(p.eval(&Int::from(3)), Int::from(5));
        assert_eq!(p.to_string(), "q^2 - 4");
        assert_eq!(QPoly::q().to_string(), "q");
        assert_eq!(QPoly::from_i64(-2).to_string(), "-2");
    }
}
