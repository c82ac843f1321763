use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Multivariate polynomial as a list of `(coefficient, exponents)` terms.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Poly {
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Poly {
    pub fn new(terms: Vec<(f64, Vec<u32>)>) -> Self {
        Self { terms }
    }

    pub fn constant(c: f64, vars: usize) -> Self {
        Self { terms: alloc::vec![(c, alloc::vec![0; vars])] }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Number of variables (0 for the empty polynomial).
    pub fn vars(&self) -> usize {
        self.terms.first().map_or(0, |t| t.1.len())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.0 == 0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(c, e)| *c != 0.0 && e[var] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (c * e[var] as f64, e2)
            })
            .collect();
        Poly { terms }
    }

    /// Degree of the polynomial in variable `var`.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().filter(|t| t.0 != 0.0).map(|t| t.1[var]).max().unwrap_or(0)
    }

    /// Negates all coefficients.
    pub fn negated(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(c, e)| (-c, e.clone())).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn eval_and_derivative() {
        // p = 3 x^2 y - y
        let p = Poly::new(vec![(3.0, vec![2, 1]), (-1.0, vec![0, 1])]);
        assert_eq!(p.eval(&[2.0, 0.5]), 5.5);
        assert_eq!(p.derivative(0).eval(&[2.0, 0.5]), 6.0);
        assert_eq!(p.derivative(1).eval(&[2.0, 0.5]), 11.0);
        assert_eq!(p.degree_in(0), 2);
    }
}
