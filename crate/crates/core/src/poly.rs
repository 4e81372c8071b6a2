//! Real multivariate polynomials in monomial form.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    /// Builds a polynomial, merging repeated multi-indices and dropping zero terms.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (exps, c) in terms {
            assert_eq!(exps.len(), dim, "multi-index length must equal dimension");
            *merged.entry(exps).or_insert(0.0) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(exponents, coeff)| Monomial { exponents, coeff })
            .collect();
        Self { dim, terms }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, [(vec![0; dim], c)])
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::new(dim, [(e, 1.0)])
    }

    /// `|x|^2 - radius^2`.
    pub fn sphere(dim: usize, radius: f64) -> Self {
        let mut terms: Vec<(Vec<u32>, f64)> = (0..dim)
            .map(|a| {
                let mut e = vec![0; dim];
                e[a] = 2;
                (e, 1.0)
            })
            .collect();
        terms.push((vec![0; dim], -radius * radius));
        Self::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|m| m.exponents.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                m.coeff
                    * m.exponents
                        .iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }

    pub fn partial(&self, axis: usize) -> Self {
        Self::new(
            self.dim,
            self.terms.iter().filter(|m| m.exponents[axis] > 0).map(|m| {
                let mut e = m.exponents.clone();
                let k = e[axis];
                e[axis] -= 1;
                (e, m.coeff * k as f64)
            }),
        )
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|a| self.partial(a).eval(x)).collect()
    }

    /// Highest-degree homogeneous part.
    pub fn leading_form(&self) -> Self {
        let deg = self.degree();
        Self::new(
            self.dim,
            self.terms
                .iter()
                .filter(|m| m.exponents.iter().sum::<u32>() == deg)
                .map(|m| (m.exponents.clone(), m.coeff)),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect();
                terms.push((e, a.coeff * b.coeff));
            }
        }
        Self::new(self.dim, terms)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.dim, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::new(
            self.dim,
            self.terms
                .iter()
                .chain(&other.terms)
                .map(|m| (m.exponents.clone(), m.coeff)),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.dim, self.terms.iter().map(|m| (m.exponents.clone(), m.coeff * c)))
    }
}
