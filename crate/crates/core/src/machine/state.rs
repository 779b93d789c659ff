//! Token states: polynomials over tokens with complex coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::token::{GroundToken, Token, TokenLike};

/// Coefficients smaller than this are dropped.
pub const PRUNE: f64 = 1e-12;

/// A sorted token multiset; the empty product is the monomial 1.
pub type TermKey<T> = Vec<T>;

/// A sum of monomials. Terms are keyed by their sorted token multiset, so like
/// terms merge on insertion. The zero polynomial has no terms.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T: TokenLike> {
    terms: BTreeMap<TermKey<T>, Complex64>,
}

pub type TokenState = State<Token>;
pub type GroundTokenState = State<GroundToken>;

impl<T: TokenLike> Default for State<T> {
    fn default() -> Self {
        State {
            terms: BTreeMap::new(),
        }
    }
}

impl<T: TokenLike> State<T> {
    /// The zero polynomial.
    pub fn zero() -> Self {
        State::default()
    }

    /// The monomial `1`.
    pub fn one() -> Self {
        State::term(Vec::new(), Complex64::new(1.0, 0.0))
    }

    pub fn term(tokens: Vec<T>, coeff: Complex64) -> Self {
        let mut s = State::zero();
        s.add_term(tokens, coeff);
        s
    }

    /// The product of `tokens` with coefficient 1.
    pub fn monomial(tokens: Vec<T>) -> Self {
        State::term(tokens, Complex64::new(1.0, 0.0))
    }

    /// A single token with coefficient 1.
    pub fn token(t: T) -> Self {
        State::term(vec![t], Complex64::new(1.0, 0.0))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<T>, Complex64)>) -> Self {
        let mut s = State::zero();
        for (tokens, c) in terms {
            s.add_term(tokens, c);
        }
        s
    }

    /// Adds `coeff · tokens`, merging with a like term.
    pub fn add_term(&mut self, mut tokens: Vec<T>, coeff: Complex64) {
        tokens.sort();
        self.add_sorted(tokens, coeff);
    }

    pub(crate) fn add_sorted(&mut self, key: TermKey<T>, coeff: Complex64) {
        debug_assert!(key.windows(2).all(|w| w[0] <= w[1]));
        match self.terms.entry(key) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().norm() < PRUNE {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if coeff.norm() >= PRUNE {
                    v.insert(coeff);
                }
            }
        }
    }

    pub(crate) fn remove(&mut self, key: &TermKey<T>) -> Option<Complex64> {
        self.terms.remove(key)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey<T>, &Complex64)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &TermKey<T>> {
        self.terms.keys()
    }

    pub fn coeff(&self, key: &[T]) -> Complex64 {
        self.terms
            .get(key)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn nth(&self, i: usize) -> Option<(&TermKey<T>, &Complex64)> {
        self.terms.iter().nth(i)
    }

    pub fn token_count(&self) -> usize {
        self.terms.keys().map(Vec::len).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        State::from_terms(self.terms.iter().map(|(k, c)| (k.clone(), c * s)))
    }

    /// Largest coefficient difference over the union of terms.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in &self.terms {
            worst = worst.max((c - other.coeff(k)).norm());
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_deviation(other) <= tol
    }

    /// Applies `f` to every token, keeping coefficients.
    pub fn map_tokens<U: TokenLike>(&self, f: impl Fn(&T) -> Vec<U>) -> State<U> {
        State::from_terms(
            self.terms
                .iter()
                .map(|(k, c)| (k.iter().flat_map(&f).collect(), *c)),
        )
    }
}

impl<T: TokenLike> Add for &State<T> {
    type Output = State<T>;

    fn add(self, rhs: &State<T>) -> State<T> {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_sorted(k.clone(), *c);
        }
        out
    }
}

/// Polynomial product.
impl<T: TokenLike> Mul for &State<T> {
    type Output = State<T>;

    fn mul(self, rhs: &State<T>) -> State<T> {
        let mut out = State::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let mut k = a.clone();
                k.extend(b.iter().cloned());
                out.add_term(k, ca * cb);
            }
        }
        out
    }
}
