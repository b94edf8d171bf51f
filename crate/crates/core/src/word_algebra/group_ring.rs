use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::word::Word;

/// A finite integral combination of reduced words; zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::monomial(w, BigInt::one())
    }

    pub fn monomial(w: Word, c: BigInt) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, BigInt)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (w, c) in terms {
            out.add_term(w, c);
        }
        out
    }

    pub fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// The linear extension of `g ↦ g⁻¹`.
    pub fn bar(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.inverse(), c.clone())))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), c * k)))
    }

    pub fn left_mul_word(&self, h: &Word) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (h.concat(w), c.clone())))
    }

    pub fn right_mul_word(&self, h: &Word) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.concat(h), c.clone())))
    }

    /// Image under the ring map induced by `generator i ↦ images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(w, c)| (w.substitute(images), c.clone())),
        )
    }

    /// Fox derivative `∂/∂s_gen`, extended linearly.
    ///
    /// For a word `w = l_1 ⋯ l_m` the derivative collects `+l_1⋯l_{k-1}` for every
    /// `l_k = s` and `-l_1⋯l_k` for every `l_k = s⁻¹`.
    pub fn fox_derivative(&self, gen: usize) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            let letters = w.letters();
            for (k, l) in letters.iter().enumerate() {
                if l.generator() != gen {
                    continue;
                }
                if l.is_inverse() {
                    out.add_term(Word::from_letters(letters[..=k].iter().copied()), -c);
                } else {
                    out.add_term(Word::from_letters(letters[..k].iter().copied()), c.clone());
                }
            }
        }
        out
    }
}

impl From<Word> for GroupRingElement {
    fn from(w: Word) -> Self {
        Self::from_word(w)
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        GroupRingElement::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), -c)))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GroupRingElement {
            type Output = GroupRingElement;
            fn $m(self, rhs: GroupRingElement) -> GroupRingElement {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        -&self
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(i: usize) -> GroupRingElement {
        Word::generator(i).into()
    }

    fn w(codes: &[i32]) -> GroupRingElement {
        Word::from_codes(codes).into()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&g(0) * &w(&[-1]), GroupRingElement::one());
        let lhs = &(&g(0) + &g(1)) * &g(2);
        assert_eq!(lhs, &w(&[1, 3]) + &w(&[2, 3]));
        assert_eq!(&(&g(0) - &g(0)) + &g(1), g(1));
    }

    #[test]
    fn augmentation_examples() {
        let a = &g(0).scale(&BigInt::from(2)) - &g(1);
        assert_eq!(a.augmentation(), BigInt::from(1));
        assert_eq!(GroupRingElement::zero().augmentation(), BigInt::from(0));
    }

    #[test]
    fn bar_examples() {
        let a = &g(0) + &g(1).scale(&BigInt::from(2));
        let expect = &w(&[-1]) + &w(&[-2]).scale(&BigInt::from(2));
        assert_eq!(a.bar(), expect);
        assert_eq!(GroupRingElement::one().bar(), GroupRingElement::one());
    }

    #[test]
    fn fox_basic() {
        assert_eq!(g(0).fox_derivative(0), GroupRingElement::one());
        assert!(g(1).fox_derivative(0).is_zero());
        assert_eq!(w(&[-1]).fox_derivative(0), -&w(&[-1]));
    }

    #[test]
    fn fox_commutator() {
        let c = w(&[1, 2, -1, -2]);
        assert_eq!(
            c.fox_derivative(0),
            &GroupRingElement::one() - &w(&[1, 2, -1])
        );
        assert_eq!(c.fox_derivative(1), &g(0) - &w(&[1, 2, -1, -2]));
    }
}
