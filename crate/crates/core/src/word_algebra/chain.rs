use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::group_ring::GroupRingElement;
use super::word::Word;

/// A formal sum of bracket pairs `[a | x]`, linear in the group-ring slot `a`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TwoChain {
    terms: Vec<(GroupRingElement, Word)>,
}

impl TwoChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, a: GroupRingElement, x: Word) {
        self.terms.push((a, x));
    }

    pub fn with(mut self, a: GroupRingElement, x: Word) -> Self {
        self.push(a, x);
        self
    }

    /// Adds `sign·[g | x]` for words `g`, `x`.
    pub fn with_pair(self, sign: i64, g: Word, x: Word) -> Self {
        self.with(GroupRingElement::from_word(g).scale(&BigInt::from(sign)), x)
    }

    pub fn terms(&self) -> &[(GroupRingElement, Word)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn extend(&mut self, other: &TwoChain) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn plus(&self, other: &TwoChain) -> TwoChain {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn neg(&self) -> TwoChain {
        TwoChain {
            terms: self.terms.iter().map(|(a, x)| (-a, x.clone())).collect(),
        }
    }

    pub fn minus(&self, other: &TwoChain) -> TwoChain {
        self.plus(&other.neg())
    }

    pub fn left_mul_word(&self, h: &Word) -> TwoChain {
        TwoChain {
            terms: self
                .terms
                .iter()
                .map(|(a, x)| (a.left_mul_word(h), x.clone()))
                .collect(),
        }
    }

    /// Pushes the chain forward along `generator i ↦ images[i]`.
    pub fn substitute(&self, images: &[Word]) -> TwoChain {
        TwoChain {
            terms: self
                .terms
                .iter()
                .map(|(a, x)| (a.substitute(images), x.substitute(images)))
                .collect(),
        }
    }

    /// Normal form: first slots expanded into words, coefficients of equal pairs
    /// collected, and pairs with an identity word in either slot dropped.
    pub fn canonical(&self) -> BTreeMap<(Word, Word), BigInt> {
        let mut out: BTreeMap<(Word, Word), BigInt> = BTreeMap::new();
        for (a, x) in &self.terms {
            if x.is_identity() {
                continue;
            }
            for (g, c) in a.terms() {
                if g.is_identity() {
                    continue;
                }
                *out.entry((g.clone(), x.clone())).or_default() += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn equivalent(&self, other: &TwoChain) -> bool {
        self.canonical() == other.canonical()
    }
}
