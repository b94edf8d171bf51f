use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A generator or its inverse, stored as the signed code `±(index + 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        let code = generator as i32 + 1;
        Letter(if inverse { -code } else { code })
    }

    /// Decodes `±(index + 1)`; returns `None` for 0.
    pub fn from_code(code: i32) -> Option<Self> {
        (code != 0).then_some(Letter(code))
    }

    pub fn code(self) -> i32 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

/// A freely reduced word in a free group. The empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Reduces a raw sequence of signed codes, rejecting codes outside `1..=rank`.
pub fn reduce_word(codes: &[i64], rank: usize) -> Result<Word> {
    let mut letters = Vec::with_capacity(codes.len());
    for &code in codes {
        if code == 0 || code.unsigned_abs() as usize > rank {
            return Err(Error::UnknownGenerator { code, rank });
        }
        letters.push(Letter(code as i32));
    }
    Ok(Word::from_letters(letters))
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter::new(index, false)])
    }

    pub fn generator_inverse(index: usize) -> Self {
        Word(vec![Letter::new(index, true)])
    }

    /// Builds a word from arbitrary letters, freely reducing on the way.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Builds a word from signed codes without a rank check. Panics on a 0 code.
    pub fn from_codes(codes: &[i32]) -> Self {
        Word::from_letters(
            codes
                .iter()
                .map(|&c| Letter::from_code(c).expect("letter code 0 is not a generator")),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn codes(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.code()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn conjugate_by(&self, h: &Word) -> Word {
        h.concat(self).concat(&h.inverse())
    }

    /// Largest generator index occurring in the word.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    /// Applies the homomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Vec::new();
        for l in &self.0 {
            let img = &images[l.generator()];
            if l.is_inverse() {
                out.extend(img.inverse().0);
            } else {
                out.extend(img.0.iter().copied());
            }
        }
        Word::from_letters(out)
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl Mul for Word {
    type Output = Word;
    fn mul(self, rhs: Word) -> Word {
        self.concat(&rhs)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "s{}", l.generator() + 1)?;
            if l.is_inverse() {
                write!(f, "⁻¹")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.codes().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let codes = Vec::<i32>::deserialize(d)?;
        if codes.contains(&0) {
            return Err(serde::de::Error::custom("letter code 0 does not name a generator"));
        }
        Ok(Word::from_codes(&codes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_examples() {
        assert!(reduce_word(&[1, -1], 2).unwrap().is_identity());
        assert_eq!(reduce_word(&[1, 2, -2, 1], 2).unwrap().codes(), vec![1, 1]);
        assert_eq!(reduce_word(&[1, 2, -1], 2).unwrap().codes(), vec![1, 2, -1]);
    }

    #[test]
    fn cascading_cancellation() {
        let w = reduce_word(&[1, 2, 3, -3, -2, -1, 2], 3).unwrap();
        assert_eq!(w.codes(), vec![2]);
    }

    #[test]
    fn unknown_generator_rejected() {
        assert!(matches!(
            reduce_word(&[1, 5], 4),
            Err(Error::UnknownGenerator { code: 5, rank: 4 })
        ));
        assert!(reduce_word(&[0], 4).is_err());
        assert!(reduce_word(&[-5], 4).is_err());
    }

    #[test]
    fn inverse_and_commutator() {
        let a = Word::from_codes(&[1, 2]);
        assert!((&a * &a.inverse()).is_identity());
        let c = Word::commutator(&Word::generator(0), &Word::generator(1));
        assert_eq!(c.codes(), vec![1, 2, -1, -2]);
        assert_eq!(a.pow(-2).codes(), vec![-2, -1, -2, -1]);
    }

    #[test]
    fn substitution_is_homomorphism() {
        let images = vec![Word::from_codes(&[1, 2]), Word::from_codes(&[-1])];
        let w = Word::from_codes(&[1, -2, 1]);
        assert_eq!(w.substitute(&images).codes(), vec![1, 2, 1, 1, 2]);
    }

    #[test]
    fn json_roundtrip() {
        let w = Word::from_codes(&[3, -1, 2]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, "[3,-1,2]");
        let back: Word = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<Word>("[1,0]").is_err());
    }
}
