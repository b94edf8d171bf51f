use serde::{Deserialize, Serialize};

use super::chain::TwoChain;
use super::group_ring::GroupRingElement;
use super::word::Word;
use crate::{Error, Result};

/// Where the boundary generators sit in the relator.
///
/// `HandlesFirst` is `Π[x_i,y_i]·Πz_j`; `BoundaryFirst` is the cyclic conjugate
/// `Πz_j·Π[x_i,y_i]` used by some subsurface pieces of a cut system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelatorLayout {
    #[default]
    HandlesFirst,
    BoundaryFirst,
}

impl RelatorLayout {
    fn is_default(&self) -> bool {
        *self == RelatorLayout::HandlesFirst
    }
}

/// One-relator presentation of a compact orientable surface with generators
/// ordered `x_1, y_1, …, x_g, y_g, z_1, …, z_b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfacePresentation {
    pub genus: usize,
    pub boundaries: usize,
    #[serde(default, skip_serializing_if = "RelatorLayout::is_default")]
    pub layout: RelatorLayout,
}

impl SurfacePresentation {
    pub fn new(genus: usize, boundaries: usize) -> Self {
        Self {
            genus,
            boundaries,
            layout: RelatorLayout::HandlesFirst,
        }
    }

    pub fn with_layout(mut self, layout: RelatorLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn closed(genus: usize) -> Self {
        Self::new(genus, 0)
    }

    pub fn pants() -> Self {
        Self::new(0, 3)
    }

    pub fn one_holed_torus() -> Self {
        Self::new(1, 1)
    }

    pub fn rank(&self) -> usize {
        2 * self.genus + self.boundaries
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundaries as i64
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.euler_characteristic() < 0
    }

    pub fn is_closed(&self) -> bool {
        self.boundaries == 0
    }

    pub fn require_hyperbolic(&self) -> Result<()> {
        if self.is_hyperbolic() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "surface of genus {} with {} boundary components is not hyperbolic",
                self.genus, self.boundaries
            )))
        }
    }

    pub fn x_index(&self, i: usize) -> usize {
        2 * i
    }

    pub fn y_index(&self, i: usize) -> usize {
        2 * i + 1
    }

    pub fn z_index(&self, j: usize) -> usize {
        2 * self.genus + j
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.rank());
        for i in 1..=self.genus {
            names.push(format!("x{i}"));
            names.push(format!("y{i}"));
        }
        for j in 1..=self.boundaries {
            names.push(format!("z{j}"));
        }
        names
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generator_names().iter().position(|n| n == name)
    }

    /// The boundary words `z_1, …, z_b`.
    pub fn peripheral_words(&self) -> Vec<Word> {
        (0..self.boundaries)
            .map(|j| Word::generator(self.z_index(j)))
            .collect()
    }

    pub fn relator(&self) -> Word {
        let mut handles = Word::identity();
        for i in 0..self.genus {
            handles = handles.concat(&Word::commutator(
                &Word::generator(self.x_index(i)),
                &Word::generator(self.y_index(i)),
            ));
        }
        let mut boundary = Word::identity();
        for j in 0..self.boundaries {
            boundary = boundary.concat(&Word::generator(self.z_index(j)));
        }
        match self.layout {
            RelatorLayout::HandlesFirst => handles.concat(&boundary),
            RelatorLayout::BoundaryFirst => boundary.concat(&handles),
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(g) if g >= self.rank() => Err(Error::UnknownGenerator {
                code: g as i64 + 1,
                rank: self.rank(),
            }),
            _ => Ok(()),
        }
    }

    /// Fox derivative with a generator range check.
    pub fn fox_derivative(&self, a: &GroupRingElement, gen: usize) -> Result<GroupRingElement> {
        if gen >= self.rank() {
            return Err(Error::UnknownGenerator {
                code: gen as i64 + 1,
                rank: self.rank(),
            });
        }
        Ok(a.fox_derivative(gen))
    }

    /// `Σ_s [h·∂R/∂s | s]` over all generators `s`, with the relator `R` of this presentation.
    pub fn fundamental_class(&self, h: &Word) -> TwoChain {
        let r = GroupRingElement::from_word(self.relator());
        let mut chain = TwoChain::new();
        for s in 0..self.rank() {
            chain.push(r.fox_derivative(s).left_mul_word(h), Word::generator(s));
        }
        chain
    }
}
