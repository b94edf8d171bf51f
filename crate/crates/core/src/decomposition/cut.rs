use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::flow::BendingRule;
use crate::word_algebra::{RelatorLayout, SurfacePresentation, TwoChain, Word};
use crate::{Error, Result};

/// The shipped cut topologies of the closed genus-2 surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    SeparatingGenus2,
    NonseparatingGenus2,
    PantsGenus2,
}

impl CutKind {
    pub const ALL: [CutKind; 3] = [
        CutKind::SeparatingGenus2,
        CutKind::NonseparatingGenus2,
        CutKind::PantsGenus2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutKind::SeparatingGenus2 => "separating-genus2",
            CutKind::NonseparatingGenus2 => "nonseparating-genus2",
            CutKind::PantsGenus2 => "pants-genus2",
        }
    }
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CutKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unsupported {
                what: "cut kind",
                name: s.to_string(),
            })
    }
}

/// A subsurface with its inclusion, one ambient word per piece generator.
#[derive(Clone, Debug)]
pub struct Piece {
    pub presentation: SurfacePresentation,
    pub inclusion: Vec<Word>,
}

impl Piece {
    /// Images of the piece's boundary generators.
    pub fn peripheral_images(&self) -> Vec<Word> {
        self.presentation
            .peripheral_words()
            .iter()
            .map(|w| w.substitute(&self.inclusion))
            .collect()
    }
}

/// A cut curve, its transverse word (non-tree edges only) and how bending acts.
#[derive(Clone, Debug)]
pub struct CutCurve {
    pub word: Word,
    pub transverse: Option<Word>,
    pub bending: BendingRule,
}

#[derive(Clone, Debug)]
pub struct CutSystem {
    pub kind: CutKind,
    pub ambient: SurfacePresentation,
    pub pieces: Vec<Piece>,
    pub cuts: Vec<CutCurve>,
    /// Correction terms `c` with `[Σ] = Σ ι_i[Σ_i] + c`, when a single-cut identity applies.
    pub chain_correction: Option<TwoChain>,
}

fn w(codes: &[i32]) -> Word {
    Word::from_codes(codes)
}

/// Ambient generators: `x1 = 1, y1 = 2, x2 = 3, y2 = 4` in signed-code notation.
pub fn build_cut_system(kind: CutKind) -> CutSystem {
    let ambient = SurfacePresentation::closed(2);
    let comm1 = w(&[1, 2, -1, -2]);
    match kind {
        CutKind::SeparatingGenus2 => {
            // ξ = [x1, y1]; piece 1 ⟨x, y, z | [x, y] z⟩, piece 2 ⟨x, y, z | z [x, y]⟩.
            let piece1 = Piece {
                presentation: SurfacePresentation::one_holed_torus(),
                inclusion: vec![w(&[1]), w(&[2]), comm1.inverse()],
            };
            let piece2 = Piece {
                presentation: SurfacePresentation::one_holed_torus()
                    .with_layout(RelatorLayout::BoundaryFirst),
                inclusion: vec![w(&[3]), w(&[4]), comm1.clone()],
            };
            let z10 = comm1.inverse();
            let correction = TwoChain::new().with_pair(-1, z10.inverse(), z10);
            CutSystem {
                kind,
                ambient,
                pieces: vec![piece1, piece2],
                cuts: vec![CutCurve {
                    word: comm1,
                    transverse: None,
                    bending: BendingRule::Conjugate(vec![2, 3]),
                }],
                chain_correction: Some(correction),
            }
        }
        CutKind::NonseparatingGenus2 => {
            // ξ = x1 = z1, ξ^⊥ = y1, z2 = y1 x1⁻¹ y1⁻¹; piece ⟨x, y, z1, z2 | z1 z2 [x, y]⟩.
            let z1 = w(&[1]);
            let z2 = w(&[2, -1, -2]);
            let perp = w(&[2]);
            let piece = Piece {
                presentation: SurfacePresentation::new(1, 2)
                    .with_layout(RelatorLayout::BoundaryFirst),
                inclusion: vec![w(&[3]), w(&[4]), z1.clone(), z2.clone()],
            };
            let correction = TwoChain::new()
                .with_pair(-1, z1.clone(), z2.clone())
                .with_pair(-1, z1.concat(&perp).concat(&z1.inverse()), z1.clone())
                .with_pair(1, z1.clone(), perp.clone())
                .with_pair(-1, z1.concat(&z2), perp.clone());
            CutSystem {
                kind,
                ambient,
                pieces: vec![piece],
                cuts: vec![CutCurve {
                    word: z1,
                    transverse: Some(perp),
                    bending: BendingRule::RightMultiply(1),
                }],
                chain_correction: Some(correction),
            }
        }
        CutKind::PantsGenus2 => {
            // Cuts x1, x2, [x1, y1]; pants ⟨z1, z2, z3 | z1 z2 z3⟩ on each side.
            let pants1 = Piece {
                presentation: SurfacePresentation::pants(),
                inclusion: vec![w(&[1]), w(&[2, -1, -2]), w(&[2, 1, -2, -1])],
            };
            let pants2 = Piece {
                presentation: SurfacePresentation::pants(),
                inclusion: vec![w(&[3]), w(&[4, -3, -4]), w(&[4, 3, -4, -3])],
            };
            CutSystem {
                kind,
                ambient,
                pieces: vec![pants1, pants2],
                cuts: vec![
                    CutCurve {
                        word: w(&[1]),
                        transverse: Some(w(&[2])),
                        bending: BendingRule::RightMultiply(1),
                    },
                    CutCurve {
                        word: w(&[3]),
                        transverse: Some(w(&[4])),
                        bending: BendingRule::RightMultiply(3),
                    },
                    CutCurve {
                        word: comm1,
                        transverse: None,
                        bending: BendingRule::Conjugate(vec![2, 3]),
                    },
                ],
                chain_correction: None,
            }
        }
    }
}

/// Cyclically reduced form of a reduced word.
fn cyclic_reduce(w: &Word) -> Word {
    let mut letters = w.letters().to_vec();
    while letters.len() >= 2 && letters[0] == letters[letters.len() - 1].inverse() {
        letters.pop();
        letters.remove(0);
    }
    Word::from_letters(letters)
}

/// Whether `u` and `v` are conjugate in the free group.
pub(crate) fn free_conjugate(u: &Word, v: &Word) -> bool {
    let a = cyclic_reduce(u);
    let b = cyclic_reduce(v);
    if a.len() != b.len() {
        return false;
    }
    if a.is_identity() {
        return true;
    }
    let la = a.letters();
    let lb = b.letters();
    (0..la.len()).any(|r| (0..la.len()).all(|i| la[(i + r) % la.len()] == lb[i]))
}

impl CutSystem {
    pub fn peripheral_cut_words(&self) -> Vec<Word> {
        self.cuts.iter().map(|c| c.word.clone()).collect()
    }

    /// Every piece relator maps to the identity or to a conjugate of `R^{±1}`.
    pub fn inclusions_are_homomorphisms(&self) -> bool {
        let r = self.ambient.relator();
        self.pieces.iter().all(|p| {
            let img = p.presentation.relator().substitute(&p.inclusion);
            img.is_identity() || free_conjugate(&img, &r) || free_conjugate(&img, &r.inverse())
        })
    }

    /// `[Σ] − Σ ι_i[Σ_i] − c` in canonical form; `None` without a correction.
    pub fn chain_identity_holds(&self) -> Option<bool> {
        let correction = self.chain_correction.as_ref()?;
        let mut rhs = correction.clone();
        for p in &self.pieces {
            rhs.extend(
                &p.presentation
                    .fundamental_class(&Word::identity())
                    .substitute(&p.inclusion),
            );
        }
        Some(self.ambient.fundamental_class(&Word::identity()).equivalent(&rhs))
    }
}
