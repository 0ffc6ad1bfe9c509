use super::{SftSpec, Sym};
use crate::error::{Error, Result};

/// Dense constraints of a 2D spec whose forbidden patterns are single
/// cells or nearest-neighbour dominoes.
#[derive(Clone, Debug)]
pub(crate) struct DominoRules {
    /// Letters allowed on their own.
    pub letters: Vec<bool>,
    /// `horizontal[a][b]`: `b` may sit right of `a`.
    pub horizontal: Vec<Vec<bool>>,
    /// `vertical[a][b]`: `b` may sit above `a`.
    pub vertical: Vec<Vec<bool>>,
}

impl DominoRules {
    pub fn from_spec(spec: &SftSpec, context: &str) -> Result<Self> {
        if spec.dimension() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "{context} needs a 2D spec"
            )));
        }
        let n = spec.alphabet().len();
        let mut d = DominoRules {
            letters: vec![true; n],
            horizontal: vec![vec![true; n]; n],
            vertical: vec![vec![true; n]; n],
        };
        for p in spec.forbidden() {
            match p.normalized().cells() {
                [(_, a)] => d.letters[*a as usize] = false,
                [((0, 0), a), ((1, 0), b)] => d.horizontal[*a as usize][*b as usize] = false,
                [((0, 0), a), ((0, 1), b)] => d.vertical[*a as usize][*b as usize] = false,
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "{context} supports single-cell and domino patterns only"
                    )))
                }
            }
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn h(&self, a: Sym, b: Sym) -> bool {
        self.horizontal[a as usize][b as usize]
    }

    pub fn v(&self, a: Sym, b: Sym) -> bool {
        self.vertical[a as usize][b as usize]
    }
}
