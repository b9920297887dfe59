use serde::{Deserialize, Serialize};

/// A permutation of the tetrahedron vertex labels `{0, 1, 2, 3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u8; 4]", into = "[u8; 4]")]
pub struct Perm([u8; 4]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2, 3]);

    pub fn new(images: [u8; 4]) -> Option<Perm> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm(images))
    }

    /// The order-preserving map from face `i` onto face `j`, sending `i` to `j`.
    pub fn ordered(i: usize, j: usize) -> Perm {
        let src = (0..4).filter(|&x| x != i);
        let mut dst = (0..4u8).filter(|&x| x as usize != j);
        let mut p = [0u8; 4];
        p[i] = j as u8;
        for x in src {
            p[x] = dst.next().unwrap();
        }
        Perm(p)
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(&self) -> Perm {
        let mut p = [0u8; 4];
        for (i, &x) in self.0.iter().enumerate() {
            p[x as usize] = i as u8;
        }
        Perm(p)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(std::array::from_fn(|i| self.0[other.0[i] as usize]))
    }

    pub fn sign(&self) -> i8 {
        let mut s = 1;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    s = -s;
                }
            }
        }
        s
    }

    pub fn images(&self) -> [u8; 4] {
        self.0
    }
}

impl TryFrom<[u8; 4]> for Perm {
    type Error = String;
    fn try_from(v: [u8; 4]) -> Result<Self, Self::Error> {
        Perm::new(v).ok_or_else(|| format!("{v:?} is not a permutation of 0..3"))
    }
}

impl From<Perm> for [u8; 4] {
    fn from(p: Perm) -> Self {
        p.0
    }
}
