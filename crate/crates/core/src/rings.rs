//! Finite commutative coefficient rings `Z/m₁ × … × Z/m_k`.
//!
//! Elements are stored as a dense index into the lexicographic list of
//! residue tuples (first component most significant), so arithmetic is a
//! pair of table lookups.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{gcd, lcm};

/// Hard ceiling on ring size; campaign configs use a smaller limit.
pub const MAX_RING_SIZE: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring needs at least one modulus")]
    Empty,
    #[error("modulus {0} is smaller than 2")]
    ModulusTooSmall(u32),
    #[error("characteristic 2 is excluded")]
    CharacteristicTwo,
    #[error("ring of size {0} exceeds the supported maximum {MAX_RING_SIZE}")]
    TooLarge(usize),
    #[error("cannot parse ring spec {0:?}")]
    BadSpec(String),
    #[error("residue tuple {residues:?} does not fit moduli {moduli:?}")]
    BadResidues {
        residues: Vec<u32>,
        moduli: Vec<u32>,
    },
}

/// An element of a [`Ring`], as an index into its element list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RingElem(u16);

impl RingElem {
    pub const ZERO: RingElem = RingElem(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Ring {
    moduli: Vec<u32>,
    characteristic: u32,
    size: usize,
    one: RingElem,
    add: Vec<RingElem>,
    mul: Vec<RingElem>,
    neg: Vec<RingElem>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.spec())
    }
}

/// Builds `Z/m₁ × … × Z/m_k`. Characteristic is `lcm(mᵢ)` and must not be 2.
pub fn make_ring(moduli: &[u32]) -> Result<Ring, RingError> {
    if moduli.is_empty() {
        return Err(RingError::Empty);
    }
    if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
        return Err(RingError::ModulusTooSmall(m));
    }
    let size = moduli
        .iter()
        .fold(1usize, |acc, &m| acc.saturating_mul(m as usize));
    if size > MAX_RING_SIZE {
        return Err(RingError::TooLarge(size));
    }
    let characteristic = moduli.iter().fold(1usize, |acc, &m| lcm(acc, m as usize)) as u32;
    if characteristic == 2 {
        return Err(RingError::CharacteristicTwo);
    }
    let mut ring = Ring {
        moduli: moduli.to_vec(),
        characteristic,
        size,
        one: RingElem(0),
        add: Vec::new(),
        mul: Vec::new(),
        neg: Vec::new(),
    };
    ring.one = ring.encode(&vec![1; moduli.len()]);
    let residues: Vec<Vec<u32>> = (0..size).map(|i| ring.decode(i)).collect();
    let combine = |op: &dyn Fn(u32, u32, u32) -> u32, a: &[u32], b: &[u32]| -> Vec<u32> {
        ring.moduli
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&m, (&x, &y))| op(x, y, m))
            .collect()
    };
    let mut add = Vec::with_capacity(size * size);
    let mut mul = Vec::with_capacity(size * size);
    for a in &residues {
        for b in &residues {
            add.push(ring.encode(&combine(&|x, y, m| (x + y) % m, a, b)));
            mul.push(ring.encode(&combine(&|x, y, m| (x * y) % m, a, b)));
        }
    }
    let neg = residues
        .iter()
        .map(|a| ring.encode(&combine(&|x, _, m| (m - x) % m, a, a)))
        .collect();
    ring.add = add;
    ring.mul = mul;
    ring.neg = neg;
    Ok(ring)
}

/// Parses `Z4`, `z8`, `Z4xZ3`, … (case-insensitive).
pub fn parse_ring_spec(spec: &str) -> Result<Ring, RingError> {
    let bad = || RingError::BadSpec(spec.to_string());
    let lower = spec.trim().to_ascii_lowercase();
    let moduli = lower
        .split('x')
        .map(|part| {
            part.trim()
                .strip_prefix('z')
                .and_then(|m| m.parse::<u32>().ok())
                .ok_or_else(bad)
        })
        .collect::<Result<Vec<u32>, _>>()?;
    make_ring(&moduli)
}

impl Ring {
    fn encode(&self, residues: &[u32]) -> RingElem {
        let idx = self
            .moduli
            .iter()
            .zip(residues)
            .fold(0usize, |acc, (&m, &r)| acc * m as usize + r as usize);
        RingElem(idx as u16)
    }

    fn decode(&self, mut idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.moduli.len()];
        for (slot, &m) in out.iter_mut().zip(&self.moduli).rev() {
            *slot = (idx % m as usize) as u32;
            idx /= m as usize;
        }
        out
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Canonical spec string, e.g. `Z4xZ3`.
    pub fn spec(&self) -> String {
        self.moduli
            .iter()
            .map(|m| format!("Z{m}"))
            .collect::<Vec<_>>()
            .join("x")
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> {
        (0..self.size as u16).map(RingElem)
    }

    pub fn zero(&self) -> RingElem {
        RingElem::ZERO
    }

    pub fn one(&self) -> RingElem {
        self.one
    }

    /// `−1`, the additive inverse of `1`.
    pub fn neg_one(&self) -> RingElem {
        self.neg(self.one)
    }

    /// Image of an integer under `Z → R`.
    pub fn from_int(&self, k: i64) -> RingElem {
        let residues: Vec<u32> = self
            .moduli
            .iter()
            .map(|&m| k.rem_euclid(m as i64) as u32)
            .collect();
        self.encode(&residues)
    }

    pub fn elem(&self, residues: &[u32]) -> Result<RingElem, RingError> {
        if residues.len() != self.moduli.len()
            || residues.iter().zip(&self.moduli).any(|(&r, &m)| r >= m)
        {
            return Err(RingError::BadResidues {
                residues: residues.to_vec(),
                moduli: self.moduli.clone(),
            });
        }
        Ok(self.encode(residues))
    }

    pub fn residues(&self, a: RingElem) -> Vec<u32> {
        self.decode(a.index())
    }

    #[inline]
    pub fn add(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add[a.index() * self.size + b.index()]
    }

    #[inline]
    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        self.mul[a.index() * self.size + b.index()]
    }

    #[inline]
    pub fn neg(&self, a: RingElem) -> RingElem {
        self.neg[a.index()]
    }

    #[inline]
    pub fn sub(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn double(&self, a: RingElem) -> RingElem {
        self.add(a, a)
    }

    pub fn is_zero(&self, a: RingElem) -> bool {
        a == RingElem::ZERO
    }

    pub fn is_unit(&self, a: RingElem) -> bool {
        self.residues(a)
            .iter()
            .zip(&self.moduli)
            .all(|(&r, &m)| gcd(r as usize, m as usize) == 1)
    }

    /// `u² = 1`.
    pub fn squares_to_one(&self, u: RingElem) -> bool {
        self.mul(u, u) == self.one
    }

    /// All units with their inverses.
    pub fn units(&self) -> UnitGroup {
        let elems: Vec<RingElem> = self.elements().filter(|&a| self.is_unit(a)).collect();
        let inverse = elems
            .iter()
            .map(|&u| {
                *elems
                    .iter()
                    .find(|&&v| self.mul(u, v) == self.one)
                    .expect("unit without inverse")
            })
            .collect();
        UnitGroup { elems, inverse }
    }

    /// Per-component principal generator `mᵢ / gcd(mᵢ, rᵢ)` of the
    /// annihilator of `r`.
    pub fn annihilator_generators(&self, r: RingElem) -> Vec<u32> {
        self.residues(r)
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| m / gcd(x as usize, m as usize) as u32)
            .collect()
    }

    /// `{ α : α·r = 0 }`, built from the principal generators, in index order.
    pub fn annihilator(&self, r: RingElem) -> Vec<RingElem> {
        let gens = self.annihilator_generators(r);
        let mut out = vec![Vec::new()];
        for (&g, &m) in gens.iter().zip(&self.moduli) {
            let multiples: Vec<u32> = (0..m).step_by(g as usize).collect();
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    multiples.iter().map(move |&k| {
                        let mut next = prefix.clone();
                        next.push(k);
                        next
                    })
                })
                .collect();
        }
        let mut elems: Vec<RingElem> = out.iter().map(|res| self.encode(res)).collect();
        elems.sort();
        elems
    }

    pub fn format(&self, a: RingElem) -> String {
        let res = self.residues(a);
        if res.len() == 1 {
            res[0].to_string()
        } else {
            format!(
                "({})",
                res.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    elems: Vec<RingElem>,
    inverse: Vec<RingElem>,
}

impl UnitGroup {
    pub fn elements(&self) -> &[RingElem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, u: RingElem) -> bool {
        self.elems.binary_search(&u).is_ok()
    }

    pub fn inverse(&self, u: RingElem) -> Option<RingElem> {
        self.elems.binary_search(&u).ok().map(|i| self.inverse[i])
    }
}

/// Residue-tuple form used in every JSON/CSV surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Residues(pub Vec<u32>);

impl Ring {
    pub fn to_residues(&self, a: RingElem) -> Residues {
        Residues(self.residues(a))
    }

    pub fn from_residues(&self, r: &Residues) -> Result<RingElem, RingError> {
        self.elem(&r.0)
    }
}
