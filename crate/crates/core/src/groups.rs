//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order`; every operation is a table lookup. The
//! structural data the classifier needs (center, derived subgroup, the
//! unique nontrivial commutator) is computed once at construction.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard ceiling on group order; campaign configs use a smaller limit.
pub const MAX_ORDER: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication table is empty")]
    Empty,
    #[error("group order {0} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge(usize),
    #[error("row {row} has {len} entries, expected {order}")]
    NotSquare {
        row: usize,
        len: usize,
        order: usize,
    },
    #[error("entry table[{x}][{y}] = {value} is outside 0..{order}")]
    IndexOutOfRange {
        x: usize,
        y: usize,
        value: usize,
        order: usize,
    },
    #[error("no two-sided identity element{}", hint.map(|h| format!(" (hint {h} rejected)")).unwrap_or_default())]
    NoIdentity { hint: Option<usize> },
    #[error("element {x} has no inverse")]
    MissingInverse { x: usize },
    #[error("not associative: ({x}*{y})*{z} != {x}*({y}*{z})")]
    NotAssociative { x: usize, y: usize, z: usize },
    #[error("invalid parameter {parameter} for {family}")]
    InvalidParameter { family: Family, parameter: usize },
    #[error("cannot parse group spec {0:?}")]
    BadSpec(String),
    #[error("set is not a subgroup (witness {witness:?})")]
    NotASubgroup { witness: Vec<usize> },
    #[error("subgroup is not normal: conjugating {x} by {y} leaves it")]
    NotNormal { x: usize, y: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvolutionError {
    #[error("permutation has length {len}, group order is {order}")]
    WrongLength { len: usize, order: usize },
    #[error("image of {x} is {value}, outside the group")]
    IndexOutOfRange { x: usize, value: usize },
    #[error("not of order <= 2: {x} maps to {image}, which maps to {back}")]
    NotSelfInverse { x: usize, image: usize, back: usize },
    #[error("not an anti-automorphism at ({x}, {y})")]
    NotAntiAutomorphism { x: usize, y: usize },
}

/// Membership bitmask over the elements of one group.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ElementSet {
    len: usize,
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut set = Self::empty(len);
        for x in 0..len {
            set.insert(x);
        }
        set
    }

    pub fn from_elements(len: usize, elements: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(len);
        for x in elements {
            set.insert(x);
        }
        set
    }

    pub fn from_predicate(len: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        Self::from_elements(len, (0..len).filter(|&x| pred(x)))
    }

    /// Size of the ambient group, not the number of members.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x < self.len, "element {x} outside universe {}", self.len);
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.len && self.words[x / 64] & (1 << (x % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&x| self.contains(x))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite group given by its Cayley table.
#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    name: String,
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
    center: ElementSet,
    derived: ElementSet,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

/// Validates a Cayley table and builds a [`Group`].
pub fn build_group(
    name: impl Into<String>,
    table: &[Vec<usize>],
    identity_hint: Option<usize>,
) -> Result<Group, GroupError> {
    let order = table.len();
    if order == 0 {
        return Err(GroupError::Empty);
    }
    if order > MAX_ORDER {
        return Err(GroupError::TooLarge(order));
    }
    let mut flat = Vec::with_capacity(order * order);
    for (x, row) in table.iter().enumerate() {
        if row.len() != order {
            return Err(GroupError::NotSquare {
                row: x,
                len: row.len(),
                order,
            });
        }
        for (y, &value) in row.iter().enumerate() {
            if value >= order {
                return Err(GroupError::IndexOutOfRange { x, y, value, order });
            }
            flat.push(value as u32);
        }
    }
    let mul = |x: usize, y: usize| flat[x * order + y] as usize;
    let is_identity = |e: usize| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x);
    let identity = match identity_hint {
        Some(h) if h < order && is_identity(h) => h,
        Some(h) => return Err(GroupError::NoIdentity { hint: Some(h) }),
        None => (0..order)
            .find(|&e| is_identity(e))
            .ok_or(GroupError::NoIdentity { hint: None })?,
    };
    let mut inverse = Vec::with_capacity(order);
    for x in 0..order {
        let inv = (0..order)
            .find(|&y| mul(x, y) == identity && mul(y, x) == identity)
            .ok_or(GroupError::MissingInverse { x })?;
        inverse.push(inv);
    }
    for x in 0..order {
        for y in 0..order {
            let xy = mul(x, y);
            for z in 0..order {
                if mul(xy, z) != mul(x, mul(y, z)) {
                    return Err(GroupError::NotAssociative { x, y, z });
                }
            }
        }
    }
    Ok(Group::from_validated(
        name.into(),
        order,
        flat,
        identity,
        inverse,
    ))
}

impl Group {
    fn from_validated(
        name: String,
        order: usize,
        table: Vec<u32>,
        identity: usize,
        inverse: Vec<usize>,
    ) -> Self {
        let mut group = Group {
            name,
            order,
            table,
            identity,
            inverse,
            center: ElementSet::empty(order),
            derived: ElementSet::empty(order),
        };
        group.center = ElementSet::from_predicate(order, |z| {
            (0..order).all(|x| group.mul(z, x) == group.mul(x, z))
        });
        let commutators = (0..order)
            .flat_map(|x| (0..order).map(move |y| (x, y)))
            .map(|(x, y)| group.commutator(x, y));
        group.derived = group.generated_subgroup(commutators);
        group
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|x| (0..self.order).map(|y| self.mul(x, y)).collect())
            .collect()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn pow(&self, x: usize, mut k: usize) -> usize {
        let mut acc = self.identity;
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != self.identity {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// `(x, y) = x⁻¹y⁻¹xy`.
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        let xy = self.mul(x, y);
        self.mul(self.mul(self.inv(x), self.inv(y)), xy)
    }

    /// `y⁻¹xy`.
    pub fn conjugate(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(self.inv(y), x), y)
    }

    pub fn commutes(&self, x: usize, y: usize) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    pub fn is_abelian(&self) -> bool {
        self.center.is_full()
    }

    pub fn center(&self) -> &ElementSet {
        &self.center
    }

    pub fn is_central(&self, x: usize) -> bool {
        self.center.contains(x)
    }

    /// The subgroup generated by all commutators.
    pub fn derived_subgroup(&self) -> &ElementSet {
        &self.derived
    }

    /// Returns `s` when the derived subgroup is exactly `{1, s}`.
    pub fn unique_nontrivial_commutator(&self) -> Option<usize> {
        if self.derived.count() != 2 {
            return None;
        }
        self.derived.iter().find(|&x| x != self.identity)
    }

    pub fn generated_subgroup(&self, generators: impl IntoIterator<Item = usize>) -> ElementSet {
        let mut set = ElementSet::from_elements(self.order, [self.identity]);
        let gens: Vec<usize> = generators.into_iter().collect();
        let mut queue: VecDeque<usize> = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.mul(x, g);
                if !set.contains(y) {
                    set.insert(y);
                    queue.push_back(y);
                }
            }
        }
        set
    }

    /// Greedy generating set: repeatedly add the first element that enlarges
    /// the generated subgroup.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = ElementSet::from_elements(self.order, [self.identity]);
        for x in 0..self.order {
            if !span.contains(x) {
                gens.push(x);
                span = self.generated_subgroup(gens.iter().copied());
            }
        }
        gens
    }

    pub fn is_subgroup(&self, set: &ElementSet) -> bool {
        self.subgroup_violation(set).is_none()
    }

    fn subgroup_violation(&self, set: &ElementSet) -> Option<Vec<usize>> {
        if set.universe() != self.order {
            return Some(vec![]);
        }
        if !set.contains(self.identity) {
            return Some(vec![self.identity]);
        }
        for x in set.iter() {
            for y in set.iter() {
                if !set.contains(self.mul(x, y)) {
                    return Some(vec![x, y]);
                }
            }
        }
        None
    }

    /// Checks that `set` is a normal subgroup.
    pub fn check_normal_subgroup(&self, set: &ElementSet) -> Result<(), GroupError> {
        if let Some(witness) = self.subgroup_violation(set) {
            return Err(GroupError::NotASubgroup { witness });
        }
        for x in set.iter() {
            for y in 0..self.order {
                if !set.contains(self.conjugate(x, y)) {
                    return Err(GroupError::NotNormal { x, y });
                }
            }
        }
        Ok(())
    }

    /// Exponent of `G/N`: the least `m` with `x^m ∈ N` for every `x`.
    pub fn quotient_exponent(&self, normal: &ElementSet) -> Result<usize, GroupError> {
        self.check_normal_subgroup(normal)?;
        let mut exponent = 1;
        for x in 0..self.order {
            let mut m = 1;
            let mut y = x;
            while !normal.contains(y) {
                y = self.mul(y, x);
                m += 1;
            }
            exponent = lcm(exponent, m);
        }
        Ok(exponent)
    }

    /// Extracts a subgroup as a group in its own right. The returned vector
    /// maps new indices to the original ones (ascending).
    pub fn subgroup(&self, set: &ElementSet) -> Result<(Group, Vec<usize>), GroupError> {
        if let Some(witness) = self.subgroup_violation(set) {
            return Err(GroupError::NotASubgroup { witness });
        }
        let embedding = set.to_vec();
        let mut local = vec![usize::MAX; self.order];
        for (i, &x) in embedding.iter().enumerate() {
            local[x] = i;
        }
        let n = embedding.len();
        let mut table = Vec::with_capacity(n * n);
        for &x in &embedding {
            for &y in &embedding {
                table.push(local[self.mul(x, y)] as u32);
            }
        }
        let inverse = embedding.iter().map(|&x| local[self.inv(x)]).collect();
        let name = format!("{}|sub{}", self.name, n);
        let group = Group::from_validated(name, n, table, local[self.identity], inverse);
        Ok((group, embedding))
    }

    /// The quotient `G/N` on coset representatives. Cosets are numbered in
    /// order of their least element; the second vector is the projection.
    pub fn quotient(&self, normal: &ElementSet) -> Result<(Group, Vec<usize>), GroupError> {
        self.check_normal_subgroup(normal)?;
        let mut projection = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for x in 0..self.order {
            if projection[x] != usize::MAX {
                continue;
            }
            let coset = reps.len();
            reps.push(x);
            for n in normal.iter() {
                projection[self.mul(x, n)] = coset;
            }
        }
        let k = reps.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &reps {
            for &b in &reps {
                table.push(projection[self.mul(a, b)] as u32);
            }
        }
        let inverse = reps.iter().map(|&a| projection[self.inv(a)]).collect();
        let name = format!("{}/N{}", self.name, normal.count());
        let group = Group::from_validated(name, k, table, projection[self.identity], inverse);
        Ok((group, projection))
    }

    /// Limited commutativity: whenever `x` and `y` commute, one of `x`, `y`,
    /// `xy` is central.
    pub fn is_lc_group(&self) -> bool {
        (0..self.order).all(|x| {
            (0..self.order).all(|y| {
                !self.commutes(x, y)
                    || self.is_central(x)
                    || self.is_central(y)
                    || self.is_central(self.mul(x, y))
            })
        })
    }

    /// The involution fixing the center and sending noncentral `x` to `sx`,
    /// available only for LC-groups with a unique nontrivial commutator `s`.
    pub fn canonical_involution(&self) -> Option<Involution> {
        let s = self.unique_nontrivial_commutator()?;
        if !self.is_lc_group() {
            return None;
        }
        let perm = (0..self.order)
            .map(|x| {
                if self.is_central(x) {
                    x
                } else {
                    self.mul(s, x)
                }
            })
            .collect();
        Involution::new(self, perm).ok()
    }

    /// True when `tau` is the canonical involution of an SLC-group.
    pub fn is_slc_with(&self, tau: &Involution) -> bool {
        self.canonical_involution().is_some_and(|c| &c == tau)
    }

    /// All order-≤2 anti-automorphisms, via automorphisms `φ` with `φ² = id`
    /// and `τ(x) = φ(x)⁻¹`. Sorted lexicographically by permutation.
    pub fn enumerate_involutions(&self) -> Vec<Involution> {
        let mut out: Vec<Involution> = Vec::new();
        self.for_each_automorphism(|phi| {
            if (0..self.order).all(|x| phi[phi[x]] == x) {
                let perm = (0..self.order).map(|x| self.inv(phi[x])).collect();
                out.push(Involution { perm });
            }
        });
        out.sort_by(|a, b| a.perm.cmp(&b.perm));
        out.dedup();
        out
    }

    /// Calls `f` for every automorphism, found by backtracking over images
    /// of the greedy generating set.
    pub fn for_each_automorphism(&self, mut f: impl FnMut(&[usize])) {
        let gens = self.generating_set();
        let tree = SpanningTree::new(self, &gens);
        let orders: Vec<usize> = (0..self.order).map(|x| self.element_order(x)).collect();
        let mut images = Vec::with_capacity(gens.len());
        self.automorphism_search(&gens, &tree, &orders, &mut images, &mut f);
    }

    fn automorphism_search(
        &self,
        gens: &[usize],
        tree: &SpanningTree,
        orders: &[usize],
        images: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        let depth = images.len();
        if depth == gens.len() {
            if let Some(phi) = tree.extend(self, images, |a, b| self.mul(a, b), self.identity) {
                if is_bijection(&phi) && self.is_endomorphism(&phi) {
                    f(&phi);
                }
            }
            return;
        }
        // Images of the earlier generators span a subgroup; a new image inside
        // it cannot give a bijection.
        let span = self.generated_subgroup(images.iter().copied());
        for candidate in 0..self.order {
            if orders[candidate] != orders[gens[depth]] || span.contains(candidate) {
                continue;
            }
            images.push(candidate);
            self.automorphism_search(gens, tree, orders, images, f);
            images.pop();
        }
    }

    fn is_endomorphism(&self, phi: &[usize]) -> bool {
        (0..self.order)
            .all(|x| (0..self.order).all(|y| phi[self.mul(x, y)] == self.mul(phi[x], phi[y])))
    }
}

fn is_bijection(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter()
        .all(|&y| y < seen.len() && !std::mem::replace(&mut seen[y], true))
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A breadth-first spanning tree of the Cayley graph over a generating set:
/// every element is `parent · generator` for a recorded pair.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    /// Non-identity elements in BFS order with `(element, parent, generator index)`.
    steps: Vec<(usize, usize, usize)>,
    order: usize,
}

impl SpanningTree {
    pub fn new(group: &Group, gens: &[usize]) -> Self {
        let mut seen = ElementSet::from_elements(group.order(), [group.identity()]);
        let mut queue = VecDeque::from([group.identity()]);
        let mut steps = Vec::with_capacity(group.order());
        while let Some(x) = queue.pop_front() {
            for (k, &g) in gens.iter().enumerate() {
                let y = group.mul(x, g);
                if !seen.contains(y) {
                    seen.insert(y);
                    steps.push((y, x, k));
                    queue.push_back(y);
                }
            }
        }
        SpanningTree {
            steps,
            order: group.order(),
        }
    }

    /// Extends generator images to a map on all elements through the tree.
    /// The result is a homomorphism only if the caller verifies it.
    pub fn extend<T: Copy>(
        &self,
        group: &Group,
        images: &[T],
        mul: impl Fn(T, T) -> T,
        one: T,
    ) -> Option<Vec<T>> {
        let mut map: Vec<Option<T>> = vec![None; self.order];
        map[group.identity()] = Some(one);
        for &(y, parent, k) in &self.steps {
            map[y] = Some(mul(map[parent]?, images[k]));
        }
        map.into_iter().collect()
    }
}

/// An anti-automorphism of order at most two, stored as a permutation.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Involution {
    perm: Vec<usize>,
}

impl fmt::Debug for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Involution{:?}", self.perm)
    }
}

impl Involution {
    pub fn new(group: &Group, perm: Vec<usize>) -> Result<Self, InvolutionError> {
        let n = group.order();
        if perm.len() != n {
            return Err(InvolutionError::WrongLength {
                len: perm.len(),
                order: n,
            });
        }
        if let Some((x, &value)) = perm.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(InvolutionError::IndexOutOfRange { x, value });
        }
        for x in 0..n {
            if perm[perm[x]] != x {
                return Err(InvolutionError::NotSelfInverse {
                    x,
                    image: perm[x],
                    back: perm[perm[x]],
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                if perm[group.mul(x, y)] != group.mul(perm[y], perm[x]) {
                    return Err(InvolutionError::NotAntiAutomorphism { x, y });
                }
            }
        }
        Ok(Involution { perm })
    }

    /// The identity map; an involution only on abelian groups.
    pub fn identity(group: &Group) -> Result<Self, InvolutionError> {
        Self::new(group, group.elements().collect())
    }

    /// `x ↦ x⁻¹`, an involution on every group.
    pub fn inversion(group: &Group) -> Self {
        Involution {
            perm: group.inverse_table().to_vec(),
        }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.perm[x]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// `G_*`, the elements fixed by the involution.
    pub fn fixed_set(&self) -> ElementSet {
        ElementSet::from_predicate(self.perm.len(), |x| self.perm[x] == x)
    }

    /// Restriction to an invariant subgroup given by its embedding.
    pub fn restrict(&self, embedding: &[usize]) -> Option<Involution> {
        let mut local = vec![usize::MAX; self.perm.len()];
        for (i, &x) in embedding.iter().enumerate() {
            local[x] = i;
        }
        let perm: Option<Vec<usize>> = embedding
            .iter()
            .map(|&x| Some(local[self.perm[x]]).filter(|&i| i != usize::MAX))
            .collect();
        perm.map(|perm| Involution { perm })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cyclic,
    Dihedral,
    Dicyclic,
    ElementaryAbelian,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Cyclic => "cyclic",
            Family::Dihedral => "dihedral",
            Family::Dicyclic => "dicyclic",
            Family::ElementaryAbelian => "elementary_abelian",
        };
        f.write_str(s)
    }
}

/// Standard small groups.
///
/// * `cyclic(n)`: `C_n`, element `i` is `g^i`.
/// * `dihedral(n)`: order `2n`, element `i + n·f` is `r^i s^f`.
/// * `dicyclic(n)`: order `4n`, element `i + 2n·f` is `a^i x^f` with
///   `x² = a^n`, `x a x⁻¹ = a⁻¹`; `dicyclic(2)` is `Q8`.
/// * `elementary_abelian(k)`: `C2^k` as bit vectors under xor.
pub fn catalog(family: Family, parameter: usize) -> Result<Group, GroupError> {
    let bad = GroupError::InvalidParameter { family, parameter };
    let (name, table): (String, Vec<Vec<usize>>) = match family {
        Family::Cyclic => {
            if parameter == 0 || parameter > MAX_ORDER {
                return Err(bad);
            }
            let n = parameter;
            (
                format!("C{n}"),
                (0..n)
                    .map(|a| (0..n).map(|b| (a + b) % n).collect())
                    .collect(),
            )
        }
        Family::Dihedral => {
            if parameter < 2 || 2 * parameter > MAX_ORDER {
                return Err(bad);
            }
            let n = parameter;
            let table = (0..2 * n)
                .map(|x| {
                    let (a, f) = (x % n, x / n);
                    (0..2 * n)
                        .map(|y| {
                            let (b, g) = (y % n, y / n);
                            let rot = if f == 0 { (a + b) % n } else { (a + n - b) % n };
                            rot + n * ((f + g) % 2)
                        })
                        .collect()
                })
                .collect();
            (format!("D{n}"), table)
        }
        Family::Dicyclic => {
            if parameter < 2 || 4 * parameter > MAX_ORDER {
                return Err(bad);
            }
            let n = parameter;
            let m = 2 * n;
            let table = (0..2 * m)
                .map(|x| {
                    let (i, f) = (x % m, x / m);
                    (0..2 * m)
                        .map(|y| {
                            let (j, g) = (y % m, y / m);
                            match (f, g) {
                                (0, _) => (i + j) % m + m * g,
                                (_, 0) => (i + m - j) % m + m,
                                _ => (i + m - j + n) % m,
                            }
                        })
                        .collect()
                })
                .collect();
            let name = if n == 2 {
                "Q8".to_string()
            } else {
                format!("Dic{n}")
            };
            (name, table)
        }
        Family::ElementaryAbelian => {
            if parameter == 0 || (1usize << parameter.min(63)) > MAX_ORDER {
                return Err(bad);
            }
            let n = 1usize << parameter;
            (
                format!("C2^{parameter}"),
                (0..n).map(|a| (0..n).map(|b| a ^ b).collect()).collect(),
            )
        }
    };
    build_group(name, &table, Some(0))
}

/// `G × H` on pairs `(g, h)` flattened row-major as `g·|H| + h`.
pub fn direct_product(g: &Group, h: &Group) -> Group {
    let (m, n) = (g.order(), h.order());
    let mut table = Vec::with_capacity(m * n * m * n);
    for a in 0..m * n {
        for b in 0..m * n {
            let prod = g.mul(a / n, b / n) * n + h.mul(a % n, b % n);
            table.push(prod as u32);
        }
    }
    let inverse = (0..m * n)
        .map(|a| g.inv(a / n) * n + h.inv(a % n))
        .collect();
    let identity = g.identity() * n + h.identity();
    Group::from_validated(
        format!("{}x{}", g.name(), h.name()),
        m * n,
        table,
        identity,
        inverse,
    )
}

/// Parses group spec strings such as `C4`, `D4`, `Q8`, `Dic3`, `C2^3`, and
/// products joined by `x` (`C2xC4`).
pub fn parse_group_spec(spec: &str) -> Result<Group, GroupError> {
    let bad = || GroupError::BadSpec(spec.to_string());
    let mut result: Option<Group> = None;
    for factor in spec.trim().split('x') {
        let factor = factor.trim();
        let group = if factor.eq_ignore_ascii_case("Q8") {
            catalog(Family::Dicyclic, 2)?
        } else if let Some(rest) = factor.strip_prefix("Dic") {
            catalog(Family::Dicyclic, rest.parse().map_err(|_| bad())?)?
        } else if let Some(rest) = factor.strip_prefix("C2^") {
            catalog(Family::ElementaryAbelian, rest.parse().map_err(|_| bad())?)?
        } else if let Some(rest) = factor.strip_prefix('C') {
            catalog(Family::Cyclic, rest.parse().map_err(|_| bad())?)?
        } else if let Some(rest) = factor.strip_prefix('D') {
            catalog(Family::Dihedral, rest.parse().map_err(|_| bad())?)?
        } else {
            return Err(bad());
        };
        result = Some(match result {
            None => group,
            Some(acc) => {
                if acc.order() * group.order() > MAX_ORDER {
                    return Err(GroupError::TooLarge(acc.order() * group.order()));
                }
                direct_product(&acc, &group)
            }
        });
    }
    result.ok_or_else(bad)
}

/// JSON form of a group: `{name, order, table, identity}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl From<&Group> for GroupRecord {
    fn from(g: &Group) -> Self {
        GroupRecord {
            name: g.name().to_string(),
            order: g.order(),
            table: g.table_rows(),
            identity: g.identity(),
        }
    }
}

impl TryFrom<&GroupRecord> for Group {
    type Error = GroupError;

    fn try_from(rec: &GroupRecord) -> Result<Self, Self::Error> {
        if rec.table.len() != rec.order {
            return Err(GroupError::NotSquare {
                row: rec.table.len(),
                len: rec.table.len(),
                order: rec.order,
            });
        }
        build_group(rec.name.clone(), &rec.table, Some(rec.identity))
    }
}
