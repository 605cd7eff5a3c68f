//! Orientations `σ : G → U(R)` compatible with an involution, and the
//! cross-validated instance context `(G, *, R, σ)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{ElementSet, Group, Involution, SpanningTree};
use crate::rings::{Residues, Ring, RingElem, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientationError {
    #[error("orientation has {len} values, group order is {order}")]
    WrongLength { len: usize, order: usize },
    #[error("value at element {x} is not a unit")]
    NotUnit { x: usize },
    #[error("not a homomorphism at ({x}, {y})")]
    NotHomomorphism { x: usize, y: usize },
    #[error("orientation is trivial")]
    TrivialOrientation,
    #[error("incompatible with the involution: sigma(x x*) != 1 at x = {x}")]
    IncompatibleOrientation { x: usize },
    #[error("involution has length {len}, group order is {order}")]
    InvolutionMismatch { len: usize, order: usize },
    #[error("given elements do not generate the group")]
    NotGenerating,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A homomorphism into `U(R)`, stored as its value at every element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    values: Vec<RingElem>,
}

/// Checks the homomorphism law and that all values are units.
pub fn check_homomorphism(
    group: &Group,
    ring: &Ring,
    values: &[RingElem],
) -> Result<(), OrientationError> {
    if values.len() != group.order() {
        return Err(OrientationError::WrongLength {
            len: values.len(),
            order: group.order(),
        });
    }
    if let Some(x) = values.iter().position(|&v| !ring.is_unit(v)) {
        return Err(OrientationError::NotUnit { x });
    }
    for x in group.elements() {
        for y in group.elements() {
            if values[group.mul(x, y)] != ring.mul(values[x], values[y]) {
                return Err(OrientationError::NotHomomorphism { x, y });
            }
        }
    }
    Ok(())
}

/// First `x` with `σ(x·τ(x)) ≠ 1`.
pub fn compatibility_violation(
    group: &Group,
    tau: &Involution,
    ring: &Ring,
    values: &[RingElem],
) -> Option<usize> {
    group
        .elements()
        .find(|&x| values[group.mul(x, tau.apply(x))] != ring.one())
}

/// `{ x : σ(x) = 1 }` for a raw value table (no validation).
pub fn kernel_of(ring: &Ring, values: &[RingElem]) -> ElementSet {
    ElementSet::from_predicate(values.len(), |x| values[x] == ring.one())
}

impl Orientation {
    /// A nontrivial homomorphism compatible with `tau`.
    pub fn new(
        group: &Group,
        tau: &Involution,
        ring: &Ring,
        values: Vec<RingElem>,
    ) -> Result<Self, OrientationError> {
        let sigma = Self::new_allow_incompatible(group, ring, values)?;
        if tau.perm().len() != group.order() {
            return Err(OrientationError::InvolutionMismatch {
                len: tau.perm().len(),
                order: group.order(),
            });
        }
        if let Some(x) = compatibility_violation(group, tau, ring, &sigma.values) {
            return Err(OrientationError::IncompatibleOrientation { x });
        }
        Ok(sigma)
    }

    /// A nontrivial homomorphism with no compatibility requirement. Only
    /// [`InstanceContext::new_incompatible`] accepts such values.
    pub fn new_allow_incompatible(
        group: &Group,
        ring: &Ring,
        values: Vec<RingElem>,
    ) -> Result<Self, OrientationError> {
        check_homomorphism(group, ring, &values)?;
        if values.iter().all(|&v| v == ring.one()) {
            return Err(OrientationError::TrivialOrientation);
        }
        Ok(Orientation { values })
    }

    /// Extends prescribed values on a generating set.
    pub fn from_generator_images(
        group: &Group,
        tau: &Involution,
        ring: &Ring,
        images: &[(usize, RingElem)],
    ) -> Result<Self, OrientationError> {
        let gens: Vec<usize> = images.iter().map(|&(g, _)| g).collect();
        let vals: Vec<RingElem> = images.iter().map(|&(_, v)| v).collect();
        let tree = SpanningTree::new(group, &gens);
        let values = tree
            .extend(group, &vals, |a, b| ring.mul(a, b), ring.one())
            .ok_or(OrientationError::NotGenerating)?;
        Self::new(group, tau, ring, values)
    }

    #[inline]
    pub fn value(&self, x: usize) -> RingElem {
        self.values[x]
    }

    pub fn values(&self) -> &[RingElem] {
        &self.values
    }

    pub fn kernel(&self, ring: &Ring) -> ElementSet {
        kernel_of(ring, &self.values)
    }

    /// Image contained in `{1, −1}`.
    pub fn is_classic(&self, ring: &Ring) -> bool {
        let (one, minus) = (ring.one(), ring.neg_one());
        self.values.iter().all(|&v| v == one || v == minus)
    }

    pub fn to_residues(&self, ring: &Ring) -> Vec<Residues> {
        self.values.iter().map(|&v| ring.to_residues(v)).collect()
    }
}

/// Every nontrivial `σ : G → U(R)` with `σ(x·τ(x)) = 1` for all `x`.
///
/// Homomorphisms into the abelian group `U(R)` factor through `G/G'`, so the
/// search assigns unit images to generators of the abelianization, keeps the
/// assignments that define homomorphisms, and pulls them back along the
/// projection. Sorted by value vector.
pub fn enumerate_orientations(group: &Group, tau: &Involution, ring: &Ring) -> Vec<Orientation> {
    let (abel, projection) = group
        .quotient(group.derived_subgroup())
        .expect("derived subgroup is normal");
    let gens = abel.generating_set();
    let tree = SpanningTree::new(&abel, &gens);
    let gen_orders: Vec<usize> = gens.iter().map(|&g| abel.element_order(g)).collect();
    let units = ring.units();
    let admissible: Vec<Vec<RingElem>> = gen_orders
        .iter()
        .map(|&k| {
            units
                .elements()
                .iter()
                .copied()
                .filter(|&u| unit_pow(ring, u, k) == ring.one())
                .collect()
        })
        .collect();

    let mut found = Vec::new();
    let mut images = Vec::with_capacity(gens.len());
    assign_images(&admissible, &mut images, &mut |images| {
        let Some(on_quotient) = tree.extend(&abel, images, |a, b| ring.mul(a, b), ring.one())
        else {
            return;
        };
        if check_homomorphism(&abel, ring, &on_quotient).is_err() {
            return;
        }
        let values: Vec<RingElem> = projection.iter().map(|&c| on_quotient[c]).collect();
        if values.iter().all(|&v| v == ring.one()) {
            return;
        }
        if compatibility_violation(group, tau, ring, &values).is_none() {
            found.push(values);
        }
    });
    found.sort();
    found.dedup();
    found
        .into_iter()
        .map(|values| Orientation { values })
        .collect()
}

fn assign_images(
    admissible: &[Vec<RingElem>],
    images: &mut Vec<RingElem>,
    f: &mut impl FnMut(&[RingElem]),
) {
    let depth = images.len();
    if depth == admissible.len() {
        f(images);
        return;
    }
    for &u in &admissible[depth] {
        images.push(u);
        assign_images(admissible, images, f);
        images.pop();
    }
}

fn unit_pow(ring: &Ring, u: RingElem, k: usize) -> RingElem {
    (0..k).fold(ring.one(), |acc, _| ring.mul(acc, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextKind {
    /// Nontrivial compatible orientation.
    Oriented,
    /// Trivial orientation: `σ*` is the linear extension of `*`.
    Plain,
    /// Nontrivial but incompatible; `σ*` need not be an involution.
    Incompatible,
}

/// The ambient `(G, *, R, σ)` with cached structural sets.
#[derive(Debug, Clone)]
pub struct InstanceContext {
    group: Arc<Group>,
    involution: Arc<Involution>,
    ring: Arc<Ring>,
    sigma: Vec<RingElem>,
    kind: ContextKind,
    fixed: ElementSet,
    kernel: ElementSet,
}

impl InstanceContext {
    /// Cross-validates all four pieces.
    pub fn new(
        group: Arc<Group>,
        involution: Arc<Involution>,
        ring: Arc<Ring>,
        sigma: Orientation,
    ) -> Result<Self, OrientationError> {
        let sigma = Orientation::new(&group, &involution, &ring, sigma.values)?;
        Ok(Self::assemble(
            group,
            involution,
            ring,
            sigma.values,
            ContextKind::Oriented,
        ))
    }

    /// Convenience over raw values.
    pub fn from_values(
        group: Arc<Group>,
        involution: Arc<Involution>,
        ring: Arc<Ring>,
        values: Vec<RingElem>,
    ) -> Result<Self, OrientationError> {
        let sigma = Orientation::new(&group, &involution, &ring, values)?;
        Ok(Self::assemble(
            group,
            involution,
            ring,
            sigma.values,
            ContextKind::Oriented,
        ))
    }

    /// Trivial orientation; `σ*` acts as the plain involution.
    pub fn plain(group: Arc<Group>, involution: Arc<Involution>, ring: Arc<Ring>) -> Self {
        let sigma = vec![ring.one(); group.order()];
        Self::assemble(group, involution, ring, sigma, ContextKind::Plain)
    }

    /// Negative-control context over an incompatible orientation.
    pub fn new_incompatible(
        group: Arc<Group>,
        involution: Arc<Involution>,
        ring: Arc<Ring>,
        values: Vec<RingElem>,
    ) -> Result<Self, OrientationError> {
        let sigma = Orientation::new_allow_incompatible(&group, &ring, values)?;
        let kind = match compatibility_violation(&group, &involution, &ring, &sigma.values) {
            Some(_) => ContextKind::Incompatible,
            None => ContextKind::Oriented,
        };
        Ok(Self::assemble(group, involution, ring, sigma.values, kind))
    }

    fn assemble(
        group: Arc<Group>,
        involution: Arc<Involution>,
        ring: Arc<Ring>,
        sigma: Vec<RingElem>,
        kind: ContextKind,
    ) -> Self {
        let fixed = involution.fixed_set();
        let kernel = kernel_of(&ring, &sigma);
        InstanceContext {
            group,
            involution,
            ring,
            sigma,
            kind,
            fixed,
            kernel,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn involution(&self) -> &Involution {
        &self.involution
    }

    pub fn involution_arc(&self) -> &Arc<Involution> {
        &self.involution
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ring_arc(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn kind(&self) -> ContextKind {
        self.kind
    }

    #[inline]
    pub fn sigma(&self, x: usize) -> RingElem {
        self.sigma[x]
    }

    pub fn sigma_values(&self) -> &[RingElem] {
        &self.sigma
    }

    #[inline]
    pub fn star(&self, x: usize) -> usize {
        self.involution.apply(x)
    }

    /// `G_*`.
    pub fn fixed(&self) -> &ElementSet {
        &self.fixed
    }

    #[inline]
    pub fn is_fixed(&self, x: usize) -> bool {
        self.fixed.contains(x)
    }

    /// `N = ker σ`.
    pub fn kernel(&self) -> &ElementSet {
        &self.kernel
    }

    /// `N_* = G_* ∩ N`.
    pub fn fixed_kernel(&self) -> ElementSet {
        self.fixed.intersection(&self.kernel)
    }

    pub fn center(&self) -> &ElementSet {
        self.group.center()
    }

    pub fn commutator(&self) -> Option<usize> {
        self.group.unique_nontrivial_commutator()
    }

    pub fn is_classic(&self) -> bool {
        let (one, minus) = (self.ring.one(), self.ring.neg_one());
        self.sigma.iter().all(|&v| v == one || v == minus)
    }

    pub fn orientation(&self) -> Orientation {
        Orientation {
            values: self.sigma.clone(),
        }
    }
}
