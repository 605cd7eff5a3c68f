//! Group-ring arithmetic over an [`InstanceContext`], the oriented
//! involution `σ*`, skew-symmetric elements and the brute-force
//! anticommutativity oracle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orientations::{ContextKind, InstanceContext};
use crate::rings::RingElem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("element has {got} coefficients, context group order is {expected}")]
    ContextMismatch { expected: usize, got: usize },
    #[error("element {x} is fixed by the involution")]
    SymmetricElement { x: usize },
    #[error("skew module has more than {limit} elements")]
    TooLarge { limit: u128 },
    #[error("orientation is incompatible with the involution")]
    IncompatibleContext,
    #[error("stopped before completion")]
    Interrupted,
}

/// `Σ α_x x`, one coefficient per group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElem {
    coeffs: Vec<RingElem>,
}

impl GroupRingElem {
    pub fn zero(order: usize) -> Self {
        GroupRingElem {
            coeffs: vec![RingElem::ZERO; order],
        }
    }

    pub fn monomial(order: usize, x: usize, alpha: RingElem) -> Self {
        let mut e = Self::zero(order);
        e.coeffs[x] = alpha;
        e
    }

    pub fn from_coeffs(coeffs: Vec<RingElem>) -> Self {
        GroupRingElem { coeffs }
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    pub fn coeff(&self, x: usize) -> RingElem {
        self.coeffs[x]
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == RingElem::ZERO)
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, RingElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != RingElem::ZERO)
            .map(|(x, &c)| (x, c))
    }

    fn check(&self, ctx: &InstanceContext) -> Result<(), GroupRingError> {
        let expected = ctx.group().order();
        if self.coeffs.len() != expected {
            return Err(GroupRingError::ContextMismatch {
                expected,
                got: self.coeffs.len(),
            });
        }
        Ok(())
    }
}

pub fn one(ctx: &InstanceContext) -> GroupRingElem {
    GroupRingElem::monomial(
        ctx.group().order(),
        ctx.group().identity(),
        ctx.ring().one(),
    )
}

pub fn gr_add(
    ctx: &InstanceContext,
    a: &GroupRingElem,
    b: &GroupRingElem,
) -> Result<GroupRingElem, GroupRingError> {
    a.check(ctx)?;
    b.check(ctx)?;
    let r = ctx.ring();
    Ok(GroupRingElem {
        coeffs: a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| r.add(x, y))
            .collect(),
    })
}

pub fn gr_neg(ctx: &InstanceContext, a: &GroupRingElem) -> Result<GroupRingElem, GroupRingError> {
    a.check(ctx)?;
    let r = ctx.ring();
    Ok(GroupRingElem {
        coeffs: a.coeffs.iter().map(|&x| r.neg(x)).collect(),
    })
}

pub fn gr_sub(
    ctx: &InstanceContext,
    a: &GroupRingElem,
    b: &GroupRingElem,
) -> Result<GroupRingElem, GroupRingError> {
    gr_add(ctx, a, &gr_neg(ctx, b)?)
}

pub fn gr_scale(
    ctx: &InstanceContext,
    alpha: RingElem,
    a: &GroupRingElem,
) -> Result<GroupRingElem, GroupRingError> {
    a.check(ctx)?;
    let r = ctx.ring();
    Ok(GroupRingElem {
        coeffs: a.coeffs.iter().map(|&x| r.mul(alpha, x)).collect(),
    })
}

/// Convolution: `c_z = Σ_{xy = z} a_x b_y`.
pub fn gr_mul(
    ctx: &InstanceContext,
    a: &GroupRingElem,
    b: &GroupRingElem,
) -> Result<GroupRingElem, GroupRingError> {
    a.check(ctx)?;
    b.check(ctx)?;
    let (g, r) = (ctx.group(), ctx.ring());
    let mut out = GroupRingElem::zero(g.order());
    for (x, ax) in a.support() {
        for (y, by) in b.support() {
            let z = g.mul(x, y);
            out.coeffs[z] = r.add(out.coeffs[z], r.mul(ax, by));
        }
    }
    Ok(out)
}

/// `ab + ba`.
pub fn anticommutator(
    ctx: &InstanceContext,
    a: &GroupRingElem,
    b: &GroupRingElem,
) -> Result<GroupRingElem, GroupRingError> {
    gr_add(ctx, &gr_mul(ctx, a, b)?, &gr_mul(ctx, b, a)?)
}

/// `(Σ α_x x)^{σ*} = Σ σ(x) α_x x*`.
pub fn sigma_star(
    ctx: &InstanceContext,
    a: &GroupRingElem,
) -> Result<GroupRingElem, GroupRingError> {
    a.check(ctx)?;
    let r = ctx.ring();
    let mut out = GroupRingElem::zero(a.len());
    for (x, ax) in a.support() {
        out.coeffs[ctx.star(x)] = r.mul(ctx.sigma(x), ax);
    }
    Ok(out)
}

/// `a^{σ*} = −a`.
pub fn is_skew(ctx: &InstanceContext, a: &GroupRingElem) -> Result<bool, GroupRingError> {
    Ok(sigma_star(ctx, a)? == gr_neg(ctx, a)?)
}

/// Skewness read off coefficient by coefficient, split over `N_*`,
/// `N \ G_*`, `G_* \ N` and `G \ (G_* ∪ N)`.
///
/// On the last piece the coefficient relation is `α_x = −σ(x*)·α_{x*}`; with
/// a compatible orientation `σ(x*) = σ(x)⁻¹`, which is `σ(x)` exactly when
/// `σ(x)² = 1`.
pub fn is_skew_by_conditions(
    ctx: &InstanceContext,
    a: &GroupRingElem,
) -> Result<bool, GroupRingError> {
    a.check(ctx)?;
    let r = ctx.ring();
    Ok(ctx.group().elements().all(|x| {
        let ax = a.coeff(x);
        let in_kernel = ctx.kernel().contains(x);
        let fixed = ctx.is_fixed(x);
        match (in_kernel, fixed) {
            (true, true) => ax == r.neg(ax),
            (true, false) => ax == r.neg(a.coeff(ctx.star(x))),
            (false, true) => ax == r.neg(r.mul(ctx.sigma(x), ax)),
            (false, false) => {
                let xs = ctx.star(x);
                ax == r.neg(r.mul(ctx.sigma(xs), a.coeff(xs)))
            }
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorOrigin {
    /// `α·x` with `x ∈ G_*` and `α(1 + σ(x)) = 0`.
    Monomial { element: usize, coefficient: u16 },
    /// `x − σ(x)·x*` with `x ∉ G_*`, one per pair `{x, x*}` (`x < x*`).
    Binomial { element: usize },
}

/// A spanning generator of `(RG)⁻`, kept sparse (at most two terms).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewGenerator {
    pub origin: GeneratorOrigin,
    pub terms: Vec<(usize, RingElem)>,
}

impl SkewGenerator {
    pub fn to_elem(&self, order: usize) -> GroupRingElem {
        let mut e = GroupRingElem::zero(order);
        for &(x, c) in &self.terms {
            e.coeffs[x] = c;
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SkewGenerators {
    pub a1: Vec<SkewGenerator>,
    pub a2: Vec<SkewGenerator>,
}

impl SkewGenerators {
    pub fn len(&self) -> usize {
        self.a1.len() + self.a2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `A1` followed by `A2`.
    pub fn iter(&self) -> impl Iterator<Item = &SkewGenerator> {
        self.a1.iter().chain(&self.a2)
    }
}

/// Monomials `αx` (`x ∈ G_*`, every nonzero `α` annihilating `1 + σ(x)`)
/// and binomials `x − σ(x)x*` (one per pair `{x, x*}` with `x ∉ G_*`).
pub fn skew_generators(ctx: &InstanceContext) -> SkewGenerators {
    let (g, r) = (ctx.group(), ctx.ring());
    let mut gens = SkewGenerators::default();
    for x in g.elements() {
        if ctx.is_fixed(x) {
            let target = r.add(r.one(), ctx.sigma(x));
            for alpha in r.annihilator(target) {
                if alpha != RingElem::ZERO {
                    gens.a1.push(SkewGenerator {
                        origin: GeneratorOrigin::Monomial {
                            element: x,
                            coefficient: alpha.index() as u16,
                        },
                        terms: vec![(x, alpha)],
                    });
                }
            }
        } else if x < ctx.star(x) {
            gens.a2.push(SkewGenerator {
                origin: GeneratorOrigin::Binomial { element: x },
                terms: vec![(x, r.one()), (ctx.star(x), r.neg(ctx.sigma(x)))],
            });
        }
    }
    gens
}

/// One `σ*`-orbit `{x}` or `{x, x*}` with every coefficient tuple that
/// satisfies the skew conditions on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSolutions {
    pub elements: Vec<usize>,
    pub solutions: Vec<Vec<RingElem>>,
}

/// `(RG)⁻` as a direct sum over orbits; each skew condition couples only
/// `α_x` with `α_{x*}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewModule {
    order: usize,
    orbits: Vec<OrbitSolutions>,
}

/// Solves the coefficient conditions orbit by orbit by scanning `R` or `R²`.
pub fn skew_module(ctx: &InstanceContext) -> SkewModule {
    let (g, r) = (ctx.group(), ctx.ring());
    let mut orbits = Vec::new();
    for x in g.elements() {
        let xs = ctx.star(x);
        if xs < x {
            continue;
        }
        // Probe: a vector supported on the orbit passes iff its orbit
        // coefficients satisfy the conditions there.
        let mut probe = GroupRingElem::zero(g.order());
        let solutions = if xs == x {
            r.elements()
                .filter(|&a| {
                    probe.coeffs[x] = a;
                    is_skew_by_conditions(ctx, &probe).expect("sized by context")
                })
                .map(|a| vec![a])
                .collect()
        } else {
            let mut sols = Vec::new();
            for a in r.elements() {
                for b in r.elements() {
                    probe.coeffs[x] = a;
                    probe.coeffs[xs] = b;
                    if is_skew_by_conditions(ctx, &probe).expect("sized by context") {
                        sols.push(vec![a, b]);
                    }
                }
            }
            sols
        };
        let elements = if xs == x { vec![x] } else { vec![x, xs] };
        orbits.push(OrbitSolutions {
            elements,
            solutions,
        });
    }
    SkewModule {
        order: g.order(),
        orbits,
    }
}

impl SkewModule {
    pub fn orbits(&self) -> &[OrbitSolutions] {
        &self.orbits
    }

    /// Number of skew elements, or `None` past `u128`.
    pub fn size(&self) -> Option<u128> {
        self.orbits
            .iter()
            .try_fold(1u128, |acc, o| acc.checked_mul(o.solutions.len() as u128))
    }

    pub fn contains(&self, a: &GroupRingElem) -> bool {
        a.len() == self.order
            && self.orbits.iter().all(|o| {
                let tuple: Vec<RingElem> = o.elements.iter().map(|&x| a.coeff(x)).collect();
                o.solutions.contains(&tuple)
            })
    }

    /// Every skew element, provided there are at most `limit`.
    pub fn enumerate(&self, limit: u128) -> Result<Vec<GroupRingElem>, GroupRingError> {
        match self.size() {
            Some(n) if n <= limit => {}
            _ => return Err(GroupRingError::TooLarge { limit }),
        }
        let mut out = vec![GroupRingElem::zero(self.order)];
        for o in &self.orbits {
            out = out
                .into_iter()
                .flat_map(|base| {
                    o.solutions.iter().map(move |sol| {
                        let mut e = base.clone();
                        for (&x, &c) in o.elements.iter().zip(sol) {
                            e.coeffs[x] = c;
                        }
                        e
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

/// Outcome of the generator-pair check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub anticommutative: bool,
    pub generator_count: usize,
    /// Empty generator set: anticommutative only vacuously.
    pub vacuous: bool,
    pub witness: Option<OracleWitness>,
}

/// First failing pair `(i, j)`, `i ≤ j`, in generator order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleWitness {
    pub first: usize,
    pub second: usize,
    pub first_origin: GeneratorOrigin,
    pub second_origin: GeneratorOrigin,
    /// `gh + hg`, sparse and sorted by element.
    pub sum: Vec<(usize, RingElem)>,
}

/// Checks `gh + hg = 0` for every pair of spanning generators, self-pairs
/// included. `R`-bilinearity of the anticommutator makes this equivalent to
/// anticommutativity of all of `(RG)⁻`.
pub fn oracle_anticommutative(ctx: &InstanceContext) -> Result<OracleVerdict, GroupRingError> {
    oracle_with_interrupt(ctx, &|| false)
}

/// As [`oracle_anticommutative`], polling `stop` periodically.
pub fn oracle_with_interrupt(
    ctx: &InstanceContext,
    stop: &dyn Fn() -> bool,
) -> Result<OracleVerdict, GroupRingError> {
    if ctx.kind() == ContextKind::Incompatible {
        return Err(GroupRingError::IncompatibleContext);
    }
    let gens = skew_generators(ctx);
    let all: Vec<&SkewGenerator> = gens.iter().collect();
    let mut scratch = Vec::with_capacity(8);
    let mut polled = 0u32;
    for (i, g) in all.iter().enumerate() {
        for (j, h) in all.iter().enumerate().skip(i) {
            polled += 1;
            if polled == 4096 {
                polled = 0;
                if stop() {
                    return Err(GroupRingError::Interrupted);
                }
            }
            sparse_anticommutator(ctx, &g.terms, &h.terms, &mut scratch);
            if !scratch.is_empty() {
                scratch.sort();
                return Ok(OracleVerdict {
                    anticommutative: false,
                    generator_count: all.len(),
                    vacuous: false,
                    witness: Some(OracleWitness {
                        first: i,
                        second: j,
                        first_origin: g.origin,
                        second_origin: h.origin,
                        sum: scratch,
                    }),
                });
            }
        }
    }
    Ok(OracleVerdict {
        anticommutative: true,
        generator_count: all.len(),
        vacuous: all.is_empty(),
        witness: None,
    })
}

/// Writes the nonzero terms of `ab + ba` into `out`.
fn sparse_anticommutator(
    ctx: &InstanceContext,
    a: &[(usize, RingElem)],
    b: &[(usize, RingElem)],
    out: &mut Vec<(usize, RingElem)>,
) {
    let (g, r) = (ctx.group(), ctx.ring());
    out.clear();
    let mut push = |z: usize, c: RingElem| match out.iter_mut().find(|(w, _)| *w == z) {
        Some(slot) => slot.1 = r.add(slot.1, c),
        None => out.push((z, c)),
    };
    for &(x, alpha) in a {
        for &(y, beta) in b {
            let c = r.mul(alpha, beta);
            push(g.mul(x, y), c);
            push(g.mul(y, x), c);
        }
    }
    out.retain(|&(_, c)| c != RingElem::ZERO);
}

/// The eight-term expansion of
/// `(x − σ(x)x*)(y − σ(y)y*) + (y − σ(y)y*)(x − σ(x)x*)` for `x, y ∉ G_*`.
pub fn expand_binomial_anticommutator(
    ctx: &InstanceContext,
    x: usize,
    y: usize,
) -> Result<GroupRingElem, GroupRingError> {
    for z in [x, y] {
        if ctx.is_fixed(z) {
            return Err(GroupRingError::SymmetricElement { x: z });
        }
    }
    let (g, r) = (ctx.group(), ctx.ring());
    let (xs, ys) = (ctx.star(x), ctx.star(y));
    let (sx, sy) = (ctx.sigma(x), ctx.sigma(y));
    let sxy = ctx.sigma(g.mul(x, y));
    let one = r.one();
    let terms = [
        (g.mul(x, y), one),
        (g.mul(y, x), one),
        (g.mul(xs, ys), sxy),
        (g.mul(ys, xs), sxy),
        (g.mul(x, ys), r.neg(sy)),
        (g.mul(ys, x), r.neg(sy)),
        (g.mul(y, xs), r.neg(sx)),
        (g.mul(xs, y), r.neg(sx)),
    ];
    let mut out = GroupRingElem::zero(g.order());
    for (z, c) in terms {
        out.coeffs[z] = r.add(out.coeffs[z], c);
    }
    debug_assert_eq!(
        Ok(&out),
        binomial_anticommutator_by_product(ctx, x, y).as_ref()
    );
    Ok(out)
}

/// The same quantity through [`gr_mul`].
pub fn binomial_anticommutator_by_product(
    ctx: &InstanceContext,
    x: usize,
    y: usize,
) -> Result<GroupRingElem, GroupRingError> {
    let binomial = |z: usize| {
        let n = ctx.group().order();
        let r = ctx.ring();
        gr_sub(
            ctx,
            &GroupRingElem::monomial(n, z, r.one()),
            &GroupRingElem::monomial(n, ctx.star(z), ctx.sigma(z)),
        )
    };
    anticommutator(ctx, &binomial(x)?, &binomial(y)?)
}
