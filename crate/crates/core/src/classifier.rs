//! Decides anticommutativity of `(RG)⁻` from group, involution, ring and
//! orientation data alone, without multiplying in `RG`.
//!
//! [`classify`] is the general criterion for a compatible orientation;
//! [`classify_classic`] and [`classify_exp_two_kernel`] are its
//! specializations, and [`classify_plain`] handles the trivial orientation.
//! [`necessary_conditions`] evaluates the structural consequences that every
//! anticommutative instance must satisfy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{ElementSet, Group, Involution};
use crate::orientations::{ContextKind, InstanceContext};
use crate::rings::{Residues, Ring, RingElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifierError {
    #[error("orientation is trivial")]
    TrivialOrientation,
    #[error("orientation is incompatible with the involution")]
    IncompatibleOrientation,
    #[error("orientation is not classic (image not inside {{1, -1}})")]
    NotClassicOrientation,
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error("necessary conditions apply only to anticommutative instances")]
    HypothesisNotSatisfied,
}

/// Which branch of a classification matched. Serialized with the labels the
/// report format uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "2.1-1")]
    PlainAbelianIdentity,
    #[serde(rename = "2.1-2")]
    PlainAbelianShift,
    #[serde(rename = "2.1-3")]
    PlainCommutatorShift,
    #[serde(rename = "2.12-a")]
    AbelianIdentity,
    #[serde(rename = "2.12-b")]
    AbelianShift,
    #[serde(rename = "2.12-c")]
    CommutatorShift,
    #[serde(rename = "2.13-1")]
    ClassicAbelian,
    #[serde(rename = "2.13-2")]
    ClassicSlc,
    #[serde(rename = "2.14-i")]
    ExpTwoAbelian,
    #[serde(rename = "2.14-ii")]
    ExpTwoSlc,
    #[serde(rename = "none")]
    None,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::PlainAbelianIdentity => "2.1-1",
            CaseLabel::PlainAbelianShift => "2.1-2",
            CaseLabel::PlainCommutatorShift => "2.1-3",
            CaseLabel::AbelianIdentity => "2.12-a",
            CaseLabel::AbelianShift => "2.12-b",
            CaseLabel::CommutatorShift => "2.12-c",
            CaseLabel::ClassicAbelian => "2.13-1",
            CaseLabel::ClassicSlc => "2.13-2",
            CaseLabel::ExpTwoAbelian => "2.14-i",
            CaseLabel::ExpTwoSlc => "2.14-ii",
            CaseLabel::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlcNote {
    Abelian,
    /// SLC-group and the involution is its canonical one.
    Slc,
    Other,
}

/// Elements and ring coefficients that falsify a condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub elements: Vec<usize>,
    pub coefficients: Vec<Residues>,
}

impl Witness {
    fn new(ring: &Ring, elements: &[usize], coefficients: &[RingElem]) -> Self {
        Witness {
            elements: elements.to_vec(),
            coefficients: coefficients.iter().map(|&c| ring.to_residues(c)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub condition: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl Diagnostic {
    fn pass(condition: &str) -> Self {
        Diagnostic {
            condition: condition.to_string(),
            passed: true,
            witness: None,
        }
    }

    fn from_witness(condition: &str, witness: Option<Witness>) -> Self {
        Diagnostic {
            condition: condition.to_string(),
            passed: witness.is_none(),
            witness,
        }
    }

    fn flag(condition: &str, passed: bool) -> Self {
        Diagnostic {
            condition: condition.to_string(),
            passed,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub anticommutative: bool,
    pub case_label: CaseLabel,
    pub diagnostics: Vec<Diagnostic>,
    pub slc_note: SlcNote,
    /// Internal inconsistencies (claims the criterion makes about its own
    /// cases that failed on this instance). Empty in a healthy run.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub inconsistencies: Vec<String>,
}

impl ClassificationVerdict {
    pub fn diagnostic(&self, condition: &str) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| d.condition == condition)
    }
}

pub const NONSYMMETRIC_PAIRS: &str = "nonsymmetric_pairs";
pub const MIXED_PAIRS: &str = "mixed_pairs";
pub const SYMMETRIC_PAIRS: &str = "symmetric_pairs";
pub const STRUCTURE: &str = "structure";

fn slc_note(group: &Group, tau: &Involution) -> SlcNote {
    if group.is_abelian() {
        SlcNote::Abelian
    } else if group.is_slc_with(tau) {
        SlcNote::Slc
    } else {
        SlcNote::Other
    }
}

/// `τ(x) ∈ {x, xs}` for every `x`.
fn shifts_by(group: &Group, tau: &Involution, s: usize) -> bool {
    group
        .elements()
        .all(|x| tau.apply(x) == x || tau.apply(x) == group.mul(x, s))
}

fn require_oriented(ctx: &InstanceContext) -> Result<(), ClassifierError> {
    match ctx.kind() {
        ContextKind::Oriented => Ok(()),
        ContextKind::Plain => Err(ClassifierError::TrivialOrientation),
        ContextKind::Incompatible => Err(ClassifierError::IncompatibleOrientation),
    }
}

fn complement(set: &ElementSet) -> Vec<usize> {
    (0..set.universe()).filter(|&x| !set.contains(x)).collect()
}

/// Quantifier domains for the three pair conditions. The full domains come
/// from [`Domains::full`]; restricting them is only used to probe
/// monotonicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domains {
    pub nonsymmetric: Vec<usize>,
    pub symmetric: Vec<usize>,
}

impl Domains {
    pub fn full(ctx: &InstanceContext) -> Self {
        Domains {
            nonsymmetric: complement(ctx.fixed()),
            symmetric: ctx.fixed().to_vec(),
        }
    }
}

/// For `x, y ∉ G_*`: noncommuting ⇒ `1 + σ(xy) = σ(x) + σ(y)`; commuting ⇒
/// `2(1 + σ(xy)) = 0 = 2(σ(x) + σ(y))`.
pub fn check_nonsymmetric_pairs(ctx: &InstanceContext) -> Diagnostic {
    check_nonsymmetric_pairs_on(ctx, &Domains::full(ctx))
}

pub fn check_nonsymmetric_pairs_on(ctx: &InstanceContext, dom: &Domains) -> Diagnostic {
    let (g, r) = (ctx.group(), ctx.ring());
    let witness = nonsymmetric_pair_failure(ctx, &dom.nonsymmetric).map(|(x, y)| {
        let xy = g.mul(x, y);
        Witness::new(r, &[x, y], &[ctx.sigma(x), ctx.sigma(y), ctx.sigma(xy)])
    });
    Diagnostic::from_witness(NONSYMMETRIC_PAIRS, witness)
}

fn nonsymmetric_pair_failure(ctx: &InstanceContext, dom: &[usize]) -> Option<(usize, usize)> {
    let (g, r) = (ctx.group(), ctx.ring());
    for &x in dom {
        for &y in dom {
            let lhs = r.add(r.one(), ctx.sigma(g.mul(x, y)));
            let rhs = r.add(ctx.sigma(x), ctx.sigma(y));
            let ok = if g.commutes(x, y) {
                r.is_zero(r.double(lhs)) && r.is_zero(r.double(rhs))
            } else {
                lhs == rhs
            };
            if !ok {
                return Some((x, y));
            }
        }
    }
    None
}

/// For `x ∉ G_*`, `y ∈ G_*` and `α` with `α(1 + σ(y)) = 0`: noncommuting ⇒
/// `ασ(x) = α`; commuting ⇒ `2α = 0`.
pub fn check_mixed_pairs(ctx: &InstanceContext) -> Diagnostic {
    check_mixed_pairs_on(ctx, &Domains::full(ctx))
}

pub fn check_mixed_pairs_on(ctx: &InstanceContext, dom: &Domains) -> Diagnostic {
    let (g, r) = (ctx.group(), ctx.ring());
    for &y in &dom.symmetric {
        let ann = r.annihilator(r.add(r.one(), ctx.sigma(y)));
        for &x in &dom.nonsymmetric {
            let commute = g.commutes(x, y);
            for &alpha in &ann {
                let ok = if commute {
                    r.is_zero(r.double(alpha))
                } else {
                    r.mul(alpha, ctx.sigma(x)) == alpha
                };
                if !ok {
                    return Diagnostic::from_witness(
                        MIXED_PAIRS,
                        Some(Witness::new(r, &[x, y], &[alpha])),
                    );
                }
            }
        }
    }
    Diagnostic::pass(MIXED_PAIRS)
}

/// For `x, y ∈ G_*`, `α(1 + σ(x)) = 0`, `β(1 + σ(y)) = 0`: noncommuting ⇒
/// `αβ = 0`; commuting ⇒ `2αβ = 0`.
pub fn check_symmetric_pairs(ctx: &InstanceContext) -> Diagnostic {
    check_symmetric_pairs_on(ctx, &Domains::full(ctx))
}

pub fn check_symmetric_pairs_on(ctx: &InstanceContext, dom: &Domains) -> Diagnostic {
    let (g, r) = (ctx.group(), ctx.ring());
    let anns: Vec<Vec<RingElem>> = dom
        .symmetric
        .iter()
        .map(|&x| r.annihilator(r.add(r.one(), ctx.sigma(x))))
        .collect();
    for (i, &x) in dom.symmetric.iter().enumerate() {
        for (j, &y) in dom.symmetric.iter().enumerate() {
            let commute = g.commutes(x, y);
            for &alpha in &anns[i] {
                for &beta in &anns[j] {
                    let prod = r.mul(alpha, beta);
                    let ok = if commute {
                        r.is_zero(r.double(prod))
                    } else {
                        r.is_zero(prod)
                    };
                    if !ok {
                        return Diagnostic::from_witness(
                            SYMMETRIC_PAIRS,
                            Some(Witness::new(r, &[x, y], &[alpha, beta])),
                        );
                    }
                }
            }
        }
    }
    Diagnostic::pass(SYMMETRIC_PAIRS)
}

/// Structural alternatives for a compatible orientation, in order: abelian
/// with trivial involution (characteristic 4 or 8), abelian shifted by an
/// involutory fixed `s` (characteristic 4), unique nontrivial commutator `s`
/// with `τ(x) ∈ {x, xs}` (characteristic 4).
fn structural_case(ctx: &InstanceContext, inconsistencies: &mut Vec<String>) -> CaseLabel {
    let (g, tau) = (ctx.group(), ctx.involution());
    let ch = ctx.ring().characteristic();
    if g.is_abelian() {
        if tau.is_identity() {
            if ch == 4 || ch == 8 {
                return CaseLabel::AbelianIdentity;
            }
            return CaseLabel::None;
        }
        if ch == 4
            && ctx
                .fixed()
                .iter()
                .any(|s| g.mul(s, s) == g.identity() && shifts_by(g, tau, s))
        {
            return CaseLabel::AbelianShift;
        }
        return CaseLabel::None;
    }
    if ch != 4 {
        return CaseLabel::None;
    }
    match g.unique_nontrivial_commutator() {
        Some(s) if shifts_by(g, tau, s) => {
            if !(ctx.is_fixed(s) && g.is_central(s)) {
                inconsistencies.push(format!("commutator {s} not fixed and central"));
            }
            CaseLabel::CommutatorShift
        }
        _ => CaseLabel::None,
    }
}

/// The general criterion: anticommutative iff one structural case holds and
/// the three pair conditions pass.
pub fn classify(ctx: &InstanceContext) -> Result<ClassificationVerdict, ClassifierError> {
    require_oriented(ctx)?;
    let (g, tau) = (ctx.group(), ctx.involution());
    let mut inconsistencies = Vec::new();
    let case = structural_case(ctx, &mut inconsistencies);
    let diagnostics = vec![
        Diagnostic::flag(STRUCTURE, case != CaseLabel::None),
        check_nonsymmetric_pairs(ctx),
        check_mixed_pairs(ctx),
        check_symmetric_pairs(ctx),
    ];
    let anticommutative = diagnostics.iter().all(|d| d.passed);
    let note = slc_note(g, tau);
    if anticommutative && note == SlcNote::Other && fixed_set_commutes(ctx) {
        inconsistencies.push("fixed set commutes but group is neither abelian nor SLC".into());
    }
    Ok(ClassificationVerdict {
        anticommutative,
        case_label: case,
        diagnostics,
        slc_note: note,
        inconsistencies,
    })
}

/// `(G_*)' = {1}`.
fn fixed_set_commutes(ctx: &InstanceContext) -> bool {
    let g = ctx.group();
    let fixed = ctx.fixed().to_vec();
    fixed
        .iter()
        .all(|&x| fixed.iter().all(|&y| g.commutes(x, y)))
}

/// Criterion for classic orientations (`σ(G) ⊆ {±1}`): characteristic 4 and
/// either `G` abelian with `τ|_N = id` and `τ(x) = xs` off `N` for a fixed
/// `s ∈ N_*`, `s ≠ 1`; or `G` SLC with canonical involution and `τ(x) = xs`
/// off `N`.
pub fn classify_classic(ctx: &InstanceContext) -> Result<ClassificationVerdict, ClassifierError> {
    require_oriented(ctx)?;
    if !ctx.is_classic() {
        return Err(ClassifierError::NotClassicOrientation);
    }
    let (g, tau) = (ctx.group(), ctx.involution());
    let kernel = ctx.kernel();
    let outside: Vec<usize> = complement(kernel);
    let shift_outside = |s: usize| outside.iter().all(|&x| tau.apply(x) == g.mul(x, s));
    let char_four = ctx.ring().characteristic() == 4;

    let abelian_case = g.is_abelian()
        && kernel.iter().all(|x| tau.apply(x) == x)
        && ctx
            .fixed_kernel()
            .iter()
            .any(|s| s != g.identity() && shift_outside(s));
    let slc_case =
        g.is_slc_with(tau) && g.unique_nontrivial_commutator().is_some_and(shift_outside);

    let case = match (char_four, abelian_case, slc_case) {
        (true, true, _) => CaseLabel::ClassicAbelian,
        (true, false, true) => CaseLabel::ClassicSlc,
        _ => CaseLabel::None,
    };
    Ok(ClassificationVerdict {
        anticommutative: case != CaseLabel::None,
        case_label: case,
        diagnostics: vec![
            Diagnostic::flag("characteristic_four", char_four),
            Diagnostic::flag("abelian_shift_off_kernel", abelian_case),
            Diagnostic::flag("slc_shift_off_kernel", slc_case),
        ],
        slc_note: slc_note(g, tau),
        inconsistencies: Vec::new(),
    })
}

/// Which hypothesis of [`classify_exp_two_kernel`] an instance misses.
pub fn exp_two_kernel_hypotheses(ctx: &InstanceContext) -> Result<(), ClassifierError> {
    require_oriented(ctx)?;
    let (g, tau) = (ctx.group(), ctx.involution());
    let kernel = ctx.kernel();
    let exponent = g
        .quotient_exponent(kernel)
        .map_err(|e| ClassifierError::HypothesesNotMet(format!("kernel: {e}")))?;
    if exponent != 2 {
        return Err(ClassifierError::HypothesesNotMet(format!(
            "exponent of G/N is {exponent}, not 2"
        )));
    }
    let kernel_abelian = kernel
        .iter()
        .all(|x| kernel.iter().all(|y| g.commutes(x, y)));
    if !kernel_abelian {
        return Err(ClassifierError::HypothesesNotMet("N is not abelian".into()));
    }
    if !kernel.iter().all(|x| tau.apply(x) == x) {
        return Err(ClassifierError::HypothesesNotMet(
            "involution is not the identity on N".into(),
        ));
    }
    if !ctx.fixed().is_subset(kernel) {
        return Err(ClassifierError::HypothesesNotMet(
            "G_* is not inside N".into(),
        ));
    }
    Ok(())
}

/// Criterion when `G/N` has exponent 2, `N` is abelian and fixed pointwise,
/// and `G_* ⊆ N`: characteristic 4 and either `G` abelian with classic `σ`,
/// or `G` SLC with canonical involution, `G/N ≅ C2 × C2`, the nonsymmetric
/// pair condition, and `2α = 0` whenever `αx` is skew.
pub fn classify_exp_two_kernel(
    ctx: &InstanceContext,
) -> Result<ClassificationVerdict, ClassifierError> {
    classify_exp_two_kernel_with(ctx, AbelianImage::Classic)
}

/// How to read the abelian alternative of [`classify_exp_two_kernel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbelianImage {
    /// `σ(G) = {1, −1}`.
    #[default]
    Classic,
    /// `|σ(G)| = 2`, i.e. `[G : N] = 2`. Differs from `Classic` over rings
    /// with square roots of 1 other than `±1`, such as `Z/4 × Z/4`.
    OrderTwo,
}

pub fn classify_exp_two_kernel_with(
    ctx: &InstanceContext,
    abelian_image: AbelianImage,
) -> Result<ClassificationVerdict, ClassifierError> {
    exp_two_kernel_hypotheses(ctx)?;
    let (g, tau, r) = (ctx.group(), ctx.involution(), ctx.ring());
    let char_four = r.characteristic() == 4;
    let abelian_case = g.is_abelian()
        && match abelian_image {
            AbelianImage::Classic => ctx.is_classic(),
            AbelianImage::OrderTwo => g.order() == 2 * ctx.kernel().count(),
        };

    let quotient_v4 = g.order() / ctx.kernel().count() == 4;
    let pairs = check_nonsymmetric_pairs(ctx);
    let two_torsion = ctx.fixed().iter().find_map(|x| {
        r.annihilator(r.add(r.one(), ctx.sigma(x)))
            .into_iter()
            .find(|&a| !r.is_zero(r.double(a)))
            .map(|a| Witness::new(r, &[x], &[a]))
    });
    let slc = g.is_slc_with(tau);
    let slc_case = slc && quotient_v4 && pairs.passed && two_torsion.is_none();

    let case = match (char_four, abelian_case, slc_case) {
        (true, true, _) => CaseLabel::ExpTwoAbelian,
        (true, false, true) => CaseLabel::ExpTwoSlc,
        _ => CaseLabel::None,
    };
    Ok(ClassificationVerdict {
        anticommutative: case != CaseLabel::None,
        case_label: case,
        diagnostics: vec![
            Diagnostic::flag("characteristic_four", char_four),
            Diagnostic::flag("abelian_classic", abelian_case),
            Diagnostic::flag("slc_quotient_klein", slc && quotient_v4),
            pairs,
            Diagnostic::from_witness("monomial_two_torsion", two_torsion),
        ],
        slc_note: slc_note(g, tau),
        inconsistencies: Vec::new(),
    })
}

/// How to read the first alternative for plain involutions (abelian group,
/// identity involution), which carries no characteristic condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlainReading {
    /// No restriction beyond characteristic ≠ 2.
    #[default]
    Literal,
    /// Additionally require characteristic 4 or 8.
    CharFourOrEight,
}

/// Criterion for the plain involution (trivial orientation): `G` abelian
/// with `τ = id`; or characteristic 4, `G` abelian, `τ(x) ∈ {x, sx}` for an
/// `s` with `s² = 1`; or characteristic 4, `G` nonabelian with unique
/// nontrivial commutator `s` and `τ(x) ∈ {x, sx}`.
pub fn classify_plain(
    group: &Group,
    tau: &Involution,
    ring: &Ring,
    reading: PlainReading,
) -> ClassificationVerdict {
    let ch = ring.characteristic();
    let char_ok = match reading {
        PlainReading::Literal => true,
        PlainReading::CharFourOrEight => ch == 4 || ch == 8,
    };
    let left_shift = |s: usize| {
        group
            .elements()
            .all(|x| tau.apply(x) == x || tau.apply(x) == group.mul(s, x))
    };
    let identity_case = group.is_abelian() && tau.is_identity() && char_ok;
    let abelian_shift = ch == 4
        && group.is_abelian()
        && group
            .elements()
            .any(|s| group.mul(s, s) == group.identity() && left_shift(s));
    let commutator_shift = ch == 4
        && !group.is_abelian()
        && group.unique_nontrivial_commutator().is_some_and(left_shift);
    let case = if identity_case {
        CaseLabel::PlainAbelianIdentity
    } else if abelian_shift {
        CaseLabel::PlainAbelianShift
    } else if commutator_shift {
        CaseLabel::PlainCommutatorShift
    } else {
        CaseLabel::None
    };
    ClassificationVerdict {
        anticommutative: case != CaseLabel::None,
        case_label: case,
        diagnostics: vec![
            Diagnostic::flag("abelian_identity", identity_case),
            Diagnostic::flag("abelian_shift", abelian_shift),
            Diagnostic::flag("commutator_shift", commutator_shift),
        ],
        slc_note: slc_note(group, tau),
        inconsistencies: Vec::new(),
    }
}

/// Restricts an oriented instance to `RN`, where `σ*` acts as the plain
/// involution. Returns the plain context over the kernel subgroup.
pub fn kernel_plain_context(ctx: &InstanceContext) -> InstanceContext {
    let (sub, embedding) = ctx
        .group()
        .subgroup(ctx.kernel())
        .expect("kernel is a subgroup");
    let tau = ctx
        .involution()
        .restrict(&embedding)
        .expect("kernel is invariant under a compatible involution");
    let tau = Involution::new(&sub, tau.perm().to_vec()).expect("restriction is an involution");
    InstanceContext::plain(sub.into(), tau.into(), ctx.ring_arc().clone())
}

/// Identifiers of the necessary conditions checked by [`necessary_conditions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// `σ(x) ≠ −1` on `G_*`.
    FixedNotMinusOne,
    /// Characteristic 4 or 8; if `τ ≠ id`: characteristic 4, `xx* = x*x`
    /// and `x² ∈ G_*` off `G_*`.
    Characteristic,
    /// If `τ ≠ id`, each fixed `x` carries a nonzero skew monomial.
    FixedMonomialExists,
    /// `xy = yx ⇔ x*y = yx*`, plus the commuting-pair identities off `G_*`.
    StarCommutation,
    /// `y⁻¹xy ∈ {x, x*}` for `x ∉ G_*`, `y ∉ N ∪ G_*`.
    ConjugationOffKernel,
    /// Conjugation, product and orientation identities for `x, y ∉ G_*`.
    NonsymmetricPairs,
    /// Conjugation, product and coefficient identities for `x ∉ G_*`, `y ∈ G_*`.
    MixedPairs,
    /// `(G_*)' = 1` ⇒ `G` abelian or SLC with canonical involution.
    AbelianOrSlc,
    /// Product and coefficient identities for `x, y ∈ G_*`.
    SymmetricPairs,
    /// Central involutory shift `s` and the unique commutator.
    CentralShift,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub id: ConditionId,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

fn check(id: ConditionId, witness: Option<Witness>) -> ConditionCheck {
    ConditionCheck {
        id,
        holds: witness.is_none(),
        witness,
    }
}

/// Evaluates every structural consequence of anticommutativity on this
/// instance. Only meaningful when the oracle answered true.
pub fn necessary_conditions(
    ctx: &InstanceContext,
    oracle_answer: bool,
) -> Result<Vec<ConditionCheck>, ClassifierError> {
    if !oracle_answer {
        return Err(ClassifierError::HypothesisNotSatisfied);
    }
    require_oriented(ctx)?;
    let (g, tau, r) = (ctx.group(), ctx.involution(), ctx.ring());
    let w = |elements: &[usize]| Some(Witness::new(r, elements, &[]));
    let fixed = ctx.fixed().to_vec();
    let moving = complement(ctx.fixed());
    let kernel = ctx.kernel();
    let star = |x: usize| tau.apply(x);
    let in_orbit = |x: usize, y: usize| {
        let c = g.conjugate(x, y);
        c == x || c == star(x)
    };
    let ann = |x: usize| r.annihilator(r.add(r.one(), ctx.sigma(x)));
    let mut out = Vec::new();

    out.push(check(
        ConditionId::FixedNotMinusOne,
        fixed
            .iter()
            .find(|&&x| ctx.sigma(x) == r.neg_one())
            .and_then(|&x| w(&[x])),
    ));

    let ch = r.characteristic();
    let char_ok = if tau.is_identity() {
        ch == 4 || ch == 8
    } else {
        ch == 4
    };
    let characteristic = if !char_ok {
        w(&[])
    } else {
        moving
            .iter()
            .find(|&&x| !g.commutes(x, star(x)) || !ctx.is_fixed(g.mul(x, x)))
            .and_then(|&x| w(&[x]))
    };
    out.push(check(ConditionId::Characteristic, characteristic));

    let monomial = if tau.is_identity() {
        None
    } else {
        fixed
            .iter()
            .find(|&&x| ann(x).iter().all(|&a| r.is_zero(a)))
            .and_then(|&x| w(&[x]))
    };
    out.push(check(ConditionId::FixedMonomialExists, monomial));

    let mut star_comm = None;
    'outer: for x in g.elements() {
        for y in g.elements() {
            if g.commutes(x, y) != g.commutes(star(x), y) {
                star_comm = w(&[x, y]);
                break 'outer;
            }
        }
    }
    if star_comm.is_none() {
        'outer2: for &x in &moving {
            for &y in &moving {
                if !g.commutes(x, y) {
                    continue;
                }
                let (xs, ys) = (star(x), star(y));
                let xy = g.mul(x, y);
                let cross = g.mul(x, ys);
                let lhs = r.add(r.one(), ctx.sigma(xy));
                let rhs = r.add(ctx.sigma(x), ctx.sigma(y));
                let ok = g.mul(xs, ys) == xy
                    && g.mul(ys, xs) == xy
                    && g.mul(ys, x) == cross
                    && g.mul(xs, y) == cross
                    && g.mul(y, xs) == cross
                    && r.is_zero(r.double(lhs))
                    && r.is_zero(r.double(rhs));
                if !ok {
                    star_comm = w(&[x, y]);
                    break 'outer2;
                }
            }
        }
    }
    out.push(check(ConditionId::StarCommutation, star_comm));

    let mut conj = None;
    'outer3: for &x in &moving {
        for &y in &moving {
            if !kernel.contains(y) && !in_orbit(x, y) {
                conj = w(&[x, y]);
                break 'outer3;
            }
        }
    }
    out.push(check(ConditionId::ConjugationOffKernel, conj));

    let mut nonsym = None;
    'outer4: for &x in &moving {
        for &y in &moving {
            let xy = g.mul(x, y);
            let ok = in_orbit(x, y)
                && xy == g.mul(star(x), star(y))
                && ctx.is_fixed(xy) == g.commutes(x, y);
            if !ok {
                nonsym = w(&[x, y]);
                break 'outer4;
            }
        }
    }
    if nonsym.is_none() {
        nonsym = check_nonsymmetric_pairs(ctx).witness;
    }
    out.push(check(ConditionId::NonsymmetricPairs, nonsym));

    let mut mixed = None;
    'outer5: for &y in &fixed {
        for &x in &moving {
            let ok = in_orbit(x, y) && ctx.is_fixed(g.mul(x, y)) != g.commutes(x, y);
            if !ok {
                mixed = w(&[x, y]);
                break 'outer5;
            }
        }
    }
    if mixed.is_none() {
        mixed = check_mixed_pairs(ctx).witness;
    }
    out.push(check(ConditionId::MixedPairs, mixed));

    let abelian_or_slc = if fixed_set_commutes(ctx) && !g.is_abelian() && !g.is_slc_with(tau) {
        w(&[])
    } else {
        None
    };
    out.push(check(ConditionId::AbelianOrSlc, abelian_or_slc));

    let mut sym = None;
    'outer6: for &x in &fixed {
        for &y in &fixed {
            if g.commutes(x, y) != ctx.is_fixed(g.mul(x, y)) {
                sym = w(&[x, y]);
                break 'outer6;
            }
        }
    }
    if sym.is_none() {
        sym = check_symmetric_pairs(ctx).witness;
    }
    out.push(check(ConditionId::SymmetricPairs, sym));

    let central_fixed_shift = |s: usize| {
        g.is_central(s)
            && ctx.is_fixed(s)
            && g.mul(s, s) == g.identity()
            && g.elements().all(|x| star(x) == x || star(x) == g.mul(s, x))
    };
    let mut shift = None;
    if !tau.is_identity() && !g.elements().any(central_fixed_shift) {
        shift = w(&[]);
    }
    if shift.is_none() && !g.is_abelian() {
        match g.unique_nontrivial_commutator() {
            Some(s) if central_fixed_shift(s) => {}
            Some(s) => shift = w(&[s]),
            None => shift = w(&[]),
        }
    }
    out.push(check(ConditionId::CentralShift, shift));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{catalog, parse_group_spec, Family};
    use crate::orientations::Orientation;
    use crate::rings::make_ring;
    use std::sync::Arc;

    fn cyclic_ctx(n: usize, inversion: bool, moduli: &[u32], gen_value: i64) -> InstanceContext {
        let g = Arc::new(catalog(Family::Cyclic, n).unwrap());
        let tau = if inversion {
            Involution::inversion(&g)
        } else {
            Involution::identity(&g).unwrap()
        };
        let r = Arc::new(make_ring(moduli).unwrap());
        let u = r.from_int(gen_value);
        let values = (0..n)
            .map(|k| (0..k).fold(r.one(), |acc, _| r.mul(acc, u)))
            .collect();
        InstanceContext::from_values(g, Arc::new(tau), r, values).unwrap()
    }

    fn q8_ctx(moduli: &[u32], i_val: &[u32], j_val: &[u32]) -> InstanceContext {
        let g = Arc::new(catalog(Family::Dicyclic, 2).unwrap());
        let tau = Arc::new(g.canonical_involution().unwrap());
        let r = Arc::new(make_ring(moduli).unwrap());
        let o = Orientation::from_generator_images(
            &g,
            &tau,
            &r,
            &[(1, r.elem(i_val).unwrap()), (4, r.elem(j_val).unwrap())],
        )
        .unwrap();
        InstanceContext::new(g, tau, r, o).unwrap()
    }

    #[test]
    fn plain_cases() {
        let c2 = catalog(Family::Cyclic, 2).unwrap();
        let z4 = make_ring(&[4]).unwrap();
        let z8 = make_ring(&[8]).unwrap();
        let id = Involution::identity(&c2).unwrap();
        assert_eq!(
            classify_plain(&c2, &id, &z4, PlainReading::Literal).case_label,
            CaseLabel::PlainAbelianIdentity
        );
        let q8 = catalog(Family::Dicyclic, 2).unwrap();
        let can = q8.canonical_involution().unwrap();
        assert_eq!(
            classify_plain(&q8, &can, &z4, PlainReading::Literal).case_label,
            CaseLabel::PlainCommutatorShift
        );
        assert_eq!(
            classify_plain(&q8, &can, &z8, PlainReading::Literal).case_label,
            CaseLabel::None
        );
        let z3 = make_ring(&[3]).unwrap();
        assert!(classify_plain(&c2, &id, &z3, PlainReading::Literal).anticommutative);
        assert!(!classify_plain(&c2, &id, &z3, PlainReading::CharFourOrEight).anticommutative);
    }

    #[test]
    fn nonsymmetric_pair_condition() {
        let ctx = cyclic_ctx(2, false, &[4], 3);
        assert!(check_nonsymmetric_pairs(&ctx).passed);
        assert!(check_nonsymmetric_pairs(&q8_ctx(&[4, 4], &[3, 1], &[1, 3])).passed);
        let d = check_nonsymmetric_pairs(&q8_ctx(&[4, 3], &[3, 1], &[1, 2]));
        assert!(!d.passed);
        assert!(d.witness.is_some());
    }

    #[test]
    fn mixed_pair_condition() {
        assert!(check_mixed_pairs(&cyclic_ctx(2, false, &[4], 3)).passed);
        assert!(check_mixed_pairs(&q8_ctx(&[4, 4], &[3, 1], &[1, 3])).passed);
        // C2×C2 = {1, a, b, ab}, τ swaps a and b, σ(a) = σ(b) = −1 over Z/4.
        let v4 = Arc::new(parse_group_spec("C2xC2").unwrap());
        let (a, b, ab) = (2, 1, 3);
        let mut perm = vec![0, 0, 0, 0];
        perm[a] = b;
        perm[b] = a;
        perm[ab] = ab;
        let tau = Arc::new(Involution::new(&v4, perm).unwrap());
        let z4 = Arc::new(make_ring(&[4]).unwrap());
        let m1 = z4.neg_one();
        let mut vals = vec![z4.one(); 4];
        vals[a] = m1;
        vals[b] = m1;
        let ctx = InstanceContext::from_values(v4.clone(), tau.clone(), z4.clone(), vals).unwrap();
        assert_eq!(ctx.fixed().to_vec(), vec![0, ab]);
        assert!(check_mixed_pairs(&ctx).passed);
        let mut bad = vec![z4.one(); 4];
        bad[a] = m1;
        bad[ab] = m1;
        assert!(InstanceContext::from_values(v4, tau, z4, bad).is_err());
    }

    #[test]
    fn symmetric_pair_condition() {
        let d = check_symmetric_pairs(&cyclic_ctx(2, false, &[4], 3));
        assert!(!d.passed);
        let w = d.witness.unwrap();
        assert_eq!(w.elements, vec![1, 1]);
        assert_eq!(w.coefficients, vec![Residues(vec![1]), Residues(vec![1])]);
        assert!(check_symmetric_pairs(&cyclic_ctx(2, false, &[8], 3)).passed);
    }

    #[test]
    fn general_criterion() {
        let v = classify(&cyclic_ctx(2, false, &[8], 3)).unwrap();
        assert!(v.anticommutative);
        assert_eq!(v.case_label, CaseLabel::AbelianIdentity);
        let v = classify(&cyclic_ctx(2, false, &[4], 3)).unwrap();
        assert!(!v.anticommutative);
        assert_eq!(v.case_label, CaseLabel::AbelianIdentity);
        assert!(!v.diagnostic(SYMMETRIC_PAIRS).unwrap().passed);
        let v = classify(&q8_ctx(&[4, 4], &[3, 1], &[1, 3])).unwrap();
        assert!(v.anticommutative);
        assert_eq!(v.case_label, CaseLabel::CommutatorShift);
        assert_eq!(v.slc_note, SlcNote::Slc);
    }

    #[test]
    fn classic_criterion() {
        let v = classify_classic(&q8_ctx(&[4], &[1], &[3])).unwrap();
        assert_eq!(v.case_label, CaseLabel::ClassicSlc);
        assert!(
            !classify_classic(&cyclic_ctx(2, false, &[4], 3))
                .unwrap()
                .anticommutative
        );
        let v = classify_classic(&cyclic_ctx(4, true, &[4], 3)).unwrap();
        assert_eq!(v.case_label, CaseLabel::ClassicAbelian);
        assert_eq!(
            classify_classic(&q8_ctx(&[4, 4], &[3, 1], &[1, 3])).unwrap_err(),
            ClassifierError::NotClassicOrientation
        );
    }

    #[test]
    fn exp_two_criterion() {
        let v = classify_exp_two_kernel(&cyclic_ctx(4, true, &[4], 3)).unwrap();
        assert_eq!(v.case_label, CaseLabel::ExpTwoAbelian);
        // τ = id on C2 over Z/8: G_* = G is not inside N = {1}.
        assert!(matches!(
            classify_exp_two_kernel(&cyclic_ctx(2, false, &[8], 3)),
            Err(ClassifierError::HypothesesNotMet(_))
        ));
        let v = classify_exp_two_kernel(&q8_ctx(&[4, 4], &[3, 1], &[1, 3])).unwrap();
        assert!(v.anticommutative);
        assert_eq!(v.case_label, CaseLabel::ExpTwoSlc);
        // C4 with inversion over Z/4 × Z/4, σ(g) = (3, 1): image {1, (3, 1)}.
        let g = Arc::new(catalog(Family::Cyclic, 4).unwrap());
        let tau = Arc::new(Involution::inversion(&g));
        let r = Arc::new(make_ring(&[4, 4]).unwrap());
        let u = r.elem(&[3, 1]).unwrap();
        let values = vec![r.one(), u, r.one(), u];
        let ctx = InstanceContext::from_values(g, tau, r, values).unwrap();
        assert!(classify(&ctx).unwrap().anticommutative);
        assert!(!classify_exp_two_kernel(&ctx).unwrap().anticommutative);
        let v = classify_exp_two_kernel_with(&ctx, AbelianImage::OrderTwo).unwrap();
        assert_eq!(v.case_label, CaseLabel::ExpTwoAbelian);
    }

    #[test]
    fn necessary_condition_suite() {
        let ctx = cyclic_ctx(2, false, &[8], 3);
        let checks = necessary_conditions(&ctx, true).unwrap();
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
        let ctx = q8_ctx(&[4], &[1], &[3]);
        assert!(necessary_conditions(&ctx, true)
            .unwrap()
            .iter()
            .all(|c| c.holds));
        let ctx = q8_ctx(&[4, 4], &[3, 1], &[1, 3]);
        assert!(necessary_conditions(&ctx, true)
            .unwrap()
            .iter()
            .all(|c| c.holds));
        assert_eq!(
            necessary_conditions(&ctx, false).unwrap_err(),
            ClassifierError::HypothesisNotSatisfied
        );
        // σ(g) = −1 on a fixed element: flagged when forced through.
        let ctx = cyclic_ctx(2, false, &[4], 3);
        let checks = necessary_conditions(&ctx, true).unwrap();
        let first = &checks[0];
        assert_eq!(first.id, ConditionId::FixedNotMinusOne);
        assert!(!first.holds);
    }

    #[test]
    fn labels_serialize() {
        assert_eq!(
            serde_json::to_string(&CaseLabel::CommutatorShift).unwrap(),
            "\"2.12-c\""
        );
        for label in [
            CaseLabel::PlainAbelianShift,
            CaseLabel::ExpTwoSlc,
            CaseLabel::None,
        ] {
            assert_eq!(
                serde_json::to_string(&label).unwrap(),
                format!("\"{}\"", label.as_str())
            );
        }
    }
}
