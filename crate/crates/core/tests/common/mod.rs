#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use skewcomm::grouprings::{skew_generators, skew_module, GroupRingElem};
use skewcomm::groups::{parse_group_spec, Group, Involution};
use skewcomm::harness::{enumerate_instances, CampaignConfig, Instance};
use skewcomm::orientations::{InstanceContext, Orientation};
use skewcomm::rings::{parse_ring_spec, Ring, RingElem};

pub fn ring_elems(r: &Ring) -> Vec<RingElem> {
    r.elements().collect()
}

pub fn random_elem(rng: &mut ChaCha8Rng, ctx: &InstanceContext) -> GroupRingElem {
    let elems = ring_elems(ctx.ring());
    let coeffs = (0..ctx.group().order())
        .map(|_| elems[rng.gen_range(0..elems.len())])
        .collect();
    GroupRingElem::from_coeffs(coeffs)
}

/// Instances over catalog groups of order at most `max_order` and rings of
/// size at most `max_ring`.
pub fn small_instances(max_order: usize, max_ring: usize) -> Vec<Instance> {
    let base = CampaignConfig::default();
    let groups: Vec<String> = base
        .group_families
        .iter()
        .filter(|s| parse_group_spec(s).unwrap().order() <= max_order)
        .cloned()
        .collect();
    let rings: Vec<String> = base
        .ring_specs
        .iter()
        .filter(|s| parse_ring_spec(s).unwrap().size() <= max_ring)
        .cloned()
        .collect();
    let cfg = CampaignConfig {
        group_families: groups,
        ring_specs: rings,
        ..base
    };
    enumerate_instances(&cfg).unwrap()
}

/// Builds a context from a group spec, an involution, a ring spec and
/// orientation values on generators given as residue tuples.
pub fn context(
    group: &str,
    involution: impl Fn(&Group) -> Involution,
    ring: &str,
    images: &[(usize, &[u32])],
) -> InstanceContext {
    let g = parse_group_spec(group).unwrap();
    let tau = involution(&g);
    let r = parse_ring_spec(ring).unwrap();
    let images: Vec<(usize, RingElem)> = images
        .iter()
        .map(|&(x, res)| (x, r.elem(res).unwrap()))
        .collect();
    let o = Orientation::from_generator_images(&g, &tau, &r, &images).unwrap();
    InstanceContext::new(Arc::new(g), Arc::new(tau), Arc::new(r), o).unwrap()
}

pub fn identity(g: &Group) -> Involution {
    Involution::identity(g).unwrap()
}

pub fn inversion(g: &Group) -> Involution {
    Involution::inversion(g)
}

pub fn canonical(g: &Group) -> Involution {
    g.canonical_involution().unwrap()
}

/// Checks that the `R`-span of the generators equals the skew module, orbit
/// by orbit. Both sides split over `σ*`-orbits, so orbitwise equality is
/// equality of the whole modules. Returns the first orbit that differs.
pub fn span_matches_module(ctx: &InstanceContext) -> Result<(), Vec<usize>> {
    let r = ctx.ring();
    let elems = ring_elems(r);
    let gens = skew_generators(ctx);
    let module = skew_module(ctx);
    for orbit in module.orbits() {
        let pos = |x: usize| orbit.elements.iter().position(|&e| e == x);
        let multiples: Vec<Vec<RingElem>> = gens
            .iter()
            .filter(|g| g.terms.iter().all(|&(x, _)| pos(x).is_some()))
            .flat_map(|g| {
                elems.iter().map(move |&c| {
                    let mut v = vec![RingElem::ZERO; orbit.elements.len()];
                    for &(x, a) in &g.terms {
                        v[pos(x).unwrap()] = r.mul(c, a);
                    }
                    v
                })
            })
            .collect();
        let mut span = vec![vec![RingElem::ZERO; orbit.elements.len()]];
        let mut seen: std::collections::BTreeSet<Vec<RingElem>> = span.iter().cloned().collect();
        let mut i = 0;
        while i < span.len() {
            let base = span[i].clone();
            for m in &multiples {
                let sum: Vec<RingElem> = base.iter().zip(m).map(|(&a, &b)| r.add(a, b)).collect();
                if seen.insert(sum.clone()) {
                    span.push(sum);
                }
            }
            i += 1;
        }
        let solutions: std::collections::BTreeSet<Vec<RingElem>> =
            orbit.solutions.iter().cloned().collect();
        if seen != solutions {
            return Err(orbit.elements.clone());
        }
    }
    Ok(())
}
