//! Browser explorer: pick a group and ring, browse involutions and
//! orientations, and classify one instance against the oracle.
//!
//! Every export returns a JSON string; errors surface as thrown strings.

use std::sync::Arc;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use skewcomm::groups::{parse_group_spec, Group, Involution};
use skewcomm::harness::{default_group_specs, default_ring_specs, evaluate, EvalOptions};
use skewcomm::orientations::{enumerate_orientations, InstanceContext};
use skewcomm::rings::{parse_ring_spec, Ring};

#[derive(Serialize)]
struct Catalog {
    groups: Vec<GroupEntry>,
    rings: Vec<RingEntry>,
}

#[derive(Serialize)]
struct GroupEntry {
    spec: String,
    order: usize,
    abelian: bool,
}

#[derive(Serialize)]
struct RingEntry {
    spec: String,
    size: usize,
    characteristic: u64,
}

#[derive(Serialize)]
struct InvolutionEntry {
    index: usize,
    perm: Vec<usize>,
    identity: bool,
    canonical: bool,
    fixed: Vec<usize>,
}

#[derive(Serialize)]
struct OrientationEntry {
    index: usize,
    values: Vec<String>,
    classic: bool,
    kernel: Vec<usize>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn group(spec: &str) -> Result<Group, String> {
    parse_group_spec(spec).map_err(|e| format!("group {spec}: {e}"))
}

fn ring(spec: &str) -> Result<Ring, String> {
    parse_ring_spec(spec).map_err(|e| format!("ring {spec}: {e}"))
}

fn involution(g: &Group, index: usize) -> Result<Involution, String> {
    g.enumerate_involutions()
        .into_iter()
        .nth(index)
        .ok_or_else(|| format!("{} has no involution #{index}", g.name()))
}

pub fn catalog_json() -> Result<String, String> {
    let groups = default_group_specs()
        .into_iter()
        .map(|spec| {
            let g = group(&spec)?;
            Ok(GroupEntry {
                order: g.order(),
                abelian: g.is_abelian(),
                spec,
            })
        })
        .collect::<Result<_, String>>()?;
    let rings = default_ring_specs()
        .into_iter()
        .map(|spec| {
            let r = ring(&spec)?;
            Ok(RingEntry {
                size: r.size(),
                characteristic: r.characteristic() as u64,
                spec,
            })
        })
        .collect::<Result<_, String>>()?;
    to_json(&Catalog { groups, rings })
}

pub fn involutions_json(group_spec: &str) -> Result<String, String> {
    let g = group(group_spec)?;
    let canonical = g.canonical_involution();
    let entries: Vec<InvolutionEntry> = g
        .enumerate_involutions()
        .into_iter()
        .enumerate()
        .map(|(index, tau)| InvolutionEntry {
            index,
            identity: tau.is_identity(),
            canonical: canonical.as_ref() == Some(&tau),
            fixed: tau.fixed_set().to_vec(),
            perm: tau.perm().to_vec(),
        })
        .collect();
    to_json(&entries)
}

pub fn orientations_json(
    group_spec: &str,
    involution_index: usize,
    ring_spec: &str,
) -> Result<String, String> {
    let g = group(group_spec)?;
    let tau = involution(&g, involution_index)?;
    let r = ring(ring_spec)?;
    let entries: Vec<OrientationEntry> = enumerate_orientations(&g, &tau, &r)
        .into_iter()
        .enumerate()
        .map(|(index, o)| OrientationEntry {
            index,
            values: o.values().iter().map(|&v| r.format(v)).collect(),
            classic: o.is_classic(&r),
            kernel: o.kernel(&r).to_vec(),
        })
        .collect();
    to_json(&entries)
}

pub fn classify_json(
    group_spec: &str,
    involution_index: usize,
    ring_spec: &str,
    orientation_index: usize,
) -> Result<String, String> {
    let g = group(group_spec)?;
    let tau = involution(&g, involution_index)?;
    let r = ring(ring_spec)?;
    let o = enumerate_orientations(&g, &tau, &r)
        .into_iter()
        .nth(orientation_index)
        .ok_or_else(|| format!("no orientation #{orientation_index}"))?;
    let ctx = InstanceContext::new(Arc::new(g), Arc::new(tau), Arc::new(r), o)
        .map_err(|e| e.to_string())?;
    let mut record = evaluate(&ctx, &EvalOptions::default());
    record.involution_index = Some(involution_index);
    record.orientation_index = Some(orientation_index);
    to_json(&record)
}

#[wasm_bindgen]
pub fn catalog() -> Result<String, JsValue> {
    catalog_json().map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn involutions(group_spec: &str) -> Result<String, JsValue> {
    involutions_json(group_spec).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn orientations(
    group_spec: &str,
    involution_index: usize,
    ring_spec: &str,
) -> Result<String, JsValue> {
    orientations_json(group_spec, involution_index, ring_spec).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn classify(
    group_spec: &str,
    involution_index: usize,
    ring_spec: &str,
    orientation_index: usize,
) -> Result<String, JsValue> {
    classify_json(group_spec, involution_index, ring_spec, orientation_index).map_err(JsValue::from)
}
