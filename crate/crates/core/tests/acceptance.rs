//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{canonical, context, identity, inversion, random_elem, ring_elems, small_instances};
use skewcomm::classifier::{
    classify, classify_classic, classify_exp_two_kernel, classify_exp_two_kernel_with,
    AbelianImage, CaseLabel, SYMMETRIC_PAIRS,
};
use skewcomm::grouprings::{
    binomial_anticommutator_by_product, expand_binomial_anticommutator, gr_mul, is_skew,
    is_skew_by_conditions, oracle_anticommutative, sigma_star,
};
use skewcomm::groups::{parse_group_spec, Group};
use skewcomm::harness::{
    enumerate_instances, render_report, run_campaign, CampaignConfig, Report, ReportFormat,
};
use skewcomm::orientations::enumerate_orientations;
use skewcomm::rings::{parse_ring_spec, Residues, Ring, RingElem};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: ok_detail,
        }
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        Outcome {
            pass: false,
            detail: format!("{} failure(s): {}", failures.len(), shown.join("; ")),
        }
    }
}

fn tally(items: impl Iterator<Item = String>) -> String {
    let mut m: BTreeMap<String, usize> = BTreeMap::new();
    for k in items {
        *m.entry(k).or_default() += 1;
    }
    m.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main_equivalence(report: &Report) -> Outcome {
    let s = &report.summary;
    let mut failures = Vec::new();
    let mut disagreeing = Vec::new();
    for r in &report.records {
        match (&r.oracle, &r.general) {
            (Some(o), Some(g)) if o.anticommutative == g.anticommutative => {}
            (Some(o), Some(g)) => {
                disagreeing.push(format!("{}/{}", r.group, r.ring));
                if failures.len() < 5 {
                    failures.push(format!(
                        "{} inv#{} {} orient#{}: oracle={} criterion={} ({})",
                        r.group,
                        r.involution_index.unwrap_or(0),
                        r.ring,
                        r.orientation_index.unwrap_or(0),
                        o.anticommutative,
                        g.anticommutative,
                        g.case.as_str()
                    ));
                }
            }
            _ => failures.push(format!(
                "{}: state {:?} {:?}",
                r.instance_id, r.state, r.error
            )),
        }
    }
    if s.instances < 1000 || s.vacuous > 0 {
        failures.push(format!("instances={} vacuous={}", s.instances, s.vacuous));
    }
    let mut out = outcome(
        &failures,
        format!(
            "{} instances, {} anticommutative, cases {}",
            s.instances,
            s.anticommutative,
            tally(
                s.cases
                    .iter()
                    .flat_map(|(k, &v)| std::iter::repeat_n(k.clone(), v))
            )
        ),
    );
    if !out.pass {
        out.detail = format!(
            "{} of {} instances disagree [{}]; {}",
            disagreeing.len(),
            s.instances,
            tally(disagreeing.into_iter()),
            out.detail
        );
    }
    out
}

fn fixtures(report: &Report) -> Outcome {
    let mut failures = Vec::new();
    let mut expect = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };

    let ctx = context("C2", identity, "Z8", &[(1, &[3])]);
    let v = classify(&ctx).unwrap();
    expect(
        "C2/Id/Z8/3",
        oracle_anticommutative(&ctx).unwrap().anticommutative
            && v.anticommutative
            && v.case_label == CaseLabel::AbelianIdentity,
    );

    let ctx = context("C4", inversion, "Z4", &[(1, &[3])]);
    let v = classify(&ctx).unwrap();
    let c = classify_classic(&ctx).unwrap();
    let p = classify_exp_two_kernel(&ctx).unwrap();
    expect(
        "C4/inversion/Z4/3",
        oracle_anticommutative(&ctx).unwrap().anticommutative
            && v.anticommutative
            && c.case_label == CaseLabel::ClassicAbelian
            && p.case_label == CaseLabel::ExpTwoAbelian,
    );

    // Q8: i = 1, j = 4; kernel {±1, ±i}.
    let ctx = context("Q8", canonical, "Z4", &[(1, &[1]), (4, &[3])]);
    let kernel = ctx.kernel().to_vec();
    let c = classify_classic(&ctx).unwrap();
    expect(
        "Q8/canonical/Z4 classic",
        kernel == vec![0, 1, 2, 3]
            && oracle_anticommutative(&ctx).unwrap().anticommutative
            && classify(&ctx).unwrap().anticommutative
            && c.case_label == CaseLabel::ClassicSlc,
    );

    let ctx = context("Q8", canonical, "Z4xZ4", &[(1, &[3, 1]), (4, &[1, 3])]);
    let v = classify(&ctx).unwrap();
    expect(
        "Q8/canonical/Z4xZ4 non-classic",
        !ctx.is_classic()
            && oracle_anticommutative(&ctx).unwrap().anticommutative
            && v.anticommutative
            && v.case_label == CaseLabel::CommutatorShift,
    );

    let ctx = context("C2", identity, "Z4", &[(1, &[3])]);
    let v = classify(&ctx).unwrap();
    let w = v
        .diagnostic(SYMMETRIC_PAIRS)
        .and_then(|d| d.witness.clone());
    expect(
        "C2/Id/Z4/3 negative with witness",
        !oracle_anticommutative(&ctx).unwrap().anticommutative
            && !v.anticommutative
            && w.is_some_and(|w| {
                w.elements == vec![1, 1]
                    && w.coefficients == vec![Residues(vec![1]), Residues(vec![1])]
            }),
    );

    let odd = ["Z3", "Z5", "Z9", "Z12"];
    let mut checked = 0;
    for r in report
        .records
        .iter()
        .filter(|r| odd.contains(&r.ring.as_str()))
    {
        checked += 1;
        let o = r.oracle.as_ref().is_some_and(|o| o.anticommutative);
        let g = r.general.as_ref().is_some_and(|g| g.anticommutative);
        if o || g || r.oracle.is_none() || r.general.is_none() {
            failures.push(format!("{} over {} not negative", r.group, r.ring));
        }
    }
    if checked == 0 {
        failures.push("no instances over Z3/Z5/Z9/Z12".into());
    }
    outcome(
        &failures,
        format!("5 fixtures exact; {checked} instances over Z3/Z5/Z9/Z12 all negative"),
    )
}

fn condition_soundness(report: &Report) -> Outcome {
    let mut failures = Vec::new();
    let mut violated = Vec::new();
    let mut positives = 0;
    for r in &report.records {
        if !r.oracle.as_ref().is_some_and(|o| o.anticommutative) {
            continue;
        }
        positives += 1;
        match &r.conditions {
            Some(c) if c.violations.is_empty() => {}
            Some(c) => {
                for id in &c.violations {
                    violated.push(
                        serde_json::to_value(id)
                            .unwrap()
                            .as_str()
                            .unwrap()
                            .to_string(),
                    );
                }
                failures.push(format!("{} over {}: {:?}", r.group, r.ring, c.violations));
            }
            None => failures.push(format!("{} over {}: not evaluated", r.group, r.ring)),
        }
    }
    let mut out = outcome(
        &failures,
        format!("{positives} anticommutative instances, every necessary condition holds"),
    );
    if !out.pass {
        out.detail = format!(
            "violations on {} of {positives} anticommutative instances [{}]; {}",
            failures.len(),
            tally(violated.into_iter()),
            out.detail
        );
    }
    out
}

fn specializations(report: &Report) -> (Outcome, String) {
    let mut failures = Vec::new();
    let (mut classic, mut exp_two) = (0, 0);
    let mut exp_two_bad = Vec::new();
    for r in &report.records {
        let Some(g) = &r.general else { continue };
        if r.classic {
            classic += 1;
            match &r.classic_criterion {
                Some(c) if c.anticommutative == g.anticommutative => {}
                other => failures.push(format!(
                    "classic {} over {}: {:?} vs {}",
                    r.group,
                    r.ring,
                    other.as_ref().map(|c| c.anticommutative),
                    g.anticommutative
                )),
            }
        }
        if let Some(p) = &r.exp_two_criterion {
            exp_two += 1;
            if p.anticommutative != g.anticommutative {
                exp_two_bad.push(r.position.unwrap());
                failures.push(format!(
                    "exp-two {} inv#{} over {} orient#{}: {} vs {}",
                    r.group,
                    r.involution_index.unwrap_or(0),
                    r.ring,
                    r.orientation_index.unwrap_or(0),
                    p.anticommutative,
                    g.anticommutative
                ));
            }
        }
    }

    // Same instances under the order-two reading of the abelian case.
    let instances = enumerate_instances(&CampaignConfig::default()).unwrap();
    let mut alt_checked = 0;
    let mut alt_bad = 0;
    for r in report
        .records
        .iter()
        .filter(|r| r.exp_two_criterion.is_some())
    {
        let ctx = &instances[r.position.unwrap()].ctx;
        let alt = classify_exp_two_kernel_with(ctx, AbelianImage::OrderTwo).unwrap();
        alt_checked += 1;
        if Some(alt.anticommutative) != r.general.as_ref().map(|g| g.anticommutative) {
            alt_bad += 1;
        }
    }
    let note = format!(
        "note: exp-two criterion with the order-two image reading disagrees on {alt_bad} of {alt_checked} instances"
    );
    let mut out = outcome(
        &failures,
        format!("classic agrees on {classic} instances, exp-two on {exp_two}"),
    );
    if !out.pass {
        let mut by_pair: Vec<String> = Vec::new();
        for r in &report.records {
            if r.position.is_some_and(|p| exp_two_bad.contains(&p)) {
                by_pair.push(format!("{}/{}", r.group, r.ring));
            }
        }
        out.detail = format!(
            "classic checked {classic}, exp-two checked {exp_two}, exp-two disagreements [{}]; {}",
            tally(by_pair.into_iter()),
            out.detail
        );
    }
    (out, note)
}

fn engine_invariants() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let instances = small_instances(8, 16);
    let mut random_checks = 0;
    for inst in &instances {
        let ctx = &inst.ctx;
        for _ in 0..2 {
            let a = random_elem(&mut rng, ctx);
            let b = random_elem(&mut rng, ctx);
            let sa = sigma_star(ctx, &a).unwrap();
            let sb = sigma_star(ctx, &b).unwrap();
            let ab = gr_mul(ctx, &a, &b).unwrap();
            if sigma_star(ctx, &sa).unwrap() != a {
                failures.push(format!("{}: σ* not an involution", inst.instance_id));
            }
            if sigma_star(ctx, &ab).unwrap() != gr_mul(ctx, &sb, &sa).unwrap() {
                failures.push(format!("{}: σ* not anti-multiplicative", inst.instance_id));
            }
            let skew = skewcomm::grouprings::gr_sub(ctx, &a, &sa).unwrap();
            for e in [&a, &skew] {
                if is_skew(ctx, e).unwrap() != is_skew_by_conditions(ctx, e).unwrap() {
                    failures.push(format!(
                        "{}: skew characterizations differ",
                        inst.instance_id
                    ));
                }
            }
            if !is_skew(ctx, &skew).unwrap() {
                failures.push(format!("{}: a − σ*(a) not skew", inst.instance_id));
            }
            random_checks += 1;
        }
        if let Err(orbit) = common::span_matches_module(ctx) {
            failures.push(format!(
                "{}: span differs on orbit {orbit:?}",
                inst.instance_id
            ));
        }
    }

    let mut pool: Vec<_> = instances
        .iter()
        .filter(|i| !i.ctx.fixed().is_full())
        .collect();
    pool.shuffle(&mut rng);
    let sampled: Vec<_> = pool.into_iter().take(20).collect();
    let mut expansions = 0;
    for inst in &sampled {
        let ctx = &inst.ctx;
        let moving: Vec<usize> = ctx
            .group()
            .elements()
            .filter(|&x| !ctx.is_fixed(x))
            .collect();
        for &x in &moving {
            for &y in &moving {
                expansions += 1;
                if expand_binomial_anticommutator(ctx, x, y).unwrap()
                    != binomial_anticommutator_by_product(ctx, x, y).unwrap()
                {
                    failures.push(format!(
                        "{}: expansion differs at ({x}, {y})",
                        inst.instance_id
                    ));
                }
            }
        }
    }
    if sampled.len() < 20 {
        failures.push(format!(
            "only {} contexts with nonsymmetric elements",
            sampled.len()
        ));
    }
    outcome(
        &failures,
        format!(
            "{} contexts: {random_checks} random σ*/skew checks, span = module on all, {expansions} expansion pairs over {} contexts",
            instances.len(),
            sampled.len()
        ),
    )
}

fn permutations(n: usize, f: &mut impl FnMut(&[usize])) {
    fn go(perm: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, f: &mut impl FnMut(&[usize])) {
        if perm.len() == n {
            f(perm);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                perm.push(v);
                go(perm, used, n, f);
                perm.pop();
                used[v] = false;
            }
        }
    }
    go(&mut Vec::new(), &mut vec![false; n], n, f);
}

fn involutions_by_scan(g: &Group) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut out = Vec::new();
    permutations(n, &mut |p| {
        let involutive = (0..n).all(|x| p[p[x]] == x);
        let anti = (0..n).all(|x| (0..n).all(|y| p[g.mul(x, y)] == g.mul(p[y], p[x])));
        if involutive && anti {
            out.push(p.to_vec());
        }
    });
    out
}

/// Every function `G → U(R)` that is a homomorphism, by depth-first
/// assignment with the law checked on each fully assigned triple.
fn homomorphisms_by_scan(g: &Group, r: &Ring) -> Vec<Vec<RingElem>> {
    let units: Vec<RingElem> = r.units().elements().to_vec();
    let n = g.order();
    let mut out = Vec::new();
    fn go(
        g: &Group,
        r: &Ring,
        units: &[RingElem],
        vals: &mut Vec<RingElem>,
        out: &mut Vec<Vec<RingElem>>,
    ) {
        let k = vals.len();
        if k == g.order() {
            out.push(vals.clone());
            return;
        }
        for &u in units {
            vals.push(u);
            let ok = (0..=k).all(|i| {
                (0..=k).all(|j| {
                    let ij = g.mul(i, j);
                    ij > k || vals[ij] == r.mul(vals[i], vals[j])
                })
            });
            if ok {
                go(g, r, units, vals, out);
            }
            vals.pop();
        }
    }
    go(g, r, &units, &mut Vec::with_capacity(n), &mut out);
    out
}

fn enumeration_oracles() -> Outcome {
    let mut failures = Vec::new();
    let catalog = CampaignConfig::default().group_families;
    let groups: Vec<Group> = catalog
        .iter()
        .map(|s| parse_group_spec(s).unwrap())
        .collect();

    let mut involution_groups = 0;
    for g in groups.iter().filter(|g| g.order() <= 6) {
        involution_groups += 1;
        let fast: Vec<Vec<usize>> = g
            .enumerate_involutions()
            .iter()
            .map(|t| t.perm().to_vec())
            .collect();
        let mut slow = involutions_by_scan(g);
        slow.sort();
        if fast != slow {
            failures.push(format!(
                "involutions of {}: {} vs {}",
                g.name(),
                fast.len(),
                slow.len()
            ));
        }
    }

    let rings: Vec<Ring> = CampaignConfig::default()
        .ring_specs
        .iter()
        .map(|s| parse_ring_spec(s).unwrap())
        .filter(|r| r.size() <= 16)
        .collect();
    let mut orientation_cells = 0;
    for g in groups.iter().filter(|g| g.order() <= 8) {
        for tau in g.enumerate_involutions() {
            for r in &rings {
                orientation_cells += 1;
                let mut slow: Vec<Vec<RingElem>> = homomorphisms_by_scan(g, r)
                    .into_iter()
                    .filter(|v| v.iter().any(|&u| u != r.one()))
                    .filter(|v| g.elements().all(|x| v[g.mul(x, tau.apply(x))] == r.one()))
                    .collect();
                slow.sort();
                let fast: Vec<Vec<RingElem>> = enumerate_orientations(g, &tau, r)
                    .iter()
                    .map(|o| o.values().to_vec())
                    .collect();
                if fast != slow {
                    failures.push(format!(
                        "orientations of {} over {}: {} vs {}",
                        g.name(),
                        r.spec(),
                        fast.len(),
                        slow.len()
                    ));
                }
            }
        }
    }

    let ann_specs = [
        "Z3", "Z4", "Z5", "Z7", "Z8", "Z9", "Z12", "Z15", "Z16", "Z24", "Z25", "Z27", "Z32", "Z64",
        "Z4xZ3", "Z4xZ4", "Z8xZ3", "Z2xZ4", "Z4xZ8", "Z8xZ8", "Z3xZ9", "Z4xZ4xZ4", "Z2xZ3",
        "Z2xZ2xZ3", "Z4xZ16", "Z3xZ3xZ3",
    ];
    let mut ann_rings = 0;
    for spec in ann_specs {
        let r = match parse_ring_spec(spec) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{spec}: {e}"));
                continue;
            }
        };
        assert!(r.size() <= 64);
        ann_rings += 1;
        let elems = ring_elems(&r);
        for &x in &elems {
            let slow: Vec<RingElem> = elems
                .iter()
                .copied()
                .filter(|&a| r.is_zero(r.mul(a, x)))
                .collect();
            if r.annihilator(x) != slow {
                failures.push(format!("annihilator of {} in {spec}", r.format(x)));
            }
        }
    }
    outcome(
        &failures,
        format!(
            "involutions on {involution_groups} groups, orientations on {orientation_cells} (group, involution, ring) cells, annihilators on {ann_rings} rings"
        ),
    )
}

fn determinism(baseline: &Report) -> Outcome {
    let mut failures = Vec::new();
    let base_json = render_report(baseline, ReportFormat::Json).unwrap();
    let base_csv = render_report(baseline, ReportFormat::Csv).unwrap();
    for workers in [1, 8] {
        let cfg = CampaignConfig {
            parallel_workers: workers,
            ..Default::default()
        };
        let report = run_campaign(&cfg).unwrap();
        if render_report(&report, ReportFormat::Json).unwrap() != base_json {
            failures.push(format!("JSON differs with {workers} worker(s)"));
        }
        if render_report(&report, ReportFormat::Csv).unwrap() != base_csv {
            failures.push(format!("CSV differs with {workers} worker(s)"));
        }
    }
    let reparsed: Report = serde_json::from_slice(&base_json).unwrap();
    if &reparsed != baseline {
        failures.push("JSON round-trip differs".into());
    }
    outcome(
        &failures,
        format!(
            "3 runs (default, 1, 8 workers) byte-identical: JSON {} bytes, CSV {} bytes",
            base_json.len(),
            base_csv.len()
        ),
    )
}

fn main() -> ExitCode {
    let report = run_campaign(&CampaignConfig::default()).expect("default campaign runs");
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut notes = Vec::new();

    results.push((
        1,
        "oracle matches general criterion on default campaign",
        main_equivalence(&report),
    ));
    results.push((2, "known positive and negative fixtures", fixtures(&report)));
    results.push((
        3,
        "necessary conditions hold on anticommutative instances",
        condition_soundness(&report),
    ));
    let (spec_outcome, note) = specializations(&report);
    results.push((
        4,
        "classic and exp-two criteria match general criterion",
        spec_outcome,
    ));
    notes.push(note);
    results.push((5, "algebraic engine invariants", engine_invariants()));
    results.push((6, "enumeration oracles", enumeration_oracles()));
    results.push((
        7,
        "determinism across runs and worker counts",
        determinism(&report),
    ));

    let mut all = true;
    for (n, name, o) in &results {
        all &= o.pass;
        println!(
            "criterion {n} {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    for note in notes {
        println!("{note}");
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
