//! Acceptance gate. Prints one PASS/FAIL line per criterion; every comparison is exact
//! (tolerance 0, all arithmetic is over a finite field).

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;

use tiltcheck_core::rep::euler_form;
use tiltcheck_core::{CatalogBounds, Derived, Field, Heart, IndecCatalog, Quiver, Reducer, VerdictTable, Workbench};

const SWEEP: &[&str] = &["A1", "A2", "A3", "A3b", "A3c", "A4", "D4"];

struct Gate {
    lines: Vec<(bool, String)>,
}

impl Gate {
    fn record(&mut self, n: usize, ok: bool, detail: String) {
        let line = format!("[{}] criterion {n}: {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn catalog(name: &str) -> IndecCatalog {
    IndecCatalog::build(&Quiver::preset(name).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
}

fn classify_cli(name: &str, jobs: &str) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_tiltcheck"))
        .args(["classify", "--quiver", name, "--jobs", jobs])
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn main() {
    let mut g = Gate { lines: Vec::new() };
    let mut tables: BTreeMap<&str, VerdictTable> = BTreeMap::new();
    let mut raw8: BTreeMap<&str, Vec<u8>> = BTreeMap::new();

    // 1: three-way agreement, exit 0
    let mut bad = Vec::new();
    for &q in SWEEP {
        let (out, code) = classify_cli(q, "8");
        let t: VerdictTable = serde_json::from_slice(&out).expect("classify emits a verdict table");
        let exact = t.torsion_classes.iter().all(|r| r.serre_closed == r.effaceable_yoneda && r.effaceable_yoneda == r.effaceable_fiveterm);
        if code != 0 || !exact || !t.agreement {
            bad.push(format!("{q} (exit {code})"));
        }
        tables.insert(q, t);
        raw8.insert(q, out);
    }
    g.record(1, bad.is_empty(), format!("serre_closed == yoneda == fiveterm on {} quivers, exact; failures: {bad:?}", SWEEP.len()));

    // 2: class counts
    let counts: Vec<(&str, usize)> = SWEEP.iter().map(|&q| (q, tables[q].torsion_classes.len())).collect();
    let expected = [("A1", 2), ("A2", 5), ("A3", 14), ("A3b", 14), ("A3c", 14), ("A4", 42)];
    let ok = expected.iter().all(|&(q, n)| tables[q].torsion_classes.len() == n);
    g.record(2, ok, format!("torsion-class counts {counts:?} (D4 recorded, not pinned)"));

    // 3: the two effaceability checkers agree
    let (mut same, mut total) = (0, 0);
    for t in tables.values() {
        for r in &t.torsion_classes {
            total += 1;
            same += (r.effaceable_yoneda == r.effaceable_fiveterm) as usize;
        }
    }
    g.record(3, same == total, format!("yoneda and fiveterm agree on {same}/{total} classes"));

    // 4: Euler form and Serre duality over every catalog pair
    let mut checked = 0;
    let mut violations = Vec::new();
    for &q in SWEEP {
        let c = catalog(q);
        let d = Derived::new(&c).unwrap();
        let serre: Vec<_> = (0..c.len()).map(|i| Arc::new(d.serre(&d.indec(i, 0)).unwrap())).collect();
        for x in 0..c.len() {
            for y in 0..c.len() {
                let lhs = c.hom(x, y) as i64 - c.ext(x, y) as i64;
                if lhs != euler_form(c.quiver(), c.indec(x).dims(), c.indec(y).dims()) {
                    violations.push(format!("{q}: euler ({x},{y})"));
                }
                for n in -2..=2 {
                    let yn = d.indec(y, n);
                    if d.hom_dim(&d.indec(x, 0), &yn, 0) != d.hom_dim(&yn, &serre[x], 0) {
                        violations.push(format!("{q}: serre ({x},{y},{n})"));
                    }
                    checked += 1;
                }
            }
        }
    }
    g.record(4, violations.is_empty(), format!("{checked} Serre pairings and all Euler pairs checked; violations: {violations:?}"));

    // 5: simple tops of Ext-projectives
    let (mut tops, mut failures) = (0, Vec::new());
    for &q in SWEEP {
        let c = catalog(q);
        let wb = Workbench::new(&c, 8).unwrap();
        for r in tables[q].torsion_classes.iter().filter(|r| r.serre_closed) {
            let h = Heart::new(&wb.d, &wb.ctx, r.mask);
            for e in r.ext_projectives.iter() {
                tops += 1;
                match h.simple_top(e) {
                    Ok(s) if s.projective_in_heart && s.end_dim == 1 && s.self_orthogonal => {}
                    Ok(s) => failures.push(format!("{q} class {} E={}: top {}", r.id, c.label(e), s.top.render(&c))),
                    Err(err) => failures.push(format!("{q} class {} E={}: {err}", r.id, c.label(e))),
                }
            }
        }
    }
    g.record(5, failures.is_empty(), format!("{tops} Ext-projectives have a simple top with End = k and no self-extensions; violations: {failures:?}"));

    // 6: reduction lemmas on A2 and the A3 orientations
    let (mut chains, mut steps, mut failures) = (0, 0, Vec::new());
    for q in ["A2", "A3", "A3b", "A3c"] {
        let c = catalog(q);
        let wb = Workbench::new(&c, 8).unwrap();
        let red = Reducer::new(&wb.d, &wb.ctx, &wb.yd);
        for r in tables[q].torsion_classes.iter().filter(|r| r.serre_closed && !r.ext_projectives.is_empty()) {
            chains += 1;
            match red.reduction_chain(r.mask) {
                Ok(s) if s.iter().all(|st| st.checks.all_pass()) && !s.is_empty() => steps += s.len(),
                Ok(_) => failures.push(format!("{q} class {}: empty or failing chain", r.id)),
                Err(err) => failures.push(format!("{q} class {}: {err}", r.id)),
            }
        }
    }
    g.record(6, failures.is_empty(), format!("{chains} chains, {steps} steps, all lemma checks and transfer hold; violations: {failures:?}"));

    // 7: negative control on A2
    let a2 = &tables["A2"];
    let lbl = |i: usize| a2.catalog[i].label.clone();
    let failing: Vec<_> = a2.torsion_classes.iter().filter(|r| !r.serre_closed || !r.effaceable_yoneda || !r.effaceable_fiveterm).collect();
    let ok = failing.len() == 1 && {
        let r = failing[0];
        let gaps: Vec<_> = r.yoneda_gaps.iter().map(|g| (lbl(g.f), lbl(g.t), g.uncovered)).collect();
        r.t == ["S2"] && !r.serre_closed && !r.effaceable_yoneda && !r.effaceable_fiveterm && gaps == [("S1".to_string(), "S2".to_string(), 1)]
    };
    g.record(7, ok, "A2 class {S2} fails all three checkers with the single gap Ext1(S1,S2), 1 dimension uncovered".into());

    // 8: determinism across thread counts
    let differ: Vec<&str> = SWEEP.iter().copied().filter(|&q| classify_cli(q, "1").0 != raw8[q]).collect();
    g.record(8, differ.is_empty(), format!("--jobs 1 and --jobs 8 reports byte-identical; differing: {differ:?}"));

    let failed = g.lines.iter().filter(|(ok, _)| !ok).count();
    println!("acceptance: {} of {} criteria pass", g.lines.len() - failed, g.lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
