//! Derived Hom spaces against the module-level Hom/Ext tables, and the Euler form against
//! both. The tables come from intertwining-map kernels; the derived side from complexes of
//! projectives modulo homotopy.

use std::sync::Arc;

use tiltcheck_core::rep::euler_form;
use tiltcheck_core::{CatalogBounds, Derived, Field, IndecCatalog, Quiver, SplitObject};

fn catalog(name: &str, p: u32) -> IndecCatalog {
    IndecCatalog::build(&Quiver::preset(name).unwrap(), Field::new(p).unwrap(), CatalogBounds::default()).unwrap()
}

fn check_derived_hom(name: &str, p: u32) {
    let c = catalog(name, p);
    let d = Derived::new(&c).unwrap();
    for x in 0..c.len() {
        for y in 0..c.len() {
            for n in -2..=2 {
                let want = match n {
                    0 => c.hom(x, y),
                    1 => c.ext(x, y),
                    _ => 0,
                };
                assert_eq!(d.hom_dim(&d.indec(x, 0), &d.indec(y, 0), n), want, "{name}: Hom({}, {}[{n}])", c.label(x), c.label(y));
            }
        }
    }
}

#[test]
fn derived_hom_matches_tables_a3() {
    check_derived_hom("A3", 2);
    check_derived_hom("A3c", 3);
}

#[test]
fn derived_hom_matches_tables_d4() {
    check_derived_hom("D4", 2);
}

#[test]
fn euler_and_serre_pairing() {
    for name in ["A3b", "A4", "D4"] {
        let c = catalog(name, 2);
        let d = Derived::new(&c).unwrap();
        for x in 0..c.len() {
            let sx = Arc::new(d.serre(&d.indec(x, 0)).unwrap());
            for y in 0..c.len() {
                let e = c.hom(x, y) as i64 - c.ext(x, y) as i64;
                assert_eq!(e, euler_form(c.quiver(), c.indec(x).dims(), c.indec(y).dims()));
                for n in -2..=2 {
                    let yn = d.indec(y, n);
                    assert_eq!(d.hom_dim(&d.indec(x, 0), &yn, 0), d.hom_dim(&yn, &sx, 0), "{name}: ({x},{y},{n})");
                }
            }
        }
    }
}

#[test]
fn serre_sends_projectives_to_injectives() {
    for name in ["A3", "D4"] {
        let c = catalog(name, 2);
        let d = Derived::new(&c).unwrap();
        for v in 0..c.quiver().n_vertices() {
            let got = d.serre_split(&SplitObject::single(c.proj_index()[v], 0)).unwrap();
            assert_eq!(got, SplitObject::single(c.inj_index()[v], 0));
        }
    }
}
