use tiltcheck_core::{CatalogBounds, Field, IndecCatalog, Quiver, Reducer, Workbench};

fn catalog(name: &str) -> IndecCatalog {
    IndecCatalog::build(&Quiver::preset(name).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
}

#[test]
fn chains_pass_on_serre_closed_classes() {
    for name in ["A4", "D4"] {
        let c = catalog(name);
        let wb = Workbench::new(&c, 8).unwrap();
        let red = Reducer::new(&wb.d, &wb.ctx, &wb.yd);
        for t in wb.classes(16).unwrap().into_iter().filter(|&t| wb.ctx.serre_closed(t)) {
            let steps = red.reduction_chain(t).unwrap_or_else(|e| panic!("{name} {t:?}: {e}"));
            assert!(steps.len() <= c.quiver().n_vertices());
            assert_eq!(steps.is_empty(), wb.ctx.ext_projectives(t).is_empty());
            // the induced pair at every level is effaceable once the chain bottoms out
            assert!(steps.iter().all(|s| s.ambient_effaceable && s.induced_effaceable && s.induced_serre_closed));
        }
    }
}

#[test]
fn chains_fail_without_serre_closure() {
    for (name, expected) in [("A2", 1), ("A3", 4), ("A3b", 3), ("A3c", 3)] {
        let c = catalog(name);
        let wb = Workbench::new(&c, 8).unwrap();
        let red = Reducer::new(&wb.d, &wb.ctx, &wb.yd);
        let bad: Vec<_> = wb.classes(16).unwrap().into_iter().filter(|&t| !wb.ctx.serre_closed(t)).collect();
        assert_eq!(bad.len(), expected, "{name}");
        for t in bad {
            assert!(red.reduction_chain(t).is_err(), "{name} {t:?} reduced although not Serre closed");
        }
    }
}
