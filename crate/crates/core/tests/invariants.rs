use std::sync::OnceLock;

use proptest::prelude::*;
use tiltcheck_core::{CatalogBounds, Derived, Field, IndecCatalog, Mask, Quiver, SplitObject, TorsionContext};

const NAMES: &[&str] = &["A2", "A3", "A3b", "A3c", "A4", "D4"];

fn catalogs() -> &'static Vec<IndecCatalog> {
    static C: OnceLock<Vec<IndecCatalog>> = OnceLock::new();
    C.get_or_init(|| {
        NAMES.iter().map(|n| IndecCatalog::build(&Quiver::preset(n).unwrap(), Field::F2, CatalogBounds::default()).unwrap()).collect()
    })
}

fn pick(q: usize, a: usize) -> (&'static IndecCatalog, usize) {
    let c = &catalogs()[q % NAMES.len()];
    (c, a % c.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_of_a_map_is_a_triangle(q in 0usize..6, a in 0usize..64, b in 0usize..64, sa in -1i32..2, sb in -1i32..2, seed in any::<u64>()) {
        let (c, x) = pick(q, a);
        let y = b % c.len();
        let d = Derived::new(c).unwrap();
        let (xc, yc) = (d.indec(x, sa), d.indec(y, sb));
        let hs = d.hom_space(&xc, &yc);
        let coords: Vec<u32> = (0..hs.dim()).map(|i| ((seed >> (i % 64)) & 1) as u32).collect();
        let f = d.from_coords(&hs, &coords);
        prop_assert!(d.is_chain_map(&f));
        let cone = d.cone(&f);
        prop_assert!(d.is_null_homotopic(&d.compose(&cone.incl, &f)).unwrap());
        prop_assert!(d.is_null_homotopic(&d.compose(&cone.proj, &cone.incl)).unwrap());
        // a zero map has cone X[1] ⊕ Y
        if coords.iter().all(|&v| v == 0) {
            let want = SplitObject::new(vec![(x, sa + 1), (y, sb)]);
            prop_assert_eq!(d.split(&cone.complex).unwrap(), want);
        }
    }

    #[test]
    fn serre_commutes_with_shift(q in 0usize..6, a in 0usize..64, n in -2i32..3) {
        let (c, x) = pick(q, a);
        let d = Derived::new(c).unwrap();
        let s0 = d.serre_split(&SplitObject::single(x, 0)).unwrap();
        prop_assert_eq!(d.serre_split(&SplitObject::single(x, n)).unwrap(), s0.shifted(n));
    }

    #[test]
    fn split_of_direct_sum(q in 0usize..6, a in 0usize..64, b in 0usize..64, sa in -2i32..3, sb in -2i32..3) {
        let (c, x) = pick(q, a);
        let y = b % c.len();
        let d = Derived::new(c).unwrap();
        let o = SplitObject::new(vec![(x, sa), (y, sb)]);
        let sum = d.direct_sum(&[d.indec(x, sa), d.indec(y, sb)]);
        prop_assert_eq!(d.split(&sum).unwrap(), o);
    }

    #[test]
    fn torsion_closure_gives_torsion_pair(q in 0usize..6, bits in any::<u64>()) {
        let c = &catalogs()[q];
        let ctx = TorsionContext::new(c).unwrap();
        let seed = Mask(bits as u128).and(Mask::full(c.len()));
        let t = ctx.torsion_closure(seed);
        prop_assert!(seed.is_subset(t));
        prop_assert!(ctx.is_torsion_class(t));
        let f = ctx.torsion_free(t);
        prop_assert!(t.and(f).is_empty());
        prop_assert!(t.iter().all(|x| f.iter().all(|y| c.hom(x, y) == 0)));
        // T is recovered as the left perpendicular of F
        let back = Mask::from_indices((0..c.len()).filter(|&x| f.iter().all(|y| c.hom(x, y) == 0)));
        prop_assert_eq!(back, t);
        prop_assert!(ctx.ext_projectives(t).is_subset(t));
    }

    #[test]
    fn mask_serde_round_trip(bits in any::<u128>()) {
        let m = Mask(bits);
        let j = serde_json::to_string(&m).unwrap();
        prop_assert_eq!(serde_json::from_str::<Mask>(&j).unwrap(), m);
    }
}
