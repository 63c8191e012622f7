//! Torsion classes as bitsets over the catalog.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::IndecCatalog;
use crate::error::{Error, Result};
use crate::fieldlin::Mat;
use crate::rep::{hom_ext, middle_term, quotient_rep, trace, RepMorphism};

/// A set of catalog indices. Catalogs are capped at 128 entries.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", from = "Vec<usize>")]
pub struct Mask(pub u128);

impl From<Mask> for Vec<usize> {
    fn from(m: Mask) -> Self {
        m.to_vec()
    }
}

impl From<Vec<usize>> for Mask {
    fn from(v: Vec<usize>) -> Self {
        Mask::from_indices(v)
    }
}

impl Mask {
    pub const EMPTY: Mask = Mask(0);

    pub fn full(n: usize) -> Mask {
        assert!(n <= 128);
        if n == 128 {
            Mask(u128::MAX)
        } else {
            Mask((1u128 << n) - 1)
        }
    }
    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Mask {
        Mask(idx.into_iter().fold(0u128, |m, i| m | (1u128 << i)))
    }
    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }
    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }
    #[inline]
    pub fn is_subset(self, other: Mask) -> bool {
        self.0 & !other.0 == 0
    }
    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn and(self, other: Mask) -> Mask {
        Mask(self.0 & other.0)
    }
    pub fn or(self, other: Mask) -> Mask {
        Mask(self.0 | other.0)
    }
    pub fn minus(self, other: Mask) -> Mask {
        Mask(self.0 & !other.0)
    }
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..128).filter(move |&i| self.contains(i))
    }
    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Flattened morphism `⊕_i X_i → ⊕_i Y_i` (block diagonal).
pub(crate) fn flatten_morphism(h: &RepMorphism) -> Mat {
    h.blocks.iter().skip(1).fold(h.blocks[0].clone(), |acc, b| acc.block_diag(b))
}

/// Per-catalog data shared by every torsion-class check.
pub struct TorsionContext<'a> {
    cat: &'a IndecCatalog,
    // trace_mats[a][x]: images of every map M_a -> M_x, flattened into M_x's coordinates
    trace_mats: Vec<Vec<Mat>>,
    // cogen_mats[a][x]: every map M_x -> M_a stacked, flattened
    cogen_mats: Vec<Vec<Mat>>,
    ext_summands: Vec<Vec<Mask>>,
}

impl<'a> TorsionContext<'a> {
    pub fn new(cat: &'a IndecCatalog) -> Result<Self> {
        let q = cat.quiver();
        let k = cat.len();
        if k > 128 {
            return Err(Error::SearchSpace(format!("catalog of {k} indecomposables exceeds the 128-entry mask")));
        }
        let f = cat.field();
        let rows: Vec<Result<(Vec<Mat>, Vec<Mat>, Vec<Mask>)>> = (0..k)
            .into_par_iter()
            .map(|a| {
                let ma = cat.indec(a);
                let mut traces = Vec::with_capacity(k);
                let mut cogens = Vec::with_capacity(k);
                let mut exts = Vec::with_capacity(k);
                for x in 0..k {
                    let mx = cat.indec(x);
                    let into = hom_ext(q, ma, mx)?;
                    let mut t = Mat::zeros(f, mx.total_dim(), 0);
                    for h in &into.hom_basis {
                        t = t.hstack(&flatten_morphism(h));
                    }
                    traces.push(t.column_basis());
                    let out = hom_ext(q, mx, ma)?;
                    let mut c = Mat::zeros(f, 0, mx.total_dim());
                    for h in &out.hom_basis {
                        c = c.vstack(&flatten_morphism(h));
                    }
                    cogens.push(c);
                    // extensions 0 -> M_x -> E -> M_a -> 0
                    let mut m = Mask::EMPTY;
                    let ext = hom_ext(q, ma, mx)?;
                    for eps in ext.all_classes(q).iter().skip(1) {
                        let (e, _, _) = middle_term(q, ma, mx, eps);
                        m = m.or(Mask::from_indices(cat.summands(&e)?));
                    }
                    exts.push(m);
                }
                Ok((traces, cogens, exts))
            })
            .collect();
        let mut trace_mats = Vec::with_capacity(k);
        let mut cogen_mats = Vec::with_capacity(k);
        let mut ext_by_source = Vec::with_capacity(k);
        for r in rows {
            let (t, c, e) = r?;
            trace_mats.push(t);
            cogen_mats.push(c);
            ext_by_source.push(e);
        }
        // ext_summands[x][y]: summands of middle terms of extensions with ends x (quotient) and y (sub)
        let ext_summands = ext_by_source;
        Ok(TorsionContext { cat, trace_mats, cogen_mats, ext_summands })
    }

    pub fn catalog(&self) -> &IndecCatalog {
        self.cat
    }

    /// Is `M_x` a quotient of a sum of copies of the marked indecomposables?
    pub fn in_gen(&self, gens: Mask, x: usize) -> bool {
        let d = self.cat.indec(x).total_dim();
        if d == 0 {
            return true;
        }
        let mut acc: Option<Mat> = None;
        for a in gens.iter() {
            let t = &self.trace_mats[a][x];
            if t.cols() == 0 {
                continue;
            }
            acc = Some(match acc {
                None => t.clone(),
                Some(m) => m.hstack(t),
            });
        }
        acc.is_some_and(|m| m.rank() == d)
    }

    /// Does `M_x` embed into a sum of copies of the marked indecomposables?
    pub fn in_cogen(&self, cogens: Mask, x: usize) -> bool {
        let d = self.cat.indec(x).total_dim();
        if d == 0 {
            return true;
        }
        let mut acc = Mat::zeros(self.cat.field(), 0, d);
        for a in cogens.iter() {
            acc = acc.vstack(&self.cogen_mats[a][x]);
        }
        acc.rank() == d
    }

    pub fn gen_closure(&self, gens: Mask, universe: Mask) -> Mask {
        Mask::from_indices(universe.iter().filter(|&x| self.in_gen(gens, x)))
    }

    pub fn cogen_closure(&self, cogens: Mask, universe: Mask) -> Mask {
        Mask::from_indices(universe.iter().filter(|&x| self.in_cogen(cogens, x)))
    }

    /// Summands of middle terms of nonsplit extensions `0 → M_sub → E → M_quot → 0`.
    pub fn extension_summands(&self, quot: usize, sub: usize) -> Mask {
        self.ext_summands[quot][sub]
    }

    pub fn is_torsion_class(&self, mask: Mask) -> bool {
        self.is_torsion_class_in(mask, Mask::full(self.cat.len()))
    }

    /// Torsion-class axioms with both quantifiers restricted to `universe`.
    pub fn is_torsion_class_in(&self, mask: Mask, universe: Mask) -> bool {
        if !mask.is_subset(universe) {
            return false;
        }
        for x in mask.iter() {
            for y in mask.iter() {
                if !self.ext_summands[x][y].is_subset(mask) {
                    return false;
                }
            }
        }
        universe.minus(mask).iter().all(|x| !self.in_gen(mask, x))
    }

    /// Every torsion class, in increasing bitset order.
    pub fn enumerate(&self, max_indecs: usize) -> Result<Vec<Mask>> {
        let k = self.cat.len();
        if k > max_indecs || k >= 64 {
            return Err(Error::SearchSpace(format!(
                "torsion-class enumeration over {k} indecomposables exceeds the bound {}",
                max_indecs.min(63)
            )));
        }
        let total: u64 = 1u64 << k;
        Ok((0..total).into_par_iter().map(|m| Mask(m as u128)).filter(|&m| self.is_torsion_class(m)).collect())
    }

    /// `{Y in universe : Hom(T, Y) = 0 for all marked T}`.
    pub fn torsion_free_in(&self, mask: Mask, universe: Mask) -> Mask {
        Mask::from_indices(universe.iter().filter(|&y| mask.iter().all(|t| self.cat.hom(t, y) == 0)))
    }

    pub fn torsion_free(&self, mask: Mask) -> Mask {
        self.torsion_free_in(mask, Mask::full(self.cat.len()))
    }

    /// Checks the canonical sequence `0 → tX → X → X/tX → 0` for every catalog `X`: the torsion
    /// part decomposes into marked summands and the quotient into torsion-free ones.
    pub fn verify_torsion_pair(&self, mask: Mask) -> Result<()> {
        let q = self.cat.quiver();
        let fmask = self.torsion_free(mask);
        let gens: Vec<_> = mask.iter().map(|i| self.cat.indec(i).clone()).collect();
        for x in 0..self.cat.len() {
            let mx = self.cat.indec(x);
            let t = trace(q, &gens, mx)?;
            let (tx, _) = crate::rep::sub_rep(q, mx, &t)?;
            let (fx, _) = quotient_rep(q, mx, &t)?;
            let ts = Mask::from_indices(self.cat.summands(&tx)?);
            let fs = Mask::from_indices(self.cat.summands(&fx)?);
            if !ts.is_subset(mask) || !fs.is_subset(fmask) {
                return Err(Error::Violation(format!(
                    "torsion sequence of {} has torsion part {:?} and quotient {:?} outside the pair {:?}/{:?}",
                    self.cat.label(x),
                    ts,
                    fs,
                    mask,
                    fmask
                )));
            }
        }
        Ok(())
    }

    pub fn ext_projectives(&self, mask: Mask) -> Mask {
        Mask::from_indices(mask.iter().filter(|&e| mask.iter().all(|t| self.cat.ext(e, t) == 0)))
    }

    pub fn is_finitely_generated(&self, mask: Mask) -> bool {
        let e = self.ext_projectives(mask);
        mask.iter().all(|x| self.in_gen(e, x))
    }

    /// For every vertex with `P_i` marked, `I_i` is marked.
    pub fn serre_closed(&self, mask: Mask) -> bool {
        let c = self.cat;
        c.proj_index().iter().zip(c.inj_index()).all(|(&p, &i)| !mask.contains(p) || mask.contains(i))
    }

    /// Smallest torsion class containing `mask`.
    pub fn torsion_closure(&self, mask: Mask) -> Mask {
        let full = Mask::full(self.cat.len());
        let mut cur = mask;
        loop {
            let mut next = self.gen_closure(cur, full);
            for x in next.iter() {
                for y in next.iter() {
                    next = next.or(self.ext_summands[x][y]);
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

/// A torsion pair with its derived flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionPairData {
    pub t_mask: Mask,
    pub f_mask: Mask,
    pub ext_projectives: Mask,
    pub serre_closed: Option<bool>,
    pub finitely_generated: Option<bool>,
    pub effaceable_yoneda: Option<bool>,
    pub effaceable_fiveterm: Option<bool>,
}

impl TorsionPairData {
    pub fn new(ctx: &TorsionContext, t_mask: Mask) -> Self {
        TorsionPairData {
            t_mask,
            f_mask: ctx.torsion_free(t_mask),
            ext_projectives: ctx.ext_projectives(t_mask),
            serre_closed: Some(ctx.serre_closed(t_mask)),
            finitely_generated: Some(ctx.is_finitely_generated(t_mask)),
            effaceable_yoneda: None,
            effaceable_fiveterm: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogBounds;
    use crate::fieldlin::Field;
    use crate::quiver::Quiver;

    fn cat(name: &str) -> IndecCatalog {
        IndecCatalog::build(&Quiver::preset(name).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
    }

    // A2 catalog order: 0 = S2, 1 = P1, 2 = S1
    const S2: usize = 0;
    const P1: usize = 1;
    const S1: usize = 2;

    #[test]
    fn a2_membership_examples() {
        let c = cat("A2");
        let ctx = TorsionContext::new(&c).unwrap();
        assert!(ctx.is_torsion_class(Mask::from_indices([S2])));
        assert!(!ctx.is_torsion_class(Mask::from_indices([P1])));
        assert!(ctx.is_torsion_class(Mask::EMPTY));
        let all = ctx.enumerate(16).unwrap();
        let expected: Vec<Mask> = vec![
            Mask::EMPTY,
            Mask::from_indices([S2]),
            Mask::from_indices([S1]),
            Mask::from_indices([P1, S1]),
            Mask::full(3),
        ];
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn a2_complements_and_projectives() {
        let c = cat("A2");
        let ctx = TorsionContext::new(&c).unwrap();
        assert_eq!(ctx.torsion_free(Mask::from_indices([S1])), Mask::from_indices([S2, P1]));
        assert_eq!(ctx.torsion_free(Mask::full(3)), Mask::EMPTY);
        assert_eq!(ctx.torsion_free(Mask::EMPTY), Mask::full(3));
        let t = Mask::from_indices([S1, P1]);
        assert_eq!(ctx.ext_projectives(t), t);
        assert_eq!(ctx.ext_projectives(Mask::from_indices([S2])), Mask::from_indices([S2]));
        assert_eq!(ctx.ext_projectives(Mask::EMPTY), Mask::EMPTY);
        assert!(ctx.is_finitely_generated(t));
        assert!(ctx.is_finitely_generated(Mask::EMPTY));
    }

    #[test]
    fn a2_serre_closure() {
        let c = cat("A2");
        let ctx = TorsionContext::new(&c).unwrap();
        assert!(!ctx.serre_closed(Mask::from_indices([S2])));
        assert!(ctx.serre_closed(Mask::from_indices([S1])));
        assert!(ctx.serre_closed(Mask::full(3)));
    }

    #[test]
    fn counts() {
        for (name, n) in [("A1", 2), ("A2", 5), ("A3", 14), ("A3b", 14), ("A3c", 14), ("A4", 42)] {
            let c = cat(name);
            let ctx = TorsionContext::new(&c).unwrap();
            assert_eq!(ctx.enumerate(16).unwrap().len(), n, "{name}");
        }
    }

    #[test]
    fn pairs_satisfy_axioms_and_closure_is_lattice() {
        let c = cat("A3");
        let ctx = TorsionContext::new(&c).unwrap();
        let classes = ctx.enumerate(16).unwrap();
        for &t in &classes {
            ctx.verify_torsion_pair(t).unwrap();
            assert!(ctx.is_finitely_generated(t));
            assert_eq!(ctx.torsion_closure(t), t);
        }
        for &a in &classes {
            for &b in &classes {
                // intersections of torsion classes are torsion classes; joins are closures
                assert!(classes.contains(&a.and(b)));
                assert!(classes.contains(&ctx.torsion_closure(a.or(b))));
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        let c = cat("A3");
        let ctx = TorsionContext::new(&c).unwrap();
        assert!(matches!(ctx.enumerate(5), Err(Error::SearchSpace(_))));
    }

    #[test]
    fn classes_without_ext_projectives_contain_no_projective() {
        let c = cat("A4");
        let ctx = TorsionContext::new(&c).unwrap();
        for t in ctx.enumerate(16).unwrap() {
            if ctx.ext_projectives(t).is_empty() {
                let f = ctx.torsion_free(t);
                assert!(c.proj_index().iter().all(|&p| f.contains(p)));
            }
        }
    }
}
