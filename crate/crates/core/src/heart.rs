//! The tilted heart `B = F[1] * T` of a torsion pair, with epi/mono tests, kernels and
//! cokernels, simple tops of Ext-projectives and the epimorphism form of effaceability.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::derived::{ChainMap, Derived, PComplex, SplitObject};
use crate::error::{Error, Result};
use crate::fieldlin::Mat;
use crate::rep::all_vectors;
use crate::torsion::{Mask, TorsionContext};

pub struct Heart<'d, 'a> {
    d: &'d Derived<'a>,
    t: Mask,
    f: Mask,
}

/// Outcome of the epimorphism checker. `Inconclusive` is never a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriState {
    True,
    False,
    Inconclusive,
}

impl TriState {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            TriState::True => Some(true),
            TriState::False => Some(false),
            TriState::Inconclusive => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimpleTop {
    pub e: usize,
    pub top: SplitObject,
    pub epi: ChainMap,
    /// Heart indecomposables scanned before the top was found, with whether each admitted
    /// an epimorphism from `E`.
    pub scan: Vec<(SplitObject, bool)>,
    /// `Hom(E, X[1]) = 0` for every heart indecomposable `X`.
    pub projective_in_heart: bool,
    pub end_dim: usize,
    /// `Hom(S, S[n]) = 0` for `n ≠ 0` in the tested range.
    pub self_orthogonal: bool,
}

/// Above this many nonzero coefficient vectors a Hom space is sampled along its basis only.
const HOM_ENUM_LIMIT: usize = 256;

impl<'d, 'a> Heart<'d, 'a> {
    pub fn new(d: &'d Derived<'a>, ctx: &TorsionContext, t: Mask) -> Self {
        Heart { d, t, f: ctx.torsion_free(t) }
    }

    pub fn with_masks(d: &'d Derived<'a>, t: Mask, f: Mask) -> Self {
        Heart { d, t, f }
    }

    pub fn derived(&self) -> &'d Derived<'a> {
        self.d
    }
    pub fn t_mask(&self) -> Mask {
        self.t
    }
    pub fn f_mask(&self) -> Mask {
        self.f
    }

    pub fn in_heart(&self, o: &SplitObject) -> bool {
        o.summands.iter().all(|&(i, s)| (s == 0 && self.t.contains(i)) || (s == 1 && self.f.contains(i)))
    }

    pub fn in_aisle(&self, o: &SplitObject) -> bool {
        o.summands.iter().all(|&(i, s)| s > 0 || (s == 0 && self.t.contains(i)))
    }

    /// `T`-indecomposables in degree 0 and `F`-indecomposables shifted by one, in catalog order.
    pub fn indecs(&self) -> Vec<SplitObject> {
        let n = self.d.catalog().len();
        (0..n)
            .filter_map(|i| {
                if self.t.contains(i) {
                    Some(SplitObject::single(i, 0))
                } else if self.f.contains(i) {
                    Some(SplitObject::single(i, 1))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Cone lies in `B[1]`.
    pub fn is_epi(&self, f: &ChainMap) -> Result<bool> {
        let c = self.d.split(&self.d.cone(f).complex)?;
        Ok(c.summands.iter().all(|&(i, s)| (s == 1 && self.t.contains(i)) || (s == 2 && self.f.contains(i))))
    }

    /// Cone lies in `B`.
    pub fn is_mono(&self, f: &ChainMap) -> Result<bool> {
        let c = self.d.split(&self.d.cone(f).complex)?;
        Ok(self.in_heart(&c))
    }

    /// Kernel in `B` of a map between heart objects.
    pub fn kernel(&self, f: &ChainMap) -> Result<ChainMap> {
        let cone = self.d.cone(f);
        let low = self.d.truncate_lower(&cone.complex, self.t, 1)?;
        let to_x1 = self.d.compose(&cone.proj, &low);
        Ok(self.d.shift_map(&to_x1, -1))
    }

    /// Cokernel in `B`, as the map from the target.
    pub fn cokernel(&self, f: &ChainMap) -> Result<ChainMap> {
        let cone = self.d.cone(f);
        let low = self.d.truncate_lower(&cone.complex, self.t, 1)?;
        let rest = self.d.cone(&low);
        Ok(self.d.compose(&rest.incl, &cone.incl))
    }

    /// Every nonzero element of `Hom(x, y)`, or only the basis when that would be too many.
    fn nonzero_maps(&self, x: &Arc<PComplex>, y: &Arc<PComplex>) -> Vec<ChainMap> {
        let hs = self.d.hom_space(x, y);
        let dim = hs.dim();
        if dim == 0 {
            return Vec::new();
        }
        let p = self.d.field().p() as usize;
        let total = p.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if total - 1 > HOM_ENUM_LIMIT {
            return self.d.basis(&hs);
        }
        all_vectors(self.d.field(), dim)
            .into_iter()
            .filter(|v| v.iter().any(|&c| c != 0))
            .map(|v| self.d.from_coords(&hs, &v))
            .collect()
    }

    /// An epimorphism `x → y` in `B`, if one exists among the enumerated maps.
    fn find_epi(&self, x: &Arc<PComplex>, y: &Arc<PComplex>) -> Result<Option<ChainMap>> {
        for f in self.nonzero_maps(x, y) {
            if self.is_epi(&f)? {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }

    /// Every nonzero map from a heart indecomposable to `s` is an epimorphism.
    pub fn is_simple(&self, s: &SplitObject) -> Result<bool> {
        if s.is_zero() {
            return Ok(false);
        }
        let sc = self.d.object(s);
        for x in self.indecs() {
            let xc = self.d.object(&x);
            for f in self.nonzero_maps(&xc, &sc) {
                if !self.is_epi(&f)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn simple_top(&self, e: usize) -> Result<SimpleTop> {
        if !self.t.contains(e) {
            return Err(Error::Config(format!("{} is not in the torsion class", self.d.catalog().label(e))));
        }
        let ec = self.d.indec(e, 0);
        let heart = self.indecs();
        let projective_in_heart = heart.iter().all(|x| self.d.hom_dim(&ec, &self.d.object(x), 1) == 0);
        let mut scan = Vec::new();
        for s in &heart {
            let sc = self.d.object(s);
            let Some(epi) = self.find_epi(&ec, &sc)? else {
                scan.push((s.clone(), false));
                continue;
            };
            scan.push((s.clone(), true));
            if !self.is_simple(s)? {
                continue;
            }
            let end_dim = self.d.hom_dim(&sc, &sc, 0);
            let self_orthogonal = (-3..=3).filter(|&n| n != 0).all(|n| self.d.hom_dim(&sc, &sc, n) == 0);
            return Ok(SimpleTop { e, top: s.clone(), epi, scan, projective_in_heart, end_dim, self_orthogonal });
        }
        Err(Error::Violation(format!("no simple top found for {}", self.d.catalog().label(e))))
    }

    /// For every `φ: F[1] → T[2]` with `F`, `T` indecomposable, decides whether some epimorphism
    /// `C → F[1]` in `B` has `φ∘(C → F[1]) = 0`. All such maps factor through the sum of the
    /// annihilated maps out of heart indecomposables, so testing that single combined map is
    /// exact. Returns `Inconclusive` when the combined source exceeds `bound` summands.
    pub fn epi_condition(&self, bound: usize) -> Result<TriState> {
        let heart: Vec<Arc<PComplex>> = self.indecs().iter().map(|x| self.d.object(x)).collect();
        let mut inconclusive = false;
        for fi in self.f.iter() {
            let f1 = self.d.indec(fi, 1);
            for ti in self.t.iter() {
                if self.d.catalog().ext(fi, ti) == 0 {
                    continue;
                }
                let t2 = self.d.indec(ti, 2);
                let hs_phi = self.d.hom_space(&f1, &t2);
                let classes: Vec<Vec<u32>> = all_vectors(self.d.field(), hs_phi.dim()).into_iter().filter(|v| v.iter().any(|&c| c != 0)).collect();
                for c in classes {
                    let phi = self.d.from_coords(&hs_phi, &c);
                    match self.annihilated_epi_from(&heart, &f1, &phi, bound)? {
                        TriState::True => {}
                        TriState::False => return Ok(TriState::False),
                        TriState::Inconclusive => inconclusive = true,
                    }
                }
            }
        }
        Ok(if inconclusive { TriState::Inconclusive } else { TriState::True })
    }

    /// Whether some epimorphism `C → X` in `B` is annihilated by `phi: X → Y`. For `Y = Z[2]` with
    /// `Z` in the heart this is the same as `phi` factoring through an object of `B[1]`.
    pub fn annihilated_epi(&self, phi: &ChainMap, bound: usize) -> Result<TriState> {
        let heart: Vec<Arc<PComplex>> = self.indecs().iter().map(|x| self.d.object(x)).collect();
        self.annihilated_epi_from(&heart, &phi.source, phi, bound)
    }

    fn annihilated_epi_from(&self, heart: &[Arc<PComplex>], f1: &Arc<PComplex>, phi: &ChainMap, bound: usize) -> Result<TriState> {
        let mut maps = Vec::new();
        for x in heart {
            let hs = self.d.hom_space(x, f1);
            if hs.dim() == 0 {
                continue;
            }
            let basis = self.d.basis(&hs);
            let hs_xt = self.d.hom_space(x, &phi.target);
            let cols: Vec<Vec<u32>> = basis.iter().map(|g| self.d.coords(&hs_xt, &self.d.compose(phi, g))).collect::<Result<_>>()?;
            let a = Mat::from_columns(self.d.field(), hs_xt.dim(), &cols);
            for k in a.nullspace().columns() {
                maps.push(self.d.from_coords(&hs, &k));
            }
        }
        if maps.len() > bound {
            return Ok(TriState::Inconclusive);
        }
        if maps.is_empty() {
            return Ok(TriState::False);
        }
        let combined = self.d.row_map(&maps, f1);
        Ok(if self.is_epi(&combined)? { TriState::True } else { TriState::False })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CatalogBounds, IndecCatalog};
    use crate::fieldlin::Field;
    use crate::quiver::Quiver;

    const S2: usize = 0;
    const P1: usize = 1;
    const S1: usize = 2;

    fn a2() -> IndecCatalog {
        IndecCatalog::build(&Quiver::linear_a(2).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
    }

    #[test]
    fn membership() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let h = Heart::new(&d, &ctx, Mask::from_indices([S1, P1]));
        assert_eq!(h.f_mask(), Mask::from_indices([S2]));
        assert!(h.in_heart(&SplitObject::new(vec![(S2, 1), (P1, 0)])));
        assert!(!h.in_heart(&SplitObject::single(S2, 0)));
        assert!(h.in_heart(&SplitObject::default()) && h.in_aisle(&SplitObject::default()));
        assert!(h.in_aisle(&SplitObject::single(S2, 1)));
        assert_eq!(h.indecs(), vec![SplitObject::single(S2, 1), SplitObject::single(P1, 0), SplitObject::single(S1, 0)]);
    }

    #[test]
    fn epi_mono_examples() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let h = Heart::new(&d, &ctx, Mask::from_indices([S1, P1]));
        let (s1, s2_1, p1) = (d.indec(S1, 0), d.indec(S2, 1), d.indec(P1, 0));
        let a = d.basis(&d.hom_space(&s1, &s2_1))[0].clone();
        assert!(h.is_epi(&a).unwrap() && !h.is_mono(&a).unwrap());
        let b = d.basis(&d.hom_space(&p1, &s1))[0].clone();
        assert!(h.is_mono(&b).unwrap() && !h.is_epi(&b).unwrap());
        let id = d.identity(&p1);
        assert!(h.is_epi(&id).unwrap() && h.is_mono(&id).unwrap());
        // kernel of S1 → S2[1] is P1, cokernel of P1 → S1 is S2[1]
        assert_eq!(d.split(&h.kernel(&a).unwrap().source).unwrap(), SplitObject::single(P1, 0));
        assert_eq!(d.split(&h.cokernel(&b).unwrap().target).unwrap(), SplitObject::single(S2, 1));
        assert!(d.split(&h.kernel(&b).unwrap().source).unwrap().is_zero());
    }

    #[test]
    fn simple_tops() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let h = Heart::new(&d, &ctx, Mask::from_indices([S1, P1]));
        let st = h.simple_top(S1).unwrap();
        assert_eq!(st.top, SplitObject::single(S2, 1));
        assert!(st.projective_in_heart && st.end_dim == 1 && st.self_orthogonal);
        assert_eq!(h.simple_top(P1).unwrap().top, SplitObject::single(P1, 0));
        // B = A: tops of projectives are the classical simples
        let all = Heart::new(&d, &ctx, Mask::full(3));
        assert_eq!(all.simple_top(P1).unwrap().top, SplitObject::single(S1, 0));
        assert_eq!(all.simple_top(S2).unwrap().top, SplitObject::single(S2, 0));
    }

    #[test]
    fn epi_condition_a2() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        for t in ctx.enumerate(16).unwrap() {
            let h = Heart::new(&d, &ctx, t);
            let want = t != Mask::from_indices([S2]);
            assert_eq!(h.epi_condition(64).unwrap(), if want { TriState::True } else { TriState::False }, "{t:?}");
        }
    }

    #[test]
    fn heart_is_heart() {
        // Hom(X, Y[n]) = 0 for n < 0 between heart indecomposables
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        for t in ctx.enumerate(16).unwrap() {
            let h = Heart::new(&d, &ctx, t);
            for x in h.indecs() {
                for y in h.indecs() {
                    for n in -2..0 {
                        assert_eq!(d.hom_dim(&d.object(&x), &d.object(&y), n), 0);
                    }
                }
            }
        }
    }
}
