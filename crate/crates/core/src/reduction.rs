//! Reduction of a torsion pair along the simple top of an Ext-projective: perpendicular
//! categories, mutation functors, the induced torsion pair, and checks of the lemmas that
//! make effaceability transfer back from the smaller category.

use std::sync::Arc;

use serde::Serialize;

use crate::catalog::positive_roots;
use crate::derived::{ChainMap, Derived, PComplex, SplitObject};
use crate::effaceable::{effaceable_yoneda, YonedaData};
use crate::error::{Error, Result};
use crate::heart::{Heart, TriState};
use crate::quiver::Quiver;
use crate::rep::{all_vectors, hom_ext, RepMorphism};
use crate::torsion::{Mask, TorsionContext};

/// Maximum number of maps kept in a combined annihilator before a factorisation test gives up.
const FACTOR_BOUND: usize = 256;

/// `W = {X in universe : Hom(X,R) = 0 = Ext¹(X,R)}` for the module `R` underlying `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerpSubcat {
    pub anchor: usize,
    pub anchor_shift: i32,
    pub w_mask: Mask,
}

/// Names the first failing check, if any.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StepChecks {
    pub simple_top: bool,
    pub perp_is_derived_perp: bool,
    pub induced_pair: bool,
    pub tred: bool,
    pub glue: bool,
    pub perp_serre: bool,
    pub mutation_inverse: bool,
    pub recollement: bool,
    pub constructions: bool,
    pub w_count: bool,
    pub failures: Vec<String>,
}

impl StepChecks {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) -> bool {
        if !ok {
            self.failures.push(what());
        }
        ok
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionStep {
    pub level: usize,
    pub universe: Mask,
    pub t_mask: Mask,
    pub f_mask: Mask,
    pub e: usize,
    pub top: SplitObject,
    pub perp: PerpSubcat,
    pub t_prime: Mask,
    pub f_prime: Mask,
    pub ambient_effaceable: bool,
    pub induced_effaceable: bool,
    pub induced_serre_closed: bool,
    pub checks: StepChecks,
}

/// Postconditions of the kernel/cokernel constructions for one heart object.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ConstructionReport {
    pub b: SplitObject,
    pub k_b: SplitObject,
    pub c_b: SplitObject,
    /// `Hom(S, K_B) = 0`
    pub s_to_kb_zero: bool,
    pub maps: Vec<MapConstruction>,
}

/// The objects built from one class `A → B[2]`.
#[derive(Clone, Debug, Serialize)]
pub struct MapConstruction {
    pub a: SplitObject,
    pub m: SplitObject,
    pub k_m: SplitObject,
    pub c_m: SplitObject,
    pub n: SplitObject,
    pub m_in_heart: bool,
    pub n_in_heart: bool,
    /// `Hom(C_M, S) = 0`
    pub cm_to_s_zero: bool,
    /// `Hom(S, N) = 0`
    pub s_to_n_zero: bool,
    /// `C_M → N[2]` factors through the heart shifted by one
    pub cm_factors: TriState,
    /// `M → K_B[2]` factors through the heart shifted by one
    pub m_factors: TriState,
    /// `A → B[2]` factors through the heart shifted by one
    pub a_factors: TriState,
    /// the mutated map factors in the reduced heart
    pub mutated_factors: TriState,
}

impl MapConstruction {
    /// The lemma postconditions plus both factorisation implications.
    pub fn holds(&self) -> bool {
        let implies = |p: TriState, q: TriState| p != TriState::True || q == TriState::True;
        self.m_in_heart
            && self.n_in_heart
            && self.cm_to_s_zero
            && self.s_to_n_zero
            && implies(self.cm_factors, self.m_factors)
            && implies(self.m_factors, self.a_factors)
            && implies(self.mutated_factors, self.a_factors)
    }
}

/// One stage of the chain: the perpendicular category reached so far and its torsion pair.
#[derive(Clone)]
struct Level {
    universe: Mask,
    t: Mask,
    f: Mask,
    // exceptional objects already split off, in order
    anchors: Vec<Arc<PComplex>>,
}

pub struct Reducer<'d, 'a> {
    d: &'d Derived<'a>,
    ctx: &'d TorsionContext<'a>,
    yd: &'d YonedaData,
}

impl<'d, 'a> Reducer<'d, 'a> {
    pub fn new(d: &'d Derived<'a>, ctx: &'d TorsionContext<'a>, yd: &'d YonedaData) -> Self {
        Reducer { d, ctx, yd }
    }

    pub fn derived(&self) -> &'d Derived<'a> {
        self.d
    }

    /// Degrees `i` for which `Hom(x, y[i])` can be nonzero.
    fn hom_range(x: &PComplex, y: &PComplex) -> Option<std::ops::RangeInclusive<i32>> {
        let (xl, xh) = x.support()?;
        let (yl, yh) = y.support()?;
        Some(yl - xh..=yh - xl)
    }

    /// `Hom(x, y[n]) = 0` for every `n`.
    pub fn hom_vanishes(&self, x: &Arc<PComplex>, y: &Arc<PComplex>) -> bool {
        match Self::hom_range(x, y) {
            None => true,
            Some(r) => r.into_iter().all(|n| self.d.hom_dim(x, y, n) == 0),
        }
    }

    /// `α_X: X → ⊕_i Hom(X, S[i])^* ⊗ S[i]`
    pub fn alpha(&self, x: &Arc<PComplex>, s: &Arc<PComplex>) -> ChainMap {
        let mut maps = Vec::new();
        if let Some(r) = Self::hom_range(x, s) {
            for i in r {
                let si = Arc::new(self.d.shift(s, i));
                let hs = self.d.hom_space(x, &si);
                maps.extend(self.d.basis(&hs));
            }
        }
        self.d.column_map(x, &maps)
    }

    /// `β_X: ⊕_i Hom(S, X[i]) ⊗ S[-i] → X`
    pub fn beta(&self, x: &Arc<PComplex>, s: &Arc<PComplex>) -> ChainMap {
        let mut maps = Vec::new();
        if let Some(r) = Self::hom_range(s, x) {
            for i in r {
                let xi = Arc::new(self.d.shift(x, i));
                let hs = self.d.hom_space(s, &xi);
                for b in self.d.basis(&hs) {
                    maps.push(self.d.shift_map(&b, -i));
                }
            }
        }
        self.d.row_map(&maps, x)
    }

    /// `(i_!, i_*)` images of `x` as multiplicities of shifts of `S`.
    pub fn adjoint_images(&self, x: &Arc<PComplex>, s: &SplitObject) -> Result<(SplitObject, SplitObject)> {
        let sc = self.d.object(s);
        let shriek = self.d.split(&self.beta(x, &sc).source)?;
        let star = self.d.split(&self.alpha(x, &sc).target)?;
        Ok((shriek, star))
    }

    /// `T*_S(X) = cone(α_X)[-1]` together with the counit `T*_S(X) → X`.
    pub fn right_mutation_map(&self, x: &Arc<PComplex>, s: &Arc<PComplex>) -> ChainMap {
        let cone = self.d.cone(&self.alpha(x, s));
        self.d.shift_map(&cone.proj, -1)
    }

    pub fn right_mutation(&self, x: &Arc<PComplex>, s: &Arc<PComplex>) -> Arc<PComplex> {
        self.right_mutation_map(x, s).source
    }

    /// `T_S(X) = cone(β_X)`
    pub fn left_mutation(&self, x: &Arc<PComplex>, s: &Arc<PComplex>) -> Arc<PComplex> {
        self.d.cone(&self.beta(x, s)).complex
    }

    pub fn right_mutation_split(&self, x: &SplitObject, s: &SplitObject) -> Result<SplitObject> {
        self.d.split(&self.right_mutation(&self.d.object(x), &self.d.object(s)))
    }

    pub fn left_mutation_split(&self, x: &SplitObject, s: &SplitObject) -> Result<SplitObject> {
        self.d.split(&self.left_mutation(&self.d.object(x), &self.d.object(s)))
    }

    /// `T*_S(f)` for `f: A → B'`: the unique map with `ε_{B'} ∘ T*_S(f) = f ∘ ε_A`.
    pub fn mutate_map(&self, f: &ChainMap, s: &Arc<PComplex>) -> Result<ChainMap> {
        let ea = self.right_mutation_map(&f.source, s);
        let eb = self.right_mutation_map(&f.target, s);
        self.d
            .solve_post(&eb, &self.d.compose(f, &ea))?
            .ok_or_else(|| Error::Violation("mutated map does not exist".into()))
    }

    /// The perpendicular category of an exceptional `S` inside `universe`, cross-checked against
    /// the derived description `{X : Hom(X, S[n]) = 0 for all n}`.
    pub fn perp_of(&self, s: &SplitObject, universe: Mask) -> Result<(PerpSubcat, bool)> {
        let &[(r, shift)] = s.summands.as_slice() else {
            return Err(Error::Violation(format!("{} is not concentrated in one shift", s.render(self.d.catalog()))));
        };
        let cat = self.d.catalog();
        let w_mask = Mask::from_indices(universe.iter().filter(|&x| cat.hom(x, r) == 0 && cat.ext(x, r) == 0));
        let sc = self.d.object(s);
        let derived_ok = universe.iter().all(|x| self.hom_vanishes(&self.d.indec(x, 0), &sc) == w_mask.contains(x));
        Ok((PerpSubcat { anchor: r, anchor_shift: shift, w_mask }, derived_ok))
    }

    /// `T' = T ∩ W` with the torsion-class axioms checked relative to `W`, and `F'` computed in `W`.
    pub fn induced_pair(&self, t: Mask, w: Mask) -> Result<(Mask, Mask)> {
        let tp = t.and(w);
        if !self.ctx.is_torsion_class_in(tp, w) {
            return Err(Error::Violation(format!("{tp:?} is not a torsion class of the perpendicular category {w:?}")));
        }
        Ok((tp, self.ctx.torsion_free_in(tp, w)))
    }

    /// Serre functor of the current perpendicular category: `T*_{S_k} ∘ ... ∘ T*_{S_0} ∘ S`.
    fn serre_at(&self, x: &Arc<PComplex>, anchors: &[Arc<PComplex>]) -> Result<Arc<PComplex>> {
        let mut y = Arc::new(self.d.serre(x)?);
        for s in anchors {
            y = self.right_mutation(&y, s);
        }
        Ok(y)
    }

    fn serre_closed_at(&self, lvl: &Level) -> Result<bool> {
        let h = Heart::with_masks(self.d, lvl.t, lvl.f);
        for x in lvl.t.iter() {
            let sx = self.serre_at(&self.d.indec(x, 0), &lvl.anchors)?;
            if !h.in_aisle(&self.d.split(&sx)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Simples of `W`: members all of whose nonzero maps from members are onto.
    pub fn w_simples(&self, w: Mask) -> Result<Vec<usize>> {
        let cat = self.d.catalog();
        let q = cat.quiver();
        let mut out = Vec::new();
        'x: for x in w.iter() {
            let xd = cat.indec(x).total_dim();
            for y in w.iter() {
                if cat.hom(y, x) == 0 {
                    continue;
                }
                let basis = hom_ext(q, cat.indec(y), cat.indec(x))?.hom_basis;
                for c in all_vectors(self.d.field(), basis.len()) {
                    if c.iter().all(|&v| v == 0) {
                        continue;
                    }
                    let g = basis.iter().zip(&c).filter(|(_, &v)| v != 0).fold(RepMorphism::zero(cat.indec(y), cat.indec(x)), |acc, (b, &v)| acc.add(&b.scale(v)));
                    if g.rank() != xd {
                        continue 'x;
                    }
                }
            }
            out.push(x);
        }
        Ok(out)
    }

    /// `|W|` equals the number of positive roots of the Ext-quiver of its simples, which has
    /// one vertex fewer than the current category.
    fn check_w_count(&self, w: Mask, parent_rank: usize) -> Result<bool> {
        if w.is_empty() {
            return Ok(parent_rank <= 1);
        }
        let simples = self.w_simples(w)?;
        if simples.len() + 1 != parent_rank {
            return Ok(false);
        }
        let cat = self.d.catalog();
        let mut arrows = Vec::new();
        for (a, &i) in simples.iter().enumerate() {
            for (b, &j) in simples.iter().enumerate() {
                for _ in 0..cat.ext(i, j) {
                    arrows.push((a, b));
                }
            }
        }
        let q = Quiver::new(simples.len(), arrows)?;
        Ok(positive_roots(&q)?.len() == w.len())
    }

    /// Kernel and cokernel constructions for a heart object `b`, and for every basis class
    /// `A → B[2]` from a heart indecomposable `A`.
    pub fn heart_constructions(
        &self,
        heart: &Heart,
        e: usize,
        s: &SplitObject,
        b: &SplitObject,
        reduced: Option<&Heart>,
        anchors: &[Arc<PComplex>],
    ) -> Result<ConstructionReport> {
        let d = self.d;
        let sc = d.object(s);
        let se = self.serre_at(&d.indec(e, 0), anchors)?;
        let ec = d.indec(e, 0);
        let bc = d.object(b);
        // evaluation B → Hom(B, SE)^* ⊗ SE
        let ev = d.column_map(&bc, &d.basis(&d.hom_space(&bc, &se)));
        let dcone = d.cone(&ev);
        let low = d.truncate_lower(&dcone.complex, heart.t_mask(), 1)?; // K_B[1] → D
        let up = d.cone(&low); // D → C_B
        let k_b = d.split(&low.source)?.shifted(-1);
        let c_b = d.split(&up.complex)?;
        let s_to_kb_zero = d.hom_dim(&sc, &low.source, -1) == 0;
        let mut report = ConstructionReport { b: b.clone(), k_b, c_b, s_to_kb_zero, maps: Vec::new() };

        let b2 = Arc::new(d.shift(&bc, 2));
        let d_to_b1 = d.shift_map(&dcone.proj, 1); // D[1] → B[2]
        let q1 = d.shift_map(&up.incl, 1); // D[1] → C_B[1]
        let kappa = d.shift_map(&low, 1); // K_B[2] → D[1]
        for a in heart.indecs() {
            let ac = d.object(&a);
            let hs = d.hom_space(&ac, &b2);
            for alpha in d.basis(&hs) {
                let fp = d
                    .solve_post(&d_to_b1, &alpha)?
                    .ok_or_else(|| Error::Violation("A → B[2] does not lift to D[1]".into()))?;
                let g = d.compose(&q1, &fp); // A → C_B[1]
                let gcone = d.cone(&g);
                let pi = d.shift_map(&gcone.proj, -1); // M → A
                let mc = pi.source.clone();
                let mu = d
                    .solve_post(&kappa, &d.compose(&fp, &pi))?
                    .ok_or_else(|| Error::Violation("M → D[1] does not lift to K_B[2]".into()))?;
                // Hom(E, M) ⊗ E → M, its cone D̃, and K_M, C_M
                let ev_m = d.row_map(&d.basis(&d.hom_space(&ec, &mc)), &mc);
                let dt = d.cone(&ev_m);
                let low_m = d.truncate_lower(&dt.complex, heart.t_mask(), 1)?; // K_M[1] → D̃
                let up_m = d.cone(&low_m); // D̃ → C_M
                let nu = d
                    .solve_pre(&dt.incl, &mu)?
                    .ok_or_else(|| Error::Violation("M → K_B[2] does not extend over D̃".into()))?;
                let rho = d.compose(&nu, &low_m); // K_M[1] → K_B[2]
                let ncone = d.cone(&rho); // N[2]
                let fpp = d
                    .solve_pre(&up_m.incl, &d.compose(&ncone.incl, &nu))?
                    .ok_or_else(|| Error::Violation("C_M → N[2] does not exist".into()))?;
                let m_split = d.split(&mc)?;
                let n_split = d.split(&ncone.complex)?.shifted(-2);
                let c_m = d.split(&up_m.complex)?;
                let cm_c = up_m.complex.clone();
                let nc = Arc::new(d.shift(&ncone.complex, -2));
                let mutated_factors = match reduced {
                    Some(rh) => {
                        let tf = self.mutate_map(&alpha, &sc)?;
                        rh.annihilated_epi(&tf, FACTOR_BOUND)?
                    }
                    None => TriState::Inconclusive,
                };
                report.maps.push(MapConstruction {
                    a: a.clone(),
                    m: m_split.clone(),
                    k_m: d.split(&low_m.source)?.shifted(-1),
                    c_m: c_m.clone(),
                    n: n_split.clone(),
                    m_in_heart: heart.in_heart(&m_split),
                    n_in_heart: heart.in_heart(&n_split),
                    cm_to_s_zero: d.hom_dim(&cm_c, &sc, 0) == 0,
                    s_to_n_zero: d.hom_dim(&sc, &nc, 0) == 0,
                    cm_factors: heart.annihilated_epi(&fpp, FACTOR_BOUND)?,
                    m_factors: heart.annihilated_epi(&mu, FACTOR_BOUND)?,
                    a_factors: heart.annihilated_epi(&alpha, FACTOR_BOUND)?,
                    mutated_factors,
                });
            }
        }
        Ok(report)
    }

    /// One reduction step at `lvl` along the Ext-projective `e`.
    fn step(&self, lvl: &Level, level: usize, e: usize) -> Result<(ReductionStep, Level)> {
        let d = self.d;
        let heart = Heart::with_masks(d, lvl.t, lvl.f);
        let mut checks = StepChecks::default();
        let st = heart.simple_top(e)?;
        checks.simple_top = checks.record(st.projective_in_heart && st.end_dim == 1 && st.self_orthogonal, || {
            format!("simple top of {} is not exceptional or E is not projective in the heart", d.catalog().label(e))
        });
        let s = st.top.clone();
        let sc = d.object(&s);
        let (perp, derived_ok) = self.perp_of(&s, lvl.universe)?;
        checks.perp_is_derived_perp = checks.record(derived_ok, || "perpendicular category differs from the derived one".into());
        let w = perp.w_mask;
        let (tp, fp) = self.induced_pair(lvl.t, w)?;
        checks.induced_pair = true;
        let reduced = Heart::with_masks(d, tp, fp);

        checks.tred = self.check_tred(&heart, &reduced, &sc, &mut checks)?;
        checks.glue = self.check_glue(lvl, &heart, &sc, &mut checks)?;
        let mut anchors = lvl.anchors.clone();
        anchors.push(sc.clone());
        checks.perp_serre = self.check_perp_serre(w, &anchors, &mut checks)?;
        checks.mutation_inverse = self.check_mutation_inverse(lvl.universe, &sc, &mut checks)?;
        checks.recollement = self.check_recollement(lvl.universe, &sc, &mut checks)?;
        let mut constructions_ok = true;
        for b in heart.indecs() {
            let rep = self.heart_constructions(&heart, e, &s, &b, Some(&reduced), &lvl.anchors)?;
            let ok = rep.s_to_kb_zero && rep.maps.iter().all(MapConstruction::holds);
            constructions_ok &= checks.record(ok, || format!("heart constructions fail for B = {}", b.render(d.catalog())));
        }
        checks.constructions = constructions_ok;
        let rank = self.w_simples(lvl.universe)?.len();
        checks.w_count = checks.record(self.check_w_count(w, rank)?, || format!("{w:?} does not have one simple fewer"));

        let next = Level { universe: w, t: tp, f: fp, anchors };
        let ambient_effaceable = effaceable_yoneda(self.yd, lvl.t, lvl.f);
        let induced_effaceable = effaceable_yoneda(self.yd, tp, fp);
        let induced_serre_closed = self.serre_closed_at(&next)?;
        let step = ReductionStep {
            level,
            universe: lvl.universe,
            t_mask: lvl.t,
            f_mask: lvl.f,
            e,
            top: s,
            perp,
            t_prime: tp,
            f_prime: fp,
            ambient_effaceable,
            induced_effaceable,
            induced_serre_closed,
            checks,
        };
        Ok((step, next))
    }

    fn check_tred(&self, heart: &Heart, reduced: &Heart, s: &Arc<PComplex>, checks: &mut StepChecks) -> Result<bool> {
        let d = self.d;
        let mut ok = true;
        let mut hit_t = Mask::EMPTY;
        let mut hit_b = Vec::new();
        for b in heart.indecs() {
            let y = d.split(&self.right_mutation(&d.object(&b), s))?;
            ok &= checks.record(reduced.in_heart(&y), || format!("T*_S({}) = {} is not in the reduced heart", b.render(d.catalog()), y.render(d.catalog())));
            if b.summands[0].1 == 0 {
                ok &= checks.record(y.summands.iter().all(|&(i, sh)| sh == 0 && reduced.t_mask().contains(i)), || {
                    format!("T*_S({}) = {} is not in T'", b.render(d.catalog()), y.render(d.catalog()))
                });
                for &(i, _) in &y.summands {
                    hit_t.insert(i);
                }
            }
            hit_b.extend(y.summands);
        }
        ok &= checks.record(hit_t == reduced.t_mask(), || format!("T' = {:?} but mutations of T reach {hit_t:?}", reduced.t_mask()));
        let missing: Vec<_> = reduced.indecs().into_iter().filter(|x| !hit_b.contains(&x.summands[0])).collect();
        ok &= checks.record(missing.is_empty(), || format!("reduced heart objects not reached: {missing:?}"));
        Ok(ok)
    }

    fn check_glue(&self, lvl: &Level, heart: &Heart, s: &Arc<PComplex>, checks: &mut StepChecks) -> Result<bool> {
        let d = self.d;
        let mut ok = true;
        for x in lvl.universe.iter() {
            for k in 0..=2 {
                let xo = SplitObject::single(x, k);
                if !heart.in_aisle(&xo) {
                    continue;
                }
                let xc = d.object(&xo);
                let y = self.right_mutation(&xc, s);
                let ys = d.split(&y)?;
                ok &= checks.record(heart.in_aisle(&ys) && self.hom_vanishes(&y, s), || {
                    format!("T*_S({}) = {} leaves the aisle or the perpendicular", xo.render(d.catalog()), ys.render(d.catalog()))
                });
                if self.hom_vanishes(&xc, s) {
                    ok &= checks.record(ys == xo, || format!("{} is in the glued aisle but not fixed", xo.render(d.catalog())));
                }
            }
        }
        Ok(ok)
    }

    fn check_perp_serre(&self, w: Mask, anchors: &[Arc<PComplex>], checks: &mut StepChecks) -> Result<bool> {
        let d = self.d;
        let mut ok = true;
        for a in w.iter() {
            let ac = d.indec(a, 0);
            let sa = self.serre_at(&ac, anchors)?;
            for b in w.iter() {
                for k in 0..=1 {
                    let bc = d.indec(b, k);
                    let lhs = d.hom_dim(&ac, &bc, 0);
                    let rhs = d.hom_dim(&bc, &sa, 0);
                    ok &= checks.record(lhs == rhs, || {
                        format!("Serre pairing in the perpendicular category fails for ({}, {}[{k}])", d.catalog().label(a), d.catalog().label(b))
                    });
                }
            }
        }
        Ok(ok)
    }

    fn check_mutation_inverse(&self, universe: Mask, s: &Arc<PComplex>, checks: &mut StepChecks) -> Result<bool> {
        let d = self.d;
        let mut ok = true;
        for x in universe.iter() {
            let xc = d.indec(x, 0);
            let left_perp = self.right_mutation(&xc, s);
            let back = self.right_mutation(&self.left_mutation(&left_perp, s), s);
            ok &= checks.record(d.split(&back)? == d.split(&left_perp)?, || format!("T*_S T_S is not the identity on T*_S({})", d.catalog().label(x)));
            let right_perp = self.left_mutation(&xc, s);
            let back = self.left_mutation(&self.right_mutation(&right_perp, s), s);
            ok &= checks.record(d.split(&back)? == d.split(&right_perp)?, || format!("T_S T*_S is not the identity on T_S({})", d.catalog().label(x)));
        }
        Ok(ok)
    }

    /// `i^! ∘ j_* = 0`: left mutations of objects in the left perpendicular are right orthogonal to `S`.
    fn check_recollement(&self, universe: Mask, s: &Arc<PComplex>, checks: &mut StepChecks) -> Result<bool> {
        let d = self.d;
        let mut ok = true;
        for x in universe.iter() {
            let y = self.left_mutation(&self.right_mutation(&d.indec(x, 0), s), s);
            ok &= checks.record(self.hom_vanishes(s, &y), || format!("i^! j_* does not vanish on {}", d.catalog().label(x)));
        }
        Ok(ok)
    }

    /// Iterated reduction of `t` along minimal Ext-projectives. Fails loudly if a lemma check
    /// fails or if effaceability of a reduced pair does not transfer back.
    pub fn reduction_chain(&self, t: Mask) -> Result<Vec<ReductionStep>> {
        let full = Mask::full(self.d.catalog().len());
        let mut lvl = Level { universe: full, t, f: self.ctx.torsion_free(t), anchors: Vec::new() };
        let mut steps = Vec::new();
        let max_steps = self.d.quiver().n_vertices();
        loop {
            let Some(e) = self.ctx.ext_projectives(lvl.t).iter().next() else { break };
            if steps.len() >= max_steps {
                return Err(Error::Violation(format!("reduction chain of {t:?} exceeds {max_steps} steps")));
            }
            let (step, next) = self.step(&lvl, steps.len(), e)?;
            if !step.checks.all_pass() {
                return Err(Error::Violation(format!("reduction of {t:?} at level {}: {}", step.level, step.checks.failures.join("; "))));
            }
            if step.induced_effaceable && !step.ambient_effaceable {
                return Err(Error::Violation(format!("effaceability does not transfer back at level {} of {t:?}", step.level)));
            }
            steps.push(step);
            lvl = next;
        }
        Ok(steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CatalogBounds, IndecCatalog};
    use crate::fieldlin::Field;

    const S2: usize = 0;
    const P1: usize = 1;
    const S1: usize = 2;

    fn a2() -> IndecCatalog {
        IndecCatalog::build(&Quiver::linear_a(2).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
    }

    #[test]
    fn perp_and_mutations_a2() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let r = Reducer::new(&d, &ctx, &yd);
        let s = SplitObject::single(S2, 1);
        let (perp, ok) = r.perp_of(&s, Mask::full(3)).unwrap();
        assert!(ok);
        assert_eq!(perp.w_mask, Mask::from_indices([P1]));
        assert_eq!(r.right_mutation_split(&SplitObject::single(S1, 0), &s).unwrap(), SplitObject::single(P1, 0));
        assert!(r.right_mutation_split(&s, &s).unwrap().is_zero());
        assert_eq!(r.right_mutation_split(&SplitObject::single(P1, 0), &s).unwrap(), SplitObject::single(P1, 0));
        let (shriek, star) = r.adjoint_images(&d.indec(S1, 0), &s).unwrap();
        assert_eq!(star, s);
        assert!(shriek.is_zero());
        let (_, star) = r.adjoint_images(&d.indec(P1, 0), &s).unwrap();
        assert!(star.is_zero());
        let (shriek, star) = r.adjoint_images(&d.object(&s), &s).unwrap();
        assert_eq!((shriek, star), (s.clone(), s.clone()));
        assert!(r.perp_of(&SplitObject::new(vec![(S2, 0), (S1, 0)]), Mask::full(3)).is_err());
    }

    #[test]
    fn induced_pairs_a2() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let r = Reducer::new(&d, &ctx, &yd);
        let w = Mask::from_indices([P1]);
        assert_eq!(r.induced_pair(Mask::from_indices([S1, P1]), w).unwrap(), (w, Mask::EMPTY));
        assert_eq!(r.induced_pair(Mask::EMPTY, w).unwrap(), (Mask::EMPTY, w));
        assert_eq!(r.induced_pair(Mask::full(3), w).unwrap(), (w, Mask::EMPTY));
    }

    #[test]
    fn heart_constructions_a2() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let r = Reducer::new(&d, &ctx, &yd);
        let heart = Heart::new(&d, &ctx, Mask::from_indices([S1, P1]));
        let s = SplitObject::single(S2, 1);
        let rep = r.heart_constructions(&heart, S1, &s, &SplitObject::single(S1, 0), None, &[]).unwrap();
        assert_eq!(rep.k_b, SplitObject::single(P1, 0));
        assert!(rep.s_to_kb_zero);
        let rep = r.heart_constructions(&heart, S1, &s, &SplitObject::single(P1, 0), None, &[]).unwrap();
        assert_eq!(rep.k_b, SplitObject::single(P1, 0));
        assert!(rep.c_b.is_zero());
    }

    #[test]
    fn chain_a2() {
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let r = Reducer::new(&d, &ctx, &yd);
        let chain = r.reduction_chain(Mask::from_indices([S1, P1])).unwrap();
        assert_eq!(chain[0].e, P1);
        assert_eq!(chain[0].top, SplitObject::single(P1, 0));
        assert!(r.reduction_chain(Mask::EMPTY).unwrap().is_empty());
        for t in ctx.enumerate(16).unwrap() {
            if ctx.serre_closed(t) {
                let chain = r.reduction_chain(t).unwrap();
                assert!(chain.len() <= 2);
                assert!(chain.iter().all(|s| s.checks.all_pass() && s.induced_serre_closed));
            }
        }
    }

    #[test]
    fn chain_with_s1_top() {
        // picking E = S1 by hand gives S = S2[1] and W = {P1}
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let r = Reducer::new(&d, &ctx, &yd);
        let t = Mask::from_indices([S1, P1]);
        let lvl = Level { universe: Mask::full(3), t, f: ctx.torsion_free(t), anchors: Vec::new() };
        let (step, _) = r.step(&lvl, 0, S1).unwrap();
        assert_eq!(step.top, SplitObject::single(S2, 1));
        assert_eq!(step.perp.w_mask, Mask::from_indices([P1]));
        assert_eq!((step.t_prime, step.f_prime), (Mask::from_indices([P1]), Mask::EMPTY));
        assert!(step.checks.all_pass(), "{:?}", step.checks.failures);
        assert!(step.induced_effaceable && step.ambient_effaceable);
    }

    #[test]
    fn chain_all_a2() {
        // T = all: E = P1 has top S1, and W = {S2}
        let c = a2();
        let d = Derived::new(&c).unwrap();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let r = Reducer::new(&d, &ctx, &yd);
        let t = Mask::full(3);
        let lvl = Level { universe: t, t, f: Mask::EMPTY, anchors: Vec::new() };
        let (step, _) = r.step(&lvl, 0, P1).unwrap();
        assert_eq!(step.top, SplitObject::single(S1, 0));
        assert_eq!(step.perp.w_mask, Mask::from_indices([S2]));
        assert_eq!(step.t_prime, Mask::from_indices([S2]));
        assert!(step.checks.all_pass(), "{:?}", step.checks.failures);
    }
}
