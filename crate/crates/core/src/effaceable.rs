//! Effaceability of a torsion pair, decided two ways.
//!
//! * Yoneda: every class in `Ext¹(F,T)` must factor through a heart object. In the hereditary
//!   case a heart object splits as `F'[1] ⊕ T''`, so the factorable classes are spanned by
//!   pushouts `F → F'[1] → T[1]` and pullbacks `F → T'' → T[1]`.
//! * Five-term: every indecomposable `X` must have a submodule `K` that is a quotient of a
//!   torsion-free object while `X/K` embeds into a torsion object.
//!
//! Both checks quantify over indecomposables only. Hom and Ext are additive, and the class
//! spans are bilinear in the maps involved, so sums add nothing. A direct sum of witnesses
//! is a witness for the direct sum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::IndecCatalog;
use crate::error::Result;
use crate::fieldlin::Mat;
use crate::rep::{hom_ext, quotient_rep, sub_rep, submodules, yoneda_pull, yoneda_push};
use crate::torsion::{Mask, TorsionContext};

/// Precomputed class spans for the Yoneda checker.
pub struct YonedaData {
    n: usize,
    ext_dims: Vec<Vec<usize>>,
    // push[f][f2][t]: classes in Ext¹(M_f, M_t) of the form g·η with η ∈ Ext¹(M_f,M_f2), g: M_f2 -> M_t
    push: Vec<Vec<Vec<Mat>>>,
    // pull[f][t2][t]: classes ξ·h with h: M_f -> M_t2, ξ ∈ Ext¹(M_t2,M_t)
    pull: Vec<Vec<Vec<Mat>>>,
}

impl YonedaData {
    pub fn new(cat: &IndecCatalog) -> Result<Self> {
        let q = cat.quiver();
        let f = cat.field();
        let k = cat.len();
        let reps = cat.indecs();
        let he: Vec<Vec<_>> = (0..k)
            .into_par_iter()
            .map(|a| (0..k).map(|b| hom_ext(q, &reps[a], &reps[b])).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let ext_dims = (0..k).map(|a| (0..k).map(|b| he[a][b].ext_dim).collect()).collect();
        let per_f: Vec<(Vec<Vec<Mat>>, Vec<Vec<Mat>>)> = (0..k)
            .into_par_iter()
            .map(|fi| {
                let mut push = vec![Vec::with_capacity(k); k];
                let mut pull = vec![Vec::with_capacity(k); k];
                for mid in 0..k {
                    for t in 0..k {
                        let target = &he[fi][t];
                        let d = target.ext_dim;
                        let mut ps = Mat::zeros(f, d, 0);
                        let mut ls = Mat::zeros(f, d, 0);
                        if d > 0 {
                            for eta in he[fi][mid].ext_basis(q) {
                                for g in &he[mid][t].hom_basis {
                                    let c = target.class_coords(&yoneda_push(q, g, &eta));
                                    ps = ps.hstack(&Mat::column_vector(f, &c));
                                }
                            }
                            for xi in he[mid][t].ext_basis(q) {
                                for h in &he[fi][mid].hom_basis {
                                    let c = target.class_coords(&yoneda_pull(q, &xi, h));
                                    ls = ls.hstack(&Mat::column_vector(f, &c));
                                }
                            }
                        }
                        push[mid].push(ps.column_basis());
                        pull[mid].push(ls.column_basis());
                    }
                }
                (push, pull)
            })
            .collect();
        let (push, pull) = per_f.into_iter().unzip();
        Ok(YonedaData { n: k, ext_dims, push, pull })
    }

    /// Dimension of `Ext¹(M_f, M_t)` not reached through the heart. `use_pull` toggles the
    /// `T''` route.
    pub fn gap(&self, f_idx: usize, t_idx: usize, f_mask: Mask, t_mask: Mask, use_pull: bool) -> usize {
        let d = self.ext_dims[f_idx][t_idx];
        if d == 0 {
            return 0;
        }
        let mut acc: Option<Mat> = None;
        let mut add = |m: &Mat| {
            if m.cols() > 0 {
                acc = Some(match acc.take() {
                    None => m.clone(),
                    Some(a) => a.hstack(m),
                });
            }
        };
        for mid in f_mask.iter() {
            add(&self.push[f_idx][mid][t_idx]);
        }
        if use_pull {
            for mid in t_mask.iter() {
                add(&self.pull[f_idx][mid][t_idx]);
            }
        }
        d - acc.map_or(0, |m| m.rank())
    }

    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// One submodule `K ⊆ X` summarised by the catalog summands of `K` and `X/K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmoduleSummary {
    pub dims: Vec<usize>,
    pub sub: Mask,
    pub quotient: Mask,
}

/// Submodule summaries for every indecomposable.
pub struct FiveTermData {
    per_x: Vec<Vec<SubmoduleSummary>>,
}

impl FiveTermData {
    pub fn new(cat: &IndecCatalog, max_subdim: usize) -> Result<Self> {
        let q = cat.quiver();
        let per_x = (0..cat.len())
            .into_par_iter()
            .map(|x| {
                let mx = cat.indec(x);
                let mut out: Vec<SubmoduleSummary> = Vec::new();
                for s in submodules(q, mx, max_subdim)? {
                    let (k, _) = sub_rep(q, mx, &s)?;
                    let (c, _) = quotient_rep(q, mx, &s)?;
                    let summary = SubmoduleSummary {
                        dims: s.dims(),
                        sub: Mask::from_indices(cat.summands(&k)?),
                        quotient: Mask::from_indices(cat.summands(&c)?),
                    };
                    if !out.iter().any(|o| o.sub == summary.sub && o.quotient == summary.quotient) {
                        out.push(summary);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiveTermData { per_x })
    }

    pub fn submodules_of(&self, x: usize) -> &[SubmoduleSummary] {
        &self.per_x[x]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YonedaGap {
    pub f: usize,
    pub t: usize,
    pub uncovered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiveTermWitness {
    pub x: usize,
    /// Dimension vector of the witness submodule, `None` when no submodule works.
    pub k_dims: Option<Vec<usize>>,
    pub k_summands: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffaceabilityReport {
    pub t_mask: Mask,
    pub verdict_yoneda: bool,
    pub verdict_fiveterm: bool,
    pub yoneda_gaps: Vec<YonedaGap>,
    /// Gaps when only the pushout route `F → F'[1] → T[1]` is used.
    pub push_only_gaps: Vec<YonedaGap>,
    pub fiveterm_witnesses: Vec<FiveTermWitness>,
}

pub fn yoneda_gaps(data: &YonedaData, t_mask: Mask, f_mask: Mask, use_pull: bool) -> Vec<YonedaGap> {
    let mut gaps = Vec::new();
    for f in f_mask.iter() {
        for t in t_mask.iter() {
            let g = data.gap(f, t, f_mask, t_mask, use_pull);
            if g > 0 {
                gaps.push(YonedaGap { f, t, uncovered: g });
            }
        }
    }
    gaps
}

pub fn effaceable_yoneda(data: &YonedaData, t_mask: Mask, f_mask: Mask) -> bool {
    yoneda_gaps(data, t_mask, f_mask, true).is_empty()
}

/// Five-term witnesses for every `X` in `universe`.
pub fn fiveterm_witnesses(
    ctx: &TorsionContext,
    data: &FiveTermData,
    t_mask: Mask,
    f_mask: Mask,
    universe: Mask,
) -> Vec<FiveTermWitness> {
    let full = Mask::full(ctx.catalog().len());
    let gen_f = ctx.gen_closure(f_mask, full);
    let cogen_t = ctx.cogen_closure(t_mask, full);
    universe
        .iter()
        .map(|x| {
            let hit = data.submodules_of(x).iter().find(|s| s.sub.is_subset(gen_f) && s.quotient.is_subset(cogen_t));
            FiveTermWitness {
                x,
                k_dims: hit.map(|s| s.dims.clone()),
                k_summands: hit.map(|s| s.sub.to_vec()).unwrap_or_default(),
            }
        })
        .collect()
}

pub fn effaceable_fiveterm(ctx: &TorsionContext, data: &FiveTermData, t_mask: Mask, f_mask: Mask, universe: Mask) -> bool {
    fiveterm_witnesses(ctx, data, t_mask, f_mask, universe).iter().all(|w| w.k_dims.is_some())
}

pub fn effaceability_report(ctx: &TorsionContext, yd: &YonedaData, fd: &FiveTermData, t_mask: Mask) -> EffaceabilityReport {
    let full = Mask::full(ctx.catalog().len());
    let f_mask = ctx.torsion_free(t_mask);
    let yoneda_gaps_v = yoneda_gaps(yd, t_mask, f_mask, true);
    let push_only = yoneda_gaps(yd, t_mask, f_mask, false);
    let witnesses = fiveterm_witnesses(ctx, fd, t_mask, f_mask, full);
    EffaceabilityReport {
        t_mask,
        verdict_yoneda: yoneda_gaps_v.is_empty(),
        verdict_fiveterm: witnesses.iter().all(|w| w.k_dims.is_some()),
        yoneda_gaps: yoneda_gaps_v,
        push_only_gaps: push_only,
        fiveterm_witnesses: witnesses,
    }
}

/// One row of the three-way comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub t_mask: Mask,
    pub serre_closed: bool,
    pub report: EffaceabilityReport,
}

impl EquivalenceRow {
    pub fn agrees(&self) -> bool {
        self.serre_closed == self.report.verdict_yoneda && self.report.verdict_yoneda == self.report.verdict_fiveterm
    }
}

/// Runs the three checkers on every torsion class.
pub fn verify_equivalence(
    ctx: &TorsionContext,
    yd: &YonedaData,
    fd: &FiveTermData,
    classes: &[Mask],
) -> (Vec<EquivalenceRow>, bool) {
    let rows: Vec<EquivalenceRow> = classes
        .par_iter()
        .map(|&t| EquivalenceRow { t_mask: t, serre_closed: ctx.serre_closed(t), report: effaceability_report(ctx, yd, fd, t) })
        .collect();
    let ok = rows.iter().all(EquivalenceRow::agrees);
    (rows, ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogBounds;
    use crate::fieldlin::Field;
    use crate::quiver::Quiver;

    const S2: usize = 0;
    const P1: usize = 1;
    const S1: usize = 2;

    fn a2() -> IndecCatalog {
        IndecCatalog::build(&Quiver::linear_a(2).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
    }

    #[test]
    fn a2_negative_control() {
        let c = a2();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let fd = FiveTermData::new(&c, 8).unwrap();
        let t = Mask::from_indices([S2]);
        let r = effaceability_report(&ctx, &yd, &fd, t);
        assert!(!r.verdict_yoneda);
        assert_eq!(r.yoneda_gaps, vec![YonedaGap { f: S1, t: S2, uncovered: 1 }]);
        assert!(!r.verdict_fiveterm);
        let p1 = r.fiveterm_witnesses.iter().find(|w| w.x == P1).unwrap();
        assert_eq!(p1.k_dims, None);
    }

    #[test]
    fn a2_positive_example() {
        let c = a2();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let fd = FiveTermData::new(&c, 8).unwrap();
        let t = Mask::from_indices([S1, P1]);
        let r = effaceability_report(&ctx, &yd, &fd, t);
        assert!(r.verdict_yoneda && r.verdict_fiveterm);
        assert!(r.fiveterm_witnesses.iter().all(|w| w.k_dims.is_some()));
        // K = S2 is a witness for P1: S2 is torsion-free and P1/S2 = S1 is torsion
        let full = Mask::full(3);
        let gen_f = ctx.gen_closure(Mask::from_indices([S2]), full);
        let cogen_t = ctx.cogen_closure(t, full);
        let k_s2 = fd.submodules_of(P1).iter().find(|s| s.dims == vec![0, 1]).unwrap();
        assert!(k_s2.sub.is_subset(gen_f) && k_s2.quotient.is_subset(cogen_t));
        // empty torsion class is vacuous
        let r = effaceability_report(&ctx, &yd, &fd, Mask::EMPTY);
        assert!(r.verdict_yoneda && r.verdict_fiveterm);
    }

    #[test]
    fn a2_equivalence() {
        let c = a2();
        let ctx = TorsionContext::new(&c).unwrap();
        let yd = YonedaData::new(&c).unwrap();
        let fd = FiveTermData::new(&c, 8).unwrap();
        let classes = ctx.enumerate(16).unwrap();
        let (rows, ok) = verify_equivalence(&ctx, &yd, &fd, &classes);
        assert!(ok);
        let failing: Vec<Mask> = rows.iter().filter(|r| !r.serre_closed).map(|r| r.t_mask).collect();
        assert_eq!(failing, vec![Mask::from_indices([S2])]);
    }
}
