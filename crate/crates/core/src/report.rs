//! Serializable reports: the verdict table of a full sweep, plus catalog, heart and reduction views.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::IndecCatalog;
use crate::derived::{Derived, SplitObject};
use crate::effaceable::{effaceability_report, FiveTermData, YonedaData, YonedaGap};
use crate::error::{Error, Result};
use crate::heart::{Heart, TriState};
use crate::quiver::Quiver;
use crate::reduction::{Reducer, ReductionStep};
use crate::torsion::{Mask, TorsionContext};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverInfo {
    pub name: String,
    pub vertices: usize,
    /// 1-based `(source, target)` pairs.
    pub arrows: Vec<(usize, usize)>,
    pub hash: String,
}

impl QuiverInfo {
    pub fn new(name: &str, q: &Quiver) -> Self {
        QuiverInfo {
            name: name.to_string(),
            vertices: q.n_vertices(),
            arrows: q.arrows().iter().map(|&(s, t)| (s + 1, t + 1)).collect(),
            hash: q.content_hash(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub index: usize,
    pub label: String,
    pub dims: Vec<usize>,
    /// 1-based vertex when the module is the projective, injective or simple at that vertex.
    pub projective: Option<usize>,
    pub injective: Option<usize>,
    pub simple: Option<usize>,
}

pub fn catalog_entries(cat: &IndecCatalog) -> Vec<CatalogEntry> {
    let at = |v: &[usize], i: usize| v.iter().position(|&x| x == i).map(|p| p + 1);
    (0..cat.len())
        .map(|i| CatalogEntry {
            index: i,
            label: cat.label(i),
            dims: cat.indec(i).dims().to_vec(),
            projective: at(cat.proj_index(), i),
            injective: at(cat.inj_index(), i),
            simple: at(cat.simple_index(), i),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub schema_version: u32,
    pub quiver: QuiverInfo,
    pub field: u32,
    pub catalog_size: usize,
    pub indecomposables: Vec<CatalogEntry>,
}

pub fn catalog_report(cat: &IndecCatalog, name: &str) -> CatalogReport {
    CatalogReport {
        schema_version: SCHEMA_VERSION,
        quiver: QuiverInfo::new(name, cat.quiver()),
        field: cat.field().p(),
        catalog_size: cat.len(),
        indecomposables: catalog_entries(cat),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Largest catalog whose subsets are enumerated.
    pub max_indecs: usize,
    pub max_subdim: usize,
    /// Summand bound for the epimorphism checker; `None` skips it.
    pub heart_bound: Option<usize>,
    /// Run the reduction chain on Serre-closed classes.
    pub reduce: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { max_indecs: 16, max_subdim: 8, heart_bound: Some(256), reduce: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub id: usize,
    pub mask: Mask,
    pub t: Vec<String>,
    pub size: usize,
    pub ext_projectives: Mask,
    pub finitely_generated: bool,
    pub serre_closed: bool,
    pub effaceable_yoneda: bool,
    pub effaceable_fiveterm: bool,
    pub condition4: Option<TriState>,
    pub chain_length: Option<usize>,
    pub agree: bool,
    pub yoneda_gaps: Vec<YonedaGap>,
    /// Indecomposables without a five-term witness.
    pub fiveterm_missing: Vec<usize>,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub classes: usize,
    pub serre_closed: usize,
    pub effaceable_yoneda: usize,
    pub effaceable_fiveterm: usize,
    pub finitely_generated: usize,
    pub condition4_inconclusive: usize,
    /// Rows where all three main verdicts are true, resp. all false.
    pub passing: usize,
    pub failing: usize,
    pub disagreements: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictTable {
    pub schema_version: u32,
    pub quiver: QuiverInfo,
    pub field: u32,
    pub catalog_size: usize,
    pub catalog: Vec<CatalogEntry>,
    pub torsion_classes: Vec<VerdictRow>,
    pub counts: VerdictCounts,
    pub agreement: bool,
}

/// Shared precomputation for every per-class check.
pub struct Workbench<'a> {
    pub cat: &'a IndecCatalog,
    pub ctx: TorsionContext<'a>,
    pub yd: YonedaData,
    pub fd: FiveTermData,
    pub d: Derived<'a>,
}

impl<'a> Workbench<'a> {
    pub fn new(cat: &'a IndecCatalog, max_subdim: usize) -> Result<Self> {
        Ok(Workbench {
            cat,
            ctx: TorsionContext::new(cat)?,
            yd: YonedaData::new(cat)?,
            fd: FiveTermData::new(cat, max_subdim)?,
            d: Derived::new(cat)?,
        })
    }

    fn labels(&self, m: Mask) -> Vec<String> {
        m.iter().map(|i| self.cat.label(i)).collect()
    }

    pub fn row(&self, id: usize, t: Mask, opts: &ClassifyOptions) -> Result<VerdictRow> {
        let serre_closed = self.ctx.serre_closed(t);
        let rep = effaceability_report(&self.ctx, &self.yd, &self.fd, t);
        let condition4 = match opts.heart_bound {
            Some(b) => Some(Heart::new(&self.d, &self.ctx, t).epi_condition(b)?),
            None => None,
        };
        let (chain_length, violation) = if opts.reduce && serre_closed {
            match Reducer::new(&self.d, &self.ctx, &self.yd).reduction_chain(t) {
                Ok(steps) => (Some(steps.len()), None),
                Err(Error::Violation(m)) => (None, Some(m)),
                Err(e) => return Err(e),
            }
        } else {
            (None, None)
        };
        let c4_ok = condition4.and_then(TriState::as_bool).is_none_or(|b| b == rep.verdict_yoneda);
        let agree = serre_closed == rep.verdict_yoneda && rep.verdict_yoneda == rep.verdict_fiveterm && c4_ok && violation.is_none();
        Ok(VerdictRow {
            id,
            mask: t,
            t: self.labels(t),
            size: t.len(),
            ext_projectives: self.ctx.ext_projectives(t),
            finitely_generated: self.ctx.is_finitely_generated(t),
            serre_closed,
            effaceable_yoneda: rep.verdict_yoneda,
            effaceable_fiveterm: rep.verdict_fiveterm,
            condition4,
            chain_length,
            agree,
            yoneda_gaps: rep.yoneda_gaps,
            fiveterm_missing: rep.fiveterm_witnesses.iter().filter(|w| w.k_dims.is_none()).map(|w| w.x).collect(),
            violation,
        })
    }

    pub fn classes(&self, max_indecs: usize) -> Result<Vec<Mask>> {
        self.ctx.enumerate(max_indecs)
    }

    /// Looks up a torsion class by its row id.
    pub fn class(&self, max_indecs: usize, id: usize) -> Result<Mask> {
        let all = self.classes(max_indecs)?;
        all.get(id).copied().ok_or_else(|| Error::Config(format!("torsion class id {id} out of range 0..{}", all.len())))
    }
}

/// Runs every checker on every torsion class. Rows come back in increasing mask order
/// regardless of how the work is scheduled.
pub fn classify(cat: &IndecCatalog, name: &str, opts: &ClassifyOptions) -> Result<VerdictTable> {
    let wb = Workbench::new(cat, opts.max_subdim)?;
    let classes = wb.classes(opts.max_indecs)?;
    let rows = classes.par_iter().enumerate().map(|(id, &t)| wb.row(id, t, opts)).collect::<Result<Vec<_>>>()?;
    let mut counts = VerdictCounts { classes: rows.len(), ..Default::default() };
    for r in &rows {
        counts.serre_closed += r.serre_closed as usize;
        counts.effaceable_yoneda += r.effaceable_yoneda as usize;
        counts.effaceable_fiveterm += r.effaceable_fiveterm as usize;
        counts.finitely_generated += r.finitely_generated as usize;
        counts.condition4_inconclusive += (r.condition4 == Some(TriState::Inconclusive)) as usize;
        let triple = [r.serre_closed, r.effaceable_yoneda, r.effaceable_fiveterm];
        counts.passing += triple.iter().all(|&b| b) as usize;
        counts.failing += triple.iter().all(|&b| !b) as usize;
        counts.disagreements += !r.agree as usize;
    }
    Ok(VerdictTable {
        schema_version: SCHEMA_VERSION,
        quiver: QuiverInfo::new(name, cat.quiver()),
        field: cat.field().p(),
        catalog_size: cat.len(),
        catalog: catalog_entries(cat),
        agreement: counts.disagreements == 0,
        torsion_classes: rows,
        counts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleTopRow {
    pub e: String,
    pub top: String,
    pub end_dim: usize,
    pub self_orthogonal: bool,
    pub projective_in_heart: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeartReport {
    pub schema_version: u32,
    pub quiver: QuiverInfo,
    pub field: u32,
    pub id: usize,
    pub t: Vec<String>,
    pub f: Vec<String>,
    pub indecomposables: Vec<String>,
    /// Heart indecomposables `P` with `Hom(P, X[1]) = 0` for every heart object `X`.
    pub projectives: Vec<String>,
    pub simple_tops: Vec<SimpleTopRow>,
}

pub fn heart_report(wb: &Workbench, name: &str, id: usize, t: Mask) -> Result<HeartReport> {
    let heart = Heart::new(&wb.d, &wb.ctx, t);
    let inds: Vec<SplitObject> = heart.indecs();
    let objs: Vec<_> = inds.iter().map(|x| wb.d.object(x)).collect();
    let projectives = inds
        .iter()
        .zip(&objs)
        .filter(|(_, p)| objs.iter().all(|x| wb.d.hom_dim(p, x, 1) == 0))
        .map(|(s, _)| s.render(wb.cat))
        .collect();
    let simple_tops = wb
        .ctx
        .ext_projectives(t)
        .iter()
        .map(|e| {
            let st = heart.simple_top(e)?;
            Ok(SimpleTopRow {
                e: wb.cat.label(e),
                top: st.top.render(wb.cat),
                end_dim: st.end_dim,
                self_orthogonal: st.self_orthogonal,
                projective_in_heart: st.projective_in_heart,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HeartReport {
        schema_version: SCHEMA_VERSION,
        quiver: QuiverInfo::new(name, wb.cat.quiver()),
        field: wb.cat.field().p(),
        id,
        t: wb.labels(t),
        f: wb.labels(heart.f_mask()),
        indecomposables: inds.iter().map(|s| s.render(wb.cat)).collect(),
        projectives,
        simple_tops,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReduceReport {
    pub schema_version: u32,
    pub quiver: QuiverInfo,
    pub field: u32,
    pub id: usize,
    pub t: Vec<String>,
    pub serre_closed: bool,
    pub steps: Vec<StepSummary>,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepSummary {
    pub e_label: String,
    pub top_label: String,
    pub w: Vec<String>,
    pub t_prime: Vec<String>,
    #[serde(flatten)]
    pub step: ReductionStep,
}

pub fn reduce_report(wb: &Workbench, name: &str, id: usize, t: Mask) -> Result<ReduceReport> {
    let (steps, violation) = match Reducer::new(&wb.d, &wb.ctx, &wb.yd).reduction_chain(t) {
        Ok(s) => (s, None),
        Err(Error::Violation(m)) => (Vec::new(), Some(m)),
        Err(e) => return Err(e),
    };
    let steps = steps
        .into_iter()
        .map(|s| StepSummary {
            e_label: wb.cat.label(s.e),
            top_label: s.top.render(wb.cat),
            w: wb.labels(s.perp.w_mask),
            t_prime: wb.labels(s.t_prime),
            step: s,
        })
        .collect();
    Ok(ReduceReport {
        schema_version: SCHEMA_VERSION,
        quiver: QuiverInfo::new(name, wb.cat.quiver()),
        field: wb.cat.field().p(),
        id,
        t: wb.labels(t),
        serre_closed: wb.ctx.serre_closed(t),
        steps,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CatalogBounds;
    use crate::fieldlin::Field;

    fn cat(name: &str) -> IndecCatalog {
        IndecCatalog::build(&Quiver::preset(name).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
    }

    #[test]
    fn a2_table() {
        let c = cat("A2");
        let t = classify(&c, "A2", &ClassifyOptions::default()).unwrap();
        assert_eq!(t.torsion_classes.len(), 5);
        assert_eq!((t.counts.passing, t.counts.failing), (4, 1));
        assert!(t.agreement);
        let bad: Vec<_> = t.torsion_classes.iter().filter(|r| !r.serre_closed).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].t, vec!["S2"]);
        assert_eq!(bad[0].condition4, Some(TriState::False));
        assert_eq!(bad[0].yoneda_gaps, vec![YonedaGap { f: 2, t: 0, uncovered: 1 }]);
        let json = serde_json::to_string(&t).unwrap();
        let back: VerdictTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn a2_heart_report() {
        let c = cat("A2");
        let wb = Workbench::new(&c, 8).unwrap();
        let t = Mask::from_indices([1, 2]);
        let id = wb.classes(16).unwrap().iter().position(|&m| m == t).unwrap();
        let h = heart_report(&wb, "A2", id, t).unwrap();
        let mut inds = h.indecomposables.clone();
        inds.sort();
        assert_eq!(inds, vec!["P1", "S1", "S2[1]"]);
        let mut proj = h.projectives.clone();
        proj.sort();
        assert_eq!(proj, vec!["P1", "S1"]);
        let mut tops: Vec<_> = h.simple_tops.iter().map(|r| r.top.clone()).collect();
        tops.sort();
        assert_eq!(tops, vec!["P1", "S2[1]"]);
        assert!(h.simple_tops.iter().all(|r| r.end_dim == 1 && r.self_orthogonal && r.projective_in_heart));
    }

    #[test]
    fn empty_class_reduces_to_nothing() {
        let c = cat("A2");
        let wb = Workbench::new(&c, 8).unwrap();
        let r = reduce_report(&wb, "A2", 0, Mask::EMPTY).unwrap();
        assert!(r.steps.is_empty() && r.violation.is_none());
        assert!(wb.class(16, 99).is_err());
    }
}
