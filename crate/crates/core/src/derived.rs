//! Bounded complexes of projective representations and morphisms up to homotopy.
//!
//! Every object is a complex whose terms are direct sums of indecomposable projectives `P_v`,
//! recorded by their generator vertices. A map out of a projective term is determined by the
//! images of its generators, which is how Hom spaces are parametrised.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::IndecCatalog;
use crate::error::{Error, Result};
use crate::fieldlin::{quotient_reps, Field, Mat};
use crate::quiver::Quiver;
use crate::rep::{kernel, trace, Rep, RepMorphism, SubRep};

/// One term `⊕_j P_{gens[j]}` of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    gens: Vec<usize>,
    rep: Rep,
    // offsets[u][j]: first basis column at vertex u belonging to generator j
    offsets: Vec<Vec<usize>>,
}

impl Term {
    pub fn gens(&self) -> &[usize] {
        &self.gens
    }
    pub fn rep(&self) -> &Rep {
        &self.rep
    }
    /// Basis index at vertex `gens[j]` of generator `j` itself (the trivial path).
    fn gen_col(&self, j: usize) -> usize {
        self.offsets[self.gens[j]][j]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PComplex {
    terms: BTreeMap<i32, Term>,
    // diffs[k]: term k -> term k+1, present when both terms are
    diffs: BTreeMap<i32, RepMorphism>,
}

impl PComplex {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn term(&self, k: i32) -> Option<&Term> {
        self.terms.get(&k)
    }
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.terms.keys().copied()
    }
    pub fn support(&self) -> Option<(i32, i32)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }
    fn dim(&self, k: i32, u: usize) -> usize {
        self.terms.get(&k).map_or(0, |t| t.rep.dims()[u])
    }
    /// Vertex block of `d^k`, zero-shaped when absent.
    fn d(&self, f: Field, k: i32, u: usize) -> Mat {
        match self.diffs.get(&k) {
            Some(m) => m.blocks[u].clone(),
            None => Mat::zeros(f, self.dim(k + 1, u), self.dim(k, u)),
        }
    }
    pub fn total_rank(&self) -> usize {
        self.terms.values().map(|t| t.gens.len()).sum()
    }
}

/// A degree-0 chain map.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<PComplex>,
    pub target: Arc<PComplex>,
    blocks: BTreeMap<i32, RepMorphism>,
}

impl ChainMap {
    fn block(&self, f: Field, k: i32, u: usize) -> Mat {
        match self.blocks.get(&k) {
            Some(m) => m.blocks[u].clone(),
            None => Mat::zeros(f, self.target.dim(k, u), self.source.dim(k, u)),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(RepMorphism::is_zero)
    }
}

/// `⊕ M_i[s]` over catalog indices; the canonical form of an object in the derived category
/// of a hereditary algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitObject {
    /// `(catalog index, shift)` pairs, sorted.
    pub summands: Vec<(usize, i32)>,
}

impl SplitObject {
    pub fn new(mut summands: Vec<(usize, i32)>) -> Self {
        summands.sort();
        SplitObject { summands }
    }
    pub fn single(i: usize, shift: i32) -> Self {
        SplitObject { summands: vec![(i, shift)] }
    }
    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }
    pub fn shifted(&self, n: i32) -> Self {
        SplitObject::new(self.summands.iter().map(|&(i, s)| (i, s + n)).collect())
    }
    pub fn plus(&self, other: &SplitObject) -> Self {
        let mut v = self.summands.clone();
        v.extend_from_slice(&other.summands);
        SplitObject::new(v)
    }
    pub fn render(&self, cat: &IndecCatalog) -> String {
        if self.summands.is_empty() {
            return "0".into();
        }
        self.summands
            .iter()
            .map(|&(i, s)| if s == 0 { cat.label(i) } else { format!("{}[{}]", cat.label(i), s) })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A minimal projective resolution `P^{-1} → P^0 → M`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: Arc<PComplex>,
    pub module: Rep,
    pub aug: RepMorphism,
}

/// Cohomology in one degree with the data needed to lift classes back to cycles.
struct Cohomology {
    rep: Rep,
    // lift[u]: columns are cycles in the term at vertex u representing the basis of H_u
    lift: Vec<Mat>,
}

/// Result of a mapping cone `X → Y → C → X[1]`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Arc<PComplex>,
    pub incl: ChainMap,
    pub proj: ChainMap,
}

/// Morphisms `X → Y` modulo null-homotopic maps.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: Arc<PComplex>,
    pub target: Arc<PComplex>,
    // (degree, generator) -> (offset, length) inside the unknown vector
    layout: Vec<(i32, usize, usize, usize)>,
    n_unknowns: usize,
    boundaries: Mat,
    reps: Mat,
    solver: Mat,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.reps.cols()
    }
}

/// The derived-category toolkit over one catalog.
pub struct Derived<'a> {
    cat: &'a IndecCatalog,
    q: &'a Quiver,
    field: Field,
    proj: Vec<Rep>,
    resolutions: Vec<Resolution>,
}

impl<'a> Derived<'a> {
    pub fn new(cat: &'a IndecCatalog) -> Result<Self> {
        let q = cat.quiver();
        let field = cat.field();
        let proj = (0..q.n_vertices()).map(|v| Rep::projective(q, field, v)).collect();
        let mut d = Derived { cat, q, field, proj, resolutions: Vec::new() };
        let res = cat.indecs().iter().map(|m| d.proj_resolve(m)).collect::<Result<Vec<_>>>()?;
        d.resolutions = res;
        Ok(d)
    }

    pub fn catalog(&self) -> &IndecCatalog {
        self.cat
    }
    pub fn quiver(&self) -> &Quiver {
        self.q
    }
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn term(&self, gens: Vec<usize>) -> Term {
        let n = self.q.n_vertices();
        let mut offsets = vec![Vec::with_capacity(gens.len()); n];
        let mut dims = vec![0usize; n];
        for &g in &gens {
            for u in 0..n {
                offsets[u].push(dims[u]);
                dims[u] += self.proj[g].dims()[u];
            }
        }
        let parts: Vec<Rep> = gens.iter().map(|&g| self.proj[g].clone()).collect();
        let rep = Rep::direct_sum_all(self.q, self.field, &parts);
        Term { gens, rep, offsets }
    }

    pub fn zero(&self) -> PComplex {
        PComplex { terms: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// Builds a complex, dropping zero terms and checking `d∘d = 0`.
    pub fn complex(&self, terms: BTreeMap<i32, Term>, diffs: BTreeMap<i32, RepMorphism>) -> Result<PComplex> {
        let terms: BTreeMap<i32, Term> = terms.into_iter().filter(|(_, t)| !t.gens.is_empty()).collect();
        let diffs: BTreeMap<i32, RepMorphism> =
            diffs.into_iter().filter(|(k, _)| terms.contains_key(k) && terms.contains_key(&(k + 1))).collect();
        let c = PComplex { terms, diffs };
        for (&k, dk) in &c.diffs {
            if let Some(dn) = c.diffs.get(&(k + 1)) {
                if !RepMorphism::compose(dn, dk).is_zero() {
                    return Err(Error::Violation(format!("d∘d ≠ 0 at degree {k}")));
                }
            }
        }
        Ok(c)
    }

    /// The morphism out of a projective term determined by generator images in `tgt`.
    pub fn from_gen_images(&self, src: &Term, tgt: &Rep, images: &[Vec<u32>]) -> RepMorphism {
        let n = self.q.n_vertices();
        let mut blocks: Vec<Mat> = (0..n).map(|u| Mat::zeros(self.field, tgt.dims()[u], src.rep.dims()[u])).collect();
        for (j, &v) in src.gens.iter().enumerate() {
            let x = &images[j];
            debug_assert_eq!(x.len(), tgt.dims()[v]);
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            for u in 0..n {
                for (pi, p) in self.q.paths(v, u).iter().enumerate() {
                    let col = tgt.path_map(self.q, v, p).mul_vec(x);
                    let c = src.offsets[u][j] + pi;
                    for (r, &val) in col.iter().enumerate() {
                        blocks[u].set(r, c, val);
                    }
                }
            }
        }
        RepMorphism { blocks }
    }

    pub fn gen_images(&self, src: &Term, m: &RepMorphism) -> Vec<Vec<u32>> {
        src.gens.iter().enumerate().map(|(j, &v)| m.blocks[v].column(src.gen_col(j))).collect()
    }

    /// Minimal projective resolution of `m`, in degrees -1 and 0.
    pub fn proj_resolve(&self, m: &Rep) -> Result<Resolution> {
        let (p0, aug) = self.projective_cover(m);
        let (k, incl) = kernel(self.q, &p0.rep, &aug);
        let (p1, cover) = self.projective_cover(&k);
        if cover.rank() != k.total_dim() || p1.rep.total_dim() != k.total_dim() {
            return Err(Error::Violation("kernel of a projective cover is not projective".into()));
        }
        let d = RepMorphism::compose(&incl, &cover);
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        terms.insert(-1, p1);
        terms.insert(0, p0);
        diffs.insert(-1, d);
        let complex = self.complex(terms, diffs)?;
        Ok(Resolution { complex: Arc::new(complex), module: m.clone(), aug })
    }

    fn projective_cover(&self, m: &Rep) -> (Term, RepMorphism) {
        let n = self.q.n_vertices();
        let mut gens = Vec::new();
        let mut images = Vec::new();
        for u in 0..n {
            let mut rad = Mat::zeros(self.field, m.dims()[u], 0);
            for (a, &(_, t)) in self.q.arrows().iter().enumerate() {
                if t == u {
                    rad = rad.hstack(m.map(a));
                }
            }
            let top = quotient_reps(&Mat::identity(self.field, m.dims()[u]), &rad.column_basis()).expect("radical inside module");
            for c in top.columns() {
                gens.push(u);
                images.push(c);
            }
        }
        let t = self.term(gens);
        let aug = self.from_gen_images(&t, m, &images);
        (t, aug)
    }

    pub fn resolution(&self, i: usize) -> &Resolution {
        &self.resolutions[i]
    }

    /// `M_i[s]` as a complex.
    pub fn indec(&self, i: usize, s: i32) -> Arc<PComplex> {
        let c = self.resolutions[i].complex.clone();
        if s == 0 {
            c
        } else {
            Arc::new(self.shift(&c, s))
        }
    }

    pub fn object(&self, o: &SplitObject) -> Arc<PComplex> {
        let parts: Vec<Arc<PComplex>> = o.summands.iter().map(|&(i, s)| self.indec(i, s)).collect();
        Arc::new(self.direct_sum(&parts))
    }

    /// `X[n]`: terms `X^{k+n}`, differential `(-1)^n d`.
    pub fn shift(&self, x: &PComplex, n: i32) -> PComplex {
        let sign = self.field.sign(n);
        PComplex {
            terms: x.terms.iter().map(|(&k, t)| (k - n, t.clone())).collect(),
            diffs: x.diffs.iter().map(|(&k, d)| (k - n, d.scale(sign))).collect(),
        }
    }

    /// `f[n]`, with blocks unchanged.
    pub fn shift_map(&self, f: &ChainMap, n: i32) -> ChainMap {
        ChainMap {
            source: Arc::new(self.shift(&f.source, n)),
            target: Arc::new(self.shift(&f.target, n)),
            blocks: f.blocks.iter().map(|(&k, b)| (k - n, b.clone())).collect(),
        }
    }

    pub fn direct_sum(&self, parts: &[Arc<PComplex>]) -> PComplex {
        let mut degrees: Vec<i32> = parts.iter().flat_map(|p| p.degrees()).collect();
        degrees.sort();
        degrees.dedup();
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for &k in &degrees {
            let gens: Vec<usize> = parts.iter().flat_map(|p| p.term(k).map_or(Vec::new(), |t| t.gens.clone())).collect();
            terms.insert(k, self.term(gens));
        }
        for &k in &degrees {
            if !degrees.contains(&(k + 1)) {
                continue;
            }
            let blocks = (0..self.q.n_vertices())
                .map(|u| parts.iter().fold(Mat::zeros(self.field, 0, 0), |acc, p| acc.block_diag(&p.d(self.field, k, u))))
                .collect();
            diffs.insert(k, RepMorphism { blocks });
        }
        self.complex(terms, diffs).expect("direct sum of complexes is a complex")
    }

    pub fn identity(&self, x: &Arc<PComplex>) -> ChainMap {
        ChainMap { source: x.clone(), target: x.clone(), blocks: x.terms.iter().map(|(&k, t)| (k, RepMorphism::identity(&t.rep))).collect() }
    }

    pub fn zero_map(&self, x: &Arc<PComplex>, y: &Arc<PComplex>) -> ChainMap {
        ChainMap { source: x.clone(), target: y.clone(), blocks: BTreeMap::new() }
    }

    /// `g ∘ f`
    pub fn compose(&self, g: &ChainMap, f: &ChainMap) -> ChainMap {
        debug_assert!(Arc::ptr_eq(&f.target, &g.source) || *f.target == *g.source, "composing non-matching chain maps");
        let mut blocks = BTreeMap::new();
        for &k in f.source.terms.keys() {
            if !g.target.terms.contains_key(&k) || !f.target.terms.contains_key(&k) {
                continue;
            }
            let b = (0..self.q.n_vertices()).map(|u| g.block(self.field, k, u).mul(&f.block(self.field, k, u))).collect();
            blocks.insert(k, RepMorphism { blocks: b });
        }
        ChainMap { source: f.source.clone(), target: g.target.clone(), blocks }
    }

    pub fn add_maps(&self, f: &ChainMap, g: &ChainMap) -> ChainMap {
        let mut blocks = BTreeMap::new();
        for &k in f.source.terms.keys() {
            if !f.target.terms.contains_key(&k) {
                continue;
            }
            let b = (0..self.q.n_vertices()).map(|u| f.block(self.field, k, u).add(&g.block(self.field, k, u))).collect();
            blocks.insert(k, RepMorphism { blocks: b });
        }
        ChainMap { source: f.source.clone(), target: f.target.clone(), blocks }
    }

    pub fn scale_map(&self, f: &ChainMap, s: u32) -> ChainMap {
        ChainMap { source: f.source.clone(), target: f.target.clone(), blocks: f.blocks.iter().map(|(&k, b)| (k, b.scale(s))).collect() }
    }

    /// `[f_1 ... f_r]: ⊕ X_i → Y`.
    pub fn row_map(&self, maps: &[ChainMap], target: &Arc<PComplex>) -> ChainMap {
        let sources: Vec<Arc<PComplex>> = maps.iter().map(|m| m.source.clone()).collect();
        let src = Arc::new(self.direct_sum(&sources));
        let mut blocks = BTreeMap::new();
        for &k in src.terms.keys() {
            if !target.terms.contains_key(&k) {
                continue;
            }
            let b = (0..self.q.n_vertices())
                .map(|u| maps.iter().fold(Mat::zeros(self.field, target.dim(k, u), 0), |acc, m| acc.hstack(&m.block(self.field, k, u))))
                .collect();
            blocks.insert(k, RepMorphism { blocks: b });
        }
        ChainMap { source: src, target: target.clone(), blocks }
    }

    /// `(f_1, ..., f_r): X → ⊕ Y_i`.
    pub fn column_map(&self, source: &Arc<PComplex>, maps: &[ChainMap]) -> ChainMap {
        let targets: Vec<Arc<PComplex>> = maps.iter().map(|m| m.target.clone()).collect();
        let tgt = Arc::new(self.direct_sum(&targets));
        let mut blocks = BTreeMap::new();
        for &k in source.terms.keys() {
            if !tgt.terms.contains_key(&k) {
                continue;
            }
            let b = (0..self.q.n_vertices())
                .map(|u| maps.iter().fold(Mat::zeros(self.field, 0, source.dim(k, u)), |acc, m| acc.vstack(&m.block(self.field, k, u))))
                .collect();
            blocks.insert(k, RepMorphism { blocks: b });
        }
        ChainMap { source: source.clone(), target: tgt, blocks }
    }

    /// `f ⊕ g`
    pub fn sum_map(&self, f: &ChainMap, g: &ChainMap) -> ChainMap {
        let src = Arc::new(self.direct_sum(&[f.source.clone(), g.source.clone()]));
        let tgt = Arc::new(self.direct_sum(&[f.target.clone(), g.target.clone()]));
        let mut blocks = BTreeMap::new();
        for &k in src.terms.keys() {
            if !tgt.terms.contains_key(&k) {
                continue;
            }
            let b = (0..self.q.n_vertices()).map(|u| f.block(self.field, k, u).block_diag(&g.block(self.field, k, u))).collect();
            blocks.insert(k, RepMorphism { blocks: b });
        }
        ChainMap { source: src, target: tgt, blocks }
    }

    pub fn is_chain_map(&self, f: &ChainMap) -> bool {
        let fd = self.field;
        let mut degrees: Vec<i32> = f.source.degrees().chain(f.target.degrees()).collect();
        degrees.sort();
        degrees.dedup();
        degrees.iter().all(|&k| {
            (0..self.q.n_vertices()).all(|u| {
                let lhs = f.target.d(fd, k, u).mul(&f.block(fd, k, u));
                let rhs = f.block(fd, k + 1, u).mul(&f.source.d(fd, k, u));
                lhs == rhs
            })
        })
    }

    /// Mapping cone `C^k = X^{k+1} ⊕ Y^k`, `d = [[-d_X, 0], [f, d_Y]]`.
    pub fn cone(&self, f: &ChainMap) -> Cone {
        let fd = self.field;
        let (x, y) = (&f.source, &f.target);
        let mut degrees: Vec<i32> = x.degrees().map(|k| k - 1).chain(y.degrees()).collect();
        degrees.sort();
        degrees.dedup();
        let mut terms = BTreeMap::new();
        for &k in &degrees {
            let mut gens = x.term(k + 1).map_or(Vec::new(), |t| t.gens.clone());
            gens.extend(y.term(k).map_or(Vec::new(), |t| t.gens.clone()));
            terms.insert(k, self.term(gens));
        }
        let neg = fd.neg(1);
        let mut diffs = BTreeMap::new();
        for &k in &degrees {
            let blocks = (0..self.q.n_vertices())
                .map(|u| {
                    let top = x.d(fd, k + 1, u).scale(neg).hstack(&Mat::zeros(fd, x.dim(k + 2, u), y.dim(k, u)));
                    let bottom = f.block(fd, k + 1, u).hstack(&y.d(fd, k, u));
                    top.vstack(&bottom)
                })
                .collect();
            diffs.insert(k, RepMorphism { blocks });
        }
        let c = Arc::new(self.complex(terms, diffs).expect("mapping cone is a complex"));
        let x1 = Arc::new(self.shift(x, 1));
        let mut ib = BTreeMap::new();
        let mut pb = BTreeMap::new();
        for &k in c.terms.keys() {
            let nv = self.q.n_vertices();
            if y.terms.contains_key(&k) {
                ib.insert(
                    k,
                    RepMorphism {
                        blocks: (0..nv).map(|u| Mat::zeros(fd, x.dim(k + 1, u), y.dim(k, u)).vstack(&Mat::identity(fd, y.dim(k, u)))).collect(),
                    },
                );
            }
            if x.terms.contains_key(&(k + 1)) {
                pb.insert(
                    k,
                    RepMorphism {
                        blocks: (0..nv).map(|u| Mat::identity(fd, x.dim(k + 1, u)).hstack(&Mat::zeros(fd, x.dim(k + 1, u), y.dim(k, u)))).collect(),
                    },
                );
            }
        }
        Cone {
            complex: c.clone(),
            incl: ChainMap { source: y.clone(), target: c.clone(), blocks: ib },
            proj: ChainMap { source: c, target: x1, blocks: pb },
        }
    }

    fn cohomology_data(&self, terms: &BTreeMap<i32, Rep>, diffs: &BTreeMap<i32, RepMorphism>, k: i32) -> Cohomology {
        let fd = self.field;
        let n = self.q.n_vertices();
        let Some(xk) = terms.get(&k) else {
            return Cohomology { rep: Rep::zero(self.q, fd), lift: (0..n).map(|_| Mat::zeros(fd, 0, 0)).collect() };
        };
        let dims = xk.dims();
        let z: Vec<Mat> = (0..n)
            .map(|u| match diffs.get(&k) {
                Some(d) => d.blocks[u].nullspace(),
                None => Mat::identity(fd, dims[u]),
            })
            .collect();
        let b: Vec<Mat> = (0..n)
            .map(|u| match diffs.get(&(k - 1)) {
                Some(d) => d.blocks[u].column_basis(),
                None => Mat::zeros(fd, dims[u], 0),
            })
            .collect();
        // boundaries in cycle coordinates, then a complement giving the cohomology basis
        let mut comp = Vec::with_capacity(n);
        let mut proj = Vec::with_capacity(n);
        for u in 0..n {
            let bz = z[u].solve_matrix(&b[u]).expect("boundaries are cycles");
            let zc = z[u].cols();
            let c = quotient_reps(&Mat::identity(fd, zc), &bz).expect("subspace");
            let inv = bz.hstack(&c).solve_matrix(&Mat::identity(fd, zc)).expect("basis");
            proj.push(inv.submatrix(bz.cols()..zc, 0..zc));
            comp.push(c);
        }
        let hdims: Vec<usize> = comp.iter().map(Mat::cols).collect();
        let maps = self
            .q
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, &(s, t))| {
                // x_a z_s c_s expressed in cycle coordinates of t, then projected
                let img = xk.map(a).mul(&z[s]).mul(&comp[s]);
                let in_z = z[t].solve_matrix(&img).expect("arrow maps preserve cycles");
                proj[t].mul(&in_z)
            })
            .collect();
        let rep = Rep::new(self.q, fd, hdims, maps).expect("cohomology shapes");
        let lift = (0..n).map(|u| z[u].mul(&comp[u])).collect();
        Cohomology { rep, lift }
    }

    fn rep_terms(x: &PComplex) -> (BTreeMap<i32, Rep>, BTreeMap<i32, RepMorphism>) {
        (x.terms.iter().map(|(&k, t)| (k, t.rep.clone())).collect(), x.diffs.clone())
    }

    pub fn cohomology(&self, x: &PComplex, k: i32) -> Rep {
        let (t, d) = Self::rep_terms(x);
        self.cohomology_data(&t, &d, k).rep
    }

    /// Splits `x` as `⊕ H^k(x)[-k]`, decomposed over the catalog.
    pub fn split(&self, x: &PComplex) -> Result<SplitObject> {
        let (t, d) = Self::rep_terms(x);
        let mut out = Vec::new();
        for &k in t.keys() {
            let h = self.cohomology_data(&t, &d, k).rep;
            for i in self.cat.summands(&h)? {
                out.push((i, -k));
            }
        }
        Ok(SplitObject::new(out))
    }

    /// Quasi-isomorphism `⊕_k res(H^k(x))[-k] → x`, returned with its source.
    pub fn splitting(&self, x: &Arc<PComplex>) -> Result<ChainMap> {
        let parts = self.split_parts(x, |_, h| Ok(SubRep::whole(h)))?;
        Ok(self.assemble_parts(x, parts))
    }

    /// For each degree `k`, a submodule of `H^k` (chosen by `pick`) together with a chain map
    /// `res(sub)[-k] → x` inducing the inclusion on cohomology.
    fn split_parts(
        &self,
        x: &Arc<PComplex>,
        pick: impl Fn(i32, &Rep) -> Result<SubRep>,
    ) -> Result<Vec<ChainMap>> {
        let fd = self.field;
        let (t, d) = Self::rep_terms(x);
        let mut parts = Vec::new();
        for &k in t.keys() {
            let coh = self.cohomology_data(&t, &d, k);
            if coh.rep.is_zero() {
                continue;
            }
            let sub = pick(k, &coh.rep)?;
            if sub.total_dim() == 0 {
                continue;
            }
            let (m, incl) = crate::rep::sub_rep(self.q, &coh.rep, &sub)?;
            let res = self.proj_resolve(&m)?;
            let src = Arc::new(self.shift(&res.complex, -k));
            let mut blocks = BTreeMap::new();
            // degree k: generators go to cycles lifting their cohomology classes
            let p0 = res.complex.term(0).expect("nonzero module has a cover");
            let p0_images: Vec<Vec<u32>> = self
                .gen_images(p0, &res.aug)
                .iter()
                .zip(&p0.gens)
                .map(|(h, &v)| coh.lift[v].mul_vec(&incl.blocks[v].mul_vec(h)))
                .collect();
            let xk = x.term(k).expect("cohomology lives on a term");
            let sig0 = self.from_gen_images(p0, &xk.rep, &p0_images);
            // degree k-1: solve d x = (-1)^k σ^k(d_res e)
            if let Some(p1) = res.complex.term(-1) {
                let dres = &res.complex.diffs[&-1];
                let sign = fd.sign(k);
                let xk1 = x.term(k - 1);
                let images: Vec<Vec<u32>> = p1
                    .gens
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let y = sig0.blocks[v].mul_vec(&dres.blocks[v].column(p1.gen_col(j)));
                        let y: Vec<u32> = y.iter().map(|&c| fd.mul(c, sign)).collect();
                        x.d(fd, k - 1, v).solve(&y).ok_or_else(|| Error::Violation("cohomology class lift failed".into()))
                    })
                    .collect::<Result<_>>()?;
                if let Some(xk1) = xk1 {
                    blocks.insert(k - 1, self.from_gen_images(p1, &xk1.rep, &images));
                } else if images.iter().any(|v| !v.is_empty()) {
                    return Err(Error::Violation("boundary without a preceding term".into()));
                }
            }
            blocks.insert(k, sig0);
            let cm = ChainMap { source: src, target: x.clone(), blocks };
            debug_assert!(self.is_chain_map(&cm));
            parts.push(cm);
        }
        Ok(parts)
    }

    fn assemble_parts(&self, x: &Arc<PComplex>, parts: Vec<ChainMap>) -> ChainMap {
        if parts.is_empty() {
            return self.zero_map(&Arc::new(self.zero()), x);
        }
        self.row_map(&parts, x)
    }

    /// The part of `x` in the shifted aisle `U_T[m]` and its inclusion into `x`:
    /// `⊕_{k<-m} H^k[-k] ⊕ t(H^{-m})[m]` where `t` is the torsion part.
    pub fn truncate_lower(&self, x: &Arc<PComplex>, t_mask: crate::torsion::Mask, m: i32) -> Result<ChainMap> {
        let gens: Vec<Rep> = t_mask.iter().map(|i| self.cat.indec(i).clone()).collect();
        let parts = self.split_parts(x, |k, h| {
            if k < -m {
                Ok(SubRep::whole(h))
            } else if k == -m {
                trace(self.q, &gens, h)
            } else {
                Ok(SubRep::zero(h))
            }
        })?;
        Ok(self.assemble_parts(x, parts))
    }

    /// Lifts a module map to the chosen resolutions.
    pub fn lift_module_map(&self, src: &Resolution, tgt: &Resolution, g: &RepMorphism) -> Result<ChainMap> {
        let mut blocks = BTreeMap::new();
        let (sc, tc) = (&src.complex, &tgt.complex);
        let Some(sp0) = sc.term(0) else {
            return Ok(ChainMap { source: sc.clone(), target: tc.clone(), blocks });
        };
        let Some(tp0) = tc.term(0) else {
            return Ok(ChainMap { source: sc.clone(), target: tc.clone(), blocks });
        };
        let img0: Vec<Vec<u32>> = sp0
            .gens
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let want = g.blocks[v].mul_vec(&src.aug.blocks[v].column(sp0.gen_col(j)));
                tgt.aug.blocks[v].solve(&want).ok_or_else(|| Error::Violation("augmentation is not onto".into()))
            })
            .collect::<Result<_>>()?;
        let g0 = self.from_gen_images(sp0, &tp0.rep, &img0);
        if let (Some(sp1), Some(tp1)) = (sc.term(-1), tc.term(-1)) {
            let img1: Vec<Vec<u32>> = sp1
                .gens
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let want = g0.blocks[v].mul_vec(&sc.diffs[&-1].blocks[v].column(sp1.gen_col(j)));
                    tc.diffs[&-1].blocks[v].solve(&want).ok_or_else(|| Error::Violation("lift to resolution failed".into()))
                })
                .collect::<Result<_>>()?;
            blocks.insert(-1, self.from_gen_images(sp1, &tp1.rep, &img1));
        }
        blocks.insert(0, g0);
        let cm = ChainMap { source: sc.clone(), target: tc.clone(), blocks };
        if !self.is_chain_map(&cm) {
            return Err(Error::Violation("lifted module map is not a chain map".into()));
        }
        Ok(cm)
    }

    /// Chain maps `x → y` modulo homotopy.
    pub fn hom_space(&self, x: &Arc<PComplex>, y: &Arc<PComplex>) -> HomSpace {
        let mut layout = Vec::new();
        let mut off = 0;
        for (&k, t) in &x.terms {
            if let Some(yt) = y.term(k) {
                for (j, &v) in t.gens.iter().enumerate() {
                    let len = yt.rep.dims()[v];
                    layout.push((k, j, off, len));
                    off += len;
                }
            }
        }
        let n_unknowns = off;
        // homotopy unknowns h^k: x^k -> y^{k-1}
        let mut h_layout = Vec::new();
        let mut hoff = 0;
        for (&k, t) in &x.terms {
            if let Some(yt) = y.term(k - 1) {
                for (j, &v) in t.gens.iter().enumerate() {
                    let len = yt.rep.dims()[v];
                    h_layout.push((k, j, hoff, len));
                    hoff += len;
                }
            }
        }
        let constraint = self.linear_map_matrix(n_unknowns, |u| self.chain_defect(x, y, &self.assemble(x, y, &layout, u, 0)));
        let homotopy = self.linear_map_matrix(hoff, |h| {
            let hm = self.assemble(x, y, &h_layout, h, -1);
            self.null_homotopic_images(x, y, &hm, &layout, n_unknowns)
        });
        let z = constraint.nullspace();
        let boundaries = homotopy.column_basis();
        let reps = quotient_reps(&z, &boundaries).expect("null-homotopic maps are chain maps");
        let solver = boundaries.hstack(&reps);
        HomSpace { source: x.clone(), target: y.clone(), layout, n_unknowns, boundaries, reps, solver }
    }

    /// Matrix of a linear map given by evaluation on unit vectors.
    fn linear_map_matrix(&self, n_in: usize, eval: impl Fn(&[u32]) -> Vec<u32>) -> Mat {
        let mut cols = Vec::with_capacity(n_in);
        let mut unit = vec![0u32; n_in];
        for i in 0..n_in {
            unit[i] = 1;
            cols.push(eval(&unit));
            unit[i] = 0;
        }
        let rows = if n_in == 0 { eval(&[]).len() } else { cols[0].len() };
        Mat::from_columns(self.field, rows, &cols)
    }

    /// Blocks `x^k → y^{k+shift}` from generator images laid out in `u`.
    fn assemble(&self, x: &PComplex, y: &PComplex, layout: &[(i32, usize, usize, usize)], u: &[u32], shift: i32) -> BTreeMap<i32, RepMorphism> {
        let mut images: BTreeMap<i32, Vec<Vec<u32>>> = BTreeMap::new();
        for &(k, j, off, len) in layout {
            let e = images.entry(k).or_insert_with(|| vec![Vec::new(); x.terms[&k].gens.len()]);
            e[j] = u[off..off + len].to_vec();
        }
        images
            .into_iter()
            .map(|(k, im)| {
                let yt = &y.terms[&(k + shift)];
                (k, self.from_gen_images(&x.terms[&k], &yt.rep, &im))
            })
            .collect()
    }

    /// `d_Y f - f d_X` evaluated on generators, flattened.
    fn chain_defect(&self, x: &PComplex, y: &PComplex, f: &BTreeMap<i32, RepMorphism>) -> Vec<u32> {
        let fd = self.field;
        let blk = |k: i32, u: usize| -> Mat {
            match f.get(&k) {
                Some(m) => m.blocks[u].clone(),
                None => Mat::zeros(fd, y.dim(k, u), x.dim(k, u)),
            }
        };
        let mut out = Vec::new();
        for (&k, t) in &x.terms {
            if !y.terms.contains_key(&(k + 1)) {
                continue;
            }
            for (j, &v) in t.gens.iter().enumerate() {
                let c = t.gen_col(j);
                let lhs = y.d(fd, k, v).mul(&blk(k, v));
                let rhs = blk(k + 1, v).mul(&x.d(fd, k, v));
                out.extend(lhs.sub(&rhs).column(c));
            }
        }
        out
    }

    /// Generator images of `d_Y h + h d_X` in the chain-map layout.
    fn null_homotopic_images(
        &self,
        x: &PComplex,
        y: &PComplex,
        h: &BTreeMap<i32, RepMorphism>,
        layout: &[(i32, usize, usize, usize)],
        n: usize,
    ) -> Vec<u32> {
        let fd = self.field;
        let hb = |k: i32, u: usize| -> Mat {
            match h.get(&k) {
                Some(m) => m.blocks[u].clone(),
                None => Mat::zeros(fd, y.dim(k - 1, u), x.dim(k, u)),
            }
        };
        let mut out = vec![0u32; n];
        for &(k, j, off, len) in layout {
            let t = &x.terms[&k];
            let v = t.gens[j];
            let c = t.gen_col(j);
            let m = y.d(fd, k - 1, v).mul(&hb(k, v)).add(&hb(k + 1, v).mul(&x.d(fd, k, v)));
            let col = m.column(c);
            out[off..off + len].copy_from_slice(&col);
        }
        out
    }

    fn unknowns_of(&self, hs: &HomSpace, f: &ChainMap) -> Vec<u32> {
        let mut u = vec![0u32; hs.n_unknowns];
        for &(k, j, off, len) in &hs.layout {
            if let Some(b) = f.blocks.get(&k) {
                let t = &hs.source.terms[&k];
                let col = b.blocks[t.gens[j]].column(t.gen_col(j));
                u[off..off + len].copy_from_slice(&col);
            }
        }
        u
    }

    /// Coordinates of the homotopy class of `f` in the basis of `hs`.
    pub fn coords(&self, hs: &HomSpace, f: &ChainMap) -> Result<Vec<u32>> {
        let u = self.unknowns_of(hs, f);
        let x = hs.solver.solve(&u).ok_or_else(|| Error::Violation("not a chain map in this Hom space".into()))?;
        Ok(x[hs.boundaries.cols()..].to_vec())
    }

    pub fn from_coords(&self, hs: &HomSpace, c: &[u32]) -> ChainMap {
        let u = hs.reps.mul_vec(c);
        ChainMap { source: hs.source.clone(), target: hs.target.clone(), blocks: self.assemble(&hs.source, &hs.target, &hs.layout, &u, 0) }
    }

    pub fn basis(&self, hs: &HomSpace) -> Vec<ChainMap> {
        (0..hs.dim())
            .map(|i| {
                let mut c = vec![0u32; hs.dim()];
                c[i] = 1;
                self.from_coords(hs, &c)
            })
            .collect()
    }

    pub fn is_null_homotopic(&self, f: &ChainMap) -> Result<bool> {
        let hs = self.hom_space(&f.source, &f.target);
        Ok(self.coords(&hs, f)?.iter().all(|&c| c == 0))
    }

    /// `dim Hom(x, y[n])`.
    pub fn hom_dim(&self, x: &Arc<PComplex>, y: &Arc<PComplex>, n: i32) -> usize {
        let yn = if n == 0 { y.clone() } else { Arc::new(self.shift(y, n)) };
        self.hom_space(x, &yn).dim()
    }

    /// Some `f: x → y` with `p ∘ f ≃ h`, where `p: y → z` and `h: x → z`.
    pub fn solve_post(&self, p: &ChainMap, h: &ChainMap) -> Result<Option<ChainMap>> {
        let hs_xy = self.hom_space(&h.source, &p.source);
        let hs_xz = self.hom_space(&h.source, &p.target);
        let basis = self.basis(&hs_xy);
        let cols: Vec<Vec<u32>> = basis.iter().map(|f| self.coords(&hs_xz, &self.compose(p, f))).collect::<Result<_>>()?;
        let a = Mat::from_columns(self.field, hs_xz.dim(), &cols);
        let target = self.coords(&hs_xz, h)?;
        Ok(a.solve(&target).map(|c| self.combine(&hs_xy, &basis, &c)))
    }

    /// Some `g: y → z` with `g ∘ i ≃ h`, where `i: x → y` and `h: x → z`.
    pub fn solve_pre(&self, i: &ChainMap, h: &ChainMap) -> Result<Option<ChainMap>> {
        let hs_yz = self.hom_space(&i.target, &h.target);
        let hs_xz = self.hom_space(&i.source, &h.target);
        let basis = self.basis(&hs_yz);
        let cols: Vec<Vec<u32>> = basis.iter().map(|g| self.coords(&hs_xz, &self.compose(g, i))).collect::<Result<_>>()?;
        let a = Mat::from_columns(self.field, hs_xz.dim(), &cols);
        let target = self.coords(&hs_xz, h)?;
        Ok(a.solve(&target).map(|c| self.combine(&hs_yz, &basis, &c)))
    }

    fn combine(&self, hs: &HomSpace, basis: &[ChainMap], c: &[u32]) -> ChainMap {
        let mut acc = self.zero_map(&hs.source, &hs.target);
        for (b, &ci) in basis.iter().zip(c) {
            if ci != 0 {
                acc = self.add_maps(&acc, &self.scale_map(b, ci));
            }
        }
        acc
    }

    pub fn is_acyclic(&self, x: &PComplex) -> bool {
        let (t, d) = Self::rep_terms(x);
        t.keys().all(|&k| self.cohomology_data(&t, &d, k).rep.is_zero())
    }

    /// Matrix of the Nakayama functor on the map `P_v → P_w` given by the path `p: w → v`,
    /// at vertex `k`: `r* ↦ s*` whenever `r = s p`.
    fn nakayama_path_block(&self, v: usize, w: usize, p: &[usize], k: usize) -> Mat {
        let rows = self.q.paths(k, w);
        let cols = self.q.paths(k, v);
        let mut m = Mat::zeros(self.field, rows.len(), cols.len());
        for (ci, r) in cols.iter().enumerate() {
            if r.len() >= p.len() && r[r.len() - p.len()..] == *p {
                let s = &r[..r.len() - p.len()];
                let ri = self.q.path_index(k, w, s).expect("prefix of a path is a path");
                m.set(ri, ci, 1);
            }
        }
        m
    }

    /// `S(x)`: apply the Nakayama functor termwise and split the result.
    pub fn serre(&self, x: &PComplex) -> Result<PComplex> {
        let fd = self.field;
        let n = self.q.n_vertices();
        let inj = |gens: &[usize]| -> Rep {
            let parts: Vec<Rep> = gens.iter().map(|&g| Rep::injective(self.q, fd, g)).collect();
            Rep::direct_sum_all(self.q, fd, &parts)
        };
        let terms: BTreeMap<i32, Rep> = x.terms.iter().map(|(&k, t)| (k, inj(&t.gens))).collect();
        let mut diffs = BTreeMap::new();
        for (&k, d) in &x.diffs {
            let src = &x.terms[&k];
            let tgt = &x.terms[&(k + 1)];
            let images = self.gen_images(src, d);
            let blocks = (0..n)
                .map(|kv| {
                    let mut rows = Vec::new();
                    for &w in &tgt.gens {
                        let mut row = Mat::zeros(fd, self.q.paths(kv, w).len(), 0);
                        for &v in &src.gens {
                            row = row.hstack(&Mat::zeros(fd, self.q.paths(kv, w).len(), self.q.paths(kv, v).len()));
                        }
                        rows.push(row);
                    }
                    // fill block (i, j) from the coefficients of generator j's image on (i, p)
                    let mut m = rows.into_iter().fold(Mat::zeros(fd, 0, terms[&k].dims()[kv]), |a, r| a.vstack(&r));
                    let row_off = prefix_sums(tgt.gens.iter().map(|&w| self.q.paths(kv, w).len()));
                    let col_off = prefix_sums(src.gens.iter().map(|&v| self.q.paths(kv, v).len()));
                    for (j, &v) in src.gens.iter().enumerate() {
                        let img = &images[j];
                        for (i, &w) in tgt.gens.iter().enumerate() {
                            for (pi, p) in self.q.paths(w, v).iter().enumerate() {
                                let c = img[tgt.offsets[v][i] + pi];
                                if c == 0 {
                                    continue;
                                }
                                let b = self.nakayama_path_block(v, w, p, kv).scale(c);
                                for r in 0..b.rows() {
                                    for cc in 0..b.cols() {
                                        m.add_at(row_off[i] + r, col_off[j] + cc, b.get(r, cc));
                                    }
                                }
                            }
                        }
                    }
                    m
                })
                .collect();
            let nd = RepMorphism { blocks };
            debug_assert!(nd.is_intertwining(self.q, &terms[&k], &terms[&(k + 1)]));
            diffs.insert(k, nd);
        }
        let mut parts = Vec::new();
        for &k in terms.keys() {
            let h = self.cohomology_data(&terms, &diffs, k).rep;
            if h.is_zero() {
                continue;
            }
            let res = self.proj_resolve(&h)?;
            parts.push(Arc::new(self.shift(&res.complex, -k)));
        }
        Ok(self.direct_sum(&parts))
    }

    pub fn serre_split(&self, o: &SplitObject) -> Result<SplitObject> {
        let x = self.object(o);
        self.split(&self.serre(&x)?)
    }
}

fn prefix_sums(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    it.map(|x| {
        let o = acc;
        acc += x;
        o
    })
    .collect()
}
