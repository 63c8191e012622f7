//! Representations of an acyclic quiver: morphisms, extensions, submodules, trace/reject.
//!
//! Path algebras of acyclic quivers are hereditary, so Hom and Ext¹ come from one map
//! `δ: ⊕_i Hom(M_i,N_i) → ⊕_a Hom(M_s(a),N_t(a))`, `δ(f)_a = N_a f_s − f_t M_a`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldlin::{quotient_reps, Field, Mat};
use crate::quiver::Quiver;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rep {
    field: Field,
    dims: Vec<usize>,
    maps: Vec<Mat>,
}

impl Rep {
    pub fn new(q: &Quiver, field: Field, dims: Vec<usize>, maps: Vec<Mat>) -> Result<Self> {
        if dims.len() != q.n_vertices() || maps.len() != q.arrows().len() {
            return Err(Error::Shape(format!(
                "rep has {} dims / {} maps for a quiver with {} vertices / {} arrows",
                dims.len(),
                maps.len(),
                q.n_vertices(),
                q.arrows().len()
            )));
        }
        for (a, m) in maps.iter().enumerate() {
            let (s, t) = q.arrows()[a];
            if m.rows() != dims[t] || m.cols() != dims[s] || m.field() != field {
                return Err(Error::Shape(format!("arrow {} map is {}x{}, expected {}x{}", a, m.rows(), m.cols(), dims[t], dims[s])));
            }
        }
        Ok(Rep { field, dims, maps })
    }

    pub fn zero(q: &Quiver, field: Field) -> Self {
        let dims = vec![0; q.n_vertices()];
        let maps = q.arrows().iter().map(|_| Mat::zeros(field, 0, 0)).collect();
        Rep { field, dims, maps }
    }

    pub fn simple(q: &Quiver, field: Field, v: usize) -> Self {
        let mut dims = vec![0; q.n_vertices()];
        dims[v] = 1;
        let maps = q.arrows().iter().map(|&(s, t)| Mat::zeros(field, dims[t], dims[s])).collect();
        Rep { field, dims, maps }
    }

    /// `P_v`: basis at `u` is the set of paths `v -> u`.
    pub fn projective(q: &Quiver, field: Field, v: usize) -> Self {
        let n = q.n_vertices();
        let dims: Vec<usize> = (0..n).map(|u| q.paths(v, u).len()).collect();
        let maps = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, &(s, t))| {
                let mut m = Mat::zeros(field, dims[t], dims[s]);
                for (j, p) in q.paths(v, s).iter().enumerate() {
                    let mut ext = p.clone();
                    ext.push(a);
                    let i = q.path_index(v, t, &ext).expect("extended path is a path");
                    m.set(i, j, 1);
                }
                m
            })
            .collect();
        Rep { field, dims, maps }
    }

    /// `I_v`: basis at `u` is the set of paths `u -> v` (dual basis); an arrow `a: u -> w`
    /// sends `r*` to `r'*` when `r = a r'`.
    pub fn injective(q: &Quiver, field: Field, v: usize) -> Self {
        let n = q.n_vertices();
        let dims: Vec<usize> = (0..n).map(|u| q.paths(u, v).len()).collect();
        let maps = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, &(s, t))| {
                let mut m = Mat::zeros(field, dims[t], dims[s]);
                for (j, r) in q.paths(s, v).iter().enumerate() {
                    if r.first() == Some(&a) {
                        let i = q.path_index(t, v, &r[1..]).expect("suffix is a path");
                        m.set(i, j, 1);
                    }
                }
                m
            })
            .collect();
        Rep { field, dims, maps }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }
    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    #[inline]
    pub fn map(&self, a: usize) -> &Mat {
        &self.maps[a]
    }
    pub fn maps(&self) -> &[Mat] {
        &self.maps
    }
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Matrix of the path `p` starting at `v` acting on this representation.
    pub fn path_map(&self, q: &Quiver, v: usize, p: &[usize]) -> Mat {
        let mut m = Mat::identity(self.field, self.dims[v]);
        let mut at = v;
        for &a in p {
            debug_assert_eq!(q.source(a), at);
            m = self.maps[a].mul(&m);
            at = q.target(a);
        }
        m
    }

    pub fn direct_sum(&self, q: &Quiver, other: &Rep) -> Rep {
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = (0..q.arrows().len()).map(|a| self.maps[a].block_diag(&other.maps[a])).collect();
        Rep { field: self.field, dims, maps }
    }

    pub fn direct_sum_all(q: &Quiver, field: Field, reps: &[Rep]) -> Rep {
        reps.iter().fold(Rep::zero(q, field), |acc, r| acc.direct_sum(q, r))
    }
}

/// Vertexwise linear maps; `blocks[i]` has shape `target.dims[i] × source.dims[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepMorphism {
    pub blocks: Vec<Mat>,
}

impl RepMorphism {
    pub fn identity(m: &Rep) -> Self {
        RepMorphism { blocks: m.dims.iter().map(|&d| Mat::identity(m.field, d)).collect() }
    }

    pub fn zero(src: &Rep, tgt: &Rep) -> Self {
        RepMorphism { blocks: src.dims.iter().zip(&tgt.dims).map(|(&s, &t)| Mat::zeros(src.field, t, s)).collect() }
    }

    /// `g ∘ f`
    pub fn compose(g: &RepMorphism, f: &RepMorphism) -> RepMorphism {
        RepMorphism { blocks: g.blocks.iter().zip(&f.blocks).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn add(&self, other: &RepMorphism) -> RepMorphism {
        RepMorphism { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, s: u32) -> RepMorphism {
        RepMorphism { blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Mat::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        self.blocks.iter().all(|b| b.rows() == b.cols() && b.rank() == b.rows())
    }

    pub fn is_intertwining(&self, q: &Quiver, src: &Rep, tgt: &Rep) -> bool {
        q.arrows().iter().enumerate().all(|(a, &(s, t))| tgt.maps[a].mul(&self.blocks[s]) == self.blocks[t].mul(&src.maps[a]))
    }

    /// Direct sum `f ⊕ g`.
    pub fn block_diag(&self, other: &RepMorphism) -> RepMorphism {
        RepMorphism { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.block_diag(b)).collect() }
    }

    /// Total rank summed over vertices.
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(Mat::rank).sum()
    }

    fn power(&self, k: usize) -> RepMorphism {
        let mut acc = RepMorphism { blocks: self.blocks.iter().map(|b| Mat::identity(b.field(), b.rows())).collect() };
        for _ in 0..k {
            acc = RepMorphism::compose(self, &acc);
        }
        acc
    }
}

/// A 1-cocycle `M ⇢ N`: one matrix `N_t(a) × M_s(a)` per arrow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtCocycle {
    pub comps: Vec<Mat>,
}

impl ExtCocycle {
    pub fn zero(q: &Quiver, m: &Rep, n: &Rep) -> Self {
        ExtCocycle { comps: q.arrows().iter().map(|&(s, t)| Mat::zeros(m.field, n.dims[t], m.dims[s])).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Mat::is_zero)
    }
}

/// Layout of `⊕_i Hom(M_i,N_i)` and `⊕_a Hom(M_s(a),N_t(a))` as flat coordinate spaces.
#[derive(Clone, Debug)]
struct Layout {
    vertex_offsets: Vec<usize>,
    arrow_offsets: Vec<usize>,
    vertex_dim: usize,
    arrow_dim: usize,
}

impl Layout {
    fn new(q: &Quiver, m: &Rep, n: &Rep) -> Self {
        let mut vertex_offsets = Vec::with_capacity(q.n_vertices());
        let mut acc = 0;
        for i in 0..q.n_vertices() {
            vertex_offsets.push(acc);
            acc += n.dims[i] * m.dims[i];
        }
        let vertex_dim = acc;
        let mut arrow_offsets = Vec::with_capacity(q.arrows().len());
        acc = 0;
        for &(s, t) in q.arrows() {
            arrow_offsets.push(acc);
            acc += n.dims[t] * m.dims[s];
        }
        Layout { vertex_offsets, arrow_offsets, vertex_dim, arrow_dim: acc }
    }
}

/// Hom and Ext¹ between two representations.
#[derive(Clone, Debug)]
pub struct HomExt {
    pub hom_basis: Vec<RepMorphism>,
    pub ext_dim: usize,
    /// Columns span the coboundaries `im δ`, in arrow-space coordinates.
    pub coboundary_basis: Mat,
    complement: Mat,
    coords: Mat,
    layout: Layout,
    src_dims: Vec<usize>,
    tgt_dims: Vec<usize>,
    field: Field,
}

fn delta_matrix(q: &Quiver, m: &Rep, n: &Rep, lay: &Layout) -> Mat {
    let f = m.field;
    let mut d = Mat::zeros(f, lay.arrow_dim, lay.vertex_dim);
    for (a, &(s, t)) in q.arrows().iter().enumerate() {
        let ao = lay.arrow_offsets[a];
        let cols_a = m.dims[s];
        // N_a f_s: unit f_s = e_{r,c} contributes N_a[x][r] at entry (x, c)
        let so = lay.vertex_offsets[s];
        for r in 0..n.dims[s] {
            for c in 0..m.dims[s] {
                let col = so + r * m.dims[s] + c;
                for x in 0..n.dims[t] {
                    let v = n.maps[a].get(x, r);
                    if v != 0 {
                        d.add_at(ao + x * cols_a + c, col, v);
                    }
                }
            }
        }
        // -f_t M_a: unit f_t = e_{r,c} contributes -M_a[c][y] at entry (r, y)
        let to = lay.vertex_offsets[t];
        for r in 0..n.dims[t] {
            for c in 0..m.dims[t] {
                let col = to + r * m.dims[t] + c;
                for y in 0..m.dims[s] {
                    let v = m.maps[a].get(c, y);
                    if v != 0 {
                        d.add_at(ao + r * cols_a + y, col, f.neg(v));
                    }
                }
            }
        }
    }
    d
}

pub fn hom_ext(q: &Quiver, m: &Rep, n: &Rep) -> Result<HomExt> {
    check_same(q, m, n)?;
    let f = m.field;
    let lay = Layout::new(q, m, n);
    let d = delta_matrix(q, m, n, &lay);
    let kernel = d.nullspace();
    let hom_basis = kernel.columns().iter().map(|v| unflatten_vertex(f, &lay, m, n, v)).collect();
    let cob = d.column_basis();
    let complement = quotient_reps(&Mat::identity(f, lay.arrow_dim), &cob)?;
    let full = cob.hstack(&complement);
    let inv = full.solve_matrix(&Mat::identity(f, lay.arrow_dim)).expect("basis completion is invertible");
    let coords = inv.submatrix(cob.cols()..lay.arrow_dim, 0..lay.arrow_dim);
    Ok(HomExt {
        hom_basis,
        ext_dim: complement.cols(),
        coboundary_basis: cob,
        complement,
        coords,
        layout: lay,
        src_dims: m.dims.clone(),
        tgt_dims: n.dims.clone(),
        field: f,
    })
}

/// `(dim Hom, dim Ext¹)` without materialising bases.
pub fn hom_ext_dims(q: &Quiver, m: &Rep, n: &Rep) -> (usize, usize) {
    let lay = Layout::new(q, m, n);
    let rank = delta_matrix(q, m, n, &lay).rank();
    (lay.vertex_dim - rank, lay.arrow_dim - rank)
}

pub fn hom_dim(q: &Quiver, m: &Rep, n: &Rep) -> usize {
    hom_ext_dims(q, m, n).0
}

fn check_same(q: &Quiver, m: &Rep, n: &Rep) -> Result<()> {
    if m.dims.len() != q.n_vertices() || n.dims.len() != q.n_vertices() || m.field != n.field {
        return Err(Error::Shape("representations over different quivers or fields".into()));
    }
    Ok(())
}

fn unflatten_vertex(f: Field, lay: &Layout, m: &Rep, n: &Rep, v: &[u32]) -> RepMorphism {
    let blocks = (0..m.dims.len())
        .map(|i| {
            let o = lay.vertex_offsets[i];
            let mut b = Mat::zeros(f, n.dims[i], m.dims[i]);
            for r in 0..n.dims[i] {
                for c in 0..m.dims[i] {
                    b.set(r, c, v[o + r * m.dims[i] + c]);
                }
            }
            b
        })
        .collect();
    RepMorphism { blocks }
}

impl HomExt {
    pub fn hom_dim(&self) -> usize {
        self.hom_basis.len()
    }

    fn flatten(&self, eps: &ExtCocycle) -> Vec<u32> {
        let mut v = vec![0; self.layout.arrow_dim];
        for (a, c) in eps.comps.iter().enumerate() {
            let o = self.layout.arrow_offsets[a];
            v[o..o + c.data().len()].copy_from_slice(c.data());
        }
        v
    }

    fn unflatten(&self, q: &Quiver, v: &[u32]) -> ExtCocycle {
        let comps = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, &(s, t))| {
                let o = self.layout.arrow_offsets[a];
                let (r, c) = (self.tgt_dims[t], self.src_dims[s]);
                let mut m = Mat::zeros(self.field, r, c);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, v[o + i * c + j]);
                    }
                }
                m
            })
            .collect();
        ExtCocycle { comps }
    }

    /// Coordinates of the class of `eps` in the chosen basis of Ext¹.
    pub fn class_coords(&self, eps: &ExtCocycle) -> Vec<u32> {
        self.coords.mul_vec(&self.flatten(eps))
    }

    pub fn is_coboundary(&self, eps: &ExtCocycle) -> bool {
        self.class_coords(eps).iter().all(|&x| x == 0)
    }

    pub fn cocycle(&self, q: &Quiver, coords: &[u32]) -> ExtCocycle {
        assert_eq!(coords.len(), self.ext_dim);
        self.unflatten(q, &self.complement.mul_vec(coords))
    }

    pub fn ext_basis(&self, q: &Quiver) -> Vec<ExtCocycle> {
        (0..self.ext_dim).map(|k| self.unflatten(q, &self.complement.column(k))).collect()
    }

    /// One representative for each of the `p^d` classes, zero class first.
    pub fn all_classes(&self, q: &Quiver) -> Vec<ExtCocycle> {
        all_vectors(self.field, self.ext_dim).iter().map(|c| self.cocycle(q, c)).collect()
    }
}

/// Every vector of `F_p^d`, in lexicographic order with the last coordinate fastest.
pub fn all_vectors(f: Field, d: usize) -> Vec<Vec<u32>> {
    let p = f.p();
    let total = (p as usize).pow(d as u32);
    (0..total)
        .map(|mut k| {
            let mut v = vec![0u32; d];
            for i in (0..d).rev() {
                v[i] = (k % p as usize) as u32;
                k /= p as usize;
            }
            v
        })
        .collect()
}

pub fn euler_form(q: &Quiver, d: &[usize], e: &[usize]) -> i64 {
    let mut s: i64 = d.iter().zip(e).map(|(&a, &b)| (a * b) as i64).sum();
    for &(a, b) in q.arrows() {
        s -= (d[a] * e[b]) as i64;
    }
    s
}

/// Middle term of the extension `0 → N → E → M → 0` given by `eps: M ⇢ N`.
pub fn middle_term(q: &Quiver, m: &Rep, n: &Rep, eps: &ExtCocycle) -> (Rep, RepMorphism, RepMorphism) {
    let f = m.field;
    let dims: Vec<usize> = m.dims.iter().zip(&n.dims).map(|(a, b)| a + b).collect();
    let maps = q
        .arrows()
        .iter()
        .enumerate()
        .map(|(a, &(s, t))| {
            let mut e = Mat::zeros(f, dims[t], dims[s]);
            e.paste(0, 0, &n.maps[a]);
            e.paste(0, n.dims[s], &eps.comps[a]);
            e.paste(n.dims[t], n.dims[s], &m.maps[a]);
            e
        })
        .collect();
    let e = Rep { field: f, dims, maps };
    let incl = RepMorphism {
        blocks: (0..q.n_vertices()).map(|i| Mat::identity(f, n.dims[i]).vstack(&Mat::zeros(f, m.dims[i], n.dims[i]))).collect(),
    };
    let proj = RepMorphism {
        blocks: (0..q.n_vertices()).map(|i| Mat::zeros(f, m.dims[i], n.dims[i]).hstack(&Mat::identity(f, m.dims[i]))).collect(),
    };
    (e, incl, proj)
}

/// Pushout along `g: N → N'`.
pub fn yoneda_push(q: &Quiver, g: &RepMorphism, eps: &ExtCocycle) -> ExtCocycle {
    ExtCocycle { comps: q.arrows().iter().enumerate().map(|(a, &(_, t))| g.blocks[t].mul(&eps.comps[a])).collect() }
}

/// Pullback along `h: M' → M`.
pub fn yoneda_pull(q: &Quiver, eps: &ExtCocycle, h: &RepMorphism) -> ExtCocycle {
    ExtCocycle { comps: q.arrows().iter().enumerate().map(|(a, &(s, _))| eps.comps[a].mul(&h.blocks[s])).collect() }
}

/// A subrepresentation given by one basis matrix (columns) per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubRep {
    pub bases: Vec<Mat>,
}

impl SubRep {
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Mat::cols).collect()
    }
    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(Mat::cols).sum()
    }
    pub fn whole(x: &Rep) -> SubRep {
        SubRep { bases: x.dims.iter().map(|&d| Mat::identity(x.field, d)).collect() }
    }
    pub fn zero(x: &Rep) -> SubRep {
        SubRep { bases: x.dims.iter().map(|&d| Mat::zeros(x.field, d, 0)).collect() }
    }
    /// Vertexwise reduced echelon form, so equal subspaces compare equal.
    pub fn canonical(&self) -> SubRep {
        SubRep { bases: self.bases.iter().map(canonical_basis).collect() }
    }
}

fn canonical_basis(b: &Mat) -> Mat {
    let (r, piv) = b.transpose().rref();
    r.submatrix(0..piv.len(), 0..b.rows()).transpose()
}

/// The subrepresentation spanned by `sub` together with its inclusion.
pub fn sub_rep(q: &Quiver, x: &Rep, sub: &SubRep) -> Result<(Rep, RepMorphism)> {
    let f = x.field;
    let dims = sub.dims();
    let mut maps = Vec::with_capacity(q.arrows().len());
    for (a, &(s, t)) in q.arrows().iter().enumerate() {
        let img = x.maps[a].mul(&sub.bases[s]);
        let m = sub.bases[t].solve_matrix(&img).ok_or_else(|| Error::Shape(format!("subspace not stable under arrow {a}")))?;
        maps.push(m);
    }
    let _ = f;
    let r = Rep { field: x.field, dims, maps };
    Ok((r, RepMorphism { blocks: sub.bases.clone() }))
}

/// `X / sub` together with the projection.
pub fn quotient_rep(q: &Quiver, x: &Rep, sub: &SubRep) -> Result<(Rep, RepMorphism)> {
    let f = x.field;
    let mut comps = Vec::new();
    let mut projs = Vec::new();
    for (i, b) in sub.bases.iter().enumerate() {
        let d = x.dims[i];
        let c = quotient_reps(&Mat::identity(f, d), b)?;
        let full = b.hstack(&c);
        let inv = full.solve_matrix(&Mat::identity(f, d)).ok_or_else(|| Error::Shape("dependent subspace basis".into()))?;
        projs.push(inv.submatrix(b.cols()..d, 0..d));
        comps.push(c);
    }
    let maps = q.arrows().iter().enumerate().map(|(a, &(s, t))| projs[t].mul(&x.maps[a]).mul(&comps[s])).collect();
    let dims = comps.iter().map(Mat::cols).collect();
    // stability check: the projection must intertwine
    let out = Rep { field: f, dims, maps };
    let pi = RepMorphism { blocks: projs };
    if !pi.is_intertwining(q, x, &out) {
        return Err(Error::Shape("quotient by a non-subrepresentation".into()));
    }
    Ok((out, pi))
}

pub fn kernel(q: &Quiver, src: &Rep, f: &RepMorphism) -> (Rep, RepMorphism) {
    let sub = SubRep { bases: f.blocks.iter().map(Mat::nullspace).collect() };
    sub_rep(q, src, &sub).expect("kernel is a subrepresentation")
}

/// Image as a subrepresentation of the target.
pub fn image(q: &Quiver, tgt: &Rep, f: &RepMorphism) -> (Rep, RepMorphism) {
    let sub = SubRep { bases: f.blocks.iter().map(Mat::column_basis).collect() };
    sub_rep(q, tgt, &sub).expect("image is a subrepresentation")
}

pub fn cokernel(q: &Quiver, tgt: &Rep, f: &RepMorphism) -> (Rep, RepMorphism) {
    let sub = SubRep { bases: f.blocks.iter().map(Mat::column_basis).collect() };
    quotient_rep(q, tgt, &sub).expect("image is a subrepresentation")
}

/// Every subspace of `F_p^k`, as column-basis matrices.
pub fn all_subspaces(f: Field, k: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    for r in 0..=k {
        for pivots in combinations(k, r) {
            // free entries: row i, column j > pivots[i], j not a pivot
            let free: Vec<(usize, usize)> =
                (0..r).flat_map(|i| ((pivots[i] + 1)..k).filter(|j| !pivots.contains(j)).map(move |j| (i, j))).collect();
            for vals in all_vectors(f, free.len()) {
                let mut m = Mat::zeros(f, k, r);
                for (i, &pc) in pivots.iter().enumerate() {
                    m.set(pc, i, 1);
                }
                for (&(i, j), &v) in free.iter().zip(&vals) {
                    m.set(j, i, v);
                }
                out.push(m);
            }
        }
    }
    out
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    go(0, n, r, &mut cur, &mut out);
    out
}

/// All subrepresentations of `x`, found by choosing vertex subspaces in topological order.
pub fn submodules(q: &Quiver, x: &Rep, max_total_dim: usize) -> Result<Vec<SubRep>> {
    if x.total_dim() > max_total_dim {
        return Err(Error::SearchSpace(format!(
            "submodule enumeration of a {}-dimensional representation exceeds the bound {}",
            x.total_dim(),
            max_total_dim
        )));
    }
    let f = x.field;
    let n = q.n_vertices();
    let mut out = Vec::new();
    let mut chosen: Vec<Option<Mat>> = vec![None; n];
    fn go(q: &Quiver, x: &Rep, f: Field, pos: usize, chosen: &mut Vec<Option<Mat>>, out: &mut Vec<SubRep>) {
        let order = q.topo_order();
        if pos == order.len() {
            out.push(SubRep { bases: chosen.iter().map(|b| b.clone().expect("all vertices chosen")).collect() });
            return;
        }
        let u = order[pos];
        let d = x.dims[u];
        let mut required = Mat::zeros(f, d, 0);
        for (a, &(s, t)) in q.arrows().iter().enumerate() {
            if t == u {
                let b = chosen[s].as_ref().expect("sources come first");
                required = required.hstack(&x.maps[a].mul(b));
            }
        }
        let req = required.column_basis();
        let comp = quotient_reps(&Mat::identity(f, d), &req).expect("subspace of ambient");
        for qs in all_subspaces(f, comp.cols()) {
            chosen[u] = Some(req.hstack(&comp.mul(&qs)));
            go(q, x, f, pos + 1, chosen, out);
        }
        chosen[u] = None;
    }
    go(q, x, f, 0, &mut chosen, &mut out);
    Ok(out)
}

/// Sum of images of all morphisms from the generators.
pub fn trace(q: &Quiver, gens: &[Rep], x: &Rep) -> Result<SubRep> {
    let f = x.field;
    let mut spans: Vec<Mat> = x.dims.iter().map(|&d| Mat::zeros(f, d, 0)).collect();
    for g in gens {
        for h in hom_ext(q, g, x)?.hom_basis {
            for (i, b) in h.blocks.iter().enumerate() {
                spans[i] = spans[i].hstack(b);
            }
        }
    }
    Ok(SubRep { bases: spans.iter().map(Mat::column_basis).collect() })
}

/// Intersection of kernels of all morphisms to the cogenerators.
pub fn reject(q: &Quiver, cogens: &[Rep], x: &Rep) -> Result<SubRep> {
    let f = x.field;
    let mut stacks: Vec<Mat> = x.dims.iter().map(|&d| Mat::zeros(f, 0, d)).collect();
    for c in cogens {
        for h in hom_ext(q, x, c)?.hom_basis {
            for (i, b) in h.blocks.iter().enumerate() {
                stacks[i] = stacks[i].vstack(b);
            }
        }
    }
    Ok(SubRep { bases: stacks.iter().map(Mat::nullspace).collect() })
}

const EXHAUSTIVE_LIMIT: usize = 4096;
const RANDOM_TRIALS: usize = 4000;

/// Linear combinations of `basis` to try: all of them when few, otherwise a seeded sample.
fn candidate_combinations(f: Field, d: usize, seed: u64) -> Vec<Vec<u32>> {
    let exhaustive = (f.p() as f64).powi(d as i32) <= EXHAUSTIVE_LIMIT as f64;
    if exhaustive {
        return all_vectors(f, d).into_iter().skip(1).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<u32>> = (0..d)
        .map(|i| {
            let mut v = vec![0; d];
            v[i] = 1;
            v
        })
        .collect();
    for _ in 0..RANDOM_TRIALS {
        out.push((0..d).map(|_| rng.gen_range(0..f.p())).collect());
    }
    out
}

fn combine(f: Field, basis: &[RepMorphism], coeffs: &[u32], template: &RepMorphism) -> RepMorphism {
    let mut acc = RepMorphism { blocks: template.blocks.iter().map(|b| Mat::zeros(f, b.rows(), b.cols())).collect() };
    for (h, &c) in basis.iter().zip(coeffs) {
        if c != 0 {
            acc = acc.add(&h.scale(c));
        }
    }
    acc
}

/// Splits `x` into indecomposable summands using Fitting's lemma: a non-nilpotent,
/// non-invertible endomorphism `φ` gives `x = ker φ^N ⊕ im φ^N`.
///
/// Endomorphism rings of dimension up to `log_p 4096` are searched exhaustively; larger ones
/// are sampled with a fixed seed, which could in principle miss a splitting idempotent.
pub fn split_indecomposables(q: &Quiver, x: &Rep) -> Result<Vec<Rep>> {
    if x.is_zero() {
        return Ok(Vec::new());
    }
    let f = x.field;
    let end = hom_ext(q, x, x)?.hom_basis;
    if end.len() > 1 {
        let n = x.total_dim();
        for c in candidate_combinations(f, end.len(), x.total_dim() as u64) {
            let phi = combine(f, &end, &c, &end[0]);
            let pw = phi.power(n);
            if pw.is_zero() || pw.is_iso() {
                continue;
            }
            let (k, _) = kernel(q, x, &pw);
            let (i, _) = image(q, x, &pw);
            let mut out = split_indecomposables(q, &k)?;
            out.extend(split_indecomposables(q, &i)?);
            return Ok(out);
        }
    }
    Ok(vec![x.clone()])
}

/// Whether two representations are isomorphic (searching `Hom(x,y)` for an invertible element).
pub fn isomorphic(q: &Quiver, x: &Rep, y: &Rep) -> Result<bool> {
    if x.dims != y.dims {
        return Ok(false);
    }
    if x.is_zero() {
        return Ok(true);
    }
    let f = x.field;
    let h = hom_ext(q, x, y)?.hom_basis;
    if h.is_empty() {
        return Ok(false);
    }
    for c in candidate_combinations(f, h.len(), 17) {
        if combine(f, &h, &c, &h[0]).is_iso() {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Quiver {
        Quiver::linear_a(2).unwrap()
    }

    fn p1(q: &Quiver) -> Rep {
        Rep::projective(q, Field::F2, 0)
    }

    #[test]
    fn a2_hom_ext_examples() {
        let q = a2();
        let f = Field::F2;
        let s1 = Rep::simple(&q, f, 0);
        let s2 = Rep::simple(&q, f, 1);
        let he = hom_ext(&q, &s1, &s2).unwrap();
        assert_eq!((he.hom_dim(), he.ext_dim), (0, 1));
        let he = hom_ext(&q, &p1(&q), &p1(&q)).unwrap();
        assert_eq!((he.hom_dim(), he.ext_dim), (1, 0));
        let z = Rep::zero(&q, f);
        let he = hom_ext(&q, &s1, &z).unwrap();
        assert_eq!((he.hom_dim(), he.ext_dim), (0, 0));
    }

    #[test]
    fn projective_and_injective_shapes() {
        let q = a2();
        let f = Field::F2;
        assert_eq!(Rep::projective(&q, f, 0).dims(), &[1, 1]);
        assert_eq!(Rep::projective(&q, f, 1).dims(), &[0, 1]);
        assert_eq!(Rep::injective(&q, f, 0).dims(), &[1, 0]);
        assert_eq!(Rep::injective(&q, f, 1).dims(), &[1, 1]);
        assert!(isomorphic(&q, &Rep::injective(&q, f, 1), &p1(&q)).unwrap());
    }

    #[test]
    fn nonsplit_extension_is_p1() {
        let q = a2();
        let f = Field::F2;
        let s1 = Rep::simple(&q, f, 0);
        let s2 = Rep::simple(&q, f, 1);
        let he = hom_ext(&q, &s1, &s2).unwrap();
        let eps = &he.ext_basis(&q)[0];
        let (e, incl, proj) = middle_term(&q, &s1, &s2, eps);
        assert!(isomorphic(&q, &e, &p1(&q)).unwrap());
        assert!(incl.is_intertwining(&q, &s2, &e));
        assert!(proj.is_intertwining(&q, &e, &s1));
        assert_eq!(he.class_coords(eps), vec![1]);
        let zero = ExtCocycle::zero(&q, &s1, &s2);
        let (split, _, _) = middle_term(&q, &s1, &s2, &zero);
        assert_eq!(split_indecomposables(&q, &split).unwrap().len(), 2);
    }

    #[test]
    fn push_along_zero_and_identity() {
        let q = a2();
        let f = Field::F2;
        let s1 = Rep::simple(&q, f, 0);
        let s2 = Rep::simple(&q, f, 1);
        let he = hom_ext(&q, &s1, &s2).unwrap();
        let eps = he.ext_basis(&q)[0].clone();
        assert_eq!(yoneda_push(&q, &RepMorphism::identity(&s2), &eps), eps);
        let g = RepMorphism::zero(&s2, &s1);
        assert!(yoneda_push(&q, &g, &eps).is_zero());
        assert!(hom_ext(&q, &s2, &s1).unwrap().hom_basis.is_empty());
    }

    #[test]
    fn kernel_of_epi_p1_s1() {
        let q = a2();
        let f = Field::F2;
        let s1 = Rep::simple(&q, f, 0);
        let p = p1(&q);
        let epi = hom_ext(&q, &p, &s1).unwrap().hom_basis[0].clone();
        let (k, _) = kernel(&q, &p, &epi);
        assert_eq!(k.dims(), &[0, 1]);
        let (c, _) = cokernel(&q, &s1, &epi);
        assert!(c.is_zero());
        let id = RepMorphism::identity(&p);
        assert!(kernel(&q, &p, &id).0.is_zero());
        let (im, _) = image(&q, &p, &RepMorphism::zero(&p, &p));
        assert!(im.is_zero());
    }

    #[test]
    fn submodule_examples() {
        let q = a2();
        let f = Field::F2;
        assert_eq!(submodules(&q, &Rep::simple(&q, f, 0), 8).unwrap().len(), 2);
        let subs = submodules(&q, &p1(&q), 8).unwrap();
        let dims: Vec<Vec<usize>> = subs.iter().map(SubRep::dims).collect();
        assert_eq!(subs.len(), 3);
        assert!(dims.contains(&vec![0, 1]) && dims.contains(&vec![0, 0]) && dims.contains(&vec![1, 1]));
        assert_eq!(submodules(&q, &Rep::zero(&q, f), 8).unwrap().len(), 1);
        let big = Rep::direct_sum_all(&q, f, &vec![p1(&q); 5]);
        assert!(matches!(submodules(&q, &big, 8), Err(Error::SearchSpace(_))));
    }

    #[test]
    fn trace_reject_examples() {
        let q = a2();
        let f = Field::F2;
        let s1 = Rep::simple(&q, f, 0);
        let s2 = Rep::simple(&q, f, 1);
        let p = p1(&q);
        assert_eq!(trace(&q, &[s1.clone()], &p).unwrap().total_dim(), 0);
        assert_eq!(trace(&q, &[p.clone()], &s1).unwrap().total_dim(), 1);
        assert_eq!(reject(&q, &[s2.clone()], &s1).unwrap().total_dim(), 1);
    }

    #[test]
    fn subspace_counts_f2() {
        // Gaussian binomials: F_2^3 has 1 + 7 + 7 + 1 subspaces
        assert_eq!(all_subspaces(Field::F2, 3).len(), 16);
        assert_eq!(all_subspaces(Field::new(3).unwrap(), 2).len(), 1 + 4 + 1);
    }

    #[test]
    fn euler_form_examples() {
        let q = a2();
        assert_eq!(euler_form(&q, &[1, 0], &[0, 1]), -1);
        assert_eq!(euler_form(&q, &[1, 1], &[1, 1]), 1);
        assert_eq!(euler_form(&q, &[3, 2], &[0, 0]), 0);
    }
}
