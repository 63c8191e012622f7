//! Catalog of indecomposable representations of a Dynkin quiver, built by an extension sweep.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldlin::Field;
use crate::quiver::Quiver;
use crate::rep::{hom_ext, hom_ext_dims, isomorphic, middle_term, split_indecomposables, Rep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogBounds {
    pub max_indecs: usize,
    pub max_total_dim: usize,
}

impl Default for CatalogBounds {
    fn default() -> Self {
        CatalogBounds { max_indecs: 128, max_total_dim: 40 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndecCatalog {
    pub(crate) quiver: Quiver,
    pub(crate) field: Field,
    pub(crate) indecs: Vec<Rep>,
    pub(crate) hom_table: Vec<Vec<usize>>,
    pub(crate) ext_table: Vec<Vec<usize>>,
    pub(crate) proj_index: Vec<usize>,
    pub(crate) inj_index: Vec<usize>,
    pub(crate) simple_index: Vec<usize>,
}

const ROOT_LIMIT: usize = 200;
const ROOT_COORD_LIMIT: i64 = 12;

/// Positive roots of a simply-laced Dynkin diagram by reflection closure of the simple roots.
pub fn positive_roots(q: &Quiver) -> Result<Vec<Vec<usize>>> {
    let n = q.n_vertices();
    let simple = |i: usize| -> Vec<i64> {
        let mut e = vec![0; n];
        e[i] = 1;
        e
    };
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut frontier: Vec<Vec<i64>> = (0..n).map(simple).collect();
    seen.extend(frontier.iter().cloned());
    while let Some(x) = frontier.pop() {
        for i in 0..n {
            let c = q.symmetric_form(&x, &simple(i));
            let mut y = x.clone();
            y[i] -= c;
            if y.iter().all(|&v| v >= 0) && y.iter().any(|&v| v > 0) && !seen.contains(&y) {
                if y.iter().any(|&v| v > ROOT_COORD_LIMIT) || seen.len() >= ROOT_LIMIT {
                    return Err(Error::NotRepFinite("the underlying graph is not of Dynkin type".into()));
                }
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    // a Dynkin form is positive definite, so every root has (x,x) = 2
    if seen.iter().any(|x| q.symmetric_form(x, x) != 2) {
        return Err(Error::NotRepFinite("the underlying graph is not of Dynkin type".into()));
    }
    Ok(seen.into_iter().map(|x| x.into_iter().map(|v| v as usize).collect()).collect())
}

impl IndecCatalog {
    pub fn build(q: &Quiver, field: Field, bounds: CatalogBounds) -> Result<Self> {
        let roots = positive_roots(q);
        let mut found: Vec<Rep> = (0..q.n_vertices()).map(|v| Rep::simple(q, field, v)).collect();
        let mut done: HashSet<(usize, usize)> = HashSet::new();
        loop {
            let mut added = false;
            let k = found.len();
            for i in 0..k {
                for j in 0..k {
                    if !done.insert((i, j)) {
                        continue;
                    }
                    let (x, y) = (found[i].clone(), found[j].clone());
                    let he = hom_ext(q, &x, &y)?;
                    for eps in he.all_classes(q).iter().skip(1) {
                        let (e, _, _) = middle_term(q, &x, &y, eps);
                        for summand in split_indecomposables(q, &e)? {
                            if !contains_iso(q, &found, &summand)? {
                                if summand.total_dim() > bounds.max_total_dim || found.len() >= bounds.max_indecs {
                                    return Err(Error::NotRepFinite(format!(
                                        "more than {} indecomposables or dimension above {}",
                                        bounds.max_indecs, bounds.max_total_dim
                                    )));
                                }
                                found.push(summand);
                                added = true;
                            }
                        }
                    }
                }
            }
            if !added && done.len() == found.len() * found.len() {
                break;
            }
        }
        let roots = roots?;
        let mut dimvecs: Vec<Vec<usize>> = found.iter().map(|r| r.dims().to_vec()).collect();
        dimvecs.sort();
        if dimvecs != roots {
            return Err(Error::Violation(format!(
                "extension sweep found {} indecomposables but the quiver has {} positive roots",
                found.len(),
                roots.len()
            )));
        }
        Self::from_indecs(q, field, found)
    }

    /// Orders `indecs` by the directed Hom relation and fills the tables.
    pub(crate) fn from_indecs(q: &Quiver, field: Field, indecs: Vec<Rep>) -> Result<Self> {
        let k = indecs.len();
        let dims: Vec<Vec<(usize, usize)>> =
            (0..k).map(|i| (0..k).map(|j| hom_ext_dims(q, &indecs[i], &indecs[j])).collect()).collect();
        // Kahn's algorithm on the nonzero-Hom relation, ties by dimension vector
        let mut indeg = vec![0usize; k];
        for i in 0..k {
            for j in 0..k {
                if i != j && dims[i][j].0 != 0 {
                    indeg[j] += 1;
                }
            }
        }
        let mut ready: BTreeSet<(Vec<usize>, usize)> =
            (0..k).filter(|&i| indeg[i] == 0).map(|i| (indecs[i].dims().to_vec(), i)).collect();
        let mut order = Vec::with_capacity(k);
        while let Some((_, i)) = ready.pop_first() {
            order.push(i);
            for j in 0..k {
                if i != j && dims[i][j].0 != 0 {
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        ready.insert((indecs[j].dims().to_vec(), j));
                    }
                }
            }
        }
        if order.len() != k {
            return Err(Error::Violation("Hom relation among indecomposables has a cycle".into()));
        }
        let sorted: Vec<Rep> = order.iter().map(|&i| indecs[i].clone()).collect();
        let hom_table = order.iter().map(|&i| order.iter().map(|&j| dims[i][j].0).collect()).collect();
        let ext_table = order.iter().map(|&i| order.iter().map(|&j| dims[i][j].1).collect()).collect();
        let locate = |r: Rep| -> Result<usize> {
            for (i, x) in sorted.iter().enumerate() {
                if isomorphic(q, x, &r)? {
                    return Ok(i);
                }
            }
            Err(Error::Violation(format!("representation with dimension vector {:?} missing from catalog", r.dims())))
        };
        let n = q.n_vertices();
        let proj_index = (0..n).map(|v| locate(Rep::projective(q, field, v))).collect::<Result<Vec<_>>>()?;
        let inj_index = (0..n).map(|v| locate(Rep::injective(q, field, v))).collect::<Result<Vec<_>>>()?;
        let simple_index = (0..n).map(|v| locate(Rep::simple(q, field, v))).collect::<Result<Vec<_>>>()?;
        Ok(IndecCatalog { quiver: q.clone(), field, indecs: sorted, hom_table, ext_table, proj_index, inj_index, simple_index })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn len(&self) -> usize {
        self.indecs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.indecs.is_empty()
    }
    pub fn indec(&self, i: usize) -> &Rep {
        &self.indecs[i]
    }
    pub fn indecs(&self) -> &[Rep] {
        &self.indecs
    }
    pub fn hom(&self, i: usize, j: usize) -> usize {
        self.hom_table[i][j]
    }
    pub fn ext(&self, i: usize, j: usize) -> usize {
        self.ext_table[i][j]
    }
    pub fn proj_index(&self) -> &[usize] {
        &self.proj_index
    }
    pub fn inj_index(&self) -> &[usize] {
        &self.inj_index
    }
    pub fn simple_index(&self) -> &[usize] {
        &self.simple_index
    }

    pub fn projective(&self, v: usize) -> Result<&Rep> {
        self.proj_index.get(v).map(|&i| &self.indecs[i]).ok_or_else(|| Error::Config(format!("vertex {} out of range", v + 1)))
    }
    pub fn injective(&self, v: usize) -> Result<&Rep> {
        self.inj_index.get(v).map(|&i| &self.indecs[i]).ok_or_else(|| Error::Config(format!("vertex {} out of range", v + 1)))
    }
    pub fn simple(&self, v: usize) -> Result<&Rep> {
        self.simple_index.get(v).map(|&i| &self.indecs[i]).ok_or_else(|| Error::Config(format!("vertex {} out of range", v + 1)))
    }

    /// Catalog index of `I_v` for the catalog index of `P_v`.
    pub fn nakayama(&self, proj: usize) -> Result<usize> {
        let v = self
            .proj_index
            .iter()
            .position(|&i| i == proj)
            .ok_or_else(|| Error::Config(format!("catalog entry {proj} is not an indecomposable projective")))?;
        Ok(self.inj_index[v])
    }

    /// Short human-readable name: `S2`, `P1`, `I3`, or the dimension vector.
    pub fn label(&self, i: usize) -> String {
        let v1 = |pos: usize| pos + 1;
        if let Some(v) = self.simple_index.iter().position(|&x| x == i) {
            return format!("S{}", v1(v));
        }
        if let Some(v) = self.proj_index.iter().position(|&x| x == i) {
            return format!("P{}", v1(v));
        }
        if let Some(v) = self.inj_index.iter().position(|&x| x == i) {
            return format!("I{}", v1(v));
        }
        let d: Vec<String> = self.indecs[i].dims().iter().map(|x| x.to_string()).collect();
        format!("M{}", d.join(""))
    }

    /// Multiplicities of catalog indecomposables in `x`, from the unitriangular Hom matrix:
    /// `dim Hom(x, M_b) = Σ_a m_a dim Hom(M_a, M_b)`.
    pub fn decompose(&self, x: &Rep) -> Result<Vec<usize>> {
        let q = &self.quiver;
        let k = self.len();
        let h: Vec<i64> = self.indecs.iter().map(|m| hom_ext_dims(q, x, m).0 as i64).collect();
        let mut m = vec![0i64; k];
        for b in 0..k {
            let mut v = h[b];
            for a in 0..b {
                v -= m[a] * self.hom_table[a][b] as i64;
            }
            if v < 0 {
                return Err(Error::Decompose(format!("negative multiplicity for {}", self.label(b))));
            }
            m[b] = v;
        }
        let mut total = vec![0usize; q.n_vertices()];
        for (a, &ma) in m.iter().enumerate() {
            for (t, d) in total.iter_mut().zip(self.indecs[a].dims()) {
                *t += ma as usize * d;
            }
        }
        if total != x.dims() {
            return Err(Error::Decompose(format!("multiplicities give dimension {:?}, expected {:?}", total, x.dims())));
        }
        Ok(m.into_iter().map(|v| v as usize).collect())
    }

    /// Like [`decompose`](Self::decompose) but returns the sorted list of summand indices with repetition.
    pub fn summands(&self, x: &Rep) -> Result<Vec<usize>> {
        let m = self.decompose(x)?;
        Ok(m.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat(i).take(c)).collect())
    }
}

fn contains_iso(q: &Quiver, found: &[Rep], x: &Rep) -> Result<bool> {
    for y in found {
        if y.dims() == x.dims() && isomorphic(q, y, x)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{hom_ext, middle_term};

    fn cat(name: &str) -> IndecCatalog {
        IndecCatalog::build(&Quiver::preset(name).unwrap(), Field::F2, CatalogBounds::default()).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(cat("A1").len(), 1);
        assert_eq!(cat("A2").len(), 3);
        for name in ["A3", "A3b", "A3c"] {
            assert_eq!(cat(name).len(), 6);
        }
        assert_eq!(cat("D4").len(), 12);
    }

    #[test]
    fn a2_order_and_indices() {
        let c = cat("A2");
        let dims: Vec<&[usize]> = c.indecs().iter().map(|r| r.dims()).collect();
        assert_eq!(dims, vec![&[0, 1][..], &[1, 1], &[1, 0]]);
        assert_eq!(c.proj_index(), &[1, 0]);
        assert_eq!(c.inj_index(), &[2, 1]);
        assert_eq!(c.nakayama(1).unwrap(), 2);
        assert_eq!(c.nakayama(0).unwrap(), 1);
        assert!(c.nakayama(2).is_err());
        assert_eq!(c.label(0), "S2");
        assert_eq!(c.label(1), "P1");
        assert_eq!(c.label(2), "S1");
    }

    #[test]
    fn a1_everything_coincides() {
        let c = cat("A1");
        assert_eq!(c.proj_index(), c.inj_index());
        assert_eq!(c.proj_index(), c.simple_index());
    }

    #[test]
    fn roots() {
        assert_eq!(positive_roots(&Quiver::linear_a(2).unwrap()).unwrap(), vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(positive_roots(&Quiver::linear_a(1).unwrap()).unwrap().len(), 1);
        assert_eq!(positive_roots(&Quiver::linear_a(3).unwrap()).unwrap().len(), 6);
        assert_eq!(positive_roots(&Quiver::preset("E6").unwrap()).unwrap().len(), 36);
        // Kronecker quiver and the affine D4 star are not Dynkin
        assert!(positive_roots(&Quiver::new(2, vec![(0, 1), (0, 1)]).unwrap()).is_err());
        let d4_affine = Quiver::new(5, vec![(0, 4), (1, 4), (2, 4), (3, 4)]).unwrap();
        assert!(positive_roots(&d4_affine).is_err());
    }

    #[test]
    fn non_dynkin_aborts() {
        let kronecker = Quiver::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let bounds = CatalogBounds { max_indecs: 12, max_total_dim: 10 };
        assert!(matches!(IndecCatalog::build(&kronecker, Field::F2, bounds), Err(Error::NotRepFinite(_))));
    }

    #[test]
    fn decompose_examples() {
        let c = cat("A2");
        let q = c.quiver().clone();
        let s1 = c.indec(2).clone();
        let p1 = c.indec(1).clone();
        assert_eq!(c.decompose(&s1.direct_sum(&q, &p1)).unwrap(), vec![0, 1, 1]);
        let s2 = c.indec(0).clone();
        let he = hom_ext(&q, &s1, &s2).unwrap();
        let (e, _, _) = middle_term(&q, &s1, &s2, &he.ext_basis(&q)[0]);
        assert_eq!(c.decompose(&e).unwrap(), vec![0, 1, 0]);
        assert_eq!(c.decompose(&Rep::zero(&q, Field::F2)).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn directed_and_brick() {
        for name in ["A3", "A4", "D4"] {
            let c = cat(name);
            for i in 0..c.len() {
                assert_eq!(c.hom(i, i), 1);
                for j in 0..i {
                    assert_eq!(c.hom(i, j), 0, "{name}: Hom({i},{j}) nonzero against the order");
                }
            }
        }
    }

    #[test]
    fn field_three_matches_f2() {
        let q = Quiver::preset("D4").unwrap();
        let c3 = IndecCatalog::build(&q, Field::new(3).unwrap(), CatalogBounds::default()).unwrap();
        let c2 = cat("D4");
        assert_eq!(c3.hom_table, c2.hom_table);
        assert_eq!(c3.ext_table, c2.ext_table);
    }
}
