//! Binary matroids over labeled ground sets.

use std::collections::HashMap;
use std::fmt;

use crate::gf2::{Gf2Matrix, Gf2Vector, XorBasis};
use crate::rational::Rational;

pub const DEFAULT_ENUMERATION_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatroidError {
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("element index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("element `{0}` is both deleted and contracted")]
    Overlap(String),
    #[error("contraction set is dependent")]
    DependentContraction,
    #[error("ground set has {size} elements, above the enumeration cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
}

/// A subset of a ground set with at most 64 elements, as a bit mask over
/// element indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        ElementSet(it.into_iter().fold(0u64, |m, i| {
            assert!(i < 64, "element index {i} does not fit an ElementSet");
            m | 1 << i
        }))
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= 64);
        if n == 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn insert(self, i: usize) -> Self {
        ElementSet(self.0 | 1 << i)
    }

    pub fn remove(self, i: usize) -> Self {
        ElementSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        ElementSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        ElementSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        ElementSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A matroid given by one GF(2) column per ground-set element.
#[derive(Clone)]
pub struct BinaryMatroid {
    labels: Vec<String>,
    num_rows: usize,
    columns: Vec<Gf2Vector>,
    index: HashMap<String, usize>,
}

impl fmt::Debug for BinaryMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BinaryMatroid")
            .field("labels", &self.labels)
            .field("rank", &self.rank())
            .finish()
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("e{i}")).collect()
}

impl BinaryMatroid {
    /// The matroid of `A`: element `i` is column `i` of `(I | A)`.
    pub fn from_matrix(a: &Gf2Matrix, labels: Option<Vec<String>>) -> Result<Self, MatroidError> {
        let ext = a.identity_extension();
        let n = ext.num_cols();
        let labels = labels.unwrap_or_else(|| default_labels(n));
        let columns = (0..n).map(|c| ext.column(c)).collect();
        Self::from_columns(a.num_rows(), columns, labels)
    }

    pub fn from_columns(num_rows: usize, columns: Vec<Gf2Vector>, labels: Vec<String>) -> Result<Self, MatroidError> {
        if labels.len() != columns.len() {
            return Err(MatroidError::LabelCount { expected: columns.len(), got: labels.len() });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(MatroidError::DuplicateLabel(l.clone()));
            }
        }
        debug_assert!(columns.iter().all(|c| c.len() == num_rows));
        Ok(Self { labels, num_rows, columns, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn column(&self, i: usize) -> &Gf2Vector {
        &self.columns[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, MatroidError> {
        self.index.get(label).copied().ok_or_else(|| MatroidError::UnknownLabel(label.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, MatroidError> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    fn check_indices(&self, set: &[usize]) -> Result<(), MatroidError> {
        match set.iter().find(|&&i| i >= self.len()) {
            Some(&i) => Err(MatroidError::IndexOutOfRange(i)),
            None => Ok(()),
        }
    }

    /// Whether the elements at `set` have independent columns. Repeated
    /// indices count as a dependency.
    pub fn is_independent(&self, set: &[usize]) -> Result<bool, MatroidError> {
        self.check_indices(set)?;
        let mut basis = XorBasis::new();
        Ok(set.iter().all(|&i| basis.insert(&self.columns[i])))
    }

    pub fn is_independent_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<bool, MatroidError> {
        self.is_independent(&self.indices_of(labels)?)
    }

    pub fn is_independent_set(&self, set: ElementSet) -> bool {
        let mut basis = XorBasis::new();
        set.iter().all(|i| basis.insert(&self.columns[i]))
    }

    pub fn rank_of(&self, set: &[usize]) -> Result<usize, MatroidError> {
        self.check_indices(set)?;
        let mut basis = XorBasis::new();
        for &i in set {
            basis.insert(&self.columns[i]);
        }
        Ok(basis.rank())
    }

    pub fn rank_of_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize, MatroidError> {
        self.rank_of(&self.indices_of(labels)?)
    }

    pub fn rank_of_set(&self, set: ElementSet) -> usize {
        let mut basis = XorBasis::new();
        for i in set.iter() {
            basis.insert(&self.columns[i]);
        }
        basis.rank()
    }

    pub fn rank(&self) -> usize {
        let all: Vec<usize> = (0..self.len()).collect();
        self.rank_of(&all).expect("indices in range")
    }

    /// A standard representation `(I | A)` after reordering elements so that
    /// the greedy (element-order) basis comes first. Returns `A` together
    /// with the reordered labels.
    pub fn standard_form(&self) -> (Gf2Matrix, Vec<String>) {
        let mut basis = XorBasis::new();
        let mut basic = Vec::new();
        let mut nonbasic = Vec::new();
        for i in 0..self.len() {
            if basis.insert(&self.columns[i]) {
                basic.push(i);
            } else {
                nonbasic.push(i);
            }
        }
        let p = basic.len();
        // Express every non-basic column in terms of the basic columns by
        // eliminating on the augmented system [B | N].
        let mut rows: Vec<Gf2Vector> = (0..self.num_rows)
            .map(|r| {
                let bits: Vec<bool> = basic.iter().chain(&nonbasic).map(|&i| self.columns[i].get(r)).collect();
                Gf2Vector::from_bits(&bits)
            })
            .collect();
        let mut pivot_row = 0;
        for col in 0..p {
            let found = (pivot_row..rows.len()).find(|&r| rows[r].get(col)).expect("basic columns are independent");
            rows.swap(pivot_row, found);
            let pr = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot_row && row.get(col) {
                    row.xor_assign(&pr);
                }
            }
            pivot_row += 1;
        }
        let mut a = Gf2Matrix::zeros(p, nonbasic.len());
        for r in 0..p {
            for j in 0..nonbasic.len() {
                a.set(r, j, rows[r].get(p + j));
            }
        }
        let labels = basic.iter().chain(&nonbasic).map(|&i| self.labels[i].clone()).collect();
        (a, labels)
    }

    /// The dual matroid. If this matroid is `M(A)` with elements in
    /// identity-first order, the dual is `M(A^T)` whose identity block carries
    /// the labels of the non-identity columns of `A`, and vice versa.
    pub fn dual(&self) -> BinaryMatroid {
        let (a, labels) = self.standard_form();
        let p = a.num_rows();
        let dual_labels = labels[p..].iter().chain(&labels[..p]).cloned().collect();
        BinaryMatroid::from_matrix(&a.transpose(), Some(dual_labels)).expect("labels are distinct")
    }

    /// `M \ deletions / contractions`, by pivoting each contracted element to a
    /// unit column and dropping its row.
    pub fn minor(&self, deletions: &[usize], contractions: &[usize]) -> Result<BinaryMatroid, MatroidError> {
        self.check_indices(deletions)?;
        self.check_indices(contractions)?;
        if let Some(&x) = deletions.iter().find(|d| contractions.contains(d)) {
            return Err(MatroidError::Overlap(self.labels[x].clone()));
        }
        if !self.is_independent(contractions)? {
            return Err(MatroidError::DependentContraction);
        }
        // Work row-wise: rows[r] holds bit r of every column.
        let n = self.len();
        let mut rows: Vec<Gf2Vector> = (0..self.num_rows)
            .map(|r| Gf2Vector::from_bits(&(0..n).map(|i| self.columns[i].get(r)).collect::<Vec<_>>()))
            .collect();
        let mut alive = vec![true; self.num_rows];
        for &c in contractions {
            let pivot = (0..rows.len()).find(|&r| alive[r] && rows[r].get(c)).expect("contracted column is nonzero");
            let pr = rows[pivot].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot && alive[r] && row.get(c) {
                    row.xor_assign(&pr);
                }
            }
            alive[pivot] = false;
        }
        let live_rows: Vec<usize> = (0..rows.len()).filter(|&r| alive[r]).collect();
        let keep: Vec<usize> = (0..n).filter(|i| !deletions.contains(i) && !contractions.contains(i)).collect();
        let columns = keep
            .iter()
            .map(|&i| Gf2Vector::from_bits(&live_rows.iter().map(|&r| rows[r].get(i)).collect::<Vec<_>>()))
            .collect();
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        BinaryMatroid::from_columns(live_rows.len(), columns, labels)
    }

    /// Maximizes `sum_{e in I} c_e` over independent `I`. Elements are taken
    /// in decreasing weight (ties by element order); non-positive weights are
    /// never taken.
    pub fn greedy_max(&self, weights: &[Rational]) -> (Vec<usize>, Rational) {
        assert_eq!(weights.len(), self.len(), "one weight per element");
        let mut order: Vec<usize> = (0..self.len()).filter(|&i| weights[i].is_positive()).collect();
        order.sort_by(|&i, &j| weights[j].cmp(&weights[i]).then(i.cmp(&j)));
        let mut basis = XorBasis::new();
        let mut chosen = Vec::new();
        let mut value = Rational::zero();
        for i in order {
            if basis.insert(&self.columns[i]) {
                value += &weights[i];
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        (chosen, value)
    }

    /// All independent sets in lexicographic order of characteristic vectors
    /// (first element most significant). Supersets of dependent sets are
    /// never visited.
    pub fn enumerate_independent_sets(&self, cap: usize) -> Result<Vec<ElementSet>, MatroidError> {
        if self.len() > cap.min(64) {
            return Err(MatroidError::CapExceeded { size: self.len(), cap: cap.min(64) });
        }
        let mut out = Vec::new();
        self.enumerate_from(0, ElementSet::EMPTY, &XorBasis::new(), &mut out);
        Ok(out)
    }

    fn enumerate_from(&self, i: usize, set: ElementSet, basis: &XorBasis, out: &mut Vec<ElementSet>) {
        if i == self.len() {
            out.push(set);
            return;
        }
        self.enumerate_from(i + 1, set, basis, out);
        let mut extended = basis.clone();
        if extended.insert(&self.columns[i]) {
            self.enumerate_from(i + 1, set.insert(i), &extended, out);
        }
    }

    /// Same matroid with every label prefixed.
    pub fn with_prefix(&self, prefix: &str) -> BinaryMatroid {
        let labels = self.labels.iter().map(|l| format!("{prefix}{l}")).collect();
        BinaryMatroid::from_columns(self.num_rows, self.columns.clone(), labels).expect("prefixing keeps labels distinct")
    }

    pub fn set_labels(&self, set: ElementSet) -> Vec<&str> {
        set.iter().map(|i| self.labels[i].as_str()).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn mat(cols: usize, rows: &[&str]) -> Gf2Matrix {
        Gf2Matrix::from_strs(cols, rows).unwrap()
    }

    /// Graphic matroid of the triangle: two tree edges, one chord.
    pub(crate) fn k3() -> BinaryMatroid {
        BinaryMatroid::from_matrix(&mat(1, &["1", "1"]), None).unwrap()
    }

    pub(crate) fn random_matroid(rng: &mut ChaCha8Rng, max_elems: usize) -> BinaryMatroid {
        let p = rng.gen_range(0..=max_elems.min(5));
        let q = rng.gen_range(usize::from(p == 0)..=(max_elems - p));
        let mut a = Gf2Matrix::zeros(p, q);
        for r in 0..p {
            for c in 0..q {
                a.set(r, c, rng.gen_bool(0.5));
            }
        }
        BinaryMatroid::from_matrix(&a, None).unwrap()
    }

    /// Rank by exhaustive search over subsets, independent of elimination order.
    fn brute_rank(m: &BinaryMatroid, set: ElementSet) -> usize {
        let idx = set.indices();
        (0u64..1 << idx.len())
            .filter_map(|sub| {
                let s = ElementSet::from_indices(idx.iter().enumerate().filter(|(j, _)| sub >> j & 1 == 1).map(|(_, &i)| i));
                m.is_independent_set(s).then_some(s.len())
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn from_matrix_examples() {
        let free = BinaryMatroid::from_matrix(&Gf2Matrix::zeros(2, 0), None).unwrap();
        assert_eq!(free.enumerate_independent_sets(20).unwrap().len(), 4);
        let empty_only = BinaryMatroid::from_matrix(&Gf2Matrix::zeros(0, 2), None).unwrap();
        assert_eq!(empty_only.enumerate_independent_sets(20).unwrap(), vec![ElementSet::EMPTY]);
        let m = BinaryMatroid::from_matrix(&mat(2, &["11"]), None).unwrap();
        assert_eq!(m.labels(), ["e1", "e2", "e3"]);
        // (1 | 1 1) has three equal columns: a rank-1 matroid of parallel elements.
        for pair in [["e1", "e2"], ["e1", "e3"], ["e2", "e3"]] {
            assert!(!m.is_independent_labels(&pair).unwrap());
        }
        assert_eq!(m.enumerate_independent_sets(20).unwrap().len(), 4);
        assert_eq!(
            BinaryMatroid::from_matrix(&mat(2, &["11"]), Some(vec!["a".into()])).unwrap_err(),
            MatroidError::LabelCount { expected: 3, got: 1 }
        );
    }

    #[test]
    fn independence_and_rank_examples() {
        let k3 = k3();
        assert!(k3.is_independent(&[]).unwrap());
        assert_eq!(k3.rank(), 2);
        assert_eq!(k3.rank_of(&[]).unwrap(), 0);
        let free = BinaryMatroid::from_matrix(&Gf2Matrix::zeros(4, 0), None).unwrap();
        assert!(free.is_independent(&[0, 1, 2, 3]).unwrap());
        for mask in 0u64..16 {
            assert_eq!(free.rank_of_set(ElementSet(mask)), mask.count_ones() as usize);
        }
        let loops = BinaryMatroid::from_matrix(&Gf2Matrix::zeros(0, 2), None).unwrap();
        assert!(!loops.is_independent_labels(&["e1"]).unwrap());
        assert_eq!(k3.is_independent_labels(&["zz"]), Err(MatroidError::UnknownLabel("zz".into())));
    }

    #[test]
    fn dual_examples() {
        let free = BinaryMatroid::from_matrix(&Gf2Matrix::zeros(3, 0), None).unwrap();
        assert_eq!(free.dual().enumerate_independent_sets(20).unwrap(), vec![ElementSet::EMPTY]);

        let d = k3().dual();
        assert_eq!(d.labels(), ["e3", "e1", "e2"]);
        let sets = d.enumerate_independent_sets(20).unwrap();
        assert_eq!(sets.len(), 4);
        assert!(sets.iter().all(|s| s.len() <= 1));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let m = random_matroid(&mut rng, 7);
            let dd = m.dual().dual();
            for mask in 0..1u64 << m.len() {
                let s = ElementSet(mask);
                let labels = m.set_labels(s);
                assert_eq!(m.is_independent_set(s), dd.is_independent_labels(&labels).unwrap());
            }
        }
    }

    #[test]
    fn duality_rank_identity_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let m = random_matroid(&mut rng, 8);
            let d = m.dual();
            let full = ElementSet::full(m.len());
            let r_e = m.rank_of_set(full) as i64;
            for mask in 0..1u64 << m.len() {
                let s = ElementSet(mask);
                let dual_idx = d.indices_of(&m.set_labels(s)).unwrap();
                let lhs = d.rank_of(&dual_idx).unwrap() as i64;
                let rhs = s.len() as i64 - r_e + m.rank_of_set(full.difference(s)) as i64;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn minor_examples() {
        let k3 = k3();
        let same = k3.minor(&[], &[]).unwrap();
        assert_eq!(same.enumerate_independent_sets(20).unwrap(), k3.enumerate_independent_sets(20).unwrap());

        let with_loop = BinaryMatroid::from_matrix(&mat(2, &["10", "10"]), None).unwrap();
        let del = with_loop.minor(&[3], &[]).unwrap();
        for mask in 0..1u64 << del.len() {
            let s = ElementSet(mask);
            assert_eq!(del.is_independent_set(s), with_loop.is_independent_labels(&del.set_labels(s)).unwrap());
        }

        let c = k3.minor(&[], &[0]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.rank(), 1);
        assert!(!c.is_independent(&[0, 1]).unwrap());

        assert_eq!(k3.minor(&[0], &[0]).unwrap_err(), MatroidError::Overlap("e1".into()));
        assert_eq!(k3.minor(&[], &[0, 1, 2]).unwrap_err(), MatroidError::DependentContraction);
    }

    #[test]
    fn minor_rank_formula_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 60 {
            let m = random_matroid(&mut rng, 7);
            let n = m.len();
            let del: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.25)).collect();
            let con: Vec<usize> = (0..n).filter(|i| !del.contains(i) && rng.gen_bool(0.3)).collect();
            if !m.is_independent(&con).unwrap() {
                continue;
            }
            checked += 1;
            let minor = m.minor(&del, &con).unwrap();
            let c_set = ElementSet::from_indices(con.iter().copied());
            let rc = m.rank_of_set(c_set);
            for mask in 0..1u64 << minor.len() {
                let s = ElementSet(mask);
                let orig = ElementSet::from_indices(m.indices_of(&minor.set_labels(s)).unwrap());
                assert_eq!(minor.rank_of_set(s), m.rank_of_set(orig.union(c_set)) - rc);
            }
        }
    }

    #[test]
    fn independence_matches_rank_and_rank_is_submodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let m = random_matroid(&mut rng, 8);
            for mask in 0..1u64 << m.len() {
                let s = ElementSet(mask);
                assert_eq!(m.is_independent_set(s), m.rank_of_set(s) == s.len());
                assert_eq!(m.rank_of_set(s), brute_rank(&m, s));
            }
        }
        for _ in 0..15 {
            let m = random_matroid(&mut rng, 6);
            let n = 1u64 << m.len();
            for s in 0..n {
                for t in 0..n {
                    let (s, t) = (ElementSet(s), ElementSet(t));
                    let (rs, rt) = (m.rank_of_set(s), m.rank_of_set(t));
                    if s.is_subset(t) {
                        assert!(rs <= rt);
                    }
                    assert!(m.rank_of_set(s.union(t)) + m.rank_of_set(s.intersection(t)) <= rs + rt);
                }
            }
        }
    }

    #[test]
    fn greedy_examples() {
        let k3 = k3();
        let neg: Vec<Rational> = [-1, 0, -3].iter().map(|&v| Rational::from_integer(v)).collect();
        assert_eq!(k3.greedy_max(&neg), (vec![], Rational::zero()));
        let free = BinaryMatroid::from_matrix(&Gf2Matrix::zeros(3, 0), None).unwrap();
        let w: Vec<Rational> = [2, -1, 5].iter().map(|&v| Rational::from_integer(v)).collect();
        assert_eq!(free.greedy_max(&w), (vec![0, 2], Rational::from_integer(7)));
        let w: Vec<Rational> = [3, 2, 1].iter().map(|&v| Rational::from_integer(v)).collect();
        assert_eq!(k3.greedy_max(&w), (vec![0, 1], Rational::from_integer(5)));
    }

    #[test]
    fn greedy_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..12 {
            let m = random_matroid(&mut rng, 10);
            let sets = m.enumerate_independent_sets(20).unwrap();
            for _ in 0..100 {
                let w: Vec<Rational> = (0..m.len()).map(|_| Rational::new(rng.gen_range(-20..=20), rng.gen_range(1..=4))).collect();
                let best = sets.iter().map(|s| s.iter().map(|i| w[i].clone()).sum::<Rational>()).max().unwrap();
                let (set, value) = m.greedy_max(&w);
                assert!(m.is_independent(&set).unwrap());
                assert_eq!(value, best);
            }
        }
    }

    #[test]
    fn enumeration_examples_and_order() {
        let free = BinaryMatroid::from_matrix(&Gf2Matrix::zeros(3, 0), None).unwrap();
        assert_eq!(free.enumerate_independent_sets(20).unwrap().len(), 8);
        let sets = k3().enumerate_independent_sets(20).unwrap();
        assert_eq!(sets.len(), 7);
        // Lexicographic order on (chi_e1, chi_e2, chi_e3).
        let keys: Vec<Vec<bool>> = sets.iter().map(|s| (0..3).map(|i| s.contains(i)).collect()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(
            k3().enumerate_independent_sets(2).unwrap_err(),
            MatroidError::CapExceeded { size: 3, cap: 2 }
        );
    }
}
