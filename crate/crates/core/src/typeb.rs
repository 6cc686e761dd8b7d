//! Brute-force type-B Coxeter group and the (α,q)-inner product on
//! `(ℝ^d)^{⊗n}`.
//!
//! Signed permutations act on slots `1..n`; `π_0` applies the involution `J`
//! to the first slot and `π_i` swaps slots `i` and `i+1`. The inner product
//! sums `α^{ℓ1(σ)} q^{ℓ2(σ)}` over the whole group, where `ℓ1` counts `π_0`
//! and `ℓ2` the other generators in a reduced word.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcalc::QParams;

pub const MAX_GROUP_RANK: usize = 5;
pub const MAX_GRAM_RANK: usize = 4;
pub const MAX_VACUUM_ORDER: usize = 8;
/// Gram matrices with a larger condition number are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Bijection of `{±1..±n}` with `σ(-k) = -σ(k)`, stored as images of `1..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    images: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (1..=n as i8).collect(),
        }
    }

    /// Validates that `|images|` is a permutation of `1..n`.
    pub fn from_images(images: Vec<i8>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            let k = v.unsigned_abs() as usize;
            if k == 0 || k > n || seen[k - 1] {
                return Err(Error::InvalidArgument(format!(
                    "{images:?} is not a signed permutation"
                )));
            }
            seen[k - 1] = true;
        }
        Ok(Self { images })
    }

    /// `π_0` negates 1; `π_i` swaps `i` and `i+1`.
    pub fn generator(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, available: n });
        }
        let mut s = Self::identity(n);
        if i == 0 {
            s.images[0] = -1;
        } else {
            s.images.swap(i - 1, i);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[i8] {
        &self.images
    }

    /// `σ(k)` for `k ∈ {±1..±n}`.
    pub fn apply(&self, k: i8) -> i8 {
        let v = self.images[k.unsigned_abs() as usize - 1];
        if k > 0 {
            v
        } else {
            -v
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&k| self.apply(k)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n()];
        for (k, &v) in self.images.iter().enumerate() {
            let slot = v.unsigned_abs() as usize - 1;
            images[slot] = if v > 0 { k as i8 + 1 } else { -(k as i8 + 1) };
        }
        Self { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| v == k as i8 + 1)
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(i8::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// All of `Σ_n` with BFS words and length statistics.
#[derive(Debug, Clone)]
pub struct GroupTable {
    n: usize,
    elements: Vec<SignedPermutation>,
    words: Vec<Vec<usize>>,
    l1: Vec<usize>,
    l2: Vec<usize>,
    index: HashMap<SignedPermutation, usize>,
}

impl GroupTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[SignedPermutation] {
        &self.elements
    }

    pub fn position(&self, sigma: &SignedPermutation) -> Option<usize> {
        self.index.get(sigma).copied()
    }

    /// Generator indices of the BFS word, leftmost first.
    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    pub fn l1(&self, i: usize) -> usize {
        self.l1[i]
    }

    pub fn l2(&self, i: usize) -> usize {
        self.l2[i]
    }

    pub fn length(&self, i: usize) -> usize {
        self.words[i].len()
    }

    /// `α^{ℓ1} q^{ℓ2}` with `0^0 = 1`.
    pub fn weight(&self, i: usize, params: QParams) -> f64 {
        params.alpha().powi(self.l1[i] as i32) * params.q().powi(self.l2[i] as i32)
    }

    fn lookup(&self, sigma: &SignedPermutation) -> Result<usize> {
        self.position(sigma)
            .ok_or_else(|| Error::InvalidArgument(format!("{sigma} is not an element of the rank-{} group", self.n)))
    }
}

/// Breadth-first enumeration from the identity, right-multiplying by
/// generators. Lengths are read off the first word reaching each element.
pub fn enumerate_group(n: usize) -> Result<GroupTable> {
    if !(1..=MAX_GROUP_RANK).contains(&n) {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
        });
    }
    let gens: Vec<SignedPermutation> = (0..n)
        .map(|i| SignedPermutation::generator(n, i))
        .collect::<Result<_>>()?;
    let e = SignedPermutation::identity(n);
    let mut table = GroupTable {
        n,
        elements: vec![e.clone()],
        words: vec![Vec::new()],
        l1: vec![0],
        l2: vec![0],
        index: HashMap::from([(e, 0)]),
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (g, gen) in gens.iter().enumerate() {
            let next = table.elements[i].compose(gen);
            if table.index.contains_key(&next) {
                continue;
            }
            let j = table.elements.len();
            let mut word = table.words[i].clone();
            word.push(g);
            table.l1.push(table.l1[i] + usize::from(g == 0));
            table.l2.push(table.l2[i] + usize::from(g != 0));
            table.words.push(word);
            table.index.insert(next.clone(), j);
            table.elements.push(next);
            queue.push_back(j);
        }
    }
    Ok(table)
}

/// Product of generators, leftmost first.
pub fn word_product(n: usize, word: &[usize]) -> Result<SignedPermutation> {
    word.iter().try_fold(SignedPermutation::identity(n), |acc, &g| {
        Ok(acc.compose(&SignedPermutation::generator(n, g)?))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraidCheck {
    pub relation: String,
    pub holds: bool,
}

/// `π_i² = e`, `(π_0π_1)⁴ = e`, `(π_iπ_{i+1})³ = e` for `i ≥ 1`, and
/// `(π_iπ_j)² = e` for `|i-j| ≥ 2`, each checked by composition.
pub fn verify_braid_relations(n: usize) -> Result<Vec<BraidCheck>> {
    if !(1..=MAX_GROUP_RANK).contains(&n) {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
        });
    }
    let mut checks = Vec::new();
    let mut push = |name: String, word: Vec<usize>| -> Result<()> {
        checks.push(BraidCheck {
            relation: name,
            holds: word_product(n, &word)?.is_identity(),
        });
        Ok(())
    };
    for i in 0..n {
        push(format!("(p{i})^2"), vec![i, i])?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let order = match (i, j - i) {
                (0, 1) => 4,
                (_, 1) => 3,
                _ => 2,
            };
            push(format!("(p{i} p{j})^{order}"), [i, j].repeat(order))?;
        }
    }
    Ok(checks)
}

/// Walks every reduced word (each step raises the length by one) and checks
/// that the `π_0` count always matches the table. Returns the number of
/// reduced words visited.
pub fn verify_reduced_words(table: &GroupTable) -> Result<usize> {
    if table.n > 4 {
        return Err(Error::InvalidArgument(
            "reduced-word enumeration is limited to n <= 4".into(),
        ));
    }
    let gens: Vec<SignedPermutation> = (0..table.n)
        .map(|i| SignedPermutation::generator(table.n, i))
        .collect::<Result<_>>()?;
    let mut visited = 0usize;
    // (element index, π_0 count so far)
    let mut stack = vec![(0usize, 0usize)];
    while let Some((i, zeros)) = stack.pop() {
        visited += 1;
        if zeros != table.l1[i] || table.length(i) - zeros != table.l2[i] {
            return Err(Error::InvalidArgument(format!(
                "length statistics of {} depend on the reduced word",
                table.elements[i]
            )));
        }
        for (g, gen) in gens.iter().enumerate() {
            let j = table.lookup(&table.elements[i].compose(gen))?;
            if table.length(j) == table.length(i) + 1 {
                stack.push((j, zeros + usize::from(g == 0)));
            }
        }
    }
    Ok(visited)
}

/// Self-adjoint involution `f ↦ f̄` on `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Involution {
    matrix: DMatrix<f64>,
}

impl Involution {
    /// Requires `J` symmetric with `J² = I` to within `1e-12`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || d == 0 {
            return Err(Error::InvalidArgument(
                "involution must be a nonempty square matrix".into(),
            ));
        }
        let sym = (&matrix - matrix.transpose()).amax();
        let sq = (&matrix * &matrix - DMatrix::identity(d, d)).amax();
        if sym > 1e-12 || sq > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "not a self-adjoint involution (asymmetry {sym:e}, |J^2 - I| {sq:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// `f̄ = f`.
    pub fn identity(d: usize) -> Self {
        Self {
            matrix: DMatrix::identity(d, d),
        }
    }

    /// `f̄ = -f`.
    pub fn negated(d: usize) -> Self {
        Self {
            matrix: -DMatrix::identity(d, d),
        }
    }

    /// `diag(±1)`.
    pub fn signature(signs: &[f64]) -> Result<Self> {
        if signs.iter().any(|s| s.abs() != 1.0) {
            return Err(Error::InvalidArgument("signature entries must be +1 or -1".into()));
        }
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(signs)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_row_slice(v)).iter().copied().collect()
    }

    /// `⟨f, J g⟩`.
    pub fn pairing(&self, f: &[f64], g: &[f64]) -> f64 {
        dot(f, &self.apply(g))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Element of `(ℝ^d)^{⊗n}` in the product basis; slot 1 is the most
/// significant digit of the flat index.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    d: usize,
    rank: usize,
    coeffs: Vec<f64>,
}

impl Tensor {
    pub fn zeros(d: usize, rank: usize) -> Self {
        Self {
            d,
            rank,
            coeffs: vec![0.0; d.pow(rank as u32)],
        }
    }

    pub fn vacuum(d: usize) -> Self {
        Self {
            d,
            rank: 0,
            coeffs: vec![1.0],
        }
    }

    /// `e_{i_1} ⊗ ... ⊗ e_{i_n}`.
    pub fn basis(d: usize, slots: &[usize]) -> Result<Self> {
        if let Some(&s) = slots.iter().find(|&&s| s >= d) {
            return Err(Error::IndexOutOfRange { index: s, available: d });
        }
        let mut t = Self::zeros(d, slots.len());
        t.coeffs[encode(d, slots)] = 1.0;
        Ok(t)
    }

    /// `f_1 ⊗ ... ⊗ f_n`.
    pub fn product(factors: &[Vec<f64>]) -> Result<Self> {
        let d = factors.first().map_or(1, Vec::len);
        if let Some(f) = factors.iter().find(|f| f.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: f.len(),
            });
        }
        let mut t = Self::zeros(d, factors.len());
        for (idx, c) in t.coeffs.iter_mut().enumerate() {
            *c = decode(d, factors.len(), idx)
                .iter()
                .zip(factors)
                .map(|(&s, f)| f[s])
                .product();
        }
        Ok(t)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn apply_generator(&self, g: usize, j: &Involution) -> Self {
        let mut out = Self::zeros(self.d, self.rank);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut slots = decode(self.d, self.rank, idx);
            if g == 0 {
                let first = slots[0];
                for r in 0..self.d {
                    slots[0] = r;
                    out.coeffs[encode(self.d, &slots)] += j.matrix[(r, first)] * c;
                }
            } else {
                slots.swap(g - 1, g);
                out.coeffs[encode(self.d, &slots)] += c;
            }
        }
        out
    }
}

fn encode(d: usize, slots: &[usize]) -> usize {
    slots.iter().fold(0, |acc, &s| acc * d + s)
}

fn decode(d: usize, rank: usize, mut idx: usize) -> Vec<usize> {
    let mut slots = vec![0; rank];
    for s in slots.iter_mut().rev() {
        *s = idx % d;
        idx /= d;
    }
    slots
}

/// Action of `σ` via its BFS word `π_{i_1}⋯π_{i_k}`, rightmost generator first.
pub fn act(table: &GroupTable, sigma: &SignedPermutation, tensor: &Tensor, j: &Involution) -> Result<Tensor> {
    if sigma.n() != tensor.rank || table.n != tensor.rank {
        return Err(Error::DimensionMismatch {
            expected: sigma.n(),
            found: tensor.rank,
        });
    }
    if j.dim() != tensor.d {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: tensor.d,
        });
    }
    let word = table.word(table.lookup(sigma)?);
    Ok(word.iter().rev().fold(tensor.clone(), |t, &g| t.apply_generator(g, j)))
}

fn check_gram_rank(table: &GroupTable, j: &Involution, rank: usize) -> Result<()> {
    if rank > MAX_GRAM_RANK {
        return Err(Error::ParamOutOfRange {
            name: "rank",
            value: rank as f64,
        });
    }
    if table.n != rank {
        return Err(Error::DimensionMismatch {
            expected: rank,
            found: table.n,
        });
    }
    if j.dim().pow(rank as u32) > 4096 {
        return Err(Error::InvalidArgument(
            "tensor space too large for a dense Gram matrix".into(),
        ));
    }
    Ok(())
}

/// `(α,q)`-Gram matrix of the product basis of `(ℝ^d)^{⊗n}`:
/// `Σ_σ α^{ℓ1} q^{ℓ2} ∏_k ⟨e_{i_k}, g_{σ(k)}⟩` with `g_{-k} = J g_k`.
pub fn basis_gram(table: &GroupTable, params: QParams, j: &Involution) -> Result<DMatrix<f64>> {
    let n = table.n;
    check_gram_rank(table, j, n)?;
    let d = j.dim();
    let size = d.pow(n as u32);
    let left: Vec<Vec<usize>> = (0..size).map(|i| decode(d, n, i)).collect();
    let mut gram = DMatrix::zeros(size, size);
    for (s, sigma) in table.elements.iter().enumerate() {
        let w = table.weight(s, params);
        if w == 0.0 {
            continue;
        }
        for (a, ia) in left.iter().enumerate() {
            for (b, ib) in left.iter().enumerate() {
                let mut p = w;
                for (k, &img) in sigma.images.iter().enumerate() {
                    let target = ib[img.unsigned_abs() as usize - 1];
                    p *= if img > 0 {
                        f64::from(u8::from(ia[k] == target))
                    } else {
                        j.matrix[(ia[k], target)]
                    };
                    if p == 0.0 {
                        break;
                    }
                }
                gram[(a, b)] += p;
            }
        }
    }
    Ok(gram)
}

/// Gram matrix of arbitrary rank-`n` tensors.
pub fn aq_gram(table: &GroupTable, tensors: &[Tensor], params: QParams, j: &Involution) -> Result<DMatrix<f64>> {
    let g = basis_gram(table, params, j)?;
    let size = g.nrows();
    if let Some(t) = tensors.iter().find(|t| t.rank != table.n || t.coeffs.len() != size) {
        return Err(Error::DimensionMismatch {
            expected: table.n,
            found: t.rank,
        });
    }
    let cols: Vec<DVector<f64>> = tensors.iter().map(|t| DVector::from_row_slice(&t.coeffs)).collect();
    let t = DMatrix::from_columns(&cols);
    Ok(t.transpose() * g * t)
}

/// `⟨f^{⊗n}, f^{⊗n}⟩_{α,q}` summed over the group without forming the Gram
/// matrix.
pub fn power_norm(table: &GroupTable, params: QParams, j: &Involution, f: &[f64]) -> Result<f64> {
    if f.len() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: f.len(),
        });
    }
    let plain = dot(f, f);
    let twisted = j.pairing(f, f);
    Ok((0..table.len())
        .map(|s| {
            let negated = table.elements[s].images.iter().filter(|&&v| v < 0).count();
            table.weight(s, params) * plain.powi((table.n - negated) as i32) * twisted.powi(negated as i32)
        })
        .sum())
}

/// `⟨Ω, G^k Ω⟩` for the field operator acting on `{f^{⊗n}}` by
/// `G f^{⊗n} = f^{⊗(n+1)} + (1 + α⟨f,f̄⟩ q^{n-1}) [n]_q f^{⊗(n-1)}`, with
/// `⟨f, f̄⟩ = 1`.
pub fn vacuum_moment(params: QParams, k: usize) -> Result<f64> {
    vacuum_moment_with_overlap(params, 1.0, k)
}

/// [`vacuum_moment`] for a unit vector with the given `⟨f, f̄⟩`.
pub fn vacuum_moment_with_overlap(params: QParams, overlap: f64, k: usize) -> Result<f64> {
    if k > MAX_VACUUM_ORDER {
        return Err(Error::ParamOutOfRange {
            name: "k",
            value: k as f64,
        });
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let (alpha, q) = (params.alpha(), params.q());
    let omega = |n: usize| (1.0 + alpha * overlap * q.powi(n as i32 - 1)) * crate::qcalc::q_number(n, q);
    // coefficients over f^{⊗0}, ..., f^{⊗k}
    let mut c = vec![0.0; k + 2];
    c[0] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; k + 2];
        for n in 0..=k {
            if c[n] == 0.0 {
                continue;
            }
            next[n + 1] += c[n];
            if n > 0 {
                next[n - 1] += omega(n) * c[n];
            }
        }
        c = next;
    }
    Ok(c[0])
}

/// Residual of the tensor-level commutation relation on one rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankResidual {
    pub rank: usize,
    /// Condition number of the rank's Gram matrix.
    pub condition: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutationReport {
    pub alpha: f64,
    pub q: f64,
    pub d: usize,
    pub ranks: Vec<RankResidual>,
}

impl CommutationReport {
    pub fn max_residual(&self) -> f64 {
        self.ranks.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_condition(&self) -> f64 {
        self.ranks.iter().map(|r| r.condition).fold(0.0, f64::max)
    }
}

/// `B⁺(e_c)`: rank `m` → rank `m+1`, appending `e_c` as the last slot.
fn creation_matrix(d: usize, m: usize, c: usize) -> DMatrix<f64> {
    let rows = d.pow(m as u32 + 1);
    let cols = d.pow(m as u32);
    let mut out = DMatrix::zeros(rows, cols);
    for i in 0..cols {
        out[(i * d + c, i)] = 1.0;
    }
    out
}

fn condition_number(g: &DMatrix<f64>) -> f64 {
    let sv = g.singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Checks `B⁻(f)B⁺(g) - q B⁺(g)B⁻(f) = (⟨f,g⟩ + α⟨f̄,g⟩ q^{2m}) I` on every
/// rank `m ≤ rank`, for all pairs of basis vectors `f, g` of `ℝ^d`.
///
/// `B⁺(g)` appends `g` as the last tensor slot, and `B⁻(f)` is its adjoint
/// for the `(α,q)` inner products: `B⁻ = G_m^{-1} B⁺ᵀ G_{m+1}`.
pub fn check_commutation(params: QParams, d: usize, rank: usize, j: &Involution) -> Result<CommutationReport> {
    if j.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: j.dim(),
        });
    }
    if rank + 1 > MAX_GRAM_RANK {
        return Err(Error::ParamOutOfRange {
            name: "rank",
            value: rank as f64,
        });
    }
    let (alpha, q) = (params.alpha(), params.q());
    let mut grams = vec![DMatrix::from_element(1, 1, 1.0)];
    for m in 1..=rank + 1 {
        grams.push(basis_gram(&enumerate_group(m)?, params, j)?);
    }
    let mut conditions = Vec::with_capacity(rank + 1);
    let mut solvers = Vec::with_capacity(rank + 1);
    for (m, g) in grams.iter().take(rank + 1).enumerate() {
        let condition = condition_number(g);
        if condition.is_nan() || condition >= SINGULAR_CONDITION {
            return Err(Error::SingularGram { rank: m, condition });
        }
        conditions.push(condition);
        solvers.push(g.clone().lu());
    }
    // B⁻(e_c) from rank m+1 to rank m
    let annihilation = |m: usize, c: usize| -> Result<DMatrix<f64>> {
        let rhs = creation_matrix(d, m, c).transpose() * &grams[m + 1];
        solvers[m].solve(&rhs).ok_or(Error::SingularGram {
            rank: m,
            condition: conditions[m],
        })
    };
    let mut ranks = Vec::with_capacity(rank + 1);
    for (m, &condition) in conditions.iter().enumerate() {
        let size = d.pow(m as u32);
        let mut residual = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let mut lhs = annihilation(m, a)? * creation_matrix(d, m, b);
                if m > 0 {
                    lhs -= q * creation_matrix(d, m - 1, b) * annihilation(m - 1, a)?;
                }
                let scalar = f64::from(u8::from(a == b)) + alpha * j.matrix[(a, b)] * q.powi(2 * m as i32);
                let diff = lhs - DMatrix::identity(size, size) * scalar;
                residual = residual.max(diff.amax());
            }
        }
        ranks.push(RankResidual {
            rank: m,
            condition,
            residual,
        });
    }
    Ok(CommutationReport { alpha, q, d, ranks })
}
