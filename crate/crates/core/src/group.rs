use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Finite abelian group Z_{n_1} x ... x Z_{n_r}; elements are exponent
/// tuples with entry i reduced mod n_i.  Enumeration order is mixed-radix
/// lexicographic and is relied on throughout for deterministic indexing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

pub type GroupElem = Vec<u64>;

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(CoreError::Schema(
                "group orders must be a nonempty list of positive integers".into(),
            ));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn cyclic(n: u64) -> Self {
        FiniteAbelianGroup { orders: vec![n] }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.orders.iter().map(|&n| n as usize).product()
    }

    pub fn product(&self, other: &FiniteAbelianGroup) -> FiniteAbelianGroup {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        FiniteAbelianGroup { orders }
    }

    pub fn identity(&self) -> GroupElem {
        vec![0; self.orders.len()]
    }

    pub fn is_identity(&self, a: &GroupElem) -> bool {
        a.iter().zip(&self.orders).all(|(&x, &n)| x % n == 0)
    }

    pub fn reduce(&self, a: &GroupElem) -> GroupElem {
        a.iter().zip(&self.orders).map(|(&x, &n)| x % n).collect()
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect()
    }

    pub fn neg(&self, a: &GroupElem) -> GroupElem {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &n)| (n - x % n) % n)
            .collect()
    }

    pub fn sub(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        self.add(a, &self.neg(b))
    }

    pub fn elements(&self) -> Vec<GroupElem> {
        let mut out = Vec::with_capacity(self.order());
        let mut cur = self.identity();
        loop {
            out.push(cur.clone());
            let mut i = self.orders.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    /// Mixed-radix index matching the order of `elements()`.
    pub fn index_of(&self, a: &GroupElem) -> usize {
        let mut idx = 0usize;
        for (&x, &n) in a.iter().zip(&self.orders) {
            idx = idx * n as usize + (x % n) as usize;
        }
        idx
    }

    pub fn elem_at(&self, mut idx: usize) -> GroupElem {
        let mut out = vec![0u64; self.orders.len()];
        for i in (0..self.orders.len()).rev() {
            let n = self.orders[i] as usize;
            out[i] = (idx % n) as u64;
            idx /= n;
        }
        out
    }

    pub fn generators(&self) -> Vec<GroupElem> {
        (0..self.orders.len())
            .map(|i| {
                let mut e = self.identity();
                e[i] = 1 % self.orders[i];
                e
            })
            .collect()
    }

    /// All elements of the subgroup generated by `gens`, sorted by index.
    pub fn subgroup_generated(&self, gens: &[GroupElem]) -> Vec<GroupElem> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                let i = self.index_of(&y);
                if !seen[i] {
                    seen[i] = true;
                    frontier.push(y);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(i, _)| self.elem_at(i))
            .collect()
    }

    /// Quotient by the subgroup generated by `gens`, presented through the
    /// Smith normal form of the relations matrix [diag(orders) | gens].
    pub fn quotient(&self, gens: &[GroupElem]) -> Result<QuotientGroup> {
        let r = self.rank();
        let cols = r + gens.len();
        let mut m = vec![vec![0i128; cols]; r];
        for (i, &order) in self.orders.iter().enumerate() {
            m[i][i] = order as i128;
        }
        for (j, g) in gens.iter().enumerate() {
            for i in 0..r {
                m[i][r + j] = g[i] as i128;
            }
        }
        let snf = smith_normal_form(&m);
        // diag(orders) has full row rank, so all r invariant factors are >= 1.
        let mut kept = Vec::new();
        let mut orders = Vec::new();
        for i in 0..r {
            let s = snf.diag[i];
            debug_assert!(s >= 1);
            if s > 1 {
                kept.push(i);
                orders.push(s as u64);
            }
        }
        let group = if orders.is_empty() {
            FiniteAbelianGroup::new(vec![1])?
        } else {
            FiniteAbelianGroup::new(orders)?
        };
        Ok(QuotientGroup {
            source: self.clone(),
            group,
            u: snf.u,
            kept,
        })
    }
}

/// G/K together with the projection map and character pullback.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    pub source: FiniteAbelianGroup,
    pub group: FiniteAbelianGroup,
    u: Vec<Vec<i128>>,
    kept: Vec<usize>,
}

impl QuotientGroup {
    pub fn map(&self, x: &GroupElem) -> GroupElem {
        if self.kept.is_empty() {
            return self.group.identity();
        }
        self.kept
            .iter()
            .zip(self.group.orders())
            .map(|(&row, &s)| {
                let mut acc: i128 = 0;
                for (j, &xj) in x.iter().enumerate() {
                    acc += self.u[row][j] * xj as i128;
                }
                acc.rem_euclid(s as i128) as u64
            })
            .collect()
    }

    /// Pull a character of the quotient back to the source group.  The
    /// composite chi(map(.)) is a character of the source, so its exponents
    /// against the source orders are integers; this is checked exactly.
    pub fn pullback(&self, chi: &Character) -> Result<Character> {
        if chi.orders != *self.group.orders() {
            return Err(CoreError::Schema(
                "character does not belong to the quotient group".into(),
            ));
        }
        let src = self.source.orders();
        let mut exps = Vec::with_capacity(src.len());
        if self.kept.is_empty() {
            return Character::new(src.to_vec(), vec![0; src.len()]);
        }
        let l: i128 = self
            .group
            .orders()
            .iter()
            .fold(1i128, |acc, &s| lcm(acc, s as i128));
        for (j, &nj) in src.iter().enumerate() {
            // chi(q(e_j)) = exp(2 pi i * sum_i t_i U_{kept_i, j} / s_i).
            let mut numer: i128 = 0;
            for (i, (&row, &s)) in self.kept.iter().zip(self.group.orders()).enumerate() {
                numer += chi.exponents[i] as i128 * self.u[row][j] * (l / s as i128);
            }
            let scaled = numer * nj as i128;
            if scaled % l != 0 {
                return Err(CoreError::invariant(
                    "character pullback must have integral exponents",
                    f64::NAN,
                ));
            }
            exps.push((scaled / l).rem_euclid(nj as i128) as u64);
        }
        Character::new(src.to_vec(), exps)
    }
}

/// A character of a finite abelian group, stored by its exponents against
/// the cyclic factors: chi(e_j) = exp(2 pi i k_j / n_j).  Characters double
/// as elements of the dual group under pointwise multiplication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    orders: Vec<u64>,
    exponents: Vec<u64>,
}

impl Character {
    pub fn new(orders: Vec<u64>, exponents: Vec<u64>) -> Result<Self> {
        if orders.len() != exponents.len() {
            return Err(CoreError::Schema(
                "character exponents must match the group rank".into(),
            ));
        }
        let exponents = exponents
            .iter()
            .zip(&orders)
            .map(|(&k, &n)| k % n)
            .collect();
        Ok(Character { orders, exponents })
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Character {
            orders: group.orders().to_vec(),
            exponents: vec![0; group.rank()],
        }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    pub fn eval(&self, g: &GroupElem) -> Complex64 {
        let mut angle = 0.0f64;
        for ((&k, &x), &n) in self.exponents.iter().zip(g).zip(&self.orders) {
            let e = (k as u128 * (x % n) as u128 % n as u128) as f64;
            angle += e / n as f64;
        }
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * angle)
    }

    /// Exact test for chi(g) = 1 on every listed element.
    pub fn is_trivial_on(&self, elems: &[GroupElem]) -> bool {
        let l: i128 = self
            .orders
            .iter()
            .fold(1i128, |acc, &n| lcm(acc, n as i128));
        elems.iter().all(|g| {
            let mut acc: i128 = 0;
            for ((&k, &x), &n) in self.exponents.iter().zip(g).zip(&self.orders) {
                acc += k as i128 * (x % n) as i128 * (l / n as i128);
            }
            acc % l == 0
        })
    }

    pub fn mul(&self, other: &Character) -> Result<Character> {
        if self.orders != other.orders {
            return Err(CoreError::Schema(
                "characters of different groups cannot be multiplied".into(),
            ));
        }
        let exps = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(&self.orders)
            .map(|((&a, &b), &n)| (a + b) % n)
            .collect();
        Character::new(self.orders.clone(), exps)
    }

    pub fn inverse(&self) -> Character {
        let exps = self
            .exponents
            .iter()
            .zip(&self.orders)
            .map(|(&k, &n)| (n - k % n) % n)
            .collect();
        Character {
            orders: self.orders.clone(),
            exponents: exps,
        }
    }

    /// The dual group is again finite abelian with the same orders; this is
    /// the exponent tuple viewed as an element there.
    pub fn as_dual_elem(&self) -> GroupElem {
        self.exponents.clone()
    }

    pub fn label(&self) -> String {
        let body: Vec<String> = self.exponents.iter().map(|k| k.to_string()).collect();
        format!("({})", body.join(","))
    }
}

/// All characters of `group`, in the dual group's enumeration order.
pub fn dual_elements(group: &FiniteAbelianGroup) -> Vec<Character> {
    group
        .elements()
        .into_iter()
        .map(|e| Character {
            orders: group.orders().to_vec(),
            exponents: e,
        })
        .collect()
}

/// Characters of `group` that are identically 1 on the subgroup generated by
/// `gens` (the annihilator subgroup of the dual).
pub fn annihilator(group: &FiniteAbelianGroup, gens: &[GroupElem]) -> Vec<Character> {
    dual_elements(group)
        .into_iter()
        .filter(|chi| chi.is_trivial_on(gens))
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Extended gcd: returns (g, x, y) with a x + b y = g.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), if a >= 0 { 1 } else { -1 }, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub(crate) struct Snf {
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    pub diag: Vec<i128>,
}

/// Smith normal form over the integers: U m V = S with U, V unimodular and
/// S diagonal with s_1 | s_2 | ... >= 0.
pub(crate) fn smith_normal_form(m: &[Vec<i128>]) -> Snf {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut u = eye(rows);
    let mut v = eye(cols);
    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            // Pivot: nonzero entry of minimal absolute value in the tail.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0 && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(a, u, v, steps);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    row_sub(&mut a, i, t, q);
                    row_sub(&mut u, i, t, q);
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    col_sub(&mut a, j, t, q);
                    col_sub(&mut v, j, t, q);
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility sweep: fold a non-divisible entry into the pivot row.
            let mut fixed = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if a[i][j] % a[t][t] != 0 {
                        row_add(&mut a, t, i);
                        row_add(&mut u, t, i);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    finish(a, u, v, steps)
}

fn finish(a: Vec<Vec<i128>>, u: Vec<Vec<i128>>, v: Vec<Vec<i128>>, steps: usize) -> Snf {
    let diag = (0..steps).map(|i| a[i][i].abs()).collect();
    Snf { u, v, diag }
}

fn eye(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn row_sub(m: &mut [Vec<i128>], i: usize, t: usize, q: i128) {
    for j in 0..m[i].len() {
        let s = m[t][j];
        m[i][j] -= q * s;
    }
}

fn row_add(m: &mut [Vec<i128>], t: usize, i: usize) {
    for j in 0..m[t].len() {
        let s = m[i][j];
        m[t][j] += s;
    }
}

fn col_sub(m: &mut [Vec<i128>], j: usize, t: usize, q: i128) {
    for row in m.iter_mut() {
        let s = row[t];
        row[j] -= q * s;
    }
}

/// Solve a x = c (mod modulus) over the integers mod `modulus`, via the
/// Smith normal form of a.  Returns any solution, or None when inconsistent.
pub(crate) fn solve_mod(a: &[Vec<i128>], c: &[i128], modulus: i128) -> Option<Vec<i128>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let snf = smith_normal_form(a);
    // c' = U c.
    let cp: Vec<i128> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| snf.u[i][j] * c[j])
                .sum::<i128>()
                .rem_euclid(modulus)
        })
        .collect();
    let mut y = vec![0i128; cols];
    for i in 0..rows {
        let s = if i < snf.diag.len() { snf.diag[i] } else { 0 };
        if s == 0 {
            if cp[i] % modulus != 0 {
                return None;
            }
            continue;
        }
        // s y = cp[i] (mod modulus): solvable iff gcd(s, modulus) | cp[i].
        let g = gcd(s, modulus);
        if cp[i] % g != 0 {
            return None;
        }
        let m2 = modulus / g;
        let (_, inv, _) = ext_gcd((s / g).rem_euclid(m2), m2);
        y[i] = ((cp[i] / g) % m2 * inv.rem_euclid(m2)).rem_euclid(m2);
    }
    // x = V y.
    let x: Vec<i128> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| snf.v[i][j] * y[j])
                .sum::<i128>()
                .rem_euclid(modulus)
        })
        .collect();
    // Safety net for the reduction arithmetic above.
    for i in 0..rows {
        let mut acc: i128 = 0;
        for j in 0..cols {
            acc += a[i][j] * x[j];
        }
        if (acc - c[i]).rem_euclid(modulus) != 0 {
            return None;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_and_indexing() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let els = g.elements();
        assert_eq!(els.len(), 6);
        assert_eq!(els[0], vec![0, 0]);
        assert_eq!(els[5], vec![1, 2]);
        for (i, e) in els.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
            assert_eq!(g.elem_at(i), *e);
        }
    }

    #[test]
    fn arithmetic() {
        let g = FiniteAbelianGroup::new(vec![4]).unwrap();
        assert_eq!(g.add(&vec![3], &vec![2]), vec![1]);
        assert_eq!(g.neg(&vec![3]), vec![1]);
        assert!(g.is_identity(&g.sub(&vec![2], &vec![2])));
    }

    #[test]
    fn subgroup_closure() {
        let g = FiniteAbelianGroup::new(vec![6]).unwrap();
        let h = g.subgroup_generated(&[vec![4]]);
        // <4> in Z_6 is {0, 2, 4}.
        assert_eq!(h, vec![vec![0], vec![2], vec![4]]);
    }

    #[test]
    fn characters_orthogonality() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let duals = dual_elements(&g);
        assert_eq!(duals.len(), 4);
        // Character orthogonality: sum_g chi(g) conj(psi(g)) = |G| delta.
        for c1 in &duals {
            for c2 in &duals {
                let s: Complex64 = g
                    .elements()
                    .iter()
                    .map(|e| c1.eval(e) * c2.eval(e).conj())
                    .sum();
                let expect = if c1 == c2 { 4.0 } else { 0.0 };
                assert!((s.re - expect).abs() < 1e-12 && s.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn annihilator_of_even_subgroup() {
        // In Z_4, characters trivial on <2> are those with even exponent.
        let g = FiniteAbelianGroup::cyclic(4);
        let ann = annihilator(&g, &[vec![2]]);
        let exps: Vec<u64> = ann.iter().map(|c| c.exponents()[0]).collect();
        assert_eq!(exps, vec![0, 2]);
    }

    #[test]
    fn snf_basic() {
        // [[2, 4], [6, 8]] has invariant factors 2 and 4 (det = -8).
        let m = vec![vec![2, 4], vec![6, 8]];
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diag, vec![2, 4]);
        // U m V must reproduce the diagonal.
        let prod = mat_mul(&mat_mul(&snf.u, &m), &snf.v);
        assert_eq!(prod[0][0], 2);
        assert_eq!(prod[1][1], 4);
        assert_eq!(prod[0][1], 0);
        assert_eq!(prod[1][0], 0);
    }

    fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let n = a.len();
        let k = b.len();
        let m = b[0].len();
        let mut out = vec![vec![0i128; m]; n];
        for i in 0..n {
            for j in 0..m {
                for t in 0..k {
                    out[i][j] += a[i][t] * b[t][j];
                }
            }
        }
        out
    }

    #[test]
    fn quotient_z4_by_two() {
        let g = FiniteAbelianGroup::cyclic(4);
        let q = g.quotient(&[vec![2]]).unwrap();
        assert_eq!(q.group.orders(), &[2]);
        assert!(q.group.is_identity(&q.map(&vec![2])));
        assert!(!q.group.is_identity(&q.map(&vec![1])));
        // Pullback of the nontrivial character of Z_2 is the exponent-2
        // character of Z_4.
        let chi = Character::new(vec![2], vec![1]).unwrap();
        let back = q.pullback(&chi).unwrap();
        assert_eq!(back.exponents(), &[2]);
        assert!(back.is_trivial_on(&[vec![2]]));
    }

    #[test]
    fn quotient_by_full_group_is_trivial() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let q = g.quotient(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(q.group.order(), 1);
        assert!(q.group.is_identity(&q.map(&vec![1, 1])));
    }

    #[test]
    fn solve_mod_works() {
        // 2x = 6 mod 8 has solution x = 3 (also 7).
        let a = vec![vec![2]];
        let x = solve_mod(&a, &[6], 8).unwrap();
        assert_eq!((2 * x[0]).rem_euclid(8), 6);
        // 2x = 5 mod 8 is inconsistent.
        assert!(solve_mod(&a, &[5], 8).is_none());
        // Small 2x2 system mod 9.
        let a2 = vec![vec![1, 2], vec![3, 4]];
        let c2 = vec![5, 6];
        let x2 = solve_mod(&a2, &c2, 9).unwrap();
        assert_eq!((x2[0] + 2 * x2[1]).rem_euclid(9), 5);
        assert_eq!((3 * x2[0] + 4 * x2[1]).rem_euclid(9), 6);
    }
}
