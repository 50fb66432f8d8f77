use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::group::{solve_mod, FiniteAbelianGroup, GroupElem};
use crate::tol::ToleranceContext;

/// Group-order cap for the coboundary decision; the linear solve is over
/// |G|^2 relations in |G| unknowns mod |G|^2 and is cheap below this bound.
pub const COBOUNDARY_ORDER_CAP: usize = 64;

/// A normalized circle-valued 2-cocycle on a finite abelian group, stored as
/// a full multiplication table indexed by the group's enumeration order.
#[derive(Debug, Clone)]
pub struct TwoCocycle {
    group: FiniteAbelianGroup,
    table: Vec<Complex64>,
}

impl TwoCocycle {
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        TwoCocycle {
            group: group.clone(),
            table: vec![Complex64::new(1.0, 0.0); n * n],
        }
    }

    /// Validates modulus-one values, normalization at the identity, and the
    /// 2-cocycle identity w(a,b) w(ab,c) = w(b,c) w(a,bc).
    pub fn from_table(
        group: &FiniteAbelianGroup,
        table: Vec<Complex64>,
        ctx: &ToleranceContext,
    ) -> Result<Self> {
        let n = group.order();
        if table.len() != n * n {
            return Err(CoreError::InvalidCocycle(format!(
                "table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        let w = TwoCocycle {
            group: group.clone(),
            table,
        };
        w.validate(ctx)?;
        Ok(w)
    }

    /// Bilinear cocycle w(a,b) = exp(2 pi i sum_ij m_ij a_i b_j / L) with
    /// L = lcm of the cyclic orders.  Well-definedness on the quotient
    /// requires L | m_ij n_i and L | m_ij n_j, checked exactly.
    pub fn from_bilinear_exponents(
        group: &FiniteAbelianGroup,
        m: &[Vec<i64>],
        ctx: &ToleranceContext,
    ) -> Result<Self> {
        let r = group.rank();
        if m.len() != r || m.iter().any(|row| row.len() != r) {
            return Err(CoreError::InvalidCocycle(
                "bilinear exponent matrix must be rank x rank".into(),
            ));
        }
        let l: i64 = group
            .orders()
            .iter()
            .fold(1i64, |acc, &n| acc / num_gcd(acc, n as i64) * n as i64);
        for (i, row) in m.iter().enumerate() {
            for (j, &mij) in row.iter().enumerate() {
                let ni = group.orders()[i] as i64;
                let nj = group.orders()[j] as i64;
                if (mij * ni) % l != 0 || (mij * nj) % l != 0 {
                    return Err(CoreError::InvalidCocycle(format!(
                        "exponent m[{i}][{j}] = {mij} is not well-defined mod the orders"
                    )));
                }
            }
        }
        let elems = group.elements();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elems {
            for b in &elems {
                let mut e: i64 = 0;
                for i in 0..r {
                    for j in 0..r {
                        e += m[i][j] * a[i] as i64 % l * (b[j] as i64) % l;
                    }
                }
                let angle = 2.0 * std::f64::consts::PI * (e.rem_euclid(l) as f64) / l as f64;
                table.push(Complex64::from_polar(1.0, angle));
            }
        }
        TwoCocycle::from_table(group, table, ctx)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn eval(&self, a: &GroupElem, b: &GroupElem) -> Complex64 {
        let n = self.group.order();
        self.table[self.group.index_of(a) * n + self.group.index_of(b)]
    }

    pub fn validate(&self, ctx: &ToleranceContext) -> Result<()> {
        let elems = self.group.elements();
        let tol = ctx.eq_bound(1.0);
        for t in &self.table {
            if (t.norm() - 1.0).abs() > tol {
                return Err(CoreError::InvalidCocycle(format!(
                    "value off the unit circle by {:.3e}",
                    (t.norm() - 1.0).abs()
                )));
            }
        }
        let e = self.group.identity();
        for a in &elems {
            if (self.eval(&e, a) - 1.0).norm() > tol || (self.eval(a, &e) - 1.0).norm() > tol {
                return Err(CoreError::InvalidCocycle(
                    "cocycle is not normalized at the identity".into(),
                ));
            }
        }
        for a in &elems {
            for b in &elems {
                let ab = self.group.add(a, b);
                for c in &elems {
                    let bc = self.group.add(b, c);
                    let lhs = self.eval(a, b) * self.eval(&ab, c);
                    let rhs = self.eval(b, c) * self.eval(a, &bc);
                    if (lhs - rhs).norm() > tol {
                        return Err(CoreError::InvalidCocycle(format!(
                            "cocycle identity fails by {:.3e}",
                            (lhs - rhs).norm()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The permutator bicharacter eps(a,b) = w(a,b) / w(b,a).  It measures
    /// the commutation of the implementers: U_a U_b = eps(a,b) U_b U_a.
    pub fn permutator(&self, a: &GroupElem, b: &GroupElem) -> Complex64 {
        self.eval(a, b) / self.eval(b, a)
    }

    pub fn is_symmetric(&self, ctx: &ToleranceContext) -> bool {
        let elems = self.group.elements();
        let tol = ctx.eq_bound(1.0);
        for a in &elems {
            for b in &elems {
                if (self.permutator(a, b) - 1.0).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Coboundary of a circle-valued function: (d lam)(a,b) = lam(a) lam(b)
    /// / lam(ab).  `lam` is indexed by the group's enumeration order.
    pub fn coboundary(group: &FiniteAbelianGroup, lam: &[Complex64]) -> Result<TwoCocycle> {
        let elems = group.elements();
        if lam.len() != elems.len() {
            return Err(CoreError::InvalidCocycle(
                "coboundary data must assign one value per group element".into(),
            ));
        }
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let ab = group.index_of(&group.add(a, b));
                table.push(lam[i] * lam[j] / lam[ab]);
            }
        }
        Ok(TwoCocycle {
            group: group.clone(),
            table,
        })
    }

    pub fn mul(&self, other: &TwoCocycle) -> Result<TwoCocycle> {
        if self.group != other.group {
            return Err(CoreError::InvalidCocycle(
                "cocycles live on different groups".into(),
            ));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a * b)
            .collect();
        Ok(TwoCocycle {
            group: self.group.clone(),
            table,
        })
    }

    pub fn div(&self, other: &TwoCocycle) -> Result<TwoCocycle> {
        if self.group != other.group {
            return Err(CoreError::InvalidCocycle(
                "cocycles live on different groups".into(),
            ));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a / b)
            .collect();
        Ok(TwoCocycle {
            group: self.group.clone(),
            table,
        })
    }

    pub fn max_distance(&self, other: &TwoCocycle) -> f64 {
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Decide whether the cocycle is a coboundary; on success return the
    /// trivializing function lam with (d lam) = w.
    ///
    /// Coboundaries over an abelian group are symmetric, so asymmetry is an
    /// immediate no.  For symmetric w, the transfer function
    /// f(a) = prod_h w(a,h) satisfies w^|G| = d f; dividing out the principal
    /// |G|-th root of f leaves a cocycle with values in the |G|-th roots of
    /// unity, where the coboundary equation becomes an integer linear system
    /// mod |G|^2, decided by a Smith normal form solve.
    pub fn is_coboundary(&self, ctx: &ToleranceContext) -> Result<Option<Vec<Complex64>>> {
        let n = self.group.order();
        if n > COBOUNDARY_ORDER_CAP {
            return Err(CoreError::SizeGuard(format!(
                "coboundary decision capped at group order {COBOUNDARY_ORDER_CAP}, got {n}"
            )));
        }
        if !self.is_symmetric(ctx) {
            return Ok(None);
        }
        let elems = self.group.elements();
        let nn = n as i128;
        // Transfer function and its principal |G|-th root.
        let lam0: Vec<Complex64> = elems
            .iter()
            .map(|a| {
                let f: Complex64 = elems.iter().map(|h| self.eval(a, h)).product();
                Complex64::from_polar(1.0, f.arg() / n as f64)
            })
            .collect();
        let reduced = self.div(&TwoCocycle::coboundary(&self.group, &lam0)?)?;
        // Round the reduced cocycle into exponents mod |G| and confirm the
        // rounding is honest before solving.
        let mut w = vec![vec![0i128; n]; n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let z = reduced.eval(a, b);
                let frac = z.arg() / (2.0 * std::f64::consts::PI) * n as f64;
                let k = frac.round().rem_euclid(n as f64) as i128 % nn;
                let back =
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
                if (z - back).norm() > ctx.eq_bound(1.0) {
                    return Err(CoreError::InvalidCocycle(format!(
                        "reduced cocycle is {:.3e} away from a root of unity",
                        (z - back).norm()
                    )));
                }
                w[i][j] = k;
            }
        }
        // Solve x(a) + x(b) - x(ab) = |G| * w(a,b) mod |G|^2.
        let modulus = nn * nn;
        let mut rows = Vec::with_capacity(n * n);
        let mut rhs = Vec::with_capacity(n * n);
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let ab = self.group.index_of(&self.group.add(a, b));
                let mut row = vec![0i128; n];
                row[i] += 1;
                row[j] += 1;
                row[ab] -= 1;
                rows.push(row);
                rhs.push((nn * w[i][j]).rem_euclid(modulus));
            }
        }
        let Some(x) = solve_mod(&rows, &rhs, modulus) else {
            return Ok(None);
        };
        let lam: Vec<Complex64> = lam0
            .iter()
            .zip(&x)
            .map(|(l0, &xi)| {
                l0 * Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * xi as f64 / modulus as f64,
                )
            })
            .collect();
        let check = TwoCocycle::coboundary(&self.group, &lam)?;
        let dist = self.max_distance(&check);
        if dist > ctx.eq_bound(1.0) {
            return Err(CoreError::invariant(
                "trivializing function must reproduce the cocycle",
                dist,
            ));
        }
        Ok(Some(lam))
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn trivial_cocycle_is_coboundary() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let w = TwoCocycle::trivial(&g);
        let lam = w.is_coboundary(&ctx()).unwrap().unwrap();
        let back = TwoCocycle::coboundary(&g, &lam).unwrap();
        assert!(w.max_distance(&back) < 1e-9);
    }

    #[test]
    fn pauli_cocycle_is_not_coboundary() {
        // On Z_2 x Z_2 the bilinear cocycle with exponent e_21 has
        // permutator eps((1,0),(0,1)) = -1, so it cannot be symmetric,
        // hence not a coboundary.
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let w = TwoCocycle::from_bilinear_exponents(&g, &[vec![0, 0], vec![1, 0]], &ctx()).unwrap();
        let eps = w.permutator(&vec![1, 0], &vec![0, 1]);
        assert!((eps + 1.0).norm() < 1e-12);
        assert!(w.is_coboundary(&ctx()).unwrap().is_none());
    }

    #[test]
    fn symmetric_bilinear_cocycle_is_coboundary() {
        // On Z_4, w(a,b) = i^{a b} is symmetric; a trivializing function
        // exists (lam(a) = zeta_8^{a^2} works by direct check, and the solver
        // must find one of its gauge translates).
        let g = FiniteAbelianGroup::cyclic(4);
        let w = TwoCocycle::from_bilinear_exponents(&g, &[vec![1]], &ctx()).unwrap();
        assert!(w.is_symmetric(&ctx()));
        let lam = w.is_coboundary(&ctx()).unwrap().unwrap();
        let back = TwoCocycle::coboundary(&g, &lam).unwrap();
        assert!(w.max_distance(&back) < 1e-9);
    }

    #[test]
    fn coboundaries_are_symmetric_and_recognized() {
        // Hand-built coboundary from an arbitrary phase function on Z_3.
        let g = FiniteAbelianGroup::cyclic(3);
        let lam: Vec<Complex64> = [0.0, 1.3, -0.4]
            .iter()
            .map(|t| Complex64::from_polar(1.0, *t))
            .collect();
        // Normalize so lam(0) = 1 to keep the cocycle normalized.
        let w = TwoCocycle::coboundary(&g, &lam).unwrap();
        w.validate(&ctx()).unwrap();
        assert!(w.is_symmetric(&ctx()));
        let found = w.is_coboundary(&ctx()).unwrap().unwrap();
        let back = TwoCocycle::coboundary(&g, &found).unwrap();
        assert!(w.max_distance(&back) < 1e-9);
    }

    #[test]
    fn bilinear_rejects_ill_defined_exponents() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        // Exponent 1 against L = 6 fails L | m n_i for n = 2.
        assert!(matches!(
            TwoCocycle::from_bilinear_exponents(&g, &[vec![0, 1], vec![0, 0]], &ctx()),
            Err(CoreError::InvalidCocycle(_))
        ));
    }

    #[test]
    fn size_guard_applies() {
        let g = FiniteAbelianGroup::new(vec![128]).unwrap();
        let w = TwoCocycle::trivial(&g);
        assert!(matches!(
            w.is_coboundary(&ctx()),
            Err(CoreError::SizeGuard(_))
        ));
    }
}
