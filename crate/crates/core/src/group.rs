//! Finite groups given by multiplication tables.

use crate::error::{Error, Result};

/// Hard limit for exhaustive checks.
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mult_table: Vec<usize>,
    identity_index: usize,
    inverse_table: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Builds a group from a row-major multiplication table, deriving the
    /// identity and inverses and checking every group axiom exhaustively.
    pub fn from_table(order: usize, mult_table: Vec<usize>) -> Result<Self> {
        let labels = (0..order).map(|g| format!("g{g}")).collect();
        Self::from_table_with_labels(order, mult_table, labels)
    }

    pub fn from_table_with_labels(
        order: usize,
        mult_table: Vec<usize>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidGroup("order must be positive".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::InvalidGroup(format!(
                "order {order} exceeds the exhaustive-check limit {MAX_ORDER}"
            )));
        }
        if mult_table.len() != order * order {
            return Err(Error::InvalidGroup(format!(
                "table has {} entries, expected {}",
                mult_table.len(),
                order * order
            )));
        }
        if labels.len() != order {
            return Err(Error::InvalidGroup("label count differs from order".into()));
        }
        if let Some(&bad) = mult_table.iter().find(|&&x| x >= order) {
            return Err(Error::InvalidGroup(format!("entry {bad} out of range")));
        }
        let m = |a: usize, b: usize| mult_table[a * order + b];

        // Latin square.
        for a in 0..order {
            let mut row = vec![false; order];
            let mut col = vec![false; order];
            for b in 0..order {
                row[m(a, b)] = true;
                col[m(b, a)] = true;
            }
            if row.iter().chain(col.iter()).any(|seen| !seen) {
                return Err(Error::InvalidGroup(format!(
                    "row or column {a} is not a permutation"
                )));
            }
        }
        let identity_index = (0..order)
            .find(|&e| (0..order).all(|g| m(e, g) == g && m(g, e) == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let inverse_table = (0..order)
            .map(|g| {
                (0..order)
                    .find(|&x| m(g, x) == identity_index)
                    .expect("Latin square guarantees an inverse")
            })
            .collect();
        Ok(Self {
            order,
            mult_table,
            identity_index,
            inverse_table,
            labels,
        })
    }

    /// ℤ_n with elements 0..n under addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        let table = (0..n * n).map(|i| (i / n + i % n) % n.max(1)).collect();
        let labels = (0..n).map(|k| format!("{k}")).collect();
        Self::from_table_with_labels(n, table, labels)
    }

    /// Symmetric group S_k (k ≤ 4), elements are permutations in
    /// lexicographic order; the product is composition (σ·τ)(x) = σ(τ(x)).
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 4 {
            return Err(Error::InvalidGroup(format!(
                "symmetric group S_{k} not supported (1 ≤ k ≤ 4)"
            )));
        }
        let perms = permutations(k);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let n = perms.len();
        let mut table = vec![0; n * n];
        for (a, sa) in perms.iter().enumerate() {
            for (b, sb) in perms.iter().enumerate() {
                let comp: Vec<usize> = (0..k).map(|x| sa[sb[x]]).collect();
                table[a * n + b] = index(&comp);
            }
        }
        let labels = perms
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect::<String>())
            .collect();
        Self::from_table_with_labels(n, table, labels)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity_index
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult_table[a * self.order + b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse_table[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mult_table(&self) -> &[usize] {
        &self.mult_table
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity_index {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order).fold(1, |acc, g| lcm(acc, self.element_order(g)))
    }

    /// A small generating set, chosen greedily in index order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.closure(&gens);
        for g in 0..self.order {
            if !span[g] {
                gens.push(g);
                span = self.closure(&gens);
            }
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.order];
        seen[self.identity_index] = true;
        let mut stack = vec![self.identity_index];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Every homomorphism G → μ_e (e = exponent), each returned as the list
    /// of root-of-unity exponents k_g with χ(g) = exp(2πi k_g / e).
    ///
    /// Enumerates assignments on a generating set; skipped (returning only the
    /// trivial character) when the search space exceeds `budget`.
    pub fn linear_characters(&self, budget: usize) -> Vec<Vec<usize>> {
        let e = self.exponent();
        let gens = self.generators();
        let space = gens
            .iter()
            .try_fold(1usize, |acc, _| acc.checked_mul(e).filter(|&s| s <= budget));
        let trivial = vec![0; self.order];
        let Some(space) = space else {
            return vec![trivial];
        };
        let mut found = Vec::new();
        for code in 0..space {
            let mut assign = Vec::with_capacity(gens.len());
            let mut c = code;
            for _ in &gens {
                assign.push(c % e);
                c /= e;
            }
            if let Some(values) = self.extend_assignment(&gens, &assign, e) {
                found.push(values);
            }
        }
        found
    }

    fn extend_assignment(&self, gens: &[usize], assign: &[usize], e: usize) -> Option<Vec<usize>> {
        let mut values: Vec<Option<usize>> = vec![None; self.order];
        values[self.identity_index] = Some(0);
        let mut stack = vec![self.identity_index];
        while let Some(x) = stack.pop() {
            let vx = values[x].expect("visited");
            for (&g, &vg) in gens.iter().zip(assign) {
                let y = self.mul(x, g);
                let vy = (vx + vg) % e;
                match values[y] {
                    None => {
                        values[y] = Some(vy);
                        stack.push(y);
                    }
                    Some(v) if v != vy => return None,
                    Some(_) => {}
                }
            }
        }
        let values: Vec<usize> = values.into_iter().map(|v| v.expect("generated")).collect();
        let hom = (0..self.order).all(|a| {
            (0..self.order).all(|b| values[self.mul(a, b)] == (values[a] + values[b]) % e)
        });
        hom.then_some(values)
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_table() {
        let g = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(g.mult_table(), &[0, 1, 1, 0]);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inverse(1), 1);
    }

    #[test]
    fn s3_is_nonabelian_with_two_linear_characters() {
        let g = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.exponent(), 6);
        assert_eq!(g.linear_characters(100_000).len(), 2);
    }

    #[test]
    fn cyclic_groups_have_order_many_characters() {
        for n in 1..=7 {
            let g = FiniteGroup::cyclic(n).unwrap();
            assert_eq!(g.linear_characters(100_000).len(), n);
        }
    }

    #[test]
    fn rejects_non_latin_table() {
        let err = FiniteGroup::from_table(2, vec![0, 0, 1, 1]).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(_)));
    }

    #[test]
    fn rejects_non_associative_quasigroup() {
        // Latin square with identity 0 but not associative (order 5 loop).
        let t = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0,
        ];
        let err = FiniteGroup::from_table(5, t).unwrap_err();
        assert!(err.to_string().contains("associativity"), "{err}");
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(FiniteGroup::from_table(0, vec![]).is_err());
        assert!(FiniteGroup::from_table(2, vec![0, 1, 1]).is_err());
        assert!(FiniteGroup::from_table(2, vec![0, 1, 1, 2]).is_err());
        assert!(FiniteGroup::symmetric(5).is_err());
    }
}
