//! Independent brute-force routes used to cross-check the algebraic code.
//!
//! Nothing here calls into the digit combinatorics, the coproduct machinery or
//! the symbolic exponential: binomials are exact big integers, spans are
//! computed from explicit coefficient vectors, and pullback degrees are found
//! by evaluating numeric matrix powers at every F_p-point.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::field::{PrimeField, Scalar};
use crate::linalg::{Matrix, Subspace};
use crate::poly::{MultiPoly, Var};

/// Exact `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Rows `0..=max_n` of Pascal's triangle with exact entries.
pub fn pascal_rows(max_n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
    rows.push(vec![BigUint::one()]);
    for n in 1..=max_n {
        let prev = &rows[n - 1];
        let mut row = Vec::with_capacity(n + 1);
        row.push(BigUint::one());
        for k in 1..n {
            row.push(&prev[k - 1] + &prev[k]);
        }
        row.push(BigUint::one());
        rows.push(row);
    }
    rows
}

pub fn reduce_mod(n: &BigUint, p: u32) -> Scalar {
    (n % p).to_u32().expect("residue fits in u32")
}

/// Largest `e` with `p^e | n`; zero for `n = 0` by convention.
pub fn p_adic_valuation(n: &BigUint, p: u32) -> u32 {
    if n.is_zero() {
        return 0;
    }
    let mut n = n.clone();
    let mut e = 0;
    while (&n % p).is_zero() {
        n /= p;
        e += 1;
    }
    e
}

/// Exponents `m` for which `T^m` lies in the span of `{v_j(T^n)}`, found by
/// row-reducing the explicit coefficient vectors `C(n, j) T^{n-j}`.
pub fn span_support_of_power(n: u64, field: &PrimeField) -> Vec<u64> {
    let p = field.p();
    let len = n as usize + 1;
    let vectors: Vec<Vec<Scalar>> = (0..=n)
        .map(|j| {
            let mut v = vec![0; len];
            v[(n - j) as usize] = reduce_mod(&binomial(n, j), p);
            v
        })
        .collect();
    let span = Subspace::span(field, len, &vectors);
    (0..len)
        .filter(|&m| {
            let mut e = vec![0; len];
            e[m] = 1;
            span.contains(&e)
        })
        .map(|m| m as u64)
        .collect()
}

/// All strictly upper triangular `n x n` matrices over F_p.
pub fn all_strictly_upper(field: &PrimeField, n: usize) -> Vec<Matrix> {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let p = field.p() as usize;
    let total = p.pow(slots.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut m = Matrix::zeros(field, n, n);
            for &(i, j) in &slots {
                m.set(i, j, (code % p) as Scalar);
                code /= p;
            }
            m
        })
        .collect()
}

/// Numeric `exp_B(T)`: entries are polynomials in `T` built from matrix powers.
pub fn numeric_exp(b: &Matrix) -> Vec<Vec<MultiPoly>> {
    let field = b.field();
    let n = b.rows();
    let mut out = vec![vec![MultiPoly::zero(field); n]; n];
    let mut power = Matrix::identity(field, n);
    let mut fact: Scalar = 1;
    for k in 0..field.p() {
        if k > 0 {
            power = power.mul(b);
            fact = field.mul(fact, k);
        }
        let inv = field.inv(fact).expect("k! invertible for k < p");
        let tk = MultiPoly::var(field, Var::T).pow(k as u64);
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let c = field.mul(power.get(i, j), inv);
                if c != 0 {
                    *entry = entry.add(&tk.scale(c));
                }
            }
        }
    }
    out
}

/// Largest T-degree of `f(exp_B(T))` over the given numeric matrices; `f`
/// may use any `x{i}_{j}` with `1 <= i, j <= n`.
pub fn max_pullback_degree(f: &MultiPoly, mats: &[Matrix]) -> u32 {
    mats.iter()
        .map(|b| {
            let e = numeric_exp(b);
            let assign: BTreeMap<Var, MultiPoly> = (0..b.rows())
                .flat_map(|i| (0..b.rows()).map(move |j| (i, j)))
                .map(|(i, j)| (Var::x(i + 1, j + 1), e[i][j].clone()))
                .collect();
            f.substitute_partial(&assign).degree_in(Var::T)
        })
        .max()
        .unwrap_or(0)
}
