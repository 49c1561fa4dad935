//! Sparse multivariate polynomials over F_p in a fixed variable alphabet.
//!
//! Variables are `T` (the additive-group coordinate), `x{i}_{j}` (matrix
//! coordinates) and `b{i}_{j}` (entries of a generic nilpotent matrix). Each
//! variable carries a copy index: copy 0 is the left tensor factor, copy 1
//! (printed with one prime, `T'`) the right factor, copy 2 (`T''`) a third
//! factor when checking coassociativity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    T,
    X,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub copy: u8,
    pub kind: VarKind,
    pub i: u8,
    pub j: u8,
}

impl Var {
    pub const T: Var = Var {
        copy: 0,
        kind: VarKind::T,
        i: 0,
        j: 0,
    };

    pub fn x(i: usize, j: usize) -> Var {
        Var {
            copy: 0,
            kind: VarKind::X,
            i: i as u8,
            j: j as u8,
        }
    }

    pub fn b(i: usize, j: usize) -> Var {
        Var {
            copy: 0,
            kind: VarKind::B,
            i: i as u8,
            j: j as u8,
        }
    }

    pub fn with_copy(self, copy: u8) -> Var {
        Var { copy, ..self }
    }

    pub fn primed(self) -> Var {
        self.with_copy(1)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::T => write!(f, "T")?,
            VarKind::X => write!(f, "x{}_{}", self.i, self.j)?,
            VarKind::B => write!(f, "b{}_{}", self.i, self.j)?,
        }
        for _ in 0..self.copy {
            write!(f, "'")?;
        }
        Ok(())
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Var> {
        let bad = || Error::Parse(format!("unknown variable {s:?}"));
        let body = s.trim_end_matches('\'');
        let copy = (s.len() - body.len()) as u8;
        if copy > 2 {
            return Err(bad());
        }
        if body == "T" {
            return Ok(Var::T.with_copy(copy));
        }
        let kind = match body.chars().next() {
            Some('x') => VarKind::X,
            Some('b') => VarKind::B,
            _ => return Err(bad()),
        };
        let (i, j) = body[1..].split_once('_').ok_or_else(bad)?;
        let i: u8 = i.parse().map_err(|_| bad())?;
        let j: u8 = j.parse().map_err(|_| bad())?;
        if i == 0 || j == 0 {
            return Err(bad());
        }
        Ok(Var { copy, kind, i, j })
    }
}

/// A monomial: variables with positive exponents, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn power(v: Var, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map_or(0, |idx| self.0[idx].1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    std::cmp::Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    std::cmp::Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    std::cmp::Ordering::Equal => {
                        out.push((va, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&x)) => {
                    out.push(x);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial(out)
    }

    /// Splits off the power of `v`.
    pub fn without(&self, v: Var) -> (Monomial, u32) {
        let e = self.exponent(v);
        (Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect()), e)
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)))
    }

    /// Splits into the part with variables satisfying `pred` and the rest.
    pub fn split(&self, pred: impl Fn(Var) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|&&(v, _)| pred(v));
        (Monomial(a), Monomial(b))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial in graded-lex canonical order; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: PrimeField,
    terms: BTreeMap<Monomial, Scalar>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl MultiPoly {
    pub fn zero(field: &PrimeField) -> Self {
        MultiPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &PrimeField, c: Scalar) -> Self {
        Self::term(field, Monomial::one(), c)
    }

    pub fn one(field: &PrimeField) -> Self {
        Self::constant(field, 1)
    }

    pub fn var(field: &PrimeField, v: Var) -> Self {
        Self::term(field, Monomial::var(v), 1)
    }

    pub fn term(field: &PrimeField, m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(field);
        let c = c % field.p();
        if c != 0 {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, Scalar)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one())
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|&(v, _)| v))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c == 0 {
            return;
        }
        let f = &self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = f.add(*e.get(), c);
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_field(&self, other: &MultiPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p(), other.field.p()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_field(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_field(other)?;
        let mut out = MultiPoly::zero(&self.field);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Sum; panics on operands over different fields (see [`MultiPoly::try_add`]).
    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.try_add(other).expect("polynomials over different fields")
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    /// Product; panics on operands over different fields (see [`MultiPoly::try_mul`]).
    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.try_mul(other).expect("polynomials over different fields")
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, c: Scalar) -> MultiPoly {
        let c = c % self.field.p();
        if c == 0 {
            return MultiPoly::zero(&self.field);
        }
        MultiPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &a)| (m.clone(), self.field.mul(a, c)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: Scalar) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.field);
        for (mm, &a) in &self.terms {
            out.add_term(mm.mul(m), self.field.mul(a, c));
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The p-th power; over F_p this raises every variable to the p-th power.
    pub fn frobenius(&self) -> MultiPoly {
        let p = self.field.p();
        let mut out = MultiPoly::zero(&self.field);
        for (m, &c) in &self.terms {
            out.add_term(
                Monomial(m.pairs().iter().map(|&(v, e)| (v, e * p)).collect()),
                c,
            );
        }
        out
    }

    /// Coefficient of `v^k`, as a polynomial free of `v`.
    pub fn coeff_of_power(&self, v: Var, k: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.field);
        for (m, &c) in &self.terms {
            let (rest, e) = m.without(v);
            if e == k {
                out.add_term(rest, c);
            }
        }
        out
    }

    /// All nonzero coefficients of powers of `v`, keyed by exponent.
    pub fn collect_in(&self, v: Var) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let (rest, e) = m.without(v);
            out.entry(e)
                .or_insert_with(|| MultiPoly::zero(&self.field))
                .add_term(rest, c);
        }
        out
    }

    /// Ring homomorphism sending each variable to its image. Every variable
    /// of `self` must be assigned.
    pub fn substitute(&self, assignment: &BTreeMap<Var, MultiPoly>) -> Result<MultiPoly> {
        for v in self.variables() {
            if !assignment.contains_key(&v) {
                return Err(Error::MissingAssignment(v.to_string()));
            }
        }
        Ok(self.substitute_partial(assignment))
    }

    /// Like [`MultiPoly::substitute`] but unassigned variables are left in place.
    pub fn substitute_partial(&self, assignment: &BTreeMap<Var, MultiPoly>) -> MultiPoly {
        let mut powers: HashMap<(Var, u32), MultiPoly> = HashMap::new();
        let mut out = MultiPoly::zero(&self.field);
        for (m, &c) in &self.terms {
            let mut acc = MultiPoly::constant(&self.field, c);
            for &(v, e) in m.pairs() {
                let factor = match assignment.get(&v) {
                    Some(img) => powers
                        .entry((v, e))
                        .or_insert_with(|| img.pow(e as u64))
                        .clone(),
                    None => MultiPoly::term(&self.field, Monomial::power(v, e), 1),
                };
                acc = acc.mul(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        out
    }

    pub fn eval_at(&self, point: &BTreeMap<Var, Scalar>) -> Result<Scalar> {
        let f = &self.field;
        let mut acc = 0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for &(v, e) in m.pairs() {
                let x = point
                    .get(&v)
                    .ok_or_else(|| Error::MissingAssignment(v.to_string()))?;
                t = f.mul(t, f.pow(*x, e as u64));
            }
            acc = f.add(acc, t);
        }
        Ok(acc)
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.field);
        for (m, &c) in &self.terms {
            out.add_term(m.map_vars(&f), c);
        }
        out
    }

    /// Moves every variable to the given tensor copy.
    pub fn to_copy(&self, copy: u8) -> MultiPoly {
        self.map_vars(|v| v.with_copy(copy))
    }

    /// Drops every term rejected by `keep`.
    pub fn retain_terms(&self, keep: impl Fn(&Monomial) -> bool) -> MultiPoly {
        MultiPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    /// Parses the `c*v1^e1*v2^e2 + ...` text form, reducing coefficients mod p.
    pub fn parse(field: &PrimeField, s: &str) -> Result<MultiPoly> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = MultiPoly::zero(field);
        // split on + and -, keeping the sign with each term
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        for ch in compact.chars() {
            if ch == '+' || ch == '-' {
                if !cur.is_empty() {
                    terms.push((negative, std::mem::take(&mut cur)));
                } else if ch == '+' && !terms.is_empty() {
                    return Err(Error::Parse(format!("dangling operator in {s:?}")));
                }
                negative = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(Error::Parse(format!("trailing operator in {s:?}")));
        }
        terms.push((negative, cur));
        for (neg, t) in terms {
            let mut coeff: Scalar = 1;
            let mut mono = Monomial::one();
            for factor in t.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {t:?}")));
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    let n: u64 = factor
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad integer {factor:?}")))?;
                    coeff = field.mul(coeff, field.reduce_u64(n));
                } else {
                    let (name, e) = match factor.split_once('^') {
                        Some((name, e)) => (
                            name,
                            e.parse::<u32>()
                                .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?,
                        ),
                        None => (factor, 1),
                    };
                    mono = mono.mul(&Monomial::power(name.parse()?, e));
                }
            }
            if neg {
                coeff = field.neg(coeff);
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, &c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match (c, m.is_one()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{m}")?,
                _ => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

/// An element of C ⊗ C, written with copy-0 variables on the left and
/// copy-1 (primed) variables on the right.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorPoly(MultiPoly);

impl fmt::Debug for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TensorPoly {
    /// `left ⊗ right`; both arguments are given in unprimed variables.
    pub fn simple(left: &MultiPoly, right: &MultiPoly) -> Self {
        TensorPoly(left.to_copy(0).mul(&right.to_copy(1)))
    }

    /// Wraps a polynomial already written in copy-0/copy-1 variables.
    pub fn from_raw(p: MultiPoly) -> Result<Self> {
        if let Some(v) = p.variables().into_iter().find(|v| v.copy > 1) {
            return Err(Error::ForeignVariable {
                var: v.to_string(),
                context: "a two-factor tensor".into(),
            });
        }
        Ok(TensorPoly(p))
    }

    pub fn as_poly(&self) -> &MultiPoly {
        &self.0
    }

    pub fn into_poly(self) -> MultiPoly {
        self.0
    }

    pub fn add(&self, other: &TensorPoly) -> TensorPoly {
        TensorPoly(self.0.add(&other.0))
    }

    pub fn mul(&self, other: &TensorPoly) -> TensorPoly {
        TensorPoly(self.0.mul(&other.0))
    }

    /// Terms as `(coefficient, left monomial, right monomial)`, both unprimed.
    pub fn split_terms(&self) -> Vec<(Scalar, Monomial, Monomial)> {
        self.0
            .terms()
            .map(|(m, c)| {
                let (l, r) = m.split(|v| v.copy == 0);
                (c, l, r.map_vars(|v| v.with_copy(0)))
            })
            .collect()
    }

    /// Largest total degree seen in either tensor leg.
    pub fn leg_degrees(&self) -> (u32, u32) {
        self.split_terms()
            .iter()
            .fold((0, 0), |(a, b), (_, l, r)| (a.max(l.degree()), b.max(r.degree())))
    }
}

/// A matrix of polynomials, used for coactions and truncated exponentials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zeros(field: &PrimeField, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            field: field.clone(),
            rows,
            cols,
            entries: vec![MultiPoly::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, MultiPoly::one(field));
        }
        m
    }

    pub fn from_fn(
        field: &PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> MultiPoly,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        PolyMatrix {
            field: field.clone(),
            rows,
            cols,
            entries,
        }
    }

    /// Constant polynomial matrix from a scalar matrix.
    pub fn from_matrix(m: &Matrix) -> Self {
        Self::from_fn(m.field(), m.rows(), m.cols(), |i, j| {
            MultiPoly::constant(m.field(), m.get(i, j))
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: MultiPoly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[MultiPoly] {
        &self.entries
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(&self.field, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(MultiPoly::zero(&self.field), |acc, k| {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    acc.add(&a.mul(b))
                }
            })
        })
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).add(other.get(i, j))
        })
    }

    pub fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> PolyMatrix {
        PolyMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&MultiPoly) -> Result<MultiPoly>) -> Result<PolyMatrix> {
        Ok(PolyMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn max_total_degree(&self) -> u32 {
        self.entries.iter().map(MultiPoly::total_degree).max().unwrap_or(0)
    }
}
