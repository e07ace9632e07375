//! Exact coefficient functions on the two local models and the smooth-descent
//! decision procedure.
//!
//! The half model is `D^d x S^1 x [0, eps)` with coordinates `(x, theta, s)`;
//! its functions are finite sums `c x^alpha s^(m/2) e^(i k theta)`. The disc
//! model is `D^d x D^2` with complex coordinate `z = u + i v`; its functions
//! are finite sums `c x^alpha z^p zbar^q`. The quotient map identifies
//! `z = sqrt(s) e^(i theta)`.
//!
//! Coefficients live in `Q(i)`. Rescaling the boundary defining function by a
//! non-square rational introduces a symbolic `sqrt(r)` factor carried on every
//! odd-parity term (odd `m`, resp. odd `p + q`); see [`HalfFunc::radical`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CutError, Result};
use crate::rational::{format_q, parse_q, q, q_frac, q_to_f64, sqrt_exact, CRat, Q};

/// Monomial key `x^alpha s^(m/2) e^(i k theta)` on the half model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfMonomial {
    pub alpha: Vec<u32>,
    pub k: i64,
    pub m: u32,
}

/// Monomial key `x^alpha z^p zbar^q` on the disc model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscMonomial {
    pub alpha: Vec<u32>,
    pub p: u32,
    pub q: u32,
}

trait MonoKey: Ord + Clone + fmt::Debug {
    fn times(&self, other: &Self) -> Self;
    fn is_odd(&self) -> bool;
}

fn add_alpha(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl MonoKey for HalfMonomial {
    fn times(&self, other: &Self) -> Self {
        HalfMonomial { alpha: add_alpha(&self.alpha, &other.alpha), k: self.k + other.k, m: self.m + other.m }
    }
    fn is_odd(&self) -> bool {
        self.m % 2 == 1
    }
}

impl MonoKey for DiscMonomial {
    fn times(&self, other: &Self) -> Self {
        DiscMonomial { alpha: add_alpha(&self.alpha, &other.alpha), p: self.p + other.p, q: self.q + other.q }
    }
    fn is_odd(&self) -> bool {
        (self.p + self.q) % 2 == 1
    }
}

/// Sparse polynomial shared by both models.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly<K> {
    dim: usize,
    terms: BTreeMap<K, CRat>,
    radical: Q,
}

impl<K: MonoKey> Poly<K> {
    fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new(), radical: Q::one() }
    }

    fn accumulate(&mut self, key: K, c: CRat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn has_odd(&self) -> bool {
        self.terms.keys().any(MonoKey::is_odd)
    }

    fn normalize(mut self) -> Self {
        if !self.has_odd() {
            self.radical = Q::one();
        } else if let Some(root) = sqrt_exact(&self.radical) {
            if !root.is_one() {
                for (key, c) in self.terms.iter_mut() {
                    if key.is_odd() {
                        *c = c.scale(&root);
                    }
                }
            }
            self.radical = Q::one();
        }
        self
    }

    fn joint_radical(&self, other: &Self) -> Q {
        if self.radical == other.radical || !other.has_odd() {
            self.radical.clone()
        } else if !self.has_odd() {
            other.radical.clone()
        } else {
            panic!("incompatible symbolic radicals sqrt({}) and sqrt({})", self.radical, other.radical)
        }
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "base dimension mismatch in coefficient arithmetic");
    }

    fn add(&self, other: &Self) -> Self {
        self.check_dim(other);
        let mut out = self.clone();
        out.radical = self.joint_radical(other);
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), c.clone());
        }
        out.normalize()
    }

    fn neg(&self) -> Self {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
            radical: self.radical.clone(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        self.check_dim(other);
        let radical = self.joint_radical(other);
        let mut out = Poly::zero(self.dim);
        out.radical = radical.clone();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut c = ca * cb;
                if ka.is_odd() && kb.is_odd() {
                    c = c.scale(&radical);
                }
                out.accumulate(ka.times(kb), c);
            }
        }
        out.normalize()
    }

    fn scale(&self, c: &CRat) -> Self {
        let mut out = Poly::zero(self.dim);
        out.radical = self.radical.clone();
        for (k, v) in &self.terms {
            out.accumulate(k.clone(), v * c);
        }
        out.normalize()
    }

    fn map_terms<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&K, &CRat) -> Option<(K, CRat)>,
    {
        let mut out = Poly::zero(self.dim);
        out.radical = self.radical.clone();
        for (k, c) in &self.terms {
            if let Some((k2, c2)) = f(k, c) {
                out.accumulate(k2, c2);
            }
        }
        out.normalize()
    }

    fn radical_f64(&self) -> f64 {
        q_to_f64(&self.radical).sqrt()
    }
}

fn x_power(x: &[f64], alpha: &[u32]) -> f64 {
    x.iter().zip(alpha).map(|(xi, &a)| xi.powi(a as i32)).product()
}

/// A function on the half model `D^d x S^1 x [0, eps)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FuncRepr", into = "FuncRepr")]
pub struct HalfFunc(Poly<HalfMonomial>);

/// A function on the disc model `D^d x D^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FuncRepr", into = "FuncRepr")]
pub struct DiscFunc(Poly<DiscMonomial>);

impl HalfFunc {
    pub fn zero(dim: usize) -> Self {
        HalfFunc(Poly::zero(dim))
    }

    pub fn constant(dim: usize, c: CRat) -> Self {
        HalfFunc::monomial(dim, vec![0; dim], 0, 0, c)
    }

    pub fn from_int(dim: usize, n: i64) -> Self {
        HalfFunc::constant(dim, CRat::from_int(n))
    }

    pub fn one(dim: usize) -> Self {
        HalfFunc::from_int(dim, 1)
    }

    pub fn monomial(dim: usize, alpha: Vec<u32>, k: i64, m: u32, c: CRat) -> Self {
        assert_eq!(alpha.len(), dim, "multi-index length must equal base dimension");
        let mut p = Poly::zero(dim);
        p.accumulate(HalfMonomial { alpha, k, m }, c);
        HalfFunc(p)
    }

    /// The coordinate function `x_{i+1}` (zero-based index).
    pub fn x(dim: usize, i: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[i] = 1;
        HalfFunc::monomial(dim, alpha, 0, 0, CRat::one())
    }

    pub fn s(dim: usize) -> Self {
        HalfFunc::s_half_power(dim, 2)
    }

    pub fn sqrt_s(dim: usize) -> Self {
        HalfFunc::s_half_power(dim, 1)
    }

    /// `s^(m/2)`.
    pub fn s_half_power(dim: usize, m: u32) -> Self {
        HalfFunc::monomial(dim, vec![0; dim], 0, m, CRat::one())
    }

    /// `e^(i k theta)`.
    pub fn exp_i_theta(dim: usize, k: i64) -> Self {
        HalfFunc::monomial(dim, vec![0; dim], k, 0, CRat::one())
    }

    /// `cos(k theta)`.
    pub fn cos_theta(dim: usize, k: i64) -> Self {
        let half = CRat::real(q_frac(1, 2));
        (&HalfFunc::exp_i_theta(dim, k) + &HalfFunc::exp_i_theta(dim, -k)).scale(&half)
    }

    /// `sin(k theta)`.
    pub fn sin_theta(dim: usize, k: i64) -> Self {
        let minus_half_i = CRat::new(Q::zero(), q_frac(-1, 2));
        (&HalfFunc::exp_i_theta(dim, k) - &HalfFunc::exp_i_theta(dim, -k)).scale(&minus_half_i)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// Symbolic radicand `r`: odd-`m` terms carry an implicit `sqrt(r)` factor.
    /// Equals 1 unless produced by a non-square rescaling.
    pub fn radical(&self) -> &Q {
        &self.0.radical
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HalfMonomial, &CRat)> {
        self.0.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.0.terms.len()
    }

    pub fn coefficient(&self, key: &HalfMonomial) -> Option<&CRat> {
        self.0.terms.get(key)
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    /// Reality: `c_{alpha,-k,m} = conj(c_{alpha,k,m})` for every stored key.
    pub fn is_real(&self) -> bool {
        self.terms().all(|(key, c)| {
            let partner = HalfMonomial { alpha: key.alpha.clone(), k: -key.k, m: key.m };
            self.coefficient(&partner).is_some_and(|p| *p == c.conj())
        })
    }

    pub fn scale(&self, c: &CRat) -> Self {
        HalfFunc(self.0.scale(c))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = HalfFunc::one(self.dim());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Restriction to `s = 0`: keeps only the `m = 0` terms.
    pub fn at_boundary(&self) -> Self {
        HalfFunc(self.0.map_terms(|k, c| (k.m == 0).then(|| (k.clone(), c.clone()))))
    }

    /// Vanishes identically on `s = 0`.
    pub fn vanishes_on_boundary(&self) -> bool {
        self.terms().all(|(k, _)| k.m > 0)
    }

    /// `self / s` when every term carries at least one full power of `s`.
    pub fn divide_by_s(&self) -> Option<Self> {
        if self.terms().any(|(k, _)| k.m < 2) {
            return None;
        }
        Some(HalfFunc(
            self.0.map_terms(|k, c| Some((HalfMonomial { alpha: k.alpha.clone(), k: k.k, m: k.m - 2 }, c.clone()))),
        ))
    }

    pub fn partial_x(&self, i: usize) -> Self {
        HalfFunc(self.0.map_terms(|key, c| {
            let a = key.alpha[i];
            (a > 0).then(|| {
                let mut alpha = key.alpha.clone();
                alpha[i] -= 1;
                (HalfMonomial { alpha, k: key.k, m: key.m }, c.scale(&q(a as i64)))
            })
        }))
    }

    pub fn partial_theta(&self) -> Self {
        HalfFunc(self.0.map_terms(|key, c| (key.k != 0).then(|| (key.clone(), c * &CRat::new(Q::zero(), q(key.k))))))
    }

    /// `d/ds`, using `d(s^(m/2)) = (m/2) s^(m/2 - 1)`. A surviving `m = 1`
    /// term would produce `s^(-1/2)` and is reported as an error.
    pub fn partial_s(&self) -> Result<Self> {
        if let Some((key, _)) = self.terms().find(|(k, _)| k.m == 1) {
            return Err(CutError::SingularDifferential { term: half_term_label(key) });
        }
        Ok(HalfFunc(self.0.map_terms(|key, c| {
            (key.m >= 2).then(|| {
                (HalfMonomial { alpha: key.alpha.clone(), k: key.k, m: key.m - 2 }, c.scale(&q_frac(key.m as i64, 2)))
            })
        })))
    }

    /// Evaluates at `(x, theta, s)`; requires `s >= 0`.
    pub fn eval(&self, x: &[f64], theta: f64, s: f64) -> Result<Complex64> {
        if s < 0.0 {
            return Err(CutError::OutsideDomain(format!("s = {s} < 0 on the half model")));
        }
        if x.len() != self.dim() {
            return Err(CutError::DimMismatch(format!(
                "point has {} x-coordinates, function has {}",
                x.len(),
                self.dim()
            )));
        }
        let root_s = s.sqrt();
        let rad = self.0.radical_f64();
        let mut acc = Complex64::new(0.0, 0.0);
        for (key, c) in self.terms() {
            let mut v = x_power(x, &key.alpha) * root_s.powi(key.m as i32);
            if key.is_odd() {
                v *= rad;
            }
            acc += c.to_c64() * v * Complex64::from_polar(1.0, key.k as f64 * theta);
        }
        Ok(acc)
    }

    fn from_poly(p: Poly<HalfMonomial>) -> Self {
        HalfFunc(p.normalize())
    }
}

impl DiscFunc {
    pub fn zero(dim: usize) -> Self {
        DiscFunc(Poly::zero(dim))
    }

    pub fn constant(dim: usize, c: CRat) -> Self {
        DiscFunc::monomial(dim, vec![0; dim], 0, 0, c)
    }

    pub fn from_int(dim: usize, n: i64) -> Self {
        DiscFunc::constant(dim, CRat::from_int(n))
    }

    pub fn one(dim: usize) -> Self {
        DiscFunc::from_int(dim, 1)
    }

    pub fn monomial(dim: usize, alpha: Vec<u32>, p: u32, q: u32, c: CRat) -> Self {
        assert_eq!(alpha.len(), dim, "multi-index length must equal base dimension");
        let mut poly = Poly::zero(dim);
        poly.accumulate(DiscMonomial { alpha, p, q }, c);
        DiscFunc(poly)
    }

    pub fn x(dim: usize, i: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[i] = 1;
        DiscFunc::monomial(dim, alpha, 0, 0, CRat::one())
    }

    pub fn z(dim: usize) -> Self {
        DiscFunc::monomial(dim, vec![0; dim], 1, 0, CRat::one())
    }

    pub fn zbar(dim: usize) -> Self {
        DiscFunc::monomial(dim, vec![0; dim], 0, 1, CRat::one())
    }

    /// `u = (z + zbar) / 2`.
    pub fn u(dim: usize) -> Self {
        (&DiscFunc::z(dim) + &DiscFunc::zbar(dim)).scale(&CRat::real(q_frac(1, 2)))
    }

    /// `v = (z - zbar) / (2i)`.
    pub fn v(dim: usize) -> Self {
        (&DiscFunc::z(dim) - &DiscFunc::zbar(dim)).scale(&CRat::new(Q::zero(), q_frac(-1, 2)))
    }

    /// `|z|^2 = u^2 + v^2`.
    pub fn abs_z_squared(dim: usize) -> Self {
        DiscFunc::monomial(dim, vec![0; dim], 1, 1, CRat::one())
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn radical(&self) -> &Q {
        &self.0.radical
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiscMonomial, &CRat)> {
        self.0.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.0.terms.len()
    }

    pub fn coefficient(&self, key: &DiscMonomial) -> Option<&CRat> {
        self.0.terms.get(key)
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    /// Reality: `c_{alpha,q,p} = conj(c_{alpha,p,q})`.
    pub fn is_real(&self) -> bool {
        self.terms().all(|(key, c)| {
            let partner = DiscMonomial { alpha: key.alpha.clone(), p: key.q, q: key.p };
            self.coefficient(&partner).is_some_and(|p| *p == c.conj())
        })
    }

    pub fn scale(&self, c: &CRat) -> Self {
        DiscFunc(self.0.scale(c))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = DiscFunc::one(self.dim());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Restriction to `z = 0`.
    pub fn at_origin(&self) -> Self {
        DiscFunc(self.0.map_terms(|k, c| (k.p == 0 && k.q == 0).then(|| (k.clone(), c.clone()))))
    }

    pub fn partial_x(&self, i: usize) -> Self {
        DiscFunc(self.0.map_terms(|key, c| {
            let a = key.alpha[i];
            (a > 0).then(|| {
                let mut alpha = key.alpha.clone();
                alpha[i] -= 1;
                (DiscMonomial { alpha, p: key.p, q: key.q }, c.scale(&q(a as i64)))
            })
        }))
    }

    fn check_differentiable(&self) -> Result<()> {
        if !self.0.radical.is_one() {
            return Err(CutError::ModelMismatch(format!(
                "cannot differentiate in z a disc function carrying sqrt({})",
                self.0.radical
            )));
        }
        Ok(())
    }

    pub fn partial_z(&self) -> Result<Self> {
        self.check_differentiable()?;
        Ok(DiscFunc(self.0.map_terms(|key, c| {
            (key.p > 0)
                .then(|| (DiscMonomial { alpha: key.alpha.clone(), p: key.p - 1, q: key.q }, c.scale(&q(key.p as i64))))
        })))
    }

    pub fn partial_zbar(&self) -> Result<Self> {
        self.check_differentiable()?;
        Ok(DiscFunc(self.0.map_terms(|key, c| {
            (key.q > 0)
                .then(|| (DiscMonomial { alpha: key.alpha.clone(), p: key.p, q: key.q - 1 }, c.scale(&q(key.q as i64))))
        })))
    }

    /// `d/du = d/dz + d/dzbar`.
    pub fn partial_u(&self) -> Result<Self> {
        Ok(&self.partial_z()? + &self.partial_zbar()?)
    }

    /// `d/dv = i (d/dz - d/dzbar)`.
    pub fn partial_v(&self) -> Result<Self> {
        Ok((&self.partial_z()? - &self.partial_zbar()?).scale(&CRat::i()))
    }

    /// Evaluates at `(x, u, v)`.
    pub fn eval(&self, x: &[f64], u: f64, v: f64) -> Result<Complex64> {
        if x.len() != self.dim() {
            return Err(CutError::DimMismatch(format!(
                "point has {} x-coordinates, function has {}",
                x.len(),
                self.dim()
            )));
        }
        let z = Complex64::new(u, v);
        let zb = z.conj();
        let rad = self.0.radical_f64();
        let mut acc = Complex64::new(0.0, 0.0);
        for (key, c) in self.terms() {
            let mut v = c.to_c64() * x_power(x, &key.alpha) * z.powu(key.p) * zb.powu(key.q);
            if key.is_odd() {
                v *= rad;
            }
            acc += v;
        }
        Ok(acc)
    }
}

macro_rules! impl_ring_ops {
    ($t:ident) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                $t(self.0.add(&rhs.0))
            }
        }
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                $t(self.0.add(&rhs.0.neg()))
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for &$t {
            type Output = $t;
            fn mul(self, rhs: &$t) -> $t {
                $t(self.0.mul(&rhs.0))
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                $t(self.0.neg())
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

impl_ring_ops!(HalfFunc);
impl_ring_ops!(DiscFunc);

/// Outcome of the descent decision for one half-model function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentVerdict {
    pub descends: bool,
    pub image: Option<DiscFunc>,
    pub offending_modes: Vec<HalfMonomial>,
}

/// `s^(m/2) e^(i k theta)` equals `z^((m+k)/2) zbar^((m-k)/2)`, which is smooth
/// on the disc exactly when both exponents are nonnegative integers.
pub fn mono_descends(m: u32, k: i64) -> bool {
    let m = m as i64;
    m >= k.abs() && (m - k) % 2 == 0
}

/// Decides whether `f` is the pullback of a smooth disc function under
/// `(x, theta, s) -> (x, sqrt(s) e^(i theta))`, term by term.
pub fn descend_function(f: &HalfFunc) -> DescentVerdict {
    let offending_modes: Vec<HalfMonomial> =
        f.terms().filter(|(k, _)| !mono_descends(k.m, k.k)).map(|(k, _)| k.clone()).collect();
    if !offending_modes.is_empty() {
        return DescentVerdict { descends: false, image: None, offending_modes };
    }
    let mut image = Poly::zero(f.dim());
    image.radical = f.radical().clone();
    for (key, c) in f.terms() {
        let m = key.m as i64;
        let p = ((m + key.k) / 2) as u32;
        let q = ((m - key.k) / 2) as u32;
        image.accumulate(DiscMonomial { alpha: key.alpha.clone(), p, q }, c.clone());
    }
    DescentVerdict { descends: true, image: Some(DiscFunc(image.normalize())), offending_modes }
}

/// Pullback `x^alpha z^p zbar^q -> x^alpha s^((p+q)/2) e^(i (p-q) theta)`.
pub fn lift_function(g: &DiscFunc) -> HalfFunc {
    let mut out = Poly::zero(g.dim());
    out.radical = g.radical().clone();
    for (key, c) in g.terms() {
        out.accumulate(
            HalfMonomial { alpha: key.alpha.clone(), k: key.p as i64 - key.q as i64, m: key.p + key.q },
            c.clone(),
        );
    }
    HalfFunc::from_poly(out)
}

/// Smooth up to `s = 0` within this class: no half-integer powers of `s`.
pub fn is_smooth_on_half(f: &HalfFunc) -> bool {
    f.terms().all(|(k, _)| k.m % 2 == 0)
}

/// Invariant under the rotation `theta -> theta + a`.
pub fn is_invariant(f: &HalfFunc) -> bool {
    f.terms().all(|(k, _)| k.k == 0)
}

/// Substitutes `s -> lambda s`. Odd powers pick up `sqrt(lambda)`, which is
/// folded into the coefficients when `lambda` is a rational square and kept
/// symbolically otherwise.
pub fn rescale_boundary_function(f: &HalfFunc, lambda: &Q) -> Result<HalfFunc> {
    if !lambda.is_positive() {
        return Err(CutError::NonPositiveScale(format_q(lambda)));
    }
    let root = sqrt_exact(lambda);
    let mut out = Poly::zero(f.dim());
    out.radical = match &root {
        Some(_) => f.radical().clone(),
        None if f.0.has_odd() => f.radical() * lambda,
        None => Q::one(),
    };
    for (key, c) in f.terms() {
        let mut factor = num_traits::pow(lambda.clone(), (key.m / 2) as usize);
        if key.is_odd() {
            if let Some(r) = &root {
                factor *= r;
            }
        }
        out.accumulate(key.clone(), c.scale(&factor));
    }
    Ok(HalfFunc::from_poly(out))
}

fn power_label(var: &str, e: u32) -> Option<String> {
    match e {
        0 => None,
        1 => Some(var.to_string()),
        _ => Some(format!("{var}^{e}")),
    }
}

fn x_labels(alpha: &[u32]) -> Vec<String> {
    alpha.iter().enumerate().filter_map(|(i, &a)| power_label(&format!("x{}", i + 1), a)).collect()
}

fn half_term_label(key: &HalfMonomial) -> String {
    let mut parts = x_labels(&key.alpha);
    match key.m {
        0 => {}
        m if m % 2 == 0 => parts.extend(power_label("s", m / 2)),
        m => parts.push(format!("s^({m}/2)")),
    }
    match key.k {
        0 => {}
        1 => parts.push("e^(i*theta)".into()),
        -1 => parts.push("e^(-i*theta)".into()),
        k => parts.push(format!("e^({k}i*theta)")),
    }
    parts.join("*")
}

fn disc_term_label(key: &DiscMonomial) -> String {
    let mut parts = x_labels(&key.alpha);
    parts.extend(power_label("z", key.p));
    parts.extend(power_label("zbar", key.q));
    parts.join("*")
}

pub(crate) fn join_term(coeff: &CRat, body: &str) -> String {
    if body.is_empty() {
        coeff.to_string()
    } else if coeff.is_one() {
        body.to_string()
    } else if (-coeff).is_one() {
        format!("-{body}")
    } else {
        format!("{coeff}*{body}")
    }
}

fn fmt_poly<K: MonoKey>(f: &mut fmt::Formatter<'_>, poly: &Poly<K>, label: impl Fn(&K) -> String) -> fmt::Result {
    if poly.terms.is_empty() {
        return write!(f, "0");
    }
    let parts: Vec<String> = poly
        .terms
        .iter()
        .map(|(k, c)| {
            let mut body = label(k);
            if k.is_odd() && !poly.radical.is_one() {
                let r = format!("sqrt({})", poly.radical);
                body = if body.is_empty() { r } else { format!("{r}*{body}") };
            }
            join_term(c, &body)
        })
        .collect();
    write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
}

impl fmt::Display for HalfFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.0, half_term_label)
    }
}

/// Monomial `x^alpha u^a v^b` used for display in real coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct UvMonomial {
    alpha: Vec<u32>,
    a: u32,
    b: u32,
}

impl MonoKey for UvMonomial {
    fn times(&self, other: &Self) -> Self {
        UvMonomial { alpha: add_alpha(&self.alpha, &other.alpha), a: self.a + other.a, b: self.b + other.b }
    }
    fn is_odd(&self) -> bool {
        (self.a + self.b) % 2 == 1
    }
}

impl DiscFunc {
    fn to_uv(&self) -> Poly<UvMonomial> {
        let unit = |a, b| UvMonomial { alpha: vec![0; self.dim()], a, b };
        let linear = |sign: i64| {
            let mut p = Poly::zero(self.dim());
            p.accumulate(unit(1, 0), CRat::one());
            p.accumulate(unit(0, 1), CRat::new(Q::zero(), q(sign)));
            p
        };
        let (z, zb) = (linear(1), linear(-1));
        let mut out = Poly::zero(self.dim());
        for (key, c) in self.terms() {
            let mut t = Poly::zero(self.dim());
            t.accumulate(UvMonomial { alpha: key.alpha.clone(), a: 0, b: 0 }, c.clone());
            for _ in 0..key.p {
                t = t.mul(&z);
            }
            for _ in 0..key.q {
                t = t.mul(&zb);
            }
            for (k, v) in t.terms {
                out.accumulate(k, v);
            }
        }
        out.radical = self.radical().clone();
        out
    }

    /// Renders the function in complex coordinates (`z`, `zbar`); `Display`
    /// uses real coordinates `(u, v)`.
    pub fn to_z_string(&self) -> String {
        struct Z<'a>(&'a DiscFunc);
        impl fmt::Display for Z<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt_poly(f, &self.0 .0, disc_term_label)
            }
        }
        Z(self).to_string()
    }
}

fn uv_term_label(key: &UvMonomial) -> String {
    let mut parts = x_labels(&key.alpha);
    parts.extend(power_label("u", key.a));
    parts.extend(power_label("v", key.b));
    parts.join("*")
}

impl fmt::Display for DiscFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(f, &self.to_uv(), uv_term_label)
    }
}

impl fmt::Display for HalfMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = half_term_label(self);
        write!(f, "{}", if body.is_empty() { "1".into() } else { body })
    }
}

// JSON: {"dim": d, "terms": [{"alpha": [...], "k": k, "m": m, "re": "p/q", "im": "p/q"}]}
// for the half model and {"alpha", "p", "q", "re", "im"} terms for the disc model.

#[derive(Serialize, Deserialize)]
struct TermRepr {
    alpha: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<u32>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct FuncRepr {
    dim: usize,
    terms: Vec<TermRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radical: Option<String>,
}

fn repr_from<K: MonoKey>(poly: &Poly<K>, key_fields: impl Fn(&K, &mut TermRepr)) -> FuncRepr {
    let terms = poly
        .terms
        .iter()
        .map(|(k, c)| {
            let mut t = TermRepr {
                alpha: vec![],
                k: None,
                m: None,
                p: None,
                q: None,
                re: format_q(&c.re),
                im: format_q(&c.im),
            };
            key_fields(k, &mut t);
            t
        })
        .collect();
    FuncRepr { dim: poly.dim, terms, radical: (!poly.radical.is_one()).then(|| format_q(&poly.radical)) }
}

fn poly_from_repr<K: MonoKey>(
    repr: FuncRepr,
    key_of: impl Fn(&TermRepr) -> Result<K>,
    alpha_of: impl Fn(&K) -> &[u32],
) -> Result<Poly<K>> {
    let mut poly = Poly::zero(repr.dim);
    if let Some(r) = &repr.radical {
        let r = parse_q(r)?;
        if !r.is_positive() {
            return Err(CutError::Parse(format!("radical must be positive, got {r}")));
        }
        poly.radical = r;
    }
    for t in &repr.terms {
        let key = key_of(t)?;
        if alpha_of(&key).len() != repr.dim {
            return Err(CutError::Parse(format!("multi-index {:?} does not match dim {}", t.alpha, repr.dim)));
        }
        poly.accumulate(key, CRat::parse(&t.re, &t.im)?);
    }
    Ok(poly.normalize())
}

impl From<HalfFunc> for FuncRepr {
    fn from(f: HalfFunc) -> Self {
        repr_from(&f.0, |k, t| {
            t.alpha = k.alpha.clone();
            t.k = Some(k.k);
            t.m = Some(k.m);
        })
    }
}

impl TryFrom<FuncRepr> for HalfFunc {
    type Error = CutError;
    fn try_from(repr: FuncRepr) -> Result<Self> {
        let poly = poly_from_repr(
            repr,
            |t| match (t.k, t.m) {
                (Some(k), Some(m)) => Ok(HalfMonomial { alpha: t.alpha.clone(), k, m }),
                _ => Err(CutError::Parse("half-model term needs integer fields `k` and `m`".into())),
            },
            |k: &HalfMonomial| &k.alpha,
        )?;
        Ok(HalfFunc(poly))
    }
}

impl From<DiscFunc> for FuncRepr {
    fn from(f: DiscFunc) -> Self {
        repr_from(&f.0, |k, t| {
            t.alpha = k.alpha.clone();
            t.p = Some(k.p);
            t.q = Some(k.q);
        })
    }
}

impl TryFrom<FuncRepr> for DiscFunc {
    type Error = CutError;
    fn try_from(repr: FuncRepr) -> Result<Self> {
        let poly = poly_from_repr(
            repr,
            |t| match (t.p, t.q) {
                (Some(p), Some(q)) => Ok(DiscMonomial { alpha: t.alpha.clone(), p, q }),
                _ => Err(CutError::Parse("disc-model term needs integer fields `p` and `q`".into())),
            },
            |k: &DiscMonomial| &k.alpha,
        )?;
        Ok(DiscFunc(poly))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> CRat {
        CRat::from_int(n)
    }

    #[test]
    fn mono_descends_examples() {
        assert!(mono_descends(1, 1));
        assert!(mono_descends(2, 0));
        assert!(!mono_descends(1, 3));
        assert!(!mono_descends(2, 1));
        assert!(mono_descends(3, -1));
    }

    #[test]
    fn sqrt_s_e_i_theta_descends_to_z() {
        let f = HalfFunc::monomial(0, vec![], 1, 1, c(1));
        let v = descend_function(&f);
        assert!(v.descends);
        assert_eq!(v.image, Some(DiscFunc::z(0)));
        assert!(v.offending_modes.is_empty());
    }

    #[test]
    fn dependence_on_action_example_fails() {
        // g(e^{i theta}) sqrt(s) cos(theta) with g(w) = w
        let f = &(&HalfFunc::exp_i_theta(0, 1) * &HalfFunc::sqrt_s(0)) * &HalfFunc::cos_theta(0, 1);
        let v = descend_function(&f);
        assert!(!v.descends);
        assert!(v.image.is_none());
        assert!(v.offending_modes.contains(&HalfMonomial { alpha: vec![], k: 2, m: 1 }));
    }

    #[test]
    fn s_cos_theta_fails_both_modes() {
        let f = &HalfFunc::s(0) * &HalfFunc::cos_theta(0, 1);
        let v = descend_function(&f);
        assert!(!v.descends);
        assert_eq!(v.offending_modes.len(), 2);
        assert!(f.is_real());
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_function(&DiscFunc::z(0)), HalfFunc::monomial(0, vec![], 1, 1, c(1)));
        let u = DiscFunc::u(0);
        let v = DiscFunc::v(0);
        assert_eq!(lift_function(&(&(&u * &u) + &(&v * &v))), HalfFunc::s(0));
        let g = &(&DiscFunc::z(0) * &DiscFunc::z(0)) * &DiscFunc::zbar(0);
        assert_eq!(lift_function(&g), HalfFunc::monomial(0, vec![], 1, 3, c(1)));
    }

    #[test]
    fn smoothness_and_invariance_flags() {
        assert!(is_smooth_on_half(&(&HalfFunc::s(0) * &HalfFunc::exp_i_theta(0, 1))));
        assert!(!is_smooth_on_half(&HalfFunc::sqrt_s(0)));
        assert!(is_invariant(&HalfFunc::s(1)));
        assert!(!is_invariant(&HalfFunc::exp_i_theta(1, 1)));
    }

    #[test]
    fn partial_s_rejects_sqrt() {
        let err = HalfFunc::sqrt_s(0).partial_s().unwrap_err();
        assert_eq!(err.kind(), "SingularDifferential");
        let d = HalfFunc::s_half_power(0, 3).partial_s().unwrap();
        assert_eq!(d, HalfFunc::monomial(0, vec![], 0, 1, CRat::real(q_frac(3, 2))));
    }

    #[test]
    fn rescale_examples() {
        let f = HalfFunc::monomial(0, vec![], 1, 1, c(1));
        let g = rescale_boundary_function(&f, &q(4)).unwrap();
        assert_eq!(g, f.scale(&c(2)));
        assert_eq!(descend_function(&g).image, Some(DiscFunc::z(0).scale(&c(2))));
        assert_eq!(rescale_boundary_function(&HalfFunc::s(0), &q(1)).unwrap(), HalfFunc::s(0));
        assert!(rescale_boundary_function(&f, &q(0)).is_err());
        assert!(rescale_boundary_function(&f, &q(-1)).is_err());
    }

    #[test]
    fn non_square_rescale_keeps_symbolic_radical() {
        let f = &HalfFunc::sqrt_s(0) + &HalfFunc::s(0);
        let g = rescale_boundary_function(&f, &q(2)).unwrap();
        assert_eq!(g.radical(), &q(2));
        // a second rescale by 2 makes the radical a square again: sqrt(4) = 2
        let h = rescale_boundary_function(&g, &q(2)).unwrap();
        assert!(h.radical().is_one());
        assert_eq!(h, rescale_boundary_function(&f, &q(4)).unwrap());
        let val = g.eval(&[], 0.0, 0.25).unwrap();
        assert!((val.re - (2f64.sqrt() * 0.5 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let f = HalfFunc::monomial(1, vec![2], -1, 3, CRat::new(q_frac(1, 2), q(-3)));
        let js = serde_json::to_value(&f).unwrap();
        assert_eq!(
            js,
            serde_json::json!({"dim": 1, "terms": [{"alpha": [2], "k": -1, "m": 3, "re": "1/2", "im": "-3"}]})
        );
        let back: HalfFunc = serde_json::from_value(js).unwrap();
        assert_eq!(back, f);
        let bad = serde_json::json!({"dim": 2, "terms": [{"alpha": [1], "k": 0, "m": 0, "re": "1", "im": "0"}]});
        assert!(serde_json::from_value::<HalfFunc>(bad).is_err());
    }

    #[test]
    fn display_is_readable() {
        let f = &HalfFunc::s(1) + &HalfFunc::x(1, 0).scale(&c(2));
        assert_eq!(f.to_string(), "s + 2*x1");
        assert_eq!(DiscFunc::u(0).to_string(), "u");
        assert_eq!(DiscFunc::u(0).to_z_string(), "1/2*zbar + 1/2*z");
        assert_eq!(DiscFunc::abs_z_squared(0).to_string(), "v^2 + u^2");
    }
}
