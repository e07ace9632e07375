//! Exterior algebra over the exact coefficient rings of both local models.
//!
//! Basis order is `(x1..xd, theta, s)` on the half model and `(x1..xd, u, v)`
//! on the disc model; a term key is a strictly increasing list of basis
//! indices and every sign below follows from that order.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CutError, Result};
use crate::funcalg::{DiscFunc, HalfFunc};
use crate::rational::CRat;

/// Which local model a form lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Half,
    Disc,
}

impl Model {
    /// Name of coordinate `idx` for base dimension `dim`.
    pub fn coord_name(self, dim: usize, idx: usize) -> String {
        if idx < dim {
            return format!("x{}", idx + 1);
        }
        match (self, idx - dim) {
            (Model::Half, 0) => "theta".into(),
            (Model::Half, 1) => "s".into(),
            (Model::Disc, 0) => "u".into(),
            (Model::Disc, 1) => "v".into(),
            _ => format!("?{idx}"),
        }
    }

    /// Inverse of [`Model::coord_name`].
    pub fn coord_index(self, dim: usize, name: &str) -> Result<usize> {
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                if (1..=dim).contains(&i) {
                    return Ok(i - 1);
                }
            }
        }
        match (self, name) {
            (Model::Half, "theta") | (Model::Disc, "u") => Ok(dim),
            (Model::Half, "s") | (Model::Disc, "v") => Ok(dim + 1),
            _ => Err(CutError::UnknownDirection(name.to_string())),
        }
    }

    pub fn key_names(self, dim: usize, key: &[usize]) -> Vec<String> {
        key.iter().map(|&i| format!("d{}", self.coord_name(dim, i))).collect()
    }

    /// Parses covector names such as `["dx1", "dtheta"]` into a sorted key and
    /// the sign of the sorting permutation. Repeated names give sign 0.
    pub fn parse_key<S: AsRef<str>>(self, dim: usize, names: &[S]) -> Result<(Vec<usize>, i32)> {
        let mut idx = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let coord = n.strip_prefix('d').ok_or_else(|| CutError::UnknownDirection(n.to_string()))?;
            idx.push(self.coord_index(dim, coord)?);
        }
        Ok(sort_with_sign(idx))
    }
}

fn sort_with_sign(mut idx: Vec<usize>) -> (Vec<usize>, i32) {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in 0..idx.len() - 1 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            } else if idx[j] == idx[j + 1] {
                return (idx, 0);
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        sign = 0;
    }
    (idx, sign)
}

/// Coefficient ring of a model.
pub trait Coefficient:
    Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Serialize + DeserializeOwned + Send + Sync
{
    const MODEL: Model;
    fn zero_fn(dim: usize) -> Self;
    fn from_crat(dim: usize, c: CRat) -> Self;
    fn base_dim(&self) -> usize;
    fn is_zero_fn(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn real_fn(&self) -> bool;
    fn term_total(&self) -> usize;
    /// Partial derivative along basis coordinate `idx`.
    fn partial(&self, idx: usize) -> Result<Self>;
    /// Evaluation at a point given in basis order.
    fn eval_point(&self, point: &[f64]) -> Result<Complex64>;
}

impl Coefficient for HalfFunc {
    const MODEL: Model = Model::Half;
    fn zero_fn(dim: usize) -> Self {
        HalfFunc::zero(dim)
    }
    fn from_crat(dim: usize, c: CRat) -> Self {
        HalfFunc::constant(dim, c)
    }
    fn base_dim(&self) -> usize {
        self.dim()
    }
    fn is_zero_fn(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn real_fn(&self) -> bool {
        self.is_real()
    }
    fn term_total(&self) -> usize {
        self.term_count()
    }
    fn partial(&self, idx: usize) -> Result<Self> {
        let d = self.dim();
        match idx {
            i if i < d => Ok(self.partial_x(i)),
            i if i == d => Ok(self.partial_theta()),
            i if i == d + 1 => self.partial_s(),
            _ => Err(CutError::UnknownDirection(format!("basis index {idx}"))),
        }
    }
    fn eval_point(&self, point: &[f64]) -> Result<Complex64> {
        let d = self.dim();
        check_point_len(point, d)?;
        self.eval(&point[..d], point[d], point[d + 1])
    }
}

impl Coefficient for DiscFunc {
    const MODEL: Model = Model::Disc;
    fn zero_fn(dim: usize) -> Self {
        DiscFunc::zero(dim)
    }
    fn from_crat(dim: usize, c: CRat) -> Self {
        DiscFunc::constant(dim, c)
    }
    fn base_dim(&self) -> usize {
        self.dim()
    }
    fn is_zero_fn(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn real_fn(&self) -> bool {
        self.is_real()
    }
    fn term_total(&self) -> usize {
        self.term_count()
    }
    fn partial(&self, idx: usize) -> Result<Self> {
        let d = self.dim();
        match idx {
            i if i < d => Ok(self.partial_x(i)),
            i if i == d => self.partial_u(),
            i if i == d + 1 => self.partial_v(),
            _ => Err(CutError::UnknownDirection(format!("basis index {idx}"))),
        }
    }
    fn eval_point(&self, point: &[f64]) -> Result<Complex64> {
        let d = self.dim();
        check_point_len(point, d)?;
        self.eval(&point[..d], point[d], point[d + 1])
    }
}

fn check_point_len(point: &[f64], dim: usize) -> Result<()> {
    if point.len() != dim + 2 {
        return Err(CutError::DimMismatch(format!("point has {} coordinates, model has {}", point.len(), dim + 2)));
    }
    Ok(())
}

/// A differential form `sum_I c_I dx_I` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form<C> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, C>,
}

pub type HalfForm = Form<HalfFunc>;
pub type DiscForm = Form<DiscFunc>;

impl<C: Coefficient> Form<C> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form { dim, degree, terms: BTreeMap::new() }
    }

    /// The degree-0 form given by a function.
    pub fn function(f: C) -> Self {
        let mut out = Form::zero(f.base_dim(), 0);
        out.accumulate(vec![], f);
        out
    }

    /// `c dx_{i1} ^ ... ^ dx_{ik}` for arbitrary (unsorted) basis indices.
    pub fn monomial(dim: usize, indices: &[usize], c: C) -> Self {
        assert!(indices.iter().all(|&i| i < dim + 2), "basis index out of range");
        let (key, sign) = sort_with_sign(indices.to_vec());
        let mut out = Form::zero(dim, indices.len());
        match sign {
            0 => {}
            1 => out.accumulate(key, c),
            _ => out.accumulate(key, c.negated()),
        }
        out
    }

    /// `c` times the named covectors, e.g. `["dx1", "ds"]`.
    pub fn named(dim: usize, names: &[&str], c: C) -> Result<Self> {
        let (key, sign) = C::MODEL.parse_key(dim, names)?;
        let mut out = Form::zero(dim, names.len());
        match sign {
            0 => {}
            1 => out.accumulate(key, c),
            _ => out.accumulate(key, c.negated()),
        }
        Ok(out)
    }

    /// The basis covector `dx_idx`.
    pub fn basis(dim: usize, idx: usize) -> Self {
        Form::monomial(dim, &[idx], C::from_crat(dim, CRat::one()))
    }

    pub fn model(&self) -> Model {
        C::MODEL
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total manifold dimension `d + 2`.
    pub fn total_dim(&self) -> usize {
        self.dim + 2
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &[usize]) -> Option<&C> {
        self.terms.get(key)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coefficient::real_fn)
    }

    /// Number of monomials summed over all coefficients.
    pub fn size(&self) -> usize {
        self.terms.values().map(Coefficient::term_total).sum()
    }

    fn accumulate(&mut self, key: Vec<usize>, c: C) {
        if c.is_zero_fn() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().plus(&c);
                if sum.is_zero_fn() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(CutError::ModelMismatch(format!("base dimensions {} and {} differ", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(CutError::ModelMismatch(format!(
                "cannot add forms of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        if self.is_zero() {
            out.degree = other.degree;
        }
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Form {
            dim: self.dim,
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.negated())).collect(),
        }
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_fn(&self, f: &C) -> Self {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), c.times(f));
        }
        out
    }

    pub fn scale(&self, c: CRat) -> Self {
        self.mul_fn(&C::from_crat(self.dim, c))
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Form::zero(self.dim, self.degree + other.degree);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if let Some((key, sign)) = merge_keys(ka, kb) {
                    let c = ca.times(cb);
                    out.accumulate(key, if sign > 0 { c } else { c.negated() });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative. On the half model a coefficient containing
    /// `s^(1/2)` raises [`CutError::SingularDifferential`].
    pub fn ext_d(&self) -> Result<Self> {
        let mut out = Form::zero(self.dim, self.degree + 1);
        for (key, c) in &self.terms {
            for j in 0..self.total_dim() {
                if key.contains(&j) {
                    continue;
                }
                let dc = c.partial(j)?;
                if dc.is_zero_fn() {
                    continue;
                }
                let pos = key.iter().filter(|&&i| i < j).count();
                let mut new_key = key.clone();
                new_key.insert(pos, j);
                out.accumulate(new_key, if pos % 2 == 0 { dc } else { dc.negated() });
            }
        }
        Ok(out)
    }

    /// Interior product with the coordinate field `d/d(coord idx)`.
    pub fn contract(&self, idx: usize) -> Result<Self> {
        if self.degree == 0 {
            return Err(CutError::DegreeZero);
        }
        self.check_index(idx)?;
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (key, c) in &self.terms {
            if let Some(pos) = key.iter().position(|&i| i == idx) {
                let mut new_key = key.clone();
                new_key.remove(pos);
                out.accumulate(new_key, if pos % 2 == 0 { c.clone() } else { c.negated() });
            }
        }
        Ok(out)
    }

    /// Contraction by the coordinate field with the given name (`"theta"`, `"x1"`, ...).
    pub fn contract_named(&self, name: &str) -> Result<Self> {
        self.contract(self.direction(name)?)
    }

    /// Lie derivative `i_v d + d i_v` along a coordinate field.
    pub fn lie_derivative(&self, idx: usize) -> Result<Self> {
        self.check_index(idx)?;
        let first = self.ext_d()?.contract(idx)?;
        if self.degree == 0 {
            return Ok(first);
        }
        first.add(&self.contract(idx)?.ext_d()?)
    }

    pub fn direction(&self, name: &str) -> Result<usize> {
        C::MODEL.coord_index(self.dim, name)
    }

    fn check_index(&self, idx: usize) -> Result<()> {
        if idx >= self.total_dim() {
            return Err(CutError::UnknownDirection(format!("basis index {idx}")));
        }
        Ok(())
    }

    /// Evaluates every coefficient at a point given in basis order.
    pub fn eval_at(&self, point: &[f64]) -> Result<EvaluatedForm> {
        check_point_len(point, self.dim)?;
        if C::MODEL == Model::Half && point[self.dim + 1] < 0.0 {
            return Err(CutError::OutsideDomain(format!("s = {} < 0 on the half model", point[self.dim + 1])));
        }
        let mut values = BTreeMap::new();
        for (k, c) in &self.terms {
            values.insert(k.clone(), c.eval_point(point)?);
        }
        Ok(EvaluatedForm { n: self.total_dim(), degree: self.degree, values })
    }

    /// `self ^ self ^ ... ^ self` (`n` factors); `n = 0` gives the constant 1.
    pub fn wedge_power(&self, n: usize) -> Result<Self> {
        let mut out = Form::function(C::from_crat(self.dim, CRat::one()));
        for _ in 0..n {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&[usize], &C) -> bool) -> Self {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, c) in &self.terms {
            if keep(k, c) {
                out.accumulate(k.clone(), c.clone());
            }
        }
        out
    }

    /// Applies `f` to each coefficient.
    pub fn map_coefficients<D: Coefficient>(&self, mut f: impl FnMut(&[usize], &C) -> Result<D>) -> Result<Form<D>> {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), f(k, c)?);
        }
        Ok(out)
    }

    /// Builds a form from `(key, coefficient)` pairs with sorted keys of equal length.
    pub fn from_terms(dim: usize, degree: usize, terms: impl IntoIterator<Item = (Vec<usize>, C)>) -> Self {
        let mut out = Form::zero(dim, degree);
        for (k, c) in terms {
            assert_eq!(k.len(), degree, "key length must equal degree");
            let (key, sign) = sort_with_sign(k);
            match sign {
                0 => {}
                1 => out.accumulate(key, c),
                _ => out.accumulate(key, c.negated()),
            }
        }
        out
    }

    /// Removes a single monomial from one coefficient; used by witness shrinking.
    pub fn drop_term(&self, key: &[usize]) -> Self {
        self.filter_terms(|k, _| k != key)
    }

    pub fn keys(&self) -> Vec<Vec<usize>> {
        self.terms.keys().cloned().collect()
    }

    pub fn key_label(&self, key: &[usize]) -> String {
        C::MODEL.key_names(self.dim, key).join("^")
    }
}

/// Merges two sorted keys; `None` when they share an index.
pub(crate) fn merge_keys(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut key: Vec<usize> = a.iter().chain(b).copied().collect();
    key.sort_unstable();
    Some((key, if inversions.is_multiple_of(2) { 1 } else { -1 }))
}

impl HalfForm {
    pub fn theta_index(&self) -> usize {
        self.dim
    }

    pub fn s_index(&self) -> usize {
        self.dim + 1
    }

    /// Basic on the boundary and rotation invariant: every coefficient has
    /// only `k = 0` modes, and every term containing `dtheta` but not `ds`
    /// has a coefficient divisible by `s`. Terms containing `ds` restrict to
    /// zero on `s = 0` and impose no horizontality condition there.
    ///
    /// Returns the verdict and a witness line per failing term.
    pub fn is_basic_invariant(&self) -> (bool, Vec<String>) {
        let (t, s) = (self.theta_index(), self.s_index());
        let mut witness = Vec::new();
        for (key, c) in &self.terms {
            let label = self.key_label(key);
            if let Some((mono, _)) = c.terms().find(|(mono, _)| mono.k != 0) {
                witness.push(format!("({c}) {label}: theta-dependent mode {mono}"));
                continue;
            }
            if key.contains(&t) && !key.contains(&s) {
                if let Some((mono, _)) = c.terms().find(|(mono, _)| mono.m < 2) {
                    witness.push(format!("({c}) {label}: coefficient term {mono} not divisible by s"));
                }
            }
        }
        (witness.is_empty(), witness)
    }

    /// Pullback to the boundary `s = 0`.
    pub fn boundary_pullback(&self) -> BoundaryForm {
        let s = self.s_index();
        let mut out = Form::zero(self.dim, self.degree);
        for (key, c) in &self.terms {
            if !key.contains(&s) {
                out.accumulate(key.clone(), c.at_boundary());
            }
        }
        BoundaryForm(out)
    }
}

/// Pullback of a half-model form to `s = 0`: no `ds` terms and coefficients
/// without `s` dependence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryForm(HalfForm);

impl BoundaryForm {
    pub fn form(&self) -> &HalfForm {
        &self.0
    }

    pub fn into_form(self) -> HalfForm {
        self.0
    }
}

impl fmt::Display for BoundaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Numeric values of a form's coefficients at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluatedForm {
    pub n: usize,
    pub degree: usize,
    pub values: BTreeMap<Vec<usize>, Complex64>,
}

impl EvaluatedForm {
    pub fn get(&self, key: &[usize]) -> Complex64 {
        self.values.get(key).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Real parts as a covector (degree 1).
    pub fn covector(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (k, v) in &self.values {
            if k.len() == 1 {
                out[k[0]] = v.re;
            }
        }
        out
    }

    /// Real antisymmetric matrix `w_ij` with `w = sum_{i<j} w_ij dx_i ^ dx_j` (degree 2).
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (k, v) in &self.values {
            if k.len() == 2 {
                m[(k[0], k[1])] = v.re;
                m[(k[1], k[0])] = -v.re;
            }
        }
        m
    }

    /// Coefficient of the volume element (top degree).
    pub fn top(&self) -> f64 {
        let key: Vec<usize> = (0..self.n).collect();
        self.get(&key).re
    }
}

impl<C: Coefficient> fmt::Display for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (key, c) in &self.terms {
            let label = self.key_label(key);
            let cs = c.to_string();
            let single = !cs.contains(" + ") && !cs.contains(" - ");
            parts.push(if label.is_empty() {
                cs
            } else if cs == "1" {
                label
            } else if cs == "-1" {
                format!("-{label}")
            } else if single {
                format!("{cs} {label}")
            } else {
                format!("({cs}) {label}")
            });
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

#[derive(Serialize, Deserialize)]
struct FormTermRepr<C> {
    key: Vec<String>,
    coeff: C,
}

#[derive(Serialize, Deserialize)]
struct FormRepr<C> {
    degree: usize,
    dim: usize,
    terms: Vec<FormTermRepr<C>>,
}

impl<C: Coefficient> Serialize for Form<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = FormRepr {
            degree: self.degree,
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| FormTermRepr { key: C::MODEL.key_names(self.dim, k), coeff: c.clone() })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de, C: Coefficient> Deserialize<'de> for Form<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = FormRepr::<C>::deserialize(deserializer)?;
        let mut out = Form::zero(repr.dim, repr.degree);
        for t in repr.terms {
            if t.key.len() != repr.degree {
                return Err(D::Error::custom(format!("key {:?} does not have length {}", t.key, repr.degree)));
            }
            if t.coeff.base_dim() != repr.dim {
                return Err(D::Error::custom(format!(
                    "coefficient dim {} differs from form dim {}",
                    t.coeff.base_dim(),
                    repr.dim
                )));
            }
            let (key, sign) = C::MODEL.parse_key(repr.dim, &t.key).map_err(D::Error::custom)?;
            match sign {
                0 => {}
                1 => out.accumulate(key, t.coeff),
                _ => out.accumulate(key, t.coeff.negated()),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;

    fn h1(dim: usize) -> HalfFunc {
        HalfFunc::one(dim)
    }

    fn hf(dim: usize, names: &[&str], c: HalfFunc) -> HalfForm {
        HalfForm::named(dim, names, c).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let a = hf(2, &["dx1"], h1(2));
        let b = hf(2, &["dx2"], h1(2));
        assert_eq!(a.wedge(&b).unwrap(), hf(2, &["dx1", "dx2"], h1(2)));
        let ds = hf(0, &["ds"], h1(0));
        assert!(ds.wedge(&ds).unwrap().is_zero());
        let lhs = hf(1, &["dx1"], h1(1)).add(&hf(1, &["dtheta"], HalfFunc::s(1))).unwrap();
        let rhs = hf(1, &["ds", "dtheta"], h1(1));
        assert_eq!(lhs.wedge(&rhs).unwrap(), hf(1, &["dx1", "ds", "dtheta"], h1(1)));
    }

    #[test]
    fn ext_d_examples() {
        let sdt = hf(0, &["dtheta"], HalfFunc::s(0));
        assert_eq!(sdt.ext_d().unwrap(), hf(0, &["ds", "dtheta"], h1(0)));
        let u = DiscFunc::u(0);
        let v = DiscFunc::v(0);
        let g = DiscForm::named(0, &["dv"], u).unwrap().sub(&DiscForm::named(0, &["du"], v).unwrap()).unwrap();
        let two = DiscForm::named(0, &["du", "dv"], DiscFunc::from_int(0, 2)).unwrap();
        assert_eq!(g.ext_d().unwrap(), two);
        assert!(hf(1, &["dx1"], h1(1)).ext_d().unwrap().is_zero());
        let bad = hf(0, &["dtheta"], HalfFunc::sqrt_s(0));
        assert_eq!(bad.ext_d().unwrap_err().kind(), "SingularDifferential");
    }

    #[test]
    fn contract_examples() {
        let w = hf(0, &["ds", "dtheta"], h1(0));
        assert_eq!(w.contract_named("theta").unwrap(), hf(0, &["ds"], h1(0)).neg());
        let sdt = hf(0, &["dtheta"], HalfFunc::s(0));
        assert_eq!(sdt.contract_named("theta").unwrap(), HalfForm::function(HalfFunc::s(0)));
        assert!(hf(1, &["dx1"], h1(1)).contract_named("theta").unwrap().is_zero());
        assert_eq!(HalfForm::function(h1(0)).contract(0).unwrap_err(), CutError::DegreeZero);
        assert_eq!(sdt.contract_named("phi").unwrap_err().kind(), "UnknownDirection");
    }

    #[test]
    fn lie_derivative_examples() {
        let sdt = hf(0, &["dtheta"], HalfFunc::s(0));
        assert!(sdt.lie_derivative(0).unwrap().is_zero());
        let cos_dx = hf(1, &["dx1"], HalfFunc::cos_theta(1, 1));
        let expected = hf(1, &["dx1"], -HalfFunc::sin_theta(1, 1));
        assert_eq!(cos_dx.lie_derivative(1).unwrap(), expected);
        assert!(hf(0, &["ds"], h1(0)).lie_derivative(0).unwrap().is_zero());
    }

    #[test]
    fn basic_invariant_examples() {
        assert!(hf(0, &["dtheta"], HalfFunc::s(0)).is_basic_invariant().0);
        let (ok, witness) = hf(0, &["dtheta"], h1(0)).is_basic_invariant();
        assert!(!ok);
        assert_eq!(witness.len(), 1);
        assert!(!hf(1, &["dx1"], HalfFunc::cos_theta(1, 1)).is_basic_invariant().0);
        assert!(hf(0, &["ds", "dtheta"], h1(0)).is_basic_invariant().0);
    }

    #[test]
    fn boundary_pullback_examples() {
        let b = hf(2, &["dx1", "ds"], h1(2)).add(&hf(2, &["dtheta", "dx2"], HalfFunc::s(2))).unwrap();
        assert!(b.boundary_pullback().form().is_zero());
        let bx = hf(1, &["dx1"], HalfFunc::x(1, 0));
        assert_eq!(bx.boundary_pullback().into_form(), bx);
        assert!(hf(1, &["dx1"], HalfFunc::s(1).pow(2)).boundary_pullback().form().is_zero());
    }

    #[test]
    fn eval_examples() {
        let w = hf(0, &["ds", "dtheta"], h1(0));
        let m = w.eval_at(&[0.3, 0.2]).unwrap().matrix();
        assert_eq!(m[(0, 1)], -1.0);
        assert_eq!(m[(1, 0)], 1.0);
        let two = DiscForm::named(0, &["du", "dv"], DiscFunc::from_int(0, 2)).unwrap();
        assert_eq!(two.eval_at(&[0.0, 0.0]).unwrap().matrix()[(0, 1)], 2.0);
        let sdt = hf(0, &["dtheta"], HalfFunc::s(0));
        assert_eq!(sdt.eval_at(&[1.0, 0.25]).unwrap().covector(), vec![0.25, 0.0]);
        assert_eq!(sdt.eval_at(&[1.0, -0.25]).unwrap_err().kind(), "OutsideDomain");
    }

    #[test]
    fn json_roundtrip_and_display() {
        let g = DiscForm::named(0, &["dv"], DiscFunc::u(0))
            .unwrap()
            .sub(&DiscForm::named(0, &["du"], DiscFunc::v(0)).unwrap())
            .unwrap();
        assert_eq!(g.to_string(), "-v du + u dv");
        let js = serde_json::to_string(&g).unwrap();
        let back: DiscForm = serde_json::from_str(&js).unwrap();
        assert_eq!(back, g);
        let two = DiscForm::named(0, &["du", "dv"], DiscFunc::from_int(0, 2)).unwrap();
        assert_eq!(two.to_string(), "2 du^dv");
        let half = hf(1, &["dx1"], HalfFunc::constant(1, CRat::real(q_frac(1, 2))));
        assert_eq!(half.to_string(), "1/2 dx1");
    }

    #[test]
    fn reversed_names_pick_up_sign() {
        assert_eq!(hf(0, &["dtheta", "ds"], h1(0)), hf(0, &["ds", "dtheta"], h1(0)).neg());
        assert!(hf(0, &["ds", "ds"], h1(0)).is_zero());
    }
}
