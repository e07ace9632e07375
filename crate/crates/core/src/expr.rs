//! Real expression trees with exact rational leaves, symbolic partial
//! derivatives and floating-point evaluation.
//!
//! Maps between local models are built from these; forms stay in the exact
//! monomial class.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CutError, Result};
use crate::rational::{format_q, parse_q, q, q_to_f64, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Q),
    Var(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

/// Variable bindings for evaluation.
#[derive(Clone, Debug, Default)]
pub struct Env {
    vars: Vec<(String, f64)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn from_pairs<S: AsRef<str>>(names: &[S], values: &[f64]) -> Self {
        Env { vars: names.iter().zip(values).map(|(n, v)| (n.as_ref().to_string(), *v)).collect() }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match self.vars.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.vars.push((name.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

impl Expr {
    pub fn c(n: i64) -> Expr {
        Expr::Const(q(n))
    }

    pub fn rational(r: Q) -> Expr {
        Expr::Const(r)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn zero() -> Expr {
        Expr::c(0)
    }

    pub fn one() -> Expr {
        Expr::c(1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Sum with constant folding and zero elimination.
    pub fn sum(items: Vec<Expr>) -> Expr {
        let mut constant = Q::zero();
        let mut rest = Vec::new();
        for e in items {
            match e {
                Expr::Const(c) => constant += c,
                Expr::Add(inner) => {
                    for i in inner {
                        match i {
                            Expr::Const(c) => constant += c,
                            other => rest.push(other),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if !constant.is_zero() {
            rest.push(Expr::Const(constant));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::Add(rest),
        }
    }

    /// Product with constant folding; any zero factor gives zero.
    pub fn product(items: Vec<Expr>) -> Expr {
        let mut constant = Q::one();
        let mut rest = Vec::new();
        for e in items {
            match e {
                Expr::Const(c) => constant *= c,
                Expr::Mul(inner) => {
                    for i in inner {
                        match i {
                            Expr::Const(c) => constant *= c,
                            other => rest.push(other),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if rest.is_empty() {
            return Expr::Const(constant);
        }
        if !constant.is_one() {
            rest.insert(0, Expr::Const(constant));
        }
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Expr::Mul(rest)
        }
    }

    pub fn negate(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn divide(self, rhs: Expr) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if rhs.is_one() {
            return self;
        }
        if let (Some(a), Some(b)) = (self.as_const(), rhs.as_const()) {
            if !b.is_zero() {
                return Expr::Const(a / b);
            }
        }
        Expr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn powi(self, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self,
            _ => match self.as_const() {
                Some(c) if n > 0 => Expr::Const(num_traits::pow(c.clone(), n as usize)),
                _ => Expr::Pow(Box::new(self), n),
            },
        }
    }

    pub fn sin(self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::Cos(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::Exp(Box::new(self))
    }

    pub fn sqrt(self) -> Expr {
        if self.is_zero() || self.is_one() {
            return self;
        }
        Expr::Sqrt(Box::new(self))
    }

    pub fn eval(&self, env: &Env) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => q_to_f64(c),
            Expr::Var(name) => {
                env.get(name).ok_or_else(|| CutError::Evaluation(format!("unbound variable `{name}`")))?
            }
            Expr::Add(items) => {
                let mut acc = 0.0;
                for e in items {
                    acc += e.eval(env)?;
                }
                acc
            }
            Expr::Mul(items) => {
                let mut acc = 1.0;
                for e in items {
                    acc *= e.eval(env)?;
                }
                acc
            }
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Div(a, b) => {
                let den = b.eval(env)?;
                if den == 0.0 {
                    return Err(CutError::Evaluation(format!("division by zero in {self}")));
                }
                a.eval(env)? / den
            }
            Expr::Pow(e, n) => {
                let base = e.eval(env)?;
                if base == 0.0 && *n < 0 {
                    return Err(CutError::Evaluation(format!("zero to negative power in {self}")));
                }
                base.powi(*n)
            }
            Expr::Sin(e) => e.eval(env)?.sin(),
            Expr::Cos(e) => e.eval(env)?.cos(),
            Expr::Exp(e) => e.eval(env)?.exp(),
            Expr::Sqrt(e) => {
                let v = e.eval(env)?;
                if v < 0.0 {
                    return Err(CutError::Evaluation(format!("square root of {v} in {self}")));
                }
                v.sqrt()
            }
        })
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, var: &str) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(name) => {
                if name == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(items) => Expr::sum(items.iter().map(|e| e.diff(var)).collect()),
            Expr::Mul(items) => {
                let mut terms = Vec::new();
                for i in 0..items.len() {
                    let di = items[i].diff(var);
                    if di.is_zero() {
                        continue;
                    }
                    let mut factors: Vec<Expr> =
                        items.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e.clone()).collect();
                    factors.push(di);
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Expr::Neg(e) => e.diff(var).negate(),
            Expr::Div(a, b) => {
                let da = a.diff(var);
                let db = b.diff(var);
                let num = Expr::sum(vec![
                    Expr::product(vec![da, (**b).clone()]),
                    Expr::product(vec![(**a).clone(), db]).negate(),
                ]);
                num.divide((**b).clone().powi(2))
            }
            Expr::Pow(e, n) => Expr::product(vec![Expr::c(*n as i64), (**e).clone().powi(n - 1), e.diff(var)]),
            Expr::Sin(e) => Expr::product(vec![(**e).clone().cos(), e.diff(var)]),
            Expr::Cos(e) => Expr::product(vec![(**e).clone().sin(), e.diff(var)]).negate(),
            Expr::Exp(e) => Expr::product(vec![self.clone(), e.diff(var)]),
            Expr::Sqrt(e) => {
                let de = e.diff(var);
                if de.is_zero() {
                    return Expr::zero();
                }
                de.divide(Expr::product(vec![Expr::c(2), self.clone()]))
            }
        }
    }

    /// Simultaneous substitution of variables.
    pub fn subst(&self, map: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(name) => map.get(name).cloned().unwrap_or_else(|| self.clone()),
            Expr::Add(items) => Expr::sum(items.iter().map(|e| e.subst(map)).collect()),
            Expr::Mul(items) => Expr::product(items.iter().map(|e| e.subst(map)).collect()),
            Expr::Neg(e) => e.subst(map).negate(),
            Expr::Div(a, b) => a.subst(map).divide(b.subst(map)),
            Expr::Pow(e, n) => e.subst(map).powi(*n),
            Expr::Sin(e) => e.subst(map).sin(),
            Expr::Cos(e) => e.subst(map).cos(),
            Expr::Exp(e) => e.subst(map).exp(),
            Expr::Sqrt(e) => e.subst(map).sqrt(),
        }
    }

    pub fn subst_one(&self, var: &str, by: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(var.to_string(), by.clone());
        self.subst(&map)
    }

    /// Names of all variables occurring in the expression.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) => out.push(n.clone()),
            Expr::Add(items) | Expr::Mul(items) => items.iter().for_each(|e| e.collect_vars(out)),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Sin(e) | Expr::Cos(e) | Expr::Exp(e) | Expr::Sqrt(e) => {
                e.collect_vars(out)
            }
            Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Mul(_) | Expr::Div(..) | Expr::Neg(_) => 2,
            Expr::Pow(..) => 3,
            Expr::Const(c) if c.is_negative() || !c.is_integer() => 2,
            _ => 4,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Add(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    e.fmt_child(f, 1)?;
                }
                Ok(())
            }
            Expr::Mul(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    e.fmt_child(f, 3)?;
                }
                Ok(())
            }
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_child(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_child(f, 3)?;
                write!(f, "/")?;
                b.fmt_child(f, 4)
            }
            Expr::Pow(e, n) => {
                e.fmt_child(f, 4)?;
                write!(f, "^{n}")
            }
            Expr::Sin(e) => write!(f, "sin({e})"),
            Expr::Cos(e) => write!(f, "cos({e})"),
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs.negate()])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negate()
    }
}

#[derive(Serialize, Deserialize)]
struct ExprRepr {
    op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    args: Vec<ExprRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp: Option<i32>,
}

impl ExprRepr {
    fn node(op: &str, args: Vec<ExprRepr>) -> Self {
        ExprRepr { op: op.into(), args, value: None, name: None, exp: None }
    }
}

impl From<&Expr> for ExprRepr {
    fn from(e: &Expr) -> Self {
        let unary = |op: &str, a: &Expr| ExprRepr::node(op, vec![a.into()]);
        match e {
            Expr::Const(c) => ExprRepr { value: Some(format_q(c)), ..ExprRepr::node("const", vec![]) },
            Expr::Var(n) => ExprRepr { name: Some(n.clone()), ..ExprRepr::node("var", vec![]) },
            Expr::Add(items) => ExprRepr::node("add", items.iter().map(Into::into).collect()),
            Expr::Mul(items) => ExprRepr::node("mul", items.iter().map(Into::into).collect()),
            Expr::Neg(a) => unary("neg", a),
            Expr::Div(a, b) => ExprRepr::node("div", vec![(&**a).into(), (&**b).into()]),
            Expr::Pow(a, n) => ExprRepr { exp: Some(*n), ..unary("pow", a) },
            Expr::Sin(a) => unary("sin", a),
            Expr::Cos(a) => unary("cos", a),
            Expr::Exp(a) => unary("exp", a),
            Expr::Sqrt(a) => unary("sqrt", a),
        }
    }
}

impl TryFrom<ExprRepr> for Expr {
    type Error = CutError;
    fn try_from(r: ExprRepr) -> Result<Expr> {
        let arity = |n: usize, r: &ExprRepr| -> Result<()> {
            if r.args.len() != n {
                return Err(CutError::Parse(format!("`{}` takes {n} argument(s), got {}", r.op, r.args.len())));
            }
            Ok(())
        };
        let op = r.op.clone();
        match op.as_str() {
            "const" => {
                let v = r.value.as_deref().ok_or_else(|| CutError::Parse("const needs `value`".into()))?;
                Ok(Expr::Const(parse_q(v)?))
            }
            "var" => Ok(Expr::Var(r.name.ok_or_else(|| CutError::Parse("var needs `name`".into()))?)),
            "add" | "mul" => {
                if r.args.is_empty() {
                    return Err(CutError::Parse(format!("`{op}` needs arguments")));
                }
                let items = r.args.into_iter().map(Expr::try_from).collect::<Result<Vec<_>>>()?;
                Ok(if op == "add" { Expr::Add(items) } else { Expr::Mul(items) })
            }
            "div" => {
                arity(2, &r)?;
                let mut it = r.args.into_iter();
                let a = Expr::try_from(it.next().unwrap())?;
                let b = Expr::try_from(it.next().unwrap())?;
                Ok(Expr::Div(Box::new(a), Box::new(b)))
            }
            "neg" | "pow" | "sin" | "cos" | "exp" | "sqrt" => {
                arity(1, &r)?;
                let exp = r.exp;
                let a = Box::new(Expr::try_from(r.args.into_iter().next().unwrap())?);
                Ok(match op.as_str() {
                    "neg" => Expr::Neg(a),
                    "pow" => Expr::Pow(a, exp.ok_or_else(|| CutError::Parse("pow needs `exp`".into()))?),
                    "sin" => Expr::Sin(a),
                    "cos" => Expr::Cos(a),
                    "exp" => Expr::Exp(a),
                    _ => Expr::Sqrt(a),
                })
            }
            other => Err(CutError::Parse(format!("unknown expression op `{other}`"))),
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ExprRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ExprRepr::deserialize(deserializer)?;
        Expr::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// A map `R^n -> R^m` given by named input variables and component expressions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExprMap {
    pub vars: Vec<String>,
    pub comps: Vec<Expr>,
}

impl ExprMap {
    pub fn new(vars: Vec<String>, comps: Vec<Expr>) -> Self {
        ExprMap { vars, comps }
    }

    pub fn identity(vars: &[&str]) -> Self {
        ExprMap {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            comps: vars.iter().map(|v| Expr::var(v)).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn output_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn env(&self, point: &[f64]) -> Result<Env> {
        if point.len() != self.vars.len() {
            return Err(CutError::DimMismatch(format!(
                "point has {} coordinates, map takes {}",
                point.len(),
                self.vars.len()
            )));
        }
        Ok(Env::from_pairs(&self.vars, point))
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>> {
        let env = self.env(point)?;
        self.comps.iter().map(|c| c.eval(&env)).collect()
    }

    /// Matrix of symbolic partial derivatives.
    pub fn symbolic_jacobian(&self) -> Vec<Vec<Expr>> {
        self.comps.iter().map(|c| self.vars.iter().map(|v| c.diff(v)).collect()).collect()
    }

    pub fn eval_matrix(entries: &[Vec<Expr>], env: &Env) -> Result<DMatrix<f64>> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let mut m = DMatrix::zeros(rows, cols);
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = e.eval(env)?;
            }
        }
        Ok(m)
    }
}
