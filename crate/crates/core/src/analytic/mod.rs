//! Expression trees for functions analytic on the unit disk.
//!
//! Every tree evaluates with exact first and second derivatives (rule-based
//! jets, no finite differences) and differentiates symbolically into another
//! tree. Logarithms only appear through the disk-safe atanh-log
//! `L(z) = log((1+z)/(1-z))`, optionally composed with a unit rotation `z -> σz`,
//! so the principal branch is continuous on the open disk.

mod quadrature;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quadrature::GaussLegendre;

/// Points of the disk and values in the image plane.
pub type ComplexValue = Complex64;

/// Quotients whose denominator drops below this modulus raise a pole error.
pub const POLE_GUARD: f64 = 1e-14;
/// Validity radius assigned to expressions that do not declare one.
pub const DEFAULT_R_MAX: f64 = 0.99;
/// Gauss–Legendre node count used when callers do not pick one.
pub const DEFAULT_NODES: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tree node. Composite nodes keep their operands in `children`; the
/// arity of `rotate`, `scale` and `antiderivative` is one and of `quotient`
/// is two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Const { value: Complex64 },
    Var,
    Pow { n: u32 },
    AtanhLog,
    Rotate { sigma: Complex64, children: Vec<Node> },
    Sum { children: Vec<Node> },
    Product { children: Vec<Node> },
    Quotient { children: Vec<Node> },
    Scale { factor: Complex64, children: Vec<Node> },
    /// `∫_0^z child(ζ) dζ` along the radial segment.
    Antiderivative { nodes: usize, children: Vec<Node> },
}

/// Value and derivatives at a point; entries past the requested order are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    fn constant(value: Complex64) -> Self {
        Jet { value, d1: ZERO, d2: ZERO }
    }
}

/// Derivative order requested from [`AnalyticExpr::eval_d`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Value = 0,
    First = 1,
    Second = 2,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Order::Value),
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            other => Err(Error::InvalidArgument(format!("derivative order {other} > 2"))),
        }
    }
}

/// An analytic function on `{|z| < r_max}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExpr")]
pub struct AnalyticExpr {
    root: Node,
    r_max: f64,
}

#[derive(Deserialize)]
struct RawExpr {
    root: Node,
    r_max: f64,
}

impl TryFrom<RawExpr> for AnalyticExpr {
    type Error = Error;

    fn try_from(raw: RawExpr) -> Result<Self> {
        validate(&raw.root)?;
        if !(raw.r_max > 0.0 && raw.r_max <= 1.0) {
            return Err(Error::InvalidArgument(format!("r_max {} outside (0, 1]", raw.r_max)));
        }
        Ok(AnalyticExpr { root: raw.root, r_max: raw.r_max })
    }
}

fn validate(node: &Node) -> Result<()> {
    let arity = |children: &Vec<Node>, want: usize, kind: &str| {
        if children.len() == want {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{kind} node takes {want} children, got {}",
                children.len()
            )))
        }
    };
    match node {
        Node::Const { value } if !(value.re.is_finite() && value.im.is_finite()) => {
            Err(Error::InvalidArgument("non-finite constant".into()))
        }
        Node::Const { .. } | Node::Var | Node::Pow { .. } | Node::AtanhLog => Ok(()),
        Node::Rotate { sigma, children } => {
            if (sigma.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("rotation |σ| = {} != 1", sigma.norm())));
            }
            arity(children, 1, "rotate")?;
            children.iter().try_for_each(validate)
        }
        Node::Scale { children, .. } => {
            arity(children, 1, "scale")?;
            children.iter().try_for_each(validate)
        }
        Node::Antiderivative { nodes, children } => {
            if *nodes < 2 {
                return Err(Error::InvalidArgument("antiderivative needs >= 2 nodes".into()));
            }
            arity(children, 1, "antiderivative")?;
            children.iter().try_for_each(validate)
        }
        Node::Quotient { children } => {
            arity(children, 2, "quotient")?;
            children.iter().try_for_each(validate)
        }
        Node::Sum { children } | Node::Product { children } => children.iter().try_for_each(validate),
    }
}

impl AnalyticExpr {
    fn leaf(root: Node) -> Self {
        AnalyticExpr { root, r_max: DEFAULT_R_MAX }
    }

    pub fn constant(value: Complex64) -> Self {
        Self::leaf(Node::Const { value })
    }

    pub fn real(value: f64) -> Self {
        Self::constant(Complex64::new(value, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    /// The identity `z`.
    pub fn z() -> Self {
        Self::leaf(Node::Var)
    }

    pub fn pow(n: u32) -> Self {
        match n {
            0 => Self::real(1.0),
            1 => Self::z(),
            n => Self::leaf(Node::Pow { n }),
        }
    }

    /// `L(z) = log((1+z)/(1-z))`, principal branch.
    pub fn atanh_log() -> Self {
        Self::leaf(Node::AtanhLog)
    }

    /// `L(σz)` for a unit-modulus `σ`.
    pub fn atanh_log_rotated(sigma: Complex64) -> Result<Self> {
        Self::atanh_log().rotate(sigma)
    }

    /// `z -> self(σz)`; `σ` must have unit modulus so the disk maps to itself.
    pub fn rotate(self, sigma: Complex64) -> Result<Self> {
        if (sigma.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("rotation |σ| = {} != 1", sigma.norm())));
        }
        Ok(AnalyticExpr { root: rotate_node(sigma, self.root), r_max: self.r_max })
    }

    pub fn scale(self, factor: Complex64) -> Self {
        AnalyticExpr { root: scale_node(factor, self.root), r_max: self.r_max }
    }

    pub fn scale_real(self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Radial antiderivative vanishing at the origin.
    pub fn antiderivative(self, nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidArgument("antiderivative needs >= 2 nodes".into()));
        }
        let root = match self.root {
            Node::Const { value } if value == ZERO => Node::Const { value: ZERO },
            Node::Const { value } if value == ONE => Node::Var,
            other => Node::Antiderivative { nodes, children: vec![other] },
        };
        Ok(AnalyticExpr { root, r_max: self.r_max })
    }

    /// Sum of `coeff * expr` terms with zero coefficients dropped and unit
    /// coefficients left unscaled.
    pub fn linear_combination(terms: Vec<(Complex64, AnalyticExpr)>) -> Self {
        let r_max = terms.iter().map(|(_, e)| e.r_max).fold(1.0_f64, f64::min);
        let nodes: Vec<Node> = terms
            .into_iter()
            .filter(|(c, _)| *c != ZERO)
            .map(|(c, e)| scale_node(c, e.root))
            .collect();
        let r_max = if nodes.is_empty() { DEFAULT_R_MAX.min(r_max) } else { r_max };
        AnalyticExpr { root: sum_node(nodes), r_max }
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        assert!(r_max > 0.0 && r_max <= 1.0, "r_max must lie in (0, 1]");
        self.r_max = r_max;
        self
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Symbolic derivative.
    pub fn derivative(&self) -> AnalyticExpr {
        AnalyticExpr { root: derive(&self.root), r_max: self.r_max }
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= self.r_max {
            return Err(Error::domain(z, self.r_max));
        }
        Ok(())
    }

    /// Value and derivatives up to `order` at `z`.
    pub fn eval_d(&self, z: Complex64, order: Order) -> Result<Jet> {
        self.check_domain(z)?;
        let jet = eval_node(&self.root, z, order)?;
        for v in [jet.value, jet.d1, jet.d2] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { re: z.re, im: z.im });
            }
        }
        Ok(jet)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_d(z, Order::Value)?.value)
    }

    /// Gauss–Legendre approximation of `∫_0^z self(ζ) dζ` on the radial segment.
    pub fn integrate_radial(&self, z: Complex64, nodes: usize) -> Result<Complex64> {
        self.integrate_segment(ZERO, z, nodes)
    }

    /// Same along the straight segment from `a` to `b` (both inside the disk).
    pub fn integrate_segment(&self, a: Complex64, b: Complex64, nodes: usize) -> Result<Complex64> {
        if nodes < 2 {
            return Err(Error::InvalidArgument(format!("quadrature needs >= 2 nodes, got {nodes}")));
        }
        self.check_domain(a)?;
        self.check_domain(b)?;
        let rule = GaussLegendre::cached(nodes);
        rule.integrate_segment(a, b, |zeta| self.eval(zeta))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn is_const(node: &Node) -> Option<Complex64> {
    match node {
        Node::Const { value } => Some(*value),
        _ => None,
    }
}

fn sum_node(children: Vec<Node>) -> Node {
    let mut flat = Vec::with_capacity(children.len());
    for child in children {
        match child {
            Node::Sum { children } => flat.extend(children),
            Node::Const { value } if value == ZERO => {}
            other => flat.push(other),
        }
    }
    match flat.len() {
        0 => Node::Const { value: ZERO },
        1 => flat.pop().expect("one element"),
        _ => Node::Sum { children: flat },
    }
}

fn product_node(children: Vec<Node>) -> Node {
    let mut coeff = ONE;
    let mut rest = Vec::with_capacity(children.len());
    for child in children {
        match child {
            Node::Const { value } => coeff *= value,
            Node::Product { children } => rest.extend(children),
            other => rest.push(other),
        }
    }
    if coeff == ZERO {
        return Node::Const { value: ZERO };
    }
    let body = match rest.len() {
        0 => return Node::Const { value: coeff },
        1 => rest.pop().expect("one element"),
        _ => Node::Product { children: rest },
    };
    scale_node(coeff, body)
}

fn scale_node(factor: Complex64, node: Node) -> Node {
    if factor == ZERO {
        return Node::Const { value: ZERO };
    }
    if factor == ONE {
        return node;
    }
    match node {
        Node::Const { value } => Node::Const { value: factor * value },
        Node::Scale { factor: inner, children } => {
            let child = children.into_iter().next().expect("scale arity");
            scale_node(factor * inner, child)
        }
        other => Node::Scale { factor, children: vec![other] },
    }
}

fn rotate_node(sigma: Complex64, node: Node) -> Node {
    match node {
        Node::Const { .. } => node,
        Node::Var => Node::Scale { factor: sigma, children: vec![Node::Var] },
        other => Node::Rotate { sigma, children: vec![other] },
    }
}

fn quotient_node(num: Node, den: Node) -> Node {
    if is_const(&num) == Some(ZERO) {
        return Node::Const { value: ZERO };
    }
    if let Some(c) = is_const(&den) {
        if c != ZERO {
            return scale_node(c.inv(), num);
        }
    }
    Node::Quotient { children: vec![num, den] }
}

fn derive(node: &Node) -> Node {
    match node {
        Node::Const { .. } => Node::Const { value: ZERO },
        Node::Var => Node::Const { value: ONE },
        Node::Pow { n } => match *n {
            0 => Node::Const { value: ZERO },
            1 => Node::Const { value: ONE },
            2 => scale_node(Complex64::new(2.0, 0.0), Node::Var),
            n => scale_node(Complex64::new(n as f64, 0.0), Node::Pow { n: n - 1 }),
        },
        // L'(z) = 2 / (1 - z^2)
        Node::AtanhLog => quotient_node(
            Node::Const { value: Complex64::new(2.0, 0.0) },
            sum_node(vec![
                Node::Const { value: ONE },
                scale_node(Complex64::new(-1.0, 0.0), Node::Pow { n: 2 }),
            ]),
        ),
        Node::Rotate { sigma, children } => {
            scale_node(*sigma, rotate_node(*sigma, derive(&children[0])))
        }
        Node::Sum { children } => sum_node(children.iter().map(derive).collect()),
        Node::Product { children } => {
            let terms = (0..children.len())
                .map(|i| {
                    let factors = children
                        .iter()
                        .enumerate()
                        .map(|(j, c)| if i == j { derive(c) } else { c.clone() })
                        .collect();
                    product_node(factors)
                })
                .collect();
            sum_node(terms)
        }
        Node::Quotient { children } => {
            let (a, b) = (&children[0], &children[1]);
            let num = sum_node(vec![
                product_node(vec![derive(a), b.clone()]),
                scale_node(Complex64::new(-1.0, 0.0), product_node(vec![a.clone(), derive(b)])),
            ]);
            quotient_node(num, Node::Product { children: vec![b.clone(), b.clone()] })
        }
        Node::Scale { factor, children } => scale_node(*factor, derive(&children[0])),
        Node::Antiderivative { children, .. } => children[0].clone(),
    }
}

fn eval_node(node: &Node, z: Complex64, order: Order) -> Result<Jet> {
    let want1 = order >= Order::First;
    let want2 = order >= Order::Second;
    let jet = match node {
        Node::Const { value } => Jet::constant(*value),
        Node::Var => Jet { value: z, d1: if want1 { ONE } else { ZERO }, d2: ZERO },
        Node::Pow { n } => {
            let n = *n;
            let value = z.powu(n);
            let d1 = if want1 && n >= 1 { z.powu(n - 1) * n as f64 } else { ZERO };
            let d2 = if want2 && n >= 2 { z.powu(n - 2) * (n * (n - 1)) as f64 } else { ZERO };
            Jet { value, d1, d2 }
        }
        Node::AtanhLog => {
            let value = ((ONE + z) / (ONE - z)).ln();
            let w = ONE - z * z;
            let d1 = if want1 { Complex64::new(2.0, 0.0) / w } else { ZERO };
            let d2 = if want2 { z * 4.0 / (w * w) } else { ZERO };
            Jet { value, d1, d2 }
        }
        Node::Rotate { sigma, children } => {
            let inner = eval_node(&children[0], sigma * z, order)?;
            Jet { value: inner.value, d1: inner.d1 * sigma, d2: inner.d2 * sigma * sigma }
        }
        Node::Sum { children } => {
            let mut acc = Jet::constant(ZERO);
            for child in children {
                let j = eval_node(child, z, order)?;
                acc.value += j.value;
                acc.d1 += j.d1;
                acc.d2 += j.d2;
            }
            acc
        }
        Node::Product { children } => {
            let mut acc = Jet::constant(ONE);
            for child in children {
                let b = eval_node(child, z, order)?;
                let a = acc;
                acc.value = a.value * b.value;
                if want1 {
                    acc.d1 = a.d1 * b.value + a.value * b.d1;
                }
                if want2 {
                    acc.d2 = a.d2 * b.value + a.d1 * b.d1 * 2.0 + a.value * b.d2;
                }
            }
            acc
        }
        Node::Quotient { children } => {
            let a = eval_node(&children[0], z, order)?;
            let b = eval_node(&children[1], z, order)?;
            let modulus = b.value.norm();
            if modulus < POLE_GUARD {
                return Err(Error::Pole { re: z.re, im: z.im, modulus });
            }
            let value = a.value / b.value;
            let d1 = if want1 { (a.d1 - value * b.d1) / b.value } else { ZERO };
            let d2 = if want2 {
                (a.d2 - d1 * b.d1 * 2.0 - value * b.d2) / b.value
            } else {
                ZERO
            };
            Jet { value, d1, d2 }
        }
        Node::Scale { factor, children } => {
            let j = eval_node(&children[0], z, order)?;
            Jet { value: j.value * factor, d1: j.d1 * factor, d2: j.d2 * factor }
        }
        Node::Antiderivative { nodes, children } => {
            let child = &children[0];
            let rule = GaussLegendre::cached(*nodes);
            let value = rule.integrate_segment(ZERO, z, |zeta| {
                Ok::<_, Error>(eval_node(child, zeta, Order::Value)?.value)
            })?;
            let sub = match order {
                Order::Value => Jet::constant(ZERO),
                Order::First => eval_node(child, z, Order::Value)?,
                Order::Second => eval_node(child, z, Order::First)?,
            };
            Jet { value, d1: sub.value, d2: sub.d1 }
        }
    };
    Ok(jet)
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        match c.im {
            1.0 => "i".to_string(),
            -1.0 => "-i".to_string(),
            x => format!("{x}i"),
        }
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

fn fmt_node(node: &Node, var: &str, out: &mut String) {
    match node {
        Node::Const { value } => out.push_str(&fmt_complex(*value)),
        Node::Var => out.push_str(var),
        Node::Pow { n } => {
            if var.len() == 1 {
                out.push_str(&format!("{var}^{n}"));
            } else {
                out.push_str(&format!("({var})^{n}"));
            }
        }
        Node::AtanhLog => out.push_str(&format!("L({var})")),
        Node::Rotate { sigma, children } => {
            let inner = format!("{}{}", fmt_complex(*sigma), var);
            fmt_node(&children[0], &inner, out);
        }
        Node::Sum { children } => {
            out.push('(');
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                fmt_node(child, var, out);
            }
            out.push(')');
        }
        Node::Product { children } => {
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push('·');
                }
                fmt_node(child, var, out);
            }
        }
        Node::Quotient { children } => {
            fmt_node(&children[0], var, out);
            out.push('/');
            fmt_node(&children[1], var, out);
        }
        Node::Scale { factor, children } => {
            out.push_str(&fmt_complex(*factor));
            out.push('·');
            fmt_node(&children[0], var, out);
        }
        Node::Antiderivative { children, .. } => {
            out.push_str("∫[");
            fmt_node(&children[0], "ζ", out);
            out.push_str("]dζ");
        }
    }
}

impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        fmt_node(&self.root, "z", &mut s);
        f.write_str(&s)
    }
}

impl Add for AnalyticExpr {
    type Output = AnalyticExpr;

    fn add(self, rhs: AnalyticExpr) -> AnalyticExpr {
        let r_max = self.r_max.min(rhs.r_max);
        AnalyticExpr { root: sum_node(vec![self.root, rhs.root]), r_max }
    }
}

impl Sub for AnalyticExpr {
    type Output = AnalyticExpr;

    fn sub(self, rhs: AnalyticExpr) -> AnalyticExpr {
        self + (-rhs)
    }
}

impl Neg for AnalyticExpr {
    type Output = AnalyticExpr;

    fn neg(self) -> AnalyticExpr {
        self.scale_real(-1.0)
    }
}

impl Mul for AnalyticExpr {
    type Output = AnalyticExpr;

    fn mul(self, rhs: AnalyticExpr) -> AnalyticExpr {
        let r_max = self.r_max.min(rhs.r_max);
        AnalyticExpr { root: product_node(vec![self.root, rhs.root]), r_max }
    }
}

impl Div for AnalyticExpr {
    type Output = AnalyticExpr;

    fn div(self, rhs: AnalyticExpr) -> AnalyticExpr {
        let r_max = self.r_max.min(rhs.r_max);
        AnalyticExpr { root: quotient_node(self.root, rhs.root), r_max }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn polynomial_at_origin() {
        let e = AnalyticExpr::z() - AnalyticExpr::pow(3).scale_real(1.0 / 3.0);
        let j = e.eval_d(c(0.0, 0.0), Order::Second).unwrap();
        assert_eq!(j.value, c(0.0, 0.0));
        assert_eq!(j.d1, c(1.0, 0.0));
        assert_eq!(j.d2, c(0.0, 0.0));
    }

    #[test]
    fn atanh_log_at_half() {
        let j = AnalyticExpr::atanh_log().eval_d(c(0.5, 0.0), Order::First).unwrap();
        assert_abs_diff_eq!(j.value.re, 3.0_f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(j.value.im, 0.0);
        // d/dz L = 2/(1 - z^2)
        assert_abs_diff_eq!(j.d1.re, 2.0 / 0.75, epsilon = 1e-15);
    }

    #[test]
    fn square_on_imaginary_axis() {
        let j = AnalyticExpr::pow(2).eval_d(c(0.0, 0.5), Order::Second).unwrap();
        assert!(close(j.value, c(-0.25, 0.0), 1e-16));
        assert!(close(j.d1, c(0.0, 1.0), 1e-16));
        assert!(close(j.d2, c(2.0, 0.0), 1e-16));
    }

    #[test]
    fn unrequested_orders_are_zero() {
        let j = AnalyticExpr::pow(3).eval_d(c(0.3, 0.1), Order::Value).unwrap();
        assert_eq!(j.d1, c(0.0, 0.0));
        assert_eq!(j.d2, c(0.0, 0.0));
        assert!(Order::try_from(3).is_err());
    }

    #[test]
    fn domain_error_outside_r_max() {
        let e = AnalyticExpr::z().with_r_max(0.5);
        assert!(matches!(e.eval(c(0.5, 0.0)), Err(Error::Domain { .. })));
        assert!(matches!(e.eval(c(0.0, 0.7)), Err(Error::Domain { .. })));
        assert!(e.eval(c(0.49, 0.0)).is_ok());
    }

    #[test]
    fn pole_guard_trips() {
        // (z - 0.25) / (z - 0.25)
        let shifted = || AnalyticExpr::z() - AnalyticExpr::real(0.25);
        let e = shifted() / shifted();
        assert!(matches!(e.eval(c(0.25, 0.0)), Err(Error::Pole { .. })));
        assert_abs_diff_eq!(e.eval(c(0.3, 0.0)).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rotation_requires_unit_modulus() {
        assert!(AnalyticExpr::atanh_log().rotate(c(0.5, 0.0)).is_err());
        let e = AnalyticExpr::atanh_log_rotated(c(0.0, 1.0)).unwrap();
        // L(iz) = 2i·atan(z)
        let v = e.eval(c(0.5, 0.0)).unwrap();
        assert!(close(v, c(0.0, 2.0 * 0.5_f64.atan()), 1e-15));
    }

    #[test]
    fn radial_integrals() {
        let z = AnalyticExpr::z();
        let v = z.integrate_radial(c(0.8, 0.0), 16).unwrap();
        assert!(close(v, c(0.32, 0.0), 1e-15));
        let v = z.integrate_radial(c(0.5, 0.5), 16).unwrap();
        assert!(close(v, c(0.0, 0.25), 1e-15));

        let e = AnalyticExpr::real(1.0) / (AnalyticExpr::real(1.0) - AnalyticExpr::pow(2));
        let v = e.integrate_radial(c(0.5, 0.0), 64).unwrap();
        // power-series oracle: atanh(x) = Σ x^(2k+1)/(2k+1)
        let series: f64 = (0..200).map(|k| 0.5_f64.powi(2 * k + 1) / (2 * k + 1) as f64).sum();
        assert_abs_diff_eq!(v.re, series, epsilon = 1e-14);
        assert_abs_diff_eq!(v.re, 0.5493061443340549, epsilon = 1e-14);
        assert!(z.integrate_radial(c(0.5, 0.0), 1).is_err());
    }

    #[test]
    fn derivative_matches_jet() {
        let e = (AnalyticExpr::atanh_log().scale_real(0.25)
            + AnalyticExpr::z() / (AnalyticExpr::real(1.0) - AnalyticExpr::pow(2)))
            * AnalyticExpr::atanh_log_rotated(c(0.0, 1.0)).unwrap();
        let d = e.derivative();
        let dd = d.derivative();
        for z in [c(0.1, 0.2), c(-0.6, 0.3), c(0.0, -0.85)] {
            let j = e.eval_d(z, Order::Second).unwrap();
            assert!(close(d.eval(z).unwrap(), j.d1, 1e-13));
            assert!(close(dd.eval(z).unwrap(), j.d2, 1e-12));
        }
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let p = AnalyticExpr::real(1.0) / (AnalyticExpr::real(1.0) - AnalyticExpr::pow(4));
        let h = p.clone().antiderivative(64).unwrap();
        assert_eq!(h.derivative(), p);
        let z = c(0.4, 0.3);
        let j = h.eval_d(z, Order::Second).unwrap();
        let pj = p.eval_d(z, Order::First).unwrap();
        assert_eq!(j.d1, pj.value);
        assert_eq!(j.d2, pj.d1);
        // 1/(1-z^4) integrates to (L(z) + (-i)L(iz)) / 4
        let closed = (AnalyticExpr::atanh_log()
            - AnalyticExpr::atanh_log_rotated(c(0.0, 1.0)).unwrap().scale(c(0.0, 1.0)))
        .scale_real(0.25);
        assert!(close(j.value, closed.eval(z).unwrap(), 1e-14));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let e = AnalyticExpr::atanh_log_rotated(c(0.0, 1.0)).unwrap().scale(c(0.0, -0.25))
            + AnalyticExpr::pow(3);
        let text = e.to_json().unwrap();
        assert!(text.contains("\"kind\":\"rotate\""));
        assert!(text.contains("[0.0,-0.25]"));
        assert_eq!(AnalyticExpr::from_json(&text).unwrap(), e);

        let bad = r#"{"root":{"kind":"quotient","children":[{"kind":"var"}]},"r_max":0.9}"#;
        assert!(AnalyticExpr::from_json(bad).is_err());
        let bad_sigma = r#"{"root":{"kind":"rotate","sigma":[2.0,0.0],"children":[{"kind":"atanh_log"}]},"r_max":0.9}"#;
        assert!(AnalyticExpr::from_json(bad_sigma).is_err());
    }

    #[test]
    fn display_is_readable() {
        let e = AnalyticExpr::z() + AnalyticExpr::pow(3).scale_real(1.0 / 3.0);
        assert_eq!(e.to_string(), "(z + 0.3333333333333333·z^3)");
        let l = AnalyticExpr::atanh_log_rotated(c(0.0, 1.0)).unwrap();
        assert_eq!(l.to_string(), "L(iz)");
    }
}
