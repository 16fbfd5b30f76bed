use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Where a primitive is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    All,
    NonZero,
    Positive,
}

impl Domain {
    pub fn contains<T: Scalar>(self, x: T) -> bool {
        match self {
            Domain::All => x.is_finite(),
            Domain::NonZero => x.is_finite() && x != T::zero(),
            Domain::Positive => x.is_finite() && x > T::zero(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unary {
    Neg,
    Inv,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    PowInt(i32),
}

impl Unary {
    pub fn name(self) -> &'static str {
        match self {
            Unary::Neg => "neg",
            Unary::Inv => "inv",
            Unary::Exp => "exp",
            Unary::Log => "log",
            Unary::Sin => "sin",
            Unary::Cos => "cos",
            Unary::Sqrt => "sqrt",
            Unary::PowInt(_) => "pow_int",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            Unary::Inv => Domain::NonZero,
            Unary::PowInt(k) if k < 0 => Domain::NonZero,
            Unary::Log | Unary::Sqrt => Domain::Positive,
            _ => Domain::All,
        }
    }

    pub fn eval<T: Scalar>(self, x: T) -> T {
        match self {
            Unary::Neg => -x,
            Unary::Inv => x.recip(),
            Unary::Exp => x.exp(),
            Unary::Log => x.ln(),
            Unary::Sin => x.sin(),
            Unary::Cos => x.cos(),
            Unary::Sqrt => x.sqrt(),
            Unary::PowInt(k) => x.powi(k),
        }
    }

    /// Add/mul/integer powers: the operations that keep a polynomial a polynomial.
    pub fn is_polynomial(self) -> bool {
        matches!(self, Unary::Neg) || matches!(self, Unary::PowInt(k) if k >= 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binary {
    Add,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node<T> {
    Input(usize),
    Const(T),
    Unary(Unary, usize),
    Binary(Binary, usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} refers to node {operand}, which does not precede it")]
    OperandOrder { node: usize, operand: usize },
    #[error("node {node} reads input {index} but the graph has arity {arity}")]
    InputOutOfRange { node: usize, index: usize, arity: usize },
    #[error("output refers to missing node {0}")]
    OutputOutOfRange(usize),
    #[error("expected {expected} inputs, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("domain violation at node {node}: {primitive} undefined at {value}")]
    Domain { node: usize, primitive: &'static str, value: f64 },
}

/// A smooth map `R^n → R^m` as a topologically ordered expression DAG.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprGraph<T> {
    arity: usize,
    nodes: Vec<Node<T>>,
    outputs: Vec<usize>,
}

impl<T: Scalar> ExprGraph<T> {
    pub fn new(arity: usize, nodes: Vec<Node<T>>, outputs: Vec<usize>) -> Result<Self, GraphError> {
        for (node, n) in nodes.iter().enumerate() {
            let check = |operand: usize| {
                if operand < node {
                    Ok(())
                } else {
                    Err(GraphError::OperandOrder { node, operand })
                }
            };
            match *n {
                Node::Input(index) if index >= arity => {
                    return Err(GraphError::InputOutOfRange { node, index, arity })
                }
                Node::Unary(_, a) => check(a)?,
                Node::Binary(_, a, b) => {
                    check(a)?;
                    check(b)?;
                }
                _ => {}
            }
        }
        if let Some(o) = outputs.iter().find(|o| **o >= nodes.len()) {
            return Err(GraphError::OutputOutOfRange(*o));
        }
        Ok(ExprGraph { arity, nodes, outputs })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn output_len(&self) -> usize {
        self.outputs.len()
    }

    /// `Id: R^n → R^n`.
    pub fn identity(n: usize) -> Self {
        ExprGraph { arity: n, nodes: (0..n).map(Node::Input).collect(), outputs: (0..n).collect() }
    }

    /// Constant map `R^n → R^m`.
    pub fn constant(arity: usize, values: &[T]) -> Self {
        ExprGraph {
            arity,
            nodes: values.iter().map(|v| Node::Const(*v)).collect(),
            outputs: (0..values.len()).collect(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            Node::Unary(u, _) => u.is_polynomial(),
            _ => true,
        })
    }

    /// Classical evaluation at a real point, checking each primitive's domain.
    pub fn eval(&self, x: &[T]) -> Result<Vec<T>, GraphError> {
        if x.len() != self.arity {
            return Err(GraphError::ArityMismatch { expected: self.arity, found: x.len() });
        }
        let mut vals: Vec<T> = Vec::with_capacity(self.nodes.len());
        for (node, n) in self.nodes.iter().enumerate() {
            let v = match *n {
                Node::Input(k) => x[k],
                Node::Const(c) => c,
                Node::Unary(op, a) => {
                    let arg = vals[a];
                    if !op.domain().contains(arg) {
                        return Err(GraphError::Domain {
                            node,
                            primitive: op.name(),
                            value: arg.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                    op.eval(arg)
                }
                Node::Binary(Binary::Add, a, b) => vals[a] + vals[b],
                Node::Binary(Binary::Mul, a, b) => vals[a] * vals[b],
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|o| vals[*o]).collect())
    }

    /// `self ∘ inner`: feeds the outputs of `inner` into the inputs of `self`.
    pub fn compose(&self, inner: &Self) -> Result<Self, GraphError> {
        if inner.output_len() != self.arity {
            return Err(GraphError::ArityMismatch { expected: self.arity, found: inner.output_len() });
        }
        let base = inner.nodes.len();
        let mut nodes = inner.nodes.clone();
        let mut remap = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let id = match *n {
                Node::Input(k) => inner.outputs[k],
                Node::Const(c) => {
                    nodes.push(Node::Const(c));
                    nodes.len() - 1
                }
                Node::Unary(op, a) => {
                    nodes.push(Node::Unary(op, remap[a]));
                    nodes.len() - 1
                }
                Node::Binary(op, a, b) => {
                    nodes.push(Node::Binary(op, remap[a], remap[b]));
                    nodes.len() - 1
                }
            };
            remap.push(id);
        }
        debug_assert!(nodes.len() >= base);
        let outputs = self.outputs.iter().map(|o| remap[*o]).collect();
        Self::new(inner.arity, nodes, outputs)
    }

    /// `(f, g): R^n → R^{m₁ + m₂}`.
    pub fn pair(&self, other: &Self) -> Result<Self, GraphError> {
        if self.arity != other.arity {
            return Err(GraphError::ArityMismatch { expected: self.arity, found: other.arity });
        }
        let shift = self.nodes.len();
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().map(|n| match *n {
            Node::Unary(op, a) => Node::Unary(op, a + shift),
            Node::Binary(op, a, b) => Node::Binary(op, a + shift, b + shift),
            other => other,
        }));
        let mut outputs = self.outputs.clone();
        outputs.extend(other.outputs.iter().map(|o| o + shift));
        Self::new(self.arity, nodes, outputs)
    }

    /// Graph with only the chosen outputs.
    pub fn select_outputs(&self, which: &[usize]) -> Result<Self, GraphError> {
        let outputs = which
            .iter()
            .map(|w| self.outputs.get(*w).copied().ok_or(GraphError::OutputOutOfRange(*w)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.arity, self.nodes.clone(), outputs)
    }

    /// Re-parseable infix text for each output.
    pub fn to_strings(&self) -> Vec<String> {
        let mut text: Vec<String> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let s = match *n {
                Node::Input(k) => format!("x{}", k + 1),
                Node::Const(c) if c < T::zero() => format!("({c:?})"),
                Node::Const(c) => format!("{c:?}"),
                Node::Unary(Unary::Neg, a) => format!("(-{})", text[a]),
                Node::Unary(Unary::Inv, a) => format!("(1/{})", text[a]),
                Node::Unary(Unary::PowInt(k), a) if k < 0 => format!("({})^({k})", text[a]),
                Node::Unary(Unary::PowInt(k), a) => format!("({})^{k}", text[a]),
                Node::Unary(op, a) => format!("{}({})", op.name(), text[a]),
                Node::Binary(Binary::Add, a, b) => format!("({} + {})", text[a], text[b]),
                Node::Binary(Binary::Mul, a, b) => format!("({} * {})", text[a], text[b]),
            };
            text.push(s);
        }
        self.outputs.iter().map(|o| text[*o].clone()).collect()
    }
}

impl<T: Scalar> fmt::Display for ExprGraph<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_strings().join(", "))
    }
}

/// Incremental construction of an [`ExprGraph`]; every method returns the
/// new node's index.
#[derive(Clone, Debug)]
pub struct GraphBuilder<T> {
    arity: usize,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> GraphBuilder<T> {
    pub fn new(arity: usize) -> Self {
        GraphBuilder { arity, nodes: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, n: Node<T>) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    pub fn input(&mut self, k: usize) -> usize {
        self.push(Node::Input(k))
    }

    pub fn constant(&mut self, c: T) -> usize {
        self.push(Node::Const(c))
    }

    pub fn unary(&mut self, op: Unary, a: usize) -> usize {
        self.push(Node::Unary(op, a))
    }

    pub fn add(&mut self, a: usize, b: usize) -> usize {
        self.push(Node::Binary(Binary::Add, a, b))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Node::Binary(Binary::Mul, a, b))
    }

    pub fn neg(&mut self, a: usize) -> usize {
        self.unary(Unary::Neg, a)
    }

    pub fn sub(&mut self, a: usize, b: usize) -> usize {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    /// `a / b` as `a · inv(b)`.
    pub fn div(&mut self, a: usize, b: usize) -> usize {
        let ib = self.unary(Unary::Inv, b);
        self.mul(a, ib)
    }

    pub fn powi(&mut self, a: usize, k: i32) -> usize {
        self.unary(Unary::PowInt(k), a)
    }

    pub fn scale(&mut self, a: usize, s: T) -> usize {
        let c = self.constant(s);
        self.mul(c, a)
    }

    pub fn add_const(&mut self, a: usize, s: T) -> usize {
        let c = self.constant(s);
        self.add(a, c)
    }

    /// Sum of several nodes; a zero constant when empty.
    pub fn sum(&mut self, terms: &[usize]) -> usize {
        match terms.split_first() {
            None => self.constant(T::zero()),
            Some((first, rest)) => rest.iter().fold(*first, |acc, t| self.add(acc, *t)),
        }
    }

    pub(crate) fn into_nodes(self) -> Vec<Node<T>> {
        self.nodes
    }

    pub fn finish(self, outputs: Vec<usize>) -> Result<ExprGraph<T>, GraphError> {
        ExprGraph::new(self.arity, self.nodes, outputs)
    }
}
