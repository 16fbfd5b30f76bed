//! Closed-form Taylor coefficients `f^{(j)}(λ)/j!` of the primitives.

use crate::expr::{GraphBuilder, Unary};
use crate::scalar::{binomial, inv_factorial, Scalar};

/// Taylor jet generator for one primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaylorTable {
    primitive: Unary,
}

impl TaylorTable {
    pub fn new(primitive: Unary) -> Self {
        TaylorTable { primitive }
    }

    pub fn primitive(&self) -> Unary {
        self.primitive
    }

    pub fn name(&self) -> &'static str {
        self.primitive.name()
    }

    /// `f^{(j)}(λ) / j!`.
    pub fn coefficient<T: Scalar>(&self, lambda: T, j: usize) -> T {
        let sign = |odd: bool| if odd { -T::one() } else { T::one() };
        match self.primitive {
            Unary::Neg => match j {
                0 => -lambda,
                1 => -T::one(),
                _ => T::zero(),
            },
            Unary::Exp => lambda.exp() * inv_factorial(j),
            Unary::Sin => {
                let d = match j % 4 {
                    0 => lambda.sin(),
                    1 => lambda.cos(),
                    2 => -lambda.sin(),
                    _ => -lambda.cos(),
                };
                d * inv_factorial(j)
            }
            Unary::Cos => {
                let d = match j % 4 {
                    0 => lambda.cos(),
                    1 => -lambda.sin(),
                    2 => -lambda.cos(),
                    _ => lambda.sin(),
                };
                d * inv_factorial(j)
            }
            Unary::Log if j == 0 => lambda.ln(),
            // d^j/dλ^j log λ = (−1)^{j+1} (j−1)! λ^{−j}
            Unary::Log => sign(j.is_multiple_of(2)) / (T::from_count(j) * lambda.powi(j as i32)),
            Unary::Inv => sign(j % 2 == 1) / lambda.powi(j as i32 + 1),
            Unary::Sqrt => binomial(T::lit(0.5), j) * lambda.sqrt() / lambda.powi(j as i32),
            Unary::PowInt(k) => {
                let c = binomial(T::lit(k as f64), j);
                if c == T::zero() {
                    T::zero()
                } else {
                    c * lambda.powi(k - j as i32)
                }
            }
        }
    }

    /// Coefficients for `j = 0..=order`.
    pub fn coefficients<T: Scalar>(&self, lambda: T, order: usize) -> Vec<T> {
        (0..=order).map(|j| self.coefficient(lambda, j)).collect()
    }

    /// Emits nodes computing `f^{(j)}(λ)/j!` for `j = 0..=order` from the
    /// node holding `λ`. Only the primitives themselves are used, so the
    /// resulting graph can be lifted again.
    pub fn emit<T: Scalar>(&self, b: &mut GraphBuilder<T>, lambda: usize, order: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(order + 1);
        match self.primitive {
            Unary::Neg => {
                out.push(b.neg(lambda));
                if order >= 1 {
                    out.push(b.constant(-T::one()));
                }
                for _ in 2..=order {
                    out.push(b.constant(T::zero()));
                }
            }
            Unary::Exp => {
                let e = b.unary(Unary::Exp, lambda);
                out.push(e);
                for j in 1..=order {
                    out.push(b.scale(e, inv_factorial(j)));
                }
            }
            Unary::Sin | Unary::Cos => {
                let s = b.unary(Unary::Sin, lambda);
                let c = b.unary(Unary::Cos, lambda);
                let shift = if self.primitive == Unary::Sin { 0 } else { 1 };
                for j in 0..=order {
                    let (node, neg) = match (j + shift) % 4 {
                        0 => (s, false),
                        1 => (c, false),
                        2 => (s, true),
                        _ => (c, true),
                    };
                    let f = if neg { -inv_factorial::<T>(j) } else { inv_factorial(j) };
                    out.push(b.scale(node, f));
                }
            }
            Unary::Log => {
                out.push(b.unary(Unary::Log, lambda));
                for j in 1..=order {
                    let p = b.powi(lambda, -(j as i32));
                    let s = if j % 2 == 0 { -T::one() } else { T::one() };
                    out.push(b.scale(p, s / T::from_count(j)));
                }
            }
            Unary::Inv => {
                for j in 0..=order {
                    let p = b.powi(lambda, -(j as i32) - 1);
                    let s = if j % 2 == 1 { -T::one() } else { T::one() };
                    out.push(b.scale(p, s));
                }
            }
            Unary::Sqrt => {
                let r = b.unary(Unary::Sqrt, lambda);
                out.push(r);
                for j in 1..=order {
                    let p = b.powi(lambda, -(j as i32));
                    let t = b.mul(r, p);
                    out.push(b.scale(t, binomial(T::lit(0.5), j)));
                }
            }
            Unary::PowInt(k) => {
                for j in 0..=order {
                    let c = binomial(T::lit(k as f64), j);
                    if c == T::zero() {
                        out.push(b.constant(T::zero()));
                    } else {
                        let p = b.powi(lambda, k - j as i32);
                        out.push(b.scale(p, c));
                    }
                }
            }
        }
        out
    }
}
