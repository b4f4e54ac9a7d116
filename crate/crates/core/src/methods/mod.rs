//! Splitting schemes: coefficient catalog, palindromic expansion and
//! order-condition residuals.

mod catalog;
mod order;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use catalog::{catalog, catalog_names, CATALOG_NAMES};
pub use order::{empirical_order, OrderMeasurement, OrderScan};

/// Which operator opens and closes the composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// `e^{-a1 h A} e^{-b1 h B} ... e^{-b1 h B} e^{-a1 h A}`
    Tvt,
    /// `e^{-b1 h B} e^{-a1 h A} ... e^{-a1 h A} e^{-b1 h B}`
    Vtv,
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ordering::Tvt => "TVT",
            Ordering::Vtv => "VTV",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// Kinetic part, or the exactly solvable part of a near-integrable split.
    A,
    /// Diagonal potential part.
    B,
}

/// Classical order `p`, or generalized order `(s1, s2, ...)` for near-integrable splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClaimedOrder {
    Classical(u32),
    Generalized(Vec<u32>),
}

impl ClaimedOrder {
    /// Order for a general (not small) perturbation: the last entry of a generalized order.
    pub fn classical(&self) -> u32 {
        match self {
            ClaimedOrder::Classical(p) => *p,
            ClaimedOrder::Generalized(s) => *s.last().expect("nonempty generalized order"),
        }
    }
}

impl fmt::Display for ClaimedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimedOrder::Classical(p) => write!(f, "{p}"),
            ClaimedOrder::Generalized(s) => {
                let parts: Vec<String> = s.iter().map(u32::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// One exponential of an expanded composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub op: Operator,
    pub weight: Complex64,
    /// Coefficient of `h^3 [B, [A, B]]`; zero for kinetic stages and unmodified methods.
    pub modified_weight: Complex64,
}

/// The full stage list of a symmetric composition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedSequence {
    pub stages: Vec<Stage>,
}

impl ExpandedSequence {
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn count(&self, op: Operator) -> usize {
        self.stages.iter().filter(|s| s.op == op).count()
    }

    pub fn weights(&self, op: Operator) -> impl Iterator<Item = Complex64> + '_ {
        self.stages.iter().filter(move |s| s.op == op).map(|s| s.weight)
    }
}

/// A symmetric splitting scheme described by the left half of its coefficients.
///
/// `half_a` and `half_b` hold only the free coefficients; the last one of
/// each kind is fixed by consistency when the sequence is expanded. The
/// central coefficient is `1 - 2 * (sum of the others of its kind)`, the last
/// coefficient of the other kind is `1/2 - (sum of the others)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    name: String,
    ordering: Ordering,
    half_a: Vec<Complex64>,
    half_b: Vec<Complex64>,
    half_c: Option<Vec<Complex64>>,
    order: ClaimedOrder,
}

impl Method {
    pub fn new(
        name: impl Into<String>,
        ordering: Ordering,
        half_a: Vec<Complex64>,
        half_b: Vec<Complex64>,
        half_c: Option<Vec<Complex64>>,
        order: ClaimedOrder,
    ) -> Result<Self> {
        let name = name.into();
        let (outer, inner) = match ordering {
            Ordering::Tvt => (half_a.len(), half_b.len()),
            Ordering::Vtv => (half_b.len(), half_a.len()),
        };
        if outer != inner && outer != inner + 1 {
            return Err(Error::Config(format!(
                "{name}: {} free A and {} free B coefficients do not form a symmetric {ordering} sequence",
                half_a.len(),
                half_b.len()
            )));
        }
        let method = Self { name, ordering, half_a, half_b, half_c, order };
        let b_count = method.half_sequence().iter().filter(|(op, _)| *op == Operator::B).count();
        if let Some(c) = &method.half_c {
            if c.len() != b_count {
                return Err(Error::Config(format!(
                    "{}: expected {b_count} modified-potential weights, got {}",
                    method.name,
                    c.len()
                )));
            }
        }
        if let Some(stage) = method.expand().stages.iter().find(|s| !(s.weight.re > 0.0)) {
            return Err(Error::Stability(format!(
                "{}: stage weight {} has nonpositive real part",
                method.name, stage.weight
            )));
        }
        Ok(method)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn half_a(&self) -> &[Complex64] {
        &self.half_a
    }

    pub fn half_b(&self) -> &[Complex64] {
        &self.half_b
    }

    pub fn half_c(&self) -> Option<&[Complex64]> {
        self.half_c.as_deref()
    }

    pub fn claimed_order(&self) -> &ClaimedOrder {
        &self.order
    }

    pub fn is_modified(&self) -> bool {
        self.half_c.is_some()
    }

    pub fn is_complex(&self) -> bool {
        let c = self.half_c.iter().flatten();
        self.half_a.iter().chain(&self.half_b).chain(c).any(|z| z.im != 0.0)
    }

    /// Number of B exponentials (TVT) or A exponentials (VTV) in one step.
    pub fn stages(&self) -> usize {
        let seq = self.expand();
        match self.ordering {
            Ordering::Tvt => seq.count(Operator::B),
            Ordering::Vtv => seq.count(Operator::A),
        }
    }

    /// Transform units one step costs: two transforms per A stage, doubled for complex data.
    pub fn units_per_step(&self) -> u64 {
        let transforms = 2 * self.expand().count(Operator::A) as u64;
        if self.is_complex() {
            2 * transforms
        } else {
            transforms
        }
    }

    /// Same scheme with conjugated coefficients.
    pub fn conjugate(&self) -> Method {
        let conj = |v: &[Complex64]| v.iter().map(|z| z.conj()).collect::<Vec<_>>();
        Method {
            name: format!("{}_conj", self.name),
            ordering: self.ordering,
            half_a: conj(&self.half_a),
            half_b: conj(&self.half_b),
            half_c: self.half_c.as_deref().map(conj),
            order: self.order.clone(),
        }
    }

    /// Left half of the composition, central exponential included.
    fn half_sequence(&self) -> Vec<(Operator, Complex64)> {
        let (outer_op, inner_op, outer, inner) = match self.ordering {
            Ordering::Tvt => (Operator::A, Operator::B, &self.half_a, &self.half_b),
            Ordering::Vtv => (Operator::B, Operator::A, &self.half_b, &self.half_a),
        };
        let half = Complex64::new(0.5, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let sum = |v: &[Complex64]| v.iter().sum::<Complex64>();
        let mut outer_full = outer.clone();
        let mut inner_full = inner.clone();
        if outer.len() == inner.len() {
            // ... o_k i_k o_{k+1} [i_{k+1}] : central coefficient is of the inner kind
            outer_full.push(half - sum(outer));
            inner_full.push(one - 2.0 * sum(inner));
        } else {
            // ... o_k i_k [o_{k+1}] : central coefficient is of the outer kind
            inner_full.push(half - sum(inner));
            outer_full.push(one - 2.0 * sum(outer));
        }
        let mut seq = Vec::with_capacity(outer_full.len() + inner_full.len());
        for (k, o) in outer_full.iter().enumerate() {
            seq.push((outer_op, *o));
            if let Some(i) = inner_full.get(k) {
                seq.push((inner_op, *i));
            }
        }
        seq
    }

    /// Full palindromic stage list.
    pub fn expand(&self) -> ExpandedSequence {
        let half = self.half_sequence();
        let zero = Complex64::new(0.0, 0.0);
        let mut b_index = 0;
        let mut left = Vec::with_capacity(half.len());
        for (op, weight) in half {
            let modified_weight = match (op, &self.half_c) {
                (Operator::B, Some(c)) => {
                    b_index += 1;
                    c[b_index - 1]
                }
                (Operator::B, None) => {
                    b_index += 1;
                    zero
                }
                (Operator::A, _) => zero,
            };
            left.push(Stage { op, weight, modified_weight });
        }
        let mut stages = left.clone();
        stages.extend(left.iter().rev().skip(1));
        ExpandedSequence { stages }
    }
}

/// `(sum a - 1, sum b - 1)` over the expanded sequence.
pub fn consistency_residuals(m: &Method) -> (Complex64, Complex64) {
    sequence_consistency_residuals(&m.expand())
}

pub fn sequence_consistency_residuals(seq: &ExpandedSequence) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    (seq.weights(Operator::A).sum::<Complex64>() - one, seq.weights(Operator::B).sum::<Complex64>() - one)
}

/// Third-order residuals `(f31 - 1/6, f32 - 1/6)`.
///
/// `f31` is the coefficient of the word `A B A` in the expanded product,
/// i.e. the sum of `a_i b_j a_k` over stages in strict sequence order.
/// `f32` is the same for `B A B`, plus twice the total modified weight,
/// since `[B, [A, B]] = 2 BAB - BBA - ABB`. Both must equal `1/6`, the word
/// coefficient of `exp(-h (A + B))`, for the `h^3` error to vanish.
pub fn third_order_residuals(m: &Method) -> (Complex64, Complex64) {
    let seq = m.expand();
    let sixth = Complex64::new(1.0 / 6.0, 0.0);
    let modified: Complex64 = seq
        .stages
        .iter()
        .filter(|s| s.op == Operator::B)
        .map(|s| s.modified_weight)
        .sum();
    let f31 = ordered_triple_sum(&seq, Operator::A, Operator::B);
    let f32 = ordered_triple_sum(&seq, Operator::B, Operator::A) + 2.0 * modified;
    (f31 - sixth, f32 - sixth)
}

/// `sum over p < q < r of w_p w_q w_r` with ops `(outer, middle, outer)`.
fn ordered_triple_sum(seq: &ExpandedSequence, outer: Operator, middle: Operator) -> Complex64 {
    let total: Complex64 = seq.weights(outer).sum();
    let mut before = Complex64::new(0.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for s in &seq.stages {
        if s.op == outer {
            before += s.weight;
        } else if s.op == middle {
            acc += before * s.weight * (total - before);
        }
    }
    acc
}
