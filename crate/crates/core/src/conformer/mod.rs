//! Internal-coordinate encoding of 3D conformers.
//!
//! Each atom is placed relative to the three atoms before it in SMILES
//! order: distance to the previous atom, bond angle, and dihedral.

mod align;
mod codec;
mod io;
mod quantize;

pub use align::{kabsch, rmsd_aligned, svd3, Svd3};
pub use codec::{decode_conformer, encode_conformer};
pub use io::{read_conformer_jsonl, read_internal, read_xyz, write_internal, write_xyz, ConformerRecord};
pub use quantize::{dequantize_internal, format_angle, format_distance, quantize_internal};

use crate::Scalar;

pub type Point<T> = [T; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct Conformer<T> {
    pub coords: Vec<Point<T>>,
}

impl<T: Scalar> Conformer<T> {
    pub fn new(coords: Vec<Point<T>>) -> Self {
        Conformer { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn map(&self, f: impl Fn(Point<T>) -> Point<T>) -> Self {
        Conformer { coords: self.coords.iter().map(|&p| f(p)).collect() }
    }
}

/// Local coordinates of one atom. Angles in degrees, distances in Å.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Record<T> {
    First,
    Second { d: T },
    Third { d: T, alpha: T },
    Full { alpha: T, beta: T, d: T },
}

impl<T: Scalar> Record<T> {
    /// Values in the order they are written: (), (d), (d, α), (α, β, d).
    pub fn values(&self) -> Vec<T> {
        match *self {
            Record::First => vec![],
            Record::Second { d } => vec![d],
            Record::Third { d, alpha } => vec![d, alpha],
            Record::Full { alpha, beta, d } => vec![alpha, beta, d],
        }
    }

    pub fn from_values(index: usize, v: &[T]) -> Option<Self> {
        Some(match (index, v) {
            (0, []) => Record::First,
            (1, &[d]) => Record::Second { d },
            (2, &[d, alpha]) => Record::Third { d, alpha },
            (i, &[alpha, beta, d]) if i >= 3 => Record::Full { alpha, beta, d },
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InternalConformer<T> {
    pub records: Vec<Record<T>>,
    /// Set where the three predecessors were collinear and β was forced to 0.
    pub degenerate: Vec<bool>,
}

impl<T: Scalar> InternalConformer<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn any_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }
}

pub(crate) fn sub<T: Scalar>(a: Point<T>, b: Point<T>) -> Point<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn add<T: Scalar>(a: Point<T>, b: Point<T>) -> Point<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn scale<T: Scalar>(a: Point<T>, s: T) -> Point<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot<T: Scalar>(a: Point<T>, b: Point<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross<T: Scalar>(a: Point<T>, b: Point<T>) -> Point<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm<T: Scalar>(a: Point<T>) -> T {
    dot(a, a).sqrt()
}

pub(crate) fn unit<T: Scalar>(a: Point<T>) -> Point<T> {
    scale(a, T::one() / norm(a))
}
