//! Scalar-field expressions over named coordinates.
//!
//! A [`FieldExpr`] is an immutable expression tree (constants, coordinates,
//! arithmetic, constant powers and a handful of builtin functions) that can
//! be evaluated at a point and differentiated exactly, to any order. Trees
//! share subexpressions through reference counting, so differentiating and
//! cloning are cheap and the type is `Send + Sync`.
//!
//! ```
//! use qgeom::fieldexpr::FieldExpr;
//!
//! let f = FieldExpr::parse("x^2 + y^2 - 1", &["x", "y"]).unwrap();
//! let fx = f.differentiate("x").unwrap();
//! assert_eq!(fx.eval(&[0.5, 0.0]), 1.0);
//! ```

mod display;
mod node;
mod parse;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

pub use node::Func;
use node::Node;
pub use parse::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("dimension mismatch: expression has {expected} coordinates, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("coordinate lists differ: {0:?} vs {1:?}")]
    CoordinateMismatch(Vec<String>, Vec<String>),
    #[error("substitution needs {expected} expressions, got {got}")]
    SubstitutionArity { expected: usize, got: usize },
}

/// Result of a checked evaluation. Non-finite values are returned unchanged
/// and flagged rather than turned into errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub non_finite: bool,
}

#[derive(Clone)]
pub struct FieldExpr {
    root: Node,
    coords: Arc<[String]>,
}

impl fmt::Debug for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldExpr({} over {:?})", self, self.coords)
    }
}

impl FieldExpr {
    /// Parse `src` over the declared coordinate names.
    pub fn parse(src: &str, coords: &[&str]) -> Result<FieldExpr, ParseError> {
        let coords = validate_coords(coords)?;
        let root = parse::parse(src, &coords)?;
        Ok(FieldExpr { root, coords })
    }

    pub fn constant(value: f64, coords: &[&str]) -> Result<FieldExpr, ParseError> {
        let coords = validate_coords(coords)?;
        Ok(FieldExpr {
            root: Node::constant(value),
            coords,
        })
    }

    /// The `i`-th coordinate as an expression.
    pub fn coordinate(i: usize, coords: &[&str]) -> Result<FieldExpr, ParseError> {
        let coords = validate_coords(coords)?;
        if i >= coords.len() {
            return Err(ParseError::InvalidCoordinates(format!(
                "coordinate index {i} out of range"
            )));
        }
        Ok(FieldExpr {
            root: Node::var(i),
            coords,
        })
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    /// Constant with the same coordinate list as `self`.
    pub fn lit(&self, value: f64) -> FieldExpr {
        self.wrap(Node::constant(value))
    }

    /// Coordinate `i` with the same coordinate list as `self`.
    pub fn var(&self, i: usize) -> FieldExpr {
        assert!(i < self.dim(), "coordinate index {i} out of range");
        self.wrap(Node::var(i))
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.root.as_const()
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// Number of nodes in the (unshared) tree; a measure of expression swell.
    pub fn node_count(&self) -> usize {
        self.root.count()
    }

    /// Exact partial derivative with respect to the named coordinate.
    pub fn differentiate(&self, coord: &str) -> Result<FieldExpr, FieldError> {
        let k = self
            .index_of(coord)
            .ok_or_else(|| FieldError::UnknownCoordinate(coord.to_string()))?;
        Ok(self.diff(k))
    }

    /// Exact partial derivative with respect to coordinate index `k`.
    pub fn diff(&self, k: usize) -> FieldExpr {
        assert!(k < self.dim(), "coordinate index {k} out of range");
        self.wrap(self.root.diff(k))
    }

    pub fn gradient(&self) -> Vec<FieldExpr> {
        (0..self.dim()).map(|k| self.diff(k)).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation, FieldError> {
        self.check_dim(x)?;
        let value = self.root.eval(x);
        Ok(Evaluation {
            value,
            non_finite: !value.is_finite(),
        })
    }

    /// Unchecked evaluation. Panics if `x` is shorter than the coordinate list.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        self.root.eval(x)
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<(), FieldError> {
        if x.len() != self.dim() {
            return Err(FieldError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Re-express over a different coordinate list, matching by name.
    pub fn embed<S: AsRef<str>>(&self, coords: &[S]) -> Result<FieldExpr, FieldError> {
        let target: Vec<&str> = coords.iter().map(|c| c.as_ref()).collect();
        let target_coords = validate_coords(&target)
            .map_err(|_| FieldError::CoordinateMismatch(self.coords.to_vec(), owned(&target)))?;
        let subs = self
            .coords
            .iter()
            .map(|c| {
                target
                    .iter()
                    .position(|t| t == c)
                    .map(Node::var)
                    .ok_or_else(|| FieldError::UnknownCoordinate(c.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FieldExpr {
            root: self.root.substitute(&subs),
            coords: target_coords,
        })
    }

    /// Composition: replace coordinate `i` by `subs[i]`. The result lives on
    /// the coordinate list of the substitutes.
    pub fn compose(&self, subs: &[FieldExpr]) -> Result<FieldExpr, FieldError> {
        if subs.len() != self.dim() {
            return Err(FieldError::SubstitutionArity {
                expected: self.dim(),
                got: subs.len(),
            });
        }
        let Some(first) = subs.first() else {
            return Ok(self.clone());
        };
        for s in subs {
            if s.coords != first.coords {
                return Err(FieldError::CoordinateMismatch(
                    first.coords.to_vec(),
                    s.coords.to_vec(),
                ));
            }
        }
        let nodes: Vec<Node> = subs.iter().map(|s| s.root.clone()).collect();
        Ok(FieldExpr {
            root: self.root.substitute(&nodes),
            coords: first.coords.clone(),
        })
    }

    pub fn powf(&self, e: f64) -> FieldExpr {
        self.wrap(Node::pow(self.root.clone(), e))
    }

    pub fn square(&self) -> FieldExpr {
        self.powf(2.0)
    }

    pub fn apply(&self, f: Func) -> FieldExpr {
        self.wrap(Node::call(f, self.root.clone()))
    }

    pub fn sqrt(&self) -> FieldExpr {
        self.apply(Func::Sqrt)
    }

    /// Sum of expressions sharing one coordinate list; `None` for an empty input.
    pub fn sum<'a, I>(items: I) -> Option<FieldExpr>
    where
        I: IntoIterator<Item = &'a FieldExpr>,
    {
        let mut iter = items.into_iter();
        let first = iter.next()?.clone();
        Some(iter.fold(first, |acc, e| &acc + e))
    }

    fn wrap(&self, root: Node) -> FieldExpr {
        FieldExpr {
            root,
            coords: self.coords.clone(),
        }
    }

    fn binary(&self, other: &FieldExpr, op: fn(Node, Node) -> Node) -> FieldExpr {
        assert!(
            Arc::ptr_eq(&self.coords, &other.coords) || self.coords == other.coords,
            "binary operation on expressions over different coordinates: {:?} vs {:?}",
            self.coords,
            other.coords
        );
        self.wrap(op(self.root.clone(), other.root.clone()))
    }
}

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn validate_coords(coords: &[&str]) -> Result<Arc<[String]>, ParseError> {
    if coords.is_empty() {
        return Err(ParseError::InvalidCoordinates(
            "coordinate list is empty".into(),
        ));
    }
    for (i, c) in coords.iter().enumerate() {
        if !parse::is_identifier(c) {
            return Err(ParseError::InvalidCoordinates(format!(
                "`{c}` is not an identifier"
            )));
        }
        if coords[..i].contains(c) {
            return Err(ParseError::InvalidCoordinates(format!(
                "duplicate coordinate `{c}`"
            )));
        }
    }
    Ok(owned(coords).into())
}

/// Parse a field expression; free-function form of [`FieldExpr::parse`].
pub fn parse_field(src: &str, coords: &[&str]) -> Result<FieldExpr, ParseError> {
    FieldExpr::parse(src, coords)
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $ctor:path) => {
        impl $trait<&FieldExpr> for &FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: &FieldExpr) -> FieldExpr {
                self.binary(rhs, $ctor)
            }
        }
        impl $trait<FieldExpr> for FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: FieldExpr) -> FieldExpr {
                self.binary(&rhs, $ctor)
            }
        }
        impl $trait<f64> for &FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: f64) -> FieldExpr {
                self.wrap($ctor(self.root.clone(), Node::constant(rhs)))
            }
        }
        impl $trait<&FieldExpr> for f64 {
            type Output = FieldExpr;
            fn $method(self, rhs: &FieldExpr) -> FieldExpr {
                rhs.wrap($ctor(Node::constant(self), rhs.root.clone()))
            }
        }
    };
}

impl_binop!(Add, add, Node::add);
impl_binop!(Sub, sub, Node::sub);
impl_binop!(Mul, mul, Node::mul);
impl_binop!(Div, div, Node::div);

impl Neg for &FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        self.wrap(Node::neg(self.root.clone()))
    }
}

impl Neg for FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        -&self
    }
}
