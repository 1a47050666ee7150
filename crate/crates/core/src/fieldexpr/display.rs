//! Pretty-printing back into the parser's grammar.
//!
//! The printer inserts exactly the parentheses needed for the parser to
//! rebuild the same tree, so printed expressions re-parse to bit-identical
//! evaluations.

use std::fmt::{self, Write};

use super::node::{Kind, Node};
use super::FieldExpr;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(node: &Node) -> u8 {
    match node.kind() {
        Kind::Add(..) | Kind::Sub(..) => SUM,
        Kind::Mul(..) | Kind::Div(..) => PRODUCT,
        Kind::Neg(_) => UNARY,
        Kind::Const(c) if c.is_sign_negative() => UNARY,
        Kind::Pow(..) => POWER,
        Kind::Const(_) | Kind::Var(_) | Kind::Call(..) => ATOM,
    }
}

fn write_number(out: &mut String, c: f64) -> fmt::Result {
    if c.is_sign_negative() {
        write!(out, "-{}", -c)
    } else {
        write!(out, "{c}")
    }
}

fn write_rhs(out: &mut String, node: &Node, coords: &[String], min_level: u8) -> fmt::Result {
    if level(node) == UNARY {
        out.push('(');
        write_node(out, node, coords, 0)?;
        out.push(')');
        Ok(())
    } else {
        write_node(out, node, coords, min_level)
    }
}

fn write_node(out: &mut String, node: &Node, coords: &[String], min_level: u8) -> fmt::Result {
    let paren = level(node) < min_level;
    if paren {
        out.push('(');
    }
    match node.kind() {
        Kind::Const(c) => write_number(out, *c)?,
        Kind::Var(i) => out.push_str(&coords[*i]),
        Kind::Add(a, b) | Kind::Sub(a, b) => {
            let op = if matches!(node.kind(), Kind::Add(..)) {
                '+'
            } else {
                '-'
            };
            write_node(out, a, coords, SUM)?;
            out.push(op);
            write_rhs(out, b, coords, PRODUCT)?;
        }
        Kind::Mul(a, b) | Kind::Div(a, b) => {
            let op = if matches!(node.kind(), Kind::Mul(..)) {
                '*'
            } else {
                '/'
            };
            write_node(out, a, coords, PRODUCT)?;
            out.push(op);
            write_rhs(out, b, coords, POWER)?;
        }
        Kind::Neg(a) => {
            out.push('-');
            write_node(out, a, coords, POWER)?;
        }
        Kind::Pow(a, e) => {
            write_node(out, a, coords, ATOM)?;
            out.push('^');
            if e.is_sign_negative() {
                out.push('(');
                write_number(out, *e)?;
                out.push(')');
            } else {
                write_number(out, *e)?;
            }
        }
        Kind::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_node(out, a, coords, 0)?;
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
    Ok(())
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_node(&mut s, &self.root, &self.coords, 0)?;
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use crate::fieldexpr::FieldExpr;

    fn show(src: &str) -> String {
        FieldExpr::parse(src, &["x", "y"]).unwrap().to_string()
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(show("x-(y-1)"), "x-(y-1)");
        assert_eq!(show("(x-y)-1"), "x-y-1");
        assert_eq!(show("x/(y*2)"), "x/(y*2)");
        assert_eq!(show("-(x+y)"), "-(x+y)");
        assert_eq!(show("(-x)^2"), "(-x)^2");
        assert_eq!(show("-x^2"), "-x^2");
        assert_eq!(show("x^-1.5"), "x^(-1.5)");
        assert_eq!(show("x*(-y)"), "x*(-y)");
        assert_eq!(show("x - -2"), "x-(-2)");
        assert_eq!(show("sqrt(x^2+y^2)-1"), "sqrt(x^2+y^2)-1");
    }
}
