use std::sync::Arc;

/// Builtin unary functions of the expression grammar.
///
/// `Sign` is not meant to be written by hand (it is accepted by the parser
/// anyway); it appears as the derivative of `Abs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sqrt => v.sqrt(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Abs => v.abs(),
            // sign(0) = 0; the derivative of abs is undefined there.
            Func::Sign => {
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else if v.is_nan() {
                    f64::NAN
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug)]
pub(crate) enum Kind {
    Const(f64),
    Var(usize),
    Add(Node, Node),
    Sub(Node, Node),
    Mul(Node, Node),
    Div(Node, Node),
    Neg(Node),
    Pow(Node, f64),
    Call(Func, Node),
}

/// Shared, immutable expression node. Cloning is a reference-count bump.
#[derive(Debug, Clone)]
pub(crate) struct Node(pub(crate) Arc<Kind>);

impl Node {
    pub fn kind(&self) -> &Kind {
        &self.0
    }

    pub fn constant(c: f64) -> Node {
        Node(Arc::new(Kind::Const(c)))
    }

    pub fn var(i: usize) -> Node {
        Node(Arc::new(Kind::Var(i)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.kind() {
            Kind::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(v)
    }

    pub fn add(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::constant(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => match b.kind() {
                Kind::Neg(inner) => Node::sub(a, inner.clone()),
                _ => Node(Arc::new(Kind::Add(a, b))),
            },
        }
    }

    pub fn sub(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::constant(x - y),
            (Some(x), _) if x == 0.0 => Node::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Node(Arc::new(Kind::Sub(a, b))),
        }
    }

    pub fn mul(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Node::constant(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Node::constant(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Node::neg(b),
            (_, Some(y)) if y == -1.0 => Node::neg(a),
            _ => Node(Arc::new(Kind::Mul(a, b))),
        }
    }

    pub fn div(a: Node, b: Node) -> Node {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Node::constant(x / y),
            (Some(x), _) if x == 0.0 => Node::constant(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Node(Arc::new(Kind::Div(a, b))),
        }
    }

    pub fn neg(a: Node) -> Node {
        match a.kind() {
            Kind::Const(c) => Node::constant(-c),
            Kind::Neg(inner) => inner.clone(),
            _ => Node(Arc::new(Kind::Neg(a))),
        }
    }

    pub fn pow(a: Node, e: f64) -> Node {
        if e == 0.0 {
            return Node::constant(1.0);
        }
        if e == 1.0 {
            return a;
        }
        if let Some(c) = a.as_const() {
            return Node::constant(powf(c, e));
        }
        Node(Arc::new(Kind::Pow(a, e)))
    }

    pub fn call(f: Func, a: Node) -> Node {
        if let Some(c) = a.as_const() {
            return Node::constant(f.apply(c));
        }
        Node(Arc::new(Kind::Call(f, a)))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.kind() {
            Kind::Const(c) => *c,
            Kind::Var(i) => x[*i],
            Kind::Add(a, b) => a.eval(x) + b.eval(x),
            Kind::Sub(a, b) => a.eval(x) - b.eval(x),
            Kind::Mul(a, b) => a.eval(x) * b.eval(x),
            Kind::Div(a, b) => a.eval(x) / b.eval(x),
            Kind::Neg(a) => -a.eval(x),
            Kind::Pow(a, e) => powf(a.eval(x), *e),
            Kind::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    pub fn diff(&self, k: usize) -> Node {
        match self.kind() {
            Kind::Const(_) => Node::constant(0.0),
            Kind::Var(i) => Node::constant(if *i == k { 1.0 } else { 0.0 }),
            Kind::Add(a, b) => Node::add(a.diff(k), b.diff(k)),
            Kind::Sub(a, b) => Node::sub(a.diff(k), b.diff(k)),
            Kind::Mul(a, b) => Node::add(
                Node::mul(a.diff(k), b.clone()),
                Node::mul(a.clone(), b.diff(k)),
            ),
            Kind::Div(a, b) => {
                let da = a.diff(k);
                let db = b.diff(k);
                let first = Node::div(da, b.clone());
                if db.is_const(0.0) {
                    return first;
                }
                let second = Node::div(Node::mul(a.clone(), db), Node::pow(b.clone(), 2.0));
                Node::sub(first, second)
            }
            Kind::Neg(a) => Node::neg(a.diff(k)),
            Kind::Pow(a, e) => {
                let da = a.diff(k);
                if da.is_const(0.0) {
                    return da;
                }
                Node::mul(
                    Node::mul(Node::constant(*e), Node::pow(a.clone(), e - 1.0)),
                    da,
                )
            }
            Kind::Call(f, a) => {
                let da = a.diff(k);
                if da.is_const(0.0) {
                    return da;
                }
                let outer = match f {
                    Func::Sqrt => Node::div(Node::constant(0.5), self.clone()),
                    Func::Sin => Node::call(Func::Cos, a.clone()),
                    Func::Cos => Node::neg(Node::call(Func::Sin, a.clone())),
                    Func::Exp => self.clone(),
                    Func::Log => Node::div(Node::constant(1.0), a.clone()),
                    Func::Abs => Node::call(Func::Sign, a.clone()),
                    Func::Sign => return Node::constant(0.0),
                };
                Node::mul(outer, da)
            }
        }
    }

    /// Replace every variable `i` by `subs[i]`.
    pub fn substitute(&self, subs: &[Node]) -> Node {
        match self.kind() {
            Kind::Const(c) => Node::constant(*c),
            Kind::Var(i) => subs[*i].clone(),
            Kind::Add(a, b) => Node::add(a.substitute(subs), b.substitute(subs)),
            Kind::Sub(a, b) => Node::sub(a.substitute(subs), b.substitute(subs)),
            Kind::Mul(a, b) => Node::mul(a.substitute(subs), b.substitute(subs)),
            Kind::Div(a, b) => Node::div(a.substitute(subs), b.substitute(subs)),
            Kind::Neg(a) => Node::neg(a.substitute(subs)),
            Kind::Pow(a, e) => Node::pow(a.substitute(subs), *e),
            Kind::Call(f, a) => Node::call(*f, a.substitute(subs)),
        }
    }

    pub fn count(&self) -> usize {
        match self.kind() {
            Kind::Const(_) | Kind::Var(_) => 1,
            Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                1 + a.count() + b.count()
            }
            Kind::Neg(a) | Kind::Pow(a, _) | Kind::Call(_, a) => 1 + a.count(),
        }
    }
}

/// Integer exponents go through `powi` so that negative bases stay real.
pub(crate) fn powf(base: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        base.powi(e as i32)
    } else {
        base.powf(e)
    }
}
