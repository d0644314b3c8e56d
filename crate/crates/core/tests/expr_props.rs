use std::collections::HashMap;

use minkruled::expr::{parse, BinOp, Expr, Func};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|n| Expr::Const(n as f64 / 8.0)),
        prop::sample::select(vec!["s", "a", "b"]).prop_map(|v| Expr::Var(v.to_string())),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (prop::sample::select(Func::ALL.to_vec()), inner.clone())
                .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            (
                prop::sample::select(vec![
                    BinOp::Add,
                    BinOp::Sub,
                    BinOp::Mul,
                    BinOp::Div,
                    BinOp::Pow
                ]),
                inner.clone(),
                inner
            )
                .prop_map(|(op, l, r)| Expr::Bin(op, Box::new(l), Box::new(r))),
        ]
    })
}

fn bindings() -> HashMap<String, f64> {
    [("s", 0.7), ("a", -1.25), ("b", 2.5)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn same(x: &Result<f64, impl std::fmt::Debug>, y: &Result<f64, impl std::fmt::Debug>) -> bool {
    match (x, y) {
        (Ok(a), Ok(b)) => a.to_bits() == b.to_bits(),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn printing_round_trips(e in tree()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", text);
        let env = bindings();
        prop_assert!(same(&back.eval(&env), &e.eval(&env)), "{}", text);
    }
}

/// Independent reference evaluator: a hand-written recursive-descent parser
/// that evaluates while parsing.
struct Reference<'a> {
    src: &'a [u8],
    pos: usize,
    s: f64,
}

impl Reference<'_> {
    fn eval(text: &str, s: f64) -> f64 {
        let mut r = Reference {
            src: text.as_bytes(),
            pos: 0,
            s,
        };
        let v = r.sum();
        r.skip();
        assert_eq!(r.pos, r.src.len(), "trailing input in {text}");
        v
    }

    fn skip(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos] == b' ' {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> f64 {
        let mut v = self.product();
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.product();
            v = if c == b'+' { v + r } else { v - r };
        }
        v
    }

    fn product(&mut self) -> f64 {
        let mut v = self.unary();
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let r = self.unary();
            v = if c == b'*' { v * r } else { v / r };
        }
        v
    }

    // unary minus binds looser than ^, so -2^2 = -4
    fn unary(&mut self) -> f64 {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            -self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> f64 {
        let base = self.atom();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            base.powf(self.unary())
        } else {
            base
        }
    }

    fn atom(&mut self) -> f64 {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum();
                assert_eq!(self.peek(), Some(b')'));
                self.pos += 1;
                v
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .unwrap()
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .to_string();
                if name == "s" {
                    return self.s;
                }
                let arg = self.atom();
                match name.as_str() {
                    "sin" => arg.sin(),
                    "cos" => arg.cos(),
                    "sinh" => arg.sinh(),
                    "cosh" => arg.cosh(),
                    "tanh" => arg.tanh(),
                    "exp" => arg.exp(),
                    "log" => arg.ln(),
                    "sqrt" => arg.sqrt(),
                    "abs" => arg.abs(),
                    other => panic!("unknown name {other}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

const CORPUS: [&str; 50] = [
    "1 + 2 * 3",
    "(1 + 2) * 3",
    "2 ^ 3 ^ 2",
    "(2 ^ 3) ^ 2",
    "-2 ^ 2",
    "(-2) ^ 2",
    "2 ^ -1",
    "2 ^ -s",
    "8 / 4 / 2",
    "8 / (4 / 2)",
    "1 - 2 - 3",
    "1 - (2 - 3)",
    "-s * 3",
    "--s",
    "- - 2 ^ 2",
    "3 * -s",
    "2 * 3 ^ 2",
    "(2 * 3) ^ 2",
    "s ^ 2 * 3",
    "1 / s ^ 2",
    "sinh(s) ^ 2",
    "cosh(s) ^ 2 - sinh(s) ^ 2",
    "sqrt(2) / 2 * sinh(s)",
    "sqrt(2) / (2 * sinh(s))",
    "exp(-s ^ 2)",
    "exp((-s) ^ 2)",
    "log(exp(s)) * 2",
    "abs(-3 + s)",
    "-abs(s - 3)",
    "2 ^ 2 ^ -1",
    "1 + 2 - 3 + 4",
    "1 * 2 / 3 * 4",
    "1 + 2 * 3 ^ 2 - 4 / 2",
    "(1 + 2 * 3) ^ 2",
    "s * s * s - s ^ 3",
    "sin(s) ^ 2 + cos(s) ^ 2",
    "tanh(s) * cosh(s) - sinh(s)",
    "-(s + 1) * 2",
    "-(s + 1) ^ 2",
    "((s))",
    "2 * (3 + (4 - 5) * 6)",
    "10 - 2 ^ 3 * 2",
    "1.5 * s - 0.25",
    "s / 2 / 2 * 8",
    "-s ^ -2",
    "sqrt(s + 1) ^ 3",
    "cosh(2 * s) - 2 * sinh(s) ^ 2",
    "3 ^ (s - 1)",
    "2 * -3 ^ 2",
    "1 - -1",
];

#[test]
fn precedence_matches_reference() {
    let params = HashMap::new();
    for text in CORPUS {
        for s in [0.3, 1.7] {
            let expected = Reference::eval(text, s);
            let got = parse(text).unwrap().eval_at(s, &params).unwrap();
            assert!(
                got == expected || (got - expected).abs() <= 1e-15 * expected.abs(),
                "{text} at s={s}: {got} vs {expected}"
            );
        }
    }
}
