//! Parser and evaluator against an independent tree printer and evaluator.
//!
//! Random trees are printed with the fewest parentheses the precedence rules
//! allow, so a wrong binding or associativity changes the value.

use polyode::parse;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const CASES: usize = 10_000;
const REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
enum Node {
    Num(f64),
    T,
    Pi,
    Neg(Box<Node>),
    Call(&'static str, Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
}

use Node::*;

fn b(n: Node) -> Box<Node> {
    Box::new(n)
}

fn gen(rng: &mut StdRng, depth: usize) -> Node {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => T,
            1 => Pi,
            2 => Num(rng.gen_range(0..10) as f64),
            _ => Num((rng.gen_range(0.0..10.0f64) * 1e3).round() / 1e3),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..11) {
        0 => Neg(b(gen(rng, d))),
        1 => {
            let f = ["sin", "cos", "arctan", "abs", "sign", "tan"][rng.gen_range(0..6)];
            Call(f, b(gen(rng, d)))
        }
        // bounded arguments keep exp and ln finite
        2 => Call("exp", b(Call("sin", b(gen(rng, d))))),
        3 => Call("ln", b(Add(b(Call("abs", b(gen(rng, d)))), b(Num(0.5))))),
        4 => Add(b(gen(rng, d)), b(gen(rng, d))),
        5 => Sub(b(gen(rng, d)), b(gen(rng, d))),
        6 => Mul(b(gen(rng, d)), b(gen(rng, d))),
        7 => Div(b(gen(rng, d)), b(Add(b(Num(1.5)), b(Call("sin", b(gen(rng, d))))))),
        8 => {
            let e = rng.gen_range(0..5) as f64;
            let e = if rng.gen_bool(0.3) { Neg(b(Num(e))) } else { Num(e) };
            Pow(b(Call("cos", b(gen(rng, d)))), b(e))
        }
        9 => Pow(
            b(Call("exp", b(Call("sin", b(gen(rng, d)))))),
            b(Call("sin", b(gen(rng, d)))),
        ),
        _ => Sub(b(Sub(b(gen(rng, d)), b(gen(rng, d)))), b(gen(rng, d))),
    }
}

/// Binding strength: sums 1, products 2, unary minus 3, powers 4, atoms 5.
fn level(n: &Node) -> u8 {
    match n {
        Add(..) | Sub(..) => 1,
        Mul(..) | Div(..) => 2,
        Neg(_) => 3,
        Pow(..) => 4,
        Num(_) | T | Pi | Call(..) => 5,
    }
}

fn show(n: &Node, need: u8, out: &mut String) {
    let paren = level(n) < need;
    if paren {
        out.push('(');
    }
    let bin = |out: &mut String, l: &Node, op: &str, r: &Node, ln: u8, rn: u8| {
        show(l, ln, out);
        out.push_str(op);
        show(r, rn, out);
    };
    match n {
        Num(v) => out.push_str(&format!("{v:?}")),
        T => out.push('t'),
        Pi => out.push_str("pi"),
        Neg(a) => {
            out.push('-');
            show(a, 3, out);
        }
        Call(f, a) => {
            out.push_str(f);
            out.push('(');
            show(a, 0, out);
            out.push(')');
        }
        Add(l, r) => bin(out, l, " + ", r, 1, 2),
        Sub(l, r) => bin(out, l, " - ", r, 1, 2),
        Mul(l, r) => bin(out, l, "*", r, 2, 3),
        Div(l, r) => bin(out, l, "/", r, 2, 3),
        // the base of a power is an atom, the exponent a factor
        Pow(l, r) => bin(out, l, "^", r, 5, 3),
    }
    if paren {
        out.push(')');
    }
}

fn eval(n: &Node, t: f64) -> f64 {
    match n {
        Num(v) => *v,
        T => t,
        Pi => std::f64::consts::PI,
        Neg(a) => -eval(a, t),
        Call(f, a) => {
            let x = eval(a, t);
            match *f {
                "sin" => x.sin(),
                "cos" => x.cos(),
                "tan" => x.tan(),
                "exp" => x.exp(),
                "ln" => x.ln(),
                "abs" => x.abs(),
                "arctan" => x.atan(),
                "sign" => {
                    if x == 0.0 {
                        0.0
                    } else {
                        x.signum()
                    }
                }
                _ => unreachable!(),
            }
        }
        Add(l, r) => eval(l, t) + eval(r, t),
        Sub(l, r) => eval(l, t) - eval(r, t),
        Mul(l, r) => eval(l, t) * eval(r, t),
        Div(l, r) => eval(l, t) / eval(r, t),
        Pow(l, r) => {
            let (x, y) = (eval(l, t), eval(r, t));
            if y.fract() == 0.0 {
                x.powi(y as i32)
            } else {
                x.powf(y)
            }
        }
    }
}

#[test]
fn random_trees_match_reference() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut compared = 0;
    for i in 0..CASES {
        let tree = gen(&mut rng, 5);
        let mut text = String::new();
        show(&tree, 0, &mut text);
        let t = rng.gen_range(-3.0..3.0);
        let want = eval(&tree, t);
        let expr = parse(&text).unwrap_or_else(|e| panic!("case {i}: `{text}` failed to parse: {e}"));
        let got = expr.eval(t);
        if !want.is_finite() {
            continue;
        }
        let got = got.unwrap_or_else(|e| panic!("case {i}: `{text}` at t = {t}: {e}"));
        let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        assert!(
            err <= REL_TOL || got == want,
            "case {i}: `{text}` at t = {t}: got {got}, want {want}"
        );
        // printing the parsed tree and parsing again keeps the value
        let again = parse(&expr.to_string()).unwrap().eval(t).unwrap();
        assert!(
            again == got || (again - got).abs() <= REL_TOL * got.abs(),
            "case {i}: reprint of `{text}`"
        );
        compared += 1;
    }
    assert!(compared > CASES * 9 / 10, "only {compared} finite cases");
}

#[test]
fn precedence_examples() {
    let cases = [
        ("-2^2", -4.0),
        ("2^-1", 0.5),
        ("2^3^2", 512.0),
        ("8/2/2", 2.0),
        ("1 - 2 - 3", -4.0),
        ("-t^2", -9.0),
        ("2*-t", -6.0),
        ("--t", 3.0),
    ];
    for (text, want) in cases {
        assert_eq!(parse(text).unwrap().eval(3.0).unwrap(), want, "{text}");
    }
}

#[test]
fn malformed_input_is_rejected() {
    for text in [
        "", "2 t", "sin t", "(1", "1)", "t^", "foo(t)", "atan(t)", "1 ** 2", "3x",
    ] {
        assert!(parse(text).is_err(), "`{text}` parsed");
    }
}
