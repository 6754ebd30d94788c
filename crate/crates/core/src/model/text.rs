//! Canonical prefix text form of expressions and profiles.
//!
//! ```text
//! (profile (support 1.0 2.0) (breaks) (* 2.718281828459045 (expinv ...)))
//! ```
//!
//! Printing always produces the canonical form; parsing accepts the canonical form plus a
//! few shorthands (`-`, `neg`, `bump`) that expand on read.

use super::expr::Expr;
use super::profile::{RadialProfile, Support};
use super::ModelError;

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<Sexp>, line: usize, col: usize },
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, col, .. } | Sexp::List { line, col, .. } => (*line, *col),
        }
    }
}

fn err(pos: (usize, usize), message: impl Into<String>) -> ModelError {
    ModelError::Parse { line: pos.0, col: pos.1, message: message.into() }
}

fn read_all(text: &str) -> Result<Vec<Sexp>, ModelError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = vec![(Vec::new(), 1, 1)];
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            '(' => {
                stack.push((Vec::new(), line, col));
                i += 1;
                col += 1;
            }
            ')' => {
                if stack.len() == 1 {
                    return Err(err((line, col), "unbalanced ')'"));
                }
                let (items, l, c) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Sexp::List { items, line: l, col: c });
                i += 1;
                col += 1;
            }
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            _ => {
                let start_col = col;
                let mut text = String::new();
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && chars[i] != '('
                    && chars[i] != ')'
                {
                    text.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                stack.last_mut().unwrap().0.push(Sexp::Atom { text, line, col: start_col });
            }
        }
    }
    if stack.len() != 1 {
        let (_, l, c) = stack.pop().unwrap();
        return Err(err((l, c), "unclosed '('"));
    }
    Ok(stack.pop().unwrap().0)
}

fn read_one(text: &str) -> Result<Sexp, ModelError> {
    let mut items = read_all(text)?;
    match items.len() {
        0 => Err(err((1, 1), "empty input")),
        1 => Ok(items.pop().unwrap()),
        _ => Err(err(items[1].pos(), "trailing input after expression")),
    }
}

fn number(s: &Sexp) -> Result<f64, ModelError> {
    match s {
        Sexp::Atom { text, .. } => text
            .parse::<f64>()
            .map_err(|_| err(s.pos(), format!("expected a number, found '{text}'"))),
        Sexp::List { .. } => Err(err(s.pos(), "expected a number, found a list")),
    }
}

fn head(items: &[Sexp], pos: (usize, usize)) -> Result<&str, ModelError> {
    match items.first() {
        Some(Sexp::Atom { text, .. }) => Ok(text.as_str()),
        Some(other) => Err(err(other.pos(), "expected an operator name")),
        None => Err(err(pos, "empty list")),
    }
}

fn arity(items: &[Sexp], n: usize, name: &str, pos: (usize, usize)) -> Result<(), ModelError> {
    if items.len() - 1 != n {
        return Err(err(pos, format!("'{name}' takes {n} argument(s), found {}", items.len() - 1)));
    }
    Ok(())
}

fn to_expr(s: &Sexp) -> Result<Expr, ModelError> {
    match s {
        Sexp::Atom { text, .. } => {
            if text == "r" {
                Ok(Expr::Var)
            } else {
                Ok(Expr::Const(number(s)?))
            }
        }
        Sexp::List { items, .. } => {
            let pos = s.pos();
            let name = head(items, pos)?;
            let args = &items[1..];
            let sub = |k: usize| to_expr(&args[k]);
            match name {
                "+" => Ok(Expr::Add(args.iter().map(to_expr).collect::<Result<_, _>>()?)),
                "*" => Ok(Expr::Mul(args.iter().map(to_expr).collect::<Result<_, _>>()?)),
                "/" => {
                    arity(items, 2, name, pos)?;
                    Ok(Expr::Div(Box::new(sub(0)?), Box::new(sub(1)?)))
                }
                "pow" => {
                    arity(items, 2, name, pos)?;
                    Ok(Expr::Pow(Box::new(sub(0)?), number(&args[1])?))
                }
                "exp" => {
                    arity(items, 1, name, pos)?;
                    Ok(Expr::Exp(Box::new(sub(0)?)))
                }
                "log" => {
                    arity(items, 1, name, pos)?;
                    Ok(Expr::Log(Box::new(sub(0)?)))
                }
                "expinv" => {
                    arity(items, 1, name, pos)?;
                    Ok(Expr::ExpInv(Box::new(sub(0)?)))
                }
                "step" => {
                    arity(items, 3, name, pos)?;
                    let lo = number(&args[1])?;
                    let hi = number(&args[2])?;
                    if !(lo < hi) {
                        return Err(err(pos, "step requires lo < hi"));
                    }
                    Ok(Expr::Step { arg: Box::new(sub(0)?), lo, hi })
                }
                "piecewise" => {
                    if args.len() < 3 {
                        return Err(err(pos, "piecewise needs an argument, a break list and pieces"));
                    }
                    let breaks = match &args[1] {
                        Sexp::List { items: bs, .. } => {
                            bs.iter().map(number).collect::<Result<Vec<_>, _>>()?
                        }
                        other => return Err(err(other.pos(), "expected a list of breakpoints")),
                    };
                    if breaks.windows(2).any(|w| !(w[0] < w[1])) {
                        return Err(err(pos, "breakpoints must be strictly increasing"));
                    }
                    let pieces =
                        args[2..].iter().map(to_expr).collect::<Result<Vec<_>, _>>()?;
                    if pieces.len() != breaks.len() + 1 {
                        return Err(err(
                            pos,
                            format!(
                                "piecewise with {} breakpoints needs {} pieces, found {}",
                                breaks.len(),
                                breaks.len() + 1,
                                pieces.len()
                            ),
                        ));
                    }
                    Ok(Expr::Piecewise { arg: Box::new(sub(0)?), breaks, pieces })
                }
                "-" => {
                    arity(items, 2, name, pos)?;
                    Ok(Expr::sub(sub(0)?, sub(1)?))
                }
                "neg" => {
                    arity(items, 1, name, pos)?;
                    Ok(Expr::neg(sub(0)?))
                }
                "bump" => {
                    arity(items, 2, name, pos)?;
                    let lo = number(&args[0])?;
                    let hi = number(&args[1])?;
                    if !(lo < hi) {
                        return Err(err(pos, "bump requires lo < hi"));
                    }
                    Ok(Expr::bump(lo, hi))
                }
                other => Err(err(items[0].pos(), format!("unknown operator '{other}'"))),
            }
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ModelError> {
    to_expr(&read_one(text)?)
}

pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_list(name: &str, parts: &[&Expr], out: &mut String) {
    out.push('(');
    out.push_str(name);
    for p in parts {
        out.push(' ');
        write_expr(p, out);
    }
    out.push(')');
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(v) => out.push_str(&format_number(*v)),
        Expr::Var => out.push('r'),
        Expr::Add(ts) => write_list("+", &ts.iter().collect::<Vec<_>>(), out),
        Expr::Mul(fs) => write_list("*", &fs.iter().collect::<Vec<_>>(), out),
        Expr::Div(a, b) => write_list("/", &[a, b], out),
        Expr::Pow(b, c) => {
            out.push_str("(pow ");
            write_expr(b, out);
            out.push(' ');
            out.push_str(&format_number(*c));
            out.push(')');
        }
        Expr::Exp(a) => write_list("exp", &[a], out),
        Expr::Log(a) => write_list("log", &[a], out),
        Expr::ExpInv(a) => write_list("expinv", &[a], out),
        Expr::Step { arg, lo, hi } => {
            out.push_str("(step ");
            write_expr(arg, out);
            out.push_str(&format!(" {} {})", format_number(*lo), format_number(*hi)));
        }
        Expr::Piecewise { arg, breaks, pieces } => {
            out.push_str("(piecewise ");
            write_expr(arg, out);
            out.push_str(" (");
            let bs: Vec<String> = breaks.iter().map(|b| format_number(*b)).collect();
            out.push_str(&bs.join(" "));
            out.push(')');
            for p in pieces {
                out.push(' ');
                write_expr(p, out);
            }
            out.push(')');
        }
    }
}

pub fn parse_profile(text: &str) -> Result<RadialProfile, ModelError> {
    let s = read_one(text)?;
    let pos = s.pos();
    let items = match &s {
        Sexp::List { items, .. } => items,
        Sexp::Atom { .. } => return Err(err(pos, "expected '(profile ...)'")),
    };
    if head(items, pos)? != "profile" {
        return Err(err(pos, "expected '(profile ...)'"));
    }
    let mut support = None;
    let mut breaks = Vec::new();
    let mut expr = None;
    for item in &items[1..] {
        if let Sexp::List { items: sub, .. } = item {
            if let Some(Sexp::Atom { text, .. }) = sub.first() {
                match text.as_str() {
                    "support" => {
                        support = Some(match sub.len() {
                            2 if matches!(&sub[1], Sexp::Atom { text, .. } if text == "whole") => {
                                Support::Whole
                            }
                            3 => Support::Compact { lo: number(&sub[1])?, hi: number(&sub[2])? },
                            _ => {
                                return Err(err(
                                    item.pos(),
                                    "support is '(support lo hi)' or '(support whole)'",
                                ))
                            }
                        });
                        continue;
                    }
                    "breaks" => {
                        breaks = sub[1..].iter().map(number).collect::<Result<_, _>>()?;
                        continue;
                    }
                    _ => {}
                }
            }
        }
        if expr.is_some() {
            return Err(err(item.pos(), "profile has more than one expression"));
        }
        expr = Some(to_expr(item)?);
    }
    let support = support.ok_or_else(|| err(pos, "profile is missing '(support ...)'"))?;
    let expr = expr.ok_or_else(|| err(pos, "profile is missing its expression"))?;
    RadialProfile::new(expr, support, breaks)
}

pub fn print_profile(p: &RadialProfile) -> String {
    let support = match p.support() {
        Support::Compact { lo, hi } => format!("(support {} {})", format_number(lo), format_number(hi)),
        Support::Whole => "(support whole)".to_string(),
    };
    let breaks: Vec<String> = p.breakpoints().iter().map(|b| format_number(*b)).collect();
    let mut b = String::from("(breaks");
    for s in breaks {
        b.push(' ');
        b.push_str(&s);
    }
    b.push(')');
    format!("(profile {} {} {})", support, b, print_expr(p.expr()))
}
