//! Minion spec files: a small line-oriented format with one `kind` stanza per
//! file. Parsing is total-or-error with line/column positions, and canonical
//! documents round-trip through print.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::catalog;
use crate::error::{Error, Result};
use crate::funmin::{FnElement, FunctionMinion, RelationPair};
use crate::minion::Minion;
use crate::minor::MinorOp;
use crate::presented::{Presentation, PresentedMinion, Word};

/// A parsed spec document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecBody {
    Presented {
        gens: Vec<(String, usize)>,
        rels: Vec<(String, MinorOp, String, MinorOp)>,
    },
    Function {
        a: usize,
        b: usize,
        mode: FnSpecMode,
        elems: Vec<(usize, String)>,
        pairs: Vec<(usize, Vec<Vec<usize>>, Vec<Vec<usize>>)>,
    },
    Derived {
        expr: String,
    },
    Catalog {
        name: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnSpecMode {
    Full,
    Generated,
    Pol,
}

impl FnSpecMode {
    fn as_str(self) -> &'static str {
        match self {
            FnSpecMode::Full => "full",
            FnSpecMode::Generated => "generated",
            FnSpecMode::Pol => "pol",
        }
    }
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Parse a spec document.
pub fn parse(text: &str) -> Result<SpecBody> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (kline, kind) = lines
        .next()
        .ok_or_else(|| perr(1, 1, "empty spec file"))?;
    let kind = kind
        .strip_prefix("kind ")
        .ok_or_else(|| perr(kline, 1, "first line must be `kind <presented|function|derived|catalog>`"))?
        .trim();
    match kind {
        "presented" => {
            let mut gens = Vec::new();
            let mut rels = Vec::new();
            for (ln, l) in lines {
                if let Some(rest) = l.strip_prefix("gen ") {
                    let mut it = rest.split_whitespace();
                    let sym = it
                        .next()
                        .ok_or_else(|| perr(ln, 5, "gen needs `<symbol> <arity>`"))?;
                    let ar: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(ln, 5, "gen needs a numeric arity"))?;
                    gens.push((sym.to_string(), ar));
                } else if let Some(rest) = l.strip_prefix("rel ") {
                    let (lhs, rhs) = rest
                        .split_once('=')
                        .ok_or_else(|| perr(ln, 5, "rel needs `=`"))?;
                    let parse_side = |s: &str| -> Result<(String, MinorOp)> {
                        let s = s.trim();
                        let open = s
                            .find('(')
                            .ok_or_else(|| perr(ln, 5, format!("missing minor operation in `{s}`")))?;
                        let op = MinorOp::from_str(&s[open..])
                            .map_err(|e| perr(ln, open + 5, e.to_string()))?;
                        Ok((s[..open].trim().to_string(), op))
                    };
                    let (s1, o1) = parse_side(lhs)?;
                    let (s2, o2) = parse_side(rhs)?;
                    rels.push((s1, o1, s2, o2));
                } else {
                    return Err(perr(ln, 1, format!("unexpected line `{l}` in presented stanza")));
                }
            }
            Ok(SpecBody::Presented { gens, rels })
        }
        "function" => {
            let mut a = None;
            let mut mode = FnSpecMode::Full;
            let mut elems = Vec::new();
            let mut pairs = Vec::new();
            for (ln, l) in lines {
                if let Some(rest) = l.strip_prefix("domain ") {
                    let mut it = rest.split_whitespace();
                    let x: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(ln, 8, "domain needs `<a> <b>`"))?;
                    let y: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(ln, 8, "domain needs `<a> <b>`"))?;
                    a = Some((x, y));
                } else if let Some(rest) = l.strip_prefix("mode ") {
                    mode = match rest.trim() {
                        "full" => FnSpecMode::Full,
                        "generated" => FnSpecMode::Generated,
                        "pol" => FnSpecMode::Pol,
                        other => return Err(perr(ln, 6, format!("unknown mode `{other}`"))),
                    };
                } else if let Some(rest) = l.strip_prefix("elem ") {
                    let mut it = rest.split_whitespace();
                    let ar: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(ln, 6, "elem needs `<arity> <table-digits>`"))?;
                    let digits = it
                        .next()
                        .ok_or_else(|| perr(ln, 6, "elem needs a digit table"))?;
                    elems.push((ar, digits.to_string()));
                } else if let Some(rest) = l.strip_prefix("pair ") {
                    let mut it = rest.split_whitespace();
                    let y: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(ln, 6, "pair needs `<Y> R=... S=...`"))?;
                    let parse_tuples = |tok: Option<&str>, tag: &str| -> Result<Vec<Vec<usize>>> {
                        let tok = tok
                            .and_then(|t| t.strip_prefix(tag))
                            .ok_or_else(|| perr(ln, 6, format!("pair needs `{tag}<tuples>`")))?;
                        if tok.is_empty() {
                            return Ok(Vec::new());
                        }
                        tok.split(';')
                            .map(|t| {
                                t.split(',')
                                    .map(|d| {
                                        d.trim().parse::<usize>().map_err(|_| {
                                            perr(ln, 6, format!("bad tuple entry `{d}`"))
                                        })
                                    })
                                    .collect()
                            })
                            .collect()
                    };
                    let r = parse_tuples(it.next(), "R=")?;
                    let s = parse_tuples(it.next(), "S=")?;
                    pairs.push((y, r, s));
                } else {
                    return Err(perr(ln, 1, format!("unexpected line `{l}` in function stanza")));
                }
            }
            let (a, b) = a.ok_or_else(|| perr(kline, 1, "function stanza needs a `domain` line"))?;
            Ok(SpecBody::Function { a, b, mode, elems, pairs })
        }
        "derived" => {
            let mut expr = None;
            for (ln, l) in lines {
                if let Some(rest) = l.strip_prefix("expr ") {
                    expr = Some(rest.trim().to_string());
                } else {
                    return Err(perr(ln, 1, format!("unexpected line `{l}` in derived stanza")));
                }
            }
            Ok(SpecBody::Derived {
                expr: expr.ok_or_else(|| perr(kline, 1, "derived stanza needs an `expr` line"))?,
            })
        }
        "catalog" => {
            let mut name = None;
            for (ln, l) in lines {
                if let Some(rest) = l.strip_prefix("name ") {
                    name = Some(rest.trim().to_string());
                } else {
                    return Err(perr(ln, 1, format!("unexpected line `{l}` in catalog stanza")));
                }
            }
            Ok(SpecBody::Catalog {
                name: name.ok_or_else(|| perr(kline, 1, "catalog stanza needs a `name` line"))?,
            })
        }
        other => Err(perr(kline, 6, format!("unknown kind `{other}`"))),
    }
}

/// Print the canonical form of a document (parse-print-parse fixed point).
pub fn print(body: &SpecBody) -> String {
    let mut out = String::new();
    match body {
        SpecBody::Presented { gens, rels } => {
            out.push_str("kind presented\n");
            for (s, a) in gens {
                out.push_str(&format!("gen {s} {a}\n"));
            }
            for (s1, o1, s2, o2) in rels {
                out.push_str(&format!("rel {s1} {o1} = {s2} {o2}\n"));
            }
        }
        SpecBody::Function { a, b, mode, elems, pairs } => {
            out.push_str("kind function\n");
            out.push_str(&format!("domain {a} {b}\n"));
            out.push_str(&format!("mode {}\n", mode.as_str()));
            for (ar, digits) in elems {
                out.push_str(&format!("elem {ar} {digits}\n"));
            }
            for (y, r, s) in pairs {
                let fmt = |ts: &Vec<Vec<usize>>| {
                    ts.iter()
                        .map(|t| t.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
                        .collect::<Vec<_>>()
                        .join(";")
                };
                out.push_str(&format!("pair {y} R={} S={}\n", fmt(r), fmt(s)));
            }
        }
        SpecBody::Derived { expr } => {
            out.push_str("kind derived\n");
            out.push_str(&format!("expr {expr}\n"));
        }
        SpecBody::Catalog { name } => {
            out.push_str("kind catalog\n");
            out.push_str(&format!("name {name}\n"));
        }
    }
    out
}

/// Turn a parsed document into a minion. `dir` is the base for resolving
/// operand files of derived expressions; `bound` is the hom-search bound used
/// by subtraction.
pub fn realize(body: &SpecBody, dir: &Path, bound: usize) -> Result<Minion> {
    match body {
        SpecBody::Presented { gens, rels } => {
            let mut words = Vec::new();
            for (s1, o1, s2, o2) in rels {
                let sym_of = |s: &str| -> Result<usize> {
                    gens.iter()
                        .position(|(g, _)| g == s)
                        .ok_or_else(|| Error::Invalid(format!("relation references unknown generator {s}")))
                };
                words.push((
                    Word { sym: sym_of(s1)?, op: o1.clone() },
                    Word { sym: sym_of(s2)?, op: o2.clone() },
                ));
            }
            Ok(Minion::presented(PresentedMinion::new(Presentation::new(
                gens.clone(),
                words,
            )?)))
        }
        SpecBody::Function { a, b, mode, elems, pairs } => {
            let parse_elem = |(ar, digits): &(usize, String)| -> Result<FnElement> {
                let table = digits
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| Error::Invalid(format!("bad table digit `{c}`")))
                    })
                    .collect::<Result<Vec<u8>>>()?;
                FnElement::new(*ar, *a, *b, table)
            };
            let fm = match mode {
                FnSpecMode::Full => FunctionMinion::full(*a, *b),
                FnSpecMode::Generated => FunctionMinion::generated(
                    *a,
                    *b,
                    elems.iter().map(parse_elem).collect::<Result<Vec<_>>>()?,
                )?,
                FnSpecMode::Pol => FunctionMinion::pol(
                    *a,
                    *b,
                    pairs
                        .iter()
                        .map(|(y, r, s)| RelationPair::new(*y, *a, *b, r.clone(), s.clone()))
                        .collect::<Result<Vec<_>>>()?,
                )?,
            };
            Ok(Minion::function(fm))
        }
        SpecBody::Derived { expr } => realize_expr(expr, dir, bound),
        SpecBody::Catalog { name } => catalog::make(name),
    }
}

fn realize_expr(expr: &str, dir: &Path, bound: usize) -> Result<Minion> {
    let expr = expr.trim();
    let open = expr
        .find('(')
        .ok_or_else(|| Error::Invalid(format!("malformed derived expression `{expr}`")))?;
    if !expr.ends_with(')') {
        return Err(Error::Invalid(format!("malformed derived expression `{expr}`")));
    }
    let head = &expr[..open];
    let inner = &expr[open + 1..expr.len() - 1];
    let args: Vec<&str> = split_top_level(inner);
    let load = |name: &str| -> Result<Minion> { load_operand(name.trim(), dir, bound) };
    match (head, args.as_slice()) {
        ("product", [x, y]) => Ok(Minion::product(&load(x)?, &load(y)?)),
        ("sum", [x, y]) => Ok(Minion::sum(&load(x)?, &load(y)?)),
        ("exp", [n, m]) => {
            let base = load(n)?;
            let expo = load(m)?;
            match expo.rep() {
                crate::minion::Rep::Presented(pm) => {
                    Ok(Minion::exponential(&base, pm.presentation().clone()))
                }
                _ => Err(Error::Unsupported(
                    "exponential exponents must be finitely presented".into(),
                )),
            }
        }
        ("sub", [l, m]) => crate::construct::subtract(&load(l)?, &load(m)?, bound),
        ("restrict", [m, idx]) => {
            let base = load(m)?;
            let i: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad unary index `{idx}`")))?;
            let u = base
                .elements(1)?
                .get(i)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("no unary #{i}")))?;
            Minion::restrict(&base, &u)
        }
        _ => Err(Error::Invalid(format!("unknown derived constructor `{head}`"))),
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() || !out.is_empty() {
        out.push(&s[start..]);
    }
    out
}

/// An operand is either another spec file (when the path exists) or a catalog
/// name.
pub fn load_operand(name: &str, dir: &Path, bound: usize) -> Result<Minion> {
    let path: PathBuf = if Path::new(name).is_absolute() {
        PathBuf::from(name)
    } else {
        dir.join(name)
    };
    if path.is_file() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let body = parse(&text)?;
        let parent = path.parent().unwrap_or(dir).to_path_buf();
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| name.to_string());
        Ok(realize(&body, &parent, bound)?.named(&stem))
    } else {
        catalog::make(name)
    }
}
