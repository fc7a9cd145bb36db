//! Minions presented by generators and minor relations: free minions,
//! per-arity congruence closure, and pp-sentence gadgets.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::minor::MinorOp;

/// A formal element of a free minion: a generator symbol (by declaration
/// index) postcomposed with a minor operation from its arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    pub sym: usize,
    pub op: MinorOp,
}

impl Word {
    pub fn arity(&self) -> usize {
        self.op.cod()
    }

    pub fn minor(&self, beta: &MinorOp) -> Result<Word> {
        Ok(Word {
            sym: self.sym,
            op: self.op.compose(beta)?,
        })
    }
}

/// A finite minion presentation: named generators with arities and relations
/// between words sharing a codomain.
#[derive(Clone, Debug)]
pub struct Presentation {
    gens: Vec<(String, usize)>,
    rels: Vec<(Word, Word)>,
}

impl Presentation {
    pub fn new(gens: Vec<(String, usize)>, rels: Vec<(Word, Word)>) -> Result<Self> {
        for (i, (name, ar)) in gens.iter().enumerate() {
            if *ar == 0 {
                return Err(Error::Invalid(format!("generator {name} needs arity >= 1")));
            }
            if gens[..i].iter().any(|(n2, _)| n2 == name) {
                return Err(Error::Invalid(format!("duplicate generator symbol {name}")));
            }
        }
        let mut norm_rels = Vec::with_capacity(rels.len());
        for (u, v) in rels {
            if u.sym >= gens.len() || v.sym >= gens.len() {
                return Err(Error::Invalid("relation references unknown generator".into()));
            }
            if u.op.dom() != gens[u.sym].1 || v.op.dom() != gens[v.sym].1 {
                return Err(Error::ArityMismatch(format!(
                    "relation side does not match its generator arity: {} vs {}",
                    u.op,
                    v.op
                )));
            }
            if u.op.cod() != v.op.cod() {
                return Err(Error::ArityMismatch(format!(
                    "relation sides have different codomains: {} vs {}",
                    u.op, v.op
                )));
            }
            norm_rels.push(normalize_relation(u, v));
        }
        Ok(Presentation { gens: gens.to_vec(), rels: norm_rels })
    }

    pub fn free(gens: Vec<(String, usize)>) -> Result<Self> {
        Presentation::new(gens, Vec::new())
    }

    pub fn empty() -> Self {
        Presentation { gens: Vec::new(), rels: Vec::new() }
    }

    pub fn generators(&self) -> &[(String, usize)] {
        &self.gens
    }

    pub fn relations(&self) -> &[(Word, Word)] {
        &self.rels
    }

    pub fn max_generator_arity(&self) -> usize {
        self.gens.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }

    pub fn max_relation_codomain(&self) -> usize {
        self.rels.iter().map(|(u, _)| u.op.cod()).max().unwrap_or(0)
    }

    /// Disjoint union of two presentations; clashing symbols from `other` are
    /// suffixed with `'`.
    pub fn disjoint_union(&self, other: &Presentation) -> Result<Presentation> {
        let mut gens = self.gens.clone();
        let shift = gens.len();
        for (name, ar) in &other.gens {
            let mut name = name.clone();
            while gens.iter().any(|(n2, _)| n2 == &name) {
                name.push('\'');
            }
            gens.push((name, *ar));
        }
        let mut rels = self.rels.clone();
        for (u, v) in &other.rels {
            rels.push((
                Word { sym: u.sym + shift, op: u.op.clone() },
                Word { sym: v.sym + shift, op: v.op.clone() },
            ));
        }
        Presentation::new(gens, rels)
    }

    /// Presentation of `P^n x M` for `M = self`: each generator `s` becomes
    /// `s†` of arity `n + ar(s)`, and each relation is lifted by shifting its
    /// operations to fix the first `n` coordinates.
    pub fn lift(&self, n: usize) -> Presentation {
        let gens = self
            .gens
            .iter()
            .map(|(name, ar)| (format!("{name}†"), n + ar))
            .collect();
        let rels = self
            .rels
            .iter()
            .map(|(u, v)| {
                (
                    Word { sym: u.sym, op: u.op.shift_lift(n) },
                    Word { sym: v.sym, op: v.op.shift_lift(n) },
                )
            })
            .collect();
        Presentation { gens, rels }
    }

    pub fn word_count(&self, n: usize) -> Result<usize> {
        let mut total: usize = 0;
        for &(_, ar) in &self.gens {
            let c = n
                .checked_pow(ar as u32)
                .and_then(|c| total.checked_add(c))
                .ok_or_else(|| Error::Invalid("word count overflow".into()))?;
            total = c;
        }
        Ok(total)
    }

    pub fn display_word(&self, w: &Word) -> String {
        format!("{}{}", self.gens[w.sym].0, w.op)
    }
}

/// Relations with a codomain larger than the sum of the two generator arities
/// carry redundant coordinates; restrict both sides to the union of their
/// images (any postcomposition consequence factors back through this one).
fn normalize_relation(u: Word, v: Word) -> (Word, Word) {
    let c = u.op.cod();
    let bound = u.op.dom() + v.op.dom();
    if c <= bound {
        return (u, v);
    }
    let mut img: Vec<usize> = u.op.values().iter().chain(v.op.values()).copied().collect();
    img.sort_unstable();
    img.dedup();
    let relabel = |op: &MinorOp| {
        let values = op
            .values()
            .iter()
            .map(|&x| img.binary_search(&x).unwrap())
            .collect();
        MinorOp::new(values, img.len()).expect("relabelled relation is well-formed")
    };
    (
        Word { sym: u.sym, op: relabel(&u.op) },
        Word { sym: v.sym, op: relabel(&v.op) },
    )
}

/// The congruence-closed partition of arity-`n` words: canonical (lex-least)
/// representative per word, plus the sorted list of class representatives.
#[derive(Debug)]
pub struct Closure {
    canon: HashMap<Word, Word>,
    classes: Vec<Word>,
}

impl Closure {
    pub fn canonical(&self, w: &Word) -> Result<Word> {
        self.canon
            .get(w)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("word #{}{} outside closure", w.sym, w.op)))
    }

    pub fn classes(&self) -> &[Word] {
        &self.classes
    }
}

/// A presented minion with lazily memoized per-arity congruence closures.
#[derive(Clone, Debug)]
pub struct PresentedMinion {
    pres: Arc<Presentation>,
    cache: Arc<Mutex<HashMap<usize, Arc<Closure>>>>,
}

impl PresentedMinion {
    pub fn new(pres: Presentation) -> Self {
        PresentedMinion {
            pres: Arc::new(pres),
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn free(gens: Vec<(String, usize)>) -> Result<Self> {
        Ok(PresentedMinion::new(Presentation::free(gens)?))
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    /// The congruence closure at arity `n`. `budget` caps the number of words.
    pub fn closure(&self, n: usize, budget: usize) -> Result<Arc<Closure>> {
        if n == 0 {
            return Err(Error::Invalid("arities start at 1".into()));
        }
        if let Some(c) = self.cache.lock().unwrap().get(&n) {
            return Ok(c.clone());
        }
        let closure = Arc::new(congruence_close(&self.pres, n, budget)?);
        self.cache
            .lock()
            .unwrap()
            .entry(n)
            .or_insert_with(|| closure.clone());
        Ok(closure)
    }

    /// Sorted canonical representatives of the arity-`n` classes.
    pub fn elements(&self, n: usize, budget: usize) -> Result<Vec<Word>> {
        Ok(self.closure(n, budget)?.classes().to_vec())
    }

    /// Canonical representative of `w beta`.
    pub fn act(&self, w: &Word, beta: &MinorOp, budget: usize) -> Result<Word> {
        let moved = w.minor(beta)?;
        self.closure(beta.cod(), budget)?.canonical(&moved)
    }

    pub fn canonical(&self, w: &Word, budget: usize) -> Result<Word> {
        self.closure(w.arity(), budget)?.canonical(w)
    }
}

/// Union-find over the arity-`n` words of `pres`, seeded with every relation
/// postcomposed with every map from its codomain to `n`.
pub fn congruence_close(pres: &Presentation, n: usize, budget: usize) -> Result<Closure> {
    let count = pres.word_count(n)?;
    if count > budget {
        return Err(Error::Budget { arity: n, needed: count, budget });
    }
    // index layout: consecutive blocks per generator, op rank within a block
    let mut offsets = Vec::with_capacity(pres.generators().len());
    let mut total = 0usize;
    for &(_, ar) in pres.generators() {
        offsets.push(total);
        total += n.pow(ar as u32);
    }
    let index_of = |w: &Word| offsets[w.sym] + w.op.index();

    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (u, v) in pres.relations() {
        let c = u.op.cod();
        for beta in MinorOp::all(c, n) {
            let a = index_of(&u.minor(&beta)?);
            let b = index_of(&v.minor(&beta)?);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }

    // lex-least word per root, then canonical map per word
    let mut least: HashMap<usize, Word> = HashMap::new();
    for (sym, &(_, ar)) in pres.generators().iter().enumerate() {
        for op in MinorOp::all(ar, n) {
            let w = Word { sym, op };
            let root = find(&mut parent, index_of(&w));
            match least.get(&root) {
                Some(cur) if *cur <= w => {}
                _ => {
                    least.insert(root, w);
                }
            }
        }
    }
    let mut canon = HashMap::with_capacity(total);
    for (sym, &(_, ar)) in pres.generators().iter().enumerate() {
        for op in MinorOp::all(ar, n) {
            let w = Word { sym, op };
            let root = find(&mut parent, index_of(&w));
            canon.insert(w, least[&root].clone());
        }
    }
    let mut classes: Vec<Word> = least.into_values().collect();
    classes.sort();
    Ok(Closure { canon, classes })
}

/// A parsed pp-sentence: binders plus equational conjuncts, i.e. exactly a
/// presentation whose satisfaction in `M` is the existence of a homomorphism
/// from its gadget minion into `M`.
pub fn pp_parse(text: &str) -> Result<Presentation> {
    let err = |col: usize, msg: String| Error::Parse { line: 1, col, msg };
    let rest = text.trim();
    let rest = rest
        .strip_prefix("exists")
        .ok_or_else(|| err(1, "pp sentence must start with `exists`".into()))?;
    let dot = rest
        .find('.')
        .ok_or_else(|| err(text.len(), "missing `.` after binders".into()))?;
    let (binders, body) = rest.split_at(dot);
    let body = &body[1..];

    let mut gens = Vec::new();
    for b in binders.split(',') {
        let b = b.trim();
        let (name, ar) = b
            .split_once(':')
            .ok_or_else(|| err(col_of(text, b), format!("binder `{b}` needs `symbol:arity`")))?;
        let arity: usize = ar
            .trim()
            .parse()
            .map_err(|_| err(col_of(text, ar), format!("bad arity in binder `{b}`")))?;
        gens.push((name.trim().to_string(), arity));
    }

    let find_sym = |name: &str| -> Result<usize> {
        gens.iter()
            .position(|(n2, _)| n2 == name)
            .ok_or_else(|| err(col_of(text, name), format!("unbound symbol `{name}`")))
    };
    let parse_word = |w: &str| -> Result<Word> {
        let w = w.trim();
        let open = w
            .find('(')
            .ok_or_else(|| err(col_of(text, w), format!("word `{w}` needs a minor operation literal")))?;
        let sym = find_sym(w[..open].trim())?;
        let op: MinorOp = w[open..]
            .parse()
            .map_err(|e| err(col_of(text, w), format!("{e}")))?;
        Ok(Word { sym, op })
    };

    let mut rels = Vec::new();
    for conj in body.split('&') {
        let (lhs, rhs) = conj
            .split_once('=')
            .ok_or_else(|| err(col_of(text, conj), format!("conjunct `{}` needs `=`", conj.trim())))?;
        rels.push((parse_word(lhs)?, parse_word(rhs)?));
    }
    Presentation::new(gens, rels).map_err(|e| match e {
        p @ Error::Parse { .. } => p,
        other => err(1, other.to_string()),
    })
}

fn col_of(text: &str, fragment: &str) -> usize {
    let frag = fragment.trim();
    text.find(frag).map(|p| p + 1).unwrap_or(1)
}

/// The gadget minion of a pp-sentence.
pub fn pp_gadget(text: &str) -> Result<PresentedMinion> {
    Ok(PresentedMinion::new(pp_parse(text)?))
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, (name, ar)) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}:{ar}")?;
        }
        if !self.rels.is_empty() {
            write!(f, " | ")?;
            for (i, (u, v)) in self.rels.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{} = {}", self.display_word(u), self.display_word(v))?;
            }
        }
        write!(f, ">")
    }
}

impl FromStr for Presentation {
    type Err = Error;

    /// Parses the angle-bracket form produced by `Display`:
    /// `<f:2, g:1 | f(1 0 | 2) = f(0 1 | 2), ...>`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 1, col: 1, msg };
        let inner = s
            .trim()
            .strip_prefix('<')
            .and_then(|t| t.strip_suffix('>'))
            .ok_or_else(|| err("presentation literal must be angle-bracketed".into()))?;
        // split at the first `|` outside parentheses
        let mut depth = 0usize;
        let mut bar = None;
        for (i, c) in inner.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                '|' if depth == 0 => {
                    bar = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let (gens_part, rels_part) = match bar {
            Some(i) => (&inner[..i], Some(&inner[i + 1..])),
            None => (inner, None),
        };
        let split_top = |s: &str| -> Vec<String> {
            let mut out = Vec::new();
            let mut depth = 0usize;
            let mut cur = String::new();
            for c in s.chars() {
                match c {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    ',' if depth == 0 => {
                        out.push(std::mem::take(&mut cur));
                        continue;
                    }
                    _ => {}
                }
                cur.push(c);
            }
            if !cur.trim().is_empty() {
                out.push(cur);
            }
            out
        };
        let mut gens = Vec::new();
        for g in split_top(gens_part) {
            let g = g.trim();
            let (name, ar) = g
                .split_once(':')
                .ok_or_else(|| err(format!("generator `{g}` needs `name:arity`")))?;
            let ar: usize = ar
                .trim()
                .parse()
                .map_err(|_| err(format!("bad arity in `{g}`")))?;
            gens.push((name.trim().to_string(), ar));
        }
        let mut rels = Vec::new();
        if let Some(rp) = rels_part {
            let parse_word = |t: &str| -> Result<Word> {
                let t = t.trim();
                let open = t
                    .find('(')
                    .ok_or_else(|| err(format!("word `{t}` needs a minor operation")))?;
                let name = t[..open].trim();
                let sym = gens
                    .iter()
                    .position(|(g, _)| g == name)
                    .ok_or_else(|| err(format!("unknown generator `{name}`")))?;
                Ok(Word { sym, op: t[open..].parse()? })
            };
            for r in split_top(rp) {
                let (lhs, rhs) = r
                    .split_once('=')
                    .ok_or_else(|| err(format!("relation `{}` needs `=`", r.trim())))?;
                rels.push((parse_word(lhs)?, parse_word(rhs)?));
            }
        }
        Presentation::new(gens, rels)
    }
}
