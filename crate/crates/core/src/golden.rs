//! The embedded pair lists, their comparison against the engine, and
//! instantiation of the general-`n` rows.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::appendix::{FORMULAS_TXT, PAIRS_TXT};
use crate::catalog::{ModuleId, TubeLabel};
use crate::error::{Error, Result};
use crate::forms::EuclideanQuiver;
use crate::schofield::SchofieldPair;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenPair {
    pub y: ModuleId,
    pub x: ModuleId,
    pub v: u32,
    pub u: u32,
}

impl GoldenPair {
    pub fn key(&self) -> (String, String, u32, u32) {
        (self.x.to_string(), self.y.to_string(), self.u, self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenEntry {
    pub preset: String,
    pub module: ModuleId,
    pub pairs: Vec<GoldenPair>,
    pub source: String,
    pub line: usize,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("corpus line {line}: {msg}"))
}

/// Top-level `(...)` groups of a pair list.
fn groups(s: &str) -> std::result::Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0usize, None);
    for (k, c) in s.char_indices() {
        match c {
            '(' | '{' => {
                if depth == 0 {
                    start = Some(k + 1);
                }
                depth += 1;
            }
            ')' | '}' => {
                depth = depth.checked_sub(1).ok_or("unbalanced brackets")?;
                if depth == 0 {
                    out.push(&s[start.take().ok_or("unbalanced brackets")?..k]);
                }
            }
            c if depth == 0 && !c.is_whitespace() => return Err(format!("stray {c:?} between pairs")),
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced brackets".into());
    }
    Ok(out)
}

/// Splits `Y,X` at the comma outside any brackets.
fn split_pair(s: &str) -> std::result::Result<(&str, &str), String> {
    let mut depth = 0i32;
    for (k, c) in s.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => return Ok((&s[..k], &s[k + 1..])),
            _ => {}
        }
    }
    Err(format!("no top-level comma in {s:?}"))
}

/// `2*P(0,2)` → (2, `P(0,2)`).
fn split_multiplicity(s: &str) -> (&str, &str) {
    match s.find('*') {
        Some(k) if !s[..k].contains('(') || s.starts_with('(') => (&s[..k], &s[k + 1..]),
        _ => ("1", s),
    }
}

pub fn load_golden(corpus: &str) -> Result<Vec<GoldenEntry>> {
    let mut out = Vec::new();
    for (k, raw) in corpus.lines().enumerate() {
        let line = k + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split(" | ").collect();
        let [preset, module, list, source] = fields.as_slice() else {
            return Err(parse_err(line, "expected four fields"));
        };
        let module: ModuleId = module.parse().map_err(|e| parse_err(line, e))?;
        let mut pairs = Vec::new();
        if *list != "-" {
            for g in groups(list).map_err(|e| parse_err(line, e))? {
                let (ys, xs) = split_pair(g).map_err(|e| parse_err(line, e))?;
                let (vm, yid) = split_multiplicity(ys);
                let (um, xid) = split_multiplicity(xs);
                let mult = |m: &str| m.parse::<u32>().ok().filter(|&k| k >= 1).ok_or_else(|| parse_err(line, format!("bad multiplicity {m:?}")));
                pairs.push(GoldenPair {
                    y: yid.parse().map_err(|e| parse_err(line, e))?,
                    x: xid.parse().map_err(|e| parse_err(line, e))?,
                    v: mult(vm)?,
                    u: mult(um)?,
                });
            }
        }
        out.push(GoldenEntry { preset: preset.to_string(), module, pairs, source: source.to_string(), line });
    }
    Ok(out)
}

pub fn embedded_corpus() -> Vec<GoldenEntry> {
    load_golden(PAIRS_TXT).expect("embedded corpus parses")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryDiff {
    pub preset: String,
    pub module: String,
    pub line: usize,
    pub source: String,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub checked: usize,
    pub diffs: Vec<EntryDiff>,
}

impl DiffReport {
    pub fn is_clean(&self) -> bool {
        self.diffs.is_empty()
    }
}

fn key_text(k: &(String, String, u32, u32)) -> String {
    let side = |m: u32, id: &str| if m == 1 { id.to_string() } else { format!("{m}*{id}") };
    format!("({},{})", side(k.3, &k.1), side(k.2, &k.0))
}

/// Quivers built once per preset name.
#[derive(Default)]
pub struct PresetCache {
    map: HashMap<String, EuclideanQuiver>,
}

impl PresetCache {
    pub fn get(&mut self, name: &str) -> Result<&EuclideanQuiver> {
        if !self.map.contains_key(name) {
            self.map.insert(name.to_string(), EuclideanQuiver::parse(name)?);
        }
        Ok(&self.map[name])
    }
}

fn diff_sets(
    golden: &BTreeSet<(String, String, u32, u32)>,
    engine: &BTreeSet<(String, String, u32, u32)>,
) -> (Vec<String>, Vec<String>) {
    (
        golden.difference(engine).map(key_text).collect(),
        engine.difference(golden).map(key_text).collect(),
    )
}

/// Runs `all_pairs` for every entry and diffs as sets of `(x, y, u, v)`.
pub fn compare(entries: &[GoldenEntry]) -> DiffReport {
    let mut cache = PresetCache::default();
    let mut report = DiffReport::default();
    for e in entries {
        report.checked += 1;
        let mut diff = EntryDiff {
            preset: e.preset.clone(),
            module: e.module.to_string(),
            line: e.line,
            source: e.source.clone(),
            missing: Vec::new(),
            extra: Vec::new(),
            error: None,
        };
        let outcome = (|| -> Result<(BTreeSet<_>, BTreeSet<_>)> {
            let eq = cache.get(&e.preset)?;
            for p in &e.pairs {
                eq.dim_of(&p.x)?;
                eq.dim_of(&p.y)?;
            }
            let engine = eq.all_pairs_of(&e.module)?;
            Ok((e.pairs.iter().map(GoldenPair::key).collect(), engine.iter().map(SchofieldPair::key).collect()))
        })();
        match outcome {
            Ok((golden, engine)) => {
                (diff.missing, diff.extra) = diff_sets(&golden, &engine);
            }
            Err(err) => diff.error = Some(err.to_string()),
        }
        if diff.error.is_some() || !diff.missing.is_empty() || !diff.extra.is_empty() {
            report.diffs.push(diff);
        }
    }
    report
}

/// Integer expression in `n` with `+ - %` (Euclidean) and parentheses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(i64),
    N,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mod(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, n: i64) -> i64 {
        match self {
            Expr::Const(c) => *c,
            Expr::N => n,
            Expr::Neg(a) => -a.eval(n),
            Expr::Add(a, b) => a.eval(n) + b.eval(n),
            Expr::Sub(a, b) => a.eval(n) - b.eval(n),
            Expr::Mod(a, b) => a.eval(n).rem_euclid(b.eval(n)),
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Expr, String> {
        let tokens: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = ExprParser { t: &tokens, k: 0 };
        let e = p.sum()?;
        if p.k != tokens.len() {
            return Err(format!("trailing input in {s:?}"));
        }
        Ok(e)
    }
}

struct ExprParser<'a> {
    t: &'a [char],
    k: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<char> {
        self.t.get(self.k).copied()
    }

    fn sum(&mut self) -> std::result::Result<Expr, String> {
        let mut e = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.k += 1;
            let r = self.product()?;
            e = if op == '+' { Expr::Add(Box::new(e), Box::new(r)) } else { Expr::Sub(Box::new(e), Box::new(r)) };
        }
        Ok(e)
    }

    fn product(&mut self) -> std::result::Result<Expr, String> {
        let mut e = self.unary()?;
        while self.peek() == Some('%') {
            self.k += 1;
            e = Expr::Mod(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> std::result::Result<Expr, String> {
        match self.peek() {
            Some('-') => {
                self.k += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('(') => {
                self.k += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err("missing )".into());
                }
                self.k += 1;
                Ok(e)
            }
            Some('n') => {
                self.k += 1;
                Ok(Expr::N)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.k;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.k += 1;
                }
                let s: String = self.t[start..self.k].iter().collect();
                s.parse().map(Expr::Const).map_err(|e| e.to_string())
            }
            other => Err(format!("unexpected {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdTemplate {
    Preproj(Expr, Expr),
    Preinj(Expr, Expr),
    Regular(TubeLabel, Expr, Expr),
}

impl IdTemplate {
    pub fn parse(s: &str) -> std::result::Result<IdTemplate, String> {
        if let Some(rest) = s.strip_prefix("R[") {
            let (label, rest) = rest.split_once("]^").ok_or("bad regular template")?;
            let label: TubeLabel = label.parse().map_err(|e: Error| e.to_string())?;
            let (l, rest) = if let Some(r) = rest.strip_prefix('{') {
                let close = r.find("}(").ok_or("unclosed brace")?;
                (&r[..close], &r[close + 1..])
            } else {
                let open = rest.find('(').ok_or("missing (")?;
                (&rest[..open], &rest[open..])
            };
            let t = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or("bad length")?;
            return Ok(IdTemplate::Regular(label, Expr::parse(l)?, Expr::parse(t)?));
        }
        let kind = s.chars().next().ok_or("empty id")?;
        let inner = s[1..].strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or("bad id")?;
        let (a, b) = split_pair(inner)?;
        let (a, b) = (Expr::parse(a)?, Expr::parse(b)?);
        match kind {
            'P' => Ok(IdTemplate::Preproj(a, b)),
            'I' => Ok(IdTemplate::Preinj(a, b)),
            _ => Err(format!("unknown module kind {kind:?}")),
        }
    }

    /// The concrete id at `n`; negative coordinates are an error.
    pub fn at(&self, n: i64) -> Result<ModuleId> {
        let uint = |e: &Expr, what: &str| -> Result<i64> {
            let v = e.eval(n);
            if v < 0 {
                Err(Error::InvalidModule(format!("{what} evaluates to {v} at n = {n}")))
            } else {
                Ok(v)
            }
        };
        Ok(match self {
            IdTemplate::Preproj(a, b) => ModuleId::Preproj { n: uint(a, "index")? as u32, vertex: uint(b, "vertex")? as usize },
            IdTemplate::Preinj(a, b) => ModuleId::Preinj { n: uint(a, "index")? as u32, vertex: uint(b, "vertex")? as usize },
            IdTemplate::Regular(e, l, t) => {
                ModuleId::Regular { tube: *e, l: uint(l, "socle")? as usize, t: uint(t, "length")? as usize }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaItem {
    Pair { y: IdTemplate, x: IdTemplate },
    /// `(u*I,(u+1)*P)`
    SpecialPreprojective,
    /// `((v+1)*I,v*P)`
    SpecialPreinjective,
    /// A pair with an index that falls as `n` grows, so it only exists for
    /// the first few `n` of the row. Where it does not instantiate the row
    /// lists nothing in its place, and the special pair is left out of the
    /// comparison for that `n`.
    Transient { y: IdTemplate, x: IdTemplate },
}

#[derive(Clone, Debug)]
pub struct FormulaRow {
    pub preset: String,
    pub module_text: String,
    pub module: IdTemplate,
    /// The row holds for `n > threshold`.
    pub threshold: i64,
    pub items: Vec<FormulaItem>,
    pub source: String,
    pub line: usize,
}

impl FormulaRow {
    pub fn is_flagged(&self) -> bool {
        self.items.iter().any(|i| matches!(i, FormulaItem::Transient { .. }))
    }
}

pub fn load_formulas(text: &str) -> Result<Vec<FormulaRow>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(" | ").collect();
        let [preset, module, cond, list, source] = fields.as_slice() else {
            return Err(parse_err(line, "expected five fields"));
        };
        let threshold = cond
            .strip_prefix("n>")
            .and_then(|c| c.parse::<i64>().ok())
            .ok_or_else(|| parse_err(line, format!("bad condition {cond:?}")))?;
        let mut items = Vec::new();
        for g in groups(list).map_err(|e| parse_err(line, e))? {
            let item = match g {
                "u*I,(u+1)*P" => FormulaItem::SpecialPreprojective,
                "(v+1)*I,v*P" => FormulaItem::SpecialPreinjective,
                _ => {
                    let (y, x) = split_pair(g).map_err(|e| parse_err(line, e))?;
                    let y = IdTemplate::parse(y).map_err(|e| parse_err(line, e))?;
                    let x = IdTemplate::parse(x).map_err(|e| parse_err(line, e))?;
                    let lapses = (threshold + 1..=threshold + 64).any(|n| x.at(n).is_err() || y.at(n).is_err());
                    if lapses {
                        FormulaItem::Transient { y, x }
                    } else {
                        FormulaItem::Pair { y, x }
                    }
                }
            };
            items.push(item);
        }
        out.push(FormulaRow {
            preset: preset.to_string(),
            module_text: module.to_string(),
            module: IdTemplate::parse(module).map_err(|e| parse_err(line, e))?,
            threshold,
            items,
            source: source.to_string(),
            line,
        });
    }
    Ok(out)
}

pub fn embedded_formulas() -> Vec<FormulaRow> {
    load_formulas(FORMULAS_TXT).expect("embedded formulas parse")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaDiff {
    pub preset: String,
    pub row: String,
    pub line: usize,
    pub n: i64,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FormulaReport {
    pub rows: usize,
    pub instances: usize,
    /// Lines of rows holding a transient item.
    pub flagged: Vec<usize>,
    pub diffs: Vec<FormulaDiff>,
}

impl FormulaReport {
    pub fn is_clean(&self) -> bool {
        self.diffs.is_empty()
    }
}

/// Checks each row at `n = threshold + 1, ..., threshold + count`.
pub fn check_formulas(rows: &[FormulaRow], count: i64) -> FormulaReport {
    let mut cache = PresetCache::default();
    let mut report = FormulaReport { rows: rows.len(), ..Default::default() };
    for row in rows {
        let flagged = row.is_flagged();
        if flagged {
            report.flagged.push(row.line);
        }
        for n in row.threshold + 1..=row.threshold + count {
            report.instances += 1;
            let mut diff = FormulaDiff {
                preset: row.preset.clone(),
                row: row.module_text.clone(),
                line: row.line,
                n,
                missing: Vec::new(),
                extra: Vec::new(),
                error: None,
            };
            let outcome = (|| -> Result<(BTreeSet<_>, BTreeSet<_>)> {
                let eq = cache.get(&row.preset)?;
                let module = row.module.at(n)?;
                let engine = eq.all_pairs_of(&module)?;
                let mut golden = BTreeSet::new();
                let mut lapsed = false;
                for item in &row.items {
                    match item {
                        FormulaItem::Pair { y, x } => {
                            golden.insert((x.at(n)?.to_string(), y.at(n)?.to_string(), 1, 1));
                        }
                        FormulaItem::SpecialPreprojective | FormulaItem::SpecialPreinjective => {
                            // the row only marks the special pair; its shape is checked here
                            let s = engine
                                .iter()
                                .find(|p| p.special)
                                .ok_or_else(|| Error::Verification("marked special pair is absent".into()))?;
                            let shape_ok = matches!(s.x.id, ModuleId::Preproj { .. })
                                && matches!(s.y.id, ModuleId::Preinj { .. })
                                && if matches!(item, FormulaItem::SpecialPreprojective) {
                                    s.u == s.v + 1
                                } else {
                                    s.v == s.u + 1
                                };
                            if !shape_ok {
                                return Err(Error::Verification(format!("special pair {s} has the wrong shape")));
                            }
                            golden.insert(s.key());
                        }
                        FormulaItem::Transient { y, x } => match (x.at(n), y.at(n)) {
                            (Ok(x), Ok(y)) => {
                                golden.insert((x.to_string(), y.to_string(), 1, 1));
                            }
                            _ => lapsed = true,
                        },
                    }
                }
                let engine = engine.iter().filter(|p| !(lapsed && p.special)).map(SchofieldPair::key).collect();
                Ok((golden, engine))
            })();
            match outcome {
                Ok((golden, engine)) => (diff.missing, diff.extra) = diff_sets(&golden, &engine),
                Err(e) => diff.error = Some(e.to_string()),
            }
            if diff.error.is_some() || !diff.missing.is_empty() || !diff.extra.is_empty() {
                report.diffs.push(diff);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        let e = Expr::parse("(n-1)%2+1").unwrap();
        assert_eq!((2..6).map(|n| e.eval(n)).collect::<Vec<_>>(), [2, 1, 2, 1]);
        assert_eq!(Expr::parse("(-n+1)%3+1").unwrap().eval(5), 3);
        assert_eq!(Expr::parse("-n+4").unwrap().eval(6), -2);
        assert_eq!(Expr::parse("n%2+1").unwrap().eval(3), 2);
        assert!(Expr::parse("n+").is_err());
        assert!(Expr::parse("(n").is_err());
    }

    #[test]
    fn id_templates() {
        let t = IdTemplate::parse("R[0]^{(n-1)%2+1}(1)").unwrap();
        assert_eq!(t.at(2).unwrap().to_string(), "R[0]^2(1)");
        let t = IdTemplate::parse("P(n-10,8)").unwrap();
        assert_eq!(t.at(12).unwrap().to_string(), "P(2,8)");
        assert!(t.at(3).is_err());
        assert_eq!(IdTemplate::parse("R[inf]^2(1)").unwrap().at(0).unwrap().to_string(), "R[inf]^2(1)");
    }

    #[test]
    fn corpus_line_parses() {
        let e = load_golden("A~1,2 | P(1,1) | (R[0]^1(1),P(0,3)) (I(0,3),2*P(0,2)) | A~1,2 preprojective P(n,1)\n").unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].pairs.len(), 2);
        assert_eq!(e[0].pairs[1].u, 2);
        assert_eq!(e[0].pairs[1].v, 1);
        assert!(load_golden("A~1,2 | P(1,1) | (R[0]^1(1)P(0,3)) | x").is_err());
        assert!(load_golden("A~1,2 | P(1,1)").is_err());
    }

    #[test]
    fn a12_corpus_has_no_diffs() {
        let entries: Vec<GoldenEntry> = embedded_corpus().into_iter().filter(|e| e.preset == "A~1,2").collect();
        assert!(!entries.is_empty());
        let report = compare(&entries);
        assert!(report.is_clean(), "{:?}", report.diffs);
    }

    #[test]
    fn corrupted_entry_is_reported_once() {
        let mut entries: Vec<GoldenEntry> = embedded_corpus().into_iter().filter(|e| e.preset == "D~4").collect();
        let victim = entries.iter_mut().find(|e| e.pairs.len() >= 2).unwrap();
        victim.pairs[0].x = ModuleId::Preproj { n: 7, vertex: 1 };
        let report = compare(&entries);
        assert_eq!(report.diffs.len(), 1);
        assert_eq!(report.diffs[0].missing.len(), 1);
        assert_eq!(report.diffs[0].extra.len(), 1);
    }
}
