//! Line-based specification files.
//!
//! ```text
//! # comment
//! kind stationary            # diagram | ordered-diagram | stationary | pair | fdcsl
//! matrix 3 3
//! 1 0 0
//! 0 1 1
//! 1 1 0
//! unit 1 1 1
//! partition 2 1
//! rel 0 1
//! depth 12
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::diagram::{BratteliDiagram, OrderedBratteliDiagram};
use crate::error::{Error, Result};
use crate::exact::matrix::{IntMatrix, IntVec};
use crate::fdcsl::PreorderAlgebra;
use crate::statpair::{derive_pair, IntermediateSpec, StationaryPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Diagram,
    OrderedDiagram,
    Stationary,
    Pair,
    Fdcsl,
}

impl Kind {
    const ALL: [(&'static str, Kind); 5] = [
        ("diagram", Kind::Diagram),
        ("ordered-diagram", Kind::OrderedDiagram),
        ("stationary", Kind::Stationary),
        ("pair", Kind::Pair),
        ("fdcsl", Kind::Fdcsl),
    ];

    pub fn name(self) -> &'static str {
        Kind::ALL.iter().find(|(_, k)| *k == self).map(|(n, _)| *n).unwrap_or("?")
    }

    fn allows(self, keyword: &str) -> bool {
        match self {
            Kind::Diagram => matches!(keyword, "matrix" | "unit" | "depth" | "name"),
            Kind::OrderedDiagram => matches!(keyword, "unit" | "step" | "order" | "repeat" | "depth" | "name"),
            Kind::Stationary | Kind::Pair => {
                matches!(keyword, "matrix" | "unit" | "partition" | "group" | "rel" | "depth" | "name")
            }
            Kind::Fdcsl => matches!(keyword, "points" | "sizes" | "rel" | "name"),
        }
    }
}

/// One edge-order line: `order <vertex>: <src> ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderLine {
    pub vertex: usize,
    pub sources: Vec<usize>,
}

/// Syntax-level content of a spec file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub kind: Kind,
    pub name: Option<String>,
    pub unit: Option<IntVec>,
    pub matrices: Vec<IntMatrix>,
    pub partition: Option<Vec<usize>>,
    pub group: Option<usize>,
    pub rels: Vec<(usize, usize)>,
    pub points: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub steps: Vec<Vec<OrderLine>>,
    pub repeat: bool,
    pub depth: Option<usize>,
}

/// What a spec file describes.
#[derive(Debug, Clone)]
pub enum Model {
    Diagram(BratteliDiagram),
    Ordered(OrderedBratteliDiagram),
    Pair {
        pair: StationaryPair,
        intermediate: IntermediateSpec,
    },
    Algebra(PreorderAlgebra),
}

impl Model {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Diagram(_) => "diagram",
            Model::Ordered(_) => "ordered diagram",
            Model::Pair { .. } => "stationary pair",
            Model::Algebra(_) => "fdcsl algebra",
        }
    }
}

const KEYWORDS: &str = "kind, name, matrix, unit, partition, group, rel, points, sizes, step, order, repeat, depth";

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Tokens with their 1-based columns, comments removed.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    let text = text.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &text[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out.into_iter()
        .map(|(b, t)| (text[..b].chars().count() + 1, t))
        .collect()
}

struct Line<'a> {
    number: usize,
    toks: Vec<(usize, &'a str)>,
    end: usize,
}

impl<'a> Line<'a> {
    fn at(&self, i: usize) -> usize {
        self.toks.get(i).map(|t| t.0).unwrap_or(self.end)
    }

    fn int<T: std::str::FromStr>(&self, i: usize, what: &str) -> Result<T> {
        let Some(&(col, tok)) = self.toks.get(i) else {
            return Err(err(self.number, self.end, format!("expected {what}, found end of line")));
        };
        tok.parse()
            .map_err(|_| err(self.number, col, format!("expected {what}, found `{tok}`")))
    }

    fn ints<T: std::str::FromStr>(&self, from: usize, what: &str) -> Result<Vec<T>> {
        if self.toks.len() <= from {
            return Err(err(self.number, self.end, format!("expected {what}, found end of line")));
        }
        (from..self.toks.len()).map(|i| self.int(i, what)).collect()
    }

    fn arity(&self, n: usize) -> Result<()> {
        match self.toks.get(n) {
            Some(&(col, tok)) => Err(err(self.number, col, format!("expected end of line, found `{tok}`"))),
            None => Ok(()),
        }
    }
}

fn once<T>(slot: &mut Option<T>, value: T, line: &Line, keyword: &str) -> Result<()> {
    if slot.is_some() {
        return Err(err(line.number, 1, format!("duplicate `{keyword}`")));
    }
    *slot = Some(value);
    Ok(())
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile> {
        let lines: Vec<Line> = text
            .lines()
            .enumerate()
            .map(|(i, l)| Line {
                number: i + 1,
                toks: tokens(l),
                end: l.split('#').next().unwrap_or("").chars().count() + 1,
            })
            .filter(|l| !l.toks.is_empty())
            .collect();
        let last_line = text.lines().count().max(1);
        let mut it = lines.iter().peekable();
        let Some(first) = it.next() else {
            return Err(err(1, 1, "expected `kind`, found end of file"));
        };
        if first.toks[0].1 != "kind" {
            return Err(err(first.number, first.toks[0].0, format!("expected `kind`, found `{}`", first.toks[0].1)));
        }
        let name: &str = first.toks.get(1).map(|t| t.1).unwrap_or("");
        let kind = Kind::ALL
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, k)| *k)
            .ok_or_else(|| {
                err(
                    first.number,
                    first.at(1),
                    format!("expected one of diagram, ordered-diagram, stationary, pair, fdcsl, found `{name}`"),
                )
            })?;
        first.arity(2)?;
        let mut spec = SpecFile {
            kind,
            name: None,
            unit: None,
            matrices: Vec::new(),
            partition: None,
            group: None,
            rels: Vec::new(),
            points: None,
            sizes: None,
            steps: Vec::new(),
            repeat: false,
            depth: None,
        };
        while let Some(line) = it.next() {
            let (col, kw) = line.toks[0];
            if !KEYWORDS.split(", ").any(|k| k == kw) {
                return Err(err(line.number, col, format!("expected one of {KEYWORDS}, found `{kw}`")));
            }
            if kw == "kind" {
                return Err(err(line.number, col, "duplicate `kind`"));
            }
            if !kind.allows(kw) {
                return Err(err(line.number, col, format!("`{kw}` is not valid in a {} file", kind.name())));
            }
            match kw {
                "name" => {
                    let text = line.toks[1..].iter().map(|t| t.1).collect::<Vec<_>>().join(" ");
                    once(&mut spec.name, text, line, kw)?;
                }
                "unit" => once(&mut spec.unit, line.ints::<BigInt>(1, "an integer")?, line, kw)?,
                "partition" => once(&mut spec.partition, line.ints(1, "a block size")?, line, kw)?,
                "sizes" => once(&mut spec.sizes, line.ints(1, "a block size")?, line, kw)?,
                "group" => {
                    line.arity(2)?;
                    once(&mut spec.group, line.int(1, "a group index")?, line, kw)?;
                }
                "points" => {
                    line.arity(2)?;
                    once(&mut spec.points, line.int(1, "a point count")?, line, kw)?;
                }
                "depth" => {
                    line.arity(2)?;
                    once(&mut spec.depth, line.int(1, "a depth")?, line, kw)?;
                }
                "repeat" => {
                    line.arity(1)?;
                    if spec.repeat {
                        return Err(err(line.number, col, "duplicate `repeat`"));
                    }
                    spec.repeat = true;
                }
                "rel" => {
                    line.arity(3)?;
                    spec.rels.push((line.int(1, "an index")?, line.int(2, "an index")?));
                }
                "step" => {
                    line.arity(1)?;
                    spec.steps.push(Vec::new());
                }
                "order" => {
                    let Some(step) = spec.steps.last_mut() else {
                        return Err(err(line.number, col, "expected `step` before `order`"));
                    };
                    let (vcol, vtok) = line.toks.get(1).copied().unwrap_or((line.end, ""));
                    let vertex = vtok
                        .strip_suffix(':')
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(line.number, vcol, format!("expected `<vertex>:`, found `{vtok}`")))?;
                    let sources = if line.toks.len() > 2 { line.ints(2, "a source vertex")? } else { Vec::new() };
                    step.push(OrderLine { vertex, sources });
                }
                "matrix" => {
                    line.arity(3)?;
                    let rows: usize = line.int(1, "a row count")?;
                    let cols: usize = line.int(2, "a column count")?;
                    let mut data = Vec::with_capacity(rows);
                    for r in 0..rows {
                        let Some(row) = it.next() else {
                            return Err(err(last_line + 1, 1, format!("expected row {} of {rows}, found end of file", r + 1)));
                        };
                        let values: Vec<BigInt> = row.ints(0, "an integer")?;
                        if values.len() != cols {
                            return Err(err(
                                row.number,
                                row.at(values.len().min(cols)),
                                format!("expected {cols} entries, found {}", values.len()),
                            ));
                        }
                        data.push(values);
                    }
                    spec.matrices.push(IntMatrix::from_big_rows(data, cols)?);
                }
                _ => unreachable!("keyword list is exhaustive"),
            }
        }
        spec.check_required(first.number)?;
        Ok(spec)
    }

    fn check_required(&self, line: usize) -> Result<()> {
        let missing = |what: &str| Err(err(line, 1, format!("{} file is missing `{what}`", self.kind.name())));
        match self.kind {
            Kind::Diagram | Kind::Stationary | Kind::Pair if self.unit.is_none() => missing("unit"),
            Kind::Diagram if self.matrices.is_empty() => missing("matrix"),
            Kind::Stationary | Kind::Pair if self.matrices.len() != 1 => {
                Err(err(line, 1, format!("{} file needs exactly one `matrix`", self.kind.name())))
            }
            Kind::Pair if self.partition.is_none() => missing("partition"),
            Kind::OrderedDiagram if self.unit.is_none() => missing("unit"),
            Kind::OrderedDiagram if self.steps.is_empty() => missing("step"),
            Kind::OrderedDiagram if self.repeat && self.steps.len() != 1 => {
                Err(err(line, 1, "`repeat` needs exactly one `step`"))
            }
            Kind::Fdcsl if self.points.is_some() == self.sizes.is_some() => {
                Err(err(line, 1, "fdcsl file needs exactly one of `points` and `sizes`"))
            }
            Kind::Fdcsl if self.sizes.is_some() && !self.rels.is_empty() => {
                Err(err(line, 1, "`rel` lines apply to `points`, not `sizes`"))
            }
            _ => Ok(()),
        }
    }

    /// Builds and validates the described object; `depth` sizes stationary
    /// presentations.
    pub fn model(&self, depth: usize) -> Result<Model> {
        let unit = || self.unit.clone().unwrap_or_default();
        let relation = |n: usize| {
            let mut pairs = self.rels.clone();
            pairs.extend((0..n).map(|i| (i, i)));
            PreorderAlgebra::from_pairs(n, &pairs)
        };
        Ok(match self.kind {
            Kind::Diagram => Model::Diagram(BratteliDiagram::new(unit(), self.matrices.clone())?),
            Kind::Stationary | Kind::Pair => match &self.partition {
                None => {
                    if !self.rels.is_empty() || self.group.is_some() {
                        return Err(Error::Partition("`rel` and `group` need a `partition`".into()));
                    }
                    Model::Diagram(BratteliDiagram::stationary(&self.matrices[0], unit(), depth)?)
                }
                Some(partition) => {
                    let pair = derive_pair(&self.matrices[0], partition, unit())?;
                    let group = self.group.unwrap_or(0);
                    let size = *partition
                        .get(group)
                        .ok_or_else(|| Error::Partition(format!("no group {group} in {partition:?}")))?;
                    let intermediate = IntermediateSpec::new(&pair, group, &relation(size)?)?;
                    Model::Pair { pair, intermediate }
                }
            },
            Kind::OrderedDiagram => {
                let mut levels = Vec::with_capacity(self.steps.len());
                for step in &self.steps {
                    let width = step.iter().map(|o| o.vertex + 1).max().unwrap_or(0);
                    let mut orders: Vec<Option<Vec<usize>>> = vec![None; width];
                    for o in step {
                        if orders[o.vertex].replace(o.sources.clone()).is_some() {
                            return Err(Error::Diagram(format!("vertex {} is ordered twice", o.vertex)));
                        }
                    }
                    let orders = orders
                        .into_iter()
                        .enumerate()
                        .map(|(v, o)| o.ok_or_else(|| Error::Diagram(format!("vertex {v} has no order"))))
                        .collect::<Result<Vec<_>>>()?;
                    levels.push(orders);
                }
                if self.repeat {
                    Model::Ordered(OrderedBratteliDiagram::stationary(levels.remove(0), unit(), depth)?)
                } else {
                    Model::Ordered(OrderedBratteliDiagram::new(unit(), levels)?)
                }
            }
            Kind::Fdcsl => match &self.sizes {
                Some(sizes) => Model::Algebra(PreorderAlgebra::nest(sizes)),
                None => Model::Algebra(relation(self.points.unwrap_or(0))?),
            },
        })
    }

    /// Canonical text; parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "kind {}", self.kind.name());
        if let Some(n) = &self.name {
            let _ = writeln!(s, "name {n}");
        }
        for m in &self.matrices {
            let _ = writeln!(s, "matrix {} {}", m.rows(), m.cols());
            for r in 0..m.rows() {
                let _ = writeln!(s, "{}", join(&mut (0..m.cols()).map(|c| m[(r, c)].to_string())));
            }
        }
        if let Some(u) = &self.unit {
            let _ = writeln!(s, "unit {}", join(&mut u.iter().map(|x| x.to_string())));
        }
        if let Some(p) = &self.partition {
            let _ = writeln!(s, "partition {}", join(&mut p.iter().map(|x| x.to_string())));
        }
        if let Some(g) = self.group {
            let _ = writeln!(s, "group {g}");
        }
        if let Some(p) = self.points {
            let _ = writeln!(s, "points {p}");
        }
        if let Some(z) = &self.sizes {
            let _ = writeln!(s, "sizes {}", join(&mut z.iter().map(|x| x.to_string())));
        }
        for (i, j) in &self.rels {
            let _ = writeln!(s, "rel {i} {j}");
        }
        for step in &self.steps {
            let _ = writeln!(s, "step");
            for o in step {
                let src = join(&mut o.sources.iter().map(|x| x.to_string()));
                let _ = writeln!(s, "order {}: {src}", o.vertex);
            }
        }
        if self.repeat {
            let _ = writeln!(s, "repeat");
        }
        if let Some(d) = self.depth {
            let _ = writeln!(s, "depth {d}");
        }
        s
    }
}
