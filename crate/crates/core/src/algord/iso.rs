use serde::{Deserialize, Serialize};

use crate::diagram::{concatenation_embedding, realize_nest_system, sizes_usize, OrderedBratteliDiagram};
use crate::error::{Error, Result};
use crate::fdcsl::MatrixUnitEmbedding;

pub const DEFAULT_ISO_DEPTH: usize = 3;
pub const DEFAULT_ISO_ROUNDS: usize = 2;
pub const DEFAULT_ISO_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    AToB,
    BToA,
}

impl Side {
    fn source(self) -> usize {
        match self {
            Side::AToB => 0,
            Side::BToA => 1,
        }
    }

    fn flip(self) -> Side {
        match self {
            Side::AToB => Side::BToA,
            Side::BToA => Side::AToB,
        }
    }
}

/// A concatenation map between stages of the two systems: summand `w` of
/// the target stage receives copies of the source summands listed in
/// `words[w]`, left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMap {
    pub side: Side,
    pub from_stage: usize,
    pub to_stage: usize,
    pub words: Vec<Vec<usize>>,
}

/// Alternating maps `A_{i_0} -> B_{j_0} -> A_{i_1} -> ...` whose
/// consecutive composites are the connecting maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCertificate {
    pub maps: Vec<ChainMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IsoOutcome {
    Found { certificate: IsoCertificate },
    Exhausted { depth: usize, nodes: u64 },
    BudgetExceeded { nodes: u64 },
}

fn compose(outer: &[Vec<usize>], inner: &[Vec<usize>]) -> Vec<Vec<usize>> {
    outer
        .iter()
        .map(|w| w.iter().flat_map(|&s| inner[s].iter().copied()).collect())
        .collect()
}

/// Every way of writing `word` as a concatenation of `pieces`.
fn parses(word: &[usize], pieces: &[Vec<usize>], limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(word: &[usize], pieces: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if word.is_empty() {
            out.push(cur.clone());
            return;
        }
        for (label, p) in pieces.iter().enumerate() {
            if !p.is_empty() && word.starts_with(p) {
                cur.push(label);
                go(&word[p.len()..], pieces, cur, out, limit);
                cur.pop();
            }
        }
    }
    go(word, pieces, &mut cur, &mut out, limit);
    out
}

/// Words over labels with weights `sizes` of total weight `total`.
fn words_of_weight(sizes: &[usize], total: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(sizes: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for (label, &s) in sizes.iter().enumerate() {
            if s > 0 && s <= left {
                cur.push(label);
                go(sizes, left - s, cur, out, limit);
                cur.pop();
            }
        }
    }
    go(sizes, total, &mut cur, &mut out, limit);
    out
}

fn covers(words: &[Vec<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for w in words {
        for &s in w {
            seen[s] = true;
        }
    }
    seen.into_iter().all(|b| b)
}

struct Search {
    systems: [OrderedBratteliDiagram; 2],
    sizes: [Vec<Vec<usize>>; 2],
    target_len: usize,
    nodes: u64,
    budget: u64,
}

enum Flow {
    Found(Vec<ChainMap>),
    Continue,
    Stop,
}

impl Search {
    fn max_stage(&self, s: usize) -> usize {
        self.sizes[s].len() - 1
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes > self.budget
    }

    /// Cartesian product over target summands, visited in odometer order.
    fn product(&mut self, side: Side, from: usize, to: usize, choices: Vec<Vec<Vec<usize>>>, chain: &mut Vec<ChainMap>) -> Flow {
        if choices.iter().any(Vec::is_empty) {
            return Flow::Continue;
        }
        let n_src = self.sizes[side.source()][from].len();
        let mut idx = vec![0usize; choices.len()];
        loop {
            if self.tick() {
                return Flow::Stop;
            }
            let words: Vec<Vec<usize>> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
            if covers(&words, n_src) {
                chain.push(ChainMap {
                    side,
                    from_stage: from,
                    to_stage: to,
                    words,
                });
                match self.extend(chain) {
                    Flow::Continue => {}
                    other => return other,
                }
                chain.pop();
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return Flow::Continue;
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    fn extend(&mut self, chain: &mut Vec<ChainMap>) -> Flow {
        if chain.len() == self.target_len {
            return Flow::Found(chain.clone());
        }
        let limit = usize::try_from(self.budget).unwrap_or(usize::MAX);
        let Some(prev) = chain.last().cloned() else {
            for j in 0..=self.max_stage(1) {
                let choices: Vec<Vec<Vec<usize>>> = self.sizes[1][j]
                    .iter()
                    .map(|&t| words_of_weight(&self.sizes[0][0], t, limit))
                    .collect();
                match self.product(Side::AToB, 0, j, choices, chain) {
                    Flow::Continue => {}
                    other => return other,
                }
            }
            return Flow::Continue;
        };
        let back = prev.side.source();
        for s in prev.from_stage + 1..=self.max_stage(back) {
            let conn = self.systems[back].composite_order(prev.from_stage, s);
            let choices: Vec<Vec<Vec<usize>>> = conn.iter().map(|w| parses(w, &prev.words, limit)).collect();
            match self.product(prev.side.flip(), prev.to_stage, s, choices, chain) {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }
}

fn stage_sizes(d: &OrderedBratteliDiagram) -> Result<Vec<Vec<usize>>> {
    d.level_sizes()
        .iter()
        .map(|v| sizes_usize(v).ok_or_else(|| Error::TooLarge("stage sizes outside usize".into())))
        .collect()
}

fn prepared(d: &OrderedBratteliDiagram, depth: usize) -> Result<OrderedBratteliDiagram> {
    if d.is_stationary() {
        OrderedBratteliDiagram::stationary(d.orders()[0].clone(), d.unit().clone(), depth)
    } else {
        d.extend_to(depth.min(d.depth()))
    }
}

/// Back-and-forth search for `2 * rounds` concatenation maps with stages
/// up to `depth`, starting from stage 0 of `a`.
pub fn iso_search_with(
    a: &OrderedBratteliDiagram,
    b: &OrderedBratteliDiagram,
    depth: usize,
    rounds: usize,
    budget: u64,
) -> Result<IsoOutcome> {
    let systems = [prepared(a, depth)?, prepared(b, depth)?];
    let sizes = [stage_sizes(&systems[0])?, stage_sizes(&systems[1])?];
    let mut s = Search {
        systems,
        sizes,
        target_len: 2 * rounds.max(1),
        nodes: 0,
        budget,
    };
    let mut chain = Vec::new();
    Ok(match s.extend(&mut chain) {
        Flow::Found(maps) => IsoOutcome::Found {
            certificate: IsoCertificate { maps },
        },
        Flow::Continue => IsoOutcome::Exhausted { depth, nodes: s.nodes },
        Flow::Stop => IsoOutcome::BudgetExceeded { nodes: s.nodes },
    })
}

pub fn iso_search(a: &OrderedBratteliDiagram, b: &OrderedBratteliDiagram, depth: usize) -> Result<IsoOutcome> {
    iso_search_with(a, b, depth, DEFAULT_ISO_ROUNDS, DEFAULT_ISO_BUDGET)
}

fn connecting(stages: &[crate::diagram::NestStage], from: usize, to: usize) -> Result<MatrixUnitEmbedding> {
    let n = stages[from].algebra.n();
    let mut e = MatrixUnitEmbedding::aligned(
        stages[from].algebra.clone(),
        stages[from].algebra.clone(),
        (0..n).map(|i| vec![i]).collect(),
    )?;
    for st in &stages[from..to] {
        let step = st.embedding.as_ref().ok_or_else(|| Error::Internal("missing stage embedding".into()))?;
        e = e.then(step)?;
    }
    Ok(e)
}

impl IsoCertificate {
    /// Realises every map as matrix units and checks each consecutive
    /// composite against the connecting embedding of the realised system.
    pub fn validate(&self, a: &OrderedBratteliDiagram, b: &OrderedBratteliDiagram) -> Result<bool> {
        let top = self.maps.iter().map(|m| m.from_stage.max(m.to_stage)).max().unwrap_or(0);
        let systems = [prepared(a, top)?, prepared(b, top)?];
        let stages = [realize_nest_system(&systems[0], top)?, realize_nest_system(&systems[1], top)?];
        let mut realized = Vec::new();
        for m in &self.maps {
            let (src, tgt) = (m.side.source(), m.side.flip().source());
            let (Some(from), Some(to)) = (stages[src].get(m.from_stage), stages[tgt].get(m.to_stage)) else {
                return Ok(false);
            };
            match concatenation_embedding(&from.sizes, &to.sizes, &m.words) {
                Ok(e) => realized.push(e),
                Err(_) => return Ok(false),
            }
        }
        for (i, pair) in self.maps.windows(2).enumerate() {
            let (first, second) = (&pair[0], &pair[1]);
            if second.side != first.side.flip() || second.from_stage != first.to_stage || second.to_stage <= first.from_stage {
                return Ok(false);
            }
            if compose(&second.words, &first.words)
                != systems[first.side.source()].composite_order(first.from_stage, second.to_stage)
            {
                return Ok(false);
            }
            let via = realized[i].then(&realized[i + 1])?;
            let direct = connecting(&stages[first.side.source()], first.from_stage, second.to_stage)?;
            if via.normalized() != direct.normalized() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
