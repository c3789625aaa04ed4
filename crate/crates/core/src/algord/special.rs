use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::diagram::{realize_nest_system, OrderedBratteliDiagram};
use crate::error::{Error, Result};

/// Vertices from which an infinite forward chain of right-most points
/// starts, for one stationary step of orders. Vertex `w` continues the
/// chain through `v` when `v` is the last source in the order of `w`.
pub(crate) fn alive_vertices(step: &[Vec<usize>]) -> Vec<bool> {
    let n = step.len();
    let last: Vec<Option<usize>> = step.iter().map(|o| o.last().copied()).collect();
    let mut alive = vec![true; n];
    loop {
        let next: Vec<bool> = (0..n)
            .map(|v| (0..n).any(|w| alive[w] && last[w] == Some(v)))
            .collect();
        if next == alive {
            return alive;
        }
        alive = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpecialPointVerdict {
    /// `witness[k]` is the summand at level `k` whose right-most point the
    /// germ passes through; `germs` counts distinct germs up to `depth`.
    Exists {
        witness: Vec<usize>,
        positions: Option<Vec<usize>>,
        germs: usize,
        stationary: bool,
    },
    None { depth: usize },
}

impl SpecialPointVerdict {
    pub fn exists(&self) -> bool {
        matches!(self, SpecialPointVerdict::Exists { .. })
    }

    pub fn germs(&self) -> usize {
        match self {
            SpecialPointVerdict::Exists { germs, .. } => *germs,
            SpecialPointVerdict::None { .. } => 0,
        }
    }
}

fn backward_chain(d: &OrderedBratteliDiagram, top: usize, depth: usize) -> Vec<usize> {
    let mut chain = vec![top];
    let mut v = top;
    for k in (0..depth).rev() {
        v = *d.orders()[k][v].last().expect("validated orders are non-empty");
        chain.push(v);
    }
    chain.reverse();
    chain
}

fn rightmost_positions(d: &OrderedBratteliDiagram, chain: &[usize]) -> Option<Vec<usize>> {
    let sizes = d.level_sizes();
    chain
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let before: Option<usize> = sizes[k][..=v].iter().map(|x| x.to_usize()).sum();
            before.map(|b| b - 1)
        })
        .collect()
}

/// Germs of points that are right-most in their summand at every level:
/// these are exactly the points no other point can be carried onto.
/// Finite non-stationary diagrams are read up to their last level.
pub fn special_point_exists(d: &OrderedBratteliDiagram, depth: usize) -> Result<SpecialPointVerdict> {
    let depth = if d.is_stationary() { depth } else { depth.min(d.depth()) };
    let d = d.extend_to(depth)?;
    let tops: Vec<usize> = if d.is_stationary() {
        let alive = alive_vertices(&d.orders()[0]);
        (0..alive.len()).filter(|&v| alive[v]).collect()
    } else {
        (0..d.width(depth)).collect()
    };
    let Some(&first) = tops.first() else {
        return Ok(SpecialPointVerdict::None { depth });
    };
    let witness = backward_chain(&d, first, depth);
    Ok(SpecialPointVerdict::Exists {
        positions: rightmost_positions(&d, &witness),
        witness,
        germs: tops.len(),
        stationary: d.is_stationary(),
    })
}

/// Counts points at level `depth` of the realised stages that are maximal
/// at every level back to 0 and continue through maximal points for
/// `lookahead` further levels.
pub fn brute_force_special_count(d: &OrderedBratteliDiagram, depth: usize, lookahead: usize) -> Result<usize> {
    let d = d.extend_to(depth + lookahead)?;
    let stages = realize_nest_system(&d, depth + lookahead)?;
    let maximal = |k: usize, x: usize| {
        let rel = stages[k].algebra.relation();
        (0..rel.len()).all(|y| y == x || !rel[x][y])
    };
    let mut source: Vec<Vec<usize>> = Vec::new();
    for s in &stages[..stages.len() - 1] {
        let e = s.embedding.as_ref().ok_or_else(|| Error::Internal("missing stage embedding".into()))?;
        let mut back = vec![usize::MAX; e.target().n()];
        for (i, img) in e.images().iter().enumerate() {
            for &j in img {
                back[j] = i;
            }
        }
        source.push(back);
    }
    let extends = |x: usize| {
        let mut frontier = vec![x];
        for k in depth..depth + lookahead {
            let e = stages[k].embedding.as_ref().expect("checked above");
            frontier = frontier
                .iter()
                .flat_map(|&y| e.image(y).iter().copied())
                .filter(|&z| maximal(k + 1, z))
                .collect();
        }
        !frontier.is_empty()
    };
    let mut count = 0;
    for x in 0..stages[depth].algebra.n() {
        let mut ok = true;
        let mut y = x;
        for k in (0..=depth).rev() {
            if !maximal(k, y) {
                ok = false;
                break;
            }
            if k > 0 {
                y = source[k - 1][y];
            }
        }
        if ok && extends(x) {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distinction {
    pub first: SpecialPointVerdict,
    pub second: SpecialPointVerdict,
    pub distinguished: bool,
}

/// Compares the special-point data of two ordered diagrams.
pub fn distinguish(a: &OrderedBratteliDiagram, b: &OrderedBratteliDiagram, depth: usize) -> Result<Distinction> {
    let first = special_point_exists(a, depth)?;
    let second = special_point_exists(b, depth)?;
    let distinguished = first.exists() != second.exists()
        || (first.exists() && second.exists() && first.germs() != second.germs());
    Ok(Distinction {
        first,
        second,
        distinguished,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;

    fn theta() -> OrderedBratteliDiagram {
        OrderedBratteliDiagram::stationary(vec![vec![1], vec![0, 1]], int_vec(&[1, 1]), 1).unwrap()
    }

    fn psi() -> OrderedBratteliDiagram {
        OrderedBratteliDiagram::stationary(vec![vec![1], vec![1, 0]], int_vec(&[1, 1]), 1).unwrap()
    }

    #[test]
    fn theta_has_one_germ() {
        let v = special_point_exists(&theta(), 12).unwrap();
        let SpecialPointVerdict::Exists { witness, positions, germs, .. } = &v else { panic!() };
        assert_eq!(*germs, 1);
        assert!(witness.iter().all(|&w| w == 1));
        // right-most point of the second summand: sizes (F_k, F_{k+1})
        assert_eq!(positions.as_ref().unwrap()[3], 3 + 5 - 1);
    }

    #[test]
    fn psi_germs_alternate() {
        let v = special_point_exists(&psi(), 12).unwrap();
        let SpecialPointVerdict::Exists { witness, germs, .. } = &v else { panic!() };
        assert_eq!(*germs, 2);
        assert!(witness.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn brute_force_agrees() {
        for d in [theta(), psi()] {
            for depth in 1..6 {
                let n = special_point_exists(&d, depth).unwrap().germs();
                assert_eq!(brute_force_special_count(&d, depth, 2).unwrap(), n);
            }
        }
    }

    #[test]
    fn refinement_diagram_has_right_most_path() {
        let d = OrderedBratteliDiagram::stationary(vec![vec![0, 0]], int_vec(&[1]), 1).unwrap();
        let v = special_point_exists(&d, 4).unwrap();
        assert_eq!(v.germs(), 1);
        assert_eq!(brute_force_special_count(&d, 4, 1).unwrap(), 1);
    }

    #[test]
    fn stationary_steps_always_have_a_germ() {
        // the last-source map is a self-map of a finite set, so it has a cycle
        let steps = [
            vec![vec![2, 1], vec![2, 0], vec![0, 1]],
            vec![vec![0, 1], vec![0, 0, 2], vec![1, 0]],
            vec![vec![1, 0], vec![0, 1]],
        ];
        for step in steps {
            let n = step.len();
            let d = OrderedBratteliDiagram::stationary(step, int_vec(&vec![1; n]), 1).unwrap();
            assert!(special_point_exists(&d, 6).unwrap().exists());
            assert_eq!(
                brute_force_special_count(&d, 3, n).unwrap(),
                special_point_exists(&d, 3).unwrap().germs()
            );
        }
    }

    #[test]
    fn telescoping_preserves_verdict() {
        for d in [theta(), psi()] {
            let t = d.extend_to(8).unwrap().telescope(&[0, 2, 4, 6, 8]).unwrap();
            assert!(t.is_stationary());
            assert_eq!(
                special_point_exists(&t, 4).unwrap().germs(),
                special_point_exists(&d, 8).unwrap().germs()
            );
        }
        let d = OrderedBratteliDiagram::stationary(vec![vec![1], vec![0, 1]], int_vec(&[1, 1]), 6).unwrap();
        let t = d.telescope(&[0, 3, 6]).unwrap();
        assert_eq!(distinguish(&t, &theta(), 2).unwrap().distinguished, false);
    }

    #[test]
    fn distinguisher_separates_theta_and_psi() {
        let r = distinguish(&theta(), &psi(), 12).unwrap();
        assert!(r.distinguished);
        assert_eq!((r.first.germs(), r.second.germs()), (1, 2));
    }
}
