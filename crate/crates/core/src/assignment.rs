//! Minimum-cost perfect matching of starts to targets by geodesic length.

use crate::error::{Error, Result};
use crate::free_space::FreeSpace;
use crate::geodesics::{shortest_paths_from, GeodesicPath};
use crate::geometry::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct AssignedPath {
    pub start_index: usize,
    pub target_index: usize,
    pub path: GeodesicPath,
}

/// The optimal-assignment path set.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentPathSet {
    /// Sorted by start index.
    pub pairs: Vec<AssignedPath>,
    pub total_length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    /// `(row, column)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total: f64,
}

/// Geodesics between every start and target (`None` when disconnected).
pub fn geodesic_path_matrix(
    f: &FreeSpace,
    starts: &[Point],
    targets: &[Point],
) -> Result<Vec<Vec<Option<GeodesicPath>>>> {
    starts
        .iter()
        .map(|&s| shortest_paths_from(f, s, targets))
        .collect()
}

/// Entry `(i, j)` is the geodesic distance from start `i` to target `j`, or infinity.
pub fn geodesic_cost_matrix(
    f: &FreeSpace,
    starts: &[Point],
    targets: &[Point],
) -> Result<Vec<Vec<f64>>> {
    Ok(lengths(&geodesic_path_matrix(f, starts, targets)?))
}

fn lengths(paths: &[Vec<Option<GeodesicPath>>]) -> Vec<Vec<f64>> {
    paths
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| p.as_ref().map_or(f64::INFINITY, GeodesicPath::total_length))
                .collect()
        })
        .collect()
}

pub fn assignment_path_set(
    f: &FreeSpace,
    starts: &[Point],
    targets: &[Point],
) -> Result<AssignmentPathSet> {
    let mut paths = geodesic_path_matrix(f, starts, targets)?;
    let m = optimal_assignment(&lengths(&paths))?;
    let pairs = m
        .pairs
        .iter()
        .map(|&(i, j)| AssignedPath {
            start_index: i,
            target_index: j,
            path: paths[i][j].take().expect("finite entries have paths"),
        })
        .collect();
    Ok(AssignmentPathSet {
        pairs,
        total_length: m.total,
    })
}

/// Minimum-total perfect matching. Among optima, returns the lexicographically
/// smallest list of pairs sorted by row.
pub fn optimal_assignment(cost: &[Vec<f64>]) -> Result<Matching> {
    let n = cost.len();
    if cost.iter().any(|r| r.len() != n) {
        return Err(Error::InfeasibleInstance(
            "cost matrix is not square".into(),
        ));
    }
    if n == 0 {
        return Ok(Matching {
            pairs: vec![],
            total: 0.0,
        });
    }
    let finite_sum: f64 = cost
        .iter()
        .flatten()
        .filter(|c| c.is_finite())
        .map(|c| c.abs())
        .sum();
    let big = 2.0 * finite_sum + 1.0;
    let c: Vec<Vec<f64>> = cost
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| if x.is_finite() { x } else { big })
                .collect()
        })
        .collect();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    let opt = hungarian(&c, &rows, &cols);
    if opt > finite_sum {
        return Err(Error::InfeasibleMatching);
    }
    let tol = 1e-9 * (1.0 + opt.abs());
    let mut remaining = opt;
    let mut free_cols = cols;
    let mut pairs = Vec::with_capacity(n);
    for r in 0..n {
        let rest_rows: Vec<usize> = ((r + 1)..n).collect();
        let mut chosen = None;
        for (k, &col) in free_cols.iter().enumerate() {
            let rest_cols: Vec<usize> = free_cols.iter().copied().filter(|&x| x != col).collect();
            let sub = if rest_rows.is_empty() {
                0.0
            } else {
                hungarian(&c, &rest_rows, &rest_cols)
            };
            if c[r][col] + sub <= remaining + tol {
                chosen = Some((k, col, sub));
                break;
            }
        }
        let (k, col, sub) = chosen.expect("some column attains the optimum");
        pairs.push((r, col));
        free_cols.remove(k);
        remaining = sub;
    }
    let total = pairs.iter().map(|&(i, j)| cost[i][j]).sum();
    Ok(Matching { pairs, total })
}

/// Optimal value of the assignment problem restricted to `rows × cols`
/// (equal sizes), via shortest augmenting paths with potentials.
fn hungarian(c: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    let n = rows.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = c[rows[i0 - 1]][cols[j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| c[rows[p[j] - 1]][cols[j - 1]]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_space::{build_free_space, Workspace};
    use proptest::prelude::*;

    pub(crate) fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + rec(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn small_examples() {
        let m = optimal_assignment(&[vec![1.0, 10.0], vec![10.0, 1.0]]).unwrap();
        assert_eq!(m.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(m.total, 2.0);
        let m = optimal_assignment(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(m.total, 5.0);
    }

    #[test]
    fn infinite_rows_are_infeasible() {
        let inf = f64::INFINITY;
        assert_eq!(
            optimal_assignment(&[vec![1.0, inf], vec![2.0, inf]]),
            Err(Error::InfeasibleMatching)
        );
        let m = optimal_assignment(&[vec![1.0, inf], vec![inf, 3.0]]).unwrap();
        assert_eq!(m.total, 4.0);
    }

    #[test]
    fn five_by_five_matches_enumeration() {
        let c: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| ((i * 7 + j * 13) % 11) as f64).collect())
            .collect();
        assert_eq!(optimal_assignment(&c).unwrap().total, brute_force(&c));
    }

    #[test]
    fn cost_matrix_examples() {
        let f = build_free_space(&Workspace::rectangle(0.0, 0.0, 10.0, 10.0)).unwrap();
        let c = geodesic_cost_matrix(&f, &[Point::new(2.0, 2.0)], &[Point::new(5.0, 6.0)]).unwrap();
        assert!((c[0][0] - 5.0).abs() < 1e-12);
        let s = [Point::new(2.0, 2.0), Point::new(8.0, 8.0)];
        let t = [Point::new(2.0, 8.0), Point::new(7.0, 3.0)];
        let c = geodesic_cost_matrix(&f, &s, &t).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((c[i][j] - s[i].dist(t[j])).abs() < 1e-12);
            }
        }
        let split = Workspace::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
            Point::new(0.0, 6.0),
            Point::new(8.5, 6.0),
            Point::new(8.5, 4.0),
            Point::new(0.0, 4.0),
        ]);
        let f = build_free_space(&split).unwrap();
        let c = geodesic_cost_matrix(&f, &[Point::new(2.0, 2.0)], &[Point::new(2.0, 8.0)]).unwrap();
        assert!(c[0][0].is_infinite());
    }

    proptest! {
        #[test]
        fn hungarian_equals_brute_force(n in 1usize..=7, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..20) as f64).collect()).collect();
            let m = optimal_assignment(&c).unwrap();
            prop_assert_eq!(m.total, brute_force(&c));
            let mut cols: Vec<usize> = m.pairs.iter().map(|p| p.1).collect();
            cols.sort();
            prop_assert_eq!(cols, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn total_invariant_under_permutation(n in 2usize..=6, seed in any::<u64>()) {
            use rand::{seq::SliceRandom, Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0.0..10.0)).collect()).collect();
            let mut rp: Vec<usize> = (0..n).collect();
            let mut cp: Vec<usize> = (0..n).collect();
            rp.shuffle(&mut rng);
            cp.shuffle(&mut rng);
            let permuted: Vec<Vec<f64>> = rp.iter().map(|&i| cp.iter().map(|&j| c[i][j]).collect()).collect();
            let a = optimal_assignment(&c).unwrap();
            let b = optimal_assignment(&permuted).unwrap();
            prop_assert!((a.total - b.total).abs() < 1e-9);
            // b's pairs map back to an optimal matching of c
            let back: f64 = b.pairs.iter().map(|&(i, j)| c[rp[i]][cp[j]]).sum();
            prop_assert!((back - a.total).abs() < 1e-9);
        }
    }
}
