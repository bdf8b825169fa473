use crate::reductions::{CnfInstance, ColoringInstance};

use super::SolverError;

pub const SAT_ORACLE_MAX_VARIABLES: usize = 25;

/// First proper `k`-coloring in lexicographic order (vertex 0 most
/// significant), or `None`.
pub fn coloring_oracle(graph: &ColoringInstance, k: usize, cap: u64) -> Result<Option<Vec<usize>>, SolverError> {
    let n = graph.vertex_count();
    let size = (0..n).fold(1u128, |acc, _| acc.saturating_mul(k as u128));
    if size > cap as u128 {
        return Err(SolverError::SearchSpaceTooLarge { size, cap });
    }
    if k == 0 {
        return Ok((n == 0).then(Vec::new));
    }
    let mut colors = vec![0usize; n];
    loop {
        if graph.edges().iter().all(|&(u, v)| colors[u] != colors[v]) {
            return Ok(Some(colors));
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            colors[i] += 1;
            if colors[i] < k {
                break;
            }
            colors[i] = 0;
        }
    }
}

/// First satisfying truth assignment, reading bit `i` of a counter as
/// variable `i + 1`, or `None`.
pub fn sat_oracle(cnf: &CnfInstance) -> Result<Option<Vec<bool>>, SolverError> {
    let n = cnf.variable_count();
    if n > SAT_ORACLE_MAX_VARIABLES {
        return Err(SolverError::SearchSpaceTooLarge { size: 1u128 << n.min(127), cap: 1 << SAT_ORACLE_MAX_VARIABLES });
    }
    for mask in 0u64..1 << n {
        let truth: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if cnf.is_satisfied_by(&truth) {
            return Ok(Some(truth));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(n: usize, edges: &[(usize, usize)]) -> ColoringInstance {
        ColoringInstance::new(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn small_graphs() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(coloring_oracle(&tri, 3, u64::MAX).unwrap(), Some(vec![0, 1, 2]));
        assert_eq!(coloring_oracle(&tri, 2, u64::MAX).unwrap(), None);
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(coloring_oracle(&k4, 3, u64::MAX).unwrap(), None);
        assert!(coloring_oracle(&k4, 4, u64::MAX).unwrap().is_some());
        assert!(matches!(coloring_oracle(&k4, 3, 80), Err(SolverError::SearchSpaceTooLarge { size: 81, cap: 80 })));
        assert_eq!(coloring_oracle(&graph(0, &[]), 0, 1).unwrap(), Some(vec![]));
    }

    #[test]
    fn petersen_is_three_colorable() {
        let mut e: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        e.extend((0..5).map(|i| (i, i + 5)));
        e.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
        let p = graph(10, &e);
        assert_eq!(p.edges().len(), 15);
        let c = coloring_oracle(&p, 3, u64::MAX).unwrap().unwrap();
        assert!(p.edges().iter().all(|&(u, v)| c[u] != c[v]));
        assert_eq!(coloring_oracle(&p, 2, u64::MAX).unwrap(), None);
    }

    #[test]
    fn sat_basics() {
        let empty = CnfInstance::new(0, Vec::<Vec<i32>>::new()).unwrap();
        assert_eq!(sat_oracle(&empty).unwrap(), Some(vec![]));
        let contra = CnfInstance::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(contra.clauses(), &[[-1, -1, -1], [1, 1, 1]]);
        assert_eq!(sat_oracle(&contra).unwrap(), None);
        let wide = CnfInstance::new(26, vec![vec![26]]).unwrap();
        assert!(matches!(sat_oracle(&wide), Err(SolverError::SearchSpaceTooLarge { .. })));
    }

    #[test]
    fn random_cnfs_match_a_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let clauses: Vec<Vec<i32>> = (0..8)
                .map(|_| (0..3).map(|_| rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect())
                .collect();
            let cnf = CnfInstance::new(4, clauses.clone()).unwrap();
            // Independent count over the raw clause lists.
            let models = (0u32..16)
                .filter(|m| clauses.iter().all(|c| c.iter().any(|&l| (m >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))))
                .count();
            let found = sat_oracle(&cnf).unwrap();
            assert_eq!(found.is_some(), models > 0);
            if let Some(t) = found {
                assert!(cnf.is_satisfied_by(&t));
            }
        }
    }
}
