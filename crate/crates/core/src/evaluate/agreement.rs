//! Answer matching and the agreement ratio between two answer lists.

use crate::extract::SimilarityConfig;

/// One-to-one matching between two answer lists, as `(index in a, index in
/// b)` pairs sorted by `a`. Pairs are first accepted greedily by decreasing
/// similarity; augmenting paths then grow the matching to maximum size.
pub fn match_answers(a: &[String], b: &[String], sim: &SimilarityConfig) -> Vec<(usize, usize)> {
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if sim.equivalent(x, y) {
                edges.push((sim.similarity(x, y), i, j));
                adj[i].push(j);
            }
        }
    }
    edges.sort_by(|p, q| q.0.total_cmp(&p.0).then((p.1, p.2).cmp(&(q.1, q.2))));

    let mut mate_a: Vec<Option<usize>> = vec![None; a.len()];
    let mut mate_b: Vec<Option<usize>> = vec![None; b.len()];
    for &(_, i, j) in &edges {
        if mate_a[i].is_none() && mate_b[j].is_none() {
            mate_a[i] = Some(j);
            mate_b[j] = Some(i);
        }
    }

    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], mate_a: &mut [Option<usize>], mate_b: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            let free = match mate_b[j] {
                None => true,
                Some(k) => augment(k, adj, seen, mate_a, mate_b),
            };
            if free {
                mate_a[i] = Some(j);
                mate_b[j] = Some(i);
                return true;
            }
        }
        false
    }

    for i in 0..a.len() {
        if mate_a[i].is_none() {
            let mut seen = vec![false; b.len()];
            augment(i, &adj, &mut seen, &mut mate_a, &mut mate_b);
        }
    }
    mate_a
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|j| (i, j)))
        .collect()
}

/// `2·|matches| / (|a| + |b|)`; 1 when both lists are empty, 0 when exactly
/// one is.
pub fn agreement(a: &[String], b: &[String], sim: &SimilarityConfig) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => 2.0 * match_answers(a, b, sim).len() as f64 / (a.len() + b.len()) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn greedy_alone_is_not_maximum() {
        let a = v(&["alpha beta gamma", "alpha"]);
        let b = v(&["alpha beta", "gamma"]);
        let cfg = SimilarityConfig::default();
        assert_eq!(match_answers(&a, &b, &cfg).len(), 2);
    }

    #[test]
    fn one_to_one() {
        let cfg = SimilarityConfig::default();
        assert_eq!(match_answers(&v(&["Trudeau"]), &v(&["Trudeau", "Trudeau"]), &cfg).len(), 1);
    }
}
