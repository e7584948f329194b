//! Exact feasibility of a single-label witness.
//!
//! Given the outgoing `a`-edges of a node, each with the set of types its
//! target may take, and a bound interval per type, decide whether every edge
//! can be assigned one candidate type so that each type receives a number of
//! edges inside its interval. This is a degree-constrained bipartite
//! assignment; small instances are searched exhaustively and larger ones are
//! reduced to a circulation with lower bounds.

use crate::interval::Interval;

/// Out-degree up to which the exhaustive search is used.
pub const DEFAULT_EXHAUSTIVE_THRESHOLD: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessProblem {
    /// For each edge, the indices of the types its target may take.
    pub candidates: Vec<Vec<usize>>,
    /// Bound per type index. Types missing from the vector are `[0;0]`.
    pub bounds: Vec<Interval>,
}

impl WitnessProblem {
    pub fn new(candidates: Vec<Vec<usize>>, bounds: Vec<Interval>) -> Self {
        WitnessProblem { candidates, bounds }
    }

    fn bound(&self, ty: usize) -> Interval {
        self.bounds.get(ty).copied().unwrap_or(Interval::ZERO)
    }

    fn cap(&self, ty: usize) -> u64 {
        let edges = self.candidates.len() as u64;
        self.bound(ty).hi().map_or(edges, |h| h.min(edges))
    }

    pub fn is_feasible(&self) -> bool {
        self.is_feasible_with(DEFAULT_EXHAUSTIVE_THRESHOLD)
    }

    pub fn is_feasible_with(&self, exhaustive_threshold: usize) -> bool {
        if !self.quick_check() {
            return false;
        }
        if self.candidates.len() <= exhaustive_threshold {
            self.solve_exhaustive()
        } else {
            self.solve_flow()
        }
    }

    // Necessary conditions that prune most infeasible instances.
    fn quick_check(&self) -> bool {
        let edges = self.candidates.len() as u64;
        let demand: u64 = self.bounds.iter().map(Interval::lo).sum();
        if demand > edges {
            return false;
        }
        self.candidates
            .iter()
            .all(|c| c.iter().any(|&t| self.cap(t) > 0))
    }

    /// Backtracking search over assignments.
    pub fn solve_exhaustive(&self) -> bool {
        let mut used = vec![0u64; self.bounds.len().max(self.max_candidate() + 1)];
        let deficit: u64 = self.bounds.iter().map(Interval::lo).sum();
        self.search(0, &mut used, deficit)
    }

    fn max_candidate(&self) -> usize {
        self.candidates.iter().flatten().copied().max().unwrap_or(0)
    }

    fn search(&self, edge: usize, used: &mut [u64], deficit: u64) -> bool {
        let remaining = (self.candidates.len() - edge) as u64;
        if deficit > remaining {
            return false;
        }
        if edge == self.candidates.len() {
            return deficit == 0;
        }
        for &t in &self.candidates[edge] {
            if used[t] >= self.cap(t) {
                continue;
            }
            let helps = used[t] < self.bound(t).lo();
            used[t] += 1;
            let ok = self.search(edge + 1, used, deficit - u64::from(helps));
            used[t] -= 1;
            if ok {
                return true;
            }
        }
        false
    }

    /// Circulation with lower bounds, solved by max flow.
    pub fn solve_flow(&self) -> bool {
        let m = self.candidates.len();
        let k = self.bounds.len().max(self.max_candidate() + 1);
        // source, edges, types, sink, super-source, super-sink
        let source = 0;
        let edge_node = |i: usize| 1 + i;
        let type_node = |j: usize| 1 + m + j;
        let sink = 1 + m + k;
        let (ss, tt) = (sink + 1, sink + 2);
        let mut net = FlowNetwork::new(sink + 3);
        let mut excess = vec![0i64; sink + 1];
        let mut lower = |u: usize, v: usize, lo: u64, hi: u64, net: &mut FlowNetwork| {
            if hi > lo {
                net.add_edge(u, v, hi - lo);
            }
            excess[v] += lo as i64;
            excess[u] -= lo as i64;
        };
        for (i, cands) in self.candidates.iter().enumerate() {
            lower(source, edge_node(i), 1, 1, &mut net);
            for &j in cands {
                if self.cap(j) > 0 {
                    net.add_edge(edge_node(i), type_node(j), 1);
                }
            }
        }
        for j in 0..k {
            let b = self.bound(j);
            let hi = self.cap(j);
            if b.lo() > hi {
                return false;
            }
            lower(type_node(j), sink, b.lo(), hi, &mut net);
        }
        net.add_edge(sink, source, m as u64);
        let mut need = 0u64;
        for (v, &e) in excess.iter().enumerate() {
            if e > 0 {
                net.add_edge(ss, v, e as u64);
                need += e as u64;
            } else if e < 0 {
                net.add_edge(v, tt, (-e) as u64);
            }
        }
        net.max_flow(ss, tt) == need
    }
}

/// Dinic's algorithm on a small residual graph.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        FlowNetwork {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: u64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let n = self.head.len();
        let mut total = 0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut iter = vec![0usize; n];
            loop {
                let f = self.augment(s, t, u64::MAX, &level, &mut iter);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn augment(
        &mut self,
        u: usize,
        t: usize,
        limit: u64,
        level: &[usize],
        iter: &mut [usize],
    ) -> u64 {
        if u == t {
            return limit;
        }
        while iter[u] < self.head[u].len() {
            let e = self.head[u][iter[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let f = self.augment(v, t, limit.min(self.cap[e]), level, iter);
                if f > 0 {
                    self.cap[e] -= f;
                    self.cap[e ^ 1] += f;
                    return f;
                }
            }
            iter[u] += 1;
        }
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Multiplicity::*;
    use proptest::prelude::*;

    fn brute_force(p: &WitnessProblem) -> bool {
        fn go(p: &WitnessProblem, i: usize, counts: &mut Vec<u64>) -> bool {
            if i == p.candidates.len() {
                let k = counts.len().max(p.bounds.len());
                return (0..k).all(|t| {
                    let c = counts.get(t).copied().unwrap_or(0);
                    p.bounds
                        .get(t)
                        .copied()
                        .unwrap_or(Interval::ZERO)
                        .contains(c)
                });
            }
            for &t in &p.candidates[i] {
                if counts.len() <= t {
                    counts.resize(t + 1, 0);
                }
                counts[t] += 1;
                let ok = go(p, i + 1, counts);
                counts[t] -= 1;
                if ok {
                    return true;
                }
            }
            false
        }
        go(p, 0, &mut Vec::new())
    }

    #[test]
    fn empty_witness() {
        let p = WitnessProblem::new(
            vec![],
            vec![Opt.interval(), Star.interval(), Zero.interval()],
        );
        assert!(p.is_feasible());
        let p = WitnessProblem::new(vec![], vec![One.interval()]);
        assert!(!p.is_feasible());
    }

    #[test]
    fn zero_types_receive_nothing() {
        // one edge that can only go to a type with arity zero
        let p = WitnessProblem::new(vec![vec![1]], vec![Star.interval(), Zero.interval()]);
        assert!(!p.is_feasible());
        assert!(!p.solve_flow());
    }

    #[test]
    fn large_degree_uses_flow() {
        // 12 edges each to {0,1}; type 0 exactly one, type 1 unbounded
        let p = WitnessProblem::new(vec![vec![0, 1]; 12], vec![One.interval(), Plus.interval()]);
        assert!(p.is_feasible_with(4));
        let p = WitnessProblem::new(vec![vec![0]; 12], vec![One.interval(), Plus.interval()]);
        assert!(!p.is_feasible_with(4));
    }

    fn arb_problem() -> impl Strategy<Value = WitnessProblem> {
        let mult = prop::sample::select(crate::interval::Multiplicity::ALL.to_vec());
        (1usize..4).prop_flat_map(move |k| {
            (
                prop::collection::vec(prop::collection::btree_set(0..k, 1..=k), 0..7),
                prop::collection::vec(mult.clone(), k),
            )
                .prop_map(|(cands, ms)| {
                    WitnessProblem::new(
                        cands.into_iter().map(|s| s.into_iter().collect()).collect(),
                        ms.into_iter().map(|m| m.interval()).collect(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn strategies_agree_with_brute_force(p in arb_problem()) {
            let expected = brute_force(&p);
            prop_assert_eq!(p.solve_exhaustive(), expected);
            prop_assert_eq!(p.solve_flow(), expected);
            prop_assert_eq!(p.is_feasible(), expected);
        }
    }
}
