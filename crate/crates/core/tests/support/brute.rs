//! Exhaustive enumerator for tiny instances. Recomputes distances and
//! schedules from the raw node data and reads only the instance's public
//! fields, so it can serve as an oracle for the library.

use andor_vrp::{Instance, NodeId, Relation};

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteOptimum {
    pub objective: f64,
    pub routes: Vec<Vec<usize>>,
}

struct Data {
    n: usize,
    xy: Vec<(f64, f64)>,
    demand: Vec<f64>,
    service: Vec<f64>,
    early: Vec<f64>,
    late: Vec<f64>,
    horizon: f64,
    capacity: f64,
    vehicles: usize,
    // rel[i][j] for customers i < j
    rel: Vec<Vec<Relation>>,
}

impl Data {
    fn of(inst: &Instance) -> Self {
        let n = inst.n();
        let nodes = inst.nodes();
        let mut rel = vec![vec![Relation::None; n + 1]; n + 1];
        for i in 1..=n {
            for j in i + 1..=n {
                rel[i][j] = inst.precedence().get(NodeId(i), NodeId(j));
            }
        }
        Data {
            n,
            xy: nodes.iter().map(|v| (v.x, v.y)).collect(),
            demand: nodes.iter().map(|v| v.demand).collect(),
            service: nodes.iter().map(|v| v.service).collect(),
            early: nodes.iter().map(|v| v.early).collect(),
            late: nodes.iter().map(|v| v.late).collect(),
            horizon: nodes[0].late,
            capacity: inst.capacity(),
            vehicles: inst.max_vehicles(),
            rel,
        }
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.xy[a];
        let (bx, by) = self.xy[b];
        ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
    }

    /// Completion time of a full route, or None when any rule breaks.
    fn route_cost(&self, seq: &[usize]) -> Option<f64> {
        let load: f64 = seq.iter().map(|&c| self.demand[c]).sum();
        if load > self.capacity + TOL {
            return None;
        }
        let mut t = 0.0;
        let mut prev = 0;
        for (p, &c) in seq.iter().enumerate() {
            let arrive = (t + self.dist(prev, c)).max(self.early[c]);
            if arrive > self.late[c] + TOL {
                return None;
            }
            let has_or = (1..c).any(|i| self.rel[i][c] == Relation::Or);
            let mut or_met = false;
            for (q, &other) in seq.iter().enumerate() {
                if other < c {
                    match self.rel[other][c] {
                        Relation::And if q > p => return None,
                        Relation::Or => or_met |= q < p,
                        _ => {}
                    }
                }
            }
            if has_or && !or_met {
                return None;
            }
            t = arrive + self.service[c];
            prev = c;
        }
        let done = t + self.dist(prev, self.n + 1);
        (done <= self.horizon + TOL).then_some(done)
    }
}

fn permutations(items: &[usize], f: &mut impl FnMut(&[usize])) {
    fn rec(cur: &mut Vec<usize>, rest: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if rest.is_empty() {
            f(cur);
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            cur.push(x);
            rec(cur, rest, f);
            cur.pop();
            rest.insert(k, x);
        }
    }
    rec(&mut Vec::new(), &mut items.to_vec(), f);
}

/// Optimum over every way of splitting the customers into at most `K`
/// ordered routes, or None when no split is feasible. Intended for n <= 8.
pub fn brute_force(inst: &Instance) -> Option<BruteOptimum> {
    let d = Data::of(inst);
    let n = d.n;
    assert!(n <= 10, "brute force is for tiny instances");
    let full = (1usize << n) - 1;
    if n == 0 {
        return Some(BruteOptimum {
            objective: 0.0,
            routes: vec![],
        });
    }
    // best single route per customer subset
    let mut single: Vec<Option<(f64, Vec<usize>)>> = vec![None; full + 1];
    for mask in 1..=full {
        let members: Vec<usize> = (0..n)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b + 1)
            .collect();
        let mut best: Option<(f64, Vec<usize>)> = None;
        permutations(&members, &mut |seq| {
            if let Some(c) = d.route_cost(seq) {
                if best.as_ref().is_none_or(|(b, _)| c < *b) {
                    best = Some((c, seq.to_vec()));
                }
            }
        });
        single[mask] = best;
    }
    // layered partition: layer[k][mask] = best cost covering mask with k routes
    let mut layer: Vec<Option<(f64, Vec<Vec<usize>>)>> = single
        .iter()
        .map(|s| s.as_ref().map(|(c, r)| (*c, vec![r.clone()])))
        .collect();
    let mut answer = layer[full].clone();
    for _ in 1..d.vehicles {
        let mut next: Vec<Option<(f64, Vec<Vec<usize>>)>> = vec![None; full + 1];
        for mask in 1..=full {
            let low = mask & mask.wrapping_neg();
            // submask holding the lowest customer becomes the new route
            let mut sub = mask;
            while sub > 0 {
                if sub & low != 0 && sub != mask {
                    if let (Some((c1, r1)), Some((c2, rs))) = (&single[sub], &layer[mask ^ sub]) {
                        let c = c1 + c2;
                        if next[mask].as_ref().is_none_or(|(b, _)| c < *b) {
                            let mut routes = rs.clone();
                            routes.push(r1.clone());
                            next[mask] = Some((c, routes));
                        }
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        if let Some((c, r)) = &next[full] {
            if answer.as_ref().is_none_or(|(b, _)| c < b) {
                answer = Some((*c, r.clone()));
            }
        }
        layer = next;
    }
    answer.map(|(objective, routes)| BruteOptimum { objective, routes })
}
