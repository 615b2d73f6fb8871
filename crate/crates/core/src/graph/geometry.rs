//! Hyperbolicity estimation, quasiconvexity, projections, and the
//! boundary-neighborhood sets M(r; horizon).

use std::cmp::Ordering;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::scalar::Scalar;

use super::{DistRow, MetricGraph, Vertex};

#[derive(Clone, Debug)]
pub struct DeltaReport<S> {
    pub delta: S,
    /// (x, y, z, offending point on [x,y]) realizing the maximum.
    pub witness: Option<(Vertex, Vertex, Vertex, Vertex)>,
    pub triples_checked: u64,
    pub exhaustive: bool,
}

impl<S: Scalar> MetricGraph<S> {
    /// Thin-triangle hyperbolicity constant: the worst defect
    /// max_{p in [x,y]} d(p, [x,z] u [z,y]) over triples of real vertices,
    /// using the deterministic geodesic. Exhaustive when the triple count
    /// fits the budget, else seeded uniform sampling.
    pub fn estimate_delta(&self, budget: u64, seed: u64) -> DeltaReport<S> {
        let n = self.real_count() as u64;
        let total = n * (n.saturating_sub(1)) * (n.saturating_sub(2)) / 6;
        let exhaustive = total <= budget;

        let triples: Vec<(Vertex, Vertex, Vertex)> = if exhaustive {
            let mut v = Vec::with_capacity(total as usize);
            for x in 0..n as Vertex {
                for y in x + 1..n as Vertex {
                    for z in y + 1..n as Vertex {
                        v.push((x, y, z));
                    }
                }
            }
            v
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = Vec::with_capacity(budget as usize);
            while (v.len() as u64) < budget {
                let x = rng.gen_range(0..n) as Vertex;
                let y = rng.gen_range(0..n) as Vertex;
                let z = rng.gen_range(0..n) as Vertex;
                if x != y && y != z && x != z {
                    v.push((x, y, z));
                }
            }
            v
        };

        let best = triples
            .par_iter()
            .enumerate()
            .map(|(i, &(x, y, z))| {
                let (d, p) = self.triple_defect(x, y, z);
                (d, i, (x, y, z, p))
            })
            .reduce(
                || (S::zero(), usize::MAX, (0, 0, 0, 0)),
                |a, b| match a.0.total_cmp(&b.0) {
                    Ordering::Less => b,
                    Ordering::Greater => a,
                    Ordering::Equal => {
                        if a.1 <= b.1 {
                            a
                        } else {
                            b
                        }
                    }
                },
            );

        let witness = if best.1 == usize::MAX { None } else { Some(best.2) };
        DeltaReport {
            delta: best.0,
            witness,
            triples_checked: triples.len() as u64,
            exhaustive,
        }
    }

    /// Worst defect over the three sides of one triangle; returns the
    /// offending point on the worst side.
    fn triple_defect(&self, x: Vertex, y: Vertex, z: Vertex) -> (S, Vertex) {
        let mut worst = (S::zero(), x);
        for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
            let side = self.geodesic(a, b);
            let mut union = self.geodesic(a, c).vertices;
            union.extend(self.geodesic(c, b).vertices);
            union.sort_unstable();
            union.dedup();
            let row = self.set_row(&union);
            for &p in &side.vertices {
                let d = row.get(p);
                if d.total_cmp(&worst.0) == Ordering::Greater {
                    worst = (d, p);
                }
            }
        }
        worst
    }

    /// Worst gap |<x,y>_z - d(z, [x,y])| over all (unordered pair, z) triples
    /// of real vertices. This is the exhaustive check behind the
    /// product-vs-geodesic comparison; it requires the integer kernel.
    pub fn gromov_geodesic_gap(&self) -> S {
        let n = self.real_count();
        let rows: Vec<Arc<DistRow<S>>> =
            (0..n as Vertex).map(|v| self.distance_row(v)).collect();
        let den = self.scaled_den();

        let pairs: Vec<(Vertex, Vertex)> = (0..n as Vertex)
            .flat_map(|x| (x + 1..n as Vertex).map(move |y| (x, y)))
            .collect();

        if let Some(den) = den {
            // Integer fast path: everything in numerators over `den`;
            // the Gromov product is a half-numerator, so scale by 2.
            let worst2: i64 = pairs
                .par_iter()
                .map(|&(x, y)| {
                    let geo = self.geodesic(x, y);
                    let (rx, _) = rows[x as usize].scaled().unwrap();
                    let (ry, _) = rows[y as usize].scaled().unwrap();
                    let dxy = rx[y as usize] as i64;
                    let mut m = vec![u32::MAX; n];
                    for &v in &geo.vertices {
                        let (rv, _) = rows[v as usize].scaled().unwrap();
                        for (mz, &d) in m.iter_mut().zip(rv[..n].iter()) {
                            if d < *mz {
                                *mz = d;
                            }
                        }
                    }
                    let mut worst: i64 = 0;
                    for z in 0..n {
                        let gp2 = rx[z] as i64 + ry[z] as i64 - dxy;
                        let gap2 = (gp2 - 2 * m[z] as i64).abs();
                        worst = worst.max(gap2);
                    }
                    worst
                })
                .reduce(|| 0, i64::max);
            S::from_ratio(worst2, 2 * den)
        } else {
            pairs
                .par_iter()
                .map(|&(x, y)| {
                    let geo = self.geodesic(x, y);
                    let row = self.set_row(&geo.vertices);
                    let mut worst = S::zero();
                    for z in 0..n as Vertex {
                        let gp = self.gromov_product(x, y, z);
                        let gap = (gp - row.get(z)).abs();
                        worst = S::max_of(worst, gap);
                    }
                    worst
                })
                .reduce(S::zero, S::max_of)
        }
    }

    /// True iff every deterministic geodesic between points of `ys` stays in
    /// the closed mu-neighborhood of `ys`; on failure returns the first
    /// offending geodesic vertex (ordered by the pair, then by position).
    pub fn is_quasiconvex(&self, ys: &[Vertex], mu: &S) -> (bool, Option<Vertex>) {
        assert!(!ys.is_empty(), "quasiconvexity of the empty set");
        let row = self.set_row(ys);
        for (i, &a) in ys.iter().enumerate() {
            for &b in &ys[i + 1..] {
                let geo = self.geodesic(a, b);
                for &p in &geo.vertices {
                    if row.get(p).total_cmp(mu) == Ordering::Greater {
                        return (false, Some(p));
                    }
                }
            }
        }
        (true, None)
    }

    /// Smallest mu for which `is_quasiconvex` would pass, measured over all
    /// pairs (or a seeded sample when the pair count exceeds the budget).
    pub fn measure_quasiconvexity(&self, ys: &[Vertex], budget: u64, seed: u64) -> S {
        assert!(!ys.is_empty());
        let row = Arc::new(self.set_row(ys));
        let k = ys.len() as u64;
        let total = k * k.saturating_sub(1) / 2;
        let pairs: Vec<(Vertex, Vertex)> = if total <= budget {
            (0..ys.len())
                .flat_map(|i| (i + 1..ys.len()).map(move |j| (i, j)))
                .map(|(i, j)| (ys[i], ys[j]))
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..budget)
                .map(|_| {
                    let i = rng.gen_range(0..ys.len());
                    let j = rng.gen_range(0..ys.len());
                    (ys[i], ys[j])
                })
                .filter(|(a, b)| a != b)
                .collect()
        };
        pairs
            .par_iter()
            .map(|&(a, b)| {
                let geo = self.geodesic(a, b);
                geo.vertices
                    .iter()
                    .map(|&p| row.get(p))
                    .fold(S::zero(), S::max_of)
            })
            .reduce(S::zero, S::max_of)
    }

    /// {y in ys : d(x,y) <= d(x,ys) + 1}, the closest-point projection set.
    pub fn closest_point_projection(&self, ys: &[Vertex], x: Vertex) -> Vec<Vertex> {
        assert!(!ys.is_empty(), "projection onto the empty set");
        let row = self.distance_row(x);
        let dmin = ys
            .iter()
            .map(|&y| row.get(y))
            .min_by(|a, b| a.total_cmp(b))
            .unwrap();
        let cutoff = dmin + S::one();
        let mut out: Vec<Vertex> = ys
            .iter()
            .copied()
            .filter(|&y| row.get(y).total_cmp(&cutoff) != Ordering::Greater)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// M(r; horizon) = {x real : <horizon, x>_basepoint > r}.
    pub fn neighborhood_m(&self, horizon: Vertex, r: &S) -> Vec<Vertex> {
        self.real_vertices()
            .filter(|&x| self.gromov_product_base(horizon, x).total_cmp(r) == Ordering::Greater)
            .collect()
    }

    /// Stabilization constant of Gromov products along the geodesic to a
    /// horizon vertex: for each x the products <g(t), x> are compared with
    /// <h, x> for every t past the per-point threshold t0(x) = <h, x>, and
    /// the worst deviation is returned. Zero on trees.
    pub fn stabilization_constant(&self, horizon: Vertex) -> S {
        self.stabilization_constant_from(self.basepoint, horizon)
    }

    /// Same, with products taken at an explicit basepoint.
    pub fn stabilization_constant_from(&self, base: Vertex, horizon: Vertex) -> S {
        let ray = self.geodesic(base, horizon);
        let base_row = self.distance_row(base);
        let params: Vec<S> = ray.vertices.iter().map(|&v| base_row.get(v)).collect();
        let hrow = self.distance_row(horizon);
        let dh = base_row.get(horizon);
        let mut worst = S::zero();
        for x in self.real_vertices() {
            let hx = (dh.clone() + base_row.get(x) - hrow.get(x)).half();
            for (t, &v) in params.iter().zip(ray.vertices.iter()) {
                if t.total_cmp(&hx) == Ordering::Less {
                    continue;
                }
                let vrow = self.distance_row(v);
                let gp = (base_row.get(v) + base_row.get(x) - vrow.get(x)).half();
                let dev = (gp - hx.clone()).abs();
                worst = S::max_of(worst, dev);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn one() -> Rat {
        Rat::from_int(1)
    }

    fn cycle(n: usize) -> MetricGraph<Rat> {
        let edges: Vec<_> = (0..n)
            .map(|i| (i as Vertex, ((i + 1) % n) as Vertex, one()))
            .collect();
        MetricGraph::new(n, &edges, 0, None).unwrap()
    }

    fn star(legs: usize, len: usize) -> MetricGraph<Rat> {
        // vertex 0 center; leg k occupies 1+k*len .. k*len+len
        let mut edges = Vec::new();
        for k in 0..legs {
            let mut prev = 0;
            for i in 0..len {
                let v = (1 + k * len + i) as Vertex;
                edges.push((prev, v, one()));
                prev = v;
            }
        }
        MetricGraph::new(1 + legs * len, &edges, 0, None).unwrap()
    }

    #[test]
    fn delta_zero_on_trees() {
        let g = star(3, 4);
        let rep = g.estimate_delta(100_000, 7);
        assert!(rep.exhaustive);
        assert_eq!(rep.delta, Rat::from_int(0));
    }

    #[test]
    fn delta_of_six_cycle_is_one() {
        // Independent oracle: brute-force over all shortest paths with
        // Floyd-Warshall distances, taking the lex-min geodesic per pair.
        let g = cycle(6);
        let n = 6usize;
        let mut d = vec![vec![i64::MAX / 4; n]; n];
        for i in 0..n {
            d[i][i] = 0;
        }
        for &(u, v, _) in g.edges() {
            d[u as usize][v as usize] = 1;
            d[v as usize][u as usize] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let lex_geo = |a: usize, b: usize| -> Vec<usize> {
            let mut seq = vec![a];
            let mut cur = a;
            while cur != b {
                let next = (0..n)
                    .filter(|&v| {
                        v != cur
                            && d[cur][v] == 1
                            && d[cur][b] == 1 + d[v][b]
                    })
                    .min()
                    .unwrap();
                seq.push(next);
                cur = next;
            }
            seq
        };
        let mut oracle_delta = 0i64;
        for x in 0..n {
            for y in (x + 1)..n {
                for z in (y + 1)..n {
                    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                        let side = lex_geo(a, b);
                        let mut union = lex_geo(a, c);
                        union.extend(lex_geo(c, b));
                        for &p in &side {
                            let off = union.iter().map(|&u| d[p][u]).min().unwrap();
                            oracle_delta = oracle_delta.max(off);
                        }
                    }
                }
            }
        }
        assert_eq!(oracle_delta, 1);
        let rep = g.estimate_delta(1000, 0);
        assert!(rep.exhaustive);
        assert_eq!(rep.delta, Rat::from_int(1));
        assert!(rep.witness.is_some());
    }

    #[test]
    fn quasiconvexity_on_star() {
        let g = star(3, 4);
        // A geodesic segment is 0-quasiconvex in a tree.
        let seg: Vec<Vertex> = g.geodesic(5, 9).vertices;
        let (ok, w) = g.is_quasiconvex(&seg, &Rat::from_int(0));
        assert!(ok && w.is_none());
        // Two leg tips; the connecting geodesic passes through the center.
        let (ok, w) = g.is_quasiconvex(&[4, 8], &Rat::from_int(1));
        assert!(!ok);
        assert!(w.is_some());
        // Whole vertex set is 0-quasiconvex.
        let all: Vec<Vertex> = g.real_vertices().collect();
        assert!(g.is_quasiconvex(&all, &Rat::from_int(0)).0);
        assert_eq!(g.measure_quasiconvexity(&[4, 8], 1000, 0), Rat::from_int(4));
    }

    #[test]
    fn cpp_matches_brute_force() {
        let g = star(2, 5); // a path of length 10 through the center
        let ys: Vec<Vertex> = vec![1, 2, 3]; // part of leg 0
        let x = 8; // on leg 1
        let got = g.closest_point_projection(&ys, x);
        // brute force
        let row = g.distance_row(x);
        let dmin = ys.iter().map(|&y| row.get(y)).min().unwrap();
        let expect: Vec<Vertex> = ys
            .iter()
            .copied()
            .filter(|&y| row.get(y) <= dmin + Rat::from_int(1))
            .collect();
        assert_eq!(got, expect);
        // x in ys contains x
        assert!(g.closest_point_projection(&ys, 2).contains(&2));
    }

    #[test]
    fn neighborhood_m_bounds() {
        let g = star(3, 5);
        let h = 5; // tip of leg 0
        // r >= d(x0,h) leaves nothing
        assert!(g.neighborhood_m(h, &Rat::from_int(5)).is_empty());
        // r = 0: every vertex with positive product, i.e. leg 0 beyond center
        let m0 = g.neighborhood_m(h, &Rat::from_int(0));
        assert_eq!(m0, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn stabilization_is_exact_on_trees() {
        let g = star(3, 6);
        assert_eq!(g.stabilization_constant(6), Rat::from_int(0));
    }

    #[test]
    fn gap_is_zero_on_trees_and_small_on_cycles() {
        let g = star(3, 3);
        assert_eq!(g.gromov_geodesic_gap(), Rat::from_int(0));
        let c = cycle(6);
        let gap = c.gromov_geodesic_gap();
        assert!(gap <= c.estimate_delta(1000, 0).delta);
    }
}
