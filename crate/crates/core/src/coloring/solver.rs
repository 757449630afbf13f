use serde::Serialize;

use crate::error::{Error, Result};
use crate::coloring::rays::RaySet;

/// Orthogonal pairs and complete orthogonal triads of a ray set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthoStructure {
    pub n_rays: usize,
    pub pairs: Vec<(usize, usize)>,
    pub triads: Vec<[usize; 3]>,
}

/// Pairs with `|rᵢ·rⱼ| ≤ tol` (`i < j`) and the triples all of whose pairs
/// qualify, both in lexicographic order.
#[allow(clippy::needless_range_loop)]
pub fn ortho_structure(rs: &RaySet, tol: f64) -> OrthoStructure {
    let n = rs.len();
    let mut adj = vec![vec![false; n]; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rs.ray(i).dot(rs.ray(j)).abs() <= tol {
                adj[i][j] = true;
                adj[j][i] = true;
                pairs.push((i, j));
            }
        }
    }
    let mut triads = Vec::new();
    for &(i, j) in &pairs {
        for k in j + 1..n {
            if adj[i][k] && adj[j][k] {
                triads.push([i, j, k]);
            }
        }
    }
    OrthoStructure { n_rays: n, pairs, triads }
}

/// A `{0, 1}` valuation of the rays; `None` marks an unassigned ray.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub values: Vec<Option<u8>>,
}

impl Coloring {
    pub fn total(values: Vec<u8>) -> Self {
        Coloring { values: values.into_iter().map(Some).collect() }
    }

    pub fn value(&self, i: usize) -> Option<u8> {
        self.values.get(i).copied().flatten()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Values as a `0`/`1` string, `?` for unassigned rays.
    pub fn to_bit_string(&self) -> String {
        self.values
            .iter()
            .map(|v| match v {
                Some(0) => '0',
                Some(_) => '1',
                None => '?',
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A complete triad whose values are not two 1s and one 0.
    Triad { rays: [usize; 3], values: [u8; 3] },
    /// An orthogonal pair valued `(0, 0)`.
    ZeroPair { rays: (usize, usize) },
}

/// Every triad not valued `{0, 1, 1}` and every orthogonal pair valued
/// `(0, 0)`.
pub fn check_coloring(os: &OrthoStructure, c: &Coloring) -> Result<Vec<Violation>> {
    let assigned = c.values.iter().take(os.n_rays).filter(|v| v.is_some()).count();
    if assigned != os.n_rays || c.values.len() != os.n_rays {
        return Err(Error::IncompleteColoring { assigned, expected: os.n_rays });
    }
    let v = |i: usize| c.values[i].expect("checked total");
    let mut out = Vec::new();
    for &t in &os.triads {
        let values = t.map(v);
        if values.iter().filter(|&&x| x == 0).count() != 1 {
            out.push(Violation::Triad { rays: t, values });
        }
    }
    for &(i, j) in &os.pairs {
        if v(i) == 0 && v(j) == 0 {
            out.push(Violation::ZeroPair { rays: (i, j) });
        }
    }
    Ok(out)
}

/// Search statistics of an exhausted colouring search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Contradictions reached, one per closed branch.
    pub conflicts: u64,
    /// Branching decisions made.
    pub decisions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Colorable(Coloring),
    Unsatisfiable(Certificate),
}

impl SolveOutcome {
    pub fn is_colorable(&self) -> bool {
        matches!(self, SolveOutcome::Colorable(_))
    }
}

struct Search<'a> {
    neighbours: Vec<Vec<usize>>,
    triads_of: Vec<Vec<usize>>,
    triads: &'a [[usize; 3]],
    values: Vec<Option<u8>>,
    trail: Vec<usize>,
    conflicts: u64,
    decisions: u64,
}

impl Search<'_> {
    /// Assigns `x = val` and propagates to a fixed point. Returns false on
    /// contradiction; assignments made are left on the trail.
    fn assign(&mut self, x: usize, val: u8) -> bool {
        let mut queue = vec![(x, val)];
        while let Some((y, b)) = queue.pop() {
            match self.values[y] {
                Some(existing) if existing == b => continue,
                Some(_) => return false,
                None => {}
            }
            self.values[y] = Some(b);
            self.trail.push(y);
            if b == 0 {
                // No orthogonal pair may be (0, 0); this also fixes the rest
                // of every triad through y to 1.
                for &z in &self.neighbours[y] {
                    queue.push((z, 1));
                }
            } else {
                for &t in &self.triads_of[y] {
                    let vals = self.triads[t].map(|i| self.values[i]);
                    let ones = vals.iter().filter(|v| **v == Some(1)).count();
                    if ones == 3 {
                        return false;
                    }
                    if ones == 2 {
                        if let Some(k) = (0..3).find(|&k| vals[k].is_none()) {
                            queue.push((self.triads[t][k], 0));
                        }
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let y = self.trail.pop().expect("non-empty");
            self.values[y] = None;
        }
    }

    fn solve(&mut self) -> bool {
        let Some(x) = self.values.iter().position(Option::is_none) else {
            return true;
        };
        for val in [0u8, 1u8] {
            self.decisions += 1;
            let mark = self.trail.len();
            if self.assign(x, val) && self.solve() {
                return true;
            }
            self.undo_to(mark);
        }
        self.conflicts += 1;
        false
    }
}

/// Exhaustive backtracking search for a valuation with exactly one 0 on
/// every complete triad and no orthogonal `(0, 0)` pair.
///
/// Branches on the lowest unassigned index, trying 0 before 1, and
/// propagates forced values after every assignment, so the result is a
/// deterministic function of the input order.
pub fn find_legal_coloring(os: &OrthoStructure, n_rays: usize) -> SolveOutcome {
    let n = n_rays.max(os.n_rays);
    let mut neighbours = vec![Vec::new(); n];
    for &(i, j) in &os.pairs {
        neighbours[i].push(j);
        neighbours[j].push(i);
    }
    let mut triads_of = vec![Vec::new(); n];
    for (t, tri) in os.triads.iter().enumerate() {
        for &i in tri {
            triads_of[i].push(t);
        }
    }
    let mut search = Search {
        neighbours,
        triads_of,
        triads: &os.triads,
        values: vec![None; n],
        trail: Vec::new(),
        conflicts: 0,
        decisions: 0,
    };
    if search.solve() {
        SolveOutcome::Colorable(Coloring { values: search.values })
    } else {
        SolveOutcome::Unsatisfiable(Certificate { conflicts: search.conflicts, decisions: search.decisions })
    }
}

/// Exhaustive check over all `2ⁿ` valuations; practical for `n ≤ 20`.
pub fn brute_force_colorable(os: &OrthoStructure) -> bool {
    let n = os.n_rays;
    assert!(n <= 24, "brute force is limited to small ray sets");
    (0u32..1 << n).any(|bits| {
        let v = |i: usize| (bits >> i) & 1;
        os.triads.iter().all(|t| t.iter().filter(|&&i| v(i) == 0).count() == 1)
            && os.pairs.iter().all(|&(i, j)| v(i) == 1 || v(j) == 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::rays::peres_rays;
    use crate::spin1::UnitVector3;
    use crate::tolerance;

    fn canonical() -> RaySet {
        RaySet::from_vectors(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn canonical_basis_structure() {
        let os = ortho_structure(&canonical(), tolerance::ORTHOGONAL);
        assert_eq!(os.pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(os.triads, vec![[0, 1, 2]]);
    }

    #[test]
    fn diagonal_adds_pair_but_no_triad() {
        let rs = RaySet::from_vectors(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).unwrap();
        let os = ortho_structure(&rs, tolerance::ORTHOGONAL);
        assert!(os.pairs.contains(&(2, 3)));
        assert_eq!(os.triads, vec![[0, 1, 2]]);
    }

    #[test]
    fn single_triad_coloring() {
        let os = ortho_structure(&canonical(), tolerance::ORTHOGONAL);
        let SolveOutcome::Colorable(c) = find_legal_coloring(&os, 3) else { panic!("colourable") };
        assert_eq!(c.to_bit_string(), "011");
        assert!(check_coloring(&os, &c).unwrap().is_empty());
    }

    #[test]
    fn all_ones_violates() {
        let os = ortho_structure(&canonical(), tolerance::ORTHOGONAL);
        let v = check_coloring(&os, &Coloring::total(vec![1, 1, 1])).unwrap();
        assert_eq!(v, vec![Violation::Triad { rays: [0, 1, 2], values: [1, 1, 1] }]);
        let v = check_coloring(&os, &Coloring::total(vec![0, 0, 1])).unwrap();
        assert_eq!(v.len(), 2);
        let partial = Coloring { values: vec![Some(1), None, Some(0)] };
        assert_eq!(check_coloring(&os, &partial), Err(Error::IncompleteColoring { assigned: 2, expected: 3 }));
    }

    #[test]
    fn peres_is_uncolourable() {
        let os = ortho_structure(&peres_rays(), tolerance::ORTHOGONAL);
        assert_eq!(os.triads.len(), 16);
        assert_eq!(os.pairs.len(), 72);
        let SolveOutcome::Unsatisfiable(cert) = find_legal_coloring(&os, 33) else { panic!("Peres set coloured") };
        assert!(cert.conflicts > 0 && cert.decisions >= cert.conflicts);
    }

    #[test]
    fn peres_random_colorings_violate() {
        use rand::{Rng, SeedableRng};
        let os = ortho_structure(&peres_rays(), tolerance::ORTHOGONAL);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let c = Coloring::total((0..33).map(|_| rng.random_range(0..2u8)).collect());
            assert!(!check_coloring(&os, &c).unwrap().is_empty());
        }
    }

    #[test]
    fn peres_without_z_axis() {
        let p = peres_rays();
        let z = p.position(UnitVector3::Z).unwrap();
        let rs = p.without(&[z]);
        let os = ortho_structure(&rs, tolerance::ORTHOGONAL);
        let outcome = find_legal_coloring(&os, rs.len());
        let SolveOutcome::Colorable(c) = outcome else { panic!("expected a colouring") };
        assert!(check_coloring(&os, &c).unwrap().is_empty());
    }

    #[test]
    fn peres_structure_is_axis_permutation_invariant() {
        let p = peres_rays();
        let base = ortho_structure(&p, tolerance::ORTHOGONAL);
        let perms: [[[f64; 3]; 3]; 2] =
            [[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]];
        for rot in perms {
            let q = p.rotated(&rot);
            // Each permuted ray is again a Peres ray.
            let map: Vec<usize> = q.rays().iter().map(|&r| p.position(r).expect("closed")).collect();
            let os = ortho_structure(&q, tolerance::ORTHOGONAL);
            let mut mapped: Vec<[usize; 3]> = os
                .triads
                .iter()
                .map(|t| {
                    let mut m = t.map(|i| map[i]);
                    m.sort();
                    m
                })
                .collect();
            mapped.sort();
            assert_eq!(mapped, base.triads);
        }
    }
}
