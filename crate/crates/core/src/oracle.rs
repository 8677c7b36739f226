//! Brute-force ground truth for the classifier.
//!
//! The oracle decides class membership straight from the definition: a map
//! belongs to a class when it is, definitionally, an isomorphism onto some
//! switched (and possibly globally exchanged) copy of the target, with the
//! switch confined to the sides the class allows. It never looks at a flip
//! matrix, so its verdicts are independent evidence for the classifier.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::classify::{classify, ReductClass};
use crate::error::Error;
use crate::graph::{find_isomorphisms, BipartiteGraph, Side, SidedMap};
use crate::switch::{apply_switch, flip_matrix, SwitchPattern};

/// Largest side length `oracle_class` accepts; the pattern sweep is
/// exponential in the side sizes.
pub const MAX_ORACLE_SIDE: usize = 4;

/// Largest side length the exhaustive sweeps (`verify_equivalence`,
/// `group_closure_check`) accept.
pub const MAX_FULL_SIDE: usize = 3;

/// Which sides a switch pattern may touch. The four masks mirror the class
/// lattice below `SYM`: no switching, left-only, right-only, both sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SideMask {
    Neither,
    Left,
    Right,
    Both,
}

impl SideMask {
    /// All masks in lattice-compatible order (smaller classes first).
    pub const ALL: [SideMask; 4] = [
        SideMask::Neither,
        SideMask::Left,
        SideMask::Right,
        SideMask::Both,
    ];

    pub fn allows(self, side: Side) -> bool {
        match (self, side) {
            (SideMask::Both, _) => true,
            (SideMask::Left, Side::L) | (SideMask::Right, Side::R) => true,
            _ => false,
        }
    }

    /// The class whose definition uses exactly this mask.
    pub fn class(self) -> ReductClass {
        match self {
            SideMask::Neither => ReductClass::AutStar,
            SideMask::Left => ReductClass::SL,
            SideMask::Right => ReductClass::SR,
            SideMask::Both => ReductClass::SLR,
        }
    }
}

impl fmt::Display for SideMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SideMask::Neither => "-",
            SideMask::Left => "L",
            SideMask::Right => "R",
            SideMask::Both => "LR",
        };
        write!(f, "{}", s)
    }
}

/// All switch patterns confined to `mask`, in ascending flip-count order
/// (ties broken by the packed left then right bits).
fn patterns_for(mask: SideMask, left: usize, right: usize) -> Vec<SwitchPattern> {
    let left_codes: Vec<u64> = if mask.allows(Side::L) {
        (0..1u64 << left).collect()
    } else {
        vec![0]
    };
    let right_codes: Vec<u64> = if mask.allows(Side::R) {
        (0..1u64 << right).collect()
    } else {
        vec![0]
    };
    let mut coded: Vec<(u32, u64, u64)> = left_codes
        .iter()
        .flat_map(|&lc| {
            right_codes
                .iter()
                .map(move |&rc| (lc.count_ones() + rc.count_ones(), lc, rc))
        })
        .collect();
    coded.sort_unstable();
    coded
        .into_iter()
        .map(|(_, lc, rc)| {
            SwitchPattern::new(
                (0..left).map(|a| lc >> a & 1 == 1).collect(),
                (0..right).map(|b| rc >> b & 1 == 1).collect(),
            )
        })
        .collect()
}

/// The two target variants an exchange bit can produce.
fn exchange_variants(h: &BipartiteGraph) -> [BipartiteGraph; 2] {
    [h.clone(), h.flip_all()]
}

/// True when `f` is, by direct definition, an isomorphism from `g` onto some
/// switched copy of `h` (optionally globally exchanged first) with the
/// switch confined to `mask`.
fn matches_mask(
    f: &SidedMap,
    g: &BipartiteGraph,
    h: &BipartiteGraph,
    mask: SideMask,
) -> Result<bool, Error> {
    let patterns = patterns_for(mask, h.left_count(), h.right_count());
    for base in exchange_variants(h) {
        for p in &patterns {
            let switched = apply_switch(&base, p)?;
            if f.is_isomorphism(g, &switched)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Classify a bijection by brute force: try each mask in lattice order and
/// return the first class whose definition the map satisfies; a map
/// satisfying none is `SYM`. Sides are capped at [`MAX_ORACLE_SIDE`].
pub fn oracle_class(
    f: &SidedMap,
    g: &BipartiteGraph,
    h: &BipartiteGraph,
) -> Result<ReductClass, Error> {
    for graph in [g, h] {
        if graph.left_count() > MAX_ORACLE_SIDE || graph.right_count() > MAX_ORACLE_SIDE {
            return Err(Error::TooLarge(format!(
                "oracle accepts sides up to {}, got {}x{}",
                MAX_ORACLE_SIDE,
                graph.left_count(),
                graph.right_count()
            )));
        }
    }
    if !f.fits(g, h) {
        return Err(Error::DimensionMismatch(
            "map does not fit the given source and target".into(),
        ));
    }
    for mask in SideMask::ALL {
        if matches_mask(f, g, h, mask)? {
            return Ok(mask.class());
        }
    }
    Ok(ReductClass::Sym)
}

/// How many maps landed in each class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub aut_star: u64,
    pub s_l: u64,
    pub s_r: u64,
    pub s_lr: u64,
    pub sym: u64,
}

impl ClassCounts {
    pub fn bump(&mut self, class: ReductClass) {
        match class {
            ReductClass::AutStar => self.aut_star += 1,
            ReductClass::SL => self.s_l += 1,
            ReductClass::SR => self.s_r += 1,
            ReductClass::SLR => self.s_lr += 1,
            ReductClass::Sym => self.sym += 1,
        }
    }

    pub fn get(&self, class: ReductClass) -> u64 {
        match class {
            ReductClass::AutStar => self.aut_star,
            ReductClass::SL => self.s_l,
            ReductClass::SR => self.s_r,
            ReductClass::SLR => self.s_lr,
            ReductClass::Sym => self.sym,
        }
    }

    pub fn total(&self) -> u64 {
        self.aut_star + self.s_l + self.s_r + self.s_lr + self.sym
    }

    fn merge(mut self, other: ClassCounts) -> ClassCounts {
        self.aut_star += other.aut_star;
        self.s_l += other.s_l;
        self.s_r += other.s_r;
        self.s_lr += other.s_lr;
        self.sym += other.sym;
        self
    }
}

impl fmt::Display for ClassCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AUT_STAR {} ; S_L {} ; S_R {} ; S_LR {} ; SYM {}",
            self.aut_star, self.s_l, self.s_r, self.s_lr, self.sym
        )
    }
}

/// One disagreement between oracle and classifier, keyed so the first one in
/// deterministic enumeration order can be reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub source: BipartiteGraph,
    pub target: BipartiteGraph,
    pub map: SidedMap,
    pub oracle: ReductClass,
    pub classifier: ReductClass,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "oracle {} vs classifier {}", self.oracle, self.classifier)?;
        writeln!(f, "source:")?;
        write!(f, "{}", self.source)?;
        writeln!(f, "target:")?;
        write!(f, "{}", self.target)?;
        write!(
            f,
            "map: L {:?} ; R {:?}",
            self.map.left_map(),
            self.map.right_map()
        )
    }
}

/// Result of sweeping every (source, target, bijection) triple at one size.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub left: usize,
    pub right: usize,
    pub total_maps: u64,
    pub oracle_counts: ClassCounts,
    pub classifier_counts: ClassCounts,
    pub discrepancy: Option<Discrepancy>,
}

impl OracleReport {
    pub fn agreement(&self) -> bool {
        self.discrepancy.is_none()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "sides {}x{} ; {} maps checked",
            self.left, self.right, self.total_maps
        )?;
        writeln!(f, "oracle:     {}", self.oracle_counts)?;
        writeln!(f, "classifier: {}", self.classifier_counts)?;
        match &self.discrepancy {
            None => write!(f, "agreement: yes"),
            Some(d) => write!(f, "agreement: NO\n{}", d),
        }
    }
}

/// Decode a graph from a cell code: bit `a*right + b` of `code` is the
/// cross-type bit of cell `(a, b)` (row-major, least significant bit first).
fn graph_from_code(left: usize, right: usize, code: u64) -> BipartiteGraph {
    BipartiteGraph::from_fn(left, right, |a, b| code >> (a * right + b) & 1 == 1)
        .expect("sides are positive")
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// Exhaustively compare oracle and classifier over every source graph, every
/// target graph, and every bijection at exactly the given side sizes.
/// Reports per-class counts from both and the first disagreement in
/// (source code, target code, bijection index) order, if any. Sides are
/// capped at [`MAX_FULL_SIDE`].
pub fn verify_equivalence(left: usize, right: usize) -> Result<OracleReport, Error> {
    if left == 0 || right == 0 {
        return Err(Error::ZeroSide);
    }
    if left > MAX_FULL_SIDE || right > MAX_FULL_SIDE {
        return Err(Error::TooLarge(format!(
            "exhaustive sweep accepts sides up to {}, got {}x{}",
            MAX_FULL_SIDE, left, right
        )));
    }
    let cells = left * right;
    let graph_count = 1u64 << cells;
    let perms_left = permutations(left);
    let perms_right = permutations(right);
    let maps: Vec<SidedMap> = perms_left
        .iter()
        .flat_map(|pl| {
            perms_right.iter().map(|pr| {
                SidedMap::new(pl.clone(), pr.clone(), left, right)
                    .expect("permutations are injections")
            })
        })
        .collect();

    type Partial = (ClassCounts, ClassCounts, Option<((u64, u64, usize), Discrepancy)>);

    let merge = |a: Partial, b: Partial| -> Partial {
        let disc = match (a.2, b.2) {
            (None, d) | (d, None) => d,
            (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
        };
        (a.0.merge(b.0), a.1.merge(b.1), disc)
    };

    let (oracle_counts, classifier_counts, keyed) = (0..graph_count)
        .into_par_iter()
        .map(|g_code| -> Result<Partial, Error> {
            let g = graph_from_code(left, right, g_code);
            let mut oc = ClassCounts::default();
            let mut cc = ClassCounts::default();
            let mut disc: Option<((u64, u64, usize), Discrepancy)> = None;
            for h_code in 0..graph_count {
                let h = graph_from_code(left, right, h_code);
                for (fi, f) in maps.iter().enumerate() {
                    let from_oracle = oracle_class(f, &g, &h)?;
                    let from_classifier = classify(&flip_matrix(f, &g, &h)?);
                    oc.bump(from_oracle);
                    cc.bump(from_classifier);
                    if from_oracle != from_classifier && disc.is_none() {
                        disc = Some((
                            (g_code, h_code, fi),
                            Discrepancy {
                                source: g.clone(),
                                target: h.clone(),
                                map: f.clone(),
                                oracle: from_oracle,
                                classifier: from_classifier,
                            },
                        ));
                    }
                }
            }
            Ok((oc, cc, disc))
        })
        .try_reduce(
            || (ClassCounts::default(), ClassCounts::default(), None),
            |a, b| Ok(merge(a, b)),
        )?;

    Ok(OracleReport {
        left,
        right,
        total_maps: graph_count * graph_count * maps.len() as u64,
        oracle_counts,
        classifier_counts,
        discrepancy: keyed.map(|(_, d)| d),
    })
}

/// Check that the oracle's map sets over the orbit of `g` form a groupoid:
/// between any two orbit members the sets are closed under composition and
/// inverse, and contain the identity on each member. Sides are capped at
/// [`MAX_FULL_SIDE`].
pub fn group_closure_check(g: &BipartiteGraph, mask: SideMask) -> Result<bool, Error> {
    if g.left_count() > MAX_FULL_SIDE || g.right_count() > MAX_FULL_SIDE {
        return Err(Error::TooLarge(format!(
            "closure check accepts sides up to {}, got {}x{}",
            MAX_FULL_SIDE,
            g.left_count(),
            g.right_count()
        )));
    }
    let patterns = patterns_for(mask, g.left_count(), g.right_count());

    // Orbit of g under the allowed transforms, in deterministic first-seen
    // order, with an index for every member graph.
    let mut orbit: Vec<BipartiteGraph> = Vec::new();
    let mut index: HashMap<BipartiteGraph, usize> = HashMap::new();
    let mut pending = vec![g.clone()];
    while let Some(current) = pending.pop() {
        if index.contains_key(&current) {
            continue;
        }
        index.insert(current.clone(), orbit.len());
        orbit.push(current.clone());
        for base in exchange_variants(&current) {
            for p in &patterns {
                let next = apply_switch(&base, p)?;
                if !index.contains_key(&next) {
                    pending.push(next);
                }
            }
        }
    }

    let n = orbit.len();
    // Raw isomorphism sets between orbit members, computed once.
    let isos: Vec<Vec<Vec<SidedMap>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| find_isomorphisms(&orbit[i], &orbit[j]))
                .collect()
        })
        .collect();

    // The oracle's map set from member i to member j: isomorphisms from
    // orbit[i] onto any allowed transform of orbit[j].
    let mut sets: Vec<Vec<HashSet<SidedMap>>> = vec![vec![HashSet::new(); n]; n];
    for j in 0..n {
        let mut targets: Vec<usize> = Vec::new();
        for base in exchange_variants(&orbit[j]) {
            for p in &patterns {
                let image = apply_switch(&base, p)?;
                targets.push(index[&image]);
            }
        }
        targets.sort_unstable();
        targets.dedup();
        for i in 0..n {
            for &t in &targets {
                sets[i][j].extend(isos[i][t].iter().cloned());
            }
        }
    }

    // Identity on each member.
    for (i, member) in orbit.iter().enumerate() {
        let id = SidedMap::identity(member.left_count(), member.right_count());
        if !sets[i][i].contains(&id) {
            return Ok(false);
        }
    }
    // Inverses.
    for i in 0..n {
        for j in 0..n {
            for f in &sets[i][j] {
                let inv = f.inverse().expect("orbit maps are bijections");
                if !sets[j][i].contains(&inv) {
                    return Ok(false);
                }
            }
        }
    }
    // Composition.
    for i in 0..n {
        for j in 0..n {
            for f in &sets[i][j] {
                for k in 0..n {
                    for g2 in &sets[j][k] {
                        let composed = f.compose(g2)?;
                        if !sets[i][k].contains(&composed) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{derive_seed, sample_graph};

    fn graph(text: &str) -> BipartiteGraph {
        text.parse().unwrap()
    }

    #[test]
    fn identity_on_equal_graphs_is_bottom_class() {
        let g = graph("2 2\n10\n00\n");
        let f = SidedMap::identity(2, 2);
        assert_eq!(oracle_class(&f, &g, &g).unwrap(), ReductClass::AutStar);
    }

    #[test]
    fn global_exchange_is_bottom_class() {
        let g = graph("2 2\n10\n00\n");
        let h = g.flip_all();
        let f = SidedMap::identity(2, 2);
        assert_eq!(oracle_class(&f, &g, &h).unwrap(), ReductClass::AutStar);
    }

    #[test]
    fn left_switched_rigid_graph_is_left_class() {
        let g = graph("2 2\n10\n00\n");
        let p = SwitchPattern::new(vec![true, false], vec![false, false]);
        let h = apply_switch(&g, &p).unwrap();
        let f = SidedMap::identity(2, 2);
        assert_eq!(oracle_class(&f, &g, &h).unwrap(), ReductClass::SL);
    }

    #[test]
    fn single_cell_flip_is_top_class() {
        let g = graph("2 2\n10\n00\n");
        let h = graph("2 2\n00\n00\n");
        let f = SidedMap::identity(2, 2);
        assert_eq!(oracle_class(&f, &g, &h).unwrap(), ReductClass::Sym);
    }

    #[test]
    fn oracle_rejects_oversized_and_misfit_inputs() {
        let g = sample_graph(5, 2, 1).unwrap();
        let f = SidedMap::identity(5, 2);
        assert!(matches!(
            oracle_class(&f, &g, &g),
            Err(Error::TooLarge(_))
        ));
        let g = graph("2 2\n10\n00\n");
        let h = graph("2 1\n1\n0\n");
        let f = SidedMap::identity(2, 2);
        assert!(matches!(
            oracle_class(&f, &g, &h),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn oracle_matches_classifier_on_spot_checks() {
        // Random 3x3 pairs with random bijections: the two independent
        // definitions must agree map by map.
        let perms = permutations(3);
        for i in 0..40 {
            let g = sample_graph(3, 3, derive_seed(901, i)).unwrap();
            let h = sample_graph(3, 3, derive_seed(902, i)).unwrap();
            let pl = &perms[(i as usize * 7) % 6];
            let pr = &perms[(i as usize * 11) % 6];
            let f = SidedMap::new(pl.clone(), pr.clone(), 3, 3).unwrap();
            let from_oracle = oracle_class(&f, &g, &h).unwrap();
            let from_classifier = classify(&flip_matrix(&f, &g, &h).unwrap());
            assert_eq!(from_oracle, from_classifier, "pair {}", i);
        }
    }

    #[test]
    fn mask_order_is_lattice_compatible() {
        assert_eq!(SideMask::ALL[0].class(), ReductClass::AutStar);
        assert_eq!(SideMask::ALL[3].class(), ReductClass::SLR);
        assert!(SideMask::Left.allows(Side::L));
        assert!(!SideMask::Left.allows(Side::R));
        assert!(SideMask::Both.allows(Side::R));
        assert!(!SideMask::Neither.allows(Side::L));
        assert_eq!(format!("{} {} {} {}", SideMask::Neither, SideMask::Left, SideMask::Right, SideMask::Both), "- L R LR");
    }

    #[test]
    fn matched_masks_are_upward_closed() {
        for i in 0..12 {
            let g = sample_graph(2, 2, derive_seed(903, i)).unwrap();
            let h = sample_graph(2, 2, derive_seed(904, i)).unwrap();
            let f = SidedMap::identity(2, 2);
            let hit: Vec<bool> = SideMask::ALL
                .iter()
                .map(|&m| matches_mask(&f, &g, &h, m).unwrap())
                .collect();
            // Neither ⊆ Left/Right ⊆ Both in matching power.
            if hit[0] {
                assert!(hit[1] && hit[2] && hit[3]);
            }
            if hit[1] || hit[2] {
                assert!(hit[3]);
            }
        }
    }

    #[test]
    fn full_sweep_at_one_by_one_agrees() {
        let report = verify_equivalence(1, 1).unwrap();
        assert_eq!(report.total_maps, 4);
        assert!(report.agreement());
        // Every pair of single-cell graphs is related by identity or
        // exchange, so everything sits in the bottom class.
        assert_eq!(report.oracle_counts.aut_star, 4);
        assert_eq!(report.oracle_counts, report.classifier_counts);
    }

    #[test]
    fn full_sweep_at_two_by_one_has_no_right_classes() {
        let report = verify_equivalence(2, 1).unwrap();
        assert!(report.agreement());
        assert_eq!(report.oracle_counts.s_r, 0);
        assert_eq!(report.oracle_counts.s_lr, 0);
        assert_eq!(report.oracle_counts.sym, 0);
        assert_eq!(report.total_maps, 16 * 2);
        assert!(report.oracle_counts.s_l > 0);
    }

    #[test]
    fn sweep_rejects_oversized_sides() {
        assert!(matches!(verify_equivalence(4, 1), Err(Error::TooLarge(_))));
        assert!(matches!(verify_equivalence(0, 2), Err(Error::ZeroSide)));
    }

    #[test]
    fn all_five_classes_appear_at_three_by_three() {
        let mut seen = ClassCounts::default();
        let perms = permutations(3);
        'outer: for i in 0..200 {
            let g = sample_graph(3, 3, derive_seed(905, 2 * i)).unwrap();
            let h = sample_graph(3, 3, derive_seed(905, 2 * i + 1)).unwrap();
            for pl in &perms {
                for pr in &perms {
                    let f = SidedMap::new(pl.clone(), pr.clone(), 3, 3).unwrap();
                    seen.bump(oracle_class(&f, &g, &h).unwrap());
                }
            }
            if ReductClass::ALL.iter().all(|&c| seen.get(c) > 0) {
                break 'outer;
            }
        }
        for class in ReductClass::ALL {
            assert!(seen.get(class) > 0, "missing {}", class);
        }
    }

    #[test]
    fn closure_holds_for_rigid_graph_under_all_masks() {
        let g = graph("2 2\n10\n00\n");
        for mask in SideMask::ALL {
            assert!(group_closure_check(&g, mask).unwrap(), "mask {}", mask);
        }
    }

    #[test]
    fn closure_holds_for_symmetric_graph_under_both_sides() {
        let g = graph("2 2\n10\n01\n");
        assert!(group_closure_check(&g, SideMask::Both).unwrap());
        assert!(group_closure_check(&g, SideMask::Neither).unwrap());
    }

    #[test]
    fn closure_rejects_oversized_graph() {
        let g = sample_graph(4, 2, 3).unwrap();
        assert!(matches!(
            group_closure_check(&g, SideMask::Both),
            Err(Error::TooLarge(_))
        ));
    }
}
