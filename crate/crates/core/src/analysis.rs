//! Staged decomposition of a side-preserving map into an optional global
//! exchange plus single-vertex switches, each step witnessed on an m×n
//! block, with an independent verifier for the produced traces.
//!
//! The pipeline: compute the map's flip matrix, find a uniform core (an m×n
//! all-equal block), read the global prefix off the core's polarity, then
//! peel every remaining vertex in canonical order (left side ascending, then
//! right side ascending), emitting one stage per vertex whose kind is
//! determined by the decomposed pattern bit re-anchored at the core.

use std::fmt;

use crate::classify::preserves_2x2_parity;
use crate::error::Error;
use crate::graph::{BipartiteGraph, Side, SidedMap, VertexRef};
use crate::switch::{flip_matrix, FlipMatrix};

/// Whether a uniform core consists of agreeing entries (`Preserved`, all
/// zero: cross-types kept) or disagreeing ones (`Flipped`, all one:
/// cross-types exchanged).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Preserved,
    Flipped,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Preserved => write!(f, "PRESERVED"),
            Polarity::Flipped => write!(f, "FLIPPED"),
        }
    }
}

/// An m×n block of the flip matrix on which every entry is equal: `left`
/// rows × `right` columns (both ascending), all entries 0 (`Preserved`) or
/// all 1 (`Flipped`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformCore {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub polarity: Polarity,
}

impl fmt::Display for UniformCore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L: ")?;
        fmt_index_list(f, &self.left)?;
        write!(f, " ; R: ")?;
        fmt_index_list(f, &self.right)?;
        write!(f, " ; {}", self.polarity)
    }
}

fn fmt_index_list(f: &mut fmt::Formatter<'_>, set: &[usize]) -> fmt::Result {
    if set.is_empty() {
        return write!(f, "-");
    }
    for (k, i) in set.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", i)?;
    }
    Ok(())
}

/// Exact search for an m×n uniform block in `e`. All-zero (`Preserved`)
/// blocks are preferred over all-one (`Flipped`) ones; within a polarity the
/// row set is the lexicographically least workable one and the columns are
/// the first `n` compatible with it. `None` when no block of either
/// polarity exists, or when `m`/`n` is zero or exceeds the dimensions.
pub fn find_uniform_core(e: &FlipMatrix, m: usize, n: usize) -> Option<UniformCore> {
    if m == 0 || n == 0 || m > e.rows() || n > e.cols() {
        return None;
    }
    for polarity in [Polarity::Preserved, Polarity::Flipped] {
        let target = polarity == Polarity::Flipped;
        let mut chosen = Vec::with_capacity(m);
        let all_cols: Vec<usize> = (0..e.cols()).collect();
        if let Some((left, right)) = core_search(e, target, m, n, 0, &mut chosen, &all_cols) {
            return Some(UniformCore {
                left,
                right,
                polarity,
            });
        }
    }
    None
}

/// Backtracking over rows in ascending order; `live` holds the columns still
/// matching `target` on every chosen row. First solution found is the
/// lexicographically least row set.
fn core_search(
    e: &FlipMatrix,
    target: bool,
    m: usize,
    n: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    live: &[usize],
) -> Option<(Vec<usize>, Vec<usize>)> {
    if chosen.len() == m {
        return Some((chosen.clone(), live[..n].to_vec()));
    }
    let needed = m - chosen.len();
    for row in start..e.rows() {
        if e.rows() - row < needed {
            break;
        }
        let next: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&b| e.get(row, b) == target)
            .collect();
        if next.len() < n {
            continue;
        }
        chosen.push(row);
        if let Some(found) = core_search(e, target, m, n, row + 1, chosen, &next) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

/// Uniform core of the flip matrix of `f : g -> h`; see
/// [`find_uniform_core`]. Errors only when `f` does not fit the graphs.
pub fn find_uniform_subset(
    f: &SidedMap,
    g: &BipartiteGraph,
    h: &BipartiteGraph,
    m: usize,
    n: usize,
) -> Result<Option<UniformCore>, Error> {
    let e = flip_matrix(f, g, h)?;
    Ok(find_uniform_core(&e, m, n))
}

/// The step applied before any stages: nothing, or the exchange of all
/// cross-types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GlobalPrefix {
    Identity,
    Exchange,
}

impl fmt::Display for GlobalPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalPrefix::Identity => write!(f, "IDENTITY"),
            GlobalPrefix::Exchange => write!(f, "EXCHANGE"),
        }
    }
}

/// What a single stage does: nothing (the peeled vertex already agrees
/// everywhere on the witness) or a switch with respect to one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StageKind {
    Iso,
    SwitchVertex,
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageKind::Iso => write!(f, "ISO"),
            StageKind::SwitchVertex => write!(f, "SWITCH_VERTEX"),
        }
    }
}

/// One peeling step with its m×n witness block. `vertex` is present exactly
/// when the stage is a switch, and then lies inside the witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisStage {
    pub kind: StageKind,
    pub vertex: Option<VertexRef>,
    pub witness_left: Vec<usize>,
    pub witness_right: Vec<usize>,
}

impl fmt::Display for AnalysisStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(v) = self.vertex {
            write!(f, " {}", v)?;
        }
        write!(f, " ; witness L: ")?;
        fmt_index_list(f, &self.witness_left)?;
        write!(f, " R: ")?;
        fmt_index_list(f, &self.witness_right)
    }
}

/// A full staged decomposition: global prefix, ordered stages, and the
/// producer's own replay verdict. [`verify_trace`] recomputes the verdict
/// from scratch and does not trust `final_check`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisTrace {
    pub global_prefix: GlobalPrefix,
    pub stages: Vec<AnalysisStage>,
    pub final_check: bool,
}

impl AnalysisTrace {
    /// Number of switch stages (stages that actually change cross-types).
    pub fn switch_count(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| s.kind == StageKind::SwitchVertex)
            .count()
    }
}

impl fmt::Display for AnalysisTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "prefix: {}", self.global_prefix)?;
        for (i, stage) in self.stages.iter().enumerate() {
            writeln!(f, "stage {}: {}", i, stage)?;
        }
        write!(
            f,
            "final check: {}",
            if self.final_check { "pass" } else { "fail" }
        )
    }
}

/// Decompose `f : g -> h` into a staged trace using an m×n uniform core.
///
/// Requires `m, n > 2` and a domain of at least that size (`TooSmall`
/// otherwise, also when no uniform core of the requested size exists —
/// guaranteed present once both sides reach `2m-1` × `2n-1` for maps in the
/// two-sided switch class). Fails with `NotInSLR` when the flip
/// matrix contains an odd 2×2 submatrix.
pub fn mn_analysis(
    f: &SidedMap,
    g: &BipartiteGraph,
    h: &BipartiteGraph,
    m: usize,
    n: usize,
) -> Result<AnalysisTrace, Error> {
    if m <= 2 || n <= 2 {
        return Err(Error::TooSmall(format!(
            "analysis block must exceed 2 per side, got {}x{}",
            m, n
        )));
    }
    let e = flip_matrix(f, g, h)?;
    if e.rows() < m || e.cols() < n {
        return Err(Error::TooSmall(format!(
            "domain {}x{} smaller than analysis block {}x{}",
            e.rows(),
            e.cols(),
            m,
            n
        )));
    }
    if !preserves_2x2_parity(&e) {
        return Err(Error::NotInSLR);
    }
    let core = find_uniform_core(&e, m, n).ok_or_else(|| {
        Error::TooSmall(format!(
            "no uniform {}x{} block in the {}x{} flip matrix; enlarge the domain",
            m,
            n,
            e.rows(),
            e.cols()
        ))
    })?;

    let global_prefix = match core.polarity {
        Polarity::Preserved => GlobalPrefix::Identity,
        Polarity::Flipped => GlobalPrefix::Exchange,
    };
    let mut adjusted = e.clone();
    if global_prefix == GlobalPrefix::Exchange {
        adjusted.toggle_all();
    }
    // Re-anchored pattern bits: with the core forced to zero, a vertex's bit
    // can be read off any core row/column.
    let a0 = core.left[0];
    let b0 = core.right[0];

    let mut stages = Vec::new();
    for a in 0..adjusted.rows() {
        if core.left.binary_search(&a).is_ok() {
            continue;
        }
        let mut witness_left: Vec<usize> = core.left[..m - 1].to_vec();
        witness_left.push(a);
        witness_left.sort_unstable();
        stages.push(make_stage(
            adjusted.get(a, b0),
            VertexRef::left(a),
            witness_left,
            core.right.clone(),
        ));
    }
    for b in 0..adjusted.cols() {
        if core.right.binary_search(&b).is_ok() {
            continue;
        }
        let mut witness_right: Vec<usize> = core.right[..n - 1].to_vec();
        witness_right.push(b);
        witness_right.sort_unstable();
        stages.push(make_stage(
            adjusted.get(a0, b),
            VertexRef::right(b),
            core.left.clone(),
            witness_right,
        ));
    }

    let mut trace = AnalysisTrace {
        global_prefix,
        stages,
        final_check: false,
    };
    trace.final_check = verify_trace(&trace, f, g, h);
    Ok(trace)
}

fn make_stage(
    bit: bool,
    vertex: VertexRef,
    witness_left: Vec<usize>,
    witness_right: Vec<usize>,
) -> AnalysisStage {
    AnalysisStage {
        kind: if bit {
            StageKind::SwitchVertex
        } else {
            StageKind::Iso
        },
        vertex: bit.then_some(vertex),
        witness_left,
        witness_right,
    }
}

/// Independently check a trace against the map it claims to decompose:
/// witness blocks must share one m×n shape with more than 2 vertices per
/// side, each stage's local flip pattern must match its kind exactly on its
/// witness, switch vertices must be distinct and inside their witnesses, and
/// replaying prefix and switches must cancel the flip matrix completely.
/// Returns `false` on any violation, including maps that do not fit the
/// graphs; the trace's own `final_check` flag is ignored.
pub fn verify_trace(
    trace: &AnalysisTrace,
    f: &SidedMap,
    g: &BipartiteGraph,
    h: &BipartiteGraph,
) -> bool {
    let Ok(mut e) = flip_matrix(f, g, h) else {
        return false;
    };
    if trace.global_prefix == GlobalPrefix::Exchange {
        e.toggle_all();
    }

    let mut shape: Option<(usize, usize)> = None;
    let mut switched: Vec<VertexRef> = Vec::new();
    for stage in &trace.stages {
        let wl = &stage.witness_left;
        let wr = &stage.witness_right;
        match shape {
            None => {
                if wl.len() <= 2 || wr.len() <= 2 {
                    return false;
                }
                shape = Some((wl.len(), wr.len()));
            }
            Some(s) => {
                if s != (wl.len(), wr.len()) {
                    return false;
                }
            }
        }
        if !strictly_ascending_in(wl, e.rows()) || !strictly_ascending_in(wr, e.cols()) {
            return false;
        }
        match (stage.kind, stage.vertex) {
            (StageKind::Iso, None) => {
                if !block_matches(&e, wl, wr, None) {
                    return false;
                }
            }
            (StageKind::SwitchVertex, Some(v)) => {
                if switched.contains(&v) {
                    return false;
                }
                switched.push(v);
                let inside = match v.side {
                    Side::L => wl.binary_search(&v.index).is_ok(),
                    Side::R => wr.binary_search(&v.index).is_ok(),
                };
                if !inside || !block_matches(&e, wl, wr, Some(v)) {
                    return false;
                }
                match v.side {
                    Side::L => e.toggle_row(v.index),
                    Side::R => e.toggle_col(v.index),
                }
            }
            _ => return false,
        }
    }
    e.is_zero()
}

fn strictly_ascending_in(set: &[usize], bound: usize) -> bool {
    set.windows(2).all(|w| w[0] < w[1]) && set.last().is_none_or(|&x| x < bound)
}

/// The expected local pattern on a witness block: all zero for an identity
/// step, or exactly the peeled vertex's row/column set for a switch step.
fn block_matches(e: &FlipMatrix, wl: &[usize], wr: &[usize], v: Option<VertexRef>) -> bool {
    wl.iter().all(|&x| {
        wr.iter().all(|&y| {
            let expected = match v {
                None => false,
                Some(v) => match v.side {
                    Side::L => x == v.index,
                    Side::R => y == v.index,
                },
            };
            e.get(x, y) == expected
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::flip_from_rows;
    use crate::graph::find_isomorphisms;
    use crate::random::sample_graph;
    use crate::switch::{apply_switch, SwitchPattern};

    #[test]
    fn core_of_zero_matrix_is_full_prefix() {
        let e = FlipMatrix::zeros(4, 5);
        let core = find_uniform_core(&e, 3, 4).unwrap();
        assert_eq!(core.left, vec![0, 1, 2]);
        assert_eq!(core.right, vec![0, 1, 2, 3]);
        assert_eq!(core.polarity, Polarity::Preserved);
    }

    #[test]
    fn core_of_planted_pattern() {
        // left bits (0,0,1), right bits (1,0,0): entry = left XOR right.
        let lam = [false, false, true];
        let rho = [true, false, false];
        let e = FlipMatrix::from_fn(3, 3, |a, b| lam[a] ^ rho[b]);
        let core = find_uniform_core(&e, 2, 2).unwrap();
        assert_eq!(core.left, vec![0, 1]);
        assert_eq!(core.right, vec![1, 2]);
        assert_eq!(core.polarity, Polarity::Preserved);
    }

    #[test]
    fn core_absent_in_mixed_2x2() {
        let e = flip_from_rows(&[&[1, 0], &[0, 0]]);
        assert_eq!(find_uniform_core(&e, 2, 2), None);
        assert_eq!(find_uniform_core(&e, 3, 1), None);
        assert_eq!(find_uniform_core(&e, 0, 1), None);
    }

    #[test]
    fn preserved_core_preferred_over_flipped() {
        let e = flip_from_rows(&[&[1, 1], &[1, 1], &[0, 0]]);
        let core = find_uniform_core(&e, 1, 2).unwrap();
        assert_eq!((core.left.clone(), core.polarity), (vec![2], Polarity::Preserved));
        let all_ones = flip_from_rows(&[&[1, 1], &[1, 1]]);
        let core = find_uniform_core(&all_ones, 2, 2).unwrap();
        assert_eq!(core.polarity, Polarity::Flipped);
        assert_eq!(core.left, vec![0, 1]);
    }

    #[test]
    fn core_row_set_is_lexicographically_least() {
        // Rows 0 and 2 share zeros in columns {1,2}; rows 0,1 only in {2}.
        let e = flip_from_rows(&[&[1, 0, 0], &[1, 1, 0], &[0, 0, 0]]);
        let core = find_uniform_core(&e, 2, 2).unwrap();
        assert_eq!(core.left, vec![0, 2]);
        assert_eq!(core.right, vec![1, 2]);
    }

    #[test]
    fn uniform_subset_of_isomorphism_is_full_size() {
        let g: BipartiteGraph = "2 2\n10\n01\n".parse().unwrap();
        let h: BipartiteGraph = "2 2\n01\n10\n".parse().unwrap();
        let f = &find_isomorphisms(&g, &h)[0];
        let core = find_uniform_subset(f, &g, &h, 2, 2).unwrap().unwrap();
        assert_eq!(core.polarity, Polarity::Preserved);
        assert_eq!(core.left, vec![0, 1]);
    }

    #[test]
    fn analysis_of_identity_has_no_switch_stages() {
        let g = sample_graph(4, 4, 11).unwrap();
        let f = SidedMap::identity(4, 4);
        let trace = mn_analysis(&f, &g, &g, 3, 3).unwrap();
        assert_eq!(trace.global_prefix, GlobalPrefix::Identity);
        assert_eq!(trace.switch_count(), 0);
        assert_eq!(trace.stages.len(), 2);
        assert!(trace.final_check);
        assert!(verify_trace(&trace, &f, &g, &g));
    }

    #[test]
    fn analysis_of_global_exchange_uses_prefix() {
        let g = sample_graph(4, 4, 12).unwrap();
        let h = g.flip_all();
        let f = SidedMap::identity(4, 4);
        let trace = mn_analysis(&f, &g, &h, 3, 3).unwrap();
        assert_eq!(trace.global_prefix, GlobalPrefix::Exchange);
        assert_eq!(trace.switch_count(), 0);
        assert!(trace.final_check);
    }

    #[test]
    fn analysis_recovers_single_planted_switch() {
        let g = sample_graph(5, 5, 13).unwrap();
        let p = SwitchPattern::from_sets(5, 5, &[1], &[]).unwrap();
        let h = apply_switch(&g, &p).unwrap();
        let f = SidedMap::identity(5, 5);
        let trace = mn_analysis(&f, &g, &h, 3, 3).unwrap();
        assert_eq!(trace.global_prefix, GlobalPrefix::Identity);
        assert_eq!(trace.switch_count(), 1);
        let switch_stage = trace
            .stages
            .iter()
            .find(|s| s.kind == StageKind::SwitchVertex)
            .unwrap();
        assert_eq!(switch_stage.vertex, Some(VertexRef::left(1)));
        assert!(switch_stage.witness_left.contains(&1));
        assert_eq!(trace.stages.len(), 4);
        assert!(trace.final_check);
        assert!(verify_trace(&trace, &f, &g, &h));
    }

    #[test]
    fn analysis_rejects_odd_minor_maps() {
        let g = sample_graph(4, 4, 14).unwrap();
        let h = BipartiteGraph::from_fn(4, 4, |a, b| g.bit(a, b) ^ (a == 0 && b == 0)).unwrap();
        let f = SidedMap::identity(4, 4);
        assert_eq!(mn_analysis(&f, &g, &h, 3, 3), Err(Error::NotInSLR));
    }

    #[test]
    fn analysis_rejects_small_blocks_and_domains() {
        let g = sample_graph(4, 4, 15).unwrap();
        let f = SidedMap::identity(4, 4);
        assert!(matches!(
            mn_analysis(&f, &g, &g, 2, 3),
            Err(Error::TooSmall(_))
        ));
        assert!(matches!(
            mn_analysis(&f, &g, &g, 3, 5),
            Err(Error::TooSmall(_))
        ));
    }

    #[test]
    fn analysis_without_core_reports_too_small() {
        // One flipped row on a 3x3 domain: in the switch class, but no
        // constant 3x3 block exists.
        let g = sample_graph(3, 3, 16).unwrap();
        let p = SwitchPattern::from_sets(3, 3, &[0], &[]).unwrap();
        let h = apply_switch(&g, &p).unwrap();
        let f = SidedMap::identity(3, 3);
        assert!(matches!(
            mn_analysis(&f, &g, &h, 3, 3),
            Err(Error::TooSmall(_))
        ));
    }

    #[test]
    fn stage_count_matches_domain_minus_block() {
        let g = sample_graph(7, 6, 17).unwrap();
        let p = SwitchPattern::from_sets(7, 6, &[2, 5], &[4]).unwrap();
        let h = apply_switch(&g, &p).unwrap();
        let f = SidedMap::identity(7, 6);
        let trace = mn_analysis(&f, &g, &h, 3, 3).unwrap();
        assert_eq!(trace.stages.len(), (7 - 3) + (6 - 3));
        assert_eq!(trace.switch_count(), 3);
        assert!(trace.final_check);
        for stage in &trace.stages {
            if let Some(v) = stage.vertex {
                let w = match v.side {
                    Side::L => &stage.witness_left,
                    Side::R => &stage.witness_right,
                };
                assert!(w.contains(&v.index));
            }
        }
    }

    #[test]
    fn verify_rejects_tampered_vertex() {
        let g = sample_graph(6, 6, 18).unwrap();
        let p = SwitchPattern::from_sets(6, 6, &[4], &[]).unwrap();
        let h = apply_switch(&g, &p).unwrap();
        let f = SidedMap::identity(6, 6);
        let trace = mn_analysis(&f, &g, &h, 3, 3).unwrap();
        assert!(verify_trace(&trace, &f, &g, &h));

        let mut tampered = trace.clone();
        for stage in &mut tampered.stages {
            if stage.kind == StageKind::SwitchVertex {
                stage.vertex = Some(VertexRef::left(0));
            }
        }
        assert!(!verify_trace(&tampered, &f, &g, &h));

        let mut kind_flipped = trace.clone();
        let i = kind_flipped
            .stages
            .iter()
            .position(|s| s.kind == StageKind::Iso)
            .unwrap();
        kind_flipped.stages[i].kind = StageKind::SwitchVertex;
        assert!(!verify_trace(&kind_flipped, &f, &g, &h));
    }

    #[test]
    fn verify_rejects_empty_trace_on_non_isomorphism() {
        let g = sample_graph(4, 4, 19).unwrap();
        let p = SwitchPattern::from_sets(4, 4, &[1], &[]).unwrap();
        let h = apply_switch(&g, &p).unwrap();
        let f = SidedMap::identity(4, 4);
        let empty = AnalysisTrace {
            global_prefix: GlobalPrefix::Identity,
            stages: Vec::new(),
            final_check: true,
        };
        assert!(!verify_trace(&empty, &f, &g, &h));
    }

    #[test]
    fn verify_accepts_empty_trace_on_isomorphism() {
        let g = sample_graph(4, 4, 20).unwrap();
        let empty = AnalysisTrace {
            global_prefix: GlobalPrefix::Identity,
            stages: Vec::new(),
            final_check: false,
        };
        assert!(verify_trace(&empty, &SidedMap::identity(4, 4), &g, &g));
    }

    #[test]
    fn trace_display_is_line_per_stage() {
        let g = sample_graph(4, 4, 21).unwrap();
        let f = SidedMap::identity(4, 4);
        let trace = mn_analysis(&f, &g, &g, 3, 3).unwrap();
        let text = trace.to_string();
        assert!(text.starts_with("prefix: IDENTITY\n"));
        assert!(text.contains("stage 0: ISO ; witness L: "));
        assert!(text.ends_with("final check: pass"));
    }
}
