//! Subshifts of finite type and their combinatorics: admissible words,
//! periodic orbits, higher-block recodings and strongly connected components.

use crate::error::{Error, Result};

pub type Symbol = u8;

/// A subshift of finite type over the alphabet `{0..n-1}`.
///
/// Always bi-infinitely extendable: construction trims symbols without
/// incoming or outgoing transitions until a fixpoint is reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    n: usize,
    transitions: Vec<Vec<bool>>,
}

/// Result of [`Sft::validate`]: the trimmed system plus the surviving and
/// deleted symbols of the original alphabet.
#[derive(Debug, Clone)]
pub struct TrimmedSft {
    pub sft: Sft,
    /// Original labels of the surviving symbols, in order.
    pub kept: Vec<Symbol>,
    /// Original labels of the deleted symbols.
    pub deleted: Vec<Symbol>,
}

impl Sft {
    /// Trim `matrix` to a bi-infinitely extendable system, deleting symbols
    /// with no in- or out-edges until a fixpoint.
    pub fn validate(matrix: &[Vec<bool>]) -> Result<TrimmedSft> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        for row in matrix {
            if row.len() != n {
                return Err(Error::Config(format!(
                    "transition matrix row length {} != {}",
                    row.len(),
                    n
                )));
            }
        }
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for a in 0..n {
                if !alive[a] {
                    continue;
                }
                let has_out = (0..n).any(|b| alive[b] && matrix[a][b]);
                let has_in = (0..n).any(|b| alive[b] && matrix[b][a]);
                if !has_out || !has_in {
                    alive[a] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let kept: Vec<Symbol> = (0..n).filter(|&a| alive[a]).map(|a| a as Symbol).collect();
        if kept.is_empty() {
            return Err(Error::EmptySystem);
        }
        let deleted: Vec<Symbol> = (0..n).filter(|&a| !alive[a]).map(|a| a as Symbol).collect();
        let m = kept.len();
        let transitions = (0..m)
            .map(|i| (0..m).map(|j| matrix[kept[i] as usize][kept[j] as usize]).collect())
            .collect();
        Ok(TrimmedSft {
            sft: Sft { n: m, transitions },
            kept,
            deleted,
        })
    }

    /// Full shift on `n` symbols.
    pub fn full_shift(n: usize) -> Sft {
        assert!(n >= 1);
        Sft {
            n,
            transitions: vec![vec![true; n]; n],
        }
    }

    /// Build from a 0/1 matrix, trimming as needed; panics on empty systems.
    /// Convenience for tests and fixed model setups.
    pub fn from_matrix(rows: &[&[u8]]) -> Sft {
        let matrix: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect();
        Sft::validate(&matrix).expect("nonempty system").sft
    }

    pub fn symbol_count(&self) -> usize {
        self.n
    }

    pub fn admissible_pair(&self, a: Symbol, b: Symbol) -> bool {
        self.transitions[a as usize][b as usize]
    }

    pub fn admissible_word(&self, symbols: &[Symbol]) -> bool {
        !symbols.is_empty()
            && symbols.iter().all(|&a| (a as usize) < self.n)
            && symbols.windows(2).all(|p| self.admissible_pair(p[0], p[1]))
    }

    /// The subshift with all transitions reversed (transpose matrix).
    /// Reversed words of this system are exactly the words of the original.
    pub fn reversed(&self) -> Sft {
        let transitions = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.transitions[j][i]).collect())
            .collect();
        Sft {
            n: self.n,
            transitions,
        }
    }
}

/// A finite admissible word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn new(sft: &Sft, symbols: Vec<Symbol>) -> Result<Word> {
        if !sft.admissible_word(&symbols) {
            return Err(Error::InadmissibleWord(format!("{:?}", symbols)));
        }
        Ok(Word(symbols))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &a in &self.0 {
            write!(f, "{}", a)?;
        }
        Ok(())
    }
}

/// All admissible words of length `k`, in lexicographic order.
pub fn enumerate_words(sft: &Sft, k: usize) -> Vec<Word> {
    assert!(k >= 1);
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Symbol>> = (0..sft.symbol_count() as Symbol).rev().map(|a| vec![a]).collect();
    while let Some(w) = stack.pop() {
        if w.len() == k {
            out.push(Word(w));
            continue;
        }
        let last = *w.last().unwrap();
        for b in (0..sft.symbol_count() as Symbol).rev() {
            if sft.admissible_pair(last, b) {
                let mut w2 = w.clone();
                w2.push(b);
                stack.push(w2);
            }
        }
    }
    out
}

/// A primitive periodic orbit, stored as the least rotation of its cycle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeriodicOrbit {
    pub cycle: Word,
}

impl PeriodicOrbit {
    pub fn period(&self) -> usize {
        self.cycle.len()
    }
}

fn least_rotation(w: &[Symbol]) -> Vec<Symbol> {
    let p = w.len();
    (0..p)
        .map(|i| {
            let mut r = Vec::with_capacity(p);
            r.extend_from_slice(&w[i..]);
            r.extend_from_slice(&w[..i]);
            r
        })
        .min()
        .unwrap()
}

fn is_primitive(w: &[Symbol]) -> bool {
    let p = w.len();
    for d in 1..p {
        if p % d == 0 && w.chunks(d).all(|c| c == &w[..d]) {
            return false;
        }
    }
    true
}

/// All primitive cycles of period `<= max_period`, deduplicated up to
/// rotation, ordered by period then lexicographically.
pub fn periodic_orbits(sft: &Sft, max_period: usize) -> Vec<PeriodicOrbit> {
    assert!(max_period >= 1);
    let mut out = Vec::new();
    for p in 1..=max_period {
        for w in enumerate_words(sft, p) {
            let s = w.symbols();
            if !sft.admissible_pair(s[p - 1], s[0]) {
                continue;
            }
            if !is_primitive(s) {
                continue;
            }
            if least_rotation(s) != s {
                continue;
            }
            out.push(PeriodicOrbit { cycle: w });
        }
    }
    out
}

/// Higher-block presentation: vertices are admissible words of length
/// `width`, edges follow `width - 1` symbol overlaps.
#[derive(Debug, Clone)]
pub struct BlockGraph {
    pub width: usize,
    pub vertices: Vec<Word>,
    /// Out-edges as sorted vertex indices.
    pub edges: Vec<Vec<usize>>,
}

impl BlockGraph {
    pub fn vertex_index(&self, w: &Word) -> Option<usize> {
        self.vertices.binary_search(w).ok()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// Recode `sft` as the block graph of width `w`.
pub fn higher_block(sft: &Sft, w: usize) -> BlockGraph {
    assert!(w >= 1);
    let vertices = enumerate_words(sft, w);
    let mut edges = Vec::with_capacity(vertices.len());
    for u in &vertices {
        let mut out = Vec::new();
        let s = u.symbols();
        for b in 0..sft.symbol_count() as Symbol {
            if !sft.admissible_pair(s[w - 1], b) {
                continue;
            }
            let mut v = s[1..].to_vec();
            v.push(b);
            if let Ok(i) = vertices.binary_search(&Word(v)) {
                out.push(i);
            }
        }
        edges.push(out);
    }
    BlockGraph {
        width: w,
        vertices,
        edges,
    }
}

/// One strongly connected component of a masked block graph.
#[derive(Debug, Clone)]
pub struct Component {
    /// Sorted vertex indices into the graph's vertex list.
    pub vertex_ids: Vec<usize>,
    /// True iff the component contains an internal edge cycle.
    pub nontrivial: bool,
}

/// Tarjan SCC over the masked vertex set, components ordered by least
/// contained vertex index.
pub fn scc_decompose(graph: &BlockGraph, mask: &[bool]) -> Vec<Component> {
    assert_eq!(mask.len(), graph.vertex_count());
    let n = graph.vertex_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut comps: Vec<Vec<usize>> = Vec::new();

    // Iterative Tarjan: frames carry (vertex, next-edge position).
    for root in 0..n {
        if !mask[root] || index[root] != usize::MAX {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut ei)) = frames.last_mut() {
            if *ei == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let mut advanced = false;
            while *ei < graph.edges[v].len() {
                let w = graph.edges[v][*ei];
                *ei += 1;
                if !mask[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    frames.push((w, 0));
                    advanced = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if advanced {
                continue;
            }
            // v finished
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
            frames.pop();
            if let Some(&mut (parent, _)) = frames.last_mut() {
                low[parent] = low[parent].min(low[v]);
            }
        }
    }

    comps.sort_by_key(|c| c[0]);
    comps
        .into_iter()
        .map(|vertex_ids| {
            let nontrivial = vertex_ids.len() > 1
                || graph.edges[vertex_ids[0]].contains(&vertex_ids[0]);
            Component {
                vertex_ids,
                nontrivial,
            }
        })
        .collect()
}

/// Restrict `mask` to vertices that keep both an in- and an out-edge inside
/// the mask, iterating to a fixpoint (bi-infinite extendability).
pub fn trim_mask(graph: &BlockGraph, mask: &[bool]) -> Vec<bool> {
    let n = graph.vertex_count();
    let mut alive = mask.to_vec();
    loop {
        let mut changed = false;
        let mut has_in = vec![false; n];
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            for &w in &graph.edges[v] {
                if alive[w] {
                    has_in[w] = true;
                }
            }
        }
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let has_out = graph.edges[v].iter().any(|&w| alive[w]);
            if !has_out || !has_in[v] {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> Sft {
        Sft::from_matrix(&[&[1, 1], &[1, 0]])
    }

    #[test]
    fn validate_full_shift_unchanged() {
        let t = Sft::validate(&vec![vec![true, true], vec![true, true]]).unwrap();
        assert_eq!(t.sft.symbol_count(), 2);
        assert!(t.deleted.is_empty());
    }

    #[test]
    fn validate_trims_dead_symbol() {
        let t = Sft::validate(&vec![vec![true, true], vec![false, false]]).unwrap();
        assert_eq!(t.sft.symbol_count(), 1);
        assert_eq!(t.deleted, vec![1]);
        assert!(t.sft.admissible_pair(0, 0));
    }

    #[test]
    fn validate_empty_system() {
        let r = Sft::validate(&vec![vec![false, true], vec![false, false]]);
        assert!(matches!(r, Err(Error::EmptySystem)));
    }

    #[test]
    fn enumerate_full_shift() {
        let s = Sft::full_shift(2);
        let w2 = enumerate_words(&s, 2);
        assert_eq!(
            w2,
            vec![Word(vec![0, 0]), Word(vec![0, 1]), Word(vec![1, 0]), Word(vec![1, 1])]
        );
        assert_eq!(enumerate_words(&s, 1).len(), 2);
    }

    #[test]
    fn enumerate_golden_mean() {
        assert_eq!(enumerate_words(&golden_mean(), 3).len(), 5);
    }

    #[test]
    fn transfer_matrix_identity() {
        // #words(k) == 1^T B^{k-1} 1, exact in u64.
        for sft in [Sft::full_shift(2), golden_mean(), Sft::full_shift(3)] {
            let n = sft.symbol_count();
            let mut pow = vec![vec![0u64; n]; n];
            for (i, row) in pow.iter_mut().enumerate() {
                row[i] = 1;
            }
            for k in 1..=12usize {
                let total: u64 = pow.iter().flatten().sum();
                assert_eq!(enumerate_words(&sft, k).len() as u64, total, "k={}", k);
                let mut next = vec![vec![0u64; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        for l in 0..n {
                            if sft.admissible_pair(j as Symbol, l as Symbol) {
                                next[i][l] += pow[i][j];
                            }
                        }
                    }
                }
                pow = next;
            }
        }
    }

    #[test]
    fn orbits_full_shift() {
        let s = Sft::full_shift(2);
        let o = periodic_orbits(&s, 2);
        let cycles: Vec<_> = o.iter().map(|p| p.cycle.symbols().to_vec()).collect();
        assert_eq!(cycles, vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn orbits_golden_mean() {
        let o = periodic_orbits(&golden_mean(), 2);
        let cycles: Vec<_> = o.iter().map(|p| p.cycle.symbols().to_vec()).collect();
        assert_eq!(cycles, vec![vec![0], vec![0, 1]]);
    }

    #[test]
    fn orbits_period_one_are_fixed_symbols() {
        let o = periodic_orbits(&golden_mean(), 1);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].cycle.symbols(), &[0]);
    }

    #[test]
    fn orbits_no_rotation_duplicates() {
        let o = periodic_orbits(&Sft::full_shift(2), 6);
        for (i, a) in o.iter().enumerate() {
            for b in o.iter().skip(i + 1) {
                if a.period() == b.period() {
                    assert_ne!(
                        least_rotation(a.cycle.symbols()),
                        least_rotation(b.cycle.symbols())
                    );
                }
            }
        }
    }

    #[test]
    fn orbit_self_concatenation_admissible() {
        for sft in [Sft::full_shift(2), golden_mean()] {
            for o in periodic_orbits(&sft, 5) {
                let mut doubled = o.cycle.symbols().to_vec();
                doubled.extend_from_slice(o.cycle.symbols());
                assert!(sft.admissible_word(&doubled));
            }
        }
    }

    #[test]
    fn higher_block_width_one_matches_sft() {
        let s = golden_mean();
        let g = higher_block(&s, 1);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges[0], vec![0, 1]);
        assert_eq!(g.edges[1], vec![0]);
    }

    #[test]
    fn higher_block_full_shift_w2() {
        let g = higher_block(&Sft::full_shift(2), 2);
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edges.iter().map(Vec::len).sum::<usize>(), 8);
    }

    #[test]
    fn higher_block_golden_mean_w2() {
        let g = higher_block(&golden_mean(), 2);
        let names: Vec<String> = g.vertices.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, vec!["00", "01", "10"]);
        let mut edge_pairs = Vec::new();
        for (u, outs) in g.edges.iter().enumerate() {
            for &v in outs {
                edge_pairs.push((names[u].clone(), names[v].clone()));
            }
        }
        edge_pairs.sort();
        assert_eq!(edge_pairs.len(), 5);
        assert!(edge_pairs.contains(&("00".into(), "00".into())));
        assert!(edge_pairs.contains(&("00".into(), "01".into())));
        assert!(edge_pairs.contains(&("01".into(), "10".into())));
        assert!(edge_pairs.contains(&("10".into(), "00".into())));
        assert!(edge_pairs.contains(&("10".into(), "01".into())));
    }

    #[test]
    fn scc_full_shift_single_component() {
        let g = higher_block(&Sft::full_shift(2), 1);
        let comps = scc_decompose(&g, &[true, true]);
        assert_eq!(comps.len(), 1);
        assert!(comps[0].nontrivial);
        assert_eq!(comps[0].vertex_ids, vec![0, 1]);
    }

    #[test]
    fn scc_masked_self_loop() {
        let g = higher_block(&Sft::full_shift(2), 1);
        let comps = scc_decompose(&g, &[true, false]);
        assert_eq!(comps.len(), 1);
        assert!(comps[0].nontrivial);
        assert_eq!(comps[0].vertex_ids, vec![0]);
    }

    #[test]
    fn scc_golden_mean_two_cycle() {
        let g = higher_block(&golden_mean(), 2);
        // mask {01, 10}
        let mask: Vec<bool> = g.vertices.iter().map(|w| w.to_string() != "00").collect();
        let comps = scc_decompose(&g, &mask);
        assert_eq!(comps.len(), 1);
        assert!(comps[0].nontrivial);
        assert_eq!(comps[0].vertex_ids.len(), 2);
    }

    #[test]
    fn irreducible_higher_block_is_one_scc() {
        for w in 1..=3 {
            let g = higher_block(&golden_mean(), w);
            let comps = scc_decompose(&g, &vec![true; g.vertex_count()]);
            assert_eq!(comps.len(), 1);
            assert!(comps[0].nontrivial);
            assert_eq!(comps[0].vertex_ids.len(), g.vertex_count());
        }
    }

    #[test]
    fn trim_mask_removes_dead_ends() {
        let g = higher_block(&Sft::full_shift(2), 2);
        // keep 00 and 01 only; 01 has no out-edge inside the mask
        let mask: Vec<bool> = g
            .vertices
            .iter()
            .map(|w| matches!(w.to_string().as_str(), "00" | "01"))
            .collect();
        let trimmed = trim_mask(&g, &mask);
        let alive: Vec<String> = g
            .vertices
            .iter()
            .zip(&trimmed)
            .filter(|(_, &a)| a)
            .map(|(w, _)| w.to_string())
            .collect();
        assert_eq!(alive, vec!["00"]);
    }
}
