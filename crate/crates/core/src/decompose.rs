//! Data reduction with separators of size 0 and 1.
//!
//! Isolated and pendant nodes are peeled off repeatedly (an edge that ends in
//! a degree-1 node lies on no cycle), and what is left is cut at articulation
//! points into biconnected blocks. The frustration index is additive over the
//! blocks, and any optimal block colourings can be glued back together because
//! complementing a block's colouring does not change its frustration count.

use crate::graph::{Colouring, Sign, SignedGraph};

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub graph: SignedGraph,
    /// `nodes[k]` is the id in the original graph of piece node `k`.
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Peeled {
    node: usize,
    /// Remaining neighbour and the sign of the connecting edge.
    anchor: Option<(usize, Sign)>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    n: usize,
    pieces: Vec<Piece>,
    bridges: Vec<(usize, usize, Sign)>,
    peeled: Vec<Peeled>,
}

impl Decomposition {
    /// Biconnected pieces with at least one cycle; bridges are not listed.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Piece> {
        self.pieces
    }

    pub fn peeled_count(&self) -> usize {
        self.peeled.len()
    }

    /// Combines one colouring per piece into a colouring of the whole graph
    /// whose frustration count is the sum of the piece counts.
    pub fn lift(&self, piece_colourings: &[Colouring]) -> Colouring {
        assert_eq!(piece_colourings.len(), self.pieces.len(), "one colouring per piece");

        // every block (piece or bridge) as a list of (node, local colour)
        let mut blocks: Vec<Vec<(usize, bool)>> = self
            .pieces
            .iter()
            .zip(piece_colourings)
            .map(|(p, x)| p.nodes.iter().enumerate().map(|(k, &v)| (v, x.get(k))).collect())
            .collect();
        blocks.extend(
            self.bridges.iter().map(|&(u, v, s)| vec![(u, false), (v, s.is_negative())]),
        );

        let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (b, block) in blocks.iter().enumerate() {
            for &(v, _) in block {
                member_of[v].push(b);
            }
        }

        let mut colour: Vec<Option<bool>> = vec![None; self.n];
        let mut placed = vec![false; blocks.len()];
        for start in 0..blocks.len() {
            if placed[start] {
                continue;
            }
            placed[start] = true;
            let mut queue = vec![(start, false)];
            while let Some((b, flip)) = queue.pop() {
                for &(v, c) in &blocks[b] {
                    colour[v] = Some(c ^ flip);
                }
                for &(v, _) in &blocks[b] {
                    for &nb in &member_of[v] {
                        if placed[nb] {
                            continue;
                        }
                        placed[nb] = true;
                        let local = blocks[nb].iter().find(|(w, _)| *w == v).unwrap().1;
                        queue.push((nb, local != colour[v].unwrap()));
                    }
                }
            }
        }

        for p in self.peeled.iter().rev() {
            colour[p.node] = Some(match p.anchor {
                Some((w, sign)) => colour[w].unwrap_or(false) ^ sign.is_negative(),
                None => false,
            });
        }
        Colouring::new(colour.into_iter().map(|c| c.unwrap_or(false)).collect())
    }
}

pub fn decompose(g: &SignedGraph) -> Decomposition {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut peeled = Vec::new();
    let mut queue: Vec<usize> = (0..n).rev().filter(|&v| degree[v] <= 1).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] || degree[v] > 1 {
            continue;
        }
        alive[v] = false;
        let anchor = g.neighbours(v).iter().find(|inc| alive[inc.node]).map(|inc| (inc.node, inc.sign));
        if let Some((w, _)) = anchor {
            degree[w] -= 1;
            if degree[w] <= 1 {
                queue.push(w);
            }
        }
        degree[v] = 0;
        peeled.push(Peeled { node: v, anchor });
    }

    let mut pieces = Vec::new();
    let mut bridges = Vec::new();
    for block in biconnected_blocks(g, &alive) {
        if block.len() == 1 {
            let e = g.edge(block[0]);
            bridges.push((e.u, e.v, e.sign));
            continue;
        }
        let mut nodes: Vec<usize> = block.iter().flat_map(|&i| [g.edge(i).u, g.edge(i).v]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        pieces.push(Piece { graph: g.induced(&nodes), nodes });
    }
    pieces.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    bridges.sort_by_key(|&(u, v, _)| (u, v));
    Decomposition { n, pieces, bridges, peeled }
}

/// Edge sets of the biconnected blocks of the subgraph induced by `alive`.
fn biconnected_blocks(g: &SignedGraph, alive: &[bool]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = g.n();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();

    struct Frame {
        v: usize,
        via: usize,
        next: usize,
    }

    for root in 0..n {
        if !alive[root] || disc[root] != UNSEEN {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut stack = vec![Frame { v: root, via: UNSEEN, next: 0 }];
        while let Some(top) = stack.last_mut() {
            let v = top.v;
            if top.next < g.degree(v) {
                let inc = g.neighbours(v)[top.next];
                top.next += 1;
                if !alive[inc.node] || inc.edge == top.via {
                    continue;
                }
                let w = inc.node;
                if disc[w] == UNSEEN {
                    edge_stack.push(inc.edge);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push(Frame { v: w, via: inc.edge, next: 0 });
                } else if disc[w] < disc[v] {
                    edge_stack.push(inc.edge);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                let done = stack.pop().unwrap();
                if let Some(parent) = stack.last() {
                    let u = parent.v;
                    low[u] = low[u].min(low[done.v]);
                    if low[done.v] >= disc[u] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == done.via {
                                break;
                            }
                        }
                        block.sort_unstable();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}
