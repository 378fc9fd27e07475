//! Winning graph between pursuers and evaders, maximum matching, and the
//! assignment of leftover pursuers.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{certify_win_with_tol, Certificate};
use crate::error::Result;
use crate::evasion::check_sc;
use crate::geometry::Vec2;
use crate::model::{GameParams, JointState, MotionKind};

/// Pursuer index to evader index, zero-based.
pub type Matching = BTreeMap<usize, usize>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinGraph {
    pub n_pursuers: usize,
    pub n_evaders: usize,
    /// Every stored certificate is a win.
    pub edges: BTreeMap<(usize, usize), Certificate>,
}

impl WinGraph {
    pub fn empty(n_pursuers: usize, n_evaders: usize) -> Self {
        Self {
            n_pursuers,
            n_evaders,
            edges: BTreeMap::new(),
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i, j))
    }

    /// Evader lists per pursuer, ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_pursuers];
        for &(i, j) in self.edges.keys() {
            adj[i].push(j);
        }
        adj
    }
}

/// One candidate pair handed to [`build_graph`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairInput {
    pub pursuer: usize,
    pub evader: usize,
    pub state: JointState,
    pub params: GameParams,
    pub motion: MotionKind,
}

/// Certificate for one pair; simple-motion pursuers win exactly under separation.
pub fn certify_pair(pair: &PairInput, io_tol: f64) -> Result<Certificate> {
    let mut cert = certify_win_with_tol(&pair.state, &pair.params, io_tol)?;
    if pair.motion == MotionKind::Simple {
        cert.kind = if check_sc(&pair.state, &pair.params)? {
            crate::certificates::CertificateKind::Theorem1
        } else {
            crate::certificates::CertificateKind::None
        };
    }
    Ok(cert)
}

/// Certifies every listed pair in parallel; an edge exists iff the certificate is a win.
pub fn build_graph(n_pursuers: usize, n_evaders: usize, pairs: &[PairInput], io_tol: f64) -> Result<WinGraph> {
    let certs: Vec<Result<Certificate>> = pairs.par_iter().map(|p| certify_pair(p, io_tol)).collect();
    let mut g = WinGraph::empty(n_pursuers, n_evaders);
    for (pair, cert) in pairs.iter().zip(certs) {
        let cert = cert?;
        if cert.is_win() {
            g.edges.insert((pair.pursuer, pair.evader), cert);
        }
    }
    Ok(g)
}

fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].map_or(true, |k| augment(k, adj, seen, owner)) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

/// Maximum-cardinality matching by augmenting paths, pursuers and evaders in ascending order.
pub fn max_matching_adj(n_evaders: usize, adj: &[Vec<usize>], fixed: &Matching) -> Matching {
    let mut owner: Vec<Option<usize>> = vec![None; n_evaders];
    for (&i, &j) in fixed {
        owner[j] = Some(i);
    }
    let mut blocked = vec![false; n_evaders];
    for &j in fixed.values() {
        blocked[j] = true;
    }
    let free_adj: Vec<Vec<usize>> = adj
        .iter()
        .enumerate()
        .map(|(i, js)| {
            if fixed.contains_key(&i) {
                Vec::new()
            } else {
                js.iter().copied().filter(|&j| !blocked[j]).collect()
            }
        })
        .collect();
    for i in 0..adj.len() {
        if fixed.contains_key(&i) {
            continue;
        }
        let mut seen = blocked.clone();
        augment(i, &free_adj, &mut seen, &mut owner);
    }
    owner
        .iter()
        .enumerate()
        .filter_map(|(j, o)| o.map(|i| (i, j)))
        .collect()
}

pub fn max_matching(g: &WinGraph) -> Matching {
    max_matching_adj(g.n_evaders, &g.adjacency(), &Matching::new())
}

/// Keeps previous pairs whose edge survives, then matches the residual graph.
pub fn sticky_matching(g: &WinGraph, previous: &Matching) -> Matching {
    let kept: Matching = previous
        .iter()
        .filter(|(&i, &j)| g.has_edge(i, j))
        .map(|(&i, &j)| (i, j))
        .collect();
    max_matching_adj(g.n_evaders, &g.adjacency(), &kept)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub matched: Matching,
    /// Targets of pursuers left out of the matching.
    pub opportunistic: BTreeMap<usize, usize>,
    /// Some unmatched pursuer found no unmatched evader and chases a matched one.
    pub fallback: bool,
}

impl Assignment {
    pub fn target(&self, pursuer: usize) -> Option<usize> {
        self.matched
            .get(&pursuer)
            .or_else(|| self.opportunistic.get(&pursuer))
            .copied()
    }

    pub fn is_matched(&self, pursuer: usize) -> bool {
        self.matched.contains_key(&pursuer)
    }
}

fn nearest(from: Vec2, candidates: impl Iterator<Item = (usize, Vec2)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, pos) in candidates {
        let d = from.distance(pos);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best.map(|(j, _)| j)
}

/// Completes a matching: unmatched pursuers take the nearest unmatched active
/// evader, lowest index on ties.
///
/// `evaders[j]` is `None` for inactive evaders.
pub fn assign(m: &Matching, pursuers: &[Vec2], evaders: &[Option<Vec2>]) -> Assignment {
    let mut out = Assignment {
        matched: m.clone(),
        ..Default::default()
    };
    let mut taken = vec![false; evaders.len()];
    for &j in m.values() {
        taken[j] = true;
    }
    let active = || evaders.iter().enumerate().filter_map(|(j, e)| e.map(|p| (j, p)));
    for (i, &pos) in pursuers.iter().enumerate() {
        if m.contains_key(&i) {
            continue;
        }
        if let Some(j) = nearest(pos, active().filter(|(j, _)| !taken[*j])) {
            out.opportunistic.insert(i, j);
        } else if let Some(j) = nearest(pos, active()) {
            out.opportunistic.insert(i, j);
            out.fallback = true;
        }
    }
    out
}
