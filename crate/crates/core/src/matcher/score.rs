use super::intra::{build_intra, wrap_near, IntraTable, MatcherConfig, EPS};
use crate::minutiae::MinutiaeTemplate;

/// Grid geometry over `(beta1, beta2, d)`. Bins are a little wider than the
/// full tolerance window, so a query window meets at most two bins per axis.
#[derive(Debug, Clone, Copy)]
struct Grid {
    d_width: f64,
    b_width: f64,
    d_bins: usize,
    b_bins: usize,
}

impl Grid {
    fn new(cfg: &MatcherConfig) -> Self {
        let d_width = 2.0 * (cfg.td + EPS) + 1e-6;
        let b_width = 2.0 * (cfg.t_theta + EPS) + 1e-6;
        Self {
            d_width,
            b_width,
            d_bins: ((cfg.d_max + EPS) / d_width) as usize + 1,
            b_bins: ((360.0 / b_width) as usize).max(1),
        }
    }

    #[inline]
    fn d_bin(&self, d: f64) -> usize {
        // quotients here are non-negative, so truncation is floor
        ((d.max(0.0) / self.d_width) as usize).min(self.d_bins - 1)
    }

    #[inline]
    fn b_bin(&self, b: f64) -> usize {
        (((b + 180.0) / self.b_width) as usize).min(self.b_bins - 1)
    }

    #[inline]
    fn cell(&self, b1: usize, b2: usize, d: usize) -> usize {
        (b1 * self.b_bins + b2) * self.d_bins + d
    }

    fn cells(&self) -> usize {
        self.b_bins * self.b_bins * self.d_bins
    }

    /// One or two bins covering `b ± tol` on the circle.
    #[inline]
    fn b_span(&self, b: f64, tol: f64) -> ([usize; 2], usize) {
        let lo = self.b_bin(wrap_near(b - tol));
        let hi = self.b_bin(wrap_near(b + tol));
        if lo == hi {
            ([lo, lo], 1)
        } else {
            ([lo, hi], 2)
        }
    }
}

/// Template with its intra table and a search grid over the entries read
/// in both orientations. Reading `(i, j)` as `(j, i)` reverses the segment,
/// so the betas swap and shift by 180 degrees.
#[derive(Debug, Clone)]
pub struct PreparedTemplate {
    cfg: MatcherConfig,
    grid: Grid,
    directions: Vec<f64>,
    table: IntraTable,
    /// Cell `c` spans `cell_start[c]..cell_start[c + 1]` of the arrays
    /// below; distance bins of one beta cell are adjacent.
    cell_start: Vec<u32>,
    cell_d: Vec<f64>,
    cell_b1: Vec<f64>,
    cell_b2: Vec<f64>,
    /// first minutia, second minutia, table entry
    cell_ids: Vec<[u32; 3]>,
    /// Per entry of this template used as a probe: the cell ranges holding
    /// its candidates in any gallery prepared with the same configuration.
    queries: Vec<Query>,
}

#[derive(Debug, Clone, Copy)]
struct Query {
    d0: u16,
    d1: u16,
    n1: u8,
    n2: u8,
    b1: [u16; 2],
    b2: [u16; 2],
}

impl Query {
    fn new(grid: &Grid, d: f64, beta1: f64, beta2: f64, td: f64, tt: f64) -> Self {
        let (b1, n1) = grid.b_span(beta1, tt);
        let (b2, n2) = grid.b_span(beta2, tt);
        Self {
            d0: grid.d_bin(d - td) as u16,
            d1: grid.d_bin(d + td) as u16,
            n1: n1 as u8,
            n2: n2 as u8,
            b1: [b1[0] as u16, b1[1] as u16],
            b2: [b2[0] as u16, b2[1] as u16],
        }
    }
}

impl PreparedTemplate {
    pub fn new(t: &MinutiaeTemplate, cfg: &MatcherConfig) -> Self {
        let table = build_intra(t, cfg);
        let grid = Grid::new(cfg);
        let mut keyed: Vec<(u32, f64, f64, f64, [u32; 3])> = Vec::with_capacity(table.len() * 2);
        for (k, e) in table.entries.iter().enumerate() {
            let k = k as u32;
            let (r1, r2) = (wrap_near(e.beta2 + 180.0), wrap_near(e.beta1 + 180.0));
            for (b1, b2, ids) in [(e.beta1, e.beta2, [e.i, e.j, k]), (r1, r2, [e.j, e.i, k])] {
                let c = grid.cell(grid.b_bin(b1), grid.b_bin(b2), grid.d_bin(e.d)) as u32;
                keyed.push((c, e.d, b1, b2, ids));
            }
        }
        keyed.sort_by_key(|o| (o.0, o.4[2], o.4[0]));
        let mut cell_start = vec![0u32; grid.cells() + 1];
        for o in &keyed {
            cell_start[o.0 as usize + 1] += 1;
        }
        for c in 0..grid.cells() {
            cell_start[c + 1] += cell_start[c];
        }
        let (td, tt) = (cfg.td + EPS, cfg.t_theta + EPS);
        let queries = table.entries.iter().map(|e| Query::new(&grid, e.d, e.beta1, e.beta2, td, tt)).collect();
        Self {
            cfg: *cfg,
            grid,
            queries,
            directions: t.minutiae.iter().map(|m| m.direction.to_degrees()).collect(),
            table,
            cell_start,
            cell_d: keyed.iter().map(|o| o.1).collect(),
            cell_b1: keyed.iter().map(|o| o.2).collect(),
            cell_b2: keyed.iter().map(|o| o.3).collect(),
            cell_ids: keyed.iter().map(|o| o.4).collect(),
        }
    }

    pub fn table(&self) -> &IntraTable {
        &self.table
    }

    pub fn minutia_count(&self) -> usize {
        self.directions.len()
    }
}

/// Compatible entry pair: probe minutiae `pi, pj` correspond to gallery
/// minutiae `ga, gb`.
#[derive(Debug, Clone, Copy)]
struct Node {
    pi: u32,
    pj: u32,
    ga: u32,
    gb: u32,
    pe: u32,
    ge: u32,
    rot: f64,
}

impl Node {
    fn assoc(&self) -> [(u32, u32); 2] {
        [(self.pi, self.ga), (self.pj, self.gb)]
    }
}

/// `|wrap(a - b)| <= tol` for angles in `(-180, 180]`, without the wrap.
#[inline]
fn angle_close(a: f64, b: f64, tol: f64) -> bool {
    let x = (a - b).abs();
    (x <= tol) | (x >= 360.0 - tol)
}

fn compatible_nodes(probe: &PreparedTemplate, gallery: &PreparedTemplate, nodes: &mut Vec<Node>) {
    let cfg = &probe.cfg;
    let (td, tt) = (cfg.td + EPS, cfg.t_theta + EPS);
    let g = &gallery.grid;
    let same_grid = probe.cfg == gallery.cfg;
    for (pe, e) in probe.table.entries.iter().enumerate() {
        let q = if same_grid { probe.queries[pe] } else { Query::new(g, e.d, e.beta1, e.beta2, td, tt) };
        let (d0, d1) = (q.d0 as usize, q.d1 as usize);
        for &b1 in &q.b1[..q.n1 as usize] {
            for &b2 in &q.b2[..q.n2 as usize] {
                let lo = gallery.cell_start[g.cell(b1 as usize, b2 as usize, d0)] as usize;
                let hi = gallery.cell_start[g.cell(b1 as usize, b2 as usize, d1) + 1] as usize;
                let ds = &gallery.cell_d[lo..hi];
                let c1 = &gallery.cell_b1[lo..hi];
                let c2 = &gallery.cell_b2[lo..hi];
                let ids = &gallery.cell_ids[lo..hi];
                for k in 0..ds.len() {
                    let ok =
                        ((e.d - ds[k]).abs() <= td) & angle_close(e.beta1, c1[k], tt) & angle_close(e.beta2, c2[k], tt);
                    if !ok {
                        continue;
                    }
                    let [first, second, entry] = ids[k];
                    let r1 = wrap_near(gallery.directions[first as usize] - probe.directions[e.i as usize]);
                    let r2 = wrap_near(gallery.directions[second as usize] - probe.directions[e.j as usize]);
                    nodes.push(Node {
                        pi: e.i,
                        pj: e.j,
                        ga: first,
                        gb: second,
                        pe: pe as u32,
                        ge: entry,
                        rot: wrap_near(r1 + 0.5 * wrap_near(r2 - r1)),
                    });
                }
            }
        }
    }
}

/// Pairwise score between two prepared templates.
///
/// Every compatible entry pair implies two minutia associations. A cluster
/// is anchored on one association and on the rotation estimate `r` of a pair
/// containing it; its rotation window is `r ± t_rot / 2`, so members agree
/// on rotation within `t_rot`. It holds the pairs in the window that contain
/// the anchor, plus every pair in the window whose two associations both
/// occur among those. The score is the best cluster's `min(distinct probe
/// entries, distinct gallery entries)`.
///
/// Taking the maximum over all anchors and windows makes the result
/// independent of visiting order, symmetric in probe and gallery, and unable
/// to grow when minutiae are removed.
pub fn match_prepared(probe: &PreparedTemplate, gallery: &PreparedTemplate) -> u32 {
    if probe.minutia_count() < 2 || gallery.minutia_count() < 2 {
        return 0;
    }
    let mut nodes = Vec::new();
    compatible_nodes(probe, gallery, &mut nodes);
    if nodes.is_empty() {
        return 0;
    }
    let half = probe.cfg.t_rot / 2.0 + EPS;
    let (np, ng) = (probe.minutia_count(), gallery.minutia_count());
    let key = |(p, g): (u32, u32)| p as u64 * ng as u64 + g as u64;

    // (association, node) sorted by association: bucket by probe minutia,
    // then sort the small buckets
    let mut start = vec![0u32; np + 1];
    for n in &nodes {
        start[n.pi as usize + 1] += 1;
        start[n.pj as usize + 1] += 1;
    }
    for p in 0..np {
        start[p + 1] += start[p];
    }
    let mut fill = start.clone();
    let mut by_assoc = vec![(0u64, 0u32); nodes.len() * 2];
    for (k, n) in nodes.iter().enumerate() {
        for a in n.assoc() {
            let slot = &mut fill[a.0 as usize];
            by_assoc[*slot as usize] = (key(a), k as u32);
            *slot += 1;
        }
    }
    for p in 0..np {
        by_assoc[start[p] as usize..start[p + 1] as usize].sort_unstable();
    }
    let group_of = |k: u64| -> &[(u64, u32)] {
        let p = (k / ng as u64) as usize;
        let bucket = &by_assoc[start[p] as usize..start[p + 1] as usize];
        let lo = bucket.partition_point(|e| e.0 < k);
        let hi = lo + bucket[lo..].partition_point(|e| e.0 <= k);
        &bucket[lo..hi]
    };
    let mut groups: Vec<(u32, u32)> = Vec::new();
    let mut s = 0;
    while s < by_assoc.len() {
        let mut e = s + 1;
        while e < by_assoc.len() && by_assoc[e].0 == by_assoc[s].0 {
            e += 1;
        }
        groups.push((s as u32, e as u32));
        s = e;
    }
    // visiting the biggest anchor first lets the bound prune most others;
    // the order cannot change the maximum
    if let Some(i) = (0..groups.len()).max_by_key(|&i| (groups[i].1 - groups[i].0, std::cmp::Reverse(i))) {
        groups.swap(0, i);
    }
    let near = |rot: f64, r: f64| angle_close(rot, r, half);
    // entries of a cluster join two of its probe (and gallery) minutiae
    let pair_bound = |m: usize| (m * m.saturating_sub(1) / 2) as u64;

    let mut best = 1u32;
    let mut assocs: Vec<u64> = Vec::new();
    let mut pm: Vec<u32> = Vec::new();
    let mut gm: Vec<u32> = Vec::new();
    let mut pes: Vec<u32> = Vec::new();
    let mut ges: Vec<u32> = Vec::new();
    for &(s, e) in &groups {
        if pair_bound((e - s) as usize + 1) <= best as u64 {
            continue;
        }
        let anchor = by_assoc[s as usize].0;
        let group = &by_assoc[s as usize..e as usize];
        for &(_, c) in group {
            let r = nodes[c as usize].rot;
            assocs.clear();
            pm.clear();
            gm.clear();
            for &(_, v) in group {
                let n = &nodes[v as usize];
                if near(n.rot, r) {
                    for a in n.assoc() {
                        assocs.push(key(a));
                        pm.push(a.0);
                        gm.push(a.1);
                    }
                }
            }
            pm.sort_unstable();
            pm.dedup();
            gm.sort_unstable();
            gm.dedup();
            if pair_bound(pm.len().min(gm.len())) <= best as u64 {
                continue;
            }
            assocs.push(anchor);
            assocs.sort_unstable();
            assocs.dedup();
            pes.clear();
            ges.clear();
            for &a in &assocs {
                for &(_, v) in group_of(a) {
                    let n = &nodes[v as usize];
                    if near(n.rot, r) && n.assoc().iter().all(|&b| assocs.binary_search(&key(b)).is_ok()) {
                        pes.push(n.pe);
                        ges.push(n.ge);
                    }
                }
            }
            pes.sort_unstable();
            pes.dedup();
            ges.sort_unstable();
            ges.dedup();
            best = best.max(pes.len().min(ges.len()) as u32);
        }
    }
    best
}

/// Convenience wrapper building both tables on the fly.
pub fn match_templates(probe: &MinutiaeTemplate, gallery: &MinutiaeTemplate, cfg: &MatcherConfig) -> u32 {
    match_prepared(&PreparedTemplate::new(probe, cfg), &PreparedTemplate::new(gallery, cfg))
}
