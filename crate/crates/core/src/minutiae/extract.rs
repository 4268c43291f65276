use std::f64::consts::PI;

use super::template::{Minutia, MinutiaKind, MinutiaeTemplate, MAX_MINUTIAE};
use crate::error::Result;
use crate::imgcore::{
    binarize, estimate_frequency, estimate_orientation, gabor_enhance, ring, segment, thin, transitions,
    ForegroundMask, GrayImage, OrientationField, Skeleton, DEFAULT_BLOCK_SIZE, RING,
};

pub const MIN_EXTRACT_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    pub block_size: usize,
    /// Minutiae closer than this to background or the image edge are dropped.
    pub border_margin: f64,
    /// Endings whose ridge reaches a junction within this many steps are spurs.
    pub spur_length: usize,
    /// Opposed endings closer than this are treated as a broken ridge.
    pub facing_distance: f64,
    /// Minutiae closer than this to another are dropped in pairs.
    pub min_separation: f64,
    /// Skeleton steps traced to estimate a direction.
    pub trace_length: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            block_size: DEFAULT_BLOCK_SIZE,
            border_margin: 10.0,
            spur_length: 8,
            facing_distance: 8.0,
            min_separation: 5.0,
            trace_length: 10,
        }
    }
}

/// Crossing number of a skeleton pixel: half the number of value changes
/// around its 8-neighbour cycle.
pub fn crossing_number(s: &Skeleton, x: usize, y: usize) -> usize {
    let p = ring(s, x, y);
    (0..8).filter(|&k| p[k] != p[(k + 1) % 8]).count() / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TraceEnd {
    /// Ran out of ridge.
    Tip,
    /// Reached a pixel where the ridge splits.
    Junction,
    /// Walked the full length.
    Length,
}

#[derive(Debug, Clone, Copy)]
struct Trace {
    end: (usize, usize),
    steps: usize,
    stop: TraceEnd,
}

fn neighbours(s: &Skeleton, x: usize, y: usize) -> impl Iterator<Item = (usize, (usize, usize))> + '_ {
    RING.iter().enumerate().filter_map(move |(k, &(dx, dy))| {
        let (nx, ny) = (x as isize + dx, y as isize + dy);
        s.get_signed(nx, ny).then_some((k, (nx as usize, ny as usize)))
    })
}

/// Walks the skeleton from `start` (already entered from `from`) for at most
/// `max_steps` further steps.
fn trace(s: &Skeleton, from: &[(usize, usize)], start: (usize, usize), max_steps: usize) -> Trace {
    let mut visited: Vec<(usize, usize)> = from.to_vec();
    visited.push(start);
    let mut cur = start;
    let mut steps = 1;
    while steps < max_steps {
        let cand: Vec<(usize, (usize, usize))> =
            neighbours(s, cur.0, cur.1).filter(|(_, q)| !visited.contains(q)).collect();
        if cand.is_empty() {
            return Trace { end: cur, steps, stop: TraceEnd::Tip };
        }
        let mut present = [false; 8];
        for &(k, _) in &cand {
            present[k] = true;
        }
        if transitions(&present) > 1 {
            return Trace { end: cur, steps, stop: TraceEnd::Junction };
        }
        // a single run of candidates: prefer the edge-adjacent one
        let &(_, next) = cand.iter().find(|(k, _)| k % 2 == 0).unwrap_or(&cand[0]);
        visited.push(next);
        cur = next;
        steps += 1;
    }
    Trace { end: cur, steps, stop: TraceEnd::Length }
}

/// The pixels through which each ridge leaves `(x, y)`: one per neighbour
/// run, preferring edge-adjacent pixels.
fn branch_starts(s: &Skeleton, x: usize, y: usize) -> Vec<(usize, usize)> {
    let p = ring(s, x, y);
    let mut starts = Vec::new();
    let Some(first_gap) = (0..8).find(|&k| !p[k]) else {
        return starts;
    };
    let mut k = (first_gap + 1) % 8;
    for _ in 0..8 {
        if p[k] && !p[(k + 7) % 8] {
            let mut run = vec![];
            let mut j = k;
            while p[j] && run.len() < 8 {
                run.push(j);
                j = (j + 1) % 8;
            }
            let pick = *run.iter().find(|&&r| r % 2 == 0).unwrap_or(&run[0]);
            let (dx, dy) = RING[pick];
            starts.push(((x as isize + dx) as usize, (y as isize + dy) as usize));
        }
        k = (k + 1) % 8;
    }
    starts
}

fn branch_traces(s: &Skeleton, x: usize, y: usize, len: usize) -> Vec<Trace> {
    let starts = branch_starts(s, x, y);
    let mut others: Vec<(usize, usize)> = neighbours(s, x, y).map(|(_, q)| q).collect();
    others.push((x, y));
    starts.iter().map(|&st| trace(s, &others, st, len)).collect()
}

fn angle_to(from: (f64, f64), to: (usize, usize)) -> f64 {
    (to.1 as f64 - from.1).atan2(to.0 as f64 - from.0).rem_euclid(2.0 * PI)
}

/// Direction of an ending: into its ridge. Direction of a bifurcation: along
/// the branch farthest in angle from the other two.
fn direction_of(s: &Skeleton, x: usize, y: usize, kind: MinutiaKind, len: usize) -> Option<f64> {
    let here = (x as f64, y as f64);
    let traces = branch_traces(s, x, y, len);
    match kind {
        MinutiaKind::Ending => traces.first().map(|t| angle_to(here, t.end)),
        MinutiaKind::Bifurcation => {
            if traces.len() != 3 {
                return None;
            }
            let a: Vec<f64> = traces.iter().map(|t| angle_to(here, t.end)).collect();
            let sep = |i: usize, j: usize| {
                let d = (a[i] - a[j]).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d)
            };
            // the stem is the branch opposite the closest pair
            let stem = [(2, sep(0, 1)), (1, sep(0, 2)), (0, sep(1, 2))]
                .into_iter()
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .map(|p| p.0)
                .unwrap();
            Some(a[stem])
        }
    }
}

/// Every crossing-number minutia on the skeleton, without filtering. Runs of
/// touching CN=3 pixels are reported once, at their first pixel in scan order.
pub fn scan_skeleton(s: &Skeleton, of: Option<&OrientationField>, trace_length: usize) -> Vec<Minutia> {
    let mut out = Vec::new();
    let mut bif_pixels: Vec<(usize, usize)> = Vec::new();
    for y in 0..s.height {
        for x in 0..s.width {
            if !s.get(x, y) {
                continue;
            }
            let kind = match crossing_number(s, x, y) {
                1 => MinutiaKind::Ending,
                3 => MinutiaKind::Bifurcation,
                _ => continue,
            };
            if kind == MinutiaKind::Bifurcation {
                let touching = bif_pixels.iter().rev().take_while(|q| q.1 + 1 >= y).any(|q| q.0.abs_diff(x) <= 1 && q.1.abs_diff(y) <= 1);
                bif_pixels.push((x, y));
                if touching {
                    continue;
                }
            }
            let Some(direction) = direction_of(s, x, y, kind, trace_length) else {
                continue;
            };
            let reliability = of.map_or(1.0, |f| f.coherence[f.index_of_pixel(x, y)].clamp(0.0, 1.0));
            out.push(Minutia::new(x as f64, y as f64, direction, kind, reliability));
        }
    }
    out
}

fn near_background(mask: &ForegroundMask, x: f64, y: f64, margin: f64) -> bool {
    let r = margin.ceil() as isize;
    let (cx, cy) = (x.round() as isize, y.round() as isize);
    for dy in -r..=r {
        for dx in -r..=r {
            if ((dx * dx + dy * dy) as f64) >= margin * margin {
                continue;
            }
            let (px, py) = (cx + dx, cy + dy);
            if px < 0 || py < 0 || !mask.contains(px as usize, py as usize) {
                return true;
            }
        }
    }
    false
}

fn dist(a: &Minutia, b: &Minutia) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Removes spurious minutiae. Each rule is decided against the input set as
/// a whole, so applying the filter to its own output changes nothing.
pub fn filter_minutiae(cands: &[Minutia], s: &Skeleton, mask: &ForegroundMask, cfg: &ExtractConfig) -> Vec<Minutia> {
    let n = cands.len();
    let mut drop = vec![false; n];
    for (k, m) in cands.iter().enumerate() {
        if near_background(mask, m.x, m.y, cfg.border_margin) {
            drop[k] = true;
        }
    }
    // spurs: a short branch from an ending straight into a junction
    for (k, m) in cands.iter().enumerate() {
        if m.kind != MinutiaKind::Ending {
            continue;
        }
        let (x, y) = (m.x as usize, m.y as usize);
        let Some(t) = branch_traces(s, x, y, cfg.spur_length).into_iter().next() else {
            continue;
        };
        if t.stop == TraceEnd::Junction && t.steps < cfg.spur_length {
            drop[k] = true;
            let end = Minutia::new(t.end.0 as f64, t.end.1 as f64, 0.0, MinutiaKind::Bifurcation, 0.0);
            for (j, b) in cands.iter().enumerate() {
                if b.kind == MinutiaKind::Bifurcation && dist(b, &end) <= 2.0 {
                    drop[j] = true;
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let d = dist(&cands[a], &cands[b]);
            let close = d < cfg.min_separation;
            let facing = cands[a].kind == MinutiaKind::Ending
                && cands[b].kind == MinutiaKind::Ending
                && d < cfg.facing_distance
                && {
                    let diff = (cands[a].direction - cands[b].direction).rem_euclid(2.0 * PI);
                    (diff - PI).abs() <= PI / 4.0
                };
            if close || facing {
                drop[a] = true;
                drop[b] = true;
            }
        }
    }
    let mut kept: Vec<Minutia> = cands.iter().zip(&drop).filter(|(_, &d)| !d).map(|(m, _)| *m).collect();
    if kept.len() > MAX_MINUTIAE {
        // stable sort keeps scan order among equal reliabilities
        let mut order: Vec<usize> = (0..kept.len()).collect();
        order.sort_by(|&i, &j| kept[j].reliability.total_cmp(&kept[i].reliability));
        let mut keep = vec![false; kept.len()];
        for &i in &order[..MAX_MINUTIAE] {
            keep[i] = true;
        }
        let mut it = keep.iter();
        kept.retain(|_| *it.next().unwrap());
    }
    kept
}

pub fn extract(img: &GrayImage, source_id: &str) -> Result<MinutiaeTemplate> {
    extract_with(img, source_id, &ExtractConfig::default())
}

pub fn extract_with(img: &GrayImage, source_id: &str, cfg: &ExtractConfig) -> Result<MinutiaeTemplate> {
    img.ensure_min_size(MIN_EXTRACT_SIZE)?;
    let mask = segment(img, cfg.block_size);
    if mask.is_empty() {
        return Ok(MinutiaeTemplate::new(source_id, img.width, img.height, vec![]));
    }
    let of = estimate_orientation(img, cfg.block_size)?;
    let fm = estimate_frequency(img, &of);
    let enhanced = gabor_enhance(img, &of, &fm, &mask)?;
    let skel = thin(&binarize(&enhanced, &mask)?);
    let cands = scan_skeleton(&skel, Some(&of), cfg.trace_length);
    let minutiae = filter_minutiae(&cands, &skel, &mask, cfg);
    Ok(MinutiaeTemplate::new(source_id, img.width, img.height, minutiae))
}
