//! Grids: blocks of `h x h` nodes (the last row and column of blocks up to
//! `2h - 1` wide) with the first and last row and column of every block
//! special. Column-wall nodes spread east, row-wall nodes spread north.
//!
//! Header counter holds x mod 3; the payload starts with y mod 3 (2 bits).

use std::collections::HashMap;

use super::{chunk_size, pad, simulate_domain, unpad, Header, LocalBase, Role};
use crate::bits::BitString;
use crate::engine::CertificateMap;
use crate::error::{PlsError, Result};
use crate::graph::LabeledGraph;
use crate::view::View;

const EAST: usize = 0;
const WEST: usize = 1;
const NORTH: usize = 2;
const SOUTH: usize = 3;

pub(super) fn unit(t: usize) -> usize {
    (t / 4).max(1)
}

fn slots(h: usize) -> usize {
    if h == 1 {
        1
    } else {
        4
    }
}

/// Recovers `(cols, rows, coordinates)` of a grid graph, with the
/// smallest-identity corner at the origin.
pub fn grid_coordinates(g: &LabeledGraph) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    let not_grid = || PlsError::InvalidGraph("not a grid with both sides at least 2".into());
    let corners: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == 2).collect();
    if corners.len() != 4 {
        return Err(not_grid());
    }
    let c0 = *corners.iter().min_by_key(|&&v| g.id(v)).unwrap();
    let east = *g.neighbors(c0).iter().min_by_key(|&&w| g.id(w)).unwrap();
    let d0 = g.hop_distances(c0);
    let de = g.hop_distances(east);
    let ce = *corners
        .iter()
        .filter(|&&c| c != c0 && de[c] < d0[c])
        .min_by_key(|&&c| d0[c])
        .ok_or_else(not_grid)?;
    let cols = d0[ce] + 1;
    if g.n() % cols != 0 {
        return Err(not_grid());
    }
    let rows = g.n() / cols;
    let dce = g.hop_distances(ce);
    let mut coords = Vec::with_capacity(g.n());
    let mut seen = vec![false; g.n()];
    for v in 0..g.n() {
        let twice_x = (d0[v] + cols - 1).checked_sub(dce[v]).ok_or_else(not_grid)?;
        if twice_x % 2 == 1 {
            return Err(not_grid());
        }
        let x = twice_x / 2;
        let y = d0[v].checked_sub(x).ok_or_else(not_grid)?;
        if x >= cols || y >= rows || std::mem::replace(&mut seen[y * cols + x], true) {
            return Err(not_grid());
        }
        coords.push((x, y));
    }
    let unit_step = g.edges().iter().all(|&(a, b)| {
        let ((xa, ya), (xb, yb)) = (coords[a], coords[b]);
        xa.abs_diff(xb) + ya.abs_diff(yb) == 1
    });
    if !unit_step || g.m() != cols * (rows - 1) + rows * (cols - 1) || rows < 2 {
        return Err(not_grid());
    }
    Ok((cols, rows, coords))
}

/// Wall kind of a coordinate along one axis: 0 for a block's first line,
/// 1 for its last line when another block follows, `None` otherwise.
fn wall(x: usize, len: usize, h: usize) -> Option<usize> {
    let last_start = h * (len / h - 1);
    if x % h == 0 && x <= last_start {
        Some(0)
    } else if h > 1 && (x + 1) % h == 0 && x < last_start {
        Some(1)
    } else {
        None
    }
}

pub(super) fn prove(g: &LabeledGraph, base: &[BitString], t: usize) -> Result<CertificateMap> {
    let h = unit(t);
    let (cols, rows, coords) = grid_coordinates(g)?;
    if cols < h || rows < h {
        return Err(PlsError::Refused(format!("{cols} x {rows} grid is too narrow for unit {h}")));
    }
    let mut at = vec![0; g.n()];
    for (v, &(x, y)) in coords.iter().enumerate() {
        at[y * cols + x] = v;
    }
    let c = chunk_size(base[0].len(), h);
    let mut data = vec![BitString::zeros(slots(h) * c); g.n()];
    let mut role = vec![Role::Standard; g.n()];
    for (v, &(x, y)) in coords.iter().enumerate() {
        let (cw, rw) = (wall(x, cols, h), wall(y, rows, h));
        role[v] = match (cw, rw) {
            (Some(0), Some(0)) if (x, y) == (0, 0) => Role::Root,
            (Some(0), Some(0)) => Role::Border,
            (None, None) => continue,
            _ => Role::Extra,
        };
        let padded = pad(&base[v], c * h);
        let (slot, holders): (usize, Vec<usize>) = match cw {
            Some(kind) => (kind, (0..h).map(|i| at[y * cols + x + i]).collect()),
            None => (2 + rw.unwrap(), (0..h).map(|i| at[(y + i) * cols + x]).collect()),
        };
        for (i, holder) in holders.into_iter().enumerate() {
            for j in 0..c {
                data[holder].set(slot * c + j, padded.get(i * c + j));
            }
        }
    }
    Ok((0..g.n())
        .map(|v| {
            let (x, y) = coords[v];
            let mut payload = BitString::from_uint((y % 3) as u64, 2);
            payload.extend(&data[v]);
            Header { role: role[v], counter: (x % 3) as u8, shallow: false }.encode(&payload)
        })
        .collect())
}

struct GridView<'a> {
    view: &'a View,
    role: Vec<Role>,
    ew: Vec<u8>,
    ns: Vec<u8>,
    data: Vec<BitString>,
}

impl<'a> GridView<'a> {
    fn new(view: &'a View) -> Option<Self> {
        let mut gv = GridView { view, role: Vec::new(), ew: Vec::new(), ns: Vec::new(), data: Vec::new() };
        for i in 0..view.len() {
            let (h, p) = Header::decode(view.cert(i))?;
            let ns = p.reader().uint(2)? as u8;
            if h.shallow || h.counter > 2 || ns > 2 {
                return None;
            }
            gv.role.push(h.role);
            gv.ew.push(h.counter);
            gv.ns.push(ns);
            gv.data.push(p.slice(2, p.len()));
        }
        if gv.data.iter().any(|d| d.len() != gv.data[0].len()) {
            return None;
        }
        Some(gv)
    }

    /// Neighbors by direction, or `None` when unknown or inconsistent.
    fn dirs(&self, i: usize) -> Option<[Option<usize>; 4]> {
        if !self.view.has_full_adjacency(i) {
            return None;
        }
        let mut out = [None; 4];
        for j in self.view.neighbors(i) {
            let d = match ((self.ew[j] + 3 - self.ew[i]) % 3, (self.ns[j] + 3 - self.ns[i]) % 3) {
                (1, 0) => EAST,
                (2, 0) => WEST,
                (0, 1) => NORTH,
                (0, 2) => SOUTH,
                _ => return None,
            };
            if out[d].replace(j).is_some() {
                return None;
            }
        }
        Some(out)
    }

    fn step(&self, i: usize, d: usize) -> Option<usize> {
        self.dirs(i)?[d]
    }

    fn walk(&self, mut i: usize, d: usize, k: usize) -> Option<usize> {
        for _ in 0..k {
            i = self.step(i, d)?;
        }
        Some(i)
    }

    /// Base certificate of `x`, read along its chunk path.
    fn recover_at(&self, x: usize, dir: usize, slot: usize, h: usize, c: usize) -> Option<BitString> {
        let mut padded = BitString::new();
        let mut cur = x;
        for i in 0..h {
            if i > 0 {
                cur = self.step(cur, dir)?;
            }
            padded.extend(&self.data[cur].slice(slot * c, slot * c + c));
        }
        unpad(&padded)
    }
}

/// Wall kind of relative line `i` of a block of length `len` along one axis;
/// `-1` is the previous block's last line and `len` the next block's first.
fn relative_wall(i: isize, len: usize, next: bool) -> Option<usize> {
    if i == 0 || i == len as isize {
        Some(0)
    } else if i == -1 || (next && i == len as isize - 1) {
        Some(1)
    } else {
        None
    }
}

pub(super) fn verify(view: &View, base: &dyn LocalBase, t: usize, budget: u128) -> Result<bool> {
    let h = unit(t);
    let Some(gv) = GridView::new(view) else {
        return Ok(false);
    };
    let len = gv.data[0].len();
    if len == 0 || len % slots(h) != 0 {
        return Ok(false);
    }
    let c = len / slots(h);
    let Some(mine) = gv.dirs(0) else {
        return Ok(false);
    };
    for (a, b) in [(EAST, NORTH), (EAST, SOUTH), (WEST, NORTH), (WEST, SOUTH)] {
        if let (Some(x), Some(y)) = (mine[a], mine[b]) {
            let (xb, ya) = (gv.step(x, b), gv.step(y, a));
            if xb.is_none() || xb != ya {
                return Ok(false);
            }
        }
    }
    if gv.role[0] == Role::Root && (mine[WEST].is_some() || mine[SOUTH].is_some()) {
        return Ok(false);
    }
    // exactly one block, found by walking south then west, contains this node
    let mut owners = 0;
    for j in 0..2 * h - 1 {
        let Some(col) = gv.walk(0, SOUTH, j) else { break };
        for i in 0..2 * h - 1 {
            let Some(b) = gv.walk(col, WEST, i) else { break };
            if !gv.role[b].is_border() {
                continue;
            }
            let clear_row = (1..=i).all(|k| gv.walk(b, EAST, k).is_some_and(|v| !gv.role[v].is_border()));
            let clear_col = (1..=j).all(|k| gv.walk(b, NORTH, k).is_some_and(|v| !gv.role[v].is_border()));
            if clear_row && clear_col {
                owners += 1;
            }
        }
    }
    if owners != 1 {
        return Ok(false);
    }
    if !gv.role[0].is_border() {
        return Ok(true);
    }
    let extent = |dir: usize| -> Option<(usize, bool)> {
        for k in 1..2 * h {
            match gv.walk(0, dir, k) {
                None => return Some((k, false)),
                Some(v) if gv.role[v].is_border() => return Some((k, true)),
                Some(_) => {}
            }
        }
        None
    };
    let (Some((width, next_x)), Some((height, next_y))) = (extent(EAST), extent(NORTH)) else {
        return Ok(false);
    };
    if width < h || height < h || (next_x && width != h) || (next_y && height != h) {
        return Ok(false);
    }
    // relative coordinates of the block and its ring, corners of the ring excluded
    let mut cells: Vec<(isize, isize, usize)> = Vec::new();
    let mut domain = Vec::new();
    for i in 0..width {
        let Some(foot) = gv.walk(0, EAST, i) else { return Ok(false) };
        for j in 0..height {
            let Some(v) = gv.walk(foot, NORTH, j) else { return Ok(false) };
            let expected = match (relative_wall(i as isize, width, next_x), relative_wall(j as isize, height, next_y)) {
                (Some(0), Some(0)) => gv.role[0],
                (None, None) => Role::Standard,
                _ if h == 1 => Role::Border,
                _ => Role::Extra,
            };
            if gv.role[v] != expected {
                return Ok(false);
            }
            domain.push(v);
            cells.push((i as isize, j as isize, v));
            let ring = [
                (i == 0, WEST, -1, j as isize),
                (i == width - 1, EAST, width as isize, j as isize),
                (j == 0, SOUTH, i as isize, -1),
                (j == height - 1, NORTH, i as isize, height as isize),
            ];
            for (edge, dir, ri, rj) in ring {
                if edge {
                    if let Some(w) = gv.step(v, dir) {
                        cells.push((ri, rj, w));
                    }
                }
            }
        }
    }
    let mut fixed = HashMap::new();
    for (i, j, v) in cells {
        let cw = relative_wall(i, width, next_x);
        let rw = relative_wall(j, height, next_y);
        let (dir, slot) = match (cw, rw, h) {
            (_, _, 1) => (EAST, 0),
            (Some(kind), _, _) => (EAST, kind),
            (None, Some(kind), _) => (NORTH, 2 + kind),
            (None, None, _) => continue,
        };
        if !gv.role[v].is_special() {
            return Ok(false);
        }
        match gv.recover_at(v, dir, slot, h, c) {
            Some(cert) => fixed.insert(v, cert),
            None => return Ok(false),
        };
    }
    simulate_domain(view, base, &domain, &fixed, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grid, path};

    #[test]
    fn coordinates_of_generated_grids() {
        for (p, q) in [(2, 2), (3, 5), (8, 8), (6, 2)] {
            let g = grid(p, q);
            let (cols, rows, coords) = grid_coordinates(&g).unwrap();
            assert_eq!((cols, rows), (p, q));
            for v in 0..g.n() {
                assert_eq!(coords[v], (v % p, v / p));
            }
        }
        assert!(grid_coordinates(&path(5)).is_err());
    }

    #[test]
    fn wall_kinds() {
        let kinds: Vec<_> = (0..7).map(|x| wall(x, 7, 2)).collect();
        assert_eq!(kinds, vec![Some(0), Some(1), Some(0), Some(1), Some(0), None, None]);
        assert!((0..5).all(|x| wall(x, 5, 1) == Some(0)));
    }
}
