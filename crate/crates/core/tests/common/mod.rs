#![allow(dead_code)]

//! Reference implementations written without the library's helpers, plus
//! shared fixtures.

use std::f64::consts::SQRT_2;

use gridmapper::nn::{Layer, Tensor};
use gridmapper::{CellCategory, Coord, OccupancyGrid, ProbabilityGrid};
use rand::Rng;

pub fn random_grid(rng: &mut impl Rng, h: usize, w: usize, p_free: f64, p_obstacle: f64) -> OccupancyGrid {
    let cells = (0..h * w)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < p_free {
                CellCategory::Free
            } else if u < p_free + p_obstacle {
                CellCategory::Obstacle
            } else {
                CellCategory::Unknown
            }
        })
        .collect();
    OccupancyGrid::from_cells(h, w, cells).unwrap()
}

fn cell(map: &OccupancyGrid, r: isize, c: isize) -> Option<CellCategory> {
    if r < 0 || c < 0 || r as usize >= map.height() || c as usize >= map.width() {
        return None;
    }
    Some(map.cells()[r as usize * map.width() + c as usize])
}

/// Bellman-Ford over (straight, diagonal) move counts. Equal lengths imply
/// equal counts because sqrt(2) is irrational, so the optimum is unique.
pub fn bellman_ford(map: &OccupancyGrid, source: Coord) -> Vec<Option<(u32, u32)>> {
    let (h, w) = map.dims();
    let free = |r: isize, c: isize| cell(map, r, c) == Some(CellCategory::Free);
    let wall = |r: isize, c: isize| cell(map, r, c) == Some(CellCategory::Obstacle);
    let mut edges = Vec::new();
    for r in 0..h as isize {
        for c in 0..w as isize {
            if !free(r, c) {
                continue;
            }
            for dr in -1..=1 {
                for dc in -1..=1 {
                    if (dr, dc) == (0, 0) || !free(r + dr, c + dc) {
                        continue;
                    }
                    let diagonal = dr != 0 && dc != 0;
                    if diagonal && wall(r, c + dc) && wall(r + dr, c) {
                        continue;
                    }
                    let a = r as usize * w + c as usize;
                    let b = (r + dr) as usize * w + (c + dc) as usize;
                    edges.push((a, b, diagonal));
                }
            }
        }
    }
    let value = |(s, d): (u32, u32)| s as f64 + d as f64 * SQRT_2;
    let mut dist: Vec<Option<(u32, u32)>> = vec![None; h * w];
    dist[source.row * w + source.col] = Some((0, 0));
    for _ in 0..h * w {
        let mut changed = false;
        for &(a, b, diagonal) in &edges {
            let Some((s, d)) = dist[a] else { continue };
            let cand = if diagonal { (s, d + 1) } else { (s + 1, d) };
            let better = match dist[b] {
                None => true,
                Some(old) => old != cand && value(cand) < value(old),
            };
            if better {
                dist[b] = Some(cand);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Per-cell scan: Free with an Unknown cell directly above, below, left or right.
pub fn frontier_scan(map: &OccupancyGrid) -> Vec<Coord> {
    let mut out = Vec::new();
    for r in 0..map.height() as isize {
        for c in 0..map.width() as isize {
            if cell(map, r, c) != Some(CellCategory::Free) {
                continue;
            }
            let around = [
                cell(map, r - 1, c),
                cell(map, r + 1, c),
                cell(map, r, c - 1),
                cell(map, r, c + 1),
            ];
            if around.contains(&Some(CellCategory::Unknown)) {
                out.push(Coord::new(r as usize, c as usize));
            }
        }
    }
    out
}

fn weight(layer: &Layer, o: usize, c: usize, ky: usize, kx: usize) -> f32 {
    let s = &layer.spec;
    layer.params[o * s.in_channels * s.kernel.0 * s.kernel.1 + c * s.kernel.0 * s.kernel.1 + ky * s.kernel.1 + kx]
}

fn bias(layer: &Layer, o: usize) -> f32 {
    if layer.spec.has_bias {
        layer.params[layer.params.len() - layer.spec.out_channels + o]
    } else {
        0.0
    }
}

/// Zero-padded "same" convolution, gathered one output cell at a time.
pub fn conv_reference(input: &Tensor, layer: &Layer) -> Vec<f32> {
    let s = &layer.spec;
    let (kh, kw) = s.kernel;
    let oh = input.height.div_ceil(s.stride);
    let ow = input.width.div_ceil(s.stride);
    let mut out = Vec::with_capacity(s.out_channels * oh * ow);
    for o in 0..s.out_channels {
        for y in 0..oh {
            for x in 0..ow {
                let mut acc = bias(layer, o) as f64;
                for c in 0..s.in_channels {
                    for ky in 0..kh {
                        for kx in 0..kw {
                            let sy = (y * s.stride + ky) as isize - (kh / 2) as isize;
                            let sx = (x * s.stride + kx) as isize - (kw / 2) as isize;
                            if sy < 0 || sx < 0 || sy as usize >= input.height || sx as usize >= input.width {
                                continue;
                            }
                            acc += weight(layer, o, c, ky, kx) as f64 * input.at(c, sy as usize, sx as usize) as f64;
                        }
                    }
                }
                out.push(acc as f32);
            }
        }
    }
    out
}

/// Transposed convolution as a gather: output cell `t` collects input `i`
/// through tap `k` whenever `i * stride + k - pad == t`.
pub fn transposed_reference(input: &Tensor, layer: &Layer, out_dims: (usize, usize)) -> Vec<f32> {
    let s = &layer.spec;
    let (kh, kw) = s.kernel;
    let (oh, ow) = out_dims;
    let mut out = Vec::with_capacity(s.out_channels * oh * ow);
    for o in 0..s.out_channels {
        for ty in 0..oh {
            for tx in 0..ow {
                let mut acc = bias(layer, o) as f64;
                for c in 0..s.in_channels {
                    for ky in 0..kh {
                        for kx in 0..kw {
                            let ny = ty as isize + (kh / 2) as isize - ky as isize;
                            let nx = tx as isize + (kw / 2) as isize - kx as isize;
                            if ny < 0 || nx < 0 || ny % s.stride as isize != 0 || nx % s.stride as isize != 0 {
                                continue;
                            }
                            let (i, j) = ((ny / s.stride as isize) as usize, (nx / s.stride as isize) as usize);
                            if i >= input.height || j >= input.width {
                                continue;
                            }
                            acc += weight(layer, o, c, ky, kx) as f64 * input.at(c, i, j) as f64;
                        }
                    }
                }
                out.push(acc as f32);
            }
        }
    }
    out
}

/// Two rooms joined by a 28-cell corridor, and a prediction that walls off
/// the far end of the corridor and leaves the second room undecided.
pub fn sealoff_fixture() -> (OccupancyGrid, ProbabilityGrid) {
    let (h, w) = (12, 50);
    let mut text = String::new();
    for r in 0..h {
        for c in 0..w {
            let free = (1..=10).contains(&r)
                && ((1..=10).contains(&c) || (39..=48).contains(&c) || (r == 5 && (11..=38).contains(&c)));
            text.push(if free { '.' } else { '#' });
        }
        text.push('\n');
    }
    let truth = OccupancyGrid::parse(&text).unwrap();
    let values = truth
        .coords()
        .map(|c| {
            let wall = if truth.get(c) == CellCategory::Obstacle {
                1.0
            } else {
                0.0
            };
            if c.col >= 39 {
                0.5
            } else if c.row == 5 && c.col >= 20 {
                1.0
            } else {
                wall
            }
        })
        .collect();
    (truth, ProbabilityGrid::from_values(h, w, values).unwrap())
}
