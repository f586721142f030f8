//! Marching squares for closed level curves of a scalar field on the plane.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::Result;

/// Clamp for the log-ratio field so overflowing values stay comparable.
const LOG_CLAMP: f64 = 50.0;

/// Closed curves where `f = level` on a `resolution × resolution` grid of
/// cells covering the square `center ± half_width`. Each loop is returned
/// without repeating its first point.
///
/// The field is sampled as `ln(f / level)`, which keeps interpolation
/// meaningful when `f` spans many orders of magnitude.
pub fn level_curves(
    f: impl Fn(Complex64) -> Result<f64> + Sync,
    level: f64,
    center: Complex64,
    half_width: f64,
    resolution: usize,
) -> Result<Vec<Vec<Complex64>>> {
    use rayon::prelude::*;

    let res = resolution.max(2);
    let nodes = res + 1;
    let h = 2.0 * half_width / res as f64;
    let origin = center - Complex64::new(half_width, half_width);
    let at = |i: usize, j: usize| origin + Complex64::new(i as f64 * h, j as f64 * h);

    let values: Vec<f64> = (0..nodes * nodes)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nodes, k / nodes);
            f(at(i, j)).map(|v| (v / level).ln().clamp(-LOG_CLAMP, LOG_CLAMP))
        })
        .collect::<Result<_>>()?;
    let val = |i: usize, j: usize| values[j * nodes + i];

    // edge ids: horizontal (i,j)-(i+1,j) -> 2k, vertical (i,j)-(i,j+1) -> 2k+1
    let h_edge = |i: usize, j: usize| 2 * (j * nodes + i);
    let v_edge = |i: usize, j: usize| 2 * (j * nodes + i) + 1;
    let crossing = |edge: usize| -> Complex64 {
        let k = edge / 2;
        let (i, j) = (k % nodes, k / nodes);
        let (i2, j2) = if edge % 2 == 0 { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (val(i, j), val(i2, j2));
        let t = if a == b { 0.5 } else { (a / (a - b)).clamp(0.0, 1.0) };
        at(i, j) + (at(i2, j2) - at(i, j)) * t
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..res {
        for i in 0..res {
            // corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
            let corners = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            let case = corners
                .iter()
                .enumerate()
                .fold(0u8, |acc, (bit, &v)| acc | (u8::from(v >= 0.0) << bit));
            let bottom = h_edge(i, j);
            let right = v_edge(i + 1, j);
            let top = h_edge(i, j + 1);
            let left = v_edge(i, j);
            let mut push = |a: usize, b: usize| segments.push((a, b));
            match case {
                0 | 15 => {}
                1 | 14 => push(left, bottom),
                2 | 13 => push(bottom, right),
                3 | 12 => push(left, right),
                4 | 11 => push(right, top),
                6 | 9 => push(bottom, top),
                7 | 8 => push(left, top),
                5 | 10 => {
                    let mid = corners.iter().sum::<f64>() / 4.0;
                    let joined = (mid >= 0.0) == (case == 5);
                    if joined {
                        // corners 0 and 2 connect through the cell center
                        push(left, top);
                        push(bottom, right);
                    } else {
                        push(left, bottom);
                        push(right, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, mut edge) = segments[start];
        let mut curve = vec![crossing(first)];
        while edge != first {
            curve.push(crossing(edge));
            let next = by_edge[&edge].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            edge = if a == edge { b } else { a };
        }
        if edge == first && curve.len() >= 3 {
            loops.push(curve);
        }
    }
    Ok(loops)
}

/// Signed shoelace area (positive for counter-clockwise order).
pub fn polygon_area(points: &[Complex64]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_level_curve() {
        // f = 1/|Ψ|², level 2 -> circle of radius 1/√2
        let loops = level_curves(|p| Ok(1.0 / p.norm_sqr()), 2.0, Complex64::new(0.0, 0.0), 1.5, 120).unwrap();
        assert_eq!(loops.len(), 1);
        let r = 0.5f64.sqrt();
        for p in &loops[0] {
            assert!((p.norm() - r).abs() < 2e-3);
        }
        let area = polygon_area(&loops[0]).abs();
        assert!((area - std::f64::consts::PI * 0.5).abs() < 5e-3);
    }

    #[test]
    fn two_separate_loops() {
        let a = Complex64::new(-0.6, 0.0);
        let b = Complex64::new(0.6, 0.0);
        let f = |p: Complex64| Ok(1.0 / (p - a).norm_sqr() + 1.0 / (p - b).norm_sqr());
        let loops = level_curves(f, 25.0, Complex64::new(0.0, 0.0), 1.2, 100).unwrap();
        assert_eq!(loops.len(), 2);
    }
}
