//! Fincke-Pohst enumeration of lattice points in a ball, sharded over the
//! last coordinate and merged in a deterministic order.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::Result;

#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    /// `(coefficients, squared norm)`, sorted by norm then coefficients.
    pub points: Vec<(Vec<i64>, f64)>,
    /// Set when the point budget was exhausted; `points` is then incomplete.
    pub truncated: bool,
}

struct Gso {
    mu: Vec<Vec<f64>>,
    bn: Vec<f64>,
}

fn gso(b: &[Vec<f64>]) -> Gso {
    let r = b.len();
    let mut mu = vec![vec![0.0; r]; r];
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut bn = vec![0.0; r];
    for i in 0..r {
        let mut v = b[i].clone();
        for j in 0..i {
            let d: f64 = b[i].iter().zip(&bstar[j]).map(|(x, y)| x * y).sum();
            mu[i][j] = d / bn[j];
            for (vk, sk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= mu[i][j] * sk;
            }
        }
        bn[i] = v.iter().map(|x| x * x).sum();
        bstar.push(v);
    }
    Gso { mu, bn }
}

fn squared_norm(basis: &[Vec<f64>], x: &[i64]) -> f64 {
    let dim = basis.first().map_or(0, |b| b.len());
    let mut v = vec![0.0; dim];
    for (c, b) in x.iter().zip(basis) {
        if *c != 0 {
            let cf = *c as f64;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += cf * bi;
            }
        }
    }
    v.iter().map(|t| t * t).sum()
}

struct Search<'a> {
    g: &'a Gso,
    bound: f64,
    budget: usize,
    found: &'a AtomicUsize,
}

impl Search<'_> {
    fn recurse(&self, level: usize, x: &mut [i64], partial: f64, out: &mut Vec<Vec<i64>>) -> bool {
        let r = x.len();
        let center: f64 = -((level + 1)..r).map(|j| x[j] as f64 * self.g.mu[j][level]).sum::<f64>();
        let room = (self.bound - partial) / self.g.bn[level];
        if room < 0.0 {
            return true;
        }
        let w = room.sqrt();
        let lo = (center - w).ceil() as i64;
        let hi = (center + w).floor() as i64;
        for v in lo..=hi {
            x[level] = v;
            let d = v as f64 - center;
            let np = partial + d * d * self.g.bn[level];
            if np > self.bound {
                continue;
            }
            if level == 0 {
                if x.iter().any(|c| *c != 0) {
                    if self.found.fetch_add(1, Ordering::Relaxed) >= self.budget {
                        return false;
                    }
                    out.push(x.to_vec());
                }
            } else if !self.recurse(level - 1, x, np, out) {
                return false;
            }
        }
        x[level] = 0;
        true
    }
}

/// All nonzero `x in Z^r` with `||sum x_i b_i||^2 <= radius_sq`, where `b_i`
/// are the rows of `basis` (preferably LLL-reduced). At most `max_points`
/// points are collected.
pub fn enumerate_ball(basis: &[Vec<f64>], radius_sq: f64, max_points: usize) -> Result<Enumeration> {
    let r = basis.len();
    if r == 0 || !(radius_sq > 0.0) {
        return Ok(Enumeration::default());
    }
    let g = gso(basis);
    let bound = radius_sq * (1.0 + 1e-12);
    let top = r - 1;
    let w = (bound / g.bn[top]).sqrt();
    let span = w.floor() as i64;
    let found = AtomicUsize::new(0);
    let search = Search { g: &g, bound, budget: max_points, found: &found };
    let shards: Vec<(Vec<Vec<i64>>, bool)> = (-span..=span)
        .into_par_iter()
        .map(|v| {
            let mut x = vec![0i64; r];
            x[top] = v;
            let d = v as f64;
            let partial = d * d * g.bn[top];
            let mut out = Vec::new();
            let complete = if partial > bound {
                true
            } else if top == 0 {
                if v != 0 {
                    if found.fetch_add(1, Ordering::Relaxed) >= max_points {
                        return (out, false);
                    }
                    out.push(x.clone());
                }
                true
            } else {
                search.recurse(top - 1, &mut x, partial, &mut out)
            };
            (out, complete)
        })
        .collect();
    let truncated = shards.iter().any(|(_, c)| !c);
    let mut points: Vec<(Vec<i64>, f64)> = shards
        .into_iter()
        .flat_map(|(pts, _)| pts)
        .map(|x| {
            let nrm = squared_norm(basis, &x);
            (x, nrm)
        })
        .filter(|(_, nrm)| *nrm <= bound)
        .collect();
    points.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(Enumeration { points, truncated })
}
