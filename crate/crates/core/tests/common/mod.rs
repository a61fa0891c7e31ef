//! Reference computations for integration tests, written independently of
//! the library's geometry code.

#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};

pub type V = Vector3<f64>;

/// Undirected angle via arccos, in degrees.
pub fn angle_deg(a: &V, b: &V) -> f64 {
    let c = (a.dot(b) / (a.norm() * b.norm())).abs().min(1.0);
    c.acos().to_degrees()
}

/// Distance between lines from their closest-point parameters.
pub fn line_distance(d1: &V, p1: &V, d2: &V, p2: &V) -> f64 {
    let w = p1 - p2;
    let (a, b, c) = (d1.dot(d1), d1.dot(d2), d2.dot(d2));
    let (d, e) = (d1.dot(&w), d2.dot(&w));
    let den = a * c - b * b;
    if den <= 1e-14 * a * c {
        let t = e / c;
        return (w - d2 * t).norm();
    }
    let s = (b * e - c * d) / den;
    let t = (a * e - b * d) / den;
    (w + d1 * s - d2 * t).norm()
}

/// Grid search over both line parameters with a shrinking window.
pub fn brute_line_distance(d1: &V, p1: &V, d2: &V, p2: &V) -> f64 {
    let f = |s: f64, t: f64| (p1 + d1 * s - p2 - d2 * t).norm();
    let (mut cs, mut ct, mut half) = (0.0, 0.0, 1000.0);
    let mut best = f(cs, ct);
    const K: i32 = 12;
    for _ in 0..200 {
        let (mut bs, mut bt) = (cs, ct);
        for i in -K..=K {
            for j in -K..=K {
                let s = cs + half * i as f64 / K as f64;
                let t = ct + half * j as f64 / K as f64;
                let v = f(s, t);
                if v < best {
                    best = v;
                    bs = s;
                    bt = t;
                }
            }
        }
        if (bs, bt) == (cs, ct) {
            half *= 0.5;
        }
        cs = bs;
        ct = bt;
        if half < 1e-13 {
            break;
        }
    }
    best
}

pub fn point_line(p: &V, d: &V, q: &V) -> f64 {
    let v = p - q;
    v.cross(d).norm() / d.norm()
}

/// Axis-angle rotation built from the exponential series of the
/// cross-product matrix.
pub fn rodrigues(axis: &V, angle: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    let mut term = Matrix3::identity();
    let mut sum = Matrix3::identity();
    for n in 1..60 {
        term = term * kx * (angle / n as f64);
        sum += term;
    }
    sum
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn unit(rng: &mut impl rand::Rng) -> V {
    loop {
        let v = V::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn point(rng: &mut impl rand::Rng, r: f64) -> V {
    V::new(rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r))
}
