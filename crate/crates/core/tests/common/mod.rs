//! Brute-force reference computations shared by the integration tests.
#![allow(dead_code)]

/// Compensated composite trapezoid rule on `[a, b]` with `panels` panels.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    let mut carry = 0.0;
    for i in 1..panels {
        let y = f(a + i as f64 * h) - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum * h
}

/// `2^20` panels: at least a million, and every dyadic point up to level 20
/// is a node.
pub const FINE_PANELS: usize = 1 << 20;

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Compensated composite midpoint rule; exact for step functions whose
/// jumps sit on panel edges.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    let mut carry = 0.0;
    for i in 0..panels {
        let y = f(a + (i as f64 + 0.5) * h) - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum * h
}
