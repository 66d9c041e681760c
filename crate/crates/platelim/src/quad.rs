//! Gauss-Legendre nodes shared by the through-thickness and in-plane
//! quadratures. Nodes are given on [-1, 1]; `map_to` rescales to [a, b].

/// 2-point rule: exact for cubics.
pub const GL2: [(f64, f64); 2] = [(-0.5773502691896257, 1.0), (0.5773502691896257, 1.0)];

/// 3-point rule: exact for quintics.
pub const GL3: [(f64, f64); 3] = [
    (-0.7745966692414834, 0.5555555555555556),
    (0.0, 0.8888888888888888),
    (0.7745966692414834, 0.5555555555555556),
];

/// 6-point rule (used by the quadrature-doubling check).
pub const GL6: [(f64, f64); 6] = [
    (-0.9324695142031521, 0.17132449237917036),
    (-0.6612093864662645, 0.3607615730481386),
    (-0.2386191860831969, 0.46791393457269104),
    (0.2386191860831969, 0.46791393457269104),
    (0.6612093864662645, 0.3607615730481386),
    (0.9324695142031521, 0.17132449237917036),
];

/// Rule of order `n` on [-1, 1] for `n` in {2, 3, 6}.
pub fn rule(n: usize) -> &'static [(f64, f64)] {
    match n {
        2 => &GL2,
        3 => &GL3,
        6 => &GL6,
        _ => panic!("unsupported Gauss order {n}; available: 2, 3, 6"),
    }
}

/// Map a [-1, 1] node/weight pair onto [a, b].
pub fn map_to(node: f64, weight: f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    (0.5 * (a + b) + half * node, half * weight)
}
