use tongue_core::bessel::bessel_j_at_neg;
use tongue_core::tongue::TongueTracer;
use tongue_core::verify::{Regime, Verifier};

const MU: f64 = 0.4;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

#[test]
fn traced_boundary_is_continuous() {
    let k = 1;
    let b = grid(20.0, 30.0, 200);
    let pts: Vec<_> = TongueTracer::default().trace_boundary(k, &b, MU).into_iter().map(|r| r.unwrap()).collect();
    // a0 ≈ kμ - J_k(-b/μ), so |da0/db| is about |J_k'(-b/μ)| / μ
    let slope = b
        .iter()
        .map(|bb| {
            let z = bb / MU;
            0.5 * (bessel_j_at_neg(k - 1, z) - bessel_j_at_neg(k + 1, z)).abs() / MU
        })
        .fold(0.0, f64::max);
    let db = b[1] - b[0];
    for w in pts.windows(2) {
        assert!((w[1].a0 - w[0].a0).abs() <= 5.0 * slope * db, "{:?}", w);
        assert!((w[1].api - w[0].api).abs() <= 5.0 * slope * db, "{:?}", w);
        assert!(w[1].b > w[0].b);
    }
}

#[test]
fn width_follows_twice_bessel() {
    let k = 1;
    let v = Verifier { regime: Regime { c1: 0.7, c2: 10.0 }, ..Verifier::default() };
    let fit = |b: f64| b / (b / MU).ln();
    // constant: worst scaled residual over the first oscillation period from b = 20
    let c = grid(20.0, 20.0 + std::f64::consts::PI * MU, 64)
        .into_iter()
        .map(|b| {
            let (r0, rpi) = v.thm2_residual(k, b, MU).unwrap();
            r0.scaled.max(rpi.scaled)
        })
        .fold(0.0, f64::max);
    for b in grid(20.0, 40.0, 40) {
        let bp = v.tracer.boundary_at(k, b, MU).unwrap();
        let pred = 2.0 * bessel_j_at_neg(k, b / MU).abs();
        assert!((bp.width - pred).abs() <= 2.0 * c * MU / fit(b), "b={b}: {} vs {pred}", bp.width);
    }
}

#[test]
fn mirrored_tongues_trace_mirrored_curves() {
    let b = grid(0.5, 6.0, 30);
    let t = TongueTracer::default();
    let plus = t.trace_boundary(2, &b, MU);
    let minus = t.trace_boundary(-2, &b, MU);
    for (p, m) in plus.iter().zip(&minus) {
        let (p, m) = (p.as_ref().unwrap(), m.as_ref().unwrap());
        assert!((p.a_minus + m.a_plus).abs() < 1e-9);
        assert!((p.a_plus + m.a_minus).abs() < 1e-9);
    }
}

#[test]
fn adjacencies_alternate_boundary_order() {
    let t = TongueTracer::default();
    let adj = t.find_adjacencies(1, (20.0, 26.0), MU).unwrap();
    assert!(adj.len() >= 3);
    for w in adj.windows(2) {
        let mid = t.boundary_at(1, 0.5 * (w[0].b_star + w[1].b_star), MU).unwrap();
        assert!(mid.width > 0.0);
    }
    let signs: Vec<bool> = adj
        .windows(2)
        .map(|w| {
            let mid = t.boundary_at(1, 0.5 * (w[0].b_star + w[1].b_star), MU).unwrap();
            mid.a0 < mid.api
        })
        .collect();
    for s in signs.windows(2) {
        assert_ne!(s[0], s[1], "a0 and api swap at every adjacency");
    }
}
