//! Gromov–Hausdorff lower bounds between a projective-plane sample and
//! samples of the wedge of a circle and a sphere, over a range of sample
//! sizes. The outcome depends on the sizes: for 8 + 23 points (30 in total,
//! equal spacing on both factors) the `H2` bound is larger than the `img Sq¹`
//! bound.
//!
//! `cargo run --release -p sqpers-core --example rp2_vs_wedge`

use std::time::Instant;

use sqpers::distances::{gh_lower_bound, InvariantSpec};
use sqpers::metric::{circle_grid, geodesic_metric, gluing_wedge, quotient_metric, sphere_grid_points, GroupAction};
use sqpers::thetamod::Operation;

fn main() -> sqpers::Result<()> {
    let sphere = geodesic_metric(&sphere_grid_points(30, true), 2.0)?;
    let rp2 = quotient_metric(&sphere, &GroupAction::antipodal(sphere.len())?)?;
    let spec = InvariantSpec {
        degrees: vec![0, 1, 2],
        ops: vec![Operation::sq(1, 1)],
        max_dim: 3,
        max_scale: f64::INFINITY,
    };
    let pairs: Vec<(usize, usize)> = (7..=10).flat_map(|nc| (20..=25).map(move |ns| (nc, ns))).collect();
    for (nc, ns) in pairs {
        let start = Instant::now();
        let wedge = gluing_wedge(&circle_grid(nc, 1.0)?, 0, &geodesic_metric(&sphere_grid_points(ns, false), 1.0)?, 0)?;
        let r = gh_lower_bound(&rp2, &wedge, &spec)?;
        let line: Vec<String> = r.per_invariant.iter().map(|d| format!("{} {:.4}", d.invariant, d.d_b)).collect();
        println!("circle {nc} + sphere {ns}: {} | bound {:.4} via {:?} ({:.2?})", line.join(", "), r.gh_lower_bound, r.argmax, start.elapsed());
    }
    Ok(())
}
