//! Barcodes and critical radii of projective-plane samples.
//!
//! `cargo run --release -p sqpers-core --example rp2_radii [seed]`

use std::time::Instant;

use sqpers::cohomology::persistent_barcode;
use sqpers::metric::{geodesic_metric, quotient_metric, sphere_grid_points, sphere_sample, vr_filtration, GroupAction};
use sqpers::thetamod::{image_barcode, Operation};

fn main() -> sqpers::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let samples = [
        ("random", sphere_sample(2, 2.0, 30, seed, true)?),
        ("grid", geodesic_metric(&sphere_grid_points(30, true), 2.0)?),
    ];
    for (name, sphere) in samples {
        let start = Instant::now();
        let rp2 = quotient_metric(&sphere, &GroupAction::antipodal(sphere.len())?)?;
        let k = vr_filtration(&rp2, 3, 2.3);
        let h = persistent_barcode(&k, 2);
        let img = image_barcode(&k, Operation::sq(1, 1))?;
        println!("{name}: {} points, diameter {:.4}, {} simplices, {:.2?}", rp2.len(), rp2.diameter(), k.len(), start.elapsed());
        for b in h.bars().iter().filter(|b| b.degree >= 1) {
            println!("  H{} ({:.4}, {:.4}) x{}", b.degree, b.birth, b.death, b.mult);
        }
        for b in img.bars() {
            println!("  imgSq1 ({:.4}, {:.4}) x{}", b.birth, b.death, b.mult);
        }
    }
    Ok(())
}
