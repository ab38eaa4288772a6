//! Which power laws `(1 + r)^{-a}` lie in L¹ and in the Green-weighted L¹,
//! and a sequence of unit-mass shells that is bounded in the weighted norm.
//!
//! `cargo run --release --example weighted_dichotomy`

use pme_green::geometry::{GrowthFunction, VolumeProfile};
use pme_green::weighted::{build_separating_sequence, powerlaw_classify};

fn main() -> pme_green::Result<()> {
    let profile = VolumeProfile::euclidean(3)?;
    println!("{:>6} {:>6} {:>6} {:>12}", "a", "L1", "L1_G", "numeric ok");
    for a in [1.5, 2.5, 3.0, 3.5, 5.0] {
        let class = powerlaw_classify(&profile, a)?;
        println!("{:>6} {:>6} {:>6} {:>12}", a, class.in_l1, class.in_l1g, class.agrees());
    }

    let f = GrowthFunction::power(3.0, 1.0)?;
    let seq = build_separating_sequence(&profile, &f, 8)?;
    println!("shell  distance      L1 partial   weighted partial");
    for j in 0..seq.distances.len() {
        println!(
            "{:>5}  {:>10.3e}  {:>11.3}  {:>16.8}",
            j + 1,
            seq.distances[j],
            seq.l1_partial[j],
            seq.weighted_partial[j]
        );
    }
    println!("increments certified: {}", seq.increments_certified());
    Ok(())
}
