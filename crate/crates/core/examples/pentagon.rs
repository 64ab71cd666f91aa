//! Symmetric capacity and broadcast rate of the bidirected 5-cycle.
//!
//! At t = (2,2,2,2,2) the confusion graph has 1024 vertices and α = 32, so
//! C_sym ≥ 2/5 and β ≤ 5/2. Pass a different block length as the first
//! argument to try other t.

use std::time::Instant;

use confdual::graph::SideInformationGraph;
use confdual::limits::Limits;
use confdual::rates::{capacity_lower_bound_cached, storage_rate_upper_bound_cached, PointCache, Quantity, WeightVector};

fn main() -> confdual::Result<()> {
    let bits: u64 = std::env::args().nth(1).map_or(Ok(2), |s| s.parse()).expect("block length");
    let g = SideInformationGraph::bidirected_cycle(5);
    let limits = Limits::default();
    let ones = WeightVector::ones(5);

    let start = Instant::now();
    let mut cache = PointCache::new(&g, &limits);
    let c = capacity_lower_bound_cached(&mut cache, &ones, &[bits])?;
    let w = c.witness.as_ref().expect("finite bound");
    println!("t = {}: alpha = {}, chi_f = {}", w.t, w.alpha, w.chi_f);
    println!("C_sym >= {}", c.value);
    println!("beta  <= {}", c.reciprocal(Quantity::BroadcastRate).value);

    let r = storage_rate_upper_bound_cached(&mut cache, &ones, &[bits])?;
    println!("R_sym <= {}", r.value);
    println!("({:.2?})", start.elapsed());
    Ok(())
}
