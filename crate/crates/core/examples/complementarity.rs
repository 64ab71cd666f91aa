//! Index-coding capacity and storage rate along one direction, and the
//! exact identity linking them at a shared witness.
//!
//! Usage: complementarity [λ] [r], e.g. `complementarity 1,1/2,1 2`.

use confdual::graph::SideInformationGraph;
use confdual::limits::Limits;
use confdual::rates::{capacity_lower_bound, storage_rate_upper_bound, complementarity, WeightVector};

fn main() -> confdual::Result<()> {
    let mut args = std::env::args().skip(1);
    let lambda = WeightVector::parse(&args.next().unwrap_or_else(|| "1,1/2,1".into()))?;
    let r: u64 = args.next().map_or(Ok(2), |s| s.parse()).expect("r");
    let g = SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]])?;
    let limits = Limits::default();

    let c = capacity_lower_bound(&g, &lambda, &[r], &limits)?;
    let s = storage_rate_upper_bound(&g, &lambda, &[r], &limits)?;
    println!("lambda = {lambda}, r = {r}");
    println!("C >= {}  (~{:.4})", c.value, c.value.to_f64());
    println!("R <= {}  (~{:.4})", s.value, s.value.to_f64());

    let check = complementarity(&c, &s, &lambda)?;
    println!("1/C = {}", check.lhs);
    if let Some(rhs) = &check.rhs {
        println!("sum(lambda) - 1/R = {rhs}");
    }
    println!("exact: {:?}, residual {}", check.exact, check.residual);
    Ok(())
}
