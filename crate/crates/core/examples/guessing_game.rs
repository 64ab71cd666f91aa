//! The guessing game on a side-information graph: an optimal strategy from
//! a maximum independent set, its guessing numbers, and the matching
//! sum-rate bounds.
//!
//! Usage: guessing_game [graph file] [t], defaulting to K3 at t = (1,1,1).

use confdual::confusion::ConfusionGraph;
use confdual::graph::{BlockLengths, SideInformationGraph};
use confdual::guessing::{strategy_from_independent_set, guessing_sum_check};
use confdual::independence::confusion_independence;
use confdual::limits::Limits;

fn main() -> confdual::Result<()> {
    let mut args = std::env::args().skip(1);
    let g = match args.next() {
        Some(path) => SideInformationGraph::parse(&std::fs::read_to_string(path).expect("readable graph file"))?,
        None => SideInformationGraph::complete(3),
    };
    let t = match args.next() {
        Some(t) => BlockLengths::parse(&t)?,
        None => BlockLengths::uniform(g.n(), 1),
    };
    let limits = Limits::default();

    let cg = ConfusionGraph::new(&g, &t, &limits)?;
    let cert = confusion_independence(&cg, &limits)?;
    let set: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
    let strategy = strategy_from_independent_set(&g, &t, &set, &limits)?;
    let numbers = strategy.numbers()?;
    println!("|W| = {} of {} tuples, P_win = {}", strategy.winning_set.len(), cg.vertex_count(), strategy.p_win);
    match &numbers.k {
        Some(k) => println!("k = {k}, k' = {}", numbers.k_complement),
        None => println!("no winning tuple"),
    }

    let check = guessing_sum_check(&g, &t, &limits)?;
    println!("n / R_sum = {}, n / C_sum = {}", check.n_over_r_sum, check.n_over_c_sum);
    println!("identities hold: {:?}", check.holds);
    Ok(())
}
