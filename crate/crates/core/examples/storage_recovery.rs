//! A storage code on a complete graph: three nodes hold the even-weight
//! code and any single lost node is rebuilt from the other two.

use confdual::coding::storage_code_from_independent_set;
use confdual::confusion::ConfusionGraph;
use confdual::graph::{BlockLengths, SideInformationGraph};
use confdual::independence::confusion_independence;
use confdual::limits::Limits;

fn main() -> confdual::Result<()> {
    let g = SideInformationGraph::complete(3);
    let t = BlockLengths::uniform(3, 1);
    let limits = Limits::default();

    let cg = ConfusionGraph::new(&g, &t, &limits)?;
    let cert = confusion_independence(&cg, &limits)?;
    let set: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
    let code = storage_code_from_independent_set(&g, &t, &set, &limits)?;
    println!("alpha = {}, storing {} bits in {} bits", cert.alpha, code.r, t.total());
    for (m, &x) in code.codebook.iter().enumerate() {
        println!("  message {m}: {}", cg.format_tuple(x));
    }

    for m in 0..code.codebook.len() {
        for j in 0..3 {
            let rec = code.simulate_failure(m, j)?;
            assert!(rec.ok);
        }
    }
    println!("every single-node failure recovered");

    // A codebook that is not independent is rejected with the clashing pair.
    match storage_code_from_independent_set(&g, &t, &[0b000, 0b001], &limits) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("000 and 001 are confusable"),
    }
    Ok(())
}
