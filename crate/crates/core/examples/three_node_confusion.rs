//! The confusion graph of a three-node side-information graph, its
//! confusable differences, and both ways of getting χ_f.

use confdual::confusion::ConfusionGraph;
use confdual::fracchrom::{fractional_chromatic_lp, fractional_chromatic_transitive};
use confdual::graph::{BlockLengths, SideInformationGraph};
use confdual::independence::confusion_independence;
use confdual::limits::Limits;

fn main() -> confdual::Result<()> {
    // Node 1 sees 2 and 3, node 2 sees 1, node 3 sees 1 and 2 (0-indexed here).
    let g = SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]])?;
    let t = BlockLengths::uniform(3, 1);
    let limits = Limits::default();

    let cg = ConfusionGraph::new(&g, &t, &limits)?;
    println!("{} vertices, degree {}, {} edges", cg.vertex_count(), cg.degree(), cg.edge_count());
    let diffs: Vec<String> = cg.confusable_diffs().iter().map(|&d| cg.format_tuple(d)).collect();
    println!("confusable differences: {}", diffs.join(" "));

    let cert = confusion_independence(&cg, &limits)?;
    let witness: Vec<String> = cert.witness.iter().map(|&v| cg.format_tuple(v as u64)).collect();
    println!("alpha = {} via {{{}}}", cert.alpha, witness.join(", "));

    let lp = fractional_chromatic_lp(&cg.to_explicit(&limits)?, &limits)?;
    println!("chi_f = {} by LP, {} by 2^3/alpha", lp.chi_f, fractional_chromatic_transitive(&cg, &limits)?);
    for (set, weight) in &lp.coloring.columns {
        let names: Vec<String> = set.iter().map(|&v| cg.format_tuple(v as u64)).collect();
        println!("  weight {weight} on {{{}}}", names.join(", "));
    }
    Ok(())
}
