//! Builds an index code from an optimal coloring of the confusion graph,
//! checks it on every message tuple, and shows one broadcast.

use confdual::coding::index_code_from_coloring;
use confdual::confusion::ConfusionGraph;
use confdual::fracchrom::chromatic_number;
use confdual::graph::{BlockLengths, SideInformationGraph};
use confdual::limits::Limits;

fn main() -> confdual::Result<()> {
    let g = SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]])?;
    let t = BlockLengths::uniform(3, 1);
    let limits = Limits::default();

    let cg = ConfusionGraph::new(&g, &t, &limits)?;
    let coloring = chromatic_number(&cg.to_explicit(&limits)?, &limits)?;
    let code = index_code_from_coloring(&g, &t, &coloring, &limits)?;
    println!("{} colors, so {} broadcast bits for {} message bits", coloring.count, code.r, t.total());

    let report = code.verify();
    println!("round trip on all inputs: {} ({} checks)", report.passed, report.checked);

    let x = cg.parse_tuple("101")?;
    let index = code.encoder[x as usize];
    println!("message 101 -> index {index:0width$b}", width = code.r as usize);
    for j in 0..3 {
        let decoded = code.decode(j, index, cg.observation(x, j)).expect("decodable");
        println!("  receiver {} decodes {decoded}", j + 1);
    }
    Ok(())
}
