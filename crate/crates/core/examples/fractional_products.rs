//! Fractional chromatic numbers of small graphs and their disjunctive
//! products, with the b-fold colorings that approach χ_f from above.

use confdual::fracchrom::{b_fold_chromatic_upper, chromatic_number, fractional_chromatic_lp};
use confdual::graph::UndirectedGraph;
use confdual::limits::Limits;

fn main() -> confdual::Result<()> {
    let limits = Limits::default();
    let c5 = UndirectedGraph::cycle(5);
    let k2 = UndirectedGraph::complete(2);

    let a = fractional_chromatic_lp(&c5, &limits)?;
    let b = fractional_chromatic_lp(&k2, &limits)?;
    let product = c5.disjunctive_product(&k2, &limits)?;
    let ab = fractional_chromatic_lp(&product, &limits)?;
    println!("chi_f(C5) = {}, chi_f(K2) = {}", a.chi_f, b.chi_f);
    println!("chi_f(C5 * K2) = {} ({} vertices)", ab.chi_f, product.vertex_count());
    assert!(ab.verify(&product, &limits)?);

    println!("chi(C5) = {}", chromatic_number(&c5, &limits)?.count);
    for fold in 1..=3 {
        let colors = b_fold_chromatic_upper(&c5, fold, &limits)?;
        println!("{fold}-fold coloring of C5 with {colors} colors: {colors}/{fold}");
    }
    Ok(())
}
