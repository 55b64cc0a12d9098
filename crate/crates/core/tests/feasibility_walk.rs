mod support;

#[test]
fn staged_check_matches_recomputation() {
    let tally = support::walk::run_all();
    println!("{} pairs, {} feasible", tally.pairs, tally.feasible);
    assert!(tally.pairs >= 100_000, "only {} pairs", tally.pairs);
    assert!(
        tally.feasible * 20 >= tally.pairs,
        "too few feasible moves to be meaningful"
    );
}
