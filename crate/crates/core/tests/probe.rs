#[test]
fn probe_tiles_search() {
    use snkit_core::certify::*;
    use snkit_core::tensor::Bipartition;
    use snkit_core::Tolerances;
    let tiles = snkit_core::states::tiles_upb().complement_state().unwrap();
    let cut = Bipartition::first_vs_rest(2);
    for restarts in [1usize, 4] {
        let budget = Budget { restarts, iters: 2000, ..Default::default() };
        let out = decomposition_search(&tiles, &cut, 2, &budget, &Tolerances::default()).unwrap();
        match out {
            SearchOutcome::Found(d) => println!("restarts={restarts}: FOUND residual {:.3e} members {}", d.target_residual, d.entries.len()),
            SearchOutcome::NotFound { best_penalty } => println!("restarts={restarts}: NOT FOUND best penalty {best_penalty:.6e}"),
        }
    }
}
