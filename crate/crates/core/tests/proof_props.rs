use pddb_core::engine::{Database, FixpointOptions, Status};
use pddb_core::proof::{build_ddt, dpt_confidence, height, is_simple, is_well_formed, prove, prune_repeats, ProveOptions};
use pddb_core::synth::{acyclic_program, cycle_closure, random_graph_closure, ProgramShape};
use pddb_core::{ConfidenceLevel, LatticeOrder};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<Database> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut out = Vec::new();
    while out.len() < 60 {
        if let Ok(db) = Database::load(&acyclic_program(&mut rng, &ProgramShape::default())) {
            out.push(db);
        }
    }
    out
}

fn cyclic() -> Vec<Database> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = vec![Database::load(&cycle_closure(4, ConfidenceLevel::new(0.7, 0.9, 0.0, 0.1).unwrap())).unwrap()];
    for n in 3..6 {
        out.push(Database::load(&random_graph_closure(&mut rng, n, 2 * n as usize)).unwrap());
    }
    out
}

#[test]
fn trees_match_every_iterate() {
    for db in corpus().iter().chain(cyclic().iter()) {
        let r = db.evaluate(&FixpointOptions::default()).unwrap();
        assert_eq!(r.status, Status::Exact);
        let k = r.closure_stage().unwrap();
        for (atom, value) in r.valuation.sorted() {
            let tree = build_ddt(db, atom, k).unwrap();
            assert!(dpt_confidence(&tree).unwrap().bits_eq(&value), "{atom}");
            assert!(is_well_formed(&tree));
            assert!(height(&tree) <= (2 * k).saturating_sub(1));
            for j in 0..k {
                let t = build_ddt(db, atom, j).unwrap();
                let c = dpt_confidence(&t).unwrap();
                assert!(c.bits_eq(&db.iterate(j).unwrap().get(atom)));
                assert!(c.leq(LatticeOrder::Truth, &value));
            }
        }
    }
}

#[test]
fn prove_agrees_with_engine() {
    for db in corpus().iter().take(20) {
        let r = db.evaluate(&FixpointOptions::default()).unwrap();
        for (atom, value) in r.valuation.sorted() {
            let p = prove(db, &atom.to_atom(), &ProveOptions::default()).unwrap();
            assert!(p.exact);
            assert!(p.confidence.bits_eq(&value));
        }
    }
}

#[test]
fn pruning_repeats_keeps_pc_confidence() {
    for db in cyclic() {
        let r = db.evaluate(&FixpointOptions::default()).unwrap();
        let k = r.closure_stage().unwrap();
        for (atom, value) in r.valuation.sorted() {
            let tree = build_ddt(&db, atom, k).unwrap();
            let pruned = prune_repeats(&tree);
            assert!(is_simple(&pruned));
            assert!(dpt_confidence(&pruned).unwrap().bits_eq(&value), "{atom}");
        }
    }
}
