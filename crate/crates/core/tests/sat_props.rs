mod common;

use pglb::sat3::{
    brute_sat, clause_count, decode, encode_cnf, encoding_string, gen_3sat, parse_dimacs, phi, phi_inv, CnfFormula,
    SatError,
};
use pglb::synthesis::{compile_truth_table, PartialBooleanFunction};
use pglb::Computation;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::*;

#[test]
fn phi_is_a_bijection() {
    for k in 1..=4 {
        let n = clause_count(k);
        let mut shapes = std::collections::BTreeSet::new();
        for i in 1..=n {
            let shape = phi(i, k).unwrap();
            assert!(shape.is_valid(k));
            assert_eq!(phi_inv(shape, k).unwrap(), i);
            shapes.insert(shape);
        }
        assert_eq!(shapes.len(), n);
        assert!(phi(0, k).is_err() && phi(n + 1, k).is_err());
    }
}

proptest! {
    #[test]
    fn encoding_round_trips(seed: u64, k in 1usize..=4, clauses in 0usize..30) {
        let formula = random_cnf(&mut StdRng::seed_from_u64(seed), k, clauses);
        let bits = encode_cnf(&formula);
        prop_assert_eq!(bits.len(), 8 * k * k * k);
        prop_assert_eq!(bits.iter().filter(|b| **b).count(), formula.clauses().len());
        prop_assert_eq!(decode(&bits, k).unwrap(), formula);
        prop_assert_eq!(encoding_string(&bits).len(), bits.len());
    }

    /// The looping program against the brute-force decision procedure.
    #[test]
    fn gen_3sat_matches_brute_force(seed: u64, clauses in 1usize..16) {
        let formula = random_cnf(&mut StdRng::seed_from_u64(seed), 2, clauses);
        let run = Computation::new(&gen_3sat(2).unwrap(), 2).unwrap();
        let got = run.run(&encode_cnf(&formula)).unwrap();
        prop_assert_eq!(got.as_bool(), Some(brute_sat(&formula).unwrap()));
    }
}

#[test]
fn lengths_and_shape() {
    for k in 1..=4 {
        let prog = gen_3sat(k).unwrap();
        assert_eq!(prog.len(), 72 * k * k * k + 5 * k + 1);
        assert!(!prog.is_loop_free());
        assert!(matches!(prog.get(prog.len()), Some(pglb::Instruction::BwdJump(l)) if *l == prog.len() - 1));
    }
    assert!(matches!(gen_3sat(0), Err(SatError::NoVariables)));
}

#[test]
fn tabulated_k1_program_matches_gen() {
    let table = PartialBooleanFunction::from_fn(8, |bits| Some(brute_sat(&decode(bits, 1).unwrap()).unwrap())).unwrap();
    let looping = Computation::new(&gen_3sat(1).unwrap(), 1).unwrap();
    let tabulated = Computation::new(&compile_truth_table(&table), 0).unwrap();
    for value in 0..256 {
        let input = bits(8, value);
        assert_eq!(looping.run(&input).unwrap(), tabulated.run(&input).unwrap());
    }
}

#[test]
fn dimacs_files() {
    let f = parse_dimacs("c two clauses\np cnf 2 2\n1 -2 1 0\n-1 -1 -1 0\n").unwrap();
    assert_eq!(f.variables(), 2);
    assert_eq!(f.clauses().len(), 2);
    assert!(brute_sat(&f).unwrap());
    for bad in [
        "p cnf 2 1\n1 2 0\n",
        "p cnf 2 1\n1 2 3 0\n",
        "p cnf 2 2\n1 2 2 0\n",
        "1 2 2 0\n",
    ] {
        assert!(parse_dimacs(bad).is_err(), "{bad:?}");
    }
}

#[test]
fn brute_force_small_cases() {
    let empty = CnfFormula::new(3, []).unwrap();
    assert!(brute_sat(&empty).unwrap());
    let contradiction = parse_dimacs("p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
    assert!(!brute_sat(&contradiction).unwrap());
}
