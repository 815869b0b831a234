mod common;

use common::oracle;
use flagqec::protocol::Protocol;

#[test]
fn tableau_matches_dense_oracle_on_random_three_qubit_circuits() {
    oracle::tableau_vs_dense(200, 11).unwrap();
}

#[test]
fn frame_matches_tableau_on_every_single_fault() {
    let total = oracle::frame_vs_tableau_single(&common::shipped()).unwrap();
    assert_eq!(total, 377 + 377 + 565 + 565 + 373);
}

#[test]
fn frame_matches_tableau_under_random_multi_fault_noise() {
    let all = common::shipped();
    for n in [5, 7] {
        let same_code: Vec<&Protocol> = all.iter().filter(|p| p.code().n() == n).collect();
        oracle::frame_vs_tableau_random(&same_code, 0.05, 10_000, n as u64).unwrap();
        oracle::frame_vs_tableau_random(&same_code, 15.0 / 16.0, 500, 100 + n as u64).unwrap();
    }
}
