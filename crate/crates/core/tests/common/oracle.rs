//! Cross-engine checks shared by the equivalence and acceptance targets.

use super::dense;
use flagqec::engine::{FrameEngine, Tableau, TableauEngine};
use flagqec::noise::{trial_rng, NoiseModel};
use flagqec::pauli::all_paulis;
use flagqec::protocol::{InjectedFaults, MissPolicy, Protocol, SampledFaults};
use flagqec::synthesis::enumerate_branch_scenarios;
use flagqec::Letter;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
enum G {
    H(usize),
    S(usize),
    C(usize, usize, Letter),
}

fn random_circuit(rng: &mut impl Rng, n: usize, len: usize) -> Vec<G> {
    (0..len)
        .map(|_| match rng.random_range(0..3) {
            0 => G::H(rng.random_range(0..n)),
            1 => G::S(rng.random_range(0..n)),
            _ => {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                G::C(a, b, [Letter::X, Letter::Y, Letter::Z][rng.random_range(0..3)])
            }
        })
        .collect()
}

fn expectations_agree(t: &Tableau, v: &[Complex64], n: usize) -> Result<(), String> {
    for p in all_paulis(n).filter(|p| !p.is_identity()) {
        let want = dense::expectation(&p, v);
        let ok = match t.peek(&p) {
            Some(bit) => (want - if bit { -1.0 } else { 1.0 }).abs() < 1e-9,
            None => want.abs() < 1e-9,
        };
        if !ok {
            return Err(format!("{p}: dense <P> = {want}, tableau {:?}", t.peek(&p)));
        }
    }
    Ok(())
}

/// Random 3-qubit Clifford circuits followed by random Pauli measurements:
/// every Pauli expectation and every outcome probability must agree.
pub fn tableau_vs_dense(circuits: usize, seed: u64) -> Result<usize, String> {
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops: Vec<_> = all_paulis(n).filter(|p| !p.is_identity()).collect();
    for _ in 0..circuits {
        let mut t = Tableau::new(n);
        let mut u = dense::identity(1 << n);
        for g in random_circuit(&mut rng, n, 12) {
            let m = match g {
                G::H(q) => {
                    t.h(q);
                    dense::hadamard(n, q)
                }
                G::S(q) => {
                    t.s(q);
                    dense::phase_s(n, q)
                }
                G::C(a, b, l) => {
                    t.controlled_pauli(a, b, l);
                    dense::controlled(n, a, b, l)
                }
            };
            u = dense::matmul(&m, &u);
        }
        let mut v = dense::apply(&u, &dense::basis_zero(n));
        expectations_agree(&t, &v, n)?;
        for _ in 0..3 {
            let p = ops[rng.random_range(0..ops.len())];
            let coin = rng.random_bool(0.5);
            let m = t.measure(&p, || coin);
            let prob = dense::project(&p, m.bit, &mut v);
            let want = if m.deterministic { 1.0 } else { 0.5 };
            if (prob - want).abs() > 1e-9 {
                return Err(format!("measuring {p}: dense probability {prob}, tableau {m:?}"));
            }
            expectations_agree(&t, &v, n)?;
        }
    }
    Ok(circuits)
}

/// Every enumerated single fault, from logical zero and logical plus.
pub fn frame_vs_tableau_single(protocols: &[Protocol]) -> Result<usize, String> {
    let mut total = 0;
    for protocol in protocols {
        let code = protocol.code().clone();
        let name = protocol.tree().name();
        for s in enumerate_branch_scenarios(protocol.tree()) {
            let faults = || InjectedFaults(s.fault.into_iter().collect());
            let mut frame = FrameEngine::new(code.n());
            let (fw, fc) = protocol.execute(&mut frame, &mut faults(), MissPolicy::Strict).map_err(|e| e.to_string())?;
            for mut tab in [TableauEngine::logical_zero(&code), TableauEngine::logical_plus(&code)] {
                let (tw, tc) = protocol.execute(&mut tab, &mut faults(), MissPolicy::Strict).map_err(|e| e.to_string())?;
                if fw != tw || fc != tc {
                    return Err(format!("{name} {:?}: outcomes differ", s.fault));
                }
                if !tab.residual_matches(&code, &frame.data_error()) {
                    return Err(format!("{name} {:?}: residual differs", s.fault));
                }
            }
            total += 1;
        }
    }
    Ok(total)
}

/// `runs` sampled executions at rate `p`, cycling through `protocols`.
pub fn frame_vs_tableau_random(protocols: &[&Protocol], p: f64, runs: u64, seed: u64) -> Result<u64, String> {
    let model = NoiseModel::new(p).map_err(|e| e.to_string())?;
    for t in 0..runs {
        let protocol = protocols[(t % protocols.len() as u64) as usize];
        let code = protocol.code().clone();
        let mut frame = FrameEngine::new(code.n());
        let mut tab = TableauEngine::logical_zero(&code);
        let (mut r1, mut r2) = (trial_rng(seed, t), trial_rng(seed, t));
        let (fw, _) = protocol
            .execute(&mut frame, &mut SampledFaults { model: &model, rng: &mut r1 }, MissPolicy::Identity)
            .map_err(|e| e.to_string())?;
        let (tw, _) = protocol
            .execute(&mut tab, &mut SampledFaults { model: &model, rng: &mut r2 }, MissPolicy::Identity)
            .map_err(|e| e.to_string())?;
        if fw != tw || !tab.residual_matches(&code, &frame.data_error()) {
            return Err(format!("{} trial {t} at p = {p}: engines disagree", protocol.tree().name()));
        }
    }
    Ok(runs)
}
