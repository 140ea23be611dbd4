//! Reusable diagram fragments with known interpretations.
//!
//! Everything here is assembled from the core generators (plus the triangle
//! sugar where noted) and carries its exact value in the name or the doc
//! comment. The scalar gadgets exist to keep composite constructions exact:
//! a bare copy-fan or XOR spider carries a factor of √2 or 1/√2, and pairing
//! it with the matching scalar restores the intended matrix on the nose.

use super::{
    cap, cup, h, id, id_wires, seq, seq_many, swap, tensor, tensor_many, triangle, x, x0, z, z0,
    Diagram, PhaseExpr,
};

fn s(a: Diagram, b: Diagram) -> Diagram {
    seq(a, b).expect("gadget arities are fixed")
}

/// Scalar 2 = 1 + e^{i·0}.
pub fn value_two() -> Diagram {
    z0(0, 0)
}

/// Scalar (1 − e^{iφ})/√2: a single wire looped through Z(φ) and H.
pub fn loop_zh(phase: PhaseExpr) -> Diagram {
    let chain = s(z(1, 1, phase), h());
    s(cap(), s(tensor(chain, id()), cup()))
}

/// Scalar ½(1 + e^{ia})(1 + e^{ib}): a loop through Z(a)·H·Z(b)·H.
pub fn loop_two(a: PhaseExpr, b: PhaseExpr) -> Diagram {
    let chain = seq_many([z(1, 1, a), h(), z(1, 1, b), h()]).unwrap();
    s(cap(), s(tensor(chain, id()), cup()))
}

/// Scalar 1/√2, exactly: loop_two(π/4, 3π/4) · loop_zh(π/2)² =
/// (i/√2)·e^{−iπ/4}·e^{−iπ/4}.
pub fn inv_sqrt2() -> Diagram {
    tensor_many([
        loop_two(PhaseExpr::pi_rational(1, 4), PhaseExpr::pi_rational(3, 4)),
        loop_zh(PhaseExpr::pi_rational(1, 2)),
        loop_zh(PhaseExpr::pi_rational(1, 2)),
    ])
}

/// Scalar √2 = ⟨+|0⟩-style contraction of two phase-free spiders.
pub fn value_sqrt2() -> Diagram {
    s(x0(0, 1), z0(1, 0))
}

/// Scalar ½.
pub fn value_half() -> Diagram {
    tensor(inv_sqrt2(), inv_sqrt2())
}

/// Scalar e^{ip}: the √2·e^{ip} device X[1,0](π)∘Z[0,1](p), times 1/√2.
pub fn unit_phase(p: PhaseExpr) -> Diagram {
    tensor(
        s(z(0, 1, p), x(1, 0, PhaseExpr::pi_rational(1, 1))),
        inv_sqrt2(),
    )
}

/// State |0⟩ (exactly).
pub fn state_zero() -> Diagram {
    tensor(x0(0, 1), inv_sqrt2())
}

/// State |1⟩ (exactly).
pub fn state_one() -> Diagram {
    tensor(x(0, 1, PhaseExpr::pi_rational(1, 1)), inv_sqrt2())
}

/// Effect ⟨0| (exactly).
pub fn effect_zero() -> Diagram {
    tensor(x0(1, 0), inv_sqrt2())
}

/// Effect ⟨1| (exactly).
pub fn effect_one() -> Diagram {
    tensor(x(1, 0, PhaseExpr::pi_rational(1, 1)), inv_sqrt2())
}

/// (1/√2)·CNOT, first wire control: copy-fan into XOR.
pub fn cnot_struct() -> Diagram {
    s(tensor(z0(1, 2), id()), tensor(id(), x0(2, 1)))
}

/// CNOT, exactly.
pub fn cnot() -> Diagram {
    tensor(cnot_struct(), value_sqrt2())
}

/// CZ = diag(1,1,1,−1), exactly: two copy-fans joined by the flattened-H
/// effect (1,1,1,−1) on their inner legs.
pub fn cz() -> Diagram {
    let flat_h = tensor(s(tensor(h(), id()), cup()), value_sqrt2());
    s(
        tensor(z0(1, 2), z0(1, 2)),
        tensor_many([id(), flat_h, id()]),
    )
}

fn t_gate(sign: i64) -> Diagram {
    z(1, 1, PhaseExpr::pi_rational(sign, 4))
}

/// CNOT with control on wire `c` and target on wire `t` of a 3-wire layer.
fn cnot3(c: usize, t: usize) -> Diagram {
    match (c, t) {
        (0, 1) => tensor(cnot(), id()),
        (1, 2) => tensor(id(), cnot()),
        (0, 2) => seq_many([
            tensor(id(), swap()),
            tensor(cnot(), id()),
            tensor(id(), swap()),
        ])
        .unwrap(),
        _ => unreachable!("unsupported CNOT placement"),
    }
}

fn on3(wire: usize, gate: Diagram) -> Diagram {
    tensor_many((0..3).map(|w| if w == wire { gate.clone() } else { id() }))
}

/// The Toffoli gate CCX, exactly, as the standard 15-gate circuit over
/// CNOT, H, and ±π/4 phases.
pub fn toffoli() -> Diagram {
    seq_many([
        on3(2, h()),
        cnot3(1, 2),
        on3(2, t_gate(-1)),
        cnot3(0, 2),
        on3(2, t_gate(1)),
        cnot3(1, 2),
        on3(2, t_gate(-1)),
        cnot3(0, 2),
        on3(1, t_gate(1)),
        on3(2, t_gate(1)),
        on3(2, h()),
        cnot3(0, 1),
        on3(0, t_gate(1)),
        on3(1, t_gate(-1)),
        cnot3(0, 1),
    ])
    .unwrap()
}

/// diag(1,1,1,0) on two wires: a Toffoli with its third wire prepared in |0⟩
/// and postselected on ⟨0|, which zeroes exactly the |11⟩ amplitude.
pub fn drop_eleven() -> Diagram {
    s(
        tensor(id_wires(2), state_zero()),
        s(toffoli(), tensor(id_wires(2), effect_zero())),
    )
}

/// The 1→2 branching node with |0⟩ ↦ |01⟩ + |10⟩ and |1⟩ ↦ |00⟩,
/// i.e. the matrix [[0,1],[1,0],[1,0],[0,0]].
pub fn w_branch() -> Diagram {
    tensor(
        s(x(1, 2, PhaseExpr::pi_rational(1, 1)), drop_eleven()),
        value_sqrt2(),
    )
}

/// The 1→2 splitter |0⟩ ↦ |00⟩, |1⟩ ↦ |01⟩ + |10⟩ (used to add the
/// distinguished entries of two effects).
pub fn sum_splitter() -> Diagram {
    s(x(1, 1, PhaseExpr::pi_rational(1, 1)), w_branch())
}

/// The triangle generator [[1,1],[0,1]] written in the core generators:
/// project the branching node back down and pre-compose a NOT.
pub fn triangle_expansion() -> Diagram {
    let m = s(w_branch(), tensor(z0(1, 0), id()));
    s(x(1, 1, PhaseExpr::pi_rational(1, 1)), m)
}

/// Effect (1, cos β), exactly at rational-π β.
pub fn effect_cos(beta: PhaseExpr) -> Diagram {
    tensor(
        s(
            x0(1, 2),
            tensor(z(1, 0, beta.clone()), z(1, 0, beta.neg())),
        ),
        inv_sqrt2(),
    )
}

/// Effect (1, 2), using the triangle sugar: ⟨0|·▷·▷.
pub fn effect_two() -> Diagram {
    s(s(triangle(), triangle()), effect_zero())
}

/// Effect (1, ½) = (1, cos π/3).
pub fn effect_half() -> Diagram {
    effect_cos(PhaseExpr::pi_rational(1, 3))
}

/// Combine effects (1, u) and (1, v) into (1, u·v) through a copy-fan.
pub fn effect_prod(a: Diagram, b: Diagram) -> Diagram {
    s(z0(1, 2), tensor(a, b))
}

/// Combine effects (1, u) and (1, v) into (1, u + v) through the splitter.
pub fn effect_sum(a: Diagram, b: Diagram) -> Diagram {
    s(sum_splitter(), tensor(a, b))
}

/// Effect (1, k) for a natural number k, by double-and-add.
pub fn effect_int(k: u64) -> Diagram {
    match k {
        0 => effect_zero(),
        1 => z0(1, 0),
        _ if k % 2 == 0 => effect_prod(effect_int(k / 2), effect_two()),
        _ => effect_sum(effect_int(k - 1), z0(1, 0)),
    }
}

/// The two-wire symmetrizer ½(I + SWAP): conjugate diag(1,1,1,0) by the
/// basis change that sends |01⟩±|10⟩ to computational basis states.
pub fn symmetrizer2() -> Diagram {
    let basis = s(tensor(h(), id()), cnot());
    let basis_dag = s(cnot(), tensor(h(), id()));
    s(basis_dag, s(drop_eleven(), basis))
}
