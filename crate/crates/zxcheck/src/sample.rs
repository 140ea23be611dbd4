//! Seeded random generators for diagrams, phases, and assignments.
//!
//! These power the property tests and a couple of the examples. Everything is
//! deterministic given the seed (ChaCha-based), so failures reproduce.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{
    self, id, id_wires, tensor, tensor_many, x, z, AngleValue, Assignment, Diagram, PhaseExpr,
};
use crate::zw::{zw_id, zw_seq, zw_spider, zw_tensor, zw_tensor_many, zw_w21, zw_wdot, ZwDiagram};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Which constants a generated phase may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhasePool {
    /// Integer multiples of π/4 only.
    Pi4,
    /// Rational multiples of π with small denominators.
    RationalPi,
    /// Mostly rational-π with occasional floating-point radians.
    Mixed,
}

pub fn random_phase(rng: &mut ChaCha8Rng, pool: PhasePool) -> PhaseExpr {
    match pool {
        PhasePool::Pi4 => PhaseExpr::pi_rational(rng.gen_range(0..8), 4),
        PhasePool::RationalPi => {
            let den = *[1u64, 2, 3, 4, 6, 8].get(rng.gen_range(0..6)).unwrap();
            PhaseExpr::pi_rational(rng.gen_range(0..2 * den as i64), den)
        }
        PhasePool::Mixed => {
            if rng.gen_bool(0.3) {
                PhaseExpr::radians(rng.gen_range(0.0..std::f64::consts::TAU))
            } else {
                random_phase(rng, PhasePool::RationalPi)
            }
        }
    }
}

fn random_circuit_piece(rng: &mut ChaCha8Rng, pool: PhasePool, width: usize) -> (Diagram, usize) {
    // returns (piece, wires consumed); pieces are width-preserving
    if width >= 2 && rng.gen_bool(0.3) {
        let piece = match rng.gen_range(0..3) {
            0 => diagram::swap(),
            1 => z(2, 2, random_phase(rng, pool)),
            _ => x(2, 2, random_phase(rng, pool)),
        };
        (piece, 2)
    } else {
        let piece = match rng.gen_range(0..5) {
            0 => id(),
            1 => diagram::h(),
            2 => diagram::triangle(),
            3 => z(1, 1, random_phase(rng, pool)),
            _ => x(1, 1, random_phase(rng, pool)),
        };
        (piece, 1)
    }
}

fn random_layer(rng: &mut ChaCha8Rng, pool: PhasePool, width: usize) -> Diagram {
    let mut remaining = width;
    let mut parts = Vec::new();
    while remaining > 0 {
        let (piece, used) = random_circuit_piece(rng, pool, remaining);
        parts.push(piece);
        remaining -= used;
    }
    tensor_many(parts)
}

/// A random ground diagram with `inputs ≤ width` and `outputs ≤ width`,
/// built as a width-preserving circuit padded by states and effects.
pub fn random_ground_diagram(
    rng: &mut ChaCha8Rng,
    pool: PhasePool,
    width: usize,
    layers: usize,
) -> Diagram {
    let width = width.max(1);
    let inputs = rng.gen_range(0..=width);
    let outputs = rng.gen_range(0..=width);
    let pad_in = tensor(
        id_wires(inputs),
        tensor_many((inputs..width).map(|_| {
            if rng.gen_bool(0.5) {
                z(0, 1, random_phase(rng, pool))
            } else {
                x(0, 1, random_phase(rng, pool))
            }
        })),
    );
    let mut d = pad_in;
    for _ in 0..layers {
        d = diagram::seq(d, random_layer(rng, pool, width)).expect("widths agree");
    }
    let pad_out = tensor(
        id_wires(outputs),
        tensor_many((outputs..width).map(|_| {
            if rng.gen_bool(0.5) {
                z(1, 0, random_phase(rng, pool))
            } else {
                x(1, 0, random_phase(rng, pool))
            }
        })),
    );
    diagram::seq(d, pad_out).expect("widths agree")
}

/// A random diagram whose phases are affine in the given variables with small
/// integer coefficients and π/4 constants. `budget` caps the total absolute
/// coefficient mass per variable, which bounds the multiplicity of the
/// equations built from these diagrams.
pub fn random_linear_diagram(
    rng: &mut ChaCha8Rng,
    vars: &[&str],
    width: usize,
    layers: usize,
    budget: u32,
) -> Diagram {
    let width = width.max(1);
    let mut remaining: Vec<u32> = vars.iter().map(|_| budget).collect();
    let mut linear_phase = |rng: &mut ChaCha8Rng| {
        let mut p = PhaseExpr::pi_rational(rng.gen_range(0..8), 4);
        for (i, v) in vars.iter().enumerate() {
            if remaining[i] > 0 && rng.gen_bool(0.45) {
                let max = remaining[i].min(2) as i64;
                let mag = rng.gen_range(1..=max);
                let c = if rng.gen_bool(0.5) { mag } else { -mag };
                remaining[i] -= mag as u32;
                p = p.add(&PhaseExpr::var_scaled(*v, c));
            }
        }
        p
    };
    let inputs = rng.gen_range(0..=width);
    let outputs = rng.gen_range(0..=width);
    let pad_in = tensor(
        id_wires(inputs),
        tensor_many((inputs..width).map(|_| z(0, 1, linear_phase(rng)))),
    );
    let mut d = pad_in;
    for _ in 0..layers {
        let mut remaining = width;
        let mut parts = Vec::new();
        while remaining > 0 {
            if remaining >= 2 && rng.gen_bool(0.25) {
                parts.push(diagram::swap());
                remaining -= 2;
            } else {
                parts.push(match rng.gen_range(0..4) {
                    0 => diagram::h(),
                    1 => z(1, 1, linear_phase(rng)),
                    2 => x(1, 1, linear_phase(rng)),
                    _ => id(),
                });
                remaining -= 1;
            }
        }
        d = diagram::seq(d, tensor_many(parts)).expect("widths agree");
    }
    let pad_out = tensor(
        id_wires(outputs),
        tensor_many((outputs..width).map(|_| z(1, 0, linear_phase(rng)))),
    );
    diagram::seq(d, pad_out).expect("widths agree")
}

/// Random assignment of rational-π angles (denominator ≤ 6) to variables.
pub fn random_rational_assignment(rng: &mut ChaCha8Rng, vars: &[String]) -> Assignment {
    vars.iter()
        .map(|v| {
            let den = *[1u64, 2, 3, 4, 6].get(rng.gen_range(0..5)).unwrap();
            (
                v.clone(),
                AngleValue::PiRational(rng.gen_range(0..2 * den as i64), den),
            )
        })
        .collect()
}

/// Random assignment of floating-point angles to variables.
pub fn random_float_assignment(rng: &mut ChaCha8Rng, vars: &[String]) -> Assignment {
    vars.iter()
        .map(|v| {
            (
                v.clone(),
                AngleValue::Radians(rng.gen_range(0.0..std::f64::consts::TAU)),
            )
        })
        .collect()
}

/// A random white-spider parameter: a mix of exactly-representable values
/// (unit phases at rational angles, dyadic rationals) and arbitrary complex
/// numbers.
pub fn random_zw_param(rng: &mut ChaCha8Rng) -> Complex64 {
    match rng.gen_range(0..4) {
        0 => {
            let den = *[1i64, 2, 3, 4, 6].get(rng.gen_range(0..5)).unwrap();
            Complex64::from_polar(
                1.0,
                std::f64::consts::PI * rng.gen_range(-den..=den) as f64 / den as f64,
            )
        }
        1 => Complex64::new(
            rng.gen_range(-8i64..=8) as f64 / (1u64 << rng.gen_range(0..3)) as f64,
            0.0,
        ),
        2 => Complex64::from_polar(
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ),
        _ => Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
    }
}

fn random_zw_piece(rng: &mut ChaCha8Rng, width: usize) -> (ZwDiagram, usize) {
    // returns (piece, wires consumed); pieces are width-preserving
    if width >= 2 && rng.gen_bool(0.3) {
        let piece = match rng.gen_range(0..3) {
            0 => ZwDiagram::Swap,
            1 => ZwDiagram::FermionicCross,
            _ => zw_spider(2, 2, random_zw_param(rng)),
        };
        (piece, 2)
    } else {
        let piece = match rng.gen_range(0..4) {
            0 => zw_id(),
            1 => ZwDiagram::W11,
            2 => zw_seq(ZwDiagram::W12, zw_w21()).expect("branch then merge is 1→1"),
            _ => zw_spider(1, 1, random_zw_param(rng)),
        };
        (piece, 1)
    }
}

/// A random white-spider term with `inputs ≤ width` and `outputs ≤ width`,
/// built like [`random_ground_diagram`]: a width-preserving circuit padded
/// by spider states and effects, with an occasional scalar dot.
pub fn random_zw_diagram(rng: &mut ChaCha8Rng, width: usize, layers: usize) -> ZwDiagram {
    let width = width.max(1);
    let inputs = rng.gen_range(0..=width);
    let outputs = rng.gen_range(0..=width);
    let pad_in = zw_tensor_many(
        (0..inputs)
            .map(|_| zw_id())
            .chain((inputs..width).map(|_| zw_spider(0, 1, random_zw_param(rng)))),
    );
    let mut d = pad_in;
    for _ in 0..layers {
        let mut remaining = width;
        let mut parts = Vec::new();
        while remaining > 0 {
            let (piece, used) = random_zw_piece(rng, remaining);
            parts.push(piece);
            remaining -= used;
        }
        d = zw_seq(d, zw_tensor_many(parts)).expect("widths agree");
    }
    let pad_out = zw_tensor_many(
        (0..outputs)
            .map(|_| zw_id())
            .chain((outputs..width).map(|_| zw_spider(1, 0, random_zw_param(rng)))),
    );
    d = zw_seq(d, pad_out).expect("widths agree");
    if rng.gen_bool(0.2) {
        d = zw_tensor(d, zw_wdot(random_zw_param(rng)));
    }
    d
}
