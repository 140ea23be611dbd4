//! Arithmetic in ℚ(ζ): the exact scalars behind the integer-free backend.
//!
//! Every phase e^{iπp/q} lives in a cyclotomic field of order 2q (lifted to a
//! common multiple with 8 so the √2 normalizations stay representable). This
//! example exercises the ring operations and the places exactness runs out.

use num_bigint::BigInt;
use num_rational::BigRational;
use zxcheck::exactnum::{rank, Cyclotomic, ExactMatrix, MAX_ORDER};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // e^{iπ/4} · e^{iπ/4} = i, checked without a single float
    let t = Cyclotomic::phase_pi(1, 4)?;
    let i = Cyclotomic::phase_pi(1, 2)?;
    assert!((&t * &t).try_equal(&i)?);
    println!("e^(iπ/4)² = {}", &t * &t);

    // 1/√2 = cos(π/4) as a half-sum of conjugate phases
    let half = Cyclotomic::from_rational(BigRational::new(BigInt::from(1), BigInt::from(2)), 8);
    let inv_sqrt2 = &(&t + &Cyclotomic::phase_pi(-1, 4)?) * &half;
    assert!((&inv_sqrt2 * &inv_sqrt2).try_equal(&half)?);
    println!("(1/√2)² = {}", &inv_sqrt2 * &inv_sqrt2);

    // Mixed orders lift automatically: order 8 times order 14 lands in 56.
    let seventh = Cyclotomic::phase_pi(2, 7)?;
    let product = &t * &seventh;
    println!("e^(iπ/4)·e^(2iπ/7) has order {}", product.order());

    // … but only up to the cap; past it the exact backend refuses.
    println!("order cap: {MAX_ORDER}");
    assert!(Cyclotomic::phase_pi(1, 121).is_err());

    // Exact linear algebra: fraction-free rank of a Vandermonde-like stack.
    let mut m = ExactMatrix::zeros(3, 3, 8);
    for (row, num) in [(0usize, 0i64), (1, 1), (2, 2)] {
        m.set(row, 0, Cyclotomic::one(8));
        let p = Cyclotomic::phase_pi(num, 4)?;
        m.set(row, 1, p.clone());
        m.set(row, 2, &p * &p);
    }
    println!("rank of the 3×3 phase Vandermonde: {}", rank(&m));
    assert_eq!(rank(&m), 3);
    Ok(())
}
