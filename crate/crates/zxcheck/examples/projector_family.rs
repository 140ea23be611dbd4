//! The symmetric-subspace projectors P_r and the θ_r states they fix.

use zxcheck::diagram::PhaseExpr;
use zxcheck::exactnum::rank;
use zxcheck::paramlin::theta;
use zxcheck::projector::{p_matrix, r_matrix, vandermonde_basis};
use zxcheck::semantics::interp_exact;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The two-wire symmetrizer ½(I + SWAP) and its r-wire iterate.
    println!("R =\n{}", r_matrix());

    for r in 2..=4usize {
        let family = p_matrix(r);
        let p = &family.matrix;
        assert!(p.mul(p)?.try_eq(p)?, "P_{r} is idempotent");
        println!("P_{r}: {}×{} matrix of rank {}", p.rows(), p.cols(), rank(p));

        // θ_r(α) = r single-wire states of angle α, jointly symmetric — so the
        // projector leaves them alone.
        let state = interp_exact(&theta(r, PhaseExpr::pi_rational(2, 7)))?;
        assert!(p.mul(&state)?.try_eq(&state)?);
        println!("  P_{r} · θ_{r}(2π/7) = θ_{r}(2π/7)  (exact)");

        // Columns indexed by bit-words containing "01" span the kernel.
        let dim = 1usize << r;
        let kernel_cols = (0..dim)
            .filter(|&c| (0..dim).all(|row| p.get(row, c).is_zero()))
            .count();
        println!("  kernel columns: {kernel_cols} of {dim}");
    }

    // Stacking θ_r(jπ/r) for j = 0..r gives r+1 linearly independent states:
    // the Vandermonde structure underlying the grid decision procedure.
    let r = 4;
    let basis = vandermonde_basis(r);
    let dim = 1usize << r;
    let mut stacked = zxcheck::exactnum::ExactMatrix::zeros(dim, r + 1, 8);
    for (j, v) in basis.iter().enumerate() {
        for i in 0..dim {
            stacked.set(i, j, v.get(i, 0).clone());
        }
    }
    println!("θ_4(jπ/4) stack has rank {} (full)", rank(&stacked));
    Ok(())
}
