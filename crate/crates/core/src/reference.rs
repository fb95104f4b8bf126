//! Literal transcriptions of published tables, used as test oracles.
//!
//! Nothing here is computed; entries are copied verbatim so that the
//! generic constructions can be checked against them.

use crate::fock::{Spin, SpinOrbital};

const fn o(dot: u8, spin: Spin) -> SpinOrbital {
    SpinOrbital { dot, spin }
}

const U1: SpinOrbital = o(1, Spin::Up);
const U2: SpinOrbital = o(2, Spin::Up);
const U3: SpinOrbital = o(3, Spin::Up);
const D1: SpinOrbital = o(1, Spin::Down);
const D2: SpinOrbital = o(2, Spin::Down);
const D3: SpinOrbital = o(3, Spin::Down);

/// One reference matrix element `⟨to| d†_op |from⟩ = sign`.
#[derive(Debug, Clone, Copy)]
pub struct CreationEntry {
    pub op: SpinOrbital,
    pub to: &'static [SpinOrbital],
    pub from: &'static [SpinOrbital],
    pub sign: i8,
}

const fn e(op: SpinOrbital, to: &'static [SpinOrbital], from: &'static [SpinOrbital], sign: i8) -> CreationEntry {
    CreationEntry { op, to, from, sign }
}

/// The 36 reference elements of the six creation operators on the ≤2-electron space.
pub const CREATION_TABLE: [CreationEntry; 36] = [
    e(U1, &[U1], &[], 1),
    e(U1, &[U1, U2], &[U2], 1),
    e(U1, &[U1, U3], &[U3], 1),
    e(U1, &[U1, D1], &[D1], 1),
    e(U1, &[U1, D2], &[D2], 1),
    e(U1, &[U1, D3], &[D3], 1),
    e(U2, &[U2], &[], 1),
    e(U2, &[U1, U2], &[U1], -1),
    e(U2, &[U2, U3], &[U3], 1),
    e(U2, &[U2, D1], &[D1], 1),
    e(U2, &[U2, D2], &[D2], 1),
    e(U2, &[U2, D3], &[D3], 1),
    e(U3, &[U3], &[], 1),
    e(U3, &[U1, U3], &[U1], -1),
    e(U3, &[U2, U3], &[U2], -1),
    e(U3, &[U3, D1], &[D1], 1),
    e(U3, &[U3, D2], &[D2], 1),
    e(U3, &[U3, D3], &[D3], 1),
    e(D1, &[D1], &[], 1),
    e(D1, &[U1, D1], &[U1], -1),
    e(D1, &[U2, D1], &[U2], -1),
    e(D1, &[U3, D1], &[U3], -1),
    e(D1, &[D1, D2], &[D2], 1),
    e(D1, &[D1, D3], &[D3], 1),
    e(D2, &[D2], &[], 1),
    e(D2, &[U1, D2], &[U1], -1),
    e(D2, &[U2, D2], &[U2], -1),
    e(D2, &[U3, D2], &[U3], -1),
    e(D2, &[D1, D2], &[D1], -1),
    e(D2, &[D2, D3], &[D3], 1),
    e(D3, &[D3], &[], 1),
    e(D3, &[U1, D3], &[U1], -1),
    e(D3, &[U2, D3], &[U2], -1),
    e(D3, &[U3, D3], &[U3], -1),
    e(D3, &[D1, D3], &[D1], -1),
    e(D3, &[D2, D3], &[D2], -1),
];

/// Basis order of the opposite-spin two-electron block.
pub const OPPOSITE_SPIN_ORDER: [[SpinOrbital; 2]; 9] = [
    [U1, D1],
    [U1, D2],
    [U2, D1],
    [U2, D2],
    [U3, D3],
    [U1, D3],
    [U2, D3],
    [U3, D1],
    [U3, D2],
];

/// Basis order of the parallel-spin block (spin up).
pub const PARALLEL_ORDER: [[SpinOrbital; 2]; 3] = [[U1, U2], [U1, U3], [U2, U3]];

const S2: f64 = std::f64::consts::SQRT_2;
const S3: f64 = 1.732_050_807_568_877_2;
const S6: f64 = 2.449_489_742_783_178;

/// Rows of the symmetric-case transformation matrix, verbatim (to be scaled by 1/4).
pub const W_S_ROWS: [[f64; 9]; 9] = [
    [-1.0, -1.0, -1.0, -1.0, -2.0, S2, S2, S2, S2],
    [1.0, 1.0, 1.0, 1.0, 2.0, S2, S2, S2, S2],
    [S2, -S2, S2, -S2, 0.0, 0.0, 0.0, -2.0, 2.0],
    [S2, S2, -S2, -S2, 0.0, -2.0, 2.0, 0.0, 0.0],
    [-S2, S2, -S2, S2, 0.0, 0.0, 0.0, -2.0, 2.0],
    [-S2, -S2, S2, S2, 0.0, 2.0, 2.0, 0.0, 0.0],
    [0.0, 0.0, -2.0, 0.0, 0.0, -2.0, 0.0, 2.0, 2.0],
    [-S2, -S2, -S2, -S2, 2.0 * S2, 0.0, 0.0, 0.0, 0.0],
    [-2.0, 2.0, 2.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0],
];
pub const W_S_SCALE: f64 = 0.25;
/// Reference eigenvalues in row order, in units of T.
pub const W_S_EIGENVALUES: [f64; 9] = [-2.0 * S2, 2.0 * S2, -S2, -S2, S2, S2, 0.0, 0.0, 0.0];

/// Rows of the antisymmetric-case transformation matrix, verbatim (to be scaled by 1/6).
pub const W_A_ROWS: [[f64; 9]; 9] = [
    [1.0, 1.0, 1.0, 1.0, 4.0, 2.0, 2.0, 2.0, 2.0],
    [-S3, S3, -S3, S3, 0.0, 0.0, 0.0, -2.0 * S3, 2.0 * S3],
    [-S3, -S3, S3, S3, 0.0, -2.0 * S3, 2.0 * S3, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, -3.0, -3.0, 3.0, 3.0],
    [-2.0, -2.0, -2.0, -2.0, 4.0, -1.0, -1.0, -1.0, -1.0],
    [-2.0, -2.0, -2.0, -2.0, -2.0, 2.0, 2.0, 2.0, 2.0],
    [-3.0, 3.0, 3.0, -3.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [S6, -S6, S6, -S6, 0.0, 0.0, 0.0, -S6, S6],
    [S6, S6, -S6, -S6, 0.0, -S6, S6, 0.0, 0.0],
];
pub const W_A_SCALE: f64 = 1.0 / 6.0;
/// Reference eigenvalues in row order, in units of T.
pub const W_A_EIGENVALUES: [f64; 9] = [4.0, 2.0, 2.0, 1.0, 1.0, -2.0, 0.0, -1.0, -1.0];

/// The reference symmetric-case dark state, in the opposite-spin order (to be scaled by 1/2).
pub const SYMMETRIC_DARK_STATE: [f64; 9] = [1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];

/// Quoted headline numbers for the antisymmetric preset at Γ₃ = 0.5, ω_m = 2T.
pub const QUOTED_A_MINUS: f64 = 4.577;
pub const QUOTED_A_PLUS: f64 = 5e-3;
pub const QUOTED_N_SS: f64 = 1.3e-3;
pub const QUOTED_T_M_MK: f64 = 0.72;
pub const QUOTED_COOLING_TIME_S: f64 = 4.4e-8;
pub const QUOTED_FIG2_MIN_DELTA2_2: f64 = 0.006;
