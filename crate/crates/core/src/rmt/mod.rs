//! Random-matrix substrate: seeded GUE, Ginibre and Haar sampling, the block
//! GUE assembly, deterministic-spectrum Choi matrices, spectral utilities and
//! the Monte Carlo compression oracle.

pub mod io;
mod matrix;
mod oracle;
mod sampling;
mod seed;
mod spectrum;

pub use matrix::{BipartiteOperator, HermitianMatrix, HERMITIAN_TOL};
pub use oracle::{free_power_oracle, free_power_oracle_run, OracleRun};
pub(crate) use sampling::{assemble, Assembly};
pub use sampling::{
    build_block_gue, deterministic_diagonal, sample_choi_map, sample_ginibre, sample_gue, sample_haar_isometry,
    sample_haar_unitary, GaussianFamily, GueArray,
};
pub use seed::{GaussianStream, Seed};
pub use spectrum::{spectrum, Histogram, Spectrum};
