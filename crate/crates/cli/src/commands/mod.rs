pub mod carleman;
pub mod compare;
pub mod estimate;
pub mod laplacian;
pub mod lchs_verify;
pub mod rates;
pub mod simulate;
pub mod sweep;
