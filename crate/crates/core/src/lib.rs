pub mod backend;
pub mod channels;
pub mod cli;
pub mod foxh;
pub mod metrics;
pub mod mixtures;
pub mod montecarlo;
pub mod quadrature;
pub mod special;
