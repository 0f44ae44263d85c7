pub mod ansatz;
pub mod arborescence;
pub mod markov;
pub mod models;
pub mod poly;
pub mod schubert;
pub mod tableaux;
