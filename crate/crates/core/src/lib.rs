pub mod cli;
pub mod gradedalg;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod spectrum;
pub mod superrep;
