pub mod scalar;
pub mod tensor;
pub mod report;
pub mod hopf;
pub mod models;
pub mod frobenius;
pub mod fhopf;
pub mod star;
pub mod hadamard;
pub mod expr;
pub mod braided;
pub mod zxdsl;
pub mod tables;
pub mod suites;
