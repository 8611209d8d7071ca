//! Exact computation of the ellipsoid embedding capacity function.

pub mod num;
pub mod quadratic;
pub mod cfrac;
pub mod weights;
pub mod classes;
pub mod fib;
pub mod ech;
pub mod tables;
pub mod search;
pub mod report;
pub mod capacity;
