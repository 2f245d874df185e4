pub mod scalars;
pub mod algebras;
pub mod catalog;
pub mod congruence;
pub mod certificates;
pub mod grapher;
