pub mod catalog;
pub mod dorth;
pub mod exactnum;
pub mod operators;
pub mod poly;
pub mod series;
pub mod sheffer;
pub mod suite;
