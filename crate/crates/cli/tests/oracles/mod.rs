//! Reference implementations used to cross-check the library. They are
//! deliberately naive.
#![allow(dead_code)]

pub mod counts;
pub mod enumerate;
pub mod naive_bisim;
