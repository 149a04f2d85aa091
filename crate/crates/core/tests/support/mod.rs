#![allow(dead_code)]

pub mod bgp;
pub mod fixture;
pub mod gen;
