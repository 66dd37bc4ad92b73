#![allow(dead_code)]

pub mod fixture;
pub mod ray;
pub mod synth;
