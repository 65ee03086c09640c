#![allow(dead_code)]

pub mod corpus;
pub mod oracles;
pub mod scenes;
