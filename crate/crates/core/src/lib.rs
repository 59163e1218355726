pub mod error;
pub mod laurent;
pub mod modular;
pub mod braid;
pub mod burau;
pub mod freegroup;
pub mod garside;
pub mod forkpair;
pub mod search;
pub mod kernelgen;
pub mod distrib;
pub mod reproduce;
