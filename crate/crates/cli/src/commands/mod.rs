pub mod build;
pub mod metrics;
pub mod simulate;
pub mod sweep;
pub mod verify;

use anyhow::Error;

pub const OK: u8 = 0;
pub const CLOSURE_FAIL: u8 = 1;
pub const USAGE: u8 = 2;
pub const BUDGET: u8 = 3;
pub const MISMATCH: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e.downcast_ref::<quorumlab::Error>() {
        Some(quorumlab::Error::Budget { .. }) => BUDGET,
        _ => USAGE,
    }
}
