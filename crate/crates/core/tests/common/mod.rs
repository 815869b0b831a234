#![allow(dead_code)]

pub mod dense;
pub mod oracle;

use flagqec::protocol::{Protocol, ProtocolName};

pub fn shipped() -> Vec<Protocol> {
    ProtocolName::ALL.iter().map(|&n| Protocol::shipped(n).expect("shipped protocol builds")).collect()
}
