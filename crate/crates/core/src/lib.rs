pub mod arith;
pub mod smith;
pub mod modpid;
pub mod taxonomy;
pub mod matring;
pub mod oracle;
pub mod wire;
