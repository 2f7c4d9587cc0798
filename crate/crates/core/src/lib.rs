//! Quantifiers of nonclassical correlation in bipartite quantum states:
//! purity-based and observable-locking measures, entropic discord, and the
//! numerical machinery behind them.

pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod locking;
pub mod optim;
pub mod passive;
pub mod states;

pub use error::{QlockError, Result};
