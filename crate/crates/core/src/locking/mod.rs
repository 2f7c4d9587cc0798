//! Purity-based quantifiers, observable locking, entropic discord and the
//! Werner sweep.

pub mod discord;
pub mod observable;
pub mod purity;
pub mod sweep;

pub use discord::{discord_entropic, werner_discord_closed_form, werner_discord_spectral};
pub use observable::{
    conditional_spectrum, lu_invariance_check, observable_locking, observable_locking_bruteforce,
    observable_locking_corollary1, observable_locking_theorem3, pin_branch_value, theorem3_objective,
    LockingDiagnostics, LockingMethod, LockingReport,
};
pub use purity::{
    free_purity_entropy_gap, mutual_information, purity_extractable, purity_gap_global_local, purity_locking,
    purity_report, PurityChannelParams, PurityReport,
};
pub use sweep::{oracle_compare, parse_alpha_range, werner_sweep, write_sweep_csv, OracleSummary, SweepOptions, WernerRow};
