//! Holds the acceptance integration target; see `tests/acceptance.rs`.
