//! Acceptance checks for `laacoex` live in `tests/acceptance.rs`.
