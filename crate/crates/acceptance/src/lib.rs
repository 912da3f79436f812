//! Host package for the `acceptance` test target; the suite lives in
//! `crates/core/tests/acceptance.rs`.
