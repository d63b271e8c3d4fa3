//! Acceptance checks for `jetcalc`; run with `cargo test -p jetcalc-validation --test acceptance`.
