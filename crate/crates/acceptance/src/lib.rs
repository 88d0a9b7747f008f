//! Holds the `acceptance` test target; run it with
//! `cargo test -p bsa-acceptance --test acceptance`.
