//! `hedonic`: command-line front end for coalition-formation games —
//! popularity margins and verification, popular-partition search, and the
//! formula-to-game compilers with their audit harness.

fn main() {
    std::process::exit(hedonic_cli::cli::run());
}
