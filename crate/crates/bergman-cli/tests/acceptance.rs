//! One pass/fail line per acceptance criterion; exits non-zero on failure.

fn main() {
    let seed = std::env::var("BERGMAN_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1);
    let criteria = bergman_cli::suite::acceptance(seed);
    for c in &criteria {
        println!("{}", c.line());
    }
    let failed = criteria.iter().filter(|c| !c.passed).count();
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
