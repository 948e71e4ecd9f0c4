//! Saves a builtin world as JSON, loads it back and checks nothing changed.

use prrt::scenarios::{builtin, Scenario, BUILTIN_NAMES};

fn main() -> prrt::Result<()> {
    let dir = std::env::temp_dir();
    for name in BUILTIN_NAMES {
        let s = builtin(name)?;
        let file = dir.join(format!("{name}.json"));
        s.save(&file)?;
        let back = Scenario::load(&file)?;
        assert_eq!(back, s);
        println!("{name:<24} {}D, {:>4} obstacles, round trip ok", s.dimension(), s.env.obstacles().len());
    }
    Ok(())
}
