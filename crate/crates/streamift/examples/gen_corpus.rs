//! Regenerates the seeded guarded systems bundled under `systems/`.
//!
//! Run from the workspace root: `cargo run --example gen_corpus`.
//! The files are committed; rerunning must be a no-op.

use std::fs;
use std::path::Path;

use streamift::gen::random_guarded_system;

const MASTER_SEED: u64 = 0x5712A9;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../systems");
    for idx in 1..=10u64 {
        let n = (idx as usize - 1) % 4 + 1;
        let sys = random_guarded_system(MASTER_SEED + idx, n);
        let mut text = format!(
            "# Guarded system {idx:02} (seed {:#x}): y_i = c_i + x*p_i form,\n# solvable at r0 = c by construction.\n",
            MASTER_SEED + idx
        );
        text.push_str(&sys.render_file());
        let path = dir.join(format!("guarded{idx:02}.sys"));
        fs::write(&path, text).expect("write corpus file");
        println!("wrote {}", path.display());
    }
}
