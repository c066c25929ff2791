//! Reading the shipped JSON files and writing results back.
//!
//! ```bash
//! cargo run --example json_io
//! ```

use std::path::Path;

use sheafctx::format::{self, Loader, ModelJson, ProcedureJson};

fn main() -> Result<(), format::FormatError> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let model_path = dir.join("triangle_model.json");
    let proc_path = dir.join("triangle_to_square.json");

    let model: ModelJson = format::read_json(&model_path)?;
    let e = Loader::beside(&model_path).model(&model, None)?;
    let f: ProcedureJson = format::read_json(&proc_path)?;
    let f = Loader::beside(&proc_path).procedure(&f)?;

    let pushed = f.pushforward(&e)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&format::model_to_json(&pushed)).expect("serialisable")
    );
    Ok(())
}
