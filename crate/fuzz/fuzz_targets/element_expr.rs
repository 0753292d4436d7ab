#![no_main]

use std::sync::OnceLock;

use hopfx::models::{self, Model};

fn model() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(|| models::build("uqsl2:2").expect("model"))
}

libfuzzer_sys::fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = hopfx::expr::model_env(model()).eval(s);
    }
});
