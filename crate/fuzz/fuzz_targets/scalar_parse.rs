#![no_main]

use hopfx::scalar::CycScalar;

libfuzzer_sys::fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = s.parse::<CycScalar>() {
            assert_eq!(CycScalar::parse(x.order(), &x.render()).as_ref(), Ok(&x));
        }
    }
});
