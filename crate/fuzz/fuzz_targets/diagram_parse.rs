#![no_main]

libfuzzer_sys::fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(node) = hopfx::zxdsl::parse(s) {
            let _ = node.arity();
            assert_eq!(hopfx::zxdsl::parse(&node.to_string()).as_ref(), Ok(&node));
        }
        let _ = hopfx::zxdsl::parse_diagram_file(s);
    }
});
