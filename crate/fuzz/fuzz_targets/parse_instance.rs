#![no_main]

use libfuzzer_sys::fuzz_target;

use arrival::format::{parse_instance, serialize_instance};

fuzz_target!(|data: &[u8]| {
    if let Ok(instance) = parse_instance(data) {
        // Whatever the parser accepts must round-trip through the canonical
        // serialization.
        let canonical = serialize_instance(&instance);
        let reparsed = parse_instance(canonical.as_bytes()).expect("canonical form must parse");
        assert_eq!(reparsed, instance);
        assert_eq!(serialize_instance(&reparsed), canonical);
    }
});
