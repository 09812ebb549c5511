#![no_main]

use libfuzzer_sys::fuzz_target;

use arrival::format::{bind_flow, parse_flow_csv};
use arrival::instance::{ArrivalInstance, Destination, VertexId};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = parse_flow_csv(data) else {
        return;
    };
    // Bind against a fixed two-vertex instance; binding must reject rather
    // than panic on rows that do not match its edges.
    let instance = ArrivalInstance::new(
        2,
        0,
        vec![VertexId::Proper(1), VertexId::Proper(0)],
        vec![
            VertexId::Dest(Destination::Dbar),
            VertexId::Dest(Destination::D),
        ],
    )
    .unwrap();
    let _ = bind_flow(&rows, &instance);
});
