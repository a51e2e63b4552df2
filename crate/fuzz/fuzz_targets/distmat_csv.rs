//! Distance-matrix CSVs are revalidated on load (squareness, symmetry,
//! finiteness); arbitrary bytes must error out cleanly. Accepted inputs
//! must survive a write/read round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use toposig::metrics::DistanceMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(dmat) = DistanceMatrix::from_csv_bytes(data) {
        let bytes = dmat.to_csv_bytes();
        let reparsed = DistanceMatrix::from_csv_bytes(&bytes).expect("round trip parses");
        assert_eq!(reparsed.ids(), dmat.ids());
    }
});
