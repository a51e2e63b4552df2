//! On-disk JSON representation of a barcode.
//!
//! One file holds one `(image, channel, dimension)` barcode. Deaths are
//! stored capped, so an essential class appears as `death == 256`; loading
//! restores the [`Death::Essential`] marker. Loading validates the whole
//! structure and never trusts the input.

use serde::{Deserialize, Serialize};

use super::{Barcode, Death, HomologyDim, Interval, ESSENTIAL_CAP};
use crate::error::{Error, Result};
use crate::imaging::Channel;

pub const SCHEMA_VERSION: u32 = 1;

/// Serializable form of one barcode, as written to the cache.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarcodeFile {
    pub schema_version: u32,
    pub image_id: String,
    pub channel: Channel,
    pub dimension: u8,
    pub cap: u16,
    pub intervals: Vec<[u16; 2]>,
}

impl BarcodeFile {
    pub fn from_barcode(image_id: &str, channel: Channel, barcode: &Barcode) -> BarcodeFile {
        BarcodeFile {
            schema_version: SCHEMA_VERSION,
            image_id: image_id.to_string(),
            channel,
            dimension: barcode.dimension().index(),
            cap: ESSENTIAL_CAP,
            intervals: barcode
                .intervals()
                .iter()
                .map(|iv| [iv.birth as u16, iv.death_capped()])
                .collect(),
        }
    }

    /// Validate the record and rebuild the in-memory barcode.
    pub fn to_barcode(&self) -> Result<Barcode> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::integrity(format!(
                "unsupported barcode schema version {}",
                self.schema_version
            )));
        }
        if self.image_id.is_empty() {
            return Err(Error::integrity("barcode file has an empty image id"));
        }
        if self.cap != ESSENTIAL_CAP {
            return Err(Error::integrity(format!(
                "barcode file declares cap {}, expected {ESSENTIAL_CAP}",
                self.cap
            )));
        }
        let dimension = HomologyDim::from_index(self.dimension).ok_or_else(|| {
            Error::integrity(format!(
                "barcode dimension {} is not 0 or 1",
                self.dimension
            ))
        })?;

        let mut intervals = Vec::with_capacity(self.intervals.len());
        let mut previous: Option<[u16; 2]> = None;
        for &[birth, death] in &self.intervals {
            if birth > 255 || death > ESSENTIAL_CAP || birth >= death {
                return Err(Error::integrity(format!(
                    "barcode interval [{birth}, {death}) is out of range"
                )));
            }
            if previous.is_some_and(|p| p > [birth, death]) {
                return Err(Error::integrity(
                    "barcode intervals are not sorted by (birth, death)",
                ));
            }
            previous = Some([birth, death]);
            intervals.push(Interval {
                birth: birth as u8,
                death: if death == ESSENTIAL_CAP {
                    Death::Essential
                } else {
                    Death::Finite(death as u8)
                },
            });
        }

        let barcode = Barcode::new(dimension, intervals);
        let essentials = barcode.essential_count();
        let expected = match dimension {
            HomologyDim::Zero => 1,
            HomologyDim::One => 0,
        };
        if essentials != expected {
            return Err(Error::integrity(format!(
                "dimension-{dimension} barcode carries {essentials} essential intervals, expected {expected}"
            )));
        }
        Ok(barcode)
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("barcode serialization cannot fail");
        bytes.push(b'\n');
        bytes
    }

    /// Parse and validate raw bytes; any malformed input is an integrity
    /// error, never a panic.
    pub fn from_json_bytes(bytes: &[u8]) -> Result<BarcodeFile> {
        let file: BarcodeFile = serde_json::from_slice(bytes)
            .map_err(|e| Error::integrity(format!("malformed barcode file: {e}")))?;
        file.to_barcode()?;
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Barcode {
        Barcode::new(
            HomologyDim::Zero,
            vec![Interval::essential(3), Interval::finite(0, 17)],
        )
    }

    #[test]
    fn roundtrips_through_json() {
        let barcode = sample();
        let file = BarcodeFile::from_barcode("img-001", Channel::Gray, &barcode);
        let bytes = file.to_json_bytes();
        let loaded = BarcodeFile::from_json_bytes(&bytes).unwrap();
        assert_eq!(loaded, file);
        assert_eq!(loaded.to_barcode().unwrap(), barcode);
    }

    #[test]
    fn essential_is_stored_as_cap() {
        let file = BarcodeFile::from_barcode("x", Channel::Red, &sample());
        assert_eq!(file.intervals, vec![[0, 17], [3, 256]]);
    }

    #[test]
    fn json_fields_use_plain_names() {
        let file = BarcodeFile::from_barcode("img-001", Channel::Edge, &sample());
        let text = String::from_utf8(file.to_json_bytes()).unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        assert!(text.contains("\"channel\": \"edge\""));
        assert!(text.contains("\"dimension\": 0"));
        assert!(text.contains("\"cap\": 256"));
    }

    #[test]
    fn rejects_malformed_input() {
        let cases: Vec<(&str, Vec<u8>)> = vec![
            ("not json", b"nope".to_vec()),
            ("truncated", b"{\"schema_version\":1".to_vec()),
            (
                "bad dimension",
                make_raw(1, "a", "red", 2, 256, &[[0, 256]]),
            ),
            ("bad cap", make_raw(1, "a", "red", 0, 255, &[[0, 255]])),
            ("bad version", make_raw(9, "a", "red", 0, 256, &[[0, 256]])),
            ("empty id", make_raw(1, "", "red", 0, 256, &[[0, 256]])),
            (
                "unknown channel",
                make_raw(1, "a", "cyan", 0, 256, &[[0, 256]]),
            ),
            (
                "empty interval",
                make_raw(1, "a", "red", 0, 256, &[[5, 5], [0, 256]]),
            ),
            (
                "reversed interval",
                make_raw(1, "a", "red", 0, 256, &[[9, 5], [0, 256]]),
            ),
            (
                "birth out of range",
                make_raw(1, "a", "red", 0, 256, &[[256, 300]]),
            ),
            (
                "unsorted",
                make_raw(1, "a", "red", 0, 256, &[[3, 256], [0, 10]]),
            ),
            (
                "essential in dim 1",
                make_raw(1, "a", "red", 1, 256, &[[0, 256]]),
            ),
            (
                "no essential in dim 0",
                make_raw(1, "a", "red", 0, 256, &[[0, 10]]),
            ),
            (
                "two essentials in dim 0",
                make_raw(1, "a", "red", 0, 256, &[[0, 256], [1, 256]]),
            ),
        ];
        for (label, bytes) in cases {
            assert!(
                BarcodeFile::from_json_bytes(&bytes).is_err(),
                "case `{label}` should be rejected"
            );
        }
    }

    fn make_raw(
        version: u32,
        id: &str,
        channel: &str,
        dim: u8,
        cap: u16,
        intervals: &[[u16; 2]],
    ) -> Vec<u8> {
        serde_json::to_vec(&serde_json::json!({
            "schema_version": version,
            "image_id": id,
            "channel": channel,
            "dimension": dim,
            "cap": cap,
            "intervals": intervals,
        }))
        .unwrap()
    }

    #[test]
    fn dim1_file_roundtrips() {
        let barcode = Barcode::new(
            HomologyDim::One,
            vec![Interval::finite(10, 20), Interval::finite(10, 30)],
        );
        let file = BarcodeFile::from_barcode("img", Channel::Blue, &barcode);
        let loaded = BarcodeFile::from_json_bytes(&file.to_json_bytes()).unwrap();
        assert_eq!(loaded.to_barcode().unwrap(), barcode);
    }
}
