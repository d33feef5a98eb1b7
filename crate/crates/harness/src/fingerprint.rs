use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::HarnessError;

/// JSON with object keys sorted and no whitespace.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    // serde_json's Value map is ordered by key unless `preserve_order` is on.
    let v = serde_json::to_value(value).map_err(HarnessError::runtime)?;
    serde_json::to_string(&v).map_err(HarnessError::runtime)
}

/// Hex SHA-256 of the canonical JSON encoding.
pub fn fingerprint<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    let json = canonical_json(value)?;
    Ok(hex::encode(Sha256::digest(json.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn key_order_does_not_matter() {
        let mut a = HashMap::new();
        a.insert("b", 1);
        a.insert("a", 2);
        let mut b = HashMap::new();
        b.insert("a", 2);
        b.insert("b", 1);
        assert_eq!(fingerprint(&a).unwrap(), fingerprint(&b).unwrap());
        assert_eq!(canonical_json(&a).unwrap(), r#"{"a":2,"b":1}"#);
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            fingerprint(&serde_json::json!({})).unwrap(),
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
    }
}
