use std::fmt::Display;

use serde::Serializer;

/// Serializes any `Display` value as a JSON string.
pub fn display_string<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}
