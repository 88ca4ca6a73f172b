//! CSV report formatting: locale-free numbers at 17 significant digits
//! (bit-faithful for f64 round-trips) and the FNV-1a config hash that every
//! report row carries for provenance.

/// Format a double with 17 significant digits, '.' separator, no locale.
/// Parsing the result back yields the identical bit pattern.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    format!("{x:.16e}")
}

/// 64-bit FNV-1a over a byte string; used to stamp report rows with the
/// hash of the config that produced them.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Minimal CSV assembly: a header plus rows of preformatted cells.
/// Cells are written verbatim; callers only emit numbers and identifiers,
/// neither of which needs quoting.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: Vec<S>) -> CsvTable {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }
}

impl std::fmt::Display for CsvTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn f64_formatting_round_trips_bit_exactly() {
        let mut rng = SplitMix64::new(99);
        let mut checked = 0;
        while checked < 1000 {
            let bits = rng.next_u64();
            let x = f64::from_bits(bits);
            if !x.is_finite() {
                continue;
            }
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} reformatted as {}", fmt_f64(x));
            checked += 1;
        }
        assert_eq!(fmt_f64(0.0), "0");
        let back: f64 = fmt_f64(0.125).parse().unwrap();
        assert_eq!(back, 0.125);
    }

    #[test]
    fn fnv_hash_is_stable() {
        // Reference vectors for 64-bit FNV-1a.
        assert_eq!(fnv1a_64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a_64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a_64(b"hello"), 0xa430d84680aabd0b);
    }

    #[test]
    fn csv_table_layout() {
        let mut t = CsvTable::new(vec!["a", "b"]);
        t.push_row(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_string(), "a,b\n1,2\n");
    }
}
