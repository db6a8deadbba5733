//! Shared fixtures for unit tests.

use crate::property::PropertyArray;
use crate::seq::{parse_weighted_sequence, WeightedSequence};

pub const TABLE1_TEXT: &str = "\
WSEQ 6 AB
A:1.0
A:0.5 B:0.5
A:0.75 B:0.25
A:0.8 B:0.2
A:0.5 B:0.5
A:0.25 B:0.75
";

/// The running six-position example over {A, B}.
pub fn table1() -> WeightedSequence {
    parse_weighted_sequence(TABLE1_TEXT).unwrap()
}

/// A correct estimation family for [`table1`] with z = 4: four strings with
/// their property arrays.
pub fn table2_family() -> (Vec<Vec<u8>>, Vec<PropertyArray>) {
    let strings = vec![
        b"AAAAAA".to_vec(),
        b"AAAAAB".to_vec(),
        b"ABAABB".to_vec(),
        b"ABBBBB".to_vec(),
    ];
    let props = vec![
        PropertyArray::new(vec![2, 2, 3, 4, 5, 6], 6).unwrap(),
        PropertyArray::new(vec![4, 4, 5, 6, 6, 6], 6).unwrap(),
        PropertyArray::new(vec![4, 4, 5, 6, 6, 6], 6).unwrap(),
        PropertyArray::new(vec![2, 2, 3, 3, 5, 6], 6).unwrap(),
    ];
    let strings = strings
        .into_iter()
        .map(|s| s.iter().map(|&c| c - b'A').collect())
        .collect();
    (strings, props)
}
