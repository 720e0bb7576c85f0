mod common;

use common::{check_case, golden_cases};

#[test]
fn outputs_match_goldens() {
    let failures: Vec<String> = golden_cases().iter().filter_map(|c| check_case(c).err()).collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
