use factorium::algebra::{algebra_to_json, parse_algebra};
use factorium::gallery::build_l;

#[test]
fn l2_file_matches_gallery() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/L2.json")).unwrap();
    let a = parse_algebra(&text).unwrap();
    assert_eq!(a, build_l(2, false).unwrap());
    assert_eq!(parse_algebra(&algebra_to_json(&a)).unwrap(), a);
}
