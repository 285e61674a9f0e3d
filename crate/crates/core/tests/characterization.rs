mod common;

#[test]
fn safe_iff_homogeneous_and_incrementally_bound() {
    let o = common::characterization::characterization();
    println!("{}", o);
    assert!(o.passed(), "{}", o);
    assert_eq!(o.applicable, o.cases);
}
