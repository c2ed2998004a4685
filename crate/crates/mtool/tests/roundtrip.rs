//! Render/parse round trips over generated corpora of every object kind.

use mtool::formats::{parse_object, render_object, InputObject};
use mtool_core::rat::{rat, rat_int};
use mtool_core::spine::SpineMeasure;
use mtool_core::testutil::Gen;
use mtool_core::weights::WeightKind;
use mtool_core::{BitPath, Rat};

fn assert_round_trip(obj: &InputObject) {
    let text = render_object(obj);
    let back = parse_object(&text, 16)
        .unwrap_or_else(|e| panic!("rendered form failed to parse: {e}\n{text}"));
    match (obj, &back) {
        (InputObject::Weight(a), InputObject::Weight(b)) => assert_eq!(a, b, "{text}"),
        (InputObject::Ideal(a), InputObject::Ideal(b)) => assert_eq!(a, b, "{text}"),
        (InputObject::Measure(a), InputObject::Measure(b)) => assert_eq!(a, b, "{text}"),
        (InputObject::Spine(a), InputObject::Spine(b)) => assert_eq!(a, b, "{text}"),
        _ => panic!("kind changed across the round trip: {text}"),
    }
    // Rendering the reparsed object is byte-identical.
    assert_eq!(render_object(&back), text);
}

#[test]
fn weight_functions_round_trip() {
    let mut gen = Gen::new(21);
    for _ in 0..40 {
        let depth = 1 + gen.below(6) as usize;
        assert_round_trip(&InputObject::Weight(gen.weight_fn(depth, 40)));
    }
    // An M-kind function with zero and one values.
    let table = [
        (BitPath::parse("0").unwrap(), rat_int(0)),
        (BitPath::parse("1").unwrap(), rat_int(1)),
    ]
    .into_iter()
    .collect();
    let w = mtool_core::weights::WeightFn::new(3, table, rat(1, 2), WeightKind::M).unwrap();
    assert_round_trip(&InputObject::Weight(w));
}

#[test]
fn ideals_round_trip() {
    let mut gen = Gen::new(22);
    for _ in 0..40 {
        let depth = 2 + gen.below(4) as usize;
        assert_round_trip(&InputObject::Ideal(gen.ideal(depth)));
    }
}

#[test]
fn measures_round_trip() {
    let mut gen = Gen::new(23);
    for _ in 0..40 {
        let depth = gen.below(6) as usize;
        assert_round_trip(&InputObject::Measure(gen.finite_measure(depth)));
    }
}

#[test]
fn spines_round_trip() {
    let mut gen = Gen::new(24);
    for _ in 0..40 {
        assert_round_trip(&InputObject::Spine(gen.good_spine(16)));
    }
    assert_round_trip(&InputObject::Spine(SpineMeasure::nu_example()));
    // Explicit head part before the tail.
    let with_head = SpineMeasure::new(
        BitPath::parse("1").unwrap(),
        BitPath::parse("01").unwrap(),
        vec![rat_int(1), rat(3, 7)],
        Rat::from_integer(0.into()),
        rat_int(1),
        rat(2, 5),
    )
    .unwrap();
    assert_round_trip(&InputObject::Spine(with_head));
}
