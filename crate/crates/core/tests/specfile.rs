//! Spec-file parsing, canonical printing, diagnostics, and realization.

use std::fs;
use std::path::PathBuf;

use minionlab::catalog;
use minionlab::specfile::{load_operand, parse, print, realize, FnSpecMode, SpecBody};
use minionlab::Error;

const BOUND: usize = 4;

fn fixture_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("minionlab-specfile-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn counts(m: &minionlab::minion::Minion, up_to: usize) -> Vec<usize> {
    (1..=up_to).map(|n| m.count(n).unwrap()).collect()
}

#[test]
fn parse_print_parse_is_identity() {
    let docs = [
        "kind presented\ngen f 2\nrel f (1 0 | 2) = f (0 1 | 2)\n",
        "kind function\ndomain 2 2\nmode full\n",
        "kind function\ndomain 2 2\nmode generated\nelem 2 0001\n",
        "kind function\ndomain 2 2\nmode pol\npair 1 R=0 S=0\npair 2 R=0,1;1,0 S=0,0\n",
        "kind derived\nexpr product(P, C2)\n",
        "kind catalog\nname NC(2,2)\n",
    ];
    for doc in docs {
        let body = parse(doc).unwrap();
        let printed = print(&body);
        let reparsed = parse(&printed).unwrap();
        assert_eq!(body, reparsed, "round trip failed for {doc:?}");
        // printing is a fixed point
        assert_eq!(print(&reparsed), printed);
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let doc = "# a comment\n\nkind catalog\n# another\nname P\n\n";
    assert_eq!(
        parse(doc).unwrap(),
        SpecBody::Catalog { name: "P".into() }
    );
}

#[test]
fn parse_errors_carry_positions() {
    let cases = [
        ("", 1),
        ("name P\n", 1),
        ("kind widget\n", 1),
        ("kind presented\ngen f\n", 2),
        ("kind presented\nrel f = g\n", 2),
        ("kind presented\nwhat\n", 2),
        ("kind function\nmode full\n", 1), // missing domain reported at the kind line
        ("kind function\ndomain 2 2\nmode sideways\n", 3),
        ("kind function\ndomain 2 2\npair 1 Q=0 S=0\n", 3),
        ("kind derived\n", 1),
        ("kind catalog\n", 1),
    ];
    for (doc, want_line) in cases {
        match parse(doc) {
            Err(Error::Parse { line, .. }) => {
                assert_eq!(line, want_line, "wrong line for {doc:?}")
            }
            other => panic!("expected a parse error for {doc:?}, got {other:?}"),
        }
    }
}

#[test]
fn realize_presented_matches_catalog() {
    let dir = fixture_dir("presented");
    let body = parse("kind presented\ngen f 2\nrel f (1 0 | 2) = f (0 1 | 2)\n").unwrap();
    let m = realize(&body, &dir, BOUND).unwrap();
    assert_eq!(counts(&m, 4), counts(&catalog::c2(), 4));
}

#[test]
fn realize_presented_rejects_unknown_generator() {
    let dir = fixture_dir("badgen");
    let body = parse("kind presented\ngen f 2\nrel f (1 0 | 2) = g (0 1 | 2)\n").unwrap();
    assert!(realize(&body, &dir, BOUND).is_err());
}

#[test]
fn realize_function_modes() {
    let dir = fixture_dir("function");
    // full
    let m = realize(&parse("kind function\ndomain 2 2\nmode full\n").unwrap(), &dir, BOUND).unwrap();
    assert_eq!(counts(&m, 2), vec![4, 16]);
    // generated by binary AND: projections and two-variable conjunctions
    let m = realize(
        &parse("kind function\ndomain 2 2\nmode generated\nelem 2 0001\n").unwrap(),
        &dir,
        BOUND,
    )
    .unwrap();
    assert_eq!(counts(&m, 3), vec![1, 3, 6]);
    // polymorphisms preserving the unary relation {0}
    let m = realize(
        &parse("kind function\ndomain 2 2\nmode pol\npair 1 R=0 S=0\n").unwrap(),
        &dir,
        BOUND,
    )
    .unwrap();
    assert_eq!(counts(&m, 2), vec![2, 8]);
}

#[test]
fn realize_derived_expressions() {
    let dir = fixture_dir("derived");
    let go = |expr: &str| {
        realize(&SpecBody::Derived { expr: expr.into() }, &dir, BOUND).unwrap()
    };
    assert_eq!(
        counts(&go("product(P, C2)"), 3),
        vec![1 * 1, 2 * 3, 3 * 6]
    );
    assert_eq!(counts(&go("sum(P, C2)"), 3), vec![2, 5, 9]);
    assert_eq!(counts(&go("sub(C2, *)"), 3), vec![0, 0, 0]);
    // one component of NC(2,2): the J(2) counts
    assert_eq!(counts(&go("restrict(NC(2,2), 0)"), 3), vec![1, 4, 64]);
}

#[test]
fn realize_exponential_with_file_exponent() {
    let dir = fixture_dir("exp");
    fs::write(dir.join("u.spec"), "kind presented\ngen f 1\n").unwrap();
    let m = realize(
        &SpecBody::Derived { expr: "exp(P, u.spec)".into() },
        &dir,
        BOUND,
    )
    .unwrap();
    // the projection minion to a free unary exponent counts n + 1
    assert_eq!(counts(&m, 4), vec![2, 3, 4, 5]);
    // a non-presented exponent is rejected
    assert!(realize(
        &SpecBody::Derived { expr: "exp(P, O(2,2))".into() },
        &dir,
        BOUND
    )
    .is_err());
}

#[test]
fn derived_operands_resolve_files_then_catalog() {
    let dir = fixture_dir("operands");
    fs::write(
        dir.join("sym.spec"),
        "kind presented\ngen f 2\nrel f (1 0 | 2) = f (0 1 | 2)\n",
    )
    .unwrap();
    let m = realize(
        &SpecBody::Derived { expr: "product(sym.spec, P)".into() },
        &dir,
        BOUND,
    )
    .unwrap();
    let expect = minionlab::minion::Minion::product(&catalog::c2(), &catalog::p());
    assert_eq!(counts(&m, 3), counts(&expect, 3));
    // file operands are named after their stem
    let op = load_operand("sym.spec", &dir, BOUND).unwrap();
    assert_eq!(op.name().as_deref(), Some("sym"));
    // catalog fallback
    let op = load_operand("KM(3,4)", &dir, BOUND).unwrap();
    assert_eq!(counts(&op, 2), counts(&catalog::km(&[3, 4]).unwrap(), 2));
    // neither a file nor a catalog name
    assert!(load_operand("no-such-thing", &dir, BOUND).is_err());
}

#[test]
fn derived_spec_files_chain() {
    let dir = fixture_dir("chain");
    fs::write(dir.join("a.spec"), "kind catalog\nname C2\n").unwrap();
    fs::write(dir.join("b.spec"), "kind derived\nexpr sum(a.spec, *)\n").unwrap();
    let m = load_operand("b.spec", &dir, BOUND).unwrap();
    assert_eq!(counts(&m, 3), vec![2, 4, 7]);
}

#[test]
fn realize_rejects_malformed_expressions() {
    let dir = fixture_dir("badexpr");
    for expr in ["", "product", "product(P", "blend(P, C2)", "restrict(P, x)"] {
        assert!(
            realize(&SpecBody::Derived { expr: expr.into() }, &dir, BOUND).is_err(),
            "expected failure for {expr:?}"
        );
    }
}

#[test]
fn function_mode_default_is_full() {
    let body = parse("kind function\ndomain 2 2\n").unwrap();
    assert!(matches!(
        body,
        SpecBody::Function { mode: FnSpecMode::Full, .. }
    ));
}
