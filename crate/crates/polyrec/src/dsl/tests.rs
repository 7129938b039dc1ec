use super::*;
use crate::poly::int;

const FACTORIAL_DOC: &str = "\
# product of a counter
kind: poly_system
vars: b c
init: 1 1
output: b
b' = b*c
c' = c + 1
";

#[test]
fn parse_factorial_system() {
    let doc = parse_doc(FACTORIAL_DOC).unwrap();
    let SequenceDoc::PolySystem { names, system } = &doc else {
        panic!("expected a poly_system");
    };
    assert_eq!(names, &["b", "c"]);
    assert_eq!(system.eval_output(5).unwrap(), int(120));
}

#[test]
fn doc_round_trips() {
    let docs = [
        FACTORIAL_DOC,
        "kind: poly_system\nvars: f g\ninit: 0 1\nf' = g\ng' = f + g\n",
        "kind: rational_system\nvars: C m\ninit: 1 0\noutput: C\nC' = ((4*m + 2)/(m + 2))*C\nm' = m + 1\n",
        "kind: linear_recurrence\nvars: x0 x1\ninit: 0 1\nnext = x0 + x1\n",
        "kind: linear_recurrence\nvars: u\ninit: 1\nnext = u + 2\n",
        "kind: simple_recurrence\nvars: a b\ninit: 1 2\nnext = a*b\n",
        "kind: oracle\nname: catalan\n",
        "kind: automaton\ndim: 2\nrow: 0 1\nrow: 1 1\ninitial: 1 0\nfinal: 0 1\n",
        "kind: wcfg\nnonterminals: X\nstart: X\nrule: X -> a\nrule: X -> a X X\n",
        "kind: wmso\nexpr: (prod x (sum y 1))\n",
    ];
    for text in docs {
        let doc = parse_doc(text).unwrap_or_else(|e| panic!("{text}: {e}"));
        let rendered = doc.to_string();
        let reparsed = parse_doc(&rendered).unwrap_or_else(|e| panic!("{rendered}: {e}"));
        assert_eq!(reparsed, doc, "round trip failed for:\n{text}\n->\n{rendered}");
        // and serialization is a fixed point from the second pass on
        assert_eq!(reparsed.to_string(), rendered);
    }
}

#[test]
fn rational_doc_evaluates_catalan() {
    let text = "kind: rational_system\nvars: C m\ninit: 1 0\nC' = ((4*m + 2)/(m + 2))*C\nm' = m + 1\n";
    let SequenceDoc::RationalSystem { system, .. } = parse_doc(text).unwrap() else {
        panic!();
    };
    assert_eq!(system.eval_output(5).unwrap(), int(42));
}

#[test]
fn output_defaults_to_first_variable() {
    let text = "kind: poly_system\nvars: f g\ninit: 0 1\nf' = g\ng' = f + g\n";
    let SequenceDoc::PolySystem { system, .. } = parse_doc(text).unwrap() else {
        panic!();
    };
    assert_eq!(system.output_index(), 0);
}

#[test]
fn rules_may_appear_in_any_order() {
    let text = "kind: poly_system\nvars: b c\ninit: 1 1\nc' = c + 1\nb' = b*c\n";
    let SequenceDoc::PolySystem { system, .. } = parse_doc(text).unwrap() else {
        panic!();
    };
    assert_eq!(system.eval_output(4).unwrap(), int(24));
}

#[test]
fn structural_errors() {
    // unknown kind
    assert!(matches!(
        parse_doc("kind: nonsense\n"),
        Err(DocError::Structure { line: 1, .. })
    ));
    // wrong init arity
    assert!(parse_doc("kind: poly_system\nvars: a\ninit: 1 2\na' = a\n").is_err());
    // missing rule
    assert!(parse_doc("kind: poly_system\nvars: a b\ninit: 1 1\na' = a\n").is_err());
    // duplicate rule
    assert!(parse_doc("kind: poly_system\nvars: a\ninit: 1\na' = a\na' = a\n").is_err());
    // decimal literal
    assert!(parse_doc("kind: poly_system\nvars: a\ninit: 0.5\na' = a\n").is_err());
    // undeclared output
    assert!(parse_doc("kind: poly_system\nvars: a\ninit: 1\noutput: z\na' = a\n").is_err());
    // duplicate variable names
    assert!(parse_doc("kind: poly_system\nvars: a a\ninit: 1 1\na' = a\n").is_err());
    // unknown oracle
    assert!(parse_doc("kind: oracle\nname: mystery\n").is_err());
    // linear recurrence with a quadratic rule
    assert!(parse_doc("kind: linear_recurrence\nvars: u\ninit: 1\nnext = u^2\n").is_err());
}

#[test]
fn expression_errors_carry_positions() {
    let err = parse_doc("kind: poly_system\nvars: a\ninit: 1\na' = a + q\n").unwrap_err();
    let DocError::Expr(pe) = err else {
        panic!("expected an expression error, got {err:?}");
    };
    assert_eq!(pe.line, 4);
    assert_eq!(pe.kind, ParseErrorKind::UnknownVariable("q".into()));
}

#[test]
fn wmso_parsing() {
    let e = parse_wmso("(+ 1 2 3)", 1).unwrap();
    assert_eq!(e.eval(0), int(6));
    let e = parse_wmso("(* (sum x 1) (sum y 1))", 1).unwrap();
    assert_eq!(e.eval(3), int(9));
    assert!(parse_wmso("(sum x (sum x 1))", 1)
        .unwrap()
        .validate()
        .is_err());
    assert!(parse_wmso("(foo 1 2)", 1).is_err());
    assert!(parse_wmso("(+ 1", 1).is_err());
    assert!(parse_wmso("(+ 1) 2", 1).is_err());
    assert!(parse_wmso("(sum 1)", 1).is_err());
}

#[test]
fn comments_and_blank_lines_ignored() {
    let text = "\n# heading\nkind: oracle\n\n  # inner\nname: n^n   # trailing\n";
    let SequenceDoc::Oracle { oracle } = parse_doc(text).unwrap() else {
        panic!();
    };
    assert_eq!(oracle.name(), "n^n");
}
