//! The trace file format: parse/serialize round-trips and precise error
//! reporting (the verify harness relies on the line numbers).

use inctopo_core::trace::TraceError;
use inctopo_core::Trace;

#[test]
fn parse_a_minimal_trace() {
    let t = Trace::parse("n 3\n0 1\n1 2\n").unwrap();
    assert_eq!(t.n, 3);
    assert_eq!(t.events, vec![(0, 1), (1, 2)]);
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = "# workload: demo\n\nn 4\n# the chain\n0 1\n\n1 2\n  \n2 3\n";
    let t = Trace::parse(text).unwrap();
    assert_eq!(t.n, 4);
    assert_eq!(t.events, vec![(0, 1), (1, 2), (2, 3)]);
}

#[test]
fn serialization_round_trips_exactly() {
    let t = Trace::new(5, vec![(0, 4), (4, 2), (2, 0)]);
    let text = t.to_text();
    assert_eq!(text, "n 5\n0 4\n4 2\n2 0\n");
    let back = Trace::parse(&text).unwrap();
    assert_eq!(back.n, t.n);
    assert_eq!(back.events, t.events);
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.trace");
    let t = Trace::new(3, vec![(0, 1), (2, 1)]);
    t.write_file(&path).unwrap();
    let back = Trace::read_file(&path).unwrap();
    assert_eq!(back.n, 3);
    assert_eq!(back.events, vec![(0, 1), (2, 1)]);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = Trace::read_file(std::path::Path::new("/definitely/not/here.trace")).unwrap_err();
    assert!(matches!(err, TraceError::Io(_)));
}

fn malformed_line(text: &str) -> (usize, String) {
    match Trace::parse(text).unwrap_err() {
        TraceError::Malformed { line, msg } => (line, msg),
        other => panic!("expected a malformed-line error, got {other:?}"),
    }
}

#[test]
fn the_header_must_come_first() {
    let (line, msg) = malformed_line("0 1\nn 2\n");
    assert_eq!(line, 1);
    assert!(msg.contains("header"), "unhelpful message: {msg}");
}

#[test]
fn empty_input_reports_the_missing_header() {
    let err = Trace::parse("").unwrap_err();
    assert!(matches!(err, TraceError::Malformed { .. }));
    let err = Trace::parse("# nothing but comments\n").unwrap_err();
    assert!(matches!(err, TraceError::Malformed { .. }));
}

#[test]
fn bad_event_lines_carry_their_line_number() {
    // Line 3 has a trailing token.
    let (line, _) = malformed_line("n 3\n0 1\n1 2 7\n");
    assert_eq!(line, 3);

    // Line 4 (after a comment) has a non-numeric id.
    let (line, _) = malformed_line("n 3\n0 1\n# ok\nx 2\n");
    assert_eq!(line, 4);

    // Single-token event line.
    let (line, _) = malformed_line("n 3\n0\n");
    assert_eq!(line, 2);
}

#[test]
fn out_of_range_ids_are_rejected_with_position() {
    let (line, msg) = malformed_line("n 3\n0 1\n1 3\n");
    assert_eq!(line, 3);
    assert!(msg.contains('3'), "message should name the bad id: {msg}");
}

#[test]
fn header_count_must_be_a_number() {
    let (line, _) = malformed_line("n lots\n");
    assert_eq!(line, 1);
}

#[test]
#[should_panic]
fn constructor_rejects_out_of_range_events() {
    let _ = Trace::new(2, vec![(0, 2)]);
}
