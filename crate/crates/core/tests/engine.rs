use heckelab::document::{parse_document, Document};
use heckelab::exact_algebra::{JetLaurentMatrix, JetLaurentPoly as P, Scalar};
use heckelab::suites::bundles;
use heckelab::{BlowupBundle, Error, Schedule};

const RUNNING: &str = r#"{"version":"1","kind":"blowup_bundle","payload":{"matrix":[
  [[{"t":1,"x":0,"re":"1","im":"0"}],[{"t":0,"x":1,"re":"1","im":"0"}]],
  [[],[{"t":-1,"x":0,"re":"1","im":"0"}]]]}}"#;

fn running() -> BlowupBundle {
    match parse_document(RUNNING).unwrap() {
        Document::BlowupBundle(b, _) => b,
        other => panic!("{other:?}"),
    }
}

#[test]
fn worked_chain_from_document() {
    let e = running();
    let adapted = e.adapt_frame(1).unwrap();
    let h1 = adapted.hecke_transform(1).unwrap();
    assert_eq!(h1.splitting().exponents(), &[1, 0]);
    let h2 = h1.adapt_frame(1).unwrap().hecke_transform(1).unwrap();
    assert_eq!(h2.splitting().exponents(), &[1, 1]);
    let (out, trace) = e.optimize().unwrap();
    assert_eq!(out.splitting(), h2.splitting());
    assert_eq!(trace.phi_sequence(), vec![2, 1, 0]);
}

#[test]
fn greedy_schedule_also_terminates() {
    for e in bundles(21, 40, 1) {
        let phi0 = e.phi();
        let (out, trace) = e.optimize_with(Schedule::GreedyBound).unwrap();
        assert_eq!(out.phi(), 0);
        assert!(trace.len() as i64 <= phi0);
    }
}

#[test]
fn rank_three_gaussian_bundle() {
    let n = 6;
    let c = |re, im| Scalar::gaussian(re, im);
    let t = JetLaurentMatrix::from_rows(vec![
        vec![
            P::monomial(c(1, 1), 2, 0, n),
            P::monomial(c(0, 1), 0, 2, n),
            P::zero(n),
        ],
        vec![P::monomial(c(2, 0), 1, 1, n), P::one(n), P::zero(n)],
        vec![P::zero(n), P::monomial(c(1, 0), -1, 1, n), P::t_pow(-2, n)],
    ])
    .unwrap();
    let e = BlowupBundle::new(t).unwrap();
    assert_eq!(e.splitting().exponents(), &[2, 0, -2]);
    let (out, trace) = e.optimize().unwrap();
    assert_eq!(out.phi(), 0);
    assert!(trace.len() <= 4);
    assert!(e.involution_check(1).unwrap());
    assert!(e.involution_check(2).unwrap());
}

#[test]
fn singular_restriction_is_rejected() {
    let t = JetLaurentMatrix::from_rows(vec![
        vec![P::one(2), P::monomial(Scalar::from_int(1), 0, 1, 2)],
        vec![P::zero(2), P::monomial(Scalar::from_int(1), 0, 1, 2)],
    ])
    .unwrap();
    assert_eq!(BlowupBundle::new(t), Err(Error::NotInvertible));
}
