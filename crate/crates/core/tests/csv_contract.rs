//! The lift table is consumed by external plotting; these pin its shape.

use std::f64::consts::PI;
use std::fmt::Write as _;

use curveflow::liftcurve::{lift, read_csv, verify, write_csv, Branch, LiftCase, LiftOptions, PlaneCurve, CSV_HEADER};

fn quadratic_table() -> (curveflow::liftcurve::LiftResult, String) {
    let z0 = 8.0 * 1f64.cos().powi(2);
    let r = lift(&LiftCase::Quadratic { lambda: 1.0 / 32.0 }, z0, &PlaneCurve::circle(2001).unwrap(), Branch::Plus, &LiftOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_csv(&r, &mut buf).unwrap();
    (r, String::from_utf8(buf).unwrap())
}

#[test]
fn header_and_row_shape() {
    let (r, text) = quadratic_table();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,l,z,a"));
    assert_eq!(CSV_HEADER.join(","), "tau,l,z,a");
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), r.tau.len());
    assert!(rows.iter().all(|row| row.split(',').count() == 4));
    assert!(!text.contains('\r'));
}

#[test]
fn plain_reader_sees_the_same_numbers() {
    let (r, text) = quadratic_table();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.unwrap();
        let v: Vec<f64> = rec.iter().map(|f| f.parse().unwrap()).collect();
        assert_eq!(v, [r.tau[i], r.l[i], r.z[i], r.a[i]]);
    }
}

#[test]
fn reader_rejects_foreign_tables() {
    assert!(read_csv("tau,l,a,z\n0,0,0,0\n".as_bytes()).is_err());
    assert!(read_csv("tau,l,z,a\n".as_bytes()).is_err());
    assert!(read_csv("tau,l,z,a\n0,0,x,0\n".as_bytes()).is_err());
}

#[test]
fn curve_file_matches_builtin_circle() {
    let n = 801;
    let mut text = String::from("tau,x,y\n");
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / (n - 1) as f64;
        writeln!(text, "{t},{},{}", t.cos(), t.sin()).unwrap();
    }
    let from_file = PlaneCurve::from_csv(text.as_bytes()).unwrap();
    let case = LiftCase::Linear { lambda: 0.5 };
    let opts = LiftOptions::default();
    let a = lift(&case, 0.0, &from_file, Branch::Plus, &opts).unwrap();
    let b = lift(&case, 0.0, &PlaneCurve::circle(n).unwrap(), Branch::Plus, &opts).unwrap();
    assert!((a.l[n - 1] - b.l[n - 1]).abs() < 1e-9);
    assert!(verify(&a, &from_file).h_residual < 1e-9);
}
