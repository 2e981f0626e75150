use pyo3::prelude::*;
use pyo3::types::PyModule;

const RUNNING: &str = r#"{"version":"1","kind":"blowup_bundle","payload":{"matrix":[
  [[{"t":1,"x":0,"re":"1","im":"0"}],[{"t":0,"x":1,"re":"1","im":"0"}]],
  [[],[{"t":-1,"x":0,"re":"1","im":"0"}]]]}}"#;

fn with_module<F: FnOnce(&Bound<'_, PyModule>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "heckelab_py").unwrap();
        heckelab_py::heckelab_py(&m).unwrap();
        f(&m);
    });
}

#[test]
fn splitting_and_optimize() {
    with_module(|m| {
        let s: Vec<i64> = m
            .getattr("splitting")
            .unwrap()
            .call1((RUNNING,))
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(s, vec![1, -1]);
        let (phis, last): (Vec<i64>, Vec<i64>) = m
            .getattr("optimize")
            .unwrap()
            .call1((RUNNING,))
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(phis, vec![2, 1, 0]);
        assert_eq!(last, vec![1, 1]);
    });
}

#[test]
fn errors_become_python_exceptions() {
    with_module(|m| {
        let err = m.getattr("splitting").unwrap().call1(("{}",)).unwrap_err();
        Python::attach(|py| assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py)));
        let err = m.getattr("verify").unwrap().call1(("nope",)).unwrap_err();
        assert!(err.to_string().contains("unknown suite"));
    });
}
