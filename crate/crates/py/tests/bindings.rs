use pyo3::prelude::*;
use pyo3::types::PyDict;

fn module(py: Python<'_>) -> Bound<'_, PyModule> {
    pyo3::wrap_pymodule!(volcano_py::volcano_py)(py).into_bound(py)
}

#[test]
fn curve_and_sha_round_trip() {
    Python::attach(|py| {
        let m = module(py);
        let locals = PyDict::new(py);
        locals.set_item("v", &m).unwrap();
        py.run(
            c"
e = v.Curve.parse('5;1,0')
assert (e.order, e.trace, e.j_invariant) == (4, 2, 3)
assert e.group_structure() == (2, 2)
assert isinstance(e.height(3), int)
isos = e.isogenies(2)
assert len(isos) == 3 and all(i.codomain.trace == 2 for i in isos)
r = v.sha(e, e)
assert r['tag'] == 'isogenous' and r['order'] == 4 and r['passed']
c = v.classes(5)
assert any(x['t'] == 2 and x['f'] == 2 for x in c['classes'])
assert v.volcano_dot(5, 2, 2).startswith('digraph')
f = v.Curve(v.Field(5), 1, 1)
assert v.sha(e, f)['tag'] == 'non-isogenous'
try:
    v.classes(15)
    raise AssertionError('composite p accepted')
except ValueError as err:
    assert 'not prime' in str(err)
",
            None,
            Some(&locals),
        )
        .unwrap();
    });
}
