use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "sfett").unwrap();
        sfett::register(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("sfett", m).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn tensor_roundtrip_and_rounding() {
    run(c"
x = sfett.SfEtt.random([4, 5, 5], 1, ([2, 2], [2], 2), seed=3)
assert x.ranks == ([2, 2], [2], 2)
assert abs(x.norm() - 1.0) < 1e-12
y = sfett.SfEtt.from_bytes(x.to_bytes())
assert y.to_dense() == x.to_dense()
z = (x + 2.0 * x).round(([2, 2], [2], 2))
assert z.ranks == x.ranks
assert abs(z.norm() - 3.0) < 1e-10
assert abs(x.inner(z) - 3.0) < 1e-10
assert x.param_count == 34
assert 'SfEtt(dims=[4, 5, 5]' in repr(x)
");
}

#[test]
fn dense_interface_and_errors() {
    run(c"
dims = [3, 4, 4]
data = [1.0 / (1.0 + i + 0.5 * j + 0.25 * k) for k in range(4) for j in range(4) for i in range(3)]
x = sfett.SfEtt.from_dense(data, dims, 1, ([3, 4], [3], 4))
err = max(abs(a - b) for a, b in zip(x.to_dense(), data))
assert err < 1e-12, err
low = sfett.SfEtt.from_dense(data, dims, 1, ([1, 1], [1], 1))
refined, history = sfett.rstgd(data, dims, low, max_iters=5)
assert all(b <= a for a, b in zip(history, history[1:]))
try:
    sfett.SfEtt.from_dense(data[:-1], dims, 1, ([1, 1], [1], 1))
    raise AssertionError('expected ValueError')
except ValueError:
    pass
try:
    sfett.SfEtt.load('/nonexistent/file.sfett')
    raise AssertionError('expected OSError')
except OSError:
    pass
");
}

#[test]
fn solvers() {
    run(c"
r = sfett.eigs('laplace', 3, 8, rank=1)
assert r['rel_err'] < 1e-8, r['rel_err']
assert abs(r['theta'] - sfett.laplace_min_eig(3, 8)) < 1e-8
assert r['csv'].startswith('# sfett-csv v1 eigs')
csv = sfett.approx('hilbert', 3, 6, points=2, max_iters=3)
assert len(csv.strip().splitlines()) == 4
assert sfett.manifold_dim([4, 5, 5], 1, ([2, 2], [2], 2)) == 18
");
}
