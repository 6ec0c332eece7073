"""Smoke test for the rigidity Python module.

Build and install first:  maturin develop -m crates/python/Cargo.toml --release
"""

import json
import math

import rigidity


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    d = [[1.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 0, 1.0, 0], [0, 0, 0, -3.0]]
    p = rigidity.symfun(d)["p"]
    assert all(close(x, y) for x, y in zip(p, [1, 0, -1, -2, -3])), p
    m = rigidity.main_inequality(d)
    assert m["equality"] and m["holds"] and close(m["lhs"], 84.0), m
    assert m["kind"] != "None"

    a = rigidity.trace_free_project([[0.3, 0.1, -0.2, 0.0, 0.5],
                                     [0.1, -0.7, 0.4, 0.2, 0.0],
                                     [-0.2, 0.4, 0.9, -0.1, 0.3],
                                     [0.0, 0.2, -0.1, 0.1, -0.6],
                                     [0.5, 0.0, 0.3, -0.6, -0.2]])
    m = rigidity.main_inequality(a)
    assert m["holds"] and not m["equality"] and m["relative_defect"] > 0
    direct, closed = rigidity.weyl_norm(a)
    assert close(direct, closed, 1e-9)
    assert max(abs(r) for r in rigidity.kn_identity_suite(a)) < 1e-9
    assert all(q >= -1e-12 for q in rigidity.lambda_scan(a, [-1.0, 0.0, 0.5])[:-1])
    ev = rigidity.eigenvalues(a)
    assert ev == sorted(ev) and close(sum(ev), 0.0, 1e-12)

    try:
        rigidity.main_inequality([[1.0, 0.0, 0.0, 0.0]] * 4)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for a non-trace-free matrix")

    report = json.loads(rigidity.verify([4, 5], 50, seed=7))
    assert report["passed"] and len(report["checks"]) == 8

    cat = rigidity.ShapeField.catenoid(4, [32, 8])
    e = cat.energy()
    assert e.classification == "CatenoidCandidate" and e.e_rot_is_zero(), e
    ell = rigidity.ShapeField.ellipsoid([1.0, 1.2, 1.4, 1.6, 1.8], [4])
    e = ell.energy()
    assert e.classification == "Generic" and e.e_rot > 0
    assert math.isclose(ell.rescaled(2.0).energy().e_rot_conf, e.e_rot_conf, rel_tol=1e-12)
    sphere = rigidity.ShapeField.sphere(5, 1.0, [8, 4])
    assert sphere.energy().classification == "AllUmbilic"
    again = rigidity.ShapeField.from_json(cat.to_json())
    assert len(again) == len(cat) == 256 and again.minimal_claimed
    print("rigidity", rigidity.__version__, "python smoke test passed")


if __name__ == "__main__":
    main()
