import json
import math

import numpy as np
import pytest

import szego


def poisson_eigenvalues(k, m):
    return np.array([2 * k * math.exp(n * math.log(k) - k - math.lgamma(n + 1)) for n in range(m + 1)])


def test_circle_spectrum_matches_poisson():
    c = szego.manifold(json.dumps({"kind": "circle", "radius": 1.0}))
    assert c.classify()["tag"] == "lagrangian"
    assert c.d_prime() == 1
    op = szego.assemble(c, 15.0)
    assert op.max_degree == 60
    ev = np.sort(op.eigenvalues())[::-1]
    want = np.sort(poisson_eigenvalues(15.0, 60))[::-1]
    big = want > 1e-10 * want[0]
    assert np.allclose(ev[big], want[big], rtol=1e-8)
    m = op.matrix
    assert np.abs(m - np.diag(np.diag(m))).max() < 1e-10 * np.abs(m).max()


def test_trace_identity_and_scaling():
    t = szego.torus_product([1.0, 0.7], 2)
    trace, prediction, gap = szego.assemble(t, 3.0, "2 + cos(t1)").exact_trace()
    assert gap < 1e-6
    assert prediction.real == pytest.approx((3 / math.pi) ** 2 * 2 * 4 * math.pi**2 * 0.7)
    s = szego.assemble(szego.circle(), 4.0, scaled=True)
    assert s.normalization == "scaled_S"
    assert s.factor == pytest.approx(math.sqrt(math.pi / 8))


def test_complex_amplitude_is_not_hermitian():
    op = szego.assemble(szego.circle(), 5.0, "cos(t1)", "sin(t1)")
    assert not op.hermitian
    with pytest.raises(szego.InvalidArgument):
        op.eigenvalues()
    assert op.schatten_sum(2.0) == pytest.approx(np.sum(np.abs(op.matrix) ** 2))


def test_szego_limit_and_mellin():
    emp, pred = szego.szego_check(szego.circle(), 50.0, "1", "power:2")
    assert pred == pytest.approx(2 * math.pi / math.sqrt(2))
    assert abs(emp - pred) / pred < 0.01
    assert szego.mellin_log("power:2", 1.5, 2.0) == pytest.approx(4 / 2**1.5, rel=1e-10)
    assert szego.mellin_log("entropy", 0.5, 2.0) == pytest.approx(2 * math.log(2) - 1, rel=1e-10)
    assert szego.weyl_prediction(2 * math.pi, 1, math.exp(-1), 1.0) == pytest.approx(4 * math.sqrt(math.pi))


def test_kernel_and_basis():
    tr = szego.FockTruncation(1, 3.0, 40)
    assert len(tr) == 41
    z = np.array([0.3 + 0.2j])
    w = np.array([-0.1 + 0.4j])
    e = szego.eval_basis_all(tr, z)
    f = szego.eval_basis_all(tr, w)
    assert np.vdot(f, e) == pytest.approx(szego.reproducing_kernel(tr, z, w), rel=1e-10)


def test_hessian_oracle():
    g, h = szego.random_metric_pair(3, 11)
    r = szego.verify_sqrt_det(g, h, 4)
    assert r["pass"]
    assert r["sqrt_det_dq"] == pytest.approx(r["delta"], rel=1e-10)
    w = np.linalg.solve(g, h)
    d2 = szego.det_closed_form(w, 2)
    assert np.allclose(d2, 3 * np.eye(3) - w @ w)


def test_errors_are_typed():
    with pytest.raises(szego.ConfigError):
        szego.manifold('{"kind": "circle", "radius": ')
    with pytest.raises(szego.NotApplicable):
        szego.manifold(json.dumps({"kind": "parabola_patch", "x1_range": [-1, 1], "y1_range": [-1, 1]})).d_prime()
    with pytest.raises(szego.Error):
        szego.entropy([0.5, 0.2])


def test_verify_subset():
    rows = szego.verify(["mellin_identity"])
    assert len(rows) == 1
    assert rows[0]["check_id"] == "mellin_identity"
    assert rows[0]["pass"]
