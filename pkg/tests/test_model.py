import csv

import numpy as np
import pytest

from tvrate.errors import (
    BadThetaError,
    EmptySpecError,
    KTooShortError,
    SingularAError,
    TVRateError,
)
from tvrate.model import (
    PoleSpec,
    TimeVariationModel,
    build_model,
    generate_signal,
    optimal_trajectory,
    parse_poles,
    write_signal_csv,
)

C45 = np.cos(np.pi / 4)


def recurrence_residual(model, b):
    m = model.m.coeffs
    n = model.n
    res = [np.abs(m @ b[k:k + n + 1]).max() for k in range(b.shape[0] - n)]
    return max(res)


def random_specs(rng):
    specs = []
    for _ in range(rng.integers(1, 4)):
        if rng.random() < 0.5:
            specs.append(PoleSpec.real(1 if rng.random() < 0.5 else -1))
        else:
            specs.append(PoleSpec.pair(rng.uniform(0.05, np.pi - 0.05)))
    return specs


# -- build_model -----------------------------------------------------------------

def test_model_gradient():
    m = build_model([PoleSpec.real(1)])
    assert m.m.allclose([-1, 1], atol=0)
    assert m.n == 1


def test_model_real_pair():
    m = build_model([PoleSpec.real(1), PoleSpec.real(-1)])
    assert m.m.allclose([-1, 0, 1], atol=0)


def test_model_n3_matches_term_by_term_product():
    m = build_model([PoleSpec.real(1), PoleSpec.pair(np.pi / 4)])
    expected = np.convolve([1, -1], [1, -2 * C45, 1])[::-1]
    assert m.m.allclose(expected, atol=1e-15)
    assert m.m.is_monic
    assert abs(abs(m.m.coeffs[0]) - 1) < 1e-9


def test_model_multiplicity():
    m = build_model([PoleSpec.real(1, multiplicity=2)])
    assert m.m.allclose([1, -2, 1], atol=0)
    assert m.n == 2


def test_model_roots_on_unit_circle():
    m = build_model([PoleSpec.real(-1), PoleSpec.pair(2.0, multiplicity=2)])
    np.testing.assert_allclose(np.abs(m.roots()), 1.0, atol=1e-15)


def test_empty_spec():
    with pytest.raises(EmptySpecError):
        build_model([])


@pytest.mark.parametrize("theta", [0.0, np.pi, -0.1, 4.0])
def test_bad_theta(theta):
    with pytest.raises(BadThetaError):
        PoleSpec.pair(theta)


def test_bad_sign():
    with pytest.raises(TVRateError):
        PoleSpec.real(2)


def test_random_spec_mixes_have_real_coefficients():
    rng = np.random.default_rng(3)
    for _ in range(200):
        m = build_model(random_specs(rng))  # raises if imaginary residue > tol
        assert np.all(np.isreal(m.m.coeffs))
        assert abs(abs(m.m.coeffs[0]) - 1) < 1e-9


def test_parse_poles():
    specs = parse_poles("+1, -1,pair:0.5,+1")
    assert specs == [PoleSpec.real(1), PoleSpec.real(-1), PoleSpec.pair(0.5), PoleSpec.real(1)]
    with pytest.raises(TVRateError):
        parse_poles("2")


def test_from_coeffs_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = build_model(random_specs(rng))
        back = TimeVariationModel.from_coeffs(m.m.tolist())
        assert back.m == m.m
        assert back.n == m.n


def test_from_coeffs_rejects_off_circle():
    with pytest.raises(TVRateError):
        TimeVariationModel.from_coeffs([-0.5, 1])


# -- generate_signal --------------------------------------------------------------

def test_signal_constant():
    model = build_model([PoleSpec.real(1)])
    s = generate_signal(model, 1, 20, initial=[[0.37]])
    np.testing.assert_array_equal(s.b[:, 0], 0.37)


def test_signal_alternating():
    model = build_model([PoleSpec.real(-1)])
    s = generate_signal(model, 1, 21, initial=[[0.5]])
    np.testing.assert_array_equal(s.b[:, 0], 0.5 * (-1.0) ** np.arange(21))


def test_signal_cosine():
    th = np.pi / 3
    model = build_model([PoleSpec.pair(th)])
    s = generate_signal(model, 1, 50, initial=[[1.0], [np.cos(th)]])
    np.testing.assert_allclose(s.b[:, 0], np.cos(np.arange(50) * th), atol=1e-12)


def test_signal_deterministic_and_seeded():
    model = build_model([PoleSpec.real(1), PoleSpec.pair(0.3)])
    a = generate_signal(model, 4, 100, seed=7)
    b = generate_signal(model, 4, 100, seed=7)
    c = generate_signal(model, 4, 100, seed=8)
    np.testing.assert_array_equal(a.b, b.b)
    assert not np.array_equal(a.b, c.b)
    assert np.all(np.abs(a.b[:3]) <= 1.0)


def test_signal_coordinates_independent_of_dim():
    # coordinate i uses child seed i, so adding coordinates leaves earlier ones
    # alone up to round-off in the vectorized recurrence
    model = build_model([PoleSpec.pair(0.3)])
    a = generate_signal(model, 2, 30, seed=5)
    b = generate_signal(model, 5, 30, seed=5)
    np.testing.assert_array_equal(a.b[:2], b.b[:2, :2])
    np.testing.assert_allclose(a.b, b.b[:, :2], rtol=0, atol=1e-12)


def test_signal_amplitude():
    model = build_model([PoleSpec.real(1)])
    s = generate_signal(model, 50, 5, seed=1, amplitude=0.01)
    assert np.all(np.abs(s.b) <= 0.01)


def test_signal_too_short():
    model = build_model([PoleSpec.real(1), PoleSpec.real(-1)])
    with pytest.raises(KTooShortError):
        generate_signal(model, 1, 2)


def test_recurrence_residual_random():
    rng = np.random.default_rng(0)
    for seed in range(30):
        model = build_model(random_specs(rng))
        s = generate_signal(model, 3, 300, seed=seed)
        assert recurrence_residual(model, s.b) <= 1e-10 * np.abs(s.b).max()


def test_boundedness_simple_poles():
    rng = np.random.default_rng(1)
    for seed in range(10):
        model = build_model(random_specs(rng))
        roots = model.roots()
        if len(set(np.round(roots, 6))) < len(roots):
            continue  # only simple poles
        s = generate_signal(model, 2, 10_000, seed=seed)
        n = model.n
        # b_k = sum_j a_j r_j^k; solve the Vandermonde system for the a_j
        V = np.vander(roots, n, increasing=True).T
        a = np.linalg.solve(V, s.b[:n].astype(complex))
        bound = np.abs(a).sum(axis=0)
        assert np.all(np.abs(s.b).max(axis=0) <= 10 * bound)


def test_repeated_pole_grows():
    model = build_model([PoleSpec.real(1, multiplicity=2)])
    s = generate_signal(model, 1, 100, initial=[[0.0], [1.0]])
    np.testing.assert_array_equal(s.b[:, 0], np.arange(100))


# -- optimal_trajectory ------------------------------------------------------------

def _trace(b):
    model = build_model([PoleSpec.real(1)])
    return generate_signal(model, len(b), 3, initial=np.atleast_2d(b))


def test_optimal_identity():
    v = np.array([0.5, -1.0, 2.0])
    xs = optimal_trajectory(np.ones(3), np.eye(3), _trace(v))
    np.testing.assert_array_equal(xs, -np.tile(v, (3, 1)))


def test_optimal_diagonal():
    xs = optimal_trajectory([2.0, 4.0], np.eye(2), _trace([2.0, 8.0]))
    np.testing.assert_array_equal(xs[0], [-1.0, -2.0])


def test_optimal_matches_dense_solve():
    rng = np.random.default_rng(2)
    V, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    lam = rng.uniform(1, 10, 5)
    A = V @ np.diag(lam) @ V.T
    model = build_model([PoleSpec.real(1), PoleSpec.pair(0.4)])
    s = generate_signal(model, 5, 40, seed=3)
    xs = optimal_trajectory(lam, V, s)
    for k in range(40):
        np.testing.assert_allclose(xs[k], np.linalg.solve(A, -s.b[k]), rtol=0,
                                   atol=1e-10 * max(1, np.abs(xs[k]).max()))


def test_optimal_singular():
    with pytest.raises(SingularAError):
        optimal_trajectory([1.0, 0.0], np.eye(2), _trace([1.0, 1.0]))


# -- CSV export -------------------------------------------------------------------

def test_signal_csv(tmp_path):
    model = build_model([PoleSpec.pair(0.7)])
    s = generate_signal(model, 3, 12, seed=4)
    path = tmp_path / "b.csv"
    write_signal_csv(s, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "b_0", "b_1", "b_2"]
    assert len(rows) == 13
    back = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    np.testing.assert_array_equal(back, s.b)
