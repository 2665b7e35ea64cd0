"""Tensor-product means: axis iteration, kernel-path agreement, maximal
operators, 2D functionals, and the L log L experiment."""

import io
import math

import numpy as np
import pytest

from walshmeans.dyadic import GridSpec
from walshmeans.maximal import IndexSubsequence, subsequence_from_spec
from walshmeans.summability import apply_mean, builtin_matrix, kernel_V
from walshmeans.tensor import (
    GridFunction2D,
    apply_axis,
    grid2d_to_csv,
    hybrid_maximal,
    iterated_majorant,
    llogl_2d,
    llogl_weak_type_experiment,
    load_grid2d,
    random_test_function_2d,
    save_grid2d,
    tensor_maximal,
    tensor_mean,
    tensor_mean_kernel_path,
    weak_quasinorm_2d,
)
from walshmeans.transform import GridFunction1D, walsh_sample

PAIRS = (("fejer", "fejer"), ("fejer", "nlog"), ("cesaro:0.5", "fejer"))


def _random_F(spec, rng):
    return GridFunction2D(spec, rng.normal(size=(spec.size, spec.size)))


def test_apply_axis_constant_and_identity():
    spec = GridSpec(4)
    T = builtin_matrix("nlog")
    F = GridFunction2D.constant(3.0, spec)
    for axis in (0, 1):
        got = apply_axis(T, 5, F, axis).samples
        assert np.abs(got - 3.0 * (1 - T.row(5)[5])).max() < 1e-12
    I = builtin_matrix("identity")
    rng = np.random.default_rng(0)
    F = _random_F(spec, rng)
    assert np.abs(apply_axis(I, spec.size, F, 0).samples - F.samples).max() < 1e-11


def test_apply_axis_separable():
    spec = GridSpec(4)
    rng = np.random.default_rng(1)
    fx = rng.normal(size=spec.size)
    gy = rng.normal(size=spec.size)
    F = GridFunction2D.separable(fx, gy, spec)
    T = builtin_matrix("fejer")
    got = apply_axis(T, 6, F, axis=0).samples
    fx_mean = apply_mean(T, 6, GridFunction1D(spec, fx)).samples
    assert np.abs(got - np.outer(fx_mean, gy)).max() < 1e-11
    got = apply_axis(T, 6, F, axis=1).samples
    gy_mean = apply_mean(T, 6, GridFunction1D(spec, gy)).samples
    assert np.abs(got - np.outer(fx, gy_mean)).max() < 1e-11


def test_tensor_mean_orders_agree():
    spec = GridSpec(6)
    rng = np.random.default_rng(2)
    from walshmeans.summability import matrix_from_spec
    for m0, m1 in PAIRS:
        T0, T1 = matrix_from_spec(m0), matrix_from_spec(m1)
        for _ in range(3):
            F = _random_F(spec, rng)
            n0 = int(rng.integers(1, spec.size + 1))
            n1 = int(rng.integers(1, spec.size + 1))
            a = tensor_mean(T0, n0, T1, n1, F).samples
            b = apply_axis(T0, n0, apply_axis(T1, n1, F, 1), 0).samples
            assert np.abs(a - b).max() < 1e-10


def test_tensor_mean_matches_2d_kernel_path():
    spec = GridSpec(5)
    rng = np.random.default_rng(3)
    T0 = builtin_matrix("fejer")
    T1 = builtin_matrix("nlog")
    for _ in range(3):
        F = _random_F(spec, rng)
        n0, n1 = (int(v) for v in rng.integers(1, spec.size + 1, 2))
        a = tensor_mean(T0, n0, T1, n1, F).samples
        b = tensor_mean_kernel_path(T0, n0, T1, n1, F).samples
        assert np.abs(a - b).max() < 1e-11


def test_tensor_mean_eigenbehavior():
    spec = GridSpec(4)
    T0 = builtin_matrix("fejer")
    T1 = builtin_matrix("nlog")
    from walshmeans.summability import mean_coefficient_weights
    a, b = 3, 5
    F = GridFunction2D.separable(walsh_sample(a, spec).samples,
                                 walsh_sample(b, spec).samples, spec)
    n0, n1 = 7, 11
    lam = mean_coefficient_weights(T0, n0, spec.size)[a]
    mu = mean_coefficient_weights(T1, n1, spec.size)[b]
    got = tensor_mean(T0, n0, T1, n1, F).samples
    assert np.abs(got - lam * mu * F.samples).max() < 1e-12


def test_tensor_mean_constant():
    spec = GridSpec(4)
    T0 = builtin_matrix("nlog")
    T1 = builtin_matrix("cesaro", alpha=0.5)
    F = GridFunction2D.constant(2.0, spec)
    n0, n1 = 3, 6
    expect = 2.0 * (1 - T0.row(n0)[n0]) * (1 - T1.row(n1)[n1])
    assert np.abs(tensor_mean(T0, n0, T1, n1, F).samples - expect).max() < 1e-12


def test_tensor_maximal_basic():
    spec = GridSpec(5)
    rng = np.random.default_rng(4)
    T0 = builtin_matrix("fejer")
    T1 = builtin_matrix("nlog")
    F = _random_F(spec, rng)
    s0 = IndexSubsequence((4,))
    s1 = IndexSubsequence((9,))
    got = tensor_maximal(T0, s0, T1, s1, F).samples
    expect = np.abs(tensor_mean(T0, 4, T1, 9, F).samples)
    assert np.abs(got - expect).max() < 1e-12

    zero = GridFunction2D.constant(0.0, spec)
    s = IndexSubsequence((1, 2, 8))
    assert np.abs(tensor_maximal(T0, s, T1, s, zero).samples).max() == 0.0

    # pointwise max over the product equals the brute-force pair loop
    got = tensor_maximal(T0, s, T1, s, F).samples
    expect = np.maximum.reduce([np.abs(tensor_mean(T0, n0, T1, n1, F).samples)
                                for n0 in s for n1 in s])
    assert np.abs(got - expect).max() < 1e-12


def test_iterated_majorant_singleton_orientation():
    # singleton subsequences against a handwritten two-step computation
    spec = GridSpec(4)
    N = spec.size
    rng = np.random.default_rng(11)
    F = _random_F(spec, rng)
    T0, T1 = builtin_matrix("nlog"), builtin_matrix("fejer")
    n0, n1 = 5, 9
    G = np.abs(apply_axis(T1, n1, F, 1).samples)
    v0 = np.abs(kernel_V(T0, n0, spec).samples)
    idx = np.arange(N)
    direct = np.array([[(v0[x0 ^ idx] * G[:, y]).mean() for y in range(N)]
                       for x0 in range(N)])
    got = iterated_majorant(T0, IndexSubsequence((n0,)),
                            T1, IndexSubsequence((n1,)), F).samples
    assert np.abs(got - direct).max() < 1e-12


def test_tensor_maximal_dominated_by_iterated_majorant():
    spec = GridSpec(5)
    rng = np.random.default_rng(5)
    T0 = builtin_matrix("fejer")
    T1 = builtin_matrix("fejer")
    s0 = subsequence_from_spec("powers:0..5")
    s1 = subsequence_from_spec("list:1,3,7,20")
    for _ in range(3):
        F = _random_F(spec, rng)
        lhs = tensor_maximal(T0, s0, T1, s1, F).samples
        rhs = iterated_majorant(T0, s0, T1, s1, F).samples
        assert np.all(lhs <= rhs + 1e-10)


def test_tensor_mean_linear_and_maximal_homogeneous():
    spec = GridSpec(5)
    rng = np.random.default_rng(9)
    T0 = builtin_matrix("fejer")
    T1 = builtin_matrix("nlog")
    F = _random_F(spec, rng)
    G = _random_F(spec, rng)
    a, b = 1.7, -0.4
    lhs = tensor_mean(T0, 6, T1, 9,
                      GridFunction2D(spec, a * F.samples + b * G.samples)).samples
    rhs = (a * tensor_mean(T0, 6, T1, 9, F).samples
           + b * tensor_mean(T0, 6, T1, 9, G).samples)
    assert np.abs(lhs - rhs).max() < 1e-11

    s = IndexSubsequence((1, 4, 9))
    sup_F = tensor_maximal(T0, s, T1, s, F).samples
    sup_G = tensor_maximal(T0, s, T1, s, G).samples
    sup_sum = tensor_maximal(
        T0, s, T1, s, GridFunction2D(spec, F.samples + G.samples)).samples
    assert np.all(sup_sum <= sup_F + sup_G + 1e-11)          # sublinear
    c = 2.3
    sup_cF = tensor_maximal(T0, s, T1, s,
                            GridFunction2D(spec, c * F.samples)).samples
    assert np.abs(sup_cF - c * sup_F).max() < 1e-11          # homogeneous


def test_weak_quasinorm_2d_and_llogl_2d():
    spec = GridSpec(4)
    half = spec.size // 2
    Q = np.zeros((spec.size, spec.size))
    Q[:half, :half] = 1.0
    assert weak_quasinorm_2d(GridFunction2D(spec, Q)) == pytest.approx(0.25)
    assert weak_quasinorm_2d(GridFunction2D(spec, -3.0 * Q)) == pytest.approx(0.75)
    assert llogl_2d(GridFunction2D.constant(1.0, spec)) == 0.0
    e = math.e
    assert llogl_2d(GridFunction2D.constant(e, spec)) == pytest.approx(e)


def test_hybrid_maximal():
    spec = GridSpec(4)
    assert np.abs(hybrid_maximal(GridFunction2D.constant(-1.5, spec)).samples
                  - 1.5).max() == 0.0
    rng = np.random.default_rng(6)
    g = rng.normal(size=spec.size)
    fx = np.r_[np.ones(spec.size // 2), np.zeros(spec.size // 2)]
    F = GridFunction2D.separable(fx, g, spec)
    got = hybrid_maximal(F).samples
    # on the left half the full first-variable average is attained
    assert np.abs(got[: spec.size // 2, :] - np.abs(g)[None, :]).max() < 1e-12
    F = _random_F(spec, rng)
    assert np.all(hybrid_maximal(F).samples >= np.abs(F.samples) - 1e-14)


def test_llogl_experiment_constant_oracle_and_determinism():
    spec = GridSpec(5)
    T = builtin_matrix("fejer")
    s = subsequence_from_spec("powers:1..5")

    def const_gen(sp, rng):
        return GridFunction2D.constant(1.0, sp)

    rep = llogl_weak_type_experiment(T, s, T, s, trials=2, K=5, seed=0,
                                     generator=const_gen)
    cap = max(kernel_V(T, n, spec).l1_norm() for n in s) ** 2
    assert rep.max_ratio <= cap + 1e-12

    a = llogl_weak_type_experiment(T, s, T, s, trials=6, K=5, seed=3)
    b = llogl_weak_type_experiment(T, s, T, s, trials=6, K=5, seed=3)
    assert a.to_dict() == b.to_dict()


def test_llogl_experiment_stability_fejer():
    T = builtin_matrix("fejer")
    ratios = {}
    for K in (5, 7):
        s = subsequence_from_spec(f"powers:1..{K}")
        ratios[K] = llogl_weak_type_experiment(T, s, T, s, trials=12, K=K,
                                               seed=21).max_ratio
    assert ratios[7] <= 1.2 * ratios[5]


def test_2d_csv_roundtrip():
    spec = GridSpec(3)
    rng = np.random.default_rng(7)
    F = GridFunction2D(spec, rng.normal(size=(8, 8)))
    buf = io.StringIO()
    save_grid2d(F, buf)
    back = load_grid2d(io.StringIO(buf.getvalue()))
    assert np.array_equal(back.samples, F.samples)
    assert grid2d_to_csv(F).splitlines()[0] == "# resolution=3 dims=2"


def test_random_test_function_2d_nonnegative():
    F = random_test_function_2d(GridSpec(5), np.random.default_rng(8))
    assert F.samples.min() >= 0.0
    assert F.l1_norm() > 0.0
