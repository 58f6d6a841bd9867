import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracles
from vdmkit.errors import DataError, DimensionMismatchError
from vdmkit.sample_metrics import (
    JEDI_KERNEL,
    JEDI_SCALE,
    KernelSpec,
    energy_distance,
    jedi_score,
    kernel_eval,
    mmd2_unbiased,
)

SPECS = [
    (KernelSpec("linear"), oracles.k_linear, {}),
    (KernelSpec("polynomial", degree=2, gamma=1.0, coef=0.0), oracles.k_poly,
     dict(degree=2, gamma=1.0, coef=0.0)),
    (KernelSpec("polynomial", degree=3, gamma=0.5, coef=1.0), oracles.k_poly,
     dict(degree=3, gamma=0.5, coef=1.0)),
    (KernelSpec("rbf", gamma=0.7), oracles.k_rbf, dict(gamma=0.7)),
    (KernelSpec("laplacian", gamma=0.3), oracles.k_lap, dict(gamma=0.3)),
]


def test_kernel_eval_matches_scalar_oracles():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(1)))
    for spec, fn, kw in SPECS:
        for _ in range(10):
            u = rng.normal(size=4)
            v = rng.normal(size=4)
            assert_allclose(kernel_eval(spec, u, v), fn(u, v, **kw), rtol=1e-12)


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("cosine")
    with pytest.raises(ValueError):
        KernelSpec("rbf", gamma=-1.0)
    with pytest.raises(ValueError):
        KernelSpec("polynomial", degree=0)
    assert KernelSpec("rbf").gamma == "auto"
    assert KernelSpec("rbf").resolve_gamma(8) == 1.0 / 8


def test_mmd_matches_naive_all_kernels():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(2)))
    x = rng.normal(size=(14, 3))
    y = rng.normal(size=(11, 3)) + 0.4
    for spec, fn, kw in SPECS:
        got = mmd2_unbiased(x, y, spec).value
        want = oracles.naive_mmd2_unbiased(x, y, fn, **kw)
        assert_allclose(got, want, rtol=1e-10, atol=1e-12)


def test_mmd_auto_gamma_is_one_over_d():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(3)))
    x = rng.normal(size=(10, 5))
    y = rng.normal(size=(12, 5))
    res = mmd2_unbiased(x, y, KernelSpec("rbf"))
    want = oracles.naive_mmd2_unbiased(x, y, oracles.k_rbf, gamma=0.2)
    assert_allclose(res.value, want, rtol=1e-10)
    assert res.params["gamma"] == 0.2


def test_mmd_block_boundaries_change_nothing():
    # sizes straddling the 256-row block edge must agree with the naive sum
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(4)))
    spec = KernelSpec("linear")
    y = rng.normal(size=(64, 2))
    for m in (255, 256, 257):
        x = rng.normal(size=(m, 2))
        got = mmd2_unbiased(x, y, spec).value
        kxx = x @ x.T
        kyy = y @ y.T
        kxy = x @ y.T
        want = (
            (kxx.sum() - np.trace(kxx)) / (m * (m - 1))
            + (kyy.sum() - np.trace(kyy)) / (64 * 63)
            - 2.0 * kxy.sum() / (m * 64)
        )
        assert_allclose(got, want, rtol=1e-9)


def test_mmd_unbiasedness_sign_under_null():
    # the unbiased estimate must be allowed to dip below zero
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(5)))
    vals = []
    for _ in range(30):
        x = rng.normal(size=(8, 2))
        y = rng.normal(size=(8, 2))
        vals.append(mmd2_unbiased(x, y, KernelSpec("rbf", gamma=1.0)).value)
    assert min(vals) < 0.0 < max(vals)


def test_mmd_duplicated_set_slightly_negative_shifted_positive():
    # duplicating x is not an independent draw: within-set sums drop the
    # diagonal but the cross term keeps it, leaving an O(1/m) negative offset
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(6)))
    x = rng.normal(size=(60, 4))
    spec = KernelSpec("rbf", gamma=0.5)
    same = mmd2_unbiased(x, x.copy(), spec).value
    assert -2.0 / 60 <= same <= 0.0
    far = mmd2_unbiased(x, x + 3.0, spec).value
    assert far > 0.1


def test_mmd_errors():
    x = np.ones((5, 2))
    with pytest.raises(DataError):
        mmd2_unbiased(x[:1], x, KernelSpec("linear"))
    with pytest.raises(DimensionMismatchError):
        mmd2_unbiased(x, np.ones((5, 3)), KernelSpec("linear"))


def test_metric_result_serialization_shape():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(7)))
    x = rng.normal(size=(10, 3))
    res = mmd2_unbiased(x, x + 1.0, KernelSpec("polynomial", degree=2), seed=9)
    doc = res.to_dict()
    assert doc["metric"] == "mmd-poly"
    assert doc["n_real"] == 10 and doc["n_gen"] == 10
    assert doc["seed"] == 9
    assert doc["params"]["degree"] == 2
    assert set(doc) >= {"metric", "value", "n_real", "n_gen", "elapsed_ms"}


def test_energy_matches_naive():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(8)))
    for m, n in ((5, 7), (20, 13), (9, 30)):
        x = rng.normal(size=(m, 3))
        y = rng.normal(size=(n, 3)) - 0.3
        got = energy_distance(x, y).value
        assert_allclose(got, oracles.naive_energy(x, y), rtol=1e-10, atol=1e-12)


def test_energy_axioms():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(9)))
    x = rng.normal(size=(40, 3))
    y = rng.normal(size=(35, 3)) + 1.0
    assert_allclose(energy_distance(x, x.copy()).value, 0.0, atol=1e-10)
    ab = energy_distance(x, y).value
    ba = energy_distance(y, x).value
    assert ab > 0.0
    assert_allclose(ab, ba, rtol=1e-12)
    assert energy_distance(x[:1], y).metric_id == "energy"  # m=1 allowed


def test_energy_block_boundary():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(10)))
    y = rng.normal(size=(40, 2))
    for m in (255, 257):
        x = rng.normal(size=(m, 2))
        got = energy_distance(x, y).value
        dxy = np.sqrt(((x[:, None, :] - y[None, :, :]) ** 2).sum(-1))
        dxx = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
        dyy = np.sqrt(((y[:, None, :] - y[None, :, :]) ** 2).sum(-1))
        want = 2 * dxy.mean() - dxx.mean() - dyy.mean()
        assert_allclose(got, want, rtol=1e-9)


def test_jedi_is_scaled_poly2_mmd():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(11)))
    x = rng.normal(size=(50, 6))
    y = rng.normal(size=(45, 6)) * 1.3
    res = jedi_score(x, y)
    inner = mmd2_unbiased(x, y, JEDI_KERNEL)
    assert JEDI_SCALE == 100.0
    assert JEDI_KERNEL.degree == 2
    assert JEDI_KERNEL.gamma == 1.0
    assert JEDI_KERNEL.coef == 0.0
    assert_allclose(res.value, 100.0 * inner.value, rtol=1e-12)
    assert res.metric_id == "jedi"
    assert res.params["scale"] == 100.0


def test_jedi_reports_raw_negatives_by_default():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(12)))
    neg = None
    for _ in range(40):
        x = 0.25 * rng.standard_normal((16, 4))
        y = 0.25 * rng.standard_normal((16, 4))
        v = jedi_score(x, y).value
        if v < 0.0:
            neg = (x, y, v)
            break
    assert neg is not None
    x, y, v = neg
    clamped = jedi_score(x, y, clamp_negative=True)
    assert clamped.value == 0.0
    assert clamped.params["clamped"] is True


def test_jedi_warns_on_other_extractor():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(13)))
    x = rng.normal(size=(10, 4))
    with pytest.warns(UserWarning, match="vjepa_ssv2"):
        jedi_score(x, x + 1.0, extractor="i3d")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        jedi_score(x, x + 1.0, extractor="vjepa_ssv2")
        jedi_score(x, x + 1.0)
