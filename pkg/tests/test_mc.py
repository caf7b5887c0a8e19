import numpy as np
import numpy.testing as npt
import pytest

from smoothed_lab import gallery, mc
from smoothed_lab.bounds import BoundParams
from smoothed_lab.matlin import Matrix
from smoothed_lab.perturb import PerturbationModel


def config(**kw):
    base = dict(statistic="kappa",
                model=PerturbationModel("dense_gaussian", 1.0),
                base=mc.BaseSpec("zero"), n=4, trials=8, seed=0,
                thresholds=(2.0, 10.0))
    base.update(kw)
    return mc.ExperimentConfig(**base)


def test_base_spec_parsing():
    assert mc.BaseSpec.parse("zero") == mc.BaseSpec("zero")
    assert mc.BaseSpec.parse("file:/tmp/a.txt") == mc.BaseSpec(
        "file", path="/tmp/a.txt")
    assert mc.BaseSpec.parse("gallery:symmetric-embedding") == mc.BaseSpec(
        "gallery", name="symmetric_embedding")
    with pytest.raises(mc.ConfigInvalid):
        mc.BaseSpec.parse("ftp:nope")
    with pytest.raises(mc.ConfigInvalid):
        mc.BaseSpec("gallery")


def test_config_validation():
    with pytest.raises(mc.ConfigInvalid):
        config(statistic="determinant")
    with pytest.raises(mc.ConfigInvalid):
        config(trials=0)
    with pytest.raises(mc.ConfigInvalid):
        config(n=None)
    with pytest.raises(mc.ConfigInvalid):
        config(thresholds=(3.0, 2.0))
    with pytest.raises(mc.ConfigInvalid):
        config(thresholds=(0.0, 2.0))
    with pytest.raises(mc.ConfigInvalid):
        config(thresholds=())
    with pytest.raises(mc.ConfigInvalid):
        config(model="dense")
    cfg = config(thresholds=[2, 10])
    assert cfg.thresholds == (2.0, 10.0)


def test_resolve_base_zero_and_gallery():
    m = mc.resolve_base(config(n=3))
    npt.assert_array_equal(m.data, np.zeros((3, 3)))
    cfg = config(base=mc.BaseSpec("gallery", name="bidiagonal"), n=5)
    npt.assert_array_equal(mc.resolve_base(cfg).data,
                           gallery.bidiagonal_example(5).data)
    with pytest.raises(mc.ConfigInvalid):
        mc.resolve_base(config(base=mc.BaseSpec("gallery", name="hilbert")))
    with pytest.raises(mc.BaseMatrixUnavailable):
        mc.resolve_base(config(base=mc.BaseSpec(
            "file", path="/nonexistent/base.txt")))


def test_resolve_base_file_roundtrip(tmp_path):
    from smoothed_lab import cli
    path = str(tmp_path / "base.txt")
    cli.write_matrix_file(Matrix([[1.0, 0.5], [0.25, 2.0]]), path)
    cfg = config(base=mc.BaseSpec("file", path=path), n=2)
    npt.assert_array_equal(mc.resolve_base(cfg).data,
                           [[1.0, 0.5], [0.25, 2.0]])
    with pytest.raises(mc.ConfigInvalid):
        mc.resolve_base(config(base=mc.BaseSpec("file", path=path), n=3))
    cfg = config(base=mc.BaseSpec("file", path=path), n=None)
    assert mc.resolve_base(cfg).rows == 2


def test_one_by_one_condition_number_is_one():
    run = mc.run_experiment(config(n=1, trials=3))
    assert run.samples == (1.0, 1.0, 1.0)
    assert run.failures == 0


def test_runs_are_deterministic_across_thread_counts(monkeypatch):
    cfg = config(statistic="rho_u", n=6, trials=40, seed=17)
    monkeypatch.setenv(mc.THREADS_ENV_VAR, "1")
    serial = mc.run_experiment(cfg)
    monkeypatch.setenv(mc.THREADS_ENV_VAR, "3")
    threaded = mc.run_experiment(cfg)
    assert serial == threaded
    monkeypatch.setenv(mc.THREADS_ENV_VAR, "zippy")
    with pytest.raises(mc.ConfigInvalid):
        mc.run_experiment(cfg)


def test_symmetric_model_requires_symmetric_base(tmp_path):
    from smoothed_lab import cli
    path = str(tmp_path / "base.txt")
    cli.write_matrix_file(Matrix([[1.0, 2.0], [3.0, 4.0]]), path)
    cfg = config(model=PerturbationModel("zero_preserving_symmetric", 0.1),
                 base=mc.BaseSpec("file", path=path), n=2)
    with pytest.raises(mc.ConfigInvalid):
        mc.run_experiment(cfg)


def test_singular_trials_are_excluded(tmp_path):
    from smoothed_lab import cli
    path = str(tmp_path / "base.txt")
    cli.write_matrix_file(Matrix([[1.0, 1.0], [1.0, 1.0]]), path)
    cfg = config(model=PerturbationModel("dense_gaussian", 0.0),
                 base=mc.BaseSpec("file", path=path), n=2, trials=5)
    run = mc.run_experiment(cfg)
    assert run.samples == ()
    assert run.failures == 5
    with pytest.raises(mc.EmptySamples):
        mc.survival_with_ci(run.samples, 2.0)


def test_partial_pivot_growth_is_bounded_by_order():
    cfg = config(statistic="rho_l_pp", n=8, trials=50, seed=2)
    run = mc.run_experiment(cfg)
    assert run.failures == 0
    assert max(run.samples) <= 8.0
    assert min(run.samples) >= 1.0


def test_survival_counts_are_closed_at_threshold():
    est = mc.survival_with_ci((5.0, 1.0, 3.0), 3.0, 0.999)
    assert est.count == 2 and est.trials == 3
    npt.assert_allclose(est.p_hat, 2.0 / 3.0)
    assert 0.0 <= est.ci_low <= est.p_hat <= est.ci_high <= 1.0
    empty_tail = mc.survival_with_ci((5.0, 1.0, 3.0), 10.0, 0.999)
    assert empty_tail.p_hat == 0.0 and empty_tail.ci_low == 0.0


def test_wilson_interval_edges():
    lo, hi = mc.wilson_interval(0, 100, 0.999)
    assert lo == 0.0 and 0.0 < hi < 0.2
    lo, hi = mc.wilson_interval(100, 100, 0.999)
    assert hi == 1.0 and 0.8 < lo < 1.0
    lo, hi = mc.wilson_interval(50, 100, 0.999)
    assert lo < 0.5 < hi
    wide = mc.wilson_interval(50, 100, 0.999)
    narrow = mc.wilson_interval(50, 100, 0.9)
    assert narrow[0] > wide[0] and narrow[1] < wide[1]


def test_check_against_bound_vacuous_and_shifted():
    samples = tuple(float(v) for v in range(1, 11))
    params = BoundParams(n=4, x=1.0, sigma=1.0)
    verdicts = mc.check_against_bound(samples, "edelman", params, (2.0,))
    assert len(verdicts) == 1
    v = verdicts[0]
    assert v.bound_value == 1.0
    assert v.passed
    npt.assert_allclose(v.margin, 1.0 - v.estimate.ci_low)
    shifted = mc.check_against_bound(samples, "rho_u_first",
                                     BoundParams(n=4, x=1.0, sigma=0.5),
                                     (9.0,))[0]
    from smoothed_lab.bounds import bound_growth
    want = min(1.0, bound_growth("rho_u_first",
                                 BoundParams(n=4, x=8.0, sigma=0.5)))
    npt.assert_allclose(shifted.bound_value, want)


def test_mean_with_ci():
    mean, half = mc.mean_with_ci([1.0, 1.0, 1.0])
    assert mean == 1.0 and half == 0.0
    mean, half = mc.mean_with_ci([7.0])
    assert mean == 7.0 and half == 0.0
    mean, half = mc.mean_with_ci([0.0, 2.0])
    assert mean == 1.0 and half > 0.0
    with pytest.raises(mc.EmptySamples):
        mc.mean_with_ci([])
