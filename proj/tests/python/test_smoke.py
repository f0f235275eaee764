"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import spectralfdr as sf


def test_philox_matches_numpy():
    ours = sf.PhiloxRng(42)
    theirs = np.random.Philox(key=42)
    raw = theirs.random_raw(16)
    for want in raw:
        assert ours.next_u64() == int(want)


def test_symmetric_spectrum_roundtrip():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((30, 30))
    m = (g + g.T) / 2
    spec = sf.symmetric_spectrum(m)
    values = np.asarray(spec.values)
    assert np.all(np.diff(values) <= 0)
    u = np.asarray(spec.left_basis)
    assert np.linalg.norm(u @ np.diag(values) @ u.T - m) <= 1e-9 * np.linalg.norm(m)


def test_transform_hand_values():
    bulk = sf.BulkSpectrum(np.array([1.0, -1.0]))
    v = sf.cauchy_estimate(bulk, 2.0)
    assert v.g == pytest.approx(2.0 / 3.0, abs=1e-14)
    assert v.g_prime == pytest.approx(-5.0 / 9.0, abs=1e-14)
    assert sf.ratio_symmetric(bulk, 2.0) == pytest.approx(-0.8, abs=1e-14)

    positive = sf.BulkSpectrum(np.array([1.0]))
    assert sf.phi_estimate(positive, 2.0, 0.5).g == pytest.approx(7.0 / 12.0)
    assert sf.ratio_asymmetric(positive, 2.0, 1.0, sf.Side.left) == pytest.approx(-0.8)


def test_rank_estimate_example():
    values = np.concatenate(([10.0, 5.0], np.linspace(1.0, 0.01, 98)))
    spec = sf.symmetric_spectrum(np.diag(values), want_vectors=False)
    result = sf.rank_estimate(spec, sf.RankConfig(1.0))
    assert result.r_hat == 2


def test_oracle_forecast():
    law = sf.LimitLaw.semicircle()
    fc = sf.spike_forecast(law, 2.0, sf.LawMode.eigen)
    assert fc.above_threshold
    assert fc.location == pytest.approx(2.5, abs=1e-8)
    assert fc.overlap == pytest.approx(0.75, abs=1e-8)
    assert sf.fdr_infinity(law, [2.0], 1, sf.LawMode.eigen) == pytest.approx(0.25)


def test_select_pipeline():
    noise = sf.NoiseSpec(sf.NoiseFamily.wigner, 300)
    signal = sf.SignalSpec(sf.SignalKind.well_separated, 5, sf.bbp_upper_estimate(noise))
    inst = sf.sample_instance(noise, signal, seed=7)
    result = sf.select(np.asarray(inst.X), alpha=0.2)
    assert result.r_hat == 5
    assert 1 <= result.k_hat <= 10
    curve = np.asarray(result.curve.estimates)
    assert np.all(curve >= 0) and np.all(curve <= 1)
    assert np.all(np.diff(curve) >= -1e-12)


def test_run_experiment_deterministic():
    config = sf.ExperimentConfig()
    config.noise = sf.NoiseSpec(sf.NoiseFamily.wigner, 80)
    config.signal = sf.SignalSpec(sf.SignalKind.well_separated, 3, 1.5)
    config.repetitions = 4
    config.k_max = 6
    config.master_seed = 5
    first = sf.run_experiment(config)
    second = sf.run_experiment(config)
    for a, b in zip(first.rows, second.rows):
        assert a.fdr_estimate_mean == b.fdr_estimate_mean
        assert a.fdr_mc_mean == b.fdr_mc_mean
    assert first.rank_estimates == second.rank_estimates


def test_domain_errors_surface_as_python_exceptions():
    bulk = sf.BulkSpectrum(np.array([1.0, 0.5]))
    with pytest.raises(ArithmeticError):
        sf.cauchy_estimate(bulk, 0.0)  # inside the bulk
    with pytest.raises(ValueError):
        sf.phi_estimate(bulk, 2.0, 0.0)  # q outside (0, 1]
