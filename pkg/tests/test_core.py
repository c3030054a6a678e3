import math

import numpy as np
import pytest

from chiralwg import (QubitParams, SystemConfig, ValidationError, beta_factor,
                      config_from_targets, couplings_from_targets,
                      directionality, validate)
from chiralwg.core import config_hash, config_items


def test_directionality_symmetric():
    assert directionality(1.0, 1.0) == 0.0


def test_directionality_fully_right():
    assert directionality(1.0, 0.0) == 1.0


def test_directionality_experimental_value():
    assert directionality(0.95, 0.05) == pytest.approx(0.90, abs=1e-15)


def test_directionality_rejects_uncoupled():
    with pytest.raises(ValidationError, match="directionality"):
        directionality(0.0, 0.0)


def test_directionality_rejects_negative():
    with pytest.raises(ValidationError, match="negative rate"):
        directionality(-0.1, 0.2)


def test_beta_factor_lossless():
    assert beta_factor(0.5, 0.5, 0.0) == 1.0


def test_beta_factor_equal_split():
    assert beta_factor(0.5, 0.5, 1.0) == 0.5


def test_beta_factor_098():
    # invert beta = 2g/(2g + G) at 2g = 1: G = (1 - beta)/beta
    gamma_loss = 0.02 / 0.98
    assert beta_factor(0.5, 0.5, gamma_loss) == pytest.approx(0.98, abs=1e-12)
    assert beta_factor(0.5, 0.5, 0.0204081633) == pytest.approx(0.98, abs=1e-9)


def test_beta_factor_rejects_all_zero():
    with pytest.raises(ValidationError):
        beta_factor(0.0, 0.0, 0.0)


def test_couplings_from_targets_trivial():
    assert couplings_from_targets(0.0, 1.0, 1.0) == (0.5, 0.5, 0.0)
    assert couplings_from_targets(1.0, 1.0, 1.0) == (1.0, 0.0, 0.0)


def test_couplings_from_targets_fig4_values():
    gr, gl, gloss = couplings_from_targets(0.9, 0.98, 1.0)
    assert gr == pytest.approx(0.95, abs=1e-15)
    assert gl == pytest.approx(0.05, abs=1e-15)
    assert gloss == pytest.approx(0.02 / 0.98, rel=1e-15)
    assert gloss == pytest.approx(0.0204081633, abs=1e-9)


def test_couplings_from_targets_rejects_zero_beta():
    with pytest.raises(ValidationError, match="beta"):
        couplings_from_targets(0.5, 0.0, 1.0)


def test_couplings_round_trip(rng):
    for _ in range(300):
        delta = rng.uniform(-1.0, 1.0)
        beta = rng.uniform(0.05, 1.0)
        total = 10 ** rng.uniform(-6.0, 0.0)
        gr, gl, gloss = couplings_from_targets(delta, beta, total)
        assert directionality(gr, gl) == pytest.approx(delta, abs=1e-12)
        assert beta_factor(gr, gl, gloss) == pytest.approx(beta, rel=1e-12)
        assert gr + gl == pytest.approx(total, rel=1e-12)


def test_directionality_extremes_iff_one_rate_zero(rng):
    for _ in range(200):
        gr, gl = 10 ** rng.uniform(-6, 0, 2)
        value = directionality(gr, gl)
        assert -1.0 <= value <= 1.0
        assert abs(value) < 1.0
    assert directionality(0.0, 0.3) == -1.0


def _simple_config(**kwargs):
    defaults = dict(
        qubit1=QubitParams(omega=1.0, gamma_r=0.01, gamma_l=0.01, position=0.0),
        qubit2=QubitParams(omega=1.0, gamma_r=0.01, gamma_l=0.01,
                           position=2.0 * math.pi),
        v_g=1.0, omega0=1.0)
    defaults.update(kwargs)
    return SystemConfig(**defaults)


def test_validate_accepts_and_derives():
    config = validate(_simple_config())
    assert config.lambda0 == pytest.approx(2.0 * math.pi)
    assert config.d_tilde == pytest.approx(1.0)
    rates = config.derived_rates()
    assert rates.gamma == (0.01, 0.01)
    assert rates.delta == (0.0, 0.0)
    assert rates.beta == (1.0, 1.0)
    assert rates.q == 1.0


def test_validate_rejects_qubit_ordering():
    bad = _simple_config(
        qubit2=QubitParams(omega=1.0, gamma_r=0.01, gamma_l=0.01,
                           position=-1.0))
    with pytest.raises(ValidationError, match="qubit ordering"):
        validate(bad)


def test_validate_rejects_negative_rate():
    bad = _simple_config(
        qubit1=QubitParams(omega=1.0, gamma_r=-0.01, gamma_l=0.01,
                           position=0.0))
    with pytest.raises(ValidationError, match="negative rate"):
        validate(bad)


def test_validate_rejects_uncoupled_by_default():
    bad = _simple_config(
        qubit2=QubitParams(omega=1.0, gamma_r=0.0, gamma_l=0.0, position=1.0))
    with pytest.raises(ValidationError, match="uncoupled"):
        validate(bad)
    validate(bad, allow_uncoupled=True)


def test_validate_rejects_nonpositive_omega():
    bad = _simple_config(
        qubit1=QubitParams(omega=0.0, gamma_r=0.01, gamma_l=0.01,
                           position=0.0))
    with pytest.raises(ValidationError, match="omega"):
        validate(bad)


def test_derived_quantities_are_deterministic():
    config = _simple_config()
    first = validate(config).derived_rates()
    second = validate(config).derived_rates()
    assert first == second


def test_config_from_targets_round_trip():
    config = config_from_targets(0.9, -0.4, gamma=2e-3, d_tilde=1.7,
                                 beta1=0.98, beta2=0.7, detuning=1e-4)
    rates = config.derived_rates()
    assert rates.delta[0] == pytest.approx(0.9, abs=1e-12)
    assert rates.delta[1] == pytest.approx(-0.4, abs=1e-12)
    assert rates.beta[0] == pytest.approx(0.98, rel=1e-12)
    assert rates.beta[1] == pytest.approx(0.7, rel=1e-12)
    assert rates.gamma == pytest.approx((2e-3, 2e-3), rel=1e-12)
    assert config.d_tilde == pytest.approx(1.7, rel=1e-12)
    assert config.detuning == pytest.approx(1e-4, rel=1e-12)
    assert config.qubit1.omega == pytest.approx(1.0 + 5e-5)


def test_config_hash_stable_and_sensitive():
    a = config_from_targets(0.9, 0.9, gamma=1e-3)
    b = config_from_targets(0.9, 0.9, gamma=1e-3)
    c = config_from_targets(0.9, 0.9, gamma=1.0000001e-3)
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(c)
    assert len(config_items(a)) == 12
