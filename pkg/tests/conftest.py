import numpy as np
import pytest

from chiralwg import config_from_targets


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_chiral_config(rng, beta_range=(1.0, 1.0)):
    """A config with at least one definitely-chiral qubit (complete basis)."""
    sign = rng.choice([-1.0, 1.0])
    delta1 = sign * rng.uniform(0.2, 1.0)
    delta2 = rng.uniform(-0.95, 0.95)
    gamma = 10 ** rng.uniform(-4.0, -1.5)
    d_tilde = rng.uniform(0.3, 3.0)
    beta = rng.uniform(*beta_range)
    return config_from_targets(delta1, delta2, gamma=gamma, d_tilde=d_tilde,
                               beta1=beta, beta2=beta)


def random_propagatable_config(rng, beta_range=(1.0, 1.0), tries=100):
    """A random chiral config that the scattering propagator accepts.

    Lossy draws can land on a loss-dominated quasi-trapped mode, which the
    propagator refuses by design; redraw until one is admissible.
    """
    from chiralwg.scattering import (_loss_dominated_trap,
                                     _refuses_near_localized,
                                     localized_state_exists)

    for _ in range(tries):
        config = random_chiral_config(rng, beta_range=beta_range)
        if (localized_state_exists(config) or _refuses_near_localized(config)
                or _loss_dominated_trap(config)):
            continue
        return config
    raise AssertionError("no admissible config found")
