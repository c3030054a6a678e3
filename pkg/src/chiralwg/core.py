"""Parameter model, unit conventions, and coupling algebra shared by all engines.

Conventions
-----------
The recommended internal units are omega0 = 1 and v_g = 1, so the emission
wavelength is lambda0 = 2*pi and every rate is expressed in units of omega0.
Qubit 1 is always the left qubit (smaller position) and is the one that starts
excited; configurations that violate this ordering are rejected instead of
silently swapped, because the sign semantics of the directionality depend on
which qubit holds the initial excitation.  "Right" means toward larger
position.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass


class ValidationError(ValueError):
    """A configuration or argument violates a model invariant."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to meet its accuracy contract."""


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValidationError(f"non-finite value: {name} = {value!r}")


def directionality(gamma_r: float, gamma_l: float) -> float:
    """Directionality (gamma_r - gamma_l) / (gamma_r + gamma_l).

    Returns a value in [-1, 1]; +1 means the qubit emits only to the right,
    -1 only to the left.  Raises ValidationError when both rates vanish,
    since an uncoupled qubit has no directionality.
    """
    for name, value in (("gamma_r", gamma_r), ("gamma_l", gamma_l)):
        _require_finite(name, value)
        if value < 0.0:
            raise ValidationError(f"negative rate: {name} = {value}")
    total = gamma_r + gamma_l
    if total <= 0.0:
        raise ValidationError("uncoupled qubit has no directionality")
    return max(-1.0, min(1.0, (gamma_r - gamma_l) / total))


def beta_factor(gamma_r: float, gamma_l: float, gamma_loss: float) -> float:
    """Fraction of the total decay that goes into the guided modes, in [0, 1]."""
    for name, value in (("gamma_r", gamma_r), ("gamma_l", gamma_l),
                        ("gamma_loss", gamma_loss)):
        _require_finite(name, value)
        if value < 0.0:
            raise ValidationError(f"negative rate: {name} = {value}")
    total = gamma_r + gamma_l + gamma_loss
    if total <= 0.0:
        raise ValidationError("beta factor undefined for a fully uncoupled qubit")
    return max(0.0, min(1.0, (gamma_r + gamma_l) / total))


def couplings_from_targets(delta: float, beta: float,
                           gamma_total: float) -> tuple[float, float, float]:
    """Invert (directionality, beta factor, gamma_r + gamma_l) to raw rates.

    Parameters
    ----------
    delta : directionality in [-1, 1].
    beta : coupling fraction in (0, 1]; beta = 0 would mean infinite loss.
    gamma_total : sum gamma_r + gamma_l, must be positive.

    Returns ``(gamma_r, gamma_l, gamma_loss)`` such that `directionality` and
    `beta_factor` round-trip to machine precision.
    """
    _require_finite("delta", delta)
    _require_finite("beta", beta)
    _require_finite("gamma_total", gamma_total)
    if not -1.0 <= delta <= 1.0:
        raise ValidationError(f"directionality out of range: delta = {delta}")
    if not 0.0 < beta <= 1.0:
        raise ValidationError(f"beta out of range (0, 1]: beta = {beta}")
    if gamma_total <= 0.0:
        raise ValidationError(f"gamma_total must be positive: {gamma_total}")
    gamma_r = gamma_total * (1.0 + delta) / 2.0
    gamma_l = gamma_total * (1.0 - delta) / 2.0
    gamma_loss = gamma_total * (1.0 - beta) / beta
    return gamma_r, gamma_l, gamma_loss


@dataclass(frozen=True)
class QubitParams:
    """One emitter: transition frequency, chiral couplings, loss, position.

    omega : angular transition frequency [rad/time], > 0.
    gamma_r, gamma_l : decay rates into right/left movers [1/time], >= 0.
    gamma_loss : decay rate into non-guided (lossy) modes [1/time], >= 0.
    position : coordinate along the waveguide [length].
    """

    omega: float
    gamma_r: float
    gamma_l: float
    gamma_loss: float = 0.0
    position: float = 0.0

    @property
    def gamma(self) -> float:
        """Half the total waveguide rate, (gamma_r + gamma_l) / 2."""
        return 0.5 * (self.gamma_r + self.gamma_l)

    @property
    def gamma_waveguide(self) -> float:
        """Total rate into guided modes, gamma_r + gamma_l."""
        return self.gamma_r + self.gamma_l

    def is_coupled(self) -> bool:
        return self.gamma_r + self.gamma_l > 0.0


@dataclass(frozen=True)
class DerivedRates:
    """Derived per-qubit rates plus the geometric directionality factor.

    gamma[j] is (gamma_r + gamma_l)/2 of qubit j, delta[j] its directionality,
    beta[j] its coupling fraction, and q = ((1-delta1^2)(1-delta2^2))^(1/4).
    For a deliberately uncoupled qubit (see ``validate(allow_uncoupled=True)``)
    delta and beta are reported as 0.
    """

    gamma: tuple[float, float]
    delta: tuple[float, float]
    beta: tuple[float, float]
    q: float


@dataclass(frozen=True)
class SystemConfig:
    """Two qubits on a linear-dispersion waveguide.

    v_g is the group velocity and omega0 the reference frequency defining the
    emission wavelength lambda0 = 2*pi*v_g/omega0.
    """

    qubit1: QubitParams
    qubit2: QubitParams
    v_g: float = 1.0
    omega0: float = 1.0

    @property
    def lambda0(self) -> float:
        return 2.0 * math.pi * self.v_g / self.omega0

    @property
    def d(self) -> float:
        """Qubit separation x2 - x1."""
        return self.qubit2.position - self.qubit1.position

    @property
    def d_tilde(self) -> float:
        """Separation in units of the emission wavelength."""
        return self.d / self.lambda0

    @property
    def detuning(self) -> float:
        """omega1 - omega2."""
        return self.qubit1.omega - self.qubit2.omega

    def derived_rates(self, allow_uncoupled: bool = False) -> DerivedRates:
        gammas = []
        deltas = []
        betas = []
        for qubit in (self.qubit1, self.qubit2):
            gammas.append(qubit.gamma)
            if qubit.is_coupled():
                deltas.append(directionality(qubit.gamma_r, qubit.gamma_l))
                betas.append(beta_factor(qubit.gamma_r, qubit.gamma_l,
                                         qubit.gamma_loss))
            elif allow_uncoupled:
                deltas.append(0.0)
                betas.append(0.0)
            else:
                raise ValidationError("uncoupled qubit: gamma_r + gamma_l = 0 "
                                      "(pass allow_uncoupled=True if intended)")
        q = ((1.0 - deltas[0] ** 2) ** 0.25) * ((1.0 - deltas[1] ** 2) ** 0.25)
        return DerivedRates(gamma=(gammas[0], gammas[1]),
                            delta=(deltas[0], deltas[1]),
                            beta=(betas[0], betas[1]), q=q)


def validate(config: SystemConfig, allow_uncoupled: bool = False) -> SystemConfig:
    """Check every invariant of a SystemConfig and return it unchanged.

    Raises ValidationError naming the offending field.  ``allow_uncoupled``
    admits a qubit with zero waveguide coupling, which is needed only for
    single-qubit scattering checks and must be requested explicitly.
    """
    for label, qubit in (("qubit1", config.qubit1), ("qubit2", config.qubit2)):
        _require_finite(f"{label}.omega", qubit.omega)
        _require_finite(f"{label}.position", qubit.position)
        if qubit.omega <= 0.0:
            raise ValidationError(f"non-positive frequency: {label}.omega = {qubit.omega}")
        for name in ("gamma_r", "gamma_l", "gamma_loss"):
            value = getattr(qubit, name)
            _require_finite(f"{label}.{name}", value)
            if value < 0.0:
                raise ValidationError(f"negative rate: {label}.{name} = {value}")
        if not qubit.is_coupled() and not allow_uncoupled:
            raise ValidationError(
                f"uncoupled qubit: {label} has gamma_r + gamma_l = 0")
    _require_finite("v_g", config.v_g)
    _require_finite("omega0", config.omega0)
    if config.v_g <= 0.0:
        raise ValidationError(f"non-positive group velocity: v_g = {config.v_g}")
    if config.omega0 <= 0.0:
        raise ValidationError(f"non-positive reference frequency: omega0 = {config.omega0}")
    if not config.qubit2.position > config.qubit1.position:
        raise ValidationError(
            "qubit ordering: qubit2.position must exceed qubit1.position "
            f"({config.qubit2.position} <= {config.qubit1.position})")
    config.derived_rates(allow_uncoupled=allow_uncoupled)
    return config


def config_from_targets(delta1: float, delta2: float, gamma: float = 1e-4,
                        d_tilde: float = 1.0, beta1: float = 1.0,
                        beta2: float = 1.0, detuning: float = 0.0,
                        omega0: float = 1.0, v_g: float = 1.0) -> SystemConfig:
    """Build a SystemConfig from the quantities the sweeps are framed in.

    ``gamma`` is the waveguide coupling rate of each qubit in the
    (gamma_r + gamma_l)/2 sense, so the directional rates sum to 2*gamma.
    The detuning is applied symmetrically, omega1 = omega0 + detuning/2 and
    omega2 = omega0 - detuning/2, and the qubits sit at -d/2 and +d/2.
    """
    g1r, g1l, g1loss = couplings_from_targets(delta1, beta1, 2.0 * gamma)
    g2r, g2l, g2loss = couplings_from_targets(delta2, beta2, 2.0 * gamma)
    lambda0 = 2.0 * math.pi * v_g / omega0
    half_d = 0.5 * d_tilde * lambda0
    config = SystemConfig(
        qubit1=QubitParams(omega=omega0 + 0.5 * detuning, gamma_r=g1r,
                           gamma_l=g1l, gamma_loss=g1loss, position=-half_d),
        qubit2=QubitParams(omega=omega0 - 0.5 * detuning, gamma_r=g2r,
                           gamma_l=g2l, gamma_loss=g2loss, position=half_d),
        v_g=v_g, omega0=omega0)
    return validate(config)


def config_items(config: SystemConfig) -> list[tuple[str, float]]:
    """Flatten a config to sorted (dotted-key, value) pairs."""
    items = []
    for label, qubit in (("qubit1", config.qubit1), ("qubit2", config.qubit2)):
        for name in ("omega", "gamma_r", "gamma_l", "gamma_loss", "position"):
            items.append((f"{label}.{name}", getattr(qubit, name)))
    items.append(("v_g", config.v_g))
    items.append(("omega0", config.omega0))
    return sorted(items)


def config_hash(config: SystemConfig) -> str:
    """Short stable hash of the full parameter set."""
    text = ";".join(f"{key}={value:.17g}" for key, value in config_items(config))
    return hashlib.sha256(text.encode()).hexdigest()[:12]
