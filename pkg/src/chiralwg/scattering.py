"""Exact single-excitation dynamics via real-space scattering eigenstates.

For a linear-dispersion waveguide the stationary states at energy eps are
plane waves with piecewise-constant coefficients,

    phi_R(x) = exp(+i*eps*x/v_g) * {A, B, C}   (left of / between / right of
    phi_L(x) = exp(-i*eps*x/v_g) * {D, E, F}    the two qubits),

plus qubit amplitudes alpha1, alpha2.  Inserting this ansatz into the
stationary equation reduces the problem to a 6x6 linear system: one jump
condition per direction per qubit (integrating the first-order field
equations across each delta coupling, with the field value at the coupling
point taken as the mean of its one-sided limits) and two qubit-amplitude
equations.  Couplings enter as V = sqrt(gamma * v_g); external loss enters as
a complex qubit frequency omega -> omega - i*gamma_loss/2.

Two degenerate branches exist per energy: '+' is incidence from x = -inf
(A = 1, F = 0) and '-' from x = +inf (F = 1, A = 0).  Under chiral coupling
the branches are not orthogonal, so time evolution needs the per-length
overlap (Gram) matrix S restricted to the asymptotic plane-wave products:
only co-propagating equal-wavenumber products survive the large-box average,
each asymptotic half-line contributing half its coefficient product.  Initial
states are then propagated by quadrature of

    alpha_q(t) = (1/2*pi*v_g) * sum_ij int deps exp(-i*eps*t)
                 * alpha_q_i(eps) * (S^-1)_ij(eps) * <eps_j | psi(0)>,

over an automatically widened energy window until the result is stable.
When qubits are lossy the bra states are taken from the adjoint family
(frequency omega + i*gamma_loss/2, then conjugated); this reduces to plain
conjugation for beta = 1 and keeps both U(0) = 1 and the loss-induced decay
exact instead of accurate only to first order in gamma_loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from scipy.special import sici

from ._util import write_csv
from .core import (NumericalError, SystemConfig, ValidationError, validate)

BRANCHES = ("+", "-")

# Residual bound every returned eigenstate must satisfy.
RESIDUAL_TOL = 1e-12

# Overlap-matrix condition numbers above this abort the propagation.
COND_LIMIT = 1e8

# Width of the refuse-band around the localized-resonance condition.
GUARD_BAND = 1e-6

SPECTRUM_COLUMNS = ("epsilon", "re_t", "im_t", "re_r", "im_r", "flux_deficit")
AMPLITUDE_COLUMNS = ("t", "re_alpha1", "im_alpha1", "re_alpha2", "im_alpha2",
                     "concurrence")


@dataclass(frozen=True)
class ScatteringEigenstate:
    """One scattering eigenstate: plane-wave coefficients plus qubit amplitudes."""

    energy: float
    branch: str
    coeff_a: complex
    coeff_b: complex
    coeff_c: complex
    coeff_d: complex
    coeff_e: complex
    coeff_f: complex
    alpha1: complex
    alpha2: complex


@dataclass(frozen=True)
class OverlapMatrix:
    """Per-length Gram matrix of the two branches at fixed energy."""

    entries: np.ndarray
    condition_number: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls the spectral quadrature of the propagator.

    window : half-width of the energy window around the mean qubit frequency;
        None picks max(200*gamma_tot, 20*|detuning| + 50*gamma_tot).
    nodes : lower bound on the Simpson intervals of the first round (a power
        of two); raised automatically until linewidths, retardation phases
        and the requested time span are resolved.
    tol : maximum change of any amplitude allowed between refinement rounds.
    max_rounds : window/node doublings attempted before giving up.
    refine : disable to run a single round without the convergence check.
    """

    window: float | None = None
    nodes: int = 2 ** 14
    tol: float = 1e-4
    max_rounds: int = 7
    refine: bool = True


@dataclass
class AmplitudeTrace:
    """Qubit amplitudes on a time grid, with quadrature diagnostics in info."""

    times: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def survival(self) -> np.ndarray:
        return np.abs(self.alpha1) ** 2 + np.abs(self.alpha2) ** 2

    def concurrence(self) -> np.ndarray:
        return np.clip(2.0 * np.abs(self.alpha1) * np.abs(self.alpha2),
                       0.0, 1.0)


@dataclass(frozen=True)
class LocalizedStateCheck:
    """Boolean-like result of the localized-resonance test, with diagnostic."""

    exists: bool
    diagnostic: str

    def __bool__(self) -> bool:
        return self.exists


def _solve_families(config: SystemConfig, energies: np.ndarray,
                    loss_sign: float = -1.0) -> dict[str, np.ndarray]:
    """Solve the 6x6 system for both branches at each energy.

    Returns arrays of shape (2, n) keyed 'a'..'f', 'alpha1', 'alpha2';
    first axis is the branch (+, -).  ``loss_sign=+1`` solves the adjoint
    family (conjugate qubit poles) used for bra states.
    """
    q1, q2 = config.qubit1, config.qubit2
    v_g = config.v_g
    eps = np.asarray(energies, dtype=float).ravel()
    n = eps.size

    v1r, v1l = math.sqrt(q1.gamma_r * v_g), math.sqrt(q1.gamma_l * v_g)
    v2r, v2l = math.sqrt(q2.gamma_r * v_g), math.sqrt(q2.gamma_l * v_g)
    om1 = q1.omega + loss_sign * 0.5j * q1.gamma_loss
    om2 = q2.omega + loss_sign * 0.5j * q2.gamma_loss

    k = eps / v_g
    p1 = np.exp(1j * k * q1.position)
    p2 = np.exp(1j * k * q2.position)

    m = np.zeros((n, 6, 6), dtype=complex)
    # unknowns: (B, C, D, E, alpha1, alpha2)
    m[:, 0, 0] = 1.0
    m[:, 0, 4] = 1j * v1r / (v_g * p1)
    m[:, 1, 0] = -1.0
    m[:, 1, 1] = 1.0
    m[:, 1, 5] = 1j * v2r / (v_g * p2)
    m[:, 2, 2] = -1.0
    m[:, 2, 3] = 1.0
    m[:, 2, 4] = -1j * v1l * p1 / v_g
    m[:, 3, 3] = -1.0
    m[:, 3, 5] = -1j * v2l * p2 / v_g
    if q1.is_coupled():
        m[:, 4, 0] = -0.5 * v1r * p1
        m[:, 4, 2] = -0.5 * v1l / p1
        m[:, 4, 3] = -0.5 * v1l / p1
        m[:, 4, 4] = eps - om1
    else:
        m[:, 4, 4] = 1.0  # uncoupled: pin alpha1 = 0 to keep the system regular
    if q2.is_coupled():
        m[:, 5, 0] = -0.5 * v2r * p2
        m[:, 5, 1] = -0.5 * v2r * p2
        m[:, 5, 3] = -0.5 * v2l / p2
        m[:, 5, 5] = eps - om2
    else:
        m[:, 5, 5] = 1.0

    rhs = np.zeros((n, 6, 2), dtype=complex)
    # branch '+': A = 1, F = 0
    rhs[:, 0, 0] = 1.0
    if q1.is_coupled():
        rhs[:, 4, 0] = 0.5 * v1r * p1
    # branch '-': A = 0, F = 1
    rhs[:, 3, 1] = -1.0
    if q2.is_coupled():
        rhs[:, 5, 1] = 0.5 * v2l / p2

    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "singular scattering system; the parameters sit on a localized "
            "resonance (see localized_state_exists)") from exc

    residual = np.abs(np.einsum("nij,njb->nib", m, sol) - rhs).max()
    scale = 1.0 + np.abs(sol).max()
    if residual > RESIDUAL_TOL * scale:
        raise NumericalError(
            f"scattering solve residual {residual:.3e} exceeds tolerance; "
            "parameters are likely near a localized resonance "
            "(see localized_state_exists)")

    ones = np.ones(n, dtype=complex)
    zeros = np.zeros(n, dtype=complex)
    return {
        "a": np.stack([ones, zeros]),
        "b": sol[:, 0, :].T.copy(),
        "c": sol[:, 1, :].T.copy(),
        "d": sol[:, 2, :].T.copy(),
        "e": sol[:, 3, :].T.copy(),
        "f": np.stack([zeros, ones]),
        "alpha1": sol[:, 4, :].T.copy(),
        "alpha2": sol[:, 5, :].T.copy(),
    }


def solve_eigenstate(config: SystemConfig, energy: float,
                     branch: str) -> ScatteringEigenstate:
    """Solve one scattering eigenstate at a real energy.

    ``branch`` is '+' for incidence from x = -inf or '-' from x = +inf.
    The returned coefficients satisfy the linear system to residual 1e-12.
    """
    validate(config, allow_uncoupled=True)
    if branch not in BRANCHES:
        raise ValidationError(f"branch must be '+' or '-', got {branch!r}")
    check = localized_state_exists(config)
    if check and abs(energy - config.qubit1.omega) < 1e-9 * config.qubit1.omega:
        # the algebraic system is singular there: any multiple of the trapped
        # mode can be added to a solution
        raise NumericalError(
            "scattering eigenstate not unique at the localized resonance "
            f"({check.diagnostic}); see localized_state_exists")
    fam = _solve_families(config, np.array([float(energy)]))
    i = BRANCHES.index(branch)
    return ScatteringEigenstate(
        energy=float(energy), branch=branch,
        coeff_a=complex(fam["a"][i, 0]), coeff_b=complex(fam["b"][i, 0]),
        coeff_c=complex(fam["c"][i, 0]), coeff_d=complex(fam["d"][i, 0]),
        coeff_e=complex(fam["e"][i, 0]), coeff_f=complex(fam["f"][i, 0]),
        alpha1=complex(fam["alpha1"][i, 0]), alpha2=complex(fam["alpha2"][i, 0]))


def localized_state_exists(config: SystemConfig) -> LocalizedStateCheck:
    """Check for a trapped standing-wave resonance between the qubits.

    Requires both qubits non-chiral, lossless and resonant with each other,
    at a separation where the qubit frequency fits a half-integer number of
    wavelengths between them.  Chiral coupling always defeats the trap, so
    the scattering basis is complete in that case.
    """
    validate(config, allow_uncoupled=True)
    q1, q2 = config.qubit1, config.qubit2
    for label, qubit in (("qubit1", q1), ("qubit2", q2)):
        total = qubit.gamma_r + qubit.gamma_l
        if total <= 0.0:
            return LocalizedStateCheck(False, f"{label} is uncoupled")
        if abs(qubit.gamma_r - qubit.gamma_l) > 1e-12 * total:
            return LocalizedStateCheck(False, f"{label} is chiral")
        if qubit.gamma_loss > 1e-12 * total:
            return LocalizedStateCheck(False, f"{label} is lossy")
    omega_mean = 0.5 * (q1.omega + q2.omega)
    if abs(q1.omega - q2.omega) > 1e-12 * omega_mean:
        return LocalizedStateCheck(False, "qubit frequencies differ")
    # resonance: an integer number of half-wavelengths at the qubit frequency
    half_waves = q1.omega * config.d / (math.pi * config.v_g)
    if abs(half_waves - round(half_waves)) > 1e-9 * max(1.0, abs(half_waves)):
        return LocalizedStateCheck(
            False, f"separation off resonance (2*d_tilde = {half_waves!r})")
    return LocalizedStateCheck(True, "non-chiral resonant pair traps a photon")


def _overlap_entries(bra: dict[str, np.ndarray],
                     ket: dict[str, np.ndarray]) -> np.ndarray:
    """Half-weight asymptotic rule for the per-length overlap, shape (n, 2, 2)."""
    s = np.zeros((bra["a"].shape[1], 2, 2), dtype=complex)
    for key in ("a", "c", "d", "f"):
        s += 0.5 * np.einsum("in,jn->nij", bra[key].conj(), ket[key])
    return s


def _cond_2x2(s: np.ndarray) -> np.ndarray:
    """Condition numbers of a batch of 2x2 matrices."""
    t = np.sum(np.abs(s) ** 2, axis=(1, 2))
    det = s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
    d = np.abs(det) ** 2
    disc = np.sqrt(np.maximum(t * t - 4.0 * d, 0.0))
    smax = np.sqrt(0.5 * (t + disc))
    smin_sq = 0.5 * np.maximum(t - disc, 0.0)
    with np.errstate(divide="ignore"):
        return np.where(smin_sq > 0.0, smax / np.sqrt(smin_sq), np.inf)


def _inv_2x2(s: np.ndarray) -> np.ndarray:
    det = s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
    inv = np.empty_like(s)
    inv[:, 0, 0] = s[:, 1, 1]
    inv[:, 1, 1] = s[:, 0, 0]
    inv[:, 0, 1] = -s[:, 0, 1]
    inv[:, 1, 0] = -s[:, 1, 0]
    return inv / det[:, None, None]


def overlap_matrix(config: SystemConfig, energy: float) -> OverlapMatrix:
    """Per-length overlap matrix S_ij of the two branches at one energy.

    Raises for configurations supporting a localized resonance, where the
    two branches stop spanning the single-excitation space.
    """
    validate(config, allow_uncoupled=True)
    check = localized_state_exists(config)
    if check:
        raise ValidationError(
            "overlap matrix undefined: scattering basis incomplete "
            f"({check.diagnostic})")
    fam = _solve_families(config, np.array([float(energy)]))
    entries = _overlap_entries(fam, fam)
    return OverlapMatrix(entries=entries[0],
                         condition_number=float(_cond_2x2(entries)[0]))


def _refuses_near_localized(config: SystemConfig) -> bool:
    q1, q2 = config.qubit1, config.qubit2
    for qubit in (q1, q2):
        total = qubit.gamma_r + qubit.gamma_l
        if total <= 0.0 or abs(qubit.gamma_r - qubit.gamma_l) >= GUARD_BAND * total:
            return False
    omega_mean = 0.5 * (q1.omega + q2.omega)
    if abs(q1.omega - q2.omega) >= GUARD_BAND * omega_mean:
        return False
    half_waves = omega_mean * config.d / (math.pi * config.v_g)
    return abs(half_waves - round(half_waves)) < GUARD_BAND


def _loss_dominated_trap(config: SystemConfig) -> bool:
    """True when loss pushes an adjoint collective pole onto the real axis.

    The spectral resolution pairs the lossy eigenstates with an adjoint
    family in which loss acts as gain.  It represents the dynamics
    faithfully only while every adjoint collective pole stays safely below
    the real energy axis, i.e. while each collective mode leaks into the
    waveguide faster than it loses.  A mode that is trapped more strongly
    than it is lossy (possible near the localized-resonance condition, or
    for any qubit with beta <= 1/2) breaks the representation.
    """
    q1, q2 = config.qubit1, config.qubit2
    if max(q1.gamma_loss, q2.gamma_loss) <= 0.0:
        return False
    depth = _narrowest_linewidth(config, loss_sign=-1.0)
    return depth < 0.05 * _narrowest_linewidth(config)


def _truncated_tail(window: float, shift: np.ndarray) -> np.ndarray:
    """integral of exp(-i*x*s)/x^2 over |x| > window, for each s in shift.

    Even in s; equals 2/window at s = 0 and decays like sin(W*s)/(W^2*s).
    """
    s = np.abs(np.asarray(shift, dtype=float))
    out = np.full(s.shape, 2.0 / window)
    nz = s > 0.0
    if np.any(nz):
        z = window * s[nz]
        si, _ = sici(z)
        out[nz] = 2.0 * (np.cos(z) / window - s[nz] * (0.5 * math.pi - si))
    return out


class SpectralPropagator:
    """Propagator assembled from scattering eigenstates on one energy grid.

    Precomputes, per quadrature node, the branch amplitudes contracted with
    the inverse overlap matrix and the source overlaps, so amplitudes at any
    later time are a single weighted sum over nodes.  The known 1/(eps)^2
    asymptotics of the spectral weights outside the window are added in
    closed form: a smooth tail for alpha1 and retardation-phased tails for
    alpha2, which removes the leading truncation error of the finite window.
    """

    def __init__(self, config: SystemConfig, center: float, window: float,
                 intervals: int):
        self.config = config
        self.center = center
        self.window = window
        self.intervals = intervals
        self.energies = np.linspace(center - window, center + window,
                                    intervals + 1)
        step = self.energies[1] - self.energies[0]
        weights = np.full(self.energies.size, 2.0)
        weights[1::2] = 4.0
        weights[0] = weights[-1] = 1.0
        self.weights = weights * (step / 3.0)

        lossy = config.qubit1.gamma_loss > 0.0 or config.qubit2.gamma_loss > 0.0
        ket = _solve_families(config, self.energies, loss_sign=-1.0)
        bra = _solve_families(config, self.energies, loss_sign=+1.0) if lossy else ket

        overlap = _overlap_entries(bra, ket)
        cond = _cond_2x2(overlap)
        self.max_condition = float(np.max(cond))
        if self.max_condition > COND_LIMIT:
            raise NumericalError(
                f"overlap matrix condition number {self.max_condition:.3e} "
                f"exceeds {COND_LIMIT:.0e}; parameters are too close to a "
                "localized resonance for spectral propagation")
        s_inv = _inv_2x2(overlap)

        # source_i = sum_j (S^-1)_ij <eps_j|psi(0)> for |psi(0)> = qubit 1 excited
        source = np.einsum("nij,jn->in", s_inv, bra["alpha1"].conj())
        self._g1 = np.einsum("in,in->n", ket["alpha1"], source)
        self._g2 = np.einsum("in,in->n", ket["alpha2"], source)

        # Asymptotic tail constants: G1 -> v_g*(g1r + g1l)/x^2 (smooth), while
        # G2 -> v_g*[sqrt(g1r*g2r)*e^(i*omega*tau)*e^(i*x*tau) + L-term]/x^2.
        q1, q2 = config.qubit1, config.qubit2
        self._tau = config.d / config.v_g
        self._c1 = (q1.gamma_r + q1.gamma_l) / (2.0 * math.pi)
        phase = np.exp(1j * center * self._tau)
        self._c2_r = math.sqrt(q1.gamma_r * q2.gamma_r) * phase / (2.0 * math.pi)
        self._c2_l = math.sqrt(q1.gamma_l * q2.gamma_l) / phase / (2.0 * math.pi)

    def amplitudes(self, times) -> tuple[np.ndarray, np.ndarray]:
        """Qubit amplitudes alpha1(t), alpha2(t) for an array of times."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        norm = 1.0 / (2.0 * math.pi * self.config.v_g)
        w1 = self.weights * self._g1 * norm
        w2 = self.weights * self._g2 * norm
        a1 = np.empty(times.size, dtype=complex)
        a2 = np.empty(times.size, dtype=complex)
        # chunked so the (time x node) phase matrix stays modest in memory
        chunk = max(1, int(4e6 // max(self.energies.size, 1)))
        for start in range(0, times.size, chunk):
            t_block = times[start:start + chunk]
            phase = np.exp(-1j * np.outer(t_block, self.energies))
            a1[start:start + chunk] = phase @ w1
            a2[start:start + chunk] = phase @ w2
        rotation = np.exp(-1j * self.center * times)
        a1 += rotation * self._c1 * _truncated_tail(self.window, times)
        a2 += rotation * (
            self._c2_r * _truncated_tail(self.window, times - self._tau)
            + self._c2_l * _truncated_tail(self.window, times + self._tau))
        return a1, a2


def _auto_window(config: SystemConfig) -> float:
    q1, q2 = config.qubit1, config.qubit2
    gamma_tot = max(q1.gamma_r + q1.gamma_l + q1.gamma_loss,
                    q2.gamma_r + q2.gamma_l + q2.gamma_loss)
    detuning = abs(config.detuning)
    return max(200.0 * gamma_tot, 20.0 * detuning + 50.0 * gamma_tot)


def _narrowest_linewidth(config: SystemConfig, loss_sign: float = 1.0) -> float:
    """Smallest collective amplitude-decay rate (Markov estimate).

    ``loss_sign=+1`` gives the pole depths of the lossy (ket) family,
    ``loss_sign=-1`` those of the adjoint (bra) family, whose loss acts as
    gain.  Near the localized-resonance condition one collective mode
    becomes arbitrarily long lived; its spectral feature sets how fine the
    quadrature grid must be, and a non-positive adjoint depth means the
    spectral resolution over real energies breaks down entirely.
    """
    q1, q2 = config.qubit1, config.qubit2
    if not (q1.is_coupled() and q2.is_coupled()):
        return min(q.gamma_r + q.gamma_l + loss_sign * q.gamma_loss
                   for q in (q1, q2)
                   if q.gamma_r + q.gamma_l + q.gamma_loss > 0.0) / 2.0
    phi = np.exp(2j * math.pi * config.d_tilde)
    half_det = 0.5j * config.detuning
    decay = np.array([
        [q1.gamma + loss_sign * 0.5 * q1.gamma_loss + half_det,
         math.sqrt(q1.gamma_l * q2.gamma_l) * phi],
        [math.sqrt(q1.gamma_r * q2.gamma_r) * phi,
         q2.gamma + loss_sign * 0.5 * q2.gamma_loss - half_det]])
    rates = np.linalg.eigvals(decay).real
    return float(np.min(rates))


def _initial_intervals(config: SystemConfig, window: float, base: int,
                       t_max: float) -> int:
    """Grow the Simpson grid until phases and linewidths are resolved."""
    narrow = _narrowest_linewidth(config)
    if config.qubit1.gamma_loss > 0.0 or config.qubit2.gamma_loss > 0.0:
        narrow = min(narrow, _narrowest_linewidth(config, loss_sign=-1.0))
    step_limit = min(narrow / 12.0,
                     0.5 * config.v_g / max(config.d, 1e-300),
                     0.5 / max(t_max, 1e-300))
    required = 2.0 * window / step_limit
    intervals = base
    while intervals < required:
        intervals *= 2
        if intervals > 2 ** 22:
            raise NumericalError(
                "quadrature grid cannot resolve the narrowest collective "
                f"linewidth ({narrow:.3e}) within 2^22 nodes; the parameters "
                "sit too close to the localized-resonance condition for "
                "spectral propagation (the markovian engine covers this "
                "regime)")
    return intervals


def build_propagator(config: SystemConfig, t_grid,
                     quad: QuadratureSpec | None = None) -> tuple[SpectralPropagator, dict]:
    """Construct a converged SpectralPropagator for the given time span.

    Doubles the energy window and node count together until the amplitudes
    on ``t_grid`` change by less than ``quad.tol`` between rounds, then
    returns the final propagator plus a refinement report.
    """
    validate(config, allow_uncoupled=True)
    if quad is None:
        quad = QuadratureSpec()
    if not config.qubit1.is_coupled():
        raise ValidationError(
            "initially excited qubit has no waveguide coupling: its "
            "excitation is a bound state outside the scattering basis")
    check = localized_state_exists(config)
    if check:
        raise ValidationError(
            f"scattering propagation unavailable: {check.diagnostic}; "
            "this regime is served by the markovian engine")
    if _refuses_near_localized(config):
        raise ValidationError(
            "parameters are within the guard band of the localized-resonance "
            "condition (non-chiral, resonant, 2*d_tilde nearly integer); "
            "use the markovian engine for this regime")
    if _loss_dominated_trap(config):
        raise ValidationError(
            "external loss dominates the waveguide leakage of a collective "
            "mode (an adjoint pole reaches the real axis), so the spectral "
            "resolution over real energies cannot represent the dynamics; "
            "use the markovian engine for this regime")

    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid < 0.0):
        raise ValidationError("times must be non-negative")
    t_max = float(t_grid.max()) if t_grid.size else 0.0

    center = 0.5 * (config.qubit1.omega + config.qubit2.omega)
    window = quad.window if quad.window is not None else _auto_window(config)
    intervals = _initial_intervals(config, window, quad.nodes, t_max)

    # convergence is judged on a subsample of the requested times (plus the
    # retardation instant, where truncation error peaks)
    stride = max(1, t_grid.size // 256)
    probe = np.unique(np.concatenate(
        [t_grid[::stride], t_grid[-1:],
         [min(config.d / config.v_g, t_max)] if t_max > 0 else []]))

    report: dict = {"window": window, "intervals": intervals, "rounds": 1,
                    "diffs": []}
    prop = SpectralPropagator(config, center, window, intervals)
    if not quad.refine:
        report["max_condition"] = prop.max_condition
        return prop, report

    prev = np.concatenate(prop.amplitudes(probe))
    for round_index in range(1, quad.max_rounds):
        window *= 2.0
        intervals *= 2
        prop = SpectralPropagator(config, center, window, intervals)
        current = np.concatenate(prop.amplitudes(probe))
        diff = float(np.max(np.abs(current - prev)))
        report["diffs"].append(diff)
        report["window"] = window
        report["intervals"] = intervals
        report["rounds"] = round_index + 1
        if diff < quad.tol:
            report["max_condition"] = prop.max_condition
            return prop, report
        prev = current
    raise NumericalError(
        "spectral quadrature did not converge: successive window/node "
        f"doublings still change amplitudes by {report['diffs'][-1]:.3e} "
        f"(tolerance {quad.tol:.0e}); refinement report: {report}")


def propagate(config: SystemConfig, t_grid,
              quad: QuadratureSpec | None = None) -> AmplitudeTrace:
    """Evolve the initially excited qubit 1 exactly, on a grid of times.

    Returns the complex qubit amplitudes; the pair concurrence follows as
    2*|alpha1|*|alpha2|.  Raises when the configuration supports (or is
    within the guard band of) a localized resonance, or when the quadrature
    fails to converge.
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    prop, report = build_propagator(config, t_grid, quad)
    a1, a2 = prop.amplitudes(t_grid)
    return AmplitudeTrace(times=t_grid, alpha1=a1, alpha2=a2, info=report)


@dataclass(frozen=True)
class TransmissionSpectrum:
    """Transmission/reflection amplitudes per branch over an energy grid."""

    energies: np.ndarray
    t_plus: np.ndarray
    r_plus: np.ndarray
    t_minus: np.ndarray
    r_minus: np.ndarray

    def flux_deficit(self, branch: str = "+") -> np.ndarray:
        t, r = ((self.t_plus, self.r_plus) if branch == "+"
                else (self.t_minus, self.r_minus))
        return 1.0 - np.abs(t) ** 2 - np.abs(r) ** 2


def transmission_spectrum(config: SystemConfig,
                          energies) -> TransmissionSpectrum:
    """Single-photon transmission and reflection amplitudes on an energy grid.

    For branch '+' these are the outgoing right-mover coefficient C and the
    outgoing left-mover D; for branch '-' the roles swap.  Without loss,
    |t|^2 + |r|^2 = 1 holds per branch.
    """
    validate(config, allow_uncoupled=True)
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    fam = _solve_families(config, energies)
    return TransmissionSpectrum(energies=energies,
                                t_plus=fam["c"][0], r_plus=fam["d"][0],
                                t_minus=fam["d"][1], r_minus=fam["c"][1])


def spectrum_to_csv(spectrum: TransmissionSpectrum, stream: TextIO,
                    config: SystemConfig, branch: str = "+") -> None:
    if branch not in BRANCHES:
        raise ValidationError(f"branch must be '+' or '-', got {branch!r}")
    t, r = ((spectrum.t_plus, spectrum.r_plus) if branch == "+"
            else (spectrum.t_minus, spectrum.r_minus))
    deficit = spectrum.flux_deficit(branch)
    rows = ((spectrum.energies[i], t[i].real, t[i].imag, r[i].real, r[i].imag,
             deficit[i]) for i in range(spectrum.energies.size))
    write_csv(stream, SPECTRUM_COLUMNS, rows, config=config,
              extra_header=(("branch", branch),))


def amplitudes_to_csv(trace: AmplitudeTrace, stream: TextIO,
                      config: SystemConfig) -> None:
    conc = trace.concurrence()
    rows = ((trace.times[i], trace.alpha1[i].real, trace.alpha1[i].imag,
             trace.alpha2[i].real, trace.alpha2[i].imag, conc[i])
            for i in range(trace.times.size))
    write_csv(stream, AMPLITUDE_COLUMNS, rows, config=config,
              extra_header=(("engine", "scattering"),))
