"""TD-ERCS and NCA chaotic maps, orbit batching, and argsort permutations.

TD-ERCS iterates chord reflections inside the ellipse mu^2 x^2 + y^2 = mu^2
with a j-step delayed tangent-slope feedback.  NCA is a strengthened
logistic-family map on (0,1) combining a tangent and a power term.

TD-ERCS state arithmetic runs at 200-bit precision (gmpy2) so that emitted
orbits stay faithful to an exact evaluation of the recurrence over hundreds
of steps; with 64-bit floats the rounding noise of a single step is amplified
past 1e-10 within ~25 iterations.  Emitted values are ordinary floats.
NCA iterates in 64-bit floats.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import DegenerateSeed, NumericalDivergence, ParameterError

TDERCS = "tdercs"
NCA = "nca"

# Working precision for TD-ERCS state arithmetic (bits).
TDERCS_PRECISION = 200

# A step whose point drifts this far off the ellipse is numerically broken.
ELLIPSE_DIVERGENCE_LIMIT = 1e-6

_TAN_POLE_MARGIN = 1e-12


def _tdercs_context():
    return gmpy2.context(precision=TDERCS_PRECISION)


@dataclass(frozen=True)
class TdErcsSeed:
    """Seed parameters (x0, mu, alpha, j) of the TD-ERCS map."""

    x0: float
    mu: float
    alpha: float
    j: int

    def __post_init__(self):
        if not -1.0 <= self.x0 <= 1.0:
            raise ParameterError(f"x0 must be in [-1, 1], got {self.x0}")
        if not 0.0 < self.mu < 1.0:
            raise ParameterError(f"mu must be in (0, 1), got {self.mu}")
        if not 0.0 < self.alpha < math.pi:
            raise ParameterError(f"alpha must be in (0, pi), got {self.alpha}")
        if abs(self.alpha - math.pi / 2) < _TAN_POLE_MARGIN:
            raise ParameterError("alpha too close to pi/2: tan(alpha) must stay finite")
        if not isinstance(self.j, int) or self.j < 2:
            raise ParameterError(f"tangent delay j must be an integer >= 2, got {self.j}")


class TdErcsState:
    """Single-owner iterator state: current point, chord slope, tangent history.

    Fields x, y, k are 200-bit mpfr; kprime_history holds the last j tangent
    slopes (oldest first).  Treat instances as immutable: tdercs_next returns
    a fresh state.
    """

    __slots__ = ("seed", "x", "y", "k", "kprime_history", "iteration_count")

    def __init__(self, seed, x, y, k, kprime_history, iteration_count):
        self.seed = seed
        self.x = x
        self.y = y
        self.k = k
        self.kprime_history = kprime_history
        self.iteration_count = iteration_count

    def ellipse_residual(self) -> float:
        mu2 = float(self.seed.mu) ** 2
        return abs(mu2 * float(self.x) ** 2 + float(self.y) ** 2 - mu2)


def tdercs_init(seed: TdErcsSeed) -> TdErcsState:
    """Build the initial state: y0 on the ellipse, signed K'0, reflected K0."""
    if abs(seed.x0) == 1.0:
        raise DegenerateSeed("|x0| = 1 gives y0 = 0; initial tangent slope undefined")
    with _tdercs_context():
        x0 = mpfr(seed.x0)
        mu = mpfr(seed.mu)
        mu2 = mu * mu
        y0 = mu * gmpy2.sqrt(1 - x0 * x0)
        kp0 = -(x0 / y0) * mu2
        tan_a = gmpy2.tan(mpfr(seed.alpha))
        k0 = -(tan_a + kp0) / (1 - kp0 * tan_a)
    return TdErcsState(seed, x0, y0, k0, (kp0,), 0)


def _tdercs_advance(x, y, k, hist, i, mu2, j):
    """One chord-tangent step at 200-bit precision; caller manages the context.

    hist is a deque of the last <= j tangent slopes, oldest first; i is the
    1-based index of the step being taken.
    """
    # New point: second intersection of the chord through (x, y) with the
    # ellipse, then the line equation for y.
    x1 = -(2 * k * y + x * (mu2 - k * k)) / (mu2 + k * k)
    y1 = k * (x1 - x) + y
    # Delayed tangent: previous point while i < j, the point j steps back after.
    kp = hist[-1] if i < j else hist[0]
    k1 = (kp - k + k * kp * kp) / (1 + 2 * kp * k - k * kp * kp)
    if y1 == 0:
        raise NumericalDivergence("orbit hit an ellipse vertex: tangent slope undefined")
    hist.append(-(x1 / y1) * mu2)
    if len(hist) > j:
        hist.popleft()
    return x1, y1, k1


def _check_on_ellipse(x1, y1, mu2):
    res = abs(mu2 * x1 * x1 + y1 * y1 - mu2)
    if not res < ELLIPSE_DIVERGENCE_LIMIT:
        raise NumericalDivergence(f"point left the ellipse: residual {float(res):.3e}")


def tdercs_next(state: TdErcsState):
    """Advance one step; returns (new_state, emitted x as float in [-1, 1])."""
    seed = state.seed
    with _tdercs_context():
        mu2 = mpfr(seed.mu) * mpfr(seed.mu)
        hist = deque(state.kprime_history)
        i = state.iteration_count + 1
        x1, y1, k1 = _tdercs_advance(state.x, state.y, state.k, hist, i, mu2, seed.j)
        _check_on_ellipse(x1, y1, mu2)
    new = TdErcsState(seed, x1, y1, k1, tuple(hist), i)
    return new, float(x1)


def _tdercs_run(seed: TdErcsSeed, n: int, burn_in: int) -> np.ndarray:
    """Batched TD-ERCS orbit: burn_in discarded steps, then n emitted x values."""
    state = tdercs_init(seed)
    out = np.empty(n, dtype=np.float64)
    with _tdercs_context():
        mu2 = mpfr(seed.mu) * mpfr(seed.mu)
        x, y, k = state.x, state.y, state.k
        hist = deque(state.kprime_history)
        for i in range(1, burn_in + n + 1):
            x, y, k = _tdercs_advance(x, y, k, hist, i, mu2, seed.j)
            _check_on_ellipse(x, y, mu2)
            if i > burn_in:
                out[i - burn_in - 1] = float(x)
    return out


@dataclass(frozen=True)
class NcaState:
    """NCA iterator state: current x in (0,1) plus control parameters."""

    x: float
    alpha_nca: float
    beta_nca: float

    def __post_init__(self):
        if not 0.0 < self.x < 1.0:
            raise ParameterError(f"NCA state x must be in (0, 1), got {self.x}")
        if not 0.0 < self.alpha_nca <= 1.4:
            raise ParameterError(f"alpha_nca must be in (0, 1.4], got {self.alpha_nca}")
        if not 5.0 <= self.beta_nca <= 43.6:
            raise ParameterError(f"beta_nca must be in [5, 43.6], got {self.beta_nca}")


def nca_coefficient(alpha: float, beta: float) -> float:
    """Normalizing prefactor (1 - beta^-4) * cot(alpha/(1+beta)) * (1 + 1/beta)^beta."""
    return (1.0 - beta ** -4) / math.tan(alpha / (1.0 + beta)) * (1.0 + 1.0 / beta) ** beta


def _nca_step(x: float, alpha: float, beta: float, lam: float) -> float:
    x1 = lam * math.tan(alpha * x) * (1.0 - x) ** beta
    if not 0.0 < x1 < 1.0:
        raise NumericalDivergence(f"NCA iterate left (0, 1): {x1!r}")
    return x1


def nca_next(state: NcaState):
    """Advance one step; returns (new_state, emitted value in (0,1))."""
    lam = nca_coefficient(state.alpha_nca, state.beta_nca)
    x1 = _nca_step(state.x, state.alpha_nca, state.beta_nca, lam)
    return NcaState(x1, state.alpha_nca, state.beta_nca), x1


def _nca_run(state: NcaState, n: int, burn_in: int) -> np.ndarray:
    alpha, beta = state.alpha_nca, state.beta_nca
    lam = nca_coefficient(alpha, beta)
    x = state.x
    for _ in range(burn_in):
        x = _nca_step(x, alpha, beta, lam)
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        x = _nca_step(x, alpha, beta, lam)
        out[i] = x
    return out


def chaotic_sequence(kind: str, key, n: int, burn_in: int) -> np.ndarray:
    """Iterate the selected map burn_in times, then collect n emitted values.

    `key` is a KeyMaterial: TD-ERCS seeds from key.y0 and the configured
    (mu, alpha, j); NCA from key.x0_nca and (alpha_nca, beta_nca).  Pure
    function of its inputs -- equal arguments give bit-identical arrays on
    one platform.
    """
    if n < 1:
        raise ParameterError(f"sequence length must be >= 1, got {n}")
    if burn_in < 0:
        raise ParameterError(f"burn_in must be >= 0, got {burn_in}")
    p = key.map_params
    if kind == TDERCS:
        seed = TdErcsSeed(key.y0, p.mu, p.alpha, p.j)
        return _tdercs_run(seed, n, burn_in)
    if kind == NCA:
        state = NcaState(key.x0_nca, p.alpha_nca, p.beta_nca)
        return _nca_run(state, n, burn_in)
    raise ParameterError(f"unknown map kind {kind!r}; expected {TDERCS!r} or {NCA!r}")


def permutation_from_sequence(values) -> np.ndarray:
    """Argsort permutation of a real sequence; ties break by original index."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size < 1:
        raise ParameterError("need a nonempty 1-D sequence")
    return np.argsort(values, kind="stable")


def invert_permutation(p: np.ndarray) -> np.ndarray:
    """Inverse of a permutation given as an index array."""
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p))
    return inv
