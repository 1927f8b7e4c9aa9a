"""Exact simulation of the Hawkes process with exponentially decaying
intensity, and its closed-form first and second moments.

The intensity follows the autoregressive relation
``lambda(t) = theta + (lambda(s) - theta) * exp(-kappa*(t-s)) + eta * sum of
mark * exp(-kappa*(t - t_i))`` over events in (s, t].  Simulation is Ogata
thinning: between events the intensity moves monotonically toward theta, so
``max(current intensity, theta)`` dominates and candidate arrivals are
accepted with probability intensity/bound.  The intensity is taken
right-continuous at event times, which makes the post-jump value directly
usable as the next thinning bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, ResourceError

MAX_EVENTS = 10**7

# |eta*mu - kappa| below this switches the moment formulas to their Taylor
# expansions around the removable singularity.
_SINGULAR_SWITCH = 1e-6


@dataclass(frozen=True)
class MarkLaw:
    """Positive i.i.d. jump sizes with closed-form mean and variance."""

    family: str  # "deterministic" | "exponential" | "gamma"
    mu: float | None = None
    shape: float | None = None
    rate: float | None = None

    def __post_init__(self):
        if self.family in ("deterministic", "exponential"):
            if self.mu is None or self.mu <= 0.0:
                raise ParameterError(f"mark mean must be positive, got {self.mu!r}")
        elif self.family == "gamma":
            if self.shape is None or self.rate is None or self.shape <= 0.0 or self.rate <= 0.0:
                raise ParameterError("gamma marks need positive shape and rate")
        else:
            raise ParameterError(f"unknown mark family {self.family!r}")

    @classmethod
    def deterministic(cls, mu: float) -> "MarkLaw":
        return cls(family="deterministic", mu=mu)

    @classmethod
    def exponential(cls, mu: float) -> "MarkLaw":
        return cls(family="exponential", mu=mu)

    @classmethod
    def gamma(cls, shape: float, rate: float) -> "MarkLaw":
        return cls(family="gamma", shape=shape, rate=rate)

    @classmethod
    def from_config(cls, cfg: dict) -> "MarkLaw":
        family = cfg.get("family")
        if family in ("deterministic", "exponential"):
            return cls(family=family, mu=cfg["mu"])
        if family == "gamma":
            return cls.gamma(cfg["shape"], cfg["rate"])
        raise ParameterError(f"unknown mark family {family!r}")

    @property
    def mean(self) -> float:
        if self.family == "gamma":
            return self.shape / self.rate
        return float(self.mu)

    @property
    def variance(self) -> float:
        if self.family == "deterministic":
            return 0.0
        if self.family == "exponential":
            return float(self.mu) ** 2
        return self.shape / self.rate**2

    def sample(self, rng) -> float:
        if self.family == "deterministic":
            return float(self.mu)
        if self.family == "exponential":
            return float(self.mu) * rng.standard_exponential()
        return rng.gamma(self.shape, 1.0 / self.rate)


@dataclass(frozen=True)
class HawkesParams:
    """Baseline theta, decay kappa, excitation eta, initial intensity lambda0, mark law."""

    theta: float
    kappa: float
    eta: float
    lambda0: float
    marks: MarkLaw

    def __post_init__(self):
        if self.theta < 0.0:
            raise ParameterError(f"theta must be >= 0, got {self.theta!r}")
        if self.kappa <= 0.0:
            raise ParameterError(f"kappa must be positive, got {self.kappa!r}")
        # eta = 0 is allowed: the process degenerates to an inhomogeneous Poisson process.
        if self.eta < 0.0:
            raise ParameterError(f"eta must be >= 0, got {self.eta!r}")
        if self.lambda0 <= 0.0:
            raise ParameterError(f"lambda0 must be positive, got {self.lambda0!r}")

    @classmethod
    def from_config(cls, cfg: dict) -> "HawkesParams":
        return cls(
            theta=cfg["theta"],
            kappa=cfg["kappa"],
            eta=cfg["eta"],
            lambda0=cfg["lambda0"],
            marks=MarkLaw.from_config(cfg["marks"]),
        )


@dataclass(frozen=True)
class HawkesDerived:
    """Derived quantities gamma = kappa - eta*mu, rho1, rho2 and the stationarity flag."""

    gamma: float
    rho1: float
    rho2: float
    stationary: bool


def derived(params: HawkesParams) -> HawkesDerived:
    mu = params.marks.mean
    psi2 = params.marks.variance
    alpha = params.eta * mu - params.kappa
    rho1 = params.eta**2 * (psi2 + mu**2)
    rho2 = params.eta**2 * params.kappa * params.theta * (psi2 + mu**2) / alpha if alpha != 0.0 else math.inf
    return HawkesDerived(gamma=-alpha, rho1=rho1, rho2=rho2, stationary=alpha < 0.0)


@dataclass(frozen=True)
class HawkesPath:
    """Event times and marks on [0, horizon], with the right-continuous terminal intensity."""

    horizon: float
    times: np.ndarray
    marks: np.ndarray
    terminal_intensity: float

    @property
    def count(self) -> int:
        return int(self.times.size)


def simulate_hawkes(params: HawkesParams, horizon: float, rng, max_events: int = MAX_EVENTS) -> HawkesPath:
    """Exact Ogata-thinning sample of the Hawkes process on [0, horizon]."""
    if horizon < 0.0:
        raise DomainError(f"horizon must be >= 0, got {horizon!r}")
    theta, kappa, eta = params.theta, params.kappa, params.eta
    lam = params.lambda0
    t = 0.0
    times: list[float] = []
    marks: list[float] = []
    exp_draw = rng.standard_exponential
    uni_draw = rng.uniform
    while True:
        bound = lam if lam > theta else theta
        t_cand = t + exp_draw() / bound
        if t_cand > horizon:
            # advance the decayed state to the horizon
            lam = theta + (lam - theta) * math.exp(-kappa * (horizon - t))
            break
        lam_cand = theta + (lam - theta) * math.exp(-kappa * (t_cand - t))
        t = t_cand
        if uni_draw() * bound <= lam_cand:
            xi = params.marks.sample(rng)
            lam = lam_cand + eta * xi
            times.append(t)
            marks.append(xi)
            if len(times) > max_events:
                raise ResourceError(f"event count exceeded {max_events} before reaching the horizon")
        else:
            lam = lam_cand
    return HawkesPath(
        horizon=horizon,
        times=np.asarray(times, dtype=float),
        marks=np.asarray(marks, dtype=float),
        terminal_intensity=lam,
    )


def intensity_at(path: HawkesPath, params: HawkesParams, t: float) -> float:
    """Intensity at time t in [0, horizon], right-continuous at event times."""
    if t < 0.0 or t > path.horizon:
        raise DomainError(f"t={t!r} outside [0, {path.horizon}]")
    base = params.theta + (params.lambda0 - params.theta) * math.exp(-params.kappa * t)
    n = int(np.searchsorted(path.times, t, side="right"))
    if n == 0:
        return base
    contrib = params.eta * float(np.dot(path.marks[:n], np.exp(-params.kappa * (t - path.times[:n]))))
    return base + contrib


def _e1(alpha: float, t: float) -> float:
    # (exp(alpha*t) - 1)/alpha, continuous through alpha = 0
    if alpha == 0.0:
        return t
    return math.expm1(alpha * t) / alpha


def hp_mean(params: HawkesParams, t: float) -> float:
    """E[lambda_t] = lambda0*exp(alpha*t) + kappa*theta*(exp(alpha*t)-1)/alpha, alpha = eta*mu - kappa."""
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    alpha = params.eta * params.marks.mean - params.kappa
    return params.lambda0 * math.exp(alpha * t) + params.kappa * params.theta * _e1(alpha, t)


def hp_variance(params: HawkesParams, t: float) -> float:
    """Var[lambda_t]; removable singularity at eta*mu = kappa handled by Taylor expansion."""
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    mu = params.marks.mean
    psi2 = params.marks.variance
    alpha = params.eta * mu - params.kappa
    c = params.eta**2 * (psi2 + mu**2)
    kt = params.kappa * params.theta
    # V = c*lambda0*A1 + c*kappa*theta*A2 with
    # A1 = (e^{2at}-e^{at})/a,  A2 = (e^{2at}-e^{at})/a^2 + (1-e^{2at})/(2a^2)
    if abs(alpha) < _SINGULAR_SWITCH:
        x = alpha * t
        a1 = t * (1.0 + 1.5 * x + 7.0 / 6.0 * x**2 + 0.625 * x**3 + 31.0 / 120.0 * x**4)
        a2 = t**2 * (0.5 + 0.5 * x + 7.0 / 24.0 * x**2 + 0.125 * x**3 + 31.0 / 720.0 * x**4)
    else:
        eat = math.exp(alpha * t)
        a1 = eat * math.expm1(alpha * t) / alpha
        a2 = (eat * math.expm1(alpha * t) - 0.5 * math.expm1(2.0 * alpha * t)) / alpha**2
    return c * params.lambda0 * a1 + c * kt * a2


def hp_covariance(params: HawkesParams, s: float, t: float) -> float:
    """Cov[lambda_s, lambda_t] = exp(alpha*(t-s)) * Var[lambda_s] for s <= t."""
    if s > t:
        raise DomainError(f"need s <= t, got s={s!r} t={t!r}")
    alpha = params.eta * params.marks.mean - params.kappa
    return math.exp(alpha * (t - s)) * hp_variance(params, s)
