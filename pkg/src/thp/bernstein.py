"""Bernstein functions (Laplace exponents of Lévy subordinators).

A subordinator ``D`` with Laplace exponent ``f`` satisfies
``E[exp(-s*D(t))] = exp(-t*f(s))`` where ``f(s) = a + b*s + integral of
(1 - exp(-s*x)) against the Lévy measure``.  The catalog covers the
tempered-stable family ``f(s) = (s + nu)**beta - nu**beta`` (the stable
subordinator is the ``nu = 0`` member), gamma and inverse-Gaussian
subordinators, and a ``custom`` variant given by a drift, a kill rate and a
finite list of Lévy-measure atoms.

Specs are immutable after construction; all parameter validation happens in
``__post_init__`` so evaluation never re-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.integrate import quad

from .errors import DomainError, ParameterError

FAMILIES = ("tempered_stable", "stable", "gamma", "inverse_gaussian", "custom")


@dataclass(frozen=True)
class BernsteinSpec:
    """A Bernstein function together with its Lévy triplet (a, b, measure)."""

    family: str
    beta: float | None = None
    nu: float | None = None
    p: float | None = None
    q: float | None = None
    delta: float | None = None
    g: float | None = None
    a: float = 0.0
    b: float = 0.0
    atoms: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        if self.family in ("tempered_stable", "stable"):
            if self.beta is None or not 0.0 < self.beta < 1.0:
                raise ParameterError(f"stability index beta must lie in (0,1), got {self.beta!r}")
            if self.family == "tempered_stable":
                if self.nu is None or self.nu < 0.0:
                    raise ParameterError(f"tempering rate nu must be >= 0, got {self.nu!r}")
        elif self.family == "gamma":
            if self.p is None or self.q is None or self.p <= 0.0 or self.q <= 0.0:
                raise ParameterError(f"gamma rates must be positive, got p={self.p!r} q={self.q!r}")
        elif self.family == "inverse_gaussian":
            if self.delta is None or self.g is None or self.delta <= 0.0 or self.g <= 0.0:
                raise ParameterError(f"IG parameters must be positive, got delta={self.delta!r} g={self.g!r}")
        else:
            if self.a < 0.0 or self.b < 0.0:
                raise ParameterError("custom kill rate and drift must be >= 0")
            object.__setattr__(self, "atoms", tuple((float(x), float(w)) for x, w in self.atoms))
            for x, w in self.atoms:
                if x <= 0.0 or w <= 0.0:
                    raise ParameterError(f"measure atoms need positive location and weight, got ({x}, {w})")

    # -- constructors -------------------------------------------------------

    @classmethod
    def tempered_stable(cls, beta: float, nu: float) -> "BernsteinSpec":
        return cls(family="tempered_stable", beta=beta, nu=nu)

    @classmethod
    def stable(cls, beta: float) -> "BernsteinSpec":
        return cls(family="stable", beta=beta)

    @classmethod
    def gamma_family(cls, p: float, q: float) -> "BernsteinSpec":
        return cls(family="gamma", p=p, q=q)

    @classmethod
    def inverse_gaussian(cls, delta: float, g: float) -> "BernsteinSpec":
        return cls(family="inverse_gaussian", delta=delta, g=g)

    @classmethod
    def custom(cls, a: float = 0.0, b: float = 0.0, atoms=()) -> "BernsteinSpec":
        return cls(family="custom", a=a, b=b, atoms=tuple(atoms))

    @classmethod
    def from_config(cls, cfg: dict) -> "BernsteinSpec":
        """Build a spec from the CLI JSON form, e.g. {"family": "tempered_stable", "beta": 0.7, "nu": 0.5}."""
        family = cfg.get("family")
        if family == "tempered_stable":
            return cls.tempered_stable(cfg["beta"], cfg["nu"])
        if family == "stable":
            return cls.stable(cfg["beta"])
        if family == "gamma":
            return cls.gamma_family(cfg["p"], cfg["q"])
        if family == "inverse_gaussian":
            return cls.inverse_gaussian(cfg["delta"], cfg["g"])
        if family == "custom":
            return cls.custom(cfg.get("a", 0.0), cfg.get("b", 0.0), [tuple(x) for x in cfg.get("atoms", [])])
        raise ParameterError(f"unknown subordinator family {family!r}")

    @property
    def is_tempered_stable(self) -> bool:
        return self.family in ("tempered_stable", "stable")

    @property
    def ts_beta(self) -> float:
        """Stability index for the (tempered) stable families."""
        if not self.is_tempered_stable:
            raise ParameterError(f"{self.family} spec has no stability index")
        return float(self.beta)

    @property
    def ts_nu(self) -> float:
        """Tempering rate; 0 for the plain stable subordinator."""
        if not self.is_tempered_stable:
            raise ParameterError(f"{self.family} spec has no tempering rate")
        return 0.0 if self.family == "stable" else float(self.nu)


def eval_f(spec: BernsteinSpec, s: float) -> float:
    """Evaluate the Bernstein function f at s > 0."""
    if not s > 0.0:
        raise DomainError(f"f(s) requires s > 0, got {s!r}")
    return _eval_f_unchecked(spec, s)


def _eval_f_unchecked(spec, s):
    # Shared by eval_f and the complex-contour variant; no domain check.
    fam = spec.family
    if fam == "tempered_stable":
        return (s + spec.nu) ** spec.beta - spec.nu**spec.beta
    if fam == "stable":
        return s**spec.beta
    if fam == "gamma":
        # p * log(1 + s/q); log1p keeps small-s accuracy
        if isinstance(s, complex):
            import cmath

            return spec.p * cmath.log(1.0 + s / spec.q)
        return spec.p * math.log1p(s / spec.q)
    if fam == "inverse_gaussian":
        if isinstance(s, complex):
            import cmath

            return spec.delta * (cmath.sqrt(2.0 * s + spec.g**2) - spec.g)
        return spec.delta * (math.sqrt(2.0 * s + spec.g**2) - spec.g)
    total = spec.a + spec.b * s
    for x, w in spec.atoms:
        if isinstance(s, complex):
            import cmath

            total += (1.0 - cmath.exp(-s * x)) * w
        else:
            total += -math.expm1(-s * x) * w
    return total


def eval_f_complex(spec: BernsteinSpec, s: complex) -> complex:
    """Principal-branch extension of f for complex contours (Talbot inversion).

    Valid for the tempered-stable, stable, gamma, inverse-Gaussian and custom
    variants as long as the contour avoids the branch cut on the negative real
    axis left of the nearest singularity.
    """
    return _eval_f_unchecked(spec, complex(s))


def drift_coefficient(spec: BernsteinSpec) -> float:
    """Drift b of the Lévy triplet (0 for all named variants)."""
    return spec.b if spec.family == "custom" else 0.0


def levy_tail(spec: BernsteinSpec, s: float) -> float:
    """Tail of the Lévy measure, a + measure((s, inf)), for s > 0.

    For the (tempered) stable family the Lévy density is
    ``(beta/Gamma(1-beta)) * x**(-beta-1) * exp(-nu*x)`` and the tail is
    computed by adaptive quadrature (exactly ``s**-beta / Gamma(1-beta)``
    when nu = 0).  Only the tempered-stable and custom variants are needed
    here; other families raise NotImplementedError.
    """
    if not s > 0.0:
        raise DomainError(f"levy_tail requires s > 0, got {s!r}")
    if spec.family == "custom":
        return spec.a + sum(w for x, w in spec.atoms if x > s)
    if not spec.is_tempered_stable:
        raise NotImplementedError(f"levy_tail not provided for family {spec.family!r}")
    beta, nu = spec.ts_beta, spec.ts_nu
    c = beta / math.gamma(1.0 - beta)
    if nu == 0.0:
        return s**-beta / math.gamma(1.0 - beta)
    val, _ = quad(lambda x: c * x ** (-beta - 1.0) * math.exp(-nu * x), s, math.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    return val
