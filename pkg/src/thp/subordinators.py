"""Path simulation of Lévy subordinators and first-passage (inverse) sampling.

The inverse clock ``E(t) = inf{r >= 0 : D(r) > t}`` is sampled by simulating
the subordinator ``D`` on an internal grid of step ``delta`` until it exceeds
the last requested external time.  The reported passage time uses the
midpoint convention ``r* - delta/2`` (first-order bias halved at no cost),
and ``bias_bound = delta`` travels with every sample so downstream reports
can check that discretization bias stays invisible under the Monte Carlo
noise gate.

Random streams: every path draws from its own counter-based Philox stream
keyed by (seed, path index), so results are reproducible independently of
scheduling; see ``montecarlo.path_streams``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .bernstein import BernsteinSpec
from .errors import ParameterError, ResourceError, StepSizeError

MAX_STEPS = 10**8
MIN_ACCEPT_RATE = 1e-4
_BLOCK = 8192  # fixed candidate block size; part of the stream-consumption contract


@dataclass(frozen=True)
class SubordinatorPath:
    """Discretized path D(step), D(2*step), ... of a subordinator (D(0)=0 implicit)."""

    step: float
    values: np.ndarray


@dataclass(frozen=True)
class InverseSample:
    """First-passage samples of the inverse subordinator on an external time grid."""

    times: np.ndarray
    values: np.ndarray
    bias_bound: float
    path: SubordinatorPath | None = None


def sample_stable_increment(beta: float, dt: float, rng, size=None):
    """Increment of the beta-stable subordinator over internal time dt.

    Kanter's representation: with U ~ Uniform(0, pi) and W ~ Exp(1),
    ``dt**(1/beta) * (sin(beta*U)/sin(U)) * (sin((1-beta)*U)/(W*sin(U)))**((1-beta)/beta)``
    has Laplace transform exp(-dt * s**beta).
    """
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta must lie in (0,1), got {beta!r}")
    if not dt > 0.0:
        raise ParameterError(f"dt must be positive, got {dt!r}")
    u = rng.uniform(0.0, math.pi, size)
    w = rng.standard_exponential(size)
    su = np.sin(u)
    c1 = (1.0 - beta) / beta
    return dt ** (1.0 / beta) * (np.sin(beta * u) / su) * (np.sin((1.0 - beta) * u) / (w * su)) ** c1


def sample_tss_increment(beta: float, nu: float, dt: float, rng, size=None):
    """Tempered-stable increment over dt by exponential-tilting rejection.

    Stable candidates are accepted with probability exp(-nu*S); the expected
    acceptance rate is exp(-dt*nu**beta) and the sampler refuses to run below
    MIN_ACCEPT_RATE rather than spin.  nu=0 short-circuits to the stable
    sampler (identical draws from the same stream).
    """
    if nu < 0.0:
        raise ParameterError(f"nu must be >= 0, got {nu!r}")
    if nu == 0.0:
        return sample_stable_increment(beta, dt, rng, size)
    if not dt > 0.0:
        raise ParameterError(f"dt must be positive, got {dt!r}")
    if math.exp(-dt * nu**beta) < MIN_ACCEPT_RATE:
        raise StepSizeError(
            f"expected acceptance rate exp(-dt*nu^beta)={math.exp(-dt * nu ** beta):.2e} "
            f"below {MIN_ACCEPT_RATE:g}; shrink dt"
        )
    scalar = size is None
    n = 1 if scalar else int(np.prod(size))
    out = sample_stable_increment(beta, dt, rng, n)
    rejected = rng.standard_exponential(n) <= nu * out
    while True:
        idx = np.flatnonzero(rejected)
        if idx.size == 0:
            break
        cand = sample_stable_increment(beta, dt, rng, idx.size)
        accept = rng.standard_exponential(idx.size) > nu * cand
        out[idx[accept]] = cand[accept]
        rejected = np.zeros_like(rejected)
        rejected[idx[~accept]] = True
    if scalar:
        return float(out[0])
    return out.reshape(size)


@njit(cache=True)
def _tss_passage_kernel(rng, beta, nu, times, step, max_steps, block):
    # Tempered-stable subordinator on the step-grid; records midpoint passage
    # times for each requested level. Candidate draws consume (u, w, e)
    # triples in fixed block order so results depend only on the stream.
    inv_b1 = (1.0 - beta) / beta
    scale = step ** (1.0 / beta)
    nt = times.shape[0]
    out = np.empty(nt)
    D = 0.0
    k = 0
    j = 0
    while j < nt:
        u = rng.uniform(0.0, math.pi, block)
        w = rng.standard_exponential(block)
        if nu > 0.0:
            e = rng.standard_exponential(block)
        else:
            e = np.empty(0)
        for i in range(block):
            su = math.sin(u[i])
            s = scale * (math.sin(beta * u[i]) / su) * (math.sin((1.0 - beta) * u[i]) / (w[i] * su)) ** inv_b1
            if nu > 0.0 and e[i] <= nu * s:
                continue  # candidate rejected by the exponential tilt
            D += s
            k += 1
            if k > max_steps:
                return out, -1
            while j < nt and D > times[j]:
                out[j] = k * step - 0.5 * step
                j += 1
            if j == nt:
                break
    return out, k


def _increment_block(spec: BernsteinSpec, step: float, rng, n: int) -> np.ndarray:
    fam = spec.family
    if fam == "gamma":
        return rng.gamma(spec.p * step, 1.0 / spec.q, n)
    if fam == "inverse_gaussian":
        return rng.wald(spec.delta * step / spec.g, (spec.delta * step) ** 2, n)
    if fam == "custom":
        inc = np.full(n, spec.b * step)
        for x, w in spec.atoms:
            inc += x * rng.poisson(w * step, n)
        return inc
    raise ParameterError(f"no increment sampler for family {fam!r}")


def sample_inverse_on_grid(
    spec: BernsteinSpec,
    times,
    step: float,
    rng,
    max_steps: int = MAX_STEPS,
    keep_path: bool = False,
) -> InverseSample:
    """First-passage sample of the inverse subordinator at each external time.

    Simulates D on the step-grid until it exceeds times[-1]; E(t) is reported
    as ``r* - step/2`` where r* is the first grid time with D(r*) > t.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ParameterError("times must be nonempty")
    if not (np.all(np.diff(times) > 0.0) and times[0] > 0.0):
        raise ParameterError("times must be strictly ascending and positive")
    if not step > 0.0:
        raise ParameterError(f"step must be positive, got {step!r}")

    if spec.is_tempered_stable and not keep_path:
        beta, nu = spec.ts_beta, spec.ts_nu
        if nu > 0.0 and math.exp(-step * nu**beta) < MIN_ACCEPT_RATE:
            raise StepSizeError(f"tempering acceptance rate below {MIN_ACCEPT_RATE:g} at step {step:g}")
        values, k = _tss_passage_kernel(rng, beta, nu, times, step, max_steps, _BLOCK)
        if k < 0:
            raise ResourceError(f"subordinator path exceeded {max_steps} steps before passing {times[-1]}")
        return InverseSample(times=times, values=values, bias_bound=step)

    # Generic block path (also used when the caller wants the path stored).
    if spec.is_tempered_stable:
        beta, nu = spec.ts_beta, spec.ts_nu
        draw = lambda n: sample_tss_increment(beta, nu, step, rng, n)
    else:
        draw = lambda n: _increment_block(spec, step, rng, n)

    values = np.empty(times.size)
    chunks = []
    d_last = 0.0
    n_done = 0
    filled = 0
    while True:
        cum = np.cumsum(draw(_BLOCK))
        cum += d_last
        if keep_path:
            chunks.append(cum)
        while filled < times.size and cum[-1] > times[filled]:
            idx = int(np.searchsorted(cum, times[filled], side="right"))
            values[filled] = (n_done + idx + 1) * step - 0.5 * step
            filled += 1
        if filled == times.size:
            break
        d_last = float(cum[-1])
        n_done += _BLOCK
        if n_done > max_steps:
            raise ResourceError(f"subordinator path exceeded {max_steps} steps before passing {times[-1]}")
    path = SubordinatorPath(step=step, values=np.concatenate(chunks)) if keep_path else None
    return InverseSample(times=times, values=values, bias_bound=step, path=path)


def simulate_subordinator_path(spec: BernsteinSpec, n_steps: int, step: float, rng) -> SubordinatorPath:
    """Simulate D on a fixed grid of n_steps increments (diagnostic helper)."""
    if spec.is_tempered_stable:
        inc = sample_tss_increment(spec.ts_beta, spec.ts_nu, step, rng, n_steps)
    else:
        inc = _increment_block(spec, step, rng, n_steps)
    return SubordinatorPath(step=step, values=np.cumsum(inc))
