"""Fixed-step RK4 propagation of flow models.

Two entry points share the same scheme:

* :func:`rk4_step` / :func:`propagate` are plain Python drivers for single
  trajectories with a per-step observer.
* :func:`integrate_ld` advances a batch of trajectories in compiled code,
  carrying the Lagrangian descriptor integral as an extra quadrature channel
  fed by the same four RK4 stages.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numba import njit

from .models import ContractError, FlowModel, flow_rhs

ESCAPE_RADIUS = 1e12

STATUS_OK = 0
STATUS_NON_ADMISSIBLE = 1
STATUS_ESCAPED = 2

OBS_ARC_LENGTH = 0
OBS_PNORM = 1
OBS_ACTION = 2


class PropagationError(RuntimeError):
    """Trajectory left the finite domain (overflow or escape radius)."""

    def __init__(self, t, state):
        super().__init__(f"trajectory escaped at t={t!r}")
        self.t = t
        self.state = state


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 1e-2
    scheme: str = "rk4"

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ContractError(f"integrator step must be > 0, got {self.step}")
        if self.scheme.lower() != "rk4":
            raise ContractError(f"unsupported scheme {self.scheme!r}")


def step_plan(t0: float, t1: float, step: float) -> tuple[int, float, float]:
    """Split ``[t0, t1]`` into full signed steps plus one partial step.

    Returns ``(n_full, h, h_last)`` with ``h_last == 0`` when the step divides
    the window.
    """
    span = t1 - t0
    if span == 0:
        return 0, 0.0, 0.0
    h = math.copysign(step, span)
    n = int(math.floor(abs(span) / step + 1e-9))
    rem = span - n * h
    if abs(rem) <= 1e-12 * max(abs(span), 1.0):
        rem = 0.0
    return n, h, rem


def rk4_step(rhs: Callable, state, t: float, h: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta update of ``state`` by ``h``."""
    if h == 0:
        raise ContractError("rk4_step needs a nonzero step")
    x = np.asarray(state, dtype=np.float64)
    k1 = np.asarray(rhs(x, t))
    k2 = np.asarray(rhs(x + 0.5 * h * k1, t + 0.5 * h))
    k3 = np.asarray(rhs(x + 0.5 * h * k2, t + 0.5 * h))
    k4 = np.asarray(rhs(x + h * k3, t + h))
    out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise PropagationError(t + h, out)
    return out


def propagate(model, x0, window, cfg: IntegratorConfig = IntegratorConfig(), observer=None):
    """Integrate ``x0`` over ``window = (t0, t1)`` and return the final state.

    ``model`` is a :class:`FlowModel` or any callable ``rhs(state, t)``.
    ``observer(t, state, rate)`` is called before every step and once at the
    end. Raises :class:`PropagationError` if the state leaves the escape radius.
    """
    if isinstance(model, FlowModel):
        rhs = lambda s, t: flow_rhs(model, s, t)  # noqa: E731
    else:
        rhs = model
    t0, t1 = map(float, window)
    x = np.array(x0, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ContractError("propagate: initial state must be finite")
    n, h, h_last = step_plan(t0, t1, cfg.step)
    if n == 0 and h_last == 0:
        return x
    t = t0
    for j in range(n + (h_last != 0)):
        hj = h if j < n else h_last
        t = t0 + j * h
        if observer is not None:
            observer(t, x, rhs(x, t))
        x = rk4_step(rhs, x, t, hj)
        if np.any(np.abs(x) > ESCAPE_RADIUS):
            raise PropagationError(t + hj, x)
    t = t1
    if observer is not None:
        observer(t, x, rhs(x, t))
    return x


# ---------------------------------------------------------------------------
# compiled batch integration with the LD channel
# ---------------------------------------------------------------------------

@njit(nogil=True, inline="always")
def _rate_arc_length(state, deriv, pexp, momenta):
    acc = 0.0
    for i in range(deriv.shape[0]):
        acc += deriv[i] * deriv[i]
    return math.sqrt(acc)


@njit(nogil=True, inline="always")
def _rate_pnorm(state, deriv, pexp, momenta):
    acc = 0.0
    for i in range(deriv.shape[0]):
        acc += abs(deriv[i]) ** pexp
    return acc


@njit(nogil=True, inline="always")
def _rate_action(state, deriv, pexp, momenta):
    # 2T for T = |p|^2 / 2
    acc = 0.0
    for i in range(momenta.shape[0]):
        acc += state[momenta[i]] * state[momenta[i]]
    return acc


_RATES = {OBS_ARC_LENGTH: _rate_arc_length, OBS_PNORM: _rate_pnorm, OBS_ACTION: _rate_action}


@lru_cache(maxsize=None)
def _ld_kernel(rhs, obs):
    # one compiled kernel per (vector field, observable) pair
    rate = _RATES[obs]

    @njit(nogil=True)
    def kernel(x0s, t0, h, nsteps, h_last, params, pexp, momenta, values, status, final):
        npts, dim = x0s.shape
        x = np.empty(dim)
        xs = np.empty(dim)
        k1 = np.empty(dim)
        k2 = np.empty(dim)
        k3 = np.empty(dim)
        k4 = np.empty(dim)
        total = nsteps + (1 if h_last != 0.0 else 0)
        for p in range(npts):
            for i in range(dim):
                x[i] = x0s[p, i]
            acc = 0.0
            st = STATUS_OK
            for j in range(total):
                hj = h if j < nsteps else h_last
                half = 0.5 * hj
                sixth = hj / 6.0
                t = t0 + j * h
                rhs(x, t, params, k1)
                g1 = rate(x, k1, pexp, momenta)
                for i in range(dim):
                    xs[i] = x[i] + half * k1[i]
                rhs(xs, t + half, params, k2)
                g2 = rate(xs, k2, pexp, momenta)
                for i in range(dim):
                    xs[i] = x[i] + half * k2[i]
                rhs(xs, t + half, params, k3)
                g3 = rate(xs, k3, pexp, momenta)
                for i in range(dim):
                    xs[i] = x[i] + hj * k3[i]
                rhs(xs, t + hj, params, k4)
                g4 = rate(xs, k4, pexp, momenta)
                bad = False
                for i in range(dim):
                    xs[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    if not (abs(xs[i]) <= ESCAPE_RADIUS):
                        bad = True
                dl = abs(sixth) * (g1 + 2.0 * g2 + 2.0 * g3 + g4)
                if bad or not math.isfinite(dl):
                    st = STATUS_ESCAPED
                    break
                acc += dl
                for i in range(dim):
                    x[i] = xs[i]
            values[p] = acc
            status[p] = st
            for i in range(dim):
                final[p, i] = x[i]

    return kernel


def integrate_ld(model: FlowModel, x0s, t0: float, t1: float, cfg: IntegratorConfig,
                 observable: int = OBS_ARC_LENGTH, p: float = 1.0,
                 threads: int = 1, chunk: int = 1024):
    """Propagate every row of ``x0s`` over ``[t0, t1]`` accumulating the LD rate.

    Returns ``(values, status, final_states)``. Rows are independent, so the
    result does not depend on ``threads``.
    """
    x0s = np.ascontiguousarray(np.atleast_2d(x0s), dtype=np.float64)
    if x0s.shape[1] != model.dim:
        raise ContractError(f"{model.kind.value}: expected states of length {model.dim}")
    npts = x0s.shape[0]
    values = np.zeros(npts)
    status = np.zeros(npts, dtype=np.int8)
    final = x0s.copy()
    n, h, h_last = step_plan(float(t0), float(t1), cfg.step)
    if npts == 0 or (n == 0 and h_last == 0):
        return values, status, final
    kernel = _ld_kernel(model.kernel, int(observable))
    momenta = np.asarray(model.momenta, dtype=np.int64)
    args = (float(t0), h, n, h_last, model.param_vector, float(p), momenta)

    def run(lo, hi):
        kernel(x0s[lo:hi], *args, values[lo:hi], status[lo:hi], final[lo:hi])

    bounds = [(lo, min(lo + chunk, npts)) for lo in range(0, npts, chunk)]
    if threads <= 1 or len(bounds) == 1:
        for lo, hi in bounds:
            run(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: run(*b), bounds))
    return values, status, final
