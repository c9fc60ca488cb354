"""Lagrangian descriptors along flow trajectories and map orbits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np
from scipy import integrate as sp_integrate

from . import integrate as _int
from .integrate import IntegratorConfig
from .models import ContractError, FlowModel, MapModel, map_step


class Observable(str, Enum):
    ARC_LENGTH = "arc-length"
    PNORM = "pnorm"
    ACTION_2T = "action"


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BOTH = "both"


class Status(IntEnum):
    OK = _int.STATUS_OK
    NON_ADMISSIBLE = _int.STATUS_NON_ADMISSIBLE
    ESCAPED = _int.STATUS_ESCAPED


_OBS_CODE = {
    Observable.ARC_LENGTH: _int.OBS_ARC_LENGTH,
    Observable.PNORM: _int.OBS_PNORM,
    Observable.ACTION_2T: _int.OBS_ACTION,
}


@dataclass(frozen=True)
class LDConfig:
    """What to accumulate and over which window.

    ``window`` is the final time for flows and the iterate count for maps.
    """

    window: float
    observable: Observable = Observable.ARC_LENGTH
    p: float = 1.0
    direction: Direction = Direction.FORWARD
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        object.__setattr__(self, "observable", Observable(self.observable))
        object.__setattr__(self, "direction", Direction(self.direction))
        if not self.window > 0:
            raise ContractError(f"LD window must be positive, got {self.window}")
        if self.observable is Observable.PNORM and not 0 < self.p <= 1:
            raise ContractError(f"p-norm exponent must lie in (0, 1], got {self.p}")

    @property
    def iterates(self) -> int:
        n = int(round(self.window))
        if n < 1 or n != self.window:
            raise ContractError(f"map window must be an integer >= 1, got {self.window}")
        return n


@dataclass(frozen=True)
class LDValue:
    value: float
    status: Status = Status.OK

    @property
    def ok(self) -> bool:
        return self.status is Status.OK


def ld_flow_batch(model: FlowModel, x0s, cfg: LDConfig, threads: int = 1):
    """LD of many initial conditions at once; returns ``(values, status)`` arrays."""
    if cfg.observable is Observable.ACTION_2T and not model.momenta:
        raise ContractError(f"action observable needs a kinetic + potential model, not {model.kind.value}")
    t = float(cfg.window)
    code = _OBS_CODE[cfg.observable]
    x0s = np.atleast_2d(np.asarray(x0s, dtype=np.float64))
    values = np.zeros(x0s.shape[0])
    status = np.zeros(x0s.shape[0], dtype=np.int8)
    windows = {
        Direction.FORWARD: [(0.0, t)],
        Direction.BACKWARD: [(0.0, -t)],
        Direction.BOTH: [(0.0, t), (0.0, -t)],
    }[cfg.direction]
    for t0, t1 in windows:
        v, s, _ = _int.integrate_ld(model, x0s, t0, t1, cfg.integrator, code, cfg.p, threads)
        values += v
        status = np.maximum(status, s)
    return values, status


def ld_flow(model: FlowModel, x0, cfg: LDConfig) -> LDValue:
    """Lagrangian descriptor of a single initial condition of a flow."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1:
        raise ContractError("ld_flow expects a single state")
    if not np.all(np.isfinite(x0)):
        return LDValue(math.nan, Status.NON_ADMISSIBLE)
    v, s = ld_flow_batch(model, x0[None, :], cfg)
    return LDValue(float(v[0]), Status(int(s[0])))


def _map_rate(disp: np.ndarray, cfg: LDConfig) -> np.ndarray:
    if cfg.observable is Observable.ARC_LENGTH:
        return np.sqrt(np.sum(disp * disp, axis=-1))
    if cfg.observable is Observable.PNORM:
        return np.sum(np.abs(disp) ** cfg.p, axis=-1)
    raise ContractError("action observable is only defined for flows")


def ld_map_batch(model: MapModel, z0s, cfg: LDConfig):
    """Sum of step lengths over ``cfg.window`` iterates for a stack of orbits."""
    if cfg.direction is not Direction.FORWARD:
        raise ContractError("maps support forward LD only")
    n = cfg.iterates
    z = np.array(np.atleast_2d(z0s), dtype=np.float64)
    values = np.zeros(z.shape[0])
    status = np.zeros(z.shape[0], dtype=np.int8)
    alive = np.ones(z.shape[0], dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n):
            nxt, disp = map_step(model, z)
            rate = _map_rate(disp, cfg)
            bad = alive & ~(np.all(np.abs(nxt) <= _int.ESCAPE_RADIUS, axis=-1) & np.isfinite(rate))
            if bad.any():
                status[bad] = Status.ESCAPED
                alive &= ~bad
            # escaped orbits stay frozen at their last finite state
            values += np.where(alive, rate, 0.0)
            z = np.where(alive[:, None], nxt, z)
    return values, status


def ld_map(model: MapModel, z0, cfg: LDConfig) -> LDValue:
    """Discrete Lagrangian descriptor of one orbit."""
    z0 = np.asarray(z0, dtype=np.float64)
    if z0.ndim != 1:
        raise ContractError("ld_map expects a single state")
    v, s = ld_map_batch(model, z0[None, :], cfg)
    return LDValue(float(v[0]), Status(int(s[0])))


# ---------------------------------------------------------------------------
# geometrical LD of the pendulum
# ---------------------------------------------------------------------------

PENDULUM_SEPARATRIX_ENERGY = 1.0


def _libration_half_branch(E: float, tol: float) -> float:
    # upper branch I >= 0 over phi in [0, arccos(-E)]; integrand blows up at the turning point
    phi_max = math.acos(-E)
    phi_mid = 0.5 * phi_max

    def near_axis(phi):
        r = E + math.cos(phi)
        dI = -math.sin(phi) / math.sqrt(2.0 * r)
        return math.sqrt(1.0 + dI * dI)

    # u^2 = E + cos(phi) regularizes the turning point: I = sqrt(2) u
    def near_turn(u):
        c = u * u - E
        s2 = max(1.0 - c * c, 0.0)
        return math.sqrt(2.0 + 4.0 * u * u / s2)

    u_mid = math.sqrt(E + math.cos(phi_mid))
    a, _ = sp_integrate.quad(near_axis, 0.0, phi_mid, epsabs=tol, epsrel=tol, limit=200)
    b, _ = sp_integrate.quad(near_turn, 0.0, u_mid, epsabs=tol, epsrel=tol, limit=200)
    return a + b


def _circulation_half_branch(E: float, tol: float) -> float:
    # upper branch over phi in [0, pi]; peaked near phi = pi when E is close to 1
    def f(phi):
        r = E + math.cos(phi)
        dI = -math.sin(phi) / math.sqrt(2.0 * r)
        return math.sqrt(1.0 + dI * dI)

    w = math.sqrt(max(E - 1.0, 0.0))
    cuts = sorted({math.pi - c * w for c in (1.0, 10.0, 100.0) if c * w < math.pi})
    edges = [0.0, *cuts, math.pi]
    return sum(
        sp_integrate.quad(f, lo, hi, epsabs=tol, epsrel=tol, limit=200)[0]
        for lo, hi in zip(edges[:-1], edges[1:])
    )


def geometric_ld_pendulum(E: float, quad_tol: float = 1e-8) -> float:
    """Length of the pendulum level curve ``I^2/2 - cos(phi) = E`` on the cylinder.

    Below the separatrix the closed libration curve is measured (both
    branches). Above it, the single ``I > 0`` circulation branch over
    ``phi in [-pi, pi]`` is measured.
    """
    if not E > -1.0:
        raise ContractError(f"pendulum level curve is degenerate for E <= -1, got {E}")
    if E == PENDULUM_SEPARATRIX_ENERGY:
        raise ContractError("E = 1 is the separatrix; take the limit from either side")
    if E < PENDULUM_SEPARATRIX_ENERGY:
        return 4.0 * _libration_half_branch(E, quad_tol)
    return 2.0 * _circulation_half_branch(E, quad_tol)
