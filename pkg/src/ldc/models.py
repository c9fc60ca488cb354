"""Catalog of flows and maps used to build stability maps.

Flows are described by a compiled right-hand side ``rhs(x, t, params, out)``
so the same kernel serves single-point evaluation and the batch integrator.
Maps are plain numpy functions vectorized over leading axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Mapping

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi


class ContractError(ValueError):
    """Raised when an operation is called outside its preconditions."""


# ---------------------------------------------------------------------------
# flow right-hand sides
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _pendulum_rhs(x, t, p, out):
    # (I, phi)
    out[0] = -np.sin(x[1])
    out[1] = x[0]


@njit(cache=True, nogil=True)
def _modulated_pendulum_rhs(x, t, p, out):
    # (I, J, phi, tau);  H = I^2/2 + J - (1 + mu sin tau) cos phi
    mu = p[0]
    phi = x[2]
    tau = x[3]
    out[0] = -(1.0 + mu * np.sin(tau)) * np.sin(phi)
    out[1] = mu * np.cos(tau) * np.cos(phi)
    out[2] = x[0]
    out[3] = 1.0


@njit(cache=True, nogil=True)
def _chirikov_k_rhs(x, t, p, out):
    # (I, A, phi, tau);  K = I^2/2 - I^3/3 - eps/12 cos phi + mu cos(2I + phi + tau) + A
    eps = p[0]
    mu = p[1]
    I = x[0]
    phi = x[2]
    s = np.sin(2.0 * I + phi + x[3])
    out[0] = -eps / 12.0 * np.sin(phi) + mu * s
    out[1] = mu * s
    out[2] = I - I * I - 2.0 * mu * s
    out[3] = 1.0


@njit(cache=True, nogil=True)
def _fgl_rhs(x, t, p, out):
    # (I1, I2, I3, phi1, phi2, phi3)
    eps = p[0]
    d = np.cos(x[3]) + np.cos(x[4]) + np.cos(x[5]) + 4.0
    g = eps / (d * d)
    out[0] = -g * np.sin(x[3])
    out[1] = -g * np.sin(x[4])
    out[2] = -g * np.sin(x[5])
    out[3] = x[0]
    out[4] = x[1]
    out[5] = 1.0


@njit(cache=True, nogil=True)
def _henon_heiles_rhs(x, t, p, out):
    # (x, y, px, py)
    q1 = x[0]
    q2 = x[1]
    out[0] = x[2]
    out[1] = x[3]
    out[2] = -q1 - 2.0 * q1 * q2
    out[3] = -q2 - q1 * q1 + q2 * q2


# ---------------------------------------------------------------------------
# Hamiltonians (numpy, vectorized over the last axis)
# ---------------------------------------------------------------------------

def _pendulum_h(s, p):
    return 0.5 * s[..., 0] ** 2 - np.cos(s[..., 1])


def _modulated_pendulum_h(s, p):
    I, J, phi, tau = np.moveaxis(s, -1, 0)
    return 0.5 * I**2 + J - (1.0 + p[0] * np.sin(tau)) * np.cos(phi)


def _chirikov_k_h(s, p):
    I, A, phi, tau = np.moveaxis(s, -1, 0)
    eps, mu = p
    return 0.5 * I**2 - I**3 / 3.0 - eps / 12.0 * np.cos(phi) + mu * np.cos(2 * I + phi + tau) + A


def _fgl_h(s, p):
    I1, I2, I3, f1, f2, f3 = np.moveaxis(s, -1, 0)
    return 0.5 * I1**2 + 0.5 * I2**2 + I3 + p[0] / (np.cos(f1) + np.cos(f2) + np.cos(f3) + 4.0)


def _henon_heiles_h(s, p):
    x, y, px, py = np.moveaxis(s, -1, 0)
    return 0.5 * (px**2 + py**2 + x**2 + y**2) + x**2 * y - y**3 / 3.0


class FlowKind(str, Enum):
    PENDULUM = "pendulum"
    MODULATED_PENDULUM = "modulated-pendulum"
    CHIRIKOV_OVERLAP_K = "chirikov-k"
    FGL = "fgl"
    HENON_HEILES = "henon-heiles"


@dataclass(frozen=True)
class _FlowInfo:
    coords: tuple[str, ...]
    params: tuple[str, ...]
    rhs: object
    hamiltonian: object
    momenta: tuple[int, ...] = ()


_FLOWS = {
    FlowKind.PENDULUM: _FlowInfo(("I", "phi"), (), _pendulum_rhs, _pendulum_h),
    FlowKind.MODULATED_PENDULUM: _FlowInfo(
        ("I", "J", "phi", "tau"), ("mu",), _modulated_pendulum_rhs, _modulated_pendulum_h
    ),
    FlowKind.CHIRIKOV_OVERLAP_K: _FlowInfo(
        ("I", "A", "phi", "tau"), ("eps", "mu"), _chirikov_k_rhs, _chirikov_k_h
    ),
    FlowKind.FGL: _FlowInfo(
        ("I1", "I2", "I3", "phi1", "phi2", "phi3"), ("eps",), _fgl_rhs, _fgl_h
    ),
    FlowKind.HENON_HEILES: _FlowInfo(
        ("x", "y", "px", "py"), (), _henon_heiles_rhs, _henon_heiles_h, momenta=(2, 3)
    ),
}


def _param_vector(names, params: Mapping[str, float], kind) -> np.ndarray:
    unknown = set(params) - set(names)
    if unknown:
        raise ContractError(f"{kind.value}: unknown parameter(s) {sorted(unknown)}")
    missing = [n for n in names if n not in params]
    if missing:
        raise ContractError(f"{kind.value}: missing parameter(s) {missing}")
    vec = np.array([float(params[n]) for n in names], dtype=np.float64)
    if not np.all(np.isfinite(vec)):
        raise ContractError(f"{kind.value}: parameters must be finite, got {dict(params)}")
    return vec


@dataclass(frozen=True)
class FlowModel:
    """A Hamiltonian vector field, autonomized where needed.

    The modulated pendulum and the Chirikov-overlap model carry the clock
    ``tau`` (unit rate) and its conjugate action as extra coordinates.
    """

    kind: FlowKind
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", FlowKind(self.kind))
        info = _FLOWS[self.kind]
        vec = _param_vector(info.params, self.params, self.kind)
        object.__setattr__(self, "params", dict(zip(info.params, vec.tolist())))
        object.__setattr__(self, "_pvec", vec)

    @property
    def dim(self) -> int:
        return len(_FLOWS[self.kind].coords)

    @property
    def coords(self) -> tuple[str, ...]:
        return _FLOWS[self.kind].coords

    @property
    def param_vector(self) -> np.ndarray:
        return self._pvec

    @property
    def kernel(self):
        return _FLOWS[self.kind].rhs

    @property
    def momenta(self) -> tuple[int, ...]:
        """Indices of the momenta in a kinetic + potential splitting, if any."""
        return _FLOWS[self.kind].momenta

    def hamiltonian(self, state) -> np.ndarray:
        state = np.asarray(state, dtype=np.float64)
        _check_dim(state, self.dim, self.kind.value)
        return _FLOWS[self.kind].hamiltonian(state, self._pvec)

    def rhs(self, state, t: float = 0.0) -> np.ndarray:
        return flow_rhs(self, state, t)


def _check_dim(state: np.ndarray, dim: int, name: str) -> None:
    if state.ndim == 0 or state.shape[-1] != dim:
        raise ContractError(f"{name}: expected state of length {dim}, got shape {state.shape}")


def flow_rhs(model: FlowModel, state, t: float = 0.0) -> np.ndarray:
    """Evaluate Hamilton's equations of ``model`` at a single state."""
    x = np.ascontiguousarray(state, dtype=np.float64)
    if x.ndim != 1:
        raise ContractError(f"flow_rhs expects a 1-D state, got shape {x.shape}")
    _check_dim(x, model.dim, model.kind.value)
    out = np.empty_like(x)
    model.kernel(x, float(t), model.param_vector, out)
    return out


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------

class MapKind(str, Enum):
    STANDARD = "standard"
    FROESCHLE_4D = "froeschle4d"
    GENERALIZED_FROESCHLE = "generalized-froeschle"


_MAP_COORDS = {
    MapKind.STANDARD: ("x", "y"),
    MapKind.FROESCHLE_4D: ("x", "y", "z", "t"),
    MapKind.GENERALIZED_FROESCHLE: ("x1", "x2", "y1", "y2"),
}
_MAP_PARAMS = {
    MapKind.STANDARD: ("k",),
    MapKind.FROESCHLE_4D: ("eps",),
    MapKind.GENERALIZED_FROESCHLE: ("a", "b", "c", "phase"),
}
# None means the coordinate lives on R
_MAP_WRAP = {
    MapKind.STANDARD: (1.0, None),
    MapKind.FROESCHLE_4D: (None, TWO_PI, None, TWO_PI),
    MapKind.GENERALIZED_FROESCHLE: (1.0, 1.0, None, None),
}


@dataclass(frozen=True)
class MapModel:
    kind: MapKind
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", MapKind(self.kind))
        vec = _param_vector(_MAP_PARAMS[self.kind], self.params, self.kind)
        object.__setattr__(self, "params", dict(zip(_MAP_PARAMS[self.kind], vec.tolist())))
        if self.kind is MapKind.STANDARD and self.params["k"] < 0:
            raise ContractError(f"standard map needs k >= 0, got {self.params['k']}")

    @property
    def dim(self) -> int:
        return len(_MAP_COORDS[self.kind])

    @property
    def coords(self) -> tuple[str, ...]:
        return _MAP_COORDS[self.kind]

    @property
    def wrap(self) -> tuple[float | None, ...]:
        return _MAP_WRAP[self.kind]

    def __call__(self, state):
        return map_step(self, state)[0]


def _increment(model: MapModel, s: np.ndarray) -> np.ndarray:
    p = model.params
    d = np.empty_like(s)
    if model.kind is MapKind.STANDARD:
        x, y = s[..., 0], s[..., 1]
        kick = -p["k"] * np.sin(TWO_PI * x) / TWO_PI
        d[..., 0] = y + kick
        d[..., 1] = kick
    elif model.kind is MapKind.FROESCHLE_4D:
        x, y, z, t = np.moveaxis(s, -1, 0)
        den = (np.cos(x + y) + np.cos(z + t) + 4.0) ** 2
        d[..., 0] = -p["eps"] * np.sin(x + y) / den
        d[..., 1] = x
        d[..., 2] = -p["eps"] * np.sin(z + t) / den
        d[..., 3] = z
    else:
        a, b, c, phase = p["a"], p["b"], p["c"], p["phase"]
        x1, x2, y1, y2 = np.moveaxis(s, -1, 0)
        s1 = np.sin(TWO_PI * x1)
        s2 = np.sin(TWO_PI * x2)
        s12 = np.sin(TWO_PI * (x1 + x2))
        kick1 = -(a * s1 + c * s12) / TWO_PI
        d[..., 0] = y1 + kick1
        d[..., 1] = y2 - (b * s2 + c * s12) / TWO_PI
        d[..., 2] = kick1
        d[..., 3] = -(b * s2 + c * np.sin(TWO_PI * (x1 + x2 + phase))) / TWO_PI
    return d


def map_step(model: MapModel, state) -> tuple[np.ndarray, np.ndarray]:
    """One iterate of ``model``.

    Returns ``(next, displacement)`` where ``displacement`` is the increment
    taken before the angles are reduced modulo their period. Works on a
    single state or on any stack of states along leading axes.
    """
    s = np.asarray(state, dtype=np.float64)
    _check_dim(s, model.dim, model.kind.value)
    disp = _increment(model, s)
    nxt = s + disp
    for i, period in enumerate(model.wrap):
        if period is not None:
            nxt[..., i] = np.mod(nxt[..., i], period)
    return nxt, disp


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def hh_lift(y, p_y, E):
    """Momentum ``p_x > 0`` placing ``(x=0, y, p_x, p_y)`` on the energy level ``E``.

    Scalar inputs give a float or ``None`` when the point is not admissible.
    Array inputs broadcast and give an array with ``nan`` where not admissible.
    """
    y_, py_, E_ = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (y, p_y, E)))
    radicand = 2.0 * E_ - py_**2 - y_**2 + (2.0 / 3.0) * y_**3
    ok = radicand > 0.0
    px = np.where(ok, np.sqrt(np.where(ok, radicand, 1.0)), np.nan)
    if px.ndim == 0:
        return float(px) if bool(ok) else None
    return px


def pendulum_level_curve(E: float, phi: float) -> float | None:
    """Nonnegative branch of the level set ``I^2/2 - cos(phi) = E``."""
    r = E + math.cos(phi)
    if r < 0.0:
        return None
    return math.sqrt(2.0 * r)


def fgl_resonance_lines(max_order: int) -> list[tuple[int, int, int]]:
    """Integer vectors ``k`` with ``0 < |k| <= max_order``, gcd 1, first nonzero entry positive.

    Each vector defines the resonance ``k1*I1 + k2*I2 + k3 = 0``.
    """
    if max_order < 1:
        raise ContractError(f"max_order must be >= 1, got {max_order}")
    out = []
    rng = range(-max_order, max_order + 1)
    for k in product(rng, rng, rng):
        order = sum(abs(c) for c in k)
        if order == 0 or order > max_order:
            continue
        if math.gcd(math.gcd(k[0], k[1]), k[2]) != 1:
            continue
        lead = next(c for c in k if c != 0)
        if lead < 0:
            continue
        out.append(k)
    out.sort(key=lambda k: (sum(abs(c) for c in k), [-c for c in k]))
    return out
