"""LD fields over sections of initial conditions and their derivative indicators.

Derivatives are taken on the index mesh (unit spacing), so indicator values
differ from physical-unit derivatives by a constant factor per axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .ld import LDConfig, Status, ld_flow_batch, ld_map_batch
from .models import ContractError, FlowModel, MapModel, hh_lift

ENERGY_AXIS = "E"


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ContractError(f"axis {self.name}: need lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class SectionSpec:
    """A 2D slice (or a 1D line when ``axis2`` is None) of initial conditions.

    ``fixed`` holds every coordinate that is neither an axis nor supplied by
    ``lift``. The only lift is ``"hh"``: ``p_x > 0`` from the Henon-Heiles
    energy equation at ``x = 0``, with the energy either ``energy`` or an
    axis named ``"E"``.
    """

    axis1: Axis
    axis2: Axis | None = None
    resolution: int = 500
    fixed: Mapping[str, float] = field(default_factory=dict)
    lift: str | None = None
    energy: float | None = None

    def __post_init__(self):
        if self.resolution < 3:
            raise ContractError(f"resolution must be >= 3, got {self.resolution}")
        if self.lift not in (None, "hh"):
            raise ContractError(f"unknown lift {self.lift!r}")

    @property
    def line_mode(self) -> bool:
        return self.axis2 is None

    @property
    def axes(self) -> tuple[Axis, ...]:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)

    @property
    def shape(self) -> tuple[int, ...]:
        n = self.resolution
        return (n,) if self.line_mode else (n, n)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((a.hi - a.lo) / (self.resolution - 1) for a in self.axes)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        return tuple(np.linspace(a.lo, a.hi, self.resolution) for a in self.axes)

    def initial_conditions(self, coords: tuple[str, ...]):
        """States of shape ``(M, dim)`` in row-major order, plus an admissibility mask."""
        grids = self.coordinates()
        if self.line_mode:
            mesh = {self.axis1.name: grids[0]}
        else:
            g1, g2 = np.meshgrid(grids[0], grids[1], indexing="xy")
            mesh = {self.axis1.name: g1.ravel(), self.axis2.name: g2.ravel()}
        npts = self.resolution ** len(self.axes)
        lifted = {"px"} if self.lift == "hh" else set()
        states = np.empty((npts, len(coords)))
        for i, name in enumerate(coords):
            if name in mesh:
                states[:, i] = mesh[name]
            elif name in self.fixed:
                states[:, i] = float(self.fixed[name])
            elif name not in lifted:
                raise ContractError(f"coordinate {name!r} is neither an axis, fixed, nor lifted")
        for name in mesh:
            if name not in coords and name != ENERGY_AXIS:
                raise ContractError(f"axis {name!r} is not a coordinate of {coords}")
        admissible = np.ones(npts, dtype=bool)
        if self.lift == "hh":
            if coords != ("x", "y", "px", "py"):
                raise ContractError("the hh lift applies to the Henon-Heiles model only")
            if ENERGY_AXIS in mesh:
                energy = mesh[ENERGY_AXIS]
            elif self.energy is not None:
                energy = self.energy
            else:
                raise ContractError("hh lift needs an energy or an 'E' axis")
            px = hh_lift(states[:, 1], states[:, 3], energy)
            states[:, 2] = px
            admissible = np.isfinite(px)
        elif ENERGY_AXIS in mesh:
            raise ContractError("an 'E' axis requires the hh lift")
        return states, admissible


@dataclass(frozen=True)
class ScalarField:
    """Values on a section mesh; cells with ``mask == False`` carry ``nan``.

    2D fields are stored as ``values[i2, i1]`` so ``axis1`` runs along rows.
    """

    values: np.ndarray
    mask: np.ndarray
    section: SectionSpec
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != self.mask.shape:
            raise ContractError("values and mask must share a shape")
        self.values.setflags(write=False)
        self.mask.setflags(write=False)

    @property
    def spacing(self) -> tuple[float, ...]:
        return self.section.spacing

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def derive(self, values, mask, step: str) -> "ScalarField":
        meta = dict(self.meta)
        meta["post"] = [*meta.get("post", []), step]
        values = np.where(mask, values, np.nan)
        return ScalarField(values, np.asarray(mask, dtype=bool), self.section, meta)


def sweep(model, section: SectionSpec, cfg: LDConfig, threads: int = 1) -> ScalarField:
    """Evaluate the LD at every mesh node of ``section``.

    Non-admissible lifts and escaped trajectories are masked out.
    """
    states, admissible = section.initial_conditions(model.coords)
    values = np.full(states.shape[0], np.nan)
    status = np.full(states.shape[0], Status.NON_ADMISSIBLE, dtype=np.int8)
    idx = np.flatnonzero(admissible)
    if idx.size:
        if isinstance(model, FlowModel):
            v, s = ld_flow_batch(model, states[idx], cfg, threads=threads)
        elif isinstance(model, MapModel):
            v, s = ld_map_batch(model, states[idx], cfg)
        else:
            raise ContractError(f"cannot sweep {type(model).__name__}")
        values[idx] = v
        status[idx] = s
    mask = status == Status.OK
    values[~mask] = np.nan
    meta = {
        "model": model.kind.value,
        "params": dict(model.params),
        "window": cfg.window,
        "observable": cfg.observable.value,
        "direction": cfg.direction.value,
        "spacing": list(section.spacing),
        "escaped": int(np.count_nonzero(status == Status.ESCAPED)),
        "non_admissible": int(np.count_nonzero(status == Status.NON_ADMISSIBLE)),
        "quantity": "LD",
    }
    if isinstance(model, FlowModel):
        meta["step"] = cfg.integrator.step
    return ScalarField(values.reshape(section.shape), mask.reshape(section.shape), section, meta)


def _require_stencil(field_: ScalarField) -> None:
    if min(field_.shape) < 3:
        raise ContractError(f"stencils need at least 3 nodes per axis, got {field_.shape}")


def _second_diff_axis(v: np.ndarray, m: np.ndarray, axis: int):
    v = np.moveaxis(v, axis, 0)
    m = np.moveaxis(m, axis, 0)
    d = np.empty_like(v)
    ok = np.empty_like(m)
    d[1:-1] = v[2:] + v[:-2] - 2.0 * v[1:-1]
    ok[1:-1] = m[2:] & m[:-2] & m[1:-1]
    # one-sided three-point formulas at both ends
    d[0] = v[0] - 2.0 * v[1] + v[2]
    ok[0] = m[0] & m[1] & m[2]
    d[-1] = v[-1] - 2.0 * v[-2] + v[-3]
    ok[-1] = m[-1] & m[-2] & m[-3]
    return np.moveaxis(d, 0, axis), np.moveaxis(ok, 0, axis)


def _first_diff_axis(v: np.ndarray, m: np.ndarray, axis: int):
    v = np.moveaxis(v, axis, 0)
    m = np.moveaxis(m, axis, 0)
    d = np.empty_like(v)
    ok = np.empty_like(m)
    d[1:-1] = 0.5 * (v[2:] - v[:-2])
    ok[1:-1] = m[2:] & m[:-2]
    d[0] = v[1] - v[0]
    ok[0] = m[0] & m[1]
    d[-1] = v[-1] - v[-2]
    ok[-1] = m[-1] & m[-2]
    return np.moveaxis(d, 0, axis), np.moveaxis(ok, 0, axis)


def second_diff_field(field_: ScalarField) -> ScalarField:
    """Sum over axes of the absolute second differences (unit mesh spacing)."""
    _require_stencil(field_)
    v = np.where(field_.mask, field_.values, 0.0)
    total = np.zeros_like(v)
    mask = field_.mask.copy()
    for axis in range(v.ndim):
        d, ok = _second_diff_axis(v, field_.mask, axis)
        total += np.abs(d)
        mask &= ok
    return field_.derive(total, mask, "second_diff")


def gradient_norm_field(field_: ScalarField) -> ScalarField:
    """Euclidean norm of the finite-difference gradient (unit mesh spacing)."""
    _require_stencil(field_)
    v = np.where(field_.mask, field_.values, 0.0)
    total = np.zeros_like(v)
    mask = field_.mask.copy()
    for axis in range(v.ndim):
        d, ok = _first_diff_axis(v, field_.mask, axis)
        total += d * d
        mask &= ok
    return field_.derive(np.sqrt(total), mask, "gradient_norm")


def log10_transform(field_: ScalarField, floor: float = 1e-16) -> ScalarField:
    if not floor > 0:
        raise ContractError(f"log floor must be positive, got {floor}")
    v = np.where(field_.mask, field_.values, floor)
    return field_.derive(np.log10(np.maximum(v, floor)), field_.mask, f"log10({floor:g})")


def landscape_1d(model, section: SectionSpec, cfg: LDConfig, threads: int = 1):
    """LD and its second difference along a line of initial conditions.

    Returns ``(positions, ld, dld)``; masked nodes hold ``nan``.
    """
    if not section.line_mode:
        raise ContractError("landscape_1d needs a line section (axis2 unset)")
    ld = sweep(model, section, cfg, threads=threads)
    dld = second_diff_field(ld)
    return section.coordinates()[0], np.array(ld.values), np.array(dld.values)


def with_resolution(section: SectionSpec, n: int) -> SectionSpec:
    return replace(section, resolution=int(n))
