"""Declarative scenarios: model + section + LD settings + post-processing chain.

Scenario files are INI text with the sections ``scenario``, ``model``,
``section``, ``ld``, ``post``, ``outputs`` and optionally ``probes``.
"""
from __future__ import annotations

import configparser
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .fields import (
    Axis,
    ScalarField,
    SectionSpec,
    gradient_norm_field,
    log10_transform,
    second_diff_field,
    sweep,
)
from .integrate import IntegratorConfig
from .ld import LDConfig
from .models import ContractError, FlowKind, FlowModel, MapKind, MapModel
from . import writers

SECTIONS = ("scenario", "model", "section", "ld", "post", "outputs", "probes")
_OVERRIDE_SEARCH = ("model", "ld", "section", "post", "outputs", "scenario")


class ScenarioError(ValueError):
    pass


def builtin_names() -> list[str]:
    root = resources.files("ldc") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def _read_raw(name_or_path) -> tuple[str, configparser.ConfigParser]:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    path = Path(str(name_or_path))
    if path.suffix == ".ini" and path.exists():
        cp.read_string(path.read_text(), source=str(path))
        return str(path), cp
    if str(name_or_path) not in builtin_names():
        raise ScenarioError(f"unknown scenario {name_or_path!r}; try `ldc list`")
    text = (resources.files("ldc") / "scenarios" / f"{name_or_path}.ini").read_text()
    cp.read_string(text, source=f"<builtin {name_or_path}>")
    return f"builtin:{name_or_path}", cp


def apply_overrides(cp: configparser.ConfigParser, overrides: dict[str, str]) -> None:
    """Set ``key`` or ``section.key`` values; a bare key must already exist somewhere."""
    for key, value in overrides.items():
        if "." in key:
            sec, opt = key.split(".", 1)
            if sec not in SECTIONS:
                raise ScenarioError(f"override {key!r}: unknown section {sec!r}")
        else:
            sec = next((s for s in _OVERRIDE_SEARCH if cp.has_option(s, key)), None)
            if sec is None:
                raise ScenarioError(f"override {key!r} matches no scenario setting")
            opt = key
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, opt, str(value))


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _parse_axis(text: str) -> Axis:
    name, lo, hi = text.split()
    return Axis(name, float(lo), float(hi))


def _parse_assignments(text: str) -> dict[str, float]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        k, v = item.split("=")
        out[k.strip()] = float(v)
    return out


_POST_RE = re.compile(r"^(second_diff|gradient_norm|log10)(?:\(([^)]*)\))?$")


def _parse_post(text: str) -> list[tuple[str, float | None]]:
    steps = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        m = _POST_RE.match(item)
        if not m:
            raise ScenarioError(f"unknown post-processing step {item!r}")
        arg = m.group(2)
        steps.append((m.group(1), float(arg) if arg else None))
    return steps


@dataclass
class Scenario:
    name: str
    source: str
    model: FlowModel | MapModel
    section: SectionSpec
    ld: LDConfig
    post: list[tuple[str, float | None]]
    outputs: list[str]
    description: str = ""
    probes: dict[str, list[float]] = field(default_factory=dict)
    settings: dict[str, dict[str, str]] = field(default_factory=dict)
    # bound on |H(x(t)) - H(x(0))| over the window at the scenario's step (flows only)
    energy_tol: float | None = None

    @property
    def is_flow(self) -> bool:
        return isinstance(self.model, FlowModel)


def load_scenario(name_or_path, overrides: dict[str, str] | None = None) -> Scenario:
    source, cp = _read_raw(name_or_path)
    apply_overrides(cp, overrides or {})
    try:
        return _build(source, cp)
    except (KeyError, ValueError, configparser.Error) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{source}: {exc}") from exc


def _build(source: str, cp: configparser.ConfigParser) -> Scenario:
    for sec in ("scenario", "model", "section", "ld"):
        if not cp.has_section(sec):
            raise ScenarioError(f"{source}: missing [{sec}]")
    settings = {s: dict(cp.items(s)) for s in cp.sections()}

    model_opts = dict(settings["model"])
    kind = model_opts.pop("kind")
    params = {k: float(v) for k, v in model_opts.items()}
    if kind in {k.value for k in FlowKind}:
        model = FlowModel(kind, params)
    elif kind in {k.value for k in MapKind}:
        model = MapModel(kind, params)
    else:
        raise ScenarioError(f"{source}: unknown model kind {kind!r}")

    s = settings["section"]
    energy = s.get("energy")
    section = SectionSpec(
        axis1=_parse_axis(s["axis1"]),
        axis2=_parse_axis(s["axis2"]) if s.get("axis2") else None,
        resolution=int(s.get("resolution", 500)),
        fixed=_parse_assignments(s.get("fixed", "")),
        lift=s.get("lift") or None,
        energy=float(energy) if energy else None,
    )

    opts = settings["ld"]
    ld = LDConfig(
        window=float(opts["window"]),
        observable=opts.get("observable", "arc-length"),
        p=float(opts.get("p", 1.0)),
        direction=opts.get("direction", "forward"),
        integrator=IntegratorConfig(step=float(opts.get("step", 1e-2))),
    )
    if isinstance(model, MapModel):
        ld.iterates  # noqa: B018  validates an integer window
    energy_tol = float(opts["energy_tol"]) if opts.get("energy_tol") else None

    post = _parse_post(settings.get("post", {}).get("chain", ""))
    outputs = [o.strip() for o in settings.get("outputs", {}).get("formats", "csv,pgm,meta").split(",") if o.strip()]
    probes = {k: _floats(v) for k, v in settings.get("probes", {}).items()}
    meta = settings["scenario"]
    return Scenario(
        name=meta["name"],
        source=source,
        model=model,
        section=section,
        ld=ld,
        post=post,
        outputs=outputs,
        description=meta.get("description", ""),
        probes=probes,
        settings=settings,
        energy_tol=energy_tol,
    )


def apply_post(field_: ScalarField, post) -> ScalarField:
    for step, arg in post:
        if step == "second_diff":
            field_ = second_diff_field(field_)
        elif step == "gradient_norm":
            field_ = gradient_norm_field(field_)
        else:
            field_ = log10_transform(field_, 1e-16 if arg is None else arg)
    return field_


@dataclass
class RunResult:
    scenario: Scenario
    ld: ScalarField
    result: ScalarField
    manifest: dict
    degenerate: bool


def probe_median(field_: ScalarField, box) -> float:
    """Median of unmasked values inside ``box = (lo1, hi1, lo2, hi2)``."""
    c1, c2 = field_.section.coordinates()
    s1 = (c1 >= box[0]) & (c1 <= box[1])
    s2 = (c2 >= box[2]) & (c2 <= box[3])
    vals = field_.values[np.ix_(s2, s1)]
    m = field_.mask[np.ix_(s2, s1)]
    return float(np.median(vals[m])) if m.any() else float("nan")


def run_scenario(sc: Scenario, out_dir=None, threads: int = 1, overrides=None) -> RunResult:
    """Sweep, post-process, and (if ``out_dir`` is given) write the requested artifacts."""
    t_start = time.perf_counter()
    ld_field = sweep(sc.model, sc.section, sc.ld, threads=threads)
    result = apply_post(ld_field, sc.post)
    wall = time.perf_counter() - t_start

    rng = writers.value_range(result)
    degenerate = not bool(result.mask.any())
    manifest = {
        "scenario": sc.name,
        "source": sc.source,
        "description": sc.description,
        "overrides": dict(overrides or {}),
        "effective": sc.settings,
        "wall_clock_s": wall,
        "spacing": list(sc.section.spacing),
        "resolution": sc.section.resolution,
        "value_range": rng,
        "field_meta": dict(result.meta),
        "software": {"package": "ldc", "version": __version__, "numpy": np.__version__},
        "outputs": {},
    }
    if sc.probes and not sc.section.line_mode:
        manifest["probe_medians"] = {k: probe_median(result, v) for k, v in sc.probes.items()}

    if out_dir is not None:
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
        stem = out / sc.name
        if "csv" in sc.outputs:
            if sc.section.line_mode:
                cols = {"LD": ld_field.values}
                if sc.post:
                    cols[result.meta["post"][-1]] = result.values
                digest = writers.write_landscape_csv(sc.section.coordinates()[0], cols, f"{stem}.csv")
            else:
                digest = writers.write_csv(result, f"{stem}.csv")
            manifest["outputs"][f"{sc.name}.csv"] = digest
        if "pgm" in sc.outputs:
            manifest["outputs"][f"{sc.name}.pgm"] = writers.write_pgm(result, f"{stem}.pgm", rng["p_lo"], rng["p_hi"])
        if "meta" in sc.outputs:
            writers.write_meta(manifest, f"{stem}.json")
    return RunResult(sc, ld_field, result, manifest, degenerate)
