"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Runtimes are wall-clock on the machine running the suite and exclude the
one-time JIT compilation of the flow kernels, which is warmed up first.
The full module takes about 40 minutes on one core (criterion 5 dominates).

Regenerate the criterion-10 digests after an intentional numerical change with::

    LDC_REGEN_GOLDEN=1 python3 -m pytest tests/test_acceptance.py -k golden
"""
import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from ldc.fields import (
    Axis,
    ScalarField,
    SectionSpec,
    gradient_norm_field,
    landscape_1d,
    second_diff_field,
    sweep,
)
from ldc.ld import LDConfig, geometric_ld_pendulum, ld_flow
from ldc.models import FlowModel, MapModel, fgl_resonance_lines
from ldc.scenario import builtin_names, load_scenario, run_scenario

GOLDEN = Path(__file__).parent / "golden" / "digests.json"
GOLDEN_N = 64


def _warm(model, window=0.05):
    ld_flow(model, np.zeros(model.dim), LDConfig(window))


# 1 -------------------------------------------------------------------------

def test_c01_integrable_map_oracle(acceptance):
    sec = SectionSpec(Axis("x", 0.0, 1.0), Axis("y", 0.0, 0.5), resolution=64)
    t0 = time.perf_counter()
    f = sweep(MapModel("standard", {"k": 0.0}), sec, LDConfig(150))
    wall = time.perf_counter() - t0
    y = np.broadcast_to(sec.coordinates()[1][:, None], f.shape)
    expected = 150.0 * np.abs(y)
    err = np.abs(f.values - expected)
    rel = np.where(expected > 0, err / np.where(expected > 0, expected, 1.0), err)
    ok = bool(f.mask.all() and rel.max() <= 1e-12 and wall < 1.0)
    acceptance(1, ok, f"max rel err {rel.max():.2e} (<= 1e-12), {wall:.2f}s (< 1s)")
    assert ok


# 2 -------------------------------------------------------------------------

def _interior_peaks(v):
    i = np.arange(1, v.size - 1)
    is_peak = (v[i] > v[i - 1]) & (v[i] >= v[i + 1])
    return i[is_peak]


def test_c02_pendulum_landscape_peaks(acceptance):
    m = FlowModel("pendulum")
    _warm(m)
    sec = SectionSpec(Axis("I", -2.5, 2.5), resolution=500, fixed={"phi": 0.0})
    t0 = time.perf_counter()
    pos, ld, dld = landscape_1d(m, sec, LDConfig(100.0))
    wall = time.perf_counter() - t0
    inner = dld.copy()
    inner[[0, -1]] = np.nan  # interior nodes only
    peaks = _interior_peaks(np.nan_to_num(inner, nan=-np.inf))
    top = peaks[np.argsort(dld[peaks])[::-1][:3]]
    cell = sec.spacing[0]
    targets = [-2.0, 0.0, 2.0]
    matched = sorted(min(targets, key=lambda c: abs(c - pos[i])) for i in top)
    near = all(min(abs(c - pos[i]) for c in targets) <= cell for i in top)
    ok = bool(near and matched == targets and wall < 60.0)
    found = ", ".join(f"I={pos[i]:+.4f} ({dld[i]:.3g})" for i in top)
    acceptance(2, ok, f"top-3 interior peaks {found}; need one within {cell:.4f} of each of -2, 0, +2; {wall:.1f}s")
    assert ok


# 3 -------------------------------------------------------------------------

def test_c03_integrable_flow_closed_form(acceptance):
    m = FlowModel("fgl", {"eps": 0.0})
    _warm(m)
    t0 = time.perf_counter()
    v = ld_flow(m, [0.3, 0.1, 0.0, 0.0, 0.0, 0.0], LDConfig(100.0))
    wall = time.perf_counter() - t0
    exact = math.sqrt(0.3**2 + 0.1**2 + 1.0) * 100.0
    rel = abs(v.value - exact) / exact
    ok = bool(v.ok and rel <= 1e-6 and wall < 1.0)
    acceptance(3, ok, f"LD {v.value:.12g} vs {exact:.12g}, rel err {rel:.1e} (<= 1e-6), {wall:.3f}s (< 1s)")
    assert ok


# 4 -------------------------------------------------------------------------

def test_c04_standard_map_chaos_separation(acceptance):
    sc = load_scenario("standard-map-k06")
    assert sc.section.resolution == 500 and sc.ld.iterates == 150 and sc.model.params["k"] == 0.6
    t0 = time.perf_counter()
    res = run_scenario(sc)
    wall = time.perf_counter() - t0
    med = res.manifest["probe_medians"]
    gap = med["chaotic"] - med["regular"]
    ok = bool(gap >= 2.0 and wall < 120.0)
    acceptance(4, ok, f"median log10 dLD chaotic {med['chaotic']:.3f} - regular {med['regular']:.3f} "
                      f"= {gap:.3f} (>= 2.0), {wall:.1f}s (< 120s)")
    assert ok


# 5 -------------------------------------------------------------------------

def _line_distance(I1, I2, k):
    k1, k2, k3 = k
    return np.abs(k1 * I1 + k2 * I2 + k3) / math.hypot(k1, k2)


def test_c05_fgl_resonance_web(acceptance):
    sc = load_scenario("fgl-macro", {"section.resolution": "250"})
    assert sc.model.params["eps"] == 0.01 and sc.ld.window == 1000.0
    _warm(sc.model)
    t0 = time.perf_counter()
    res = run_scenario(sc)
    wall = time.perf_counter() - t0
    f = res.result  # log10 dLD
    I1, I2 = np.meshgrid(*sc.section.coordinates(), indexing="xy")
    lines = [k for k in fgl_resonance_lines(2) if k[0] or k[1]]
    dist = np.min([_line_distance(I1, I2, k) for k in lines], axis=0)
    on = (dist <= 0.01) & f.mask
    off = (dist > 0.01) & f.mask
    gap = f.values[on].mean() - f.values[off].mean()
    ok = bool(gap >= 1.0 and wall < 1800.0)
    acceptance(5, ok, f"mean log10 dLD on order<=2 lines {f.values[on].mean():.3f} ({on.sum()} px) - "
                      f"background {f.values[off].mean():.3f} = {gap:.3f} (>= 1.0), {wall / 60:.1f} min (< 30 min)")
    assert ok


# 6 -------------------------------------------------------------------------

def test_c06_henon_heiles_admissibility(acceptance):
    sc = load_scenario("hh-e0105")
    assert sc.section.resolution == 500 and sc.section.energy == 0.105
    t0 = time.perf_counter()
    _, admissible = sc.section.initial_conditions(sc.model.coords)
    wall = time.perf_counter() - t0
    y, py = np.meshgrid(*sc.section.coordinates(), indexing="xy")
    E = 0.105
    analytic = 2 * E - py**2 - y**2 + (2.0 / 3.0) * y**3 > 0
    mismatches = int(np.count_nonzero(admissible.reshape(analytic.shape) != analytic))
    ok = bool(mismatches == 0 and wall < 1.0)
    acceptance(6, ok, f"{mismatches} mask mismatches over {analytic.size} nodes "
                      f"({np.count_nonzero(~analytic)} non-admissible), {wall:.3f}s (< 1s)")
    assert ok


# 7 -------------------------------------------------------------------------

def test_c07_geometric_ld_exponent(acceptance):
    t0 = time.perf_counter()
    d = np.geomspace(1e-4, 1e-2, 30)
    slopes = {}
    for side, sign in (("above", 1.0), ("below", -1.0)):
        E = 1.0 + sign * d
        ell = np.array([geometric_ld_pendulum(e) for e in E])
        dl = (ell[2:] - ell[:-2]) / (E[2:] - E[:-2])
        slopes[side] = np.polyfit(np.log(d[1:-1]), np.log(np.abs(dl)), 1)[0]
    wall = time.perf_counter() - t0
    ok = bool(all(abs(s + 0.5) <= 0.05 for s in slopes.values()) and wall < 10.0)
    acceptance(7, ok, f"log-log slope of |dl/dE| above {slopes['above']:.4f}, below {slopes['below']:.4f} "
                      f"(-0.5 +/- 0.05), {wall:.2f}s (< 10s)")
    assert ok


# 8 -------------------------------------------------------------------------

def _field(values):
    n = values.shape[0]
    sec = SectionSpec(Axis("a", 0.0, 1.0), Axis("b", 0.0, 1.0), resolution=n)
    return ScalarField(values, np.ones(values.shape, dtype=bool), sec)


def test_c08_stencil_exactness(acceptance):
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    worst = 0.0
    for n, dyadic in ((64, True), (9, False), (3, False)):
        i2, i1 = np.mgrid[0:n, 0:n].astype(float)
        for _ in range(20):
            c = rng.integers(-16, 17, size=6) / 8.0 if dyadic else rng.uniform(-1, 1, size=6)
            quad = c[0] * i1**2 + c[1] * i1 * i2 + c[2] * i2**2 + c[3] * i1 + c[4] * i2 + c[5]
            d = second_diff_field(_field(quad)).values
            worst = max(worst, np.max(np.abs(d - (abs(2 * c[0]) + abs(2 * c[2])))))
            aff = c[3] * i1 + c[4] * i2 + c[5]
            g = gradient_norm_field(_field(aff)).values
            worst = max(worst, np.max(np.abs(g - math.hypot(c[3], c[4]))))
            d_aff = second_diff_field(_field(aff)).values
            worst = max(worst, np.max(np.abs(d_aff)))
    wall = time.perf_counter() - t0
    ok = bool(worst <= 1e-12 and wall < 1.0)
    acceptance(8, ok, f"max abs error {worst:.1e} over quadratic/affine index fields incl. boundaries "
                      f"(<= 1e-12), {wall:.2f}s (< 1s)")
    assert ok


# 9 -------------------------------------------------------------------------

def _near_primary_lines(y1, y2, tol):
    def frac_dist(s):
        return np.abs(s - np.round(s))

    return (frac_dist(y1) <= tol) | (frac_dist(y2) <= tol) | (frac_dist(y1 + y2) / math.sqrt(2) <= tol)


def _flagged_fraction(f: ScalarField, near):
    thr = np.percentile(f.values[f.mask], 95)
    flagged = f.mask & (np.where(f.mask, f.values, -np.inf) > thr)
    return np.count_nonzero(flagged & near) / np.count_nonzero(flagged)


def test_c09_second_vs_first_derivative_contrast(acceptance):
    sc = load_scenario("gfroeschle-sym-action-dld", {"section.resolution": "250"})
    p = sc.model.params
    assert (p["a"], p["b"], p["c"], p["phase"]) == (0.1, 0.1, 0.07, 0.0) and sc.ld.iterates == 1000
    assert sc.section.fixed == {"x1": 0.0, "x2": 0.0}
    t0 = time.perf_counter()
    ld = sweep(sc.model, sc.section, sc.ld)
    wall = time.perf_counter() - t0
    y1, y2 = np.meshgrid(*sc.section.coordinates(), indexing="xy")
    near = _near_primary_lines(y1, y2, 0.01)
    f_d = _flagged_fraction(second_diff_field(ld), near)
    f_g = _flagged_fraction(gradient_norm_field(ld), near)
    ok = bool(f_d > f_g)
    acceptance(9, ok, f"top-5% pixels near primary resonances: dLD {f_d:.4f} vs gradLD {f_g:.4f} "
                      f"(need dLD > gradLD; base rate {near.mean():.4f}), {wall:.1f}s")
    assert ok


# 10 ------------------------------------------------------------------------

def test_c10_golden_digests(acceptance, tmp_path):
    regen = os.environ.get("LDC_REGEN_GOLDEN") == "1"
    stored = {} if regen else json.loads(GOLDEN.read_text())
    got = {}
    t0 = time.perf_counter()
    for name in builtin_names():
        sc = load_scenario(name, {"section.resolution": str(GOLDEN_N)})
        res = run_scenario(sc, out_dir=tmp_path / name)
        # the JSON manifest carries wall-clock time; the data files are what is pinned
        got[name] = {k: v for k, v in res.manifest["outputs"].items() if not k.endswith(".json")}
    wall = time.perf_counter() - t0
    if regen:
        GOLDEN.parent.mkdir(exist_ok=True)
        GOLDEN.write_text(json.dumps(got, indent=2, sort_keys=True) + "\n")
        stored = got
    bad = sorted(n for n in got if got[n] != stored.get(n))
    missing = sorted(set(stored) - set(got))
    ok = not bad and not missing
    acceptance(10, ok, f"{len(got) - len(bad)}/{len(got)} built-in scenarios match golden digests at N={GOLDEN_N}"
                       + (f"; mismatched: {', '.join(bad)}" if bad else "")
                       + (f"; missing: {', '.join(missing)}" if missing else "")
                       + f", {wall / 60:.1f} min")
    assert ok
