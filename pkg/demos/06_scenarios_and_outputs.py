"""
Scenarios, overrides and output files
=====================================

Everything the ``ldc`` command does is available from Python: load a
built-in (or an .ini file), override any key, run, and write CSV / PGM /
JSON next to each other. The shell equivalent is::

    ldc run chirikov-k-dld --resolution 120 --set mu=0.02 --out demos/out
"""
import json
from pathlib import Path

from ldc import writers
from ldc.scenario import builtin_names, load_scenario, run_scenario

print("built-in scenarios:", ", ".join(builtin_names()))

out = Path(__file__).parent / "out"
sc = load_scenario("chirikov-k-dld", {"section.resolution": "120", "mu": "0.02"})
res = run_scenario(sc, out_dir=out, overrides={"mu": "0.02"})
manifest = json.loads((out / "chirikov-k-dld.json").read_text())
print("effective model settings:", manifest["effective"]["model"])
print("value range:", manifest["value_range"])
print("files:", manifest["outputs"])

header, values = writers.read_csv(out / "chirikov-k-dld.csv")
print(header)
print("CSV shape", values.shape, "PGM shape", writers.read_pgm(out / "chirikov-k-dld.pgm").shape)
