"""
Command-line walkthrough
========================

Runs the ``jsnet`` subcommands in sequence inside a temporary directory:
simulate, train, predict, eval and grid.
"""

import json
import tempfile
from pathlib import Path

from jsnet.cli import main

work = Path(tempfile.mkdtemp(prefix="jsnet-demo-"))
print("working in", work)

assert main(["simulate", "--out", str(work / "sim"), "--seed", "1", "--n-test", "2000"]) == 0
metrics = json.loads((work / "sim" / "metrics.json").read_text())
print("simulate:", {k: round(metrics[k]["accuracy"], 2) for k in ("jsnet", "llr")})

train, test = work / "sim" / "train.csv", work / "sim" / "test.csv"
assert main(["train", "--data", str(train), "--model", str(work / "net.json")]) == 0
assert main(["train", "--data", str(train), "--model", str(work / "llr.json"), "--baseline", "llr"]) == 0

for name in ("net", "llr"):
    out = work / f"{name}_eval.json"
    assert main(["eval", "--model", str(work / f"{name}.json"), "--test", str(test), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    print(f"eval {name}: accuracy {rep['accuracy']:.2f}%, confusion {rep['confusion']}")

assert main(["predict", "--model", str(work / "net.json"), "--data", str(test), "--out", str(work / "post.csv")]) == 0
print("predict: first rows\n" + "".join((work / "post.csv").read_text().splitlines(True)[:4]))

assert main(["grid", "--model", str(work / "net.json"), "--out", str(work / "map"), "--grid-step", "0.02"]) == 0
print("grid files:", sorted(p.name for p in work.glob("map*")))
