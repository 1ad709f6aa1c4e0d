#!/usr/bin/env python3
"""Drive the whole CLI pipeline on the toy flow model.

Writes probes, fits the model and anchors, simulates trajectories toward
two attractor colors, fits timestep statistics, observes a mid-flight
latent, steers it toward a new target, and scores the result. Everything
lands under --workdir and reruns are byte-identical.
"""

import argparse
import subprocess
import sys
from pathlib import Path

from latentcolor.cli import main as cli

RED = "#D81511"
BLUE = "#1190D8"
TARGET = "#11D85C"


def run(argv: list[str]) -> None:
    print(f"$ latentcolor {' '.join(argv)}")
    code = cli(argv)
    if code != 0:
        sys.exit(code)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", default="toy-demo")
    ap.add_argument("--T", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--toy-seed", type=int, default=0)
    args = ap.parse_args()

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    probes = work / "probes"

    subprocess.run(
        [
            sys.executable,
            str(Path(__file__).with_name("make_toy_probes.py")),
            "--out", str(probes),
            "--toy-seed", str(args.toy_seed),
        ],
        check=True,
    )

    model = work / "model.json"
    anchors = work / "anchors.json"
    stats = work / "stats.json"
    run(["fit", str(probes), "--model-out", str(model), "--anchors-out", str(anchors)])

    manifests = []
    for i, color in enumerate((RED, BLUE)):
        out = work / f"run-{i}"
        run(
            [
                "simulate",
                "--out", str(out),
                "--colors", color,
                "--T", str(args.T),
                "--seed", str(args.seed + i),
                "--toy-seed", str(args.toy_seed),
            ]
        )
        manifests.append(str(out / "manifest.json"))

    run(["stats", *manifests, "--model", str(model), "--out", str(stats)])

    mid = args.T // 2
    latent = work / "run-0" / f"t{mid:03d}.lt"
    common = ["--model", str(model), "--anchors", str(anchors), "--stats", str(stats)]

    run(
        [
            "observe", str(latent), "--t", str(mid), *common,
            "--out-json", str(work / "mid.json"),
            "--out-ppm", str(work / "mid.ppm"), "--cell-px", "16",
        ]
    )
    run(
        [
            "intervene", str(latent), "--t", str(mid), "--target", TARGET, *common,
            "--out", str(work / "steered.lt"),
        ]
    )
    run(
        [
            "observe", str(work / "steered.lt"), "--t", str(mid), *common,
            "--out-json", str(work / "steered.json"),
            "--out-ppm", str(work / "steered.ppm"), "--cell-px", "16",
        ]
    )

    ref = work / "final.json"
    run(
        [
            "observe", str(work / "run-0" / f"t{args.T:03d}.lt"), "--t", str(args.T), *common,
            "--out-json", str(ref),
        ]
    )
    run(["eval", str(work / "mid.json"), str(ref), "--out", str(work / "metrics-mid.json")])
    print(f"\nartifacts in {work}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
