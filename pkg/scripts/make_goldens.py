"""Regenerate tests/goldens/oracle.json.

Runs the sampling oracle at recorded (samples, seed) configurations and
freezes the values.  The slow quartic entry anchors the near-boundary
lower-bound threshold; the small entries are determinism regression anchors
that the test suite recomputes exactly.
"""

import json
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from projsqueeze.bodyspec import builtin_body, resolve_body
from projsqueeze.squeezing import oracle_squeeze_2d

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "goldens",
                   "oracle.json")

CASES = [
    {"key": "square_center", "body": "square", "point": [0.0, 0.0],
     "samples": 20000, "seed": 0},
    {"key": "triangle_center", "body": "triangle", "point": [0.0, 0.0],
     "samples": 20000, "seed": 0},
    {"key": "ball2_off_center", "body": "ball2", "point": [0.3, 0.2],
     "samples": 20000, "seed": 0},
    {"key": "quartic_near_boundary", "body": "quartic",
     "point": [1.0 - 1e-4, 0.0], "samples": 100000, "seed": 0},
]


def main():
    entries = {}
    for case in CASES:
        body = builtin_body(case["body"])
        t0 = time.perf_counter()
        value = oracle_squeeze_2d(body, np.array(case["point"]),
                                  samples=case["samples"], seed=case["seed"])
        dt = time.perf_counter() - t0
        print(f"{case['key']}: {value!r}  ({dt:.1f}s)")
        entry = dict(case)
        key = entry.pop("key")
        entry["spec_hash"] = resolve_body(case["body"]).hash
        entry["value"] = value
        entries[key] = entry
    with open(OUT, "w") as fh:
        json.dump(entries, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("wrote", OUT)


if __name__ == "__main__":
    main()
