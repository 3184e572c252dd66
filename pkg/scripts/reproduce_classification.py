"""Classify every catalog submersion and summarise verdicts by BCV model.

    python3 scripts/reproduce_classification.py [--points N] [--seed S] [--csv PATH]
"""

import argparse
import collections
import csv
import time

from biharm import biharmonic as bh
from biharm import catalog


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write one row per entry")
    args = ap.parse_args()

    plan = bh.SamplePlan(args.points, args.seed)
    rows = []
    by_model = collections.defaultdict(collections.Counter)
    t0 = time.perf_counter()
    for e in catalog.all_entries():
        rep = bh.classify_map(e.spec, plan)
        a = rep.aggregate()
        rows.append((e.name, e.params, str(e.model), rep.verdict, e.expected_verdict, a["max_residual"], a["max_tension"]))
        by_model[str(e.model)][rep.verdict] += 1
        flag = "" if rep.verdict == e.expected_verdict else "   <-- unexpected"
        print(f"{e.name:8s} {str(e.params):28s} {str(e.model):10s} {rep.verdict:28s} "
              f"|r|={a['max_residual']:.1e} |tau|={a['max_tension']:.3f}{flag}")
    print(f"\n{len(rows)} entries in {time.perf_counter() - t0:.1f}s\n")
    for model, counts in sorted(by_model.items()):
        print(f"{model:10s} " + ", ".join(f"{v}: {n}" for v, n in sorted(counts.items())))

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("entry", "params", "model", "verdict", "expected", "max_residual", "max_tension"))
            w.writerows(rows)


if __name__ == "__main__":
    main()
