"""Toy ablation sweep: baseline plus one retrain per removed feature group."""

import argparse
import json

from pnel.evaluation import ablation_sweep, ablation_table
from pnel.pipeline import Pipeline, Settings, toy_dataset, toy_resources


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epochs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    pipe = Pipeline(toy_resources(), toy_dataset("train"), toy_dataset("test"),
                    Settings(epochs=args.epochs, seed=args.seed))
    rows = ablation_sweep(pipe.run)
    if args.json:
        print(json.dumps([{"removed": list(r.removed), "f1": r.f1} for r in rows], indent=2))
        return
    print(ablation_table(rows))
    base = rows[0].f1
    worst = min(rows[1:], key=lambda r: r.f1)
    print(f"\nbaseline F1 {base:.3f}; largest drop from removing {worst.removed[0]} "
          f"({base - worst.f1:+.3f})")


if __name__ == "__main__":
    main()
