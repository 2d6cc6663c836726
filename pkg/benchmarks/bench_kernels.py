"""Compiled vs numpy kernel timings.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the split search on a single node, batch tree traversal, and complete
forest / AdaBoost fits on the default synthetic training partition, then
checks that both backends produced identical models.
"""
import argparse
import time

import numpy as np

from poisonbench import _core
from poisonbench.config import build_config
from poisonbench.harness import prepare
from poisonbench.learners import TreeConfig, fit_adaboost, fit_forest


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--trees", type=int, default=20)
    parser.add_argument("--rounds", type=int, default=20)
    args = parser.parse_args()

    names = sorted(_core.backends())
    if len(names) < 2:
        print("compiled kernels are not built; only the numpy fallback is available")
    split = prepare(build_config())
    train, test = split.train, split.test
    X = np.ascontiguousarray(train.features)
    y = np.ascontiguousarray(train.labels)
    w = np.ones(len(y))
    rows = np.arange(len(y))

    cases = {
        "best_split root, 25 features": lambda k: k.best_split(X, y, w, rows, range(25), 4),
        "best_split 200-row node, 5 features": lambda k: k.best_split(X, y, w, rows[:200], range(5), 4),
    }
    forest_ref = fit_forest(train, 5, seed=0)
    tree = forest_ref.trees[0]
    Xt = np.ascontiguousarray(np.tile(test.features, (25, 1)))
    cases[f"apply_tree {Xt.shape[0]} rows"] = lambda k: k.apply_tree(Xt, tree.feature, tree.threshold, tree.left, tree.right)

    results = {}
    print(f"{'case':45s}" + "".join(f"{n:>12s}" for n in names) + "     speedup")
    for label, fn in cases.items():
        row = {}
        for n in names:
            row[n], _ = best_of(lambda: fn(_core.backends()[n]), args.repeat)
        results[label] = row
    models = {}
    for label, fit in (
        (f"fit_forest {args.trees} trees", lambda: fit_forest(train, args.trees, seed=0)),
        (f"fit_adaboost {args.rounds} rounds", lambda: fit_adaboost(train, args.rounds, TreeConfig(max_depth=3), seed=0)),
    ):
        row = {}
        for n in names:
            with _core.using(n):
                row[n], model = best_of(fit, 1)
            models.setdefault(label, {})[n] = model.to_dict()
        results[label] = row

    for label, row in results.items():
        line = f"{label:45s}" + "".join(f"{row[n] * 1e3:10.2f}ms" for n in names)
        if "compiled" in row:
            line += f"  {row['python'] / row['compiled']:8.1f}x"
        print(line)
    for label, per in models.items():
        same = len({repr(v) for v in per.values()}) == 1
        print(f"{label}: backends {'agree' if same else 'DISAGREE'}")


if __name__ == "__main__":
    main()
