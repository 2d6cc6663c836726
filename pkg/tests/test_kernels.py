import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poisonbench import _core
from poisonbench.learners import TreeConfig
from poisonbench.learners.tree import grow_tree

needs_compiled = pytest.mark.skipif("compiled" not in _core.backends(), reason="compiled kernels not built")


@needs_compiled
@settings(max_examples=150, deadline=None)
@given(st.integers(2, 80), st.integers(0, 2**32 - 1), st.booleans())
def test_backends_agree_bit_for_bit(n, seed, weighted):
    rng = np.random.default_rng(seed)
    X = np.round(rng.normal(size=(n, 25)), int(rng.integers(0, 3)))
    y = rng.integers(0, 4, n)
    w = rng.random(n) if weighted else np.ones(n)
    rows = np.sort(rng.integers(0, n, size=int(rng.integers(2, n + 1))))
    feats = rng.choice(25, size=int(rng.integers(1, 26)), replace=False)
    b = _core.backends()
    assert b["python"].best_split(X, y, w, rows, feats, 4) == b["compiled"].best_split(X, y, w, rows, feats, 4)


@needs_compiled
def test_backends_grow_identical_trees(monkeypatch):
    rng = np.random.default_rng(3)
    X = rng.normal(size=(300, 25))
    y = rng.integers(0, 4, 300)
    w = rng.random(300)
    rows = np.sort(rng.integers(0, 300, 300))
    trees = {}
    for name, mod in _core.backends().items():
        monkeypatch.setattr(_core, "_impl", mod)
        t = grow_tree(X, y, w, rows, TreeConfig(feature_subsample="sqrt"), np.random.default_rng(0))
        trees[name] = (t.to_dict(), mod.apply_tree(X, t.feature, t.threshold, t.left, t.right).tolist())
    assert trees["python"] == trees["compiled"]


def test_apply_tree_routes_ties_left():
    feature = np.array([0, -1, -1])
    threshold = np.array([1.0, 0.0, 0.0])
    left, right = np.array([1, -1, -1]), np.array([2, -1, -1])
    X = np.zeros((3, 25))
    X[:, 0] = [0.5, 1.0, 1.5]
    for mod in _core.backends().values():
        assert mod.apply_tree(X, feature, threshold, left, right).tolist() == [1, 1, 2]


def test_env_var_forces_python_backend():
    env = dict(os.environ, POISONBENCH_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import poisonbench; print(poisonbench.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
