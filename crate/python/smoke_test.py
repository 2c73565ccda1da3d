"""Smoke test for the pysrdi extension.

Uses an installed pysrdi if there is one; otherwise builds the extension with
cargo and imports it from a temporary directory.
"""

import importlib
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent

EXAMPLE = """{
  "root": 0,
  "edges": [
    {"child": 1, "parent": 0, "w": 2, "u": 6, "c": 1, "r": 1},
    {"child": 2, "parent": 1, "w": 3, "u": 4, "c": 2, "r": 2},
    {"child": 3, "parent": 0, "w": 1, "u": 10, "c": 1, "r": 1}
  ],
  "params": {"M": 4, "K": 4, "N": 2, "D": 14}
}"""


def load():
    try:
        return importlib.import_module("pysrdi")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "srd-interdiction-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libpysrdi.so"
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "pysrdi.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("pysrdi")


def main():
    m = load()
    t = m.Tree.from_json(EXAMPLE)
    assert t.edge_count == 3
    assert t.srd() == 6.0
    assert t.params["N"] == 2

    r = m.solve(t, "dit")
    assert r.status == "optimal", r
    assert r.objective == 14.0
    assert r.upgrades == [1, 3]
    assert r.to_dict()["weights"][0] == {"child": 1, "w_hat": 6}

    assert m.solve(t, "cit", lam=1.0).objective == 5.0
    assert m.solve(t, "mcdit").k_star == 4.0
    assert m.solve(t.with_params(m=6.0), "dit").status == "infeasible"
    assert m.brute_force(t, "dit")["best_value"] == 14.0

    g = m.Tree.generate(10, 1)
    assert m.Tree.from_json(g.to_json()).to_json() == g.to_json()
    for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
        got = m.solve(g, "cit", lam=lam).objective
        want = m.brute_force(g, "cit", lam=lam)["best_value"]
        assert abs(got - want) < 1e-9, (lam, got, want)

    try:
        m.Tree.from_json('{"root": 0, "edges": [], "params": {"M": 0, "K": 0, "N": 0}}')
    except ValueError:
        pass
    else:
        raise AssertionError("empty tree accepted")
    print("pysrdi smoke test passed")


if __name__ == "__main__":
    main()
