"""Smoke test for the volcano_py extension module.

Build first with `cargo build --release -p volcano-py --features extension-module`
(or `maturin develop -m crates/py/pyproject.toml`), then run this script.
Set VOLCANO_PY_LIB to point at a specific shared library.
"""

import importlib.util
import os
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import volcano_py

        return volcano_py
    except ImportError:
        pass
    candidates = [os.environ.get("VOLCANO_PY_LIB")] + [
        str(ROOT / "target" / profile / "libvolcano_py.so") for profile in ("release", "debug")
    ]
    for lib in filter(None, candidates):
        if os.path.exists(lib):
            tmp = pathlib.Path(tempfile.mkdtemp()) / "volcano_py.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("volcano_py", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("volcano_py not found; build crates/py first")


def main():
    v = load()

    k = v.Field(11)
    assert (k.characteristic, k.degree, k.order) == (11, 1, 11)

    e = v.Curve.parse("11;1,9")
    print(e, "order", e.order, "trace", e.trace, "group", e.group_structure())
    assert e.order == 11 + 1 - e.trace
    n1, n2 = e.group_structure()
    assert n1 * n2 == e.order and n2 % n1 == 0

    for iso in e.isogenies(2):
        assert iso.degree == 2 and iso.codomain.trace == e.trace

    doc = v.volcano(11, e.trace, 2)
    print("volcano components", len(doc["components"]), "passed", doc["passed"])
    assert doc["passed"]

    report = v.sha(e, e)
    print("Sha(E/k(E)) order", report["order"])
    assert report["tag"] == "isogenous" and report["passed"]

    sel = v.selmer(e, 0, 2, e)
    a, b, c = sel["triple"]["sigma"]
    print("selmer triple", (a, b, c), sel["triple"]["case"])
    assert a + c == b

    try:
        v.Curve.parse("7;1,0").group_structure()
        v.sha(v.Curve.parse("7;1,0"), v.Curve.parse("7;1,0"))
        raise AssertionError("supersingular pair accepted")
    except ValueError as err:
        print("rejected:", err)

    cc = v.run_crosscheck(13, [2], 13)
    print("crosscheck p <= 13 suites:", {s["name"]: s["failed"] for s in cc["suites"]})
    assert all(s["failed"] == 0 for s in cc["suites"] if s["name"] != "sigma_b")
    print("ok")


if __name__ == "__main__":
    main()
