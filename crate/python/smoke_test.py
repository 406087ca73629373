"""Smoke test for the mbkdv_py extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/mbkdv_py-*.whl
"""

import json
import math
import sys

import mbkdv_py as m


def check(name, cond, detail=""):
    print(f"{'ok  ' if cond else 'FAIL'} {name} {detail}")
    return cond


def main():
    results = []

    half = m.Alpha("1/2")
    roots = half.roots()
    results.append(check("roots", abs(roots.c1 - (0.5 + math.sqrt(21) / 6)) < 1e-15, roots.c1_exact))
    results.append(check("cutoff", abs(roots.cutoff - 1.3093073414159544) < 1e-12, f"{roots.cutoff:.12f}"))

    rational = m.Alpha("12/7")
    rec = rational.gap(12)
    results.append(check("exact resonance", rec.gap == 0.0 and rec.nearest_c1n + rec.nearest_c2n == 12, repr(rec)))

    cf = m.continued_fraction(half, 7)
    results.append(check("continued fraction", cf == ["1", "3", "1", "3", "1", "3", "1"], str(cf)))
    est = m.type_index(half, 10_000)
    results.append(check("type index", est["nu_hat"] == 0.0 and est["classification"] == "QuadraticSurd"))

    grid = m.TorusGrid(64)
    xs = grid.points()
    state = m.FieldPair.from_physical(grid, [0.1 * math.cos(x) for x in xs], [0.1 * math.cos(2 * x) for x in xs])
    final, summary = m.simulate(grid, state, 0.5, 1e-3, 0.1)
    results.append(check("simulate", summary["steps"] == 100 and abs(final.time - 0.1) < 1e-12))
    results.append(check("conservation", summary["drift"]["e3"] < 1e-8, f"drift_e3={summary['drift']['e3']:.2e}"))

    closed = m.picard_closed_form(rational, 12, mode="rational")
    results.append(check("picard", abs(closed["phi2_norm"] - 0.21269446210866) < 1e-12, f"{closed['phi2_norm']:.14f}"))

    ratio = m.spike_ratio(half, "mean_break", 8, 0.0, 0.5)
    results.append(check("spike ratio", ratio > 0.0, f"{ratio:.6f}"))
    omega = m.omega_count(half, 16.0, 64.0)
    results.append(check("omega count", 0.0 <= omega["measure"] <= omega["bound"], f"{omega['measure']:.4f}"))

    report = m.run_config(json.dumps({"command": "roots", "params": {"alpha": "1/2"}}))
    results.append(check("run_config", report["summary"]["c1"]["exact"] == roots.c1_exact))

    try:
        m.Alpha("not a number")
        results.append(check("bad alpha rejected", False))
    except ValueError:
        results.append(check("bad alpha rejected", True))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
