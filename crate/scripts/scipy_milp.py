#!/usr/bin/env python3
"""Solve a free-format MPS 0/1 program with SciPy's HiGHS MILP interface.

Usage: scipy_milp.py MODEL.mps SOLUTION.sol TIME_LIMIT_S

Writes `=status=`, `=obj=` and one `name value` line per nonzero variable.
"""

import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix


def read_mps(path):
    section = None
    obj_row = None
    rows = {}
    senses = []
    cols = {}
    obj = {}
    entries = []
    rhs = {}
    binary = set()
    with open(path) as fh:
        for raw in fh:
            if raw.startswith("*") or not raw.strip():
                continue
            f = raw.split()
            if not raw[0].isspace():
                section = f[0]
                if section == "ENDATA":
                    break
                continue
            if section == "ROWS":
                kind, name = f
                if kind == "N":
                    obj_row = name
                else:
                    rows[name] = len(senses)
                    senses.append(kind)
            elif section == "COLUMNS":
                col = cols.setdefault(f[0], len(cols))
                for row, val in zip(f[1::2], f[2::2]):
                    if row == obj_row:
                        obj[col] = float(val)
                    else:
                        entries.append((rows[row], col, float(val)))
            elif section == "RHS":
                for row, val in zip(f[1::2], f[2::2]):
                    rhs[rows[row]] = float(val)
            elif section == "BOUNDS":
                if f[0] != "BV":
                    raise SystemExit(f"unsupported bound type {f[0]}")
                binary.add(f[2])
    return senses, cols, obj, entries, rhs, binary


def main():
    if len(sys.argv) != 4:
        raise SystemExit(__doc__)
    mps, sol, limit = sys.argv[1], sys.argv[2], float(sys.argv[3])
    senses, cols, obj, entries, rhs, binary = read_mps(mps)
    n, m = len(cols), len(senses)
    missing = set(cols) - binary
    if missing:
        raise SystemExit(f"non-binary columns: {sorted(missing)[:5]}")

    if n == 0:
        with open(sol, "w") as out:
            out.write("=status= optimal\n=obj= 0\n")
        return

    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = v
    constraints = []
    if m:
        r, k, v = zip(*entries) if entries else ((), (), ())
        a = csr_matrix((v, (r, k)), shape=(m, n))
        b = np.array([rhs.get(i, 0.0) for i in range(m)])
        lo = np.where([s in ("G", "E") for s in senses], b, -np.inf)
        hi = np.where([s in ("L", "E") for s in senses], b, np.inf)
        constraints.append(LinearConstraint(a, lo, hi))

    res = milp(
        c,
        constraints=constraints,
        integrality=np.ones(n),
        bounds=Bounds(np.zeros(n), np.ones(n)),
        options={"time_limit": limit, "mip_rel_gap": 0.0, "disp": False},
    )
    names = sorted(cols, key=cols.get)
    with open(sol, "w") as out:
        if res.status == 0:
            out.write("=status= optimal\n")
        elif res.status == 2:
            out.write("=status= infeasible\n")
            return
        elif res.status == 1 and res.x is not None:
            out.write("=status= time_limit\n")
        else:
            raise SystemExit(f"solver failed: {res.message}")
        out.write(f"=obj= {float(res.fun)!r}\n")
        for name, value in zip(names, res.x):
            if abs(value) > 1e-9:
                out.write(f"{name} {float(value)!r}\n")


if __name__ == "__main__":
    main()
