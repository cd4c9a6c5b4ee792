"""Solve the two shipped IVP problem files and print diagnostics.

Usage: python scripts/solve_demo.py
"""

import json
from pathlib import Path

from quatode import Problem, Quaternion, compare, residual_max, solve_ivp

ROOT = Path(__file__).resolve().parent.parent

# Known closed-form solutions of the shipped problems, used as references.
REFERENCES = {
    "ivp_diag_jk.json": [
        "2*t*i + exp(j*t)*j - (t^2 + exp(j*t) - 1)*k",
        "-t*i + (1 - exp(k*t))*j + exp(k*t)*k",
    ],
    "ivp_triangular.json": [
        "(i+1)*exp(i*t) - 1",
        "(1 + exp((1+i)*t) - 2*exp(i*t))/2 + (exp((1+i)*t) - 1 - 2*exp(i*t))/2*i"
        " + (exp((1+i)*t) - t - 1)/2*j - t/2*k",
    ],
}


def main():
    for name, reference in REFERENCES.items():
        doc = json.loads((ROOT / "problems" / name).read_text())
        p = Problem(n=doc["n"], A=doc["A"], mode="ivp", f=doc.get("f"),
                    x0=doc["x0"], t0=doc["t0"], t_end=doc["t_end"],
                    samples=doc.get("samples", 101),
                    quad_tol=doc.get("quad_tol", 1e-10))
        sol = solve_ivp(p)
        print(f"== {name} (strategy: {sol.metadata['strategy']}) ==")
        for s in (0, len(sol) // 2, len(sol) - 1):
            comps = ", ".join(str(Quaternion(*sol.values[s][m]))
                              for m in range(p.n))
            print(f"  t = {sol.times[s]:4.2f}:  x = ({comps})")
        print(f"  sup distance to closed form: {compare(sol, reference):.3e}")
        print(f"  max finite-difference residual: "
              f"{residual_max(sol, p.A, p.f):.3e}")
        print()


if __name__ == "__main__":
    main()
