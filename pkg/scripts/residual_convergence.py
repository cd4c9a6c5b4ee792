"""Residual convergence study: the finite-difference residual of the
solver output decays like h^2 in the sample spacing.

Usage: python scripts/residual_convergence.py
"""

import math

from quatode import Problem, residual_max, solve_ivp


def main():
    counts = (51, 101, 201, 401, 801)
    print(f"{'samples':>8} {'h':>10} {'residual':>12} {'order':>7}")
    prev = None
    for samples in counts:
        p = Problem(n=2, A=[["j", "0"], ["0", "k"]], mode="ivp",
                    f=["(t^2+1)*i", "t*j"], x0=["j", "k"],
                    t0=0.0, t_end=1.0, samples=samples, quad_tol=1e-12)
        sol = solve_ivp(p)
        r = residual_max(sol, p.A, p.f)
        h = 1.0 / (samples - 1)
        order = "" if prev is None else f"{math.log2(prev / r):7.3f}"
        print(f"{samples:>8} {h:>10.4g} {r:>12.4e} {order:>7}")
        prev = r


if __name__ == "__main__":
    main()
