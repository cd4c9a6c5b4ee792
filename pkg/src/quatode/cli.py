"""Command line front end: JSON problem files in, CSV or JSON results out.

Exit codes: 0 success, 2 input error (schema, parse, file), 3 numerical
failure (singularity, quadrature or eigenpair extraction failure).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import verify
from .qexpr import (EvalError, ExprMatrix, ParseError, depends_on_t,
                    eval_matrix, evaluate, parse, parse_vector)
from .qlinalg import (EigenpairError, ShapeError, SingularMatrixError,
                      ddet, det_p, inverse, right_eigenpairs)
from .qode import (Problem, QuadratureError, SolutionTable, _is_constant,
                   fundamental_table, solve_ivp, solve_periodic)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_TABLE_MODES = ("ivp", "periodic", "fundamental")
_MATRIX_MODES = ("detp", "ddet", "inverse", "eig")
_KNOWN_KEYS = {"n", "mode", "A", "f", "x0", "t0", "t_end", "T",
               "samples", "quad_tol", "ode_steps"}


class ProblemFileError(ValueError):
    pass


def _require(cond: bool, message: str):
    if not cond:
        raise ProblemFileError(message)


def _number(raw: dict, key: str, default=None):
    if key not in raw:
        return default
    v = raw[key]
    _require(isinstance(v, (int, float)) and not isinstance(v, bool),
             f"'{key}' must be a number")
    return float(v)


def _integer(raw: dict, key: str, default=None):
    if key not in raw:
        return default
    v = raw[key]
    _require(isinstance(v, int) and not isinstance(v, bool),
             f"'{key}' must be an integer")
    return v


def load_problem(path: str) -> dict:
    """Read and validate a problem file; returns the normalized config."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ProblemFileError(f"invalid JSON: {e}") from e
    _require(isinstance(raw, dict), "problem file must hold a JSON object")
    unknown = set(raw) - _KNOWN_KEYS
    _require(not unknown, f"unknown keys in problem file: {sorted(unknown)}")

    n = _integer(raw, "n")
    _require(n is not None and n >= 1, "'n' must be a positive integer")
    mode = raw.get("mode")
    _require(mode in _TABLE_MODES + _MATRIX_MODES,
             f"'mode' must be one of {', '.join(_TABLE_MODES + _MATRIX_MODES)}")

    A = raw.get("A")
    _require(isinstance(A, list) and len(A) == n
             and all(isinstance(r, list) and len(r) == n
                     and all(isinstance(e, str) for e in r) for r in A),
             f"'A' must be an {n}x{n} array of expression strings")
    A = ExprMatrix.parse(A)

    f = raw.get("f")
    if f is not None:
        _require(isinstance(f, list) and len(f) == n
                 and all(isinstance(e, str) for e in f),
                 f"'f' must be an array of {n} expression strings")
        f = parse_vector(f)

    t0 = _number(raw, "t0", 0.0)
    T = _number(raw, "T")
    t_end = _number(raw, "t_end")
    samples = _integer(raw, "samples", 101)
    _require(samples >= 2, "'samples' must be at least 2")
    quad_tol = _number(raw, "quad_tol", 1e-10)
    _require(quad_tol > 0.0, "'quad_tol' must be positive")
    ode_steps = _integer(raw, "ode_steps", 4096)
    _require(ode_steps >= 1, "'ode_steps' must be positive")

    x0 = raw.get("x0")
    if mode == "ivp":
        _require(isinstance(x0, list) and len(x0) == n
                 and all(isinstance(e, str) for e in x0),
                 f"mode 'ivp' requires 'x0' as an array of {n} "
                 f"quaternion literal strings")
        literals = parse_vector(x0)
        for m, e in enumerate(literals):
            _require(not depends_on_t(e),
                     f"x0 entry ({m}) must not depend on t")
        x0 = [evaluate(e, 0.0) for e in literals]
    else:
        _require(x0 is None, f"'x0' is only valid in mode 'ivp'")

    if mode == "periodic":
        _require(T is not None and T > 0.0,
                 "mode 'periodic' requires a positive 'T'")
        if t_end is None:
            t_end = T
    elif mode in ("ivp", "fundamental"):
        _require(T is None, "'T' is only valid in mode 'periodic'")
        _require(t_end is not None, f"mode '{mode}' requires 't_end'")
    if mode in _TABLE_MODES:
        _require(t0 < t_end, "'t0' must be smaller than 't_end'")

    return {"n": n, "mode": mode, "A": A, "f": f, "x0": x0, "t0": t0,
            "t_end": t_end, "T": T, "samples": samples,
            "quad_tol": quad_tol, "ode_steps": ode_steps}


# -- output formatting --------------------------------------------------------


def _g17(v: float) -> str:
    return f"{v:.17g}"


def _quat_components(q) -> dict:
    return {"w": q.w, "x": q.x, "y": q.y, "z": q.z, "text": str(q)}


def _table_csv(sol: SolutionTable, n: int, layout: str) -> str:
    if layout == "matrix":
        names = [f"phi{r + 1}{c + 1}" for r in range(n) for c in range(n)]
    else:
        names = [f"x{m + 1}" for m in range(n)]
    header = ["t"]
    for name in names:
        header += [f"{name}.w", f"{name}.i", f"{name}.j", f"{name}.k"]
    if sol.residuals is not None:
        header.append("residual")
    lines = [",".join(header)]
    for s in range(len(sol)):
        row = [_g17(sol.times[s])]
        row += [_g17(v) for v in sol.values[s].ravel()]
        if sol.residuals is not None:
            row.append(_g17(sol.residuals[s]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _table_json(sol: SolutionTable, mode: str) -> str:
    doc = {"mode": mode}
    doc.update(sol.to_json_dict())
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _dispatch_table(cfg: dict, args) -> tuple[SolutionTable, str]:
    mode = cfg["mode"]
    pmode = "homogeneous" if mode == "fundamental" else mode
    p = Problem(n=cfg["n"], A=cfg["A"], mode=pmode, f=cfg["f"],
                x0=cfg["x0"], t0=cfg["t0"], t_end=cfg["t_end"],
                period=cfg["T"], quad_tol=cfg["quad_tol"],
                ode_steps=cfg["ode_steps"], samples=cfg["samples"])
    if mode == "ivp":
        sol = solve_ivp(p)
    elif mode == "periodic":
        sol = solve_periodic(p)
    else:
        sol = fundamental_table(p)
    if args.verify:
        verify.residual_max(sol, cfg["A"], cfg["f"])
    layout = sol.metadata.get("layout", "vector")
    if args.format == "json":
        return sol, _table_json(sol, mode)
    return sol, _table_csv(sol, cfg["n"], layout)


def _dispatch_matrix(cfg: dict, args) -> str:
    mode = cfg["mode"]
    A0 = eval_matrix(cfg["A"], cfg["t0"])
    if mode == "detp":
        value = det_p(A0)
        if args.format == "json":
            return json.dumps({"mode": mode, "value": _quat_components(value)},
                              sort_keys=True, indent=2) + "\n"
        return str(value) + "\n"
    if mode == "ddet":
        value = ddet(A0)
        if args.format == "json":
            return json.dumps({"mode": mode, "value": value},
                              sort_keys=True, indent=2) + "\n"
        return _g17(value) + "\n"
    if mode == "inverse":
        B = inverse(A0)
        if args.format == "json":
            entries = [[_quat_components(B[r, c]) for c in range(B.cols)]
                       for r in range(B.rows)]
            return json.dumps({"mode": mode, "entries": entries},
                              sort_keys=True, indent=2) + "\n"
        lines = [",".join(str(B[r, c]) for c in range(B.cols))
                 for r in range(B.rows)]
        return "\n".join(lines) + "\n"
    # eig
    if not _is_constant(cfg["A"], cfg["t0"], cfg["t0"] + 1.0):
        raise ProblemFileError("mode 'eig' requires a constant matrix A")
    pairs = right_eigenpairs(A0)
    if args.format == "json":
        doc = {"mode": mode,
               "pairs": [{"lambda": _quat_components(lam),
                          "vector": [_quat_components(v[m, 0])
                                     for m in range(v.rows)]}
                         for lam, v in pairs]}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    lines = [",".join([str(lam)] + [str(v[m, 0]) for m in range(v.rows)])
             for lam, v in pairs]
    return "\n".join(lines) + "\n"


def _write(text: str, dest: str):
    if dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)


def _build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quatode",
        description="Solve linear quaternion-valued differential equations "
                    "dx/dt = A(t)x + f(t) described by a JSON problem file.")
    ap.add_argument("--input", required=True, help="problem file (JSON)")
    ap.add_argument("--output", default="-",
                    help="output path, or '-' for stdout (default)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--tol", type=float, default=None,
                    help="override quad_tol from the problem file")
    ap.add_argument("--samples", type=int, default=None,
                    help="override the sample count")
    ap.add_argument("--verify", action="store_true",
                    help="add finite-difference residual diagnostics")
    return ap


def run(argv=None) -> int:
    args = _build_argparser().parse_args(argv)
    try:
        cfg = load_problem(args.input)
        if args.tol is not None:
            _require(args.tol > 0.0, "--tol must be positive")
            cfg["quad_tol"] = args.tol
        if args.samples is not None:
            _require(args.samples >= 2, "--samples must be at least 2")
            cfg["samples"] = args.samples
    except (ProblemFileError, ParseError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    try:
        if cfg["mode"] in _MATRIX_MODES:
            text = _dispatch_matrix(cfg, args)
        else:
            _, text = _dispatch_table(cfg, args)
    except ProblemFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularMatrixError, QuadratureError, EigenpairError, EvalError,
            ZeroDivisionError, ShapeError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    try:
        _write(text, args.output)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
