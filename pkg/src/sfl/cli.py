"""Command-line front end: ``sfl <command> <system> [options]``.

A system argument is either ``catalog:<id>`` or a path to a system JSON file.
Reports go to stdout (or --out) as JSON with sorted keys; identical inputs
give byte-identical output.  Exit status is 0 when every verification the
command performs passes, 1 when one fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import catalog, cuntz, hadamard, ratlat, spectrum, system, transform
from .errors import BudgetExceeded, ParseError, SflError, Unclassified

SCHEMA = "sfl/1"

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# ---------------------------------------------------------------------------
# output


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, ratlat.RatMatrix):
        return x.to_strings()
    if isinstance(x, ratlat.Lattice):
        return x.canonical.to_strings()
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def dumps_report(command: str, body: dict) -> str:
    doc = {"schema": SCHEMA, "command": command}
    doc.update(body)
    return json.dumps(_clean(doc), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _emit(args, payload):
    if args.out:
        mode = "wb" if isinstance(payload, bytes) else "w"
        with open(args.out, mode) as fh:
            fh.write(payload)
    elif isinstance(payload, bytes):
        sys.stdout.buffer.write(payload)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# argument parsing helpers


def load_system(spec: str) -> system.AffineSystem:
    if spec.startswith("catalog:"):
        return catalog.system(spec.split(":", 1)[1])
    path = Path(spec)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{spec}: {exc.strerror}") from exc
    try:
        return system.loads_system(text)
    except ParseError as exc:
        raise ParseError(f"{spec}: {exc}") from exc


def parse_axis(text: str) -> list:
    """'lo:hi:step' -> exact rationals lo, lo+step, ..., <= hi; a single value is a point."""
    parts = text.split(":")
    if len(parts) == 1:
        return [ratlat.rat(parts[0])]
    if len(parts) != 3:
        raise ParseError(f"axis {text!r}: expected lo:hi:step")
    lo, hi, step = (ratlat.rat(p) for p in parts)
    if step <= 0:
        raise ParseError(f"axis {text!r}: step must be positive")
    count = int(math.floor((hi - lo) / step)) + 1
    return [lo + i * step for i in range(max(count, 0))]


def parse_grid(text: str, n: int) -> list:
    """Comma-separated axes, one per coordinate (a lone axis is used for every coordinate)."""
    axes = [parse_axis(a) for a in text.split(",")]
    if len(axes) == 1:
        axes = axes * n
    if len(axes) != n:
        raise ParseError(f"grid {text!r}: {len(axes)} axes for dimension {n}")
    total = math.prod(len(a) for a in axes)
    if total > transform.max_points():
        raise BudgetExceeded(f"grid has {total} points, budget {transform.max_points()}", 0)
    return [tuple(p) for p in itertools.product(*axes)]


def parse_point(tokens, n: int) -> tuple:
    if len(tokens) != n:
        raise ParseError(f"point needs {n} coordinates, got {len(tokens)}")
    return tuple(ratlat.rat(t) for t in tokens)


def parse_size(text: str) -> tuple:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise ParseError(f"raster size {text!r}: expected WxH") from exc


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return v

    return conv


def _evaluator(s, args):
    return transform.MuHatEvaluator.for_system(s, eps_stop=args.eps_stop, max_depth=args.max_depth)


# ---------------------------------------------------------------------------
# commands; each returns (ok, payload)


def cmd_check(args):
    s = load_system(args.system)
    rep = system.check_report(s)
    ok = rep["hadamard"] and rep["expansive"] and rep["selfadjoint"] is not False
    return ok, dumps_report("check", {"system": s.to_json(), "report": rep})


def cmd_dual(args):
    s = load_system(args.system)
    d = system.dual_system(s)
    if args.format == "json":
        return True, d.dumps()
    raise ParseError("dual supports only --format json")


def cmd_lattices(args):
    s = load_system(args.system)
    res = system.selfadjoint_lattices(s.R, s.B, s.L, index_bound=args.index_bound)
    note = res.note
    if not res.lattices:
        note = ("no selfadjoint lattice; " + note) if note else "no selfadjoint lattice"
    body = {
        "lattices": [k.canonical for k in res.lattices],
        "count": len(res.lattices),
        "complete": res.complete,
        "K_min": res.K_min,
        "K_max": res.K_max,
        "note": note,
    }
    return True, dumps_report("lattices", body)


def cmd_classify(args):
    s = load_system(args.system)
    p = hadamard.phase_table(s.B, s.L)
    body = {"phase_table": p.to_json(), "hadamard": hadamard.is_generalized_hadamard(p)}
    try:
        body["class"] = hadamard.classify_small(p).to_json()
        ok = True
    except Unclassified as exc:
        body["class"], body["reason"] = None, str(exc)
        ok = False
    return ok, dumps_report("classify", body)


def cmd_muhat(args):
    s = load_system(args.system)
    ev = _evaluator(s, args)
    if args.at:
        pts = [parse_point(args.at, s.n)]
    elif args.grid:
        pts = parse_grid(args.grid, s.n)
    else:
        raise ParseError("muhat needs --at or --grid")
    if len(pts) == 1:
        rows = [ev(pts[0]).to_json(pts[0])]
    else:
        vals, bnds, deps = ev.batch(np.array([[float(x) for x in p] for p in pts]))
        rows = [transform.MuHat(complex(v), float(b), int(d)).to_json(p) for p, v, b, d in zip(pts, vals, bnds, deps)]
        for i, v in enumerate(vals):
            if abs(v) < args.zero_tol:
                rows[i] = ev(pts[i]).to_json(pts[i])  # exact-zero detection
    small = [i for i, r in enumerate(rows) if math.hypot(r["re"], r["im"]) < args.zero_tol]
    if small:
        levels = transform.explain_zero_batch(s.R, s.B, [[float(x) for x in pts[i]] for i in small], args.zero_tol)
        for i, j in zip(small, levels):
            rows[i]["zero_mask_level"] = None if j < 0 else int(j)
    if args.format == "csv":
        head = ",".join([f"t{i + 1}" for i in range(s.n)] + ["re", "im", "bound"])
        lines = [head] + [",".join(r["t"] + [repr(r["re"]), repr(r["im"]), repr(r["bound"])]) for r in rows]
        return True, "\n".join(lines) + "\n"
    return True, dumps_report("muhat", {"values": rows, "eps_stop": args.eps_stop})


def cmd_spectrum(args):
    s = load_system(args.system)
    if args.call:
        S = spectrum.cal_l(s.L, s.R, args.degree)
    else:
        s.require_lattice()
        S = spectrum.lambda_set(s.L, s.R, s.K_dual, ratlat.rat(args.bound))
    if args.format == "csv":
        lines = [",".join(f"t{i + 1}" for i in range(s.n))] + [",".join(str(x) for x in p) for p in S.points]
        return True, "\n".join(lines) + "\n"
    body = S.to_json()
    body["count"] = len(S)
    return True, dumps_report("spectrum", body)


def cmd_ortho(args):
    s = load_system(args.system)
    s.require_lattice()
    ev = _evaluator(s, args)
    lam = spectrum.check_lambda_orthogonality(s, args.radius, ev)
    body = {"lambda": lam.to_json(), "tol": args.tol}
    ok = lam.max_residual < args.tol
    if args.degree is not None:
        S = spectrum.cal_l(s.L, s.R, args.degree)
        g = spectrum.check_mutual_orthogonality(S, ev)
        body["cal_l"] = dict(g.to_json(), injective=S.injective, degree=args.degree)
        ok = ok and S.injective and g.max_offdiag < args.tol
    body["passed"] = ok
    return ok, dumps_report("ortho", body)


def cmd_maximality(args):
    s = load_system(args.system)
    cands = parse_grid(args.candidates, s.n)
    rep = spectrum.check_maximality(s, cands, args.degree, args.witness_tol, _evaluator(s, args))
    body = rep.to_json()
    body["witness_tol"] = args.witness_tol
    body["note"] = "candidates without a witness are not ruled out at this degree; no violation is asserted"
    return True, dumps_report("maximality", body)


def cmd_attractor(args):
    s = load_system(args.system)
    try:
        cloud = transform.attractor_points(s.R, s.B, args.depth, dedup=args.dedup)
    except BudgetExceeded as exc:
        raise BudgetExceeded(f"{exc} (set SFL_MAX_POINTS to raise the budget)", exc.admissible_depth) from exc
    if args.render or args.format == "pgm":
        w, h = parse_size(args.render or "512x512")
        grid = transform.render(cloud, w, h)
        if args.format == "json":
            body = {"depth": args.depth, "width": w, "height": h, "occupied": int((grid > 0).sum())}
            return True, dumps_report("attractor", body)
        return True, transform.pgm_bytes(grid)
    if args.format == "csv":
        return True, cloud.to_csv()
    body = {
        "depth": cloud.depth,
        "count": len(cloud),
        "points": cloud.points,
        "weights": cloud.weights,
        "bbox": [cloud.points.min(axis=0), cloud.points.max(axis=0)],
    }
    return True, dumps_report("attractor", body)


def cmd_cuntz(args):
    s = load_system(args.system)
    s.require_lattice()
    radius = int(args.window)
    freqs = spectrum.kdual_window(s, radius)
    ev = _evaluator(s, args)
    adjoint = system.selfadjoint_report(s)
    st = cuntz.verify_ST_identity(s, freqs)
    # the T relations presuppose a selfadjoint system (T_l* needs unique decompositions)
    tr = cuntz.verify_T_relations(s, freqs, ev) if adjoint.selfadjoint else None
    sc = cuntz.verify_S_completeness(s, cuntz.random_pairs(s.n, args.pairs, seed=args.seed), ev)
    comp, ncomp = cuntz.verify_composition(s, args.degree)
    ok = st.passed and tr is not None and tr.passed(args.tol) and sc.max_residual < args.tol and comp
    body = {
        "selfadjoint": adjoint.selfadjoint,
        "failed_conditions": list(adjoint.failed),
        "ST_identity": st.to_json(),
        "T_relations": None if tr is None else tr.to_json(),
        "S_completeness": sc.to_json(),
        "composition": {"passed": comp, "strings": ncomp, "max_length": args.degree},
        "tol": args.tol,
        "passed": ok,
        "note": "relations are checked on truncated spans only",
    }
    return ok, dumps_report("cuntz", body)


def cmd_catalog(args):
    if args.action == "list":
        body = {"ids": catalog.ids(), "selfadjoint": catalog.selfadjoint_ids()}
        return True, dumps_report("catalog", body)
    if not args.id:
        raise ParseError(f"catalog {args.action} needs an id")
    entry = catalog.get(args.id)
    if args.action == "export":
        return True, entry.system.dumps()
    return True, dumps_report("catalog", {"entry": entry.to_json()})


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sfl", description="Spectral pairs and affine systems toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "pgm"), default="json")
    common.add_argument("--tol", type=_positive(float), default=1e-8, help="pass threshold for residuals")
    common.add_argument("--eps-stop", type=_positive(float), default=transform.DEFAULT_EPS_STOP)
    common.add_argument("--max-depth", type=_positive(int), default=transform.DEFAULT_MAX_DEPTH)
    common.add_argument("--zero-tol", type=_positive(float), default=transform.DEFAULT_ZERO_TOL)
    common.add_argument("--witness-tol", type=_positive(float), default=spectrum.DEFAULT_WITNESS_TOL)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        q = sub.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=fn)
        if name != "catalog":
            q.add_argument("system", help="catalog:<id> or a system JSON file")
        return q

    add("check", cmd_check, "validate a system and report its structural flags")
    add("dual", cmd_dual, "print the dual system")
    q = add("lattices", cmd_lattices, "search lattices K making the system selfadjoint")
    q.add_argument("--index-bound", type=_positive(int), default=8)
    add("classify", cmd_classify, "classify the phase table (N <= 4)")
    q = add("muhat", cmd_muhat, "evaluate the Fourier transform of the invariant measure")
    q.add_argument("--at", nargs="+", metavar="T")
    q.add_argument("--grid", help="lo:hi:step[,lo:hi:step...]")
    q = add("spectrum", cmd_spectrum, "enumerate L + R*K° or the finite-sum set")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda", dest="lam", action="store_true")
    g.add_argument("--call", action="store_true")
    q.add_argument("--bound", default="10")
    q.add_argument("--degree", type=int, default=4)
    q = add("ortho", cmd_ortho, "check orthogonality of the candidate spectra")
    q.add_argument("--radius", type=_positive(int), default=10)
    q.add_argument("--degree", type=int, default=None)
    q = add("maximality", cmd_maximality, "search witnesses against maximality")
    q.add_argument("--candidates", required=True, help="lo:hi:step[,...]")
    q.add_argument("--degree", type=int, default=6)
    q = add("attractor", cmd_attractor, "attractor point cloud or raster")
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("--render", metavar="WxH")
    q.add_argument("--dedup", action="store_true")
    q = add("cuntz", cmd_cuntz, "verify the Cuntz relations on a frequency window")
    q.add_argument("--window", default="2", help="radius r of the K° window c in [-r, r]^n")
    q.add_argument("--degree", type=int, default=5, help="max digit-string length for the composition law")
    q.add_argument("--pairs", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q = add("catalog", cmd_catalog, "list, show or export built-in systems")
    q.add_argument("action", choices=("list", "show", "export"))
    q.add_argument("id", nargs="?")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ok, payload = args.func(args)
    except BudgetExceeded as exc:
        print(f"sfl: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SflError as exc:
        print(f"sfl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args, payload)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
