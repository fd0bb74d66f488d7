"""Command-line front end.

Exit codes: 0 ok, 1 I/O or parse error, 2 spectral class refuted,
3 non-convergence, 4 suite failure.  Reports are line-oriented JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import spectral
from .errors import (BackendError, DecayCertificateError, MissingHalfError, NotInvertibleError,
                     PencilInversionError, SpectralClassError)
from .fixtures import MarginError, generate_test_matrix
from .rings import element_from_json, element_to_json

EXIT_OK, EXIT_IO, EXIT_REFUTED, EXIT_NONCONVERGED, EXIT_SUITE = 0, 1, 2, 3, 4

FUNCTIONS = ("sgn", "sqrt", "idem", "fsqrt", "absr", "absi", "pol", "absF", "pertr",
             "split", "geomean", "sqrt-segment")

CLASS_TAG = {
    "sgn": "AvoidImagAxis", "absr": "AvoidImagAxis", "pertr": "AvoidImagAxis", "split": "AvoidImagAxis",
    "sqrt": "AvoidNegReals", "sqrt-segment": "AvoidNegReals",
    "idem": "AvoidShiftedImagAxis", "absF": "AvoidShiftedImagAxis",
    "fsqrt": "AvoidQuarterShiftedNegReals",
    "absi": "AvoidRealAxis", "pol": "AvoidRealAxis",
}

DERIVED = {"absr": "abs_r", "absi": "abs_i", "pol": "pol", "absF": "abs_F", "pertr": "pert_r"}

ORACLE_SCALAR = {
    "sgn": lambda d: np.sign(d.real),
    "sqrt": np.sqrt,
    "sqrt-segment": np.sqrt,
    "idem": lambda d: float(d.real > 0.5),
    "fsqrt": lambda d: 0.5 - np.sqrt(0.25 - d),
    "absr": lambda d: d * np.sign(d.real),
    "pertr": lambda d: (d * np.sign(d.real) - 1) / (d * np.sign(d.real) + 1),
}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(type(o))


def sidecar_path(path: Path) -> Path:
    return path.with_name(path.stem + ".sidecar.json")


def load_input(path: str):
    p = Path(path)
    try:
        obj = json.loads(p.read_text())
        ring, x = element_from_json(obj)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    side = None
    sp = sidecar_path(p)
    if sp.exists():
        try:
            side = json.loads(sp.read_text())
        except ValueError as exc:
            raise CliError(EXIT_IO, f"cannot parse sidecar {sp}: {exc}") from exc
    return ring, x, side


def _backend(args, side, nodes=None):
    nodes = args.nodes if nodes is None else nodes
    if args.backend == "oracle":
        if side is None:
            raise CliError(EXIT_IO, "the oracle backend needs a sidecar file next to the input")
        D = [complex(re, im) for re, im in side["D"]]
        return spectral.make_backend("oracle", oracle={"V": side["V"], "D": D})
    return spectral.make_backend(args.backend, nodes, args.order)


def _evaluate(fn, ring, x, b, extra=None, nodes=None):
    if fn in spectral.PRIMITIVES:
        res = spectral.PRIMITIVES[fn](x, b, ring)
        return res.to_dict(), res
    if fn in DERIVED:
        res = spectral.derived_decomposition(DERIVED[fn], x, b, ring)
        return res.to_dict(), res
    if fn == "geomean":
        _, y = extra
        res = spectral.geometric_mean(x, y, b, ring)
        return res.to_dict(), res
    if fn == "sqrt-segment":
        if not isinstance(b, spectral.Quadrature):
            raise BackendError("sqrt-segment uses Chebyshev nodes; pass --backend quadrature")
        res = spectral.sqrt_real_segment(x, nodes or b.nodes, ring)
        return res.to_dict(), res
    if fn == "split":
        pm, pp, qm, qp = spectral.spectral_split(x, b, ring)
        W = ring.complex_ring() if not isinstance(b, spectral.SeriesCayley) else ring
        res = spectral.split_residuals(x, b, ring)
        out = {"value": {k: element_to_json(W, v) for k, v in
                         (("projector_minus", pm), ("projector_plus", pp), ("q_minus", qm), ("q_plus", qp))},
               "residuals": {k: float(v) for k, v in sorted(res.items())},
               "error_budget": float(max(res.values())) if res else 0.0,
               "backend": b.name, "nodes": getattr(b, "nodes", None)}
        return out, None
    raise CliError(EXIT_IO, f"unknown function {fn!r}")


def _oracle_error(fn, value, side):
    if side is None or fn not in ORACLE_SCALAR:
        return None
    V = np.asarray(side["V"], dtype=complex)
    D = [complex(re, im) for re, im in side["D"]]
    want = V @ np.diag([ORACLE_SCALAR[fn](d) for d in D]) @ np.linalg.inv(V)
    got = _decode_value(value)
    return float(np.abs(got - want).sum(axis=1).max())


def _decode_value(obj):
    n = obj["n"]
    if obj["kind"] == "complex_matrix":
        vals = [complex(re, im) for re, im in obj["data"]]
    else:
        vals = [num / den for num, den in obj["data"]]
    return np.array(vals, dtype=complex).reshape(n, n)


def run_compute(args) -> tuple[int, list]:
    if args.tol <= 0:
        raise CliError(EXIT_IO, "--tol must be positive")
    if args.nodes < 2 or args.nodes & (args.nodes - 1):
        raise CliError(EXIT_IO, "--nodes must be a power of two")
    need = 2 if args.fn == "geomean" else 1
    if len(args.input) != need:
        raise CliError(EXIT_IO, f"{args.fn} takes {need} input file(s)")
    ring, x, side = load_input(args.input[0])
    extra = load_input(args.input[1])[:2] if need == 2 else None
    lines = []
    b = _backend(args, side)
    tag = CLASS_TAG.get(args.fn)
    if tag is not None and args.backend != "series":
        cert_b = b if isinstance(b, spectral.Oracle) else spectral.Quadrature(max(256, args.nodes))
        cert = spectral.class_membership(x, tag, cert_b, ring)
        if cert.status == "refuted":
            lines.append({"record": "refuted", "fn": args.fn, "certificate": cert.to_dict()})
            return EXIT_REFUTED, lines
    out, res = _evaluate(args.fn, ring, x, b, extra)
    record = {"record": "result", "fn": args.fn, **out}
    err = _oracle_error(args.fn, out["value"], side)
    if err is not None:
        record["oracle_error"] = err
    code = EXIT_OK if out["error_budget"] <= args.tol else EXIT_NONCONVERGED
    record["converged"] = code == EXIT_OK
    lines.append(record)
    if args.verify:
        worst = max(out["residuals"].values(), default=0.0)
        ok = worst <= args.tol
        lines.append({"record": "verify", "fn": args.fn, "worst_residual": worst, "ok": ok})
        if not ok:
            code = EXIT_NONCONVERGED
        if isinstance(b, spectral.Quadrature):
            for N in (args.nodes // 2, args.nodes, 2 * args.nodes):
                if N < 2:
                    continue
                o, _ = _evaluate(args.fn, ring, x, spectral.Quadrature(N), extra, N)
                row = {"record": "convergence", "fn": args.fn, "nodes": N, "error_budget": o["error_budget"]}
                e = _oracle_error(args.fn, o["value"], side)
                if e is not None:
                    row["oracle_error"] = e
                lines.append(row)
    return code, lines


def run_verify(args) -> tuple[int, list]:
    from .suites import run_suite
    checks = run_suite(args.suite, args.tol)
    lines = [{"record": "check", **c.to_dict()} for c in checks]
    failed = [c.name for c in checks if not c.ok]
    lines.append({"record": "summary", "suite": args.suite, "passed": len(checks) - len(failed),
                  "total": len(checks), "failed": failed})
    return (EXIT_SUITE if failed else EXIT_OK), lines


def run_verify_identities(args) -> tuple[int, list]:
    from .identities import verify_all
    results = verify_all(args.set)
    lines = []
    for r in results:
        row = r.to_dict()
        row.pop("seconds")  # keeps reports byte-identical across runs
        lines.append({"record": "identity", **row})
    failed = [r.name for r in results if not r.verified]
    lines.append({"record": "summary", "set": args.set, "passed": len(results) - len(failed),
                  "total": len(results), "failed": failed})
    return (EXIT_SUITE if failed else EXIT_OK), lines


def parse_eigenvalues(text: str):
    try:
        return [complex(v.strip().replace("i", "j")) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(EXIT_IO, f"cannot parse eigenvalues {text!r}") from exc


def run_generate(args) -> tuple[int, list]:
    eig = parse_eigenvalues(args.eig)
    n = args.n if args.n is not None else len(eig)
    try:
        fx = generate_test_matrix(n, eig, args.seed, args.exclude, args.margin)
    except (MarginError, ValueError) as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    out = Path(args.out)
    try:
        out.write_text(dumps(fx.to_json()) + "\n")
        sidecar_path(out).write_text(dumps(fx.sidecar()) + "\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {out}: {exc}") from exc
    return EXIT_OK, [{"record": "generated", "path": str(out), "sidecar": str(sidecar_path(out)),
                      "n": n, "seed": args.seed}]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specring", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate a spectral function on a matrix or scalar file")
    c.add_argument("--fn", required=True, choices=FUNCTIONS)
    c.add_argument("--input", required=True, nargs="+")
    c.add_argument("--backend", default="quadrature", choices=("quadrature", "series", "oracle"))
    c.add_argument("--nodes", type=int, default=64)
    c.add_argument("--order", type=int, default=32)
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--verify", action="store_true")
    c.add_argument("--report")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(run=run_compute)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("--suite", default="all", choices=("identities", "kernels", "halffree", "spectral", "all"))
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--report")
    v.set_defaults(run=run_verify)

    vi = sub.add_parser("verify-identities", help="check the identity catalog")
    vi.add_argument("--set", default="all", choices=("sign", "sqrt", "idem", "fsqrt", "homotopy", "all"))
    vi.add_argument("--report")
    vi.set_defaults(run=run_verify_identities)

    g = sub.add_parser("generate", help="write a conjugation fixture and its sidecar")
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--eig", required=True, help="comma separated, e.g. 3,-2 or 0.4+0.2j")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--exclude", choices=("sgn", "sqrt", "idem", "fsqrt"))
    g.add_argument("--margin", type=float, default=0.0)
    g.add_argument("--out", required=True)
    g.add_argument("--report")
    g.set_defaults(run=run_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    try:
        code, lines = args.run(args)
    except CliError as exc:
        code, lines = exc.code, [{"record": "error", "message": str(exc)}]
    except SpectralClassError as exc:
        code, lines = EXIT_REFUTED, [{"record": "refuted", "message": str(exc), "margin": exc.margin}]
    except (NotInvertibleError, PencilInversionError) as exc:
        code, lines = EXIT_REFUTED, [{"record": "refuted", "message": str(exc)}]
    except DecayCertificateError as exc:
        code, lines = EXIT_NONCONVERGED, [{"record": "nonconverged", "message": str(exc)}]
    except (BackendError, MissingHalfError) as exc:
        code, lines = EXIT_IO, [{"record": "error", "message": str(exc)}]
    text = "".join(dumps(line) + "\n" for line in lines)
    sys.stdout.write(text)
    report = getattr(args, "report", None)
    if report:
        try:
            Path(report).write_text(text)
        except OSError as exc:
            sys.stderr.write(f"cannot write report {report}: {exc}\n")
            return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
