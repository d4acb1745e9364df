"""Command-line front end.

Usage:
    ptwell eigen --epsilon 0.1 --nmax 3 --mode both
    ptwell kernel --order 2 --grid 41 --format csv -o c2.csv
    ptwell verify --epsilon 0.1 --suite algebraic
    ptwell qop --epsilon 0.1 --grid 128

Exit status is 0 on success, 1 on a failed check or numerical failure,
2 on bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import exact, opalg, perturb, verify
from .model import Convention, WellSpec, make_grid

SCHEMA_VERSION = "1"


@dataclass
class OutputRecord:
    command: str
    params: dict
    columns: list[str]
    rows: list[list]
    summary: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        out = {"schema_version": self.schema_version, "command": self.command, "params": self.params,
               "payload": {"columns": self.columns, "rows": [[_json_value(v) for v in r] for r in self.rows]}}
        if self.summary:
            out["summary"] = {k: _json_value(v) for k, v in self.summary.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_csv_value(v) for v in r])
        return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # round-trips to the same double as the 17-digit CSV text
        return v if np.isfinite(v) else None
    return v


def _csv_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


# -- commands -----------------------------------------------------------------------

def cmd_eigen(args) -> OutputRecord:
    rows = []
    for n in range(args.nmax + 1):
        pert = complex(perturb.energy(n, args.epsilon))
        if args.mode == "perturbative":
            rows.append([n, pert.real, pert.imag])
            continue
        E = exact.solve_eigenvalue(n, args.epsilon).energy
        if args.mode == "exact":
            rows.append([n, E.real, E.imag])
        else:
            rows.append([n, E.real, E.imag, pert.real, pert.imag, abs(E - pert)])
    if args.mode == "both":
        columns = ["n", "re_exact", "im_exact", "re_perturbative", "im_perturbative", "abs_diff"]
    else:
        columns = ["n", "re_E", "im_E"]
    params = {"epsilon": args.epsilon, "nmax": args.nmax, "mode": args.mode}
    return OutputRecord("eigen", params, columns, rows)


def _kernel_callable(order, epsilon, convention):
    conv = Convention(convention)
    if order == "q":
        fn = perturb.q_kernel_original if conv is Convention.ORIGINAL else perturb.q_kernel
        return lambda x, y: fn(x, y, epsilon)
    c1, c2 = perturb.kernels_for(conv)
    return c1 if order == "1" else c2


def cmd_kernel(args) -> OutputRecord:
    conv = Convention(args.convention)
    lo, hi = conv.interval
    t = np.linspace(lo, hi, args.grid)
    # pin the ends so boundary rows sit exactly on the walls
    t[0], t[-1] = lo, hi
    X, Y = np.meshgrid(t, t, indexing="ij")
    K = np.asarray(_kernel_callable(args.order, args.epsilon, conv)(X, Y), dtype=complex)
    rows = [[x, y, k.real, k.imag] for x, y, k in zip(X.ravel(), Y.ravel(), K.ravel())]
    params = {"order": args.order, "epsilon": args.epsilon, "grid": args.grid, "convention": conv.value}
    summary = {"max_abs": float(np.max(np.abs(K)))}
    return OutputRecord("kernel", params, ["x", "y", "re", "im"], rows, summary)


def cmd_verify(args) -> OutputRecord:
    report = verify.run_suite(WellSpec(args.epsilon), args.grid, args.nmodes, args.suite)
    rows = [[e.check_id, e.residual, e.tolerance, e.comparison, e.passed] for e in report.entries]
    params = {"epsilon": args.epsilon, "grid": args.grid, "nmodes": args.nmodes, "suite": args.suite}
    summary = {"overall": report.overall, "checks": len(report.entries),
               "failed": len(report.failures())}
    errors = {e.check_id: e.metadata["error"] for e in report.entries if "error" in e.metadata}
    if errors:
        summary["errors"] = json.dumps(errors, sort_keys=True)
    return OutputRecord("verify", params, ["check_id", "residual", "tolerance", "comparison", "pass"],
                        rows, summary)


def cmd_qop(args) -> OutputRecord:
    grid = make_grid(args.grid)
    Q = opalg.extract_Q(opalg.build_C(args.epsilon, grid))
    closed = opalg.q_op(args.epsilon, grid)
    _, second = opalg.log_coefficients(grid)
    u = opalg.symmetric_nodes(grid)
    num, ref = Q.kernel_values(), closed.kernel_values()
    rows = [[u[i], u[j], num[i, j].real, num[i, j].imag, ref[i, j].real, ref[i, j].imag]
            for i in range(u.size) for j in range(u.size)]
    summary = {"max_discrepancy": float(np.max(np.abs(num - ref))),
               "second_order_norm": float(np.max(np.abs(second.kernel_values())))}
    params = {"epsilon": args.epsilon, "grid": args.grid}
    return OutputRecord("qop", params, ["x", "y", "re_q_extracted", "im_q_extracted",
                                        "re_q_closed", "im_q_closed"], rows, summary)


# -- argument parsing ----------------------------------------------------------------

def _nonnegative_float(text):
    v = float(text)
    if not np.isfinite(v) or v < 0:
        raise argparse.ArgumentTypeError(f"expected a finite value >= 0, got {text}")
    return v


def _int_at_least(lo):
    def parse(text):
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"expected an integer >= {lo}, got {text}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ptwell", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    sp = sub.add_parser("eigen", help="exact and perturbative eigenvalues")
    sp.add_argument("--epsilon", type=_nonnegative_float, default=0.1)
    sp.add_argument("--nmax", type=_int_at_least(0), default=5, help="highest mode index")
    sp.add_argument("--mode", choices=["exact", "perturbative", "both"], default="both")
    common(sp)
    sp.set_defaults(func=cmd_eigen)

    sp = sub.add_parser("kernel", help="sample a kernel on a uniform lattice including the walls")
    sp.add_argument("--order", choices=["1", "2", "q"], required=True,
                    help="first- or second-order coefficient of C, or Q")
    sp.add_argument("--epsilon", type=_nonnegative_float, default=0.1, help="only used for --order q")
    sp.add_argument("--grid", type=_int_at_least(2), default=41, help="lattice points per axis")
    sp.add_argument("--convention", choices=["original", "symmetric"], default="symmetric")
    common(sp)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("verify", help="run verification checks; exit 1 if any fails",
                        description="Run a verification suite. Grids below 32 nodes are accepted "
                                    "but fail the quadrature checks by design.")
    sp.add_argument("--epsilon", type=_nonnegative_float, default=0.1)
    sp.add_argument("--grid", type=_int_at_least(2), default=128, help="Gauss-Legendre nodes")
    sp.add_argument("--nmodes", type=_int_at_least(1), default=200, help="modes in spectral sums")
    sp.add_argument("--suite", choices=[s.value for s in verify.Suite], default="all")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("qop", help="Q from the logarithm of C P next to its closed form")
    sp.add_argument("--epsilon", type=_nonnegative_float, default=0.1)
    sp.add_argument("--grid", type=_int_at_least(2), default=128, help="Gauss-Legendre nodes")
    common(sp)
    sp.set_defaults(func=cmd_qop)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "qop" and args.epsilon >= 0.5:
        parser.error("qop needs --epsilon < 0.5")
    try:
        record = args.func(args)
    except (exact.SolverError, exact.NormalizationError, opalg.ConvergenceError,
            ArithmeticError, np.linalg.LinAlgError) as exc:
        err = {"schema_version": SCHEMA_VERSION, "command": args.command,
               "error": f"{type(exc).__name__}: {exc}"}
        sys.stderr.write(json.dumps(err) + "\n")
        return 1

    text = record.to_json() if args.format == "json" else record.to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.format == "csv" and record.summary:
        sys.stderr.write(json.dumps({k: _json_value(v) for k, v in record.summary.items()}) + "\n")
    if args.command == "verify" and not record.summary["overall"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
