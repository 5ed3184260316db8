"""Command-line front end.

Exit status: 0 inconclusive (or any non-detect command), 3 entangled,
1 usage error, 2 unreadable or invalid input file.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import bounds, detectors, quantum
from .entropy import parse_measure
from .probvec import ProbVec

EXIT_INCONCLUSIVE = 0
EXIT_USAGE = 1
EXIT_BAD_INPUT = 2
EXIT_ENTANGLED = 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0
    return f"{x:.12g}"


def fmt_vec(v) -> str:
    return " ".join(fmt(x) for x in np.asarray(v, dtype=float))


def parse_range(text: str) -> list[int]:
    """``"2..8"`` -> [2, ..., 8]; ``"3"`` -> [3]."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected N or A..B") from None
    if lo < 2 or hi < lo:
        raise UsageError(f"bad range {text!r}; need 2 <= A <= B")
    return list(range(lo, hi + 1))


def parse_orders(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        try:
            out.append(math.inf if tok in ("inf", "infinity") else float(tok))
        except ValueError:
            raise UsageError(f"bad order {tok!r}") from None
    return out


def parse_werner(text: str) -> tuple[int, float]:
    """``"d=2,q=0.5"`` (or ``"2,0.5"``) -> (2, 0.5)."""
    fields = {}
    parts = [p.strip() for p in text.split(",")]
    try:
        if all("=" in p for p in parts):
            for p in parts:
                k, v = p.split("=", 1)
                fields[k.strip()] = v.strip()
            d, q = int(fields["d"]), float(fields["q"])
        else:
            d, q = int(parts[0]), float(parts[1])
    except (KeyError, ValueError, IndexError):
        raise UsageError(f"bad --werner value {text!r}; expected d=<d>,q=<q>") from None
    if d < 2 or not 0.0 <= q <= 1.0:
        raise UsageError("--werner needs d >= 2 and 0 <= q <= 1")
    return d, q


def load_povm(path: str) -> quantum.Povm:
    """Read ``{"label": ..., "elements": [{"re": [[..]], "im": [[..]]}, ...]}``."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
        els = []
        for e in doc["elements"]:
            re = np.array(e["re"], dtype=float)
            im = np.array(e.get("im", np.zeros_like(re)), dtype=float)
            els.append(re + 1j * im)
        return quantum.Povm(tuple(els), doc.get("label", path))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _state(args) -> quantum.DensityMatrix:
    if args.werner and args.state:
        raise UsageError("give either --state or --werner, not both")
    if args.werner:
        d, q = parse_werner(args.werner)
        return quantum.werner(d, q)
    if args.state:
        try:
            return quantum.load_state(args.state)
        except (OSError, ValueError) as exc:
            raise InputError(f"{args.state}: {exc}") from exc
    raise UsageError("a state is required: --state <path> or --werner d=<d>,q=<q>")


def _config(args) -> bounds.OptimizerConfig:
    return bounds.OptimizerConfig(restarts=args.restarts, seed=args.seed)


def _pauli_pairs():
    return [
        (quantum.Observable(p), quantum.Observable(p))
        for p in (quantum.PAULI_X, quantum.PAULI_Y, quantum.PAULI_Z)
    ]


def _t1_setup(args, sigma):
    """Measurement, separable bound and whether that bound is analytic."""
    kind = args.measurement or "bell"
    dims = sigma.dims
    if kind == "bell":
        if len(dims) != 2 or dims[0] != dims[1]:
            raise UsageError("--measurement bell needs a state of two equal-dimension parties")
        povm = quantum.rank_one_povm(quantum.bell_basis(dims[0]), label="bell")
        return povm, bounds.bell_separable_bound(dims[0]), True
    if kind == "eigenbasis":
        povm = detectors.optimal_measurement(sigma)
        if povm.label == "bell":
            return povm, bounds.bell_separable_bound(dims[0]), True
    elif kind == "file":
        if not args.measurement_file:
            raise UsageError("--measurement file needs --measurement-file <path>")
        povm = load_povm(args.measurement_file)
    else:
        raise UsageError(f"--measurement {kind} does not apply to this detector")
    if len(dims) < 2:
        raise UsageError("the separable bound needs a state with at least two parties")
    if povm.dim != sigma.dim:
        raise InputError("measurement and state dimensions differ")
    res = bounds.sup_separable(povm, dims, _config(args))
    return povm, res.bound, False


def _t2_setup(args, sigma):
    kind = args.measurement or "pauli3"
    if kind != "pauli3":
        raise UsageError("this detector supports --measurement pauli3 only")
    if sigma.dims != (2, 2):
        raise UsageError("--measurement pauli3 needs a two-qubit state")
    if args.bound == "optimizer":
        return _pauli_pairs(), bounds.sup_all_states(bounds.pauli_measurements(), _config(args)).bound, False
    return _pauli_pairs(), bounds.pauli_bound_closed_form(), True


def _tol(args, analytic: bool) -> float:
    if args.tol is not None:
        return args.tol
    return detectors.TOL_ANALYTIC if analytic else detectors.TOL_OPTIMIZED


def _report(out, name: str, verdict: detectors.Verdict, lhs_label: str = "lhs") -> None:
    out.write(f"detector: {name}\n")
    out.write(f"verdict: {verdict.status.value}\n")
    left, right = verdict.detail
    if isinstance(left, tuple):
        for k, v in enumerate(left):
            out.write(f"{lhs_label}[{k}]: {fmt_vec(v)}\n")
    else:
        out.write(f"{lhs_label}: {fmt_vec(left)}\n")
    out.write(f"bound: {fmt_vec(right)}\n")
    if verdict.violated_index is not None:
        out.write(f"violated at index {verdict.violated_index}, margin {fmt(verdict.margin)}\n")
    elif verdict.entangled:
        out.write(f"scalar inequality violated, margin {fmt(verdict.margin)}\n")
    else:
        out.write(f"not violated, margin {fmt(verdict.margin)}\n")


def cmd_detect(args, out) -> int:
    det = args.detector.lower()
    sigma = _state(args)
    name, _, measure_text = det.partition(":")
    if name in ("c1", "c2", "c3"):
        if not measure_text:
            raise UsageError(f"--detector {name} needs a measure, e.g. {name}:shannon")
        try:
            measure = parse_measure(measure_text)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif measure_text or name not in ("t1", "t2", "t3"):
        raise UsageError(f"unknown detector {args.detector!r}")

    if name in ("t1", "c1"):
        povm, bound, analytic = _t1_setup(args, sigma)
        tol = _tol(args, analytic)
        if name == "t1":
            verdict = detectors.theorem1_detect(sigma, povm, bound, tol)
        else:
            verdict = detectors.corollary_detect(measure, quantum.born_probs(povm, sigma), bound, "C1", tol)
    elif name in ("t2", "c2"):
        pairs, bound, analytic = _t2_setup(args, sigma)
        tol = _tol(args, analytic)
        if name == "t2":
            verdict = detectors.theorem2_detect(sigma, pairs, bound, tol)
        else:
            vecs = [quantum.born_probs(detectors.product_measurement(a, b), sigma) for a, b in pairs]
            verdict = detectors.corollary_detect(measure, vecs, bound, "C2", tol)
    else:
        if len(sigma.dims) < 2:
            raise UsageError("this detector needs a state with at least two parties")
        tol = _tol(args, True)
        verdict, disorder = detectors.theorem3_detect(sigma, tol)
        if name == "c3":
            verdict = detectors.corollary_detect(measure, verdict.detail[0], disorder.lambda_inf, "C3", tol)
    _report(out, det, verdict)
    return EXIT_ENTANGLED if verdict.entangled else EXIT_INCONCLUSIVE


def cmd_bound(args, out) -> int:
    kind = args.measurement or "pauli3"
    cfg = _config(args)
    if kind == "pauli3":
        ms = bounds.pauli_measurements()
        dims = (2,)
    elif kind == "bell":
        if not args.d:
            raise UsageError("--measurement bell needs --d <party dimension>")
        d = parse_range(args.d)
        if len(d) != 1:
            raise UsageError("--d must be a single dimension here")
        ms = bounds.MeasurementSet((quantum.rank_one_povm(quantum.bell_basis(d[0]), label="bell"),))
        dims = (d[0], d[0])
    elif kind == "file":
        if not args.measurement_file:
            raise UsageError("--measurement file needs --measurement-file <path>")
        ms = bounds.MeasurementSet((load_povm(args.measurement_file),))
        dims = None
    else:
        raise UsageError(f"--measurement {kind} is not supported by bound")
    if args.dims:
        try:
            dims = tuple(int(x) for x in args.dims.split(","))
        except ValueError:
            raise UsageError(f"bad --dims {args.dims!r}") from None
    if args.separable:
        if dims is None or len(dims) < 2:
            raise UsageError("--separable needs party dimensions (--dims a,b)")
        try:
            res = bounds.sup_separable(ms, dims, cfg)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        res = bounds.sup_all_states(ms, cfg)
    out.write(f"measurement: {kind}\n")
    out.write(f"states: {'separable' if args.separable else 'all'}\n")
    out.write(f"mu: {fmt_vec(res.mu)}\n")
    out.write(f"bound: {fmt_vec(res.bound)}\n")
    out.write(f"converged: {' '.join('yes' if c else 'no' for c in res.converged)}\n")
    return 0


def scan_csv(points: Sequence[detectors.ThresholdPoint]) -> str:
    buf = io.StringIO()
    buf.write("d,order,q_star,method\n")
    for p in points:
        order = "inf" if math.isinf(p.measure.order) else f"{p.measure.order:g}"
        buf.write(f"{p.d},{order},{fmt(p.q_star)},{p.method}\n")
    return buf.getvalue()


def cmd_scan(args, out) -> int:
    d_range = parse_range(args.d or "2..8")
    orders = parse_orders(args.orders)
    if any(not r >= 1 for r in orders):
        raise UsageError("Tsallis orders must be >= 1 (use inf for the limit)")
    out.write(scan_csv(detectors.werner_scan(d_range, orders)))
    return 0


def cmd_spectrum(args, out) -> int:
    sigma = _state(args)
    cfg = bounds.OptimizerConfig(restarts=args.restarts, seed=args.seed, max_iters=2000, tol_fp=1e-12)
    est = detectors.estimate_spectrum(sigma, cfg)
    out.write(f"estimated: {fmt_vec(est)}\n")
    out.write(f"eigensolver: {fmt_vec(quantum.spectrum(sigma))}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="majorization", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, state=True):
        if state:
            p.add_argument("--state", help="JSON state file {dims, matrix_re, matrix_im}")
            p.add_argument("--werner", help="built-in Werner state, d=<d>,q=<q>")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=64)
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("detect", help="run an entanglement detector on a state")
    p.add_argument("--detector", required=True, help="t1, t2, t3, c1:<measure>, c2:<measure>, c3:<measure>")
    p.add_argument(
        "--measurement",
        choices=["bell", "pauli3", "eigenbasis", "file"],
        help="t1/c1: bell (default), eigenbasis or file; t2/c2: pauli3",
    )
    p.add_argument("--measurement-file", help="JSON measurement for --measurement file")
    p.add_argument("--bound", choices=["analytic", "optimizer"], default="analytic", help="t2/c2 bound source")
    p.add_argument("--tol", type=float, help="detection tolerance (default 1e-9 analytic, 1e-4 optimizer)")
    common(p)
    p.epilog = "Measures: shannon, tsallis:<r>, tsallis:inf, renyi:<r>; natural logarithms throughout."

    p = sub.add_parser("bound", help="compute a majorization uncertainty bound")
    p.add_argument("--measurement", choices=["pauli3", "bell", "file"], default="pauli3")
    p.add_argument("--measurement-file")
    p.add_argument("--d", help="party dimension for --measurement bell")
    p.add_argument("--dims", help="party dimensions, comma separated")
    p.add_argument("--separable", action="store_true", help="bound over separable states")
    common(p, state=False)

    p = sub.add_parser("werner-scan", help="Tsallis detection thresholds for Werner states as CSV")
    p.add_argument("--d", default="2..8", help="dimension range A..B")
    p.add_argument("--orders", default="1,2,5,inf", help="comma-separated Tsallis orders")
    p.add_argument("--out")

    p = sub.add_parser("spectrum-estimate", help="spectrum as supremum of rank-1 measurement statistics")
    common(p)
    return parser


_COMMANDS = {
    "detect": cmd_detect,
    "bound": cmd_bound,
    "werner-scan": cmd_scan,
    "spectrum-estimate": cmd_spectrum,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        buf = io.StringIO()
        code = _COMMANDS[args.command](args, buf)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except InputError as exc:
        stderr.write(f"invalid input: {exc}\n")
        return EXIT_BAD_INPUT
    if getattr(args, "out", None):
        with open(args.out, "w", newline="\n") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    return code


def main() -> None:
    sys.exit(run())
