"""Command-line front end.

Every subcommand prints one JSON document (or a CSV view) carrying the tool
version and the full run configuration. Exit status: 0 on success, 1 on a
usage error, 2 when a numerical verification exceeds its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .displacement import all_displacements, canonical_conventions, partition_families
from .errors import PhaseSpaceError, UsageError, VerificationError
from .factor import (
    crt_factor_check,
    factor_odd_bipartite,
    reports_csv,
    scan_summary,
    scan_three_qubit_products,
    scan_two_qubit_products,
    signed_qubit_family,
)
from .fields import FieldTables, PrimePower, build_field, verify_field_axioms
from .linalg import random_density
from .tomography import (
    SCHEMES,
    BlochVector,
    complex_matrix_json,
    mub_probabilities,
    product_sic_two_qubit,
    pvm_mub_tomography,
    redundancy_ledger,
    sample_and_estimate,
    sic_povm_qubit,
    sic_probabilities,
)
from .wigner import (
    AcceptabilityReport,
    build_wigner_family,
    covariance_check,
    mean_king_infer,
    mub_residuals,
    mubs_from_wigner,
    verify_acceptability,
)

TOL_ENV = "PHASESPACE_TOL"
DEFAULT_TOL = 1e-8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None


def _field_from(args) -> FieldTables:
    if args.d is not None:
        if args.p is not None or args.m is not None:
            raise UsageError("give either --d or --p/--m, not both")
        pp = PrimePower.from_order(args.d)
        return build_field(pp.p, pp.m)
    if args.p is None:
        raise UsageError("a field is required: pass --d D or --p P [--m M]")
    return build_field(args.p, args.m or 1)


def _parse_signs(text: str) -> tuple[int, int, int]:
    if len(text) != 3 or any(c not in "+-" for c in text):
        raise UsageError(f"signs must be three characters from '+-' for (X, Y, Z), got {text!r}")
    return tuple(1 if c == "+" else -1 for c in text)


def _family(args):
    F = _field_from(args)
    if getattr(args, "signs", None):
        if F.d != 2:
            raise UsageError("--signs applies to the qubit field only")
        return F, signed_qubit_family(_parse_signs(args.signs))
    return F, build_wigner_family(F, tol=args.tol)


def _parse_point(text: str) -> tuple[int, int]:
    try:
        k, l = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"detector must look like 'k,l', got {text!r}") from None
    return k, l


def _matrix_from_json(obj, d: int) -> np.ndarray:
    arr = np.array(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.shape != (d, d):
        raise UsageError(f"state matrix must be {d}x{d}")
    return arr.astype(complex)


def _state(text: str, d: int, seed: int | None) -> np.ndarray:
    """Preset name, 'random' (needs --seed), a Bloch triple or a JSON matrix."""
    if text == "zero":
        return np.diag(np.eye(d)[0]).astype(complex)
    if text == "one":
        return np.diag(np.eye(d)[1]).astype(complex)
    if text == "plus":
        return np.full((d, d), 1 / d, dtype=complex)
    if text == "mixed":
        return np.eye(d, dtype=complex) / d
    if text == "random":
        if seed is None:
            raise UsageError("--state random needs --seed")
        return random_density(d, np.random.default_rng(seed))
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"unrecognised state {text!r}; use zero, one, plus, mixed, random or JSON") from None
    if d == 2 and np.ndim(obj) == 1 and len(obj) == 3:
        return BlochVector(*map(float, obj)).density()
    return _matrix_from_json(obj, d)


def _sampling(args) -> bool:
    if args.shots is None:
        return False
    if args.seed is None:
        raise UsageError("sampling needs --seed")
    return True


# ---- subcommand handlers; each returns (result, csv_rows or None) ----------


def cmd_field(args):
    F = build_field(args.p, args.m, modulus=args.modulus)
    out = F.to_json()
    out["d"] = F.d
    out["axioms"] = verify_field_axioms(F)
    if not all(out["axioms"].values()):
        raise VerificationError(f"field axioms fail: {out['axioms']}")
    return out, None


def cmd_weyl(args):
    F = _field_from(args)
    out = {
        "d": F.d,
        "families": [[m.as_list() for m in fam.members] for fam in partition_families(F)],
        "phases": [c.to_json() for c in canonical_conventions(F)],
    }
    if args.i is not None or args.j is not None:
        V = all_displacements(F)[F.check(args.i or 0), F.check(args.j or 0)]
        out["matrix"] = complex_matrix_json(V)
    return out, None


def _report_json(rep: AcceptabilityReport) -> dict:
    out = rep.to_json()
    if not rep.passed:
        raise VerificationError(f"acceptability fails: {out}", max(rep.a, rep.b, rep.c, rep.hermitian))
    return out


def cmd_wigner(args):
    F, fam = _family(args)
    if args.action == "build":
        out = {
            "d": F.d,
            "label": fam.label,
            "phases": complex_matrix_json(fam.phases),
            "operators": {f"{i1},{i2}": complex_matrix_json(fam[i1, i2]) for i1 in range(F.d) for i2 in range(F.d)},
        }
        return out, None
    rep = verify_acceptability(fam, tol=args.tol)
    out = _report_json(rep)
    cov = covariance_check(fam)
    out["covariance"] = cov.to_json()
    if cov.residual > args.tol:
        raise VerificationError(f"covariance residual {cov.residual:.3g}", cov.residual)
    rows = [[k, out[k]] for k in ("a", "b", "c", "hermitian", "passed")]
    return out, rows


def cmd_mub(args):
    F, fam = _family(args)
    mubs = mubs_from_wigner(fam, tol=args.tol)
    out = {
        "d": F.d,
        "provenance": list(mubs.provenance),
        "residuals": mub_residuals(mubs.bases),
        "bases": [[[[float(z.real), float(z.imag)] for z in v] for v in B] for B in mubs.bases],
    }
    return out, None


def cmd_factor(args):
    if args.action in ("scan2q", "scan3q"):
        reports = scan_two_qubit_products() if args.action == "scan2q" else scan_three_qubit_products()
        summary = scan_summary(reports)
        if not summary["witness_agrees"]:
            raise VerificationError("matrix verdicts and the sign-parity witness disagree")
        out = {"summary": summary, "reports": [r.to_json() for r in reports]}
        return out, reports_csv(reports)
    if args.action == "odd":
        if args.p is None:
            raise UsageError("factor odd needs --p")
        rep = factor_odd_bipartite(args.p, args.m or 1, tol=args.tol)
    else:
        if args.d1 is None or args.d2 is None:
            raise UsageError("factor crt needs --d1 and --d2")
        rep = crt_factor_check(args.d1, args.d2)
    return rep.to_json(), reports_csv([rep])


def cmd_tomo(args):
    if args.scheme == "sic":
        d, povm = 2, sic_povm_qubit()
    elif args.scheme == "product-sic":
        ps = product_sic_two_qubit()
        d, povm = 4, ps.povm
    else:
        F = _field_from(args)
        d, povm = F.d, None
    rho = _state(args.state, d, args.seed)
    if povm is None:
        mubs = mubs_from_wigner(build_wigner_family(F, tol=args.tol), tol=args.tol)
        scheme = mubs
        out = {"scheme": "mub-pvm", "probabilities": mub_probabilities(rho, mubs).tolist()}
        exact = pvm_mub_tomography(rho, mubs)
    else:
        scheme = povm
        out = {"scheme": povm.name, "probabilities": povm.probabilities(rho).tolist()}
        exact = povm.invert(povm.probabilities(rho))
        if args.scheme == "sic":
            out["sic"] = sic_probabilities(rho).to_json()
        if args.scheme == "product-sic":
            out["frame"] = ps.to_json()
    out["state"] = complex_matrix_json(rho)
    err = float(np.abs(exact - rho).max())
    out["exact_inversion_error"] = err
    if err > args.tol:
        raise VerificationError(f"exact inversion error {err:.3g}", err)
    if _sampling(args):
        out.update(sample_and_estimate(rho, scheme, args.shots, args.seed).to_json())
    rows = [[k, out[k]] for k in ("scheme", "exact_inversion_error", "fidelity", "trace_distance") if k in out]
    return out, rows


def cmd_ledger(args):
    out = redundancy_ledger(args.scheme, args.d).to_json()
    return out, [[k, v] for k, v in out.items()]


def cmd_mean_king(args):
    F, fam = _family(args)
    point = _parse_point(args.detector)
    F.check(point[0]), F.check(point[1])
    state = mean_king_infer(fam, args.prep, point)
    out = {"d": F.d, "prep_direction": args.prep, "detector": list(point), "state": state}
    return out, [[k, v] for k, v in out.items() if k != "detector"]


# ---- parser ------------------------------------------------------------------


def _common(top: bool) -> argparse.ArgumentParser:
    # subcommands repeat the options without defaults so they never mask
    # values given before the subcommand name
    dflt = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=dflt(None), help=f"verification tolerance (default ${TOL_ENV} or 1e-8)")
    p.add_argument("--format", choices=("json", "csv"), default=dflt("json"))
    p.add_argument("--output", "-o", default=dflt(None), help="write to this file instead of stdout")
    p.add_argument("--seed", type=int, default=dflt(None))
    return p


def _field_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, help="field order (a prime power)")
    p.add_argument("--p", type=int, help="characteristic")
    p.add_argument("--m", type=int, help="extension degree")


def build_parser() -> argparse.ArgumentParser:
    common = _common(top=False)
    parser = _Parser(prog="phasespace", description=__doc__.splitlines()[0], parents=[_common(top=True)])
    parser.add_argument("--version", action="version", version=f"phasespace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("field", parents=[common], help="GF(p^m) tables")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--modulus", type=lambda s: [int(c) for c in s.split(",")], help="coefficients, constant first")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("weyl", parents=[common], help="displacement operators and their families")
    _field_opts(p)
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("wigner", parents=[common], help="build or verify a Wigner family")
    p.add_argument("action", choices=("build", "verify"))
    _field_opts(p)
    p.add_argument("--signs", help="qubit only: signs for (X, Y, Z), e.g. '+-+'")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("mub", parents=[common], help="mutually unbiased bases from line averages")
    _field_opts(p)
    p.add_argument("--signs", help="qubit only: signs for (X, Y, Z)")
    p.set_defaults(func=cmd_mub)

    p = sub.add_parser("factor", parents=[common], help="factorisability analyses")
    p.add_argument("action", choices=("scan2q", "scan3q", "odd", "crt"))
    p.add_argument("--p", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("tomo", parents=[common], help="tomography protocols and simulation")
    p.add_argument("scheme", choices=("sic", "mub", "product-sic"))
    _field_opts(p)
    p.add_argument("--state", default="zero", help="zero, one, plus, mixed, random, Bloch triple or JSON matrix")
    p.add_argument("--shots", type=int)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("ledger", parents=[common], help="redundancy of a tomography scheme")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("mean-king", parents=[common], help="retrodict a prepared basis state")
    _field_opts(p)
    p.add_argument("--prep", type=int, required=True, help="direction of the prepared basis")
    p.add_argument("--detector", required=True, help="phase-space point 'k,l'")
    p.add_argument("--signs", help="qubit only: signs for (X, Y, Z)")
    p.set_defaults(func=cmd_mean_king)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _to_builtin(obj):
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_builtin(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _render(args, result, rows) -> str:
    if args.format == "csv":
        if rows is None:
            raise UsageError(f"'{args.command}' has no CSV view; use --format json")
        if isinstance(rows, str):
            return rows
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue()
    doc = {"tool": "phasespace", "version": __version__, "config": _config(args), "result": result}
    return json.dumps(_to_builtin(doc), sort_keys=True, indent=2) + "\n"


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and argument errors
        return int(exc.code or 0)
    try:
        if args.tol is None:
            args.tol = _default_tol()
        if args.tol <= 0:
            raise UsageError("--tol must be positive")
        result, rows = args.func(args)
        text = _render(args, result, rows)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except (UsageError, PhaseSpaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
