"""Factorisability of composite-system Wigner families.

Four analyses:

* products of qubit Wigner families, with every sign choice for X, Y, Z,
  tested against the global GF(2**n) line structure (n = 2, 3);
* the quadratic-extension factorisation for two qudits of odd prime order;
* the Chinese-remainder factorisation of modulo-d displacements for
  coprime odd d1, d2.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .displacement import PhaseConvention, canonical_conventions
from .errors import ResidualExceeded, UsageError
from .fields import FieldTables, build_field, build_quadratic_extension
from .linalg import EQ_TOL, tensor
from .wigner import WignerFamily, build_wigner_family, verify_acceptability

ACCEPT_TOL = 1e-8


@dataclass(frozen=True)
class SignAssignment:
    """Per-qubit signs applied to (X, Y, Z)."""

    signs: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for t in self.signs:
            if len(t) != 3 or any(s not in (1, -1) for s in t):
                raise UsageError(f"each qubit needs three signs in {{+1, -1}}, got {t}")

    def label(self) -> str:
        return " x ".join("(" + ",".join("+" if s > 0 else "-" for s in t) + ")" for t in self.signs)


@dataclass
class FactorReport:
    candidate: str
    acceptable: bool
    residuals: dict[str, float]
    index_map: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def worst_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    def to_json(self) -> dict:
        out = {
            "candidate": self.candidate,
            "acceptable": self.acceptable,
            "residuals": self.residuals,
            "worst_residual": self.worst_residual,
        }
        if self.index_map is not None:
            out["index_map"] = self.index_map
        out.update(self.extra)
        return out


def reports_csv(reports: list[FactorReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["candidate", "acceptable", "worst_residual"])
    for r in reports:
        w.writerow([r.candidate, int(r.acceptable), repr(r.worst_residual)])
    return buf.getvalue()


# ---- qubit products -------------------------------------------------------

_QUBIT = build_field(2, 1)


def signed_qubit_family(signs: tuple[int, int, int]) -> WignerFamily:
    """Qubit Wigner family with X, Y, Z replaced by sx X, sy Y, sz Z.

    Family 0 holds Z, family 1 holds X and family 2 holds the phased V(1, 1),
    which the canonical phase turns into Y.
    """
    sx, sy, sz = signs
    canon = {c.family.l: c for c in canonical_conventions(_QUBIT)}
    scale = {0: sz, 1: sx, 2: sy}
    convs = [PhaseConvention(canon[l].family, (scale[l] * canon[l].phases[0],)) for l in range(3)]
    return build_wigner_family(_QUBIT, convs, label=str(signs))


def qubit_point_map(F: FieldTables) -> dict[tuple[int, int], tuple[tuple[int, int], ...]]:
    """Global point (i1, i2) of GF(2**n) -> per-qubit points (k_q, l_q).

    Qubit q owns binary digit n - 1 - q, so the leftmost tensor factor is the
    most significant digit of the Hilbert-space label. ``k_q`` is that digit
    of i1 and ``l_q`` is the character exponent of e_q * i2, which is the
    phase the global V(0, i2) puts on qubit q.
    """
    if F.p != 2:
        raise UsageError("qubit point map needs characteristic 2")
    n = F.m
    basis = [1 << (n - 1 - q) for q in range(n)]
    out = {}
    for i1, i2 in itertools.product(range(F.d), repeat=2):
        out[(i1, i2)] = tuple(
            ((i1 >> (n - 1 - q)) & 1, int(F.char_values[F.mul[e, i2]])) for q, e in enumerate(basis)
        )
    return out


def product_family(F: FieldTables, assignment: SignAssignment) -> WignerFamily:
    if len(assignment.signs) != F.m:
        raise UsageError(f"need {F.m} sign triples, got {len(assignment.signs)}")
    local = [signed_qubit_family(s) for s in assignment.signs]
    pm = qubit_point_map(F)
    ops = np.empty((F.d, F.d, F.d, F.d), dtype=complex)
    for (i1, i2), pts in pm.items():
        ops[i1, i2] = tensor(*(fam[pt] for fam, pt in zip(local, pts)))
    return WignerFamily(F=F, ops=ops, label=assignment.label())


def signs_agree_evenly(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return sum(x == y for x, y in zip(a, b)) % 2 == 0


def combinatorial_witness(assignment: SignAssignment) -> bool:
    """True when every pair of sign triples agrees in an even number of places."""
    return all(signs_agree_evenly(a, b) for a, b in itertools.combinations(assignment.signs, 2))


_TRIPLES = tuple(itertools.product((1, -1), repeat=3))


def _scan(n: int) -> list[FactorReport]:
    F = build_field(2, n)
    pm = qubit_point_map(F)
    index_map = {f"{i1},{i2}": [list(pt) for pt in pts] for (i1, i2), pts in pm.items()}
    reports = []
    for rank, signs in enumerate(itertools.product(_TRIPLES, repeat=n)):
        sa = SignAssignment(signs)
        rep = verify_acceptability(product_family(F, sa), tol=ACCEPT_TOL)
        res = {"hermitian": rep.hermitian, "a": rep.a, "b": rep.b, "c": rep.c}
        witness = combinatorial_witness(sa)
        reports.append(
            FactorReport(
                candidate=f"{rank}:{sa.label()}",
                acceptable=rep.passed,
                residuals=res,
                index_map=index_map if rank == 0 else None,
                extra={"witness_acceptable": witness, "witness_agrees": witness == rep.passed},
            )
        )
    return reports


def scan_two_qubit_products() -> list[FactorReport]:
    """All 64 products of signed qubit families against GF(4) acceptability."""
    return _scan(2)


def scan_three_qubit_products() -> list[FactorReport]:
    """All 512 triple products against GF(8) acceptability; none pass."""
    return _scan(3)


def scan_summary(reports: list[FactorReport]) -> dict:
    return {
        "acceptable": sum(r.acceptable for r in reports),
        "total": len(reports),
        "witness_agrees": all(r.extra.get("witness_agrees", True) for r in reports),
    }


# ---- odd prime powers via the quadratic extension -------------------------


def factor_odd_bipartite(p: int, m: int = 1, tol: float = ACCEPT_TOL) -> FactorReport:
    """Check W((i1a, i1b), (i2a, i2b)) = W^a(i1a, i2a) x W^b(i1b, R i2b).

    The GF(d**2) family uses canonical phases over the quadratic extension of
    GF(d), d = p**m; its Hilbert label a + d b is reordered so the ``a``
    subsystem is the leftmost tensor factor.
    """
    if p == 2:
        raise UsageError("the quadratic-extension factorisation applies to odd p only")
    if p ** (2 * m) > 256:
        raise UsageError(f"p**(2m) = {p ** (2 * m)} exceeds the supported order 256")
    base = build_field(p, m)
    qx = build_quadratic_extension(base)
    d = base.d
    big = build_wigner_family(qx.ext)
    small = build_wigner_family(base)
    # label a + d b  ->  tensor position a d + b
    perm = np.array([(x % d) * d + x // d for x in range(d * d)])
    P = np.zeros((d * d, d * d))
    P[perm, np.arange(d * d)] = 1
    worst, where = 0.0, None
    for i1a, i1b, i2a, i2b in itertools.product(range(d), repeat=4):
        W = big[qx.pair(i1a, i1b), qx.pair(i2a, i2b)]
        rhs = np.kron(small[i1a, i2a], small[i1b, int(base.mul[qx.R, i2b])])
        res = float(np.linalg.norm(P @ W @ P.T - rhs))
        if res > worst or where is None:
            worst, where = res, [i1a, i1b, i2a, i2b]
    report = FactorReport(
        candidate=f"GF({d}**2) over GF({d})",
        acceptable=bool(worst < tol),
        residuals={"factorisation": worst},
        index_map={
            "R": qx.R,
            "Q": qx.Q,
            "hilbert_label": "a + d*b",
            "pair_to_elt": qx.pair_to_elt.tolist(),
        },
        extra={"worst_tuple": where},
    )
    if not report.acceptable:
        raise ResidualExceeded(f"factorisation residual {worst:.3g} at {where}", worst)
    return report


# ---- coprime composite dimensions -----------------------------------------


def modular_displacement(d: int, m: int, n: int) -> np.ndarray:
    """V(m, n) = sum_k exp(2 pi i (k + m) n / d) |k + m><k| with arithmetic mod d."""
    k = np.arange(d)
    rows = (k + m) % d
    V = np.zeros((d, d), dtype=complex)
    V[rows, k] = np.exp(2j * np.pi * ((rows * n) % d) / d)
    return V


def crt_factor_check(d1: int, d2: int, tol: float = EQ_TOL) -> FactorReport:
    """Factorise every modulo-(d1 d2) displacement into local displacements.

    Shifts embed as m = d2 m_a + d1 m_b and so do Hilbert labels. With the
    phase index embedded the same way, V(m, n) equals the product of
    V1(m_a, d2 n_a mod d1) and V2(m_b, d1 n_b mod d2), unit factor 1.

    Also checked:

    * ``additive``: the embedding respects addition;
    * ``phase_corrected``: exp(2 pi i m n / d) = exp(2 pi i m_a n_a / d1)
      exp(2 pi i m_b n_b / d2) when n embeds with the CRT idempotents
      n = d2 u n_a + d1 v n_b (u, v the inverses of d2 mod d1, d1 mod d2);
    * ``phase_literal``: the same identity with n embedded like m. This
      one generally fails; it is reported but does not gate the verdict.
    """
    if math.gcd(d1, d2) != 1:
        raise UsageError(f"d1 = {d1} and d2 = {d2} are not coprime")
    if d1 % 2 == 0 or d2 % 2 == 0:
        raise UsageError("both factors must be odd")
    d = d1 * d2
    if d > 63:
        raise UsageError(f"d = {d} exceeds the supported 63")
    emb = lambda a, b: (d2 * a + d1 * b) % d  # noqa: E731
    u, v = pow(d2, -1, d1) if d1 > 1 else 0, pow(d1, -1, d2) if d2 > 1 else 0
    emb_n = lambda a, b: (d2 * u * a + d1 * v * b) % d  # noqa: E731

    P = np.zeros((d, d))
    for ka, kb in itertools.product(range(d1), range(d2)):
        P[ka * d2 + kb, emb(ka, kb)] = 1

    fact = 0.0
    units = []
    for ma, mb, na, nb in itertools.product(range(d1), range(d2), range(d1), range(d2)):
        V = P @ modular_displacement(d, emb(ma, mb), emb(na, nb)) @ P.T
        loc = np.kron(modular_displacement(d1, ma, (d2 * na) % d1), modular_displacement(d2, mb, (d1 * nb) % d2))
        # recover the unit from the first nonzero entry, then compare
        idx = np.unravel_index(np.argmax(np.abs(loc)), loc.shape)
        unit = V[idx] / loc[idx]
        units.append(unit)
        fact = max(fact, float(np.abs(V - unit * loc).max()))
    unit_dev = float(max(abs(u_ - 1) for u_ in units))

    additive = 0
    for ma, mb, na, nb in itertools.product(range(d1), range(d2), range(d1), range(d2)):
        lhs = (emb(ma, mb) + emb(na, nb)) % d
        additive += lhs != emb((ma + na) % d1, (mb + nb) % d2)

    w = lambda x, q: np.exp(2j * np.pi * x / q)  # noqa: E731
    lit = corr = 0.0
    counterexample = None
    for ma, mb, na, nb in itertools.product(range(d1), range(d2), range(d1), range(d2)):
        local = w(ma * na, d1) * w(mb * nb, d2)
        r_lit = abs(w(emb(ma, mb) * emb(na, nb), d) - local)
        corr = max(corr, abs(w(emb(ma, mb) * emb_n(na, nb), d) - local))
        if r_lit > lit:
            lit = r_lit
            if counterexample is None and r_lit > tol:
                counterexample = {"m_a": ma, "m_b": mb, "n_a": na, "n_b": nb}

    residuals = {
        "factorisation": fact,
        "unit_deviation": unit_dev,
        "additive_mismatches": float(additive),
        "phase_corrected": float(corr),
    }
    report = FactorReport(
        candidate=f"Z_{d} = Z_{d1} x Z_{d2}",
        acceptable=bool(max(residuals.values()) < tol),
        residuals=residuals,
        index_map={
            "shift": f"m = {d2}*m_a + {d1}*m_b mod {d}",
            "phase_index": f"n = {d2 * u % d}*n_a + {d1 * v % d}*n_b mod {d}",
            "hilbert": f"k = {d2}*k_a + {d1}*k_b mod {d}",
        },
        extra={
            "displacements_checked": d1 * d2 * d1 * d2,
            "phase_literal": {"residual": float(lit), "holds": bool(lit < tol), "counterexample": counterexample},
        },
    )
    if not report.acceptable:
        raise ResidualExceeded(f"CRT factorisation failed (worst residual {report.worst_residual:.3g})", report.worst_residual)
    return report

