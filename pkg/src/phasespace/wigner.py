"""Discrete Wigner (phase-point) operators over GF(d) and their checks.

For a phase convention ``phi`` the d**2 operators are

    W(i1, i2) = (1/d) sum_{m,n} gamma**(-i1 n + i2 m) phi[m, n] V(m, n)

Averaging W along a line of the d x d phase space gives a rank-one
projector when every commuting family is phased into a group; the d lines
of one direction give an orthonormal basis and the d + 1 directions give
mutually unbiased bases.

Lines are parametrised as ``{(offset, a)}`` (vertical, direction 0) and
``{(a, offset + s a)}`` (direction k >= 1, slope s = k - 1), so ``offset``
is always the index of the basis state the line produces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .displacement import (
    PhaseConvention,
    all_displacements,
    canonical_conventions,
    closure_residual,
    phase_grid,
)
from .errors import AcceptabilityFailure, ClosureFailure, InvalidDirection, ShapeMismatch, UsageError, WrongDimension
from .fields import FieldTables
from .linalg import EQ_TOL, PROJ_TOL, check_density, extract_pure_state


@dataclass(frozen=True, eq=False)
class WignerFamily:
    F: FieldTables
    ops: np.ndarray = field(repr=False)  # (d, d, D, D), indexed [i1, i2]
    phases: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    @property
    def d(self) -> int:
        return self.F.d

    @property
    def dim(self) -> int:
        return self.ops.shape[-1]

    def __getitem__(self, point) -> np.ndarray:
        i1, i2 = point
        return self.ops[i1, i2]


def character_grid(F: FieldTables) -> np.ndarray:
    """chi[i1, i2, m, n] = gamma**(-i1 n + i2 m)."""
    r = np.arange(F.d)
    i1, i2 = r[:, None, None, None], r[None, :, None, None]
    m, n = r[None, None, :, None], r[None, None, None, :]
    return F.gamma[F.add[F.neg[F.mul[i1, n]], F.mul[i2, m]]]


def wigner_ops_from_phases(F: FieldTables, phi: np.ndarray) -> np.ndarray:
    d = F.d
    coeff = (character_grid(F) * phi[None, None]).reshape(d * d, d * d)
    V = all_displacements(F).reshape(d * d, d * d)
    return (coeff @ V).reshape(d, d, d, d) / d


def family_invariant_residuals(ops: np.ndarray) -> dict[str, float]:
    """Hermiticity, unit trace (a) and orthonormality to d (b)."""
    d1, d2, D, _ = ops.shape
    flat = ops.reshape(d1 * d2, D, D)
    herm = float(np.abs(flat - flat.conj().transpose(0, 2, 1)).max())
    tr = float(np.abs(np.trace(flat, axis1=1, axis2=2) - 1).max())
    vecs = flat.reshape(d1 * d2, D * D)
    gram = vecs.conj() @ vecs.T
    ortho = float(np.abs(gram - D * np.eye(d1 * d2)).max())
    return {"hermitian": herm, "a": tr, "b": ortho}


def build_wigner_family(
    F: FieldTables,
    conventions: list[PhaseConvention] | None = None,
    *,
    verify_closure: bool = True,
    tol: float = PROJ_TOL,
    label: str = "",
) -> WignerFamily:
    """Assemble the d**2 Wigner operators for a set of per-family phases.

    With ``conventions=None`` the canonical phases are used. Hermiticity,
    unit trace and orthonormality are verified here; line averages are left
    to ``verify_acceptability``. ``verify_closure=False`` admits conventions
    that do not close into groups, for negative controls.
    """
    if conventions is None:
        conventions = canonical_conventions(F)
        label = label or "canonical"
    if verify_closure:
        for conv in conventions:
            res = closure_residual(F, conv)
            if res > EQ_TOL:
                raise ClosureFailure(f"family {conv.family.l} does not close (residual {res:.3g})", res)
    phi = phase_grid(F, conventions)
    ops = wigner_ops_from_phases(F, phi)
    res = family_invariant_residuals(ops)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        name, worst = max(bad.items(), key=lambda kv: kv[1])
        raise AcceptabilityFailure(f"Wigner family fails {name} (residual {worst:.3g})", worst)
    return WignerFamily(F=F, ops=ops, phases=phi, label=label)


@dataclass(frozen=True)
class LineSpec:
    kind: str  # "vertical" or "sloped"
    offset: int
    slope: int = 0

    def points(self, F: FieldTables) -> list[tuple[int, int]]:
        if self.kind == "vertical":
            return [(self.offset, a) for a in range(F.d)]
        if self.kind == "sloped":
            return [(a, int(F.add[self.offset, F.mul[self.slope, a]])) for a in range(F.d)]
        raise UsageError(f"unknown line kind {self.kind!r}")

    @property
    def direction(self) -> int:
        return 0 if self.kind == "vertical" else self.slope + 1


def direction_lines(F: FieldTables, direction: int) -> list[LineSpec]:
    """The d parallel lines of one direction, ordered by offset."""
    if not 0 <= direction <= F.d:
        raise InvalidDirection(f"direction must lie in [0, {F.d}], got {direction}")
    if direction == 0:
        return [LineSpec("vertical", o) for o in range(F.d)]
    return [LineSpec("sloped", o, direction - 1) for o in range(F.d)]


def line_average(fam: WignerFamily, line: LineSpec) -> np.ndarray:
    pts = line.points(fam.F)
    return sum(fam[p] for p in pts) / fam.d


@dataclass
class AcceptabilityReport:
    hermitian: float
    a: float
    b: float
    c: float
    tol: float
    worst_line: dict | None = None

    @property
    def passed(self) -> bool:
        return max(self.hermitian, self.a, self.b, self.c) < self.tol

    def to_json(self) -> dict:
        return {
            "hermitian": self.hermitian,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "tol": self.tol,
            "passed": self.passed,
            "worst_line": self.worst_line,
        }


def direction_averages(fam: WignerFamily, direction: int) -> np.ndarray:
    """(d, D, D) stack of line averages for the parallel lines of a direction."""
    return np.stack([line_average(fam, ln) for ln in direction_lines(fam.F, direction)])


def _property_c(fam: WignerFamily) -> tuple[float, dict | None]:
    worst, where = 0.0, None
    eye = np.eye(fam.d)
    for k in range(fam.d + 1):
        P = direction_averages(fam, k)
        herm = np.abs(P - P.conj().transpose(0, 2, 1)).max(axis=(1, 2))
        idem = np.abs(P @ P - P).max(axis=(1, 2))
        tr = np.abs(np.trace(P, axis1=1, axis2=2) - 1)
        flat = P.reshape(fam.d, -1)
        overlaps = np.abs(flat.conj() @ flat.T - eye).max()
        res = max(herm.max(), idem.max(), tr.max(), overlaps)
        if res > worst or where is None:
            worst, where = float(res), {"direction": k, "residual": float(res)}
    return worst, where


def verify_acceptability(fam: WignerFamily, tol: float = PROJ_TOL) -> AcceptabilityReport:
    """Residuals for unit trace (a), orthonormality (b) and line averages (c).

    For (c) each line average must be a rank-one projector and averages of
    parallel lines must be mutually orthogonal; the reported value is the
    worst defect across all d + 1 directions.
    """
    inv = family_invariant_residuals(fam.ops)
    c, where = _property_c(fam)
    return AcceptabilityReport(hermitian=inv["hermitian"], a=inv["a"], b=inv["b"], c=c, tol=tol, worst_line=where)


@dataclass(frozen=True, eq=False)
class MUBSet:
    bases: np.ndarray  # (d + 1, d, D); bases[k, i] is the i-th state of basis k
    provenance: tuple[str, ...]

    def basis_matrix(self, k: int) -> np.ndarray:
        """Columns are the states of basis k."""
        return self.bases[k].T


def mub_residuals(bases: np.ndarray) -> dict[str, float]:
    nb, d, _ = bases.shape
    orth, unbiased = 0.0, 0.0
    for k in range(nb):
        g = bases[k].conj() @ bases[k].T
        orth = max(orth, float(np.abs(g - np.eye(d)).max()))
    for k, l in itertools.combinations(range(nb), 2):
        ov = np.abs(bases[k].conj() @ bases[l].T) ** 2
        unbiased = max(unbiased, float(np.abs(ov - 1 / d).max()))
    return {"orthonormal": orth, "unbiased": unbiased}


def mubs_from_wigner(fam: WignerFamily, tol: float = PROJ_TOL) -> MUBSet:
    bases = np.empty((fam.d + 1, fam.d, fam.dim), dtype=complex)
    prov = []
    for k in range(fam.d + 1):
        for ln in direction_lines(fam.F, k):
            bases[k, ln.offset] = extract_pure_state(line_average(fam, ln), tol)
        prov.append("vertical lines" if k == 0 else f"lines of slope {k - 1}")
    res = mub_residuals(bases)
    worst = max(res.values())
    if worst > tol:
        raise AcceptabilityFailure(f"extracted bases are not mutually unbiased (residual {worst:.3g})", worst)
    return MUBSet(bases=bases, provenance=tuple(prov))


@dataclass(frozen=True, eq=False)
class WignerDistribution:
    values: np.ndarray  # (d, d) real, indexed [i1, i2]


@dataclass(frozen=True, eq=False)
class WeylDistribution:
    F: FieldTables
    values: np.ndarray  # (d, d) complex, indexed [i, j] for V(i, j)


def wigner_distribution(rho, fam: WignerFamily) -> WignerDistribution:
    """w(i1, i2) = tr(rho W(i1, i2)) / d, so that the values sum to one."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (fam.dim, fam.dim):
        raise ShapeMismatch(f"state of shape {rho.shape} does not match dimension {fam.dim}")
    vals = np.einsum("abxy,yx->ab", fam.ops, rho) / fam.d
    return WignerDistribution(values=vals.real.copy())


def weyl_distribution(rho, F: FieldTables) -> WeylDistribution:
    """w(i, j) = tr(rho V(i, j)^dagger) / d."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (F.d, F.d):
        raise ShapeMismatch(f"state of shape {rho.shape} does not match dimension {F.d}")
    V = all_displacements(F)
    return WeylDistribution(F=F, values=np.einsum("ijxy,xy->ij", V.conj(), rho) / F.d)


def reconstruct_density(dist, fam: WignerFamily | None = None) -> np.ndarray:
    if isinstance(dist, WignerDistribution):
        if fam is None:
            raise UsageError("a Wigner family is needed to invert a Wigner distribution")
        if dist.values.shape != fam.ops.shape[:2]:
            raise ShapeMismatch("distribution and family sizes differ")
        return np.einsum("ab,abxy->xy", dist.values, fam.ops)
    if isinstance(dist, WeylDistribution):
        return np.einsum("ij,ijxy->xy", dist.values, all_displacements(dist.F))
    raise UsageError(f"cannot reconstruct from {type(dist).__name__}")


@dataclass
class CovarianceReport:
    residual: float
    inverse_form_residual: float

    def to_json(self) -> dict:
        return {"residual": self.residual, "inverse_form_residual": self.inverse_form_residual}


def covariance_check(fam: WignerFamily) -> CovarianceReport:
    """Displacement covariance of the family.

    ``residual`` is max ||V W(0,0) V^dagger - W(i1, i2)|| with V = V(i1, i2);
    ``inverse_form_residual`` tests V^dagger W(0,0) V instead, which agrees
    only when every element is its own negative (characteristic 2).
    """
    V = all_displacements(fam.F)
    W0 = fam.ops[0, 0]
    fwd = inv = 0.0
    for i1, i2 in itertools.product(range(fam.d), repeat=2):
        v = V[i1, i2]
        fwd = max(fwd, float(np.linalg.norm(v @ W0 @ v.conj().T - fam.ops[i1, i2])))
        inv = max(inv, float(np.linalg.norm(v.conj().T @ W0 @ v - fam.ops[i1, i2])))
    return CovarianceReport(residual=fwd, inverse_form_residual=inv)


def qubit_symplectic_transform(w: WeylDistribution) -> WignerDistribution:
    """Qubit Wigner distribution from the Weyl distribution.

    The Weyl coefficients refer to V(i, j); they are first re-expressed on
    the Pauli operators I, X, Z, Y fixed by the canonical phases, then
    W(k, l) = (1/2) sum_{i,j} (-1)**(i l - j k) w(i, j).
    """
    if w.F.d != 2:
        raise WrongDimension("the symplectic transform is defined for qubits only")
    phi = phase_grid(w.F, canonical_conventions(w.F))
    pauli = w.values * phi.conj()
    out = np.zeros((2, 2))
    for k, l in itertools.product(range(2), repeat=2):
        out[k, l] = 0.5 * sum(
            (-1) ** (i * l - j * k) * pauli[i, j] for i, j in itertools.product(range(2), repeat=2)
        ).real
    return WignerDistribution(values=out)


def line_through(F: FieldTables, direction: int, point: tuple[int, int]) -> LineSpec:
    """The line of ``direction`` containing ``point``."""
    i1, i2 = F.check(point[0]), F.check(point[1])
    if direction == 0:
        return LineSpec("vertical", i1)
    lines = direction_lines(F, direction)
    s = direction - 1
    return lines[F.sub(i2, int(F.mul[s, i1]))]


def mean_king_infer(
    fam: WignerFamily,
    prep_direction: int,
    detector: tuple[int, int],
    check: bool = True,
) -> int:
    """Index of the prepared basis state given the firing phase-space detector.

    Lines of one direction partition phase space, so the detector point lies
    on exactly one of them and that line's offset names the state. With
    ``check`` the prepared state's Wigner value at the detector is confirmed
    to be nonzero.
    """
    if not 0 <= prep_direction <= fam.d:
        raise InvalidDirection(f"direction must lie in [0, {fam.d}], got {prep_direction}")
    line = line_through(fam.F, prep_direction, detector)
    if check:
        psi = extract_pure_state(line_average(fam, line))
        w = wigner_distribution(np.outer(psi, psi.conj()), fam).values
        if abs(w[detector]) < EQ_TOL:
            raise AcceptabilityFailure("prepared state has no Wigner weight at the detector")
    return line.offset


def as_state(rho, d: int) -> np.ndarray:
    rho = check_density(rho)
    if rho.shape != (d, d):
        raise ShapeMismatch(f"state of shape {rho.shape} does not match dimension {d}")
    return rho
