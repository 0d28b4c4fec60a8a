"""Generalised displacement operators over GF(d) and their commuting families.

``V(i, j)`` shifts the computational basis by ``i`` and multiplies by the
character ``gamma**((k + i) j)``:

    V(i, j) = sum_k gamma**((k + i) * j) |k + i><k|

The d**2 - 1 non-identity operators split into d + 1 families of d - 1
mutually commuting operators. Family 0 is ``{V(0, j)}``; family ``l >= 1``
is ``{V(i, (l - 1) i)}``, i.e. slope ``l - 1``. Multiplying each member by a
suitable unit phase turns a family plus the identity into a group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ClosureFailure, UsageError
from .fields import FieldTables
from .linalg import EQ_TOL


@dataclass(frozen=True, order=True)
class DisplacementIndex:
    i: int  # shift
    j: int  # phase

    def as_list(self) -> list[int]:
        return [self.i, self.j]


def displacement(F: FieldTables, i: int, j: int) -> np.ndarray:
    i, j = F.check(i), F.check(j)
    k = np.arange(F.d)
    rows = F.add[k, i]
    V = np.zeros((F.d, F.d), dtype=complex)
    V[rows, k] = F.gamma[F.mul[rows, j]]
    return V


def all_displacements(F: FieldTables) -> np.ndarray:
    """(d, d, d, d) array indexed [i, j] -> V(i, j)."""
    d = F.d
    out = np.empty((d, d, d, d), dtype=complex)
    for i, j in itertools.product(range(d), repeat=2):
        out[i, j] = displacement(F, i, j)
    return out


def displacement_product_phase(
    F: FieldTables, a: DisplacementIndex, b: DisplacementIndex
) -> tuple[complex, DisplacementIndex]:
    """Composition law V(a) V(b) = phase * V(c)."""
    phase = complex(F.gamma[F.neg[F.mul[a.i, b.j]]])
    c = DisplacementIndex(int(F.add[a.i, b.i]), int(F.add[a.j, b.j]))
    return phase, c


@dataclass(frozen=True)
class CommutingFamily:
    l: int
    members: tuple[DisplacementIndex, ...]

    @property
    def slope(self) -> int | None:
        return None if self.l == 0 else self.l - 1


def family_members(F: FieldTables, l: int) -> tuple[DisplacementIndex, ...]:
    if not 0 <= l <= F.d:
        raise UsageError(f"family label must lie in [0, {F.d}], got {l}")
    if l == 0:
        return tuple(DisplacementIndex(0, j) for j in range(1, F.d))
    s = l - 1
    return tuple(DisplacementIndex(i, int(F.mul[s, i])) for i in range(1, F.d))


def partition_families(F: FieldTables) -> list[CommutingFamily]:
    return [CommutingFamily(l, family_members(F, l)) for l in range(F.d + 1)]


def family_label(F: FieldTables, idx: DisplacementIndex) -> int:
    """Label of the family containing a non-identity index."""
    if idx.i == 0:
        if idx.j == 0:
            raise UsageError("the identity belongs to every family")
        return 0
    return F.div(idx.j, idx.i) + 1


@dataclass(frozen=True)
class PhaseConvention:
    family: CommutingFamily
    phases: tuple[complex, ...]

    def __post_init__(self):
        if len(self.phases) != len(self.family.members):
            raise UsageError("one phase per family member is required")

    def phase_of(self, idx: DisplacementIndex) -> complex:
        if idx.i == 0 and idx.j == 0:
            return 1.0
        return self.phases[self.family.members.index(idx)]

    def to_json(self) -> dict:
        return {
            "l": self.family.l,
            "members": [m.as_list() for m in self.family.members],
            "phases": [[float(np.real(z)), float(np.imag(z))] for z in self.phases],
        }


def closure_residual(F: FieldTables, conv: PhaseConvention) -> float:
    """max |phase_a phase_b omega_ab - phase_c| over member pairs.

    Uses the composition law, so no matrices are formed; products landing
    on the identity must carry phase exactly 1.
    """
    worst = 0.0
    members = conv.family.members
    for a, b in itertools.product(members, repeat=2):
        omega, c = displacement_product_phase(F, a, b)
        lhs = conv.phase_of(a) * conv.phase_of(b) * omega
        worst = max(worst, abs(lhs - conv.phase_of(c)))
    return worst


def _bits(x: int) -> list[int]:
    return [n for n in range(x.bit_length()) if (x >> n) & 1]


def _even_char_phase(F: FieldTables, s: int, i: int) -> complex:
    """Group-closing phase for V(i, s i) when p = 2.

    On a single nonzero binary digit ``e = 2**n`` of ``i`` the value is
    ``i**S(s e e) * gamma**(s e)`` (S the plain digit sum). Several digits
    combine as the product of their single-digit values times
    ``gamma**(s e_n e_n')`` for every pair of digits, which is the unique
    extension compatible with the composition law.
    """
    bits = [1 << n for n in _bits(i)]
    phase = 1.0 + 0j
    for e in bits:
        phase *= F.half_gamma[F.mul[F.mul[s, e], e]] * F.gamma[F.mul[s, e]]
    for e, f in itertools.combinations(bits, 2):
        phase *= F.gamma[F.mul[F.mul[s, e], f]]
    return complex(phase)


def canonical_phase(F: FieldTables, l: int, member: DisplacementIndex) -> complex:
    """Unit phase attached to ``member`` of family ``l`` by the canonical rule.

    Odd p: gamma**(-(s i i) / 2) with slope s = l - 1. p = 2: see
    ``_even_char_phase``. Family 0 always gets 1. The square of the phase is
    checked against gamma**(-(s i i)).
    """
    if member not in family_members(F, l):
        raise UsageError(f"{member} is not in family {l}")
    if l == 0:
        return 1.0 + 0j
    s, i = l - 1, member.i
    sii = int(F.mul[s, F.mul[i, i]])
    if F.p == 2:
        phase = _even_char_phase(F, s, i)
    else:
        phase = complex(F.half_gamma[F.neg[sii]])
    if abs(phase**2 - F.gamma[F.neg[sii]]) > EQ_TOL:
        raise ClosureFailure(f"squared phase mismatch for {member} in family {l}")
    return phase


def canonical_convention(F: FieldTables, l: int, tol: float = EQ_TOL) -> PhaseConvention:
    fam = CommutingFamily(l, family_members(F, l))
    conv = PhaseConvention(fam, tuple(canonical_phase(F, l, m) for m in fam.members))
    res = closure_residual(F, conv)
    if res > tol:
        raise ClosureFailure(f"canonical phases for family {l} do not close (residual {res:.3g})", res)
    return conv


def canonical_conventions(F: FieldTables) -> list[PhaseConvention]:
    return [canonical_convention(F, l) for l in range(F.d + 1)]


def build_U_family(F: FieldTables, conv: PhaseConvention, tol: float = EQ_TOL) -> list[np.ndarray]:
    """Phased family members, verified to close and to satisfy U(i)^dagger = U(-i)."""
    members = conv.family.members
    U = {m: conv.phase_of(m) * displacement(F, m.i, m.j) for m in members}
    U[DisplacementIndex(0, 0)] = np.eye(F.d, dtype=complex)
    for a, b in itertools.product(members, repeat=2):
        c = DisplacementIndex(int(F.add[a.i, b.i]), int(F.add[a.j, b.j]))
        res = float(np.abs(U[a] @ U[b] - U[c]).max())
        if res > tol:
            raise ClosureFailure(f"U{a.as_list()} U{b.as_list()} != U{c.as_list()} (residual {res:.3g})", res)
    for a in members:
        inv = DisplacementIndex(int(F.neg[a.i]), int(F.neg[a.j]))
        res = float(np.abs(U[a].conj().T - U[inv]).max())
        if res > tol:
            raise ClosureFailure(f"U{a.as_list()}^dagger != U{inv.as_list()} (residual {res:.3g})", res)
    return [U[m] for m in members]


UNIT_PHASES = (1.0 + 0j, -1.0 + 0j, 1j, -1j)


def enumerate_sign_conventions(
    F: FieldTables, family: CommutingFamily, tol: float = EQ_TOL
) -> list[PhaseConvention]:
    """Every assignment of phases from {1, -1, i, -i} that closes ``family`` (p = 2)."""
    if F.p != 2:
        raise UsageError("sign enumeration is defined for characteristic 2 only")
    out = []
    for phases in itertools.product(UNIT_PHASES, repeat=len(family.members)):
        conv = PhaseConvention(family, phases)
        if closure_residual(F, conv) < tol:
            out.append(conv)
    return out


def phase_grid(F: FieldTables, conventions: list[PhaseConvention]) -> np.ndarray:
    """(d, d) array ``phi`` with U(m, n) = phi[m, n] V(m, n); phi[0, 0] = 1."""
    by_label = {c.family.l: c for c in conventions}
    if sorted(by_label) != list(range(F.d + 1)):
        raise UsageError(f"need one convention per family 0..{F.d}")
    phi = np.ones((F.d, F.d), dtype=complex)
    for conv in conventions:
        for m in conv.family.members:
            phi[m.i, m.j] = conv.phase_of(m)
    return phi


def conventions_from_grid(F: FieldTables, phi: np.ndarray) -> list[PhaseConvention]:
    out = []
    for fam in partition_families(F):
        out.append(PhaseConvention(fam, tuple(complex(phi[m.i, m.j]) for m in fam.members)))
    return out
