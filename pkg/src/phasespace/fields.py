"""Finite field arithmetic over GF(p^m) by lookup tables.

Elements are integer labels in ``[0, p**m)``. A label's base-p digits,
least significant first, are the coefficients of the polynomial
``sum(digits[n] * t**n)`` reduced modulo the field's defining polynomial,
so addition is digitwise mod p and label 1 is the multiplicative identity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DivisionByZero, NotPrime, ReducibleModulus, UsageError

MAX_ORDER = 256
MODULUS_RULE = "smallest monic irreducible by integer encoding sum(c_k * p**k)"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimePower:
    p: int
    m: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.m < 1:
            raise UsageError(f"extension degree must be positive, got {self.m}")

    @property
    def d(self) -> int:
        return self.p**self.m

    @classmethod
    def from_order(cls, d: int) -> "PrimePower":
        """Factor ``d`` as p**m; raises NotPrime if it is not a prime power."""
        if d < 2:
            raise NotPrime(f"{d} is not a prime power")
        for p in range(2, d + 1):
            if d % p == 0:
                break
        m, rest = 0, d
        while rest % p == 0:
            rest //= p
            m += 1
        if rest != 1:
            raise NotPrime(f"{d} is not a prime power")
        return cls(p, m)


def label_digits(label: int, p: int, m: int) -> list[int]:
    return [(label // p**n) % p for n in range(m)]


def digits_label(digits: Sequence[int], p: int) -> int:
    return sum(int(c) * p**n for n, c in enumerate(digits))


@dataclass(frozen=True, eq=False)
class FieldTables:
    """Complete arithmetic tables for a field of order ``p**m``.

    ``char_weights`` defines the additive character through the
    F_p-linear functional ``c(x) = sum(w_n * digit_n(x)) mod p``; the
    default all-ones vector gives the digit sum.
    """

    p: int
    m: int
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    modulus: tuple[int, ...] | None = None
    char_weights: tuple[int, ...] = ()
    description: str = ""

    def __post_init__(self):
        if not self.char_weights:
            object.__setattr__(self, "char_weights", (1,) * self.m)
        for arr in (self.add, self.mul, self.neg, self.inv):
            arr.setflags(write=False)

    @property
    def d(self) -> int:
        return self.p**self.m

    @property
    def pp(self) -> PrimePower:
        return PrimePower(self.p, self.m)

    @cached_property
    def digit_array(self) -> np.ndarray:
        """(d, m) array of base-p digits, least significant first."""
        labels = np.arange(self.d)
        return np.stack([(labels // self.p**n) % self.p for n in range(self.m)], axis=1)

    def digits(self, x: int) -> list[int]:
        return label_digits(x, self.p, self.m)

    @cached_property
    def char_values(self) -> np.ndarray:
        """c(x) for every label, as integers in [0, p)."""
        return (self.digit_array @ np.array(self.char_weights)) % self.p

    @cached_property
    def gamma(self) -> np.ndarray:
        """gamma**x = exp(2 pi i c(x) / p) for every label."""
        roots = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        # exact zeros keep serialised +-1 and +-i values clean
        roots.real[np.abs(roots.real) < 1e-15] = 0.0
        roots.imag[np.abs(roots.imag) < 1e-15] = 0.0
        return roots[self.char_values]

    @cached_property
    def half_gamma(self) -> np.ndarray:
        """Fixed square root of gamma**x for every label (see char_phase)."""
        if self.p == 2:
            s = self.digit_array @ np.array(self.char_weights)
            return 1j ** (s % 4)
        two = self.add[1, 1]
        halves = self.mul[:, self.inv[two]]
        return self.gamma[halves]

    def check(self, x: int) -> int:
        x = int(x)
        if not 0 <= x < self.d:
            raise UsageError(f"label {x} outside GF({self.d})")
        return x

    def sub(self, x: int, y: int) -> int:
        return int(self.add[x, self.neg[y]])

    def div(self, x: int, y: int) -> int:
        if y == 0:
            raise DivisionByZero(f"division by zero in GF({self.d})")
        return int(self.mul[x, self.inv[y]])

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "modulus": None if self.modulus is None else list(self.modulus),
            "modulus_rule": MODULUS_RULE if self.modulus is not None else self.description,
            "char_weights": list(self.char_weights),
            "add": self.add.tolist(),
            "mul": self.mul.tolist(),
            "neg": self.neg.tolist(),
            "inv": self.inv.tolist(),
        }


def _poly_mul_table(p: int, m: int, modulus: Sequence[int]) -> np.ndarray:
    """Multiplication table of F_p[t]/(modulus) via the regular representation."""
    d = p**m
    # companion matrix of multiplication by t on coefficient vectors
    comp = np.zeros((m, m), dtype=np.int64)
    for n in range(1, m):
        comp[n, n - 1] = 1
    comp[:, m - 1] = [(-c) % p for c in modulus[:m]]
    powers = [np.eye(m, dtype=np.int64)]
    for _ in range(1, m):
        powers.append(comp @ powers[-1] % p)
    basis = np.stack(powers)  # basis[n] = matrix of multiplication by t**n
    labels = np.arange(d)
    digits = np.stack([(labels // p**n) % p for n in range(m)], axis=1)
    mats = np.einsum("xn,nij->xij", digits, basis) % p
    prod = np.einsum("xij,yj->xyi", mats, digits) % p
    return (prod @ (p ** np.arange(m))).astype(np.int64)


def _has_zero_divisors(mul: np.ndarray) -> bool:
    return bool((mul[1:, 1:] == 0).any())


def _tables_from_mul(p: int, m: int, mul: np.ndarray) -> dict:
    d = p**m
    labels = np.arange(d)
    digits = np.stack([(labels // p**n) % p for n in range(m)], axis=1)
    weights = p ** np.arange(m)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    neg = ((-digits) % p) @ weights
    inv = np.zeros(d, dtype=np.int64)
    rows, cols = np.nonzero(mul == 1)
    inv[rows] = cols
    return dict(add=add.astype(np.int64), mul=mul, neg=neg.astype(np.int64), inv=inv)


def build_field(p: int, m: int, modulus: Sequence[int] | None = None) -> FieldTables:
    """Build GF(p**m) tables.

    ``modulus`` lists the coefficients of the defining polynomial, lowest
    degree first (length m+1). When omitted, the monic irreducible with the
    smallest integer encoding ``sum(c_k p**k)`` is used.
    """
    pp = PrimePower(p, m)
    if pp.d > MAX_ORDER:
        raise UsageError(f"field order {pp.d} exceeds {MAX_ORDER}")
    if modulus is not None:
        coeffs = [int(c) % p for c in modulus]
        if len(coeffs) != m + 1 or coeffs[-1] == 0:
            raise UsageError(f"modulus must have {m + 1} coefficients with nonzero leading term")
        lead_inv = pow(coeffs[-1], -1, p)
        coeffs = [c * lead_inv % p for c in coeffs]
        mul = _poly_mul_table(p, m, coeffs)
        if m > 1 and _has_zero_divisors(mul):
            raise ReducibleModulus(f"{coeffs} factors over F_{p}")
    else:
        for low in range(p**m):
            coeffs = label_digits(low, p, m) + [1]
            mul = _poly_mul_table(p, m, coeffs)
            if m == 1 or not _has_zero_divisors(mul):
                break
    return FieldTables(p=p, m=m, modulus=tuple(coeffs), **_tables_from_mul(p, m, mul))


def gf_arith(F: FieldTables, op: str, x: int, y: int | None = None) -> int:
    x = F.check(x)
    if op in ("add", "mul", "div", "sub"):
        if y is None:
            raise UsageError(f"{op} needs two operands")
        y = F.check(y)
    if op == "add":
        return int(F.add[x, y])
    if op == "sub":
        return F.sub(x, y)
    if op == "mul":
        return int(F.mul[x, y])
    if op == "neg":
        return int(F.neg[x])
    if op == "inv":
        if x == 0:
            raise DivisionByZero("zero has no inverse")
        return int(F.inv[x])
    if op == "div":
        return F.div(x, y)
    raise UsageError(f"unknown operation {op!r}")


def char_phase(F: FieldTables, x: int, half: bool = False) -> complex:
    """Additive character gamma**x, or its fixed square root when ``half``.

    For odd p the root is gamma**(x / 2) with field division by 2 = 1 + 1;
    for p = 2 it is i**s(x) with s the weighted digit sum taken as a plain
    integer. Either way ``char_phase(F, x, True)**2 == char_phase(F, x)``.
    """
    x = F.check(x)
    return complex(F.half_gamma[x] if half else F.gamma[x])


def verify_field_axioms(F: FieldTables) -> dict[str, bool]:
    """Exhaustive check of the field axioms; O(d**3) so meant for small d."""
    d, add, mul = F.d, F.add, F.mul
    r = np.arange(d)
    out = {
        "add_commutative": np.array_equal(add, add.T),
        "mul_commutative": np.array_equal(mul, mul.T),
        "add_identity": np.array_equal(add[0], r),
        "mul_identity": np.array_equal(mul[1], r),
        "add_inverse": bool((add[r, F.neg] == 0).all()),
        "mul_inverse": bool((mul[r[1:], F.inv[1:]] == 1).all()),
        "no_zero_divisors": not _has_zero_divisors(mul),
        "add_associative": np.array_equal(add[add[:, :, None], r[None, None, :]], add[r[:, None, None], add[None, :, :]]),
        "mul_associative": np.array_equal(mul[mul[:, :, None], r[None, None, :]], mul[r[:, None, None], mul[None, :, :]]),
        "distributive": np.array_equal(
            mul[r[:, None, None], add[None, :, :]],
            add[mul[:, :, None], mul[:, None, :]],
        ),
    }
    return {k: bool(v) for k, v in out.items()}


@dataclass(frozen=True, eq=False)
class QuadExtension:
    """GF(d**2) as pairs (a, b) = a + b t over GF(d), with t**2 = Q t + R.

    Extended labels are ``a + d * b``. The extension's character reads only
    the ``a`` component, which makes phase-space objects over GF(d**2) split
    into tensor products of objects over GF(d).
    """

    base: FieldTables
    ext: FieldTables
    R: int
    Q: int
    pair_to_elt: np.ndarray = field(repr=False)

    def pair(self, a: int, b: int) -> int:
        return int(self.pair_to_elt[a, b])

    def split(self, x: int) -> tuple[int, int]:
        d = self.base.d
        return x % d, x // d


def build_quadratic_extension(F: FieldTables) -> QuadExtension:
    d = F.d
    if d * d > MAX_ORDER:
        raise UsageError(f"extension order {d * d} exceeds {MAX_ORDER}")
    found = None
    for R, Q in itertools.product(range(1, d), range(d)):
        # t^2 - Q t - R is irreducible iff it has no root in GF(d)
        x = np.arange(d)
        squares_minus = F.add[F.mul[x, x], F.neg[F.add[F.mul[Q, x], R]]]
        if not (squares_minus == 0).any():
            found = (R, Q)
            break
    R, Q = found
    a = np.arange(d)[:, None, None, None]
    b = np.arange(d)[None, :, None, None]
    c = np.arange(d)[None, None, :, None]
    e = np.arange(d)[None, None, None, :]
    bb = F.mul[b, e]
    first = F.add[F.mul[a, c], F.mul[bb, R]]
    second = F.add[F.add[F.mul[a, e], F.mul[b, c]], F.mul[bb, Q]]
    # (a + b t)(c + e t), indexed [a, b, c, e]; relabel pairs to a + d b
    mul_pairs = first + d * second
    mul = np.empty((d * d, d * d), dtype=np.int64)
    pair_to_elt = (np.arange(d)[:, None] + d * np.arange(d)[None, :]).astype(np.int64)
    mul[pair_to_elt[:, :, None, None], pair_to_elt[None, None, :, :]] = mul_pairs
    p, m = F.p, 2 * F.m
    weights = tuple(F.char_weights) + (0,) * F.m
    ext = FieldTables(
        p=p,
        m=m,
        modulus=None,
        char_weights=weights,
        description=f"quadratic extension of GF({d}) by t^2 = {Q} t + {R}",
        **_tables_from_mul(p, m, mul),
    )
    quad = QuadExtension(base=F, ext=ext, R=R, Q=Q, pair_to_elt=pair_to_elt)
    _verify_extension(quad)
    return quad


def _verify_extension(q: QuadExtension) -> None:
    F, E, d = q.base, q.ext, q.base.d
    if _has_zero_divisors(E.mul):
        raise ReducibleModulus("quadratic extension has zero divisors")
    P = q.pair_to_elt
    r = np.arange(d)
    ia, ja = r[:, None], r[None, :]
    a1, b1 = r[:, None, None, None], r[None, :, None, None]
    a2, b2 = r[None, None, :, None], r[None, None, None, :]
    checks = [
        np.array_equal(E.add[P[a1, b1], P[a2, b2]], P[F.add[a1, a2], F.add[b1, b2]]),
        np.array_equal(E.mul[P[ia, 0], P[ja, 0]], P[F.mul[ia, ja], 0]),
        np.array_equal(E.mul[P[ia, 0], P[0, ja]], P[0, F.mul[ia, ja]]),
        np.array_equal(E.mul[P[0, ia], P[0, ja]], P[F.mul[F.mul[ia, ja], q.R], F.mul[F.mul[ia, ja], q.Q]]),
        q.R != 0,
    ]
    if not all(checks):
        raise ReducibleModulus("quadratic extension failed its structural checks")
