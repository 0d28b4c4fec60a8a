"""Tomography protocols: qubit SIC-POVM, product SIC for two qubits, PVM in
mutually unbiased bases, finite-shot simulation and redundancy accounting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NotNormalized, ShapeMismatch, UnknownScheme, UsageError, VerificationError, WrongDimension
from .fields import build_field
from .linalg import EQ_TOL, fidelity, psd_projection, tensor, trace_distance
from .wigner import MUBSet, build_wigner_family, mean_king_infer, wigner_distribution  # noqa: F401

SQRT3 = np.sqrt(3.0)
ALPHA = np.sqrt(1 + 1 / SQRT3)
BETA = np.sqrt(1 - 1 / SQRT3)
GENERATOR = "numpy.random.Generator(PCG64)"

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)


@dataclass(frozen=True, eq=False)
class POVM:
    elements: np.ndarray  # (K, D, D)
    labels: tuple[str, ...]
    name: str = ""

    @property
    def dim(self) -> int:
        return self.elements.shape[-1]

    def residuals(self) -> dict[str, float]:
        E = self.elements
        herm = float(np.abs(E - E.conj().transpose(0, 2, 1)).max())
        floor = float(min(np.linalg.eigvalsh((e + e.conj().T) / 2).min() for e in E))
        comp = float(np.abs(E.sum(axis=0) - np.eye(self.dim)).max())
        return {"hermitian": herm, "eigen_floor": floor, "completeness": comp}

    def check(self, tol: float = EQ_TOL) -> "POVM":
        r = self.residuals()
        if r["hermitian"] > tol or r["eigen_floor"] < -tol or r["completeness"] > tol:
            raise VerificationError(f"{self.name or 'POVM'} fails its checks: {r}")
        return self

    def probabilities(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ShapeMismatch(f"state of shape {rho.shape} does not match POVM dimension {self.dim}")
        return np.einsum("kxy,yx->k", self.elements, rho).real

    def invert(self, probs) -> np.ndarray:
        """Linear inversion through the pseudo-inverse of the measurement map."""
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (len(self.elements),):
            raise ShapeMismatch(f"need {len(self.elements)} probabilities, got shape {probs.shape}")
        D = self.dim
        A = self.elements.conj().reshape(len(self.elements), D * D)  # p_k = <E_k, rho>
        return (np.linalg.pinv(A) @ probs).reshape(D, D)


@dataclass(frozen=True)
class BlochVector:
    px: float
    py: float
    pz: float

    def __post_init__(self):
        if np.linalg.norm(self.as_array()) > 1 + 1e-10:
            raise UsageError(f"Bloch vector {self.as_array()} lies outside the ball")

    def as_array(self) -> np.ndarray:
        return np.array([self.px, self.py, self.pz])

    def density(self) -> np.ndarray:
        return 0.5 * (I2 + self.px * SX + self.py * SY + self.pz * SZ)

    @classmethod
    def from_density(cls, rho) -> "BlochVector":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ShapeMismatch("Bloch vectors describe qubits only")
        return cls(*(float(np.trace(rho @ s).real) for s in (SX, SY, SZ)))


@dataclass
class CountHistogram:
    counts: list[int]
    shots: int
    seed: int
    scheme: str
    generator: str = GENERATOR

    def __post_init__(self):
        if sum(self.counts) != self.shots:
            raise UsageError("counts do not add up to the number of shots")

    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.shots

    def to_json(self) -> dict:
        return {
            "counts": list(self.counts),
            "shots": self.shots,
            "seed": self.seed,
            "scheme": self.scheme,
            "generator": self.generator,
        }


# ---- qubit SIC ---------------------------------------------------------------


def sic_unitary_qubit(tol: float = 1e-12) -> np.ndarray:
    """System-plus-ancilla unitary realising the covariant qubit SIC.

    The (1, 2) entry (0-based) carries beta, following the alpha/beta
    pattern of the other entries.
    """
    w = np.exp(1j * np.pi / 4)
    a, b = ALPHA, BETA
    U = 0.5 * np.array(
        [
            [w * a, a, b, -w * b],
            [a, -w.conj() * a, -w.conj() * b, -b],
            [b, -w * b, w * a, a],
            [-w.conj() * b, -b, a, -w.conj() * a],
        ]
    )
    res = float(np.abs(U.conj().T @ U - np.eye(4)).max())
    if res > tol:
        raise VerificationError(f"SIC unitary is not unitary (residual {res:.3g})", res)
    return U


SIC_LABELS = ("00", "01", "10", "11")


def operational_sic_probabilities(rho) -> np.ndarray:
    """Diagonal of U (rho x |0><0|) U^dagger in the product computational basis."""
    rho = _qubit(rho)
    U = sic_unitary_qubit()
    out = U @ np.kron(rho, np.diag([1.0, 0.0])) @ U.conj().T
    return np.diag(out).real.copy()


def sic_povm_qubit(tol: float = 1e-10) -> POVM:
    """The four effects E_ij = <0|_b U^dagger |ij><ij| U |0>_b on the system.

    Each effect is half a projector onto a Pauli-displaced fiducial.
    """
    U = sic_unitary_qubit()
    # columns 0 and 2 are the ancilla-|0> inputs
    vecs = U[:, [0, 2]].conj()
    E = np.stack([np.outer(v, v.conj()) for v in vecs])
    povm = POVM(E, SIC_LABELS, "sic-povm").check(tol)
    ov = sic_fiducial_overlaps(povm)
    dev = float(np.abs(ov - 1 / 3).max())
    if dev > tol:
        raise VerificationError(f"fiducial overlaps deviate from 1/3 by {dev:.3g}", dev)
    return povm


def fiducials(povm: POVM) -> np.ndarray:
    """Unit vectors spanning each rank-one effect."""
    out = []
    for E in povm.elements:
        vals, vecs = np.linalg.eigh(E)
        out.append(vecs[:, -1])
    return np.array(out)


def sic_fiducial_overlaps(povm: POVM) -> np.ndarray:
    """|<phi_a|phi_b>|**2 for the distinct pairs, in lexicographic order."""
    f = fiducials(povm)
    return np.array([abs(np.vdot(f[a], f[b])) ** 2 for a, b in itertools.combinations(range(len(f)), 2)])


def _qubit(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ShapeMismatch(f"expected a qubit state, got shape {rho.shape}")
    return rho


def closed_form_sic_probabilities(b: BlochVector) -> np.ndarray:
    px, py, pz = b.as_array()
    r = 1 / SQRT3
    return 0.25 * np.array(
        [
            1 + r * (px + py + pz),
            1 + r * (-px - py + pz),
            1 + r * (px - py - pz),
            1 + r * (-px + py - pz),
        ]
    )


_QUBIT_FIELD = build_field(2, 1)
_QUBIT_WIGNER = build_wigner_family(_QUBIT_FIELD)


def _affine_from_wigner(rho) -> np.ndarray:
    W = wigner_distribution(rho, _QUBIT_WIGNER).values.reshape(4)
    return W / SQRT3 + (1 - 1 / SQRT3) / 4


def discover_sic_index_map(n_states: int = 8, seed: int = 7) -> tuple[int, ...]:
    """Permutation pi with P[ij] = affine(W)[pi[ij]], W flattened as 2k + l.

    Found by testing all 24 permutations on random states; the first match
    in lexicographic order is returned.
    """
    rng = np.random.default_rng(seed)
    states = [random_qubit(rng) for _ in range(n_states)]
    P = np.array([operational_sic_probabilities(r) for r in states])
    A = np.array([_affine_from_wigner(r) for r in states])
    for perm in itertools.permutations(range(4)):
        if np.abs(P - A[:, list(perm)]).max() < 1e-10:
            return perm
    raise VerificationError("no index correspondence makes the SIC probabilities affine in W")


def random_qubit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
    return BlochVector(*v).density()


SIC_INDEX_MAP = discover_sic_index_map()


@dataclass
class SICProbabilities:
    values: np.ndarray  # P00, P01, P10, P11
    operational_residual: float
    wigner_residual: float
    index_map: tuple[int, ...] = SIC_INDEX_MAP

    def to_json(self) -> dict:
        return {
            "P": dict(zip(SIC_LABELS, map(float, self.values))),
            "operational_residual": self.operational_residual,
            "wigner_residual": self.wigner_residual,
            "index_map": {SIC_LABELS[i]: f"W{SIC_LABELS[j]}" for i, j in enumerate(self.index_map)},
        }


def sic_probabilities(rho, tol: float = 1e-10) -> SICProbabilities:
    """Closed-form SIC probabilities, checked against the unitary and the Wigner function."""
    rho = _qubit(rho)
    P = closed_form_sic_probabilities(BlochVector.from_density(rho))
    op = float(np.abs(P - operational_sic_probabilities(rho)).max())
    wg = float(np.abs(P - _affine_from_wigner(rho)[list(SIC_INDEX_MAP)]).max())
    if max(op, wg) > tol:
        raise VerificationError(f"SIC probability cross-check failed ({op:.3g}, {wg:.3g})", max(op, wg))
    return SICProbabilities(values=P, operational_residual=op, wigner_residual=wg)


def bloch_from_sic(P, tol: float = 1e-6) -> BlochVector:
    P = np.asarray(P, dtype=float)
    if P.shape != (4,):
        raise ShapeMismatch("need the four probabilities P00, P01, P10, P11")
    if abs(P.sum() - 1) > tol:
        raise NotNormalized(f"probabilities sum to {P.sum():.6g}")
    p00, p01, p10, p11 = P
    return BlochVector(
        float(SQRT3 * (p00 - p01 + p10 - p11)),
        float(SQRT3 * (p00 - p01 - p10 + p11)),
        float(SQRT3 * (p00 + p01 - p10 - p11)),
    )


# ---- two-qubit product SIC ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProductSIC:
    povm: POVM
    frame_rank: int
    condition_number: float
    overlap_values: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "elements": len(self.povm.elements),
            "frame_rank": self.frame_rank,
            "condition_number": self.condition_number,
            "overlap_values": list(self.overlap_values),
            "residuals": self.povm.residuals(),
        }


def pauli_frame(povm: POVM, n_qubits: int) -> np.ndarray:
    """Real matrix F[k, s] = tr(E_k P_s) over the 4**n Pauli products."""
    prods = [tensor(*ps) for ps in itertools.product(PAULIS, repeat=n_qubits)]
    return np.array([[np.trace(E @ P).real for P in prods] for E in povm.elements])


def product_sic_two_qubit(tol: float = 1e-10) -> ProductSIC:
    local = sic_povm_qubit()
    E = np.stack([np.kron(a, b) for a, b in itertools.product(local.elements, repeat=2)])
    labels = tuple(f"{a}|{b}" for a, b in itertools.product(SIC_LABELS, repeat=2))
    povm = POVM(E, labels, "product-sic").check(tol)
    F = pauli_frame(povm, 2)
    rank = int(np.linalg.matrix_rank(F, tol=1e-10))
    cond = float(np.linalg.cond(F))
    f = fiducials(povm)
    mods = [abs(np.vdot(f[a], f[b])) for a, b in itertools.combinations(range(len(f)), 2)]
    values = tuple(sorted({round(float(m), 10) for m in mods}))
    return ProductSIC(povm=povm, frame_rank=rank, condition_number=cond, overlap_values=values)


# ---- PVM in mutually unbiased bases ------------------------------------------


def mub_probabilities(rho, mubs: MUBSet) -> np.ndarray:
    """(d + 1, d) array of <e^k_i| rho |e^k_i>."""
    rho = np.asarray(rho, dtype=complex)
    D = mubs.bases.shape[-1]
    if rho.shape != (D, D):
        raise ShapeMismatch(f"state of shape {rho.shape} does not match basis dimension {D}")
    return np.einsum("kix,xy,kiy->ki", mubs.bases.conj(), rho, mubs.bases).real


def mub_inversion(probs, mubs: MUBSet) -> np.ndarray:
    """rho = sum_k sum_i p_ki |e^k_i><e^k_i| - I."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != mubs.bases.shape[:2]:
        raise ShapeMismatch(f"need probabilities of shape {mubs.bases.shape[:2]}, got {probs.shape}")
    D = mubs.bases.shape[-1]
    proj = np.einsum("kix,kiy->kixy", mubs.bases, mubs.bases.conj())
    return np.einsum("ki,kixy->xy", probs, proj) - np.eye(D)


def pvm_mub_tomography(rho, mubs: MUBSet) -> np.ndarray:
    """Reconstruction from the exact outcome probabilities."""
    return mub_inversion(mub_probabilities(rho, mubs), mubs)


# ---- finite-shot simulation --------------------------------------------------


@dataclass
class EstimateResult:
    histograms: list[CountHistogram]
    estimate: np.ndarray
    projected: np.ndarray
    fidelity: float
    trace_distance: float
    seed: int
    scheme: str

    def to_json(self) -> dict:
        counts = [h.counts for h in self.histograms]
        return {
            "scheme": self.scheme,
            "seed": self.seed,
            "generator": GENERATOR,
            "shots": self.histograms[0].shots,
            "counts": counts[0] if len(counts) == 1 else counts,
            "estimate": complex_matrix_json(self.estimate),
            "estimate_psd": complex_matrix_json(self.projected),
            "fidelity": self.fidelity,
            "trace_distance": self.trace_distance,
        }


def complex_matrix_json(a) -> list:
    """Nested lists of [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=complex)]


def _draw(rng: np.random.Generator, shots: int, probs: np.ndarray) -> list[int]:
    p = np.clip(probs, 0, None)
    return [int(c) for c in rng.multinomial(shots, p / p.sum())]


def sample_and_estimate(rho, scheme: POVM | MUBSet, shots: int, seed: int) -> EstimateResult:
    """Draw multinomial counts from the exact probabilities and invert them.

    A POVM is sampled ``shots`` times. For mutually unbiased bases each basis
    is measured ``shots`` times. The raw linear-inversion estimate is kept
    alongside its projection onto density matrices; fidelity and trace
    distance refer to the projection.
    """
    if shots < 1:
        raise UsageError("shots must be at least 1")
    rho = np.asarray(rho, dtype=complex)
    rng = np.random.default_rng(seed)
    if isinstance(scheme, POVM):
        name = scheme.name or "povm"
        hist = [CountHistogram(_draw(rng, shots, scheme.probabilities(rho)), shots, seed, name)]
        est = scheme.invert(hist[0].frequencies())
    elif isinstance(scheme, MUBSet):
        name = "mub-pvm"
        probs = mub_probabilities(rho, scheme)
        hist = [CountHistogram(_draw(rng, shots, p), shots, seed, f"{name}[{k}]") for k, p in enumerate(probs)]
        est = mub_inversion(np.array([h.frequencies() for h in hist]), scheme)
    else:
        raise UnknownScheme(f"cannot sample from {type(scheme).__name__}")
    proj = psd_projection(est)
    return EstimateResult(
        histograms=hist,
        estimate=est,
        projected=proj,
        fidelity=fidelity(rho, proj),
        trace_distance=trace_distance(rho, proj),
        seed=seed,
        scheme=name,
    )


# ---- redundancy --------------------------------------------------------------


@dataclass(frozen=True)
class RedundancyLedger:
    scheme: str
    d: int
    measurements: int
    counting_rates: int
    free_parameters: int

    def __post_init__(self):
        if self.counting_rates < self.free_parameters + self.measurements:
            raise UsageError("fewer counting rates than parameters plus normalisations")

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "d": self.d,
            "measurements": self.measurements,
            "counting_rates": self.counting_rates,
            "free_parameters": self.free_parameters,
        }


SCHEMES = ("mub-pvm", "sic-povm", "local-mub-two-qubit")


def redundancy_ledger(scheme: str, d: int) -> RedundancyLedger:
    if d < 2:
        raise UsageError("dimension must be at least 2")
    if scheme == "mub-pvm":
        meas, rates = d + 1, d * d + d
    elif scheme == "sic-povm":
        meas, rates = 1, d * d
    elif scheme == "local-mub-two-qubit":
        q = int(round(np.sqrt(d)))
        if q * q != d:
            raise WrongDimension(f"local MUB tomography of two subsystems needs a square dimension, got {d}")
        meas, rates = (q + 1) ** 2, (q + 1) ** 2 * q * q
    else:
        raise UnknownScheme(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    return RedundancyLedger(scheme, d, meas, rates, d * d - 1)
