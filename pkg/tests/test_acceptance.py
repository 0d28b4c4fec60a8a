"""Acceptance criteria, one test each, at the stated tolerances and time budgets.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from phasespace.displacement import DisplacementIndex, all_displacements, displacement_product_phase
from phasespace.factor import (
    SignAssignment,
    crt_factor_check,
    factor_odd_bipartite,
    product_family,
    scan_summary,
    scan_three_qubit_products,
    scan_two_qubit_products,
)
from phasespace.fields import build_field
from phasespace.linalg import random_density
from phasespace.tomography import (
    BlochVector,
    closed_form_sic_probabilities,
    operational_sic_probabilities,
    product_sic_two_qubit,
    pvm_mub_tomography,
    random_qubit,
    redundancy_ledger,
    sample_and_estimate,
    sic_fiducial_overlaps,
    sic_povm_qubit,
    sic_probabilities,
    sic_unitary_qubit,
)
from phasespace.wigner import (
    build_wigner_family,
    mean_king_infer,
    mub_residuals,
    mubs_from_wigner,
    verify_acceptability,
    wigner_distribution,
)

ORDERS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1), 8: (2, 3), 9: (3, 2)}
RESULTS: dict[int, str] = {}


def record(n: int, title: str, ok: bool, detail: str, elapsed: float, budget: float | None) -> None:
    in_time = budget is None or elapsed < budget
    timing = f"{elapsed:.2f}s" + (f" < {budget:g}s" if budget is not None else "")
    status = "PASS" if ok and in_time else "FAIL"
    RESULTS[n] = f"{status} criterion {n:>2}: {title} | {detail} | {timing}"
    print(RESULTS[n])
    assert ok, RESULTS[n]
    assert in_time, RESULTS[n]


def field(d):
    return build_field(*ORDERS[d])


def test_criterion_01_gf4_tables():
    t = time.perf_counter()
    F = build_field(2, 2)
    mul_ok = F.mul.tolist() == [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]]
    add_ok = F.add.tolist() == [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
    record(1, "GF(4) tables", mul_ok and add_ok, f"mul exact={mul_ok} add exact={add_ok}", time.perf_counter() - t, 1)


def test_criterion_02_character_and_composition_identities():
    t = time.perf_counter()
    worst = {"character_sum": 0.0, "additivity": 0.0, "composition": 0.0}
    for d in (2, 3, 4, 5, 8, 9):
        F = field(d)
        for i in range(d):
            s = F.gamma[F.mul[np.arange(d), i]].sum()
            worst["character_sum"] = max(worst["character_sum"], abs(s - (d if i == 0 else 0)))
        g = F.gamma
        worst["additivity"] = max(worst["additivity"], float(np.abs(g[:, None] * g[None, :] - g[F.add]).max()))
        V = all_displacements(F)
        for a in itertools.product(range(d), repeat=2):
            for b in itertools.product(range(d), repeat=2):
                ph, c = displacement_product_phase(F, DisplacementIndex(*a), DisplacementIndex(*b))
                worst["composition"] = max(worst["composition"], float(np.abs(V[a] @ V[b] - ph * V[c.i, c.j]).max()))
    ok = max(worst.values()) < 1e-10
    detail = " ".join(f"{k}={v:.1e}" for k, v in worst.items())
    record(2, "character sums, additivity, composition law", ok, detail, time.perf_counter() - t, 10)


def test_criterion_03_acceptability_and_mubs():
    t = time.perf_counter()
    worst = {"a": 0.0, "b": 0.0, "c": 0.0, "unbiased": 0.0}
    for d in (2, 3, 4, 5, 7, 8, 9):
        fam = build_wigner_family(field(d))
        rep = verify_acceptability(fam)
        for k in ("a", "b", "c"):
            worst[k] = max(worst[k], getattr(rep, k))
        res = mub_residuals(mubs_from_wigner(fam).bases)
        worst["unbiased"] = max(worst["unbiased"], res["unbiased"], res["orthonormal"])
    ok = max(worst.values()) < 1e-8
    detail = " ".join(f"{k}={v:.1e}" for k, v in worst.items())
    record(3, "acceptability (a)(b)(c) and unbiasedness", ok, detail, time.perf_counter() - t, 60)


def test_criterion_04_two_qubit_count():
    t = time.perf_counter()
    reps = scan_two_qubit_products()
    s = scan_summary(reps)
    fam = product_family(build_field(2, 2), SignAssignment(((1, 1, 1), (-1, -1, -1))))
    X = np.array([[0, 1], [1, 0]])
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.diag([1, -1])
    I2 = np.eye(2)
    target = np.kron(0.5 * (I2 + X + Y + Z), 0.5 * (I2 - X - Y - Z))
    origin = float(np.abs(fam[0, 0] - target).max())
    mixed_ok = next(r for r in reps if r.candidate.endswith("(+,+,+) x (-,-,-)")).acceptable
    ok = s["acceptable"] == 32 and s["total"] == 64 and origin < 1e-10 and mixed_ok
    detail = f"{s['acceptable']}/{s['total']} acceptable, mixed-sign W(0,0) residual={origin:.1e}"
    record(4, "two-qubit product count", ok, detail, time.perf_counter() - t, 30)


def test_criterion_05_three_qubit_impossibility():
    t = time.perf_counter()
    s = scan_summary(scan_three_qubit_products())
    ok = s["acceptable"] == 0 and s["total"] == 512 and s["witness_agrees"]
    detail = f"{s['acceptable']}/{s['total']} acceptable, witness agrees={s['witness_agrees']}"
    record(5, "three-qubit products never acceptable", ok, detail, time.perf_counter() - t, 120)


def test_criterion_06_odd_bipartite():
    t = time.perf_counter()
    res = {p: factor_odd_bipartite(p, 1).residuals["factorisation"] for p in (3, 5)}
    ok = max(res.values()) < 1e-8
    detail = " ".join(f"p={p}: {v:.1e}" for p, v in res.items())
    record(6, "odd bipartite factorisation", ok, detail, time.perf_counter() - t, 120)


def test_criterion_07_crt_fifteen():
    """All 225 displacements factor; the displayed phase identity is asserted literally."""
    t = time.perf_counter()
    rep = crt_factor_check(3, 5)
    lit = rep.extra["phase_literal"]
    fact_ok = rep.acceptable and rep.extra["displacements_checked"] == 225
    ok = fact_ok and lit["residual"] < 1e-10
    detail = (
        f"factorisations ok={fact_ok} (worst {rep.worst_residual:.1e}); "
        f"literal phase identity residual={lit['residual']:.2f} counterexample={lit['counterexample']}; "
        f"corrected n-embedding residual={rep.residuals['phase_corrected']:.1e}"
    )
    record(7, "CRT factorisation for d=15", ok, detail, time.perf_counter() - t, 30)


def test_criterion_08_qubit_sic():
    t = time.perf_counter()
    U = sic_unitary_qubit()
    unit = float(np.abs(U.conj().T @ U - np.eye(4)).max())
    ov = float(np.abs(sic_fiducial_overlaps(sic_povm_qubit()) - 1 / 3).max())
    rng = np.random.default_rng(2024)
    closed = wig = 0.0
    for _ in range(100):
        rho = random_qubit(rng)
        closed = max(closed, float(np.abs(closed_form_sic_probabilities(BlochVector.from_density(rho)) - operational_sic_probabilities(rho)).max()))
        wig = max(wig, sic_probabilities(rho).wigner_residual)
    p00 = sic_probabilities(np.diag([1.0, 0.0])).values[0]
    p00_err = abs(p00 - 0.25 * (1 + 1 / np.sqrt(3)))
    ok = unit < 1e-12 and ov < 1e-10 and closed < 1e-10 and wig < 1e-10 and p00_err < 1e-10
    detail = f"unitarity={unit:.1e} overlap={ov:.1e} closed-form={closed:.1e} wigner-affine={wig:.1e} P00={p00_err:.1e}"
    record(8, "qubit SIC", ok, detail, time.perf_counter() - t, 10)


def test_criterion_09_tomography_round_trips():
    t = time.perf_counter()
    rng = np.random.default_rng(99)
    exact = 0.0
    for d in (2, 3, 4):
        mubs = mubs_from_wigner(build_wigner_family(field(d)))
        rho = random_density(d, rng)
        exact = max(exact, float(np.abs(pvm_mub_tomography(rho, mubs) - rho).max()))
    sic, psic = sic_povm_qubit(), product_sic_two_qubit().povm
    for povm, d in ((sic, 2), (psic, 4)):
        rho = random_density(d, rng)
        exact = max(exact, float(np.abs(povm.invert(povm.probabilities(rho)) - rho).max()))
    rho = BlochVector(0.3, -0.2, 0.5).density()
    tds = [sample_and_estimate(rho, sic, 10**6, seed).trace_distance for seed in range(20)]
    med = float(np.median(tds))
    ok = exact < 1e-9 and med < 0.01
    detail = f"exact inversion={exact:.1e} median trace distance (1e6 shots, 20 seeds)={med:.4f}"
    record(9, "tomography round trips", ok, detail, time.perf_counter() - t, 120)


def test_criterion_10_redundancy_ledger():
    t = time.perf_counter()
    d = 4
    got = (
        redundancy_ledger("mub-pvm", d).counting_rates,
        redundancy_ledger("sic-povm", d).counting_rates,
        redundancy_ledger("local-mub-two-qubit", d).counting_rates,
    )
    ok = got == (d * d + d, d * d, 36) and redundancy_ledger("mub-pvm", 2).counting_rates == 6
    record(10, "redundancy ledger", ok, f"rates at d=4: {got}", time.perf_counter() - t, None)


def test_criterion_11_mean_king():
    t = time.perf_counter()
    cases = agree = 0
    for d in (2, 3, 4):
        fam = build_wigner_family(field(d))
        mubs = mubs_from_wigner(fam)
        dists = [[wigner_distribution(np.outer(v, v.conj()), fam).values for v in B] for B in mubs.bases]
        for k in range(d + 1):
            for pt in itertools.product(range(d), repeat=2):
                support = [i for i in range(d) if abs(dists[k][i][pt]) > 1e-9]
                cases += 1
                agree += support == [mean_king_infer(fam, k, pt)]
    qubit = mean_king_infer(build_wigner_family(field(2)), 0, (1, 0)) == 1
    ok = agree == cases == 3 * 4 + 4 * 9 + 5 * 16 and qubit
    record(11, "Mean King inference", ok, f"{agree}/{cases} agree, Z-basis detector (1,0) -> |1>: {qubit}", time.perf_counter() - t, 10)


if __name__ == "__main__":
    import sys

    fns = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for fn in fns:
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
