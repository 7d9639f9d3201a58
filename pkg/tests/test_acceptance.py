"""One test per acceptance criterion, each at the stated tolerance.

Every test records a single PASS/FAIL line, printed together at the end
of the run.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from lmoment import divisor_afe as dafe
from lmoment import estermann as est
from lmoment import expsums as ex
from lmoment import main_terms as mt
from lmoment.arith import primes_between
from lmoment.characters import (character_table, even_orthogonality_matrix, functional_equation_residuals,
                                gauss_sums, orthogonality_closed)
from lmoment.moments import moment, moment_even, moment_via_divisor_sum
from lmoment.shifts import ShiftTuple, random_admissible, spread_tuple
from lmoment.special import build_G, gaussian_G


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_01_gauss_sum_modulus():
    t0 = time.perf_counter()
    worst = 0.0
    for q in primes_between(5, 199):
        tau = gauss_sums(character_table(q))[1:]
        worst = max(worst, float(np.max(np.abs(np.abs(tau) - math.sqrt(q)))))
    dt = time.perf_counter() - t0
    record(1, worst <= 1e-9 and dt < 5, f"max ||tau|-sqrt q| = {worst:.2e}, {dt:.2f} s")


def test_02_even_orthogonality():
    t0 = time.perf_counter()
    mismatches = 0
    for q in primes_between(5, 97):
        O = even_orthogonality_matrix(character_table(q))
        closed = np.array([[orthogonality_closed(q, a, b) for b in range(q)] for a in range(q)])
        mismatches += int(np.sum(np.round(O.real) != closed) + np.sum(np.round(O.imag) != 0))
    dt = time.perf_counter() - t0
    record(2, mismatches == 0 and dt < 10, f"{mismatches} mismatching entries over primes 5..97, {dt:.2f} s")


def test_03_functional_equation():
    worst = max(float(functional_equation_residuals(character_table(q), 0.4 + 1.2j).max()) for q in (13, 29, 61))
    record(3, worst <= 1e-9, f"max completed-L residual = {worst:.2e}")


def test_04_averaged_afe():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for q in (13, 29):
        table = character_table(q)
        for _ in range(3):
            sh = random_admissible(rng)
            a = moment_via_divisor_sum(table, sh, gaussian_G())
            b = moment_even(table, sh)
            worst = max(worst, abs(a - b) / abs(b))
    dt = time.perf_counter() - t0
    record(4, worst <= 1e-6 and dt < 60, f"max rel dev = {worst:.2e}, {dt:.1f} s")


def test_05_moment_vs_conjecture():
    qs = (101, 211, 401, 601, 1009)
    devs = []
    for q in qs:
        M = moment(character_table(q), ShiftTuple.zero(), 0).real
        C = mt.conjecture_at_zero(q, 0)
        devs.append(abs(M - C) / abs(C))
    decreasing = all(b < a for a, b in zip(devs, devs[1:]))
    detail = "rel dev " + ", ".join(f"{q}: {d:.3f}" for q, d in zip(qs, devs)) + \
        f"; decreasing={decreasing}; need <= 0.05 at 1009"
    record(5, decreasing and devs[-1] <= 0.05, detail)


def test_06_leading_coefficient():
    from lmoment.cli import parse_q_list
    qs = parse_q_list("101..2003:12")
    vals = [mt.fourth_moment_main(q, use_zeta_q=False) for q in qs]
    c4 = mt.fit_log_polynomial(qs, vals, 4)[4]
    target = 1 / (2 * math.pi**2)
    rel = abs(c4 - target) / target
    record(6, len(qs) == 12 and rel <= 0.01, f"c4 = {c4:.10f}, rel dev {rel:.2e}")


def test_07_gamma_identities():
    rng = np.random.default_rng(7)
    worst, fails = 0.0, 0
    for kind in ("even", "odd", "bessel"):
        for a, b in mt.sample_gamma_points(rng, 200, kind):
            lhs, rhs = mt.gamma_lemma(kind, a, b)
            r = abs(lhs - rhs) / abs(rhs)
            worst = max(worst, r)
            fails += r > 1e-10
    record(7, fails == 0, f"600 points, {fails} failures, max rel err {worst:.2e}")


def test_08_main_term_assembly():
    worst_half = 0.0
    for seed in (1, 2, 3):
        sh = spread_tuple(np.random.default_rng(seed))
        G = build_G(sh)
        spec, dps = mt.mp_settings(G)
        worst_half = max(worst_half, mt.verify_half_assembly(sh, 101, G, spec, "mp", dps).residual)
    rng = np.random.default_rng(8)
    worst_claim = worst_butter = 0.0
    for _ in range(100):
        s = complex(rng.uniform(0.1, 0.4), rng.uniform(-5, 5))
        lhs, rhs = mt.claim_identity(s, random_admissible(rng), 101)
        worst_claim = max(worst_claim, abs(lhs - rhs) / abs(rhs))
        v = complex(rng.uniform(-0.2, 0.2), rng.uniform(-3, 3))
        a, c = (complex(*rng.uniform(-0.1, 0.1, 2)) for _ in range(2))
        three, prod = mt.butter(v, a, c)
        worst_butter = max(worst_butter, abs(three - prod) / abs(prod))
    ok = worst_half <= 1e-8 and worst_claim <= 1e-10 and worst_butter <= 1e-10
    record(8, ok, f"|I+I_- - U| max {worst_half:.2e}; claim {worst_claim:.2e}; three-term {worst_butter:.2e}")


def _estermann_point(rng, re_s, lam_re):
    l = int(rng.integers(1, 30))
    h = int(rng.integers(0, l))
    while math.gcd(h, l) != 1:
        h = (h + 1) % l
    s = complex(rng.uniform(*re_s), rng.uniform(-5, 5))
    return est.EstermannPoint(s, complex(rng.uniform(*lam_re), rng.uniform(-0.5, 0.5)), h, l)


def test_09_estermann():
    rng = np.random.default_rng(9)
    N = 100_000
    ser = 0.0
    for _ in range(30):
        p = _estermann_point(rng, (3.0, 4.0), (-0.3, 0.3))
        tail = dafe.divisor_tail(N, p.s.real - max(p.lam.real, 0.0), 1)
        ser = max(ser, abs(est.estermann_series(p, N) - est.estermann_D(p)) - tail)
    fe = max(est.verify_estermann_fe(_estermann_point(rng, (-0.4, 0.4), (-0.3, 0.3))) for _ in range(10))
    res = 0.0
    for _ in range(5):
        p = _estermann_point(rng, (2, 3), (0.1, 0.3))
        r1, r2 = est.expected_residues(p.lam, p.l)
        res = max(res, abs(est.residue_by_circle(p.lam, p.h, p.l, 1.0) - r1),
                  abs(est.residue_by_circle(p.lam, p.h, p.l, 1 + p.lam) - r2))
    ok = ser <= 1e-8 and fe <= 1e-8 and res <= 1e-8
    record(9, ok, f"series excess over tail {ser:.2e}; FE {fe:.2e}; residues {res:.2e}")


def test_10_t_sum():
    diff, ratio = 0.0, 0.0
    for q in (5, 7, 11, 13):
        B = ex.t_sum_brute_table(q)
        for x in range(q):
            for y in range(q):
                for z in range(q):
                    diff = max(diff, abs(B[x, y, z] - ex.t_sum_closed(x, y, z, q)))
                    ratio = max(ratio, abs(B[x, y, z]) / ex.t_bound(x, y, z, q))
    record(10, diff <= 1e-6 and ratio <= 1 + 1e-9, f"closed vs brute {diff:.2e}; max |T|/bound {ratio:.12f}")


def test_11_divisor_afe():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 501))
        lam = complex(rng.uniform(-0.5, 0.5), rng.uniform(-1, 1))
        worst = max(worst, dafe.verify_divisor_afe(n, lam).residual)
    record(11, worst <= 1e-6, f"max residual {worst:.2e} over 20 pairs")


def test_12_dirichlet_identities():
    rng = np.random.default_rng(12)

    def c(re, im):
        return complex(rng.uniform(*re), rng.uniform(*im))
    checks = []
    for _ in range(10):
        d = int(rng.choice([1, 2, 3, 5, 7, 11, 13]))
        checks.append(dafe.divisor_function_sum(c((2.5, 3.5), (-3, 3)), c((-0.3, 0.3), (-1, 1)), d))
        checks.append(dafe.h_and_l_sum(c((2.0, 3.0), (-3, 3)), c((0.0, 0.5), (-1, 1)), d))
        checks.append(dafe.ramanujan_divisor(int(rng.integers(1, 501)), c((-2.0, -1.2), (-2, 2))))
        checks.append(dafe.ramanujan_identity(c((3.5, 4.5), (-3, 3)), c((-0.3, 0.3), (-1, 1)),
                                              c((-0.3, 0.3), (-1, 1))))
    fails = [x.name for x in checks if not x.passed(1e-6)]
    worst = max(x.residual - x.tail for x in checks)
    record(12, not fails, f"40 checks, {len(fails)} failures, max residual beyond tail {worst:.2e}")


DETERMINISM_RUNS = [
    ["conjecture", "--q-list", "101,211", "--parity", "both", "--shifts", "0.05+0.02j,-0.03,0.01j,0.04-0.01j"],
    ["moment", "--q-list", "13,29,61", "--shifts", "0.05+0.02j,-0.03,0.01j,0.04-0.01j"],
    ["verify-afe", "--samples", "2", "--seed", "3"],
    ["expsum-scan", "--q-list", "101,211"],
]


def test_13_determinism(tmp_path):
    outputs = {}
    for var, threads in (("LMOOMENT_THREADS", "1"), ("LMOOMENT_THREADS", "4"), ("LMOMENT_THREADS", "3")):
        env = {k: v for k, v in os.environ.items() if k not in ("LMOMENT_THREADS", "LMOOMENT_THREADS")}
        env[var] = threads
        for i, argv in enumerate(DETERMINISM_RUNS):
            out = tmp_path / f"{i}-{var}-{threads}.csv"
            subprocess.run([sys.executable, "-m", "lmoment.cli", *argv, "--out", str(out)], env=env, check=False)
            outputs.setdefault(i, []).append(out.read_bytes())
    same = [len(set(v)) == 1 and len(v[0]) > 0 for v in outputs.values()]
    record(13, all(same), f"{sum(same)}/{len(same)} subcommands byte-identical across thread settings 1, 4, 3")
