"""Command line driver: runs one family of checks and writes a CSV plus a JSON summary.

Exit status: 0 when every hard check passes, 1 when one fails, 2 for a bad
configuration and 3 when a parameter falls outside a routine's domain.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

import numpy as np

from . import divisor_afe as dafe
from . import estermann as est
from . import expsums as ex
from . import main_terms as mt
from . import moments as mo
from .arith import primes_between
from .characters import character_table
from .shifts import ShiftTuple, random_admissible
from .special import PoleError, QuadratureError, gaussian_G
from .store import ArrayStore, set_store

HEADER = ["run_id", "q", "parity", "subject", "value_re", "value_im", "reference_re",
          "reference_im", "abs_dev", "rel_dev", "tolerance", "pass"]
COMMANDS = ("moment", "conjecture", "verify-afe", "verify-identities", "expsum-scan", "fit-c4")
THREAD_VARS = ("LMOMENT_THREADS", "LMOOMENT_THREADS")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config

@dataclass
class RunConfig:
    command: str = ""
    q: str = ""
    q_list: str = ""
    shifts: str = ""
    stencil: str = "0.5/logq"
    parity: str = "even"
    tol: float | None = None
    seed: int = 0
    samples: int | None = None
    cutoff: float = mo.DEFAULT_CUTOFF
    zeta: str = "auto"  # auto | zeta | zeta_q
    threads: int = 1
    out: str = ""
    summary: str = ""
    cache_dir: str = ""

    # fields that do not change any number in the output
    _VOLATILE = ("threads", "out", "summary", "cache_dir")

    def canonical(self) -> str:
        d = asdict(self)
        return "\n".join(f"{k}={d[k]}" for k in sorted(d) if k not in self._VOLATILE) + "\n"

    def run_id(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in fields(RunConfig)}
    if name not in types:
        raise ConfigError(f"unknown config key {name!r}")
    t = str(types[name])
    try:
        if "bool" in t:
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if "int" in t:
            return int(raw)
        if "float" in t:
            return float(raw)
    except ValueError as err:
        raise ConfigError(f"bad value for {name}: {raw!r}") from err
    return raw


def parse_config_text(text: str) -> dict:
    """key=value lines; blank lines and '#' comments are skipped."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        k = k.replace("-", "_")
        out[k] = _coerce(k, v)
    return out


def parse_q_list(spec: str) -> list[int]:
    """'a,b,c', 'a..b' (primes in range) or 'a..b:n' (n primes evenly spread)."""
    spec = spec.strip()
    if not spec:
        return []
    try:
        if ".." in spec:
            rng, _, count = spec.partition(":")
            lo, hi = (int(x) for x in rng.split(".."))
            ps = primes_between(lo, hi)
            if count:
                n = int(count)
                if n > len(ps):
                    raise ConfigError(f"only {len(ps)} primes in {lo}..{hi}")
                idx = np.round(np.linspace(0, len(ps) - 1, n)).astype(int)
                ps = [ps[i] for i in idx]
            return ps
        return [int(x) for x in spec.split(",") if x.strip()]
    except ValueError as err:
        raise ConfigError(f"cannot parse q list {spec!r}") from err


def parse_shifts(spec: str) -> ShiftTuple | None:
    if not spec.strip():
        return None
    try:
        vals = [complex(x.strip().replace("i", "j")) for x in spec.split(",")]
    except ValueError as err:
        raise ConfigError(f"cannot parse shifts {spec!r}") from err
    if len(vals) != 4:
        raise ConfigError("shifts need four comma-separated values")
    return ShiftTuple(*vals)


def stencil_radius(spec: str, q: int) -> float:
    """'c/logq' or a plain number."""
    s = spec.replace(" ", "")
    try:
        if s.endswith("/logq"):
            return float(s[:-5]) / math.log(q)
        return float(s)
    except ValueError as err:
        raise ConfigError(f"cannot parse stencil {spec!r}") from err


def worker_count(cfg: RunConfig) -> int:
    for var in THREAD_VARS:
        if os.environ.get(var):
            try:
                return max(1, int(os.environ[var]))
            except ValueError as err:
                raise ConfigError(f"{var} must be an integer") from err
    return max(1, cfg.threads)


# ---------------------------------------------------------------- rows

@dataclass
class Row:
    """One checked quantity.

    mode "abs"/"rel" compare value with reference, "le" requires
    |value| <= tolerance, "info" records a number without a verdict.
    """

    suite: str
    subject: str
    value: complex
    reference: complex = complex(math.nan, math.nan)
    tolerance: float = math.nan
    mode: str = "info"
    hard: bool = True
    q: int | None = None
    parity: int | None = None
    abs_dev: float = field(init=False)
    rel_dev: float = field(init=False)

    def __post_init__(self):
        self.value = complex(self.value)
        self.reference = complex(self.reference)
        if self.mode in ("abs", "rel"):
            self.abs_dev = abs(self.value - self.reference)
            r = abs(self.reference)
            self.rel_dev = self.abs_dev / r if r > 0 else math.inf
        else:
            self.abs_dev = self.rel_dev = math.nan

    @property
    def residual(self) -> float:
        return {"abs": self.abs_dev, "rel": self.rel_dev, "le": abs(self.value)}.get(self.mode, math.nan)

    @property
    def verdict(self) -> bool | None:
        if self.mode == "info":
            return None
        r = self.residual
        return bool(r <= self.tolerance) if math.isfinite(r) else False


def _fmt(x: float) -> str:
    return "{:.17g}".format(x)


def write_csv(rows: list[Row], run_id: str, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        v = r.verdict
        w.writerow([run_id, "" if r.q is None else r.q,
                    "" if r.parity is None else ("even", "odd")[r.parity], r.subject,
                    _fmt(r.value.real), _fmt(r.value.imag),
                    _fmt(r.reference.real), _fmt(r.reference.imag),
                    _fmt(r.abs_dev), _fmt(r.rel_dev), _fmt(r.tolerance),
                    {True: "true", False: "false", None: "na"}[v]])


def summarize(rows: list[Row], cfg: RunConfig) -> dict:
    suites: dict[str, dict] = {}
    for r in rows:
        s = suites.setdefault(r.suite, {"pass": 0, "fail": 0, "soft_fail": 0, "max_residual": 0.0})
        v = r.verdict
        if v is None:
            continue
        if v:
            s["pass"] += 1
        elif r.hard:
            s["fail"] += 1
        else:
            s["soft_fail"] += 1
        if math.isfinite(r.residual):
            s["max_residual"] = max(s["max_residual"], r.residual)
    return {
        "run_id": cfg.run_id(),
        "command": cfg.command,
        "seed": cfg.seed,
        "pass": sum(s["pass"] for s in suites.values()),
        "fail": sum(s["fail"] for s in suites.values()),
        "soft_fail": sum(s["soft_fail"] for s in suites.values()),
        "suites": suites,
    }


def run_tasks(tasks: list[Callable[[], list[Row]]], threads: int) -> list[Row]:
    """Run tasks on a pool; results come back in submission order."""
    if threads <= 1:
        chunks = [t() for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda t: t(), tasks))
    return [r for c in chunks for r in c]


# ---------------------------------------------------------------- subcommands

def _use_zeta_q(cfg: RunConfig, auto: bool) -> bool:
    opts = {"auto": auto, "zeta": False, "zeta_q": True}
    if cfg.zeta not in opts:
        raise ConfigError(f"zeta must be one of {sorted(opts)}")
    return opts[cfg.zeta]


def _qs(cfg: RunConfig, default: str) -> list[int]:
    if cfg.q and cfg.q_list:
        raise ConfigError("give either q or q_list, not both")
    return parse_q_list(cfg.q or cfg.q_list or default)


def _parities(cfg: RunConfig) -> list[int]:
    opts = {"even": [0], "odd": [1], "both": [0, 1]}
    if cfg.parity not in opts:
        raise ConfigError(f"parity must be one of {sorted(opts)}")
    return opts[cfg.parity]


def cmd_moment(cfg: RunConfig) -> list[Callable]:
    qs, parities, shifts = _qs(cfg, "101"), _parities(cfg), parse_shifts(cfg.shifts)
    tol = 0.05 if cfg.tol is None else cfg.tol
    for q in qs:
        stencil_radius(cfg.stencil, q)

    def task(q, p):
        def run():
            table = character_table(q)
            if shifts is None:
                val = mo.moment(table, ShiftTuple.zero(), p)
                ref = mt.conjecture_at_zero(q, p, radius=stencil_radius(cfg.stencil, q),
                                             use_zeta_q=_use_zeta_q(cfg, True))
                subj = "moment_zero_shift"
            else:
                val = mo.moment(table, shifts, p)
                ref = mt.conjecture_main(shifts, q, p, _use_zeta_q(cfg, True)).total
                subj = "moment_shifted"
            return [Row("moment", subj, val, ref, tol, "rel", True, q, p)]
        return run
    return [task(q, p) for q in qs for p in parities]


def cmd_conjecture(cfg: RunConfig) -> list[Callable]:
    qs, parities, shifts = _qs(cfg, "101"), _parities(cfg), parse_shifts(cfg.shifts)
    tol = 1e-8 if cfg.tol is None else cfg.tol

    def task(q, p):
        def run():
            rows = []
            if shifts is not None:
                br = mt.conjecture_main(shifts, q, p, use_zeta_q=_use_zeta_q(cfg, True))
                for k, t in enumerate(br.terms, 1):
                    rows.append(Row("conjecture", f"term{k}", t, q=q, parity=p, hard=False))
                rows.append(Row("conjecture", "six_term_total", br.total, q=q, parity=p, hard=False))
            r = stencil_radius(cfg.stencil, q)
            zq = _use_zeta_q(cfg, True)
            v = mt.conjecture_at_zero(q, p, radius=r, use_zeta_q=zq)
            v_half = mt.conjecture_at_zero(q, p, radius=r / 2, use_zeta_q=zq)
            rows.append(Row("conjecture", "zero_shift_vs_half_radius", v, v_half, tol, "rel", True, q, p))
            return rows
        return run
    return [task(q, p) for q in qs for p in parities]


def cmd_verify_afe(cfg: RunConfig) -> list[Callable]:
    qs = _qs(cfg, "13,29")
    rng = np.random.default_rng(cfg.seed)
    n_shift = 3 if cfg.samples is None else cfg.samples
    tol = 1e-6 if cfg.tol is None else cfg.tol
    draws = [(q, random_admissible(rng)) for q in qs for _ in range(n_shift)]
    n_afe = 20 if cfg.samples is None else cfg.samples
    afe_pts = [(int(rng.integers(1, 501)), complex(rng.uniform(-0.5, 0.5), rng.uniform(-1, 1)))
               for _ in range(n_afe)]

    def moment_task(q, sh):
        def run():
            table = character_table(q)
            a = mo.moment_via_divisor_sum(table, sh, gaussian_G(), cutoff=cfg.cutoff)
            return [Row("averaged_afe", "divisor_sum_vs_brute", a, mo.moment_even(table, sh), tol, "rel", True, q, 0)]
        return run

    def afe_task(n, lam):
        def run():
            r = dafe.verify_divisor_afe(n, lam)
            return [Row("divisor_afe", f"n={n};lambda={lam.real:.6f}{lam.imag:+.6f}i",
                        r.first + r.second, r.target, tol, "abs")]
        return run
    return [moment_task(q, s) for q, s in draws] + [afe_task(n, lam) for n, lam in afe_pts]


def _rand_c(rng, re, im):
    return complex(rng.uniform(*re), rng.uniform(*im))


def cmd_verify_identities(cfg: RunConfig) -> list[Callable]:
    rng = np.random.default_rng(cfg.seed)
    n_gamma = 200 if cfg.samples is None else cfg.samples
    tasks = []

    def gamma_rows(kind, pts):
        def run():
            return [Row("gamma", f"gamma_{kind}", *mt.gamma_lemma(kind, a, b), 1e-10, "rel") for a, b in pts]
        return run

    for kind in ("even", "odd", "bessel"):
        tasks.append(gamma_rows(kind, mt.sample_gamma_points(rng, n_gamma, kind)))

    def butter_claim(pts_b, pts_c):
        def run():
            out = []
            for v, a, c in pts_b:
                three, prod = mt.butter(v, a, c)
                out.append(Row("main_terms", "three_term_vs_product", three, prod, 1e-10, "rel"))
            for s, sh in pts_c:
                lhs, rhs = mt.claim_identity(s, sh, 101)
                out.append(Row("main_terms", "claim_identity", lhs, rhs, 1e-10, "rel", q=101))
            return out
        return run
    pts_b = [(_rand_c(rng, (-0.2, 0.2), (-3, 3)), _rand_c(rng, (-0.1, 0.1), (-0.1, 0.1)),
              _rand_c(rng, (-0.1, 0.1), (-0.1, 0.1))) for _ in range(100)]
    pts_c = [(_rand_c(rng, (0.1, 0.4), (-5, 5)), random_admissible(rng)) for _ in range(100)]
    tasks.append(butter_claim(pts_b, pts_c))

    # Estermann: continuation against the series, functional equation, residues
    def estermann_task(kind, pts):
        def run():
            out = []
            for p in pts:
                if kind == "series":
                    N = 100_000
                    tail = dafe.divisor_tail(N, p.s.real - max(p.lam.real, 0.0), 1)
                    out.append(Row("estermann", f"series_l={p.l}", est.estermann_series(p, N),
                                   est.estermann_D(p), 1e-8 + tail, "abs"))
                elif kind == "fe":
                    lhs, rhs = est.estermann_fe_sides(p)
                    out.append(Row("estermann", f"functional_equation_l={p.l}", rhs, lhs, 1e-8, "rel"))
                else:
                    r1, r2 = est.expected_residues(p.lam, p.l)
                    c1 = est.residue_by_circle(p.lam, p.h, p.l, 1.0)
                    c2 = est.residue_by_circle(p.lam, p.h, p.l, 1.0 + p.lam)
                    out.append(Row("estermann", f"residue_s=1_l={p.l}", c1, r1, 1e-8, "abs"))
                    out.append(Row("estermann", f"residue_s=1+lambda_l={p.l}", c2, r2, 1e-8, "abs"))
            return out
        return run

    def est_point(re_s, im_s, lam_re):
        l = int(rng.integers(1, 30))
        h = int(rng.integers(0, l))
        while math.gcd(h, l) != 1:
            h = (h + 1) % l if l > 1 else 0
        return est.EstermannPoint(_rand_c(rng, re_s, im_s), _rand_c(rng, lam_re, (-0.5, 0.5)), h, l)
    tasks.append(estermann_task("series", [est_point((3.0, 4.0), (-5, 5), (-0.3, 0.3)) for _ in range(30)]))
    tasks.append(estermann_task("fe", [est_point((-0.4, 0.4), (-5, 5), (-0.3, 0.3)) for _ in range(10)]))
    tasks.append(estermann_task("residue", [est_point((2, 3), (0, 1), (0.1, 0.3)) for _ in range(5)]))

    def tsum_task(q):
        def run():
            brute = ex.t_sum_brute_table(q)
            r = np.arange(q)
            closed = np.array([[[ex.t_sum_closed(x, y, z, q) for z in r] for y in r] for x in r])
            out = [Row("tsum", "closed_vs_brute_max", float(np.abs(brute - closed).max()),
                       tolerance=1e-6, mode="le", q=q)]
            worst: dict[str, float] = {}
            for x in r:
                for y in r:
                    for z in r:
                        case = ex.t_bound_case(x, y, z, q)
                        ratio = abs(brute[x, y, z]) / ex.t_bound(x, y, z, q)
                        worst[case] = max(worst.get(case, 0.0), ratio)
            for case in sorted(worst):
                out.append(Row("tsum", f"bound_ratio[{case}]", worst[case], tolerance=1 + 1e-9, mode="le", q=q))
            return out
        return run
    tasks += [tsum_task(q) for q in (5, 7, 11, 13)]

    def ident_task(fn, args):
        def run():
            c = fn(*args)
            return [Row("dirichlet", c.name, c.lhs, c.rhs, 1e-6 + c.tail, "abs")]
        return run
    for _ in range(10):
        d = int(rng.choice([1, 2, 3, 5, 7, 11, 13]))
        s = _rand_c(rng, (2.5, 3.5), (-3, 3))
        lam = _rand_c(rng, (-0.3, 0.3), (-1, 1))
        tasks.append(ident_task(dafe.divisor_function_sum, (s, lam, d)))
        s2 = _rand_c(rng, (2.0, 3.0), (-3, 3))
        lam2 = _rand_c(rng, (0.0, 0.5), (-1, 1))
        tasks.append(ident_task(dafe.h_and_l_sum, (s2, lam2, d)))
        n = int(rng.integers(1, 501))
        alpha = _rand_c(rng, (-2.0, -1.2), (-2, 2))
        tasks.append(ident_task(dafe.ramanujan_divisor, (n, alpha)))
        v = _rand_c(rng, (3.5, 4.5), (-3, 3))
        tasks.append(ident_task(dafe.ramanujan_identity, (v, _rand_c(rng, (-0.3, 0.3), (-1, 1)),
                                                          _rand_c(rng, (-0.3, 0.3), (-1, 1)))))
    return tasks


def cmd_expsum_scan(cfg: RunConfig) -> list[Callable]:
    qs = _qs(cfg, "499")
    soft = 10.0 if cfg.tol is None else cfg.tol

    def scan_task(q, K, L):
        def run():
            r = ex.s_kl_scan(K, L, q)
            tag = f"K={K:.4g};L={L:.4g}"
            return [
                Row("expsum", f"S_trivial[{tag}]", r.value / r.trivial, tolerance=1.0, mode="le", q=q),
                Row("expsum", f"S_over_Lsqrtq[{tag}]", r.ratio_sqrt, tolerance=soft, mode="le", hard=False, q=q),
                Row("expsum", f"S_over_mixed[{tag}]", r.ratio_mixed, tolerance=soft, mode="le", hard=False, q=q),
            ]
        return run

    def ap_task(q):
        def run():
            x = q ** 1.5
            res = ex.divisor_ap_residuals(x, q)
            total = sum(res.values())
            worst = max(abs(float(v)) for v in res.values())
            return [
                Row("divisor_ap", "sum_of_residuals", float(total), tolerance=0.0, mode="le", q=q),
                Row("divisor_ap", "max_residual_over_envelope", worst / (20 * x ** (1 / 3 + 0.05)),
                    tolerance=1.0, mode="le", hard=False, q=q),
            ]
        return run

    tasks = []
    for q in qs:
        grid = [q ** 0.25, q ** 0.5, q ** 0.75]
        tasks += [scan_task(q, K, L) for K in grid for L in grid]
        tasks.append(ap_task(q))
    return tasks


def cmd_fit_c4(cfg: RunConfig) -> list[Callable]:
    qs = _qs(cfg, "101..2003:12")
    if len(qs) < 6:
        raise ConfigError("fit-c4 needs at least 6 moduli")
    tol = 0.01 if cfg.tol is None else cfg.tol
    use_zq = _use_zeta_q(cfg, False)

    def value_task(q):
        def run():
            return [Row("fit_c4", "main_term_zero_shift", mt.fourth_moment_main(q, use_zeta_q=use_zq), q=q)]
        return run
    return [value_task(q) for q in qs]


def _finish_fit(rows: list[Row], cfg: RunConfig) -> list[Row]:
    qs = [r.q for r in rows]
    vals = [r.value.real for r in rows]
    coef = mt.fit_log_polynomial(qs, vals, 4)
    tol = 0.01 if cfg.tol is None else cfg.tol
    return rows + [Row("fit_c4", "leading_coefficient", coef[4], 1 / (2 * math.pi ** 2), tol, "rel")]


HANDLERS = {
    "moment": cmd_moment,
    "conjecture": cmd_conjecture,
    "verify-afe": cmd_verify_afe,
    "verify-identities": cmd_verify_identities,
    "expsum-scan": cmd_expsum_scan,
    "fit-c4": cmd_fit_c4,
}


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lmoment", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key=value file; command-line flags take precedence")
    ap.add_argument("--q")
    ap.add_argument("--q-list", dest="q_list", help="a,b,c | a..b | a..b:n")
    ap.add_argument("--shifts", help="alpha,beta,gamma,delta (complex, e.g. 0.01+0.02j)")
    ap.add_argument("--stencil", help="zero-shift stencil radius, number or c/logq")
    ap.add_argument("--parity", choices=("even", "odd", "both"))
    ap.add_argument("--tol", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--cutoff", type=float)
    ap.add_argument("--zeta", choices=("auto", "zeta", "zeta_q"),
                    help="zeta factor in the main terms; auto is zeta_q except for fit-c4")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--out", help="CSV path (default stdout)")
    ap.add_argument("--summary", help="JSON path (default <out>.json, or stderr)")
    ap.add_argument("--cache-dir", dest="cache_dir")
    return ap


def make_config(argv: list[str] | None) -> RunConfig:
    args = build_parser().parse_args(argv)
    merged: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                merged.update(parse_config_text(fh.read()))
        except OSError as err:
            raise ConfigError(f"cannot read config: {err}") from err
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            merged[k] = v
    merged["command"] = args.command
    return RunConfig(**merged)


def execute(cfg: RunConfig) -> tuple[list[Row], dict]:
    if cfg.cache_dir:
        set_store(ArrayStore(cfg.cache_dir))
    try:
        tasks = HANDLERS[cfg.command](cfg)
        rows = run_tasks(tasks, worker_count(cfg))
        if cfg.command == "fit-c4":
            rows = _finish_fit(rows, cfg)
    finally:
        set_store(None)
    return rows, summarize(rows, cfg)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = make_config(argv)
        rows, summary = execute(cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (PoleError, QuadratureError, ValueError, ArithmeticError) as err:
        print(f"domain error: {err}", file=sys.stderr)
        return 3
    buf = io.StringIO()
    write_csv(rows, cfg.run_id(), buf)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    target = cfg.summary or (cfg.out + ".json" if cfg.out else "")
    if target:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return 0 if summary["fail"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
