"""Operator-norm lower bounds and the empirical RD / amenability verdicts.

Nothing here ever claims the value of ||lambda(f)||: the truncated
operator P_R lambda(f) P_R and the moment roots a_n^(1/2n) are certified
lower bounds, and for relatively unimodular pairs the l1 norm is an upper
bound.  Verdicts are threshold reports over those raw numbers; the
thresholds live in the config echoed into every report.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix

from .algebra import (HeckeElement, involution, is_self_adjoint, norms,
                      power_moments)
from .cosets import CosetStore, unimodularity_check
from .errors import (BallIncomplete, CapExceeded, ConvergenceWarning,
                     NoStableFit, NotSelfAdjoint)
from .groups import HeckePair
from .lengths import LengthFunction, word_length

__all__ = [
    "RD_DEFAULTS", "TruncatedOperator", "operator_matrix", "truncated_norm",
    "spectral_lower_bound", "RdProfile", "rd_profile", "rd_weighted_fit",
    "KestenReport", "kesten_diagnostic", "exact_truncated_moment",
]

RD_DEFAULTS = {
    "rd.pad": 2,                 # padding radius beyond the support radius
    "rd.max_matrix_cost": 3_000_000,  # budget dim * sum R(d) per truncation
    "rd.moment_n": 1,            # moment order mixed into the lower bound
    "rd.n_random": 2,            # random nonnegative test functions per radius
    "rd.coeff_max": 9,           # coefficient range of random functions
    "rd.s_grid_max": 3.0,        # weighted-fit exponent grid
    "rd.s_grid_step": 0.25,
    "rd.stable_slope": 0.1,      # max log-log tail slope for a "stable" ratio
    "rd.tail_fraction": 0.5,
    "rd.tol": 1e-8,              # power iteration relative tolerance
    "rd.max_iter": 20000,
    "kesten.n": 8,               # moments in the Kesten diagnostic
    "kesten.trunc_radius": 6,
    "kesten.amenable_min": 0.99,     # report hints only; flagged heuristic
    "kesten.nonamenable_max": 0.95,
}


def _config(overrides: Optional[dict]) -> dict:
    cfg = dict(RD_DEFAULTS)
    if overrides:
        unknown = set(overrides) - set(cfg)
        if unknown:
            raise KeyError(f"unknown rd config keys: {sorted(unknown)}")
        cfg.update(overrides)
    return cfg


# ---------------------------------------------------------------------------
# truncated operator


@dataclass
class TruncatedOperator:
    """P_R lambda(f) P_R on the span of the radius-R ball cosets.

    ``cols[j]`` holds the exact column of the j-th ball coset as
    (row index, coefficient) pairs; per column the row support is bounded
    by sum_d R(d) over supp(f).
    """

    store: CosetStore
    f: HeckeElement
    radius: int
    ball: list[int]
    index: dict
    cols: list[list[tuple[int, Fraction]]]

    @property
    def dim(self) -> int:
        return len(self.ball)

    def base_index(self) -> int:
        return self.index[0]

    def to_csr(self) -> csr_matrix:
        rows, cols, vals = [], [], []
        for j, col in enumerate(self.cols):
            for i, v in col:
                rows.append(i)
                cols.append(j)
                vals.append(float(v))
        return csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def exact_matvec(self, vec: dict) -> dict:
        out: dict[int, Fraction] = {}
        for j, v in vec.items():
            if not v:
                continue
            for i, a in self.cols[j]:
                out[i] = out.get(i, Fraction(0)) + a * v
        return {i: v for i, v in out.items() if v}

    def is_symmetric(self) -> bool:
        entries: dict[tuple[int, int], Fraction] = {}
        for j, col in enumerate(self.cols):
            for i, v in col:
                entries[(i, j)] = v
        return all(entries.get((j, i)) == v for (i, j), v in entries.items())

    def base_column_matches_f(self) -> bool:
        """A delta_He must equal f viewed on H\\G."""
        want = {}
        for d, c in self.f.coeffs.items():
            for m in self.store.class_members(d):
                if m in self.index:
                    want[self.index[m]] = want.get(self.index[m], Fraction(0)) + c
        got = dict(self.cols[self.base_index()])
        return got == want


def operator_matrix(f: HeckeElement, store: CosetStore,
                    radius: int) -> TruncatedOperator:
    """Exact matrix of the compression of lambda(f) to the radius ball:
    A[x][y] = f evaluated at the class of rep(x) rep(y)^{-1}."""
    if radius > store.radius_complete:
        raise BallIncomplete(
            f"ball complete to {store.radius_complete}, need {radius}")
    pair = store.pair
    ball = store.ball_ids(radius)
    index = {cid: i for i, cid in enumerate(ball)}
    per_class = [(c, [store.reps[m] for m in store.class_members(d)])
                 for d, c in sorted(f.coeffs.items())]
    cols: list[list[tuple[int, Fraction]]] = []
    for cid in ball:
        y = store.reps[cid]
        acc: dict[int, Fraction] = {}
        for c, reps_a in per_class:
            for a in reps_a:
                tid = store._intern(pair.mul(a, y), insert=False)
                if tid is None:
                    continue
                i = index.get(tid)
                if i is not None:
                    acc[i] = acc.get(i, Fraction(0)) + c
        cols.append(sorted(acc.items()))
    return TruncatedOperator(store, f, radius, ball, index, cols)


def truncated_norm(op: TruncatedOperator, tol: float = 1e-8,
                   max_iter: int = 20000) -> float:
    """Largest singular value of the truncated operator via power iteration
    on A^T A, from the deterministic start vector delta_He + uniform."""
    if op.dim == 0:
        return 0.0
    a = op.to_csr()
    at = a.T.tocsr()
    v = np.full(op.dim, 1.0 / math.sqrt(op.dim))
    v[op.base_index()] += 1.0
    v /= np.linalg.norm(v)
    prev = -1.0
    stable = 0
    sigma = 0.0
    for _ in range(max_iter):
        w = a @ v
        sigma = float(np.linalg.norm(w))
        if sigma == 0.0:
            return 0.0
        u = at @ w
        nu = float(np.linalg.norm(u))
        if nu == 0.0:
            return sigma
        v = u / nu
        if prev >= 0 and abs(sigma - prev) <= tol * max(sigma, 1e-300):
            stable += 1
            if stable >= 5:
                return sigma
        else:
            stable = 0
        prev = sigma
    warnings.warn("power iteration hit its iteration cap",
                  ConvergenceWarning)
    return sigma


def exact_truncated_moment(op: TruncatedOperator, n: int) -> Fraction:
    """<A^(2n) delta_He, delta_He> in exact rational arithmetic."""
    base = op.base_index()
    vec = {base: Fraction(1)}
    for _ in range(2 * n):
        vec = op.exact_matvec(vec)
    return vec.get(base, Fraction(0))


def covering_radius(f: HeckeElement, n: int) -> int:
    """Smallest Schreier radius whose ball holds every member coset of
    supp(f^{*k}) for k <= 2n.  At that padding the truncation clips
    nothing that the 2n-step moment can reach, so the matrix moment equals
    the convolution moment bit for bit (and rho_n <= truncated norm).
    Extends the store's BFS as needed."""
    from .algebra import convolve

    store = f.store
    classes = set(f.coeffs)
    g = f
    for _ in range(2 * n - 1):
        g = convolve(g, f)
        classes |= set(g.coeffs)
    members = [m for d in classes for m in store.class_members(d)]
    while any(store.wl[m] is None for m in members):
        store.enumerate_to(store.radius_complete + 1)
    return max(store.wl[m] for m in members)


# ---------------------------------------------------------------------------
# moment roots


def _nth_root(q: Fraction, k: int) -> float:
    if q == 0:
        return 0.0
    return math.exp((math.log(q.numerator) - math.log(q.denominator)) / k)


def spectral_lower_bound(f: HeckeElement, n_max: int) -> list[float]:
    """rho_n = a_n^(1/2n); each is a certified lower bound for
    ||lambda(f)|| when f* = f."""
    moments = power_moments(f, n_max)
    return [_nth_root(a, 2 * n) for n, a in enumerate(moments, start=1)]


# ---------------------------------------------------------------------------
# RD profile


@dataclass
class RdTestRecord:
    r: int
    family: str
    nonneg: bool
    lower_bound: float     # max of truncated norm and moment root
    trunc_norm: float
    trunc_radius: int
    moment_root: float
    l2: float
    ratio: float
    weighted_norms: dict    # s -> ||f||_{s,l}

    def as_dict(self) -> dict:
        return {
            "r": self.r, "family": self.family, "nonneg": self.nonneg,
            "lower_bound": self.lower_bound, "trunc_norm": self.trunc_norm,
            "trunc_radius": self.trunc_radius,
            "moment_root": self.moment_root, "l2": self.l2,
            "ratio": self.ratio,
            "weighted_norms": {str(s): v for s, v in self.weighted_norms.items()},
        }


@dataclass
class RdProfile:
    pair_label: str
    verdict: str            # obstructed-nonunimodular | polynomial-compatible
    #                       # | superpolynomial-ratio | inconclusive
    unimodular: bool
    r_max: int
    seed: int
    config: dict
    records: list = field(default_factory=list)
    best: list = field(default_factory=list)   # (r, best_ratio, witness family)
    poly_slope: Optional[float] = None
    poly_r2: Optional[float] = None
    exp_slope: Optional[float] = None
    s_hat: Optional[float] = None
    c_hat: Optional[float] = None
    partial: bool = False
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "pair": self.pair_label,
            "verdict": self.verdict,
            "unimodular": self.unimodular,
            "r_max": self.r_max,
            "seed": self.seed,
            "config": {k: self.config[k] for k in sorted(self.config)},
            "records": [rec.as_dict() for rec in self.records],
            "best": [{"r": r, "ratio": ratio, "witness": w}
                     for r, ratio, w in self.best],
            "poly_slope": self.poly_slope,
            "poly_r2": self.poly_r2,
            "exp_slope": self.exp_slope,
            "s_hat": self.s_hat,
            "c_hat": self.c_hat,
            "partial": self.partial,
            "warnings": list(self.warnings),
        }


def _symmetrized_random(store: CosetStore, classes: list[int], rng,
                        coeff_max: int, signed: bool) -> HeckeElement:
    coeffs: dict[int, Fraction] = {}
    for d in classes:
        v = rng.randint(1, coeff_max)
        if signed and rng.random() < 0.5:
            v = -v
        coeffs[d] = coeffs.get(d, Fraction(0)) + v
        e = store.class_inverse(d)
        coeffs[e] = coeffs.get(e, Fraction(0)) + v
    return HeckeElement(store, coeffs)


def _linfit(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return 0.0, 1.0
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    intercept = my - slope * mx
    syy = sum((y - my) ** 2 for y in ys)
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    r2 = 1.0 if syy < 1e-30 else max(0.0, 1.0 - ss_res / syy)
    return slope, r2


def rd_profile(pair: HeckePair, store: CosetStore, l: Optional[LengthFunction],
               r_max: int, config: Optional[dict] = None, seed: int = 0,
               unimod=None, threads: int = 1) -> RdProfile:
    """Best norm-to-l2 ratios over families of test functions supported in
    the radius-r balls, with weighted-norm stability fits.

    A non-unimodular pair short-circuits to the obstruction verdict: no
    ratio data can rescue property (RD) there.  ``threads`` caps the
    workers used for the power iterations (everything that touches the
    store runs single-threaded; results merge in task order either way)."""
    import random

    cfg = _config(config)
    if unimod is None:
        unimod = unimodularity_check(pair, store.caps.max_orbit)
    profile = RdProfile(pair.label, "inconclusive", unimod.verdict,
                        r_max, seed, cfg)
    if not unimod.verdict:
        profile.verdict = "obstructed-nonunimodular"
        return profile

    pad = int(cfg["rd.pad"])
    store.enumerate_to(r_max + pad)
    if l is None:
        l = word_length(store)
    rng = random.Random(seed)
    s_grid = _s_grid(cfg)
    ball_size = len(store.ball_ids(store.radius_complete))

    classes_by_r: dict[int, list[int]] = {}
    for d, v in l.values.items():
        r = int(math.floor(float(v)))
        classes_by_r.setdefault(r, []).append(d)

    tasks = []
    for r in range(r_max + 1):
        ball_classes = sorted(
            d for d, v in l.values.items() if float(v) <= r)
        shell_classes = sorted(classes_by_r.get(r, []))
        fams: list[tuple[str, bool, HeckeElement]] = []
        if shell_classes:
            fams.append(("shell", True, HeckeElement(
                store, {d: Fraction(1) for d in shell_classes})))
        if ball_classes:
            fams.append(("ball", True, HeckeElement(
                store, {d: Fraction(1) for d in ball_classes})))
        for i in range(int(cfg["rd.n_random"])):
            fams.append((f"random-{i}", True, _symmetrized_random(
                store, ball_classes, rng, int(cfg["rd.coeff_max"]), False)))
        fams.append(("signed", False, _symmetrized_random(
            store, ball_classes, rng, int(cfg["rd.coeff_max"]), True)))
        for family, nonneg, f in fams:
            if f:
                tasks.append((r, family, nonneg, f))

    records = _run_tasks(tasks, store, l, s_grid, cfg, profile,
                         pad, max(1, threads))
    best: dict[int, tuple[float, str]] = {}
    for rec in records:
        profile.records.append(rec)
        if rec.nonneg and (rec.r not in best or rec.ratio > best[rec.r][0]):
            best[rec.r] = (rec.ratio, rec.family)

    profile.best = [(r, v, w) for r, (v, w) in sorted(best.items())]
    floor = 1.0 / math.sqrt(ball_size)
    for r, v, _ in profile.best:
        if v < floor:
            profile.warnings.append(
                f"best ratio at r={r} below the sanity floor {floor:.3g}")

    if len(profile.best) >= 2:
        xs = [math.log(1.0 + r) for r, _, _ in profile.best]
        ys = [math.log(max(v, 1e-300)) for _, v, _ in profile.best]
        profile.poly_slope, profile.poly_r2 = _linfit(xs, ys)
        profile.exp_slope, _ = _linfit([float(r) for r, _, _ in profile.best], ys)

    if len(profile.best) < 4:
        profile.verdict = "inconclusive"
        return profile
    try:
        fit = rd_weighted_fit(profile, l, s_grid)
        profile.s_hat, profile.c_hat = fit
        profile.verdict = "polynomial-compatible"
    except NoStableFit:
        profile.verdict = "superpolynomial-ratio"
    return profile


def _truncation_radius(store: CosetStore, f: HeckeElement, want: int,
                       cfg: dict) -> int:
    """Largest truncation radius within the matrix-cost budget: the column
    count times the per-column row support sum_d R(d).  Any radius gives a
    valid lower bound; the budget only trades sharpness for time,
    deterministically."""
    budget = int(cfg["rd.max_matrix_cost"])
    supp = sum(store.class_R(d) for d in f.coeffs)
    hist = store.depth_histogram()
    radius = 0
    dim = 0
    for rr in range(min(want, store.radius_complete) + 1):
        dim += hist[rr] if rr < len(hist) else 0
        if rr > 0 and dim * supp > budget:
            break
        radius = rr
    return radius


def _run_tasks(tasks, store, l, s_grid, cfg, profile, pad,
               threads: int) -> list[RdTestRecord]:
    """Stage A touches the store (matrix build, moments) sequentially;
    stage B runs the pure power iterations, optionally on a thread pool;
    records are assembled in task order regardless of worker count."""
    prepared = []
    for r, family, nonneg, f in tasks:
        r_trunc = _truncation_radius(store, f, r + pad, cfg)
        op = None
        try:
            op = operator_matrix(f, store, r_trunc)
        except CapExceeded as exc:
            profile.partial = True
            profile.warnings.append(f"truncated norm skipped at r={r}: {exc}")
        root = 0.0
        n_mom = int(cfg["rd.moment_n"])
        if n_mom > 0:
            try:
                if is_self_adjoint(f):
                    root = spectral_lower_bound(f, n_mom)[-1]
            except CapExceeded as exc:
                profile.partial = True
                profile.warnings.append(f"moments skipped at r={r}: {exc}")
        weighted = {s: norms(f, l, s).weighted for s in s_grid}
        prepared.append((r, family, nonneg, f, op, r_trunc, root, weighted))

    tol = float(cfg["rd.tol"])
    max_iter = int(cfg["rd.max_iter"])

    def _norm_of(op):
        return 0.0 if op is None else truncated_norm(op, tol, max_iter)

    if threads > 1 and len(prepared) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            truncs = list(pool.map(_norm_of, [p[4] for p in prepared]))
    else:
        truncs = [_norm_of(p[4]) for p in prepared]

    records = []
    for (r, family, nonneg, f, op, r_trunc, root, weighted), trunc in zip(
            prepared, truncs):
        l2 = norms(f).l2
        lower = max(trunc, root)
        records.append(RdTestRecord(r, family, nonneg, lower, trunc, r_trunc,
                                    root, l2, lower / l2 if l2 else 0.0,
                                    weighted))
    return records


def _s_grid(cfg) -> list[float]:
    step = float(cfg["rd.s_grid_step"])
    s_max = float(cfg["rd.s_grid_max"])
    out = []
    s = 0.0
    while s <= s_max + 1e-9:
        out.append(round(s, 6))
        s += step
    return out


def rd_weighted_fit(profile: RdProfile, l: LengthFunction,
                    s_grid: Optional[list[float]] = None) -> tuple[float, float]:
    """Smallest s in the grid whose weighted ratios N(f)/||f||_{s,l} show
    no upward tail trend, together with the constant c that bounds them on
    the sampled range.  Raises NoStableFit when every s trends upward."""
    if s_grid is None:
        s_grid = _s_grid(profile.config)
    stable_slope = float(profile.config["rd.stable_slope"])
    tail_fraction = float(profile.config["rd.tail_fraction"])
    per_r: dict[int, dict[float, float]] = {}
    for rec in profile.records:
        if not rec.nonneg:
            continue
        for s, w in rec.weighted_norms.items():
            if w <= 0:
                continue
            ratio = rec.lower_bound / w
            slot = per_r.setdefault(rec.r, {})
            slot[s] = max(slot.get(s, 0.0), ratio)
    rs = sorted(per_r)
    if len(rs) < 4:
        raise NoStableFit("too few radii for a stability fit")
    tail_start = rs[0] + int((rs[-1] - rs[0]) * (1.0 - tail_fraction))
    tail = [r for r in rs if r >= tail_start] or rs[-3:]
    for s in s_grid:
        xs = [math.log(1.0 + r) for r in tail if s in per_r[r]]
        ys = [math.log(max(per_r[r][s], 1e-300)) for r in tail if s in per_r[r]]
        if len(xs) < 3:
            continue
        slope, _ = _linfit(xs, ys)
        if slope <= stable_slope:
            c_hat = max(per_r[r][s] for r in rs if s in per_r[r])
            return float(s), float(c_hat)
    raise NoStableFit("no exponent in the grid stabilized the ratios")


# ---------------------------------------------------------------------------
# Kesten diagnostic


@dataclass
class KestenReport:
    pair_label: str
    f_text: str
    n: int
    moments: list            # exact Fractions a_1..a_n
    rho: list                # floats a_n^(1/2n)
    l1: float
    trunc_norm: float
    trunc_radius: int
    amenability_index: float
    relatively_unimodular: bool
    config: dict
    hint: str

    def as_dict(self) -> dict:
        return {
            "pair": self.pair_label,
            "f": self.f_text,
            "n": self.n,
            "moments": [str(a) for a in self.moments],
            "rho": self.rho,
            "l1": self.l1,
            "trunc_norm": self.trunc_norm,
            "trunc_radius": self.trunc_radius,
            "amenability_index": self.amenability_index,
            "relatively_unimodular": self.relatively_unimodular,
            "config": {k: self.config[k] for k in sorted(self.config)},
            "hint": self.hint,
        }


def kesten_diagnostic(pair: HeckePair, store: CosetStore,
                      f: Optional[HeckeElement] = None,
                      n_moments: Optional[int] = None,
                      config: Optional[dict] = None,
                      unimod=None) -> KestenReport:
    """amenability_index = (best lower bound for ||lambda(f)||) / ||f||_1.

    The index sits in (0, 1] for relatively unimodular pairs; an index
    pinned near 1 is the amenable direction of the l1-norm criterion, a
    persistent gap is the non-amenable direction.  The hint thresholds are
    explicit config and the report is flagged when the pair is not
    relatively unimodular (the criterion is stated for the unimodular
    setting)."""
    cfg = _config(config)
    n = int(cfg["kesten.n"]) if n_moments is None else n_moments
    if unimod is None:
        unimod = unimodularity_check(pair, store.caps.max_orbit)
    if f is None:
        if store.radius_complete < 1:
            store.enumerate_to(1)
        ball1 = store.classes_in_ball(1)
        raw = HeckeElement(store, {d: Fraction(1) for d in ball1})
        sym = Fraction(1, 2) * (raw + involution(raw))
        f = Fraction(1, norms(sym).l1_exact) * sym
    if not is_self_adjoint(f):
        raise NotSelfAdjoint("kesten diagnostic needs f* = f")
    moments = power_moments(f, n)
    rho = [_nth_root(a, 2 * k) for k, a in enumerate(moments, start=1)]
    r_trunc = min(int(cfg["kesten.trunc_radius"]), store.radius_complete)
    trunc = truncated_norm(operator_matrix(f, store, r_trunc),
                           float(cfg["rd.tol"]), int(cfg["rd.max_iter"]))
    l1 = norms(f).l1
    lower = max(rho[-1] if rho else 0.0, trunc)
    index = lower / l1 if l1 else 0.0
    if index >= float(cfg["kesten.amenable_min"]):
        hint = "consistent-with-amenable"
    elif index <= float(cfg["kesten.nonamenable_max"]):
        hint = "gap-suggests-nonamenable"
    else:
        hint = "inconclusive"
    if not unimod.verdict:
        hint += " (flagged: pair is not relatively unimodular)"
    return KestenReport(pair.label, f.to_text(), n, moments, rho, l1,
                        trunc, r_trunc, index, unimod.verdict, cfg, hint)
