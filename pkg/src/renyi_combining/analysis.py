"""Numerical convexity analysis of the kk-functions and verification suites.

Everything here is numerical evidence: second differences on grids, sign
checks of the BSC-minus-BEC gap, and identity checks of the auxiliary
kernels.  Nothing in this module is a certified proof.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from typing import Iterable, Sequence

import numpy as np

from . import core
from .channels import channel_to_joint, cond_entropy, random_channel
from .combining import bsc_bound, combine_pair, gap_delta
from .core import Alpha, EntropyKind, KKKind
from .errors import DomainError
from .precision import Precision, get_precision

DOMAIN_MARGIN = 1e-4
CLASSIFY_TOL = {"double": 1e-9, "extended": 1e-20}
LINEARITY_TOL = 1e-10
DEFAULT_GRID = 64
CE_STEP = Decimal("0.005")


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    limit: float | None = None
    note: str = ""

    def __post_init__(self):
        # numpy scalars are not JSON serializable
        self.passed = bool(self.passed)
        if self.value is not None:
            self.value = float(self.value)
        if self.limit is not None:
            self.limit = float(self.limit)


@dataclass
class Report:
    """Outcome of a verification suite: itemized checks plus raw data."""

    name: str
    precision: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"name": self.name, "precision": self.precision, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks], "data": self.data}

    def to_text(self) -> str:
        lines = [f"{self.name} [{self.precision}]: {'PASS' if self.passed else 'FAIL'}"]
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            val = "" if c.value is None else f"  value={c.value:.6g}"
            lim = "" if c.limit is None else f"  limit={c.limit:.3g}"
            note = f"  ({c.note})" if c.note else ""
            lines.append(f"  {'ok  ' if c.passed else 'FAIL'} {c.name:<{width}}{val}{lim}{note}")
        return "\n".join(lines)


def alpha_grid(start, stop, step) -> list[Decimal]:
    """Decimal grid start, start+step, ... strictly below stop."""
    start, stop, step = Decimal(str(start)), Decimal(str(stop)), Decimal(str(step))
    if step <= 0:
        raise DomainError("alpha step must be positive")
    out = []
    a = start
    while a < stop:
        out.append(a)
        a += step
    return out


# ---------------------------------------------------------------------------
# convexity classification


@dataclass
class ConvexityVerdict:
    """Grid classification of x -> kk(x, y) for every y on the grid."""

    kind: str
    alpha: str
    classification: str  # convex | concave | linear | neither
    min_second_diff: float
    max_second_diff: float
    slice_min: list[float]
    slice_max: list[float]
    grid_n: int
    margin: float
    tol: float
    lin_tol: float
    precision: str

    def to_dict(self, slices: bool = False) -> dict:
        d = asdict(self)
        if not slices:
            d.pop("slice_min")
            d.pop("slice_max")
        return d


def _classify(lo: float, hi: float, tol: float, lin_tol: float) -> str:
    if max(abs(lo), abs(hi)) < lin_tol:
        return "linear"
    pos, neg = hi > tol, lo < -tol
    if pos and neg:
        return "neither"
    if neg:
        return "concave"
    if pos:
        return "convex"
    return "convex" if hi >= -lo else "concave"


def _linspace(lo, hi, n: int, P: Precision) -> list:
    return [lo + (hi - lo) * P.num(i) / (n - 1) for i in range(n)]


def kk_grid(kind, alpha, grid_n: int = DEFAULT_GRID, margin: float = DOMAIN_MARGIN,
            prec=None):
    """Grid of transformed coordinates and the matrix M[i, j] = kk(x_i, x_j)."""
    P = get_precision(prec)
    fwd, inv, lo, hi = core.kk_maps(kind, alpha, P)
    xs = _linspace(lo + P.num(margin), hi - P.num(margin), grid_n, P)
    ps = [inv(x) for x in xs]
    M = [[fwd(core.convolve(p, q)) for q in ps] for p in ps]
    return xs, M


def classify_convexity(kind, alpha, grid_n: int = DEFAULT_GRID, tol: float | None = None,
                       prec=None, margin: float = DOMAIN_MARGIN,
                       lin_tol: float = LINEARITY_TOL) -> ConvexityVerdict:
    """Classify kk(., y) by central second differences on a grid_n x grid_n grid."""
    if grid_n < 16:
        raise DomainError("grid_n must be at least 16")
    P = get_precision(prec)
    kind = KKKind.parse(kind)
    a = Alpha.parse(alpha)
    if tol is None:
        tol = CLASSIFY_TOL[P.name]
    _, M = kk_grid(kind, a, grid_n, margin, P)
    smin, smax = [], []
    for j in range(grid_n):
        col = [M[i][j] for i in range(grid_n)]
        d2 = [col[i - 1] - 2 * col[i] + col[i + 1] for i in range(1, grid_n - 1)]
        smin.append(float(min(d2)))
        smax.append(float(max(d2)))
    lo, hi = min(smin), max(smax)
    return ConvexityVerdict(
        kind=kind.value, alpha=str(a), classification=_classify(lo, hi, tol, lin_tol),
        min_second_diff=lo, max_second_diff=hi, slice_min=smin, slice_max=smax,
        grid_n=grid_n, margin=margin, tol=tol, lin_tol=lin_tol, precision=P.name,
    )


# ---------------------------------------------------------------------------
# counterexamples


def gap_curve(p, kind, alphas: Iterable, prec=None) -> list[tuple]:
    """Rows (alpha, gap_delta(p, alpha, kind))."""
    P = get_precision(prec)
    out = []
    for a in alphas:
        al = Alpha.parse(str(a) if isinstance(a, Decimal) else a)
        out.append((al, gap_delta(p, al, kind, P)))
    return out


def _sign_check(name: str, p: str, kind: str, alphas: Sequence[Decimal], want: int,
                P: Precision) -> tuple[Check, dict]:
    rows = gap_curve(P.num(p), kind, alphas, P)
    bad = [str(a) for a, d in rows if not (d * want > 0)]
    vals = [float(d) for _, d in rows]
    extreme = max(vals) if want < 0 else min(vals)
    rng = f"[{alphas[0]}, {alphas[-1]}]"
    check = Check(
        name=f"{name}: sign({'<' if want < 0 else '>'}0) for p={p} on alpha in {rng}",
        passed=not bad, value=extreme, limit=0.0,
        note=f"{len(alphas)} points" + (f"; offending alpha: {', '.join(bad[:10])}" if bad else ""),
    )
    return check, {"p": p, "alphas": [str(a) for a in alphas], "delta": vals, "offending": bad}


def _crossing(p: str, kind: str, lo: str, hi: str, P: Precision, iters: int = 80):
    """Bisect for the alpha where gap_delta(p, ., kind) changes sign in (lo, hi)."""
    a, b = P.num(lo), P.num(hi)
    fa = gap_delta(P.num(p), Alpha(float(a), P.fmt(a)), kind, P)
    for _ in range(iters):
        m = (a + b) / 2
        fm = gap_delta(P.num(p), Alpha(float(m), P.fmt(m)), kind, P)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return float((a + b) / 2)


def _verify_counterexample(kind: str, small_p: str, small_range, big_p: str, big_range,
                           neither_fn: KKKind, suggested_edge: float, precision, step) -> Report:
    P = get_precision(precision)
    rep = Report(name=f"counterexample-{kind}", precision=P.name)
    small = alpha_grid(*small_range, step)
    big = alpha_grid(*big_range, step)
    c1, d1 = _sign_check(f"gap_{kind}", small_p, kind, small, -1, P)
    c2, d2 = _sign_check(f"gap_{kind}", big_p, kind, big, +1, P)
    rep.checks += [c1, c2]
    overlap = (max(small[0], big[0]), min(small[-1], big[-1]))
    rep.data = {"small": d1, "big": d2,
                "neither_window": [str(overlap[0]), str(overlap[1])],
                "neither_function": neither_fn.value}
    # sign conflict on the overlap means no convexity/concavity there
    rep.checks.append(Check(
        name=f"{neither_fn.value} neither on [{overlap[0]}, {overlap[1]}]",
        passed=c1.passed and c2.passed and overlap[0] < overlap[1],
    ))
    # informational: where the p-near-1/2 gap changes sign (the suggested edge)
    cross = {}
    for p in ("0.49", "0.499", "0.4999"):
        try:
            cross[p] = _crossing(p, kind, "1.2", "1.99", P)
        except Exception as exc:  # pragma: no cover - report only
            cross[p] = repr(exc)
    rep.data["edge_probe"] = {"suggested_edge": suggested_edge, "crossing_alpha": cross}
    return rep


def verify_counterexample_A(precision="extended", step=CE_STEP) -> Report:
    """Opposite signs of the A-gap for BSC(1e-6) and BSC(0.49) on overlapping alpha."""
    return _verify_counterexample("A", "1e-6", ("1.001", "1.97"), "0.49", ("1.581", "1.999"),
                                  KKKind.KK_A, 1.5783, precision, step)


def verify_counterexample_C(precision="extended", step=CE_STEP) -> Report:
    """Opposite signs of the C-gap for BSC(1e-7) and BSC(0.49) on overlapping alpha."""
    return _verify_counterexample("C", "1e-7", ("1.001", "1.95"), "0.49", ("1.388", "1.999"),
                                  KKKind.HH, 1.3863, precision, step)


# ---------------------------------------------------------------------------
# linearity


LINEAR_CASES = {"kkH@2": (KKKind.KK_H, "2", EntropyKind.H),
                "kkH@3": (KKKind.KK_H, "3", EntropyKind.H),
                "kkA@inf": (KKKind.KK_A, "inf", EntropyKind.A)}


def midpoint_defect(kind, alpha, grid_n: int = 20, margin: float = DOMAIN_MARGIN, prec=None) -> float:
    """max |kk((x1+x2)/2, y) - (kk(x1, y) + kk(x2, y))/2| over grid triples."""
    P = get_precision(prec)
    fwd, inv, lo, hi = core.kk_maps(kind, alpha, P)
    xs = _linspace(lo + P.num(margin), hi - P.num(margin), grid_n, P)
    ps = [inv(x) for x in xs]
    worst = 0.0
    for i in range(grid_n):
        for k in range(i + 1, grid_n):
            pm = inv((xs[i] + xs[k]) / 2)
            for q in ps:
                mid = fwd(core.convolve(pm, q))
                avg = (fwd(core.convolve(ps[i], q)) + fwd(core.convolve(ps[k], q))) / 2
                worst = max(worst, float(abs(mid - avg)))
    return worst


def verify_linearity(case: str = "kkH@2", n_pairs: int = 500, seed: int = 0,
                     grid_n: int = 20, tol: float = LINEARITY_TOL) -> Report:
    """Midpoint linearity of kk plus exact equality of the combined entropy."""
    try:
        fn, alpha, ek = LINEAR_CASES[case]
    except KeyError:
        raise DomainError(f"unknown linearity case {case!r}; choose from {sorted(LINEAR_CASES)}") from None
    rep = Report(name=f"linearity-{case}", precision="double")
    defect = midpoint_defect(fn, alpha, grid_n)
    rep.checks.append(Check("midpoint defect", defect < tol, defect, tol, f"{grid_n}-point grid"))
    if case == "kkA@inf":
        xs = np.linspace(0.5, 1.0, 41)
        worst = max(abs(core.kk(x, y, "inf", KKKind.KK_A) - (1 - core.convolve(x, y)))
                    for x in xs for y in xs)
        rep.checks.append(Check("kk_inf(x,y) = 1 - x*y", worst < tol, worst, tol))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        j1 = channel_to_joint(random_channel(rng))
        j2 = channel_to_joint(random_channel(rng))
        H1, H2 = cond_entropy(j1, alpha, ek), cond_entropy(j2, alpha, ek)
        actual = cond_entropy(combine_pair(j1, j2), alpha, ek)
        worst = max(worst, abs(actual - float(bsc_bound(H1, H2, alpha, "double"))))
    rep.checks.append(Check("combined entropy equals BSC expression", worst < tol, worst, tol,
                            f"{n_pairs} random pairs, seed {seed}"))
    return rep


# ---------------------------------------------------------------------------
# appendix identities


def _fd(fun, x, step):
    return (fun(x + step) - fun(x - step)) / (2 * step)


def g_criterion_shape(alpha, n_x: int = 9, n_c: int = 7, n_y: int = 41, slack: float = 1e-12) -> str:
    """Shape of kk^H implied by where g^x(y) - g^x(x) sits over sampled (x, c, y)."""
    lo, hi = 0.0, 0.0
    for x in np.linspace(0.05, 0.95, n_x):
        for c in np.linspace(0.02, 0.98, n_c):
            gx = core.appendix_g(x, x, c, alpha)
            for y in np.linspace(0.01, 0.99, n_y):
                d = core.appendix_g(y, x, c, alpha) - gx
                lo, hi = min(lo, d), max(hi, d)
    if hi <= slack and lo >= -slack:
        return "linear"
    if lo >= -slack:
        return "convex"
    if hi <= slack:
        return "concave"
    return "neither"


def verify_appendix_identities(n_samples: int = 100, seed: int = 0) -> Report:
    """The five identity/consistency checks of the auxiliary kernels."""
    rep = Report(name="appendix", precision="double")
    rng = np.random.default_rng(seed)

    # (i) closed-form derivative vs central differences of binary_renyi
    worst = 0.0
    step = 1e-6
    xs = np.concatenate([np.linspace(0.01, 0.45, 23), np.linspace(0.55, 0.99, 23)])
    for a in (0.5, 1.5, 2.0, 3.0):
        for x in xs:
            cf = core.appendix_hprime(x, a)
            fd = _fd(lambda t: core.binary_renyi(t, a), x, step)
            worst = max(worst, abs(fd - cf) / abs(cf))
    rep.checks.append(Check("(i) h' closed form vs finite difference (relative)", worst < 1e-6, worst, 1e-6))

    # (ii) stationarity of g^x at y = x
    worst = 0.0
    for _ in range(n_samples):
        a = float(rng.choice([rng.uniform(0.3, 0.95), rng.uniform(1.05, 6.0)]))
        x = float(rng.uniform(0.05, 0.95))
        c = float(rng.uniform(0.0, 1.0))
        worst = max(worst, abs(_fd(lambda y: core.appendix_g(y, x, c, a), x, step)))
    rep.checks.append(Check("(ii) g'(x) = 0 at y = x", worst < 1e-6, worst, 1e-6, f"{n_samples} samples"))

    # (iii) closed forms of k_2 and k_3 along the convolution
    worst = 0.0
    grid = np.linspace(0.0, 1.0, 10)
    for order in (2, 3):
        for y in grid:
            for c in grid:
                ref = core.k_value(core.convolve(y, c), order, "H")
                worst = max(worst, abs(core.closed_form_k23(y, c, order) - ref))
    rep.checks.append(Check("(iii) k_2/k_3 closed forms", worst < 1e-14, worst, 1e-14, "100-point grid"))

    # (iv) g independent of y at alpha in {2, 3}
    worst = 0.0
    ys = np.linspace(0.01, 0.99, 99)
    for a in (2, 3):
        for x in (0.1, 0.3, 0.5, 0.8):
            for c in (0.05, 0.2, 0.4, 0.7):
                vals = [core.appendix_g(y, x, c, a) for y in ys]
                worst = max(worst, max(vals) - min(vals))
    rep.checks.append(Check("(iv) g constant in y at alpha in {2,3}", worst < 1e-12, worst, 1e-12))

    # (v) the g criterion agrees with second differences of kk^H
    shapes = {}
    agree = True
    for a in (0.5, 1.5, 2.5, 4.0):
        crit = g_criterion_shape(a)
        grid_shape = classify_convexity(KKKind.KK_H, a).classification
        shapes[str(a)] = {"g_criterion": crit, "second_differences": grid_shape}
        agree = agree and crit == grid_shape
    rep.checks.append(Check("(v) g criterion matches second-difference sign", agree,
                            note=", ".join(f"{k}:{v['g_criterion']}/{v['second_differences']}"
                                           for k, v in shapes.items())))
    rep.data["shapes"] = shapes
    return rep


# ---------------------------------------------------------------------------
# conjecture scans


@dataclass
class ScanTable:
    """Per-alpha classification; numerical evidence, not a proof."""

    kind: str
    rows: list[dict]
    transitions: list[dict]
    grid_n: int
    tol: float
    precision: str
    label: str = "numerical evidence"

    def to_dict(self) -> dict:
        return asdict(self)


def conjecture_scan(kind, alphas: Iterable, grid_n: int = DEFAULT_GRID, tol: float | None = None,
                    prec=None) -> ScanTable:
    """Classify kk on every alpha of the grid and report shape transitions."""
    P = get_precision(prec)
    kind = KKKind.parse(kind)
    if tol is None:
        tol = CLASSIFY_TOL[P.name]
    rows = []
    for a in alphas:
        al = Alpha.parse(str(a) if isinstance(a, Decimal) else a)
        v = classify_convexity(kind, al, grid_n, tol, P)
        rows.append({"alpha": str(al), "classification": v.classification,
                     "min_second_diff": v.min_second_diff, "max_second_diff": v.max_second_diff})
    transitions = []
    for prev, cur in zip(rows, rows[1:]):
        if prev["classification"] != cur["classification"]:
            transitions.append({"from": prev["classification"], "to": cur["classification"],
                                "between": [prev["alpha"], cur["alpha"]]})
    return ScanTable(kind=kind.value, rows=rows, transitions=transitions,
                     grid_n=grid_n, tol=tol, precision=P.name)


def verify_all(precision="extended", seed: int = 0, n_pairs: int = 500) -> list[Report]:
    reports = [verify_counterexample_A(precision), verify_counterexample_C(precision)]
    reports += [verify_linearity(case, n_pairs=n_pairs, seed=seed) for case in LINEAR_CASES]
    reports.append(verify_appendix_identities(seed=seed))
    return reports
