"""Information combining: the entropy of X1+X2 given (Y1, Y2) and its bounds.

Two bound expressions are provided for every conditional entropy kind:

* the *BSC expression* ``h_a(h_a^-1(H1) * h_a^-1(H2))``, met with equality by
  pairs of binary symmetric channels, and
* the *BEC expression*, a bilinear chord in K-space, met with equality by
  pairs of binary erasure channels.

Which one is the lower bound depends on the convexity of the relevant
kk-function and on whether the map from averaged K-values back to entropy is
increasing or decreasing; :func:`expected_order` encodes that table.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import core
from .channels import JointDistribution, cond_entropy, k_cond
from .core import Alpha, EntropyKind, KKKind
from .errors import DomainError, UnsupportedOrderError
from .precision import get_precision

LN2 = math.log(2.0)
VERDICT_TOL = 1e-10

# boundaries of the "neither convex nor concave" windows
KKA_NEITHER = (1.5783, 2.0)
KKA_NEITHER_PROVEN = (1.58, 1.97)
HH_NEITHER = (1.3863, 2.0)
HH_NEITHER_PROVEN = (1.387, 1.95)


# ---------------------------------------------------------------------------
# the combined pair


def combine_pair(j1: JointDistribution, j2: JointDistribution) -> JointDistribution:
    """Joint of (X1 xor X2, (Y1, Y2)) for independent pairs; outputs not merged."""
    a, b = j1.table, j2.table
    if a.shape[0] != 2 or b.shape[0] != 2:
        raise DomainError("combine_pair needs binary X in both pairs")
    same = np.outer(a[0], b[0]) + np.outer(a[1], b[1])
    diff = np.outer(a[0], b[1]) + np.outer(a[1], b[0])
    mult = None
    if j1.mult is not None or j2.mult is not None:
        mult = np.outer(j1.counts, j2.counts).reshape(-1)
    return JointDistribution(np.vstack([same.reshape(-1), diff.reshape(-1)]), mult)


def second_branch_entropy(j1: JointDistribution, j2: JointDistribution) -> float:
    """Shannon H(X2 | X1+X2, Y1, Y2), computed from the four-variable joint."""
    a, b = j1.table, j2.table
    if a.shape[0] != 2 or b.shape[0] != 2:
        raise DomainError("second_branch_entropy needs binary X in both pairs")
    rows = []
    for x2 in (0, 1):
        # columns ordered (s, y1, y2) with s = x1 xor x2
        cols = [np.outer(a[s ^ x2], b[x2]).reshape(-1) for s in (0, 1)]
        rows.append(np.concatenate(cols))
    mult = None
    if j1.mult is not None or j2.mult is not None:
        m = np.outer(j1.counts, j2.counts).reshape(-1)
        mult = np.concatenate([m, m])
    return cond_entropy(JointDistribution(np.vstack(rows), mult), 1, EntropyKind.SHANNON)


# ---------------------------------------------------------------------------
# bound expressions


def bsc_bound(H1, H2, alpha, prec=None):
    """h_a(h_a^-1(H1) * h_a^-1(H2)); Mrs. Gerber's expression at alpha=1."""
    P = get_precision(prec)
    p1 = core.binary_renyi_inverse(H1, alpha, P)
    p2 = core.binary_renyi_inverse(H2, alpha, P)
    return core.binary_renyi(core.convolve(p1, p2), alpha, P)


def _bec_shannon(H1, H2, P):
    ln2 = P.ln2
    return ln2 - (ln2 - P.num(H1)) * (ln2 - P.num(H2)) / ln2


def bec_bound(j1k, j2k, alpha, kind, prec=None):
    """BEC expression.

    For kinds A, H, J the inputs are K-values and the result is
    ``pre * ln((d - K1)(d - K2)/(1 - d) + d)`` with ``d`` the uniform K-value
    (``d^A`` for A, ``d^H`` for H and J).  For kind C (and Shannon) the inputs
    are entropies and the result is ``ln2 - (ln2 - H1)(ln2 - H2)/ln2``.
    """
    P = get_precision(prec)
    kind = EntropyKind.parse(kind)
    a = Alpha.parse(alpha)
    if kind in (EntropyKind.C, EntropyKind.SHANNON):
        return _bec_shannon(j1k, j2k, P)
    if kind not in (EntropyKind.A, EntropyKind.H, EntropyKind.J):
        raise ValueError(f"no BEC expression for kind {kind.value}")
    if a.is_shannon:
        raise UnsupportedOrderError("K-values degenerate at alpha=1; use the Shannon form")
    dk = EntropyKind.A if kind is EntropyKind.A else EntropyKind.H
    d = core.delta_const(a, dk, P)
    K1, K2 = P.num(j1k), P.num(j2k)
    arg = (d - K1) * (d - K2) / (1 - d) + d
    if not arg > 0:
        raise DomainError(f"BEC expression has nonpositive log argument {arg}")
    if a.is_min:
        return -P.log(arg)
    al = a.as_num(P)
    pre = al / (1 - al) if kind is EntropyKind.A else 1 / (1 - al)
    return pre * P.log(arg)


def bec_bound_from_entropies(H1, H2, alpha, kind, prec=None):
    """BEC expression with entropies as inputs for every kind."""
    P = get_precision(prec)
    kind = EntropyKind.parse(kind)
    a = Alpha.parse(alpha)
    if kind in (EntropyKind.C, EntropyKind.SHANNON) or a.is_shannon:
        return _bec_shannon(H1, H2, P)
    return bec_bound(core.k_from_entropy(H1, a, kind, P),
                     core.k_from_entropy(H2, a, kind, P), a, kind, P)


def gap_delta(p, alpha, kind, prec=None):
    """BSC expression minus BEC expression for two copies of BSC(p).

    A sign change of this gap across p at fixed alpha rules out both convexity
    and concavity of the underlying kk-function.
    """
    P = get_precision(prec)
    a = Alpha.parse(alpha)
    kind = EntropyKind.parse(kind)
    if a.is_shannon:
        raise UnsupportedOrderError("gap_delta needs alpha != 1")
    p = P.num(p)
    if not (0 < p <= P.num(1) / 2):
        raise DomainError("p must lie in (0, 1/2]")
    top = core.binary_renyi(core.convolve(p, p), a, P)
    if kind is EntropyKind.C:
        h = core.binary_renyi(p, a, P)
        return top - _bec_shannon(h, h, P)
    if kind not in (EntropyKind.A, EntropyKind.H):
        raise ValueError("gap_delta kinds are A, H, C")
    K = core.k_value(p, a, kind, P)
    return top - bec_bound(K, K, a, kind, P)


def gx15_lower(H1, H2) -> float:
    """0.799 H (ln2 - H)/ln2 + H, only defined for equal entropies."""
    if H1 != H2:
        raise DomainError("the GX15 bound needs H1 == H2")
    H = float(H1)
    return 0.799 * H * (LN2 - H) / LN2 + H


@dataclass(frozen=True)
class ShannonBaselines:
    mgl_lower: float
    bec_upper: float
    plus_lower: float
    plus_upper: float
    gx15_lower: float | None


def shannon_baselines(H1, H2) -> ShannonBaselines:
    """Shannon-case bounds for both branches (gx15 only when H1 == H2)."""
    H1, H2 = float(H1), float(H2)
    for h in (H1, H2):
        if not -1e-12 <= h <= LN2 + 1e-12:
            raise DomainError(f"entropy {h} outside [0, ln 2]")
    mgl = float(bsc_bound(H1, H2, 1, "double"))
    return ShannonBaselines(
        mgl_lower=mgl,
        bec_upper=float(_bec_shannon(H1, H2, get_precision("double"))),
        plus_lower=H1 * H2 / LN2,
        plus_upper=H1 + H2 - mgl,
        gx15_lower=gx15_lower(H1, H2) if H1 == H2 else None,
    )


# ---------------------------------------------------------------------------
# regime table


@dataclass(frozen=True)
class Regime:
    function: KKKind
    shape: str  # convex | concave | linear | neither
    proven: bool


def kk_kind_for(kind) -> KKKind:
    kind = EntropyKind.parse(kind)
    if kind is EntropyKind.A or kind is EntropyKind.MIN:
        return KKKind.KK_A
    if kind in (EntropyKind.H, EntropyKind.J):
        return KKKind.KK_H
    return KKKind.HH


def regime(kind, alpha) -> Regime:
    """Known (or conjectured) shape of the kk-function behind ``kind`` at ``alpha``."""
    kind = EntropyKind.parse(kind)
    a = Alpha.parse(alpha)
    v = a.value
    fn = kk_kind_for(kind)
    if kind is EntropyKind.SHANNON or a.is_shannon:
        return Regime(KKKind.HH, "convex", True)
    if fn is KKKind.KK_A:
        if a.is_min:
            return Regime(fn, "linear", True)
        if v >= 2:
            return Regime(fn, "convex", True)
        if v > KKA_NEITHER[0]:
            lo, hi = KKA_NEITHER_PROVEN
            return Regime(fn, "neither", lo < v < hi)
        return Regime(fn, "concave" if v > 1 else "convex", False)
    if fn is KKKind.KK_H:
        if a.is_min:
            raise UnsupportedOrderError(f"kind {kind.value} is not defined at alpha=inf")
        if v in (2.0, 3.0):
            return Regime(fn, "linear", True)
        if v < 1 or 2 < v < 3:
            return Regime(fn, "convex", True)
        return Regime(fn, "concave", True)
    if a.is_min:
        raise UnsupportedOrderError("kind C is not defined at alpha=inf")
    if HH_NEITHER[0] <= v < HH_NEITHER[1]:
        lo, hi = HH_NEITHER_PROVEN
        return Regime(fn, "neither", lo < v < hi)
    return Regime(fn, "convex" if v < HH_NEITHER[0] else "concave", False)


def _transform_increasing(kind: EntropyKind, a: Alpha) -> bool:
    # averaged K-values map back to entropy via pre*ln(K): decreasing for alpha>1
    if kind in (EntropyKind.C, EntropyKind.SHANNON) or a.is_shannon:
        return True
    return a.value < 1


def expected_order(kind, alpha) -> str | None:
    """'bsc_lower', 'bsc_upper', 'equal', or None when no order is known."""
    kind = EntropyKind.parse(kind)
    a = Alpha.parse(alpha)
    if kind is EntropyKind.MIN:
        kind, a = EntropyKind.A, Alpha(math.inf)
    reg = regime(kind, a)
    if reg.shape == "neither":
        return None
    if reg.shape == "linear":
        return "equal"
    convex = reg.shape == "convex"
    return "bsc_lower" if convex == _transform_increasing(kind, a) else "bsc_upper"


# ---------------------------------------------------------------------------
# bound reports


@dataclass(frozen=True)
class BoundReport:
    """Actual combined entropy against both bound expressions (nats).

    Slacks are signed so that a nonnegative value means the expected
    inequality holds.  ``assertive`` is False when the regime is only
    conjectured or has no order at all; the verdict is then informational.
    """

    actual: float
    bsc_bound: float
    bec_bound: float
    alpha: str
    kind: str
    regime: str
    proven: bool
    orientation: str
    bsc_slack: float
    bec_slack: float
    verdict: str
    assertive: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _verdict(bsc_ok: bool, bec_ok: bool) -> str:
    if bsc_ok and bec_ok:
        return "sandwiched"
    if bec_ok:
        return "bsc_violated"
    if bsc_ok:
        return "bec_violated"
    return "both_violated"


def check_bounds(j1: JointDistribution, j2: JointDistribution, alpha, kind,
                 tol: float = VERDICT_TOL) -> BoundReport:
    """Evaluate the combined entropy, both bound expressions and the verdict."""
    kind = EntropyKind.parse(kind)
    a = Alpha.parse(alpha)
    if kind is EntropyKind.MIN:
        kind, a = EntropyKind.A, Alpha(math.inf)
    if kind is EntropyKind.SHANNON:
        a = Alpha(1.0)
    if a.is_shannon:
        kind = EntropyKind.SHANNON
    H1 = cond_entropy(j1, a, kind)
    H2 = cond_entropy(j2, a, kind)
    actual = cond_entropy(combine_pair(j1, j2), a, kind)
    bsc = float(bsc_bound(H1, H2, a, "double"))
    if kind in (EntropyKind.A, EntropyKind.H, EntropyKind.J):
        bec = float(bec_bound(k_cond(j1, a, kind), k_cond(j2, a, kind), a, kind, "double"))
    else:
        bec = float(_bec_shannon(H1, H2, get_precision("double")))
    reg = regime(kind, a)
    order = expected_order(kind, a)
    assertive = reg.proven and order is not None
    if order in (None, "equal"):
        orientation = "bsc_lower" if bsc <= bec else "bsc_upper"
    else:
        orientation = order
    if orientation == "bsc_lower":
        bsc_slack, bec_slack = actual - bsc, bec - actual
    else:
        bsc_slack, bec_slack = bsc - actual, actual - bec
    return BoundReport(
        actual=actual, bsc_bound=bsc, bec_bound=bec, alpha=str(a), kind=kind.value,
        regime=reg.shape, proven=reg.proven, orientation=orientation,
        bsc_slack=bsc_slack, bec_slack=bec_slack,
        verdict=_verdict(bsc_slack >= -tol, bec_slack >= -tol),
        assertive=assertive,
    )
