"""Polar transform and polarization of the Jizba-Arimitsu alpha-mutual information.

I_alpha^J(W) = H_alpha(X) - H_alpha^J(X|Y)
             = (1/(1-a)) [ln sum p(x)^a + ln sum p(y)^a - ln sum p(x,y)^a]

with a uniform input.  It obeys the same exact two-channel chain rule as
H_alpha^J, which is what drives polarization; this module checks that chain
rule, the one-step growth, and tracks a small polarization tree exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .channels import BinaryChannel, compress_identical_outputs, merge_equivalent_outputs
from .combining import LN2, bec_bound_from_entropies, bsc_bound, expected_order
from .core import Alpha, EntropyKind
from .errors import ConfigError, UnsupportedOrderError

MAX_DEPTH_EXACT = 4
MAX_DEPTH_MERGED = 12
MAX_OUTPUTS = 4_000_000


# ---------------------------------------------------------------------------
# one-step transforms


def polar_minus(W: BinaryChannel, W2: BinaryChannel | None = None) -> BinaryChannel:
    """W-((y1, y2) | u1) = 1/2 sum_u2 W(y1 | u1+u2) W2(y2 | u2); m1*m2 outputs."""
    V = W if W2 is None else W2
    w0 = 0.5 * (np.outer(W.w0, V.w0) + np.outer(W.w1, V.w1))
    w1 = 0.5 * (np.outer(W.w1, V.w0) + np.outer(W.w0, V.w1))
    mult = None
    if W.mult is not None or V.mult is not None:
        mult = np.outer(W.counts, V.counts).reshape(-1)
    return BinaryChannel(w0.reshape(-1), w1.reshape(-1), mult)


def polar_plus(W: BinaryChannel, W2: BinaryChannel | None = None) -> BinaryChannel:
    """W+((y1, y2, u1) | u2) = 1/2 W(y1 | u1+u2) W2(y2 | u2); 2*m1*m2 outputs."""
    V = W if W2 is None else W2
    w0 = 0.5 * np.concatenate([np.outer(W.w0, V.w0).reshape(-1), np.outer(W.w1, V.w0).reshape(-1)])
    w1 = 0.5 * np.concatenate([np.outer(W.w1, V.w1).reshape(-1), np.outer(W.w0, V.w1).reshape(-1)])
    mult = None
    if W.mult is not None or V.mult is not None:
        m = np.outer(W.counts, V.counts).reshape(-1)
        mult = np.concatenate([m, m])
    return BinaryChannel(w0, w1, mult)


def mutual_info_J(W: BinaryChannel, alpha) -> float:
    """I_alpha^J with uniform input, in nats (Shannon mutual information at alpha=1)."""
    a = Alpha.parse(alpha)
    if a.is_min:
        raise UnsupportedOrderError("I^J is not defined at alpha=inf")
    c = W.counts
    pxy = 0.5 * np.vstack([W.w0, W.w1])
    py = pxy.sum(axis=0)
    with np.errstate(divide="ignore"):
        log_pxy = np.log(pxy)
        log_py = np.log(py)
    if a.is_shannon:
        with np.errstate(invalid="ignore"):
            terms = np.where(pxy > 0, pxy * (log_pxy - np.log(0.5) - log_py), 0.0)
        return float(np.dot(terms.sum(axis=0), c))
    al = a.value
    joint = logsumexp((al * log_pxy).reshape(-1), b=np.broadcast_to(c, pxy.shape).reshape(-1))
    marg_x = math.log(2.0) + al * math.log(0.5)
    marg_y = logsumexp(al * log_py, b=c)
    return float((marg_x + marg_y - joint) / (1 - al))


@dataclass(frozen=True)
class PolarConditions:
    i_w: float
    i_plus: float
    i_minus: float
    chain_residual: float
    delta_W: float


def check_polar_conditions(W: BinaryChannel, alpha) -> PolarConditions:
    """Chain-rule residual I(W+)+I(W-)-2I(W) and one-step gap (I(W+)-I(W-))/2."""
    i_w = mutual_info_J(W, alpha)
    i_p = mutual_info_J(polar_plus(W), alpha)
    i_m = mutual_info_J(polar_minus(W), alpha)
    return PolarConditions(i_w, i_p, i_m, i_p + i_m - 2 * i_w, 0.5 * (i_p - i_m))


# ---------------------------------------------------------------------------
# growth constant


def lower_bound_minus_entropy(H: float, alpha) -> float:
    """Proven lower bound on H^J of the minus channel given H^J(W) = H for both inputs."""
    a = Alpha.parse(alpha)
    order = expected_order(EntropyKind.J, a)
    if order is None:
        raise UnsupportedOrderError(f"no proven bound for kind J at alpha={a}")
    if order == "bsc_upper":
        return float(bec_bound_from_entropies(H, H, a, EntropyKind.J, "double"))
    return float(bsc_bound(H, H, a, "double"))


def kappa_estimate(alpha, a: float, b: float, grid_n: int = 201) -> float:
    """Grid lower-bound proxy for the one-step gap on channels with I/ln2 in [a, b].

    With the chain rule, (I(W+) - I(W-))/2 = H^J(W-) - H^J(W), which is at
    least the proven bound on H^J(W-) minus H; the minimum over the window is
    returned in normalized units.
    """
    if not 0 < a < b < 1:
        raise ConfigError("need 0 < a < b < 1")
    al = Alpha.parse(alpha)
    worst = math.inf
    for i_norm in np.linspace(a, b, grid_n):
        H = (1.0 - i_norm) * LN2
        worst = min(worst, (lower_bound_minus_entropy(H, al) - H) / LN2)
    return worst


def hardest_channel(alpha) -> str:
    """Which extremal channel attains the lower bound on H^J(W-) ('BSC', 'BEC' or 'both')."""
    order = expected_order(EntropyKind.J, alpha)
    return {"bsc_lower": "BSC", "bsc_upper": "BEC", "equal": "both"}.get(order, "unknown")


# ---------------------------------------------------------------------------
# polarization tree


@dataclass(frozen=True)
class PolarConfig:
    alpha: Alpha
    max_depth: int
    a: float = 0.1
    b: float = 0.9
    merge_policy: str = "none"  # none | posterior_merge

    def __post_init__(self):
        object.__setattr__(self, "alpha", Alpha.parse(self.alpha))
        if not 0 < self.a < self.b < 1:
            raise ConfigError("thresholds need 0 < a < b < 1")
        if self.merge_policy not in ("none", "posterior_merge"):
            raise ConfigError(f"unknown merge policy {self.merge_policy!r}")
        if self.alpha.is_min:
            raise ConfigError("I^J is not defined at alpha=inf")
        if self.max_depth < 0:
            raise ConfigError("depth must be nonnegative")
        if self.merge_policy == "posterior_merge":
            if not self.alpha.is_shannon:
                raise ConfigError("posterior merging changes H^J; it is only lossless at alpha=1")
            if self.max_depth > MAX_DEPTH_MERGED:
                raise ConfigError(f"depth {self.max_depth} > {MAX_DEPTH_MERGED} with posterior merging")
        elif self.max_depth > MAX_DEPTH_EXACT:
            raise ConfigError(f"depth {self.max_depth} > {MAX_DEPTH_EXACT} without merging")


@dataclass(frozen=True)
class PolarNode:
    path: str
    level: int
    i_value: float
    channel: BinaryChannel = field(repr=False)
    index: int = 0


@dataclass(frozen=True)
class LevelStats:
    level: int
    mean: float
    variance: float
    frac_low: float
    frac_mid: float
    frac_high: float


@dataclass
class PolarResult:
    nodes: list[PolarNode]
    stats: list[LevelStats]
    config: PolarConfig

    def leaves(self) -> list[PolarNode]:
        return [n for n in self.nodes if n.level == self.config.max_depth]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["path", "level", "i_value"])
        for n in self.nodes:
            w.writerow([n.path, n.level, f"{n.i_value:.17g}"])
        return buf.getvalue()

    def stats_dicts(self) -> list[dict]:
        return [asdict(s) for s in self.stats]


def _reduce(W: BinaryChannel, policy: str) -> BinaryChannel:
    if policy == "posterior_merge":
        return merge_equivalent_outputs(W)
    return compress_identical_outputs(W)


def _level_stats(level: int, vals: Sequence[float], a: float, b: float) -> LevelStats:
    v = np.asarray(vals)
    n = v.size
    return LevelStats(level, float(v.mean()), float(v.var()),
                      float(np.count_nonzero(v < a)) / n,
                      float(np.count_nonzero((v >= a) & (v <= b))) / n,
                      float(np.count_nonzero(v > b)) / n)


def polarize_tree(W: BinaryChannel | Sequence[BinaryChannel], cfg: PolarConfig) -> PolarResult:
    """All synthetic channels down to ``cfg.max_depth`` with their normalized I^J.

    ``W`` may be a single channel or a sequence of 2**max_depth channels
    (non-stationary case); in the latter, consecutive channels are paired at
    every level.  Without merging, identical likelihood pairs are collapsed
    into multiplicities, which is exact for I^J.
    """
    if isinstance(W, BinaryChannel):
        groups: list[tuple[str, list[BinaryChannel]]] = [("", [W])]
    else:
        chans = list(W)
        if len(chans) != 2**cfg.max_depth:
            raise ConfigError(f"need {2**cfg.max_depth} channels for depth {cfg.max_depth}, got {len(chans)}")
        groups = [("", chans)]
    al = cfg.alpha
    nodes: list[PolarNode] = []
    stats: list[LevelStats] = []
    for level in range(cfg.max_depth + 1):
        vals = []
        for path, chans in groups:
            for idx, ch in enumerate(chans):
                iv = mutual_info_J(ch, al) / LN2
                nodes.append(PolarNode(path, level, iv, ch, idx))
                vals.append(iv)
        # stationary groups hold one representative for all 2**(depth-level) copies
        stats.append(_level_stats(level, vals, cfg.a, cfg.b))
        if level == cfg.max_depth:
            break
        nxt = []
        for path, chans in groups:
            pairs = [(c, c) for c in chans] if len(chans) == 1 else list(zip(chans[::2], chans[1::2]))
            size = max(2 * len(p) * len(q) for p, q in pairs)
            if size > MAX_OUTPUTS:
                raise ConfigError(f"level {level + 1} would need {size} outputs; use a smaller depth")
            nxt.append((path + "-", [_reduce(polar_minus(p, q), cfg.merge_policy) for p, q in pairs]))
            nxt.append((path + "+", [_reduce(polar_plus(p, q), cfg.merge_policy) for p, q in pairs]))
        groups = nxt
    return PolarResult(nodes, stats, cfg)
