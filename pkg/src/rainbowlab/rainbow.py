"""Uniform random colorings and exact/empirical rainbow moment accounting.

Elements of the ground set receive independent uniform colors from
{0, ..., q-1}; a member is rainbow when its r elements carry r distinct
colors.  For the rainbow count Z the first and second moments have closed
forms driven by the family's intersection profile:

    E(Z)   = |H| (q)_r / q^r
    E(Z^2) = sum over ordered member pairs (A, B), t = |A cap B|, of
             (q)_t ((q-t)_{r-t})^2 / q^{2r-t}

with (a)_b the falling factorial.  Moments are kept as exact rationals while
the denominators stay below a configurable bit bound, then fall back to
log-space floats (flagged on the result).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BudgetError, InputError
from .hypergraph import Hypergraph, IntersectionProfile, alpha_cut
from .seeding import make_rng

__all__ = [
    "Coloring",
    "RainbowStats",
    "MomentReport",
    "falling",
    "default_color_count",
    "random_coloring",
    "rainbow_subfamily",
    "expected_rainbow_count",
    "exact_second_moment",
    "fsum_ratio_bound",
    "expected_rainbow_profile",
    "empirical_moments",
]


def falling(a: int, b: int) -> int:
    """Falling factorial (a)_b = a (a-1) ... (a-b+1); zero when b > a >= 0."""
    if b < 0:
        raise InputError(f"falling factorial needs b >= 0, got {b}")
    if b == 0:
        return 1
    if a < b:
        return 0
    out = 1
    for i in range(b):
        out *= a - i
    return out


def default_color_count(r: int, epsilon1: float) -> int:
    """Palette size ceil((1 + epsilon1) * r) used when q is not given."""
    if epsilon1 <= 0:
        raise InputError(f"epsilon1 must be positive, got {epsilon1}")
    return math.ceil((1 + epsilon1) * r)


@dataclass(frozen=True)
class Coloring:
    """Colors indexed by element id, values in 0..q-1."""

    colors: tuple[int, ...]
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InputError(f"palette size q must be >= 1, got {self.q}")
        for x, c in enumerate(self.colors):
            if not 0 <= c < self.q:
                raise InputError(f"color {c} of element {x} out of range 0..{self.q - 1}")

    def __len__(self) -> int:
        return len(self.colors)


def random_coloring(size: int, q: int, rng) -> Coloring:
    return Coloring(tuple(rng.randrange(q) for _ in range(size)), q)


def rainbow_subfamily(hg: Hypergraph, coloring: Coloring) -> Hypergraph:
    """Members whose elements carry pairwise distinct colors.

    Semantics and ground set carry over; under labeled-orders semantics the
    result keeps duplicate members (it stays a multiset).
    """
    if len(coloring) != hg.ground.size:
        raise InputError(
            f"coloring covers {len(coloring)} elements, ground set has {hg.ground.size}"
        )
    cols = coloring.colors
    kept = tuple(e for e in hg.edges if len({cols[x] for x in e}) == hg.r)
    return hg.replace_edges(kept)


def expected_rainbow_count(family_size: int, q: int, r: int) -> Fraction:
    """E(Z) = M (q)_r / q^r, exactly."""
    if family_size < 0:
        raise InputError(f"family size must be >= 0, got {family_size}")
    if q < 1 or r < 1:
        raise InputError(f"need q >= 1 and r >= 1, got q={q} r={r}")
    return Fraction(family_size * falling(q, r), q**r)


@dataclass(frozen=True)
class RainbowStats:
    """Exact rainbow-count moments for one family and palette."""

    q: int
    r: int
    family_size: int
    e_z: Fraction
    e_z2: Fraction
    ratio: float | None  # E(Z^2) / E(Z)^2, None when E(Z) = 0
    exact: bool = True   # False when the rational path overflowed the bit bound
    z_observed: int | None = None

    def to_json(self) -> dict:
        return {
            "M": self.family_size,
            "q": self.q,
            "r": self.r,
            "E_Z": float(self.e_z),
            "E_Z2": float(self.e_z2),
            "E_Z_exact": f"{self.e_z.numerator}/{self.e_z.denominator}",
            "E_Z2_exact": f"{self.e_z2.numerator}/{self.e_z2.denominator}",
            "ratio": self.ratio,
            "exact": self.exact,
        }


def _pair_intersection_tally(hg: Hypergraph, pair_budget: int) -> list[int]:
    """n_t = number of ordered member pairs meeting in exactly t elements."""
    big_m = len(hg.edges)
    if big_m * big_m > pair_budget:
        raise BudgetError(
            f"second moment needs {big_m * big_m} pair intersections, budget {pair_budget}"
        )
    n_t = [0] * (hg.r + 1)
    masks = hg.masks
    for i in range(big_m):
        mi = masks[i]
        n_t[hg.r] += 1  # the diagonal pair (i, i)
        for j in range(i + 1, big_m):
            n_t[(mi & masks[j]).bit_count()] += 2
    return n_t


def exact_second_moment(
    hg: Hypergraph,
    q: int,
    pair_budget: int = 4_000_000,
    max_denominator_bits: int = 1 << 16,
) -> RainbowStats:
    """Exact E(Z) and E(Z^2) from the pairwise intersection tally."""
    if q < 1:
        raise InputError(f"palette size q must be >= 1, got {q}")
    if not hg.edges:
        raise InputError("moments are undefined for an empty family")
    r = hg.r
    n_t = _pair_intersection_tally(hg, pair_budget)
    e_z = expected_rainbow_count(len(hg.edges), q, r)

    exact = (2 * r) * q.bit_length() <= max_denominator_bits
    if exact:
        e_z2 = Fraction(0)
        for t, cnt in enumerate(n_t):
            if cnt:
                e_z2 += cnt * Fraction(falling(q, t) * falling(q - t, r - t) ** 2, q ** (2 * r - t))
    else:
        # log-space accumulation; the Fraction is a float-backed approximation
        acc = 0.0
        lq = math.log(q)
        for t, cnt in enumerate(n_t):
            num = falling(q, t) * falling(q - t, r - t) ** 2
            if cnt and num:
                acc += math.exp(math.log(cnt) + math.log(num) - (2 * r - t) * lq)
        e_z2 = Fraction(acc).limit_denominator(10**12)

    ratio = float(e_z2 / (e_z * e_z)) if e_z > 0 else None
    return RainbowStats(
        q=q, r=r, family_size=len(hg.edges), e_z=e_z, e_z2=e_z2, ratio=ratio, exact=exact
    )


def fsum_ratio_bound(
    family_size: int,
    q: int,
    r: int,
    kappa: float,
    k0: float,
    alpha: float,
) -> float:
    """Closed-form upper bound on E(Z^2)/E(Z)^2 for a kappa-spread family
    whose intersection profile satisfies the K0 condition up to alpha*r:

        1/E(Z) + 1 + sum_{t=1}^{floor(alpha r)} (K0/kappa)^t q^t/(q)_t
                   + sum_{t=floor(alpha r)+1}^{r-1} (2^r/kappa^t) q^t/(q)_t

    Requires q >= r (below that E(Z) = 0 and the ratio is undefined).
    """
    if family_size < 1:
        raise InputError(f"family size must be >= 1, got {family_size}")
    if q < r:
        raise InputError(f"ratio bound undefined for q < r (q={q}, r={r})")
    if kappa <= 0 or k0 <= 0:
        raise InputError(f"kappa and K0 must be positive, got {kappa}, {k0}")
    if not 0 < alpha < 1:
        raise InputError(f"alpha must be in (0, 1), got {alpha}")

    log_fall = [0.0] * (r + 1)  # log (q)_t
    for t in range(1, r + 1):
        log_fall[t] = log_fall[t - 1] + math.log(q - t + 1)
    lq = math.log(q)

    log_ez = math.log(family_size) + log_fall[r] - r * lq
    total = math.exp(-log_ez) + 1.0
    t_cut = alpha_cut(alpha, r)
    for t in range(1, min(t_cut, r - 1) + 1):
        total += math.exp(t * (math.log(k0) - math.log(kappa)) + t * lq - log_fall[t])
    for t in range(t_cut + 1, r):
        total += math.exp(r * math.log(2.0) - t * math.log(kappa) + t * lq - log_fall[t])
    return total


def expected_rainbow_profile(profile: IntersectionProfile, q: int) -> tuple[float, ...]:
    """Expected rainbow intersection profile given the base member is rainbow.

    Entry t is ((q-t)_{r-t} / q^{r-t}) * f_t: a member meeting the rainbow
    base in t elements inherits t distinct colors for free and needs its other
    r-t elements to dodge them and each other.  Zero whenever q < r.
    """
    if q < 1:
        raise InputError(f"palette size q must be >= 1, got {q}")
    r = profile.r
    out = []
    for t, f_t in enumerate(profile.counts):
        out.append(falling(q - t, r - t) / q ** (r - t) * f_t if q - t >= 0 else 0.0)
    return tuple(out)


@dataclass(frozen=True)
class MomentReport:
    """Seeded Monte Carlo moments next to their exact counterparts."""

    family_size: int
    q: int
    r: int
    trials: int
    seed: int
    mc_mean: float
    mc_var: float
    mc_se: float
    mc_mean_z2: float
    mc_se_z2: float
    e_z: float | None
    e_z2: float | None

    def to_json(self) -> dict:
        return {
            "M": self.family_size,
            "q": self.q,
            "r": self.r,
            "E_Z": self.e_z,
            "E_Z2": self.e_z2,
            "ratio": (
                self.e_z2 / self.e_z**2 if self.e_z and self.e_z2 is not None else None
            ),
            "mc_mean": self.mc_mean,
            "mc_var": self.mc_var,
            "mc_se": self.mc_se,
            "mc_mean_z2": self.mc_mean_z2,
            "mc_se_z2": self.mc_se_z2,
            "trials": self.trials,
            "seed": self.seed,
        }


_STREAM_COLORS = 0x636F_6C6F_7273  # stream tag for coloring draws


def empirical_moments(
    hg: Hypergraph,
    q: int,
    trials: int,
    seed: int,
    pair_budget: int = 4_000_000,
) -> MomentReport:
    """Sample mean/variance of Z over seeded colorings, with exact comparison.

    Trial i draws its colors from a generator keyed by (seed, stream, i), so
    the estimate is reproducible and order-independent.  Exact moments are
    attached when the pairwise tally fits the budget.
    """
    if trials < 1:
        raise InputError(f"need at least one trial, got {trials}")
    if q < 1:
        raise InputError(f"palette size q must be >= 1, got {q}")
    size = hg.ground.size
    edges = hg.edges
    r = hg.r

    s1 = s2 = s4 = 0
    for i in range(trials):
        rng = make_rng(seed, _STREAM_COLORS, i)
        cols = [rng.randrange(q) for _ in range(size)]
        z = 0
        for e in edges:
            seen = set()
            for x in e:
                seen.add(cols[x])
            if len(seen) == r:
                z += 1
        s1 += z
        s2 += z * z
        s4 += (z * z) ** 2

    mean = s1 / trials
    mean_z2 = s2 / trials
    if trials > 1:
        var = (s2 - trials * mean**2) / (trials - 1)
        var_z2 = (s4 - trials * mean_z2**2) / (trials - 1)
    else:
        var = var_z2 = 0.0
    var = max(var, 0.0)
    var_z2 = max(var_z2, 0.0)

    try:
        stats = exact_second_moment(hg, q, pair_budget=pair_budget)
        e_z, e_z2 = float(stats.e_z), float(stats.e_z2)
    except BudgetError:
        e_z = e_z2 = None

    return MomentReport(
        family_size=len(edges),
        q=q,
        r=r,
        trials=trials,
        seed=seed,
        mc_mean=mean,
        mc_var=var,
        mc_se=math.sqrt(var / trials),
        mc_mean_z2=mean_z2,
        mc_se_z2=math.sqrt(var_z2 / trials),
        e_z=e_z,
        e_z2=e_z2,
    )
