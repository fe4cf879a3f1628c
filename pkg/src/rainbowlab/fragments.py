"""Two-round exposure with fragment completion, run exactly at desk scale.

The process: color the ground set, keep the rainbow subfamily H*, expose a
uniform m-subset W0, and for each rainbow member A* find its minimum fragment
T* = B* \\ W0 over members B* contained in A* u W0 (ties to the smallest
member index).  Members whose fragment has ell = |T*| >= omega are bad; the
first round succeeds when at most half of H* is bad.  A second exposure W1
(independent p1 = m/N coin per remaining element) then tries to complete the
good fragments; a fragment with ell >= 1 is accepted when it lands inside W1,
survives an equalizing coin with probability (eps1*p1)^(omega-ell), and -- in
staged coloring mode -- its freshly colored elements dodge the r-ell colors
its member already carries, and each other.

Coloring modes.  "upfront" colors everything once, and acceptance is pure
exposure (the member was rainbow from the start).  "staged" recolors W1 on
arrival, which is what the accepted-fragment expectation

    E(nu_R) = sum_ell |R_ell| p1^ell ((q-r+ell)_ell / q^ell) (eps1*p1)^(omega-ell)

accounts for with its color factor; in upfront mode the color factor is
dropped.  Both modes are first-class and every record names its mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InputError
from .hypergraph import DISTINCT_SETS, Hypergraph
from .hampow import PowerParams, enumerate_family, DEFAULT_ORDER_BUDGET
from .rainbow import Coloring, falling, expected_rainbow_count, random_coloring, rainbow_subfamily
from .seeding import make_rng

UPFRONT = "upfront"
STAGED = "staged"

_STREAM_COLOR = 1
_STREAM_W0 = 2
_STREAM_STAGE3 = 3

__all__ = [
    "UPFRONT",
    "STAGED",
    "TwoRoundConfig",
    "FragmentRecord",
    "ClassificationOutcome",
    "ThirdStageOutcome",
    "TwoRoundRecord",
    "default_omega",
    "sample_w0",
    "min_fragment",
    "classify_fragments",
    "run_third_stage",
    "expected_nu_r",
    "run_two_round",
]


def default_omega(r: int) -> int:
    """Fragment-size threshold max(1, ceil(r^(1/3)))."""
    return max(1, math.ceil(r ** (1 / 3) - 1e-9))


@dataclass(frozen=True)
class TwoRoundConfig:
    """Parameters of one two-round trial over a Hamilton-power family.

    The exposure size is m = min(N, ceil(C * N / kappa_hat)) with the nominal
    spread kappa_hat = n^(1/k) unless overridden, and p1 = m/N.  An explicit
    hypergraph may replace the power family, in which case kappa_hat is
    required.
    """

    q: int
    C: float
    epsilon1: float
    seed: int
    params: PowerParams | None = None
    hypergraph: Hypergraph | None = None
    omega: int | None = None
    coloring_mode: str = UPFRONT
    kappa_hat: float | None = None
    order_budget: int = DEFAULT_ORDER_BUDGET

    def __post_init__(self):
        if (self.params is None) == (self.hypergraph is None):
            raise InputError("provide exactly one of params or hypergraph")
        if self.hypergraph is not None and self.kappa_hat is None:
            raise InputError("kappa_hat is required with an explicit hypergraph")
        if self.q < 1:
            raise InputError(f"palette size q must be >= 1, got {self.q}")
        if self.C <= 0:
            raise InputError(f"exposure multiplier C must be positive, got {self.C}")
        if self.epsilon1 <= 0:
            raise InputError(f"epsilon1 must be positive, got {self.epsilon1}")
        if self.coloring_mode not in (UPFRONT, STAGED):
            raise InputError(f"unknown coloring mode {self.coloring_mode!r}")
        if self.omega is not None and self.omega < 1:
            raise InputError(f"omega must be >= 1, got {self.omega}")
        if self.epsilon1 * self.p1 > 1:
            raise InputError(
                f"epsilon1 * p1 = {self.epsilon1 * self.p1:.6g} exceeds 1; "
                "the equalizing coin needs a probability"
            )

    @property
    def n_elements(self) -> int:
        if self.params is not None:
            return self.params.ground_size
        return self.hypergraph.ground.size

    @property
    def r(self) -> int:
        return self.params.r if self.params is not None else self.hypergraph.r

    @property
    def kappa_nominal(self) -> float:
        if self.kappa_hat is not None:
            return self.kappa_hat
        return self.params.n ** (1 / self.params.k)

    @property
    def m(self) -> int:
        big_n = self.n_elements
        return min(big_n, math.ceil(self.C * big_n / self.kappa_nominal))

    @property
    def p1(self) -> float:
        return self.m / self.n_elements

    @property
    def omega_resolved(self) -> int:
        return self.omega if self.omega is not None else default_omega(self.r)

    def family(self) -> Hypergraph:
        if self.hypergraph is not None:
            return self.hypergraph
        return enumerate_family(self.params, budget=self.order_budget).hypergraph(DISTINCT_SETS)

    def echo(self) -> dict:
        return {
            "n": self.params.n if self.params else None,
            "k": self.params.k if self.params else None,
            "q": self.q,
            "C": self.C,
            "m": self.m,
            "p1": self.p1,
            "epsilon1": self.epsilon1,
            "omega": self.omega_resolved,
            "coloring_mode": self.coloring_mode,
            "kappa_hat": self.kappa_nominal,
            "seed": self.seed,
        }


def sample_w0(n_elements: int, m: int, rng) -> tuple[int, ...]:
    """Uniform m-subset of {0..N-1} as a sorted tuple (seeded partial shuffle)."""
    if not 0 <= m <= n_elements:
        raise InputError(f"m={m} out of range 0..{n_elements}")
    return tuple(sorted(rng.sample(range(n_elements), m)))


@dataclass(frozen=True)
class FragmentRecord:
    """Minimum fragment of one rainbow member against the first exposure.

    t_star is B* \\ W0 for the minimizing member B* (source_index); ell is its
    size; good means ell < omega.  T* never meets W0, and ell <= |A* \\ W0|
    since B* = A* is always a candidate.
    """

    edge_index: int
    source_index: int
    t_star: tuple[int, ...]
    ell: int
    good: bool


def min_fragment(
    hstar: Hypergraph, astar_index: int, w0: Sequence[int], omega: int
) -> FragmentRecord:
    """Scan H* for the member inside A* u W0 leaving the fewest elements uncovered."""
    if not 0 <= astar_index < len(hstar.edges):
        raise InputError(f"member index {astar_index} out of range")
    if omega < 1:
        raise InputError(f"omega must be >= 1, got {omega}")
    w0_mask = 0
    for x in w0:
        hstar.ground.check_element(x)
        w0_mask |= 1 << x
    masks = hstar.masks
    allowed = masks[astar_index] | w0_mask

    best_ell = -1
    best_idx = -1
    best_mask = 0
    for idx, b in enumerate(masks):
        if b & ~allowed:
            continue
        ell = (b & ~w0_mask).bit_count()
        if best_idx < 0 or ell < best_ell:
            best_ell, best_idx, best_mask = ell, idx, b & ~w0_mask
    assert best_idx >= 0, "A* itself is always a candidate"

    t_star = tuple(x for x in hstar.edges[best_idx] if not (w0_mask >> x) & 1)
    assert len(t_star) == best_ell
    return FragmentRecord(
        edge_index=astar_index,
        source_index=best_idx,
        t_star=t_star,
        ell=best_ell,
        good=best_ell < omega,
    )


@dataclass(frozen=True)
class ClassificationOutcome:
    """First-round verdict: success iff at most half the rainbow members are bad."""

    records: tuple[FragmentRecord, ...]
    success: bool
    bad_count: int
    histogram: dict[int, int] = field(default_factory=dict)
    degenerate: bool = False

    @property
    def bad_fraction(self) -> float | None:
        return self.bad_count / len(self.records) if self.records else None


def classify_fragments(hstar: Hypergraph, w0: Sequence[int], omega: int) -> ClassificationOutcome:
    """Minimum fragments for every member of H*; empty H* is degenerate, not an error."""
    if not hstar.edges:
        return ClassificationOutcome(records=(), success=False, bad_count=0, degenerate=True)
    records = tuple(min_fragment(hstar, i, w0, omega) for i in range(len(hstar.edges)))
    bad = sum(1 for rec in records if not rec.good)
    hist: dict[int, int] = {}
    for rec in records:
        hist[rec.ell] = hist.get(rec.ell, 0) + 1
    return ClassificationOutcome(
        records=records,
        success=2 * bad <= len(records),
        bad_count=bad,
        histogram=dict(sorted(hist.items())),
    )


@dataclass(frozen=True)
class ThirdStageOutcome:
    w1: tuple[int, ...]
    nu_r: int
    found_rainbow: bool
    tallies: dict[int, int] = field(default_factory=dict)


def run_third_stage(
    config: TwoRoundConfig,
    records: Sequence[FragmentRecord],
    w0: Sequence[int],
    coloring: Coloring,
    rng,
    hstar: Hypergraph | None = None,
) -> ThirdStageOutcome:
    """Second exposure plus fragment acceptance.

    Draw order is fixed for reproducibility: W1 coins over the sorted
    complement of W0, then (staged mode) fresh colors over sorted W1, then
    acceptance coins in record order with short-circuit evaluation.
    found_rainbow checks containment of some member of H* in W0 u W1
    directly, independent of the acceptance draws.
    """
    if hstar is None:
        hstar = rainbow_subfamily(config.family(), coloring)
    p1 = config.p1
    omega = config.omega_resolved
    eps_p = config.epsilon1 * p1
    q, r = config.q, config.r

    w0_mask = 0
    for x in w0:
        w0_mask |= 1 << x

    w1 = [x for x in range(config.n_elements) if not (w0_mask >> x) & 1 and rng.random() < p1]
    w1_mask = 0
    for x in w1:
        w1_mask |= 1 << x

    fresh: dict[int, int] = {}
    if config.coloring_mode == STAGED:
        for x in w1:
            fresh[x] = rng.randrange(q)

    pool = [rec for rec in records if rec.good and rec.ell >= 1]
    tallies: dict[int, int] = {}
    for rec in pool:
        tallies[rec.ell] = tallies.get(rec.ell, 0) + 1

    accepted = 0
    cols = coloring.colors
    for rec in pool:
        t_mask = 0
        for x in rec.t_star:
            t_mask |= 1 << x
        if t_mask & ~w1_mask:
            continue
        if config.coloring_mode == STAGED:
            source = hstar.edges[rec.source_index]
            kept = {cols[x] for x in source if (w0_mask >> x) & 1}
            new = [fresh[x] for x in rec.t_star]
            if len(set(new)) != len(new) or kept.intersection(new):
                continue
        if rng.random() < eps_p ** (omega - rec.ell):
            accepted += 1

    exposed = w0_mask | w1_mask
    found = any(b & ~exposed == 0 for b in hstar.masks)
    return ThirdStageOutcome(
        w1=tuple(w1),
        nu_r=accepted,
        found_rainbow=found,
        tallies=dict(sorted(tallies.items())),
    )


def expected_nu_r(
    tallies: Mapping[int, int],
    q: int,
    r: int,
    p1: float,
    epsilon1: float,
    omega: int,
    mode: str = STAGED,
) -> float:
    """Exact expectation of the accepted-fragment count for given tallies.

    Staged mode carries the fresh-color factor (q-r+ell)_ell / q^ell; upfront
    mode drops it.  Tally keys must lie in 1..omega.
    """
    if mode not in (UPFRONT, STAGED):
        raise InputError(f"unknown coloring mode {mode!r}")
    if omega < 1:
        raise InputError(f"omega must be >= 1, got {omega}")
    total = 0.0
    for ell, count in tallies.items():
        if not 1 <= ell <= omega:
            raise InputError(f"tally index ell={ell} out of range 1..{omega}")
        if count < 0:
            raise InputError(f"negative tally at ell={ell}")
        term = count * p1**ell * (epsilon1 * p1) ** (omega - ell)
        if mode == STAGED:
            term *= falling(q - r + ell, ell) / q**ell if q - r + ell >= 0 else 0.0
        total += term
    return total


@dataclass(frozen=True)
class TwoRoundRecord:
    """Full deterministic record of one seeded two-round trial."""

    config: dict
    family_size: int
    rainbow_size: int
    expected_rainbow: float
    success: bool
    bad_count: int
    bad_fraction: float | None
    histogram: dict[int, int]
    nu_r: int
    found_rainbow: bool
    mode: str
    degenerate: bool
    early_exit: bool

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "family_size": self.family_size,
            "rainbow_size": self.rainbow_size,
            "expected_rainbow": self.expected_rainbow,
            "success": self.success,
            "bad_count": self.bad_count,
            "bad_fraction": self.bad_fraction,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "nu_R": self.nu_r,
            "found_rainbow": self.found_rainbow,
            "mode": self.mode,
            "degenerate": self.degenerate,
            "early_exit": self.early_exit,
        }


def run_two_round(config: TwoRoundConfig) -> TwoRoundRecord:
    """Color, expose, classify, and (unless a fragment is already complete)
    run the second exposure.  Each stage draws from its own derived stream, so
    the record is byte-identical across replays of the same seed.

    A coloring with no rainbow member is recorded as degenerate.  A good
    fragment with ell = 0 means some member already sits inside W0; the trial
    then exits early with found_rainbow set.
    """
    hg = config.family()
    coloring = random_coloring(config.n_elements, config.q, make_rng(config.seed, _STREAM_COLOR))
    hstar = rainbow_subfamily(hg, coloring)
    e_z = float(expected_rainbow_count(len(hg.edges), config.q, config.r))
    base = dict(
        config=config.echo(),
        family_size=len(hg.edges),
        rainbow_size=len(hstar.edges),
        expected_rainbow=e_z,
        mode=config.coloring_mode,
    )

    if not hstar.edges:
        return TwoRoundRecord(
            **base,
            success=False,
            bad_count=0,
            bad_fraction=None,
            histogram={},
            nu_r=0,
            found_rainbow=False,
            degenerate=True,
            early_exit=False,
        )

    w0 = sample_w0(config.n_elements, config.m, make_rng(config.seed, _STREAM_W0))
    outcome = classify_fragments(hstar, w0, config.omega_resolved)
    common = dict(
        success=outcome.success,
        bad_count=outcome.bad_count,
        bad_fraction=outcome.bad_fraction,
        histogram=outcome.histogram,
        degenerate=False,
    )

    if any(rec.good and rec.ell == 0 for rec in outcome.records):
        return TwoRoundRecord(**base, **common, nu_r=0, found_rainbow=True, early_exit=True)

    stage3 = run_third_stage(
        config,
        outcome.records,
        w0,
        coloring,
        make_rng(config.seed, _STREAM_STAGE3),
        hstar=hstar,
    )
    return TwoRoundRecord(
        **base,
        **common,
        nu_r=stage3.nu_r,
        found_rainbow=stage3.found_rainbow,
        early_exit=False,
    )
