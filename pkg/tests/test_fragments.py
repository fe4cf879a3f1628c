"""Two-round exposure process: fragments, classification, acceptance."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rainbowlab.errors import InputError
from rainbowlab.fragments import (
    STAGED,
    UPFRONT,
    TwoRoundConfig,
    classify_fragments,
    default_omega,
    expected_nu_r,
    min_fragment,
    run_third_stage,
    run_two_round,
    sample_w0,
)
from rainbowlab.hampow import PowerParams
from rainbowlab.hypergraph import DISTINCT_SETS, GroundSet, Hypergraph
from rainbowlab.rainbow import Coloring, random_coloring, rainbow_subfamily
from rainbowlab.seeding import make_rng


def toy_hstar():
    """Four 3-element members on 6 ground elements, overlaps by design."""
    g = GroundSet(6)
    edges = ((0, 1, 2), (1, 2, 3), (3, 4, 5), (0, 2, 4))
    return Hypergraph(g, edges, r=3, semantics=DISTINCT_SETS)


def staged_config(seed=7, omega=3, c=4.0):
    return TwoRoundConfig(
        q=9,
        C=c,
        epsilon1=0.5,
        seed=seed,
        params=PowerParams(7, 1),
        omega=omega,
        coloring_mode=STAGED,
    )


# ----------------------------------------------------------------------------
# configuration

def test_default_omega():
    assert default_omega(1) == 1
    assert default_omega(2) == 2  # ceil(2^(1/3))
    assert default_omega(8) == 2
    assert default_omega(27) == 3
    assert default_omega(28) == 4


def test_config_m_and_p1():
    cfg = staged_config()
    # N = 21 slots, kappa_hat = 7: m = min(21, ceil(4 * 21 / 7)) = 12
    assert cfg.n_elements == 21
    assert cfg.m == 12
    assert cfg.p1 == pytest.approx(12 / 21)
    assert cfg.r == 7
    assert cfg.omega_resolved == 3


def test_config_m_clamps_at_full_ground_set():
    cfg = staged_config(c=100.0)
    assert cfg.m == 21


def test_config_requires_exactly_one_family_source():
    with pytest.raises(InputError):
        TwoRoundConfig(q=9, C=1.0, epsilon1=0.5, seed=1)
    with pytest.raises(InputError):
        TwoRoundConfig(
            q=9, C=1.0, epsilon1=0.5, seed=1,
            params=PowerParams(7, 1), hypergraph=toy_hstar(), kappa_hat=2.0,
        )


def test_config_explicit_hypergraph_needs_kappa_hat():
    with pytest.raises(InputError):
        TwoRoundConfig(q=9, C=1.0, epsilon1=0.5, seed=1, hypergraph=toy_hstar())
    cfg = TwoRoundConfig(
        q=9, C=1.0, epsilon1=0.5, seed=1, hypergraph=toy_hstar(), kappa_hat=2.0
    )
    assert cfg.n_elements == 6
    assert cfg.m == 3  # ceil(1 * 6 / 2)


def test_config_rejects_bad_mode_and_slack():
    with pytest.raises(InputError):
        staged_config().__class__(
            q=9, C=4.0, epsilon1=0.5, seed=1, params=PowerParams(7, 1),
            coloring_mode="later",
        )
    with pytest.raises(InputError):
        # epsilon1 * p1 > 1 is not a probability
        TwoRoundConfig(q=9, C=4.0, epsilon1=5.0, seed=1, params=PowerParams(7, 1))


def test_sample_w0_sorted_and_deterministic():
    a = sample_w0(21, 12, make_rng(3, 2))
    b = sample_w0(21, 12, make_rng(3, 2))
    assert a == b
    assert list(a) == sorted(set(a))
    assert len(a) == 12
    with pytest.raises(InputError):
        sample_w0(5, 6, make_rng(0))


# ----------------------------------------------------------------------------
# minimum fragments

def test_min_fragment_picks_smallest_leftover():
    hstar = toy_hstar()
    # W0 = {1, 2, 3}: member 0 leaves {0}, member 1 leaves {}, member 2 leaves
    # {4, 5}, member 3 leaves {0, 4}.  For A* = member 0 the candidates are
    # those inside A* u W0 = {0,1,2,3}: members 0 and 1; member 1 wins with 0
    rec = min_fragment(hstar, 0, (1, 2, 3), omega=2)
    assert rec.source_index == 1
    assert rec.ell == 0
    assert rec.t_star == ()
    assert rec.good


def test_min_fragment_self_when_nothing_better():
    hstar = toy_hstar()
    # A* = member 2 = {3,4,5}, W0 = {3}: only member 2 fits inside A* u W0
    rec = min_fragment(hstar, 2, (3,), omega=3)
    assert rec.source_index == 2
    assert rec.ell == 2
    assert rec.t_star == (4, 5)


def test_min_fragment_tie_goes_to_smallest_index():
    hstar = toy_hstar()
    # A* = member 1, W0 = {0,3}: members 0 and 1 both fit inside {0,1,2,3}
    # with leftover {1,2}; the scan keeps the first
    rec = min_fragment(hstar, 1, (0, 3), omega=3)
    assert rec.ell == 2
    assert rec.source_index == 0
    assert rec.t_star == (1, 2)


def test_min_fragment_fragment_avoids_w0():
    hstar = toy_hstar()
    for idx in range(4):
        rec = min_fragment(hstar, idx, (0, 3), omega=3)
        assert not set(rec.t_star) & {0, 3}
        assert rec.ell == len(rec.t_star)
        assert rec.ell <= len(set(hstar.edges[idx]) - {0, 3})


def test_min_fragment_validates_inputs():
    hstar = toy_hstar()
    with pytest.raises(InputError):
        min_fragment(hstar, 99, (0,), omega=1)
    with pytest.raises(InputError):
        min_fragment(hstar, 0, (0,), omega=0)
    with pytest.raises(InputError):
        min_fragment(hstar, 0, (17,), omega=1)


# ----------------------------------------------------------------------------
# classification

def test_classify_counts_and_histogram():
    hstar = toy_hstar()
    out = classify_fragments(hstar, (2, 3), omega=2)
    # best leftovers per A*: member 0 via member 1 ({1}), member 1 via itself
    # ({1}), members 2 and 3 via themselves ({4,5} and {0,4})
    assert out.histogram == {1: 2, 2: 2}
    assert out.bad_count == 2
    assert out.success  # 2 * 2 <= 4
    assert not out.degenerate
    assert out.bad_fraction == pytest.approx(0.5)


def test_classify_w0_covering_a_member_resolves_everything():
    hstar = toy_hstar()
    # W0 = {1,2,3} contains member 1 entirely, and member 1 sits inside every
    # A* u W0, so every minimum fragment is empty
    out = classify_fragments(hstar, (1, 2, 3), omega=1)
    assert out.histogram == {0: 4}
    assert out.bad_count == 0


def test_classify_failure_when_bad_majority():
    hstar = toy_hstar()
    out = classify_fragments(hstar, (), omega=1)
    # nothing exposed: every member leaves all 3 elements
    assert out.bad_count == 4
    assert not out.success
    assert out.histogram == {3: 4}


def test_classify_empty_family_is_degenerate():
    g = GroundSet(6)
    empty = Hypergraph(g, (), r=3, semantics=DISTINCT_SETS)
    out = classify_fragments(empty, (0, 1), omega=1)
    assert out.degenerate
    assert not out.success
    assert out.bad_fraction is None


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_bad_counts_non_increasing_in_omega(seed):
    cfg = staged_config(seed=seed)
    hstar = rainbow_subfamily(
        cfg.family(), random_coloring(cfg.n_elements, cfg.q, make_rng(seed, 1))
    )
    w0 = sample_w0(cfg.n_elements, cfg.m, make_rng(seed, 2))
    bads = [classify_fragments(hstar, w0, omega).bad_count for omega in (1, 2, 3, 4)]
    assert bads == sorted(bads, reverse=True)


# ----------------------------------------------------------------------------
# acceptance expectation

def test_expected_nu_r_hand_value():
    # single tally at ell=1, omega=2: p1 * (q-r+1)/q * (eps1 p1)
    got = expected_nu_r({1: 2}, q=10, r=7, p1=0.5, epsilon1=0.4, omega=2)
    want = 2 * 0.5 * (10 - 7 + 1) / 10 * (0.4 * 0.5)
    assert got == pytest.approx(want)


def test_expected_nu_r_upfront_drops_color_factor():
    got = expected_nu_r({2: 3}, q=10, r=7, p1=0.5, epsilon1=0.4, omega=2, mode=UPFRONT)
    assert got == pytest.approx(3 * 0.5**2)


def test_expected_nu_r_validates_tally_range():
    with pytest.raises(InputError):
        expected_nu_r({0: 1}, q=10, r=7, p1=0.5, epsilon1=0.4, omega=2)
    with pytest.raises(InputError):
        expected_nu_r({3: 1}, q=10, r=7, p1=0.5, epsilon1=0.4, omega=2)
    with pytest.raises(InputError):
        expected_nu_r({1: 1}, q=10, r=7, p1=0.5, epsilon1=0.4, omega=2, mode="other")


def test_third_stage_monte_carlo_matches_expectation():
    cfg = staged_config(seed=5)
    coloring = random_coloring(cfg.n_elements, cfg.q, make_rng(cfg.seed, 1))
    hstar = rainbow_subfamily(cfg.family(), coloring)
    w0 = sample_w0(cfg.n_elements, cfg.m, make_rng(cfg.seed, 2))
    out = classify_fragments(hstar, w0, cfg.omega_resolved)
    assert not out.degenerate

    trials = 3000
    total = 0
    tallies = None
    for i in range(trials):
        stage = run_third_stage(cfg, out.records, w0, coloring, make_rng(cfg.seed, 3, i), hstar=hstar)
        total += stage.nu_r
        tallies = stage.tallies
    assert tallies, "pool must be nonempty for this seed"
    want = expected_nu_r(tallies, cfg.q, cfg.r, cfg.p1, cfg.epsilon1, cfg.omega_resolved)
    mean = total / trials
    se = math.sqrt(max(want, 1e-9) / trials)  # Poisson-scale dispersion guard
    assert abs(mean - want) <= 4 * max(se, 1e-4)


def test_third_stage_w1_disjoint_from_w0():
    cfg = staged_config(seed=11)
    coloring = random_coloring(cfg.n_elements, cfg.q, make_rng(cfg.seed, 1))
    hstar = rainbow_subfamily(cfg.family(), coloring)
    w0 = sample_w0(cfg.n_elements, cfg.m, make_rng(cfg.seed, 2))
    out = classify_fragments(hstar, w0, cfg.omega_resolved)
    stage = run_third_stage(cfg, out.records, w0, coloring, make_rng(cfg.seed, 3), hstar=hstar)
    assert not set(stage.w1) & set(w0)
    assert all(1 <= ell <= cfg.omega_resolved - 0 for ell in stage.tallies)


# ----------------------------------------------------------------------------
# the full pipeline

def test_run_two_round_is_reproducible():
    a = run_two_round(staged_config(seed=3))
    b = run_two_round(staged_config(seed=3))
    assert a == b
    c = run_two_round(staged_config(seed=4))
    assert a != c


def test_run_two_round_json_shape():
    rec = run_two_round(staged_config(seed=3))
    data = rec.to_json()
    for key in ("config", "family_size", "rainbow_size", "success", "bad_count",
                "histogram", "nu_R", "found_rainbow", "mode", "degenerate"):
        assert key in data
    assert all(isinstance(k, str) for k in data["histogram"])
    assert data["mode"] == STAGED
    assert data["config"]["m"] == 12


def test_run_two_round_full_exposure_exits_early():
    rec = run_two_round(staged_config(seed=3, c=100.0))
    # W0 is everything, so any rainbow member sits inside it with ell = 0
    assert rec.early_exit
    assert rec.found_rainbow
    assert rec.nu_r == 0


def test_run_two_round_degenerate_when_no_rainbow_possible():
    cfg = TwoRoundConfig(
        q=2, C=4.0, epsilon1=0.5, seed=3, params=PowerParams(6, 1), omega=2,
        coloring_mode=STAGED,
    )
    # q = 2 < r = 6: no member can be rainbow
    rec = run_two_round(cfg)
    assert rec.degenerate
    assert not rec.success
    assert rec.rainbow_size == 0


def test_run_two_round_upfront_mode_runs():
    cfg = TwoRoundConfig(
        q=9, C=4.0, epsilon1=0.5, seed=6, params=PowerParams(7, 1), omega=3,
        coloring_mode=UPFRONT,
    )
    rec = run_two_round(cfg)
    assert rec.mode == UPFRONT
    assert rec.nu_r >= 0
