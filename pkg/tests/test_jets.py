import json
import math

import numpy as np
import pytest

from splitshower.errors import (
    EmptyInput,
    InsufficientConstituents,
    NonFiniteMomentum,
    PairModeArity,
)
from splitshower.jets import (
    Algorithm,
    ClusterSpec,
    FractionMode,
    PseudoJet,
    SelectionCuts,
    cluster,
    cluster_bruteforce,
    decluster,
    filter_constituents,
    momentum_fractions,
    prong_fractions_pipeline,
    read_events,
    select,
)

ANTIKT08 = ClusterSpec(Algorithm.ANTI_KT, 0.8)
CA04 = ClusterSpec(Algorithm.CAM_AACHEN, 0.4)


def massless(pt, y, phi):
    """Massless four-momentum from (pt, rapidity, phi); for m=0, y = eta."""
    return PseudoJet(pt * math.cos(phi), pt * math.sin(phi), pt * math.sinh(y), pt * math.cosh(y))


def random_event(rng, n):
    return [
        massless(float(rng.uniform(1, 200)), float(rng.uniform(-2, 2)), float(rng.uniform(-math.pi, math.pi)))
        for _ in range(n)
    ]


def same_jets(a, b):
    assert len(a) == len(b)
    for ja, jb in zip(a, b):
        for attr in ("px", "py", "pz", "e"):
            assert getattr(ja, attr) == pytest.approx(getattr(jb, attr), abs=1e-9)


def test_single_constituent_is_its_own_jet():
    c = massless(50.0, 0.3, 1.0)
    jets = cluster([c], ANTIKT08)
    assert len(jets) == 1
    assert jets[0].pt == pytest.approx(50.0)
    assert jets[0].parents is None


def test_two_close_constituents_merge_e_scheme():
    a = massless(60.0, 0.0, 0.0)
    b = massless(40.0, 0.1, 0.1)
    jets = cluster([a, b], ANTIKT08)
    assert len(jets) == 1
    j = jets[0]
    assert j.px == pytest.approx(a.px + b.px, abs=1e-12)
    assert j.py == pytest.approx(a.py + b.py, abs=1e-12)
    assert j.pz == pytest.approx(a.pz + b.pz, abs=1e-12)
    assert j.e == pytest.approx(a.e + b.e, abs=1e-12)
    assert j.parents is not None


def test_two_far_constituents_stay_separate():
    jets = cluster([massless(60.0, 0.0, 0.0), massless(40.0, 0.0, 2.0)], ANTIKT08)
    assert len(jets) == 2


def test_antikt_and_ca_agree_on_single_pair():
    pair = [massless(60.0, 0.0, 0.0), massless(40.0, 0.2, 0.1)]
    same_jets(cluster(pair, ANTIKT08), cluster(pair, ClusterSpec(Algorithm.CAM_AACHEN, 0.8)))


def test_empty_and_nonfinite_inputs():
    with pytest.raises(EmptyInput):
        cluster([], ANTIKT08)
    with pytest.raises(NonFiniteMomentum):
        cluster([PseudoJet(math.nan, 0, 0, 1)], ANTIKT08)


def test_cluster_matches_bruteforce_oracle():
    """Acceptance-style oracle check: 50 random fixtures, both algorithms."""
    rng = np.random.default_rng(2024)
    for trial in range(50):
        event = random_event(rng, int(rng.integers(2, 7)))
        for spec in (ANTIKT08, CA04, ClusterSpec(Algorithm.ANTI_KT, 0.4)):
            same_jets(cluster(event, spec), cluster_bruteforce(event, spec))


def test_cluster_permutation_invariant():
    rng = np.random.default_rng(7)
    event = random_event(rng, 6)
    base = cluster(event, ANTIKT08)
    for _ in range(5):
        rng.shuffle(event)
        same_jets(base, cluster(event, ANTIKT08))


def test_total_momentum_conserved_across_jets():
    rng = np.random.default_rng(11)
    event = random_event(rng, 12)
    jets = cluster(event, ANTIKT08)
    for attr in ("px", "py", "pz", "e"):
        total_in = sum(getattr(c, attr) for c in event)
        total_out = sum(getattr(j, attr) for j in jets)
        assert total_out == pytest.approx(total_in, abs=1e-9)


def test_decluster_two_prongs_undoes_last_merge():
    rng = np.random.default_rng(3)
    event = random_event(rng, 5)
    # tight radius so everything merges into one jet
    jet = cluster(event, ClusterSpec(Algorithm.CAM_AACHEN, 2.0))[0]
    prongs = decluster(jet, 2)
    assert len(prongs) == 2
    same_jets(sorted(prongs, key=lambda p: -p.pt), sorted(jet.parents, key=lambda p: -p.pt))


def test_decluster_conserves_momentum():
    rng = np.random.default_rng(4)
    event = random_event(rng, 8)
    jet = cluster(event, ClusterSpec(Algorithm.CAM_AACHEN, 2.0))[0]
    for n in (2, 3, 4):
        prongs = decluster(jet, n)
        assert len(prongs) == n
        for attr in ("px", "py", "pz", "e"):
            assert sum(getattr(p, attr) for p in prongs) == pytest.approx(
                getattr(jet, attr), abs=1e-9
            )


def test_decluster_three_prong_manual_trace():
    """Hand-unrolled declustering of a fixed five-constituent C/A tree.

    Constituents: two hard cores (pt 100 and 80) well separated, each with a
    nearby soft partner, plus one extra soft particle near the first core.
    C/A (R=2.0) merges closest pairs first; declustering then splits the
    highest-pT prong: jet -> {core1 side, core2 side} -> core1 side opens.
    """
    c1 = massless(100.0, 0.0, 0.0)
    c1a = massless(10.0, 0.05, 0.05)
    c1b = massless(5.0, -0.10, 0.02)
    c2 = massless(80.0, 1.0, 1.2)
    c2a = massless(8.0, 1.06, 1.14)
    event = [c1, c1a, c1b, c2, c2a]
    jet = cluster(event, ClusterSpec(Algorithm.CAM_AACHEN, 2.0))[0]
    assert len(jet.constituents()) == 5

    prongs2 = decluster(jet, 2)
    side1 = {id(c) for c in prongs2[0].constituents()}
    assert side1 == {id(c1), id(c1a), id(c1b)}  # hardest prong is the c1 side
    assert {id(c) for c in prongs2[1].constituents()} == {id(c2), id(c2a)}

    prongs3 = decluster(jet, 3)
    # the c1 side (pt ~ 114) splits next, leaving {c1+c1a}, {c2 side}, {c1b}
    sets3 = [frozenset(id(c) for c in p.constituents()) for p in prongs3]
    assert frozenset({id(c1), id(c1a)}) in sets3
    assert frozenset({id(c2), id(c2a)}) in sets3
    assert frozenset({id(c1b)}) in sets3
    assert prongs3[0].pt >= prongs3[1].pt >= prongs3[2].pt


def test_decluster_insufficient_constituents():
    jet = cluster([massless(50.0, 0.0, 0.0)], ANTIKT08)[0]
    with pytest.raises(InsufficientConstituents):
        decluster(jet, 2)


def test_momentum_fractions_pair_modes():
    a = massless(3.0, 0.0, 0.0)
    b = massless(1.0, 0.0, 0.5)
    assert momentum_fractions([a, b], a, FractionMode.PAIR_MIN) == [pytest.approx(0.25)]
    assert momentum_fractions([a, b], a, FractionMode.PAIR_MAX) == [pytest.approx(0.75)]
    equal = [massless(5.0, 0.0, 0.0), massless(5.0, 0.0, 0.4)]
    assert momentum_fractions(equal, equal[0], FractionMode.PAIR_MAX) == [pytest.approx(0.5)]


def test_momentum_fractions_pair_arity():
    prongs = [massless(1.0, 0.0, 0.0)] * 3
    with pytest.raises(PairModeArity):
        momentum_fractions(prongs, prongs[0], FractionMode.PAIR_MIN)


def test_perjet_fractions_collinear_partition_sums_to_one():
    # parallel prongs: scalar pt sum equals the jet pt exactly
    a = massless(30.0, 0.0, 0.0)
    b = massless(10.0, 0.0, 0.0)
    jet = a.merged_with(b)
    fracs = momentum_fractions([a, b], jet)
    assert fracs == [pytest.approx(0.75), pytest.approx(0.25)]
    assert sum(fracs) == pytest.approx(1.0, abs=1e-12)


def test_perjet_fractions_sum_at_least_one():
    # non-collinear prongs: triangle inequality makes the sum exceed 1
    rng = np.random.default_rng(9)
    event = random_event(rng, 6)
    jet = cluster(event, ClusterSpec(Algorithm.CAM_AACHEN, 2.0))[0]
    prongs = decluster(jet, 3)
    assert sum(momentum_fractions(prongs, jet)) >= 1.0 - 1e-9


def test_select_cuts():
    passing = massless(350.0, 1.0, 0.0)
    low_pt = massless(299.0, 1.0, 0.0)
    forward = massless(400.0, 2.5, 0.0)
    cuts = SelectionCuts(300.0, 2.4, 1.0)
    assert select([passing, low_pt, forward], cuts) == [passing]


def test_select_all_zero_cuts_is_identity():
    jets = [massless(299.0, 1.0, 0.0), massless(5.0, 3.7, 1.0)]
    assert select(jets, SelectionCuts(0.0, 0.0, 0.0)) == jets


def test_filter_constituents_threshold():
    hard = massless(5.0, 0.0, 0.0)
    soft = massless(0.5, 0.1, 0.1)
    jet = hard.merged_with(soft)
    assert filter_constituents(jet, 1.0) == [hard]


def test_pipeline_two_particle_hand_kinematics():
    # two collinear-in-phi particles at pt 300 and 100: jet pt 400 passes the
    # cut, fractions are 0.75 and 0.25 of the reclustered jet
    a = massless(300.0, 0.0, 0.0)
    b = massless(100.0, 0.05, 0.0)
    fracs = prong_fractions_pipeline([a, b], SelectionCuts(), 2)
    jet = a.merged_with(b)
    assert fracs == [pytest.approx(a.pt / jet.pt), pytest.approx(b.pt / jet.pt)]
    assert fracs[0] == pytest.approx(0.75, abs=5e-4)


def test_pipeline_rejects_soft_jet():
    assert prong_fractions_pipeline([massless(100.0, 0.0, 0.0)], SelectionCuts(), 2) is None


def test_read_events(tmp_path):
    path = tmp_path / "events.jsonl"
    path.write_text(
        json.dumps({"constituents": [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 0.0, 1.0]]})
        + "\n\n"
        + json.dumps({"constituents": []})
        + "\n"
    )
    events = read_events(path)
    assert len(events) == 2
    assert len(events[0][1]) == 2
    assert events[0][1][0].px == 1.0
    assert events[1][1] == []
