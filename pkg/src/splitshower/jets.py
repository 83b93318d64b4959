"""Sequential-recombination jet clustering, declustering, and fractions.

Generalized-kT distances: d_ij = min(pT_i^2p, pT_j^2p) dR_ij^2 / R^2 with
p = -1 (anti-kT) or p = 0 (Cambridge/Aachen), d_iB = pT_i^2p. dR^2 uses
rapidity y (not pseudorapidity) and phi wrapped to (-pi, pi]; the |eta|
selection cut uses pseudorapidity. Recombination is the E-scheme (component
sum) and the full clustering history is retained on each jet.

The implementation is the naive O(N^2)-per-event loop with distances updated
incrementally after each merge; desk-scale inputs (N up to a few hundred)
need nothing faster. Ties in the smallest distance are broken by the lowest
(i, j) index pair in insertion order; the brute-force oracle used in tests
recomputes every distance each step and shares the same tie rule.

Declustering: starting from the jet, the current highest-pT prong is replaced
by its two clustering parents until the requested prong count is reached.
When the highest-pT prong is a single constituent, the highest-pT splittable
prong is opened instead (the leaves precondition guarantees one exists).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import (
    EmptyInput,
    InsufficientConstituents,
    NonFiniteMomentum,
    PairModeArity,
    ZeroJetPt,
)


@dataclass(frozen=True)
class PseudoJet:
    """Four-momentum in GeV with optional clustering parents."""

    px: float
    py: float
    pz: float
    e: float
    parents: tuple[PseudoJet, PseudoJet] | None = None

    @property
    def pt(self) -> float:
        return math.hypot(self.px, self.py)

    @property
    def phi(self) -> float:
        return math.atan2(self.py, self.px)

    @property
    def rapidity(self) -> float:
        return 0.5 * math.log((self.e + self.pz) / (self.e - self.pz))

    @property
    def eta(self) -> float:
        p = math.sqrt(self.px**2 + self.py**2 + self.pz**2)
        if p == abs(self.pz):
            return math.copysign(math.inf, self.pz)
        return 0.5 * math.log((p + self.pz) / (p - self.pz))

    def merged_with(self, other: PseudoJet) -> PseudoJet:
        """E-scheme recombination, keeping both parents."""
        return PseudoJet(
            self.px + other.px,
            self.py + other.py,
            self.pz + other.pz,
            self.e + other.e,
            parents=(self, other),
        )

    def constituents(self) -> list[PseudoJet]:
        """Leaves of the clustering history."""
        if self.parents is None:
            return [self]
        return self.parents[0].constituents() + self.parents[1].constituents()


class Algorithm(Enum):
    ANTI_KT = "antikt"
    CAM_AACHEN = "ca"


_KT_POWER = {Algorithm.ANTI_KT: -1, Algorithm.CAM_AACHEN: 0}


@dataclass(frozen=True)
class ClusterSpec:
    algorithm: Algorithm
    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius <= 2.0:
            raise ValueError(f"radius must be in (0, 2], got {self.radius}")


@dataclass(frozen=True)
class SelectionCuts:
    jet_pt_min: float = 300.0
    abs_eta_max: float = 2.4
    constituent_pt_min: float = 1.0

    def __post_init__(self):
        if min(self.jet_pt_min, self.abs_eta_max, self.constituent_pt_min) < 0:
            raise ValueError("cuts must be nonnegative")


def _delta_phi(a: float, b: float) -> float:
    d = a - b
    while d > math.pi:
        d -= 2.0 * math.pi
    while d <= -math.pi:
        d += 2.0 * math.pi
    return d


def delta_r2(a: PseudoJet, b: PseudoJet) -> float:
    """Rapidity-azimuth separation squared."""
    return (a.rapidity - b.rapidity) ** 2 + _delta_phi(a.phi, b.phi) ** 2


def _check_finite(jets: list[PseudoJet]) -> None:
    for j in jets:
        if not all(math.isfinite(v) for v in (j.px, j.py, j.pz, j.e)):
            raise NonFiniteMomentum(f"non-finite four-momentum: {j}")


def cluster(constituents: list[PseudoJet], spec: ClusterSpec) -> list[PseudoJet]:
    """Inclusive jets with history, sorted by descending pT.

    The pairwise distance table is built once and only rows touching the
    merged pseudojet are recomputed, so distance evaluations total O(N^2);
    the brute-force oracle recomputes everything each step instead.
    """
    if not constituents:
        raise EmptyInput("no constituents to cluster")
    _check_finite(constituents)
    power = _KT_POWER[spec.algorithm]
    r2 = spec.radius**2

    active: dict[int, PseudoJet] = dict(enumerate(constituents))
    next_id = len(constituents)
    dib = {i: active[i].pt ** (2 * power) for i in active}
    dij = {}
    ids = sorted(active)
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            i, j = ids[a], ids[b]
            dij[(i, j)] = min(dib[i], dib[j]) * delta_r2(active[i], active[j]) / r2

    jets: list[PseudoJet] = []
    while active:
        best_beam = min(dib.items(), key=lambda kv: (kv[1], kv[0]))
        best_pair = min(dij.items(), key=lambda kv: (kv[1], kv[0])) if dij else None
        if best_pair is None or best_beam[1] <= best_pair[1]:
            i = best_beam[0]
            jets.append(active.pop(i))
            del dib[i]
            dij = {k: v for k, v in dij.items() if i not in k}
            continue
        i, j = best_pair[0]
        merged = active[i].merged_with(active[j])
        for k in (i, j):
            del active[k], dib[k]
        dij = {k: v for k, v in dij.items() if i not in k and j not in k}
        m = next_id
        next_id += 1
        active[m] = merged
        dib[m] = merged.pt ** (2 * power)
        for k in sorted(active):
            if k != m:
                dij[(k, m)] = min(dib[k], dib[m]) * delta_r2(active[k], merged) / r2
    return sorted(jets, key=lambda j: -j.pt)


def cluster_bruteforce(constituents: list[PseudoJet], spec: ClusterSpec) -> list[PseudoJet]:
    """O(N^3) oracle: every distance recomputed from scratch each step."""
    if not constituents:
        raise EmptyInput("no constituents to cluster")
    _check_finite(constituents)
    power = _KT_POWER[spec.algorithm]
    r2 = spec.radius**2
    active: dict[int, PseudoJet] = dict(enumerate(constituents))
    next_id = len(constituents)
    jets: list[PseudoJet] = []
    while active:
        candidates = []  # (distance, tiebreak key, kind, ids)
        for i in sorted(active):
            candidates.append((active[i].pt ** (2 * power), (i,), "beam", (i,)))
        for i in sorted(active):
            for j in sorted(active):
                if i < j:
                    d = (
                        min(active[i].pt ** (2 * power), active[j].pt ** (2 * power))
                        * delta_r2(active[i], active[j])
                        / r2
                    )
                    candidates.append((d, (i, j), "pair", (i, j)))
        # beam wins ties against pairs at equal distance, matching cluster()
        d, _, kind, ids_ = min(candidates, key=lambda c: (c[0], c[2] != "beam", c[1]))
        if kind == "beam":
            jets.append(active.pop(ids_[0]))
        else:
            i, j = ids_
            merged = active[i].merged_with(active[j])
            del active[i], active[j]
            active[next_id] = merged
            next_id += 1
    return sorted(jets, key=lambda j: -j.pt)


def decluster(jet: PseudoJet, n_prongs: int) -> list[PseudoJet]:
    """Undo merges from the top until n_prongs prongs exist, hardest first."""
    if n_prongs < 2:
        raise ValueError(f"n_prongs must be >= 2, got {n_prongs}")
    if len(jet.constituents()) < n_prongs:
        raise InsufficientConstituents(
            f"jet has {len(jet.constituents())} constituents, need {n_prongs}"
        )
    prongs = [jet]
    while len(prongs) < n_prongs:
        splittable = [p for p in prongs if p.parents is not None]
        target = max(splittable, key=lambda p: p.pt)
        prongs.remove(target)
        prongs.extend(target.parents)
    return sorted(prongs, key=lambda p: -p.pt)


class FractionMode(Enum):
    PER_JET_PT = "perjet"
    PAIR_MIN = "pairmin"
    PAIR_MAX = "pairmax"


def momentum_fractions(
    prongs: list[PseudoJet], jet: PseudoJet, mode: FractionMode = FractionMode.PER_JET_PT
) -> list[float]:
    """Prong momentum fractions.

    PER_JET_PT: pT_i / pT_jet for each prong. PAIR_MIN / PAIR_MAX (two prongs
    only): min or max prong pT over the scalar pT sum.
    """
    if not prongs:
        raise EmptyInput("no prongs")
    if mode is FractionMode.PER_JET_PT:
        if jet.pt <= 0.0:
            raise ZeroJetPt("jet pT must be positive")
        return [p.pt / jet.pt for p in prongs]
    if len(prongs) != 2:
        raise PairModeArity(f"pair modes need exactly 2 prongs, got {len(prongs)}")
    pts = sorted(p.pt for p in prongs)
    total = pts[0] + pts[1]
    if total <= 0.0:
        raise ZeroJetPt("prong pT sum must be positive")
    return [pts[0] / total] if mode is FractionMode.PAIR_MIN else [pts[1] / total]


def select(jets: list[PseudoJet], cuts: SelectionCuts) -> list[PseudoJet]:
    """Jets passing pT > jet_pt_min and |eta| < abs_eta_max.

    abs_eta_max = 0 disables the eta cut, so all-zero cuts are the identity
    on physical jets.
    """
    return [
        j
        for j in jets
        if j.pt > cuts.jet_pt_min
        and (cuts.abs_eta_max == 0.0 or abs(j.eta) < cuts.abs_eta_max)
    ]


def filter_constituents(jet: PseudoJet, pt_min: float) -> list[PseudoJet]:
    """Constituents at or above the soft-radiation threshold."""
    return [c for c in jet.constituents() if c.pt > pt_min]


@dataclass
class EventFractions:
    event_id: int
    fractions: list[float]


def prong_fractions_pipeline(
    constituents: list[PseudoJet],
    cuts: SelectionCuts,
    n_prongs: int,
    mode: FractionMode = FractionMode.PER_JET_PT,
    jet_spec: ClusterSpec = ClusterSpec(Algorithm.ANTI_KT, 0.8),
    recluster_spec: ClusterSpec = ClusterSpec(Algorithm.CAM_AACHEN, 0.4),
) -> list[float] | None:
    """Full per-event recipe; None when no jet survives.

    anti-kT jets -> pT/eta selection -> leading jet -> constituent pT filter
    -> C/A recluster -> leading reclustered jet -> decluster -> fractions.
    """
    jets = select(cluster(constituents, jet_spec), cuts)
    if not jets:
        return None
    filtered = filter_constituents(jets[0], cuts.constituent_pt_min)
    if len(filtered) < n_prongs:
        return None
    rejet = cluster(filtered, recluster_spec)[0]
    if len(rejet.constituents()) < n_prongs:
        return None
    prongs = decluster(rejet, n_prongs)
    return momentum_fractions(prongs, rejet, mode)


def read_events(path) -> list[tuple[int, list[PseudoJet]]]:
    """Constituent file: one JSON object per line with a "constituents" list
    of [px, py, pz, E] in GeV. Returns (event_id, constituents) pairs; blank
    lines are skipped, empty events kept (the caller decides how to report
    them)."""
    events = []
    with open(path, encoding="utf-8") as fh:
        event_id = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            data = json.loads(line)
            cons = [PseudoJet(*map(float, four)) for four in data["constituents"]]
            events.append((event_id, cons))
            event_id += 1
    return events
