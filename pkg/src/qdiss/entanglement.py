"""Entanglement detection, Werner thresholds, three-qubit classification and
entanglement tracking along master-equation trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .density import DensityMatrix, marginal, parse_parties, party_names
from .entropy import DEFAULT_Q_GRID, conditional_q_entropy, conditional_sign_at_infinity
from .lindblad import evolve
from .states import WernerParams, three_qubit, werner

DETECT_TOL = 1e-10
PPT_TOL = 1e-10
SYMMETRY_TOL = 1e-10
# |ppt_min_eigenvalue| at or above this marks a robustly (R) entangled pair;
# smaller but nonzero negativity is the reduced class (r).
ROBUST_THRESHOLD = 0.1
DEFAULT_SCAN_TOL = 1e-4


@dataclass(frozen=True)
class EntanglementVerdict:
    detected_by_q_criterion: bool
    witness_q: float | None
    min_conditional_value: float
    infinity_sign: int
    ppt_min_eigenvalue: float | None
    bipartition: tuple
    values: tuple = ()

    @property
    def ppt_entangled(self) -> bool | None:
        if self.ppt_min_eigenvalue is None:
            return None
        return self.ppt_min_eigenvalue < -PPT_TOL


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Smallest eigenvalue of the partial transpose on the second qubit."""
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"partial-transpose oracle needs dims (2, 2), got {rho.dims}")
    pt = linalg.partial_transpose(rho.data, rho.dims, 1)
    return float(linalg.eigvalsh_desc(pt)[-1])


def _bipartition(rho: DensityMatrix, condition_on) -> tuple[tuple, tuple]:
    cond = tuple(parse_parties(condition_on))
    if not cond or cond[0] < 0 or cond[-1] >= rho.n_parties or len(cond) == rho.n_parties:
        raise ValueError(f"invalid bipartition {condition_on!r} for {rho.n_parties} parties")
    rest = tuple(k for k in range(rho.n_parties) if k not in cond)
    return cond, rest


def detect(rho: DensityMatrix, condition_on, q_grid: Iterable[float] = DEFAULT_Q_GRID) -> EntanglementVerdict:
    """Run the conditional q-entropy criterion over ``q_grid`` and q -> inf.

    A negative value at any grid point, or a negative limiting sign, counts
    as detection. ``witness_q`` is the smallest grid q with a negative value,
    ``math.inf`` when only the limit is negative. Two-qubit states also get
    the partial-transpose oracle.
    """
    cond, rest = _bipartition(rho, condition_on)
    results = [conditional_q_entropy(rho, cond, q) for q in q_grid]
    values = tuple((r.q, r.value) for r in results)
    min_val = min((v for _, v in values), default=math.inf)
    negative_qs = sorted(q for q, v in values if v < -DETECT_TOL)
    inf_sign = conditional_sign_at_infinity(rho, cond)
    if negative_qs:
        witness = negative_qs[0]
    elif inf_sign < 0:
        witness = math.inf
    else:
        witness = None
    ppt = ppt_min_eigenvalue(rho) if tuple(rho.dims) == (2, 2) else None
    return EntanglementVerdict(
        detected_by_q_criterion=bool(negative_qs) or inf_sign < 0,
        witness_q=witness,
        min_conditional_value=float(min_val),
        infinity_sign=inf_sign,
        ppt_min_eigenvalue=ppt,
        bipartition=(cond, rest),
        values=values,
    )


def _default_condition(parties: int) -> tuple:
    return tuple(range(parties - 1))


def threshold_scan(levels: int = 2, parties: int = 2, condition_on=None,
                   q_grid: Iterable[float] = DEFAULT_Q_GRID,
                   tol: float = DEFAULT_SCAN_TOL) -> float:
    """Bisect the Werner weight x for the onset of q-criterion detection.

    By default the first ``parties - 1`` parties are the conditioning set.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cond = _default_condition(parties) if condition_on is None else condition_on
    q_grid = tuple(q_grid)

    def fires(x: float) -> bool:
        return detect(werner(WernerParams(x, levels, parties)), cond, q_grid).detected_by_q_criterion

    lo, hi = 0.0, 1.0
    if fires(lo) or not fires(hi):
        raise ValueError("detection does not change over x in [0, 1]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fires(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# Symmetry labels
SYMMETRIC, ANTISYMMETRIC, NONSYMMETRIC = "S", "AS", "NS"


def _swap_perm(n: int, a: int, b: int) -> list[int]:
    perm = list(range(n))
    perm[a], perm[b] = perm[b], perm[a]
    return perm


def _pair_label(state, pair: tuple[int, int]) -> str:
    a, b = pair
    if isinstance(state, DensityMatrix):
        dims = state.dims
        if dims[a] != dims[b]:
            return NONSYMMETRIC
        swapped = linalg.permute_subsystems(state.data, dims, _swap_perm(len(dims), a, b))
        # Projectors onto the pair-symmetric / antisymmetric subspaces.
        perm = _swap_perm(len(dims), a, b)
        swap = np.column_stack([linalg.permute_vector(e, dims, perm) for e in np.eye(state.dim)])
        sym_weight = 0.5 * (1.0 + np.trace(swap @ state.data).real)
        if np.abs(swapped - state.data).max() <= SYMMETRY_TOL:
            if abs(sym_weight - 1.0) <= SYMMETRY_TOL:
                return SYMMETRIC
            if abs(sym_weight) <= SYMMETRY_TOL:
                return ANTISYMMETRIC
        return NONSYMMETRIC
    psi, dims = state
    swapped = linalg.permute_vector(psi, dims, _swap_perm(len(dims), a, b))
    if np.linalg.norm(swapped - psi) <= SYMMETRY_TOL:
        return SYMMETRIC
    if np.linalg.norm(swapped + psi) <= SYMMETRY_TOL:
        return ANTISYMMETRIC
    return NONSYMMETRIC


def _as_state(state):
    if isinstance(state, DensityMatrix):
        return state
    if hasattr(state, "amplitudes"):
        return (np.asarray(state.amplitudes), (2, 2, 2))
    psi, dims = state
    return (np.asarray(psi, dtype=complex), tuple(dims))


def _n_parties(state) -> int:
    return state.n_parties if isinstance(state, DensityMatrix) else len(state[1])


@dataclass(frozen=True)
class SymmetryResult:
    label: str
    pairs: tuple

    def __str__(self) -> str:
        if self.label == NONSYMMETRIC or not self.pairs:
            return self.label
        names = sorted(set("".join(self.pairs)))
        return f"{self.label} {','.join(names)}"


def full_symmetry(state) -> SymmetryResult:
    """Aggregate pair-swap labels over all pairs.

    All pairs symmetric gives S; otherwise AS if any pair is antisymmetric,
    else S if any pair is symmetric, reported with the pairs that carry it;
    NS when no pair has a definite symmetry.
    """
    st = _as_state(state)
    n = _n_parties(st)
    labels = {p: _pair_label(st, p) for p in combinations(range(n), 2)}
    for target in (ANTISYMMETRIC, SYMMETRIC):
        pairs = tuple(party_names(p) for p, lab in labels.items() if lab == target)
        if pairs:
            return SymmetryResult(target, pairs)
    return SymmetryResult(NONSYMMETRIC, ())


def symmetry_label(state, parties) -> str:
    """Permutation-symmetry label S, AS or NS.

    ``state`` is a DensityMatrix, a ThreeQubitState or a ``(vector, dims)``
    pair. ``parties`` names a pair (swap test) or all parties (aggregate).
    """
    st = _as_state(state)
    n = _n_parties(st)
    ps = parse_parties(parties)
    if len(ps) == 2 and ps[1] < n:
        return _pair_label(st, (ps[0], ps[1]))
    if ps == list(range(n)):
        return full_symmetry(st).label
    raise ValueError(f"invalid party set {parties!r} for {n} parties")


@dataclass(frozen=True)
class MarginalEntry:
    pair: str
    symmetry: str
    robustness: str
    ppt_min_eigenvalue: float
    q_detected: bool


@dataclass(frozen=True)
class ClassificationRow:
    label: str
    marginals: tuple
    full: SymmetryResult

    def entry(self, pair: str) -> MarginalEntry:
        for m in self.marginals:
            if m.pair == pair:
                return m
        raise KeyError(pair)

    def labels(self) -> dict:
        out = {m.pair: (m.symmetry, m.robustness) for m in self.marginals}
        out["ABC"] = self.full.label
        return out

    def to_json(self) -> dict:
        return {
            "state": self.label,
            "marginals": [
                {
                    "pair": m.pair,
                    "symmetry": m.symmetry,
                    "robustness": m.robustness,
                    "ppt_min_eigenvalue": m.ppt_min_eigenvalue,
                    "q_criterion_detected": m.q_detected,
                }
                for m in self.marginals
            ],
            "full_symmetry": self.full.label,
            "full_symmetry_pairs": list(self.full.pairs),
        }


def robustness_label(ppt_min: float, robust_threshold: float = ROBUST_THRESHOLD) -> str:
    if ppt_min >= -PPT_TOL:
        return "F"
    return "R" if abs(ppt_min) >= robust_threshold else "r"


def classify_three_qubit(label: str, robust_threshold: float = ROBUST_THRESHOLD) -> ClassificationRow:
    st = three_qubit(label)
    rho = st.density()
    pure = _as_state(st)
    entries = []
    for pair in combinations(range(3), 2):
        red = marginal(rho, pair)
        ppt = ppt_min_eigenvalue(red)
        entries.append(MarginalEntry(
            pair=party_names(pair),
            symmetry=_pair_label(pure, pair),
            robustness=robustness_label(ppt, robust_threshold),
            ppt_min_eigenvalue=ppt,
            q_detected=detect(red, [0]).detected_by_q_criterion,
        ))
    return ClassificationRow(st.label, tuple(entries), full_symmetry(pure))


# Golden rows, labels only: (AB, AC, BC, ABC).
REFERENCE_TABLE = {
    "GHZ": ((("S", "F"), ("S", "F"), ("S", "F")), "S"),
    "GFR": ((("NS", "F"), ("NS", "F"), ("AS", "R")), "AS"),
    "WRr": ((("NS", "R"), ("NS", "R"), ("S", "r")), "S"),
    "WRR": ((("S", "R"), ("S", "R"), ("S", "R")), "S"),
}


def matches_table(row: ClassificationRow) -> bool:
    family = row.label[:-1]
    if family not in REFERENCE_TABLE:
        return False
    pairs, full = REFERENCE_TABLE[family]
    got = tuple((m.symmetry, m.robustness) for m in row.marginals)
    return got == pairs and row.full.label == full


def format_table(rows: Sequence[ClassificationRow]) -> str:
    """Aligned text table with columns AB, AC, BC, ABC."""
    header = ["State", "AB", "", "AC", "", "BC", "", "ABC"]
    lines = [header]
    for row in rows:
        cells = [row.label]
        for m in row.marginals:
            cells += [m.symmetry, m.robustness]
        cells.append(str(row.full))
        lines.append(cells)
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(
        "  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in lines
    )


@dataclass(frozen=True)
class Transition:
    t_before: float
    t_after: float
    kind: str  # "gain" (not detected -> detected) or "loss"


@dataclass(frozen=True)
class EntanglementTimeline:
    times: np.ndarray
    verdicts: tuple
    transitions: tuple = field(default=())
    trajectory: object = None

    @property
    def detected(self) -> np.ndarray:
        return np.array([v.detected_by_q_criterion for v in self.verdicts])


def transitions_from(times: Sequence[float], flags: Sequence[bool]) -> tuple:
    out = []
    for k in range(1, len(flags)):
        if flags[k] != flags[k - 1]:
            out.append(Transition(float(times[k - 1]), float(times[k]), "gain" if flags[k] else "loss"))
    return tuple(out)


def track(model, rho0: DensityMatrix, times, condition_on,
          q_grid: Iterable[float] = DEFAULT_Q_GRID, method: str = "exact",
          h_max: float = 1e-3) -> EntanglementTimeline:
    """Evolve ``rho0`` and apply :func:`detect` at every grid time."""
    q_grid = tuple(q_grid)
    traj = evolve(model, rho0, times, method=method, h_max=h_max)
    verdicts = tuple(detect(rho, condition_on, q_grid) for rho in traj.states)
    flags = [v.detected_by_q_criterion for v in verdicts]
    return EntanglementTimeline(traj.times, verdicts, transitions_from(traj.times, flags), traj)
