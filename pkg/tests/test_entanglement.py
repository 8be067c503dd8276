import math

import numpy as np
import pytest

from qdiss import entanglement as ent
from qdiss import lindblad as lb
from qdiss.density import DensityMatrix, from_pure, marginal, product
from qdiss.states import TABLE_LABELS, WernerParams, bell_state, pauli, three_qubit, werner, werner_threshold

from conftest import rand_dm

BELL = from_pure(bell_state(), (2, 2))


def test_detect_werner_examples():
    v = ent.detect(werner(WernerParams(0.6)), "A")
    assert v.detected_by_q_criterion
    assert v.witness_q == 2.0
    assert dict(v.values)[2.0] == pytest.approx(-0.04)
    assert v.ppt_min_eigenvalue == pytest.approx((1 - 3 * 0.6) / 4)
    assert v.bipartition == ((0,), (1,))

    v = ent.detect(werner(WernerParams(0.2)), "A")
    assert not v.detected_by_q_criterion
    assert v.witness_q is None
    assert v.min_conditional_value > 0


def test_detect_bell():
    v = ent.detect(BELL, "A", q_grid=[2.0])
    assert v.detected_by_q_criterion
    assert v.min_conditional_value == pytest.approx(-1.0)


def test_detect_only_at_infinity():
    x = 0.34  # just above 1/3: finite grid stays positive, the limit is negative
    v = ent.detect(werner(WernerParams(x)), "A", q_grid=[2.0, 5.0])
    assert v.witness_q == math.inf and v.detected_by_q_criterion


def test_detect_invalid_bipartition():
    with pytest.raises(ValueError):
        ent.detect(BELL, "AB")
    with pytest.raises(ValueError):
        ent.detect(BELL, "C")


def test_verdict_invariant(rng):
    for _ in range(30):
        v = ent.detect(rand_dm(rng, [2, 2], rank=int(rng.integers(1, 5))), "A")
        assert v.detected_by_q_criterion == (v.min_conditional_value < -1e-10 or v.infinity_sign < 0)


def test_ppt_examples(rng):
    assert ent.ppt_min_eigenvalue(BELL) == pytest.approx(-0.5)
    for _ in range(10):
        assert ent.ppt_min_eigenvalue(product(rand_dm(rng, [2]), rand_dm(rng, [2]))) >= -1e-10
    q2 = marginal(three_qubit("Q2+").density(), "AB")
    assert ent.ppt_min_eigenvalue(q2) == pytest.approx((1 - math.sqrt(5)) / 6, abs=1e-10)
    with pytest.raises(ValueError):
        ent.ppt_min_eigenvalue(werner(WernerParams(0.5, 3, 2)))


def test_ppt_wrr_marginals_by_hand():
    rho = three_qubit("WRr+").density()
    # 2x2 blocks after partial transpose: [[2/3, 1/6], [1/6, 0]] and [[1/6, -1/3], [-1/3, 0]]
    assert ent.ppt_min_eigenvalue(marginal(rho, "BC")) == pytest.approx((2 - math.sqrt(5)) / 6, abs=1e-12)
    assert ent.ppt_min_eigenvalue(marginal(rho, "AB")) == pytest.approx((1 - math.sqrt(17)) / 12, abs=1e-12)


def test_false_negative_of_q_criterion():
    q2 = marginal(three_qubit("Q2+").density(), "AB")
    v = ent.detect(q2, "A")
    assert v.ppt_min_eigenvalue < 0
    assert not v.detected_by_q_criterion
    assert v.min_conditional_value >= -1e-10
    np.testing.assert_allclose(np.linalg.eigvalsh(q2.data)[::-1], [2 / 3, 1 / 3, 0, 0], atol=1e-12)


@pytest.mark.parametrize("levels,parties", [(2, 2), (2, 3), (3, 2)])
def test_threshold_scan(levels, parties):
    x = ent.threshold_scan(levels, parties)
    assert abs(x - werner_threshold(levels, parties)) <= 1e-4


def test_threshold_scan_errors():
    with pytest.raises(ValueError):
        ent.threshold_scan(tol=0)
    with pytest.raises(ValueError):
        # conditioning on a single party of a 3-qubit Werner state never fires at x = 0,
        # but its onset is different; an empty grid and impossible split raise
        ent.threshold_scan(2, 2, condition_on="AB")


@pytest.mark.parametrize("levels,parties", [(2, 2), (2, 3), (3, 2), (2, 4)])
def test_criterion_soundness_on_werner(levels, parties):
    thr = werner_threshold(levels, parties)
    cond = list(range(parties - 1))
    for x in np.linspace(0, 1, 41):
        if abs(x - thr) <= 1e-6:
            continue
        v = ent.detect(werner(WernerParams(float(x), levels, parties)), cond)
        assert v.detected_by_q_criterion == (x > thr)


def test_oracle_agreement_on_werner():
    for x in np.linspace(0, 1, 301):
        if abs(x - 1 / 3) <= 1e-6:
            continue
        v = ent.detect(werner(WernerParams(float(x))), "A")
        assert v.detected_by_q_criterion == (v.ppt_min_eigenvalue < 0)


@pytest.mark.parametrize("label,pair,expected", [
    ("Q2+", "AB", "S"), ("Q2+", "AC", "S"), ("Q2+", "BC", "S"),
    ("D2+", "BC", "AS"), ("D2+", "AB", "NS"),
    ("D1+", "BC", "S"), ("D1+", "AC", "NS"),
    ("GHZ-", "AB", "S"),
])
def test_symmetry_label_pure(label, pair, expected):
    assert ent.symmetry_label(three_qubit(label), pair) == expected


def test_symmetry_label_mixed():
    assert ent.symmetry_label(BELL, "AB") == "S"
    singlet = from_pure(np.array([0, 1, -1, 0]) / np.sqrt(2), (2, 2))
    assert ent.symmetry_label(singlet, "AB") == "AS"
    assert ent.symmetry_label(werner(WernerParams(0.5)), "AB") == "NS"
    assert ent.symmetry_label(three_qubit("D2+").density(), "BC") == "AS"
    assert ent.symmetry_label(three_qubit("D2+").density(), "ABC") == "AS"


def test_full_symmetry_aggregate():
    assert str(ent.full_symmetry(three_qubit("GFR+"))) == "AS B,C"
    assert str(ent.full_symmetry(three_qubit("WRr-"))) == "S B,C"
    assert str(ent.full_symmetry(three_qubit("WRR+"))) == "S A,B,C"


@pytest.mark.parametrize("label", TABLE_LABELS)
def test_classification_matches_table(label):
    row = ent.classify_three_qubit(label)
    assert ent.matches_table(row)


def test_classification_details():
    assert [m.robustness for m in ent.classify_three_qubit("GHZ+").marginals] == ["F", "F", "F"]
    assert [m.robustness for m in ent.classify_three_qubit("WRR-").marginals] == ["R", "R", "R"]
    row = ent.classify_three_qubit("WRr+")
    assert row.labels()["BC"] == ("S", "r")
    assert abs(row.entry("BC").ppt_min_eigenvalue) == pytest.approx((math.sqrt(5) - 2) / 6)
    with pytest.raises(ValueError):
        ent.classify_three_qubit("nope")


def test_robust_threshold_window():
    # any cut strictly between the WRr BC value (~0.039) and the WRR value (~0.206) reproduces the table
    for tau in (0.05, 0.1, 0.19):
        assert all(ent.matches_table(ent.classify_three_qubit(l, tau)) for l in TABLE_LABELS)
    assert not ent.matches_table(ent.classify_three_qubit("WRr+", 0.03))
    assert not ent.matches_table(ent.classify_three_qubit("WRR+", 0.25))


def test_format_table_columns():
    text = ent.format_table([ent.classify_three_qubit("GFR+")])
    header, row = text.splitlines()
    assert header.split() == ["State", "AB", "AC", "BC", "ABC"]
    assert row.split() == ["GFR+", "NS", "F", "NS", "F", "AS", "R", "AS", "B,C"]


def local_depolarizing(h):
    chans = [(h, pauli(a, p, 2)) for p in range(2) for a in "xyz"]
    return lb.DiagonalModel(np.zeros((4, 4)), tuple(chans), (2, 2))


def test_track_zero_dissipation_constant():
    H = 0.8 * pauli("z", 0, 2) + 0.3 * pauli("x", 1, 2)
    m = lb.DiagonalModel(H, (), (2, 2))
    tl = ent.track(m, BELL, np.linspace(0, 5, 51), "A")
    assert tl.transitions == ()
    assert tl.detected.all()
    tl = ent.track(lb.DiagonalModel(np.zeros((4, 4)), (), (2, 2)), werner(WernerParams(0.2)),
                   np.linspace(0, 1, 5), "A")
    assert tl.transitions == () and not tl.detected.any()


def test_track_depolarized_bell():
    h = 0.05
    t = np.linspace(0, 5, 101)
    tl = ent.track(local_depolarizing(h), BELL, t, "A")
    # fit x(t) from the largest eigenvalue of each snapshot
    lam = np.array([np.linalg.eigvalsh(r.data)[-1] for r in tl.trajectory.states])
    x = (4 * lam - 1) / 3
    gamma = -np.polyfit(t, np.log(x), 1)[0]
    assert gamma == pytest.approx(8 * h, rel=1e-9)
    t_star = math.log(3) / gamma
    (tr,) = tl.transitions
    assert tr.kind == "loss"
    assert tr.t_before - (t[1] - t[0]) <= t_star <= tr.t_after + 1e-12


def exchange_model(rates, channel_axes):
    H = 0.5 * (pauli("x", 0, 2) @ pauli("x", 1, 2) + pauli("y", 0, 2) @ pauli("y", 1, 2))
    chans = [(r, pauli(a, p, 2)) for p in range(2) for a in channel_axes for r in [rates]]
    return lb.DiagonalModel(H, tuple(chans), (2, 2))


def test_track_gain_from_product():
    rho0 = from_pure(np.eye(4)[1], (2, 2))  # |ud>
    tl = ent.track(exchange_model(0.02, "z"), rho0, np.linspace(0, 6, 121), "A")
    assert any(tr.kind == "gain" for tr in tl.transitions)
    assert not tl.verdicts[0].detected_by_q_criterion


def test_track_revivals_and_grid_refinement():
    rho0 = from_pure(np.eye(4)[1], (2, 2))
    m = exchange_model(0.01, "xyz")
    coarse = ent.track(m, rho0, np.linspace(0, 10, 201), "A")
    fine = ent.track(m, rho0, np.linspace(0, 10, 401), "A")
    kinds = [tr.kind for tr in coarse.transitions]
    assert kinds.count("gain") >= 2 and "loss" in kinds
    assert [tr.kind for tr in fine.transitions] == kinds
    step = 10 / 200
    for a, b in zip(coarse.transitions, fine.transitions):
        assert abs(a.t_after - b.t_after) <= step + 1e-12


def test_transitions_from():
    trs = ent.transitions_from([0, 1, 2, 3], [False, True, True, False])
    assert [(t.t_before, t.t_after, t.kind) for t in trs] == [(0, 1, "gain"), (2, 3, "loss")]
