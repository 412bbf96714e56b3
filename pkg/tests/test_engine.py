"""Markov engine: matrix assembly, projection and increment-decrement tables."""

import weakref
from functools import reduce

import numpy as np
import pytest

from src.engine import (
    CII_MODEL,
    MATRIX_CACHE_SIZE,
    AggregationView,
    ProjectionError,
    TransitionMatrix,
    assemble,
    matrices_frame,
    recover_probabilities,
    round_trip_error,
    synthesize_from_matrices,
    synthesize_idtable,
    trajectory,
    trajectory_from_matrices,
)
from src.estimators import RATE_KEYS, build_context, q12, transition_probabilities
from src.settings import SUPPORTED_AGES


def test_every_matrix_is_stochastic_and_follows_the_graph(male_ctx, female_ctx):
    mask = CII_MODEL.mask()
    for ctx in (male_ctx, female_ctx):
        for age in range(20, 101):
            q = assemble(ctx, age).entries
            np.testing.assert_allclose(q.sum(axis=1), 1.0, rtol=0, atol=1e-12)
            assert q.min() >= 0.0
            assert q.max() <= 1.0
            assert not np.any(q[~mask])
            # Every allowed off-diagonal move is possible at some point.
            assert np.all(q[mask & ~np.eye(8, dtype=bool)] > 0)


def test_matrix_entries_match_estimators(male_ctx):
    matrix = assemble(male_ctx, 63)
    for (i, j), value in transition_probabilities(male_ctx, 63).items():
        assert matrix.q(i, j) == value
    assert matrix.q(7, 7) == 1.0
    assert matrix.q(8, 8) == 1.0
    assert {(i, j) for i, j in RATE_KEYS if i != j} == CII_MODEL.transitions


def test_matrices_are_cached_and_read_only(male_ctx):
    first = assemble(male_ctx, 50)
    assert assemble(male_ctx, 50) is first
    with pytest.raises(ValueError, match="read-only"):
        first.entries[0, 0] = 0.5


def test_matrix_cache_releases_old_contexts(male_table):
    ctx = build_context(male_table)
    assemble(ctx, 50)
    released = weakref.ref(ctx)
    del ctx
    ages = SUPPORTED_AGES.ages
    for _ in range(MATRIX_CACHE_SIZE // len(ages) + 1):
        other = build_context(male_table)
        for age in ages:
            assemble(other, age)
    assert assemble.cache_info().maxsize == MATRIX_CACHE_SIZE
    assert released() is None


def test_transition_matrix_rejects_bad_rows():
    with pytest.raises(ProjectionError, match="age 50"):
        TransitionMatrix(50, np.full((8, 8), 1 / 8))


def test_aggregation_selects_attained_age(female_ctx):
    view = AggregationView(female_ctx)
    for x, k in [(20, 0), (30, 15), (50, 20), (99, 0)]:
        assert view.select(x, k) is assemble(female_ctx, x + k)


def test_projection_starts_healthy(ctx):
    traj = trajectory(ctx, 40, 30)
    assert traj.at(0).tolist() == [1.0, 0, 0, 0, 0, 0, 0, 0]
    assert traj.vectors.shape == (31, 8)
    np.testing.assert_allclose(traj.vectors.sum(axis=1), 1.0, rtol=0, atol=1e-12)


def test_projection_matches_matrix_products(ctx):
    traj = trajectory(ctx, 50, 12)
    product = reduce(np.matmul, traj.matrices)
    np.testing.assert_allclose(traj.at(12), product[0], rtol=0, atol=1e-14)
    # Chapman-Kolmogorov: splitting the horizon gives the same answer.
    first = reduce(np.matmul, traj.matrices[:5])
    second = reduce(np.matmul, traj.matrices[5:])
    np.testing.assert_allclose(first @ second, product, rtol=0, atol=1e-14)


def test_absorbed_mass_never_decreases(ctx):
    traj = trajectory(ctx, 20, 80)
    absorbed = traj.absorbed()
    assert np.all(np.diff(absorbed) >= -1e-15)
    assert absorbed[0] == 0.0
    assert traj.state_probability(80, 7) > traj.state_probability(80, 8) > 0


def test_reflex_states_hold_only_last_years_arrivals(male_ctx):
    traj = trajectory(male_ctx, 45, 10)
    for k in range(10):
        mass = traj.transition_mass(k)
        assert traj.state_probability(k + 1, 4) == pytest.approx(mass[2, 3], abs=1e-15)
        assert traj.state_probability(k + 1, 6) == pytest.approx(mass[4, 5], abs=1e-15)


def test_projection_domain_is_enforced(male_ctx):
    assert trajectory(male_ctx, 80, 20).term == 20
    with pytest.raises(ProjectionError, match="supported domain"):
        trajectory(male_ctx, 81, 20)
    with pytest.raises(ProjectionError, match="supported domain"):
        trajectory(male_ctx, 19, 5)
    with pytest.raises(ProjectionError, match="nonnegative"):
        trajectory(male_ctx, 30, -1)


def test_custom_initial_distribution(female_ctx):
    p0 = [0.0, 1.0, 0, 0, 0, 0, 0, 0]
    traj = trajectory(female_ctx, 60, 3, p0=p0)
    q22, q23, q27 = (assemble(female_ctx, 60).q(2, j) for j in (2, 3, 7))
    assert traj.at(1)[[1, 2, 6]].tolist() == pytest.approx([q22, q23, q27])
    with pytest.raises(ProjectionError, match="probability vector"):
        trajectory(female_ctx, 60, 3, p0=[0.5] * 8)


def test_hand_built_chain():
    q = np.zeros((8, 8))
    q[0, [0, 1, 2, 6]] = [0.7, 0.1, 0.1, 0.1]
    q[1, [1, 2, 6]] = [0.5, 0.3, 0.2]
    q[2, [3, 7]] = [0.5, 0.5]
    q[3, [4, 7]] = [0.5, 0.5]
    q[4, [5, 7]] = [0.5, 0.5]
    q[5, 7] = 1.0
    q[6, 6] = q[7, 7] = 1.0
    traj = trajectory_from_matrices([q, q], entry_age=50)
    assert traj.at(1).tolist() == pytest.approx([0.7, 0.1, 0.1, 0, 0, 0, 0.1, 0])
    assert traj.at(2)[2] == pytest.approx(0.7 * 0.1 + 0.1 * 0.3)
    assert traj.at(2)[3] == pytest.approx(0.05)
    frame = traj.to_frame()
    assert list(frame.columns) == ["k", "age", *[f"p{s}" for s in range(1, 9)]]


def test_matrices_frame_lists_allowed_entries(male_ctx):
    traj = trajectory(male_ctx, 30, 2)
    frame = matrices_frame(traj.matrices, 30)
    assert len(frame) == 2 * int(CII_MODEL.mask().sum())
    row = frame[(frame["k"] == 1) & (frame["i"] == 3) & (frame["j"] == 8)]
    assert row["value"].item() == pytest.approx(0.768485, abs=1e-5)
    assert row["age"].item() == 31


def test_idtable_conserves_radix_and_recurrence(ctx):
    table = synthesize_idtable(ctx, radix=100_000)
    assert table.ages == range(20, 101)
    assert table.lives_of(1)[0] == 100_000
    assert table.recurrence_residual() < 1e-9
    assert table.conservation_residual() < 1e-8
    # Lives in the last metastatic state are exactly last year's arrivals.
    np.testing.assert_allclose(
        table.lives_of(6)[1:], table.moves(5, 6), rtol=0, atol=1e-12
    )


def test_idtable_round_trip(ctx):
    table = synthesize_idtable(ctx)
    matrices = AggregationView(ctx).sequence(20, 80)
    assert round_trip_error(table, matrices) < 1e-9
    recovered = recover_probabilities(table)
    assert set(recovered) == {
        *CII_MODEL.transitions,
        *((s, s) for s in range(1, 7)),
    }
    # Nobody has cancer at the radix age, so the first entry is undefined.
    assert np.isnan(recovered[2, 2][0])
    np.testing.assert_allclose(
        recovered[1, 2], [m[0, 1] for m in matrices], rtol=1e-12, atol=0
    )


def test_idtable_frame(male_ctx):
    table = synthesize_idtable(male_ctx, radix=1000, start_age=60, end_age=65)
    frame = table.to_frame()
    assert frame.columns[:9].tolist() == ["age", *[f"l{s}" for s in range(1, 9)]]
    assert "d68" in frame.columns
    assert frame["d12"].isna().tolist() == [False] * 5 + [True]
    rounded = table.to_frame(rounded=True)
    assert rounded["l1"].iloc[0] == 1000
    assert str(rounded["d12"].dtype) == "Int64"


def test_idtable_rejects_bad_ranges(male_ctx):
    with pytest.raises(ProjectionError):
        synthesize_idtable(male_ctx, start_age=50, end_age=40)
    with pytest.raises(ProjectionError, match="radix"):
        synthesize_from_matrices([], radix=0, first_age=20)


def test_zero_term_and_first_step(male_ctx):
    empty = trajectory(male_ctx, 35, 0)
    assert empty.vectors.shape == (1, 8)
    assert empty.absorbed().tolist() == [0.0]
    one = trajectory(male_ctx, 35, 1)
    assert one.state_probability(1, 2) == pytest.approx(q12(male_ctx, 35), rel=1e-15)
