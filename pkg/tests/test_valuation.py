"""Contract valuation checked against brute-force path enumeration."""

import itertools
import json
import logging

import numpy as np
import pytest

from src.engine import AggregationView, trajectory, trajectory_from_matrices
from src.valuation import (
    ContractSpec,
    ValuationError,
    cashflow_schedule,
    epv_benefits,
    load_contract,
    net_premium,
    premium_annuity,
    reserve,
    viatical_value,
)

LIVING = (1, 2, 3, 4, 5, 6)


def _payment(spec: ContractSpec, i: int, j: int) -> float:
    """End-of-year benefit for one move, written out case by case."""
    paid = 0.0
    if i in (1, 2) and j == 3:
        paid += spec.death_benefit * spec.acceleration
        if spec.acceleration == 0 and spec.design == "lump_sum":
            paid += spec.disease_benefit
    if (i, j) == (1, 2):
        paid += spec.early_diagnosis_benefit
    if i in (1, 2) and j == 7:
        paid += spec.death_benefit
    if i in (3, 4, 5, 6) and j == 8:
        paid += spec.death_benefit * (1 - spec.acceleration)
    if i in (3, 4, 5, 6):
        paid += spec.annuity_rates.get(i, 0.0)
    return paid


def _enumerate(spec, matrices, start, k0, premium):
    """(benefit EPV, premium count EPV) from state ``start`` at duration k0."""
    v = spec.discount_factor
    benefits = premiums = 0.0
    for path in itertools.product(range(1, 9), repeat=spec.term - k0):
        states = (start, *path)
        prob = 1.0
        for k, (i, j) in enumerate(itertools.pairwise(states), start=k0):
            prob *= matrices[k][i - 1, j - 1]
        if prob == 0.0:
            continue
        for k, (i, j) in enumerate(itertools.pairwise(states), start=k0):
            benefits += prob * v ** (k + 1) * _payment(spec, i, j)
            due = spec.premium_mode == "level" or k == 0
            if due and i in spec.premium_states:
                premiums += prob * v**k * premium
    return benefits, premiums


def _oracle(spec, traj, premium=1.0):
    benefits = premiums = 0.0
    for state, weight in zip(range(1, 9), traj.at(0), strict=True):
        if weight:
            b, p = _enumerate(spec, traj.matrices, state, 0, premium)
            benefits += weight * b
            premiums += weight * p
    return benefits, premiums


@pytest.fixture(scope="module")
def short_chain(male_ctx):
    """Three real male matrices started from a mixed population."""
    matrices = AggregationView(male_ctx).sequence(60, 3)
    p0 = [0.6, 0.2, 0.1, 0.05, 0.03, 0.02, 0.0, 0.0]
    return trajectory_from_matrices(matrices, 60, "male", p0)


CONTRACTS = {
    "accelerated": {"death_benefit": 1000.0, "acceleration": 0.3},
    "stand_alone": {
        "death_benefit": 1000.0,
        "disease_benefit": 500.0,
        "early_diagnosis_benefit": 50.0,
        "discount_factor": 0.97,
    },
    "annuity": {
        "death_benefit": 800.0,
        "acceleration": 0.5,
        "design": "annuity",
        "annuity_rates": {3: 100.0, 4: 200.0, 5: 300.0, 6: 400.0},
        "discount_factor": 0.95,
        "premium_states": (1, 2, 3),
    },
    "single": {
        "death_benefit": 1000.0,
        "premium_mode": "single",
        "discount_factor": 0.9,
    },
}


@pytest.fixture(params=sorted(CONTRACTS))
def spec(request):
    return ContractSpec("male", 60, 3, **CONTRACTS[request.param])


def test_epv_and_premium_match_enumeration(spec, short_chain):
    benefits, premiums = _oracle(spec, short_chain)
    assert epv_benefits(spec, short_chain) == pytest.approx(
        benefits, abs=1e-12, rel=1e-13
    )
    assert premium_annuity(spec, short_chain) == pytest.approx(premiums, abs=1e-12)
    assert net_premium(spec, short_chain) == pytest.approx(
        benefits / premiums, rel=1e-12
    )


def test_reserves_match_enumeration(spec, short_chain):
    premium = net_premium(spec, short_chain)
    for k in range(spec.term):
        for state in LIVING:
            b, p = _enumerate(spec, short_chain.matrices, state, k, premium)
            # Enumeration discounts to time 0; reserves are valued at k.
            expected = (b - p) / spec.discount_factor**k
            got = reserve(spec, short_chain, k, state, premium)
            assert got == pytest.approx(expected, abs=1e-10, rel=1e-12)


def test_reserve_is_zero_at_issue_and_expiry(ctx):
    spec = ContractSpec(
        ctx.sex, 40, 25, death_benefit=1.0, acceleration=0.4, discount_factor=0.96
    )
    traj = trajectory(ctx, 40, 25)
    assert reserve(spec, traj, 0, 1) == pytest.approx(0.0, abs=1e-10)
    for state in LIVING:
        assert reserve(spec, traj, 25, state) == 0.0
    assert reserve(spec, traj, 10, 2) > reserve(spec, traj, 10, 1)


def test_single_premium_equals_epv(female_ctx):
    spec = ContractSpec("female", 50, 10, death_benefit=1.0, premium_mode="single")
    traj = trajectory(female_ctx, 50, 10)
    assert net_premium(spec, traj) == pytest.approx(
        epv_benefits(spec, traj), abs=1e-15
    )


def test_level_premium_one_year_undiscounted(male_ctx):
    spec = ContractSpec("male", 45, 1, death_benefit=1.0)
    traj = trajectory(male_ctx, 45, 1)
    assert net_premium(spec, traj) == pytest.approx(epv_benefits(spec, traj))


def test_undiscounted_death_cover_is_absorption(male_ctx):
    spec = ContractSpec("male", 55, 20, death_benefit=1.0)
    traj = trajectory(male_ctx, 55, 20)
    assert epv_benefits(spec, traj) == pytest.approx(traj.absorbed()[-1], abs=1e-12)


def test_epv_is_linear_in_benefit_amounts(female_ctx):
    traj = trajectory(female_ctx, 50, 15)
    base = ContractSpec(
        "female", 50, 15, death_benefit=3.0, disease_benefit=2.0, discount_factor=0.95
    )
    doubled = ContractSpec(
        "female", 50, 15, death_benefit=6.0, disease_benefit=4.0, discount_factor=0.95
    )
    assert epv_benefits(doubled, traj) == pytest.approx(2 * epv_benefits(base, traj))


def test_epv_is_linear_in_acceleration(male_ctx):
    traj = trajectory(male_ctx, 50, 15)

    def epv(acceleration: float) -> float:
        spec = ContractSpec(
            "male",
            50,
            15,
            death_benefit=1.0,
            acceleration=acceleration,
            discount_factor=0.97,
        )
        return epv_benefits(spec, traj)

    values = [epv(a) for a in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert np.diff(values, n=2) == pytest.approx(np.zeros(3), abs=1e-14)


def test_epv_nondecreasing_in_discount_factor(male_ctx):
    traj = trajectory(male_ctx, 30, 30)
    values = [
        epv_benefits(
            ContractSpec("male", 30, 30, death_benefit=1.0, discount_factor=v), traj
        )
        for v in (0.8, 0.9, 0.95, 1.0)
    ]
    assert values == sorted(values)


def test_viatical_state_three_is_certain_death(male_ctx):
    spec = ContractSpec("male", 70, 10, death_benefit=1.0)
    traj = trajectory(male_ctx, 70, 10)
    quote = viatical_value(spec, traj, 3, 0, purchase_fraction=0.6)
    assert quote.value == pytest.approx(1.0, abs=1e-12)
    assert quote.price == pytest.approx(0.6, abs=1e-12)
    assert quote.viable


def test_viatical_state_six_pays_next_year(male_ctx):
    spec = ContractSpec(
        "male", 60, 5, death_benefit=100.0, discount_factor=0.9, premium_states=LIVING
    )
    traj = trajectory(male_ctx, 60, 5)
    quote = viatical_value(spec, traj, 6, 2, purchase_fraction=0.5, premium=10.0)
    assert quote.value == pytest.approx(0.9 * 100.0 - 10.0)
    assert quote.price == pytest.approx(0.5 * quote.value)


def test_viatical_reports_nonpositive_value(male_ctx, caplog):
    spec = ContractSpec("male", 60, 5, death_benefit=1.0, premium_states=LIVING)
    traj = trajectory(male_ctx, 60, 5)
    with caplog.at_level(logging.WARNING):
        quote = viatical_value(spec, traj, 4, 0, purchase_fraction=0.5, premium=5.0)
    assert quote.value < 0
    assert not quote.viable
    assert "not positive" in caplog.text


def test_viatical_rejects_bad_arguments(male_ctx):
    spec = ContractSpec("male", 60, 5, death_benefit=1.0)
    traj = trajectory(male_ctx, 60, 5)
    with pytest.raises(ValuationError, match="metastatic"):
        viatical_value(spec, traj, 2, 0, purchase_fraction=0.5)
    with pytest.raises(ValuationError, match="purchase fraction"):
        viatical_value(spec, traj, 3, 0, purchase_fraction=1.0)


def test_cashflow_schedule_adds_up(short_chain):
    spec = ContractSpec("male", 60, 3, **CONTRACTS["annuity"])
    premium = net_premium(spec, short_chain)
    schedule = cashflow_schedule(spec, short_chain, premium)
    assert schedule.discounted_benefits.sum() == pytest.approx(
        epv_benefits(spec, short_chain)
    )
    assert schedule.discounted_premiums.sum() == pytest.approx(
        schedule.discounted_benefits.sum()
    )
    frame = schedule.to_frame()
    assert frame["age"].tolist() == [60, 61, 62]
    assert (frame.drop(columns=["k", "age"]) >= 0).all().all()


def test_contract_validation():
    with pytest.raises(ValuationError, match="acceleration"):
        ContractSpec("male", 40, 10, death_benefit=1.0, acceleration=1.5)
    with pytest.raises(ValuationError, match="discount factor"):
        ContractSpec("male", 40, 10, death_benefit=1.0, discount_factor=0.0)
    with pytest.raises(ValuationError, match="replaces the disease lump sum"):
        ContractSpec(
            "male", 40, 10, death_benefit=1.0, disease_benefit=1.0, design="annuity"
        )
    with pytest.raises(ValuationError, match="lump-sum design"):
        ContractSpec("male", 40, 10, death_benefit=1.0, annuity_rates={3: 1.0})
    with pytest.raises(ValuationError, match="supported ages"):
        ContractSpec("male", 90, 11, death_benefit=1.0)
    with pytest.raises(ValuationError, match="living states"):
        ContractSpec("male", 40, 10, death_benefit=1.0, premium_states=(7,))


def test_mismatched_trajectory_and_absorbing_reserve(male_ctx, female_ctx):
    spec = ContractSpec("male", 40, 5, death_benefit=1.0)
    with pytest.raises(ValuationError, match="contract covers"):
        epv_benefits(spec, trajectory(male_ctx, 40, 6))
    with pytest.raises(ValuationError, match="female trajectory"):
        epv_benefits(spec, trajectory(female_ctx, 40, 5))
    with pytest.raises(ValuationError, match="absorbing"):
        reserve(spec, trajectory(male_ctx, 40, 5), 1, 7)


def test_reserve_in_last_metastatic_state(female_ctx):
    spec = ContractSpec(
        "female", 50, 10, death_benefit=100.0, acceleration=0.3, discount_factor=0.95
    )
    traj = trajectory(female_ctx, 50, 10)
    # Death follows within the year and pays the unaccelerated remainder.
    for k in (0, 4, 9):
        assert reserve(spec, traj, k, 6) == pytest.approx(0.95 * 100.0 * 0.7)


def test_zero_premium_annuity_is_an_error(male_ctx):
    spec = ContractSpec("male", 40, 1, death_benefit=1.0, premium_states=(2,))
    with pytest.raises(ValuationError, match="annuity factor"):
        net_premium(spec, trajectory(male_ctx, 40, 1))


def test_load_contract(tmp_path):
    path = tmp_path / "contract.json"
    path.write_text(
        json.dumps(
            {
                "sex": "female",
                "entry_age": 45,
                "term": 20,
                "death_benefit": 1000,
                "design": "annuity",
                "annuity_rates": {"3": 50, "6": 10},
            }
        )
    )
    spec = load_contract(path)
    assert spec.annuity_rate(3) == 50.0
    assert spec.annuity_rate(4) == 0.0
    assert spec.to_dict()["annuity_rates"] == {"3": 50.0, "6": 10.0}

    path.write_text(json.dumps({"sex": "female", "bonus": 1}))
    with pytest.raises(ValuationError, match="unknown contract fields"):
        load_contract(path)
