"""Binomial catalyst construction, the two conversion searches, and output mixing."""

import math

import numpy as np
import pytest

from majorize import (
    DimensionMismatchError,
    Experiment,
    InvalidDataError,
    NormMismatchError,
    ParameterError,
    SearchKind,
    box_times,
    build_catalyst,
    catalyst_blocks,
    find_catalytic_n,
    find_large_sample_n,
    is_dichotomy,
    majorizes,
    perturb_output,
    tensor_power,
)
from support import interior_stochastic, random_experiment

RESIDUAL_TOLERANCE = 1e-9


def pair_and_image(rng):
    p = random_experiment(rng, 3, 2, "dichotomy")
    t = interior_stochastic(rng, p.n_rows, p.n_rows)
    return p, Experiment.from_matrix(t @ p.matrix)


# -- catalyst construction --------------------------------------------------------


def test_zero_exponent_catalyst_is_trivial():
    p = Experiment(([0.5, 0.5], [0.25, 0.75]))
    r = build_catalyst(p, p, 0)
    assert r.n_rows == 1
    assert np.allclose(r.matrix, 1.0)


def test_blocks_are_binomial_words(rng):
    p, q = pair_and_image(rng)
    n = 2
    blocks = catalyst_blocks(p, q, n)
    assert len(blocks) == n + 1
    for l, block in enumerate(blocks):
        assert block.shape[0] == q.n_rows**l * p.n_rows ** (n - l)
        word = np.ones((1, 2))
        for _ in range(l):
            word = (word[:, None, :] * q.matrix[None, :, :]).reshape(-1, 2)
        for _ in range(n - l):
            word = (word[:, None, :] * p.matrix[None, :, :]).reshape(-1, 2)
        assert np.allclose(block, word / (n + 1), atol=1e-15)


def test_catalyst_columns_stay_normalized(rng):
    for n in (0, 1, 3):
        p, q = pair_and_image(rng)
        r = build_catalyst(p, q, n)
        assert r.has_unit_columns()


def test_catalyst_of_dichotomies_is_a_dichotomy(rng):
    p, q = pair_and_image(rng)
    r = build_catalyst(p, q, 2)
    assert is_dichotomy(r)


def test_catalyst_input_validation():
    p = Experiment(([0.5, 0.5], [0.25, 0.75]))
    heavy = Experiment.from_matrix(2.0 * p.matrix)
    with pytest.raises(NormMismatchError):
        build_catalyst(p, heavy, 1)
    wide = Experiment(([0.5, 0.5], [0.25, 0.75], [0.1, 0.9]))
    with pytest.raises(DimensionMismatchError):
        build_catalyst(p, wide, 1)
    with pytest.raises(ParameterError):
        catalyst_blocks(p, p, -1)


# -- searches -----------------------------------------------------------------------


def test_exact_conversion_found_at_the_first_probe(rng):
    p, q = pair_and_image(rng)
    found = find_large_sample_n(p, q)
    assert found.kind is SearchKind.LARGE_SAMPLE
    assert found.n_found == 1 and not found.capped
    t = found.witness.entries
    assert np.abs(t @ p.matrix - q.matrix).max() <= RESIDUAL_TOLERANCE

    cat = find_catalytic_n(p, q)
    assert cat.kind is SearchKind.CATALYTIC
    assert cat.n_found == 0  # the trivial catalyst reproduces the exact check


def test_search_failure_reports_the_range_checked():
    # a proper-support source can never be reached from a full-support one,
    # at any power and with any catalyst
    p = Experiment(([0.6, 0.4], [0.3, 0.7]))
    q = Experiment(([1.0, 0.0], [0.3, 0.7]))
    missing = find_large_sample_n(p, q, n_max=3)
    assert missing.n_found is None and missing.witness is None
    assert missing.checked_up_to == 3 and not missing.capped
    cat = find_catalytic_n(p, q, n_max=2)
    assert cat.n_found is None and cat.checked_up_to == 2


def test_row_cap_yields_a_partial_result(rng):
    p, q = pair_and_image(rng)
    capped = find_large_sample_n(q, p, n_max=8, row_cap=30)
    assert capped.capped
    assert capped.n_found is None
    assert capped.checked_up_to == 3  # 3 rows: n = 4 would need 81 > 30
    assert "cap" in capped.note


def test_search_parameter_validation(rng):
    p, q = pair_and_image(rng)
    with pytest.raises(ParameterError):
        find_large_sample_n(p, q, n_max=0)
    with pytest.raises(ParameterError):
        find_catalytic_n(p, q, n_max=-1)
    heavy = Experiment.from_matrix(2.0 * p.matrix)
    with pytest.raises(NormMismatchError):
        find_large_sample_n(p, heavy)


def test_catalytic_witness_acts_on_the_product(rng):
    p, q = pair_and_image(rng)
    result = find_catalytic_n(p, q, n_max=2)
    assert result.n_found is not None
    r = build_catalyst(p, q, result.n_found)
    left = box_times(r, p)
    right = box_times(r, q)
    residual = np.abs(result.witness.entries @ left.matrix - right.matrix).max()
    assert residual <= RESIDUAL_TOLERANCE


def test_large_sample_feasibility_is_monotone_in_n(rng):
    """Once the n-th powers convert, every larger power converts too."""
    p, q = pair_and_image(rng)
    assert majorizes(p, q).feasible
    for n in (2, 3):
        assert majorizes(tensor_power(p, n), tensor_power(q, n)).feasible


# -- output perturbation ---------------------------------------------------------------


def test_default_anchor_gives_interior_columns(rng):
    q = random_experiment(rng, 4, 2, "dichotomy")
    for eps in (0.05, 0.5, 2.0):
        mixed = perturb_output(q, eps)
        assert (mixed.matrix > 0.0).all()
        shift = np.abs(mixed.matrix - q.matrix).sum(axis=0)
        assert (shift <= eps + 1e-12).all()
        assert mixed.has_unit_columns()


def test_column_anchor_is_copied_exactly(rng):
    q = random_experiment(rng, 4, 2, "dichotomy")
    anchored = perturb_output(q, 0.1, anchor=q.column(1))
    assert np.array_equal(anchored.column(1), q.column(1))
    assert not np.array_equal(anchored.column(0), q.column(0))


def test_perturbation_shrinks_with_epsilon(rng):
    q = random_experiment(rng, 4, 2, "dichotomy")
    gaps = [
        np.abs(perturb_output(q, eps).matrix - q.matrix).max()
        for eps in (0.4, 0.2, 0.1)
    ]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] > 0.0


def test_anchor_validation(rng):
    q = random_experiment(rng, 4, 2, "dichotomy")
    n = q.n_rows
    with pytest.raises(ParameterError):
        perturb_output(q, 0.0)
    with pytest.raises(ParameterError):
        perturb_output(q, 2.5)
    with pytest.raises(DimensionMismatchError):
        perturb_output(q, 0.1, anchor=np.full(n + 1, 1.0 / (n + 1)))
    with pytest.raises(NormMismatchError):
        perturb_output(q, 0.1, anchor=np.full(n, 1.0))
    bad = np.full(n, 1.0 / n)
    bad[0] = -bad[0]
    bad[1] += 2.0 / n
    with pytest.raises(InvalidDataError):
        perturb_output(q, 0.1, anchor=bad)


def test_anchor_must_cover_every_support():
    q = Experiment(([0.5, 0.5, 0.0], [0.25, 0.25, 0.5]))
    thin = np.array([0.5, 0.5, 0.0])  # misses the second column's support
    with pytest.raises(InvalidDataError):
        perturb_output(q, 0.1, anchor=thin)
    wide = np.array([0.25, 0.5, 0.25])
    mixed = perturb_output(q, 0.1, anchor=wide)
    assert mixed.n_rows == 3


def test_perturbed_target_becomes_reachable(rng):
    """Mixing the target toward uniform turns nonstrict grid dominance into a
    strict one, which the exact certifier then confirms."""
    from majorize import Verdict, certify_dichotomy_exact

    p = Experiment(([0.5, 0.5, 0.0], [0.25, 0.25, 0.5]))
    report = certify_dichotomy_exact(p, p)
    assert report.verdict is Verdict.INCONCLUSIVE
    for eps in (0.05, 0.5):
        better = certify_dichotomy_exact(p, perturb_output(p, eps))
        assert better.verdict is Verdict.SUFFICIENT
