from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from braidjones.braid import BraidWord, close, orient_and_writhe
from braidjones.bracket import jones_value
from braidjones.estimators import (
    EstimatorConfig,
    approx_jones_plat,
    approx_jones_trace,
    block_probabilities,
    branch_probability,
    exact_reference,
    hadamard_test,
    path_probabilities,
    plan_samples,
    sample_weighted_path,
)
from braidjones.laurent import lp_eval, unit_A
from braidjones.path_model import (
    coefficient_table,
    enumerate_paths,
    normalization_N,
    path_counts,
    phi_braid,
    weighted_trace_Tr_n,
)
from braidjones.temperley_lieb import Tangle, jones_via_trace

from strategies import braids

TREFOIL = BraidWord(2, (1, 1, 1))


def philox(seed):
    return np.random.Generator(np.random.Philox(key=seed))


@pytest.mark.parametrize("eps, delta, count", [(1.0, 0.5, 5), (0.1, 0.01, 1199)])
def test_plan_samples(eps, delta, count):
    assert plan_samples(EstimatorConfig(eps, delta)) == count


def test_plan_samples_quadruples():
    for eps in (0.4, 0.2, 0.1, 0.05):
        small = plan_samples(EstimatorConfig(eps / 2, 0.01))
        assert small == pytest.approx(4 * plan_samples(EstimatorConfig(eps, 0.01)), rel=1e-3, abs=1)


@pytest.mark.parametrize("kwargs", [{"epsilon": 0}, {"epsilon": 1.5}, {"delta": 1}, {"mode": "fast"}, {"seed": -1}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        EstimatorConfig(**kwargs)


def test_two_path_probabilities():
    lam1, lam3 = math.sin(math.pi / 5), math.sin(3 * math.pi / 5)
    probs = path_probabilities(2, 5)
    assert probs == pytest.approx([lam1 / (lam1 + lam3), lam3 / (lam1 + lam3)])
    assert probs[0] == pytest.approx(0.3819660112501051)


def test_forced_path():
    rng = philox(3)
    assert {sample_weighted_path(4, 3, rng) for _ in range(20)} == {"1010"}


@pytest.mark.parametrize("n, k", [(n, k) for n in range(1, 8) for k in range(3, 8)])
def test_branch_probabilities_are_table_ratios(n, k):
    S = path_counts(n, k)
    for j in range(1, n + 1):
        for ell in range(1, k):
            if S[j][ell] == 0:
                continue
            p = branch_probability(n, k, j, ell)
            assert isinstance(p, Fraction)
            assert p == Fraction(S[j - 1][ell - 1], S[j][ell])


@pytest.mark.parametrize("n, k", [(n, k) for n in range(1, 8) for k in range(3, 8)])
def test_path_distribution_sums_to_one(n, k):
    probs = path_probabilities(n, k)
    assert probs.sum() == pytest.approx(1.0)
    blocks = block_probabilities(n, k)
    basis = enumerate_paths(n, k)
    for ell, idx in basis.blocks.items():
        assert blocks[ell] == pytest.approx(probs[list(idx)].sum())


def test_sampler_frequencies():
    n, k, draws = 6, 5, 100_000
    rng = philox(12345)
    basis = enumerate_paths(n, k)
    counts = {}
    for _ in range(draws):
        p = sample_weighted_path(n, k, rng)
        ell = basis.endpoints[basis.index[p]]
        counts[ell] = counts.get(ell, 0) + 1
    for ell, p in block_probabilities(n, k).items():
        sigma = math.sqrt(draws * p * (1 - p))
        assert abs(counts.get(ell, 0) - draws * p) <= 4 * sigma


def test_uniform_within_block():
    n, k, draws = 6, 5, 40_000
    rng = philox(99)
    basis = enumerate_paths(n, k)
    seen = {}
    for _ in range(draws):
        p = sample_weighted_path(n, k, rng)
        seen[p] = seen.get(p, 0) + 1
    probs = path_probabilities(n, k)
    for idx, p in enumerate(basis.paths):
        sigma = math.sqrt(draws * probs[idx] * (1 - probs[idx]))
        assert abs(seen.get(p, 0) - draws * probs[idx]) <= 4.5 * sigma


def test_hadamard_on_empty_braid():
    b = BraidWord(3, ())
    assert hadamard_test(b, "101", 5, "re") == 1.0
    assert hadamard_test(b, "101", 5, "im") == 0.0
    rng = philox(1)
    assert all(hadamard_test(b, "101", 5, "re", "sampled", rng) == 1.0 for _ in range(50))


def test_hadamard_single_crossing_value():
    A = unit_A(5)
    b = BraidWord(2, (1,))
    assert complex(hadamard_test(b, "11", 5, "re"), hadamard_test(b, "11", 5, "im")) == pytest.approx(1 / A)


def test_hadamard_rejects_inadmissible_path():
    with pytest.raises(ValueError):
        hadamard_test(BraidWord(2, (1,)), "11", 3)


@settings(max_examples=40, deadline=None)
@given(braids(max_strands=4, max_len=6), st.sampled_from((3, 5, 7)), st.data())
def test_inverse_word_conjugates_amplitude(b, k, data):
    basis = enumerate_paths(b.strands, k)
    p = data.draw(st.sampled_from(basis.paths))
    fwd = complex(hadamard_test(b, p, k, "re"), hadamard_test(b, p, k, "im"))
    back = complex(hadamard_test(b.inverse(), p, k, "re"), hadamard_test(b.inverse(), p, k, "im"))
    assert back == pytest.approx(fwd.conjugate(), abs=1e-12)


@pytest.mark.parametrize("n", range(2, 7))
def test_unbiased_mixture(n, rng):
    # exhaustive sum over paths of Pr(p) <p|phi(B)|p> reproduces Tr_n
    for k in (3, 5, 6):
        b = BraidWord(n, tuple(int(g) * int(s) for g, s in zip(rng.integers(1, n, 6), rng.choice((-1, 1), 6))))
        basis = enumerate_paths(n, k)
        probs = path_probabilities(n, k)
        diag = np.diag(phi_braid(b, k).to_dense())
        mix = complex(np.sum(probs * diag))
        assert mix == pytest.approx(weighted_trace_Tr_n(phi_braid(b, k)), abs=1e-10)
        assert len(diag) == len(basis)


def test_unknot_estimate():
    exact = approx_jones_trace(BraidWord(1, ()), 5, EstimatorConfig(mode="exact"))
    assert exact.estimate == 1
    sampled = approx_jones_trace(BraidWord(1, ()), 5, EstimatorConfig(seed=1))
    # every real-part sample is +1; imaginary-part samples are fair coins
    assert sampled.mean_re == 1.0
    assert abs(sampled.mean_im) <= 0.1


def test_trefoil_exact_mode():
    res = approx_jones_trace(TREFOIL, 5, EstimatorConfig(mode="exact"))
    assert res.samples == 0
    assert res.estimate == pytest.approx(jones_value(TREFOIL, "trace", 5), abs=1e-9)


def test_trefoil_sampled_mode():
    d = coefficient_table(5).d
    res = approx_jones_trace(TREFOIL, 5, EstimatorConfig(0.1, 0.01, seed=2024), with_reference=True)
    assert res.samples == 1199
    assert abs(res.estimate - res.reference) <= 0.1 * d
    assert res.error_bound == pytest.approx(0.1 * d)
    assert res.estimate == pytest.approx(res.rescale * res.r)


def test_seeded_runs_are_identical():
    cfg = EstimatorConfig(0.05, 0.01, seed=77)
    b = BraidWord(3, (1, -2, 1, 2))
    assert approx_jones_trace(b, 5, cfg) == approx_jones_trace(b, 5, cfg)
    assert approx_jones_plat(BraidWord(4, (2, 1)), 5, cfg) == approx_jones_plat(BraidWord(4, (2, 1)), 5, cfg)


def test_worker_count_does_not_change_result():
    b = BraidWord(4, (1, -2, 3, 2))
    serial = approx_jones_trace(b, 7, EstimatorConfig(0.03, 0.01, seed=5))
    threaded = approx_jones_trace(b, 7, EstimatorConfig(0.03, 0.01, seed=5, workers=4))
    assert serial.samples > 4096
    assert serial == threaded


def test_different_seeds_differ():
    b = BraidWord(3, (1, -2, 1))
    one = approx_jones_trace(b, 5, EstimatorConfig(seed=1))
    two = approx_jones_trace(b, 5, EstimatorConfig(seed=2))
    assert one.r != two.r


def test_unseeded_run_records_its_seed():
    res = approx_jones_trace(BraidWord(2, (1,)), 5, EstimatorConfig())
    assert res.seed is not None
    again = approx_jones_trace(BraidWord(2, (1,)), 5, EstimatorConfig(seed=res.seed))
    assert again.r == res.r


def test_plat_empty_two_strands():
    for mode in ("exact", "sampled"):
        res = approx_jones_plat(BraidWord(2, ()), 5, EstimatorConfig(seed=3, mode=mode))
        assert res.mean_re == 1.0
        assert abs(res.estimate - 1.0) <= res.error_bound
    exact = approx_jones_plat(BraidWord(2, ()), 5, EstimatorConfig(mode="exact"))
    assert exact.estimate == pytest.approx(1.0, abs=1e-12)


def test_plat_exact_mode_single_crossing():
    b = BraidWord(4, (2,))
    res = approx_jones_plat(b, 5, EstimatorConfig(mode="exact"))
    assert res.estimate == pytest.approx(jones_value(b, "plat", 5), abs=1e-9)


def test_plat_rejects_odd_strands():
    with pytest.raises(ValueError):
        approx_jones_plat(BraidWord(3, (1,)), 5, EstimatorConfig(mode="exact"))


def test_plat_bound_constant():
    tab = coefficient_table(5)
    res = approx_jones_plat(BraidWord(4, (2,)), 5, EstimatorConfig(mode="exact"))
    bound = 0.1 * tab.d ** 5 * tab.lam[1] / normalization_N(4, 5)
    assert res.error_bound == pytest.approx(bound)
    assert bound <= 0.1 * tab.d ** 6 / normalization_N(4, 5)


@settings(max_examples=40, deadline=None)
@given(braids(max_strands=4, max_len=8), st.sampled_from((3, 4, 5, 7, 10)))
def test_exact_reference_matches_state_sum(b, k):
    assert exact_reference(b, k) == pytest.approx(jones_value(b, "trace", k), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(braids(min_strands=2, max_strands=4, max_len=6), st.sampled_from((3, 4, 5, 7)))
def test_plat_reference_matches_state_sum(b, k):
    if b.strands % 2:
        b = BraidWord(b.strands + 1, b.word)
    expected = jones_value(b, "plat", k)
    assert exact_reference(b, k, "plat") == pytest.approx(expected, abs=1e-9)
    assert approx_jones_plat(b, k, EstimatorConfig(mode="exact")).estimate == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_unlink_reference(n):
    d = coefficient_table(5).d
    assert exact_reference(BraidWord(n, ()), 5) == pytest.approx(d ** (n - 1))


def test_conjugation_keeps_reference():
    b = BraidWord(3, (1, 1, -2))
    assert exact_reference(BraidWord(3, (2,) + b.word + (-2,)), 7) == pytest.approx(exact_reference(b, 7), abs=1e-12)


@pytest.mark.parametrize("word", [(), (2,), (1, 2, -3), (2, 2, 1, -3, 2)])
def test_plat_agrees_with_capcup_tangle(word):
    b, k = BraidWord(4, word), 5
    _, w = orient_and_writhe(close(b, "plat"))
    tangle = Tangle(4, Tangle.from_braid(b).letters + (("C", 1), ("C", 3)))
    expected = lp_eval(jones_via_trace(tangle, w), unit_A(k))
    assert approx_jones_plat(b, k, EstimatorConfig(mode="exact")).estimate == pytest.approx(expected, abs=1e-9)


def test_result_dict_has_parts():
    res = approx_jones_trace(TREFOIL, 5, EstimatorConfig(seed=4))
    doc = res.to_dict()
    assert list(doc)[:6] == ["closure", "n", "k", "mode", "estimate", "samples"]
    assert doc["mean_re"] == res.mean_re and doc["mean_im"] == res.mean_im
