import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from cspoly.polytopes import ManyFacesSpec, NeighborlySpec
from cspoly.recovery import (CodeInstance, CorruptionModel, build_code, code_from_generator,
                             face_condition_subset, l1_decode, random_gaussian_code,
                             recovery_trial, representatives, run_campaign)

from conftest import instance

seeds = st.integers(0, 2**32 - 1)


def _code(spec):
    return build_code(instance(spec))


def test_code_dimensions():
    assert _code(NeighborlySpec(0)).summary() == {"length": 6, "redundancy": 6, "kernel_dim": 0,
                                                  "degenerate": True}
    assert (_code(NeighborlySpec(1)).length, _code(NeighborlySpec(1)).redundancy,
            _code(NeighborlySpec(1)).kernel_dim) == (18, 10, 8)
    code = _code(ManyFacesSpec(2, 1, 24))
    assert (code.length, code.redundancy, code.kernel_dim) == (60, 22, 38)


@pytest.mark.parametrize("spec", [NeighborlySpec(1), ManyFacesSpec(2, 1, 24)])
def test_kernel_is_annihilated_by_generator(spec):
    code = _code(spec)
    assert np.abs(code.generator @ code.kernel).max() <= 1e-9
    np.testing.assert_allclose(code.kernel.T @ code.kernel, np.eye(code.kernel_dim), atol=1e-10)


def test_representatives_split_antipodal_pairs(p1):
    reps = representatives(p1)
    assert len(reps) == 18
    assert set(reps).isdisjoint(int(p1.antipodal[r]) for r in reps)


def test_decode_of_codeword_is_itself(p1):
    code = build_code(p1)
    c = code.kernel @ np.arange(1.0, code.kernel_dim + 1)
    out = l1_decode(code, c)
    np.testing.assert_allclose(out.x, c, atol=1e-9)
    assert out.objective == pytest.approx(0.0, abs=1e-9)


def test_decode_of_zero_is_zero(p1):
    out = l1_decode(build_code(p1), np.zeros(18))
    np.testing.assert_array_equal(out.x, np.zeros(18))


def test_decode_rejects_wrong_length(p1):
    with pytest.raises(ValueError):
        l1_decode(build_code(p1), np.zeros(17))


def test_degenerate_code_decodes_to_zero(p0):
    out = l1_decode(build_code(p0), np.ones(6))
    np.testing.assert_array_equal(out.x, np.zeros(6))
    assert out.objective == 6.0


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_decode_optimum_matches_highs_absolute_value_form(seed):
    code = random_gaussian_code(12, 5, seed=seed % 1000)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(12)
    K, M, r = code.kernel, code.length, code.kernel_dim
    # min sum(u) s.t. -u <= K z - a <= u
    A_ub = np.block([[K, -np.eye(M)], [-K, -np.eye(M)]])
    b_ub = np.concatenate([a, -a])
    ref = linprog(np.concatenate([np.zeros(r), np.ones(M)]), A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None)] * r + [(0, None)] * M, method="highs")
    out = l1_decode(code, a)
    assert out.objective == pytest.approx(ref.fun, rel=1e-7, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_decoded_word_is_a_codeword_no_farther_than_any_sampled_codeword(seed):
    code = build_code(instance(NeighborlySpec(1)))
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(code.length)
    out = l1_decode(code, a)
    assert np.abs(code.generator @ out.x).max() <= 1e-8
    for _ in range(20):
        c = code.kernel @ rng.standard_normal(code.kernel_dim)
        assert out.objective <= np.abs(c - a).sum() + 1e-9


def test_zero_errors_always_recovered(p1):
    camp = run_campaign(build_code(p1), CorruptionModel(0), p1, trials=10)
    assert camp.recovered == 10
    assert camp.face_true == 10


def test_neighborly_two_errors_recovered(p1):
    camp = run_campaign(build_code(p1), CorruptionModel(2, seed=3), p1, trials=100)
    assert camp.recovered == 100
    assert camp.inconsistent == 0
    assert camp.status == "PASS"


def test_many_faces_mixed_outcomes_keep_implication(many_faces):
    camp = run_campaign(build_code(many_faces), CorruptionModel(6, seed=0), many_faces, trials=100)
    assert 0 < camp.recovered < 100
    assert camp.face_false > 0
    assert camp.inconsistent == 0
    assert camp.face_unknown == 0


def test_degenerate_code_trials_are_skipped(p0):
    camp = run_campaign(build_code(p0), CorruptionModel(1), p0, trials=5)
    assert camp.skipped == 5
    assert camp.status == "DEGENERATE"


def test_trials_are_deterministic_and_order_independent(p1):
    code = build_code(p1)
    model = CorruptionModel(2, seed=9, magnitude_range=(0.5, 2.0))
    a = run_campaign(code, model, p1, trials=8).to_dict(with_trials=True)
    b = [recovery_trial(code, model, p1, t).to_dict() for t in reversed(range(8))][::-1]
    assert a["results"] == b


def test_fixed_signs(p1):
    res = recovery_trial(build_code(p1), CorruptionModel(3, signs="fixed"), p1, 0)
    assert res.signs == [1, 1, 1]


def test_face_condition_subset_uses_representative_or_antipode(p1):
    code = build_code(p1)
    c = np.zeros(18)
    a = np.zeros(18)
    a[0], a[1] = -1.0, 1.0
    rep0, rep1 = code.representatives[0], code.representatives[1]
    assert face_condition_subset(code, p1, c, a) == sorted([rep0, int(p1.antipodal[rep1])])


@pytest.mark.parametrize("kwargs", [dict(k=-1), dict(k=1, signs="other"), dict(k=1, magnitude=0.0),
                                    dict(k=1, magnitude_range=(2.0, 1.0))])
def test_corruption_model_validation(kwargs):
    with pytest.raises(ValueError):
        CorruptionModel(**kwargs)


def test_too_many_errors_rejected(p1):
    with pytest.raises(ValueError):
        recovery_trial(build_code(p1), CorruptionModel(19), p1, 0)


def test_gaussian_baseline():
    code = random_gaussian_code(60, 22, seed=1)
    assert (code.length, code.redundancy, code.kernel_dim) == (60, 22, 38)
    camp = run_campaign(code, CorruptionModel(2), None, trials=20)
    assert camp.face_unknown == 20
    assert camp.inconsistent == 0
    with pytest.raises(ValueError):
        random_gaussian_code(5, 6)


def test_code_from_generator_default_representatives():
    code = code_from_generator(np.ones((1, 3)))
    assert isinstance(code, CodeInstance)
    assert code.representatives == (0, 1, 2)
    assert code.kernel_dim == 2
