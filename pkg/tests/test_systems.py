import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poisson_krieger import (
    Kind, LSchedule, SpecError, SystemSpec, build_custom, build_type_ii_inf, build_type_iii0,
    build_type_iii1, build_type_iii_lambda, c_of_lambda, solve_c_inverse,
)
from poisson_krieger.systems import CellIndex, c_expanded, rationally_dependent

lam_open = st.floats(1e-3, 1e3, allow_nan=False).filter(lambda x: abs(x - 1) > 1e-9)


# -- c(lambda) ---------------------------------------------------------------

def test_c_known_values():
    assert c_of_lambda(1.0) == 0.0
    assert c_of_lambda(2.0) == pytest.approx(21 / 4, rel=1e-15)
    assert c_of_lambda(0.5) == pytest.approx(21 / 8, rel=1e-15)


def test_c_rejects_nonpositive():
    with pytest.raises((ValueError, SpecError)):
        c_of_lambda(0.0)
    with pytest.raises((ValueError, SpecError)):
        c_of_lambda(np.array([1.0, -2.0]))


@given(lam_open)
def test_c_factored_matches_expanded(lam):
    assert c_of_lambda(lam) == pytest.approx(c_expanded(lam), rel=1e-9, abs=1e-12)


@given(lam_open)
def test_c_reciprocity(lam):
    assert c_of_lambda(1 / lam) * lam == pytest.approx(c_of_lambda(lam), rel=1e-12)


@given(st.lists(lam_open, min_size=1, max_size=20))
def test_c_array_is_bitwise_scalar(xs):
    arr = c_of_lambda(np.array(xs))
    assert [float(v) for v in arr] == [c_of_lambda(x) for x in xs]


@given(st.floats(1e-6, 1e6))
def test_c_inverse_round_trip(t):
    lam = solve_c_inverse(t)
    assert 0 < lam < 1
    assert c_of_lambda(lam) == pytest.approx(t, rel=1e-10)


def test_c_inverse_vectorized_matches_scalar():
    ts = np.logspace(-3, 3, 50)
    assert solve_c_inverse(ts).tolist() == [solve_c_inverse(float(t)) for t in ts]


# -- schedules ---------------------------------------------------------------

def test_doubling_schedule_segments():
    segs = LSchedule().segments(10**9)
    assert [(l, s) for l, s, _ in segs[:3]] == [(1, 1), (2, 55), (4, 488736079)]
    assert LSchedule().level(54) == 1 and LSchedule().level(55) == 2
    # the start after level 8 lies beyond e^700
    assert LSchedule().segments(10**300)[-1][2] is None


@pytest.mark.parametrize("levels,starts", [((2, 3), (1, 5)), ((2, 1), (1, 5)), ((1, 2), (2, 5)),
                                           ((1, 2), (1, 1)), ((0,), (1,)), ((1,), (1, 2))])
def test_explicit_schedule_validation(levels, starts):
    with pytest.raises(SpecError):
        LSchedule("explicit", levels, starts)


def test_explicit_schedule_levels():
    s = LSchedule("explicit", (1, 2, 4), (1, 3, 5))
    assert s.levels_array(7).tolist() == [1, 1, 2, 2, 4, 4, 4]
    assert not s.unbounded
    assert LSchedule.from_dict(s.to_dict()) == s


# -- builders ----------------------------------------------------------------

def test_ii_inf_block_one():
    b = build_type_ii_inf(8).block(1)
    assert c_of_lambda(b.lam) == pytest.approx(math.log(2), rel=1e-12)
    assert b.lam == pytest.approx(0.69827, abs=1e-5)
    assert b.nu_tower == pytest.approx(1 / (2 * math.log(2)))


def test_ii_inf_c_nu_is_harmonic():
    a = build_type_ii_inf(1000).arrays(1000)
    assert np.allclose(c_of_lambda(a["lam"]) * a["nu"] * 2 * a["n"], 1.0, rtol=1e-10)


def test_iii0_lambda_is_power_of_two():
    a = build_type_iii0(100).arrays(100)
    assert np.all(a["lam"][:54] == 2.0) and np.all(a["lam"][54:] == 4.0)
    assert np.allclose(a["nu"] * 2 * a["n"] * c_of_lambda(a["lam"]), 1.0)
    assert a["power"][:54].tolist() == [1] * 54 and a["power"][54] == 2


def test_iii_lambda_pairs():
    s = build_type_iii_lambda(0.5, 64)
    b1, b2 = s.block(1), s.block(2)
    assert (b1.lam, b2.lam) == (0.5, 2.0)
    assert b1.nu_tower == pytest.approx(1 / math.log(2))
    assert b2.nu_tower == pytest.approx(0.5 / math.log(2))
    # equal mu-mass across the pair makes the product of block densities balance
    assert b1.mu_tower == pytest.approx(b2.nu_tower)
    assert (b1.power, b2.power) == (1, -1)


def test_iii1_phases():
    s = build_type_iii1(0.5, 1 / 3, 16)
    lams = [s.block(n).lam for n in range(1, 5)]
    assert lams == pytest.approx([0.5, 2.0, 1 / 3, 3.0])
    assert [s.block(n).generator for n in range(1, 5)] == [0, 0, 1, 1]
    assert s.generators == (0.5, 1 / 3)


@pytest.mark.parametrize("l1,l2", [(0.5, 0.25), (0.5, 0.125), (1 / 9, 1 / 3), (0.2, 0.04)])
def test_iii1_rejects_rational_dependence(l1, l2):
    with pytest.raises(SpecError):
        build_type_iii1(l1, l2, 16)


def test_rationally_dependent_finds_relation():
    assert rationally_dependent(math.log(0.5), math.log(0.25)) == (1, 2)
    assert rationally_dependent(math.log(0.5), math.log(1 / 3)) is None


@pytest.mark.parametrize("lam", [0.0, 1.0, -0.5, 1.5])
def test_iii_lambda_range(lam):
    with pytest.raises(SpecError):
        build_type_iii_lambda(lam, 8)


def test_custom_validation():
    with pytest.raises(SpecError):
        build_custom([1.0, 2.0], [1.0])
    with pytest.raises(SpecError):
        build_custom([0.0], [1.0])
    s = build_custom([1.0, 0.5], [0.0, 2.0])
    assert s.finite and s.n_blocks == 2
    with pytest.raises(SpecError):
        s.block(3)
    assert s.arrays(10)["gen"].tolist() == [-1, 1]


def test_density_and_cells():
    s = build_type_iii_lambda(0.5, 8)
    assert s.density_at(CellIndex(1, (1,))) == 0.5
    assert s.density_at(CellIndex(1, (3,))) == 1.0  # side 2: outside the tower
    with pytest.raises(SpecError):
        s.density_at(CellIndex(1, (3,), is_tower=True))
    assert s.mu_mass(CellIndex(1, (2,))) == pytest.approx(0.5 * s.nu_mass(CellIndex(1, (2,))))


@pytest.mark.parametrize("spec", [
    build_type_ii_inf(32, rank=2), build_type_iii0(32, LSchedule("explicit", (1, 2), (1, 4))),
    build_type_iii_lambda(0.3, 32), build_type_iii1(0.5, 1 / 3, 32), build_custom([0.5, 2.0], [1.0, 0.5]),
])
def test_json_round_trip(spec):
    again = SystemSpec.from_json(spec.to_json())
    assert again == spec and again.digest() == spec.digest()
    assert json.loads(spec.to_json())["kind"] == spec.kind.value


def test_arrays_are_slice_consistent():
    s = build_type_iii1(0.5, 1 / 3, 200)
    full = s.arrays(200)
    part = s.arrays(120, start=37)
    for key in full:
        assert np.array_equal(full[key][36:120], part[key])


@settings(max_examples=30)
@given(st.sampled_from(list(Kind)[:4]), st.integers(1, 300))
def test_block_matches_arrays(kind, n):
    s = {Kind.II_INF: build_type_ii_inf(400), Kind.III_0: build_type_iii0(400),
         Kind.III_LAMBDA: build_type_iii_lambda(0.7, 400), Kind.III_1: build_type_iii1(0.5, 1 / 3, 400)}[kind]
    a = s.arrays(n)
    b = s.block(n)
    assert (b.lam, b.nu_tower, b.side) == (a["lam"][-1], a["nu"][-1], a["side"][-1])


@pytest.mark.parametrize("lam", [0.3, 0.5, 0.8])
def test_iii_lambda_pairing_identity(lam):
    a = build_type_iii_lambda(lam, 400).arrays(400)
    drift = (a["lam"] - 1.0) * a["nu"]
    assert np.allclose(drift[0::2] + drift[1::2], 0.0, atol=1e-15)
    cn = c_of_lambda(a["lam"]) * a["nu"]
    assert np.allclose(cn[0::2], cn[1::2], rtol=1e-13)


@pytest.mark.parametrize("build", [lambda: build_type_ii_inf(50), lambda: build_type_iii0(50),
                                   lambda: build_type_iii_lambda(0.4, 50), lambda: build_type_iii1(0.5, 1 / 3, 50)])
def test_blocks_regenerate_bitwise(build):
    a, b = list(build().blocks()), list(build().blocks())
    assert a == b
