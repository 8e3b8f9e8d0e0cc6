import numpy as np
import pytest

from rxnsim.builtins import abc, builtin, BUILTIN_NAMES, crazy_clock, epidemic, viral
from rxnsim.kinetics import (
    boundary_map_B,
    counts_to_state,
    density_f,
    drift,
    intensity,
    jump_intensity,
    partition_static,
    split_dynamic,
    state_to_counts,
)
from rxnsim.parser import parse_model


def _state(model, counts):
    return counts_to_state(model, np.asarray(counts, dtype=float))


# ---------------------------------------------------------------- intensity


def test_intensity_epidemic_infection(epidemic):
    # lam2 * i * j / N with lam2 = 2, N = 1000
    assert intensity(epidemic, [300, 100], 1) == pytest.approx(2.0 * 300 * 100 / 1000)


def test_intensity_birth_scales_with_n(epidemic):
    assert intensity(epidemic, [0, 0], 0) == pytest.approx(1.0 * 1000)


def test_intensity_second_order(abc_model):
    # 2A -> A + B at i molecules: nu2 * i * (i-1) / (2V), V = N = 100
    assert intensity(abc_model, [10, 5], 1) == pytest.approx(1.0 * 10 * 9 / (2 * 100))


def test_intensity_third_order(abc_model):
    # 2A + B -> A + B: nu3 * i(i-1) j / (2 V^2)
    assert intensity(abc_model, [10, 5], 2) == pytest.approx(1.0 * 10 * 9 * 5 / (2 * 100**2))


def test_intensity_zero_when_input_absent(abc_model):
    assert intensity(abc_model, [1, 5], 1) == 0.0  # binom(1, 2) = 0
    assert intensity(abc_model, [0, 5], 0) == 0.0


# ---------------------------------------------------------------- density f


def test_density_f_epidemic(epidemic):
    y = np.array([0.4, 0.2])
    assert density_f(epidemic, y, 1) == pytest.approx(2.0 * 0.4 * 0.2)
    assert density_f(epidemic, y, 0) == pytest.approx(1.0)
    assert density_f(epidemic, y, 2) == pytest.approx(1.0 * 0.2)


def test_density_f_crazy_clock_reduction(crazy_clock):
    # with B = 1 - A the two channels sum to lam1*x + lam2*x*(1-x)
    for x in (0.0, 0.1, 0.5, 0.93, 1.0):
        y = np.array([x, 1.0 - x])
        total = density_f(crazy_clock, y, 0) + density_f(crazy_clock, y, 1)
        assert total == pytest.approx(3.0 * x + 6000.0 * x * (1 - x), rel=1e-12)


def test_density_f_clamps_negative():
    m = parse_model(
        "model neg\nscale N = 10\nspecies A : fluid, init 5\nreaction r : A -> 0 @ expr A - 100\n"
    )
    assert density_f(m, np.array([0.1]), 0) == 0.0


# ------------------------------------------------------------------- drift


def test_drift_crazy_clock_midpoint(crazy_clock):
    st = _state(crazy_clock, [500.0, 500.0])
    f = drift(crazy_clock, st)
    assert f[0] == pytest.approx(-1501.5)  # -(3*0.5 + 6000*0.25)
    assert f[1] == pytest.approx(+1501.5)


def test_drift_zero_at_extinction(crazy_clock):
    st = _state(crazy_clock, [0.0, 1000.0])
    assert drift(crazy_clock, st) == pytest.approx([0.0, 0.0])


def test_drift_epidemic_vector(epidemic):
    y1, y2 = 0.4, 0.2
    st = _state(epidemic, [400.0, 200.0])
    f = drift(epidemic, st)
    lam1, lam2, lam3 = 1.0, 2.0, 1.0
    assert f[0] == pytest.approx(lam1 - lam2 * y1 * y2)
    assert f[1] == pytest.approx(lam2 * y1 * y2 - lam3 * y2)


def test_generator_constant_in_n():
    # exactly density dependent: drift at equal density is N-independent
    y = np.array([0.37, 0.11])
    from rxnsim.builtins import epidemic as build

    for n in (100, 1000, 10000):
        m = build(n=n)
        st = counts_to_state(m, y * n)
        f = drift(m, st)
        assert f == pytest.approx(drift(build(n=2 * n), counts_to_state(build(n=2 * n), y * 2 * n)), abs=1e-12)


# ------------------------------------------------------------ boundary map


def _two_species_bounded():
    return parse_model(
        "model b\nscale N = 100\n"
        "species X : fluid, init 34, bounds [0, 100]\n"
        "species Y : fluid, init 100, bounds [0, 100]\n"
        "reaction r : X -> Y @ mass_action 1\n"
    )


def test_boundary_map_extremal_components():
    m = _two_species_bounded()
    assert boundary_map_B(m, _state(m, [34.0, 100.0])) == {1}
    assert boundary_map_B(m, _state(m, [34.0, 50.0])) == frozenset()
    assert boundary_map_B(m, _state(m, [0.0, 0.0])) == {0, 1}


# --------------------------------------------------------------- partition


def test_partition_switch_clock_relaxed(switch_clock):
    part = partition_static(switch_clock, "relaxed")
    names = [switch_clock.reactions[i].name for i in part.discrete_events]
    assert names == ["switch"]
    assert set(part.fluid_events) == {0, 1}


def test_partition_switch_clock_strict(switch_clock):
    part = partition_static(switch_clock, "strict")
    names = sorted(switch_clock.reactions[i].name for i in part.discrete_events)
    assert names == ["auto", "switch"]  # rate of `auto` depends on discrete C


def test_partition_all_fluid_has_no_discrete_events(crazy_clock, epidemic):
    for m in (crazy_clock, epidemic):
        for mode in ("relaxed", "strict"):
            assert partition_static(m, mode).discrete_events == ()


def test_partition_strict_fluid_subset_of_relaxed():
    for name in BUILTIN_NAMES:
        m = builtin(name)
        strict = set(partition_static(m, "strict").fluid_events)
        relaxed = set(partition_static(m, "relaxed").fluid_events)
        assert strict <= relaxed
        n_r = len(m.reactions)
        for mode in ("strict", "relaxed"):
            p = partition_static(m, mode)
            assert set(p.fluid_events) | set(p.discrete_events) == set(range(n_r))
            assert set(p.fluid_events) & set(p.discrete_events) == set()


def test_partition_viral(viral):
    part = partition_static(viral, "relaxed")
    fluid = sorted(viral.reactions[i].name for i in part.fluid_events)
    assert fluid == ["k5", "k6"]
    strict = partition_static(viral, "strict")
    assert sorted(viral.reactions[i].name for i in strict.fluid_events) == ["k6"]


# ------------------------------------------------------------ dynamic split


def test_split_dynamic_at_upper_bound(crazy_clock):
    part = partition_static(crazy_clock)
    interior, boundary = split_dynamic(crazy_clock, part, _state(crazy_clock, [1000.0, 0.0]))
    assert interior == frozenset() and boundary == {0, 1}


def test_split_dynamic_interior(crazy_clock):
    part = partition_static(crazy_clock)
    interior, boundary = split_dynamic(crazy_clock, part, _state(crazy_clock, [500.0, 500.0]))
    assert boundary == frozenset() and interior == {0, 1}


def test_split_dynamic_lower_bound_zero_rate(crazy_clock):
    part = partition_static(crazy_clock)
    st = _state(crazy_clock, [0.0, 1000.0])
    interior, boundary = split_dynamic(crazy_clock, part, st)
    assert boundary == {0, 1}
    assert all(jump_intensity(crazy_clock, st, r) == 0.0 for r in boundary)


def test_split_union_is_fluid_events(switch_clock):
    part = partition_static(switch_clock)
    for counts in ([1000, 0, 1], [500, 500, 1], [0, 1000, 0]):
        interior, boundary = split_dynamic(switch_clock, part, _state(switch_clock, counts))
        assert interior | boundary == set(part.fluid_events)
        assert interior & boundary == frozenset()


# ------------------------------------------------------------ jump intensity


def test_jump_intensity_upper_boundary(crazy_clock):
    st = _state(crazy_clock, [1000.0, 0.0])
    assert jump_intensity(crazy_clock, st, 0) == pytest.approx(1000 * 3.0)
    assert jump_intensity(crazy_clock, st, 1) == 0.0


def test_jump_intensity_switch_rate(switch_clock):
    st = _state(switch_clock, [980.0, 20.0, 1.0])
    expect = max(0.0, 500.0 * (980 - 950) / 50)
    assert jump_intensity(switch_clock, st, 2) == pytest.approx(expect)
    # disabled without its discrete input
    st0 = _state(switch_clock, [980.0, 20.0, 0.0])
    assert jump_intensity(switch_clock, st0, 2) == 0.0


def test_jump_intensity_zero_input(viral):
    st = _state(viral, [0.0, 0.0, 100.0])
    assert jump_intensity(viral, st, 0) == 0.0  # k1 needs gen


# --------------------------------------------- near density dependence (O(1/N))


def _rescaled(model, n):
    """Same rate constants and initial counts, different scale N."""
    import re

    from rxnsim.parser import parse_model as _pm, serialize_model as _sm

    text = re.sub(r"(?m)^scale N = \d+$", f"scale N = {n}", _sm(model))
    return _pm(text)


@pytest.mark.parametrize("name", ["epidemic", "abc", "crazy_clock", "viral", "transcription"])
def test_near_density_dependence_tightens(name):
    base = builtin(name)
    rng = np.random.default_rng(1)
    ys = rng.uniform(0.0, 1.0, size=(20, len(base.species)))
    sups = {}
    for n in (100, 1000, 10000):
        m = _rescaled(base, n)
        worst = 0.0
        for y in ys:
            counts = np.round(y * n)
            for r in range(len(m.reactions)):
                lam = intensity(m, counts, r)
                f = density_f(m, counts / n, r, all_fluid=True)
                worst = max(worst, abs(lam / n - f))
        sups[n] = worst
    # |q/N - f| <= c/N with one constant, and the gap halves as N doubles;
    # exactly density dependent models sit at float round-off, below the floor
    c = sups[100] * 100 * 1.05 + 1e-9
    for n, sup in sups.items():
        assert sup <= c / n + 1e-10
    if sups[100] > 1e-6:
        assert sups[1000] <= 0.15 * sups[100]
        assert sups[10000] <= 0.15 * sups[1000]


def test_exactly_density_dependent_has_no_gap(epidemic):
    rng = np.random.default_rng(2)
    for _ in range(10):
        counts = np.round(rng.uniform(0, 1000, size=2))
        for r in range(3):
            assert intensity(epidemic, counts, r) / 1000 == pytest.approx(
                density_f(epidemic, counts / 1000, r), abs=1e-12
            )


def test_all_rates_nonnegative(switch_clock):
    rng = np.random.default_rng(3)
    for _ in range(50):
        counts = np.array([rng.uniform(0, 1000), rng.uniform(0, 1000), rng.integers(0, 2)])
        st = counts_to_state(switch_clock, counts)
        for r in range(3):
            assert jump_intensity(switch_clock, st, r) >= 0.0
            assert density_f(switch_clock, state_to_counts(switch_clock, st) / switch_clock.scale, r) >= 0.0
