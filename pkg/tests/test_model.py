import pytest
from hypothesis import given, strategies as st

from rxnsim.builtins import builtin, BUILTIN_NAMES, crazy_clock, epidemic, viral
from rxnsim.model import (
    MassAction,
    Model,
    ModelError,
    PInvariant,
    Reaction,
    Species,
    change_vector,
    derive_bounds,
    detect_p_invariants,
    validate_model,
)
from rxnsim.parser import parse_model


def _model(species, reactions, scale=100, params=(), invariants=(), name="m"):
    return Model(name=name, species=tuple(species), reactions=tuple(reactions),
                 scale=scale, params=tuple(params), invariants=tuple(invariants))


def test_change_vector_epidemic_infection(epidemic):
    infect = epidemic.reactions[1]
    assert change_vector(infect) == (-1, 1)


def test_change_vector_second_order(abc_model):
    # 2A + B -> A + B loses exactly one A
    assert change_vector(abc_model.reactions[2]) == (-1, 0)


def test_change_vector_difference():
    r = Reaction("r", inputs=(2, 1, 0), outputs=(1, 1, 0), rate=MassAction(1.0))
    assert change_vector(r) == (-1, 0, 0)


def test_null_change_vector_rejected():
    sp = [Species("A", init_count=1)]
    r = Reaction("noop", inputs=(1,), outputs=(1,), rate=MassAction(1.0))
    with pytest.raises(ModelError, match="null change vector"):
        validate_model(_model(sp, [r]))


def test_duplicate_species_rejected():
    sp = [Species("A"), Species("A")]
    with pytest.raises(ModelError, match="duplicate species"):
        validate_model(_model(sp, []))


def test_declared_invariant_must_hold():
    sp = [Species("A", init_count=5), Species("B", init_count=0)]
    r = Reaction("r", inputs=(1, 0), outputs=(0, 0), rate=MassAction(1.0))  # destroys A
    bad = PInvariant(weights=(1, 1), total=5)
    with pytest.raises(ModelError, match="violated"):
        validate_model(_model(sp, [r], invariants=[bad]))


def test_crazy_clock_1d_fold_validates():
    # single tracked variable; both reactions lose one A
    text = """
model clock1d
scale N = 1000
species A : fluid, init 1000, bounds [0, 1000]
reaction decay : A -> 0 @ expr 3 * A
reaction auto : A -> 0 @ expr 6000 * A * (N - A) / N
"""
    m = parse_model(text)
    assert [change_vector(r) for r in m.reactions] == [(-1,), (-1,)]


def test_detect_invariants_crazy_clock(crazy_clock):
    invs = detect_p_invariants(crazy_clock)
    assert [(i.weights, i.total) for i in invs] == [((1, 1), 1000)]


def test_detect_invariants_transcription(transcription):
    invs = {i.weights: i.total for i in transcription.invariants}
    names = transcription.species_names
    dna = tuple(1 if n in ("DNA", "DNA_D", "DNA_2D") else 0 for n in names)
    em = tuple(1 if n in ("E", "EM") else 0 for n in names)
    assert invs[dna] == 2
    assert invs[em] == 80


def test_birth_reaction_blocks_invariant():
    text = """
model birth
scale N = 10
species A : fluid, init 0
species B : fluid, init 3
reaction mk : 0 -> A @ mass_action 1.0
reaction swap : A -> B @ mass_action 1.0
"""
    m = parse_model(text)
    assert all(inv.weights[0] == 0 for inv in m.invariants)


def test_invariants_annihilate_all_reactions():
    for name in BUILTIN_NAMES:
        m = builtin(name)
        for inv in m.invariants:
            for r in m.reactions:
                assert sum(w * l for w, l in zip(inv.weights, change_vector(r))) == 0


def test_derive_bounds_crazy_clock(crazy_clock):
    a = crazy_clock.species[0]
    assert (a.lower_bound, a.upper_bound) == (0, 1000)


def test_derive_bounds_unbounded_struct(viral):
    struct = viral.species[viral.species_index("struct")]
    assert struct.lower_bound == 0 and struct.upper_bound is None
    assert "struct" in viral.unbounded_fluid


def test_derive_bounds_integer_division():
    # weight 2 in an invariant of total 10 caps the species at 5
    text = """
model halves
scale N = 10
species A : fluid, init 2
species B : fluid, init 6
reaction r : A -> 2 B @ mass_action 1.0
"""
    m = parse_model(text)
    assert m.invariants == (PInvariant((2, 1), 10),)
    assert m.species[0].upper_bound == 5
    assert m.species[1].upper_bound == 10


def test_user_bounds_override_derived():
    text = """
model o
scale N = 10
species A : fluid, init 2, bounds [0, 7]
species B : fluid, init 6
reaction r : A -> 2 B @ mass_action 1.0
"""
    m = parse_model(text)
    assert m.species[0].upper_bound == 7  # not the invariant cap 5


def test_derive_bounds_idempotent(crazy_clock):
    once = derive_bounds(crazy_clock)
    again = derive_bounds(validate_model(crazy_clock))
    assert once == again


def test_init_outside_bounds_rejected():
    sp = [Species("A", init_count=3, lower_bound=0, upper_bound=2)]
    r = Reaction("r", inputs=(1,), outputs=(0,), rate=MassAction(1.0))
    with pytest.raises(ModelError, match="outside"):
        validate_model(_model(sp, [r]))


def test_mass_action_constant_positive():
    sp = [Species("A", init_count=1)]
    r = Reaction("r", inputs=(1,), outputs=(0,), rate=MassAction(0.0))
    with pytest.raises(ModelError, match="must be > 0"):
        validate_model(_model(sp, [r]))


@st.composite
def _random_stoich(draw):
    n_s = draw(st.integers(2, 5))
    n_r = draw(st.integers(1, 6))
    rows = []
    for _ in range(n_r):
        inp = draw(st.lists(st.integers(0, 2), min_size=n_s, max_size=n_s))
        out = draw(st.lists(st.integers(0, 2), min_size=n_s, max_size=n_s))
        if inp == out:
            out = list(out)
            out[0] += 1
        rows.append((tuple(inp), tuple(out)))
    return n_s, rows


@given(_random_stoich())
def test_detected_invariants_are_conserved_and_nonnegative(data):
    n_s, rows = data
    species = [Species(f"s{i}", init_count=3) for i in range(n_s)]
    reactions = [
        Reaction(f"r{k}", inputs=i, outputs=o, rate=MassAction(1.0)) for k, (i, o) in enumerate(rows)
    ]
    m = _model(species, reactions)
    for inv in detect_p_invariants(m):
        assert all(w >= 0 for w in inv.weights)
        assert any(w > 0 for w in inv.weights)
        for r in reactions:
            assert sum(w * l for w, l in zip(inv.weights, change_vector(r))) == 0
