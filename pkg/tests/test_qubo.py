import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import (check_equivalence_and_dominance, energy_by_hand, qubo_model, random_discrete_model,
                        random_qubo, seeded)
from qplex.errors import ConversionError
from qplex.model import ModelBuilder, parse_model
from qplex.qubo import (Qubo, all_bitstrings, bits_to_spins, decode, ising_energy, qubo_energy,
                        qubo_from_dict, qubo_to_dict, range_coefficients, to_ising, to_qubo)


def test_knapsack_conversion(knapsack):
    cr = to_qubo(knapsack)
    assert cr.qubo.n == 5
    assert cr.penalty == 8.0
    assert cr.objective_sign == -1
    slack = cr.encodings[2]
    assert slack.slack and [c for _, c in slack.terms] == [1.0, 2.0, 1.0]
    # independent argmin over all 32 patterns
    patterns = list(itertools.product((0, 1), repeat=5))
    energies = [energy_by_hand(cr.qubo, p) for p in patterns]
    best = patterns[int(np.argmin(energies))]
    assert decode(cr, best) == {"x0": 0.0, "x1": 1.0}
    assert min(energies) == pytest.approx(-4.0)
    # brute-force optimum of the model itself
    values = {}
    for x0, x1 in itertools.product((0, 1), repeat=2):
        if 2 * x0 + 3 * x1 <= 4:
            values[(x0, x1)] = 3 * x0 + 4 * x1
    assert max(values.values()) == 4 and max(values, key=values.get) == (0, 1)


def test_unconstrained_identity():
    b = ModelBuilder()
    b.binary("x0")
    b.minimize({"x0": 1})
    q = to_qubo(b.build()).qubo
    assert (q.n, q.linear, q.quadratic, q.offset) == (1, (1.0,), {}, 0.0)


def test_integer_encoding_0_to_5():
    assert range_coefficients(5) == [1.0, 2.0, 2.0]
    b = ModelBuilder()
    b.integer("y", 0, 5)
    b.minimize({"y": 1})
    cr = to_qubo(b.build())
    seen = {decode(cr, p)["y"] for p in itertools.product((0, 1), repeat=3)}
    assert seen == {0, 1, 2, 3, 4, 5}


@pytest.mark.parametrize("span", range(1, 70))
def test_range_coefficients_cover_exactly(span):
    coefs = range_coefficients(span)
    sums = {sum(c for c, b in zip(coefs, bits) if b)
            for bits in itertools.product((0, 1), repeat=len(coefs))}
    assert sums == set(range(span + 1))


def test_range_coefficients_zero_span():
    assert range_coefficients(0) == []


def test_decode_examples(knapsack):
    cr = to_qubo(knapsack)
    for slack in itertools.product("01", repeat=3):
        assert decode(cr, "01" + "".join(slack)) == {"x0": 0.0, "x1": 1.0}
    b = ModelBuilder()
    b.integer("y", 2, 9)
    b.binary("x")
    b.minimize({"y": 1, "x": 1})
    cr = to_qubo(b.build())
    assert decode(cr, "0" * cr.qubo.n) == {"y": 2.0, "x": 0.0}
    b = ModelBuilder()
    b.binary("x")
    b.minimize({"x": 1})
    assert decode(to_qubo(b.build()), "1") == {"x": 1.0}


def test_decode_rejects_wrong_length(knapsack):
    with pytest.raises(ValueError):
        decode(to_qubo(knapsack), "01")


def test_qubo_energy_examples():
    q = Qubo(1, (1.0,), {}, 0.0)
    assert qubo_energy(q, "0") == 0.0 and qubo_energy(q, "1") == 1.0
    q = Qubo(2, (-1.0, -1.0), {(0, 1): 2.0}, 0.0)
    assert qubo_energy(q, "11") == 0.0
    q = Qubo(3, (4.0, -2.0, 1.0), {(0, 2): 3.0}, 1.25)
    assert qubo_energy(q, "000") == 1.25


def test_ising_examples():
    m = to_ising(Qubo(1, (1.0,), {}, 0.0))
    assert m.h == (-0.5,) and m.J == {} and m.offset == 0.5
    assert ising_energy(m, [1]) == 0.0 and ising_energy(m, [-1]) == 1.0

    m = to_ising(Qubo(3, (0.0, 0.0, 0.0), {}, 2.5))
    assert m.h == (0.0, 0.0, 0.0) and m.J == {} and m.offset == 2.5
    assert ising_energy(m, [1, 1, 1]) == 2.5

    q = Qubo(2, (0.0, 0.0), {(0, 1): 4.0}, 0.0)
    m = to_ising(q)
    assert m.J == {(0, 1): 1.0} and m.h == (-1.0, -1.0) and m.offset == 1.0
    for bits in itertools.product((0, 1), repeat=2):
        z = [1 - 2 * b for b in bits]
        by_hand = 1.0 - z[0] - z[1] + z[0] * z[1]
        assert ising_energy(m, z) == by_hand == qubo_energy(q, bits)
    assert ising_energy(m, [-1, -1]) == 4.0


def test_ising_energy_validates_spins():
    m = to_ising(Qubo(2, (1.0, 1.0), {}, 0.0))
    with pytest.raises(ValueError):
        ising_energy(m, [0, 1])
    with pytest.raises(ValueError):
        ising_energy(m, [1])


def test_bits_to_spins_convention():
    assert bits_to_spins("01") == [1, -1]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_ising_equivalence(seed, n):
    q = random_qubo(seeded(seed), n, integer=False)
    m = to_ising(q)
    assert all(k[0] < k[1] < n for k in m.J) and all(v != 0 for v in m.J.values())
    for bits in all_bitstrings(n):
        assert qubo_energy(q, bits) == pytest.approx(ising_energy(m, bits_to_spins(bits)), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.data())
def test_decode_totality(seed, data):
    model = random_discrete_model(seeded(seed), max_bits=16)
    cr = to_qubo(model)
    bits = data.draw(st.lists(st.integers(0, 1), min_size=cr.qubo.n, max_size=cr.qubo.n))
    values = decode(cr, bits)
    for v in model.variables:
        assert v.lower <= values[v.name] <= v.upper
        assert values[v.name] == int(values[v.name])


def test_bit_indices_used_once():
    for s in range(20):
        cr = to_qubo(random_discrete_model(seeded(s)))
        used = [k for e in cr.encodings for k, _ in e.terms]
        assert sorted(used) == list(range(cr.qubo.n))


def test_qubo_has_no_stored_zeros():
    for s in range(20):
        q = to_qubo(random_discrete_model(seeded(s))).qubo
        assert all(c != 0.0 for c in q.quadratic.values())
        assert all(0 <= i < j < q.n for i, j in q.quadratic)


@pytest.mark.parametrize("seed", range(15))
def test_feasible_equivalence_and_dominance(seed):
    model = random_discrete_model(seeded(500 + seed), max_bits=12)
    assert check_equivalence_and_dominance(model) is None


def test_unconstrained_model_matches_input_qubo():
    for s in range(10):
        q = random_qubo(seeded(s), 5)
        assert to_qubo(qubo_model(q)).qubo == q


def test_conversion_errors():
    b = ModelBuilder()
    b.continuous("c", 0, 1)
    b.minimize({"c": 1})
    with pytest.raises(ConversionError, match="continuous"):
        to_qubo(b.build())
    b = ModelBuilder()
    b.binary("x")
    b.constraint({"x": 1}, "<=", -1)
    b.minimize({"x": 1})
    with pytest.raises(ConversionError, match="cannot be satisfied"):
        to_qubo(b.build())
    b = ModelBuilder()
    b.binary("x")
    b.minimize({"x": 1})
    with pytest.raises(ConversionError, match="penalty"):
        to_qubo(b.build(), penalty=-1)


def test_explicit_penalty(knapsack):
    assert to_qubo(knapsack, penalty=20).penalty == 20.0


def test_qubo_dict_round_trip():
    q = random_qubo(seeded(3), 6)
    assert qubo_from_dict(json.loads(json.dumps(qubo_to_dict(q)))) == q
    with pytest.raises(ConversionError):
        qubo_from_dict({"linear": [1]})


def test_conversion_result_to_dict(knapsack):
    doc = to_qubo(knapsack).to_dict()
    json.dumps(doc)
    assert doc["n"] == 5 and doc["penalty"] == 8.0


def test_model_file_in_repo(knapsack):
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "models" / "knapsack.json"
    assert parse_model(path.read_text()) == knapsack


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_qubo_energy_matches_matrix_form(seed, n):
    q = random_qubo(seeded(seed), n, integer=False)
    patterns = all_bitstrings(n)
    for bits, e in zip(patterns, energy_by_hand(q, patterns)):
        assert qubo_energy(q, bits) == pytest.approx(e, abs=1e-9)
    assert np.allclose(q.energies(patterns), energy_by_hand(q, patterns), atol=1e-9)
