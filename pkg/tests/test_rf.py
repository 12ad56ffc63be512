import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sicancel.rf import (
    CircuitError,
    TwoPortABCD,
    cascade,
    cascade_all,
    element_impedance,
    impedance_from_reflection,
    input_impedance,
    reflection_from_impedance,
    series_element,
    shunt_element,
)

finite = st.floats(-1e4, 1e4, allow_nan=False)
impedances = st.builds(complex, st.floats(0, 1e4), finite)
nonzero = st.builds(complex, finite, finite).filter(lambda z: abs(z) > 1e-3)


def close(a, b, tol=1e-9):
    return abs(complex(a).real - complex(b).real) <= tol and abs(complex(a).imag - complex(b).imag) <= tol


class TestReflection:
    @pytest.mark.parametrize(
        "z, expected",
        [(50 + 0j, 0j), (0j, -1 + 0j), (100 + 0j, 1 / 3 + 0j)],
    )
    def test_examples(self, z, expected):
        assert close(reflection_from_impedance(z, 50.0), expected)

    @pytest.mark.parametrize("g, expected", [(0j, 50 + 0j), (-1 + 0j, 0j)])
    def test_inverse_examples(self, g, expected):
        assert close(impedance_from_reflection(g, 50.0), expected)

    def test_third_maps_back_to_100_ohm(self):
        assert impedance_from_reflection(0.3333 + 0j, 50.0) == pytest.approx(100, rel=1e-3)

    def test_singular(self):
        with pytest.raises(CircuitError, match="singular reflection"):
            reflection_from_impedance(-50 + 0j, 50.0)

    def test_open(self):
        with pytest.raises(CircuitError, match="infinite impedance"):
            impedance_from_reflection(1 + 0j, 50.0)

    @given(impedances)
    def test_round_trip(self, z):
        back = impedance_from_reflection(reflection_from_impedance(z, 50.0), 50.0)
        assert abs(back - z) <= 1e-9 * max(1.0, abs(z))

    def test_arrays_broadcast(self):
        z = np.array([0, 50, 100], dtype=complex)
        assert np.allclose(reflection_from_impedance(z), [-1, 0, 1 / 3])


class TestElements:
    @pytest.mark.parametrize(
        "kind, value, expected",
        [
            ("capacitor", 2.75e-12, -63.25j),
            ("inductor", 3.9e-9, 22.42j),
            ("resistor", 50.0, 50 + 0j),
        ],
    )
    def test_impedance_at_915(self, kind, value, expected):
        z = element_impedance(kind, value, 915e6)
        assert z.real == pytest.approx(expected.real, abs=1e-9)
        assert z.imag == pytest.approx(expected.imag, abs=5e-3)

    @pytest.mark.parametrize("value, f", [(0.0, 1e9), (-1e-12, 1e9), (1e-12, 0.0)])
    def test_rejects_nonpositive(self, value, f):
        with pytest.raises(ValueError):
            element_impedance("capacitor", value, f)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            element_impedance("memristor", 1.0, 1e9)


class TestTwoPort:
    def test_series_adds(self):
        assert close(input_impedance(series_element(10j), 50), 50 + 10j)

    def test_identity(self):
        assert close(input_impedance(TwoPortABCD.identity(), 33 - 7j), 33 - 7j)

    def test_series_composition(self):
        m = cascade(series_element(3 + 4j), series_element(-1 + 2j))
        ref = series_element(2 + 6j)
        assert np.allclose(m.as_array(), ref.as_array())

    def test_open_circuit_input(self):
        # shunt admittance -1/z_load cancels the load: zero total admittance
        with pytest.raises(CircuitError, match="open-circuit input"):
            input_impedance(shunt_element(-1 / 50), 50.0)

    @given(nonzero)
    def test_primitive_determinant(self, z):
        for m in (series_element(z), shunt_element(1 / z)):
            assert abs(m.det - 1) <= 1e-9

    @given(st.lists(st.tuples(st.booleans(), nonzero), min_size=1, max_size=6))
    def test_cascade_determinant(self, parts):
        m = cascade_all(*(series_element(z) if s else shunt_element(1 / z) for s, z in parts))
        scale = max(1.0, np.abs(m.as_array()).max() ** 2)
        assert abs(m.det - 1) <= 1e-9 * scale

    @given(nonzero, nonzero, nonzero)
    def test_associativity(self, z1, z2, z3):
        m1, m2, m3 = series_element(z1), shunt_element(1 / z2), series_element(z3)
        left = cascade(cascade(m1, m2), m3).as_array()
        right = cascade(m1, cascade(m2, m3)).as_array()
        assert np.allclose(left, right, rtol=1e-9, atol=1e-9)


def nodal_input_impedance(ladder, z_load):
    """Independent oracle: solve node voltages for 1 A injected at the input."""
    branches = []  # (node_a, node_b or None for ground, admittance)
    node = 0
    n_nodes = 1
    for kind, z in ladder:
        if kind == "series":
            branches.append((node, n_nodes, 1 / z))
            node = n_nodes
            n_nodes += 1
        else:
            branches.append((node, None, 1 / z))
    branches.append((node, None, 1 / z_load))
    y = np.zeros((n_nodes, n_nodes), dtype=complex)
    for a, b, adm in branches:
        y[a, a] += adm
        if b is not None:
            y[b, b] += adm
            y[a, b] -= adm
            y[b, a] -= adm
    current = np.zeros(n_nodes, dtype=complex)
    current[0] = 1.0
    return np.linalg.solve(y, current)[0]


class TestNodalOracle:
    def test_random_ladders(self):
        rng = np.random.default_rng(20)
        for _ in range(300):
            ladder = []
            for _ in range(3):
                z = complex(rng.uniform(0, 200), rng.uniform(-300, 300))
                ladder.append((rng.choice(["series", "shunt"]), z))
            z_load = complex(rng.uniform(1, 200), rng.uniform(-100, 100))
            m = cascade_all(*(series_element(z) if k == "series" else shunt_element(1 / z) for k, z in ladder))
            got = input_impedance(m, z_load)
            ref = nodal_input_impedance(ladder, z_load)
            assert abs(got - ref) <= 1e-6 * abs(ref)
