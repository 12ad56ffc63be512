from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sicancel.coupler import (
    CANCELLATION_CAP_DB,
    AntennaModel,
    ChannelScenario,
    CouplerSpec,
    antenna_gamma,
    balanced_target,
    cancellation_db,
    insertion_loss_sum,
    si_to_db,
    si_transfer,
)
from sicancel.network import NetworkSpec, balance_gamma
from sicancel.search import ideal_tune

NO_LEAK = CouplerSpec(leak_mag_db=-400.0)
disk = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 0.4), st.floats(0, 2 * np.pi))


def polar(mag, deg):
    return mag * np.exp(1j * np.deg2rad(deg))


class TestAntenna:
    def test_flat(self):
        m = AntennaModel(0.3 + 0.1j)
        assert np.allclose(antenna_gamma(m, np.linspace(905e6, 925e6, 5)), 0.3 + 0.1j)

    def test_max_reported_magnitude(self):
        assert abs(antenna_gamma(AntennaModel(0.38 + 0j), 915e6)) == pytest.approx(0.38)

    def test_slope(self):
        m = AntennaModel(polar(0.2, 90), slope=1e-10 + 0j, f_ref=915e6)
        assert antenna_gamma(m, 918e6) == pytest.approx(polar(0.2, 90) + 3e-4, abs=1e-12)

    def test_clipped_to_unit_disk(self):
        m = AntennaModel(0.99 + 0j, slope=1e-8 + 0j)
        assert abs(antenna_gamma(m, 925e6)) == pytest.approx(1.0)

    def test_rejects_active(self):
        with pytest.raises(ValueError):
            AntennaModel(1.2 + 0j)

    def test_perturbations_ordered(self):
        with pytest.raises(ValueError):
            ChannelScenario(perturbations=((5, AntennaModel()), (5, AntennaModel())))


class TestTransfer:
    def test_perfect_null(self):
        assert si_transfer(0.3 - 0.2j, 0.3 - 0.2j, NO_LEAK) == pytest.approx(0, abs=1e-12)

    def test_half_of_reflection(self):
        spec = replace(NO_LEAK, excess_loss_db=0.0)
        assert abs(si_transfer(0.4, 0.0, spec)) == pytest.approx(0.2)

    def test_isolation_only(self):
        assert cancellation_db(0j, 0j, CouplerSpec()) == pytest.approx(25.0)

    @pytest.mark.parametrize("mag, db", [(0.2, 13.98), (10 ** (-78 / 20), 78.0)])
    def test_db(self, mag, db):
        assert si_to_db(mag) == pytest.approx(db, abs=5e-3)

    def test_cap(self):
        assert cancellation_db(0.1j, 0.1j, NO_LEAK) == CANCELLATION_CAP_DB

    def test_path_gain(self):
        assert CouplerSpec(excess_loss_db=0).path_gain == 0.5
        assert CouplerSpec().path_gain == pytest.approx(0.5 * 10 ** (-1 / 20))

    @given(disk, disk)
    def test_swap_symmetry(self, a, b):
        assert abs(si_transfer(a, b, NO_LEAK)) == pytest.approx(abs(si_transfer(b, a, NO_LEAK)), abs=1e-15)

    def test_invalid(self):
        with pytest.raises(ValueError):
            CouplerSpec(leak_mag_db=3)
        with pytest.raises(ValueError):
            CouplerSpec(coupling_db=0)


class TestBalancedTarget:
    def test_no_leak(self):
        assert balanced_target(0.2 + 0.1j, NO_LEAK) == pytest.approx(0.2 + 0.1j)

    def test_leak_only(self):
        spec = CouplerSpec(leak_phase=0.0, excess_loss_db=0.0)
        assert balanced_target(0j, spec) == pytest.approx(2 * 10 ** (-25 / 20), rel=1e-12)
        assert abs(balanced_target(0j, spec)) == pytest.approx(0.1124, abs=1e-4)

    def test_triangle_bound(self):
        spec = CouplerSpec(leak_phase=0.0, excess_loss_db=0.0)
        assert abs(balanced_target(0.4 + 0j, spec)) <= 0.5125

    def test_unrealizable(self):
        with pytest.raises(ValueError, match="unrealizable balance point"):
            balanced_target(0.99 + 0j, CouplerSpec(leak_phase=0.0))

    @given(disk)
    def test_null_exactness(self, g):
        spec = CouplerSpec()
        assert cancellation_db(g, balanced_target(g, spec), spec) == CANCELLATION_CAP_DB

    @given(disk, st.floats(0, 2 * np.pi))
    def test_monotone_along_rays(self, g, theta):
        spec = CouplerSpec()
        t = balanced_target(g, spec)
        r = np.linspace(1e-6, 0.3, 50)
        mags = np.abs(si_transfer(g, t + r * np.exp(1j * theta), spec))
        assert np.all(np.diff(mags) > 0)


@pytest.mark.parametrize("excess, total", [(0.0, 6.0), (0.5, 7.0), (1.0, 8.0)])
def test_insertion_loss(excess, total):
    assert insertion_loss_sum(CouplerSpec(excess_loss_db=excess)) == pytest.approx(total)


def test_offset_cancellation_degrades_with_offset():
    """Freeze codes at the 915 MHz null and move the carrier."""
    net, spec = NetworkSpec(), CouplerSpec()
    rng = np.random.default_rng(11)
    offsets = np.array([0.1, 0.5, 1, 2, 3, 4]) * 1e6
    table = []
    for _ in range(20):
        g = 0.4 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        codes = ideal_tune(g, net, spec).codes
        gb = balance_gamma(np.broadcast_to(codes.as_array(), (len(offsets), 8)), net, 915e6 + offsets)
        table.append(cancellation_db(g, gb, spec))
    mean = np.mean(table, axis=0)
    assert np.all(np.isfinite(mean))
    assert np.all(np.diff(mean) < 0)
