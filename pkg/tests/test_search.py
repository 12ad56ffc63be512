import numpy as np
import pytest

from sicancel.coupler import CouplerSpec, cancellation_db
from sicancel.network import CapCodes, NetworkSpec, balance_gamma
from sicancel.search import flattest_tune, ideal_search, ideal_tune, match_stage2

NET = NetworkSpec()


class TestIdealSearch:
    @pytest.mark.parametrize("seed", range(5))
    def test_recovers_reachable_point(self, seed):
        rng = np.random.default_rng(seed)
        codes = CapCodes.from_sequence(rng.integers(2, 30, 8))
        target = balance_gamma(codes, NET, 915e6)
        found, gamma = ideal_search(target, NET)
        assert abs(gamma - target) < 1e-5  # a neighbouring state, not always the same codes

    def test_returned_gamma_matches_codes(self):
        found, gamma = ideal_search(0.1 - 0.2j, NET)
        assert balance_gamma(found, NET, 915e6) == pytest.approx(gamma, abs=1e-12)

    def test_match_stage2_shapes(self):
        s1 = np.array([[16, 16, 16, 16], [3, 9, 27, 12]])
        codes, err = match_stage2(s1, 0.05 + 0.02j, NET, 915e6)
        assert codes.shape == (2, 8) and err.shape == (2,)
        assert np.array_equal(codes[:, :4], s1)
        assert np.allclose(np.abs(balance_gamma(codes, NET, 915e6) - (0.05 + 0.02j)), err)

    def test_ideal_tune_reports_cancellation(self):
        res = ideal_tune(0.3j, NET)
        g = balance_gamma(res.codes, NET, 915e6)
        assert res.cancellation_db == pytest.approx(cancellation_db(0.3j, g, CouplerSpec()))
        assert res.cancellation_db >= 78


class TestFlattest:
    def test_meets_carrier_requirement(self):
        res = flattest_tune(-0.2 + 0.25j, NET)
        assert res.cancellation_db >= 78

    def test_no_worse_offset_than_deepest(self):
        coupler = CouplerSpec()
        g = 0.3 + 0.1j

        def worst_offset(codes):
            return min(cancellation_db(g, balance_gamma(codes, NET, f), coupler) for f in (912e6, 918e6))

        assert worst_offset(flattest_tune(g, NET).codes) >= worst_offset(ideal_tune(g, NET).codes)
