import json
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sicancel import config as cfgmod
from sicancel.config import ConfigError, RunConfig
from sicancel.network import CapacitorSpec, NetworkSpec


class TestRoundTrip:
    def test_defaults(self, tmp_path):
        cfg = RunConfig()
        cfgmod.dump(cfg, tmp_path / "c.json")
        assert cfgmod.load(tmp_path / "c.json") == cfg

    @settings(max_examples=40)
    @given(
        st.floats(0.1e-12, 2e-12),
        st.floats(1e-9, 10e-9),
        st.integers(0, 2**64 - 1),
        st.floats(-40, -10),
    )
    def test_random(self, c_min, l2, seed, leak):
        cfg = RunConfig(seed=seed)
        cfg = replace(
            cfg,
            network=replace(cfg.network, cap=CapacitorSpec(c_min=c_min), l2=l2),
            coupler=replace(cfg.coupler, leak_mag_db=leak),
        )
        assert cfgmod.loads(cfgmod.dumps(cfg)) == cfg

    def test_exact_fields_are_strings(self):
        d = json.loads(cfgmod.dumps(RunConfig()))
        assert d["network"]["cap"]["c_min"] == "9e-13"
        assert isinstance(d["network"]["l1"], str)
        assert isinstance(d["network"]["r1"], float)

    def test_partial_file_keeps_defaults(self):
        cfg = cfgmod.loads('{"receiver": {"rssi_sigma_db": 0.0}, "seed": 5}')
        assert cfg.receiver.rssi_sigma_db == 0.0
        assert cfg.seed == 5
        assert cfg.network == NetworkSpec()


class TestRejects:
    @pytest.mark.parametrize(
        "text, where",
        [
            ('{"colour": 1}', "colour"),
            ('{"network": {"l5": "1e-9"}}', "network.l5"),
            ('{"network": {"cap": {"bits": 5}}}', "network.cap.bits"),
        ],
    )
    def test_unknown_keys_named(self, text, where):
        with pytest.raises(ConfigError, match=where):
            cfgmod.loads(text)

    def test_malformed_json_has_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            cfgmod.loads('{\n  "seed": ,\n}')

    @pytest.mark.parametrize(
        "text, where",
        [
            ('{"seed": -1}', "seed"),
            ('{"seed": 1.5}', "seed"),
            ('{"network": {"l1": "abc"}}', "network.l1"),
            ('{"network": {"r1": -3}}', "network"),
            ('{"receiver": {"rssi_avg_count": 2.5}}', "receiver.rssi_avg_count"),
            ('{"schedule": {"cooling_divisor": 1}}', "schedule"),
            ('{"output_dir": 3}', "output_dir"),
        ],
    )
    def test_invalid_values(self, text, where):
        with pytest.raises(ConfigError, match=where):
            cfgmod.loads(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="nope.json"):
            cfgmod.load(tmp_path / "nope.json")


def test_overrides_skip_none():
    cfg = RunConfig(seed=3).with_overrides(seed=None, output_dir="x")
    assert cfg.seed == 3 and cfg.output_dir == "x"
