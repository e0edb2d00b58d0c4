import math
import os
from pathlib import Path

import numpy as np
import pytest

import nodalsim

FIXTURES = Path(os.environ.get("NODAL_FIXTURE_DIR", Path(__file__).resolve().parent.parent / "fixtures"))


def fixture(name):
    return str(FIXTURES / name)


@pytest.fixture
def two_zone():
    return nodalsim.load_building(fixture("two_zone.json"))


def test_load_and_validate(two_zone):
    assert two_zone.zones == ["z1", "z2"]
    assert len(two_zone.walls) == 7
    assert two_zone.validate() == []


def test_round_trip(two_zone):
    assert nodalsim.parse_building(two_zone.serialize()) == two_zone


def test_wall_rc_matches_layer_sums(two_zone):
    r, c = two_zone.wall_rc("partition")
    assert r > 0 and c > 0
    with pytest.raises(nodalsim.ReferenceError):
        two_zone.wall_rc("nope")


def test_errors_map_to_python():
    with pytest.raises(nodalsim.IoError):
        nodalsim.load_building(fixture("missing.json"))
    with pytest.raises(nodalsim.ParseError):
        nodalsim.parse_building("{")
    assert issubclass(nodalsim.SolverError, nodalsim.NodalError)


def test_unit_two_zone_structure_and_merge():
    b = nodalsim.load_building(fixture("two_zone_unit.json"))
    s = nodalsim.generate_nodes(b)
    assert len(s) == 18
    assert s.node_zones(7) == ["z1", "z2"]
    assert s.zone_nodes("z1") == [1, 2, 3, 4, 5, 6, 7, 8, 15, 16]
    merged = nodalsim.merge_zones(s, "z1", "z2")
    assert len(merged) == 16
    assert merged.types[6] == 6 and merged.types[7] == 6
    assert merged.to_csv().count("\n") == 17


def test_weather_interpolation(two_zone):
    w = nodalsim.parse_weather("t,T_ae,T_sky\n0,0,-4\n3600,10,6\n", two_zone)
    mid = w.at(1800.0)
    assert mid["T_ae"] == pytest.approx(5.0)
    assert mid["T_sky"] == pytest.approx(1.0)
    assert not mid["extrapolated"]
    assert w.at(7200.0)["extrapolated"]


def test_simulate_with_oracle(two_zone):
    w = nodalsim.load_weather(fixture("weather_sine.csv"), two_zone)
    cfg = nodalsim.IntegratorConfig.from_building(two_zone)
    cfg.horizon = 24 * 3600.0
    r = nodalsim.simulate(two_zone, w, cfg, oracle=True)
    T = r.temperatures
    assert T.shape == (145, 18)
    assert len(r.times) == 145
    assert r.all_converged()
    assert r.max_oracle_diff() < 1e-5
    assert np.all(np.isfinite(T))


def test_theta_out_of_range_rejected(two_zone):
    cfg = nodalsim.IntegratorConfig()
    cfg.theta = 0.3
    with pytest.raises(nodalsim.NodalError):
        cfg.validate()


def test_steady_state_uniform(two_zone):
    w = nodalsim.constant_weather(15.0, 15.0, 15.0)
    T = nodalsim.steady_state(two_zone, w)
    assert np.allclose(T, 15.0, rtol=0, atol=1e-10)


def test_simulate_merged_structure(two_zone):
    s = nodalsim.merge_zones(nodalsim.generate_nodes(two_zone), "z1", "z2")
    w = nodalsim.constant_weather(5.0, 0.0, 10.0)
    cfg = nodalsim.IntegratorConfig()
    cfg.dt = 3600.0
    cfg.horizon = 6 * 3600.0
    cfg.initial_temperature = 20.0
    r = nodalsim.simulate(two_zone, w, cfg, structure=s)
    air = r.temperatures[:, s.air_node("z1+z2") - 1]
    assert air.shape == (7,)
    assert air[0] == 20.0
    assert np.all(np.diff(air) < 0)
    assert all(math.isfinite(x) for x in r.residuals)
