import json

import numpy as np
import pytest

from kemst.errors import ParameterError
from kemst.scenario_io import (
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from kemst.scenarios import (
    KineticScenario,
    gen_chebyshev,
    gen_circle,
    gen_diamond,
    gen_rational_bumps,
    gen_split,
)
from kemst.trajectories import linear


@pytest.mark.parametrize(
    "sc",
    [
        gen_chebyshev(3, 5, k=0.1),
        gen_rational_bumps(4, 4),
        gen_circle(6, e_len=0.07),
        gen_diamond(5),
        gen_split(6),
    ],
    ids=["chebyshev", "bumps", "circle", "diamond", "split"],
)
def test_generator_scenarios_round_trip(tmp_path, sc):
    path = tmp_path / "sc.json"
    save_scenario(path, sc)
    back = load_scenario(path)
    assert back.n == sc.n and back.dim == sc.dim and back.horizon == sc.horizon
    assert back.label == sc.label and back.k == sc.k
    for t in np.linspace(0.0, sc.horizon, 7):
        np.testing.assert_allclose(
            back.positions(float(t)), sc.positions(float(t)), atol=1e-12
        )
    # generator files keep their construction metadata
    assert back.meta.get("generator") == sc.meta.get("generator")


def test_explicit_points_round_trip(tmp_path):
    sc = KineticScenario(
        points=(linear([0.0, 0.0], [1.0, 0.5], 2.0), linear([1.0, 1.0], [0.0, 1.0], 2.0)),
        k=0.25,
        label="pair",
    )
    path = tmp_path / "pair.json"
    save_scenario(path, sc)
    back = load_scenario(path)
    assert back.k == 0.25 and back.label == "pair"
    for t in (0.0, 0.7, 2.0):
        np.testing.assert_allclose(back.positions(t), sc.positions(t), atol=1e-15)


def test_format_version_rejected():
    data = scenario_to_dict(gen_split(4))
    data["format_version"] = 99
    with pytest.raises(ParameterError):
        scenario_from_dict(data)


def test_point_count_mismatch_rejected(tmp_path):
    sc = KineticScenario(points=(linear([0.0], [1.0], 1.0), linear([1.0], [0.0], 1.0)))
    data = scenario_to_dict(sc)
    data["n"] = 3
    with pytest.raises(ParameterError):
        scenario_from_dict(data)


def test_scenario_json_is_versioned_text(tmp_path):
    path = tmp_path / "v.json"
    save_scenario(path, gen_split(4))
    raw = json.loads(path.read_text())
    assert raw["format_version"] == 1
    assert raw["generator"]["name"] == "split"
