import json

import numpy as np
import pytest

from nmrdj.oracle import CROTONIC_LABELS
from nmrdj.spins import (
    Spin,
    SpinSystem,
    SpinSystemError,
    crotonic_acid,
    dumps_system,
    load_system,
    system_to_dict,
    topology_of,
)


def toy_doc(j12=7.0, j21=7.0):
    return {
        "provenance": "toy",
        "spins": [
            {"label": "A", "species": "1H", "shift_hz": 0.0},
            {"label": "B", "species": "1H", "shift_hz": 100.0},
        ],
        "j_hz": [[0.0, j12], [j21, 0.0]],
    }


class TestLoad:
    def test_bundled_crotonic(self):
        system = crotonic_acid()
        assert system.labels == CROTONIC_LABELS
        assert system.n == 7
        assert [s.species for s in system.spins] == ["13C"] * 4 + ["1H"] * 3
        assert [s.multiplicity for s in system.spins] == [1] * 6 + [3]
        assert "placeholder" in system.provenance.lower()
        jm = system.j_hz
        assert np.array_equal(jm, jm.T)
        assert all(jm[k, k + 1] != 0 for k in range(6))

    def test_by_path(self, tmp_path):
        p = tmp_path / "toy.json"
        p.write_text(json.dumps(toy_doc()))
        system = load_system(p)
        assert system.coupling(1, 2) == 7.0
        assert [s.shift_hz for s in system.spins] == [0.0, 100.0]

    def test_two_spin_toy(self):
        system = load_system(toy_doc())
        assert system.n == 2 and system.labels == ("A", "B")
        assert system.index("B") == 2

    def test_asymmetric(self):
        with pytest.raises(SpinSystemError, match="asymmetric"):
            load_system(toy_doc(7.0, 7.5))

    def test_zero_adjacent(self):
        with pytest.raises(SpinSystemError, match="zero coupling"):
            load_system(toy_doc(0.0, 0.0))

    def test_duplicate_label(self):
        doc = toy_doc()
        doc["spins"][1]["label"] = "A"
        with pytest.raises(SpinSystemError, match="duplicate"):
            load_system(doc)

    def test_bad_multiplicity(self):
        doc = toy_doc()
        doc["spins"][0]["multiplicity"] = 0
        with pytest.raises(SpinSystemError):
            load_system(doc)

    def test_nonzero_diagonal(self):
        doc = toy_doc()
        doc["j_hz"][0][0] = 1.0
        with pytest.raises(SpinSystemError):
            load_system(doc)

    def test_wrong_shape(self):
        doc = toy_doc()
        doc["j_hz"] = [[0.0]]
        with pytest.raises(SpinSystemError):
            load_system(doc)

    def test_missing_field(self):
        with pytest.raises(SpinSystemError):
            load_system({"spins": []})

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpinSystemError):
            load_system(tmp_path / "nope.json")

    def test_bad_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(SpinSystemError):
            load_system(p)

    def test_unknown_label(self):
        with pytest.raises(SpinSystemError):
            crotonic_acid().index("H9")


class TestRoundtrip:
    def test_crotonic(self):
        system = crotonic_acid()
        assert load_system(json.loads(dumps_system(system))) == system

    def test_chain(self):
        system = SpinSystem.chain(5, j=3.5, spacing_hz=12.25, gamma=0.5)
        assert load_system(system_to_dict(system)) == system

    def test_with_gammas(self):
        system = crotonic_acid().with_gammas(range(1, 8))
        np.testing.assert_array_equal(system.gammas, np.arange(1, 8))
        assert load_system(json.loads(dumps_system(system))) == system


class TestTopology:
    def test_seven(self):
        topo = topology_of(crotonic_acid())
        assert topo.edges == [(k, k + 1) for k in range(1, 7)]

    def test_two(self):
        assert topology_of(load_system(toy_doc())).edges == [(1, 2)]
        assert topology_of(load_system(toy_doc())).j_hz(1, 2) == 7.0

    def test_one(self):
        system = SpinSystem((Spin("A", "1H"),), [[0.0]])
        assert topology_of(system).edges == []

    @pytest.mark.parametrize("n", range(1, 13))
    def test_connected_path(self, n):
        edges = topology_of(SpinSystem.chain(n)).edges
        assert len(edges) == n - 1
        reached = {1}
        for k, l in edges:
            assert l == k + 1 and k in reached
            reached.add(l)
        assert reached == set(range(1, n + 1))
