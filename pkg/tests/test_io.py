"""Serialization tests: canonical JSON, surface files, CSV tables, OBJ export."""

import csv
import math

import numpy as np
import pytest

from curvedual import DataError, HarmonicCoeffs, build_grid, sphere_surface
from curvedual.geometry import GraphSurface, curvature_field
from curvedual.io import (
    dumps_canonical,
    format_float,
    read_surface,
    surface_from_dict,
    surface_to_dict,
    write_field_csv,
    write_nodes_csv,
    write_obj,
    write_surface,
)
from curvedual.polar import gauss_map
from curvedual.spectral import lm_index


def random_surface(L_max=8, seed=3, scale=0.01):
    rng = np.random.default_rng(seed)
    radial = HarmonicCoeffs.zeros(L_max)
    radial.values[:] = scale * rng.standard_normal(radial.values.shape)
    radial[0, 0] = (np.pi / 4) * math.sqrt(4.0 * np.pi)
    return GraphSurface(n=2, pole=np.array([0.0, 0.0, 0.0, 1.0]),
                        radial=radial, gauge_tau0=-2.3)


class TestFloatFormat:
    def test_seventeen_digits_round_trip(self):
        rng = np.random.default_rng(11)
        for x in rng.standard_normal(200) * 10.0 ** rng.integers(-8, 8, 200):
            assert float(format_float(x)) == x

    def test_integral_floats_stay_short(self):
        assert format_float(1.0) == "1"
        assert format_float(-4.0) == "-4"

    def test_known_value(self):
        assert format_float(0.1) == "0.10000000000000001"


class TestCanonicalJson:
    def test_scalars(self):
        assert dumps_canonical(True) == "true"
        assert dumps_canonical(None) == "null"
        assert dumps_canonical(3) == "3"
        assert dumps_canonical("a\"b\\c") == '"a\\"b\\\\c"'

    def test_non_finite_become_quoted_strings(self):
        assert dumps_canonical(float("nan")) == '"nan"'
        assert dumps_canonical(float("inf")) == '"inf"'
        assert dumps_canonical(float("-inf")) == '"-inf"'

    def test_numeric_lists_inline(self):
        assert dumps_canonical([1.5, 2.5, -3.0]) == "[1.5, 2.5, -3]"

    def test_nested_layout(self):
        doc = {"a": 1, "b": {"c": [1.0, 2.0]}}
        expected = '{\n  "a": 1,\n  "b": {\n    "c": [1, 2]\n  }\n}'
        assert dumps_canonical(doc) == expected

    def test_key_order_preserved(self):
        out = dumps_canonical({"z": 1, "a": 2})
        assert out.index('"z"') < out.index('"a"')

    def test_deterministic_bytes(self):
        doc = {"x": [0.1, float(np.pi)], "flag": False}
        assert dumps_canonical(doc) == dumps_canonical(doc)

    def test_numpy_scalars_accepted(self):
        out = dumps_canonical({"v": np.float64(0.5), "k": np.int64(7)})
        assert '"v": 0.5' in out and '"k": 7' in out


class TestSurfaceFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        surface = random_surface()
        path = tmp_path / "surface.json"
        write_surface(path, surface)
        back = read_surface(path)
        # 17 significant digits reproduce every double exactly
        assert np.array_equal(back.radial.values, surface.radial.values)
        assert back.gauge_tau0 == surface.gauge_tau0
        assert np.array_equal(back.pole, surface.pole)
        assert back.L_max == surface.L_max
        assert back.n == surface.n

    def test_zero_coefficients_dropped(self):
        surface = sphere_surface(np.pi / 4, L_max=6)
        doc = surface_to_dict(surface)
        assert len(doc["radial"]) == 1
        assert doc["radial"][0]["l"] == 0 and doc["radial"][0]["m"] == 0

    def test_rejects_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"n": 2, "pole": [0')
        with pytest.raises(DataError):
            read_surface(path)

    def test_rejects_unknown_keys(self):
        doc = surface_to_dict(sphere_surface(np.pi / 4, L_max=4))
        doc["extra"] = 1
        with pytest.raises(DataError, match="unknown surface keys"):
            surface_from_dict(doc)

    def test_rejects_missing_field(self):
        doc = surface_to_dict(sphere_surface(np.pi / 4, L_max=4))
        del doc["gauge_tau0"]
        with pytest.raises(DataError, match="malformed"):
            surface_from_dict(doc)

    def test_rejects_mode_outside_truncation(self):
        doc = surface_to_dict(sphere_surface(np.pi / 4, L_max=4))
        doc["radial"].append({"l": 5, "m": 0, "value": 0.1})
        with pytest.raises(DataError, match="outside truncation"):
            surface_from_dict(doc)

    def test_rejects_bad_order_pair(self):
        doc = surface_to_dict(sphere_surface(np.pi / 4, L_max=4))
        doc["radial"].append({"l": 2, "m": 3, "value": 0.1})
        with pytest.raises(DataError):
            surface_from_dict(doc)

    def test_rejects_short_pole(self):
        doc = surface_to_dict(sphere_surface(np.pi / 4, L_max=4))
        doc["pole"] = [0.0, 0.0, 1.0]
        with pytest.raises(DataError, match="invalid"):
            surface_from_dict(doc)


class TestCsvTables:
    def test_field_csv_header_and_values(self, tmp_path):
        path = tmp_path / "field.csv"
        theta = np.array([0.5, 1.0])
        phi = np.array([0.0, 2.0])
        values = np.array([1.25, -0.5])
        write_field_csv(path, theta, phi, values)
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["theta", "phi", "value"]
        assert len(rows) == 3
        assert float(rows[1][2]) == 1.25

    def test_nodes_csv_header(self, tmp_path):
        surface = sphere_surface(np.pi / 4, L_max=6)
        field = curvature_field(surface, build_grid(6))
        path = tmp_path / "nodes.csv"
        write_nodes_csv(path, field)
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["theta", "phi", "r", "kappa1", "kappa2",
                           "x0", "x1", "x2", "x3", "n0", "n1", "n2", "n3"]
        assert len(rows) == 1 + field.grid.n_nodes
        # sphere row: r = pi/4, both curvatures cot(pi/4) = 1
        assert float(rows[1][2]) == pytest.approx(np.pi / 4, abs=1e-12)
        assert float(rows[1][3]) == pytest.approx(1.0, abs=1e-10)

    def test_dual_samples_csv_header(self, tmp_path):
        from curvedual.io import write_dual_samples_csv

        surface = sphere_surface(np.pi / 4, L_max=6)
        samples = gauss_map(curvature_field(surface, build_grid(6)))
        path = tmp_path / "dual.csv"
        write_dual_samples_csv(path, samples)
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["theta", "phi", "eta_theta", "eta_phi",
                           "r_star", "kt1", "kt2"]
        assert float(rows[1][4]) == pytest.approx(np.pi / 4, abs=1e-10)


class TestObjExport:
    def test_sphere_vertices_on_image_sphere(self, tmp_path):
        radius = np.pi / 4
        surface = sphere_surface(radius, L_max=8)
        path = tmp_path / "sphere.obj"
        write_obj(path, surface)
        verts = []
        faces = []
        for line in path.read_text().splitlines():
            if line.startswith("v "):
                verts.append([float(t) for t in line.split()[1:]])
            elif line.startswith("f "):
                faces.append([int(t) for t in line.split()[1:]])
        verts = np.asarray(verts)
        grid = build_grid(8)
        assert verts.shape == (grid.n_nodes + 2, 3)
        # stereographic image of a centered geodesic sphere: radius 2 tan(r/2)
        image_radius = 2.0 * math.tan(radius / 2.0)
        assert np.max(np.abs(np.linalg.norm(verts, axis=1) - image_radius)) < 1e-9

    def test_faces_are_triangles_with_valid_ids(self, tmp_path):
        surface = sphere_surface(np.pi / 3, L_max=6)
        path = tmp_path / "mesh.obj"
        write_obj(path, surface)
        n_verts = 0
        faces = []
        for line in path.read_text().splitlines():
            if line.startswith("v "):
                n_verts += 1
            elif line.startswith("f "):
                faces.append([int(t) for t in line.split()[1:]])
        grid = build_grid(6)
        assert all(len(f) == 3 for f in faces)
        ids = np.asarray(faces)
        assert ids.min() >= 1 and ids.max() <= n_verts
        # strip quads split in two plus one fan per pole
        expected = 2 * (grid.n_theta - 1) * grid.n_phi + 2 * grid.n_phi
        assert len(faces) == expected
