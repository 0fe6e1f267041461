import numpy as np
import pytest

from indoorsim.geometry import RigidTransform
from indoorsim.scene import (
    Mesh,
    Scene,
    SceneObject,
    SceneValidationError,
    compute_free_space,
    load_obj,
    load_scene,
    make_box_mesh,
    save_obj,
    save_scene,
    validate_scene,
)

MINIMAL_SCENE = """\
meta:
  name: minimal
  bounds: {min: [-2.0, -2.0, -2.0], max: [2.0, 2.0, 2.0]}
  floor_height: -2.0
materials:
  - name: gray
    lambertian_albedo: [0.5, 0.5, 0.5]
lights:
  - kind: Area
    position: [0.0, 0.0, 1.8]
    direction: [0.0, 0.0, -1.0]
    extent: [0.5, 0.5]
    brightness: 5.0
objects:
  - name: cube
    mesh: cube.obj
    material: gray
    pose: {translation: [0.0, 0.0, 0.0]}
    nyu40_class: 40
    movable: true
    mass: 1.0
    friction: 0.2
"""


def write_minimal_scene(tmp_path, yaml_text=MINIMAL_SCENE):
    save_obj(make_box_mesh((1.0, 1.0, 1.0)), tmp_path / "cube.obj")
    path = tmp_path / "scene.yaml"
    path.write_text(yaml_text)
    return path


class TestLoadScene:
    def test_minimal_scene(self, tmp_path):
        scene = load_scene(write_minimal_scene(tmp_path))
        assert len(scene.objects) == 1
        assert len(scene.lights) == 1
        assert scene.objects[0].mesh.num_triangles == 12

    def test_out_of_range_mass_names_field(self, tmp_path):
        bad = MINIMAL_SCENE.replace("mass: 1.0", "mass: 50.0")
        with pytest.raises(SceneValidationError, match=r"objects\[0\].mass"):
            load_scene(write_minimal_scene(tmp_path, bad))

    def test_out_of_range_friction(self, tmp_path):
        bad = MINIMAL_SCENE.replace("friction: 0.2", "friction: 0.5")
        with pytest.raises(SceneValidationError, match="friction"):
            load_scene(write_minimal_scene(tmp_path, bad))

    def test_toy_room_instance_ids(self, toy_room):
        ids = [o.instance_id for o in toy_room.objects]
        assert ids == list(range(1, 13))
        assert len(set(ids)) == 12

    def test_missing_mesh_reports_path(self, tmp_path):
        bad = MINIMAL_SCENE.replace("cube.obj", "nope.obj")
        path = tmp_path / "scene.yaml"
        path.write_text(bad)
        with pytest.raises(Exception, match="nope.obj"):
            load_scene(path)


class TestRoundTrip:
    def test_load_save_load_identical(self, tmp_path, toy_room_path):
        first = load_scene(toy_room_path)
        out = tmp_path / "copy"
        out.mkdir()
        save_scene(first, out / "scene.yaml", write_meshes=True)
        second = load_scene(out / "scene.yaml")
        assert len(second.objects) == len(first.objects)
        assert np.allclose(second.bounds[0], first.bounds[0])
        assert np.allclose(second.bounds[1], first.bounds[1])
        for a, b in zip(first.objects, second.objects):
            assert a.name == b.name
            assert a.instance_id == b.instance_id
            assert a.nyu40_class == b.nyu40_class
            assert a.physical.movable == b.physical.movable
            assert a.physical.mass == b.physical.mass
            assert a.physical.friction == b.physical.friction
            assert np.array_equal(a.pose.translation, b.pose.translation)
            assert np.array_equal(a.pose.rotation, b.pose.rotation)
            assert np.array_equal(a.mesh.vertices, b.mesh.vertices)
            assert np.array_equal(a.mesh.triangles, b.mesh.triangles)
        for a, b in zip(first.lights, second.lights):
            assert a.kind == b.kind
            assert a.enabled == b.enabled
            assert np.allclose(a.direction, b.direction)
            assert a.brightness == b.brightness


class TestObjIO:
    def test_obj_round_trip(self, tmp_path):
        mesh = make_box_mesh((1.0, 2.0, 0.5), center=(0.3, 0, 0))
        save_obj(mesh, tmp_path / "m.obj")
        back = load_obj(tmp_path / "m.obj")
        assert np.allclose(back.vertices, mesh.vertices)
        assert np.array_equal(back.triangles, mesh.triangles)
        assert np.allclose(back.vertex_normals, mesh.vertex_normals, atol=1e-12)

    def test_missing_normals_computed(self, tmp_path):
        (tmp_path / "tri.obj").write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        mesh = load_obj(tmp_path / "tri.obj")
        assert mesh.vertex_normals is not None
        assert np.allclose(mesh.vertex_normals, [[0, 0, 1]] * 3)


class TestValidate:
    def test_valid_fixture_empty(self, toy_room):
        assert validate_scene(toy_room) == []

    def test_short_normal_flagged(self):
        mesh = make_box_mesh((1, 1, 1))
        mesh.vertex_normals[3] = [0.5, 0.0, 0.0]
        obj = SceneObject("bad", mesh, material=_gray(), instance_id=1)
        scene = _tiny_scene([obj])
        violations = validate_scene(scene)
        assert any("vertex_normals[3]" in str(v) for v in violations)

    def test_duplicate_instance_id_names_both(self):
        a = SceneObject("alpha", make_box_mesh((1, 1, 1)), material=_gray(), instance_id=4)
        b = SceneObject(
            "beta", make_box_mesh((1, 1, 1)), material=_gray(),
            pose=RigidTransform(translation=[1.5, 0, 0]), instance_id=4,
        )
        violations = validate_scene(_tiny_scene([a, b]))
        dup = [v for v in violations if "duplicate" in v.rule]
        assert len(dup) == 1
        assert "alpha" in dup[0].rule and dup[0].where == "beta"


def _gray():
    from indoorsim.scene import Material

    return Material(name="gray")


def _tiny_scene(objects):
    from indoorsim.scene import Light, LightKind

    return Scene(
        objects=objects,
        lights=[Light(kind=LightKind.AREA, position=np.array([0, 0, 2.0]))],
        bounds=(np.array([-3.0, -3.0, -3.0]), np.array([3.0, 3.0, 3.0])),
    )


class TestFreeSpace:
    def test_empty_room_all_free(self):
        scene = Scene(objects=[], lights=[], bounds=(np.zeros(3), np.ones(3) * 4))
        free = compute_free_space(scene, 0.25)
        assert not free.occupancy.any()

    def test_unit_cube_covers_4x4x4_cells(self):
        cube = SceneObject("cube", make_box_mesh((1, 1, 1)), material=_gray(), instance_id=1)
        scene = Scene(
            objects=[cube], lights=[],
            bounds=(np.array([-2.0, -2.0, -2.0]), np.array([2.0, 2.0, 2.0])),
        )
        free = compute_free_space(scene, 0.25)
        assert int(free.occupancy.sum()) == 4 * 4 * 4
        occ = np.argwhere(free.occupancy)
        assert occ.min() == 6 and occ.max() == 9

    def test_point_inside_wall_occupied(self, toy_room, toy_free):
        assert not toy_free.is_free([-0.05, 2.5, 1.5])

    def test_soundness_random_hull_points(self, toy_room, toy_free):
        rng = np.random.default_rng(0)
        count = 0
        for obj in toy_room.objects:
            lo, hi = obj.world_aabb()
            pts = rng.uniform(lo + 1e-9, hi - 1e-9, size=(84, 3))
            for p in pts:
                assert not toy_free.is_free(p)
                count += 1
        assert count >= 1000

    def test_monotone_refinement(self, toy_room):
        coarse = compute_free_space(toy_room, 0.5)
        fine = compute_free_space(toy_room, 0.25)
        # a point in a free coarse cell is never occupied at finer resolution
        centers = coarse.free_cell_centers()
        for c in centers[:: max(1, len(centers) // 500)]:
            assert fine.is_free(c)

    def test_cell_larger_than_extent_rejected(self):
        scene = Scene(objects=[], lights=[], bounds=(np.zeros(3), np.ones(3)))
        with pytest.raises(ValueError):
            compute_free_space(scene, 2.0)
