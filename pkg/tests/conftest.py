import os

import numpy as np
import pytest

from indoorsim.geometry import look_at_pose
from indoorsim.render import prepare_scene
from indoorsim.scene import (
    Material,
    Scene,
    SceneObject,
    compute_free_space,
    load_scene,
    make_sphere_mesh,
)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
TOY_ROOM = os.path.join(REPO_ROOT, "scenes", "toy_room", "toy_room.yaml")
DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


@pytest.fixture(scope="session")
def toy_room_path():
    assert os.path.exists(TOY_ROOM), "sample scene missing; run scenes/make_toy_room.py"
    return TOY_ROOM


@pytest.fixture(scope="session")
def toy_room(toy_room_path):
    return load_scene(toy_room_path)


@pytest.fixture(scope="session")
def toy_free(toy_room):
    return compute_free_space(toy_room, 0.25)


@pytest.fixture(scope="session")
def toy_packed(toy_room):
    return prepare_scene(toy_room)


def build_furnace_scene(albedo=0.5, subdivisions=24) -> Scene:
    """Lambertian sphere in a uniform unit environment (closed-form 0.5)."""
    mesh = make_sphere_mesh(radius=1.0, subdivisions=subdivisions)
    mat = Material(
        name="gray",
        lambertian_albedo=[albedo] * 3,
        lobe_weights=[1.0, 0.0, 0.0, 0.0],
    )
    obj = SceneObject("sphere", mesh, mat, nyu40_class=40, instance_id=1)
    return Scene(
        name="furnace",
        objects=[obj],
        lights=[],
        bounds=(np.array([-3.0, -3.0, -3.0]), np.array([3.0, 3.0, 3.0])),
        floor_height=-3.0,
        env_radiance=[1.0, 1.0, 1.0],
    )


@pytest.fixture(scope="session")
def furnace_scene():
    return build_furnace_scene()


@pytest.fixture(scope="session")
def furnace_packed(furnace_scene):
    return prepare_scene(furnace_scene)


@pytest.fixture(scope="session")
def furnace_pose():
    return look_at_pose([0.0, -3.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0])


@pytest.fixture(scope="session")
def walking_fixture_path():
    path = os.path.join(DATA_DIR, "walking_tum.txt")
    assert os.path.exists(path), "run tests/data/make_walking_fixture.py"
    return path
