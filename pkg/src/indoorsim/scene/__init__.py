from .types import (
    FreeSpaceMap,
    Light,
    LightKind,
    Material,
    Mesh,
    PhysicalProps,
    Scene,
    SceneObject,
    compute_vertex_normals,
)
from .obj_io import MeshFormatError, load_obj, make_box_mesh, make_sphere_mesh, save_obj
from .loader import (
    SceneFormatError,
    SceneValidationError,
    Violation,
    load_scene,
    save_scene,
    validate_scene,
)
from .freespace import compute_free_space

__all__ = [
    "FreeSpaceMap",
    "Light",
    "LightKind",
    "Material",
    "Mesh",
    "MeshFormatError",
    "PhysicalProps",
    "Scene",
    "SceneFormatError",
    "SceneObject",
    "SceneValidationError",
    "Violation",
    "compute_free_space",
    "compute_vertex_normals",
    "load_obj",
    "load_scene",
    "make_box_mesh",
    "make_sphere_mesh",
    "save_obj",
    "save_scene",
    "validate_scene",
]
