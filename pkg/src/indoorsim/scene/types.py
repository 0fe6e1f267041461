"""Scene description types: geometry, materials, lights, physics, free space."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..geometry import RigidTransform

# manufacturer ranges for objects loaded from scene files
MASS_RANGE = (0.05, 43.3)       # kg
FRICTION_RANGE = (0.08, 0.27)   # dimensionless
NYU40_RANGE = (1, 40)


@dataclass
class Mesh:
    vertices: np.ndarray                    # (V, 3) meters
    triangles: np.ndarray                   # (T, 3) int vertex indices
    vertex_normals: np.ndarray | None = None  # (V, 3) unit
    uv: np.ndarray | None = None            # (V, 2)
    part_labels: np.ndarray | None = None    # (V,) int

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.vertex_normals is not None:
            self.vertex_normals = np.asarray(self.vertex_normals, dtype=float).reshape(-1, 3)
        if self.uv is not None:
            self.uv = np.asarray(self.uv, dtype=float).reshape(-1, 2)
        if self.part_labels is not None:
            self.part_labels = np.asarray(self.part_labels, dtype=np.int64).reshape(-1)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


def compute_vertex_normals(mesh: Mesh) -> np.ndarray:
    """Area-weighted average of incident face normals, unit length."""
    v = mesh.vertices
    t = mesh.triangles
    fn = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])  # 2*area * normal
    normals = np.zeros_like(v)
    for col in range(3):
        np.add.at(normals, t[:, col], fn)
    norm = np.linalg.norm(normals, axis=1, keepdims=True)
    norm[norm < 1e-20] = 1.0
    return normals / norm


@dataclass
class Material:
    name: str = "default"
    lambertian_albedo: np.ndarray = field(default_factory=lambda: np.array([0.7, 0.7, 0.7]))
    microfacet_roughness: float = 0.5       # (0, 1]
    microfacet_tint: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0, 1.0]))
    dielectric_ior: float = 1.5             # >= 1
    transmission: np.ndarray = field(default_factory=lambda: np.array([1.0, 1.0, 1.0]))
    lobe_weights: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    emission: np.ndarray = field(default_factory=lambda: np.zeros(3))  # radiance
    texture: str | np.ndarray | None = None  # image path (or array) modulating albedo

    def __post_init__(self):
        self.lambertian_albedo = np.asarray(self.lambertian_albedo, float).reshape(3)
        self.microfacet_tint = np.asarray(self.microfacet_tint, float).reshape(3)
        self.transmission = np.asarray(self.transmission, float).reshape(3)
        self.lobe_weights = np.asarray(self.lobe_weights, float).reshape(4)
        self.emission = np.asarray(self.emission, float).reshape(3)


class LightKind(Enum):
    SUN = "Sun"
    SPOT = "Spot"
    AREA = "Area"


@dataclass
class Light:
    kind: LightKind
    color: np.ndarray = field(default_factory=lambda: np.ones(3))
    brightness: float = 1.0                 # radiant power scale, >= 0
    temperature: float | None = None        # Kelvin in [1000, 12000], or None
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))  # unused for Sun
    direction: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -1.0]))
    max_distance: float = float("inf")      # meters
    cone_angle: float = np.pi / 4           # radians, Spot only (full cone apex angle)
    extent: tuple[float, float] = (0.5, 0.5)  # width/height meters, Area only
    enabled: bool = True

    def __post_init__(self):
        if isinstance(self.kind, str):
            self.kind = LightKind(self.kind)
        self.color = np.asarray(self.color, float).reshape(3)
        self.position = np.asarray(self.position, float).reshape(3)
        self.direction = np.asarray(self.direction, float).reshape(3)
        self.extent = (float(self.extent[0]), float(self.extent[1]))

    def effective_color(self) -> np.ndarray:
        """Linear RGB after applying the Kelvin temperature, if set."""
        if self.temperature is None:
            return self.color
        from ..scene_change import temperature_to_rgb

        return self.color * temperature_to_rgb(self.temperature)


@dataclass
class PhysicalProps:
    mass: float = 1.0                       # kg
    friction: float = 0.2
    movable: bool = False
    collision_hull: np.ndarray | None = None  # (N, 3) convex point set; None = mesh AABB

    def __post_init__(self):
        if self.collision_hull is not None:
            self.collision_hull = np.asarray(self.collision_hull, float).reshape(-1, 3)


@dataclass
class SceneObject:
    name: str
    mesh: Mesh
    material: Material
    pose: RigidTransform = field(default_factory=RigidTransform.identity)
    nyu40_class: int = 40                   # "otherprop"
    instance_id: int = 0                    # assigned at load, unique per scene
    physical: PhysicalProps = field(default_factory=PhysicalProps)
    mesh_path: str | None = None            # source path, kept for serialization

    def world_aabb(self) -> tuple[np.ndarray, np.ndarray]:
        """AABB of the collision hull (or mesh) in world coordinates."""
        pts = self.physical.collision_hull
        if pts is None:
            pts = self.mesh.vertices
        world = self.pose.apply(pts)
        return world.min(axis=0), world.max(axis=0)

    def moved(self, new_pose: RigidTransform) -> "SceneObject":
        return replace(self, pose=new_pose)


@dataclass
class Scene:
    name: str = "scene"
    objects: list[SceneObject] = field(default_factory=list)
    lights: list[Light] = field(default_factory=list)
    bounds: tuple[np.ndarray, np.ndarray] = (
        np.array([-5.0, -5.0, 0.0]),
        np.array([5.0, 5.0, 3.0]),
    )
    floor_height: float = 0.0
    env_radiance: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.bounds = (
            np.asarray(self.bounds[0], float).reshape(3),
            np.asarray(self.bounds[1], float).reshape(3),
        )
        self.env_radiance = np.asarray(self.env_radiance, float).reshape(3)

    def enabled_lights(self) -> list[Light]:
        return [l for l in self.lights if l.enabled]

    def object_by_instance(self, instance_id: int) -> SceneObject:
        for obj in self.objects:
            if obj.instance_id == instance_id:
                return obj
        raise KeyError(f"no object with instance_id {instance_id}")


@dataclass
class FreeSpaceMap:
    resolution: float                       # meters per cell
    origin: np.ndarray                      # world position of grid corner (cell [0,0,0] min)
    occupancy: np.ndarray                   # (nx, ny, nz) bool, True = occupied
    floor_height: float = 0.0

    def __post_init__(self):
        self.origin = np.asarray(self.origin, float).reshape(3)
        self.occupancy = np.asarray(self.occupancy, bool)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.occupancy.shape

    def world_to_cell(self, point) -> tuple[int, int, int]:
        idx = np.floor((np.asarray(point, float) - self.origin) / self.resolution).astype(int)
        return int(idx[0]), int(idx[1]), int(idx[2])

    def is_free(self, point) -> bool:
        """True when the containing cell exists and is unoccupied."""
        i, j, k = self.world_to_cell(point)
        nx, ny, nz = self.occupancy.shape
        if not (0 <= i < nx and 0 <= j < ny and 0 <= k < nz):
            return False
        return not self.occupancy[i, j, k]

    def free_cell_centers(self) -> np.ndarray:
        """World centers of all free cells, (N, 3)."""
        idx = np.argwhere(~self.occupancy)
        return self.origin + (idx + 0.5) * self.resolution
