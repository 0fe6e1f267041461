"""Scene file loading, serialization and invariant validation.

Scene files are YAML documents with sections:

    meta:       name, bounds {min: [x,y,z], max: [x,y,z]}, floor_height,
                optional env_radiance [r,g,b]
    materials:  list of {name, lambertian_albedo, microfacet_roughness,
                microfacet_tint, dielectric_ior, transmission, lobe_weights,
                emission, texture}
    lights:     list of {kind, color, brightness, temperature, position,
                direction, max_distance, cone_angle, extent, enabled}
    objects:    list of {name, mesh (path relative to the scene file),
                material (name), pose {translation, rotation}, nyu40_class,
                movable, mass, friction}

Lengths in meters, angles in radians, colors linear RGB in [0, 1].
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import yaml

from ..geometry import RigidTransform
from .obj_io import load_obj, save_obj
from .types import (
    FRICTION_RANGE,
    MASS_RANGE,
    NYU40_RANGE,
    Light,
    Material,
    PhysicalProps,
    Scene,
    SceneObject,
)


class SceneFormatError(ValueError):
    """Malformed scene file (parse failure)."""


class SceneValidationError(ValueError):
    """Well-formed file with out-of-range values; message carries the field path."""


@dataclass
class Violation:
    where: str      # object / light name or scene-level tag
    field: str
    rule: str

    def __str__(self):
        return f"{self.where}.{self.field}: {self.rule}"


def load_scene(path: str | os.PathLike) -> Scene:
    """Load and fully resolve a scene file; validates invariants on the way."""
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise SceneFormatError(f"{path}: not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise SceneFormatError(f"{path}: top level must be a mapping")

    base = os.path.dirname(os.path.abspath(path))
    meta = doc.get("meta", {})
    bounds_raw = meta.get("bounds", {"min": [-5, -5, 0], "max": [5, 5, 3]})
    try:
        bounds = (np.asarray(bounds_raw["min"], float), np.asarray(bounds_raw["max"], float))
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneFormatError(f"{path}: meta.bounds must carry 'min' and 'max' triples") from exc

    materials: dict[str, Material] = {}
    for i, mdoc in enumerate(doc.get("materials", []) or []):
        mat = _parse_material(mdoc, f"materials[{i}]", base)
        materials[mat.name] = mat

    lights = [_parse_light(ldoc, f"lights[{i}]") for i, ldoc in enumerate(doc.get("lights", []) or [])]

    objects = []
    next_id = 1
    for i, odoc in enumerate(doc.get("objects", []) or []):
        where = f"objects[{i}]"
        if "mesh" not in odoc:
            raise SceneFormatError(f"{where}.mesh: missing mesh path")
        mesh_path = odoc["mesh"]
        resolved = mesh_path if os.path.isabs(mesh_path) else os.path.join(base, mesh_path)
        if not os.path.exists(resolved):
            raise SceneFormatError(f"{where}.mesh: file not found: {resolved}")
        mesh = load_obj(resolved)

        mat_name = odoc.get("material", "default")
        if mat_name not in materials:
            if mat_name == "default":
                materials["default"] = Material()
            else:
                raise SceneFormatError(f"{where}.material: unknown material {mat_name!r}")

        pose_doc = odoc.get("pose", {})
        pose = RigidTransform(
            rotation=np.asarray(pose_doc.get("rotation", [0, 0, 0]), float),
            translation=np.asarray(pose_doc.get("translation", [0, 0, 0]), float),
        )

        mass = float(odoc.get("mass", 1.0))
        if not (MASS_RANGE[0] <= mass <= MASS_RANGE[1]):
            raise SceneValidationError(
                f"{where}.mass: {mass} outside manufacturer range [{MASS_RANGE[0]}, {MASS_RANGE[1]}] kg"
            )
        friction = float(odoc.get("friction", 0.2))
        if not (FRICTION_RANGE[0] <= friction <= FRICTION_RANGE[1]):
            raise SceneValidationError(
                f"{where}.friction: {friction} outside manufacturer range "
                f"[{FRICTION_RANGE[0]}, {FRICTION_RANGE[1]}]"
            )
        nyu = int(odoc.get("nyu40_class", 40))
        if not (NYU40_RANGE[0] <= nyu <= NYU40_RANGE[1]):
            raise SceneValidationError(f"{where}.nyu40_class: {nyu} outside [1, 40]")

        hull = odoc.get("collision_hull")
        physical = PhysicalProps(
            mass=mass,
            friction=friction,
            movable=bool(odoc.get("movable", False)),
            collision_hull=np.asarray(hull, float) if hull is not None else None,
        )
        inst = int(odoc.get("instance_id", next_id))
        next_id = max(next_id, inst) + 1
        objects.append(
            SceneObject(
                name=odoc.get("name", f"object_{i}"),
                mesh=mesh,
                material=materials[mat_name],
                pose=pose,
                nyu40_class=nyu,
                instance_id=inst,
                physical=physical,
                mesh_path=os.path.abspath(resolved),
            )
        )

    scene = Scene(
        name=meta.get("name", os.path.splitext(os.path.basename(path))[0]),
        objects=objects,
        lights=lights,
        bounds=bounds,
        floor_height=float(meta.get("floor_height", 0.0)),
        env_radiance=np.asarray(meta.get("env_radiance", [0, 0, 0]), float),
    )
    violations = validate_scene(scene)
    if violations:
        raise SceneValidationError("; ".join(str(v) for v in violations))
    return scene


def _parse_material(mdoc: dict, where: str, base: str | None = None) -> Material:
    try:
        mat = Material(
            name=mdoc.get("name", "default"),
            lambertian_albedo=mdoc.get("lambertian_albedo", [0.7, 0.7, 0.7]),
            microfacet_roughness=float(mdoc.get("microfacet_roughness", 0.5)),
            microfacet_tint=mdoc.get("microfacet_tint", [1.0, 1.0, 1.0]),
            dielectric_ior=float(mdoc.get("dielectric_ior", 1.5)),
            transmission=mdoc.get("transmission", [1.0, 1.0, 1.0]),
            lobe_weights=mdoc.get("lobe_weights", [1.0, 0.0, 0.0, 0.0]),
            emission=mdoc.get("emission", [0.0, 0.0, 0.0]),
            texture=mdoc.get("texture"),
        )
    except (TypeError, ValueError) as exc:
        raise SceneFormatError(f"{where}: {exc}") from exc
    if np.any(mat.lobe_weights < 0) or mat.lobe_weights.sum() > 1.0 + 1e-9:
        raise SceneValidationError(f"{where}.lobe_weights: must be >= 0 with sum <= 1")
    if np.any(mat.lambertian_albedo > 1.0 + 1e-9) or np.any(mat.lambertian_albedo < 0):
        raise SceneValidationError(f"{where}.lambertian_albedo: components must lie in [0, 1]")
    if not (0.0 < mat.microfacet_roughness <= 1.0):
        raise SceneValidationError(f"{where}.microfacet_roughness: must lie in (0, 1]")
    if mat.dielectric_ior < 1.0:
        raise SceneValidationError(f"{where}.dielectric_ior: must be >= 1")
    if mat.texture is not None and base is not None and not os.path.isabs(mat.texture):
        mat.texture = os.path.join(base, mat.texture)
    return mat


def _parse_light(ldoc: dict, where: str) -> Light:
    try:
        light = Light(
            kind=ldoc.get("kind", "Area"),
            color=ldoc.get("color", [1.0, 1.0, 1.0]),
            brightness=float(ldoc.get("brightness", 1.0)),
            temperature=(float(ldoc["temperature"]) if ldoc.get("temperature") is not None else None),
            position=ldoc.get("position", [0.0, 0.0, 0.0]),
            direction=ldoc.get("direction", [0.0, 0.0, -1.0]),
            max_distance=float(ldoc.get("max_distance", np.inf)),
            cone_angle=float(ldoc.get("cone_angle", np.pi / 4)),
            extent=tuple(ldoc.get("extent", (0.5, 0.5))),
            enabled=bool(ldoc.get("enabled", True)),
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise SceneFormatError(f"{where}: {exc}") from exc
    n = np.linalg.norm(light.direction)
    if n < 1e-12:
        raise SceneValidationError(f"{where}.direction: zero vector")
    light.direction = light.direction / n
    if light.brightness < 0:
        raise SceneValidationError(f"{where}.brightness: must be >= 0")
    if not (0.0 < light.cone_angle < np.pi):
        raise SceneValidationError(f"{where}.cone_angle: must lie in (0, pi)")
    if light.temperature is not None and not (1000.0 <= light.temperature <= 12000.0):
        raise SceneValidationError(f"{where}.temperature: must lie in [1000, 12000] K")
    return light


def save_scene(scene: Scene, path: str | os.PathLike, write_meshes: bool = False) -> None:
    """Serialize a Scene back to the YAML format (inverse of load_scene).

    Mesh files are referenced by their original paths; with write_meshes=True
    meshes are written next to the scene file instead.
    """
    path = os.fspath(path)
    base = os.path.dirname(os.path.abspath(path))
    materials = {}
    for obj in scene.objects:
        materials.setdefault(obj.material.name, obj.material)

    objects_doc = []
    for i, obj in enumerate(scene.objects):
        if obj.mesh_path is None or write_meshes:
            mesh_path = f"{obj.name}.obj"
            save_obj(obj.mesh, os.path.join(base, mesh_path))
        else:
            # reference the existing mesh file relative to the new location
            mesh_path = os.path.relpath(obj.mesh_path, base)
        odoc = {
            "name": obj.name,
            "mesh": mesh_path,
            "material": obj.material.name,
            "pose": {
                "translation": [float(x) for x in obj.pose.translation],
                "rotation": [float(x) for x in obj.pose.rotation],
            },
            "nyu40_class": int(obj.nyu40_class),
            "instance_id": int(obj.instance_id),
            "movable": bool(obj.physical.movable),
            "mass": float(obj.physical.mass),
            "friction": float(obj.physical.friction),
        }
        if obj.physical.collision_hull is not None:
            odoc["collision_hull"] = [[float(x) for x in p] for p in obj.physical.collision_hull]
        objects_doc.append(odoc)

    doc = {
        "meta": {
            "name": scene.name,
            "bounds": {
                "min": [float(x) for x in scene.bounds[0]],
                "max": [float(x) for x in scene.bounds[1]],
            },
            "floor_height": float(scene.floor_height),
            "env_radiance": [float(x) for x in scene.env_radiance],
        },
        "materials": [_material_doc(m) for m in materials.values()],
        "lights": [_light_doc(l) for l in scene.lights],
        "objects": objects_doc,
    }
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(doc, f, sort_keys=False)


def _material_doc(m: Material) -> dict:
    doc = {
        "name": m.name,
        "lambertian_albedo": [float(x) for x in m.lambertian_albedo],
        "microfacet_roughness": float(m.microfacet_roughness),
        "microfacet_tint": [float(x) for x in m.microfacet_tint],
        "dielectric_ior": float(m.dielectric_ior),
        "transmission": [float(x) for x in m.transmission],
        "lobe_weights": [float(x) for x in m.lobe_weights],
        "emission": [float(x) for x in m.emission],
    }
    if isinstance(m.texture, str):  # in-memory textures are not serializable
        doc["texture"] = m.texture
    return doc


def _light_doc(l: Light) -> dict:
    doc = {
        "kind": l.kind.value,
        "color": [float(x) for x in l.color],
        "brightness": float(l.brightness),
        "position": [float(x) for x in l.position],
        "direction": [float(x) for x in l.direction],
        "cone_angle": float(l.cone_angle),
        "extent": [float(l.extent[0]), float(l.extent[1])],
        "enabled": bool(l.enabled),
    }
    if np.isfinite(l.max_distance):
        doc["max_distance"] = float(l.max_distance)
    if l.temperature is not None:
        doc["temperature"] = float(l.temperature)
    return doc


def validate_scene(scene: Scene) -> list[Violation]:
    """Check all type invariants; violations are data, not exceptions."""
    out: list[Violation] = []
    seen_ids: dict[int, str] = {}
    lo, hi = scene.bounds
    if np.any(hi <= lo):
        out.append(Violation("scene", "bounds", "max must exceed min on every axis"))

    for obj in scene.objects:
        mesh = obj.mesh
        if mesh.num_vertices and mesh.num_vertices < 3:
            out.append(Violation(obj.name, "mesh.vertices", "non-empty mesh needs >= 3 vertices"))
        if mesh.num_triangles and mesh.triangles.max() >= mesh.num_vertices:
            out.append(Violation(obj.name, "mesh.triangles", "triangle index out of range"))
        if mesh.vertex_normals is not None and len(mesh.vertex_normals):
            norms = np.linalg.norm(mesh.vertex_normals, axis=1)
            bad = np.abs(norms - 1.0) > 1e-6
            if bad.any():
                idx = int(np.argmax(bad))
                out.append(
                    Violation(obj.name, f"mesh.vertex_normals[{idx}]", f"norm {norms[idx]:.6f} != 1 (tol 1e-6)")
                )
        if not (MASS_RANGE[0] <= obj.physical.mass <= MASS_RANGE[1]):
            out.append(Violation(obj.name, "mass", f"{obj.physical.mass} outside {MASS_RANGE} kg"))
        if not (FRICTION_RANGE[0] <= obj.physical.friction <= FRICTION_RANGE[1]):
            out.append(Violation(obj.name, "friction", f"{obj.physical.friction} outside {FRICTION_RANGE}"))
        if not (NYU40_RANGE[0] <= obj.nyu40_class <= NYU40_RANGE[1]):
            out.append(Violation(obj.name, "nyu40_class", f"{obj.nyu40_class} outside [1, 40]"))
        if obj.instance_id <= 0:
            out.append(Violation(obj.name, "instance_id", "must be a positive integer"))
        if obj.instance_id in seen_ids:
            out.append(
                Violation(obj.name, "instance_id", f"duplicate of {seen_ids[obj.instance_id]!r} (id {obj.instance_id})")
            )
        else:
            seen_ids[obj.instance_id] = obj.name
        if mesh.num_vertices:
            omin, omax = obj.world_aabb()
            if np.any(omin < lo - 1e-6) or np.any(omax > hi + 1e-6):
                out.append(Violation(obj.name, "pose", "object hull extends outside scene bounds"))
        if obj.physical.collision_hull is not None and mesh.num_vertices:
            hmin = obj.physical.collision_hull.min(axis=0)
            hmax = obj.physical.collision_hull.max(axis=0)
            mmin, mmax = mesh.aabb()
            # hull must enclose the mesh footprint (local xy extent)
            if np.any(hmin[:2] > mmin[:2] + 1e-6) or np.any(hmax[:2] < mmax[:2] - 1e-6):
                out.append(Violation(obj.name, "collision_hull", "hull does not enclose the mesh footprint"))

    for i, light in enumerate(scene.lights):
        name = f"lights[{i}]"
        if abs(np.linalg.norm(light.direction) - 1.0) > 1e-6:
            out.append(Violation(name, "direction", "must be unit norm"))
        if light.brightness < 0:
            out.append(Violation(name, "brightness", "must be >= 0"))
        if not (0.0 < light.cone_angle < np.pi):
            out.append(Violation(name, "cone_angle", "must lie in (0, pi)"))

    if scene.objects and not any(l.enabled for l in scene.lights) and not np.any(scene.env_radiance > 0):
        out.append(Violation("scene", "lights", "needs at least one enabled light for RGB rendering"))
    return out
