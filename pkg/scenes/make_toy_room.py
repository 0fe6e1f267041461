"""Regenerate the toy_room sample scene (12 objects, 3 lights).

Run from the repo root:  python scenes/make_toy_room.py
"""

import os

import numpy as np

from indoorsim.scene import load_scene, make_box_mesh, make_sphere_mesh, save_obj

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "toy_room")

SCENE_YAML = """\
meta:
  name: toy_room
  bounds:
    min: [-0.2, -0.2, -0.1]
    max: [6.2, 5.2, 3.1]
  floor_height: 0.0
  env_radiance: [0.0, 0.0, 0.0]

materials:
  - name: wall_white
    lambertian_albedo: [0.78, 0.76, 0.72]
    lobe_weights: [1.0, 0.0, 0.0, 0.0]
  - name: floor_wood
    lambertian_albedo: [0.48, 0.33, 0.2]
    lobe_weights: [0.9, 0.1, 0.0, 0.0]
    microfacet_roughness: 0.35
    microfacet_tint: [0.7, 0.6, 0.5]
  - name: table_wood
    lambertian_albedo: [0.42, 0.26, 0.14]
    lobe_weights: [0.85, 0.15, 0.0, 0.0]
    microfacet_roughness: 0.3
    microfacet_tint: [0.8, 0.7, 0.6]
  - name: chair_red
    lambertian_albedo: [0.55, 0.12, 0.1]
    lobe_weights: [1.0, 0.0, 0.0, 0.0]
  - name: chair_blue
    lambertian_albedo: [0.12, 0.2, 0.5]
    lobe_weights: [1.0, 0.0, 0.0, 0.0]
  - name: cabinet_metal
    lambertian_albedo: [0.25, 0.25, 0.28]
    lobe_weights: [0.55, 0.45, 0.0, 0.0]
    microfacet_roughness: 0.25
    microfacet_tint: [0.85, 0.86, 0.88]
  - name: plastic_white
    lambertian_albedo: [0.7, 0.7, 0.68]
    lobe_weights: [0.9, 0.1, 0.0, 0.0]
    microfacet_roughness: 0.2
  - name: lamp_glow
    lambertian_albedo: [0.2, 0.2, 0.2]
    lobe_weights: [1.0, 0.0, 0.0, 0.0]
    emission: [3.0, 2.9, 2.6]

lights:
  - kind: Area
    position: [3.0, 2.5, 2.96]
    direction: [0.0, 0.0, -1.0]
    extent: [1.2, 1.2]
    color: [1.0, 0.97, 0.92]
    brightness: 26.0
  - kind: Spot
    position: [1.0, 1.0, 2.8]
    direction: [0.25, 0.47, -0.85]
    cone_angle: 0.9
    brightness: 7.0
    max_distance: 12.0
    color: [1.0, 0.95, 0.85]
  - kind: Sun
    direction: [-0.35, 0.25, -0.9]
    brightness: 3.0
    enabled: false

objects:
  - {name: floor,     mesh: meshes/floor.obj,    material: floor_wood,  pose: {translation: [3.0, 2.5, -0.05]}, nyu40_class: 2,  movable: false, mass: 43.3, friction: 0.2}
  - {name: ceiling,   mesh: meshes/ceiling.obj,  material: wall_white,  pose: {translation: [3.0, 2.5, 3.05]},  nyu40_class: 22, movable: false, mass: 43.3, friction: 0.2}
  - {name: wall_xneg, mesh: meshes/wall_x.obj,   material: wall_white,  pose: {translation: [-0.05, 2.5, 1.5]}, nyu40_class: 1,  movable: false, mass: 43.3, friction: 0.2}
  - {name: wall_xpos, mesh: meshes/wall_x.obj,   material: wall_white,  pose: {translation: [6.05, 2.5, 1.5]},  nyu40_class: 1,  movable: false, mass: 43.3, friction: 0.2}
  - {name: wall_yneg, mesh: meshes/wall_y.obj,   material: wall_white,  pose: {translation: [3.0, -0.05, 1.5]}, nyu40_class: 1,  movable: false, mass: 43.3, friction: 0.2}
  - {name: wall_ypos, mesh: meshes/wall_y.obj,   material: wall_white,  pose: {translation: [3.0, 5.05, 1.5]},  nyu40_class: 1,  movable: false, mass: 43.3, friction: 0.2}
  - {name: table,     mesh: meshes/table.obj,    material: table_wood,  pose: {translation: [3.0, 2.5, 0.375]}, nyu40_class: 7,  movable: false, mass: 21.0, friction: 0.22}
  - {name: chair_a,   mesh: meshes/chair.obj,    material: chair_red,   pose: {translation: [1.8, 2.5, 0.45]},  nyu40_class: 5,  movable: true,  mass: 6.5,  friction: 0.18}
  - {name: chair_b,   mesh: meshes/chair.obj,    material: chair_blue,  pose: {translation: [4.2, 2.5, 0.45], rotation: [0.0, 0.0, 3.14159]}, nyu40_class: 5, movable: true, mass: 6.5, friction: 0.18}
  - {name: cabinet,   mesh: meshes/cabinet.obj,  material: cabinet_metal, pose: {translation: [0.45, 4.5, 0.8]}, nyu40_class: 3, movable: true, mass: 24.0, friction: 0.12}
  - {name: ball,      mesh: meshes/ball.obj,     material: plastic_white, pose: {translation: [3.0, 2.2, 0.93]}, nyu40_class: 40, movable: true, mass: 0.4, friction: 0.1}
  - {name: lamp,      mesh: meshes/lamp.obj,     material: lamp_glow,   pose: {translation: [3.0, 2.5, 2.9]},   nyu40_class: 35, movable: false, mass: 1.2, friction: 0.1}
"""


def main():
    meshes = os.path.join(OUT, "meshes")
    os.makedirs(meshes, exist_ok=True)
    save_obj(make_box_mesh((6.4, 5.4, 0.1)), os.path.join(meshes, "floor.obj"))
    save_obj(make_box_mesh((6.4, 5.4, 0.1)), os.path.join(meshes, "ceiling.obj"))
    save_obj(make_box_mesh((0.1, 5.4, 3.0)), os.path.join(meshes, "wall_x.obj"))
    save_obj(make_box_mesh((6.4, 0.1, 3.0)), os.path.join(meshes, "wall_y.obj"))
    save_obj(make_box_mesh((1.6, 0.9, 0.75)), os.path.join(meshes, "table.obj"))
    save_obj(make_box_mesh((0.45, 0.45, 0.9)), os.path.join(meshes, "chair.obj"))
    save_obj(make_box_mesh((0.8, 0.4, 1.6)), os.path.join(meshes, "cabinet.obj"))
    save_obj(make_sphere_mesh(0.18, subdivisions=16), os.path.join(meshes, "ball.obj"))
    save_obj(make_box_mesh((0.4, 0.4, 0.06)), os.path.join(meshes, "lamp.obj"))
    path = os.path.join(OUT, "toy_room.yaml")
    with open(path, "w", encoding="utf-8") as f:
        f.write(SCENE_YAML)
    scene = load_scene(path)
    print(f"wrote {path}: {len(scene.objects)} objects, {len(scene.lights)} lights")


if __name__ == "__main__":
    main()
