import numpy as np

from indoorsim.render import build_bvh, pack_scene
from indoorsim.render.kernels import T_MIN, brute_force_hit_batch, closest_hit_batch
from indoorsim.scene import Material, Mesh, Scene, SceneObject, make_sphere_mesh


def single_triangle_scene():
    mesh = Mesh(
        vertices=np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0]]),
        triangles=np.array([[0, 1, 2]]),
    )
    obj = SceneObject("tri", mesh, Material(), instance_id=1)
    return Scene(objects=[obj], lights=[], bounds=(np.array([-2.0, -2, -2]), np.array([2.0, 2, 2])))


def run_both(pack, bvh, origins, dirs):
    n = len(origins)
    t1 = np.empty(n)
    tri1 = np.empty(n, np.int64)
    u1 = np.empty(n)
    v1 = np.empty(n)
    closest_hit_batch(origins, dirs, bvh.node_min, bvh.node_max, bvh.node_left,
                      bvh.node_right, bvh.tri_order, pack.tri_v0, pack.tri_e1,
                      pack.tri_e2, T_MIN, 1e30, t1, tri1, u1, v1)
    t2 = np.empty(n)
    tri2 = np.empty(n, np.int64)
    u2 = np.empty(n)
    v2 = np.empty(n)
    brute_force_hit_batch(origins, dirs, pack.tri_v0, pack.tri_e1, pack.tri_e2,
                          T_MIN, 1e30, t2, tri2, u2, v2)
    return (t1, tri1), (t2, tri2)


class TestBvh:
    def test_single_triangle_leaf(self):
        scene = single_triangle_scene()
        pack = pack_scene(scene)
        bvh = build_bvh(pack)
        assert bvh.num_nodes == 1
        assert bvh.node_left[0] < 0  # leaf
        origins = np.array([[0.2, 0.2, 1.0]])
        dirs = np.array([[0.0, 0.0, -1.0]])
        (t, tri), _ = run_both(pack, bvh, origins, dirs)
        assert tri[0] == 0
        assert t[0] == 1.0

    def test_miss_returns_no_hit(self):
        scene = single_triangle_scene()
        pack = pack_scene(scene)
        bvh = build_bvh(pack)
        origins = np.array([[5.0, 5.0, 1.0]])
        dirs = np.array([[0.0, 0.0, -1.0]])
        (t, tri), _ = run_both(pack, bvh, origins, dirs)
        assert tri[0] == -1

    def test_matches_brute_force_on_toy_room(self, toy_room):
        pack = pack_scene(toy_room)
        bvh = build_bvh(pack)
        rng = np.random.default_rng(0)
        n = 2000
        origins = rng.uniform([0.2, 0.2, 0.2], [5.8, 4.8, 2.8], size=(n, 3))
        dirs = rng.normal(size=(n, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        (t1, tri1), (t2, tri2) = run_both(pack, bvh, origins, dirs)
        assert np.array_equal(tri1, tri2)
        assert np.array_equal(t1, t2)
        assert (tri1 >= 0).sum() == n  # closed room: everything hits

    def test_matches_brute_force_on_dense_sphere(self):
        mesh = make_sphere_mesh(1.0, subdivisions=40)  # 6k+ triangles
        obj = SceneObject("s", mesh, Material(), instance_id=1)
        scene = Scene(objects=[obj], lights=[],
                      bounds=(np.array([-2.0, -2, -2]), np.array([2.0, 2, 2])))
        pack = pack_scene(scene)
        bvh = build_bvh(pack)
        rng = np.random.default_rng(1)
        n = 3000
        origins = rng.uniform(-1.8, 1.8, size=(n, 3))
        origins[np.linalg.norm(origins, axis=1) < 1.1] *= 2.0
        dirs = rng.normal(size=(n, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        (t1, tri1), (t2, tri2) = run_both(pack, bvh, origins, dirs)
        assert np.array_equal(tri1, tri2)
        assert np.array_equal(t1, t2)

    def test_every_triangle_referenced_once(self, toy_room):
        pack = pack_scene(toy_room)
        bvh = build_bvh(pack)
        assert sorted(bvh.tri_order.tolist()) == list(range(pack.num_triangles))

    def test_child_boxes_inside_parents(self, toy_room):
        pack = pack_scene(toy_room)
        bvh = build_bvh(pack)
        for node in range(bvh.num_nodes):
            left = bvh.node_left[node]
            if left < 0:
                continue
            for child in (left, bvh.node_right[node]):
                assert np.all(bvh.node_min[child] >= bvh.node_min[node] - 1e-12)
                assert np.all(bvh.node_max[child] <= bvh.node_max[node] + 1e-12)
