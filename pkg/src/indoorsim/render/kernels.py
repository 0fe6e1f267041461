"""Numba kernels: BVH traversal, brute-force oracle, and the path-trace loop.

All kernels take pre-drawn uniforms so results are bit-identical regardless of
thread count (each ray owns its output slot; no cross-ray reductions, no
fastmath).
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

STACK_DEPTH = 64
T_MIN = 1e-6
INV_4PI = 1.0 / (4.0 * np.pi)

# lobe indices in material lobe_weights
LAMBERT, MICROFACET, DIELECTRIC, TRANSMISSION = 0, 1, 2, 3


@njit(cache=True, inline="always")
def _dot(ax, ay, az, bx, by, bz):
    return ax * bx + ay * by + az * bz


@njit(cache=True, inline="always")
def _cross(ax, ay, az, bx, by, bz):
    return ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx


@njit(cache=True, inline="always")
def _normalize(x, y, z):
    n = np.sqrt(x * x + y * y + z * z)
    if n < 1e-300:
        return 0.0, 0.0, 0.0
    return x / n, y / n, z / n


@njit(cache=True, inline="always")
def _tri_hit(ox, oy, oz, dx, dy, dz, v0, e1, e2, tri, t_min, t_max):
    """Moller-Trumbore; returns (t, u, v) with t = -1 on miss."""
    px, py, pz = _cross(dx, dy, dz, e2[tri, 0], e2[tri, 1], e2[tri, 2])
    det = _dot(e1[tri, 0], e1[tri, 1], e1[tri, 2], px, py, pz)
    if abs(det) < 1e-14:
        return -1.0, 0.0, 0.0
    inv = 1.0 / det
    tvx = ox - v0[tri, 0]
    tvy = oy - v0[tri, 1]
    tvz = oz - v0[tri, 2]
    u = _dot(tvx, tvy, tvz, px, py, pz) * inv
    if u < 0.0 or u > 1.0:
        return -1.0, 0.0, 0.0
    qx, qy, qz = _cross(tvx, tvy, tvz, e1[tri, 0], e1[tri, 1], e1[tri, 2])
    v = _dot(dx, dy, dz, qx, qy, qz) * inv
    if v < 0.0 or u + v > 1.0:
        return -1.0, 0.0, 0.0
    t = _dot(e2[tri, 0], e2[tri, 1], e2[tri, 2], qx, qy, qz) * inv
    if t < t_min or t > t_max:
        return -1.0, 0.0, 0.0
    return t, u, v


@njit(cache=True, inline="always")
def _aabb_hit(ox, oy, oz, ix, iy, iz, bmin, bmax, node, t_max):
    """Slab test with precomputed inverse direction; returns entry t or -1."""
    t0 = (bmin[node, 0] - ox) * ix
    t1 = (bmax[node, 0] - ox) * ix
    if t0 > t1:
        t0, t1 = t1, t0
    t2 = (bmin[node, 1] - oy) * iy
    t3 = (bmax[node, 1] - oy) * iy
    if t2 > t3:
        t2, t3 = t3, t2
    t4 = (bmin[node, 2] - oz) * iz
    t5 = (bmax[node, 2] - oz) * iz
    if t4 > t5:
        t4, t5 = t5, t4
    near = max(max(t0, t2), max(t4, 0.0))
    far = min(min(t1, t3), min(t5, t_max))
    if near > far:
        return -1.0
    return near


@njit(cache=True)
def _closest_hit(ox, oy, oz, dx, dy, dz,
                 node_min, node_max, node_left, node_right, tri_order,
                 v0, e1, e2, t_min, t_max, stack):
    """Returns (t, tri, u, v); tri = -1 on miss. Ties broken toward the lower
    triangle index to match the brute-force oracle exactly."""
    ix = 1.0 / dx if dx != 0.0 else 1e300
    iy = 1.0 / dy if dy != 0.0 else 1e300
    iz = 1.0 / dz if dz != 0.0 else 1e300
    sp = 0
    stack[sp] = 0
    sp += 1
    best_t = t_max
    best_tri = -1
    best_u = 0.0
    best_v = 0.0
    while sp > 0:
        sp -= 1
        node = stack[sp]
        if _aabb_hit(ox, oy, oz, ix, iy, iz, node_min, node_max, node, best_t) < 0.0:
            continue
        left = node_left[node]
        if left < 0:  # leaf
            first = -left - 1
            count = node_right[node]
            for k in range(first, first + count):
                tri = tri_order[k]
                t, u, v = _tri_hit(ox, oy, oz, dx, dy, dz, v0, e1, e2, tri, t_min, best_t)
                if t >= 0.0 and (t < best_t or (t == best_t and (best_tri < 0 or tri < best_tri))):
                    best_t = t
                    best_tri = tri
                    best_u = u
                    best_v = v
        else:
            right = node_right[node]
            dl = _aabb_hit(ox, oy, oz, ix, iy, iz, node_min, node_max, left, best_t)
            dr = _aabb_hit(ox, oy, oz, ix, iy, iz, node_min, node_max, right, best_t)
            if dl >= 0.0 and dr >= 0.0:
                if dl <= dr:  # near child goes on top of the stack
                    stack[sp] = right
                    sp += 1
                    stack[sp] = left
                    sp += 1
                else:
                    stack[sp] = left
                    sp += 1
                    stack[sp] = right
                    sp += 1
            elif dl >= 0.0:
                stack[sp] = left
                sp += 1
            elif dr >= 0.0:
                stack[sp] = right
                sp += 1
    if best_tri < 0:
        return -1.0, -1, 0.0, 0.0
    return best_t, best_tri, best_u, best_v


@njit(cache=True)
def _occluded(ox, oy, oz, dx, dy, dz,
              node_min, node_max, node_left, node_right, tri_order,
              v0, e1, e2, t_min, t_max, stack):
    ix = 1.0 / dx if dx != 0.0 else 1e300
    iy = 1.0 / dy if dy != 0.0 else 1e300
    iz = 1.0 / dz if dz != 0.0 else 1e300
    sp = 0
    stack[sp] = 0
    sp += 1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        if _aabb_hit(ox, oy, oz, ix, iy, iz, node_min, node_max, node, t_max) < 0.0:
            continue
        left = node_left[node]
        if left < 0:
            first = -left - 1
            count = node_right[node]
            for k in range(first, first + count):
                t, u, v = _tri_hit(ox, oy, oz, dx, dy, dz, v0, e1, e2, tri_order[k], t_min, t_max)
                if t >= 0.0:
                    return True
        else:
            stack[sp] = left
            sp += 1
            stack[sp] = node_right[node]
            sp += 1
    return False


@njit(cache=True, parallel=True)
def closest_hit_batch(origins, dirs,
                      node_min, node_max, node_left, node_right, tri_order,
                      v0, e1, e2, t_min, t_max,
                      out_t, out_tri, out_u, out_v):
    for i in prange(origins.shape[0]):
        stack = np.empty(STACK_DEPTH, np.int32)
        t, tri, u, v = _closest_hit(
            origins[i, 0], origins[i, 1], origins[i, 2],
            dirs[i, 0], dirs[i, 1], dirs[i, 2],
            node_min, node_max, node_left, node_right, tri_order,
            v0, e1, e2, t_min, t_max, stack,
        )
        out_t[i] = t
        out_tri[i] = tri
        out_u[i] = u
        out_v[i] = v


@njit(cache=True, parallel=True)
def brute_force_hit_batch(origins, dirs, v0, e1, e2, t_min, t_max,
                          out_t, out_tri, out_u, out_v):
    """Reference intersector: tests every triangle, lowest index wins ties."""
    for i in prange(origins.shape[0]):
        best_t = t_max
        best_tri = -1
        best_u = 0.0
        best_v = 0.0
        for tri in range(v0.shape[0]):
            t, u, v = _tri_hit(
                origins[i, 0], origins[i, 1], origins[i, 2],
                dirs[i, 0], dirs[i, 1], dirs[i, 2],
                v0, e1, e2, tri, t_min, best_t,
            )
            if t >= 0.0 and (t < best_t or (t == best_t and (best_tri < 0 or tri < best_tri))):
                best_t = t
                best_tri = tri
                best_u = u
                best_v = v
        if best_tri < 0:
            out_t[i] = -1.0
            out_tri[i] = -1
        else:
            out_t[i] = best_t
            out_tri[i] = best_tri
        out_u[i] = best_u
        out_v[i] = best_v


@njit(cache=True, inline="always")
def _ggx_pdf(alpha, nh, voh):
    if nh <= 0.0 or voh <= 0.0:
        return 0.0
    a2 = alpha * alpha
    denom = nh * nh * (a2 - 1.0) + 1.0
    d = a2 / (np.pi * denom * denom)
    return d * nh / (4.0 * voh)


@njit(cache=True, inline="always")
def _smith_g1(alpha, nv):
    if nv <= 0.0:
        return 0.0
    a2 = alpha * alpha
    return 2.0 * nv / (nv + np.sqrt(a2 + (1.0 - a2) * nv * nv))


@njit(cache=True, inline="always")
def _tex_sample(tex_data, tex_meta, tex_idx, u, v):
    """Nearest-texel lookup, repeat wrapping; vt origin at the bottom left."""
    off = tex_meta[tex_idx, 0]
    w = tex_meta[tex_idx, 1]
    h = tex_meta[tex_idx, 2]
    uu = u - np.floor(u)
    vv = v - np.floor(v)
    x = int(uu * w)
    if x >= w:
        x = w - 1
    y = int((1.0 - vv) * h)
    if y >= h:
        y = h - 1
    if y < 0:
        y = 0
    base = off + (y * w + x) * 3
    return tex_data[base], tex_data[base + 1], tex_data[base + 2]


@njit(cache=True, inline="always")
def _tangent(nx, ny, nz):
    """Any unit vector perpendicular to n."""
    if abs(nx) < 0.9:
        tx, ty, tz = _cross(nx, ny, nz, 1.0, 0.0, 0.0)
    else:
        tx, ty, tz = _cross(nx, ny, nz, 0.0, 1.0, 0.0)
    return _normalize(tx, ty, tz)


@njit(cache=True)
def _trace_one(i, origins, dirs, alive, uniforms,
               node_min, node_max, node_left, node_right, tri_order,
               tri_v0, tri_e1, tri_e2, tri_n0, tri_n1, tri_n2,
               tri_uv0, tri_uv1, tri_uv2, tri_obj,
               obj_mat, m_albedo, m_rough, m_tint, m_ior, m_trans, m_lobes, m_emission,
               m_tex, tex_data, tex_meta,
               l_kind, l_radiant, l_pos, l_dir, l_maxdist, l_cos_half_cone,
               l_u, l_v, l_area, env,
               max_bounces, out_radiance, out_bad, stack):
    out_radiance[i, 0] = 0.0
    out_radiance[i, 1] = 0.0
    out_radiance[i, 2] = 0.0
    out_bad[i] = False
    if not alive[i]:
        return

    ox = origins[i, 0]
    oy = origins[i, 1]
    oz = origins[i, 2]
    dx = dirs[i, 0]
    dy = dirs[i, 1]
    dz = dirs[i, 2]

    lr = 0.0
    lg = 0.0
    lb = 0.0
    br = 1.0
    bg = 1.0
    bb = 1.0
    specular_prev = True
    prev_pdf = 0.0  # mixture pdf of the previous non-delta scatter

    n_lights = l_kind.shape[0]
    env_on = env[0] > 0.0 or env[1] > 0.0 or env[2] > 0.0
    n_strategies = n_lights + (1 if env_on else 0)

    for depth in range(max_bounces + 1):
        t, tri, hu, hv = _closest_hit(ox, oy, oz, dx, dy, dz,
                                      node_min, node_max, node_left, node_right, tri_order,
                                      tri_v0, tri_e1, tri_e2, T_MIN, 1e30, stack)
        if tri < 0:
            if env_on:
                w = 1.0
                if not specular_prev and n_strategies > 0:
                    q = INV_4PI / n_strategies
                    w = prev_pdf / (prev_pdf + q)
                lr += br * env[0] * w
                lg += bg * env[1] * w
                lb += bb * env[2] * w
            break

        obj = tri_obj[tri]
        mat = obj_mat[obj]

        px = ox + t * dx
        py = oy + t * dy
        pz = oz + t * dz
        w0 = 1.0 - hu - hv
        nsx = w0 * tri_n0[tri, 0] + hu * tri_n1[tri, 0] + hv * tri_n2[tri, 0]
        nsy = w0 * tri_n0[tri, 1] + hu * tri_n1[tri, 1] + hv * tri_n2[tri, 1]
        nsz = w0 * tri_n0[tri, 2] + hu * tri_n1[tri, 2] + hv * tri_n2[tri, 2]
        nsx, nsy, nsz = _normalize(nsx, nsy, nsz)
        ngx, ngy, ngz = _cross(tri_e1[tri, 0], tri_e1[tri, 1], tri_e1[tri, 2],
                               tri_e2[tri, 0], tri_e2[tri, 1], tri_e2[tri, 2])
        ngx, ngy, ngz = _normalize(ngx, ngy, ngz)
        if _dot(ngx, ngy, ngz, nsx, nsy, nsz) < 0.0:
            ngx = -ngx
            ngy = -ngy
            ngz = -ngz
        entering = _dot(dx, dy, dz, ngx, ngy, ngz) < 0.0
        # two-sided shading frame opposing the incoming ray
        fx = nsx
        fy = nsy
        fz = nsz
        if _dot(dx, dy, dz, fx, fy, fz) > 0.0:
            fx = -fx
            fy = -fy
            fz = -fz

        # geometry emitters contribute directly (no NEE toward them)
        if m_emission[mat, 0] > 0.0 or m_emission[mat, 1] > 0.0 or m_emission[mat, 2] > 0.0:
            lr += br * m_emission[mat, 0]
            lg += bg * m_emission[mat, 1]
            lb += bb * m_emission[mat, 2]

        if depth == max_bounces:
            break

        w_lam = m_lobes[mat, LAMBERT]
        w_mic = m_lobes[mat, MICROFACET]
        w_die = m_lobes[mat, DIELECTRIC]
        w_tra = m_lobes[mat, TRANSMISSION]
        w_sum = w_lam + w_mic + w_die + w_tra
        alpha = m_rough[mat] * m_rough[mat]
        alb_r = m_albedo[mat, 0]
        alb_g = m_albedo[mat, 1]
        alb_b = m_albedo[mat, 2]
        if m_tex[mat] >= 0:
            uvx = w0 * tri_uv0[tri, 0] + hu * tri_uv1[tri, 0] + hv * tri_uv2[tri, 0]
            uvy = w0 * tri_uv0[tri, 1] + hu * tri_uv1[tri, 1] + hv * tri_uv2[tri, 1]
            tr_, tg_, tb_ = _tex_sample(tex_data, tex_meta, m_tex[mat], uvx, uvy)
            alb_r *= tr_
            alb_g *= tg_
            alb_b *= tb_

        wox = -dx
        woy = -dy
        woz = -dz
        n_wo = _dot(fx, fy, fz, wox, woy, woz)

        # --- next-event estimation toward one strategy (light or environment) ---
        if n_strategies > 0 and (w_lam > 0.0 or w_mic > 0.0) and n_wo > 0.0:
            pick = int(uniforms[i, depth, 0] * n_strategies)
            if pick >= n_strategies:
                pick = n_strategies - 1
            u1 = uniforms[i, depth, 1]
            u2 = uniforms[i, depth, 2]
            wix = 0.0
            wiy = 0.0
            wiz = 0.0
            rad_r = 0.0
            rad_g = 0.0
            rad_b = 0.0
            dist = 1e30
            light_pdf = 0.0  # direction pdf; 0 marks delta strategies
            valid = False
            if pick < n_lights:
                kind = l_kind[pick]
                if kind == 0:  # sun: parallel light along l_dir
                    wix = -l_dir[pick, 0]
                    wiy = -l_dir[pick, 1]
                    wiz = -l_dir[pick, 2]
                    rad_r = l_radiant[pick, 0]
                    rad_g = l_radiant[pick, 1]
                    rad_b = l_radiant[pick, 2]
                    dist = l_maxdist[pick]
                    valid = True
                elif kind == 1:  # spot point light with hard cone
                    lx = l_pos[pick, 0] - px
                    ly = l_pos[pick, 1] - py
                    lz = l_pos[pick, 2] - pz
                    r2 = lx * lx + ly * ly + lz * lz
                    r = np.sqrt(r2)
                    if r > 1e-9 and r <= l_maxdist[pick]:
                        wix = lx / r
                        wiy = ly / r
                        wiz = lz / r
                        cone_cos = _dot(-wix, -wiy, -wiz,
                                        l_dir[pick, 0], l_dir[pick, 1], l_dir[pick, 2])
                        if cone_cos >= l_cos_half_cone[pick]:
                            inv_r2 = 1.0 / r2
                            rad_r = l_radiant[pick, 0] * inv_r2
                            rad_g = l_radiant[pick, 1] * inv_r2
                            rad_b = l_radiant[pick, 2] * inv_r2
                            dist = r
                            valid = True
                else:  # area rectangle, one-sided emitter
                    sx = 2.0 * u1 - 1.0
                    sy = 2.0 * u2 - 1.0
                    qx = l_pos[pick, 0] + sx * l_u[pick, 0] + sy * l_v[pick, 0]
                    qy = l_pos[pick, 1] + sx * l_u[pick, 1] + sy * l_v[pick, 1]
                    qz = l_pos[pick, 2] + sx * l_u[pick, 2] + sy * l_v[pick, 2]
                    lx = qx - px
                    ly = qy - py
                    lz = qz - pz
                    r2 = lx * lx + ly * ly + lz * lz
                    r = np.sqrt(r2)
                    if r > 1e-9 and r <= l_maxdist[pick]:
                        wix = lx / r
                        wiy = ly / r
                        wiz = lz / r
                        cos_l = _dot(-wix, -wiy, -wiz,
                                     l_dir[pick, 0], l_dir[pick, 1], l_dir[pick, 2])
                        if cos_l > 1e-9:
                            # emitted radiance such that brightness = total power
                            le = 1.0 / (np.pi * l_area[pick])
                            geom = cos_l * l_area[pick] / r2  # = 1 / solid-angle pdf
                            rad_r = l_radiant[pick, 0] * le * geom
                            rad_g = l_radiant[pick, 1] * le * geom
                            rad_b = l_radiant[pick, 2] * le * geom
                            dist = r
                            valid = True
            else:  # uniform environment, direction uniform over the sphere
                z = 1.0 - 2.0 * u1
                rxy = np.sqrt(max(0.0, 1.0 - z * z))
                phi = 2.0 * np.pi * u2
                wix = rxy * np.cos(phi)
                wiy = rxy * np.sin(phi)
                wiz = z
                rad_r = env[0] * 4.0 * np.pi  # divided by pdf 1/(4pi)
                rad_g = env[1] * 4.0 * np.pi
                rad_b = env[2] * 4.0 * np.pi
                light_pdf = INV_4PI
                valid = True

            if valid:
                n_wi = _dot(fx, fy, fz, wix, wiy, wiz)
                if n_wi > 0.0:
                    f_r = 0.0
                    f_g = 0.0
                    f_b = 0.0
                    brdf_pdf = 0.0
                    if w_lam > 0.0:
                        f_r += w_lam * alb_r / np.pi
                        f_g += w_lam * alb_g / np.pi
                        f_b += w_lam * alb_b / np.pi
                        brdf_pdf += w_lam * n_wi / np.pi
                    if w_mic > 0.0:
                        hx, hy, hz = _normalize(wix + wox, wiy + woy, wiz + woz)
                        nh = _dot(fx, fy, fz, hx, hy, hz)
                        voh = _dot(wox, woy, woz, hx, hy, hz)
                        if nh > 0.0 and voh > 0.0:
                            a2 = alpha * alpha
                            dd = nh * nh * (a2 - 1.0) + 1.0
                            dval = a2 / (np.pi * dd * dd)
                            g = _smith_g1(alpha, n_wo) * _smith_g1(alpha, n_wi)
                            fres = 1.0 - voh
                            fres = fres * fres * fres * fres * fres
                            spec = dval * g / (4.0 * n_wo * n_wi)
                            f_r += w_mic * spec * (m_tint[mat, 0] + (1.0 - m_tint[mat, 0]) * fres)
                            f_g += w_mic * spec * (m_tint[mat, 1] + (1.0 - m_tint[mat, 1]) * fres)
                            f_b += w_mic * spec * (m_tint[mat, 2] + (1.0 - m_tint[mat, 2]) * fres)
                            brdf_pdf += w_mic * _ggx_pdf(alpha, nh, voh)
                    if f_r > 0.0 or f_g > 0.0 or f_b > 0.0:
                        eps = 1e-6 * (1.0 + np.sqrt(px * px + py * py + pz * pz))
                        sgn = 1.0 if _dot(wix, wiy, wiz, ngx, ngy, ngz) > 0.0 else -1.0
                        if not _occluded(px + ngx * eps * sgn, py + ngy * eps * sgn, pz + ngz * eps * sgn,
                                         wix, wiy, wiz,
                                         node_min, node_max, node_left, node_right, tri_order,
                                         tri_v0, tri_e1, tri_e2, T_MIN, dist - 2.0 * eps, stack):
                            mis = 1.0
                            if light_pdf > 0.0:  # env: balance against the lobe mixture
                                q = light_pdf / n_strategies
                                mis = q / (q + brdf_pdf)
                            scale = float(n_strategies) * n_wi * mis
                            lr += br * f_r * rad_r * scale
                            lg += bg * f_g * rad_g * scale
                            lb += bb * f_b * rad_b * scale

        # --- sample one lobe for the continuation ray ---
        u_lobe = uniforms[i, depth, 3]
        if u_lobe >= w_sum:
            break  # absorbed
        u1 = uniforms[i, depth, 4]
        u2 = uniforms[i, depth, 5]

        ndx = 0.0
        ndy = 0.0
        ndz = 0.0
        mul_r = 1.0
        mul_g = 1.0
        mul_b = 1.0
        is_delta = False
        pdf_mix = 0.0

        if u_lobe < w_lam:
            # cosine hemisphere around the shading normal
            r_ = np.sqrt(u1)
            phi = 2.0 * np.pi * u2
            lx = r_ * np.cos(phi)
            ly = r_ * np.sin(phi)
            lz = np.sqrt(max(0.0, 1.0 - u1))
            tx, ty, tz = _tangent(fx, fy, fz)
            bx, by, bz = _cross(fx, fy, fz, tx, ty, tz)
            ndx = lx * tx + ly * bx + lz * fx
            ndy = lx * ty + ly * by + lz * fy
            ndz = lx * tz + ly * bz + lz * fz
            mul_r = alb_r
            mul_g = alb_g
            mul_b = alb_b
            n_wi = max(_dot(fx, fy, fz, ndx, ndy, ndz), 0.0)
            pdf_mix = w_lam * n_wi / np.pi
            if w_mic > 0.0:
                hx, hy, hz = _normalize(ndx + wox, ndy + woy, ndz + woz)
                pdf_mix += w_mic * _ggx_pdf(alpha, _dot(fx, fy, fz, hx, hy, hz),
                                            _dot(wox, woy, woz, hx, hy, hz))
        elif u_lobe < w_lam + w_mic:
            if n_wo <= 0.0:
                break
            ct = np.sqrt(max(0.0, (1.0 - u1) / (1.0 + (alpha * alpha - 1.0) * u1)))
            st = np.sqrt(max(0.0, 1.0 - ct * ct))
            phi = 2.0 * np.pi * u2
            tx, ty, tz = _tangent(fx, fy, fz)
            bx, by, bz = _cross(fx, fy, fz, tx, ty, tz)
            cp = np.cos(phi)
            sp_ = np.sin(phi)
            hx = st * cp * tx + st * sp_ * bx + ct * fx
            hy = st * cp * ty + st * sp_ * by + ct * fy
            hz = st * cp * tz + st * sp_ * bz + ct * fz
            voh = _dot(wox, woy, woz, hx, hy, hz)
            if voh <= 0.0:
                break
            ndx = 2.0 * voh * hx - wox
            ndy = 2.0 * voh * hy - woy
            ndz = 2.0 * voh * hz - woz
            n_wi = _dot(fx, fy, fz, ndx, ndy, ndz)
            if n_wi <= 0.0:
                break
            # f*cos/pdf with pdf = D*nh/(4 voh) reduces to G*voh/(nh*n_wo) * F
            g = _smith_g1(alpha, n_wo) * _smith_g1(alpha, n_wi)
            fres = 1.0 - voh
            fres = fres * fres * fres * fres * fres
            wgt = g * voh / max(ct * n_wo, 1e-12)
            mul_r = wgt * (m_tint[mat, 0] + (1.0 - m_tint[mat, 0]) * fres)
            mul_g = wgt * (m_tint[mat, 1] + (1.0 - m_tint[mat, 1]) * fres)
            mul_b = wgt * (m_tint[mat, 2] + (1.0 - m_tint[mat, 2]) * fres)
            pdf_mix = w_mic * _ggx_pdf(alpha, ct, voh) + w_lam * max(n_wi, 0.0) / np.pi
        elif u_lobe < w_lam + w_mic + w_die:
            # smooth dielectric: Fresnel-weighted reflect/refract
            is_delta = True
            ior = m_ior[mat]
            eta = 1.0 / ior if entering else ior
            ci = n_wo
            if ci <= 0.0:
                break
            st2 = eta * eta * (1.0 - ci * ci)
            if st2 >= 1.0:
                refl = 1.0  # total internal reflection
            else:
                ctr = np.sqrt(1.0 - st2)
                rs = (eta * ci - ctr) / (eta * ci + ctr)
                rp = (ci - eta * ctr) / (ci + eta * ctr)
                refl = 0.5 * (rs * rs + rp * rp)
            if uniforms[i, depth, 7] < refl:
                ndx = 2.0 * ci * fx - wox
                ndy = 2.0 * ci * fy - woy
                ndz = 2.0 * ci * fz - woz
            else:
                ctr = np.sqrt(max(0.0, 1.0 - st2))
                ndx = -eta * wox + (eta * ci - ctr) * fx
                ndy = -eta * woy + (eta * ci - ctr) * fy
                ndz = -eta * woz + (eta * ci - ctr) * fz
        else:
            # tinted straight-through transmission
            is_delta = True
            ndx = dx
            ndy = dy
            ndz = dz
            mul_r = m_trans[mat, 0]
            mul_g = m_trans[mat, 1]
            mul_b = m_trans[mat, 2]

        br *= mul_r
        bg *= mul_g
        bb *= mul_b
        if br == 0.0 and bg == 0.0 and bb == 0.0:
            break

        # russian roulette after bounce 3
        if depth >= 3:
            p_cont = max(br, max(bg, bb))
            if p_cont > 0.95:
                p_cont = 0.95
            if p_cont < 0.05:
                p_cont = 0.05
            if uniforms[i, depth, 6] >= p_cont:
                break
            br /= p_cont
            bg /= p_cont
            bb /= p_cont

        ndx, ndy, ndz = _normalize(ndx, ndy, ndz)
        eps = 1e-6 * (1.0 + np.sqrt(px * px + py * py + pz * pz))
        leave = 1.0 if _dot(ndx, ndy, ndz, ngx, ngy, ngz) > 0.0 else -1.0
        ox = px + ngx * eps * leave
        oy = py + ngy * eps * leave
        oz = pz + ngz * eps * leave
        dx = ndx
        dy = ndy
        dz = ndz
        specular_prev = is_delta
        prev_pdf = pdf_mix

    if not (np.isfinite(lr) and np.isfinite(lg) and np.isfinite(lb)):
        out_bad[i] = True
        return
    out_radiance[i, 0] = lr
    out_radiance[i, 1] = lg
    out_radiance[i, 2] = lb


@njit(cache=True, parallel=True)
def trace_paths(origins, dirs, alive, uniforms,
                node_min, node_max, node_left, node_right, tri_order,
                tri_v0, tri_e1, tri_e2, tri_n0, tri_n1, tri_n2,
                tri_uv0, tri_uv1, tri_uv2, tri_obj,
                obj_mat, m_albedo, m_rough, m_tint, m_ior, m_trans, m_lobes, m_emission,
                m_tex, tex_data, tex_meta,
                l_kind, l_radiant, l_pos, l_dir, l_maxdist, l_cos_half_cone,
                l_u, l_v, l_area, env,
                max_bounces, out_radiance, out_bad):
    for i in prange(origins.shape[0]):
        stack = np.empty(STACK_DEPTH, np.int32)
        _trace_one(i, origins, dirs, alive, uniforms,
                   node_min, node_max, node_left, node_right, tri_order,
                   tri_v0, tri_e1, tri_e2, tri_n0, tri_n1, tri_n2,
                   tri_uv0, tri_uv1, tri_uv2, tri_obj,
                   obj_mat, m_albedo, m_rough, m_tint, m_ior, m_trans, m_lobes, m_emission,
                   m_tex, tex_data, tex_meta,
                   l_kind, l_radiant, l_pos, l_dir, l_maxdist, l_cos_half_cone,
                   l_u, l_v, l_area, env, max_bounces, out_radiance, out_bad, stack)
