# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels; mirrors ``pure.py`` operation for operation.

Any change to the arithmetic here must be applied to the pure backend as
well -- the equivalence tests compare the two bit for bit.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan, atan2, cos, exp, floor, hypot, sin, sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()

cdef double SQRT2 = sqrt(2.0)


# ---------------------------------------------------------------------------
# thermostat
# ---------------------------------------------------------------------------

def thermostat_trace(setpoints, mode_rows, coeffs, double start_temp, double deadband):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sp = np.ascontiguousarray(setpoints, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mr = np.ascontiguousarray(mode_rows, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t n = sp.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] state = np.empty(n, dtype=np.uint8)

    cdef double y = start_temp
    cdef int heater = 1 if y < sp[0] - deadband else 0
    cdef double anchor = y
    cdef long t = 0
    cdef long active = mr[0] if n else 0
    cdef Py_ssize_t i
    cdef long m
    cdef double s, k_on1, k_on2, k_off1, k_off2

    for i in range(n):
        s = sp[i]
        m = mr[i]
        if m != active:
            active = m
            anchor = y
            t = 0
        if heater and y >= s:
            heater = 0
            anchor = y
            t = 0
        elif (not heater) and y < s - deadband:
            heater = 1
            anchor = y
            t = 0
        t += 1
        k_on1 = cf[active, 0]
        k_on2 = cf[active, 1]
        k_off1 = cf[active, 2]
        k_off2 = cf[active, 3]
        if heater:
            y = k_on1 * (1.0 - exp(-k_on2 * t)) + anchor
        else:
            y = k_off1 * exp(-k_off2 * t) + anchor - k_off1
        out[i] = y
        state[i] = heater
    return out, state


# ---------------------------------------------------------------------------
# A* on an 8-connected occupancy grid
# ---------------------------------------------------------------------------

cdef inline double _octile(long dr, long dc):
    if dr < 0:
        dr = -dr
    if dc < 0:
        dc = -dc
    if dr < dc:
        dr, dc = dc, dr
    return (dr - dc) + SQRT2 * dc


cdef struct HeapEntry:
    double f
    double h
    long idx


cdef inline bint _entry_less(HeapEntry a, HeapEntry b):
    if a.f != b.f:
        return a.f < b.f
    if a.h != b.h:
        return a.h < b.h
    return a.idx < b.idx


cdef void _heap_push(HeapEntry* heap, Py_ssize_t* size, HeapEntry item):
    cdef Py_ssize_t pos = size[0]
    cdef Py_ssize_t parent
    heap[pos] = item
    size[0] += 1
    while pos > 0:
        parent = (pos - 1) >> 1
        if _entry_less(heap[pos], heap[parent]):
            heap[pos], heap[parent] = heap[parent], heap[pos]
            pos = parent
        else:
            break


cdef HeapEntry _heap_pop(HeapEntry* heap, Py_ssize_t* size):
    cdef HeapEntry top = heap[0]
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t child
    size[0] -= 1
    heap[0] = heap[size[0]]
    while True:
        child = 2 * pos + 1
        if child >= size[0]:
            break
        if child + 1 < size[0] and _entry_less(heap[child + 1], heap[child]):
            child += 1
        if _entry_less(heap[child], heap[pos]):
            heap[pos], heap[child] = heap[child], heap[pos]
            pos = child
        else:
            break
    return top


def astar_grid(occupancy, start, goal):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] occ = np.ascontiguousarray(occupancy, dtype=np.uint8)
    cdef long rows = occ.shape[0]
    cdef long cols = occ.shape[1]
    cdef long sr = start[0]
    cdef long sc = start[1]
    cdef long gr = goal[0]
    cdef long gc = goal[1]
    if occ[sr, sc] or occ[gr, gc]:
        return None, 0.0
    cdef long start_idx = sr * cols + sc
    cdef long goal_idx = gr * cols + gc
    if start_idx == goal_idx:
        return np.array([[sr, sc]], dtype=np.int64), 0.0

    cdef long n_cells = rows * cols
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g = np.full(n_cells, np.inf, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent = np.full(n_cells, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] closed = np.zeros(n_cells, dtype=np.uint8)

    # each cell is pushed at most 8 times (once per incoming improvement)
    cdef HeapEntry* heap = <HeapEntry*> malloc((8 * n_cells + 8) * sizeof(HeapEntry))
    if heap == NULL:
        raise MemoryError("A* heap allocation failed")
    cdef Py_ssize_t heap_size = 0

    cdef long[8] mdr = [-1, -1, -1, 0, 0, 1, 1, 1]
    cdef long[8] mdc = [-1, 0, 1, -1, 1, -1, 0, 1]
    cdef double[8] mcost = [SQRT2, 1.0, SQRT2, 1.0, 1.0, SQRT2, 1.0, SQRT2]

    g[start_idx] = 0.0
    cdef double h0 = _octile(sr - gr, sc - gc)
    cdef HeapEntry entry
    entry.f = h0
    entry.h = h0
    entry.idx = start_idx
    _heap_push(heap, &heap_size, entry)

    cdef bint found = False
    cdef long idx, r, c, k, nr, nc, nidx
    cdef double ng, nh
    while heap_size > 0:
        entry = _heap_pop(heap, &heap_size)
        idx = entry.idx
        if closed[idx]:
            continue
        closed[idx] = 1
        if idx == goal_idx:
            found = True
            break
        r = idx // cols
        c = idx - r * cols
        for k in range(8):
            nr = r + mdr[k]
            nc = c + mdc[k]
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
                continue
            if occ[nr, nc]:
                continue
            nidx = nr * cols + nc
            if closed[nidx]:
                continue
            ng = g[idx] + mcost[k]
            if ng < g[nidx]:
                g[nidx] = ng
                parent[nidx] = idx
                nh = _octile(nr - gr, nc - gc)
                entry.f = ng + nh
                entry.h = nh
                entry.idx = nidx
                _heap_push(heap, &heap_size, entry)
    free(heap)
    if not found:
        return None, 0.0

    cdef long length_cells = 0
    idx = goal_idx
    while idx != -1:
        length_cells += 1
        idx = parent[idx]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] path = np.empty((length_cells, 2), dtype=np.int64)
    idx = goal_idx
    cdef long pos = length_cells - 1
    while idx != -1:
        path[pos, 0] = idx // cols
        path[pos, 1] = idx - (idx // cols) * cols
        idx = parent[idx]
        pos -= 1
    cdef long n_diag = 0
    cdef long n_axis = 0
    cdef long dr2, dc2
    for k in range(length_cells - 1):
        dr2 = path[k + 1, 0] - path[k, 0]
        dc2 = path[k + 1, 1] - path[k, 1]
        if dr2 < 0:
            dr2 = -dr2
        if dc2 < 0:
            dc2 = -dc2
        if dr2 < dc2:
            dr2, dc2 = dc2, dr2
        n_diag += dc2
        n_axis += dr2 - dc2
    return path, n_axis + SQRT2 * n_diag


# ---------------------------------------------------------------------------
# car integration
# ---------------------------------------------------------------------------

def drive_car(cx_in, cy_in, double speed0, double gain, double decel, double accel,
              double deadband, double dt, long max_steps, double goal_radius):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cx = np.ascontiguousarray(cx_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cy = np.ascontiguousarray(cy_in, dtype=np.float64)
    cdef Py_ssize_t n = cx.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] rows = np.empty((max_steps, 6), dtype=np.float64)

    cdef double x = cx[0]
    cdef double y = cy[0]
    cdef double theta = atan2(cy[1] - cy[0], cx[1] - cx[0])
    cdef double v = speed0
    cdef double gx = cx[n - 1]
    cdef double gy = cy[n - 1]
    cdef int reached = 0
    cdef Py_ssize_t steps = 0

    cdef Py_ssize_t step, i, j, a, b
    cdef double bestd2, d2, best, tx, ty, px, py
    cdef double ax, ay, bx, by, ex, ey, length2, length, t, qx, qy, dist
    cdef double cross, d, dtheta, dv
    cdef bint have_seg

    for step in range(max_steps):
        bestd2 = (cx[0] - x) * (cx[0] - x) + (cy[0] - y) * (cy[0] - y)
        j = 0
        for i in range(1, n):
            d2 = (cx[i] - x) * (cx[i] - x) + (cy[i] - y) * (cy[i] - y)
            if d2 < bestd2:
                bestd2 = d2
                j = i
        best = sqrt(bestd2)
        tx = 0.0
        ty = 0.0
        px = cx[j]
        py = cy[j]
        have_seg = False
        for a in range(j - 1, j + 1):
            b = a + 1
            if a < 0 or b >= n:
                continue
            ax = cx[a]
            ay = cy[a]
            bx = cx[b]
            by = cy[b]
            ex = bx - ax
            ey = by - ay
            length2 = ex * ex + ey * ey
            if length2 == 0.0:
                continue
            t = ((x - ax) * ex + (y - ay) * ey) / length2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            qx = ax + t * ex
            qy = ay + t * ey
            dist = hypot(x - qx, y - qy)
            if (not have_seg) or dist < best:
                best = dist
                length = sqrt(length2)
                tx = ex / length
                ty = ey / length
                px = qx
                py = qy
                have_seg = True
        cross = tx * (y - py) - ty * (x - px)
        d = best if cross >= 0.0 else -best
        rows[step, 0] = step * dt
        rows[step, 1] = x
        rows[step, 2] = y
        rows[step, 3] = theta
        rows[step, 4] = v
        rows[step, 5] = d
        steps = step + 1
        if hypot(x - gx, y - gy) <= goal_radius:
            reached = 1
            break
        if d < -deadband:
            dtheta = atan(gain / v)
        elif d > deadband:
            dtheta = -atan(gain / v)
        else:
            dtheta = 0.0
        dv = -decel if (d > deadband or d < -deadband) else accel
        x += v * cos(theta) * dt
        y += v * sin(theta) * dt
        theta += dtheta * dt
        v += dv * dt
        if v < 1.0:
            v = 1.0
    return np.asarray(rows[:steps]), reached


# ---------------------------------------------------------------------------
# polyline self-intersection
# ---------------------------------------------------------------------------

cdef inline bint _on_segment(double px, double py, double qx, double qy,
                             double rx, double ry):
    return (min(px, rx) <= qx <= max(px, rx)) and (min(py, ry) <= qy <= max(py, ry))


cdef inline int _orient(double ax, double ay, double bx, double by, double cx, double cy):
    cdef double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if v > 0.0:
        return 1
    if v < 0.0:
        return -1
    return 0


cdef bint _segments_cross(double p1x, double p1y, double p2x, double p2y,
                          double q1x, double q1y, double q2x, double q2y):
    cdef int d1 = _orient(q1x, q1y, q2x, q2y, p1x, p1y)
    cdef int d2 = _orient(q1x, q1y, q2x, q2y, p2x, p2y)
    cdef int d3 = _orient(p1x, p1y, p2x, p2y, q1x, q1y)
    cdef int d4 = _orient(p1x, p1y, p2x, p2y, q2x, q2y)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
       ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(q1x, q1y, p1x, p1y, q2x, q2y):
        return True
    if d2 == 0 and _on_segment(q1x, q1y, p2x, p2y, q2x, q2y):
        return True
    if d3 == 0 and _on_segment(p1x, p1y, q1x, q1y, p2x, p2y):
        return True
    if d4 == 0 and _on_segment(p1x, p1y, q2x, q2y, p2x, p2y):
        return True
    return False


def first_self_intersection(xs_in, ys_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ys = np.ascontiguousarray(ys_in, dtype=np.float64)
    cdef Py_ssize_t n_seg = xs.shape[0] - 1
    if n_seg < 3:
        return -1, -1

    cdef double cell = 0.0
    cdef double slen
    cdef Py_ssize_t i
    for i in range(n_seg):
        slen = hypot(xs[i + 1] - xs[i], ys[i + 1] - ys[i])
        if slen > cell:
            cell = slen
    cell *= 2.0
    if cell <= 0.0:
        return -1, -1

    cdef cnp.ndarray[cnp.float64_t, ndim=1] mx = np.empty(n_seg, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] my = np.empty(n_seg, dtype=np.float64)
    cdef double ox = 1e300
    cdef double oy = 1e300
    for i in range(n_seg):
        mx[i] = (xs[i] + xs[i + 1]) * 0.5
        my[i] = (ys[i] + ys[i + 1]) * 0.5
        if mx[i] < ox:
            ox = mx[i]
        if my[i] < oy:
            oy = my[i]

    cdef cnp.ndarray[cnp.int64_t, ndim=1] gx = np.empty(n_seg, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] gy = np.empty(n_seg, dtype=np.int64)
    cdef long nx = 0
    cdef long ny = 0
    for i in range(n_seg):
        gx[i] = <long> floor((mx[i] - ox) / cell)
        gy[i] = <long> floor((my[i] - oy) / cell)
        if gx[i] + 1 > nx:
            nx = gx[i] + 1
        if gy[i] + 1 > ny:
            ny = gy[i] + 1

    # counting-sort segments into grid cells (CSR layout)
    cdef long n_cells = nx * ny
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(n_cells + 1, dtype=np.int64)
    cdef long ci
    for i in range(n_seg):
        ci = gx[i] * ny + gy[i]
        counts[ci + 1] += 1
    for ci in range(n_cells):
        counts[ci + 1] += counts[ci]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fill = np.array(counts[:n_cells], dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] items = np.empty(n_seg, dtype=np.int64)
    for i in range(n_seg):
        ci = gx[i] * ny + gy[i]
        items[fill[ci]] = i
        fill[ci] += 1

    cdef long bx2, by2, k, jj
    cdef long best_j
    for i in range(n_seg):
        best_j = -1
        for bx2 in range(gx[i] - 1, gx[i] + 2):
            if bx2 < 0 or bx2 >= nx:
                continue
            for by2 in range(gy[i] - 1, gy[i] + 2):
                if by2 < 0 or by2 >= ny:
                    continue
                ci = bx2 * ny + by2
                for k in range(counts[ci], counts[ci + 1]):
                    jj = items[k]
                    if jj < i + 2:
                        continue
                    if best_j != -1 and jj >= best_j:
                        continue
                    if _segments_cross(xs[i], ys[i], xs[i + 1], ys[i + 1],
                                       xs[jj], ys[jj], xs[jj + 1], ys[jj + 1]):
                        best_j = jj
        if best_j != -1:
            return i, best_j
    return -1, -1
