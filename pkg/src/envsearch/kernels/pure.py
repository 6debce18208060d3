"""Pure-Python kernels for the surrogate-model inner loops.

These are the reference implementations of the hot paths; the compiled
extension in ``_speedups.pyx`` mirrors them operation for operation so both
backends produce identical results (the test suite asserts this).  Keep the
floating-point expressions in the two files textually in sync.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# thermostat: per-minute on/off exponential response
# ---------------------------------------------------------------------------

def thermostat_trace(setpoints, mode_rows, coeffs, start_temp, deadband):
    """Simulate the heater response minute by minute.

    setpoints  -- per-minute scheduled temperature, float64[n]
    mode_rows  -- per-minute row index into ``coeffs``, int64[n]
    coeffs     -- rows of (k_on1, k_on2, k_off1, k_off2)
    start_temp -- temperature at minute 0
    deadband   -- heater switches on below setpoint - deadband and off at
                  or above the setpoint (deadband 0 gives a pure bang-bang)

    The exponential response is re-anchored (T0 := current output, t := 0)
    at every heater on/off switch and whenever the active coefficient row
    changes, which keeps the output continuous.

    Returns (outputs float64[n], heater_state uint8[n]).
    """
    setpoints = np.ascontiguousarray(setpoints, dtype=np.float64)
    mode_rows = np.ascontiguousarray(mode_rows, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    n = setpoints.shape[0]
    out = np.empty(n, dtype=np.float64)
    state = np.empty(n, dtype=np.uint8)

    y = float(start_temp)
    heater = 1 if y < setpoints[0] - deadband else 0
    anchor = y
    t = 0
    active = int(mode_rows[0]) if n else 0
    for i in range(n):
        s = setpoints[i]
        m = int(mode_rows[i])
        if m != active:
            active = m
            anchor = y
            t = 0
        if heater and y >= s:
            heater = 0
            anchor = y
            t = 0
        elif not heater and y < s - deadband:
            heater = 1
            anchor = y
            t = 0
        t += 1
        k_on1 = coeffs[active, 0]
        k_on2 = coeffs[active, 1]
        k_off1 = coeffs[active, 2]
        k_off2 = coeffs[active, 3]
        if heater:
            y = k_on1 * (1.0 - math.exp(-k_on2 * t)) + anchor
        else:
            y = k_off1 * math.exp(-k_off2 * t) + anchor - k_off1
        out[i] = y
        state[i] = heater
    return out, state


# ---------------------------------------------------------------------------
# robot: A* on an 8-connected occupancy grid with octile heuristic
# ---------------------------------------------------------------------------

def _octile(dr, dc):
    dr = abs(dr)
    dc = abs(dc)
    if dr < dc:
        dr, dc = dc, dr
    return (dr - dc) + SQRT2 * dc


def astar_grid(occupancy, start, goal):
    """Shortest 8-connected path on a boolean grid (True = blocked).

    Axis moves cost 1, diagonal moves sqrt(2); a diagonal move only needs
    the target cell to be free.  Ties in the open list break on
    (f, h, cell index), which makes the expansion order deterministic.

    Returns (path int64[L, 2], length) or (None, 0.0) if unreachable.
    The reported length is n_axis + sqrt(2) * n_diag computed from the
    final path, so equal-cost paths always report bit-identical lengths.
    """
    occ = np.ascontiguousarray(occupancy, dtype=np.uint8)
    rows, cols = occ.shape
    sr, sc = start
    gr, gc = goal
    if occ[sr, sc] or occ[gr, gc]:
        return None, 0.0
    start_idx = sr * cols + sc
    goal_idx = gr * cols + gc
    if start_idx == goal_idx:
        return np.array([[sr, sc]], dtype=np.int64), 0.0

    g = np.full(rows * cols, np.inf, dtype=np.float64)
    parent = np.full(rows * cols, -1, dtype=np.int64)
    closed = np.zeros(rows * cols, dtype=np.uint8)
    g[start_idx] = 0.0
    h0 = _octile(sr - gr, sc - gc)
    open_heap = [(h0, h0, start_idx)]

    moves = ((-1, -1, SQRT2), (-1, 0, 1.0), (-1, 1, SQRT2),
             (0, -1, 1.0), (0, 1, 1.0),
             (1, -1, SQRT2), (1, 0, 1.0), (1, 1, SQRT2))

    found = False
    while open_heap:
        _, _, idx = heapq.heappop(open_heap)
        if closed[idx]:
            continue
        closed[idx] = 1
        if idx == goal_idx:
            found = True
            break
        r = idx // cols
        c = idx - r * cols
        for dr, dc, cost in moves:
            nr = r + dr
            nc = c + dc
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
                continue
            if occ[nr, nc]:
                continue
            nidx = nr * cols + nc
            if closed[nidx]:
                continue
            ng = g[idx] + cost
            if ng < g[nidx]:
                g[nidx] = ng
                parent[nidx] = idx
                nh = _octile(nr - gr, nc - gc)
                heapq.heappush(open_heap, (ng + nh, nh, nidx))
    if not found:
        return None, 0.0

    cells = []
    idx = goal_idx
    while idx != -1:
        cells.append((idx // cols, idx - (idx // cols) * cols))
        idx = parent[idx]
    cells.reverse()
    path = np.array(cells, dtype=np.int64)
    steps = np.abs(np.diff(path, axis=0))
    n_diag = int(np.sum(np.min(steps, axis=1)))
    n_axis = int(np.sum(np.max(steps, axis=1))) - n_diag
    return path, n_axis + SQRT2 * n_diag


# ---------------------------------------------------------------------------
# car: Euler-integrated point-mass with cross-track steering law
# ---------------------------------------------------------------------------

def drive_car(cx, cy, speed0, gain, decel, accel, deadband, dt, max_steps, goal_radius):
    """Drive the surrogate car along a dense centerline.

    The car starts on the first centerline point, aligned with the local
    road direction.  Each step measures the signed cross-track distance d
    (positive left of the travel direction) to the nearest point of the
    polyline (nearest-vertex scan refined by projection onto the adjacent
    segments), steers by +-atan(gain / v) outside the deadband, decelerates
    outside / accelerates inside it, and Euler-integrates the pose.

    Returns (trajectory float64[T, 6] rows of (t, x, y, theta, v, d),
    reached flag).
    """
    cx = np.ascontiguousarray(cx, dtype=np.float64)
    cy = np.ascontiguousarray(cy, dtype=np.float64)
    n = cx.shape[0]
    rows = np.empty((max_steps, 6), dtype=np.float64)

    x = cx[0]
    y = cy[0]
    theta = math.atan2(cy[1] - cy[0], cx[1] - cx[0])
    v = float(speed0)
    gx = cx[n - 1]
    gy = cy[n - 1]
    reached = 0
    steps = 0

    for step in range(max_steps):
        # nearest vertex (first minimum wins), then project on its segments
        d2 = (cx - x) ** 2 + (cy - y) ** 2
        j = int(np.argmin(d2))
        best = math.sqrt(d2[j])
        tx = 0.0
        ty = 0.0
        px = cx[j]
        py = cy[j]
        have_seg = False
        for a in (j - 1, j):
            b = a + 1
            if a < 0 or b >= n:
                continue
            ax, ay = cx[a], cy[a]
            bx, by = cx[b], cy[b]
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
            dist = math.hypot(x - qx, y - qy)
            if not have_seg or dist < best:
                best = dist
                length = math.sqrt(length2)
                tx = ex / length
                ty = ey / length
                px = qx
                py = qy
                have_seg = True
        # signed cross-track distance: positive left of the travel direction
        cross = tx * (y - py) - ty * (x - px)
        d = best if cross >= 0.0 else -best
        rows[step, 0] = step * dt
        rows[step, 1] = x
        rows[step, 2] = y
        rows[step, 3] = theta
        rows[step, 4] = v
        rows[step, 5] = d
        steps = step + 1
        if math.hypot(x - gx, y - gy) <= goal_radius:
            reached = 1
            break
        if d < -deadband:
            dtheta = math.atan(gain / v)
        elif d > deadband:
            dtheta = -math.atan(gain / v)
        else:
            dtheta = 0.0
        dv = -decel if (d > deadband or d < -deadband) else accel
        x += v * math.cos(theta) * dt
        y += v * math.sin(theta) * dt
        theta += dtheta * dt
        v += dv * dt
        if v < 1.0:
            v = 1.0
    return rows[:steps], reached


# ---------------------------------------------------------------------------
# road validity: first self-intersecting pair of non-adjacent segments
# ---------------------------------------------------------------------------

def _on_segment(px, py, qx, qy, rx, ry):
    return min(px, rx) <= qx <= max(px, rx) and min(py, ry) <= qy <= max(py, ry)

def _orient(ax, ay, bx, by, cx, cy):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if v > 0.0:
        return 1
    if v < 0.0:
        return -1
    return 0

def _segments_cross(p1x, p1y, p2x, p2y, q1x, q1y, q2x, q2y):
    d1 = _orient(q1x, q1y, q2x, q2y, p1x, p1y)
    d2 = _orient(q1x, q1y, q2x, q2y, p2x, p2y)
    d3 = _orient(p1x, p1y, p2x, p2y, q1x, q1y)
    d4 = _orient(p1x, p1y, p2x, p2y, q2x, q2y)
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


def first_self_intersection(xs, ys):
    """Lexicographically smallest (i, j) with segments i and j crossing,
    j >= i + 2; (-1, -1) when the polyline is simple.

    Candidate pairs come from a uniform spatial grid over the segment
    midpoints (cell size twice the longest segment), so only nearby
    segments are tested exactly.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    n_seg = xs.shape[0] - 1
    if n_seg < 3:
        return -1, -1
    seg_len = np.hypot(np.diff(xs), np.diff(ys))
    cell = 2.0 * float(np.max(seg_len))
    if cell <= 0.0:
        return -1, -1
    mx = (xs[:-1] + xs[1:]) * 0.5
    my = (ys[:-1] + ys[1:]) * 0.5
    ox = float(np.min(mx))
    oy = float(np.min(my))
    gx = np.floor((mx - ox) / cell).astype(np.int64)
    gy = np.floor((my - oy) / cell).astype(np.int64)
    buckets: dict = {}
    for i in range(n_seg):
        buckets.setdefault((int(gx[i]), int(gy[i])), []).append(i)
    for i in range(n_seg):
        cands = []
        for bx in (gx[i] - 1, gx[i], gx[i] + 1):
            for by in (gy[i] - 1, gy[i], gy[i] + 1):
                cands.extend(buckets.get((int(bx), int(by)), ()))
        cands = sorted(c for c in set(cands) if c >= i + 2)
        for j in cands:
            if _segments_cross(xs[i], ys[i], xs[i + 1], ys[i + 1],
                               xs[j], ys[j], xs[j + 1], ys[j + 1]):
                return i, j
    return -1, -1
