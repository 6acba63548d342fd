"""Hot raster kernels with two interchangeable backends.

Every operation here has a numba-jitted implementation and a pure
NumPy/SciPy one. The active backend is chosen by the MANGAHUE_BACKEND
environment variable ("numba" or "numpy"); the default is numba when it
imports, numpy otherwise. Both backends are bit-identical: integer ops are
exact and the float blur accumulates taps in the same order.

Window conventions (shared by erosion, dilation and min-filter):
a square element of side ``diameter`` anchored ``offset`` pixels up/left of
the output pixel, so the window for output (y, x) spans rows
[y-offset, y-offset+diameter-1] and the same columns. Pixels outside the
image are treated as absent: window_all requires the window to lie fully
inside the image, window_any/window_min simply skip out-of-bounds taps.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only where numba is absent
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def deco(fn):
            return fn

        return deco


INT_SENTINEL = np.iinfo(np.int32).max

_VALID_BACKENDS = ("numba", "numpy")


def _default_backend() -> str:
    choice = os.environ.get("MANGAHUE_BACKEND", "").strip().lower()
    if choice in _VALID_BACKENDS:
        if choice == "numba" and not HAS_NUMBA:
            return "numpy"
        return choice
    return "numba" if HAS_NUMBA else "numpy"


_BACKEND = _default_backend()


def backend() -> str:
    """Name of the active kernel backend."""
    return _BACKEND


def set_backend(name: str) -> None:
    """Switch kernel backend at runtime ("numba" or "numpy")."""
    global _BACKEND
    if name not in _VALID_BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID_BACKENDS}")
    if name == "numba" and not HAS_NUMBA:
        raise ValueError("numba backend requested but numba is not installed")
    _BACKEND = name


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


@njit(cache=True)
def _win_all_h_nb(m, d, off):
    h, w = m.shape
    out = np.zeros((h, w), np.bool_)
    ps = np.empty(w + 1, np.int32)
    for y in range(h):
        ps[0] = 0
        for x in range(w):
            ps[x + 1] = ps[x] + (1 if m[y, x] else 0)
        for x in range(w):
            a = x - off
            b = a + d
            if a >= 0 and b <= w and ps[b] - ps[a] == d:
                out[y, x] = True
    return out


@njit(cache=True)
def _win_all_v_nb(m, d, off):
    h, w = m.shape
    out = np.zeros((h, w), np.bool_)
    ps = np.zeros((h + 1, w), np.int32)
    for y in range(h):
        for x in range(w):
            ps[y + 1, x] = ps[y, x] + (1 if m[y, x] else 0)
    for y in range(h):
        a = y - off
        b = a + d
        if a >= 0 and b <= h:
            for x in range(w):
                if ps[b, x] - ps[a, x] == d:
                    out[y, x] = True
    return out


@njit(cache=True)
def _win_any_h_nb(m, d, off):
    h, w = m.shape
    out = np.zeros((h, w), np.bool_)
    ps = np.empty(w + 1, np.int32)
    for y in range(h):
        ps[0] = 0
        for x in range(w):
            ps[x + 1] = ps[x] + (1 if m[y, x] else 0)
        for x in range(w):
            a = x - off
            if a < 0:
                a = 0
            b = x - off + d
            if b > w:
                b = w
            if a < b and ps[b] - ps[a] > 0:
                out[y, x] = True
    return out


@njit(cache=True)
def _win_any_v_nb(m, d, off):
    h, w = m.shape
    out = np.zeros((h, w), np.bool_)
    ps = np.zeros((h + 1, w), np.int32)
    for y in range(h):
        for x in range(w):
            ps[y + 1, x] = ps[y, x] + (1 if m[y, x] else 0)
    for y in range(h):
        a = y - off
        if a < 0:
            a = 0
        b = y - off + d
        if b > h:
            b = h
        if a < b:
            for x in range(w):
                if ps[b, x] - ps[a, x] > 0:
                    out[y, x] = True
    return out


@njit(cache=True)
def _win_min_h_nb(v, d, off, sentinel):
    h, w = v.shape
    out = np.empty((h, w), np.int32)
    for y in range(h):
        for x in range(w):
            best = sentinel
            for k in range(d):
                xx = x - off + k
                if 0 <= xx < w and v[y, xx] < best:
                    best = v[y, xx]
            out[y, x] = best
    return out


@njit(cache=True)
def _win_min_v_nb(v, d, off, sentinel):
    h, w = v.shape
    out = np.empty((h, w), np.int32)
    for y in range(h):
        for x in range(w):
            best = sentinel
            for k in range(d):
                yy = y - off + k
                if 0 <= yy < h and v[yy, x] < best:
                    best = v[yy, x]
            out[y, x] = best
    return out


@njit(cache=True)
def _uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def _label_cc_nb(mask, eight):
    h, w = mask.shape
    labels = np.zeros((h, w), np.int32)
    parent = np.zeros(h * w // 2 + 2, np.int32)
    nxt = 1
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                continue
            lab = 0
            if x > 0 and mask[y, x - 1]:
                lab = _uf_find(parent, labels[y, x - 1])
            if y > 0:
                if mask[y - 1, x]:
                    r = _uf_find(parent, labels[y - 1, x])
                    if lab == 0:
                        lab = r
                    elif r != lab:
                        parent[r] = lab
                if eight:
                    if x > 0 and mask[y - 1, x - 1]:
                        r = _uf_find(parent, labels[y - 1, x - 1])
                        if lab == 0:
                            lab = r
                        elif r != lab:
                            parent[r] = lab
                    if x + 1 < w and mask[y - 1, x + 1]:
                        r = _uf_find(parent, labels[y - 1, x + 1])
                        if lab == 0:
                            lab = r
                        elif r != lab:
                            parent[r] = lab
            if lab == 0:
                lab = nxt
                parent[lab] = lab
                nxt += 1
            labels[y, x] = lab
    remap = np.zeros(nxt, np.int32)
    count = 0
    for y in range(h):
        for x in range(w):
            if labels[y, x]:
                r = _uf_find(parent, labels[y, x])
                if remap[r] == 0:
                    count += 1
                    remap[r] = count
                labels[y, x] = remap[r]
    return labels, count


@njit(cache=True)
def _label_cc_values_nb(values, mask):
    h, w = mask.shape
    labels = np.zeros((h, w), np.int32)
    parent = np.zeros(h * w // 2 + 2, np.int32)
    nxt = 1
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                continue
            v = values[y, x]
            lab = 0
            if x > 0 and mask[y, x - 1] and values[y, x - 1] == v:
                lab = _uf_find(parent, labels[y, x - 1])
            if y > 0 and mask[y - 1, x] and values[y - 1, x] == v:
                r = _uf_find(parent, labels[y - 1, x])
                if lab == 0:
                    lab = r
                elif r != lab:
                    parent[r] = lab
            if lab == 0:
                lab = nxt
                parent[lab] = lab
                nxt += 1
            labels[y, x] = lab
    remap = np.zeros(nxt, np.int32)
    count = 0
    for y in range(h):
        for x in range(w):
            if labels[y, x]:
                r = _uf_find(parent, labels[y, x])
                if remap[r] == 0:
                    count += 1
                    remap[r] = count
                labels[y, x] = remap[r]
    return labels, count


@njit(cache=True)
def _expand_nb(labels, growable):
    h, w = labels.shape
    size = h * w
    cur = np.empty(size, np.int64)
    nxt = np.empty(size, np.int64)
    pending = np.zeros(size, np.int32)
    ncur = 0
    for y in range(h):
        for x in range(w):
            if labels[y, x] <= 0:
                continue
            grows = False
            if x > 0 and growable[y, x - 1] and labels[y, x - 1] == 0:
                grows = True
            elif x + 1 < w and growable[y, x + 1] and labels[y, x + 1] == 0:
                grows = True
            elif y > 0 and growable[y - 1, x] and labels[y - 1, x] == 0:
                grows = True
            elif y + 1 < h and growable[y + 1, x] and labels[y + 1, x] == 0:
                grows = True
            if grows:
                cur[ncur] = y * w + x
                ncur += 1
    while ncur > 0:
        nnxt = 0
        for i in range(ncur):
            idx = cur[i]
            y = idx // w
            x = idx % w
            lab = labels[y, x]
            for t in range(4):
                if t == 0:
                    ny, nx = y, x - 1
                elif t == 1:
                    ny, nx = y, x + 1
                elif t == 2:
                    ny, nx = y - 1, x
                else:
                    ny, nx = y + 1, x
                if 0 <= ny < h and 0 <= nx < w and growable[ny, nx] and labels[ny, nx] == 0:
                    nidx = ny * w + nx
                    if pending[nidx] == 0:
                        pending[nidx] = lab
                        nxt[nnxt] = nidx
                        nnxt += 1
                    elif lab < pending[nidx]:
                        pending[nidx] = lab
        for i in range(nnxt):
            idx = nxt[i]
            labels[idx // w, idx % w] = pending[idx]
        tmp = cur
        cur = nxt
        nxt = tmp
        ncur = nnxt


@njit(cache=True)
def _blur_h_nb(src, wts):
    h, w = src.shape
    n = wts.size
    r = (n - 1) // 2
    out = np.empty((h, w), np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for k in range(n):
                xx = x + k - r
                if xx < 0:
                    xx = 0
                elif xx >= w:
                    xx = w - 1
                acc += wts[k] * src[y, xx]
            out[y, x] = acc
    return out


@njit(cache=True)
def _blur_v_nb(src, wts):
    h, w = src.shape
    n = wts.size
    r = (n - 1) // 2
    out = np.empty((h, w), np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for k in range(n):
                yy = y + k - r
                if yy < 0:
                    yy = 0
                elif yy >= h:
                    yy = h - 1
                acc += wts[k] * src[yy, x]
            out[y, x] = acc
    return out


# ---------------------------------------------------------------------------
# NumPy implementations
# ---------------------------------------------------------------------------


def _win_all_h_np(m, d, off):
    h, w = m.shape
    ps = np.zeros((h, w + 1), np.int32)
    np.cumsum(m, axis=1, out=ps[:, 1:])
    a = np.arange(w) - off
    b = a + d
    valid = (a >= 0) & (b <= w)
    av = np.clip(a, 0, w)
    bv = np.clip(b, 0, w)
    return valid[None, :] & ((ps[:, bv] - ps[:, av]) == d)


def _win_any_h_np(m, d, off):
    h, w = m.shape
    ps = np.zeros((h, w + 1), np.int32)
    np.cumsum(m, axis=1, out=ps[:, 1:])
    a = np.clip(np.arange(w) - off, 0, w)
    b = np.clip(np.arange(w) - off + d, 0, w)
    return (ps[:, b] - ps[:, a]) > 0


def _win_min_h_np(v, d, off, sentinel):
    h, w = v.shape
    padded = np.full((h, w + d), sentinel, np.int32)
    padded[:, off:off + w] = v
    out = padded[:, 0:w].copy()
    for k in range(1, d):
        np.minimum(out, padded[:, k:k + w], out=out)
    return out


def _label_cc_np(mask, eight):
    from scipy import ndimage

    structure = np.ones((3, 3), bool) if eight else np.array(
        [[0, 1, 0], [1, 1, 1], [0, 1, 0]], bool)
    labels, n = ndimage.label(mask, structure=structure)
    labels = labels.astype(np.int32)
    if n == 0:
        return labels, 0
    return _relabel_raster_order(labels, n)


def _relabel_raster_order(labels, n):
    # ids may have gaps (e.g. after re-splitting); vacant ids sort last and
    # end up past the returned count, which only counts occupied ids
    flat = labels.ravel()
    nz = np.flatnonzero(flat)
    first = np.full(n + 1, flat.size, np.int64)
    np.minimum.at(first, flat[nz], nz)
    order = np.argsort(first[1:], kind="stable")
    remap = np.zeros(n + 1, np.int32)
    remap[order + 1] = np.arange(1, n + 1, dtype=np.int32)
    return remap[labels], int((first[1:] < flat.size).sum())


def _label_cc_values_np(values, mask):
    from scipy import ndimage

    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], bool)
    parts, n = ndimage.label(mask, structure=structure)
    parts = parts.astype(np.int32)
    if n == 0:
        return parts, 0
    idx = np.arange(1, n + 1)
    lo = ndimage.minimum(values, labels=parts, index=idx)
    hi = ndimage.maximum(values, labels=parts, index=idx)
    mixed = np.flatnonzero(lo != hi) + 1
    if mixed.size:
        # A part that spans several values must be re-split per value; rare,
        # so a per-part loop is fine here.
        out = np.where(np.isin(parts, mixed), 0, parts)
        nxt = n
        slices = ndimage.find_objects(parts)
        for pid in mixed:
            sl = slices[pid - 1]
            sub_mask = parts[sl] == pid
            sub_vals = values[sl]
            for v in np.unique(sub_vals[sub_mask]):
                piece, pn = ndimage.label(sub_mask & (sub_vals == v), structure=structure)
                sel = piece > 0
                out[sl][sel] = piece[sel] + nxt
                nxt += pn
        parts, n = out, nxt
    return _relabel_raster_order(parts, n)


def _expand_np(labels, growable):
    fvals = np.where(labels > 0, labels, INT_SENTINEL).astype(np.int32)
    open_ = growable & (labels == 0)
    while True:
        cand = np.full_like(fvals, INT_SENTINEL)
        np.minimum(cand[1:, :], fvals[:-1, :], out=cand[1:, :])
        np.minimum(cand[:-1, :], fvals[1:, :], out=cand[:-1, :])
        np.minimum(cand[:, 1:], fvals[:, :-1], out=cand[:, 1:])
        np.minimum(cand[:, :-1], fvals[:, 1:], out=cand[:, :-1])
        new = open_ & (cand != INT_SENTINEL)
        if not new.any():
            break
        labels[new] = cand[new]
        open_ &= ~new
        fvals = np.where(new, cand, INT_SENTINEL)


def _blur_h_np(src, wts):
    h, w = src.shape
    r = (wts.size - 1) // 2
    padded = np.pad(src, ((0, 0), (r, r)), mode="edge")
    out = np.zeros((h, w), np.float64)
    for k in range(wts.size):
        out += wts[k] * padded[:, k:k + w]
    return out


def _blur_v_np(src, wts):
    h, w = src.shape
    r = (wts.size - 1) // 2
    padded = np.pad(src, ((r, r), (0, 0)), mode="edge")
    out = np.zeros((h, w), np.float64)
    for k in range(wts.size):
        out += wts[k] * padded[k:k + h, :]
    return out


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------


def window_all(mask: np.ndarray, diameter: int, offset: int) -> np.ndarray:
    """True where the whole window lies inside the image and inside ``mask``."""
    m = np.ascontiguousarray(mask, dtype=bool)
    if _BACKEND == "numba":
        h = _win_all_h_nb(m, diameter, offset)
        return _win_all_v_nb(h, diameter, offset)
    h = _win_all_h_np(m, diameter, offset)
    return _win_all_h_np(h.T, diameter, offset).T


def window_any(mask: np.ndarray, diameter: int, offset: int) -> np.ndarray:
    """True where the window overlaps at least one ``mask`` pixel."""
    m = np.ascontiguousarray(mask, dtype=bool)
    if _BACKEND == "numba":
        h = _win_any_h_nb(m, diameter, offset)
        return _win_any_v_nb(h, diameter, offset)
    h = _win_any_h_np(m, diameter, offset)
    return _win_any_h_np(h.T, diameter, offset).T


def window_min(values: np.ndarray, diameter: int, offset: int,
               sentinel: int = INT_SENTINEL) -> np.ndarray:
    """Minimum over the window; ``sentinel`` where the window has no taps."""
    v = np.ascontiguousarray(values, dtype=np.int32)
    if _BACKEND == "numba":
        h = _win_min_h_nb(v, diameter, offset, sentinel)
        return _win_min_v_nb(h, diameter, offset, sentinel)
    h = _win_min_h_np(v, diameter, offset, sentinel)
    return np.ascontiguousarray(_win_min_h_np(h.T, diameter, offset, sentinel).T)


def label_components(mask: np.ndarray, connectivity: int = 4) -> tuple[np.ndarray, int]:
    """Label connected true regions 1..n, in raster order of first pixel.

    Returns (int32 labels with 0 as background, region count).
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    m = np.ascontiguousarray(mask, dtype=bool)
    if _BACKEND == "numba":
        labels, n = _label_cc_nb(m, connectivity == 8)
        return labels, int(n)
    labels, n = _label_cc_np(m, connectivity == 8)
    return labels, int(n)


def label_components_values(values: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, int]:
    """4-connected labeling where neighbors join only when values are equal."""
    v = np.ascontiguousarray(values, dtype=np.int32)
    m = np.ascontiguousarray(mask, dtype=bool)
    if _BACKEND == "numba":
        labels, n = _label_cc_values_nb(v, m)
        return labels, int(n)
    labels, n = _label_cc_values_np(v, m)
    return labels, int(n)


def expand_labels(labels: np.ndarray, growable: np.ndarray) -> None:
    """Grow labels into ``growable`` pixels by multi-source BFS, in place.

    4-connectivity; a pixel reached by several fronts in the same BFS level
    takes the lowest label.
    """
    g = np.ascontiguousarray(growable, dtype=bool)
    if _BACKEND == "numba":
        _expand_nb(labels, g)
    else:
        _expand_np(labels, g)


def blur_separable(plane: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Separable correlation with edge replication; float64 in and out."""
    p = np.ascontiguousarray(plane, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if _BACKEND == "numba":
        return _blur_v_nb(_blur_h_nb(p, w), w)
    return _blur_v_np(_blur_h_np(p, w), w)


def warmup() -> None:
    """Force JIT compilation of every numba kernel on a tiny input."""
    if _BACKEND != "numba":
        return
    m = np.zeros((4, 4), bool)
    m[1:3, 1:3] = True
    window_all(m, 2, 0)
    window_any(m, 2, 0)
    window_min(np.ones((4, 4), np.int32), 2, 0)
    label_components(m, 4)
    label_components(m, 8)
    label_components_values(np.ones((4, 4), np.int32), m)
    lab = np.zeros((4, 4), np.int32)
    lab[1, 1] = 1
    expand_labels(lab, ~m)
    blur_separable(np.zeros((4, 4)), np.array([0.25, 0.5, 0.25]))
