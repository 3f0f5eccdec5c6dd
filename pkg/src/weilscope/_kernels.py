"""Hot integer kernels with numba and pure-numpy implementations.

Backend selection: WEILSCOPE_KERNELS=auto|numba|numpy (default auto, which
uses numba when importable). Both implementations of every kernel produce
identical arrays; the test suite runs them against each other.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigInvalid

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func
        return wrap


_FORCED: str | None = None


def _detect() -> str:
    if _FORCED is not None:
        return _FORCED
    env = os.environ.get("WEILSCOPE_KERNELS", "auto").lower()
    if env not in ("auto", "numba", "numpy"):
        raise ConfigInvalid(f"WEILSCOPE_KERNELS must be auto|numba|numpy, got {env!r}")
    if env == "numba" and not HAS_NUMBA:
        raise ConfigInvalid("WEILSCOPE_KERNELS=numba but numba is not importable")
    if env == "numpy":
        return "numpy"
    return "numba" if HAS_NUMBA else "numpy"


def active_backend() -> str:
    return _detect()


def set_backend(name: str | None) -> None:
    """Force a backend for this process (None restores env-based selection)."""
    global _FORCED
    if name is not None and name not in ("numba", "numpy"):
        raise ConfigInvalid(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise ConfigInvalid("numba backend requested but numba is not importable")
    _FORCED = name


def _resolve(backend: str | None) -> str:
    if backend is None:
        return _detect()
    if backend not in ("numba", "numpy"):
        raise ConfigInvalid(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise ConfigInvalid("numba backend requested but numba is not importable")
    return backend


# ---------------------------------------------------------------------------
# antilog chain: packed coefficient value of x^k mod (modulus, p), k < q-1


@njit(cache=True)
def _antilog_chain_numba(mod_low, p, m, q):
    out = np.empty(q - 1, np.int64)
    vec = np.zeros(m, np.int64)
    vec[0] = 1
    ppow = np.empty(m, np.int64)
    w = 1
    for i in range(m):
        ppow[i] = w
        w *= p
    for k in range(q - 1):
        packed = 0
        for i in range(m):
            packed += vec[i] * ppow[i]
        out[k] = packed
        c = vec[m - 1]
        for i in range(m - 1, 0, -1):
            vec[i] = (vec[i - 1] - c * mod_low[i]) % p
        vec[0] = (-c * mod_low[0]) % p
    return out


def _antilog_chain_numpy(mod_low, p, m, q):
    # blocked companion-matrix power chain; O(q*m^2/B) matmuls of width B
    M = np.zeros((m, m), np.int64)
    for i in range(1, m):
        M[i, i - 1] = 1
    M[:, m - 1] = (-mod_low) % p
    B = min(4096, q - 1)
    cols = np.zeros((m, B), np.int64)
    v = np.zeros(m, np.int64)
    v[0] = 1
    for j in range(B):
        cols[:, j] = v
        v = (M @ v) % p
    MB = np.eye(m, dtype=np.int64)
    base, e = M.copy(), B
    while e:
        if e & 1:
            MB = (MB @ base) % p
        base = (base @ base) % p
        e >>= 1
    ppow = p ** np.arange(m, dtype=np.int64)
    out = np.empty(q - 1, np.int64)
    pos, cur = 0, cols
    while pos < q - 1:
        w = min(B, q - 1 - pos)
        out[pos:pos + w] = ppow @ cur[:, :w]
        pos += w
        if pos < q - 1:
            cur = (MB @ cur) % p
    return out


def antilog_chain(mod_low, p, m, q, backend=None):
    """Packed base-p values of x^0..x^(q-2) modulo a monic degree-m modulus.

    mod_low holds the m lower coefficients a_0..a_{m-1}.
    """
    mod_low = np.ascontiguousarray(mod_low, dtype=np.int64)
    if _resolve(backend) == "numba":
        return _antilog_chain_numba(mod_low, p, m, q)
    return _antilog_chain_numpy(mod_low, p, m, q)


# ---------------------------------------------------------------------------
# differential map via Zech logarithms: counts of x^s + (1-x)^s by code


@njit(cache=True)
def _zech_diff_counts_numba(zech, s, neg_off, q):
    counts = np.zeros(q, np.int64)
    qm1 = q - 1
    for k in range(qm1):
        j = k + neg_off
        if j >= qm1:
            j -= qm1
        z1 = zech[j]
        if z1 < 0:
            code = (k * s) % qm1 + 1  # x = 1: the sum collapses to x^s
        else:
            d = (z1 - k) % qm1
            z2 = zech[(d * s) % qm1]
            if z2 < 0:
                code = 0  # (1-x)^s = -x^s: the sum vanishes
            else:
                code = (k * s + z2) % qm1 + 1
        counts[code] += 1
    counts[1] += 1  # x = 0 contributes 0^s + 1^s = 1
    return counts


def _zech_diff_counts_numpy(zech, s, neg_off, q):
    qm1 = q - 1
    k = np.arange(qm1, dtype=np.int64)
    j = k + neg_off
    j[j >= qm1] -= qm1
    z1 = zech[j]
    one_mask = z1 < 0
    ks = (k * s) % qm1
    d = (z1 - k) % qm1
    z2 = zech[(d * s) % qm1]
    zero_mask = (z2 < 0) & ~one_mask
    codes = (ks + z2) % qm1 + 1
    codes[one_mask] = ks[one_mask] + 1
    codes[zero_mask] = 0
    counts = np.bincount(codes, minlength=q)
    counts[1] += 1
    return counts


def zech_diff_counts(zech, s, neg_off, q, backend=None):
    """counts[code] = #{x in L : x^s + (1-x)^s = element(code)}."""
    zech = np.ascontiguousarray(zech, dtype=np.int64)
    if _resolve(backend) == "numba":
        return _zech_diff_counts_numba(zech, np.int64(s), np.int64(neg_off), np.int64(q))
    return _zech_diff_counts_numpy(zech, int(s), int(neg_off), int(q))


# ---------------------------------------------------------------------------
# Walsh-Hadamard transform (characteristic 2), exact int64, in place


@njit(cache=True)
def _wht_numba(a):
    n = a.shape[0]
    h = 1
    while h < n:
        for i in range(0, n, h * 2):
            for j in range(i, i + h):
                x = a[j]
                y = a[j + h]
                a[j] = x + y
                a[j + h] = x - y
        h *= 2


def _wht_numpy(a):
    n = a.shape[0]
    h = 1
    while h < n:
        b = a.reshape(-1, 2, h)
        x = b[:, 0, :].copy()
        y = b[:, 1, :]
        b[:, 0, :] = x + y
        b[:, 1, :] = x - y
        h *= 2


def wht(values, backend=None):
    """In-place integer Walsh-Hadamard transform of a length-2^m array."""
    if _resolve(backend) == "numba":
        _wht_numba(values)
    else:
        _wht_numpy(values)
    return values


# ---------------------------------------------------------------------------
# p-ary character transform (odd p), exact, in the group-ring counts basis


@njit(cache=True)
def _pary_transform_numba(exps, p, m):
    q = exps.shape[0]
    W = np.zeros((q, p), np.int64)
    nb = q // p
    for b in range(nb):
        for u0 in range(p):
            e = exps[b * p + u0]
            for t in range(p):
                W[b * p + t, (e - t * u0) % p] += 1
    stride = p
    for _ in range(1, m):
        out = np.zeros((q, p), np.int64)
        period = stride * p
        nblocks = q // period
        for blk in range(nblocks):
            base = blk * period
            for inner in range(stride):
                for t in range(p):
                    r = base + t * stride + inner
                    for j in range(p):
                        src = base + j * stride + inner
                        tj = (t * j) % p
                        for c in range(p):
                            cc = c + tj
                            if cc >= p:
                                cc -= p
                            out[r, c] += W[src, cc]
        W = out
        stride *= p
    return W


def _pary_transform_numpy(exps, p, m):
    q = exps.shape[0]
    W = np.zeros((q, p), np.int64)
    flat = W.reshape(-1)
    E = exps.reshape(-1, p)
    base = np.arange(q // p, dtype=np.int64) * (p * p)
    digit = np.arange(p, dtype=np.int64)
    for t in range(p):
        c = (E - t * digit[None, :]) % p
        idx = base[:, None] + (t * p) + c
        flat += np.bincount(idx.ravel(), minlength=q * p)
    inv = [0] + [pow(j, p - 2, p) for j in range(1, p)]
    coord = np.arange(p)
    stride = p
    for _ in range(1, m):
        V = W.reshape(-1, p, stride, p)
        out = np.zeros_like(V)
        for w in range(p):
            R = V[..., (coord + w) % p]
            if w == 0:
                out[:, 0] += R.sum(axis=1)
                s0 = R[:, 0]
                for t in range(1, p):
                    out[:, t] += s0
            else:
                for j in range(1, p):
                    out[:, (w * inv[j]) % p] += R[:, j]
        W = out.reshape(q, p)
        stride *= p
    return W


def pary_transform(exps, p, m, backend=None):
    """All characters of the additive group applied to u -> zeta^exps[u].

    Output row v is the counts vector of sum_u zeta^(exps[u] - u.v) where
    u.v is the coordinatewise dot product of base-p digit vectors.
    """
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    if _resolve(backend) == "numba":
        return _pary_transform_numba(exps, np.int64(p), np.int64(m))
    return _pary_transform_numpy(exps, int(p), int(m))


# ---------------------------------------------------------------------------
# direct per-a spectrum rows: counts of Tr(scale x^s) - Tr(a x) modulo p


@njit(cache=True)
def _naive_counts_numba(ts, tr, codes, p, q):
    n = codes.shape[0]
    qm1 = q - 1
    out = np.zeros((n, p), np.int64)
    for i in range(n):
        c = codes[i]
        if c == 0:
            for k in range(qm1):
                out[i, ts[k] % p] += 1
        else:
            la = c - 1
            for k in range(qm1):
                j = la + k
                if j >= qm1:
                    j -= qm1
                d = (ts[k] - tr[j]) % p
                out[i, d] += 1
        out[i, 0] += 1  # x = 0 term
    return out


def _naive_counts_numpy(ts, tr, codes, p, q):
    n = codes.shape[0]
    out = np.empty((n, p), dtype=np.int64)
    zero_rows = codes == 0
    if zero_rows.any():
        out[zero_rows] = np.bincount(ts % p, minlength=p)
    rest = ~zero_rows
    if rest.any():
        te2 = np.concatenate([tr, tr])
        windows = np.lib.stride_tricks.sliding_window_view(te2, q - 1)
        las = codes[rest] - 1
        d = (ts[None, :] - windows[las]) % p
        flat = d + p * np.arange(d.shape[0], dtype=np.int64)[:, None]
        out[rest] = np.bincount(
            flat.ravel(), minlength=d.shape[0] * p).reshape(d.shape[0], p)
    out[:, 0] += 1  # x = 0 term
    return out


def naive_counts(ts, tr, codes, p, q, backend=None):
    """Spectrum counts rows by direct evaluation of the defining sums.

    ts[k] = Tr(scale x^s) and tr[k] = Tr(x) indexed by discrete log k; row i
    is the exponent histogram of W(a) for the element code codes[i].
    """
    ts = np.ascontiguousarray(ts, dtype=np.int64)
    tr = np.ascontiguousarray(tr, dtype=np.int64)
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    if _resolve(backend) == "numba":
        return _naive_counts_numba(ts, tr, codes, np.int64(p), np.int64(q))
    return _naive_counts_numpy(ts, tr, codes, int(p), int(q))
