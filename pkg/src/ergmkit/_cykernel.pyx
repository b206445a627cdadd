# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled sampler/change-score kernel.

Statement-for-statement mirror of _pykernel.py: the same splitmix64 stream is
consumed in the same order and every floating-point expression is evaluated
with the same association, so chains from the two kernels are bit-identical.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, pow

cnp.import_array()

KERNEL_NAME = "cython"

ctypedef unsigned long long u64

cdef u64 _GAMMA = 0x9E3779B97F4A7C15ULL
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 _MIX2 = 0x94D049BB133111EBULL
cdef double _UNIT = 1.0 / 9007199254740992.0  # 2**-53

DEF T_EDGES = 0
DEF T_TWOPATH = 1
DEF T_KCYCLE3 = 2
DEF T_KCYCLE4 = 3
DEF T_KDEGREE = 4
DEF T_GWD = 5
DEF T_GWESP = 6
DEF T_GWNSP = 7
DEF T_GWDSP = 8
DEF T_NODEMATCH = 9

# kept in sync with _termcodes.py; kernel.py asserts this mapping at import
TERM_CODES = {
    "EDGES": T_EDGES,
    "TWOPATH": T_TWOPATH,
    "KCYCLE3": T_KCYCLE3,
    "KCYCLE4": T_KCYCLE4,
    "KDEGREE": T_KDEGREE,
    "GWD": T_GWD,
    "GWESP": T_GWESP,
    "GWNSP": T_GWNSP,
    "GWDSP": T_GWDSP,
    "NODEMATCH": T_NODEMATCH,
}


cdef inline u64 _sm_next(u64* state) nogil:
    state[0] = state[0] + _GAMMA
    cdef u64 z = state[0]
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    z = z ^ (z >> 31)
    return z


cdef inline double _unit_of(u64 z) nogil:
    return <double>(z >> 11) * _UNIT


cdef void _change_core(
    cnp.uint8_t[:, ::1] adj,
    cnp.int64_t[::1] deg,
    cnp.int64_t[::1] attr,
    cnp.int64_t[::1] kinds,
    double[::1] params,
    Py_ssize_t i,
    Py_ssize_t j,
    double[::1] delta,
    cnp.int64_t[::1] nb_in_i,
    cnp.int64_t[::1] nb_in_j,
    cnp.int64_t[::1] cn_iv,
    cnp.int64_t[::1] cn_jv,
) nogil:
    """Add-direction change scores for dyad (i, j); edge (i, j) must be absent."""
    cdef Py_ssize_t n = adj.shape[0]
    cdef Py_ssize_t p = kinds.shape[0]
    cdef long di = deg[i]
    cdef long dj = deg[j]
    cdef Py_ssize_t t, v, w, idx
    cdef long k, cn_ij, c, kk, acc_i
    cdef int need_cn = 0, need_nb = 0
    cdef int ai, aj
    cdef Py_ssize_t cnt = 0
    cdef double u, acc, tau
    cdef int has_attr = attr.shape[0] > 0

    for t in range(p):
        k = kinds[t]
        if k == T_KCYCLE3 or k == T_KCYCLE4 or k == T_GWESP or k == T_GWNSP or k == T_GWDSP:
            need_cn = 1
            if k != T_KCYCLE3:
                need_nb = 1

    cn_ij = 0
    if need_cn:
        c = 0
        for w in range(n):
            c += adj[i, w] & adj[j, w]
        cn_ij = c

    if need_nb:
        for v in range(n):
            ai = adj[i, v]
            aj = adj[j, v]
            if ai or aj:
                nb_in_i[cnt] = ai
                nb_in_j[cnt] = aj
                if aj:
                    c = 0
                    for w in range(n):
                        c += adj[i, w] & adj[v, w]
                    cn_iv[cnt] = c
                else:
                    cn_iv[cnt] = 0
                if ai:
                    c = 0
                    for w in range(n):
                        c += adj[j, w] & adj[v, w]
                    cn_jv[cnt] = c
                else:
                    cn_jv[cnt] = 0
                cnt += 1

    for t in range(p):
        k = kinds[t]
        if k == T_EDGES:
            delta[t] = 1.0
        elif k == T_TWOPATH:
            delta[t] = <double>(di + dj)
        elif k == T_KCYCLE3:
            delta[t] = <double>cn_ij
        elif k == T_KCYCLE4:
            acc_i = 0
            for idx in range(cnt):
                if nb_in_i[idx]:
                    acc_i += cn_jv[idx]
            delta[t] = <double>acc_i
        elif k == T_KDEGREE:
            kk = <long>params[t]
            acc_i = 0
            if di + 1 == kk:
                acc_i += 1
            if di == kk:
                acc_i -= 1
            if dj + 1 == kk:
                acc_i += 1
            if dj == kk:
                acc_i -= 1
            delta[t] = <double>acc_i
        elif k == T_GWD:
            tau = params[t]
            u = 1.0 - exp(-tau)
            delta[t] = pow(u, <double>di) + pow(u, <double>dj)
        elif k == T_GWESP:
            tau = params[t]
            u = 1.0 - exp(-tau)
            acc = exp(tau) * (1.0 - pow(u, <double>cn_ij))
            for idx in range(cnt):
                if nb_in_i[idx] and nb_in_j[idx]:
                    acc = acc + pow(u, <double>cn_iv[idx])
                    acc = acc + pow(u, <double>cn_jv[idx])
            delta[t] = acc
        elif k == T_GWNSP:
            tau = params[t]
            u = 1.0 - exp(-tau)
            acc = -(exp(tau) * (1.0 - pow(u, <double>cn_ij)))
            for idx in range(cnt):
                if nb_in_j[idx] and not nb_in_i[idx]:
                    acc = acc + pow(u, <double>cn_iv[idx])
                if nb_in_i[idx] and not nb_in_j[idx]:
                    acc = acc + pow(u, <double>cn_jv[idx])
            delta[t] = acc
        elif k == T_GWDSP:
            tau = params[t]
            u = 1.0 - exp(-tau)
            acc = 0.0
            for idx in range(cnt):
                if nb_in_j[idx]:
                    acc = acc + pow(u, <double>cn_iv[idx])
                if nb_in_i[idx]:
                    acc = acc + pow(u, <double>cn_jv[idx])
            delta[t] = acc
        elif k == T_NODEMATCH:
            if has_attr and attr[i] >= 0 and attr[i] == attr[j]:
                delta[t] = 1.0
            else:
                delta[t] = 0.0


def change_stats(adj, deg, attr, kinds, params, i, j, out):
    """Fill `out` with change scores for dyad (i, j) on the given graph."""
    cdef cnp.uint8_t[:, ::1] adj_v = adj
    cdef cnp.int64_t[::1] deg_v = deg
    cdef cnp.int64_t[::1] attr_v = (
        attr if attr is not None and len(attr) else np.empty(0, dtype=np.int64)
    )
    cdef cnp.int64_t[::1] kinds_v = kinds
    cdef double[::1] params_v = params
    cdef double[::1] out_v = out
    cdef Py_ssize_t n = adj_v.shape[0]
    cdef Py_ssize_t ci = i, cj = j
    scratch = np.empty((4, n), dtype=np.int64)
    cdef cnp.int64_t[::1] nb_in_i = scratch[0]
    cdef cnp.int64_t[::1] nb_in_j = scratch[1]
    cdef cnp.int64_t[::1] cn_iv = scratch[2]
    cdef cnp.int64_t[::1] cn_jv = scratch[3]
    cdef int present = adj_v[ci, cj]
    if present:
        adj_v[ci, cj] = 0
        adj_v[cj, ci] = 0
        deg_v[ci] -= 1
        deg_v[cj] -= 1
    _change_core(
        adj_v, deg_v, attr_v, kinds_v, params_v, ci, cj, out_v,
        nb_in_i, nb_in_j, cn_iv, cn_jv,
    )
    if present:
        adj_v[ci, cj] = 1
        adj_v[cj, ci] = 1
        deg_v[ci] += 1
        deg_v[cj] += 1
    return out


def all_change_stats(adj, deg, attr, kinds, params, out):
    """Change scores for every dyad in row-major (i < j) order."""
    cdef cnp.uint8_t[:, ::1] adj_v = adj
    cdef cnp.int64_t[::1] deg_v = deg
    cdef cnp.int64_t[::1] attr_v = (
        attr if attr is not None and len(attr) else np.empty(0, dtype=np.int64)
    )
    cdef cnp.int64_t[::1] kinds_v = kinds
    cdef double[::1] params_v = params
    cdef double[:, ::1] out_v = out
    cdef Py_ssize_t n = adj_v.shape[0]
    scratch = np.empty((4, n), dtype=np.int64)
    cdef cnp.int64_t[::1] nb_in_i = scratch[0]
    cdef cnp.int64_t[::1] nb_in_j = scratch[1]
    cdef cnp.int64_t[::1] cn_iv = scratch[2]
    cdef cnp.int64_t[::1] cn_jv = scratch[3]
    cdef Py_ssize_t i, j, row = 0
    cdef int present
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                present = adj_v[i, j]
                if present:
                    adj_v[i, j] = 0
                    adj_v[j, i] = 0
                    deg_v[i] -= 1
                    deg_v[j] -= 1
                _change_core(
                    adj_v, deg_v, attr_v, kinds_v, params_v, i, j, out_v[row],
                    nb_in_i, nb_in_j, cn_iv, cn_jv,
                )
                if present:
                    adj_v[i, j] = 1
                    adj_v[j, i] = 1
                    deg_v[i] += 1
                    deg_v[j] += 1
                row += 1
    return out


def run_chain(
    adj,
    deg,
    edges,
    edge_pos,
    m,
    attr,
    kinds,
    params,
    theta,
    n_proposals,
    tnt,
    rng_state,
    stats,
):
    """Advance the Metropolis-Hastings toggle chain by n_proposals.

    Mutates the graph state, running statistics, and RNG state in place;
    returns (new_edge_count, accepted_count).
    """
    cdef cnp.uint8_t[:, ::1] adj_v = adj
    cdef cnp.int64_t[::1] deg_v = deg
    cdef cnp.int64_t[:, ::1] edges_v = edges
    cdef cnp.int64_t[:, ::1] edge_pos_v = edge_pos
    cdef cnp.int64_t[::1] attr_v = (
        attr if attr is not None and len(attr) else np.empty(0, dtype=np.int64)
    )
    cdef cnp.int64_t[::1] kinds_v = kinds
    cdef double[::1] params_v = params
    cdef double[::1] theta_v = theta
    cdef cnp.uint64_t[::1] rng_v = rng_state
    cdef double[::1] stats_v = stats

    cdef Py_ssize_t n = adj_v.shape[0]
    cdef Py_ssize_t p = kinds_v.shape[0]
    cdef long nd = <long>(n * (n - 1) // 2)
    cdef long mc = <long>m
    cdef long n_props = <long>n_proposals
    cdef int use_tnt = 1 if tnt else 0
    cdef u64 state = rng_v[0]

    scratch = np.empty((4, n), dtype=np.int64)
    cdef cnp.int64_t[::1] nb_in_i = scratch[0]
    cdef cnp.int64_t[::1] nb_in_j = scratch[1]
    cdef cnp.int64_t[::1] cn_iv = scratch[2]
    cdef cnp.int64_t[::1] cn_jv = scratch[3]
    delta_arr = np.zeros(p, dtype=np.float64)
    cdef double[::1] delta = delta_arr

    cdef long accepted = 0
    cdef long step, idx, k, row, e, last, a2, b2
    cdef Py_ssize_t i, j, t
    cdef long a, b
    cdef int present
    cdef double u1, u3, lr
    cdef u64 z

    with nogil:
        for step in range(n_props):
            if use_tnt:
                z = _sm_next(&state)
                u1 = _unit_of(z)
                if u1 < 0.5:
                    if mc == 0:
                        continue
                    z = _sm_next(&state)
                    idx = <long>(_unit_of(z) * mc)
                    if idx >= mc:
                        idx = mc - 1
                    i = edges_v[idx, 0]
                    j = edges_v[idx, 1]
                    present = 1
                else:
                    if mc == nd:
                        continue
                    while True:
                        z = _sm_next(&state)
                        k = <long>(_unit_of(z) * nd)
                        if k >= nd:
                            k = nd - 1
                        i = 0
                        row = n - 1
                        while k >= row:
                            k -= row
                            i += 1
                            row -= 1
                        j = i + 1 + k
                        if not adj_v[i, j]:
                            break
                    present = 0
            else:
                z = _sm_next(&state)
                k = <long>(_unit_of(z) * nd)
                if k >= nd:
                    k = nd - 1
                i = 0
                row = n - 1
                while k >= row:
                    k -= row
                    i += 1
                    row -= 1
                j = i + 1 + k
                present = adj_v[i, j]

            if present:
                adj_v[i, j] = 0
                adj_v[j, i] = 0
                deg_v[i] -= 1
                deg_v[j] -= 1

            _change_core(
                adj_v, deg_v, attr_v, kinds_v, params_v, i, j, delta,
                nb_in_i, nb_in_j, cn_iv, cn_jv,
            )

            lr = 0.0
            for t in range(p):
                lr = lr + theta_v[t] * delta[t]
            if present:
                lr = -lr
            if use_tnt:
                if present:
                    lr = lr + log((<double>mc) / ((<double>nd) - (<double>mc) + 1.0))
                else:
                    lr = lr + log(((<double>nd) - (<double>mc)) / ((<double>mc) + 1.0))

            z = _sm_next(&state)
            u3 = _unit_of(z)
            if u3 < exp(lr if lr < 0.0 else 0.0):
                accepted += 1
                if present:
                    a = i if i < j else j
                    b = j if i < j else i
                    e = edge_pos_v[a, b]
                    last = mc - 1
                    if e != last:
                        a2 = edges_v[last, 0]
                        b2 = edges_v[last, 1]
                        edges_v[e, 0] = a2
                        edges_v[e, 1] = b2
                        edge_pos_v[a2, b2] = e
                        edge_pos_v[b2, a2] = e
                    edge_pos_v[a, b] = -1
                    edge_pos_v[b, a] = -1
                    mc -= 1
                    for t in range(p):
                        stats_v[t] = stats_v[t] - delta[t]
                else:
                    adj_v[i, j] = 1
                    adj_v[j, i] = 1
                    deg_v[i] += 1
                    deg_v[j] += 1
                    a = i if i < j else j
                    b = j if i < j else i
                    edges_v[mc, 0] = a
                    edges_v[mc, 1] = b
                    edge_pos_v[a, b] = mc
                    edge_pos_v[b, a] = mc
                    mc += 1
                    for t in range(p):
                        stats_v[t] = stats_v[t] + delta[t]
            else:
                if present:
                    adj_v[i, j] = 1
                    adj_v[j, i] = 1
                    deg_v[i] += 1
                    deg_v[j] += 1

    rng_v[0] = state
    return int(mc), int(accepted)
