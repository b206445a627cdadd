"""Pure-Python sampler/change-score kernel.

Fallback used when the compiled extension is unavailable (or forced via
ERGMKIT_PURE_PYTHON=1).  It steps the same splitmix64 stream and evaluates
every floating-point expression in the same order as the compiled kernel, so
the two produce bit-identical chains; only speed differs.

Adjacency rows are kept as Python integers (bitsets) inside the hot loop:
popcounts of ANDed rows give exact common-neighbour counts cheaply.
"""

import math

import numpy as np

from ._termcodes import (
    EDGES,
    GWD,
    GWDSP,
    GWESP,
    GWNSP,
    KCYCLE3,
    KCYCLE4,
    KDEGREE,
    NODEMATCH,
    TWOPATH,
)

KERNEL_NAME = "python"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_UNIT = 1.0 / 9007199254740992.0  # 2**-53


def _sm_next(state):
    state = (state + _GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def _row_bits(adj, v):
    return int.from_bytes(
        np.packbits(adj[v], bitorder="little").tobytes(), "little"
    )


def _bits_to_row(bits, n):
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


def _decode_dyad(k, n):
    """k-th dyad in row-major upper-triangle order -> (i, j), i < j."""
    i = 0
    row = n - 1
    while k >= row:
        k -= row
        i += 1
        row -= 1
    return i, i + 1 + k


def _change_core(bits, deg, attr, kinds, params, i, j, out):
    """Add-direction change scores for dyad (i, j); edge (i, j) must be absent.

    Mirrors the compiled kernel statement for statement: accumulation order
    and libm calls are identical so results match bit for bit.
    """
    p = len(kinds)
    di = deg[i]
    dj = deg[j]
    bi = bits[i]
    bj = bits[j]

    need_cn = False
    need_nb = False
    for t in range(p):
        k = kinds[t]
        if k == KCYCLE3 or k == KCYCLE4 or k == GWESP or k == GWNSP or k == GWDSP:
            need_cn = True
            if k != KCYCLE3:
                need_nb = True

    cn_ij = 0
    if need_cn:
        cn_ij = (bi & bj).bit_count()

    # Per-neighbour records over N(i) | N(j), ascending node id:
    #   in_i/in_j membership, cn(i, v) when v in N(j), cn(j, v) when v in N(i).
    cnt = 0
    in_i = []
    in_j = []
    cn_iv = []
    cn_jv = []
    if need_nb:
        both = bi | bj
        while both:
            low = both & -both
            v = low.bit_length() - 1
            both ^= low
            ai = (bi >> v) & 1
            aj = (bj >> v) & 1
            in_i.append(ai)
            in_j.append(aj)
            cn_iv.append((bi & bits[v]).bit_count() if aj else 0)
            cn_jv.append((bj & bits[v]).bit_count() if ai else 0)
            cnt += 1

    for t in range(p):
        k = kinds[t]
        if k == EDGES:
            out[t] = 1.0
        elif k == TWOPATH:
            out[t] = float(di + dj)
        elif k == KCYCLE3:
            out[t] = float(cn_ij)
        elif k == KCYCLE4:
            acc_i = 0
            for idx in range(cnt):
                if in_i[idx]:
                    acc_i += cn_jv[idx]
            out[t] = float(acc_i)
        elif k == KDEGREE:
            kk = int(params[t])
            acc_i = 0
            if di + 1 == kk:
                acc_i += 1
            if di == kk:
                acc_i -= 1
            if dj + 1 == kk:
                acc_i += 1
            if dj == kk:
                acc_i -= 1
            out[t] = float(acc_i)
        elif k == GWD:
            u = 1.0 - math.exp(-params[t])
            out[t] = math.pow(u, float(di)) + math.pow(u, float(dj))
        elif k == GWESP:
            u = 1.0 - math.exp(-params[t])
            acc = math.exp(params[t]) * (1.0 - math.pow(u, float(cn_ij)))
            for idx in range(cnt):
                if in_i[idx] and in_j[idx]:
                    acc = acc + math.pow(u, float(cn_iv[idx]))
                    acc = acc + math.pow(u, float(cn_jv[idx]))
            out[t] = acc
        elif k == GWNSP:
            u = 1.0 - math.exp(-params[t])
            acc = -(math.exp(params[t]) * (1.0 - math.pow(u, float(cn_ij))))
            for idx in range(cnt):
                if in_j[idx] and not in_i[idx]:
                    acc = acc + math.pow(u, float(cn_iv[idx]))
                if in_i[idx] and not in_j[idx]:
                    acc = acc + math.pow(u, float(cn_jv[idx]))
            out[t] = acc
        elif k == GWDSP:
            u = 1.0 - math.exp(-params[t])
            acc = 0.0
            for idx in range(cnt):
                if in_j[idx]:
                    acc = acc + math.pow(u, float(cn_iv[idx]))
                if in_i[idx]:
                    acc = acc + math.pow(u, float(cn_jv[idx]))
            out[t] = acc
        elif k == NODEMATCH:
            out[t] = 1.0 if attr is not None and attr[i] >= 0 and attr[i] == attr[j] else 0.0
        else:
            raise ValueError(f"unknown term code {k}")


def change_stats(adj, deg, attr, kinds, params, i, j, out):
    """Fill `out` with change scores for dyad (i, j) on the given graph.

    Handles either current state of the dyad: scores are always the
    with-edge-minus-without difference.
    """
    n = adj.shape[0]
    kindl = [int(x) for x in kinds]
    parl = [float(x) for x in params]
    attrl = [int(x) for x in attr] if attr is not None and len(attr) else None

    bits = {}

    def row(v):
        if v not in bits:
            bits[v] = _row_bits(adj, v)
        return bits[v]

    # Materialize the rows the core may touch: i, j and their neighbourhoods.
    for v in range(n):
        if adj[i, v] or adj[j, v]:
            row(v)
    row(i)
    row(j)

    present = bool(adj[i, j])
    degl = [int(x) for x in deg]
    if present:
        bits[i] &= ~(1 << j)
        bits[j] &= ~(1 << i)
        degl[i] -= 1
        degl[j] -= 1

    class _Rows:
        def __getitem__(self, v):
            return row(v)

    outl = [0.0] * len(kindl)
    _change_core(_Rows(), degl, attrl, kindl, parl, i, j, outl)
    out[:] = outl
    return out


def all_change_stats(adj, deg, attr, kinds, params, out):
    """Change scores for every dyad in row-major (i < j) order."""
    n = adj.shape[0]
    kindl = [int(x) for x in kinds]
    parl = [float(x) for x in params]
    attrl = [int(x) for x in attr] if attr is not None and len(attr) else None
    bits = [_row_bits(adj, v) for v in range(n)]
    degl = [int(x) for x in deg]
    outl = [0.0] * len(kindl)
    row = 0
    for i in range(n):
        for j in range(i + 1, n):
            present = (bits[i] >> j) & 1
            if present:
                bits[i] &= ~(1 << j)
                bits[j] &= ~(1 << i)
                degl[i] -= 1
                degl[j] -= 1
            _change_core(bits, degl, attrl, kindl, parl, i, j, outl)
            if present:
                bits[i] |= 1 << j
                bits[j] |= 1 << i
                degl[i] += 1
                degl[j] += 1
            out[row] = outl
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

    Mutates adj/deg/edges/edge_pos/stats/rng_state in place and returns
    (new_edge_count, accepted_count).  `tnt` selects the tie/no-tie proposal
    (uniform over edges or non-edges, probability 1/2 each, with the matching
    acceptance correction); otherwise dyads are proposed uniformly.
    """
    n = adj.shape[0]
    nd = n * (n - 1) // 2
    p = len(kinds)
    m = int(m)

    bits = [_row_bits(adj, v) for v in range(n)]
    degl = [int(x) for x in deg]
    edgl = [[int(edges[e, 0]), int(edges[e, 1])] for e in range(m)]
    pos = {(a, b): e for e, (a, b) in enumerate(edgl)}
    kindl = [int(x) for x in kinds]
    parl = [float(x) for x in params]
    thl = [float(x) for x in theta]
    attrl = [int(x) for x in attr] if attr is not None and len(attr) else None
    stl = [float(x) for x in stats]
    state = int(rng_state[0])
    delta = [0.0] * p
    accepted = 0

    for _ in range(n_proposals):
        if tnt:
            state, z = _sm_next(state)
            if (z >> 11) * _UNIT < 0.5:
                if m == 0:
                    continue
                state, z = _sm_next(state)
                idx = int(((z >> 11) * _UNIT) * m)
                if idx >= m:
                    idx = m - 1
                i, j = edgl[idx]
                present = True
            else:
                if m == nd:
                    continue
                while True:
                    state, z = _sm_next(state)
                    k = int(((z >> 11) * _UNIT) * nd)
                    if k >= nd:
                        k = nd - 1
                    i, j = _decode_dyad(k, n)
                    if not (bits[i] >> j) & 1:
                        break
                present = False
        else:
            state, z = _sm_next(state)
            k = int(((z >> 11) * _UNIT) * nd)
            if k >= nd:
                k = nd - 1
            i, j = _decode_dyad(k, n)
            present = bool((bits[i] >> j) & 1)

        if present:
            bits[i] &= ~(1 << j)
            bits[j] &= ~(1 << i)
            degl[i] -= 1
            degl[j] -= 1

        _change_core(bits, degl, attrl, kindl, parl, i, j, delta)

        lr = 0.0
        for t in range(p):
            lr = lr + thl[t] * delta[t]
        if present:
            lr = -lr
        if tnt:
            if present:
                lr = lr + math.log(float(m) / (float(nd) - float(m) + 1.0))
            else:
                lr = lr + math.log((float(nd) - float(m)) / (float(m) + 1.0))

        state, z = _sm_next(state)
        u3 = (z >> 11) * _UNIT
        if u3 < math.exp(lr if lr < 0.0 else 0.0):
            accepted += 1
            if present:
                a, b = (i, j) if i < j else (j, i)
                e = pos.pop((a, b))
                last = m - 1
                if e != last:
                    edgl[e] = edgl[last]
                    pos[(edgl[e][0], edgl[e][1])] = e
                edgl.pop()
                m -= 1
                for t in range(p):
                    stl[t] = stl[t] - delta[t]
            else:
                bits[i] |= 1 << j
                bits[j] |= 1 << i
                degl[i] += 1
                degl[j] += 1
                a, b = (i, j) if i < j else (j, i)
                edgl.append([a, b])
                pos[(a, b)] = m
                m += 1
                for t in range(p):
                    stl[t] = stl[t] + delta[t]
        else:
            if present:
                bits[i] |= 1 << j
                bits[j] |= 1 << i
                degl[i] += 1
                degl[j] += 1

    for v in range(n):
        adj[v] = _bits_to_row(bits[v], n)
    deg[:] = degl
    edge_pos[:] = -1
    for e, (a, b) in enumerate(edgl):
        edges[e, 0] = a
        edges[e, 1] = b
        edge_pos[a, b] = e
        edge_pos[b, a] = e
    rng_state[0] = state
    stats[:] = stl
    return m, accepted
