"""Accumulate-repeat-style protograph family at rates 1/2, 2/3, 4/5.

Each rate is defined by a small multiplicity base matrix with 3 check
rows, K_b information columns, and 3 structural columns: one degree-1
accumulator tail, one degree-3 parity, and one degree-6 column that is
never transmitted (punctured). Higher rates extend the rate-1/2 core by
appending information column pairs, so the edge totals are  E_b = 15, 23,
39 for K_b = 2, 4, 8.

Lifting happens in two stages. A fixed x4 pre-lift spreads multi-edges
into single edges (a cell of multiplicity t becomes, for each of the 4
row copies r, entries in column copies (r+u) mod 4 for u < t), after
which every cell holds at most one edge. The remaining lift by Z' = Z/4
uses circulant shifts chosen greedily under a seeded RNG so the expanded
graph has no 4-cycles, with a sampled 6-cycle count as tiebreak.
"""

from __future__ import annotations

import numpy as np

from .code import ProtographBase

AR4JA_RATES = {
    "1/2": 2,  # rate string -> K_b (information columns in the base)
    "2/3": 4,
    "4/5": 8,
}

_CORE = [
    # columns: info0, info1, deg-1 tail, deg-3 parity, deg-6 punctured
    [0, 0, 1, 0, 2],
    [1, 1, 0, 1, 3],
    [1, 2, 0, 2, 1],
]
_EXTENSION_PAIR = [
    # two extra information columns per pair, appended on the left
    [0, 0],
    [3, 1],
    [1, 3],
]


def ar4ja_base_matrix(rate: str) -> np.ndarray:
    """Multiplicity base matrix (3 x (K_b + 3)); last column is punctured."""
    if rate not in AR4JA_RATES:
        raise ValueError(f"unsupported rate {rate!r}; choose from {sorted(AR4JA_RATES)}")
    k_b = AR4JA_RATES[rate]
    pairs = (k_b - 2) // 2
    rows = []
    for r in range(3):
        ext = _EXTENSION_PAIR[r] * pairs
        rows.append(ext + _CORE[r])
    return np.array(rows, dtype=np.int64)


def _prelift(base: np.ndarray) -> np.ndarray:
    """x4 pre-lift: multiplicity matrix -> 0/1 matrix of shape (12, 4*N_b)."""
    m_b, n_b = base.shape
    out = np.zeros((4 * m_b, 4 * n_b), dtype=np.int64)
    for i in range(m_b):
        for j in range(n_b):
            for u in range(base[i, j]):
                for r in range(4):
                    out[4 * i + r, 4 * j + (r + u) % 4] = 1
    return out


def has_four_cycle(proto: ProtographBase) -> bool:
    """True if the expanded graph contains a length-4 cycle. With single
    circulants per cell this reduces to an alternating shift sum test
    over every rectangle of present cells."""
    s = proto.shift_array()
    m, n = s.shape
    for i1 in range(m):
        for i2 in range(i1 + 1, m):
            both = np.flatnonzero((s[i1] >= 0) & (s[i2] >= 0))
            for a in range(both.size):
                for b in range(a + 1, both.size):
                    j1, j2 = both[a], both[b]
                    if (s[i1, j1] - s[i1, j2] + s[i2, j2] - s[i2, j1]) % proto.z == 0:
                        return True
    return False


def _assign_shifts(adj: np.ndarray, z: int, seed: int) -> np.ndarray:
    """Greedy circulant shift assignment avoiding expanded 4-cycles.

    Cells are visited in row-major order. For each cell the candidate
    shifts are scanned in a seeded random order; candidates that would
    close a 4-cycle with already-placed cells are discarded, and among
    the first few survivors the one threading the fewest 6-cycles wins.
    """
    rng = np.random.default_rng(seed)
    m, n = adj.shape
    shifts = np.full((m, n), -1, dtype=np.int64)
    cells = [(i, j) for i in range(m) for j in range(n) if adj[i, j]]
    col_cells: dict[int, list[int]] = {j: [] for j in range(n)}
    row_cells: dict[int, list[int]] = {i: [] for i in range(m)}

    for i, j in cells:
        # 4-cycle constraints: for every row i2 sharing a column j with
        # (i,j) and a second column j2 shared by row i, the alternating
        # shift sum around the rectangle must be nonzero mod z.
        constraints = []
        for i2 in col_cells[j]:
            for j2 in row_cells[i]:
                if adj[i2, j2] and shifts[i2, j2] >= 0:
                    # rectangle (i,j)-(i,j2)-(i2,j2)-(i2,j)
                    forbidden = (shifts[i, j2] - shifts[i2, j2] + shifts[i2, j]) % z
                    constraints.append(forbidden)
        forbidden_set = set(constraints)
        order = rng.permutation(z)
        survivors = [int(s) for s in order if int(s) not in forbidden_set]
        if not survivors:
            raise RuntimeError("no 4-cycle-free shift available; retry with another seed")
        if len(survivors) > 1 and z > 2:
            sample = survivors[:8]
            best = min(sample, key=lambda s: _six_cycle_load(shifts, adj, i, j, s, z))
        else:
            best = survivors[0]
        shifts[i, j] = best
        col_cells[j].append(i)
        row_cells[i].append(j)
    return shifts


def _six_cycle_load(shifts: np.ndarray, adj: np.ndarray, ci: int, cj: int,
                    cand: int, z: int) -> int:
    """Number of 6-cycles through cell (ci, cj) if it took shift cand,
    counted over already-assigned cells only."""
    m, n = shifts.shape
    count = 0
    trial = shifts.copy()
    trial[ci, cj] = cand
    rows = [r for r in range(m) if r != ci]
    cols = [c for c in range(n) if c != cj]
    for i2 in rows:
        if trial[i2, cj] < 0:
            continue
        for j2 in cols:
            if trial[ci, j2] < 0 or trial[i2, j2] < 0:
                continue
            for i3 in rows:
                if i3 == i2 or trial[i3, j2] < 0:
                    continue
                for j3 in cols:
                    if j3 == j2 or trial[i3, j3] < 0 or trial[i2, j3] < 0:
                        continue
                    s = (trial[ci, cj] - trial[i2, cj] + trial[i2, j2]
                         - trial[i3, j2] + trial[i3, j3] - trial[ci, j3])
                    if s % z == 0:
                        count += 1
    return count


def _gf2_invertible(row_masks: list[int], size: int) -> bool:
    """Gaussian elimination over GF(2) with rows as Python ints."""
    rows = list(row_masks)
    rank = 0
    for col in range(size):
        bit = 1 << col
        pivot = next((r for r in range(rank, len(rows)) if rows[r] & bit), None)
        if pivot is None:
            return False
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r] & bit:
                rows[r] ^= rows[rank]
        rank += 1
    return rank == size


def _parity_part_invertible(proto: ProtographBase, k_b: int) -> bool:
    """Check the expanded square submatrix on the non-information columns."""
    from .code import expand_protograph

    code = expand_protograph(proto)
    z = proto.z
    start = 4 * k_b * z
    width = code.n - start
    masks = [0] * code.m
    for i, row in enumerate(code.cn_adj):
        for j in row:
            if j >= start:
                masks[i] |= 1 << int(j - start)
    return _gf2_invertible(masks, width)


def build_ar4ja_protograph(rate: str, k: int, seed: int = 0) -> ProtographBase:
    """Deterministic lifted protograph for the given rate and info length.

    k must be divisible by 4*K_b so the circulant size Z' = k / (4*K_b)
    is an integer. Seeds are tried in sequence (seed, seed+1, ...) until
    the shift assignment is 4-cycle-free and, for k <= 4096, the parity
    part of the expanded matrix is invertible over GF(2).
    """
    k_b = AR4JA_RATES.get(rate)
    if k_b is None:
        raise ValueError(f"unsupported rate {rate!r}; choose from {sorted(AR4JA_RATES)}")
    if k % (4 * k_b) != 0:
        raise ValueError(f"k={k} not divisible by {4 * k_b} (pre-lift x circulant)")
    z_prime = k // (4 * k_b)
    base = ar4ja_base_matrix(rate)
    adj = _prelift(base)
    n_pre = adj.shape[1]
    punctured = tuple(range(n_pre - 4, n_pre))

    last_err: Exception | None = None
    for attempt in range(64):
        try:
            shift_matrix = _assign_shifts(adj, z_prime, seed + attempt)
        except RuntimeError as exc:
            last_err = exc
            continue
        shifts = tuple(
            tuple(int(shift_matrix[i, j]) if adj[i, j] else -1 for j in range(n_pre))
            for i in range(adj.shape[0])
        )
        proto = ProtographBase(z=z_prime, shifts=shifts, punctured_cols=punctured)
        if k <= 4096 and not _parity_part_invertible(proto, k_b):
            last_err = RuntimeError("parity part singular")
            continue
        return proto
    raise RuntimeError(f"no valid shift assignment found for rate {rate}, k={k}: {last_err}")
