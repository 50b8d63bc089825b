"""LDPC code representation: adjacency structure, alist and protograph
file formats, layering, and a generic GF(2) systematic encoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class SparseParityCheck:
    """Parity-check matrix as per-check adjacency lists.

    ``cn_adj[i]`` holds the sorted variable indices of check i; ``vn_adj``
    is the derived transpose view. Checks of degree < 2 are rejected —
    a degree-1 check pins a bit and breaks the min-sum op model.
    """

    m: int
    n: int
    cn_adj: list[np.ndarray]
    vn_adj: list[np.ndarray] = field(repr=False)
    e: int

    @classmethod
    def from_cn_adj(cls, m: int, n: int, cn_adj: list) -> "SparseParityCheck":
        if len(cn_adj) != m:
            raise ValueError(f"expected {m} check adjacency lists, got {len(cn_adj)}")
        clean: list[np.ndarray] = []
        vn: list[list[int]] = [[] for _ in range(n)]
        e = 0
        for i, row in enumerate(cn_adj):
            arr = np.asarray(sorted(int(v) for v in row), dtype=np.int64)
            if arr.size < 2:
                raise ValueError(f"check {i} has degree {arr.size} < 2")
            if np.unique(arr).size != arr.size:
                raise ValueError(f"check {i} has duplicate variable entries")
            if arr[0] < 0 or arr[-1] >= n:
                raise ValueError(f"check {i} references a variable out of range")
            for v in arr:
                vn[v].append(i)
            e += arr.size
            clean.append(arr)
        vn_adj = [np.asarray(c, dtype=np.int64) for c in vn]
        return cls(m=m, n=n, cn_adj=clean, vn_adj=vn_adj, e=e)

    def check_degrees(self) -> np.ndarray:
        return np.array([a.size for a in self.cn_adj])

    def var_degrees(self) -> np.ndarray:
        return np.array([a.size for a in self.vn_adj])

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, row in enumerate(self.cn_adj):
            h[i, row] = 1
        return h


# ---------------------------------------------------------------------------
# alist (MacKay convention, 1-based, zero-padded entries tolerated)


def parse_alist(text: str) -> SparseParityCheck:
    tokens = text.split()
    pos = 0

    def take(count: int) -> list[int]:
        nonlocal pos
        if pos + count > len(tokens):
            raise ValueError("alist: unexpected end of data")
        out = tokens[pos:pos + count]
        pos += count
        try:
            return [int(t) for t in out]
        except ValueError as exc:
            raise ValueError(f"alist: non-integer token near position {pos}") from exc

    n, m = take(2)
    if n <= 0 or m <= 0:
        raise ValueError(f"alist: bad dimensions {n} x {m}")
    max_dv, max_dc = take(2)
    dv = take(n)
    dc = take(m)
    if any(d < 0 or d > max_dv for d in dv):
        raise ValueError("alist: variable degree outside [0, max]")
    if any(d < 0 or d > max_dc for d in dc):
        raise ValueError("alist: check degree outside [0, max]")

    vn_adj = []
    for j in range(n):
        row = take(max_dv)
        live = [v for v in row if v != 0]
        if len(live) != dv[j]:
            raise ValueError(f"alist: variable {j} lists {len(live)} checks, degree says {dv[j]}")
        vn_adj.append([v - 1 for v in live])
    cn_adj = []
    for i in range(m):
        row = take(max_dc)
        live = [v for v in row if v != 0]
        if len(live) != dc[i]:
            raise ValueError(f"alist: check {i} lists {len(live)} variables, degree says {dc[i]}")
        if any(not 1 <= v <= n for v in live):
            raise ValueError(f"alist: check {i} references variable out of range")
        if len(set(live)) != len(live):
            raise ValueError(f"alist: check {i} has duplicate entries")
        cn_adj.append([v - 1 for v in live])
    if tokens[pos:]:
        raise ValueError("alist: trailing data")

    code = SparseParityCheck.from_cn_adj(m, n, cn_adj)
    # cross-check the variable-side adjacency against the derived one
    for j in range(n):
        if sorted(vn_adj[j]) != code.vn_adj[j].tolist():
            raise ValueError(f"alist: variable {j} adjacency disagrees with check rows")
    return code


def format_alist(code: SparseParityCheck) -> str:
    dv = code.var_degrees()
    dc = code.check_degrees()
    max_dv = int(dv.max()) if code.n else 0
    max_dc = int(dc.max()) if code.m else 0
    lines = [
        f"{code.n} {code.m}",
        f"{max_dv} {max_dc}",
        " ".join(str(int(d)) for d in dv),
        " ".join(str(int(d)) for d in dc),
    ]
    for j in range(code.n):
        entries = [str(int(i) + 1) for i in code.vn_adj[j]]
        entries += ["0"] * (max_dv - len(entries))
        lines.append(" ".join(entries))
    for i in range(code.m):
        entries = [str(int(v) + 1) for v in code.cn_adj[i]]
        entries += ["0"] * (max_dc - len(entries))
        lines.append(" ".join(entries))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Protographs (quasi-cyclic lifting)


@dataclass(frozen=True)
class ProtographBase:
    """Base matrix of circulant shifts; -1 marks an absent block.

    Expansion replaces entry s >= 0 at (i, j) with the Z x Z identity
    cyclically shifted by s — check i*Z+r connects variable j*Z+(r+s)%Z —
    and -1 with the zero block. ``punctured_cols`` lists base columns whose
    variables are never transmitted.
    """

    z: int
    shifts: tuple[tuple[int, ...], ...]
    punctured_cols: tuple[int, ...] = ()

    @property
    def rows(self) -> int:
        return len(self.shifts)

    @property
    def cols(self) -> int:
        return len(self.shifts[0]) if self.shifts else 0

    def shift_array(self) -> np.ndarray:
        return np.asarray(self.shifts, dtype=np.int64)

    def puncture_vars(self) -> np.ndarray:
        """Expanded variable indices of the punctured base columns."""
        cols = np.asarray(self.punctured_cols, dtype=np.int64)
        if cols.size == 0:
            return np.array([], dtype=np.int64)
        return (cols[:, None] * self.z + np.arange(self.z)[None, :]).ravel()

    @staticmethod
    def from_array(z: int, shifts: np.ndarray, punctured_cols=()) -> "ProtographBase":
        tup = tuple(tuple(int(s) for s in row) for row in np.asarray(shifts))
        return ProtographBase(z=z, shifts=tup, punctured_cols=tuple(int(c) for c in punctured_cols))


def expand_protograph(base: ProtographBase) -> SparseParityCheck:
    s = base.shift_array()
    z = base.z
    if z <= 0:
        raise ValueError("lifting factor must be positive")
    if s.size and s.max() >= z:
        raise ValueError(f"shift {int(s.max())} >= lifting factor {z}")
    rows, cols = s.shape
    cn_adj: list[list[int]] = [[] for _ in range(rows * z)]
    for i in range(rows):
        for j in range(cols):
            if s[i, j] < 0:
                continue
            r = np.arange(z)
            checks = i * z + r
            variables = j * z + (r + s[i, j]) % z
            for c, v in zip(checks, variables):
                cn_adj[c].append(int(v))
    return SparseParityCheck.from_cn_adj(rows * z, cols * z, cn_adj)


def parse_protograph(text: str) -> ProtographBase:
    """Parse the plain-text base-matrix format.

    First line: ``rows cols Z``. Then ``rows`` lines of ``cols`` entries
    (-1 for absent blocks, else a shift in [0, Z)). An optional final line
    lists punctured base columns (0-based).
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("protograph: empty file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"protograph: header needs 'rows cols Z', got {lines[0]!r}")
    rows, cols, z = (int(t) for t in head)
    if len(lines) < 1 + rows:
        raise ValueError(f"protograph: expected {rows} matrix rows")
    shifts = []
    for ln in lines[1:1 + rows]:
        entries = [int(t) for t in ln.split()]
        if len(entries) != cols:
            raise ValueError(f"protograph: row has {len(entries)} entries, expected {cols}")
        if any(e >= z or e < -1 for e in entries):
            raise ValueError("protograph: shift outside [-1, Z)")
        shifts.append(tuple(entries))
    punctured: tuple[int, ...] = ()
    rest = lines[1 + rows:]
    if len(rest) > 1:
        raise ValueError("protograph: too many trailing lines")
    if rest:
        punctured = tuple(int(t) for t in rest[0].split())
        if any(not 0 <= c < cols for c in punctured):
            raise ValueError("protograph: punctured column out of range")
    return ProtographBase(z=z, shifts=tuple(shifts), punctured_cols=punctured)


def format_protograph(base: ProtographBase) -> str:
    lines = [f"{base.rows} {base.cols} {base.z}"]
    for row in base.shifts:
        lines.append(" ".join(str(s) for s in row))
    if base.punctured_cols:
        lines.append(" ".join(str(c) for c in base.punctured_cols))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Layering


def derive_layers(code: SparseParityCheck, layer_size: int) -> list[np.ndarray]:
    """Partition checks into consecutive groups of ``layer_size``.

    The last group absorbs any remainder. For quasi-cyclic codes the
    natural size is Z (one block-row per layer).
    """
    if layer_size <= 0:
        raise ValueError("layer size must be positive")
    return [np.arange(lo, min(lo + layer_size, code.m))
            for lo in range(0, code.m, layer_size)]


# ---------------------------------------------------------------------------
# GF(2) systematic encoder


def systematic_encoder(code: SparseParityCheck):
    """Derive (info_cols, encode) from H by GF(2) elimination.

    Pivots are preferred in the rightmost columns, so codes whose trailing
    columns form an invertible square (like the generated QC files here)
    keep their leading K columns as the message. ``encode`` maps uint8
    info bits of shape (B, K) or (K,) to full codewords of shape (., N).
    Redundant (dependent) checks are tolerated.
    """
    h = code.to_dense()
    m, n = h.shape
    work = h.copy()
    pivot_of_row: list[tuple[int, int]] = []  # (row, col)
    row = 0
    for col in range(n - 1, -1, -1):
        if row >= m:
            break
        hit = np.flatnonzero(work[row:, col]) + row
        if hit.size == 0:
            continue
        if hit[0] != row:
            work[[row, hit[0]]] = work[[hit[0], row]]
        others = np.flatnonzero(work[:, col])
        others = others[others != row]
        if others.size:
            work[others] ^= work[row]
        pivot_of_row.append((row, col))
        row += 1

    pivot_cols = np.array(sorted(c for _, c in pivot_of_row), dtype=np.int64)
    info_cols = np.setdiff1d(np.arange(n), pivot_cols)
    # per reduced row: x[pivot_col] = xor of info bits it touches
    rows_r = [r for r, _ in pivot_of_row]
    cols_r = [c for _, c in pivot_of_row]
    a = work[np.ix_(rows_r, info_cols)].astype(np.float32)  # (R, K)
    piv = np.array(cols_r, dtype=np.int64)

    def encode(info_bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(info_bits, dtype=np.uint8)
        squeeze = bits.ndim == 1
        if squeeze:
            bits = bits[None, :]
        if bits.shape[1] != info_cols.size:
            raise ValueError(f"expected {info_cols.size} info bits, got {bits.shape[1]}")
        x = np.zeros((bits.shape[0], n), dtype=np.uint8)
        x[:, info_cols] = bits
        # float32 BLAS matmul is exact for these dimensions (counts < 2**24)
        par = bits.astype(np.float32) @ a.T
        x[:, piv] = (par.astype(np.int64) & 1).astype(np.uint8)
        return x[0] if squeeze else x

    return info_cols, encode
