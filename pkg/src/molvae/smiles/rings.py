"""Ring perception.

Computes a smallest set of smallest rings (a minimum cycle basis) with
Horton's candidate enumeration followed by greedy GF(2) independence
selection. Deterministic: candidates are ordered by ring size, then by the
sorted atom-index tuple.
"""

from __future__ import annotations

from collections import deque


def sssr(n_atoms: int, bonds: list[tuple[int, int]]) -> list[list[int]]:
    """Smallest set of smallest rings of an undirected graph.

    Args:
        n_atoms: number of vertices.
        bonds: edge list as (a, b) index pairs.

    Returns:
        One atom-index cycle per basis element, each cycle in traversal
        order starting from its lowest atom index.
    """
    if n_atoms == 0 or not bonds:
        return []

    adj: list[list[int]] = [[] for _ in range(n_atoms)]
    edge_index: dict[tuple[int, int], int] = {}
    for i, (a, b) in enumerate(bonds):
        key = (min(a, b), max(a, b))
        if key in edge_index:
            continue
        edge_index[key] = i
        adj[a].append(b)
        adj[b].append(a)

    n_components = _count_components(n_atoms, adj)
    rank = len(edge_index) - n_atoms + n_components
    if rank <= 0:
        return []

    candidates = _horton_candidates(n_atoms, adj, edge_index)
    candidates.sort(key=lambda c: (len(c[1]), c[1]))

    basis: list[list[int]] = []
    pivots: dict[int, int] = {}  # pivot bit -> reduced edge mask
    for mask, cycle in candidates:
        reduced = mask
        while reduced:
            low = reduced & (-reduced)
            bit = low.bit_length() - 1
            if bit not in pivots:
                pivots[bit] = reduced
                basis.append(list(cycle))
                break
            reduced ^= pivots[bit]
        if len(basis) == rank:
            break
    return basis


def count_large_rings(graph) -> int:
    """Number of SSSR rings with more than six atoms."""
    return sum(1 for ring in graph.rings if len(ring) > 6)


def _count_components(n: int, adj: list[list[int]]) -> int:
    seen = [False] * n
    count = 0
    for start in range(n):
        if seen[start]:
            continue
        count += 1
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return count


def _horton_candidates(
    n: int, adj: list[list[int]], edge_index: dict[tuple[int, int], int]
) -> list[tuple[int, tuple[int, ...]]]:
    """Candidate cycles: for each vertex v and edge (x, y), the cycle
    SP(v..x) + (x, y) + SP(y..v) when the two shortest paths only share v."""
    candidates: dict[int, tuple[int, ...]] = {}
    for root in range(n):
        parent, dist = _bfs_tree(root, adj, n)
        for (x, y) in edge_index:
            if dist[x] < 0 or dist[y] < 0:
                continue
            path_x = _path_to_root(x, parent)
            path_y = _path_to_root(y, parent)
            if set(path_x) & set(path_y) != {root}:
                continue
            cycle = path_x[::-1] + path_y[:-1]  # root..x, y..(before root)
            if len(cycle) < 3:
                continue
            mask = _edge_mask(cycle, edge_index)
            if mask is None or mask in candidates:
                continue
            candidates[mask] = _canonical_cycle(cycle)
    return [(mask, cyc) for mask, cyc in candidates.items()]


def _bfs_tree(root: int, adj: list[list[int]], n: int):
    parent = [-1] * n
    dist = [-1] * n
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    return parent, dist


def _path_to_root(v: int, parent: list[int]) -> list[int]:
    path = [v]
    while parent[path[-1]] >= 0:
        path.append(parent[path[-1]])
    return path


def _edge_mask(cycle: list[int], edge_index: dict[tuple[int, int], int]) -> int | None:
    mask = 0
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        idx = edge_index.get((min(a, b), max(a, b)))
        if idx is None:
            return None
        mask |= 1 << idx
    return mask


def _canonical_cycle(cycle: list[int]) -> tuple[int, ...]:
    """Rotate/reflect so the cycle starts at its lowest index and proceeds
    toward its smaller neighbor; makes candidate ordering deterministic."""
    k = cycle.index(min(cycle))
    rotated = cycle[k:] + cycle[:k]
    if rotated[1] > rotated[-1]:
        rotated = [rotated[0]] + rotated[:0:-1]
    return tuple(rotated)
