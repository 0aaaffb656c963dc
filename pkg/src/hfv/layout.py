"""Deterministic 2-D node placement for submodel graphs.

Four modes: circular, layered (longest-path strata with greedy
cycle-breaking and barycenter ordering), force-directed
(Fruchterman-Reingold with flow-weighted springs), and subspace
(spectral embedding via the graph Laplacian). Coordinates are abstract;
the renderer maps them to pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import SubmodelGraph


class LayoutKind(Enum):
    LAYERED = "layered"
    FORCE = "force"
    SUBSPACE = "subspace"
    CIRCULAR = "circular"


@dataclass
class LayoutResult:
    positions: dict[str, tuple[float, float]]
    layout_kind: LayoutKind


def layout_circular(graph: SubmodelGraph) -> LayoutResult:
    """Nodes sorted by name on the unit circle, first at angle 0 = (1, 0)."""
    names = sorted(graph.node_names())
    s = len(names)
    positions = {
        name: (math.cos(2 * math.pi * k / s), math.sin(2 * math.pi * k / s))
        for k, name in enumerate(names)
    }
    return LayoutResult(positions, LayoutKind.CIRCULAR)


def _break_cycles(
    names: list[str], edges: list[tuple[str, str, float]]
) -> list[tuple[str, str, float]]:
    """Repeatedly remove the smallest-|q| edge on a detected cycle."""
    edges = list(edges)
    while True:
        cycle = _find_cycle(names, edges)
        if cycle is None:
            return edges
        # Smallest |q| on the cycle; name-order tiebreak for determinism.
        victim = min(cycle, key=lambda e: (abs(e[2]), e[0], e[1]))
        edges.remove(victim)


def _find_cycle(
    names: list[str], edges: list[tuple[str, str, float]]
) -> list[tuple[str, str, float]] | None:
    adj: dict[str, list[tuple[str, str, float]]] = {n: [] for n in names}
    for e in edges:
        adj[e[0]].append(e)
    color: dict[str, int] = {n: 0 for n in names}  # 0 white, 1 gray, 2 black
    stack_edges: list[tuple[str, str, float]] = []

    def dfs(u: str) -> list[tuple[str, str, float]] | None:
        color[u] = 1
        for e in adj[u]:
            v = e[1]
            if color[v] == 1:
                # Back edge: slice the gray path from v onward, plus e.
                start = next(
                    i for i, se in enumerate(stack_edges) if se[0] == v
                ) if any(se[0] == v for se in stack_edges) else len(stack_edges)
                return stack_edges[start:] + [e]
            if color[v] == 0:
                stack_edges.append(e)
                found = dfs(v)
                if found is not None:
                    return found
                stack_edges.pop()
        color[u] = 2
        return None

    for n in sorted(names):
        if color[n] == 0:
            found = dfs(n)
            if found is not None:
                return found
    return None


def layout_layered(graph: SubmodelGraph) -> LayoutResult:
    """Longest-path strata over the cycle-broken edge set.

    y = layer index; x = within-layer rank (one barycenter sweep down
    then up), centered per layer. Ties break by name order.
    """
    names = sorted(graph.node_names())
    raw_edges = [(e.from_name, e.to_name, e.q_watts) for e in graph.edges]
    edges = _break_cycles(names, raw_edges)

    # Longest-path layering; the edge set is acyclic, so relaxation
    # converges within |V| passes.
    preds: dict[str, list[str]] = {n: [] for n in names}
    succs: dict[str, list[str]] = {n: [] for n in names}
    for frm, to, _ in edges:
        preds[to].append(frm)
        succs[frm].append(to)
    layer: dict[str, int] = {n: 0 for n in names}
    for _ in range(len(names)):
        changed = False
        for frm, to, _ in edges:
            if layer[to] < layer[frm] + 1:
                layer[to] = layer[frm] + 1
                changed = True
        if not changed:
            break

    layers: dict[int, list[str]] = {}
    for n in names:
        layers.setdefault(layer[n], []).append(n)
    for level in layers.values():
        level.sort()

    max_layer = max(layers) if layers else 0

    def barycenter_sweep(reference_lower: bool) -> None:
        rng_levels = (
            range(1, max_layer + 1) if reference_lower else range(max_layer - 1, -1, -1)
        )
        for lv in rng_levels:
            ref_layer = layers.get(lv - 1 if reference_lower else lv + 1, [])
            ref_rank = {n: i for i, n in enumerate(ref_layer)}
            current = layers.get(lv, [])
            cur_rank = {n: i for i, n in enumerate(current)}

            def bary(n: str) -> float:
                neigh = (
                    [p for p in preds[n] if p in ref_rank]
                    if reference_lower
                    else [s for s in succs[n] if s in ref_rank]
                )
                if not neigh:
                    return float(cur_rank[n])
                return sum(ref_rank[x] for x in neigh) / len(neigh)

            current.sort(key=lambda n: (bary(n), n))

    barycenter_sweep(reference_lower=True)
    barycenter_sweep(reference_lower=False)

    positions: dict[str, tuple[float, float]] = {}
    for lv, level in layers.items():
        width = len(level)
        for i, n in enumerate(level):
            positions[n] = (float(i) - (width - 1) / 2.0, float(lv))
    return LayoutResult(positions, LayoutKind.LAYERED)


def layout_force(
    graph: SubmodelGraph, seed: int = 0, iterations: int = 500
) -> LayoutResult:
    """Fruchterman-Reingold with edge springs weighted by heat flow.

    Edge weights are |q| normalized onto [0.5, 2] over the displayed
    edges; temperature cools linearly to zero; same seed, same result.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    names = sorted(graph.node_names())
    s = len(names)
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-1.0, 1.0, size=(s, 2))
    if s == 0:
        return LayoutResult({}, LayoutKind.FORCE)
    rank = {n: i for i, n in enumerate(names)}

    qs = [e.q_watts for e in graph.edges]
    q_min, q_max = (min(qs), max(qs)) if qs else (0.0, 0.0)
    springs: list[tuple[int, int, float]] = []
    for e in graph.edges:
        if q_max > q_min:
            w = 0.5 + 1.5 * (e.q_watts - q_min) / (q_max - q_min)
        else:
            w = 1.25
        springs.append((rank[e.from_name], rank[e.to_name], w))

    k = math.sqrt(1.0 / s)  # ideal edge length for unit layout area
    t0 = 0.3
    for it in range(iterations):
        disp = np.zeros_like(pos)
        # Pairwise repulsion k^2 / d.
        delta = pos[:, None, :] - pos[None, :, :]  # (s, s, 2)
        dist = np.linalg.norm(delta, axis=2)
        np.fill_diagonal(dist, np.inf)
        dist = np.maximum(dist, 1e-9)
        rep = (k * k) / (dist * dist)
        disp += (delta / dist[..., None] * rep[..., None]).sum(axis=1)
        # Spring attraction w * d^2 / k along edges.
        for i, j, w in springs:
            d_vec = pos[i] - pos[j]
            d = max(float(np.linalg.norm(d_vec)), 1e-9)
            force = w * d * d / k
            step = d_vec / d * force
            disp[i] -= step
            disp[j] += step
        temp = t0 * (1.0 - it / iterations)
        lengths = np.maximum(np.linalg.norm(disp, axis=1), 1e-12)
        capped = np.minimum(lengths, temp)
        pos += disp / lengths[:, None] * capped[:, None]
    positions = {n: (float(pos[i, 0]), float(pos[i, 1])) for n, i in rank.items()}
    return LayoutResult(positions, LayoutKind.FORCE)


def layout_subspace(graph: SubmodelGraph, dims: int | None = None) -> LayoutResult:
    """Spectral embedding: Laplacian eigenvectors projected to 2-D.

    Pairwise weights are summed |q| over kinds. Each connected component
    is embedded separately and offset horizontally so bounding boxes do
    not overlap. Two or fewer nodes fall back to circular placement.
    """
    names = sorted(graph.node_names())
    s = len(names)
    if s <= 2:
        return LayoutResult(layout_circular(graph).positions, LayoutKind.SUBSPACE)
    if dims is None:
        dims = min(s - 1, 8)
    rank = {n: i for i, n in enumerate(names)}

    weights = np.zeros((s, s))
    for e in graph.edges:
        i, j = rank[e.from_name], rank[e.to_name]
        weights[i, j] += abs(e.q_watts)
        weights[j, i] += abs(e.q_watts)

    # Connected components over nonzero weights.
    seen = [False] * s
    components: list[list[int]] = []
    for start in range(s):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in range(s):
                if not seen[v] and weights[u, v] > 0:
                    seen[v] = True
                    stack.append(v)
        components.append(sorted(comp))

    positions = np.zeros((s, 2))
    x_cursor = 0.0
    gap = 0.5
    for comp in components:
        m = len(comp)
        if m == 1:
            coords = np.zeros((1, 2))
        elif m == 2:
            coords = np.array([[0.0, 0.0], [1.0, 0.0]])
        else:
            w = weights[np.ix_(comp, comp)]
            lap = np.diag(w.sum(axis=1)) - w
            eigvals, eigvecs = np.linalg.eigh(lap)
            tol = max(1e-9, 1e-9 * float(abs(eigvals).max()))
            nonzero = [i for i, v in enumerate(eigvals) if v > tol]
            take = nonzero[: max(2, min(dims, len(nonzero)))]
            if not take:
                coords = np.zeros((m, 2))
            else:
                basis = eigvecs[:, take]
                # Fix eigenvector signs for determinism.
                for col in range(basis.shape[1]):
                    idx = int(np.argmax(np.abs(basis[:, col])))
                    if basis[idx, col] < 0:
                        basis[:, col] = -basis[:, col]
                if basis.shape[1] == 1:
                    basis = np.column_stack([basis[:, 0], np.zeros(m)])
                coords = basis[:, :2]
        # Offset so component bounding boxes stay disjoint.
        x_min = coords[:, 0].min()
        coords = coords - [x_min, 0.0]
        coords[:, 0] += x_cursor
        x_cursor = coords[:, 0].max() + gap
        for local, node in enumerate(comp):
            positions[node] = coords[local]

    return LayoutResult(
        {n: (float(positions[i, 0]), float(positions[i, 1])) for n, i in rank.items()},
        LayoutKind.SUBSPACE,
    )


def compute_layout(
    graph: SubmodelGraph, kind: LayoutKind, seed: int = 0
) -> LayoutResult:
    if kind is LayoutKind.CIRCULAR:
        return layout_circular(graph)
    if kind is LayoutKind.LAYERED:
        return layout_layered(graph)
    if kind is LayoutKind.FORCE:
        return layout_force(graph, seed=seed)
    return layout_subspace(graph)
