"""Static SVG drawings of solved trees: orthographic projection, labeled branches."""

from __future__ import annotations

import numpy as np


def _project(points: np.ndarray) -> np.ndarray:
    """Orthographic projection onto the two top principal axes."""
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    if centered.shape[1] <= 2:
        out = np.zeros((len(pts), 2))
        out[:, : centered.shape[1]] = centered
        return out
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return centered @ vt[:2].T


def render_trees(groups, out_path: str, cell: float = 260.0, pad: float = 30.0) -> None:
    """Write one SVG with a cell per (vertices, tree_point, branches, label).

    tree_point may be None (enumeration-only drawing).  Branch lengths are
    printed at the midpoint of each tree edge.
    """
    cols = max(1, min(5, len(groups)))
    rows = (len(groups) + cols - 1) // cols
    width = cols * cell
    height = rows * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for idx, (vertices, tree_point, branches, label) in enumerate(groups):
        vertices = np.asarray(vertices, dtype=float)
        stack = vertices if tree_point is None else np.vstack([vertices, tree_point])
        flat = _project(stack)
        span = max(float(np.ptp(flat[:, 0])), float(np.ptp(flat[:, 1])), 1e-9)
        scale = (cell - 2 * pad) / span
        cx = (idx % cols) * cell + cell / 2.0
        cy = (idx // cols) * cell + cell / 2.0
        xy = flat * scale
        xy[:, 1] *= -1.0
        xy += np.array([cx, cy])
        m = len(vertices)
        for i in range(m):
            for j in range(i + 1, m):
                parts.append(
                    f'<line x1="{xy[i,0]:.2f}" y1="{xy[i,1]:.2f}" x2="{xy[j,0]:.2f}" '
                    f'y2="{xy[j,1]:.2f}" stroke="#bbbbbb" stroke-width="1"/>')
        if tree_point is not None:
            t = xy[m]
            for i in range(m):
                parts.append(
                    f'<line x1="{t[0]:.2f}" y1="{t[1]:.2f}" x2="{xy[i,0]:.2f}" '
                    f'y2="{xy[i,1]:.2f}" stroke="#cc3311" stroke-width="1.6"/>')
                mx, my = (t[0] + xy[i, 0]) / 2.0, (t[1] + xy[i, 1]) / 2.0
                parts.append(
                    f'<text x="{mx:.2f}" y="{my:.2f}" font-size="9" '
                    f'fill="#555555">{branches[i]:.4g}</text>')
            parts.append(f'<circle cx="{t[0]:.2f}" cy="{t[1]:.2f}" r="3" fill="#cc3311"/>')
        for i in range(m):
            parts.append(f'<circle cx="{xy[i,0]:.2f}" cy="{xy[i,1]:.2f}" r="2.5" fill="#333333"/>')
            parts.append(
                f'<text x="{xy[i,0]+4:.2f}" y="{xy[i,1]-4:.2f}" font-size="10" '
                f'fill="#333333">{i+1}</text>')
        parts.append(
            f'<text x="{cx - cell/2 + 6:.2f}" y="{cy - cell/2 + 14:.2f}" font-size="10" '
            f'fill="#111111">{label}</text>')
    parts.append("</svg>")
    with open(out_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts) + "\n")
