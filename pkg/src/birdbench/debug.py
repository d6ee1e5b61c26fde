"""Diagnostic SVG rendering of world state.

Not a product feature: a quick way to eyeball level geometry and collapse
behaviour while designing levels or debugging the engine.
"""

from __future__ import annotations

from .geometry import Circle, world_polygons
from .physics import World

_COLORS = {
    "wood": "#b5813d",
    "ice": "#a8d8f0",
    "stone": "#8a8a8a",
}
_KIND_COLORS = {
    "pig": "#6abe30",
    "bird": "#d83434",
    "tnt": "#e0483e",
    "terrain": "#6b4b2a",
}


def world_svg(world: World, width: int = 840, height: int = 480,
              world_width: float = 84.0) -> str:
    scale = width / world_width
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#dff0f7"/>',
    ]
    for bid in sorted(world.bodies):
        body = world.bodies[bid]
        if not body.alive:
            continue
        color = _COLORS.get(body.material) or _KIND_COLORS.get(body.kind, "#444")
        if isinstance(body.shape, Circle):
            cx = body.x * scale
            cy = height - body.y * scale
            parts.append(
                f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{body.shape.r * scale:.1f}" '
                f'fill="{color}" stroke="#222"><title>{bid}</title></circle>'
            )
        else:
            for poly in world_polygons(body.shape, body.x, body.y, body.angle):
                pts = " ".join(f"{x * scale:.1f},{height - y * scale:.1f}" for x, y in poly)
                parts.append(
                    f'<polygon points="{pts}" fill="{color}" stroke="#222">'
                    f"<title>{bid}</title></polygon>"
                )
    lx = world.launch.x * scale
    ly = height - world.launch.y * scale
    parts.append(f'<circle cx="{lx:.1f}" cy="{ly:.1f}" r="4" fill="#000"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def save_svg(world: World, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(world_svg(world))
