from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from cimcall.mapper.models import TilePlan


def render_plan_report(plan: TilePlan) -> str:
    """Human-readable tile plan."""
    rows, cols = plan.array_size
    lines = [
        f"Tile plan: {plan.tile_count} tiles of {rows}x{cols}, "
        f"quant {plan.spec.label}, {plan.device.bits_per_cell} bit(s)/cell",
        f"Mapped cells: {plan.mapped_cells} "
        f"(utilization {100.0 * plan.utilization:.2f}%)",
        "",
    ]
    for mapping in plan:
        in_dim, out_dim = mapping.weight_shape
        lines.append(
            f"[{mapping.stage}] {mapping.name}: {in_dim}x{out_dim} weights, "
            f"{mapping.layout.slices} slice(s) x 2 columns, "
            f"{len(mapping.group)} tile(s), "
            f"utilization {100.0 * mapping.utilization:.2f}%"
        )
        for block in mapping.blocks():
            r0, r1 = block["weight_rows"]
            c0, c1 = block["logical_cols"]
            lines.append(
                f"    tile {block['tile']:>4}: rows {r0}:{r1}, logical cols {c0}:{c1}"
            )
    return "\n".join(lines) + "\n"
