"""Curve shortening flow on approximations of the topologist's sine curve."""

from ._core import (
    Polyline,
    SineflowError,
    a,
    annulus_area,
    circle,
    count_crossings,
    delta,
    evolve,
    evolve_snapshots,
    grim_reaper,
    grim_reaper_height,
    h1_cover,
    hausdorff_distance,
    inner_approx,
    levelset,
    load_polyline,
    local_length_experiment,
    outer_approx,
    polyline_distance,
    restrict_to_ball,
    save_polyline,
    tsc,
    verify,
)

__all__ = [
    "Polyline",
    "SineflowError",
    "a",
    "annulus_area",
    "circle",
    "count_crossings",
    "delta",
    "evolve",
    "evolve_snapshots",
    "grim_reaper",
    "grim_reaper_height",
    "h1_cover",
    "hausdorff_distance",
    "inner_approx",
    "levelset",
    "load_polyline",
    "local_length_experiment",
    "outer_approx",
    "polyline_distance",
    "restrict_to_ball",
    "save_polyline",
    "tsc",
    "verify",
]
