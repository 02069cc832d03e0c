"""Size guards.

Every guard is overridable per call; these are the documented defaults.
STONEWORK_GUARD in the environment overrides the frame-size guard.
"""

import os

# Hard cap on the number of elements a constructed frame may have.
FRAME_GUARD = 2 ** 20

# Saturation enumerates all sieves; exponential in the carrier size.
SATURATION_GUARD = 16

# elemental_space materialises the full powerset of its input set.
ELEMENTAL_GUARD = 5

# The free distributive lattice is materialised only up to this many generators.
FREE_DLAT_GUARD = 4


# process-wide override, set by the CLI --guard flag
_frame_guard_override = None


def set_frame_guard_override(value):
    global _frame_guard_override
    _frame_guard_override = value


def frame_guard(override=None):
    if override is not None:
        return override
    if _frame_guard_override is not None:
        return _frame_guard_override
    env = os.environ.get("STONEWORK_GUARD")
    if env is not None:
        return int(env)
    return FRAME_GUARD


def guards_in_effect(frame_override=None):
    """Snapshot of the active guards, reported in CLI output headers."""
    return {
        "frame_guard": frame_guard(frame_override),
        "saturation_guard": SATURATION_GUARD,
        "elemental_guard": ELEMENTAL_GUARD,
        "free_dlat_guard": FREE_DLAT_GUARD,
    }
