"""Published drag coefficients of the confined-cylinder benchmark (beta = 0.59)."""
from __future__ import annotations

MESHES = ("M1", "M2", "M3", "M4", "M5")

# Wi -> K on meshes M1..M5
DRAG_TABLE: dict[float, tuple[float, ...]] = {
    0.1: (130.3706, 130.3613, 130.3620, 130.3625, 130.3626),
    0.2: (126.6609, 126.6288, 126.6254, 126.6252, 126.6252),
    0.3: (123.2622, 123.2008, 123.1922, 123.1913, 123.1912),
    0.4: (120.6953, 120.6080, 120.5931, 120.5914, 120.5912),
    0.5: (118.9615, 118.8505, 118.8291, 118.8263, 118.8260),
    0.6: (117.9542, 117.8048, 117.7798, 117.7756, 117.7752),
    0.7: (117.5430, 117.3416, 117.3193, 117.3155, 117.3157),
    0.75: (117.5108, 117.2940, 117.2747, 117.2733, 117.2752),
    0.8: (117.5639, 117.3539, 117.3365, 117.3395, 117.3454),
    0.85: (117.6809, 117.5116, 117.4925, 117.5016, 117.5138),
    0.88: (117.7743, 117.6495, 117.6265, 117.6402, 117.6567),
    0.89: (117.8085, 117.7022, 117.6774, 117.6927, 117.7107),
    0.9: (117.8442, 117.7584, 117.7312, 117.7483, 117.7678),
}


def reference_drag(wi: float, mesh: str = "M1") -> float | None:
    """Tabulated K for ``mesh`` at ``wi``, or None if not listed."""
    col = MESHES.index(mesh.upper())
    for w, row in DRAG_TABLE.items():
        if abs(w - wi) < 1e-9:
            return row[col]
    return None
