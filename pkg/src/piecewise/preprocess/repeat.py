from __future__ import annotations

from ..frontend.elaborate import ElaboratedDesign


def detect_repeat_instances(design: ElaboratedDesign) -> list[list[str]]:
    """Instances grouped by module and resolved parameters, in elaboration order."""
    classes: dict[tuple, list[str]] = {}
    for path, info in design.instances.items():
        classes.setdefault(info.key, []).append(path)
    return list(classes.values())
