"""Exception hierarchy shared by every bleedmeter module."""


class BleedMeterError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(BleedMeterError, ValueError):
    pass


class DegenerateInput(BleedMeterError):
    """The input carries no usable signal (e.g. a constant plane)."""


class NoBleedingEdge(BleedMeterError):
    pass


class InvalidWidth(BleedMeterError, ValueError):
    pass


class EmptyRegion(BleedMeterError, ValueError):
    pass


class NoEdges(BleedMeterError):
    pass


class KernelFullUnsupported(BleedMeterError, ValueError):
    pass


class TooManyClusters(BleedMeterError, ValueError):
    pass


def check_same_shape(*arrays, names=None):
    """Raise DimensionMismatch unless all arrays share their leading 2D shape."""
    shapes = [tuple(a.shape[:2]) for a in arrays]
    if len(set(shapes)) > 1:
        label = ", ".join(names) if names else "inputs"
        raise DimensionMismatch(f"{label} differ in size: {shapes}")
