"""Exception hierarchy shared across the toolkit."""


class BrepScanError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(BrepScanError):
    """Interchange file is malformed or internally inconsistent."""


class TopologyError(BrepScanError):
    """Transition vectors violate a topological invariant."""


class GeometryError(BrepScanError):
    """Geometric data disagrees with topology beyond tolerance."""


class WalkError(BrepScanError):
    """A topological walk step is not applicable to the current entity."""


class DegenerateFaceError(BrepScanError):
    """Face area below tolerance."""


class DegenerateEdgeError(BrepScanError):
    """Coedge arc length below tolerance."""


class NonManifoldError(BrepScanError):
    """Mesh edge shared by more than two triangles."""


class SeedPlacementError(BrepScanError):
    """Dent seed placed on a non-planar host face."""


class EmptyNeighborhoodError(BrepScanError):
    """No candidate samples exist anywhere, even for fallback labeling."""


class DegenerateInputError(BrepScanError):
    """Too few distinct points for a frame or a fit."""


class CollinearError(BrepScanError):
    """Circle fit requested on collinear points."""


class LengthMismatchError(BrepScanError):
    """Prediction masks and vertex list have different lengths."""


class ConfigError(BrepScanError):
    """Pipeline configuration is invalid."""
