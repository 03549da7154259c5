"""Exception types shared across the package."""


class TreeStructureError(ValueError):
    """Edge list does not describe a spanning tree."""


class GramDriftError(RuntimeError):
    """Cached (B^T B)^-1 is numerically corrupted; a full recompute is needed."""


class DisconnectedSupportError(RuntimeError):
    """The support graph of finite edge weights is not connected."""
