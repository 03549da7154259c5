"""Backend selection for the hot per-edge kernels.

The compiled extension is used when available; set SPANTREE_BACKEND=python
to force the pure-NumPy fallback (e.g. for benchmarking the two backends).
"""

import os

if os.environ.get("SPANTREE_BACKEND", "").lower() == "python":
    from spantree.kernels import _pykernels as _impl
else:
    try:
        from spantree.kernels import _ckernels as _impl
    except ImportError:
        from spantree.kernels import _pykernels as _impl

BACKEND = _impl.BACKEND
reduced_gram_inverse = _impl.reduced_gram_inverse
cut_vector = _impl.cut_vector
swap_gram_inverse = _impl.swap_gram_inverse
gibbs_edge_update = _impl.gibbs_edge_update

from spantree.kernels._pykernels import partition_from_cut_vector  # noqa: E402

__all__ = [
    "BACKEND",
    "reduced_gram_inverse",
    "cut_vector",
    "swap_gram_inverse",
    "gibbs_edge_update",
    "partition_from_cut_vector",
]
