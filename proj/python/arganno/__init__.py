"""Argument annotation pipeline: corpus ingestion for three annotation
schemes, a segment-recurrent transformer encoder with masked-position
classification, ensemble labeling, agreement metrics, and cross-scheme
correspondence tables.

The heavy lifting lives in the compiled `_arganno` extension; this package
re-exports its surface.
"""

try:
    from ._arganno import *  # noqa: F401,F403  (installed layout)
    from ._arganno import __doc__ as _core_doc  # noqa: F401
except ImportError:  # build-tree layout: extension next to the build dir
    from _arganno import *  # noqa: F401,F403

__version__ = "0.1.0"
