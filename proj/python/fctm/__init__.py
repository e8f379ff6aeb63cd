"""Correlated topic models via alternating MAP inference."""

try:
    from ._fctm_cpp import *  # noqa: F401,F403  (installed package layout)
    from ._fctm_cpp import __version__  # noqa: F401
except ImportError:
    # build-tree layout: the extension sits next to this package on sys.path
    from _fctm_cpp import *  # noqa: F401,F403
    from _fctm_cpp import __version__  # noqa: F401
