# Copyright (C) 2026 the soundfusion authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the soundfusion C++ core."""

try:
    from ._core import *  # noqa: F401,F403
except ImportError:
    # In the build tree the extension sits next to this package on
    # PYTHONPATH rather than inside it.
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
