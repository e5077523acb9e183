"""Process environment knobs applied before numerical libraries load."""

import os

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def configure_threads() -> None:
    """Cap BLAS/OpenMP pools to QVERIFY_THREADS when it is set.

    Must run before numpy is first imported in the process; the pools
    read these variables once at library load. Explicitly exported
    thread variables win over QVERIFY_THREADS, and an unparsable value
    is ignored rather than making the package unimportable.
    """
    requested = os.environ.get("QVERIFY_THREADS")
    if not requested:
        return
    try:
        count = max(1, int(requested))
    except ValueError:
        return
    for name in _THREAD_VARS:
        os.environ.setdefault(name, str(count))
