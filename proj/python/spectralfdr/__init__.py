"""FDR-controlled principal subspace selection.

The heavy lifting lives in the compiled `_core` module; this package adds a
small convenience wrapper for the common one-shot selection call.
"""

from ._core import *  # noqa: F401,F403


def select(matrix, alpha, mode="auto", side="both", p=None, rank=None):
    """Pick the subspace dimension of `matrix` with FDR control at `alpha`.

    Returns the SelectionResult; `result.k_hat` is the chosen dimension and
    `result.curve.estimates` the per-dimension FDR estimates.
    """
    import numpy as np

    from . import _core

    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    symmetric = mode == "symmetric" or (
        mode == "auto"
        and matrix.shape[0] == matrix.shape[1]
        and np.abs(matrix - matrix.T).max()
        <= 1e-8 * max(1.0, np.abs(matrix).max())
    )
    spectrum = (
        _core.symmetric_spectrum(matrix, want_vectors=False)
        if symmetric
        else _core.singular_spectrum(matrix, want_vectors=False)
    )
    if p is None:
        config = _core.default_threshold(_core.spacings(spectrum), len(spectrum.values))
    else:
        config = _core.RankConfig(p)
    r_hat = rank if rank is not None else _core.rank_estimate(spectrum, config).r_hat
    k_max = _core.default_k_max(len(spectrum.values), r_hat)
    if symmetric:
        curve = _core.fdr_curve_symmetric(spectrum, r_hat, k_max)
    else:
        curve_side = {
            "left": _core.CurveSide.left,
            "right": _core.CurveSide.right,
            "both": _core.CurveSide.both,
        }[side]
        curve = _core.fdr_curve_asymmetric(spectrum, r_hat, k_max, curve_side)
    return _core.select_dimension(curve, alpha, config.p)
