"""scikit-learn style wrappers.

:class:`RandomnessThreshold` fits a single table and exposes T and its
certificate as fitted attributes. :class:`ThresholdTransformer` maps a
matrix of tables, one per row, to T and related columns so the
computation can sit inside a ``Pipeline`` or ``ColumnTransformer``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_table_array
from .errors import ZeroMargin
from .inference import DEFAULT_LEVELS, bootstrap_T
from .latent import optimal_two_point
from .table import CellProbabilities, ContingencyTable
from .threshold import RandomnessSpec, decide, threshold_from_counts, threshold_from_table

FEATURES = ("T", "phi", "sigma_ed", "chi2_over_n", "p_e", "p_d", "balance_b")


class RandomnessThreshold(BaseEstimator):
    """Threshold of sufficient randomness for one 2x2 table.

    Parameters
    ----------
    certificate : bool
        Also build the optimal two-point latent distribution.
    n_bootstrap : int
        Number of parametric bootstrap replicates; 0 disables the bootstrap.
        Needs integer counts.
    random_state : int
        Seed for the bootstrap.
    levels : tuple of float
        Bootstrap quantile levels.

    ``X`` is a 4-vector (n01, n11, n00, n10) or a 2x2 array laid out as
    [[n01, n11], [n00, n10]]; integer-valued input is treated as counts,
    anything else as cell probabilities.
    """

    def __init__(self, certificate=True, n_bootstrap=0, random_state=0, levels=DEFAULT_LEVELS):
        self.certificate = certificate
        self.n_bootstrap = n_bootstrap
        self.random_state = random_state
        self.levels = levels

    def fit(self, X, y=None):
        arr = check_table_array(X)
        counts = np.issubdtype(arr.dtype, np.integer) or (np.all(np.mod(arr, 1) == 0) and arr.sum() > 1)
        if counts:
            self.table_ = ContingencyTable.from_array(arr.astype(np.int64))
            self.report_ = threshold_from_counts(self.table_)
        else:
            self.table_ = None
            self.report_ = threshold_from_table(CellProbabilities(*arr.astype(float)))
        self.cells_ = self.report_.cells
        self.threshold_ = self.report_.T
        self.phi_ = self.report_.phi
        self.margins_ = self.report_.margins
        if self.certificate:
            self.construction_, self.latent_ = optimal_two_point(self.cells_)
        if self.n_bootstrap:
            if self.table_ is None:
                raise ValueError("bootstrap needs integer counts")
            self.bootstrap_ = bootstrap_T(self.table_, self.n_bootstrap, self.random_state, self.levels)
        return self

    def decide(self, R2_p, R2_r):
        check_is_fitted(self, "report_")
        return decide(RandomnessSpec(R2_p, R2_r), self.report_)


class ThresholdTransformer(TransformerMixin, BaseEstimator):
    """Row-wise T for a matrix of tables.

    Each row holds the four cells (n01, n11, n00, n10), as counts or as
    probabilities; rows are normalized by their sum. ``features`` selects
    output columns from ``FEATURES``. Rows with an empty margin raise
    :class:`ZeroMargin`, or give NaN when ``on_degenerate="nan"``.
    """

    def __init__(self, features=("T",), on_degenerate="raise"):
        self.features = features
        self.on_degenerate = on_degenerate

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self._check_params(X)
        self.n_features_in_ = X.shape[1]
        return self

    def _check_params(self, X):
        if X.shape[1] != 4:
            raise ValueError(f"expected 4 columns (n01, n11, n00, n10), got {X.shape[1]}")
        unknown = set(self.features) - set(FEATURES)
        if unknown:
            raise ValueError(f"unknown features {sorted(unknown)}; choose from {FEATURES}")
        if self.on_degenerate not in ("raise", "nan"):
            raise ValueError("on_degenerate must be 'raise' or 'nan'")
        if np.any(X < 0):
            raise ValueError("cells must be non-negative")

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=np.float64)
        self._check_params(X)
        P = X / X.sum(axis=1, keepdims=True)
        p01, p11, p00, p10 = P.T
        pe, pd = p11 + p10, p11 + p01
        var_prod = pe * (1 - pe) * pd * (1 - pd)
        bad = ~(var_prod > 0)
        if bad.any() and self.on_degenerate == "raise":
            raise ZeroMargin(f"{int(bad.sum())} row(s) have an empty margin, first at row {int(np.argmax(bad))}")
        sigma = p11 * p00 - p10 * p01
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = sigma / np.sqrt(var_prod)
        cols = {
            "T": 1 - np.abs(phi),
            "phi": phi,
            "sigma_ed": sigma,
            "chi2_over_n": phi * phi,
            "p_e": pe,
            "p_d": pd,
            "balance_b": np.minimum.reduce([pe, 1 - pe, pd, 1 - pd]),
        }
        out = np.column_stack([cols[f] for f in self.features])
        out[bad] = np.nan
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.features, dtype=object)
