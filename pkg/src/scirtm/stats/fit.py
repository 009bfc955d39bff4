"""
Least-squares fits on monomial bases, with a jackknife refit.
"""

import dataclasses
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy.linalg


@dataclasses.dataclass(frozen=True)
class PowerFit:
    """
    Result of a monomial least-squares fit.

    Attributes
    ----------
    powers : tuple of int
        Exponents of the basis, in the order of ``coefficients``.
    coefficients : np.ndarray
        Fitted coefficient of each monomial.
    residuals : np.ndarray
        y - model(x) for every sample used.
    rank : int
        Numerical rank of the design matrix.
    n_samples : int
        Number of samples used.
    """

    powers: Tuple[int, ...]
    coefficients: np.ndarray
    residuals: np.ndarray
    rank: int
    n_samples: int

    @property
    def residual(self) -> float:
        """Root-mean-square residual."""
        if self.n_samples == 0:
            return 0.0
        return float(np.sqrt(np.mean(self.residuals**2)))

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        return sum(c * x**p for c, p in zip(self.coefficients, self.powers))


def fit_powers(
    x: Union[Sequence[float], np.ndarray, pd.Series],
    y: Union[Sequence[float], np.ndarray, pd.Series, None] = None,
    powers: Iterable[int] = (0, 1),
) -> PowerFit:
    """
    Fit y = sum_k c_k x^{p_k} by least squares.

    Parameters
    ----------
    x : sequence, np.ndarray, pd.Series or pd.DataFrame
        Abscissae. A two-column DataFrame or (n, 2) array may be passed
        instead of separate x and y.
    y : sequence, np.ndarray or pd.Series, optional
        Ordinates.
    powers : iterable of int, default (0, 1)
        Exponents of the monomial basis.

    Returns
    -------
    PowerFit
        Coefficients, residuals, rank and sample count.
    """
    x, y = _parse_samples(x, y)
    powers = tuple(int(p) for p in powers)
    if not powers:
        raise ValueError("powers must not be empty")
    if len(set(powers)) != len(powers):
        raise ValueError(f"powers must be distinct, got {powers}")

    # 丢弃 NaN / inf 样本
    mask = np.isfinite(x) & np.isfinite(y)
    x, y = x[mask], y[mask]
    if len(x) < len(powers):
        raise ValueError(
            f"Need at least {len(powers)} finite samples for {len(powers)} coefficients, got {len(x)}"
        )

    design = np.column_stack([x**p for p in powers])
    coefficients, _, rank, _ = scipy.linalg.lstsq(design, y)
    return PowerFit(
        powers=powers,
        coefficients=coefficients,
        residuals=y - design @ coefficients,
        rank=int(rank),
        n_samples=len(x),
    )


def jackknife(
    x: Union[Sequence[float], np.ndarray],
    y: Union[Sequence[float], np.ndarray],
    powers: Iterable[int],
    drop: Iterable[int],
) -> PowerFit:
    """
    Refit after removing the samples at the given indices.

    Parameters
    ----------
    x, y : sequence or np.ndarray
        Samples, as for :func:`fit_powers`.
    powers : iterable of int
        Exponents of the basis.
    drop : iterable of int
        Indices (negative allowed) of the samples to leave out.

    Returns
    -------
    PowerFit
        The fit on the remaining samples.
    """
    x, y = _parse_samples(x, y)
    keep = np.ones(len(x), dtype=bool)
    keep[list(drop)] = False
    return fit_powers(x[keep], y[keep], powers)


def _parse_samples(x, y) -> Tuple[np.ndarray, np.ndarray]:
    """Parse input data into x and y arrays."""

    if y is None:
        if isinstance(x, pd.DataFrame):
            if x.shape[1] != 2:
                raise ValueError("DataFrame must have exactly 2 columns")
            x, y = x.iloc[:, 0].values, x.iloc[:, 1].values
        elif isinstance(x, np.ndarray) and x.ndim == 2:
            if x.shape[1] == 2:
                x, y = x[:, 0], x[:, 1]
            elif x.shape[0] == 2:
                x, y = x[0, :], x[1, :]
            else:
                raise ValueError("2D array must have shape (n, 2) or (2, n)")
        else:
            raise TypeError("Without y, data must be a 2-column DataFrame or 2D array")

    try:
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
    except (TypeError, ValueError):
        raise TypeError("x and y must be numeric sequences")

    if len(x) != len(y):
        raise ValueError(f"x and y must have the same length, got {len(x)} and {len(y)}")

    return x, y
