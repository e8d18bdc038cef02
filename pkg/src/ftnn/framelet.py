"""Undecimated multi-level tight framelet transform along mode 3.

The analysis operator ``W`` maps a length-``n`` tube to ``w`` bands of length
``n`` each, ``w = (r - 1) * levels + 1`` for a bank of ``r`` filters.  Bands
are ordered as the highpass bands of level 1, then those of level 2, and so
on, with the final lowpass band last.  Convolution is circular.  Every bank
in the registry satisfies the unitary extension principle, so ``W.T @ W`` is
the identity while ``W @ W.T`` is not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ftnn._validation import check_tensor
from ftnn.tensor import ShapeError


class ConfigurationError(ValueError):
    """Raised when a transform cannot be built for the requested extent."""


@dataclass(frozen=True)
class FilterBank:
    name: str
    filters: tuple  # h0 (lowpass) first, then the highpass filters

    @property
    def r(self):
        return len(self.filters)

    @property
    def lowpass(self):
        return self.filters[0]

    @property
    def highpass(self):
        return self.filters[1:]

    @staticmethod
    def anchor(h):
        return (len(h) - 1) // 2

    def support(self, levels):
        """Length of the level-``levels`` dilated lowpass filter."""
        return (len(self.lowpass) - 1) * 2 ** (levels - 1) + 1


def _bank(name, *filters):
    return FilterBank(name, tuple(np.asarray(h, dtype=np.float64) for h in filters))


_S2, _S6 = np.sqrt(2.0), np.sqrt(6.0)
_CANDIDATES = (
    _bank("haar", [0.5, 0.5], [0.5, -0.5]),
    _bank("linear",
          np.array([1, 2, 1]) / 4,
          np.array([1, 0, -1]) * _S2 / 4,
          np.array([-1, 2, -1]) / 4),
    _bank("cubic",
          np.array([1, 4, 6, 4, 1]) / 16,
          np.array([-1, -2, 0, 2, 1]) / 8,
          np.array([1, 0, -2, 0, 1]) * _S6 / 16,
          np.array([-1, 2, 0, -2, 1]) / 8,
          np.array([1, -4, 6, -4, 1]) / 16),
)


def _shift(h, m, dilation):
    return (m - FilterBank.anchor(h)) * dilation


def _filter(v, h, dilation):
    # y[n] = sum_m h[m] v[n + (m - anchor) * dilation], indices mod n
    out = np.zeros_like(v)
    for m, tap in enumerate(h):
        if tap:
            out += tap * np.roll(v, -_shift(h, m, dilation), axis=-1)
    return out


def _filter_adjoint(y, h, dilation):
    out = np.zeros_like(y)
    for m, tap in enumerate(h):
        if tap:
            out += tap * np.roll(y, _shift(h, m, dilation), axis=-1)
    return out


def _analyze_tubes(bank, levels, v):
    bands = []
    low = v
    for j in range(levels):
        d = 2 ** j
        bands.extend(_filter(low, h, d) for h in bank.highpass)
        low = _filter(low, bank.lowpass, d)
    bands.append(low)
    return np.concatenate(bands, axis=-1)


def _synthesize_tubes(bank, levels, y, n):
    nh = bank.r - 1
    low = y[..., levels * nh * n:]
    for j in reversed(range(levels)):
        d = 2 ** j
        acc = _filter_adjoint(low, bank.lowpass, d)
        for i, h in enumerate(bank.highpass):
            b = j * nh + i
            acc += _filter_adjoint(y[..., b * n:(b + 1) * n], h, d)
        low = acc
    return low


def _dense(bank, levels, n):
    # column c of W is the analysis of the c-th unit tube
    return _analyze_tubes(bank, levels, np.eye(n)).T


def _verify_bank(bank, n=16):
    w = _dense(bank, 1, n)
    err = np.max(np.abs(w.T @ w - np.eye(n)))
    if err > 1e-10:
        raise AssertionError(f"filter bank {bank.name!r} is not a tight frame (err={err:.2e})")
    return bank


FILTER_BANKS = {b.name: _verify_bank(b) for b in _CANDIDATES}


def get_bank(name):
    try:
        return FILTER_BANKS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown filter bank {name!r}; choose from {sorted(FILTER_BANKS)}") from None


@dataclass(frozen=True)
class FrameletSystem:
    """A filter bank, a level count and the tube length it acts on.

    Parameters
    ----------
    bank : FilterBank
    levels : int
        Number of decomposition levels ``l``.
    signal_len : int
        The mode-3 extent ``n`` of tensors this system transforms.
    """

    bank: FilterBank
    levels: int
    signal_len: int

    @property
    def w(self):
        return (self.bank.r - 1) * self.levels + 1

    @property
    def n_out(self):
        return self.w * self.signal_len

    def matrix(self):
        """Explicit ``(w*n, n)`` analysis matrix.  For tests and export only."""
        return _dense(self.bank, self.levels, self.signal_len)

    def analyze(self, x):
        x = check_tensor(x)
        if x.shape[2] != self.signal_len:
            raise ShapeError(
                f"system built for n3={self.signal_len}, got tensor with n3={x.shape[2]}")
        return _analyze_tubes(self.bank, self.levels, x)

    def synthesize(self, y):
        y = check_tensor(y)
        if y.shape[2] != self.n_out:
            raise ShapeError(
                f"expected transformed extent {self.n_out}, got {y.shape[2]}")
        return _synthesize_tubes(self.bank, self.levels, y, self.signal_len)

    # the solvers address every transform through forward/adjoint
    forward = analyze
    adjoint = synthesize


def build_system(bank, levels, n, strict=True):
    """Build a :class:`FrameletSystem` for tubes of length ``n``.

    With ``strict`` (the default) the tube must be at least as long as the
    dilated lowpass filter of the coarsest level, so filters never wrap onto
    themselves.  ``strict=False`` lifts that bound; the circular construction
    stays a tight frame regardless, which the dense-matrix checks rely on.
    """
    if isinstance(bank, str):
        bank = get_bank(bank)
    levels, n = int(levels), int(n)
    if levels < 1:
        raise ConfigurationError(f"levels must be >= 1, got {levels}")
    if n < 2:
        raise ConfigurationError(f"tube length must be >= 2, got {n}")
    if strict and n < bank.support(levels):
        raise ConfigurationError(
            f"{bank.name} framelet with {levels} levels needs n3 >= "
            f"{bank.support(levels)}, got n3={n}")
    return FrameletSystem(bank, levels, n)


def analyze(system, x):
    return system.analyze(x)


def synthesize(system, y):
    return system.synthesize(y)


class FrameletTransform(TransformerMixin, BaseEstimator):
    """Framelet analysis along mode 3 as a scikit-learn transformer.

    ``fit`` only records the tube length of the training tensor; ``transform``
    returns the ``(n1, n2, w*n3)`` coefficients and ``inverse_transform``
    applies the synthesis operator.
    """

    def __init__(self, filter="cubic", levels=4):
        self.filter = filter
        self.levels = levels

    def fit(self, X, y=None):
        X = check_tensor(X, "X")
        self.system_ = build_system(self.filter, self.levels, X.shape[2])
        self.n_bands_ = self.system_.w
        return self

    def transform(self, X):
        check_is_fitted(self, "system_")
        return self.system_.analyze(X)

    def inverse_transform(self, X):
        check_is_fitted(self, "system_")
        return self.system_.synthesize(X)
