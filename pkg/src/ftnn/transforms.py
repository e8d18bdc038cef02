"""Mode-3 transforms the solvers can run under.

Every transform exposes ``forward`` (n3 -> w*n3), ``adjoint`` (w*n3 -> n3),
``w`` and ``signal_len``, with ``adjoint(forward(x)) == x``.
"""

from dataclasses import dataclass

import scipy.fft

from ftnn._validation import check_tensor
from ftnn.framelet import ConfigurationError, build_system
from ftnn.tensor import ShapeError

TRANSFORMS = ("framelet", "dct", "identity")


@dataclass(frozen=True)
class _Orthogonal:
    signal_len: int

    w = 1

    @property
    def n_out(self):
        return self.signal_len

    def _check(self, x):
        x = check_tensor(x)
        if x.shape[2] != self.signal_len:
            raise ShapeError(
                f"transform built for n3={self.signal_len}, got n3={x.shape[2]}")
        return x


class IdentityTransform(_Orthogonal):
    name = "identity"

    def forward(self, x):
        return self._check(x).copy()

    def adjoint(self, y):
        return self._check(y).copy()


class DCTTransform(_Orthogonal):
    """Orthonormal DCT-II along mode 3."""

    name = "dct"

    def forward(self, x):
        return scipy.fft.dct(self._check(x), type=2, norm="ortho", axis=2)

    def adjoint(self, y):
        return scipy.fft.idct(self._check(y), type=2, norm="ortho", axis=2)


def make_transform(kind, n3, filter="cubic", levels=4):
    """Build a transform by name for tubes of length ``n3``."""
    if kind == "framelet":
        return build_system(filter, levels, n3)
    if kind == "dct":
        return DCTTransform(int(n3))
    if kind == "identity":
        return IdentityTransform(int(n3))
    raise ConfigurationError(f"unknown transform {kind!r}; choose from {TRANSFORMS}")
