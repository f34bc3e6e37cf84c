"""Plane-to-plane homographies: normalized DLT, RANSAC and bilinear warping."""
import logging
from dataclasses import dataclass

import numpy as np

from pathfinder.errors import DimensionError, EstimationError, NumericalDegeneracy

Logger = logging.getLogger('pathfinder.geometry.homography')

SINGULAR_DETERMINANT = 1e-12
DEGENERATE_SPECTRUM = 1e-10


def _normalize_matrix(H):
    H = np.asarray(H, dtype=np.float64)
    peak = H.flat[np.argmax(np.abs(H))]
    if peak == 0:
        raise NumericalDegeneracy('homography is the zero matrix')
    return H / peak


@dataclass(frozen=True, eq=False)
class Homography:
    """3x3 projective map scaled so its largest-magnitude entry is +1."""

    H: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.float64)
        if H.shape != (3, 3):
            raise DimensionError('homography must be 3x3, got %s' % (H.shape,))
        H = _normalize_matrix(H)
        det = np.linalg.det(H)
        if abs(det) <= SINGULAR_DETERMINANT:
            raise NumericalDegeneracy('singular homography', {'det': det})
        object.__setattr__(self, 'H', H)

    def apply(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        mapped = points @ self.H[:, :2].T + self.H[:, 2]
        return mapped[:, :2] / mapped[:, 2:3]

    def inverse(self):
        return Homography(np.linalg.inv(self.H))

    def to_list(self):
        return [float(v) for v in self.H.reshape(-1)]

    @classmethod
    def from_list(cls, values):
        return cls(np.asarray(values, dtype=np.float64).reshape(3, 3))

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def translation(cls, dx, dy):
        return cls(np.array([[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]]))


def _hartley(points):
    centroid = points.mean(axis=0)
    spread = np.sqrt(((points - centroid) ** 2).sum(axis=1)).mean()
    if spread == 0:
        raise EstimationError('all correspondence points coincide')
    s = np.sqrt(2.0) / spread
    return np.array([[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]])


def _design_matrix(src, dst):
    n = src.shape[0]
    A = np.zeros((2 * n, 9))
    x, y = src[:, 0], src[:, 1]
    u, v = dst[:, 0], dst[:, 1]
    A[0::2, 0] = -x
    A[0::2, 1] = -y
    A[0::2, 2] = -1.0
    A[0::2, 6] = u * x
    A[0::2, 7] = u * y
    A[0::2, 8] = u
    A[1::2, 3] = -x
    A[1::2, 4] = -y
    A[1::2, 5] = -1.0
    A[1::2, 6] = v * x
    A[1::2, 7] = v * y
    A[1::2, 8] = v
    return A


def _as_matches(src, dst):
    src = np.asarray(src, dtype=np.float64).reshape(-1, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(-1, 2)
    if src.shape != dst.shape:
        raise DimensionError('source and destination point counts differ')
    return src, dst


def homography_dlt(src, dst):
    """Normalized direct linear transform from >= 4 correspondences."""
    src, dst = _as_matches(src, dst)
    if src.shape[0] < 4:
        raise EstimationError('homography needs at least 4 matches, got %d' % src.shape[0])
    T_src = _hartley(src)
    T_dst = _hartley(dst)
    src_n = src @ T_src[:2, :2].T + T_src[:2, 2]
    dst_n = dst @ T_dst[:2, :2].T + T_dst[:2, 2]
    A = _design_matrix(src_n, dst_n)
    _, s, vt = np.linalg.svd(A)
    if s.size < 8 or s[7] <= DEGENERATE_SPECTRUM * s[0]:
        raise EstimationError('degenerate correspondence configuration')
    H_n = vt[-1].reshape(3, 3)
    H = np.linalg.inv(T_dst) @ H_n @ T_src
    try:
        return Homography(H)
    except NumericalDegeneracy as e:
        raise EstimationError('DLT produced a singular homography: %s' % e)


def transfer_errors(H, src, dst):
    return np.linalg.norm(H.apply(src) - dst, axis=1)


def ransac_homography(src, dst, inlier_threshold_px=1.0, iterations=500, rng=None):
    """Fixed-iteration RANSAC; returns ``(Homography, inlier flags)``.

    The best consensus set (ties: lower summed inlier error) is refit with
    :func:`homography_dlt`; flags come from the refit model.
    """
    src, dst = _as_matches(src, dst)
    n = src.shape[0]
    if n < 4:
        raise EstimationError('RANSAC needs at least 4 matches, got %d' % n)
    if rng is None:
        raise EstimationError('RANSAC requires an explicit random stream')
    best_count, best_error, best_flags = 0, np.inf, None
    for _ in range(iterations):
        sample = rng.choice(n, 4)
        try:
            candidate = homography_dlt(src[sample], dst[sample])
        except (EstimationError, NumericalDegeneracy):
            continue
        errors = transfer_errors(candidate, src, dst)
        flags = errors < inlier_threshold_px
        count = int(flags.sum())
        error = float(errors[flags].sum())
        if count > best_count or (count == best_count and count > 0 and error < best_error):
            best_count, best_error, best_flags = count, error, flags
    if best_flags is None or best_count < 4:
        raise EstimationError('no model with at least 4 inliers after %d iterations' % iterations)
    H = homography_dlt(src[best_flags], dst[best_flags])
    flags = transfer_errors(H, src, dst) < inlier_threshold_px
    if flags.sum() < 4:
        raise EstimationError('refit model kept fewer than 4 inliers')
    Logger.debug('RANSAC consensus %d/%d (refit %d)' % (best_count, n, int(flags.sum())))
    return H, flags


def _bilinear(img, x, y):
    """Sample ``img`` at float coordinates; returns ``(values, inside)``."""
    height, width = img.shape
    tol = 1e-9
    inside = (x >= -tol) & (x <= width - 1 + tol) & (y >= -tol) & (y <= height - 1 + tol)
    xc = np.clip(x, 0.0, width - 1)
    yc = np.clip(y, 0.0, height - 1)
    x0 = np.floor(xc).astype(np.int64)
    y0 = np.floor(yc).astype(np.int64)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = xc - x0
    fy = yc - y0
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bottom = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    values = top * (1.0 - fy) + bottom * fy
    return np.where(inside, values, 0.0), inside


def source_coordinates(H, out_shape):
    """Inverse-mapped source coordinates for every output pixel."""
    height, width = out_shape
    rows, cols = np.mgrid[0:height, 0:width]
    pts = np.column_stack([cols.reshape(-1), rows.reshape(-1)]).astype(np.float64)
    src = H.inverse().apply(pts)
    return src[:, 0].reshape(out_shape), src[:, 1].reshape(out_shape)


def warp_image(img, H, out_shape=None):
    """Inverse-mapping warp of ``img`` by ``H`` with bilinear sampling.

    Output pixels whose source falls outside ``img`` are 0.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise DimensionError('warp_image expects a single-channel raster')
    out_shape = img.shape if out_shape is None else tuple(out_shape)
    x, y = source_coordinates(H, out_shape)
    values, _ = _bilinear(img, x, y)
    return values
