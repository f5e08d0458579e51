"""Synthetic datasets on the sphere and the torus with ground-truth alignments.

Sphere nodes are Haar-uniform rotations R_i; the base point is the viewing
direction (third column of R_i) and the in-plane alignment between two nodes
is the angle of the closest planar rotation to the upper-left 2x2 block of
R_i^T R_j.  Torus nodes are area-uniform points (u_i, v_i) carrying an
independent uniform frame angle alpha_i; the alignment is alpha_i - alpha_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mfvdm.angles import TWO_PI, wrap_pi, wrap_two_pi
from mfvdm.errors import DegenerateAlignmentError, ParameterError
from mfvdm.rng import substream

__all__ = [
    "SphereTruth",
    "TorusTruth",
    "sample_so3_uniform",
    "optimal_inplane_angle",
    "sample_torus_uniform",
    "geodesic_distance",
    "make_truth",
]


def sample_so3_uniform(n: int, seed: int) -> np.ndarray:
    """Draw n rotation matrices i.i.d. from the Haar measure on SO(3).

    Normalized 4-dimensional Gaussians are uniform on the unit quaternions,
    which double-cover SO(3) uniformly.

    Parameters
    ----------
    n : int
        Number of samples, at least 1.
    seed : int
        Substream seed; identical seeds give bitwise-identical output.

    Returns
    -------
    rotations : (n, 3, 3) ndarray
        Stack of rotation matrices.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1. Got {n}.")
    rng = substream(seed, "so3")
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]

    rotations = np.empty((n, 3, 3))
    rotations[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    rotations[:, 0, 1] = 2.0 * (x * y - w * z)
    rotations[:, 0, 2] = 2.0 * (x * z + w * y)
    rotations[:, 1, 0] = 2.0 * (x * y + w * z)
    rotations[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    rotations[:, 1, 2] = 2.0 * (y * z - w * x)
    rotations[:, 2, 0] = 2.0 * (x * z - w * y)
    rotations[:, 2, 1] = 2.0 * (y * z + w * x)
    rotations[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return rotations


def optimal_inplane_angle(rot_i: np.ndarray, rot_j: np.ndarray) -> float:
    """In-plane angle minimizing the distance between two rotations.

    With Q the upper-left 2x2 block of R_i^T R_j, the planar rotation closest
    to Q in Frobenius norm has angle atan2(Q21 - Q12, Q11 + Q22).

    Parameters
    ----------
    rot_i, rot_j : (3, 3) ndarray
        Rotation matrices.

    Returns
    -------
    alpha : float
        Alignment angle in [0, 2*pi); antisymmetric under argument swap.

    Raises
    ------
    DegenerateAlignmentError
        If both atan2 arguments vanish (antipodal viewing directions).
    """
    q = rot_i.T @ rot_j
    num = q[1, 0] - q[0, 1]
    den = q[0, 0] + q[1, 1]
    if num == 0.0 and den == 0.0:
        raise DegenerateAlignmentError(
            "In-plane alignment is undefined for antipodal viewing directions."
        )
    return wrap_two_pi(np.arctan2(num, den))


def _inplane_angles(rotations: np.ndarray, ii: np.ndarray,
                    jj: np.ndarray) -> np.ndarray:
    """Vectorized optimal_inplane_angle over index arrays ii, jj."""
    a_i = rotations[ii, :, 0]
    b_i = rotations[ii, :, 1]
    a_j = rotations[jj, :, 0]
    b_j = rotations[jj, :, 1]
    den = np.sum(a_i * a_j, axis=1) + np.sum(b_i * b_j, axis=1)
    num = np.sum(b_i * a_j, axis=1) - np.sum(a_i * b_j, axis=1)
    degenerate = (num == 0.0) & (den == 0.0) & (ii != jj)
    if np.any(degenerate):
        raise DegenerateAlignmentError(
            f"{int(np.count_nonzero(degenerate))} pair(s) have antipodal "
            "viewing directions; alignment undefined."
        )
    return wrap_two_pi(np.arctan2(num, den))


@dataclass(frozen=True)
class SphereTruth:
    """Ground truth for the sphere dataset: rotations plus derived views."""

    rotations: np.ndarray
    views: np.ndarray = field(init=False)
    manifold: str = field(default="sphere", init=False)

    def __post_init__(self) -> None:
        rotations = np.asarray(self.rotations, dtype=float)
        if rotations.ndim != 3 or rotations.shape[1:] != (3, 3):
            raise ParameterError(
                f"rotations must have shape (n, 3, 3). Got {rotations.shape}."
            )
        object.__setattr__(self, "rotations", rotations)
        object.__setattr__(self, "views", rotations[:, :, 2].copy())

    @property
    def n(self) -> int:
        return self.rotations.shape[0]

    def pair_angle(self, i: int, j: int) -> float:
        """True alignment alpha_ij for a single pair."""
        return optimal_inplane_angle(self.rotations[i], self.rotations[j])

    def pair_angles(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        """True alignments for index arrays, vectorized."""
        ii = np.asarray(ii, dtype=np.int64)
        jj = np.asarray(jj, dtype=np.int64)
        return _inplane_angles(self.rotations, ii, jj)

    def geodesic(self, i: int, j: int) -> float:
        """Great-circle angle between viewing directions i and j."""
        dot = float(self.views[i] @ self.views[j])
        return float(np.arccos(np.clip(dot, -1.0, 1.0)))

    def geodesics(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        dots = np.sum(self.views[ii] * self.views[jj], axis=1)
        return np.arccos(np.clip(dots, -1.0, 1.0))

    def geodesic_block(self, block: np.ndarray) -> np.ndarray:
        """Distances from each node in ``block`` to every node, (b, n)."""
        dots = self.views[block] @ self.views.T
        return np.arccos(np.clip(dots, -1.0, 1.0))

    @property
    def max_geodesic(self) -> float:
        """Diameter of the base manifold (antipodal views)."""
        return float(np.pi)


@dataclass(frozen=True)
class TorusTruth:
    """Ground truth for the torus dataset: surface angles plus frame angles."""

    u: np.ndarray
    v: np.ndarray
    frame_angles: np.ndarray
    radius_major: float
    radius_minor: float
    manifold: str = field(default="torus", init=False)

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        frame_angles = np.asarray(self.frame_angles, dtype=float)
        if not (u.shape == v.shape == frame_angles.shape) or u.ndim != 1:
            raise ParameterError(
                "u, v and frame_angles must be 1-d arrays of equal length. "
                f"Got {u.shape}, {v.shape}, {frame_angles.shape}."
            )
        if not self.radius_major > self.radius_minor > 0.0:
            raise ParameterError(
                "Torus radii must satisfy R > r > 0. "
                f"Got R={self.radius_major}, r={self.radius_minor}."
            )
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "frame_angles", frame_angles)

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def positions(self) -> np.ndarray:
        """Embedded coordinates in 3-space, (n, 3)."""
        big_r, small_r = self.radius_major, self.radius_minor
        ring = big_r + small_r * np.cos(self.u)
        return np.stack(
            [ring * np.cos(self.v), ring * np.sin(self.v),
             small_r * np.sin(self.u)],
            axis=1,
        )

    def pair_angle(self, i: int, j: int) -> float:
        """True alignment alpha_ij = alpha_i - alpha_j."""
        return wrap_two_pi(self.frame_angles[i] - self.frame_angles[j])

    def pair_angles(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        return wrap_two_pi(self.frame_angles[ii] - self.frame_angles[jj])

    def geodesic(self, i: int, j: int) -> float:
        """Weighted flat-torus distance sqrt(r^2 du^2 + R^2 dv^2), wrapped."""
        du = wrap_pi(self.u[i] - self.u[j])
        dv = wrap_pi(self.v[i] - self.v[j])
        return float(np.hypot(self.radius_minor * du, self.radius_major * dv))

    def geodesics(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        du = wrap_pi(self.u[ii] - self.u[jj])
        dv = wrap_pi(self.v[ii] - self.v[jj])
        return np.hypot(self.radius_minor * du, self.radius_major * dv)

    def geodesic_block(self, block: np.ndarray) -> np.ndarray:
        du = wrap_pi(self.u[block][:, None] - self.u[None, :])
        dv = wrap_pi(self.v[block][:, None] - self.v[None, :])
        return np.hypot(self.radius_minor * du, self.radius_major * dv)

    @property
    def max_geodesic(self) -> float:
        return float(np.hypot(self.radius_minor * np.pi,
                              self.radius_major * np.pi))


def sample_torus_uniform(n: int, radius_major: float, radius_minor: float,
                         seed: int, area_uniform: bool = True) -> TorusTruth:
    """Draw n points on the embedded torus with i.i.d. uniform frame angles.

    The tube angle u is rejection-sampled with density proportional to
    R + r*cos(u) so that points are uniform with respect to surface area;
    ``area_uniform=False`` falls back to parameter-uniform u.

    Parameters
    ----------
    n : int
        Number of samples, at least 1.
    radius_major, radius_minor : float
        Torus radii R > r > 0.
    seed : int
        Substream seed.
    area_uniform : bool
        Sample uniformly w.r.t. surface area (default) or in parameters.

    Returns
    -------
    truth : TorusTruth
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1. Got {n}.")
    if not radius_major > radius_minor > 0.0:
        raise ParameterError(
            "Torus radii must satisfy R > r > 0. "
            f"Got R={radius_major}, r={radius_minor}."
        )
    rng = substream(seed, "torus")
    if area_uniform:
        u = np.empty(0)
        # acceptance rate (mean density)/(max density) = R/(R+r)
        while u.size < n:
            cand = rng.uniform(0.0, TWO_PI, size=2 * (n - u.size) + 16)
            accept = rng.random(cand.size) * (radius_major + radius_minor)
            u = np.concatenate(
                [u, cand[accept <= radius_major + radius_minor * np.cos(cand)]]
            )
        u = u[:n]
    else:
        u = rng.uniform(0.0, TWO_PI, size=n)
    v = rng.uniform(0.0, TWO_PI, size=n)
    frame_angles = rng.uniform(0.0, TWO_PI, size=n)
    return TorusTruth(u=u, v=v, frame_angles=frame_angles,
                      radius_major=radius_major, radius_minor=radius_minor)


def geodesic_distance(truth, i: int, j: int) -> float:
    """Base-manifold distance between nodes i and j of a ground truth."""
    return truth.geodesic(i, j)


def make_truth(manifold: str, n: int, seed: int, radius_major: float = 1.0,
               radius_minor: float = 0.2, area_uniform: bool = True):
    """Build the ground truth for a named manifold."""
    if manifold == "sphere":
        return SphereTruth(rotations=sample_so3_uniform(n, seed))
    if manifold == "torus":
        return sample_torus_uniform(n, radius_major, radius_minor, seed,
                                    area_uniform=area_uniform)
    raise ParameterError(f"Unknown manifold {manifold!r}; "
                         "expected 'sphere' or 'torus'.")
