"""
Pydantic schemas for single-qubit states and Bloch-sphere grids.
"""
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

UNIT_NORM_TOLERANCE = 1e-12


class PureQubit(BaseModel):
    """Spin state cos(theta)|+> + e^{i phi} sin(theta)|->, half-angle convention"""
    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., ge=0.0, le=HALF_PI, description="Half Bloch polar angle, radians in [0, pi/2]")
    phi: float = Field(0.0, ge=0.0, lt=TWO_PI, description="Relative phase, radians in [0, 2pi)")

    @model_validator(mode="after")
    def _pole_is_phase_free(self):
        if self.theta == 0.0 and self.phi != 0.0:
            raise ValueError("phi must be 0 at theta = 0 (north pole)")
        return self


class BlochVector(BaseModel):
    """Unit 3-vector on the Bloch sphere"""
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    z: float

    @model_validator(mode="after")
    def _unit_norm(self):
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
            raise ValueError(f"Bloch vector must be unit-norm within {UNIT_NORM_TOLERANCE} (norm {norm!r})")
        return self

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        """Normalize any non-zero 3-vector onto the sphere"""
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if v.shape != (3,) or norm == 0.0 or not math.isfinite(norm):
            raise ValueError("Bloch vector needs three finite components, not all zero")
        v = v / norm
        return cls(x=float(v[0]), y=float(v[1]), z=float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


class SphereGrid(BaseModel):
    """Finite epsilon-resolution point set on the Bloch sphere"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: float = Field(..., gt=0.0, le=math.pi, description="Requested Bloch-angle resolution")
    points: np.ndarray = Field(..., description="(N, 3) array of unit vectors")
    mesh_diameter: float = Field(..., ge=0.0, description="Covering radius as a Bloch angle")

    _tree = PrivateAttr(default=None)

    @field_validator("points", mode="before")
    @classmethod
    def _check_points(cls, v):
        v = np.array(v, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] == 0:
            raise ValueError("points must be a non-empty (N, 3) array")
        norms = np.linalg.norm(v, axis=1)
        if np.max(np.abs(norms - 1.0)) > UNIT_NORM_TOLERANCE:
            raise ValueError("every grid point must be unit-norm")
        v.setflags(write=False)
        return v

    @model_validator(mode="after")
    def _resolution_met(self):
        if self.mesh_diameter > self.epsilon:
            raise ValueError(
                f"mesh_diameter {self.mesh_diameter} exceeds requested epsilon {self.epsilon}"
            )
        return self

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def tree(self):
        """Nearest-neighbour index over the grid points (built on first use)"""
        if self._tree is None:
            from scipy.spatial import cKDTree
            self._tree = cKDTree(self.points)
        return self._tree
