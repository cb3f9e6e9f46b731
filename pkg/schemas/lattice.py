"""
Pydantic schemas for finite-dimensional quantum mechanics on a 1-D lattice or circle.
"""
import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

STATE_NORM_TOLERANCE = 1e-10


class Topology(str, Enum):
    """Boundary conditions of the lattice"""
    LINE_PERIODIC = "line-periodic"
    CIRCLE = "circle"


class Lattice(BaseModel):
    """Evenly spaced periodic lattice of n_sites covering a physical length"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    n_sites: int = Field(..., ge=4, description="Number of sites (even)")
    length: float = Field(..., gt=0.0, description="Extent in natural units (circumference for a circle)")
    spacing: float = Field(..., gt=0.0, description="length / n_sites")
    topology: Topology = Field(default=Topology.LINE_PERIODIC)

    @model_validator(mode="after")
    def _consistent_spacing(self):
        if abs(self.spacing * self.n_sites - self.length) > 1e-12 * max(1.0, self.length):
            raise ValueError("spacing * n_sites must equal length")
        if self.n_sites % 2:
            raise ValueError("n_sites must be even")
        return self

    def coordinates(self) -> np.ndarray:
        """Site coordinates centred on 0: (j - N/2) * spacing"""
        return (np.arange(self.n_sites) - self.n_sites // 2) * self.spacing

    def momenta(self) -> np.ndarray:
        """Momentum grid 2*pi*j/L in FFT order, Nyquist mode at -N/2"""
        return 2.0 * math.pi * np.fft.fftfreq(self.n_sites, d=self.spacing)

    def angles(self) -> np.ndarray:
        """Site coordinates as angles on the circle, in [-pi, pi)"""
        return 2.0 * math.pi * self.coordinates() / self.length


class LatticeState(BaseModel):
    """Unit-norm complex amplitude vector in the position basis"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray = Field(..., description="Complex amplitudes, one per site")

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _check_amplitudes(cls, v):
        v = np.array(v, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-D vector")
        norm_sq = float(np.vdot(v, v).real)
        if abs(norm_sq - 1.0) > STATE_NORM_TOLERANCE:
            raise ValueError(f"state must be unit-norm within {STATE_NORM_TOLERANCE} (norm^2 {norm_sq!r})")
        v.setflags(write=False)
        return v

    @classmethod
    def normalized(cls, amplitudes) -> "LatticeState":
        v = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(amplitudes=v / norm)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)


class OperatorMatrix(BaseModel):
    """Square complex matrix acting on lattice states"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray = Field(..., description="Complex n x n matrix")
    label: str = Field("", description="Descriptive tag, e.g. 'X' or 'P'")

    @field_validator("entries", mode="before")
    @classmethod
    def _check_square(cls, v):
        v = np.array(v, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] == 0:
            raise ValueError("operator must be a non-empty square matrix")
        v.setflags(write=False)
        return v

    @property
    def dimension(self) -> int:
        return int(self.entries.shape[0])

    def hermiticity_error(self) -> float:
        """max |A - A^dagger| over all entries"""
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


class ClassicalCircle(BaseModel):
    """Free particle of mass m on a circle of radius r, H = p_phi^2 / (2 m r^2)"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    mass_m: float = Field(..., gt=0.0, description="Mass, natural units")
    radius_r: float = Field(..., gt=0.0, description="Radius, natural units")
    omega: float = Field(0.0, description="Angular velocity p_phi / (m r^2) for the reference p_phi")

    @classmethod
    def from_momentum(cls, mass: float, radius: float, p_phi: float = 0.0) -> "ClassicalCircle":
        return cls(mass_m=mass, radius_r=radius, omega=p_phi / (mass * radius * radius))

    @property
    def moment_of_inertia(self) -> float:
        return self.mass_m * self.radius_r ** 2

    def hamiltonian(self, p_phi):
        return np.asarray(p_phi) ** 2 / (2.0 * self.moment_of_inertia)


class SpreadReport(BaseModel):
    """Position and momentum spreads of a lattice state"""
    model_config = ConfigDict(frozen=True)

    delta_x: float = Field(..., ge=0.0)
    delta_p: float = Field(..., ge=0.0)
    circular_variance: float = Field(..., ge=0.0, le=1.0, description="1 - |mean resultant| of the position density")
    wrapped: bool = Field(False, description="Spread comparable to the lattice length; delta_x is unreliable")
    mean_x: Optional[float] = Field(None, description="Circular mean position")

    @property
    def product(self) -> float:
        return self.delta_x * self.delta_p
