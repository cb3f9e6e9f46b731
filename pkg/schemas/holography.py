"""
Pydantic schemas for composite-state perturbation experiments.
"""
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class PerturbationMode(str, Enum):
    """How the per-qubit displacement magnitude is drawn"""
    FIXED_MAGNITUDE = "fixed-magnitude-random-direction"
    GAUSSIAN_MAGNITUDE = "gaussian-magnitude"


class PhaseConvention(str, Enum):
    """Global phase attached to each perturbed qubit"""
    PHASE_FREE = "phase-free"
    RANDOM_PHASE = "random-phase"


class PerturbationModel(BaseModel):
    """Independent per-qubit uncertainty of Hilbert-norm size epsilon"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    epsilon: float = Field(..., gt=0.0, lt=1.0, description="Hilbert-norm perturbation magnitude per qubit")
    mode: PerturbationMode = Field(default=PerturbationMode.FIXED_MAGNITUDE)
    phase_convention: PhaseConvention = Field(default=PhaseConvention.PHASE_FREE)


class McResult(BaseModel):
    """Monte Carlo estimate of E|Psi - Psi'|^2 for n perturbed qubits"""
    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(..., ge=1)
    epsilon: float = Field(..., gt=0.0, lt=1.0)
    trials: int = Field(..., ge=1)
    mean_dist_sq: float = Field(..., ge=0.0, le=4.0)
    std_error: float = Field(..., ge=0.0)
    seed: int = Field(..., ge=0, lt=2 ** 64, description="64-bit seed reproducing every trial")

    @property
    def accumulated(self) -> float:
        """n * epsilon^2, the leading-order prediction"""
        return self.n_qubits * self.epsilon ** 2
