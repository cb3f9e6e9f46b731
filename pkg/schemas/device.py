"""
Pydantic schemas for the rotating-device thought experiment (Planck units throughout).
"""
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DeviceConfig(BaseModel):
    """Apparatus of mass m and size r operated for a duration t"""
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    mass_m: float = Field(..., gt=0.0, description="Device mass in Planck masses")
    size_r: float = Field(..., gt=0.0, description="Device size in Planck lengths")
    duration_t: float = Field(..., gt=0.0, description="Time between the two angle measurements, Planck times")


class FeasibilityReport(BaseModel):
    """Whether a device escapes gravitational collapse and respects causality"""
    model_config = ConfigDict(frozen=True)

    hoop_ok: bool = Field(..., description="r > m: no black hole forms")
    causal_ok: bool = Field(..., description="t >= r: the device fits inside its causal region")
    feasible: bool = Field(..., description="hoop_ok and causal_ok")

    @model_validator(mode="after")
    def _feasible_is_conjunction(self):
        if self.feasible != (self.hoop_ok and self.causal_ok):
            raise ValueError("feasible must equal hoop_ok AND causal_ok")
        return self


class AngleBound(BaseModel):
    """Smallest resolvable angle and the device that reaches it"""
    model_config = ConfigDict(frozen=True)

    delta_phi: float = Field(..., gt=0.0, description="Minimal angle, radians")
    argmin_m: float = Field(..., gt=0.0, description="Mass attaining the bound, Planck masses")
    argmin_t: float = Field(..., gt=0.0, description="Duration attaining the bound, Planck times")
