"""Pydantic models for every JSON document the workbench reads or writes."""

from __future__ import annotations

from pydantic import BaseModel, Field, RootModel, model_validator


class FieldModel(BaseModel):
    """A point field: ``{"name": ..., "xi": ..., "etas": [...]}`` with printed expressions."""

    name: str = ""
    xi: str
    etas: list[str] = Field(min_length=1)


class CatalogModel(RootModel[list[FieldModel]]):
    pass


class PDEModel(BaseModel):
    """``2i u_t + Σ f_kj u_jk + Σ h_k u_k + h0 u = 0`` with printed coefficients."""

    N: int = Field(ge=1)
    f: list[list[str]]
    h: list[str]
    h0: str

    @model_validator(mode="after")
    def _check_shapes(self) -> PDEModel:
        if len(self.f) != self.N or any(len(row) != self.N for row in self.f):
            raise ValueError(f"f must be {self.N}x{self.N}")
        if len(self.h) != self.N:
            raise ValueError(f"h must have {self.N} entries")
        return self


class InitialDataModel(BaseModel):
    positions: list[float] = Field(min_length=1)
    velocities: list[float] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_data(self) -> InitialDataModel:
        if len(self.positions) != len(self.velocities):
            raise ValueError("positions and velocities must have the same length")
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("positions must be pairwise distinct")
        return self


class CheckModel(BaseModel):
    name: str
    status: str
    detail: str = ""
    data: dict = Field(default_factory=dict)


class RunReportModel(BaseModel):
    command: str
    status: str
    checks: list[CheckModel]
    elapsed_s: float
    payload: dict = Field(default_factory=dict)
