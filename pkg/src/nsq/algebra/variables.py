"""Declared variable sets: time, positions, velocities, wave function, momenta."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import sympy

from nsq.errors import UnknownIdentifierError

# Registered constants, always available to the parser
E0 = sympy.Symbol("E0")
CONSTANTS: dict[str, sympy.Expr] = {"i": sympy.I, "E0": E0}
RESERVED = {"i", "E0", "exp"}


@dataclass(frozen=True)
class VariableSet:
    time: str = "t"
    positions: tuple[str, ...] = ("x1",)
    velocities: tuple[str, ...] = ("v1",)
    wave: str | None = None
    momenta: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.positions:
            raise ValueError("VariableSet needs at least one position")
        if len(self.velocities) != len(self.positions):
            raise ValueError("Velocities must pair one-to-one with positions")
        if self.momenta and len(self.momenta) != len(self.positions):
            raise ValueError("Momenta must pair one-to-one with positions")
        names = self.names
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate variable names in {names}")
        clash = RESERVED.intersection(names)
        if clash:
            raise ValueError(f"Reserved identifiers used as variables: {sorted(clash)}")

    @classmethod
    def standard(
        cls,
        n: int,
        wave: bool = False,
        momenta: bool = False,
        position_prefix: str = "x",
        velocity_prefix: str = "v",
    ) -> VariableSet:
        """t, x1..xN, v1..vN and optionally u and p1..pN."""
        if n < 1:
            raise ValueError(f"N must be >= 1, got {n}")
        return cls(
            time="t",
            positions=tuple(f"{position_prefix}{k}" for k in range(1, n + 1)),
            velocities=tuple(f"{velocity_prefix}{k}" for k in range(1, n + 1)),
            wave="u" if wave else None,
            momenta=tuple(f"p{k}" for k in range(1, n + 1)) if momenta else (),
        )

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def names(self) -> tuple[str, ...]:
        """All declared names in canonical order: t < x < v < u < p."""
        wave = (self.wave,) if self.wave else ()
        return (self.time, *self.positions, *self.velocities, *wave, *self.momenta)

    @cached_property
    def t(self) -> sympy.Symbol:
        return sympy.Symbol(self.time)

    @cached_property
    def x(self) -> tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.positions)

    @cached_property
    def v(self) -> tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.velocities)

    @cached_property
    def u(self) -> sympy.Symbol | None:
        return sympy.Symbol(self.wave) if self.wave else None

    @cached_property
    def p(self) -> tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.momenta)

    @cached_property
    def a(self) -> tuple[sympy.Symbol, ...]:
        """Second-derivative placeholders, only used inside prolongations."""
        return tuple(sympy.Symbol(f"a{k}") for k in range(1, self.n + 1))

    @cached_property
    def ordering(self) -> tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.names)

    def lookup(self, name: str, position: int = 0) -> sympy.Expr:
        """Resolve an identifier to a declared symbol or registered constant."""
        if name in CONSTANTS:
            return CONSTANTS[name]
        if name in self.names:
            return sympy.Symbol(name)
        raise UnknownIdentifierError(name, position)

    def with_momenta(self) -> VariableSet:
        if self.momenta:
            return self
        return VariableSet(
            time=self.time,
            positions=self.positions,
            velocities=self.velocities,
            wave=self.wave,
            momenta=tuple(f"p{k}" for k in range(1, self.n + 1)),
        )

    def with_wave(self, name: str = "u") -> VariableSet:
        return VariableSet(
            time=self.time,
            positions=self.positions,
            velocities=self.velocities,
            wave=name,
            momenta=self.momenta,
        )
