"""Constraint model: the tagged union dispatched by the engines and CLI."""

from __future__ import annotations

from dataclasses import dataclass

from .table import AttributeSet, Schema


@dataclass(frozen=True)
class Constraint:
    """Base class; concrete constraints carry attribute positions."""

    def describe(self, schema: Schema) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class SpKey(Constraint):
    key: AttributeSet

    def __post_init__(self):
        if not self.key:
            raise ValueError("spkey needs a non-empty attribute set")

    def describe(self, schema: Schema) -> str:
        return f"spkey({','.join(schema.names(self.key))})"


@dataclass(frozen=True)
class SpFd(Constraint):
    lhs: AttributeSet
    rhs: AttributeSet

    def describe(self, schema: Schema) -> str:
        return (f"spfd({','.join(schema.names(self.lhs))} -> "
                f"{','.join(schema.names(self.rhs))})")


@dataclass(frozen=True)
class SpMvd(Constraint):
    lhs: AttributeSet
    rhs: AttributeSet

    def describe(self, schema: Schema) -> str:
        return (f"spmvd({','.join(schema.names(self.lhs))} ->> "
                f"{','.join(schema.names(self.rhs))})")


@dataclass(frozen=True)
class SpCj(Constraint):
    lhs: AttributeSet
    rhs: AttributeSet

    def __post_init__(self):
        if not self.lhs or not self.rhs:
            raise ValueError("spcj needs non-empty attribute sets on both sides")

    @property
    def singular(self) -> bool:
        return len(self.lhs) == 1 and len(self.rhs) == 1

    def describe(self, schema: Schema) -> str:
        return (f"spcj({','.join(schema.names(self.lhs))} x "
                f"{','.join(schema.names(self.rhs))})")


@dataclass(frozen=True)
class Nmvd(Constraint):
    lhs: AttributeSet
    rhs: AttributeSet

    def describe(self, schema: Schema) -> str:
        return (f"nmvd({','.join(schema.names(self.lhs))} ->> "
                f"{','.join(schema.names(self.rhs))})")
