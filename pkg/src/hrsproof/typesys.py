"""Simple types: base types and arrows."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, slots=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self) -> str:
        left = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{left} -> {self.cod}"


Type = Union[Base, Arrow]


def arrows(doms: list[Type], cod: Type) -> Type:
    """Build ``d1 -> ... -> dn -> cod``."""
    for d in reversed(doms):
        cod = Arrow(d, cod)
    return cod


def uncurry(ty: Type) -> tuple[list[Type], Type]:
    """Split a type into its argument types and base result type."""
    doms: list[Type] = []
    while isinstance(ty, Arrow):
        doms.append(ty.dom)
        ty = ty.cod
    return doms, ty


def arity(ty: Type) -> int:
    return len(uncurry(ty)[0])
