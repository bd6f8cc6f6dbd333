"""Observable transition labels and traces.

Choreography engines and the network engine use the same vocabulary so that
runs can be compared label by label.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Union

from .surface import format_value
from .syntax import Value


@dataclass(frozen=True, slots=True)
class ComL:
    sender: str
    value: Value
    receiver: str
    var: str


@dataclass(frozen=True, slots=True)
class SelL:
    sender: str
    receiver: str
    label: str


@dataclass(frozen=True, slots=True)
class ThenL:
    proc: str


@dataclass(frozen=True, slots=True)
class ElseL:
    proc: str


@dataclass(frozen=True, slots=True)
class GroupL:
    """A whole multicom or multisel consumed in one sequential step."""

    items: tuple[Union[ComL, SelL], ...]


Label = Union[ComL, SelL, ThenL, ElseL, GroupL]

TERMINATED = "Terminated"
OUT_OF_FUEL = "OutOfFuel"
STUCK = "Stuck"


def atoms(label: Label) -> tuple[Label, ...]:
    """Single-interaction labels making up ``label``."""
    if isinstance(label, GroupL):
        return label.items
    return (label,)


def atom_bag(labels) -> Counter:
    bag: Counter = Counter()
    for lbl in labels:
        bag.update(atoms(lbl))
    return bag


def format_label(label: Label) -> str:
    match label:
        case ComL(p, v, q, x):
            return f"{p}.{format_value(v)} -> {q}.{x}"
        case SelL(p, q, lbl):
            return f"{p} -> {q}[{lbl}]"
        case ThenL(p):
            return f"{p}: then"
        case ElseL(p):
            return f"{p}: else"
        case GroupL(items):
            return "{" + ", ".join(format_label(i) for i in items) + "}"
    raise TypeError(label)


def label_to_json(label: Label) -> dict:
    rec = {"kind": None, "from": None, "to": None, "var": None, "value": None,
           "label": None, "proc": None}
    match label:
        case ComL(p, v, q, x):
            rec.update(kind="com", **{"from": p, "to": q, "var": x, "value": format_value(v)})
        case SelL(p, q, lbl):
            rec.update(kind="sel", **{"from": p, "to": q, "label": lbl})
        case ThenL(p):
            rec.update(kind="then", proc=p)
        case ElseL(p):
            rec.update(kind="else", proc=p)
        case GroupL(items):
            rec.update(kind="group", items=[label_to_json(i) for i in items])
    return rec


@dataclass(frozen=True)
class Trace:
    labels: tuple[Label, ...] = ()
    status: str = TERMINATED
    truncated: bool = False

    def to_json(self) -> dict:
        out = {"trace": [label_to_json(lbl) for lbl in self.labels], "status": self.status}
        if self.truncated:
            out["truncated"] = True
        return out

    def render(self) -> str:
        lines = [format_label(lbl) for lbl in self.labels]
        lines.append(f"status: {self.status}")
        return "\n".join(lines) + "\n"
