"""Bundled presentations, pretending-function tables and boards."""
from __future__ import annotations

from importlib.resources import files


def read(name: str) -> str:
    return files(__name__).joinpath(name).read_text()


def available() -> list[str]:
    return sorted(p.name for p in files(__name__).iterdir() if p.suffix in {".pres", ".phi", ".dag"})


def presentation(name: str):
    from ..monoid import parse_presentation

    return parse_presentation(read(f"{name}.pres"))


def phi(name: str, monoid):
    from ..quotient import parse_phi

    return parse_phi(read(f"{name}.phi"), monoid)


def board(name: str):
    from ..games import parse_board

    return parse_board(read(f"{name}.dag"))[0]
