"""Ordered store of named formulas with alpha-equivalence lookup.

Library order is chronological: ``chrono_index`` is the position of an entry
in the file/list it was loaded from, which stands in for the order the
statements were introduced.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import tptp
from .tptp import Formula


class UnknownName(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no library entry named {name!r}")


@dataclass(frozen=True)
class LibraryEntry:
    name: str
    formula: Formula
    chrono_index: int


class FormulaLibrary:
    def __init__(self, pairs: list[tuple[str, Formula]]):
        self.entries: list[LibraryEntry] = []
        self._by_name: dict[str, LibraryEntry] = {}
        self._by_alpha: dict[tuple, LibraryEntry] = {}
        for name, formula in pairs:
            if name in self._by_name:
                raise ValueError(f"duplicate library name {name!r}")
            entry = LibraryEntry(name, formula, len(self.entries))
            self.entries.append(entry)
            self._by_name[name] = entry
            # earliest chronological entry wins for each alpha-class
            self._by_alpha.setdefault(tptp.alpha_key(formula), entry)

    @classmethod
    def from_problem(cls, problem: tptp.Problem) -> "FormulaLibrary":
        return cls([(af.name, af.formula) for af in problem.formulas])

    @classmethod
    def load(cls, path) -> "FormulaLibrary":
        with open(path, encoding="utf-8") as fh:
            return cls.from_problem(tptp.parse_problem(fh.read()))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> LibraryEntry:
        entry = self._by_name.get(name)
        if entry is None:
            raise UnknownName(name)
        return entry

    def lookup_alpha(self, formula: Formula) -> LibraryEntry | None:
        """Earliest entry alpha-equivalent to the given closed formula."""
        return self._by_alpha.get(tptp.alpha_key(formula))
