"""Registry and loader for the object-language library corpus under lib/.

Each library is a plain .pl file consulted into a database on demand;
dependencies are resolved automatically (loading nn pulls in bb, etc.).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .database import Database
from .reader import parse_program
from .terms import PrologError

__all__ = ["LibraryFile", "LIBRARIES", "available_libraries", "library_source", "load_libraries"]


@dataclass(frozen=True, slots=True)
class LibraryFile:
    name: str
    provides: tuple[str, ...]  # name/arity strings, for documentation
    requires: tuple[str, ...] = ()


LIBRARIES: dict[str, LibraryFile] = {
    lib.name: lib
    for lib in (
        LibraryFile("prelude", ("member/2", "length/2", "append/3")),
        LibraryFile("findall", ("findall/3", "findall_result/3")),
        LibraryFile("cut", ("cut/0", "scope/1", "scope_result/3")),
        LibraryFile("bb", ("bound/1", "bb/4", "bb_result/4")),
        LibraryFile("nn", ("nn/3", "branch/6", "run_nn/3", "toplevel/1", "toplevel_result/3"), requires=("bb",)),
        LibraryFile("prism", ("msw/2", "prob/1", "prob/2", "analyze_prob/3", "msw_prob/6")),
        LibraryFile(
            "problog",
            ("fact/1", "is_true/2", "is_false/2", "problog/1", "problog/2", "analyze_problog/2"),
            requires=("prism", "not", "prelude"),
        ),
        LibraryFile(
            "engines",
            (
                "engines/1",
                "engines/2",
                "new_engine/3",
                "get/2",
                "return/1",
                "engines_result/4",
                "update/4",
                "run_engine/3",
                "run_engine_result/4",
            ),
            requires=("prelude",),
        ),
        LibraryFile("not", ("not/1",)),
        LibraryFile("nd_reset", ("nd_reset/3",)),
    )
}


def available_libraries() -> list[str]:
    return sorted(LIBRARIES)


def library_source(name: str) -> str:
    if name not in LIBRARIES:
        raise PrologError(f"unknown library: {name} (available: {', '.join(available_libraries())})")
    return resources.files(__package__).joinpath(f"lib/{name}.pl").read_text(encoding="utf-8")


def load_libraries(db: Database, names: list[str]) -> list[str]:
    """Consult the named libraries (or all of them for 'all') plus their
    dependencies, each at most once.  Returns the load order used."""
    if any(n == "all" for n in names):
        names = available_libraries()
    loaded: list[str] = []
    seen: set[str] = set()

    def load(name: str) -> None:
        if name in seen:
            return
        if name not in LIBRARIES:
            raise PrologError(f"unknown library: {name} (available: {', '.join(available_libraries())})")
        seen.add(name)
        for dep in LIBRARIES[name].requires:
            load(dep)
        db.consult(parse_program(library_source(name), origin=f"lib/{name}.pl"))
        loaded.append(name)

    for name in names:
        load(name)
    return loaded
